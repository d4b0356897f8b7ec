//! Globally adaptive Gauss–Kronrod (10/21) quadrature on finite intervals.

// Abscissae of the 21-point Kronrod rule on [-1, 1], descending, positive half.
// Odd indices are the 10-point Gauss abscissae.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_736,
    0.973_906_528_517_171_720_078,
    0.930_157_491_355_708_226_001,
    0.865_063_366_688_984_510_732,
    0.780_817_726_586_416_897_064,
    0.679_409_568_299_024_406_234,
    0.562_757_134_668_604_683_339,
    0.433_395_394_129_247_190_799,
    0.294_392_862_701_460_198_131,
    0.148_874_338_981_631_210_885,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278,
    0.032_558_162_307_964_727_479,
    0.054_755_896_574_351_996_031,
    0.075_039_674_810_919_952_767,
    0.093_125_454_583_697_605_535,
    0.109_387_158_802_297_641_900,
    0.123_491_976_262_065_851_08,
    0.134_709_217_311_473_325_93,
    0.142_775_938_577_060_080_80,
    0.147_739_104_901_338_491_37,
    0.149_445_554_002_916_905_66,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_594,
    0.149_451_349_150_580_593_15,
    0.219_086_362_515_982_044_00,
    0.269_266_719_309_996_355_09,
    0.295_524_224_714_752_870_17,
];

#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs: 1e-15,
            rel: 1e-12,
            max_intervals: 400,
        }
    }
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Tolerance {
            abs,
            rel,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Integral {
    pub value: f64,
    pub abs_err: f64,
    pub intervals: usize,
    pub converged: bool,
}

/// One 21-point Kronrod panel on [a, b]: (value, error estimate).
pub fn gk21<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let centr = 0.5 * (a + b);
    let hlgth = 0.5 * (b - a);
    let fc = f(centr);
    let mut resg = 0.0;
    let mut resk = WGK[10] * fc;
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let absc = hlgth * XGK[j];
        let f1 = f(centr - absc);
        let f2 = f(centr + absc);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let reskh = 0.5 * resk;
    let mut resasc = WGK[10] * (fc - reskh).abs();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - reskh).abs() + (fv2[j] - reskh).abs());
    }
    let result = resk * hlgth;
    let resabs = resabs * hlgth.abs();
    let resasc = resasc * hlgth.abs();
    let mut err = ((resk - resg) * hlgth).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    (result, err)
}

/// Adaptive integral of `f` over [a, b].
pub fn integrate<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Integral {
    integrate_with_breaks(f, &[a, b], tol)
}

/// Adaptive integral over [points[0], points[last]] with the given initial
/// subdivision. Useful when the integrand has a known sharp feature.
pub fn integrate_with_breaks<F: FnMut(f64) -> f64>(
    mut f: F,
    points: &[f64],
    tol: Tolerance,
) -> Integral {
    assert!(points.len() >= 2, "need at least one interval");
    let mut segs: Vec<(f64, f64, f64, f64)> = Vec::with_capacity(tol.max_intervals.max(points.len()));
    for w in points.windows(2) {
        if w[1] > w[0] {
            let (v, e) = gk21(&mut f, w[0], w[1]);
            segs.push((w[0], w[1], v, e));
        }
    }
    if segs.is_empty() {
        return Integral {
            value: 0.0,
            abs_err: 0.0,
            intervals: 0,
            converged: true,
        };
    }
    loop {
        let total: f64 = segs.iter().map(|s| s.2).sum();
        let err: f64 = segs.iter().map(|s| s.3).sum();
        let target = tol.abs.max(tol.rel * total.abs());
        if err <= target || segs.len() >= tol.max_intervals {
            return Integral {
                value: total,
                abs_err: err,
                intervals: segs.len(),
                converged: err <= target,
            };
        }
        let (imax, _) = segs
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, s)| if s.3 > acc.1 { (i, s.3) } else { acc });
        let (a, b, _, _) = segs[imax];
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            // interval cannot be split further in floating point
            return Integral {
                value: total,
                abs_err: err,
                intervals: segs.len(),
                converged: false,
            };
        }
        let (v1, e1) = gk21(&mut f, a, mid);
        let (v2, e2) = gk21(&mut f, mid, b);
        segs[imax] = (a, mid, v1, e1);
        segs.push((mid, b, v2, e2));
    }
}
