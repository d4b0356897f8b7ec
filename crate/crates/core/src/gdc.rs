//! The empirical statistic 𝒱̂²_b in three equivalent forms, the standardized
//! statistic n𝒱̂²_b/σ̂², and the population functional 𝒱²_b.

use crate::error::{GdcError, Result};
use crate::premetric::PremetricB;

pub const MIN_SAMPLES: usize = 4;
/// The O(n²) oracle refuses larger inputs.
pub const ORACLE_MAX_N: usize = 2000;
/// Negative round-off above this is clamped to zero.
pub const NEG_CLAMP: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PopulationModel {
    pub p: [f64; 3],
    pub mu: [f64; 3],
}

impl PopulationModel {
    pub fn new(p: [f64; 3], mu: [f64; 3]) -> Result<Self> {
        if p.iter().any(|&v| !(v >= 0.0)) || (p.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(GdcError::InvalidParameter(format!("genotype probabilities {p:?}")));
        }
        Ok(PopulationModel { p, mu })
    }

    pub fn mu_y(&self) -> f64 {
        self.p.iter().zip(&self.mu).map(|(p, m)| p * m).sum()
    }
}

pub(crate) fn clamp_nonneg(v: f64) -> f64 {
    if v < 0.0 && v > -NEG_CLAMP {
        0.0
    } else {
        v
    }
}

pub(crate) fn check_phenotype(y: &[f64]) -> Result<()> {
    if y.len() < MIN_SAMPLES {
        return Err(GdcError::TooFewSamples {
            n: y.len(),
            min: MIN_SAMPLES,
        });
    }
    if let Some(i) = y.iter().position(|v| !v.is_finite()) {
        return Err(GdcError::NonFinitePhenotype(i));
    }
    Ok(())
}

fn check_pair(n_x: usize, y: &[f64]) -> Result<()> {
    if n_x != y.len() {
        return Err(GdcError::DimensionMismatch {
            expected: y.len(),
            got: n_x,
        });
    }
    check_phenotype(y)
}

fn check_calls(x: &[u8]) -> Result<()> {
    match x.iter().find(|&&g| g > 2) {
        Some(g) => Err(GdcError::Domain(format!("hard call {g} (missing values must be filtered first)"))),
        None => Ok(()),
    }
}

fn check_dosages(x: &[f64]) -> Result<()> {
    match x.iter().find(|g| !(0.0..=2.0).contains(*g)) {
        Some(g) => Err(GdcError::Domain(format!("dosage {g} outside [0, 2]"))),
        None => Ok(()),
    }
}

pub fn mean(y: &[f64]) -> f64 {
    y.iter().sum::<f64>() / y.len() as f64
}

pub fn centered(y: &[f64]) -> Vec<f64> {
    let m = mean(y);
    y.iter().map(|v| v - m).collect()
}

/// Sums of `r` over each genotype class.
#[inline]
pub fn class_sums(x: &[u8], r: &[f64]) -> [f64; 3] {
    let mut s = [0.0; 3];
    for (&g, &v) in x.iter().zip(r) {
        s[g as usize] += v;
    }
    s
}

/// Per-class sums of r with the total removed in proportion to the class
/// counts, i.e. the class sums of (I − H)r. Cleans the round-off left by a
/// first centering pass and gives exact zeros when only one class occurs.
pub fn centered_class_sums(x: &[u8], r: &[f64]) -> [f64; 3] {
    centered_class_sums_counts(x, r).0
}

/// [`centered_class_sums`] together with the class counts, in one pass.
pub fn centered_class_sums_counts(x: &[u8], r: &[f64]) -> ([f64; 3], [usize; 3]) {
    let mut s = [0.0; 3];
    let mut c = [0usize; 3];
    for (&g, &v) in x.iter().zip(r) {
        s[g as usize] += v;
        c[g as usize] += 1;
    }
    let total = s[0] + s[1] + s[2];
    let n = x.len() as f64;
    for g in 0..3 {
        s[g] -= total * (c[g] as f64 / n);
    }
    (s, c)
}

/// ‖Uᵗr‖² for the canonical features, given the per-class sums of r.
#[inline]
pub fn feature_norm_from_sums(pm: &PremetricB, s: &[f64; 3]) -> f64 {
    pm.hom_weight() * (s[2] - s[0]).powi(2) + pm.het_weight() * s[1].powi(2)
}

/// ‖Uᵗr‖² for interpolated dosage features.
pub fn feature_norm_dosage(pm: &PremetricB, x: &[f64], r: &[f64]) -> f64 {
    let (mut a, mut b) = (0.0, 0.0);
    let (mut sa, mut sb, mut sr) = (0.0, 0.0, 0.0);
    for (&g, &v) in x.iter().zip(r) {
        a += g * v;
        b += (g - 1.0).abs() * v;
        sa += g;
        sb += (g - 1.0).abs();
        sr += v;
    }
    let n = x.len() as f64;
    a -= sa * sr / n;
    b -= sb * sr / n;
    pm.hom_weight() * a * a + pm.het_weight() * b * b
}

/// Reference estimator: double-centred distance matrices, O(n²).
/// Test use only. Evaluated in double-double arithmetic: at weak
/// association the centred entries cancel by many orders of magnitude.
pub fn dcov_oracle(pm: &PremetricB, x: &[u8], y: &[f64]) -> Result<f64> {
    check_pair(x.len(), y)?;
    check_calls(x)?;
    let n = x.len();
    if n > ORACLE_MAX_N {
        return Err(GdcError::InvalidParameter(format!("oracle capped at n = {ORACLE_MAX_N}, got {n}")));
    }
    let dx: Vec<Dd> = (0..n * n).map(|k| Dd::from(pm.distance(x[k / n], x[k % n]))).collect();
    let dy: Vec<Dd> = (0..n * n)
        .map(|k| {
            let d = Dd::diff(y[k / n], y[k % n]);
            d.mul(d).scale(0.5)
        })
        .collect();
    let cx = double_center(&dx, n);
    let cy = double_center(&dy, n);
    let s = cx.iter().zip(&cy).fold(Dd::from(0.0), |acc, (a, b)| acc.add(a.mul(*b)));
    Ok(clamp_nonneg(s.div(n as f64).div(n as f64).hi))
}

fn double_center(d: &[Dd], n: usize) -> Vec<Dd> {
    let nf = n as f64;
    let sum = |it: &mut dyn Iterator<Item = Dd>| it.fold(Dd::from(0.0), Dd::add);
    let row: Vec<Dd> = (0..n).map(|i| sum(&mut d[i * n..(i + 1) * n].iter().copied()).div(nf)).collect();
    let col: Vec<Dd> = (0..n).map(|j| sum(&mut (0..n).map(|i| d[i * n + j])).div(nf)).collect();
    let grand = sum(&mut row.iter().copied()).div(nf);
    (0..n * n)
        .map(|k| d[k].add(row[k / n].neg()).add(col[k % n].neg()).add(grand))
        .collect()
}

/// Unevaluated sum hi + lo with |lo| ≤ ulp(hi)/2.
#[derive(Debug, Clone, Copy)]
struct Dd {
    hi: f64,
    lo: f64,
}

fn two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    let bb = s - a;
    Dd { hi: s, lo: (a - (s - bb)) + (b - bb) }
}

impl Dd {
    fn from(v: f64) -> Self {
        Dd { hi: v, lo: 0.0 }
    }

    fn diff(a: f64, b: f64) -> Self {
        two_sum(a, -b)
    }

    fn neg(self) -> Self {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    fn add(self, o: Dd) -> Self {
        let s = two_sum(self.hi, o.hi);
        let t = two_sum(self.lo, o.lo);
        let v = two_sum(s.hi, s.lo + t.hi);
        two_sum(v.hi, v.lo + t.lo)
    }

    fn mul(self, o: Dd) -> Self {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p);
        two_sum(p, e + (self.hi * o.lo + self.lo * o.hi))
    }

    fn scale(self, c: f64) -> Self {
        self.mul(Dd::from(c))
    }

    fn div(self, c: f64) -> Self {
        let q = self.hi / c;
        let r = self.add(Dd::from(q).mul(Dd::from(c)).neg());
        two_sum(q, r.hi / c)
    }
}

/// Feature form: (1/n²)‖Uᵗ(I − H)Y‖², O(n).
pub fn dcov_fast(pm: &PremetricB, x: &[u8], y: &[f64]) -> Result<f64> {
    check_pair(x.len(), y)?;
    check_calls(x)?;
    let r = centered(y);
    let n = x.len() as f64;
    Ok(clamp_nonneg(feature_norm_from_sums(pm, &centered_class_sums(x, &r)) / (n * n)))
}

/// Feature form with interpolated dosage features.
pub fn dcov_fast_dosage(pm: &PremetricB, x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x.len(), y)?;
    check_dosages(x)?;
    let r = centered(y);
    let n = x.len() as f64;
    Ok(clamp_nonneg(feature_norm_dosage(pm, x, &r) / (n * n)))
}

/// Kernel form: (1/n²) Σᵢⱼ k_b(Xᵢ, Xⱼ)(Yᵢ − Ȳ)(Yⱼ − Ȳ), O(n²).
pub fn dcov_kernel_form(pm: &PremetricB, x: &[u8], y: &[f64]) -> Result<f64> {
    check_pair(x.len(), y)?;
    check_calls(x)?;
    let n = x.len();
    if n > ORACLE_MAX_N {
        return Err(GdcError::InvalidParameter(format!("kernel form capped at n = {ORACLE_MAX_N}, got {n}")));
    }
    let r = centered(y);
    let mut s = 0.0;
    for i in 0..n {
        let mut row = 0.0;
        for j in 0..n {
            row += pm.kernel(x[i], x[j]) * r[j];
        }
        s += r[i] * row;
    }
    Ok(clamp_nonneg(s / (n * n) as f64))
}

/// Returns (k, σ̂²) with k = n𝒱̂²/σ̂² and σ̂² = (1/n)Σ(Yⱼ − Ȳ)².
pub fn standardized_statistic(pm: &PremetricB, x: &[u8], y: &[f64]) -> Result<(f64, f64)> {
    check_pair(x.len(), y)?;
    check_calls(x)?;
    let r = centered(y);
    let rss = residual_ss(&r, y)?;
    let num = feature_norm_from_sums(pm, &centered_class_sums(x, &r));
    Ok((clamp_nonneg(num / rss), rss / y.len() as f64))
}

pub fn standardized_statistic_dosage(pm: &PremetricB, x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    check_pair(x.len(), y)?;
    check_dosages(x)?;
    let r = centered(y);
    let rss = residual_ss(&r, y)?;
    let num = feature_norm_dosage(pm, x, &r);
    Ok((clamp_nonneg(num / rss), rss / y.len() as f64))
}

/// Σr², rejecting responses that carry no variation relative to `scale`.
pub(crate) fn residual_ss(r: &[f64], scale: &[f64]) -> Result<f64> {
    let rss: f64 = r.iter().map(|v| v * v).sum();
    let ss: f64 = scale.iter().map(|v| v * v).sum();
    if !(rss > 1e-24 * ss) || rss == 0.0 {
        return Err(GdcError::DegenerateResponse);
    }
    Ok(rss)
}

/// Population functional 𝒱²_b from genotype probabilities and class means.
pub fn population_dcov(pm: &PremetricB, model: &PopulationModel) -> f64 {
    let [p0, p1, p2] = model.p;
    let [m0, m1, m2] = model.mu;
    let my = model.mu_y();
    pm.hom_weight() * (-p0 * (m0 - my) + p2 * (m2 - my)).powi(2) + pm.het_weight() * (p1 * (m1 - my)).powi(2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pm(b: f64) -> PremetricB {
        PremetricB::new(b).unwrap()
    }

    #[test]
    fn small_instance_three_forms() {
        let x = [0u8, 1, 2, 1];
        let y = [1.0, 2.0, 3.0, 2.0];
        let o = dcov_oracle(&pm(2.0), &x, &y).unwrap();
        assert!((o - 0.25).abs() < 1e-15);
        assert!((dcov_fast(&pm(2.0), &x, &y).unwrap() - o).abs() < 1e-15);
        assert!((dcov_kernel_form(&pm(2.0), &x, &y).unwrap() - o).abs() < 1e-15);
    }

    #[test]
    fn constant_inputs_give_zero() {
        let x = [0u8, 1, 2, 1, 0];
        let y = [3.0; 5];
        for b in [0.0, 1.5, 4.0] {
            assert!(dcov_oracle(&pm(b), &x, &y).unwrap().abs() < 1e-30);
            assert_eq!(dcov_fast(&pm(b), &x, &y).unwrap(), 0.0);
        }
        let xc = [1u8; 5];
        let y2 = [1.0, -2.0, 0.5, 3.0, 0.1];
        assert_eq!(dcov_fast(&pm(3.0), &xc, &y2).unwrap(), 0.0);
        assert_eq!(dcov_kernel_form(&pm(3.0), &xc, &y2).unwrap(), 0.0);
        assert!(dcov_oracle(&pm(3.0), &xc, &y2).unwrap().abs() < 1e-15);
        assert_eq!(standardized_statistic(&pm(3.0), &xc, &y2).unwrap().0, 0.0);
    }

    #[test]
    fn b4_is_twice_squared_covariance() {
        let x = [0u8, 1, 2, 2, 0, 1, 1];
        let y = [0.3, 1.1, 2.5, 1.9, -0.4, 0.2, 0.8];
        let n = x.len() as f64;
        let xm = x.iter().map(|&g| g as f64).sum::<f64>() / n;
        let ym = mean(&y);
        let cov = x.iter().zip(&y).map(|(&g, v)| (g as f64 - xm) * (v - ym)).sum::<f64>() / n;
        let v = dcov_fast(&pm(4.0), &x, &y).unwrap();
        assert!((v - 2.0 * cov * cov).abs() < 1e-14);
    }

    #[test]
    fn degenerate_response_rejected() {
        let x = [0u8, 1, 2, 1];
        assert!(matches!(
            standardized_statistic(&pm(3.0), &x, &[2.0; 4]),
            Err(GdcError::DegenerateResponse)
        ));
        assert!(matches!(dcov_fast(&pm(3.0), &x, &[1.0, 2.0, 3.0]), Err(GdcError::DimensionMismatch { .. })));
        assert!(matches!(
            dcov_fast(&pm(3.0), &[0, 1, 2], &[1.0, 2.0, 3.0]),
            Err(GdcError::TooFewSamples { .. })
        ));
        assert!(matches!(
            dcov_fast(&pm(3.0), &x, &[1.0, f64::NAN, 3.0, 0.0]),
            Err(GdcError::NonFinitePhenotype(1))
        ));
    }

    #[test]
    fn population_blind_spots() {
        let p = [0.2, 0.5, 0.3];
        let m = PopulationModel::new(p, [p[2], 0.0, -p[0]]).unwrap();
        assert!(population_dcov(&pm(0.0), &m).abs() < 1e-16);
        assert!(population_dcov(&pm(1.0), &m) > 0.0);
        let m4 = PopulationModel::new(p, [p[1] * p[2], -2.0 * p[0] * p[2], p[0] * p[1]]).unwrap();
        assert!(population_dcov(&pm(4.0), &m4).abs() < 1e-16);
        assert!(population_dcov(&pm(3.0), &m4) > 0.0);
        let flat = PopulationModel::new(p, [1.0; 3]).unwrap();
        assert!(population_dcov(&pm(2.5), &flat) < 1e-30);
    }
}
