//! Small summaries for simulation output: Wilson intervals, paired
//! differences of rejection rates, and the Kolmogorov–Smirnov distance to
//! the uniform law.

use statrs::distribution::{ContinuousCDF, Normal};

fn z_of(level: f64) -> f64 {
    Normal::standard().inverse_cdf(0.5 + 0.5 * level)
}

/// Wilson score interval for `k` successes out of `n` at two-sided `level`.
pub fn wilson_interval(k: usize, n: usize, level: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let z = z_of(level);
    let nf = n as f64;
    let p = k as f64 / nf;
    let z2 = z * z;
    let centre = (p + z2 / (2.0 * nf)) / (1.0 + z2 / nf);
    let half = z / (1.0 + z2 / nf) * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt();
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Rate difference P(a) − P(b) over paired Bernoulli outcomes, with a Wald
/// interval from the per-replicate differences.
pub fn paired_difference(a: &[bool], b: &[bool], level: f64) -> (f64, f64, f64) {
    let n = a.len().min(b.len());
    if n == 0 {
        return (0.0, -1.0, 1.0);
    }
    let d: Vec<f64> = a.iter().zip(b).map(|(&x, &y)| x as u8 as f64 - y as u8 as f64).collect();
    let mean = d.iter().sum::<f64>() / n as f64;
    let var = d.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0).max(1.0);
    let half = z_of(level) * (var / n as f64).sqrt();
    (mean, mean - half, mean + half)
}

/// sup |F_n − U| for a sample of p-values (sorted internally).
pub fn ks_uniform(pvalues: &[f64]) -> f64 {
    let mut p = pvalues.to_vec();
    p.sort_by(|a, b| a.partial_cmp(b).expect("NaN p-value"));
    let n = p.len() as f64;
    p.iter()
        .enumerate()
        .map(|(i, &v)| {
            let hi = (i + 1) as f64 / n - v;
            let lo = v - i as f64 / n;
            hi.max(lo)
        })
        .fold(0.0, f64::max)
}

/// Large-sample 1% critical value of the one-sample KS statistic.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.628 / (n as f64).sqrt()
}

/// ∫ y dx by the trapezoidal rule over points sorted by x.
pub fn trapezoid(points: &[(f64, f64)]) -> f64 {
    let mut p = points.to_vec();
    p.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    p.windows(2).map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1)).sum()
}
