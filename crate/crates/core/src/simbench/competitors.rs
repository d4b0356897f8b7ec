//! Classical comparison tests: additive regression and one-way ANOVA.

use crate::error::{GdcError, Result};
use crate::gdc::check_phenotype;
use crate::numerics::special::f_sf;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestP {
    pub p: f64,
    /// "F", or "degenerate" when the design has no variation.
    pub method: &'static str,
}

impl TestP {
    fn degenerate() -> Self {
        TestP {
            p: 1.0,
            method: "degenerate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Competitors {
    pub additive_f: TestP,
    pub anova_f: TestP,
}

fn check(n_x: usize, y: &[f64]) -> Result<()> {
    if n_x != y.len() {
        return Err(GdcError::DimensionMismatch {
            expected: n_x,
            got: y.len(),
        });
    }
    if y.len() < 4 {
        return Err(GdcError::TooFewSamples { n: y.len(), min: 4 });
    }
    check_phenotype(y)
}

/// F(1, n − 2) test of the slope in y = a + c·x + ε.
pub fn simple_regression_f(x: &[f64], y: &[f64]) -> Result<TestP> {
    check(x.len(), y)?;
    let n = x.len() as f64;
    let xm = x.iter().sum::<f64>() / n;
    let ym = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - xm).powi(2)).sum();
    if sxx <= 0.0 {
        return Ok(TestP::degenerate());
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - xm) * (b - ym)).sum();
    let slope = sxy / sxx;
    let sse: f64 = x.iter().zip(y).map(|(a, b)| (b - ym - slope * (a - xm)).powi(2)).sum();
    let ssr = sxy * sxy / sxx;
    if sse <= 0.0 {
        return Ok(TestP { p: 0.0, method: "F" });
    }
    let f = ssr / (sse / (n - 2.0));
    Ok(TestP {
        p: f_sf(1.0, n - 2.0, f),
        method: "F",
    })
}

/// Genotype treated as a count.
pub fn additive_f(x: &[u8], y: &[f64]) -> Result<TestP> {
    let xs: Vec<f64> = x.iter().map(|&g| g as f64).collect();
    simple_regression_f(&xs, y)
}

/// Genotype treated as a factor with the observed classes as levels.
pub fn anova_f(x: &[u8], y: &[f64]) -> Result<TestP> {
    check(x.len(), y)?;
    let mut sum = [0.0; 3];
    let mut cnt = [0usize; 3];
    for (&g, &v) in x.iter().zip(y) {
        sum[g as usize] += v;
        cnt[g as usize] += 1;
    }
    let groups = cnt.iter().filter(|&&c| c > 0).count();
    if groups < 2 {
        return Ok(TestP::degenerate());
    }
    let n = x.len() as f64;
    let grand = y.iter().sum::<f64>() / n;
    let means: Vec<f64> = (0..3).map(|g| if cnt[g] > 0 { sum[g] / cnt[g] as f64 } else { 0.0 }).collect();
    let ssb: f64 = (0..3).map(|g| cnt[g] as f64 * (means[g] - grand).powi(2)).sum();
    let ssw: f64 = x.iter().zip(y).map(|(&g, &v)| (v - means[g as usize]).powi(2)).sum();
    let (d1, d2) = ((groups - 1) as f64, n - groups as f64);
    if ssw <= 0.0 {
        return Ok(TestP { p: 0.0, method: "F" });
    }
    Ok(TestP {
        p: f_sf(d1, d2, (ssb / d1) / (ssw / d2)),
        method: "F",
    })
}

pub fn competitor_tests(x: &[u8], y: &[f64]) -> Result<Competitors> {
    Ok(Competitors {
        additive_f: additive_f(x, y)?,
        anova_f: anova_f(x, y)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn anova_with_two_classes_is_two_sample_f() {
        let x = [0u8, 0, 0, 2, 2, 2, 2];
        let y = [1.0, 1.5, 0.7, 2.0, 2.9, 2.2, 1.8];
        let a = anova_f(&x, &y).unwrap();
        // two groups: ANOVA F equals the regression F on the group indicator
        let ind: Vec<f64> = x.iter().map(|&g| (g == 2) as u8 as f64).collect();
        let r = simple_regression_f(&ind, &y).unwrap();
        assert!((a.p - r.p).abs() < 1e-13);
    }

    #[test]
    fn constant_genotype_is_degenerate() {
        let t = competitor_tests(&[1, 1, 1, 1, 1], &[0.1, 0.5, 0.2, 0.9, 0.3]).unwrap();
        assert_eq!(t.additive_f.method, "degenerate");
        assert_eq!(t.anova_f.p, 1.0);
    }

    #[test]
    fn regression_matches_reference() {
        // scipy.stats.linregress(x, y).pvalue
        let x = [0.0, 1.0, 2.0, 3.0, 4.0, 5.0];
        let y = [0.1, 0.9, 2.3, 2.8, 4.2, 4.8];
        let r = simple_regression_f(&x, &y).unwrap();
        assert!((r.p - 6.066544646294446e-05).abs() < 1e-14);
    }

    #[test]
    fn anova_matches_reference() {
        // scipy.stats.f_oneway on the three groups
        let x = [0u8, 0, 1, 1, 1, 2, 2];
        let y = [1.0, 1.5, 0.7, 2.0, 2.9, 2.2, 1.8];
        assert!((anova_f(&x, &y).unwrap().p - 0.6401149476895891).abs() < 1e-12);
        let x2 = [0u8, 0, 0, 2, 2, 2, 2];
        assert!((anova_f(&x2, &y).unwrap().p - 0.01994436267829904).abs() < 1e-12);
    }
}
