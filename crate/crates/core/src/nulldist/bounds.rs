use super::NullSpectrum;
use crate::error::{GdcError, Result};
use crate::numerics::special::{f_sf, two_weight_chisq_sf};

/// Tail of F(1, dof) at the scaled statistic k·dof/(nλ − k).
pub(crate) fn f1_tail(k: f64, n: f64, lambda: f64, dof: f64) -> f64 {
    let den = lambda * n - k;
    if den <= 0.0 {
        return 0.0;
    }
    f_sf(1.0, dof, k * dof / den)
}

/// (p*, p**) with p* ≤ P(n𝒱̂²/σ̂² ≥ k) ≤ p**. p** is not clamped.
///
/// Degrees of freedom follow the two-slot count ν = n − df_sub − 2, so the
/// unadjusted case uses F(·, n−3) and F(1, n−2).
pub fn pvalue_bounds(spec: &NullSpectrum, k: f64) -> Result<(f64, f64)> {
    if spec.lambdas.len() > 2 {
        return Err(GdcError::InvalidParameter(
            "screening bounds are defined for at most two eigenvalues".into(),
        ));
    }
    if !(k >= 0.0) {
        return Err(GdcError::Domain(format!("statistic {k} must be >= 0")));
    }
    let n = spec.n as f64;
    let nu = n - spec.df_sub as f64 - 2.0;
    if nu < 1.0 {
        return Err(GdcError::TooFewSamples {
            n: spec.n,
            min: spec.df_sub + 3,
        });
    }
    let l1 = spec.lambda1();
    let l2 = spec.lambda2();
    if l1 <= 0.0 || k == 0.0 {
        return Ok((1.0, if l1 <= 0.0 { 1.0 } else { 5.0 }));
    }
    if k >= l1 * n {
        return Ok((0.0, 0.0));
    }
    let t = k / n;
    if l2 - t > 0.0 {
        let a = two_weight_chisq_sf(l1 - t, l2 - t, k * nu / n);
        let b = f1_tail(k, n, l1, nu);
        let c = f_sf(2.0, nu, k * nu / ((l1 * n - k) * (l2 * n - k)).sqrt());
        let upper = 5.0 * f_sf(1.0, nu + 1.0, k * (nu + 1.0) / ((l1 + l2) * n - 2.0 * k));
        Ok((a.max(b).max(c), upper))
    } else {
        Ok((f1_tail(k, n, l1, nu + 1.0), f1_tail(k, n, l1, nu)))
    }
}
