use super::genf::two_eigen_tail;
use super::{bounds::f1_tail, Method, NullSpectrum};
use crate::error::{GdcError, Result};
use crate::numerics::special::two_weight_chisq_sf;
use crate::premetric::PremetricB;

use super::imhof::weighted_chisq_tail_dof;
use super::spectrum::spectrum_unadjusted;

/// Probabilities below this are reported as zero.
pub const UNDERFLOW: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PValue {
    pub p: f64,
    pub method: Method,
    /// Estimated absolute error of the numerical evaluation.
    pub abs_err: f64,
}

impl PValue {
    fn new(p: f64, method: Method, abs_err: f64) -> Self {
        if p < UNDERFLOW && p > 0.0 {
            return PValue {
                p: 0.0,
                method: Method::Underflow,
                abs_err,
            };
        }
        PValue { p, method, abs_err }
    }
}

/// Exact finite-sample p-value P(n𝒱̂²/σ̂² ≥ k) under Gaussian errors.
///
/// With t = k/n and the positive eigenvalues λᵢ, the event is
/// Σ(λᵢ − t)Qᵢ² ≥ t·χ²_ν, ν = n − df_sub − rank.
/// - rank 0: the statistic is identically zero, p = 1;
/// - rank 1: the classical F(1, ν) test;
/// - rank 2: the generalized F law (angular form of the F₁ closed form);
///   when λ₂ ≤ t the same integral runs over the positive part only;
/// - rank > 2: numerical inversion of the characteristic function.
pub fn exact_pvalue(spec: &NullSpectrum, k: f64) -> Result<PValue> {
    if !(k >= 0.0) {
        return Err(GdcError::Domain(format!("statistic {k} must be >= 0")));
    }
    let rank = spec.rank();
    if rank == 0 {
        return Ok(PValue::new(1.0, Method::DegenerateSpectrum, 0.0));
    }
    let nu = spec.noise_dof();
    if nu < 1.0 {
        return Err(GdcError::TooFewSamples {
            n: spec.n,
            min: spec.df_sub + rank + 1,
        });
    }
    let n = spec.n as f64;
    let l1 = spec.lambda1();
    if k == 0.0 {
        let m = if rank == 1 { Method::ClassicalF } else { Method::ExactAppell };
        return Ok(PValue::new(1.0, m, 0.0));
    }
    if k >= n * l1 {
        let m = if rank == 1 { Method::ClassicalF } else { Method::ExactAppell };
        return Ok(PValue::new(0.0, m, 0.0));
    }
    let t = k / n;
    match rank {
        1 => Ok(PValue::new(f1_tail(k, n, l1, nu), Method::ClassicalF, 0.0)),
        2 => {
            let l2 = spec.lambda2();
            match two_eigen_tail(l1, l2, t, nu, false) {
                Ok(tail) => {
                    let method = if l2 - t > 0.0 {
                        Method::ExactAppell
                    } else {
                        Method::WeightedChisqInversion
                    };
                    Ok(PValue::new(tail.value, method, tail.abs_err))
                }
                Err(GdcError::Convergence { .. }) => inversion(spec, t, nu),
                Err(e) => Err(e),
            }
        }
        _ => inversion(spec, t, nu),
    }
}

/// P(T_n ≥ 0) by characteristic-function inversion.
fn inversion(spec: &NullSpectrum, t: f64, nu: f64) -> Result<PValue> {
    let mut terms: Vec<(f64, f64)> = spec
        .lambdas
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| (l - t, 1.0))
        .collect();
    terms.push((-t, nu));
    let r = weighted_chisq_tail_dof(&terms, 0.0)?;
    Ok(PValue::new(r.value.clamp(0.0, 1.0), Method::WeightedChisqInversion, r.abs_err))
}

/// Large-sample p-value: tail of λ₁Q₁² + λ₂Q₂² at stat/σ², with K built
/// from plug-in genotype frequencies.
pub fn asymptotic_pvalue(pm: &PremetricB, freqs: [f64; 3], sigma2: f64, n: usize, stat: f64) -> Result<f64> {
    if !(sigma2 > 0.0) {
        return Err(GdcError::DegenerateResponse);
    }
    let spec = spectrum_unadjusted(pm, freqs, n)?;
    Ok(asymptotic_pvalue_spectrum(&spec, stat / sigma2)?.p)
}

/// Large-sample tail P(Σλᵢ Qᵢ² ≥ k) for a given spectrum.
pub fn asymptotic_pvalue_spectrum(spec: &NullSpectrum, k: f64) -> Result<PValue> {
    if spec.rank() == 0 {
        return Ok(PValue::new(1.0, Method::DegenerateSpectrum, 0.0));
    }
    if k <= 0.0 {
        return Ok(PValue::new(1.0, Method::Asymptotic, 0.0));
    }
    if spec.lambdas.len() <= 2 {
        let p = two_weight_chisq_sf(spec.lambda1(), spec.lambda2(), k);
        return Ok(PValue::new(p, Method::Asymptotic, 0.0));
    }
    let terms: Vec<(f64, f64)> = spec.lambdas.iter().filter(|&&l| l > 0.0).map(|&l| (l, 1.0)).collect();
    let r = weighted_chisq_tail_dof(&terms, k)?;
    Ok(PValue::new(r.value.clamp(0.0, 1.0), Method::Asymptotic, r.abs_err))
}
