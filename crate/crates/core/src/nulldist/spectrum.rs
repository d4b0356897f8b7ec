use nalgebra::{DMatrix, SymmetricEigen};

use super::NullSpectrum;
use crate::adjust::CovariateBasis;
use crate::error::{GdcError, Result};
use crate::gdc::MIN_SAMPLES;
use crate::premetric::PremetricB;

/// Eigenvalues below this fraction of the largest are set to zero.
pub const SNAP_REL: f64 = 1e-12;

/// Eigenvalues of the symmetric 2×2 matrix [[a, c], [c, d]], descending.
/// The smaller one comes from det/λ₁, which avoids cancellation.
pub fn sym2_eigen(a: f64, c: f64, d: f64) -> [f64; 2] {
    let half_tr = 0.5 * (a + d);
    let disc = (0.5 * (a - d)).hypot(c);
    let l1 = half_tr + disc;
    if l1 <= 0.0 {
        return [0.0, 0.0];
    }
    let det = a * d - c * c;
    let mut l2 = det / l1;
    if l2 < SNAP_REL * l1 {
        l2 = 0.0;
    }
    [l1, l2]
}

fn check_n(n: usize) -> Result<()> {
    if n < MIN_SAMPLES {
        return Err(GdcError::TooFewSamples { n, min: MIN_SAMPLES });
    }
    Ok(())
}

/// Closed-form spectrum from hard-call genotype frequencies.
pub fn spectrum_unadjusted(pm: &PremetricB, freqs: [f64; 3], n: usize) -> Result<NullSpectrum> {
    check_n(n)?;
    if freqs.iter().any(|&p| !(0.0..=1.0).contains(&p)) || (freqs.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(GdcError::InvalidParameter(format!("genotype frequencies {freqs:?}")));
    }
    let [p0, p1, p2] = freqs;
    let k11 = pm.hom_weight() * (p0 + p2 - (p0 - p2).powi(2));
    let k22 = pm.het_weight() * (p1 - p1 * p1);
    let k12 = (pm.hom_weight() * pm.het_weight()).sqrt() * p1 * (p0 - p2);
    Ok(NullSpectrum {
        lambdas: sym2_eigen(k11, k12, k22).to_vec(),
        n,
        df_sub: 1,
        sigma2_hat: None,
    })
}

/// Spectrum of a symmetric Gram matrix K = (1/n)ŨᵗŨ that is already formed.
pub fn spectrum_from_gram(k: &DMatrix<f64>, n: usize, df_sub: usize) -> Result<NullSpectrum> {
    spectrum_from_gram_scaled(k, n, df_sub, 0.0)
}

/// As [`spectrum_from_gram`], also snapping eigenvalues below SNAP_REL·scale.
/// `scale` should be the size of the Gram form before projection, so that
/// a projection that annihilates the features yields exact zeros.
pub fn spectrum_from_gram_scaled(k: &DMatrix<f64>, n: usize, df_sub: usize, scale: f64) -> Result<NullSpectrum> {
    check_n(n)?;
    let r = k.nrows();
    let mut lambdas = if r == 2 {
        sym2_eigen(k[(0, 0)], 0.5 * (k[(0, 1)] + k[(1, 0)]), k[(1, 1)]).to_vec()
    } else if r == 1 {
        vec![k[(0, 0)].max(0.0)]
    } else {
        let mut v: Vec<f64> = SymmetricEigen::new(k.clone()).eigenvalues.iter().copied().collect();
        v.sort_by(|a, b| b.partial_cmp(a).unwrap());
        v
    };
    let top = lambdas.first().copied().unwrap_or(0.0).max(scale);
    for l in lambdas.iter_mut() {
        if *l < SNAP_REL * top || *l <= 0.0 {
            *l = 0.0;
        }
    }
    Ok(NullSpectrum {
        lambdas,
        n,
        df_sub,
        sigma2_hat: None,
    })
}

/// Largest diagonal entry of (1/n)UᵗU.
pub(crate) fn raw_scale(u: &DMatrix<f64>) -> f64 {
    let n = u.nrows().max(1) as f64;
    u.column_iter().map(|c| c.norm_squared() / n).fold(0.0, f64::max)
}

/// Eigenvalues of (1/n)Uᵗ(I − H_Z)U for an n×r feature matrix. Without
/// covariates H_Z is the mean projector.
pub fn spectrum_from_features(u: &DMatrix<f64>, z: Option<&DMatrix<f64>>) -> Result<NullSpectrum> {
    let n = u.nrows();
    if u.iter().any(|v| !v.is_finite()) {
        return Err(GdcError::Domain("non-finite feature value".into()));
    }
    match z {
        None => {
            let mut uc = u.clone();
            for mut col in uc.column_iter_mut() {
                let m = col.mean();
                col.add_scalar_mut(-m);
            }
            let k = uc.transpose() * &uc / n as f64;
            spectrum_from_gram_scaled(&k, n, 1, raw_scale(u))
        }
        Some(z) => {
            let basis = CovariateBasis::new(z)?;
            let k = basis.projected_gram(u)?;
            spectrum_from_gram_scaled(&k, n, basis.cols(), raw_scale(u))
        }
    }
}
