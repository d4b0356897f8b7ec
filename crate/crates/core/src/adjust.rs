//! Linear nuisance-covariate adjustment: the response is residualized on
//! Z = (1, Z₁, …, Z_q) once, and every SNP's features are projected onto the
//! orthogonal complement of Z through a precomputed orthonormal basis.

use nalgebra::{DMatrix, DVector};

use crate::error::{GdcError, Result};
use crate::gdc::{self, check_phenotype};
use crate::genotype::{GenotypeColumn, GenotypeData};
use crate::nulldist::spectrum::raw_scale;
use crate::nulldist::{spectrum_from_gram, spectrum_from_gram_scaled, NullSpectrum};
use crate::premetric::PremetricB;

/// Rank tolerance relative to the largest singular value.
pub const RANK_TOL: f64 = 1e-10;

/// Covariate design with a leading intercept column.
#[derive(Debug, Clone, PartialEq)]
pub struct CovariateMatrix {
    pub names: Vec<String>,
    pub z: DMatrix<f64>,
}

impl CovariateMatrix {
    /// Builds Z from named columns. A column of ones is moved to the front,
    /// or prepended when absent; the returned flag reports a prepend.
    pub fn from_columns(names: Vec<String>, columns: Vec<Vec<f64>>) -> Result<(Self, bool)> {
        if names.len() != columns.len() {
            return Err(GdcError::DimensionMismatch {
                expected: names.len(),
                got: columns.len(),
            });
        }
        let n = columns.first().map(|c| c.len()).unwrap_or(0);
        if let Some(c) = columns.iter().find(|c| c.len() != n) {
            return Err(GdcError::DimensionMismatch { expected: n, got: c.len() });
        }
        if columns.iter().flatten().any(|v| !v.is_finite()) {
            return Err(GdcError::Domain("non-finite covariate value".into()));
        }
        let mut names = names;
        let mut columns = columns;
        let ones = columns.iter().position(|c| c.iter().all(|&v| v == 1.0));
        let prepended = match ones {
            Some(0) => false,
            Some(i) => {
                let c = columns.remove(i);
                let nm = names.remove(i);
                columns.insert(0, c);
                names.insert(0, nm);
                false
            }
            None => {
                columns.insert(0, vec![1.0; n]);
                names.insert(0, "intercept".into());
                true
            }
        };
        let z = DMatrix::from_fn(n, columns.len(), |i, j| columns[j][i]);
        Ok((CovariateMatrix { names, z }, prepended))
    }

    pub fn intercept_only(n: usize) -> Self {
        CovariateMatrix {
            names: vec!["intercept".into()],
            z: DMatrix::from_element(n, 1, 1.0),
        }
    }

    pub fn n(&self) -> usize {
        self.z.nrows()
    }

    /// Number of non-intercept covariates.
    pub fn q(&self) -> usize {
        self.z.ncols() - 1
    }

    /// Row subset, for per-SNP complete-case analysis.
    pub fn select_rows(&self, keep: &[usize]) -> Self {
        CovariateMatrix {
            names: self.names.clone(),
            z: self.z.select_rows(keep),
        }
    }
}

/// Orthonormal basis Q of the column space of Z.
#[derive(Debug, Clone)]
pub struct CovariateBasis {
    q: DMatrix<f64>,
}

impl CovariateBasis {
    pub fn new(z: &DMatrix<f64>) -> Result<Self> {
        let (n, c) = z.shape();
        if c == 0 || n < c {
            return Err(GdcError::CollinearCovariates { rank: n.min(c), cols: c });
        }
        let sv = z.clone().singular_values();
        let smax = sv.iter().cloned().fold(0.0, f64::max);
        let rank = sv.iter().filter(|&&s| s > RANK_TOL * smax).count();
        if rank < c {
            return Err(GdcError::CollinearCovariates { rank, cols: c });
        }
        Ok(CovariateBasis { q: z.clone().qr().q() })
    }

    pub fn from_covariates(z: &CovariateMatrix) -> Result<Self> {
        Self::new(&z.z)
    }

    pub fn cols(&self) -> usize {
        self.q.ncols()
    }

    pub fn n(&self) -> usize {
        self.q.nrows()
    }

    pub fn q(&self) -> &DMatrix<f64> {
        &self.q
    }

    /// v − Q(Qᵗv).
    pub fn project_out(&self, v: &[f64]) -> Vec<f64> {
        let dv = DVector::from_column_slice(v);
        let coef = self.q.tr_mul(&dv);
        let fitted = &self.q * coef;
        v.iter().zip(fitted.iter()).map(|(a, b)| a - b).collect()
    }

    /// (1/n)ŨᵗŨ with Ũ = U − Q(QᵗU).
    pub fn projected_gram(&self, u: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        if u.nrows() != self.n() {
            return Err(GdcError::DimensionMismatch {
                expected: self.n(),
                got: u.nrows(),
            });
        }
        let coef = self.q.tr_mul(u);
        let ut = u - &self.q * coef;
        Ok(ut.tr_mul(&ut) / self.n() as f64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualizedPhenotype {
    pub residuals: Vec<f64>,
    pub gamma_hat: Vec<f64>,
    pub sigma2_eps_hat: f64,
    /// Number of columns of Z, intercept included.
    pub df_sub: usize,
}

/// OLS residuals of Y on Z via Householder QR.
pub fn residualize(y: &[f64], z: &CovariateMatrix) -> Result<ResidualizedPhenotype> {
    check_phenotype(y)?;
    if y.len() != z.n() {
        return Err(GdcError::DimensionMismatch {
            expected: z.n(),
            got: y.len(),
        });
    }
    let n = y.len();
    if n <= z.q() + 3 {
        return Err(GdcError::TooFewSamples { n, min: z.q() + 4 });
    }
    let basis = CovariateBasis::from_covariates(z)?;
    let residuals = basis.project_out(y);
    let qr = z.z.clone().qr();
    let qty = qr.q().tr_mul(&DVector::from_column_slice(y));
    let gamma = qr
        .r()
        .solve_upper_triangular(&qty)
        .ok_or(GdcError::CollinearCovariates {
            rank: 0,
            cols: z.z.ncols(),
        })?;
    let m = gdc::mean(&residuals);
    let sigma2 = residuals.iter().map(|e| (e - m).powi(2)).sum::<f64>() / n as f64;
    Ok(ResidualizedPhenotype {
        residuals,
        gamma_hat: gamma.iter().copied().collect(),
        sigma2_eps_hat: sigma2,
        df_sub: z.z.ncols(),
    })
}

fn complete_only(geno: &GenotypeColumn) -> Result<()> {
    if geno.n_missing() > 0 {
        return Err(GdcError::Domain(format!(
            "SNP {} has missing calls; filter to complete cases first",
            geno.snp_id
        )));
    }
    Ok(())
}

/// 𝒱̂²_b(X, Y; Z): the statistic computed on the residuals.
pub fn adjusted_statistic(pm: &PremetricB, geno: &GenotypeColumn, resid: &ResidualizedPhenotype) -> Result<f64> {
    complete_only(geno)?;
    match &geno.data {
        GenotypeData::HardCalls(x) => gdc::dcov_fast(pm, x, &resid.residuals),
        GenotypeData::Dosages(x) => gdc::dcov_fast_dosage(pm, x, &resid.residuals),
        GenotypeData::AlleleCounts { .. } => Err(GdcError::InvalidParameter(
            "allele-count columns go through the multiallelic path".into(),
        )),
    }
}

/// n×2 canonical (hard calls) or interpolated (dosages) feature matrix.
pub fn feature_matrix(pm: &PremetricB, geno: &GenotypeColumn) -> Result<DMatrix<f64>> {
    complete_only(geno)?;
    match &geno.data {
        GenotypeData::HardCalls(x) => {
            let fm = pm.canonical_feature_map();
            Ok(DMatrix::from_fn(x.len(), 2, |i, j| fm.rows[j][x[i] as usize]))
        }
        GenotypeData::Dosages(x) => Ok(DMatrix::from_fn(x.len(), 2, |i, j| {
            let (a, b) = pm.dosage_features_unchecked(x[i]);
            if j == 0 {
                a
            } else {
                b
            }
        })),
        GenotypeData::AlleleCounts { .. } => Err(GdcError::InvalidParameter(
            "allele-count columns go through the multiallelic path".into(),
        )),
    }
}

/// Eigenvalues of (1/n)Uᵗ(I − Z(ZᵗZ)⁻¹Zᵗ)U with df_sub = q + 1.
pub fn adjusted_spectrum(pm: &PremetricB, geno: &GenotypeColumn, z: &CovariateMatrix) -> Result<NullSpectrum> {
    let basis = CovariateBasis::from_covariates(z)?;
    adjusted_spectrum_with_basis(pm, geno, &basis)
}

pub fn adjusted_spectrum_with_basis(
    pm: &PremetricB,
    geno: &GenotypeColumn,
    basis: &CovariateBasis,
) -> Result<NullSpectrum> {
    let u = feature_matrix(pm, geno)?;
    let k = basis.projected_gram(&u)?;
    spectrum_from_gram_scaled(&k, u.nrows(), basis.cols(), raw_scale(&u))
}

/// Population moments needed for the large-sample adjusted spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct JointMoments {
    /// P(X = g).
    pub p: [f64; 3],
    /// E[Z | X = g], intercept coordinate included.
    pub cond_mean_z: [Vec<f64>; 3],
    /// E[ZZᵗ].
    pub e_zz: DMatrix<f64>,
}

/// K = E[ΦΦᵗ] − E[ΦZᵗ] E[ZZᵗ]⁻¹ E[ΦZᵗ]ᵗ.
pub fn adjusted_asymptotic_spectrum(pm: &PremetricB, m: &JointMoments, n: usize) -> Result<NullSpectrum> {
    let c = m.e_zz.nrows();
    if m.e_zz.ncols() != c || m.cond_mean_z.iter().any(|v| v.len() != c) {
        return Err(GdcError::DimensionMismatch {
            expected: c,
            got: m.cond_mean_z[0].len(),
        });
    }
    let fm = pm.canonical_feature_map();
    let mut e_pp = DMatrix::<f64>::zeros(2, 2);
    let mut e_pz = DMatrix::<f64>::zeros(2, c);
    for g in 0..3 {
        let phi = DVector::from_vec(fm.eval(g as u8));
        e_pp += m.p[g] * &phi * phi.transpose();
        let zg = DVector::from_column_slice(&m.cond_mean_z[g]);
        e_pz += m.p[g] * &phi * zg.transpose();
    }
    let inv = m
        .e_zz
        .clone()
        .try_inverse()
        .ok_or(GdcError::CollinearCovariates { rank: 0, cols: c })?;
    let k = e_pp - &e_pz * inv * e_pz.transpose();
    let k = 0.5 * (&k + k.transpose());
    spectrum_from_gram(&k, n, c)
}
