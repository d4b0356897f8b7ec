//! Null laws of the standardized statistic: spectra, exact p-values,
//! screening bounds, asymptotic tails, and a weighted chi-square inversion.

mod bounds;
mod genf;
mod imhof;
mod pvalue;
pub(crate) mod spectrum;

use std::fmt;

pub use bounds::pvalue_bounds;
pub use genf::{genf_cdf, genf_cdf_appell, genf_sf};
pub use imhof::{weighted_chisq_tail, weighted_chisq_tail_dof, ImhofResult};
pub use pvalue::{asymptotic_pvalue, asymptotic_pvalue_spectrum, exact_pvalue, PValue, UNDERFLOW};
pub use spectrum::{
    spectrum_from_features, spectrum_from_gram, spectrum_from_gram_scaled, spectrum_unadjusted, sym2_eigen, SNAP_REL,
};

/// Eigenvalues of the null Gram matrix, descending, with the counting data
/// that fixes the number of pure-noise chi-squares.
#[derive(Debug, Clone, PartialEq)]
pub struct NullSpectrum {
    pub lambdas: Vec<f64>,
    pub n: usize,
    /// Columns removed from the response before testing: 1 for the mean,
    /// q + 1 with q covariates.
    pub df_sub: usize,
    pub sigma2_hat: Option<f64>,
}

impl NullSpectrum {
    pub fn lambda1(&self) -> f64 {
        self.lambdas.first().copied().unwrap_or(0.0)
    }

    pub fn lambda2(&self) -> f64 {
        self.lambdas.get(1).copied().unwrap_or(0.0)
    }

    /// Number of strictly positive eigenvalues.
    pub fn rank(&self) -> usize {
        self.lambdas.iter().filter(|&&l| l > 0.0).count()
    }

    /// Degrees of freedom of the negative-weight block in the finite-sample
    /// law: n − df_sub − (number of positive eigenvalues).
    pub fn noise_dof(&self) -> f64 {
        self.n as f64 - self.df_sub as f64 - self.rank() as f64
    }

    pub fn with_sigma2(mut self, s2: f64) -> Self {
        self.sigma2_hat = Some(s2);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    ExactAppell,
    WeightedChisqInversion,
    Asymptotic,
    ClassicalF,
    BracketOnly,
    DegenerateSpectrum,
    Underflow,
    ScreenedOutHigh,
    ScreenedOutLow,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::ExactAppell => "exact_appell",
            Method::WeightedChisqInversion => "weighted_chisq_inversion",
            Method::Asymptotic => "asymptotic",
            Method::ClassicalF => "classical_F",
            Method::BracketOnly => "bracket_only",
            Method::DegenerateSpectrum => "degenerate_spectrum",
            Method::Underflow => "underflow",
            Method::ScreenedOutHigh => "screened_out_high",
            Method::ScreenedOutLow => "screened_out_low",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// p* ≤ p ≤ p** plus the exact value when it was computed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PValueBracket {
    pub p_lower: f64,
    /// May exceed 1; clamp when reporting.
    pub p_upper: f64,
    pub p_exact: Option<f64>,
    pub method: Method,
}
