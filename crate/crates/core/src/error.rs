use thiserror::Error;

pub type Result<T> = std::result::Result<T, GdcError>;

#[derive(Debug, Error)]
pub enum GdcError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("value out of domain: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("too few samples: n = {n}, need at least {min}")]
    TooFewSamples { n: usize, min: usize },

    #[error("non-finite phenotype value at sample {0}")]
    NonFinitePhenotype(usize),

    #[error("degenerate response")]
    DegenerateResponse,

    #[error("collinear covariates (rank {rank} < {cols} columns)")]
    CollinearCovariates { rank: usize, cols: usize },

    #[error("{what} did not converge: partial value {partial:e}, error bound {bound:e}")]
    Convergence {
        what: &'static str,
        partial: f64,
        bound: f64,
    },

    #[error("sample count mismatch: genotypes have {geno} samples, phenotype has {pheno}")]
    SampleMismatch { geno: usize, pheno: usize },

    #[error("parse error at {location}: {msg}")]
    Parse { location: String, msg: String },

    #[error("malformed genotype file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl GdcError {
    pub fn parse(location: impl Into<String>, msg: impl Into<String>) -> Self {
        GdcError::Parse {
            location: location.into(),
            msg: msg.into(),
        }
    }

    /// Short machine-friendly reason, used in per-SNP error tags.
    pub fn tag(&self) -> String {
        match self {
            GdcError::InvalidParameter(_) => "invalid_parameter".into(),
            GdcError::Domain(_) => "domain".into(),
            GdcError::DimensionMismatch { .. } => "dimension_mismatch".into(),
            GdcError::TooFewSamples { .. } => "too_few_samples".into(),
            GdcError::NonFinitePhenotype(_) => "non_finite_phenotype".into(),
            GdcError::DegenerateResponse => "degenerate_response".into(),
            GdcError::CollinearCovariates { .. } => "collinear_covariates".into(),
            GdcError::Convergence { what, .. } => format!("no_convergence_{what}"),
            GdcError::SampleMismatch { .. } => "sample_mismatch".into(),
            GdcError::Parse { .. } => "parse".into(),
            GdcError::Format(_) => "format".into(),
            GdcError::Io(_) => "io".into(),
        }
    }
}
