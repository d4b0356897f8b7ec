//! Generalized distance covariance tests for single-SNP association with
//! quantitative traits.
//!
//! A one-parameter premetric d_b on genotypes {0, 1, 2} (distance 1 between
//! neighbouring states, b between the homozygotes) runs from the
//! heterozygote-indicator test (b = 0) through the absolute difference
//! (b = 2) to the additive regression test (b = 4). The statistic has an exact null law
//! under Gaussian errors, computed here from the two eigenvalues of the
//! genotype feature covariance, with cheap bounds used to skip exact
//! evaluation for clearly null SNPs.
//!
//! Modules:
//! - [`premetric`]: distances, kernel and feature maps, dosage and
//!   multiallelic extensions;
//! - [`gdc`]: the statistic in double-centred, feature and kernel form;
//! - [`nulldist`]: null spectra, exact and asymptotic p-values, bounds;
//! - [`adjust`]: covariate residualization and the adjusted spectrum;
//! - [`scan`]: per-SNP tests over genotype files with screening;
//! - [`simbench`]: null and power simulations, competitors, timing.
//!
//! Runnable examples (`cargo run --release --example <name>`):
//! `premetric_geometry`, `statistic_forms`, `exact_pvalues`,
//! `covariate_adjustment`, `dosages_and_multiallelic`, `scan_packed_panel`,
//! `power_curves`, `screening_benchmark`.

pub mod adjust;
pub mod error;
pub mod gdc;
pub mod genotype;
pub mod nulldist;
pub mod numerics;
pub mod premetric;
pub mod scan;
pub mod simbench;
