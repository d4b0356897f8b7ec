//! The premetric family d_b on genotype states {0, 1, 2}, its induced kernel,
//! feature maps, and the dosage / multiallelic extensions.
//!
//! Every other module reads genotype geometry through [`PremetricB`].

use crate::error::{GdcError, Result};

/// Tolerance on the allele-count coordinate sum of a multiallelic observation.
pub const ALLELE_SUM_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PremetricB {
    b: f64,
}

/// Feature values at the three hard-call states, one row per feature.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMap {
    pub rows: Vec<[f64; 3]>,
}

impl FeatureMap {
    pub fn arity(&self) -> usize {
        self.rows.len()
    }

    pub fn eval(&self, state: u8) -> Vec<f64> {
        self.rows.iter().map(|r| r[state as usize]).collect()
    }

    /// ‖Φ(x) − Φ(y)‖².
    pub fn sq_distance(&self, x: u8, y: u8) -> f64 {
        self.rows
            .iter()
            .map(|r| (r[x as usize] - r[y as usize]).powi(2))
            .sum()
    }

    pub fn inner(&self, x: u8, y: u8) -> f64 {
        self.rows.iter().map(|r| r[x as usize] * r[y as usize]).sum()
    }
}

fn check_dosage(x: f64) -> Result<()> {
    if (0.0..=2.0).contains(&x) {
        Ok(())
    } else {
        Err(GdcError::Domain(format!("dosage {x} outside [0, 2]")))
    }
}

impl PremetricB {
    pub fn new(b: f64) -> Result<Self> {
        if !(0.0..=4.0).contains(&b) {
            return Err(GdcError::InvalidParameter(format!(
                "b = {b} outside [0, 4]; d_b is of negative type only there"
            )));
        }
        Ok(PremetricB { b })
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Squared weight of the homozygous-contrast feature, b/2.
    #[inline]
    pub fn hom_weight(&self) -> f64 {
        0.5 * self.b
    }

    /// Squared weight of the heterozygote-indicator feature, (4 − b)/2.
    #[inline]
    pub fn het_weight(&self) -> f64 {
        0.5 * (4.0 - self.b)
    }

    /// d_b(x, y) for hard calls.
    pub fn distance(&self, x: u8, y: u8) -> f64 {
        debug_assert!(x <= 2 && y <= 2);
        match x.abs_diff(y) {
            0 => 0.0,
            1 => 1.0,
            _ => self.b,
        }
    }

    /// Kernel induced by d_b with base point 1:
    /// k(x, y) = d(x, 1) + d(y, 1) − d(x, y).
    pub fn kernel(&self, x: u8, y: u8) -> f64 {
        self.distance(x, 1) + self.distance(y, 1) - self.distance(x, y)
    }

    /// φ₁ = √(b/2)·(−1, 0, 1), φ₂ = √((4−b)/2)·(0, 1, 0).
    pub fn canonical_feature_map(&self) -> FeatureMap {
        let s1 = self.hom_weight().sqrt();
        let s2 = self.het_weight().sqrt();
        FeatureMap {
            rows: vec![[-s1, 0.0, s1], [0.0, s2, 0.0]],
        }
    }

    /// Three-feature maps whose features read as dominant, recessive and
    /// additive (b ≥ 2) or dominant, recessive and heterozygous (b ≤ 2) patterns.
    pub fn regime_feature_map(&self) -> FeatureMap {
        let b = self.b;
        if b >= 2.0 {
            let s = (4.0 - b).sqrt();
            let t = 2.0 * (b - 2.0).sqrt();
            FeatureMap {
                rows: vec![[0.0, 0.0, s], [0.0, s, s], [0.0, 0.5 * t, t]],
            }
        } else {
            let s = b.sqrt();
            let t = (2.0 - b).sqrt();
            FeatureMap {
                rows: vec![[0.0, 0.0, s], [0.0, s, s], [0.0, t, 0.0]],
            }
        }
    }

    /// Linearly interpolated features of a dosage x ∈ [0, 2].
    pub fn dosage_features(&self, x: f64) -> Result<(f64, f64)> {
        check_dosage(x)?;
        Ok(self.dosage_features_unchecked(x))
    }

    #[inline]
    pub(crate) fn dosage_features_unchecked(&self, x: f64) -> (f64, f64) {
        (
            self.hom_weight().sqrt() * x,
            self.het_weight().sqrt() * (x - 1.0).abs(),
        )
    }

    /// Distance induced by the interpolated dosage features.
    pub fn dosage_distance(&self, x: f64, y: f64) -> Result<f64> {
        check_dosage(x)?;
        check_dosage(y)?;
        Ok(self.dosage_distance_unchecked(x, y))
    }

    #[inline]
    fn dosage_distance_unchecked(&self, x: f64, y: f64) -> f64 {
        if (x >= 1.0) == (y >= 1.0) {
            (x - y).powi(2)
        } else {
            0.25 * self.b * (x - y).powi(2) + 0.25 * (4.0 - self.b) * (x + y - 2.0).powi(2)
        }
    }

    /// d̃_b(x, y) = ½ Σᵢ d_b(xᵢ, yᵢ) over allele-count coordinates.
    pub fn multiallelic_distance(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        check_allele_counts(x)?;
        check_allele_counts(y)?;
        if x.len() != y.len() {
            return Err(GdcError::DimensionMismatch {
                expected: x.len(),
                got: y.len(),
            });
        }
        Ok(0.5
            * x.iter()
                .zip(y)
                .map(|(&a, &b)| self.dosage_distance_unchecked(a, b))
                .sum::<f64>())
    }

    /// Features of an allele-count vector: the dosage features of each
    /// coordinate, scaled by 1/√2 so that ‖ΔΦ‖² = 2·d̃_b. Layout is
    /// (hom₁, het₁, hom₂, het₂, …).
    pub fn multiallelic_features(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_allele_counts(x)?;
        let mut out = Vec::with_capacity(2 * x.len());
        for &xi in x {
            let (f1, f2) = self.dosage_features_unchecked(xi);
            out.push(f1 * std::f64::consts::FRAC_1_SQRT_2);
            out.push(f2 * std::f64::consts::FRAC_1_SQRT_2);
        }
        Ok(out)
    }
}

pub fn check_allele_counts(x: &[f64]) -> Result<()> {
    if x.len() < 2 {
        return Err(GdcError::DimensionMismatch {
            expected: 2,
            got: x.len(),
        });
    }
    for &v in x {
        check_dosage(v)?;
    }
    let s: f64 = x.iter().sum();
    if (s - 2.0).abs() > ALLELE_SUM_TOL {
        return Err(GdcError::Domain(format!("allele counts sum to {s}, expected 2")));
    }
    Ok(())
}
