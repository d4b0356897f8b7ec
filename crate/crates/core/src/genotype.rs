//! One SNP's genotype observations: hard calls, dosages, or allele counts.

use crate::error::{GdcError, Result};
use crate::premetric::check_allele_counts;

/// Sentinel for a missing hard call.
pub const MISSING: u8 = u8::MAX;

#[derive(Debug, Clone, PartialEq)]
pub enum GenotypeData {
    /// Counts of the second allele, or [`MISSING`].
    HardCalls(Vec<u8>),
    /// Expected second-allele counts in [0, 2]; NaN marks missing.
    Dosages(Vec<f64>),
    /// Row-major n×m allele counts; a NaN anywhere in a row marks it missing.
    AlleleCounts { m: usize, values: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenotypeColumn {
    pub snp_id: String,
    pub chrom: String,
    pub pos: u64,
    pub data: GenotypeData,
}

impl GenotypeColumn {
    pub fn hard_calls(snp_id: impl Into<String>, chrom: impl Into<String>, pos: u64, values: Vec<u8>) -> Result<Self> {
        if let Some(&bad) = values.iter().find(|&&v| v > 2 && v != MISSING) {
            return Err(GdcError::Domain(format!("hard call {bad} not in {{0, 1, 2}}")));
        }
        Ok(GenotypeColumn {
            snp_id: snp_id.into(),
            chrom: chrom.into(),
            pos,
            data: GenotypeData::HardCalls(values),
        })
    }

    pub fn dosages(snp_id: impl Into<String>, chrom: impl Into<String>, pos: u64, values: Vec<f64>) -> Result<Self> {
        if let Some(&bad) = values.iter().find(|v| !v.is_nan() && !(0.0..=2.0).contains(*v)) {
            return Err(GdcError::Domain(format!("dosage {bad} outside [0, 2]")));
        }
        Ok(GenotypeColumn {
            snp_id: snp_id.into(),
            chrom: chrom.into(),
            pos,
            data: GenotypeData::Dosages(values),
        })
    }

    pub fn allele_counts(
        snp_id: impl Into<String>,
        chrom: impl Into<String>,
        pos: u64,
        m: usize,
        values: Vec<f64>,
    ) -> Result<Self> {
        if m < 2 || values.len() % m != 0 {
            return Err(GdcError::DimensionMismatch {
                expected: m.max(2),
                got: values.len(),
            });
        }
        for row in values.chunks(m) {
            if row.iter().any(|v| v.is_nan()) {
                continue;
            }
            check_allele_counts(row)?;
        }
        Ok(GenotypeColumn {
            snp_id: snp_id.into(),
            chrom: chrom.into(),
            pos,
            data: GenotypeData::AlleleCounts { m, values },
        })
    }

    pub fn n(&self) -> usize {
        match &self.data {
            GenotypeData::HardCalls(v) => v.len(),
            GenotypeData::Dosages(v) => v.len(),
            GenotypeData::AlleleCounts { m, values } => values.len() / m,
        }
    }

    /// Number of alleles (2 for hard calls and dosages).
    pub fn m(&self) -> usize {
        match &self.data {
            GenotypeData::AlleleCounts { m, .. } => *m,
            _ => 2,
        }
    }

    pub fn is_missing(&self, i: usize) -> bool {
        match &self.data {
            GenotypeData::HardCalls(v) => v[i] == MISSING,
            GenotypeData::Dosages(v) => v[i].is_nan(),
            GenotypeData::AlleleCounts { m, values } => values[i * m..(i + 1) * m].iter().any(|x| x.is_nan()),
        }
    }

    pub fn n_missing(&self) -> usize {
        (0..self.n()).filter(|&i| self.is_missing(i)).count()
    }

    /// Observations at the given indices, in that order.
    pub fn select(&self, idx: &[usize]) -> GenotypeColumn {
        let data = match &self.data {
            GenotypeData::HardCalls(v) => GenotypeData::HardCalls(idx.iter().map(|&i| v[i]).collect()),
            GenotypeData::Dosages(v) => GenotypeData::Dosages(idx.iter().map(|&i| v[i]).collect()),
            GenotypeData::AlleleCounts { m, values } => GenotypeData::AlleleCounts {
                m: *m,
                values: idx.iter().flat_map(|&i| values[i * m..(i + 1) * m].iter().copied()).collect(),
            },
        };
        GenotypeColumn {
            snp_id: self.snp_id.clone(),
            chrom: self.chrom.clone(),
            pos: self.pos,
            data,
        }
    }

    /// Indices of non-missing observations.
    pub fn observed(&self) -> Vec<usize> {
        (0..self.n()).filter(|&i| !self.is_missing(i)).collect()
    }

    /// Minor allele frequency over non-missing observations. For allele
    /// counts this is one minus the frequency of the most common allele.
    pub fn maf(&self) -> f64 {
        match &self.data {
            GenotypeData::HardCalls(v) => {
                let c = genotype_counts(v);
                let total = (c[0] + c[1] + c[2]) as f64;
                if total == 0.0 {
                    return f64::NAN;
                }
                let q = (c[1] + 2 * c[2]) as f64 / (2.0 * total);
                q.min(1.0 - q)
            }
            GenotypeData::Dosages(v) => {
                let (s, k) = v.iter().filter(|x| !x.is_nan()).fold((0.0, 0usize), |(s, k), x| (s + x, k + 1));
                if k == 0 {
                    return f64::NAN;
                }
                let q = s / (2.0 * k as f64);
                q.min(1.0 - q)
            }
            GenotypeData::AlleleCounts { m, values } => {
                let mut sums = vec![0.0; *m];
                let mut k = 0usize;
                for row in values.chunks(*m) {
                    if row.iter().any(|x| x.is_nan()) {
                        continue;
                    }
                    k += 1;
                    for (s, x) in sums.iter_mut().zip(row) {
                        *s += x;
                    }
                }
                if k == 0 {
                    return f64::NAN;
                }
                let top = sums.iter().cloned().fold(0.0, f64::max) / (2.0 * k as f64);
                1.0 - top
            }
        }
    }
}

/// Class counts (n₀, n₁, n₂), ignoring missing calls.
pub fn genotype_counts(x: &[u8]) -> [usize; 3] {
    let mut c = [0usize; 3];
    for &g in x {
        if g <= 2 {
            c[g as usize] += 1;
        }
    }
    c
}

/// Genotype frequencies (p̂₀, p̂₁, p̂₂) over non-missing calls.
pub fn genotype_frequencies(x: &[u8]) -> [f64; 3] {
    let c = genotype_counts(x);
    let n = (c[0] + c[1] + c[2]) as f64;
    [c[0] as f64 / n, c[1] as f64 / n, c[2] as f64 / n]
}
