//! Allele-count SNPs. With at most two alleles observed the column is
//! recoded as a biallelic count; otherwise each allele contributes its
//! two dosage features and the p-value comes from the general spectrum.

use nalgebra::DMatrix;

use super::{analyze_calls, analyze_dosages, features_spectrum, integral_calls, test_snp, Analysis, PreparedPhenotype, ScanConfig, ScanRecord};
use crate::error::{GdcError, Result};
use crate::gdc::clamp_nonneg;
use crate::genotype::GenotypeColumn;
use crate::premetric::PremetricB;

/// Tests one allele-count column; the result has the same layout as the
/// biallelic records.
pub fn run_multiallelic(cfg: &ScanConfig, col: &GenotypeColumn, pheno: &PreparedPhenotype) -> ScanRecord {
    match cfg.validate() {
        Ok(pm) => test_snp(&pm, cfg, col, pheno),
        Err(e) => ScanRecord::failed(col, cfg.b, &e),
    }
}

/// Complete-case rows only.
pub(crate) fn analyze_allele_counts(pm: &PremetricB, m: usize, values: &[f64], pheno: &PreparedPhenotype) -> Result<Analysis> {
    let n = values.len() / m;
    if n != pheno.n() {
        return Err(GdcError::SampleMismatch { geno: n, pheno: pheno.n() });
    }
    let mut totals = vec![0.0; m];
    for row in values.chunks(m) {
        for (t, v) in totals.iter_mut().zip(row) {
            *t += v;
        }
    }
    let present: Vec<usize> = (0..m).filter(|&i| totals[i] > 0.0).collect();
    if present.len() <= 2 {
        // Code the column as the count of the later observed allele; with
        // m = 2 and both alleles present this is the second coordinate.
        let j = match present.as_slice() {
            [0] => 1,
            p => *p.last().unwrap_or(&1),
        };
        let x: Vec<f64> = values.chunks(m).map(|row| row[j]).collect();
        return match integral_calls(&x) {
            Some(calls) => analyze_calls(pm, &calls, pheno),
            None => analyze_dosages(pm, &x, pheno),
        };
    }

    let mut rows = Vec::with_capacity(n);
    for row in values.chunks(m) {
        rows.push(pm.multiallelic_features(row)?);
    }
    let r = pheno.residuals();
    let width = 2 * m;
    let u = DMatrix::from_fn(n, width, |i, j| rows[i][j]);
    let rsum: f64 = r.iter().sum();
    let mut num = 0.0;
    for j in 0..width {
        let col = u.column(j);
        let dot: f64 = col.iter().zip(r).map(|(a, b)| a * b).sum();
        let csum: f64 = col.iter().sum();
        num += (dot - csum * rsum / n as f64).powi(2);
    }
    let k = clamp_nonneg(num / pheno.residual_ss());
    let spec = features_spectrum(&u, pheno)?;
    let top = totals.iter().cloned().fold(0.0, f64::max) / (2.0 * n as f64);
    Ok(Analysis {
        k,
        spec,
        maf: 1.0 - top,
        n_used: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pheno(n: usize) -> PreparedPhenotype {
        PreparedPhenotype::new((0..n).map(|i| ((i * 13 % 7) as f64).cos() + 0.05 * i as f64).collect(), None).unwrap()
    }

    #[test]
    fn two_alleles_match_biallelic() {
        let n = 40;
        let x: Vec<u8> = (0..n).map(|i| ((i * 5 + i / 4) % 3) as u8).collect();
        let counts: Vec<f64> = x.iter().flat_map(|&g| [2.0 - g as f64, g as f64]).collect();
        let ph = pheno(n);
        let cfg = ScanConfig::default();
        let a = run_multiallelic(&cfg, &GenotypeColumn::allele_counts("s", "2", 9, 2, counts).unwrap(), &ph);
        let pm = cfg.validate().unwrap();
        let b = test_snp(&pm, &cfg, &GenotypeColumn::hard_calls("s", "2", 9, x).unwrap(), &ph);
        assert_eq!(format!("{a:?}"), format!("{b:?}"));
    }

    #[test]
    fn three_alleles_use_general_spectrum() {
        let n = 60;
        let rows: Vec<[f64; 3]> = (0..n)
            .map(|i| match (i * 7 + i / 5) % 6 {
                0 => [2.0, 0.0, 0.0],
                1 => [1.0, 1.0, 0.0],
                2 => [1.0, 0.0, 1.0],
                3 => [0.0, 2.0, 0.0],
                4 => [0.0, 1.0, 1.0],
                _ => [0.0, 0.0, 2.0],
            })
            .collect();
        let values: Vec<f64> = rows.iter().flatten().copied().collect();
        let col = GenotypeColumn::allele_counts("t", "3", 1, 3, values).unwrap();
        let cfg = ScanConfig {
            screen: false,
            ..ScanConfig::default()
        };
        let r = run_multiallelic(&cfg, &col, &pheno(n));
        assert!(!r.is_error(), "{}", r.method);
        let p = r.p_value.unwrap();
        assert!((0.0..=1.0).contains(&p));
        assert!(r.lambda1 >= r.lambda2 && r.lambda2 > 0.0);
    }
}
