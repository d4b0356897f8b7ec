//! File-to-file scan: read genotypes and phenotypes, join by sample ID,
//! stream records to the output TSV.

use std::path::PathBuf;

use super::{
    join_samples, read_dosage_tsv, read_sample_table, run_scan, GenoFormat, PackedReader, PreparedPhenotype,
    ResultWriter, ScanConfig, ScanSummary,
};
use crate::adjust::CovariateMatrix;
use crate::error::{GdcError, Result};
use crate::genotype::GenotypeColumn;

#[derive(Debug, Clone, PartialEq)]
pub struct ScanJob {
    pub geno: PathBuf,
    pub geno_format: GenoFormat,
    /// Phenotype TSV; covariate columns are read from the same file.
    pub pheno: PathBuf,
    pub pheno_col: String,
    pub covariates: Vec<String>,
    pub out: PathBuf,
    pub allow_missing_samples: bool,
}

/// Runs a whole scan. Samples with a missing phenotype or covariate value
/// are dropped from every SNP.
pub fn run_file_scan(cfg: &ScanConfig, job: &ScanJob) -> Result<ScanSummary> {
    cfg.validate()?;
    let table = read_sample_table(&job.pheno)?;
    let y_all = table.column(&job.pheno_col)?;
    let covar_all: Vec<&[f64]> = job.covariates.iter().map(|c| table.column(c)).collect::<Result<_>>()?;

    let (geno_ids, columns): (Vec<String>, Box<dyn Iterator<Item = Result<GenotypeColumn>>>) = match job.geno_format {
        GenoFormat::Packed => {
            let r = PackedReader::open(&job.geno)?;
            (r.sample_ids().to_vec(), Box::new(r))
        }
        GenoFormat::DosageTsv => {
            let t = read_dosage_tsv(&job.geno)?;
            (t.sample_ids, Box::new(t.columns.into_iter().map(Ok)))
        }
    };

    let join = join_samples(&geno_ids, &table.ids, job.allow_missing_samples)?;
    let complete = |p: usize| y_all[p].is_finite() && covar_all.iter().all(|c| c[p].is_finite());
    let (geno_index, pheno_index): (Vec<usize>, Vec<usize>) = join
        .geno_index
        .iter()
        .zip(&join.pheno_index)
        .filter(|(_, &p)| complete(p))
        .map(|(&g, &p)| (g, p))
        .unzip();
    if geno_index.is_empty() {
        return Err(GdcError::TooFewSamples { n: 0, min: 5 });
    }

    let y: Vec<f64> = pheno_index.iter().map(|&p| y_all[p]).collect();
    let covariates = if job.covariates.is_empty() {
        None
    } else {
        let cols = covar_all.iter().map(|c| pheno_index.iter().map(|&p| c[p]).collect()).collect();
        Some(CovariateMatrix::from_columns(job.covariates.clone(), cols)?.0)
    };
    let pheno = PreparedPhenotype::new(y, covariates)?;

    let identity = geno_index.len() == geno_ids.len() && geno_index.iter().enumerate().all(|(k, &g)| k == g);
    let columns: Box<dyn Iterator<Item = Result<GenotypeColumn>>> = if identity {
        columns
    } else {
        Box::new(columns.map(move |c| c.map(|c| c.select(&geno_index))))
    };

    let mut writer = ResultWriter::create(&job.out)?;
    let summary = run_scan(cfg, columns, &pheno, |r| writer.write(&r))?;
    writer.finish()?;
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scan::{read_results, write_packed, write_sample_table, SampleTable};

    #[test]
    fn packed_scan_drops_missing_phenotypes() {
        let dir = tempfile::tempdir().unwrap();
        let ids: Vec<String> = (0..12).map(|i| format!("s{i}")).collect();
        let cols: Vec<GenotypeColumn> = (0..3)
            .map(|j| {
                let x = (0..12).map(|i| ((i * (j + 2)) % 3) as u8).collect();
                GenotypeColumn::hard_calls(format!("v{j}"), "2", 100 + j as u64, x).unwrap()
            })
            .collect();
        let geno = dir.path().join("g.bed");
        write_packed(&geno, &ids, &cols).unwrap();
        let mut y: Vec<f64> = (0..12).map(|i| (i as f64 * 0.7).sin()).collect();
        y[4] = f64::NAN;
        // phenotype rows in reverse order to exercise the join
        let table = SampleTable {
            ids: ids.iter().rev().cloned().collect(),
            names: vec!["trait".into()],
            columns: vec![y.iter().rev().copied().collect()],
        };
        let pheno = dir.path().join("p.tsv");
        write_sample_table(&pheno, &table).unwrap();
        let job = ScanJob {
            geno,
            geno_format: GenoFormat::Packed,
            pheno,
            pheno_col: "trait".into(),
            covariates: vec![],
            out: dir.path().join("out.tsv"),
            allow_missing_samples: false,
        };
        let summary = run_file_scan(&ScanConfig::default(), &job).unwrap();
        assert_eq!(summary.n_snps, 3);
        let recs = read_results(&job.out).unwrap();
        assert!(recs.iter().all(|r| r.n_used == 11));
        assert_eq!(recs[1].chrom, "2");
    }
}
