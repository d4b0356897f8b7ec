//! Wall-clock comparison of the screened scan against exact-everywhere.

use std::io::Write;
use std::time::Instant;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::{hwe_genotypes, replicate_rng};
use crate::error::{GdcError, Result};
use crate::genotype::GenotypeColumn;
use crate::numerics::special::fmt_f64;
use crate::scan::{scan_columns, PreparedPhenotype, ScanConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub sample_sizes: Vec<usize>,
    pub snp_counts: Vec<usize>,
    pub b: f64,
    /// 0 uses all cores.
    pub threads: usize,
    pub seed: u64,
    /// Per-SNP MAF is uniform on this range.
    pub maf_range: (f64, f64),
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            sample_sizes: vec![1000],
            snp_counts: vec![10_000],
            b: 3.0,
            threads: 0,
            seed: 1,
            maf_range: (0.05, 0.5),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub n: usize,
    pub snps: usize,
    pub fast_seconds: f64,
    pub naive_seconds: f64,
    /// naive / fast.
    pub ratio: f64,
    /// SNPs the screened scan still evaluated exactly.
    pub fast_exact: usize,
}

/// Independent HWE SNPs and a standard-normal phenotype. SNP j uses stream j,
/// the phenotype stream u64::MAX.
pub fn null_panel(n: usize, snps: usize, maf_range: (f64, f64), seed: u64) -> Result<(Vec<GenotypeColumn>, Vec<f64>)> {
    let (lo, hi) = maf_range;
    if !(lo > 0.0 && lo <= hi && hi <= 0.5) {
        return Err(GdcError::InvalidParameter(format!("maf range ({lo}, {hi}) not inside (0, 0.5]")));
    }
    let cols = (0..snps as u64)
        .into_par_iter()
        .map(|j| {
            let mut rng = replicate_rng(seed, j);
            let q = if hi > lo { rng.random_range(lo..hi) } else { lo };
            GenotypeColumn::hard_calls(format!("snp{}", j + 1), "1", j + 1, hwe_genotypes(n, q, &mut rng))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rng = replicate_rng(seed, u64::MAX);
    let y = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    Ok((cols, y))
}

pub fn bench_throughput(cfg: &BenchConfig) -> Result<Vec<BenchRow>> {
    let mut rows = Vec::new();
    for &n in &cfg.sample_sizes {
        for &snps in &cfg.snp_counts {
            let (cols, y) = null_panel(n, snps, cfg.maf_range, cfg.seed)?;
            let pheno = PreparedPhenotype::new(y, None)?;
            let base = ScanConfig {
                b: cfg.b,
                threads: cfg.threads,
                ..Default::default()
            };
            let t = Instant::now();
            let fast = scan_columns(&ScanConfig { screen: true, ..base.clone() }, &cols, &pheno)?;
            let fast_seconds = t.elapsed().as_secs_f64();
            let t = Instant::now();
            scan_columns(&ScanConfig { screen: false, ..base }, &cols, &pheno)?;
            let naive_seconds = t.elapsed().as_secs_f64();
            rows.push(BenchRow {
                n,
                snps,
                fast_seconds,
                naive_seconds,
                ratio: if fast_seconds > 0.0 { naive_seconds / fast_seconds } else { f64::NAN },
                fast_exact: fast.iter().filter(|r| !r.method.starts_with("screened")).count(),
            });
        }
    }
    Ok(rows)
}

pub const BENCH_HEADER: &str = "n\tsnps\tfast_seconds\tnaive_seconds\tratio\tfast_exact";

pub fn write_bench_table<W: Write>(rows: &[BenchRow], mut w: W) -> Result<()> {
    writeln!(w, "{BENCH_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{}\t{}\t{}\t{}\t{}\t{}",
            r.n,
            r.snps,
            fmt_f64(r.fast_seconds),
            fmt_f64(r.naive_seconds),
            fmt_f64(r.ratio),
            r.fast_exact
        )?;
    }
    Ok(())
}
