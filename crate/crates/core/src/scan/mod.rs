//! Genome-wide scanning: per-SNP statistic, spectrum, screening bounds and
//! p-value, run over a genotype stream with a bounded worker pool.

mod files;
mod io;
mod multiallelic;
mod output;

use std::borrow::Cow;

use rayon::prelude::*;

use crate::adjust::{residualize, CovariateBasis, CovariateMatrix};
use crate::error::{GdcError, Result};
use crate::gdc::{self, centered_class_sums_counts, check_phenotype, clamp_nonneg, feature_norm_from_sums};
use crate::genotype::{GenotypeColumn, GenotypeData, MISSING};
use crate::nulldist::{
    asymptotic_pvalue_spectrum, exact_pvalue, pvalue_bounds, spectrum_from_gram_scaled, spectrum_unadjusted, Method,
    NullSpectrum,
};
use crate::premetric::PremetricB;

pub use io::{
    companion_paths, decode_packed, encode_packed, join_samples, read_dosage_tsv, read_sample_table, write_dosage_tsv,
    write_packed, write_sample_table, DosageTable, GenoFormat, PackedReader, SampleJoin, SampleTable,
};
pub use files::{run_file_scan, ScanJob};
pub use multiallelic::run_multiallelic;
pub use output::{read_results, write_results, ResultWriter, HEADER};

#[derive(Debug, Clone, PartialEq)]
pub struct ScanConfig {
    pub b: f64,
    /// Screening threshold M: SNPs with p* ≥ M skip exact evaluation.
    pub screen_high: f64,
    /// Floor m: SNPs with p** ≤ m report p** without exact evaluation.
    pub screen_low: f64,
    /// Above this many complete cases the large-sample law is used.
    pub asymptotic_switch: usize,
    /// Only used for the significance count in the summary.
    pub genome_wide_alpha: f64,
    /// Worker threads; 0 lets rayon decide.
    pub threads: usize,
    /// false computes the exact p-value for every SNP.
    pub screen: bool,
    /// SNPs handed to the pool at a time.
    pub chunk_size: usize,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            b: 3.0,
            screen_high: 1e-3,
            screen_low: 1e-32,
            asymptotic_switch: 30_000,
            genome_wide_alpha: 5e-8,
            threads: 0,
            screen: true,
            chunk_size: 4096,
        }
    }
}

impl ScanConfig {
    pub fn validate(&self) -> Result<PremetricB> {
        if !(0.0 < self.screen_low && self.screen_low < self.screen_high && self.screen_high < 1.0) {
            return Err(GdcError::InvalidParameter(format!(
                "screening thresholds need 0 < m < M < 1, got m = {}, M = {}",
                self.screen_low, self.screen_high
            )));
        }
        if self.chunk_size == 0 {
            return Err(GdcError::InvalidParameter("chunk size must be positive".into()));
        }
        PremetricB::new(self.b)
    }
}

/// One output row.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanRecord {
    pub snp_id: String,
    pub chrom: String,
    pub pos: u64,
    pub maf: f64,
    pub n_used: usize,
    pub b: f64,
    /// n𝒱̂²/σ̂².
    pub stat: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub p_lower: f64,
    /// Clamped to 1.
    pub p_upper: f64,
    pub p_value: Option<f64>,
    /// A [`Method`] tag or `error:<reason>`.
    pub method: String,
    pub neg_log10_p: f64,
}

impl ScanRecord {
    fn failed(col: &GenotypeColumn, b: f64, e: &GdcError) -> Self {
        ScanRecord {
            snp_id: col.snp_id.clone(),
            chrom: col.chrom.clone(),
            pos: col.pos,
            maf: f64::NAN,
            n_used: 0,
            b,
            stat: f64::NAN,
            lambda1: f64::NAN,
            lambda2: f64::NAN,
            p_lower: f64::NAN,
            p_upper: f64::NAN,
            p_value: None,
            method: format!("error:{}", e.tag()),
            neg_log10_p: f64::NAN,
        }
    }

    pub fn is_error(&self) -> bool {
        self.method.starts_with("error:")
    }

    /// The value used for plotting and significance: the exact p when
    /// present, otherwise the (clamped) upper bound.
    pub fn reported_p(&self) -> f64 {
        self.p_value.unwrap_or(self.p_upper)
    }
}

/// Phenotype after the once-per-scan preprocessing: centred, or
/// residualized on the covariates with an orthonormal basis kept for the
/// per-SNP projections.
#[derive(Debug, Clone)]
pub struct PreparedPhenotype {
    y: Vec<f64>,
    covariates: Option<CovariateMatrix>,
    residuals: Vec<f64>,
    rss: f64,
    basis: Option<CovariateBasis>,
    /// Row-major copy of the basis for the per-class accumulation.
    q_rows: Vec<f64>,
}

impl PreparedPhenotype {
    pub fn new(y: Vec<f64>, covariates: Option<CovariateMatrix>) -> Result<Self> {
        check_phenotype(&y)?;
        if y.len() < gdc::MIN_SAMPLES {
            return Err(GdcError::TooFewSamples {
                n: y.len(),
                min: gdc::MIN_SAMPLES,
            });
        }
        match covariates {
            None => {
                let residuals = gdc::centered(&y);
                let rss = gdc::residual_ss(&residuals, &y)?;
                Ok(PreparedPhenotype {
                    y,
                    covariates: None,
                    residuals,
                    rss,
                    basis: None,
                    q_rows: Vec::new(),
                })
            }
            Some(z) => {
                let fit = residualize(&y, &z)?;
                let rss = gdc::residual_ss(&fit.residuals, &y)?;
                let basis = CovariateBasis::from_covariates(&z)?;
                let q = basis.q();
                let c = q.ncols();
                let mut q_rows = vec![0.0; q.nrows() * c];
                for i in 0..q.nrows() {
                    for j in 0..c {
                        q_rows[i * c + j] = q[(i, j)];
                    }
                }
                Ok(PreparedPhenotype {
                    y,
                    covariates: Some(z),
                    residuals: fit.residuals,
                    rss,
                    basis: Some(basis),
                    q_rows,
                })
            }
        }
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    /// Columns removed from the response: 1, or q + 1 with covariates.
    pub fn df_sub(&self) -> usize {
        self.basis.as_ref().map_or(1, |b| b.cols())
    }

    pub fn residuals(&self) -> &[f64] {
        &self.residuals
    }

    pub fn residual_ss(&self) -> f64 {
        self.rss
    }

    pub fn sigma2_hat(&self) -> f64 {
        self.rss / self.n() as f64
    }

    pub(crate) fn basis(&self) -> Option<&CovariateBasis> {
        self.basis.as_ref()
    }

    /// Re-prepared on a subset of samples (complete cases of one SNP).
    pub fn subset(&self, keep: &[usize]) -> Result<Self> {
        let y = keep.iter().map(|&i| self.y[i]).collect();
        let z = self.covariates.as_ref().map(|z| z.select_rows(keep));
        PreparedPhenotype::new(y, z)
    }

    /// Sum over each genotype class of the rows of Q.
    fn class_basis_sums(&self, x: &[u8]) -> [Vec<f64>; 3] {
        let c = self.df_sub();
        let mut s = [vec![0.0; c], vec![0.0; c], vec![0.0; c]];
        for (i, &g) in x.iter().enumerate() {
            let row = &self.q_rows[i * c..(i + 1) * c];
            for (a, &v) in s[g as usize].iter_mut().zip(row) {
                *a += v;
            }
        }
        s
    }
}

/// Statistic and null spectrum of one complete-case SNP.
#[derive(Debug, Clone)]
pub(crate) struct Analysis {
    pub k: f64,
    pub spec: NullSpectrum,
    pub maf: f64,
    pub n_used: usize,
}

/// Hard-call path: O(n) class sums, closed-form spectrum without
/// covariates, per-class basis sums with them.
pub(crate) fn analyze_calls(pm: &PremetricB, x: &[u8], pheno: &PreparedPhenotype) -> Result<Analysis> {
    let n = x.len();
    let (s, counts) = centered_class_sums_counts(x, pheno.residuals());
    let k = clamp_nonneg(feature_norm_from_sums(pm, &s) / pheno.residual_ss());
    let nf = n as f64;
    let spec = match pheno.basis() {
        None => {
            let freqs = [counts[0] as f64 / nf, counts[1] as f64 / nf, counts[2] as f64 / nf];
            spectrum_unadjusted(pm, freqs, n)?
        }
        Some(basis) => {
            let fm = pm.canonical_feature_map();
            let sums = pheno.class_basis_sums(x);
            // UᵗU and QᵗU from class counts and class sums of Q
            let mut utu = nalgebra::DMatrix::<f64>::zeros(2, 2);
            let mut qtu = nalgebra::DMatrix::<f64>::zeros(basis.cols(), 2);
            for g in 0..3 {
                let phi = [fm.rows[0][g], fm.rows[1][g]];
                for a in 0..2 {
                    for b in 0..2 {
                        utu[(a, b)] += counts[g] as f64 * phi[a] * phi[b];
                    }
                    for (j, v) in sums[g].iter().enumerate() {
                        qtu[(j, a)] += v * phi[a];
                    }
                }
            }
            let gram = (&utu - qtu.tr_mul(&qtu)) / nf;
            let scale = (utu[(0, 0)].max(utu[(1, 1)])) / nf;
            spectrum_from_gram_scaled(&gram, n, basis.cols(), scale)?
        }
    };
    Ok(Analysis {
        k,
        spec,
        maf: maf_of_counts(counts),
        n_used: n,
    })
}

fn maf_of_counts(c: [usize; 3]) -> f64 {
    let total = (c[0] + c[1] + c[2]) as f64;
    if total == 0.0 {
        return f64::NAN;
    }
    let q = (c[1] + 2 * c[2]) as f64 / (2.0 * total);
    q.min(1.0 - q)
}

/// Interpolated-feature path for fractional dosages.
pub(crate) fn analyze_dosages(pm: &PremetricB, x: &[f64], pheno: &PreparedPhenotype) -> Result<Analysis> {
    let n = x.len();
    let k = clamp_nonneg(gdc::feature_norm_dosage(pm, x, pheno.residuals()) / pheno.residual_ss());
    let u = nalgebra::DMatrix::from_fn(n, 2, |i, j| {
        let (a, b) = pm.dosage_features_unchecked(x[i]);
        if j == 0 {
            a
        } else {
            b
        }
    });
    let spec = features_spectrum(&u, pheno)?;
    let q = x.iter().sum::<f64>() / (2.0 * n as f64);
    Ok(Analysis {
        k,
        spec,
        maf: q.min(1.0 - q),
        n_used: n,
    })
}

/// Spectrum of (1/n)Uᵗ(I − H)U, H the mean or covariate projector.
pub(crate) fn features_spectrum(u: &nalgebra::DMatrix<f64>, pheno: &PreparedPhenotype) -> Result<NullSpectrum> {
    let n = u.nrows();
    let scale = crate::nulldist::spectrum::raw_scale(u);
    match pheno.basis() {
        Some(basis) => spectrum_from_gram_scaled(&basis.projected_gram(u)?, n, basis.cols(), scale),
        None => {
            let mut uc = u.clone();
            for mut col in uc.column_iter_mut() {
                let m = col.mean();
                col.add_scalar_mut(-m);
            }
            spectrum_from_gram_scaled(&(uc.tr_mul(&uc) / n as f64), n, 1, scale)
        }
    }
}

/// Dosages that are all whole numbers go through the hard-call path, so
/// the two agree bit for bit at integer inputs.
fn integral_calls(x: &[f64]) -> Option<Vec<u8>> {
    x.iter()
        .map(|&v| if v == 0.0 || v == 1.0 || v == 2.0 { Some(v as u8) } else { None })
        .collect()
}

fn analyze(pm: &PremetricB, col: &GenotypeColumn, pheno: &PreparedPhenotype) -> Result<Analysis> {
    if col.n() != pheno.n() {
        return Err(GdcError::SampleMismatch {
            geno: col.n(),
            pheno: pheno.n(),
        });
    }
    let complete = match &col.data {
        GenotypeData::HardCalls(x) => !x.contains(&MISSING),
        GenotypeData::Dosages(x) => !x.iter().any(|v| v.is_nan()),
        GenotypeData::AlleleCounts { values, .. } => !values.iter().any(|v| v.is_nan()),
    };
    let (col, pheno): (Cow<GenotypeColumn>, Cow<PreparedPhenotype>) = if complete {
        (Cow::Borrowed(col), Cow::Borrowed(pheno))
    } else {
        let keep = col.observed();
        if keep.len() < gdc::MIN_SAMPLES {
            return Err(GdcError::TooFewSamples {
                n: keep.len(),
                min: gdc::MIN_SAMPLES,
            });
        }
        (Cow::Owned(col.select(&keep)), Cow::Owned(pheno.subset(&keep)?))
    };
    match &col.data {
        GenotypeData::HardCalls(x) => analyze_calls(pm, x, &pheno),
        GenotypeData::Dosages(x) => match integral_calls(x) {
            Some(calls) => analyze_calls(pm, &calls, &pheno),
            None => analyze_dosages(pm, x, &pheno),
        },
        GenotypeData::AlleleCounts { m, values } => multiallelic::analyze_allele_counts(pm, *m, values, &pheno),
    }
}

/// p-value decision for one SNP: (p*, p**, p, method).
fn decide(cfg: &ScanConfig, spec: &NullSpectrum, k: f64) -> Result<(f64, f64, Option<f64>, Method)> {
    if spec.rank() == 0 {
        return Ok((1.0, 1.0, Some(1.0), Method::DegenerateSpectrum));
    }
    let bounded = spec.rank() <= 2;
    let (lo, hi) = if bounded {
        let two = NullSpectrum {
            lambdas: vec![spec.lambda1(), spec.lambda2()],
            ..spec.clone()
        };
        pvalue_bounds(&two, k)?
    } else {
        (0.0, 1.0)
    };
    if cfg.screen && bounded {
        // exact evaluation only when p* < M and p** > m
        if !(lo < cfg.screen_high) {
            return Ok((lo, hi, None, Method::ScreenedOutHigh));
        }
        if !(hi > cfg.screen_low) {
            return Ok((lo, hi, Some(hi), Method::ScreenedOutLow));
        }
    }
    let p = if spec.n > cfg.asymptotic_switch {
        asymptotic_pvalue_spectrum(spec, k)?
    } else {
        exact_pvalue(spec, k)?
    };
    Ok((lo, hi, Some(p.p), p.method))
}

fn neg_log10(p: f64) -> f64 {
    if p <= 0.0 {
        f64::INFINITY
    } else {
        -p.log10()
    }
}

/// Runs the whole per-SNP pipeline; failures become `error:` records.
pub fn test_snp(pm: &PremetricB, cfg: &ScanConfig, col: &GenotypeColumn, pheno: &PreparedPhenotype) -> ScanRecord {
    let run = || -> Result<ScanRecord> {
        let a = analyze(pm, col, pheno)?;
        let (lo, hi, p, method) = decide(cfg, &a.spec, a.k)?;
        let hi = hi.min(1.0);
        Ok(ScanRecord {
            snp_id: col.snp_id.clone(),
            chrom: col.chrom.clone(),
            pos: col.pos,
            maf: a.maf,
            n_used: a.n_used,
            b: pm.b(),
            stat: a.k,
            lambda1: a.spec.lambda1(),
            lambda2: a.spec.lambda2(),
            p_lower: lo,
            p_upper: hi,
            p_value: p,
            method: method.as_str().to_string(),
            neg_log10_p: neg_log10(p.unwrap_or(hi)),
        })
    };
    run().unwrap_or_else(|e| ScanRecord::failed(col, pm.b(), &e))
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ScanSummary {
    pub n_snps: usize,
    pub n_exact: usize,
    pub n_screened_high: usize,
    pub n_screened_low: usize,
    pub n_errors: usize,
    /// Records whose reported p is below the genome-wide level.
    pub n_significant: usize,
}

impl ScanSummary {
    fn add(&mut self, r: &ScanRecord, alpha: f64) {
        self.n_snps += 1;
        match r.method.as_str() {
            m if m.starts_with("error:") => self.n_errors += 1,
            "screened_out_high" => self.n_screened_high += 1,
            "screened_out_low" => self.n_screened_low += 1,
            _ => self.n_exact += 1,
        }
        if !r.is_error() && r.reported_p() < alpha {
            self.n_significant += 1;
        }
    }
}

/// Scans a genotype stream, handing records to `sink` in input order.
/// Errors from the stream abort the scan; per-SNP errors do not.
pub fn run_scan<I, F>(cfg: &ScanConfig, genotypes: I, pheno: &PreparedPhenotype, mut sink: F) -> Result<ScanSummary>
where
    I: IntoIterator<Item = Result<GenotypeColumn>>,
    F: FnMut(ScanRecord) -> Result<()>,
{
    let pm = cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| GdcError::InvalidParameter(format!("thread pool: {e}")))?;
    let mut summary = ScanSummary::default();
    let mut iter = genotypes.into_iter();
    let mut chunk = Vec::with_capacity(cfg.chunk_size);
    loop {
        chunk.clear();
        for col in iter.by_ref().take(cfg.chunk_size) {
            chunk.push(col?);
        }
        if chunk.is_empty() {
            break;
        }
        let records: Vec<ScanRecord> =
            pool.install(|| chunk.par_iter().map(|c| test_snp(&pm, cfg, c, pheno)).collect());
        for r in records {
            summary.add(&r, cfg.genome_wide_alpha);
            sink(r)?;
        }
    }
    Ok(summary)
}

/// In-memory convenience over [`run_scan`].
pub fn scan_columns(cfg: &ScanConfig, columns: &[GenotypeColumn], pheno: &PreparedPhenotype) -> Result<Vec<ScanRecord>> {
    let mut out = Vec::with_capacity(columns.len());
    run_scan(cfg, columns.iter().cloned().map(Ok), pheno, |r| {
        out.push(r);
        Ok(())
    })?;
    Ok(out)
}
