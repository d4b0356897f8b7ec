//! Simulation harness: null calibration, power under the dominance model
//! y = β·(h·1{X=1} + 1{X=2}) + ε, random heterozygous-effect laws, classical
//! competitors and scan timing.
//!
//! Replicate `r` draws from its own ChaCha8 stream, so tables are
//! reproducible bit-for-bit whatever the thread count.

mod bench;
pub mod competitors;
pub mod stats;

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution, Gamma, StandardNormal};
use rayon::prelude::*;

use crate::error::{GdcError, Result};
use crate::gdc::standardized_statistic;
use crate::genotype::genotype_frequencies;
use crate::nulldist::{exact_pvalue, pvalue_bounds, spectrum_unadjusted, NullSpectrum};
use crate::numerics::special::fmt_f64;
use crate::premetric::PremetricB;

pub use bench::{bench_throughput, null_panel, write_bench_table, BenchConfig, BenchRow, BENCH_HEADER};
pub use competitors::{additive_f, anova_f, competitor_tests, simple_regression_f, Competitors, TestP};
pub use stats::{ks_critical_1pct, ks_uniform, paired_difference, trapezoid, wilson_interval};

/// Random laws for the heterozygous effect.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HetLaw {
    /// Beta(s, s) with s = (b − 2)/(4 − b), for b ∈ (2, 4).
    Beta,
    /// G₁/(G₁ − G₂) with independent Gamma((2 − b)/b, 1) draws, for b ∈ (0, 2).
    GammaRatio,
}

#[derive(Debug, Clone, PartialEq)]
pub enum HetEffect {
    /// One power row per grid value.
    Grid(Vec<f64>),
    /// h redrawn each replicate from the law attached to `b`.
    Random { law: HetLaw, b: f64 },
}

impl HetEffect {
    pub fn default_grid() -> Self {
        HetEffect::Grid((0..=10).map(|i| i as f64 / 10.0).collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimScenario {
    pub n: usize,
    pub maf: f64,
    pub b_values: Vec<f64>,
    pub h: HetEffect,
    pub beta: f64,
    pub noise_sd: f64,
    pub alpha: f64,
    pub replications: usize,
    pub seed: u64,
    /// Draw the genotype vector once and keep it across replicates.
    pub fixed_x: bool,
    /// Confidence level of the reported rate intervals.
    pub ci_level: f64,
}

impl Default for SimScenario {
    fn default() -> Self {
        SimScenario {
            n: 300,
            maf: 0.3,
            b_values: vec![2.0, 3.0, 4.0],
            h: HetEffect::default_grid(),
            beta: 1.0,
            noise_sd: 5.0,
            alpha: 0.05,
            replications: 10_000,
            seed: 1,
            fixed_x: false,
            ci_level: 0.95,
        }
    }
}

impl SimScenario {
    pub fn validate(&self) -> Result<Vec<PremetricB>> {
        let bad = |m: String| Err(GdcError::InvalidParameter(m));
        if self.n < 5 {
            return Err(GdcError::TooFewSamples { n: self.n, min: 5 });
        }
        if !(self.maf > 0.0 && self.maf <= 0.5) {
            return bad(format!("maf {} outside (0, 0.5]", self.maf));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return bad(format!("alpha {} outside [0, 1]", self.alpha));
        }
        if !(self.noise_sd > 0.0) || !self.beta.is_finite() {
            return bad("noise_sd must be positive and beta finite".into());
        }
        if !(self.ci_level > 0.0 && self.ci_level < 1.0) {
            return bad(format!("ci level {} outside (0, 1)", self.ci_level));
        }
        if let HetEffect::Random { law, b } = self.h {
            check_law(law, b)?;
        }
        self.b_values.iter().map(|&b| PremetricB::new(b)).collect()
    }

    /// Labels of the tested methods, in decision-column order.
    pub fn method_labels(&self) -> Vec<String> {
        let mut v: Vec<String> = self.b_values.iter().map(|b| format!("gdc_b{}", fmt_f64(*b))).collect();
        v.push("additive_F".into());
        v.push("anova_F".into());
        v
    }
}

fn check_law(law: HetLaw, b: f64) -> Result<()> {
    let ok = match law {
        HetLaw::Beta => b > 2.0 && b < 4.0,
        HetLaw::GammaRatio => b > 0.0 && b < 2.0,
    };
    if ok {
        Ok(())
    } else {
        Err(GdcError::InvalidParameter(format!("b = {b} outside the range of {law:?}")))
    }
}

/// One draw of h from the law for which the b-test is locally most powerful.
pub fn draw_heterozygous_effect<R: Rng + ?Sized>(b: f64, law: HetLaw, rng: &mut R) -> Result<f64> {
    check_law(law, b)?;
    match law {
        HetLaw::Beta => {
            let s = (b - 2.0) / (4.0 - b);
            let d = Beta::new(s, s).map_err(|e| GdcError::InvalidParameter(e.to_string()))?;
            Ok(d.sample(rng))
        }
        HetLaw::GammaRatio => {
            let d = Gamma::new((2.0 - b) / b, 1.0).map_err(|e| GdcError::InvalidParameter(e.to_string()))?;
            let g1: f64 = d.sample(rng);
            let g2: f64 = d.sample(rng);
            Ok(g1 / (g1 - g2))
        }
    }
}

pub fn replicate_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// n genotypes under Hardy–Weinberg proportions for minor-allele frequency q.
pub fn hwe_genotypes<R: Rng + ?Sized>(n: usize, q: f64, rng: &mut R) -> Vec<u8> {
    let p2 = q * q;
    let p12 = p2 + 2.0 * q * (1.0 - q);
    (0..n)
        .map(|_| {
            let u: f64 = rng.random();
            if u < p2 {
                2
            } else if u < p12 {
                1
            } else {
                0
            }
        })
        .collect()
}

/// y = β·(h·1{X=1} + 1{X=2}) + noise_sd·N(0, 1).
pub fn dominance_phenotype<R: Rng + ?Sized>(x: &[u8], beta: f64, h: f64, noise_sd: f64, rng: &mut R) -> Vec<f64> {
    x.iter()
        .map(|&g| {
            let mean = match g {
                1 => beta * h,
                2 => beta,
                _ => 0.0,
            };
            let e: f64 = StandardNormal.sample(rng);
            mean + noise_sd * e
        })
        .collect()
}

/// GDC p-value for hard calls without covariates.
pub fn gdc_pvalue(pm: &PremetricB, x: &[u8], y: &[f64]) -> Result<f64> {
    let spec = spectrum_unadjusted(pm, genotype_frequencies(x), x.len())?;
    let (k, _) = standardized_statistic(pm, x, y)?;
    Ok(exact_pvalue(&spec, k)?.p)
}

/// p < α, settled from the bounds when they already decide it.
fn gdc_reject(spec: &NullSpectrum, k: f64, alpha: f64) -> Result<bool> {
    if spec.rank() == 0 {
        return Ok(false);
    }
    let (lo, hi) = pvalue_bounds(spec, k)?;
    if lo >= alpha {
        return Ok(false);
    }
    if hi < alpha {
        return Ok(true);
    }
    Ok(exact_pvalue(spec, k)?.p < alpha)
}

struct Setup {
    pms: Vec<PremetricB>,
    fixed: Option<(Vec<u8>, Vec<NullSpectrum>)>,
}

impl Setup {
    fn new(s: &SimScenario) -> Result<Self> {
        let pms = s.validate()?;
        let fixed = if s.fixed_x {
            let x = hwe_genotypes(s.n, s.maf, &mut replicate_rng(s.seed, u64::MAX));
            let specs = spectra(&pms, &x)?;
            Some((x, specs))
        } else {
            None
        };
        Ok(Setup { pms, fixed })
    }
}

fn spectra(pms: &[PremetricB], x: &[u8]) -> Result<Vec<NullSpectrum>> {
    let f = genotype_frequencies(x);
    pms.iter().map(|pm| spectrum_unadjusted(pm, f, x.len())).collect()
}

/// Runs every replicate in parallel and returns the per-replicate outputs in
/// replicate order.
fn replicates<T, F>(s: &SimScenario, setup: &Setup, stream_offset: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&[u8], &[NullSpectrum], &mut ChaCha8Rng) -> Result<T> + Sync,
{
    (0..s.replications as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = replicate_rng(s.seed, stream_offset + r);
            match &setup.fixed {
                Some((x, specs)) => f(x, specs, &mut rng),
                None => {
                    let x = hwe_genotypes(s.n, s.maf, &mut rng);
                    let specs = spectra(&setup.pms, &x)?;
                    f(&x, &specs, &mut rng)
                }
            }
        })
        .collect()
}

fn decisions_for(setup: &Setup, x: &[u8], specs: &[NullSpectrum], y: &[f64], alpha: f64) -> Result<Vec<bool>> {
    let mut out = Vec::with_capacity(setup.pms.len() + 2);
    for (pm, spec) in setup.pms.iter().zip(specs) {
        let (k, _) = standardized_statistic(pm, x, y)?;
        out.push(gdc_reject(spec, k, alpha)?);
    }
    let c = competitor_tests(x, y)?;
    out.push(c.additive_f.p < alpha);
    out.push(c.anova_f.p < alpha);
    Ok(out)
}

/// Null p-values per method (columns follow [`SimScenario::method_labels`]).
#[derive(Debug, Clone, PartialEq)]
pub struct NullPValues {
    pub labels: Vec<String>,
    /// `pvalues[method][replicate]`.
    pub pvalues: Vec<Vec<f64>>,
}

/// Exact p-values of every method on pure-noise phenotypes.
pub fn null_pvalues(s: &SimScenario) -> Result<NullPValues> {
    let setup = Setup::new(s)?;
    let rows = replicates(s, &setup, 0, |x, specs, rng| {
        let y = dominance_phenotype(x, 0.0, 0.0, s.noise_sd, rng);
        let mut out = Vec::with_capacity(specs.len() + 2);
        for (pm, spec) in setup.pms.iter().zip(specs) {
            let (k, _) = standardized_statistic(pm, x, &y)?;
            out.push(exact_pvalue(spec, k)?.p);
        }
        let c = competitor_tests(x, &y)?;
        out.push(c.additive_f.p);
        out.push(c.anova_f.p);
        Ok(out)
    })?;
    let labels = s.method_labels();
    let pvalues = (0..labels.len()).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
    Ok(NullPValues { labels, pvalues })
}

/// One line of a rejection-rate table.
#[derive(Debug, Clone, PartialEq)]
pub struct RateRow {
    pub method: String,
    pub n: usize,
    pub maf: f64,
    /// "null", a grid value, or the random law.
    pub h: String,
    pub beta: f64,
    pub alpha: f64,
    pub replications: usize,
    pub rejections: usize,
    pub rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

fn rate_rows(s: &SimScenario, h: &str, beta: f64, decisions: &[Vec<bool>]) -> Vec<RateRow> {
    s.method_labels()
        .into_iter()
        .enumerate()
        .map(|(j, method)| {
            let rejections = decisions.iter().filter(|d| d[j]).count();
            let (ci_low, ci_high) = wilson_interval(rejections, decisions.len(), s.ci_level);
            RateRow {
                method,
                n: s.n,
                maf: s.maf,
                h: h.to_string(),
                beta,
                alpha: s.alpha,
                replications: decisions.len(),
                rejections,
                rate: if decisions.is_empty() { 0.0 } else { rejections as f64 / decisions.len() as f64 },
                ci_low,
                ci_high,
            }
        })
        .collect()
}

/// Per-replicate rejection decisions under the null, `[replicate][method]`.
pub fn null_decisions(s: &SimScenario) -> Result<Vec<Vec<bool>>> {
    let setup = Setup::new(s)?;
    replicates(s, &setup, 0, |x, specs, rng| {
        let y = dominance_phenotype(x, 0.0, 0.0, s.noise_sd, rng);
        decisions_for(&setup, x, specs, &y, s.alpha)
    })
}

/// Empirical type-I error of every method.
pub fn simulate_null(s: &SimScenario) -> Result<Vec<RateRow>> {
    let d = null_decisions(s)?;
    Ok(rate_rows(s, "null", 0.0, &d))
}

/// Per-replicate decisions at one heterozygous effect, `[replicate][method]`.
/// With `h = None` the scenario's random law supplies h. All h values share
/// replicate streams, so power curves use common random numbers.
pub fn power_decisions(s: &SimScenario, h: Option<f64>) -> Result<Vec<Vec<bool>>> {
    let setup = Setup::new(s)?;
    let law = match (&s.h, h) {
        (_, Some(_)) => None,
        (HetEffect::Random { law, b }, None) => Some((*law, *b)),
        (HetEffect::Grid(_), None) => {
            return Err(GdcError::InvalidParameter("no h given and no random law in scenario".into()))
        }
    };
    replicates(s, &setup, 0, |x, specs, rng| {
        let hv = match (h, law) {
            (Some(v), _) => v,
            (None, Some((law, b))) => draw_heterozygous_effect(b, law, rng)?,
            (None, None) => unreachable!(),
        };
        let y = dominance_phenotype(x, s.beta, hv, s.noise_sd, rng);
        decisions_for(&setup, x, specs, &y, s.alpha)
    })
}

/// Empirical power per method, one block of rows per h.
pub fn simulate_power(s: &SimScenario) -> Result<Vec<RateRow>> {
    match &s.h {
        HetEffect::Grid(grid) => {
            let mut rows = Vec::new();
            for &h in grid {
                let d = power_decisions(s, Some(h))?;
                rows.extend(rate_rows(s, &fmt_f64(h), s.beta, &d));
            }
            Ok(rows)
        }
        HetEffect::Random { law, b } => {
            let d = power_decisions(s, None)?;
            let label = match law {
                HetLaw::Beta => format!("beta_law_b{}", fmt_f64(*b)),
                HetLaw::GammaRatio => format!("gamma_ratio_law_b{}", fmt_f64(*b)),
            };
            Ok(rate_rows(s, &label, s.beta, &d))
        }
    }
}

/// Trapezoidal area under the power curve of `method` over numeric h rows.
pub fn integrated_power(rows: &[RateRow], method: &str) -> f64 {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.method == method)
        .filter_map(|r| r.h.parse::<f64>().ok().map(|h| (h, r.rate)))
        .collect();
    trapezoid(&pts)
}

pub const RATE_HEADER: &str = "method\tn\tmaf\th\tbeta\talpha\treplications\trejections\trate\tci_low\tci_high";

pub fn write_rate_table<W: Write>(rows: &[RateRow], mut w: W) -> Result<()> {
    writeln!(w, "{RATE_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            r.method,
            r.n,
            fmt_f64(r.maf),
            r.h,
            fmt_f64(r.beta),
            fmt_f64(r.alpha),
            r.replications,
            r.rejections,
            fmt_f64(r.rate),
            fmt_f64(r.ci_low),
            fmt_f64(r.ci_high)
        )?;
    }
    Ok(())
}
