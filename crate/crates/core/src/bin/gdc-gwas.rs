use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use gdc_gwas::error::{GdcError, Result};
use gdc_gwas::scan::{run_file_scan, GenoFormat, ScanConfig, ScanJob};
use gdc_gwas::simbench::{
    bench_throughput, simulate_null, simulate_power, write_bench_table, write_rate_table, BenchConfig, HetEffect,
    HetLaw, SimScenario,
};

#[derive(Parser)]
#[command(name = "gdc-gwas", version, about = "Generalized distance covariance SNP association tests")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Test every SNP in a genotype file against one phenotype.
    Scan(ScanArgs),
    /// Monte Carlo type-I error or power tables.
    Simulate(SimArgs),
    /// Time the screened scan against exact evaluation on null panels.
    Bench(BenchArgs),
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long)]
    geno: PathBuf,
    #[arg(long, default_value = "packed")]
    geno_format: GenoFormat,
    #[arg(long)]
    pheno: PathBuf,
    #[arg(long)]
    pheno_col: String,
    /// Covariate columns of the phenotype file.
    #[arg(long, value_delimiter = ',')]
    covar: Vec<String>,
    #[arg(long, default_value_t = 3.0)]
    b: f64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long = "screen-M", default_value_t = 1e-3)]
    screen_high: f64,
    #[arg(long = "screen-m", default_value_t = 1e-32)]
    screen_low: f64,
    #[arg(long, default_value_t = 30_000)]
    asymptotic_switch: usize,
    /// 0 uses every core.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    #[arg(long)]
    no_screen: bool,
    #[arg(long)]
    allow_missing_samples: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum SimKind {
    Null,
    Power,
}

#[derive(Clone, Copy, ValueEnum)]
enum LawArg {
    Beta,
    GammaRatio,
}

#[derive(Args)]
struct SimArgs {
    #[arg(long, value_enum, default_value = "null")]
    kind: SimKind,
    #[arg(long, default_value_t = 300)]
    n: usize,
    /// One table block per value.
    #[arg(long, value_delimiter = ',', default_value = "0.3")]
    maf: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "2,3,4")]
    b: Vec<f64>,
    /// Heterozygous-effect grid for power runs.
    #[arg(long, value_delimiter = ',', default_value = "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1")]
    h: Vec<f64>,
    /// Draw h per replicate from this law instead of using the grid.
    #[arg(long, value_enum, requires = "h_law_b")]
    h_law: Option<LawArg>,
    #[arg(long)]
    h_law_b: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long, default_value_t = 5.0)]
    noise_sd: f64,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, default_value_t = 10_000)]
    reps: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Keep one genotype draw for all replicates.
    #[arg(long)]
    fixed_x: bool,
    #[arg(long, default_value_t = 0.95)]
    ci_level: f64,
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Defaults to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_value = "1000")]
    n: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "10000")]
    snps: Vec<usize>,
    #[arg(long, default_value_t = 3.0)]
    b: f64,
    #[arg(long, default_value_t = 0)]
    threads: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn scan(a: ScanArgs) -> Result<()> {
    let cfg = ScanConfig {
        b: a.b,
        screen_high: a.screen_high,
        screen_low: a.screen_low,
        asymptotic_switch: a.asymptotic_switch,
        threads: a.threads,
        screen: !a.no_screen,
        ..Default::default()
    };
    let job = ScanJob {
        geno: a.geno,
        geno_format: a.geno_format,
        pheno: a.pheno,
        pheno_col: a.pheno_col,
        covariates: a.covar,
        out: a.out,
        allow_missing_samples: a.allow_missing_samples,
    };
    let s = run_file_scan(&cfg, &job)?;
    eprintln!(
        "{} SNPs: {} exact, {} screened high, {} screened low, {} errors, {} below {:e}",
        s.n_snps, s.n_exact, s.n_screened_high, s.n_screened_low, s.n_errors, s.n_significant, cfg.genome_wide_alpha
    );
    Ok(())
}

fn simulate(a: SimArgs) -> Result<()> {
    let h = match (a.h_law, a.h_law_b) {
        (Some(LawArg::Beta), Some(b)) => HetEffect::Random { law: HetLaw::Beta, b },
        (Some(LawArg::GammaRatio), Some(b)) => HetEffect::Random { law: HetLaw::GammaRatio, b },
        _ => HetEffect::Grid(a.h.clone()),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.threads)
        .build()
        .map_err(|e| GdcError::InvalidParameter(format!("thread pool: {e}")))?;
    let mut rows = Vec::new();
    for &maf in &a.maf {
        let s = SimScenario {
            n: a.n,
            maf,
            b_values: a.b.clone(),
            h: h.clone(),
            beta: a.beta,
            noise_sd: a.noise_sd,
            alpha: a.alpha,
            replications: a.reps,
            seed: a.seed,
            fixed_x: a.fixed_x,
            ci_level: a.ci_level,
        };
        rows.extend(pool.install(|| match a.kind {
            SimKind::Null => simulate_null(&s),
            SimKind::Power => simulate_power(&s),
        })?);
    }
    let mut w = output(&a.out)?;
    write_rate_table(&rows, &mut w)?;
    w.flush()?;
    Ok(())
}

fn bench(a: BenchArgs) -> Result<()> {
    let cfg = BenchConfig {
        sample_sizes: a.n,
        snp_counts: a.snps,
        b: a.b,
        threads: a.threads,
        seed: a.seed,
        ..Default::default()
    };
    let rows = bench_throughput(&cfg)?;
    let mut w = output(&a.out)?;
    write_bench_table(&rows, &mut w)?;
    w.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let r = match cli.cmd {
        Cmd::Scan(a) => scan(a),
        Cmd::Simulate(a) => simulate(a),
        Cmd::Bench(a) => bench(a),
    };
    match r {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
