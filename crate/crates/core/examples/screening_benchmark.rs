//! Screened scan against exact evaluation of every SNP on a null panel.

use gdc_gwas::error::Result;
use gdc_gwas::simbench::{bench_throughput, write_bench_table, BenchConfig};

fn main() -> Result<()> {
    let cfg = BenchConfig {
        sample_sizes: vec![500, 1000, 2000],
        snp_counts: vec![5000],
        ..Default::default()
    };
    write_bench_table(&bench_throughput(&cfg)?, std::io::stdout())?;
    Ok(())
}
