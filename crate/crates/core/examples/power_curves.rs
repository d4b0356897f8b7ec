//! Power of several b against the heterozygous effect h, with the additive
//! and ANOVA tests alongside, plus the null rates.

use gdc_gwas::error::Result;
use gdc_gwas::simbench::{integrated_power, simulate_null, simulate_power, write_rate_table, HetEffect, HetLaw, SimScenario};

fn main() -> Result<()> {
    let s = SimScenario {
        n: 300,
        maf: 0.3,
        b_values: vec![2.0, 3.0, 4.0],
        h: HetEffect::Grid(vec![0.0, 0.25, 0.5, 0.75, 1.0]),
        replications: 1000,
        ..Default::default()
    };
    write_rate_table(&simulate_null(&s)?, std::io::stdout())?;
    let rows = simulate_power(&s)?;
    write_rate_table(&rows, std::io::stdout())?;
    for m in s.method_labels() {
        println!("integrated power {m}: {:.4}", integrated_power(&rows, &m));
    }

    // h drawn from the law that favours b = 3
    let random = SimScenario { h: HetEffect::Random { law: HetLaw::Beta, b: 3.0 }, ..s };
    write_rate_table(&simulate_power(&random)?, std::io::stdout())?;
    Ok(())
}
