//! The empirical statistic three ways, and the population value under a
//! dominance model.

use gdc_gwas::error::Result;
use gdc_gwas::gdc::{dcov_fast, dcov_kernel_form, dcov_oracle, population_dcov, standardized_statistic, PopulationModel};
use gdc_gwas::premetric::PremetricB;
use gdc_gwas::simbench::{dominance_phenotype, hwe_genotypes, replicate_rng};

fn main() -> Result<()> {
    let mut rng = replicate_rng(7, 0);
    let x = hwe_genotypes(200, 0.3, &mut rng);
    let y = dominance_phenotype(&x, 1.0, 0.0, 1.0, &mut rng);

    for b in [1.0, 2.0, 3.0, 4.0] {
        let pm = PremetricB::new(b)?;
        let (k, s2) = standardized_statistic(&pm, &x, &y)?;
        println!(
            "b={b}: double-centred {:.10e}  features {:.10e}  kernel {:.10e}  n*V/s2 = {k:.4} (s2 = {s2:.4})",
            dcov_oracle(&pm, &x, &y)?,
            dcov_fast(&pm, &x, &y)?,
            dcov_kernel_form(&pm, &x, &y)?,
        );
    }

    // recessive-type effect: mu = (0, 0, 1) under HWE at q = 0.3
    let q: f64 = 0.3;
    let model = PopulationModel::new([(1.0 - q).powi(2), 2.0 * q * (1.0 - q), q * q], [0.0, 0.0, 1.0])?;
    for b in [1.0, 2.0, 3.0, 4.0] {
        println!("population value at b={b}: {:.6}", population_dcov(&PremetricB::new(b)?, &model));
    }
    Ok(())
}
