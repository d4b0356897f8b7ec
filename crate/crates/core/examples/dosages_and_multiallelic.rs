//! Imputed dosages and multiallelic sites through the same scan entry
//! points. Integer dosages reproduce the hard-call result exactly, and a
//! two-allele count matrix reproduces the biallelic one.

use gdc_gwas::error::Result;
use gdc_gwas::genotype::GenotypeColumn;
use gdc_gwas::premetric::PremetricB;
use gdc_gwas::scan::{run_multiallelic, test_snp, PreparedPhenotype, ScanConfig};
use gdc_gwas::simbench::{dominance_phenotype, hwe_genotypes, replicate_rng};
use rand::Rng;

fn main() -> Result<()> {
    let n = 500;
    let mut rng = replicate_rng(8, 0);
    let x = hwe_genotypes(n, 0.4, &mut rng);
    let y = dominance_phenotype(&x, 0.5, 1.0, 1.0, &mut rng);
    let pheno = PreparedPhenotype::new(y, None)?;
    let cfg = ScanConfig::default();
    let pm = PremetricB::new(cfg.b)?;

    let hard = GenotypeColumn::hard_calls("s", "1", 1, x.clone())?;
    let as_dosage = GenotypeColumn::dosages("s", "1", 1, x.iter().map(|&g| g as f64).collect())?;
    let counts: Vec<f64> = x.iter().flat_map(|&g| [2.0 - g as f64, g as f64]).collect();
    let as_counts = GenotypeColumn::allele_counts("s", "1", 1, 2, counts)?;
    let a = test_snp(&pm, &cfg, &hard, &pheno);
    let b = test_snp(&pm, &cfg, &as_dosage, &pheno);
    let c = run_multiallelic(&cfg, &as_counts, &pheno);
    println!("hard calls    p = {:?}", a.p_value);
    println!("dosages       p = {:?}", b.p_value);
    println!("allele counts p = {:?}", c.p_value);

    // blur the calls as an imputation engine would
    let blurred: Vec<f64> = x.iter().map(|&g| (g as f64 + rng.random_range(-0.15..0.15)).clamp(0.0, 2.0)).collect();
    let r = test_snp(&pm, &cfg, &GenotypeColumn::dosages("s", "1", 1, blurred)?, &pheno);
    println!("noisy dosages p = {:?} ({})", r.p_value, r.method);

    // three alleles: A/A, A/B, B/C, ...
    let tri: Vec<f64> = (0..n)
        .flat_map(|_| {
            let mut v = [0.0; 3];
            for _ in 0..2 {
                let u: f64 = rng.random();
                v[if u < 0.5 { 0 } else if u < 0.8 { 1 } else { 2 }] += 1.0;
            }
            v
        })
        .collect();
    let r = run_multiallelic(&cfg, &GenotypeColumn::allele_counts("t", "1", 2, 3, tri)?, &pheno);
    println!("triallelic: stat {:.4}, p = {:?} ({})", r.stat, r.p_value, r.method);
    Ok(())
}
