//! Testing with covariates: the response is residualized on Z and the null
//! spectrum comes from the projected features.

use gdc_gwas::adjust::{adjusted_spectrum, adjusted_statistic, residualize, CovariateMatrix};
use gdc_gwas::error::Result;
use gdc_gwas::genotype::GenotypeColumn;
use gdc_gwas::nulldist::exact_pvalue;
use gdc_gwas::premetric::PremetricB;
use gdc_gwas::scan::{test_snp, PreparedPhenotype, ScanConfig};
use gdc_gwas::simbench::{hwe_genotypes, replicate_rng};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

fn main() -> Result<()> {
    let n = 400;
    let mut rng = replicate_rng(3, 0);
    let x = hwe_genotypes(n, 0.35, &mut rng);
    let age: Vec<f64> = (0..n).map(|_| rng.random_range(20.0..70.0)).collect();
    let sex: Vec<f64> = (0..n).map(|_| rng.random_range(0..2) as f64).collect();
    // the covariate is correlated with genotype
    let pc: Vec<f64> = x.iter().map(|&g| 0.4 * g as f64 + { let e: f64 = StandardNormal.sample(&mut rng); e }).collect();
    let y: Vec<f64> = (0..n)
        .map(|i| 0.03 * age[i] + 0.5 * sex[i] + 0.8 * pc[i] + 0.3 * (x[i] == 1) as u8 as f64 + { let e: f64 = StandardNormal.sample(&mut rng); e })
        .collect();

    let (z, prepended) =
        CovariateMatrix::from_columns(vec!["age".into(), "sex".into(), "pc1".into()], vec![age, sex, pc])?;
    println!("intercept prepended: {prepended}, q = {}", z.q());

    let pm = PremetricB::new(2.0)?;
    let col = GenotypeColumn::hard_calls("snp1", "1", 1, x)?;
    let resid = residualize(&y, &z)?;
    let v = adjusted_statistic(&pm, &col, &resid)?;
    let k = n as f64 * v / resid.sigma2_eps_hat;
    let spec = adjusted_spectrum(&pm, &col, &z)?;
    let p = exact_pvalue(&spec, k)?;
    println!("adjusted: stat {k:.4}, eigenvalues {:?}, p = {:.4e}", spec.lambdas, p.p);

    // the scan path gives the same record fields
    let pheno = PreparedPhenotype::new(y, Some(z))?;
    let r = test_snp(&pm, &ScanConfig { b: 2.0, ..Default::default() }, &col, &pheno);
    println!("scan record: stat {:.4}, p {:?}, method {}", r.stat, r.p_value, r.method);
    Ok(())
}
