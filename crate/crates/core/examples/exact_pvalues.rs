//! Null spectrum, exact p-value, screening bounds, and the generalized F
//! law checked against characteristic-function inversion.

use gdc_gwas::error::Result;
use gdc_gwas::gdc::standardized_statistic;
use gdc_gwas::genotype::genotype_frequencies;
use gdc_gwas::nulldist::{exact_pvalue, genf_cdf, pvalue_bounds, spectrum_unadjusted, weighted_chisq_tail_dof};
use gdc_gwas::premetric::PremetricB;
use gdc_gwas::simbench::{dominance_phenotype, hwe_genotypes, replicate_rng};

fn main() -> Result<()> {
    let mut rng = replicate_rng(11, 0);
    let x = hwe_genotypes(300, 0.3, &mut rng);
    let y = dominance_phenotype(&x, 1.5, 0.5, 5.0, &mut rng);
    let pm = PremetricB::new(3.0)?;

    let spec = spectrum_unadjusted(&pm, genotype_frequencies(&x), x.len())?;
    let (k, _) = standardized_statistic(&pm, &x, &y)?;
    let (lo, hi) = pvalue_bounds(&spec, k)?;
    let p = exact_pvalue(&spec, k)?;
    println!("eigenvalues {:?}", spec.lambdas);
    println!("statistic {k:.4}: {lo:.3e} <= p = {:.6e} ({}) <= {hi:.3e}", p.p, p.method);

    // P((a1 Q1² + a2 Q2²)/2 <= x · chi²_nu / nu) two ways
    let (a1, a2, nu, xv) = (0.6, 0.25, 20usize, 1.3);
    let direct = genf_cdf(a1, a2, nu, xv)?;
    let terms = [(0.5 * a1, 1.0), (0.5 * a2, 1.0), (-xv / nu as f64, nu as f64)];
    let inverted = 1.0 - weighted_chisq_tail_dof(&terms, 0.0)?.value;
    println!("generalized F cdf {direct:.12}, by inversion {inverted:.12}");
    Ok(())
}
