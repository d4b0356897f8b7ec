//! End-to-end scan: write a synthetic packed panel with one causal SNP,
//! scan it from disk with a covariate, and list the top hits.

use gdc_gwas::error::Result;
use gdc_gwas::genotype::GenotypeData;
use gdc_gwas::scan::{read_results, run_file_scan, write_packed, write_sample_table, GenoFormat, SampleTable, ScanConfig, ScanJob};
use gdc_gwas::simbench::{null_panel, replicate_rng};
use rand_distr::{Distribution, StandardNormal};

fn main() -> Result<()> {
    let dir = std::env::temp_dir().join("gdc_gwas_scan_example");
    std::fs::create_dir_all(&dir)?;
    let (n, snps) = (1500, 5000);
    let (cols, _) = null_panel(n, snps, (0.05, 0.5), 2024)?;
    let ids: Vec<String> = (0..n).map(|i| format!("ind{i:05}")).collect();

    // the first common SNP past position 1000 acts recessively
    let causal = cols[1000..].iter().find(|c| c.maf() > 0.3).expect("common SNP");
    let x = match &causal.data {
        GenotypeData::HardCalls(v) => v.clone(),
        _ => unreachable!(),
    };
    let mut rng = replicate_rng(5, 0);
    let age: Vec<f64> = (0..n).map(|i| 30.0 + (i % 40) as f64).collect();
    let y: Vec<f64> = (0..n)
        .map(|i| 0.02 * age[i] + 1.0 * (x[i] == 2) as u8 as f64 + { let e: f64 = StandardNormal.sample(&mut rng); e })
        .collect();

    let geno = dir.join("panel.bed");
    write_packed(&geno, &ids, cols.iter())?;
    let pheno = dir.join("pheno.tsv");
    write_sample_table(&pheno, &SampleTable { ids, names: vec!["trait".into(), "age".into()], columns: vec![y, age] })?;

    let job = ScanJob {
        geno,
        geno_format: GenoFormat::Packed,
        pheno,
        pheno_col: "trait".into(),
        covariates: vec!["age".into()],
        out: dir.join("results.tsv"),
        allow_missing_samples: false,
    };
    let summary = run_file_scan(&ScanConfig { b: 3.0, ..Default::default() }, &job)?;
    println!("{summary:?}");
    println!("causal SNP: {}", causal.snp_id);

    let mut recs = read_results(&job.out)?;
    recs.sort_by(|a, b| b.neg_log10_p.total_cmp(&a.neg_log10_p));
    for r in recs.iter().take(5) {
        println!("{}\tmaf {:.3}\t-log10 p {:.2}\t{}", r.snp_id, r.maf, r.neg_log10_p, r.method);
    }
    println!("results in {}", job.out.display());
    Ok(())
}
