use std::process::Command;

use gdc_gwas::genotype::GenotypeColumn;
use gdc_gwas::scan::{read_results, write_dosage_tsv, write_packed, write_sample_table, SampleTable, HEADER};
use gdc_gwas::simbench::{null_panel, RATE_HEADER};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gdc-gwas"))
}

fn write_inputs(dir: &std::path::Path, n: usize) -> (Vec<String>, Vec<GenotypeColumn>) {
    let (cols, y) = null_panel(n, 40, (0.1, 0.5), 3).unwrap();
    let ids: Vec<String> = (0..n).map(|i| format!("id{i}")).collect();
    let age: Vec<f64> = (0..n).map(|i| (i % 17) as f64).collect();
    write_sample_table(
        &dir.join("pheno.tsv"),
        &SampleTable {
            ids: ids.clone(),
            names: vec!["y".into(), "age".into()],
            columns: vec![y, age],
        },
    )
    .unwrap();
    (ids, cols)
}

#[test]
fn scan_packed_then_dosage_agree() {
    let dir = tempfile::tempdir().unwrap();
    let (ids, cols) = write_inputs(dir.path(), 120);
    write_packed(&dir.path().join("g.bed"), &ids, &cols).unwrap();
    write_dosage_tsv(&dir.path().join("g.tsv"), &ids, &cols).unwrap();

    for (geno, fmt, out) in [("g.bed", "packed", "a.tsv"), ("g.tsv", "dosage-tsv", "b.tsv")] {
        let st = bin()
            .current_dir(dir.path())
            .args(["scan", "--geno", geno, "--geno-format", fmt, "--pheno", "pheno.tsv"])
            .args(["--pheno-col", "y", "--covar", "age", "--b", "2.5", "--out", out, "--no-screen", "--threads", "2"])
            .status()
            .unwrap();
        assert!(st.success());
    }
    let a = read_results(&dir.path().join("a.tsv")).unwrap();
    let b = read_results(&dir.path().join("b.tsv")).unwrap();
    assert_eq!(a.len(), 40);
    for (ra, rb) in a.iter().zip(&b) {
        assert_eq!(ra.stat.to_bits(), rb.stat.to_bits());
        assert_eq!(ra.p_value, rb.p_value);
    }
    let text = std::fs::read_to_string(dir.path().join("a.tsv")).unwrap();
    assert_eq!(text.lines().next(), Some(HEADER));
}

#[test]
fn scan_rejects_sample_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let (ids, cols) = write_inputs(dir.path(), 60);
    write_packed(&dir.path().join("g.bed"), &ids[..50], &cols.iter().map(|c| c.select(&(0..50).collect::<Vec<_>>())).collect::<Vec<_>>()).unwrap();
    let out = bin()
        .current_dir(dir.path())
        .args(["scan", "--geno", "g.bed", "--pheno", "pheno.tsv", "--pheno-col", "y", "--out", "o.tsv"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("50") && err.contains("60"), "{err}");
    assert!(!dir.path().join("o.tsv").exists());

    let ok = bin()
        .current_dir(dir.path())
        .args(["scan", "--geno", "g.bed", "--pheno", "pheno.tsv", "--pheno-col", "y", "--out", "o.tsv"])
        .arg("--allow-missing-samples")
        .status()
        .unwrap();
    assert!(ok.success());
}

#[test]
fn simulate_and_bench_emit_tables() {
    let out = bin()
        .args(["simulate", "--reps", "50", "--b", "1,3", "--maf", "0.2,0.4", "--seed", "9"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with(RATE_HEADER));
    assert_eq!(text.lines().count(), 1 + 2 * 4);

    let again = bin()
        .args(["simulate", "--reps", "50", "--b", "1,3", "--maf", "0.2,0.4", "--seed", "9", "--threads", "3"])
        .output()
        .unwrap();
    assert_eq!(String::from_utf8(again.stdout).unwrap(), text);

    let out = bin()
        .args(["simulate", "--kind", "power", "--reps", "20", "--h-law", "gamma-ratio", "--h-law-b", "1"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().contains("gamma_ratio_law_b1.0"));

    let out = bin().args(["bench", "--n", "100", "--snps", "0,20"]).output().unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 3);
}
