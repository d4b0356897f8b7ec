//! Genotype, phenotype and covariate file codecs.
//!
//! Packed genotypes: magic 0x6C 0x1B, mode 0x01 (SNP-major), then ⌈n/4⌉
//! bytes per SNP with 2 bits per sample, lowest bits first. Codes:
//! 00 → 0, 01 → missing, 10 → 1, 11 → 2. Companions next to `x.bed`:
//! `x.variants.tsv` (snp_id, chrom, pos) and `x.samples.txt` (one ID per line).

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use crate::error::{GdcError, Result};
use crate::genotype::{GenotypeColumn, GenotypeData, MISSING};
use crate::numerics::special::fmt_f64;

const MAGIC: [u8; 3] = [0x6C, 0x1B, 0x01];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenoFormat {
    Packed,
    DosageTsv,
}

impl std::str::FromStr for GenoFormat {
    type Err = GdcError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "packed" => Ok(GenoFormat::Packed),
            "dosage-tsv" => Ok(GenoFormat::DosageTsv),
            other => Err(GdcError::InvalidParameter(format!("unknown genotype format {other:?}"))),
        }
    }
}

const DECODE: [u8; 4] = [0, MISSING, 1, 2];

/// Decodes the first `n` samples of one SNP's packed bytes.
pub fn decode_packed(bytes: &[u8], n: usize) -> Vec<u8> {
    (0..n).map(|i| DECODE[((bytes[i / 4] >> (2 * (i % 4))) & 0b11) as usize]).collect()
}

/// Encodes hard calls (0, 1, 2 or [`MISSING`]); padding bits are zero.
pub fn encode_packed(calls: &[u8]) -> Vec<u8> {
    let mut out = vec![0u8; calls.len().div_ceil(4)];
    for (i, &g) in calls.iter().enumerate() {
        let code = match g {
            0 => 0b00,
            1 => 0b10,
            2 => 0b11,
            _ => 0b01,
        };
        out[i / 4] |= code << (2 * (i % 4));
    }
    out
}

/// (variant-info path, sample-ID path) for a packed genotype path.
pub fn companion_paths(geno: &Path) -> (PathBuf, PathBuf) {
    (geno.with_extension("variants.tsv"), geno.with_extension("samples.txt"))
}

fn read_lines(path: &Path) -> Result<Vec<String>> {
    let f = File::open(path).map_err(|e| GdcError::parse(path.display().to_string(), e.to_string()))?;
    let mut out = Vec::new();
    for line in BufReader::new(f).lines() {
        let line = line?;
        let t = line.trim_end_matches('\r');
        if !t.is_empty() {
            out.push(t.to_string());
        }
    }
    Ok(out)
}

fn read_variants(path: &Path) -> Result<Vec<(String, String, u64)>> {
    let loc = path.display().to_string();
    let mut out = Vec::new();
    for (i, line) in read_lines(path)?.into_iter().enumerate() {
        let f: Vec<&str> = line.split('\t').collect();
        if i == 0 && f.first() == Some(&"snp_id") {
            continue;
        }
        if f.len() < 3 {
            return Err(GdcError::parse(format!("{loc}:{}", i + 1), "expected snp_id, chrom, pos"));
        }
        let pos = f[2]
            .parse::<u64>()
            .map_err(|_| GdcError::parse(format!("{loc}:{}", i + 1), format!("bad position {:?}", f[2])))?;
        out.push((f[0].to_string(), f[1].to_string(), pos));
    }
    Ok(out)
}

/// Streaming SNP-major reader: one SNP's bytes in memory at a time.
pub struct PackedReader {
    reader: BufReader<File>,
    sample_ids: Vec<String>,
    variants: Vec<(String, String, u64)>,
    next: usize,
    buf: Vec<u8>,
}

impl PackedReader {
    /// Opens `geno` with companions located by [`companion_paths`].
    pub fn open(geno: &Path) -> Result<Self> {
        let (v, s) = companion_paths(geno);
        Self::open_with(geno, &v, &s)
    }

    pub fn open_with(geno: &Path, variants: &Path, samples: &Path) -> Result<Self> {
        let sample_ids = read_lines(samples)?;
        let variants = read_variants(variants)?;
        let file = File::open(geno)?;
        let len = file.metadata()?.len();
        let n = sample_ids.len();
        let per = n.div_ceil(4) as u64;
        let expected = 3 + per * variants.len() as u64;
        let mut reader = BufReader::new(file);
        let mut head = [0u8; 3];
        reader
            .read_exact(&mut head)
            .map_err(|_| GdcError::Format("file shorter than its 3-byte header".into()))?;
        if head[..2] != MAGIC[..2] {
            return Err(GdcError::Format(format!("bad magic bytes {:#04x} {:#04x}", head[0], head[1])));
        }
        if head[2] != MAGIC[2] {
            return Err(GdcError::Format(format!("mode byte {:#04x}; only SNP-major (0x01) is supported", head[2])));
        }
        if len != expected {
            return Err(GdcError::Format(format!(
                "{} bytes, expected {expected} for {} samples and {} SNPs",
                len,
                n,
                variants.len()
            )));
        }
        Ok(PackedReader {
            reader,
            sample_ids,
            variants,
            next: 0,
            buf: vec![0; per as usize],
        })
    }

    pub fn sample_ids(&self) -> &[String] {
        &self.sample_ids
    }

    pub fn n_snps(&self) -> usize {
        self.variants.len()
    }
}

impl Iterator for PackedReader {
    type Item = Result<GenotypeColumn>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.next >= self.variants.len() {
            return None;
        }
        let (id, chrom, pos) = self.variants[self.next].clone();
        self.next += 1;
        if let Err(e) = self.reader.read_exact(&mut self.buf) {
            self.next = self.variants.len();
            return Some(Err(e.into()));
        }
        let calls = decode_packed(&self.buf, self.sample_ids.len());
        Some(GenotypeColumn::hard_calls(id, chrom, pos, calls))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let r = self.variants.len() - self.next;
        (r, Some(r))
    }
}

/// Writes a packed file and both companions. Only hard-call columns.
pub fn write_packed<'a, I>(geno: &Path, sample_ids: &[String], columns: I) -> Result<()>
where
    I: IntoIterator<Item = &'a GenotypeColumn>,
{
    let (vpath, spath) = companion_paths(geno);
    let mut g = BufWriter::new(File::create(geno)?);
    let mut v = BufWriter::new(File::create(vpath)?);
    g.write_all(&MAGIC)?;
    for col in columns {
        let GenotypeData::HardCalls(calls) = &col.data else {
            return Err(GdcError::InvalidParameter(format!("{}: packed output needs hard calls", col.snp_id)));
        };
        if calls.len() != sample_ids.len() {
            return Err(GdcError::SampleMismatch {
                geno: calls.len(),
                pheno: sample_ids.len(),
            });
        }
        g.write_all(&encode_packed(calls))?;
        writeln!(v, "{}\t{}\t{}", col.snp_id, col.chrom, col.pos)?;
    }
    g.flush()?;
    v.flush()?;
    let mut s = BufWriter::new(File::create(spath)?);
    for id in sample_ids {
        writeln!(s, "{id}")?;
    }
    s.flush()?;
    Ok(())
}

/// Sample-major dosage table, transposed to SNP columns on load.
#[derive(Debug, Clone, PartialEq)]
pub struct DosageTable {
    pub sample_ids: Vec<String>,
    pub columns: Vec<GenotypeColumn>,
}

fn parse_value(s: &str) -> Option<f64> {
    if s == "NA" {
        Some(f64::NAN)
    } else {
        s.parse::<f64>().ok()
    }
}

/// Reads a dosage TSV. SNPs get chrom "." and position 0; the format
/// carries no coordinates.
pub fn read_dosage_tsv(path: &Path) -> Result<DosageTable> {
    let loc = path.display().to_string();
    let lines = read_lines(path)?;
    let Some(header) = lines.first() else {
        return Err(GdcError::parse(loc, "empty file"));
    };
    let names: Vec<&str> = header.split('\t').collect();
    if names.first() != Some(&"sample_id") {
        return Err(GdcError::parse(format!("{loc}:1"), "header must start with sample_id"));
    }
    let snps = &names[1..];
    let mut ids = Vec::with_capacity(lines.len() - 1);
    let mut values: Vec<Vec<f64>> = vec![Vec::with_capacity(lines.len() - 1); snps.len()];
    for (i, line) in lines.iter().enumerate().skip(1) {
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != names.len() {
            return Err(GdcError::parse(
                format!("{loc}:{}", i + 1),
                format!("{} fields, header has {}", f.len(), names.len()),
            ));
        }
        ids.push(f[0].to_string());
        for (j, s) in f[1..].iter().enumerate() {
            let v = parse_value(s)
                .ok_or_else(|| GdcError::parse(format!("{loc}:{}", i + 1), format!("bad dosage {s:?}")))?;
            if !v.is_nan() && !(0.0..=2.0).contains(&v) {
                return Err(GdcError::Domain(format!("{loc}:{}: dosage {v} outside [0, 2]", i + 1)));
            }
            values[j].push(v);
        }
    }
    let columns = snps
        .iter()
        .zip(values)
        .map(|(name, v)| GenotypeColumn::dosages(*name, ".", 0, v))
        .collect::<Result<Vec<_>>>()?;
    Ok(DosageTable { sample_ids: ids, columns })
}

/// Writes dosages (hard calls are written as numbers) with shortest
/// round-trip formatting.
pub fn write_dosage_tsv(path: &Path, sample_ids: &[String], columns: &[GenotypeColumn]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write!(w, "sample_id")?;
    for c in columns {
        if c.n() != sample_ids.len() {
            return Err(GdcError::SampleMismatch {
                geno: c.n(),
                pheno: sample_ids.len(),
            });
        }
        write!(w, "\t{}", c.snp_id)?;
    }
    writeln!(w)?;
    for (i, id) in sample_ids.iter().enumerate() {
        write!(w, "{id}")?;
        for c in columns {
            let v = match &c.data {
                GenotypeData::HardCalls(x) if x[i] == MISSING => f64::NAN,
                GenotypeData::HardCalls(x) => x[i] as f64,
                GenotypeData::Dosages(x) => x[i],
                GenotypeData::AlleleCounts { .. } => {
                    return Err(GdcError::InvalidParameter("dosage TSV cannot hold allele counts".into()))
                }
            };
            write!(w, "\t{}", fmt_f64(v))?;
        }
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}

/// Phenotype or covariate table keyed by sample ID. `NA` reads as NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleTable {
    pub ids: Vec<String>,
    pub names: Vec<String>,
    pub columns: Vec<Vec<f64>>,
}

impl SampleTable {
    pub fn column(&self, name: &str) -> Result<&[f64]> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|j| self.columns[j].as_slice())
            .ok_or_else(|| GdcError::InvalidParameter(format!("no column {name:?}; have {:?}", self.names)))
    }
}

pub fn read_sample_table(path: &Path) -> Result<SampleTable> {
    let loc = path.display().to_string();
    let lines = read_lines(path)?;
    let Some(header) = lines.first() else {
        return Err(GdcError::parse(loc, "empty file"));
    };
    let names: Vec<&str> = header.split('\t').collect();
    if names.first() != Some(&"sample_id") {
        return Err(GdcError::parse(format!("{loc}:1"), "header must start with sample_id"));
    }
    let mut ids = Vec::new();
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); names.len() - 1];
    for (i, line) in lines.iter().enumerate().skip(1) {
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != names.len() {
            return Err(GdcError::parse(
                format!("{loc}:{}", i + 1),
                format!("{} fields, header has {}", f.len(), names.len()),
            ));
        }
        ids.push(f[0].to_string());
        for (j, s) in f[1..].iter().enumerate() {
            let v = parse_value(s)
                .ok_or_else(|| GdcError::parse(format!("{loc}:{}", i + 1), format!("bad number {s:?}")))?;
            columns[j].push(v);
        }
    }
    Ok(SampleTable {
        ids,
        names: names[1..].iter().map(|s| s.to_string()).collect(),
        columns,
    })
}

pub fn write_sample_table(path: &Path, table: &SampleTable) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write!(w, "sample_id")?;
    for n in &table.names {
        write!(w, "\t{n}")?;
    }
    writeln!(w)?;
    for (i, id) in table.ids.iter().enumerate() {
        write!(w, "{id}")?;
        for c in &table.columns {
            write!(w, "\t{}", fmt_f64(c[i]))?;
        }
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}

/// Pairing of genotype samples with phenotype rows: genotype sample
/// `geno_index[k]` is phenotype row `pheno_index[k]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleJoin {
    pub geno_index: Vec<usize>,
    pub pheno_index: Vec<usize>,
}

impl SampleJoin {
    /// True when genotype columns can be used without reindexing.
    pub fn is_identity(&self, n_geno: usize) -> bool {
        self.geno_index.len() == n_geno && self.geno_index.iter().enumerate().all(|(k, &i)| k == i)
    }
}

/// Joins by sample ID in genotype order. Unless `allow_missing`, both
/// files must hold exactly the same samples.
pub fn join_samples(geno_ids: &[String], pheno_ids: &[String], allow_missing: bool) -> Result<SampleJoin> {
    let mut lookup = HashMap::with_capacity(pheno_ids.len());
    for (i, id) in pheno_ids.iter().enumerate() {
        if lookup.insert(id.as_str(), i).is_some() {
            return Err(GdcError::parse("phenotype", format!("duplicate sample_id {id:?}")));
        }
    }
    if !allow_missing && geno_ids.len() != pheno_ids.len() {
        return Err(GdcError::SampleMismatch {
            geno: geno_ids.len(),
            pheno: pheno_ids.len(),
        });
    }
    let mut join = SampleJoin {
        geno_index: Vec::new(),
        pheno_index: Vec::new(),
    };
    for (g, id) in geno_ids.iter().enumerate() {
        match lookup.get(id.as_str()) {
            Some(&p) => {
                join.geno_index.push(g);
                join.pheno_index.push(p);
            }
            None if allow_missing => {}
            None => {
                return Err(GdcError::parse(
                    "phenotype",
                    format!("genotype sample {id:?} has no phenotype row (use --allow-missing-samples)"),
                ))
            }
        }
    }
    Ok(join)
}
