//! Result TSV. Floats use the shortest representation that parses back to
//! the same value; missing values are `NA`.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use super::ScanRecord;
use crate::error::{GdcError, Result};
use crate::numerics::special::fmt_f64;

pub const HEADER: &str =
    "snp_id\tchrom\tpos\tmaf\tn_used\tb\tstat\tlambda1\tlambda2\tp_lower\tp_upper\tp_value\tmethod\tneg_log10_p";

/// Streams records to `<path>.partial` and renames on [`finish`]. Dropping
/// the writer without finishing removes the partial file.
///
/// [`finish`]: ResultWriter::finish
pub struct ResultWriter {
    out: Option<BufWriter<File>>,
    partial: PathBuf,
    target: PathBuf,
}

impl ResultWriter {
    pub fn create(path: &Path) -> Result<Self> {
        let mut name = path.as_os_str().to_owned();
        name.push(".partial");
        let partial = PathBuf::from(name);
        let mut out = BufWriter::new(File::create(&partial)?);
        writeln!(out, "{HEADER}")?;
        Ok(ResultWriter {
            out: Some(out),
            partial,
            target: path.to_path_buf(),
        })
    }

    pub fn write(&mut self, r: &ScanRecord) -> Result<()> {
        let out = self.out.as_mut().expect("writer used after finish");
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            r.snp_id,
            r.chrom,
            r.pos,
            fmt_f64(r.maf),
            r.n_used,
            fmt_f64(r.b),
            fmt_f64(r.stat),
            fmt_f64(r.lambda1),
            fmt_f64(r.lambda2),
            fmt_f64(r.p_lower),
            fmt_f64(r.p_upper),
            r.p_value.map_or("NA".to_string(), fmt_f64),
            r.method,
            fmt_f64(r.neg_log10_p),
        )?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        let mut out = self.out.take().expect("finish called twice");
        out.flush()?;
        drop(out);
        fs::rename(&self.partial, &self.target)?;
        Ok(())
    }
}

impl Drop for ResultWriter {
    fn drop(&mut self) {
        if self.out.take().is_some() {
            let _ = fs::remove_file(&self.partial);
        }
    }
}

pub fn write_results<'a, I>(records: I, path: &Path) -> Result<()>
where
    I: IntoIterator<Item = &'a ScanRecord>,
{
    let mut w = ResultWriter::create(path)?;
    for r in records {
        w.write(r)?;
    }
    w.finish()
}

fn num(s: &str, loc: &str) -> Result<f64> {
    match s {
        "NA" => Ok(f64::NAN),
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        _ => s.parse().map_err(|_| GdcError::parse(loc, format!("bad number {s:?}"))),
    }
}

pub fn read_results(path: &Path) -> Result<Vec<ScanRecord>> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    if lines.next() != Some(HEADER) {
        return Err(GdcError::parse(path.display().to_string(), "unexpected header"));
    }
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        let loc = format!("{}:{}", path.display(), i + 2);
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 14 {
            return Err(GdcError::parse(loc, format!("{} fields, expected 14", f.len())));
        }
        out.push(ScanRecord {
            snp_id: f[0].to_string(),
            chrom: f[1].to_string(),
            pos: f[2].parse().map_err(|_| GdcError::parse(&loc, "bad pos"))?,
            maf: num(f[3], &loc)?,
            n_used: f[4].parse().map_err(|_| GdcError::parse(&loc, "bad n_used"))?,
            b: num(f[5], &loc)?,
            stat: num(f[6], &loc)?,
            lambda1: num(f[7], &loc)?,
            lambda2: num(f[8], &loc)?,
            p_lower: num(f[9], &loc)?,
            p_upper: num(f[10], &loc)?,
            p_value: if f[11] == "NA" { None } else { Some(num(f[11], &loc)?) },
            method: f[12].to_string(),
            neg_log10_p: num(f[13], &loc)?,
        });
    }
    Ok(out)
}
