//! CSV and JSON persistence of sweep rows.
//!
//! CSV columns, in order:
//! `eps`, then `z_asym`, `z_impl` and `z_bs` as `<name>_<spin>_<re|im>` for
//! spins plus and minus, then `rel_err_plus`, `rel_err_minus`, `flags`.
//! Numbers use 17 significant digits; absent values are empty fields and
//! flags are joined by `;`.
//!
//! JSON: `{"alpha", "rows": [{"eps", "z_asym": {"plus": [re, im] | null,
//! "minus": ...}, "z_impl", "z_bs", "rel_err": {"plus", "minus"}, "flags",
//! "seconds", "error"}], "fit": {"plus": {"slope", "r2", "points", "source"}
//! | null, "minus": ...}}`.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use abpauli::Complex64;
use serde::Serialize;

use crate::config::{Format, RunConfig};
use crate::sweep::{FitSummary, SweepResult, SweepRow};

pub const CSV_HEADER: [&str; 16] = [
    "eps",
    "z_asym_plus_re",
    "z_asym_plus_im",
    "z_asym_minus_re",
    "z_asym_minus_im",
    "z_impl_plus_re",
    "z_impl_plus_im",
    "z_impl_minus_re",
    "z_impl_minus_im",
    "z_bs_plus_re",
    "z_bs_plus_im",
    "z_bs_minus_re",
    "z_bs_minus_im",
    "rel_err_plus",
    "rel_err_minus",
    "flags",
];

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn record(row: &SweepRow) -> Vec<String> {
    let mut out = vec![num(row.eps)];
    for pair in [&row.z_asym, &row.z_impl, &row.z_bs] {
        for z in pair {
            out.push(opt(z.map(|z| z.re)));
            out.push(opt(z.map(|z| z.im)));
        }
    }
    out.push(opt(row.rel_err[0]));
    out.push(opt(row.rel_err[1]));
    out.push(row.flags.join(";"));
    out
}

pub fn write_csv<W: Write>(w: W, rows: &[SweepRow]) -> csv::Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(CSV_HEADER)?;
    for row in rows {
        wtr.write_record(record(row))?;
    }
    wtr.flush()?;
    Ok(())
}

#[derive(Debug, thiserror::Error)]
pub enum ReadError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("record {record}: {message}")]
    Field { record: usize, message: String },
}

/// Reads rows written by [`write_csv`]; `seconds` and `error` are not stored in CSV.
pub fn read_csv<R: Read>(r: R) -> Result<Vec<SweepRow>, ReadError> {
    let mut rdr = csv::Reader::from_reader(r);
    let header: Vec<String> = rdr.headers()?.iter().map(String::from).collect();
    if header != CSV_HEADER {
        return Err(ReadError::Field { record: 0, message: format!("unexpected header {header:?}") });
    }
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let field = |j: usize| -> Result<Option<f64>, ReadError> {
            let s = &rec[j];
            if s.is_empty() {
                return Ok(None);
            }
            s.parse().map(Some).map_err(|_| ReadError::Field {
                record: i + 1,
                message: format!("bad number `{s}` in {}", CSV_HEADER[j]),
            })
        };
        let complex = |j: usize| -> Result<Option<Complex64>, ReadError> {
            match (field(j)?, field(j + 1)?) {
                (Some(re), Some(im)) => Ok(Some(Complex64::new(re, im))),
                (None, None) => Ok(None),
                _ => Err(ReadError::Field { record: i + 1, message: format!("half-empty pair at {}", CSV_HEADER[j]) }),
            }
        };
        let eps = field(0)?.ok_or(ReadError::Field { record: i + 1, message: "missing eps".into() })?;
        let flags: Vec<String> = rec[15].split(';').filter(|s| !s.is_empty()).map(String::from).collect();
        rows.push(SweepRow {
            eps,
            z_asym: [complex(1)?, complex(3)?],
            z_impl: [complex(5)?, complex(7)?],
            z_bs: [complex(9)?, complex(11)?],
            rel_err: [field(13)?, field(14)?],
            error: flags.iter().any(|f| f == "error").then(String::new),
            flags,
            seconds: 0.0,
        });
    }
    Ok(rows)
}

#[derive(Serialize)]
struct SpinPair<T> {
    plus: Option<T>,
    minus: Option<T>,
}

fn pair(z: &[Option<Complex64>; 2]) -> SpinPair<[f64; 2]> {
    SpinPair { plus: z[0].map(|z| [z.re, z.im]), minus: z[1].map(|z| [z.re, z.im]) }
}

#[derive(Serialize)]
struct JsonRow<'a> {
    eps: f64,
    z_asym: SpinPair<[f64; 2]>,
    z_impl: SpinPair<[f64; 2]>,
    z_bs: SpinPair<[f64; 2]>,
    rel_err: SpinPair<f64>,
    flags: &'a [String],
    seconds: f64,
    error: Option<&'a str>,
}

#[derive(Serialize)]
struct JsonDoc<'a> {
    alpha: f64,
    rows: Vec<JsonRow<'a>>,
    fit: &'a FitSummary,
}

pub fn write_json<W: Write>(w: W, alpha: f64, result: &SweepResult) -> serde_json::Result<()> {
    let rows = result
        .rows
        .iter()
        .map(|r| JsonRow {
            eps: r.eps,
            z_asym: pair(&r.z_asym),
            z_impl: pair(&r.z_impl),
            z_bs: pair(&r.z_bs),
            rel_err: SpinPair { plus: r.rel_err[0], minus: r.rel_err[1] },
            flags: &r.flags,
            seconds: r.seconds,
            error: r.error.as_deref(),
        })
        .collect();
    serde_json::to_writer_pretty(w, &JsonDoc { alpha, rows, fit: &result.fit })
}

/// Writes the configured formats into `dir` and returns the paths written.
pub fn write_outputs(cfg: &RunConfig, result: &SweepResult, dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for format in &cfg.output.formats {
        let (ext, path) = match format {
            Format::Csv => ("csv", dir.join(format!("{}.csv", cfg.output.stem))),
            Format::Json => ("json", dir.join(format!("{}.json", cfg.output.stem))),
        };
        let mut w = BufWriter::new(File::create(&path)?);
        match format {
            Format::Csv => write_csv(&mut w, &result.rows).map_err(std::io::Error::other)?,
            Format::Json => write_json(&mut w, cfg.alpha.value(), result)?,
        }
        w.flush()?;
        log::info!("wrote {ext} to {}", path.display());
        written.push(path);
    }
    Ok(written)
}
