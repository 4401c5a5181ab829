//! CSV and JSON persistence. Every writer goes through [`write_atomic`].

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use serde::Serialize;

use crate::behavior::DataDictionary;
use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Writes `bytes` to a sibling temporary file and renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let name = path
        .file_name()
        .ok_or_else(|| Error::InvalidParameter(format!("not a file path: {}", path.display())))?;
    let tmp = dir.join(format!(
        ".{}.tmp-{}",
        name.to_string_lossy(),
        std::process::id()
    ));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    Ok(result?)
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    write_atomic(path, s.as_bytes())
}

fn csv_bytes<F>(header: &[String], fill: F) -> Result<Vec<u8>>
where
    F: FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    let to_err = |e: csv::Error| Error::Parse {
        line: 0,
        message: e.to_string(),
    };
    w.write_record(header).map_err(to_err)?;
    fill(&mut w).map_err(to_err)?;
    w.into_inner().map_err(|e| Error::Parse {
        line: 0,
        message: e.to_string(),
    })
}

/// Shortest round-trip decimal, in exponent form for very large or small
/// magnitudes.
fn fmt_num(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-5..1e15).contains(&a) || !a.is_finite() {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

/// `k,z1,...,zeta` with one row per sample.
pub fn time_series_to_csv(z: &TimeSeries) -> Result<Vec<u8>> {
    let mut header = vec!["k".to_string()];
    header.extend((1..=z.dim()).map(|i| format!("z{i}")));
    csv_bytes(&header, |w| {
        for k in 0..z.len() {
            let mut rec = vec![k.to_string()];
            rec.extend(z.sample(k).iter().map(|v| fmt_num(*v)));
            w.write_record(&rec)?;
        }
        Ok(())
    })
}

pub fn write_time_series(path: &Path, z: &TimeSeries) -> Result<()> {
    write_atomic(path, &time_series_to_csv(z)?)
}

/// Parses the `k,z1,...` format. Line numbers in errors are 1-based and
/// count the header.
pub fn time_series_from_reader<R: Read>(reader: R) -> Result<TimeSeries> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);
    let header = rdr.headers().map_err(|e| Error::Parse {
        line: 1,
        message: e.to_string(),
    })?;
    if header.is_empty() || &header[0] != "k" {
        return Err(Error::Parse {
            line: 1,
            message: "header must start with column k".into(),
        });
    }
    let eta = header.len() - 1;
    if eta == 0 {
        return Err(Error::Parse {
            line: 1,
            message: "header has no value columns".into(),
        });
    }
    let mut samples: Vec<Vec<f64>> = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| Error::Parse {
            line,
            message: e.to_string(),
        })?;
        if rec.len() != eta + 1 {
            return Err(Error::Parse {
                line,
                message: format!("expected {} fields, found {}", eta + 1, rec.len()),
            });
        }
        let k: usize = rec[0].parse().map_err(|_| Error::Parse {
            line,
            message: format!("invalid sample index {:?}", &rec[0]),
        })?;
        if k != samples.len() {
            return Err(Error::Parse {
                line,
                message: format!("sample index {k} out of sequence, expected {}", samples.len()),
            });
        }
        let row = rec
            .iter()
            .skip(1)
            .map(|f| {
                f.parse::<f64>().map_err(|_| Error::Parse {
                    line,
                    message: format!("invalid number {f:?}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        samples.push(row);
    }
    if samples.is_empty() {
        return Err(Error::EmptySeries);
    }
    TimeSeries::from_samples(&samples)
}

pub fn read_time_series(path: &Path) -> Result<TimeSeries> {
    time_series_from_reader(fs::File::open(path)?)
}

/// Serializes `rows` as CSV with a header taken from the field names.
pub fn write_records<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let to_err = |e: csv::Error| Error::Parse {
        line: 0,
        message: e.to_string(),
    };
    for row in rows {
        w.serialize(row).map_err(to_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Parse {
        line: 0,
        message: e.to_string(),
    })?;
    write_atomic(path, &bytes)
}

/// Plain numeric matrix, one CSV row per matrix row, with `c1..` header.
pub fn matrix_to_csv(m: &DMatrix<f64>) -> Result<Vec<u8>> {
    let header: Vec<String> = (1..=m.ncols()).map(|j| format!("c{j}")).collect();
    csv_bytes(&header, |w| {
        for row in m.row_iter() {
            w.write_record(row.iter().map(|v| fmt_num(*v)))?;
        }
        Ok(())
    })
}

/// Writes the stacked Hankel dictionary to `path` and its dimensions and
/// input report to `path` with a `.json` extension.
pub fn write_dictionary(path: &Path, dict: &DataDictionary) -> Result<PathBuf> {
    write_atomic(path, &matrix_to_csv(dict.matrix())?)?;
    let sidecar = path.with_extension("json");
    write_json(&sidecar, &dict.sidecar())?;
    Ok(sidecar)
}
