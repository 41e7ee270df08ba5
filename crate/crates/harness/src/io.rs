//! Input formats: headerless CSV, and raw little-endian f64 behind an `(N, d)` header.

use std::io::{Read, Write};
use std::path::Path;

use robust_mean::Data;

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    F64le,
}

pub fn parse_csv(text: &str) -> Result<Data> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<Result<Vec<f64>, _>>()
            .map_err(|e| HarnessError::Data(format!("line {}: {e}", i + 1)))?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(HarnessError::Data(format!(
                    "line {}: {} fields, expected {}",
                    i + 1,
                    row.len(),
                    first.len()
                )));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(HarnessError::Data("no observations".into()));
    }
    Ok(Data::from_rows(&rows)?)
}

pub fn parse_f64le(bytes: &[u8]) -> Result<Data> {
    if bytes.len() < 16 {
        return Err(HarnessError::Data("missing the (N, d) header".into()));
    }
    let word =
        |i: usize| u64::from_le_bytes(bytes[8 * i..8 * i + 8].try_into().expect("eight bytes"));
    let (n, d) = (word(0), word(1));
    let expected = n
        .checked_mul(d)
        .and_then(|c| c.checked_mul(8))
        .and_then(|b| usize::try_from(b).ok())
        .ok_or_else(|| HarnessError::Data(format!("header N = {n}, d = {d} overflows")))?;
    let body = &bytes[16..];
    if body.len() != expected {
        return Err(HarnessError::Data(format!(
            "header N = {n}, d = {d} needs {expected} bytes, found {}",
            body.len()
        )));
    }
    let values = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("eight bytes")))
        .collect();
    Ok(Data::from_flat(n as usize, d as usize, values)?)
}

pub fn read_data(path: &Path, format: Format) -> Result<Data> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| HarnessError::io(path.display().to_string(), e))?;
    match format {
        Format::Csv => {
            let text = String::from_utf8(bytes)
                .map_err(|e| HarnessError::Data(format!("{}: {e}", path.display())))?;
            parse_csv(&text)
        }
        Format::F64le => parse_f64le(&bytes),
    }
}

pub fn write_data(data: &Data, path: &Path, format: Format) -> Result<()> {
    let mut out = Vec::new();
    match format {
        Format::Csv => {
            for row in data.rows() {
                let line: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
                out.extend_from_slice(line.join(",").as_bytes());
                out.push(b'\n');
            }
        }
        Format::F64le => {
            out.extend_from_slice(&(data.n() as u64).to_le_bytes());
            out.extend_from_slice(&(data.d() as u64).to_le_bytes());
            for v in data.as_flat() {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
    }
    std::fs::File::create(path)
        .and_then(|mut f| f.write_all(&out))
        .map_err(|e| HarnessError::io(path.display().to_string(), e))
}
