//! Distance matrix dumps: tab-separated text and a compact binary layout.
//!
//! Binary layout: the bytes `APSP`, a version byte, `n` as a little-endian
//! `u64`, then `n * n` little-endian `i64` entries in row-major order, with
//! `i64::MAX` for `+inf` and `i64::MIN` for `-inf`.

use std::io::{BufRead, Read, Write};

use crate::error::{ApspError, Result};
use crate::matrix::{Matrix, WeightMatrix};
use crate::weight::Weight;

pub const MAGIC: &[u8; 4] = b"APSP";
pub const BINARY_VERSION: u8 = 1;

pub fn write_tsv<W: Write>(mut out: W, m: &WeightMatrix) -> Result<()> {
    for row in m.iter_rows() {
        let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
        writeln!(out, "{}", cells.join("\t"))?;
    }
    Ok(())
}

pub fn tsv_string(m: &WeightMatrix) -> String {
    let mut buf = Vec::new();
    write_tsv(&mut buf, m).expect("writing to memory");
    String::from_utf8(buf).expect("tsv is ascii")
}

pub fn read_tsv<R: BufRead>(input: R) -> Result<WeightMatrix> {
    let mut rows = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let line = line?;
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let row = line
            .split('\t')
            .map(|cell| {
                cell.trim()
                    .parse::<Weight>()
                    .map_err(|_| ApspError::Parse { line: line_no, msg: format!("bad entry {cell:?}") })
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = rows.first() {
            let first: &Vec<Weight> = first;
            if first.len() != row.len() {
                return Err(ApspError::Parse {
                    line: line_no,
                    msg: format!("{} entries, expected {}", row.len(), first.len()),
                });
            }
        }
        rows.push(row);
    }
    Matrix::from_rows(rows)
}

pub fn write_binary<W: Write>(mut out: W, m: &WeightMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(ApspError::DimensionMismatch(format!("binary dumps are square, got {}x{}", m.rows(), m.cols())));
    }
    out.write_all(MAGIC)?;
    out.write_all(&[BINARY_VERSION])?;
    out.write_all(&(m.rows() as u64).to_le_bytes())?;
    let mut buf = Vec::with_capacity(m.as_slice().len() * 8);
    for w in m.as_slice() {
        buf.extend_from_slice(&w.to_raw().to_le_bytes());
    }
    out.write_all(&buf)?;
    Ok(())
}

pub fn read_binary<R: Read>(mut input: R) -> Result<WeightMatrix> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    parse_binary(&bytes)
}

fn parse_binary(bytes: &[u8]) -> Result<WeightMatrix> {
    let bad = |msg: String| ApspError::Parse { line: 0, msg };
    if bytes.len() < 13 || &bytes[..4] != MAGIC {
        return Err(bad("missing APSP header".into()));
    }
    if bytes[4] != BINARY_VERSION {
        return Err(bad(format!("unsupported version {}", bytes[4])));
    }
    let n = u64::from_le_bytes(bytes[5..13].try_into().expect("8 bytes")) as usize;
    let body = &bytes[13..];
    let expected = n.checked_mul(n).and_then(|c| c.checked_mul(8));
    if expected != Some(body.len()) {
        return Err(bad(format!("expected {n}x{n} entries, found {} bytes", body.len())));
    }
    let data = body
        .chunks_exact(8)
        .map(|c| Weight::from_raw(i64::from_le_bytes(c.try_into().expect("8 bytes"))))
        .collect::<Result<Vec<_>>>()?;
    Ok(Matrix::from_vec(n, n, data))
}

/// Reads either format, telling them apart by the magic bytes.
pub fn read_dump<R: Read>(mut input: R) -> Result<WeightMatrix> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    if bytes.starts_with(MAGIC) {
        parse_binary(&bytes)
    } else {
        read_tsv(bytes.as_slice())
    }
}
