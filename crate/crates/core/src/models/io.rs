use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, HermitianMatrix};
use crate::observables::OperatorTuple;
use crate::scalar::C;
use crate::{Spectrum, Tuple};

const MAGIC: &[u8; 8] = b"AMUTUPL1";

/// On-disk encoding of a tuple.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    /// `{n, dim, M, ops: [{re, im}], meta?}` with shortest round-trip decimals.
    Json,
    /// Magic `AMUTUPL1`, then little-endian `u64 n`, `u64 dim`, `f64 M`, the entries as
    /// row-major `(re, im)` `f64` pairs per observable, and `u64` length plus JSON bytes
    /// of the metadata (length 0 when absent).
    Binary,
}

impl Format {
    /// `Binary` for a `.bin` extension, otherwise `Json`.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("bin") => Format::Binary,
            _ => Format::Json,
        }
    }
}

/// A loaded tuple and whatever metadata was stored with it.
#[derive(Debug, Clone, PartialEq)]
pub struct TupleFile {
    pub tuple: Tuple,
    pub meta: Option<Value>,
}

#[derive(Serialize, Deserialize)]
struct RawOp {
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct RawFile {
    n: usize,
    dim: usize,
    #[serde(rename = "M")]
    bound: f64,
    ops: Vec<RawOp>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    meta: Option<Value>,
}

pub fn write_tuple<W: Write>(mut w: W, tuple: &Tuple, meta: Option<&Value>, format: Format) -> Result<()> {
    match format {
        Format::Json => {
            let raw = RawFile {
                n: tuple.n(),
                dim: tuple.dim(),
                bound: tuple.bound(),
                ops: tuple
                    .ops()
                    .iter()
                    .map(|op| {
                        let m = op.as_matrix();
                        RawOp {
                            re: (0..m.rows()).map(|i| m.row(i).iter().map(|z| z.re).collect()).collect(),
                            im: (0..m.rows()).map(|i| m.row(i).iter().map(|z| z.im).collect()).collect(),
                        }
                    })
                    .collect(),
                meta: meta.cloned(),
            };
            serde_json::to_writer(&mut w, &raw).map_err(std::io::Error::from)?;
            w.write_all(b"\n")?;
        }
        Format::Binary => {
            w.write_all(MAGIC)?;
            w.write_all(&(tuple.n() as u64).to_le_bytes())?;
            w.write_all(&(tuple.dim() as u64).to_le_bytes())?;
            w.write_all(&tuple.bound().to_le_bytes())?;
            for op in tuple.ops() {
                for z in op.as_matrix().as_slice() {
                    w.write_all(&z.re.to_le_bytes())?;
                    w.write_all(&z.im.to_le_bytes())?;
                }
            }
            let meta = match meta {
                Some(v) => serde_json::to_vec(v).map_err(std::io::Error::from)?,
                None => Vec::new(),
            };
            w.write_all(&(meta.len() as u64).to_le_bytes())?;
            w.write_all(&meta)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Parses either format, recognized by the binary magic.
pub fn read_tuple(bytes: &[u8]) -> Result<TupleFile> {
    if bytes.starts_with(MAGIC) {
        read_binary(bytes)
    } else {
        read_json(bytes)
    }
}

fn json_offset(bytes: &[u8], err: &serde_json::Error) -> usize {
    let mut offset = 0;
    for (idx, line) in bytes.split(|&b| b == b'\n').enumerate() {
        if idx + 1 == err.line() {
            return (offset + err.column().saturating_sub(1)).min(bytes.len());
        }
        offset += line.len() + 1;
    }
    bytes.len()
}

fn read_json(bytes: &[u8]) -> Result<TupleFile> {
    let raw: RawFile = serde_json::from_slice(bytes).map_err(|e| Error::Parse {
        offset: json_offset(bytes, &e),
        message: e.to_string(),
    })?;
    if raw.ops.len() != raw.n {
        return Err(Error::DimensionMismatch {
            expected: raw.n,
            found: raw.ops.len(),
        });
    }
    let mut ops = Vec::with_capacity(raw.n);
    for op in raw.ops {
        for part in [&op.re, &op.im] {
            if part.len() != raw.dim {
                return Err(Error::DimensionMismatch {
                    expected: raw.dim,
                    found: part.len(),
                });
            }
            if let Some(row) = part.iter().find(|r| r.len() != raw.dim) {
                return Err(Error::DimensionMismatch {
                    expected: raw.dim,
                    found: row.len(),
                });
            }
        }
        let data = op
            .re
            .iter()
            .flatten()
            .zip(op.im.iter().flatten())
            .map(|(&re, &im)| C::new(re, im))
            .collect();
        ops.push(HermitianMatrix::new(ComplexMatrix::from_row_major(raw.dim, raw.dim, data)?)?);
    }
    Ok(TupleFile {
        tuple: OperatorTuple::with_bound(ops, raw.bound)?,
        meta: raw.meta,
    })
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn take(&mut self, len: usize, what: &str) -> Result<&[u8]> {
        if self.bytes.len() - self.pos < len {
            return Err(Error::Parse {
                offset: self.bytes.len(),
                message: format!("unexpected end of file while reading {what}"),
            });
        }
        let out = &self.bytes[self.pos..self.pos + len];
        self.pos += len;
        Ok(out)
    }

    fn u64(&mut self, what: &str) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }

    fn f64(&mut self, what: &str) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }
}

fn read_binary(bytes: &[u8]) -> Result<TupleFile> {
    let mut c = Cursor {
        bytes,
        pos: MAGIC.len(),
    };
    let n = c.u64("n")? as usize;
    let dim = c.u64("dim")? as usize;
    let bound = c.f64("M")?;
    let entries = dim.checked_mul(dim).filter(|&e| e.checked_mul(16 * n).is_some_and(|b| b <= bytes.len()));
    let Some(entries) = entries else {
        return Err(Error::Parse {
            offset: MAGIC.len(),
            message: format!("header claims {n} observables of dimension {dim}, more than the file holds"),
        });
    };
    let mut ops = Vec::with_capacity(n);
    for _ in 0..n {
        let mut data = Vec::with_capacity(entries);
        for _ in 0..entries {
            let re = c.f64("matrix entry")?;
            let im = c.f64("matrix entry")?;
            data.push(C::new(re, im));
        }
        ops.push(HermitianMatrix::new(ComplexMatrix::from_row_major(dim, dim, data)?)?);
    }
    let meta_len = c.u64("metadata length")? as usize;
    let meta_start = c.pos;
    let meta_bytes = c.take(meta_len, "metadata")?;
    let meta = if meta_len == 0 {
        None
    } else {
        Some(serde_json::from_slice(meta_bytes).map_err(|e| Error::Parse {
            offset: meta_start + json_offset(meta_bytes, &e),
            message: e.to_string(),
        })?)
    };
    if c.pos != bytes.len() {
        return Err(Error::Parse {
            offset: c.pos,
            message: "trailing bytes after tuple".into(),
        });
    }
    Ok(TupleFile {
        tuple: OperatorTuple::with_bound(ops, bound)?,
        meta,
    })
}

pub fn save_tuple_file(path: &Path, tuple: &Tuple, meta: Option<&Value>, format: Format) -> Result<()> {
    let w = BufWriter::new(File::create(path)?);
    write_tuple(w, tuple, meta, format)
}

pub fn load_tuple_file(path: &Path) -> Result<TupleFile> {
    let mut bytes = Vec::new();
    File::open(path)?.read_to_end(&mut bytes)?;
    read_tuple(&bytes)
}

/// Saves without metadata, choosing the format from the extension.
pub fn save_tuple(path: &Path, tuple: &Tuple) -> Result<()> {
    save_tuple_file(path, tuple, None, Format::from_path(path))
}

pub fn load_tuple(path: &Path) -> Result<Tuple> {
    Ok(load_tuple_file(path)?.tuple)
}

/// Accepted points as CSV with header `coord_1,…,coord_n,theta_norm`.
pub fn write_spectrum_csv<W: Write>(w: W, result: &Spectrum) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let mut header: Vec<String> = (1..=result.n).map(|j| format!("coord_{j}")).collect();
    header.push("theta_norm".into());
    out.write_record(&header)?;
    for a in &result.accepted {
        let record: Vec<String> = a.point.iter().chain([&a.norm]).map(|x| x.to_string()).collect();
        out.write_record(&record)?;
    }
    out.flush()?;
    Ok(())
}

pub fn spectrum_csv(result: &Spectrum) -> Result<String> {
    let mut buf = Vec::new();
    write_spectrum_csv(&mut buf, result)?;
    Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
}
