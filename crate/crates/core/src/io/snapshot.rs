//! Binary field snapshots.
//!
//! A 64-byte little-endian header followed by `M^N` `(re, im)` pairs of
//! `f64` in row-major order:
//!
//! | offset | type  | content                         |
//! |--------|-------|---------------------------------|
//! | 0      | [u8;8]| magic `INLSFLD1`                |
//! | 8      | u32   | format version                  |
//! | 12     | u32   | N                               |
//! | 16     | u32   | M                               |
//! | 20     | f64   | L                               |
//! | 28     | f64   | b                               |
//! | 36     | f64   | t                               |
//! | 44     | u8    | 1 for cell-centered, 0 for node |
//! | 45     | -     | zero padding                    |

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{InlsError, Result};
use crate::model::{CartesianGrid, Centering, Field};

pub const MAGIC: &[u8; 8] = b"INLSFLD1";
pub const VERSION: u32 = 1;
pub const HEADER_LEN: usize = 64;

/// Header fields of a snapshot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnapshotHeader {
    pub grid: CartesianGrid,
    pub b: f64,
    pub t: f64,
}

impl SnapshotHeader {
    pub fn to_bytes(&self) -> [u8; HEADER_LEN] {
        let mut h = [0u8; HEADER_LEN];
        h[0..8].copy_from_slice(MAGIC);
        h[8..12].copy_from_slice(&VERSION.to_le_bytes());
        h[12..16].copy_from_slice(&(self.grid.dim() as u32).to_le_bytes());
        h[16..20].copy_from_slice(&(self.grid.points() as u32).to_le_bytes());
        h[20..28].copy_from_slice(&self.grid.extent().to_le_bytes());
        h[28..36].copy_from_slice(&self.b.to_le_bytes());
        h[36..44].copy_from_slice(&self.t.to_le_bytes());
        h[44] = u8::from(self.grid.centering() == Centering::Cell);
        h
    }

    pub fn from_bytes(h: &[u8; HEADER_LEN]) -> Result<Self> {
        if &h[0..8] != MAGIC {
            return Err(InlsError::Format(format!(
                "bad magic bytes {:?}, expected {:?}",
                String::from_utf8_lossy(&h[0..8]),
                std::str::from_utf8(MAGIC).unwrap_or_default()
            )));
        }
        let u32_at = |i: usize| u32::from_le_bytes([h[i], h[i + 1], h[i + 2], h[i + 3]]);
        let f64_at = |i: usize| {
            let mut b = [0u8; 8];
            b.copy_from_slice(&h[i..i + 8]);
            f64::from_le_bytes(b)
        };
        let version = u32_at(8);
        if version != VERSION {
            return Err(InlsError::Format(format!("unsupported version {version}")));
        }
        let centering = match h[44] {
            1 => Centering::Cell,
            0 => Centering::Node,
            other => return Err(InlsError::Format(format!("bad offset flag {other}"))),
        };
        let grid = CartesianGrid::new(u32_at(12) as usize, u32_at(16) as usize, f64_at(20), centering)
            .map_err(|e| InlsError::Format(e.to_string()))?;
        let b = f64_at(28);
        let t = f64_at(36);
        if !(b.is_finite() && t.is_finite()) {
            return Err(InlsError::Format("non-finite b or t in header".into()));
        }
        Ok(SnapshotHeader { grid, b, t })
    }
}

pub fn write_snapshot<W: Write>(mut w: W, field: &Field, b: f64) -> Result<()> {
    let header = SnapshotHeader {
        grid: *field.grid(),
        b,
        t: field.time(),
    };
    w.write_all(&header.to_bytes())?;
    let mut buf = Vec::with_capacity(16 * field.values().len());
    for z in field.values() {
        buf.extend_from_slice(&z.re.to_le_bytes());
        buf.extend_from_slice(&z.im.to_le_bytes());
    }
    w.write_all(&buf)?;
    w.flush()?;
    Ok(())
}

pub fn read_header<R: Read>(mut r: R) -> Result<SnapshotHeader> {
    let mut h = [0u8; HEADER_LEN];
    r.read_exact(&mut h)
        .map_err(|e| InlsError::Format(format!("truncated header: {e}")))?;
    SnapshotHeader::from_bytes(&h)
}

/// Reads a snapshot; returns the field and the `b` it was written with.
pub fn read_snapshot<R: Read>(mut r: R) -> Result<(Field, f64)> {
    let header = read_header(&mut r)?;
    let n = header.grid.len();
    let mut buf = vec![0u8; 16 * n];
    r.read_exact(&mut buf)
        .map_err(|e| InlsError::Format(format!("truncated data, expected {n} samples: {e}")))?;
    let mut extra = [0u8; 1];
    if r.read(&mut extra)? != 0 {
        return Err(InlsError::Format("trailing bytes after the last sample".into()));
    }
    let f = |c: &[u8]| {
        let mut b = [0u8; 8];
        b.copy_from_slice(c);
        f64::from_le_bytes(b)
    };
    let values = buf
        .chunks_exact(16)
        .map(|c| Complex64::new(f(&c[..8]), f(&c[8..])))
        .collect();
    Ok((Field::new(header.grid, header.t, values)?, header.b))
}

pub fn save_snapshot(path: &Path, field: &Field, b: f64) -> Result<()> {
    write_snapshot(BufWriter::new(File::create(path)?), field, b)
}

pub fn load_snapshot(path: &Path) -> Result<(Field, f64)> {
    read_snapshot(BufReader::new(File::open(path)?))
}

pub fn load_header(path: &Path) -> Result<SnapshotHeader> {
    read_header(BufReader::new(File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_is_64_bytes_with_magic() {
        let grid = CartesianGrid::cell(2, 8, 3.0).unwrap();
        let h = SnapshotHeader { grid, b: 1.0, t: 0.25 }.to_bytes();
        assert_eq!(&h[..8], b"INLSFLD1");
        assert_eq!(h[44], 1);
        assert!(h[45..].iter().all(|&x| x == 0));
        assert_eq!(SnapshotHeader::from_bytes(&h).unwrap().grid, grid);
    }

    #[test]
    fn rejects_truncated_data() {
        let grid = CartesianGrid::cell(1, 8, 3.0).unwrap();
        let field = Field::zeros(grid);
        let mut buf = Vec::new();
        write_snapshot(&mut buf, &field, 0.5).unwrap();
        assert_eq!(buf.len(), 64 + 16 * 8);
        buf.pop();
        assert!(matches!(read_snapshot(&buf[..]), Err(InlsError::Format(_))));
    }
}
