//! NLSTW1 field files and atomic file writes.
//!
//! Layout: the 7 magic bytes `NLSTW1\0`, then little-endian `u32 kind`
//! (0 real, 1 complex), `u32 n1`, `u32 n2`, `f64 L1`, `f64 L2`, and the values
//! with `x1` varying fastest. Complex values are interleaved `re, im`.

use std::fs;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{ComplexField, Grid, ScalarField};

pub const MAGIC: &[u8; 7] = b"NLSTW1\0";
const HEADER_LEN: usize = 7 + 4 + 4 + 4 + 8 + 8;

/// A field read back from disk.
#[derive(Clone, Debug, PartialEq)]
pub enum Field {
    Real(ScalarField),
    Complex(ComplexField),
}

fn header(kind: u32, grid: &Grid) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&kind.to_le_bytes());
    out.extend_from_slice(&(grid.n1() as u32).to_le_bytes());
    out.extend_from_slice(&(grid.n2() as u32).to_le_bytes());
    out.extend_from_slice(&grid.l1().to_le_bytes());
    out.extend_from_slice(&grid.l2().to_le_bytes());
    out
}

pub fn encode_real(f: &ScalarField) -> Vec<u8> {
    let mut out = header(0, f.grid());
    out.reserve(8 * f.values().len());
    for v in f.values() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn encode_complex(f: &ComplexField) -> Vec<u8> {
    let mut out = header(1, f.grid());
    out.reserve(16 * f.values().len());
    for z in f.values() {
        out.extend_from_slice(&z.re.to_le_bytes());
        out.extend_from_slice(&z.im.to_le_bytes());
    }
    out
}

fn read_u32(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(b[at..at + 4].try_into().unwrap())
}

fn read_f64(b: &[u8], at: usize) -> f64 {
    f64::from_le_bytes(b[at..at + 8].try_into().unwrap())
}

pub fn decode(bytes: &[u8]) -> Result<Field> {
    if bytes.len() < HEADER_LEN || &bytes[..7] != MAGIC {
        return Err(Error::Format("missing NLSTW1 header".into()));
    }
    let kind = read_u32(bytes, 7);
    let n1 = read_u32(bytes, 11) as usize;
    let n2 = read_u32(bytes, 15) as usize;
    let l1 = read_f64(bytes, 19);
    let l2 = read_f64(bytes, 27);
    let grid = Grid::new(l1, l2, n1, n2)?;
    let width = match kind {
        0 => 8,
        1 => 16,
        k => return Err(Error::Format(format!("unknown field kind {k}"))),
    };
    let body = &bytes[HEADER_LEN..];
    if body.len() != width * n1 * n2 {
        return Err(Error::Format(format!(
            "expected {} payload bytes, found {}",
            width * n1 * n2,
            body.len()
        )));
    }
    if kind == 0 {
        let values = body.chunks_exact(8).map(|c| read_f64(c, 0)).collect();
        Ok(Field::Real(ScalarField::new(grid, values)?))
    } else {
        let values = body
            .chunks_exact(16)
            .map(|c| Complex64::new(read_f64(c, 0), read_f64(c, 8)))
            .collect();
        Ok(Field::Complex(ComplexField::new(grid, values)?))
    }
}

pub fn read_field(path: impl AsRef<Path>) -> Result<Field> {
    decode(&fs::read(path)?)
}

pub fn read_complex(path: impl AsRef<Path>) -> Result<ComplexField> {
    match read_field(path)? {
        Field::Complex(c) => Ok(c),
        Field::Real(r) => Ok(r.to_complex()),
    }
}

pub fn write_real(path: impl AsRef<Path>, f: &ScalarField) -> Result<()> {
    write_atomic(path, &encode_real(f))
}

pub fn write_complex(path: impl AsRef<Path>, f: &ComplexField) -> Result<()> {
    write_atomic(path, &encode_complex(f))
}

/// Writes `bytes` to a sibling temporary file and renames it over `path`.
pub fn write_atomic(path: impl AsRef<Path>, bytes: &[u8]) -> Result<()> {
    let path = path.as_ref();
    let name = path
        .file_name()
        .ok_or_else(|| Error::Config(format!("not a file path: {}", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(format!(".{}.tmp", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    {
        let mut file = fs::File::create(&tmp)?;
        file.write_all(bytes)?;
        file.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_roundtrip_is_bit_exact() {
        let g = Grid::new(3.0, 5.5, 16, 8).unwrap();
        let f = ComplexField::from_fn(&g, |x, y| Complex64::new(x.sin() * 1e-300, y / 3.0));
        let back = decode(&encode_complex(&f)).unwrap();
        assert_eq!(back, Field::Complex(f));
    }

    #[test]
    fn real_roundtrip_and_layout() {
        let g = Grid::new(1.0, 2.0, 8, 10).unwrap();
        let f = ScalarField::from_fn(&g, |x, y| x + 10.0 * y);
        let bytes = encode_real(&f);
        assert_eq!(bytes.len(), HEADER_LEN + 8 * 80);
        assert_eq!(read_f64(&bytes, HEADER_LEN + 8), f.get(1, 0));
        assert_eq!(decode(&bytes).unwrap(), Field::Real(f));
    }

    #[test]
    fn rejects_truncated() {
        let g = Grid::square(1.0, 8).unwrap();
        let bytes = encode_real(&ScalarField::zeros(&g));
        assert!(decode(&bytes[..bytes.len() - 1]).is_err());
        assert!(decode(b"NLSTW2\0").is_err());
    }
}
