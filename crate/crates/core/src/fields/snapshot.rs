//! `VCL1` snapshot files: a little-endian header followed by the N x N
//! physical values in row-major order (row index along x1).
//!
//! Layout: `b"VCL1"`, `u32` N, `f64` period, `f64` time, `u32` name length,
//! UTF-8 field name, `f64` viscosity, then `N*N` `f64` values.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use ndarray::Array2;

use super::grid::{Grid2D, PERIOD};
use super::scalar::ScalarField2D;
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"VCL1";

#[derive(Clone, Debug)]
pub struct Snapshot {
    pub name: String,
    pub time: f64,
    pub nu: f64,
    pub field: ScalarField2D,
}

impl Snapshot {
    pub fn new(name: impl Into<String>, time: f64, nu: f64, field: ScalarField2D) -> Self {
        Snapshot { name: name.into(), time, nu, field }
    }

    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        let n = self.field.grid().n();
        w.write_all(MAGIC)?;
        w.write_all(&(n as u32).to_le_bytes())?;
        w.write_all(&PERIOD.to_le_bytes())?;
        w.write_all(&self.time.to_le_bytes())?;
        let name = self.name.as_bytes();
        w.write_all(&(name.len() as u32).to_le_bytes())?;
        w.write_all(name)?;
        w.write_all(&self.nu.to_le_bytes())?;
        for v in self.field.values().iter() {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_from(mut r: impl Read) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Format(format!("bad magic {magic:?}")));
        }
        let n = read_u32(&mut r)? as usize;
        let grid = Grid2D::new(n).map_err(|e| Error::Format(e.to_string()))?;
        let period = read_f64(&mut r)?;
        if period != PERIOD {
            return Err(Error::Format(format!("unsupported period {period}")));
        }
        let time = read_f64(&mut r)?;
        let len = read_u32(&mut r)? as usize;
        if len > 4096 {
            return Err(Error::Format(format!("field name length {len} is implausible")));
        }
        let mut name = vec![0u8; len];
        r.read_exact(&mut name)?;
        let name = String::from_utf8(name).map_err(|e| Error::Format(e.to_string()))?;
        let nu = read_f64(&mut r)?;
        let mut values = Vec::with_capacity(n * n);
        let mut buf = [0u8; 8];
        for _ in 0..n * n {
            r.read_exact(&mut buf)?;
            values.push(f64::from_le_bytes(buf));
        }
        let values = Array2::from_shape_vec((n, n), values).expect("length checked");
        Ok(Snapshot { name, time, nu, field: ScalarField2D::from_values(grid, values) })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_from(BufReader::new(File::open(path)?))
    }
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f64(r: &mut impl Read) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout() {
        let g = Grid2D::new(16).unwrap();
        let s = Snapshot::new("omega", 0.5, 1e-3, ScalarField2D::from_fn(g, |x, y| x - y));
        let mut bytes = Vec::new();
        s.write_to(&mut bytes).unwrap();
        assert_eq!(&bytes[..4], b"VCL1");
        assert_eq!(u32::from_le_bytes(bytes[4..8].try_into().unwrap()), 16);
        assert_eq!(bytes.len(), 4 + 4 + 8 + 8 + 4 + 5 + 8 + 16 * 16 * 8);
        let back = Snapshot::read_from(&bytes[..]).unwrap();
        assert_eq!(back.name, "omega");
        assert_eq!(back.field.values(), s.field.values());
    }

    #[test]
    fn rejects_bad_magic() {
        let bytes = b"VCL2\x10\0\0\0".to_vec();
        assert!(matches!(Snapshot::read_from(&bytes[..]), Err(Error::Format(_))));
    }
}
