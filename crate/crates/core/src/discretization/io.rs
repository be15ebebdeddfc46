//! Binary field files with a JSON sidecar carrying a SHA-256 checksum.
//!
//! Layout (little endian): magic `BRTHFLD\0`, `u32` version, `u8` geometry
//! (0 slab, 1 cylindrical), `u64` cells, `f64` extent, `u64` mode count, the
//! modes as `u64`, `u64` nodes per profile, then `(re, im)` as `f64` pairs for
//! every (mode, node) in mode-major order.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::field::Field;
use super::grid::SpaceGrid;
use crate::error::{Error, Result};
use crate::kernels::Geometry;
use crate::scalar::Real;

const MAGIC: &[u8; 8] = b"BRTHFLD\0";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldMeta {
    pub format_version: u32,
    pub file: String,
    pub sha256: String,
    pub geometry: Geometry,
    pub cells: usize,
    pub extent: f64,
    pub modes: Vec<usize>,
    pub nodes: usize,
    /// Free-form context recorded by the writer (period, speed, seed, ...).
    #[serde(default)]
    pub extra: serde_json::Value,
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes).as_slice())
}

pub fn encode_field<T: Real>(field: &Field<T>) -> Vec<u8> {
    let grid = field.grid();
    let mut out = Vec::with_capacity(64 + field.data().len() * 16);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.push(match grid.geometry() {
        Geometry::Slab => 0,
        Geometry::Cylindrical => 1,
    });
    out.extend_from_slice(&(grid.cells() as u64).to_le_bytes());
    out.extend_from_slice(&grid.extent().to_f64_lossy().to_le_bytes());
    out.extend_from_slice(&(field.modes().len() as u64).to_le_bytes());
    for &k in field.modes().iter() {
        out.extend_from_slice(&(k as u64).to_le_bytes());
    }
    out.extend_from_slice(&(grid.len() as u64).to_le_bytes());
    for c in field.data() {
        out.extend_from_slice(&c.re.to_f64_lossy().to_le_bytes());
        out.extend_from_slice(&c.im.to_f64_lossy().to_le_bytes());
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or_else(|| Error::Format(format!("truncated field file at byte {}", self.pos)))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

pub fn decode_field<T: Real>(bytes: &[u8]) -> Result<Field<T>> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(8)? != MAGIC {
        return Err(Error::Format("not a field file (bad magic)".into()));
    }
    let version = u32::from_le_bytes(r.take(4)?.try_into().unwrap());
    if version != FORMAT_VERSION {
        return Err(Error::Format(format!("unsupported field format version {version}")));
    }
    let geometry = match r.take(1)?[0] {
        0 => Geometry::Slab,
        1 => Geometry::Cylindrical,
        g => return Err(Error::Format(format!("unknown geometry tag {g}"))),
    };
    let cells = r.u64()? as usize;
    let extent = r.f64()?;
    let n_modes = r.u64()? as usize;
    if n_modes > bytes.len() / 8 {
        return Err(Error::Format("mode count exceeds file size".into()));
    }
    let modes = (0..n_modes).map(|_| r.u64().map(|k| k as usize)).collect::<Result<Vec<_>>>()?;
    let nodes = r.u64()? as usize;
    let grid = SpaceGrid::<T>::new(geometry, cells, T::lit(extent))?;
    if grid.len() != nodes {
        return Err(Error::Format(format!("node count {nodes} does not match grid ({})", grid.len())));
    }
    if modes.first() == Some(&0) || modes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Format("modes must be positive and strictly increasing".into()));
    }
    if geometry == Geometry::Cylindrical && modes.iter().any(|k| k % 2 == 0) {
        return Err(Error::Format("cylindrical field with even modes".into()));
    }
    let mut field = Field::zeros(Arc::new(grid), modes.into());
    for c in field.data_mut() {
        *c = Complex::new(T::lit(r.f64()?), T::lit(r.f64()?));
    }
    if r.pos != bytes.len() {
        return Err(Error::Format("trailing bytes after field data".into()));
    }
    Ok(field)
}

/// Writes `path` and `path.json`; returns the sidecar contents.
pub fn write_field<T: Real>(path: &Path, field: &Field<T>, extra: serde_json::Value) -> Result<FieldMeta> {
    let bytes = encode_field(field);
    let grid = field.grid();
    let meta = FieldMeta {
        format_version: FORMAT_VERSION,
        file: path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
        sha256: sha256_hex(&bytes),
        geometry: grid.geometry(),
        cells: grid.cells(),
        extent: grid.extent().to_f64_lossy(),
        modes: field.modes().to_vec(),
        nodes: grid.len(),
        extra,
    };
    fs::write(path, &bytes)?;
    fs::write(sidecar_path(path), serde_json::to_vec_pretty(&meta)?)?;
    Ok(meta)
}

/// Reads a field file after checking it against its sidecar checksum.
pub fn read_field<T: Real>(path: &Path) -> Result<(Field<T>, FieldMeta)> {
    let meta: FieldMeta = serde_json::from_slice(&fs::read(sidecar_path(path))?)?;
    let bytes = fs::read(path)?;
    let found = sha256_hex(&bytes);
    if found != meta.sha256 {
        return Err(Error::ChecksumMismatch {
            path: path.display().to_string(),
            expected: meta.sha256,
            found,
        });
    }
    let field = decode_field(&bytes)?;
    if field.modes().as_ref() != meta.modes.as_slice() {
        return Err(Error::Format("sidecar mode list disagrees with the field file".into()));
    }
    Ok((field, meta))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Field<f64> {
        let g = Arc::new(SpaceGrid::<f64>::cylindrical(10, 3.0).unwrap());
        Field::from_fn(g, vec![1, 5].into(), |k, j| Complex::new(k as f64 / 3.0, -(j as f64).sqrt()))
    }

    #[test]
    fn roundtrip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("u.field");
        let f = sample();
        write_field(&path, &f, serde_json::json!({"period": 1.0})).unwrap();
        let (g, meta) = read_field::<f64>(&path).unwrap();
        assert_eq!(f, g);
        assert_eq!(meta.modes, vec![1, 5]);
    }

    #[test]
    fn corrupted_file_fails_checksum() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("u.field");
        write_field(&path, &sample(), serde_json::Value::Null).unwrap();
        let mut bytes = fs::read(&path).unwrap();
        let last = bytes.len() - 1;
        bytes[last] ^= 0x40;
        fs::write(&path, bytes).unwrap();
        assert!(matches!(read_field::<f64>(&path), Err(Error::ChecksumMismatch { .. })));
    }

    #[test]
    fn truncated_bytes_are_rejected() {
        let bytes = encode_field(&sample());
        assert!(matches!(decode_field::<f64>(&bytes[..bytes.len() - 3]), Err(Error::Format(_))));
        assert!(decode_field::<f64>(b"garbage!").is_err());
    }
}
