//! Binary field container and its JSON sidecar.
//!
//! Layout of a `.bin` file (all integers and floats little-endian):
//!
//! | offset | size | content                                  |
//! |--------|------|------------------------------------------|
//! | 0      | 6    | magic `MALAB1`                           |
//! | 6      | 2    | u16 kind, `0` = real scalar field        |
//! | 8      | 4    | u32 complex dimension `n`                |
//! | 12     | 4    | u32 resolution (points per real axis)    |
//! | 16     | 8    | u64 number of values (`resolution^(2n)`) |
//! | 24     | 8    | reserved, zero                           |
//! | 32     | 8·N  | f64 values, row-major, `x_1` slowest     |
//!
//! The sidecar is a JSON object next to the binary file (same stem, `.json`
//! extension) with `schema_version`, `format`, `n`, `resolution`, `points`,
//! `layout`, summary statistics and free-form `metadata`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::torus::{integrate, make_domain, Domain, ScalarField};

pub const MAGIC: &[u8; 6] = b"MALAB1";
pub const HEADER_LEN: usize = 32;
const KIND_SCALAR: u16 = 0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSidecar {
    pub schema_version: u32,
    pub format: String,
    pub n: usize,
    pub resolution: usize,
    pub points: usize,
    pub layout: String,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    #[serde(default)]
    pub metadata: serde_json::Value,
}

pub fn encode_field(field: &ScalarField) -> Vec<u8> {
    let d = field.domain();
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * field.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&KIND_SCALAR.to_le_bytes());
    out.extend_from_slice(&(d.n() as u32).to_le_bytes());
    out.extend_from_slice(&(d.resolution() as u32).to_le_bytes());
    out.extend_from_slice(&(field.len() as u64).to_le_bytes());
    out.extend_from_slice(&[0u8; 8]);
    for v in field.values() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

/// Decodes a container, building a fresh domain from its header.
pub fn decode_field(bytes: &[u8]) -> Result<ScalarField> {
    let (n, res) = decode_header(bytes)?;
    let domain = make_domain(n, res)?;
    decode_field_on(&domain, bytes)
}

/// Decodes a container whose header must match `domain`.
pub fn decode_field_on(domain: &Domain, bytes: &[u8]) -> Result<ScalarField> {
    let (n, res) = decode_header(bytes)?;
    if n != domain.n() || res != domain.resolution() {
        return Err(Error::DomainMismatch);
    }
    let count = u64::from_le_bytes(bytes[16..24].try_into().unwrap()) as usize;
    if count != domain.len() || bytes.len() != HEADER_LEN + 8 * count {
        return Err(Error::Format(format!(
            "expected {} values, header says {count}, payload has {} bytes",
            domain.len(),
            bytes.len() - HEADER_LEN
        )));
    }
    let values = bytes[HEADER_LEN..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    ScalarField::new(domain, values)
}

fn decode_header(bytes: &[u8]) -> Result<(usize, usize)> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Format("file shorter than header".into()));
    }
    if &bytes[..6] != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let kind = u16::from_le_bytes(bytes[6..8].try_into().unwrap());
    if kind != KIND_SCALAR {
        return Err(Error::Format(format!("unsupported field kind {kind}")));
    }
    let n = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    let res = u32::from_le_bytes(bytes[12..16].try_into().unwrap()) as usize;
    Ok((n, res))
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("json")
}

pub fn sidecar_for(field: &ScalarField, metadata: serde_json::Value) -> FieldSidecar {
    let d = field.domain();
    FieldSidecar {
        schema_version: 1,
        format: "MALAB1".into(),
        n: d.n(),
        resolution: d.resolution(),
        points: field.len(),
        layout: "row-major f64 little-endian, axis x1 slowest".into(),
        min: field.inf(),
        max: field.sup(),
        mean: integrate(field),
        metadata,
    }
}

/// Writes `path` and its JSON sidecar.
pub fn write_field(path: &Path, field: &ScalarField, metadata: serde_json::Value) -> Result<()> {
    fs::write(path, encode_field(field))?;
    let sidecar = sidecar_for(field, metadata);
    fs::write(sidecar_path(path), serde_json::to_string_pretty(&sidecar)? + "\n")?;
    Ok(())
}

pub fn read_field(path: &Path) -> Result<ScalarField> {
    decode_field(&fs::read(path)?)
}

pub fn read_sidecar(path: &Path) -> Result<FieldSidecar> {
    Ok(serde_json::from_str(&fs::read_to_string(sidecar_path(path))?)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout_is_fixed() {
        let d = make_domain(1, 8).unwrap();
        let f = ScalarField::from_fn(&d, |x| x[0] - 2.0 * x[1]).unwrap();
        let bytes = encode_field(&f);
        assert_eq!(&bytes[..6], b"MALAB1");
        assert_eq!(&bytes[6..8], &[0, 0]);
        assert_eq!(&bytes[8..12], &1u32.to_le_bytes());
        assert_eq!(&bytes[12..16], &8u32.to_le_bytes());
        assert_eq!(&bytes[16..24], &64u64.to_le_bytes());
        assert_eq!(bytes.len(), 32 + 64 * 8);
        assert_eq!(&bytes[32 + 8..32 + 16], &(-2.0f64 / 8.0).to_le_bytes());
    }

    #[test]
    fn rejects_corrupt_input() {
        let d = make_domain(1, 8).unwrap();
        let f = ScalarField::zeros(&d).unwrap();
        let mut bytes = encode_field(&f);
        bytes.pop();
        assert!(decode_field(&bytes).is_err());
        let mut bad = encode_field(&f);
        bad[0] = b'X';
        assert!(decode_field(&bad).is_err());
        let other = make_domain(1, 16).unwrap();
        assert!(matches!(
            decode_field_on(&other, &encode_field(&f)),
            Err(Error::DomainMismatch)
        ));
    }

    #[test]
    fn file_and_sidecar_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let d = make_domain(2, 8).unwrap();
        let f = ScalarField::from_fn(&d, |x| (x[0] * 6.0).sin() * x[3]).unwrap();
        let path = dir.path().join("phi.bin");
        write_field(&path, &f, serde_json::json!({"name": "phi"})).unwrap();
        let back = read_field(&path).unwrap();
        assert_eq!(back.values(), f.values());
        let side = read_sidecar(&path).unwrap();
        assert_eq!(side.points, 4096);
        assert_eq!(side.metadata["name"], "phi");
    }
}
