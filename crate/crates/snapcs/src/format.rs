//! Binary cube (`HSC1`) and plane (`HSP1`) files.
//!
//! Both are a 4-byte magic, little-endian `u32` sizes, then little-endian
//! `f32` samples. Cubes are band-major (band, then row, then column);
//! planes are row-major. Values are stored at single precision.

use std::fs;
use std::path::Path;

use snapcs_core::{HsiCube, Plane};

use crate::error::{Error, Result};

pub const CUBE_MAGIC: &[u8; 4] = b"HSC1";
pub const PLANE_MAGIC: &[u8; 4] = b"HSP1";

pub fn encode_cube(cube: &HsiCube) -> Result<Vec<u8>> {
    let (rows, cols, bands) = cube.dims();
    let mut out = Vec::with_capacity(16 + 4 * cube.as_slice().len());
    out.extend_from_slice(CUBE_MAGIC);
    for d in [rows, cols, bands] {
        out.extend_from_slice(&size_u32(d)?.to_le_bytes());
    }
    // HsiCube storage is already band-major.
    push_samples(&mut out, cube.as_slice(), 16)?;
    Ok(out)
}

pub fn decode_cube(bytes: &[u8]) -> Result<HsiCube> {
    let [rows, cols, bands] = header(bytes, CUBE_MAGIC)?;
    let data = samples(bytes, 16, rows * cols * bands)?;
    Ok(HsiCube::from_vec(rows, cols, bands, data)?)
}

pub fn encode_plane(plane: &Plane) -> Result<Vec<u8>> {
    let (rows, cols) = plane.dims();
    let mut out = Vec::with_capacity(12 + 4 * plane.as_slice().len());
    out.extend_from_slice(PLANE_MAGIC);
    out.extend_from_slice(&size_u32(rows)?.to_le_bytes());
    out.extend_from_slice(&size_u32(cols)?.to_le_bytes());
    push_samples(&mut out, plane.as_slice(), 12)?;
    Ok(out)
}

pub fn decode_plane(bytes: &[u8]) -> Result<Plane> {
    let [rows, cols] = header(bytes, PLANE_MAGIC)?;
    let data = samples(bytes, 12, rows * cols)?;
    Ok(Plane::from_vec(rows, cols, data)?)
}

pub fn read_cube(path: &Path) -> Result<HsiCube> {
    decode_cube(&read(path)?).map_err(|e| e.in_file(path))
}

pub fn write_cube(cube: &HsiCube, path: &Path) -> Result<()> {
    write(path, &encode_cube(cube)?)
}

pub fn read_plane(path: &Path) -> Result<Plane> {
    decode_plane(&read(path)?).map_err(|e| e.in_file(path))
}

pub fn write_plane(plane: &Plane, path: &Path) -> Result<()> {
    write(path, &encode_plane(plane)?)
}

/// Reads a plane that must hold a binary mask.
pub fn read_mask(path: &Path) -> Result<Plane> {
    let plane = read_plane(path)?;
    if let Some(i) = plane.as_slice().iter().position(|&v| v != 0.0 && v != 1.0) {
        return Err(Error::Format {
            offset: 12 + 4 * i as u64,
            msg: format!("mask value {} is not 0 or 1", plane.as_slice()[i]),
        }
        .in_file(path));
    }
    Ok(plane)
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

fn size_u32(d: usize) -> Result<u32> {
    u32::try_from(d).map_err(|_| Error::Format { offset: 0, msg: format!("dimension {d} does not fit in u32") })
}

fn push_samples(out: &mut Vec<u8>, values: &[f64], base: u64) -> Result<()> {
    for (i, &v) in values.iter().enumerate() {
        let x = v as f32;
        if !x.is_finite() {
            return Err(Error::Format { offset: base + 4 * i as u64, msg: format!("sample {v} is not finite in f32") });
        }
        out.extend_from_slice(&x.to_le_bytes());
    }
    Ok(())
}

fn header<const N: usize>(bytes: &[u8], magic: &[u8; 4]) -> Result<[usize; N]> {
    let need = 4 + 4 * N;
    if bytes.len() < need {
        return Err(Error::Format {
            offset: bytes.len() as u64,
            msg: format!("header needs {need} bytes, file has {}", bytes.len()),
        });
    }
    if &bytes[..4] != magic {
        return Err(Error::Format {
            offset: 0,
            msg: format!(
                "bad magic {:?}, expected {:?}",
                String::from_utf8_lossy(&bytes[..4]),
                String::from_utf8_lossy(magic)
            ),
        });
    }
    let mut dims = [0usize; N];
    for (n, d) in dims.iter_mut().enumerate() {
        let at = 4 + 4 * n;
        *d = u32::from_le_bytes(bytes[at..at + 4].try_into().unwrap()) as usize;
    }
    Ok(dims)
}

fn samples(bytes: &[u8], base: usize, count: usize) -> Result<Vec<f64>> {
    let expected = count
        .checked_mul(4)
        .and_then(|n| n.checked_add(base))
        .ok_or_else(|| Error::Format { offset: base as u64, msg: "declared size overflows".into() })?;
    if bytes.len() != expected {
        return Err(Error::Format {
            offset: bytes.len().min(expected) as u64,
            msg: format!("expected {expected} bytes, file has {}", bytes.len()),
        });
    }
    bytes[base..]
        .chunks_exact(4)
        .enumerate()
        .map(|(i, c)| {
            let v = f32::from_le_bytes(c.try_into().unwrap());
            if v.is_finite() {
                Ok(f64::from(v))
            } else {
                Err(Error::Format { offset: (base + 4 * i) as u64, msg: format!("non-finite sample {v}") })
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_by_two_is_48_bytes() {
        let c = HsiCube::from_fn(2, 2, 2, |i, j, b| (i + 2 * j + 4 * b) as f64);
        let bytes = encode_cube(&c).unwrap();
        assert_eq!(bytes.len(), 4 + 12 + 32);
        assert_eq!(&bytes[..4], b"HSC1");
        assert_eq!(&bytes[4..8], &2u32.to_le_bytes());
        // Band-major: second sample is (0, 1, band 0).
        assert_eq!(&bytes[20..24], &2.0f32.to_le_bytes());
        assert_eq!(decode_cube(&bytes).unwrap(), c);
    }

    #[test]
    fn truncation_names_lengths() {
        let c = HsiCube::filled(3, 2, 2, 0.5);
        let bytes = encode_cube(&c).unwrap();
        let err = decode_cube(&bytes[..bytes.len() - 3]).unwrap_err().to_string();
        assert!(err.contains("expected 64 bytes, file has 61"), "{err}");
    }

    #[test]
    fn bad_magic_and_nan() {
        let mut bytes = encode_plane(&Plane::filled(2, 2, 1.0)).unwrap();
        assert!(matches!(decode_cube(&bytes), Err(Error::Format { offset: 0, .. })));
        bytes[12 + 8..12 + 12].copy_from_slice(&f32::NAN.to_le_bytes());
        assert!(matches!(decode_plane(&bytes), Err(Error::Format { offset: 20, .. })));
    }
}
