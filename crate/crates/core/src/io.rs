//! Language-neutral export of complex matrices.
//!
//! Binary arrays are row-major little-endian `f64` pairs `(re, im)` with a
//! JSON sidecar describing the shape.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64};

pub const LAYOUT: &str = "row-major";
pub const FORMAT: &str = "c128-interleaved";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrayHeader {
    #[serde(rename = "N")]
    pub n: usize,
    pub layout: String,
    pub format: String,
}

impl ArrayHeader {
    pub fn square(n: usize) -> Self {
        ArrayHeader {
            n,
            layout: LAYOUT.to_string(),
            format: FORMAT.to_string(),
        }
    }
}

pub fn write_c128<W: Write>(m: &ComplexMatrix, mut w: W) -> Result<ArrayHeader> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch { expected: m.nrows(), found: m.ncols() });
    }
    let n = m.nrows();
    let mut bytes = Vec::with_capacity(16 * n * n);
    for r in 0..n {
        for c in 0..n {
            let z = m[(r, c)];
            bytes.extend_from_slice(&z.re.to_le_bytes());
            bytes.extend_from_slice(&z.im.to_le_bytes());
        }
    }
    w.write_all(&bytes)?;
    Ok(ArrayHeader::square(n))
}

pub fn read_c128<R: Read>(header: &ArrayHeader, mut r: R) -> Result<ComplexMatrix> {
    if header.layout != LAYOUT || header.format != FORMAT {
        return Err(Error::invalid(format!(
            "unsupported array encoding {}/{}",
            header.layout, header.format
        )));
    }
    let n = header.n;
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() != 16 * n * n {
        return Err(Error::DimensionMismatch { expected: 16 * n * n, found: bytes.len() });
    }
    let f = |i: usize| f64::from_le_bytes(bytes[8 * i..8 * i + 8].try_into().unwrap());
    Ok(ComplexMatrix::from_fn(n, n, |row, col| {
        let i = 2 * (row * n + col);
        C64::new(f(i), f(i + 1))
    }))
}

/// Rows of `[re, im]` pairs.
pub fn to_pair_rows(m: &ComplexMatrix) -> Vec<Vec<[f64; 2]>> {
    m.row_iter()
        .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

pub fn from_pair_rows(rows: &[Vec<[f64; 2]>]) -> Result<ComplexMatrix> {
    let n = rows.len();
    if let Some(bad) = rows.iter().find(|r| r.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, found: bad.len() });
    }
    Ok(ComplexMatrix::from_fn(n, n, |r, c| C64::new(rows[r][c][0], rows[r][c][1])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samplers::{haar_unitary, substream};

    #[test]
    fn binary_round_trip_is_exact() {
        let u = haar_unitary(7, &mut substream(2, 0)).into_matrix();
        let mut buf = Vec::new();
        let header = write_c128(&u, &mut buf).unwrap();
        assert_eq!(buf.len(), 16 * 49);
        let text = serde_json::to_string(&header).unwrap();
        assert_eq!(text, r#"{"N":7,"layout":"row-major","format":"c128-interleaved"}"#);
        assert_eq!(read_c128(&header, buf.as_slice()).unwrap(), u);
    }

    #[test]
    fn binary_is_row_major() {
        let m = ComplexMatrix::from_fn(2, 2, |r, c| C64::new((2 * r + c) as f64, -1.0));
        let mut buf = Vec::new();
        write_c128(&m, &mut buf).unwrap();
        assert_eq!(f64::from_le_bytes(buf[16..24].try_into().unwrap()), 1.0);
        assert_eq!(f64::from_le_bytes(buf[32..40].try_into().unwrap()), 2.0);
    }

    #[test]
    fn truncated_binary_is_rejected() {
        let header = ArrayHeader::square(3);
        assert!(read_c128(&header, &[0u8; 10][..]).is_err());
    }

    #[test]
    fn pair_rows_round_trip() {
        let u = haar_unitary(5, &mut substream(3, 0)).into_matrix();
        let rows = to_pair_rows(&u);
        let json = serde_json::to_string(&rows).unwrap();
        let back: Vec<Vec<[f64; 2]>> = serde_json::from_str(&json).unwrap();
        assert_eq!(from_pair_rows(&back).unwrap(), u);
    }
}
