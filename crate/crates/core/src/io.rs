//! JSON schemas for matrices and vectors: entries are plain reals or
//! `[re, im]` pairs.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

impl From<Entry> for Complex64 {
    fn from(e: Entry) -> Self {
        match e {
            Entry::Real(x) => Complex64::new(x, 0.0),
            Entry::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

impl From<Complex64> for Entry {
    fn from(z: Complex64) -> Self {
        Entry::Complex([z.re, z.im])
    }
}

/// `{"dim": d, "entries": [[...], ...]}`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub dim: usize,
    pub entries: Vec<Vec<Entry>>,
}

impl MatrixFile {
    pub fn to_matrix(&self) -> Result<ComplexMatrix<f64>> {
        if self.entries.len() != self.dim {
            return Err(Error::InvalidInput(format!("dim is {} but {} rows given", self.dim, self.entries.len())));
        }
        let rows: Vec<Vec<Complex64>> =
            self.entries.iter().map(|r| r.iter().map(|&e| e.into()).collect()).collect();
        let m = ComplexMatrix::from_rows(&rows)?;
        if !m.is_finite() {
            return Err(Error::InvalidInput("matrix entries must be finite".into()));
        }
        Ok(m)
    }

    pub fn from_matrix(m: &ComplexMatrix<f64>) -> Self {
        Self { dim: m.dim(), entries: m.rows().into_iter().map(|r| r.into_iter().map(Entry::from).collect()).collect() }
    }
}

/// `{"entries": [...]}` or a bare array.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VectorFile {
    Wrapped { entries: Vec<Entry> },
    Bare(Vec<Entry>),
}

impl VectorFile {
    pub fn to_vector(&self) -> Result<Vec<Complex64>> {
        let e = match self {
            VectorFile::Wrapped { entries } | VectorFile::Bare(entries) => entries,
        };
        let v: Vec<Complex64> = e.iter().map(|&x| x.into()).collect();
        if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("vector entries must be finite".into()));
        }
        Ok(v)
    }
}

pub fn parse_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("malformed JSON: {e}")))
}

pub fn parse_matrix(text: &str) -> Result<ComplexMatrix<f64>> {
    parse_json::<MatrixFile>(text)?.to_matrix()
}

pub fn parse_vector(text: &str) -> Result<Vec<Complex64>> {
    parse_json::<VectorFile>(text)?.to_vector()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mixed_entries() {
        let m = parse_matrix(r#"{"dim":2,"entries":[[1,[0,1]],[0.5,2]]}"#).unwrap();
        assert_eq!(m[(0, 1)], Complex64::new(0.0, 1.0));
        assert_eq!(m[(1, 0)], Complex64::new(0.5, 0.0));
        assert!(matches!(parse_matrix(r#"{"dim":3,"entries":[[1]]}"#), Err(Error::InvalidInput(_))));
        assert_eq!(parse_vector("[1, [0, 2]]").unwrap()[1], Complex64::new(0.0, 2.0));
        assert_eq!(parse_vector(r#"{"entries":[1]}"#).unwrap().len(), 1);
    }
}
