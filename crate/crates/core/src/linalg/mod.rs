//! Dense complex matrices and the small amount of numerical linear algebra the
//! classifiers need: Hessenberg/QR eigenvalues, one-sided Jacobi SVD and LU.

mod eigen;
mod svd;

use std::ops::{Index, IndexMut};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{cone, czero, is_finite_c, Real, C};

pub use eigen::{balance, eigenvalues, hessenberg};
pub use svd::{singular_values, Svd};

/// Square `dim × dim` complex matrix, row-major.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplexMatrix<R> {
    dim: usize,
    data: Vec<C<R>>,
}

impl<R: Real> ComplexMatrix<R> {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![czero(); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = cone();
        }
        m
    }

    pub fn from_diag(diag: &[C<R>]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Builds from rows; every row must have `rows.len()` finite entries.
    pub fn from_rows(rows: &[Vec<C<R>>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::InvalidInput("matrix dimension must be at least 1".into()));
        }
        let mut data = Vec::with_capacity(dim * dim);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::InvalidInput(format!("row {i} has {} entries, expected {dim}", row.len())));
            }
            if let Some(j) = row.iter().position(|z| !is_finite_c(*z)) {
                return Err(Error::InvalidInput(format!("entry ({i},{j}) is not finite")));
            }
            data.extend_from_slice(row);
        }
        Ok(Self { dim, data })
    }

    pub fn from_real_rows(rows: &[Vec<R>]) -> Result<Self> {
        let rows: Vec<Vec<C<R>>> = rows.iter().map(|r| r.iter().map(|&x| C::new(x, R::zero())).collect()).collect();
        Self::from_rows(&rows)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[C<R>] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> Vec<Vec<C<R>>> {
        (0..self.dim).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<C<R>> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    pub fn is_real(&self) -> bool {
        self.data.iter().all(|z| z.im == R::zero())
    }

    pub fn mul_vec(&self, x: &[C<R>]) -> Vec<C<R>> {
        let mut out = vec![czero(); self.dim];
        self.mul_vec_into(x, &mut out);
        out
    }

    pub fn mul_vec_into(&self, x: &[C<R>], out: &mut [C<R>]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.row(i).iter().zip(x).fold(czero(), |acc, (a, b)| acc + a * b);
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == czero() {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn scale(&self, s: C<R>) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { dim: self.dim, data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self { dim: self.dim, data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect() }
    }

    /// `self - λI`.
    pub fn shifted(&self, lambda: C<R>) -> Self {
        let mut m = self.clone();
        for i in 0..self.dim {
            m[(i, i)] -= lambda;
        }
        m
    }

    pub fn pow(&self, p: u64) -> Self {
        let mut result = Self::identity(self.dim);
        let mut base = self.clone();
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                result = result.matmul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.matmul(&base);
            }
        }
        result
    }

    /// Block-diagonal `self ⊕ other`.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let n = self.dim + other.dim;
        let mut out = Self::zeros(n);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[(i, j)] = self[(i, j)];
            }
        }
        for i in 0..other.dim {
            for j in 0..other.dim {
                out[(self.dim + i, self.dim + j)] = other[(i, j)];
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> R {
        self.data.iter().map(|z| z.norm_sqr()).sum::<R>().sqrt()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> R {
        self.data.iter().fold(R::zero(), |m, z| m.max(z.norm()))
    }

    /// Spectral norm (largest singular value).
    pub fn norm2(&self) -> R {
        singular_values(self).first().copied().unwrap_or_else(R::zero)
    }

    /// Inverse by LU with partial pivoting; `None` when a pivot vanishes.
    pub fn inverse(&self) -> Option<Self> {
        let n = self.dim;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        let scale = self.max_abs().max(R::min_positive_value());
        for col in 0..n {
            let (piv, best) = (col..n)
                .map(|r| (r, a[(r, col)].norm()))
                .fold((col, R::zero()), |acc, x| if x.1 > acc.1 { x } else { acc });
            if best <= R::epsilon() * scale * R::lit(n as f64) {
                return None;
            }
            if piv != col {
                for j in 0..n {
                    a.data.swap(piv * n + j, col * n + j);
                    inv.data.swap(piv * n + j, col * n + j);
                }
            }
            let p = a[(col, col)];
            for j in 0..n {
                a.data[col * n + j] /= p;
                inv.data[col * n + j] /= p;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[(r, col)];
                if f == czero() {
                    continue;
                }
                for j in 0..n {
                    let av = a.data[col * n + j];
                    let iv = inv.data[col * n + j];
                    a.data[r * n + j] -= f * av;
                    inv.data[r * n + j] -= f * iv;
                }
            }
        }
        Some(inv)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| is_finite_c(*z))
    }
}

impl<R> Index<(usize, usize)> for ComplexMatrix<R> {
    type Output = C<R>;
    fn index(&self, (i, j): (usize, usize)) -> &C<R> {
        &self.data[i * self.dim + j]
    }
}

impl<R> IndexMut<(usize, usize)> for ComplexMatrix<R> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<R> {
        &mut self.data[i * self.dim + j]
    }
}

pub fn vec_norm<R: Real>(x: &[C<R>]) -> R {
    x.iter().map(|z| z.norm_sqr()).sum::<R>().sqrt()
}

pub fn vec_dist<R: Real>(x: &[C<R>], y: &[C<R>]) -> R {
    x.iter().zip(y).map(|(a, b)| (a - b).norm_sqr()).sum::<R>().sqrt()
}

/// Hermitian inner product `⟨x, y⟩ = Σ conj(x_i) y_i`.
pub fn inner<R: Real>(x: &[C<R>], y: &[C<R>]) -> C<R> {
    x.iter().zip(y).fold(czero(), |acc, (a, b)| acc + a.conj() * b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C<f64> {
        C::new(re, im)
    }

    #[test]
    fn inverse_round_trips() {
        let m = ComplexMatrix::from_rows(&[vec![c(2.0, 1.0), c(0.0, 1.0)], vec![c(1.0, 0.0), c(3.0, -1.0)]]).unwrap();
        let inv = m.inverse().unwrap();
        let id = m.matmul(&inv);
        assert!(id.sub(&ComplexMatrix::identity(2)).frobenius_norm() < 1e-14);
    }

    #[test]
    fn singular_matrix_has_no_inverse() {
        let m = ComplexMatrix::from_rows(&[vec![c(1.0, 0.0), c(2.0, 0.0)], vec![c(2.0, 0.0), c(4.0, 0.0)]]).unwrap();
        assert!(m.inverse().is_none());
    }

    #[test]
    fn pow_matches_repeated_product() {
        let m = ComplexMatrix::from_rows(&[vec![c(1.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(1.0, 0.0)]]).unwrap();
        let p = m.pow(7);
        assert_eq!(p[(0, 1)], c(7.0, 0.0));
        assert_eq!(m.pow(0), ComplexMatrix::identity(2));
    }

    #[test]
    fn rejects_ragged_and_non_finite() {
        assert!(ComplexMatrix::<f64>::from_rows(&[vec![c(1.0, 0.0)], vec![]]).is_err());
        assert!(ComplexMatrix::<f64>::from_rows(&[vec![c(f64::NAN, 0.0)]]).is_err());
        assert!(ComplexMatrix::<f64>::from_rows(&[]).is_err());
    }
}
