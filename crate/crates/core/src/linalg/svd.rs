//! One-sided (Hestenes) Jacobi SVD for square complex matrices.

use super::ComplexMatrix;
use crate::scalar::{czero, Real, C};

/// Singular values (descending) with the matching right singular vectors.
#[derive(Debug, Clone)]
pub struct Svd<R> {
    pub values: Vec<R>,
    /// Column `k` of `V`, stored as `right[k]`.
    pub right: Vec<Vec<C<R>>>,
}

impl<R: Real> Svd<R> {
    pub fn compute(a: &ComplexMatrix<R>) -> Self {
        let n = a.dim();
        // columns of A and of V
        let mut cols: Vec<Vec<C<R>>> = (0..n).map(|j| a.column(j)).collect();
        let mut v: Vec<Vec<C<R>>> = (0..n)
            .map(|j| (0..n).map(|i| if i == j { C::new(R::one(), R::zero()) } else { czero() }).collect())
            .collect();
        let tol = R::epsilon() * R::lit(n.max(1) as f64);

        for _sweep in 0..80 {
            let mut rotated = false;
            for p in 0..n {
                for q in (p + 1)..n {
                    let alpha: R = cols[p].iter().map(|z| z.norm_sqr()).sum();
                    let beta: R = cols[q].iter().map(|z| z.norm_sqr()).sum();
                    let gamma = cols[p].iter().zip(&cols[q]).fold(czero::<R>(), |acc, (x, y)| acc + x.conj() * y);
                    let g = gamma.norm();
                    if g == R::zero() || g <= tol * (alpha * beta).sqrt() {
                        continue;
                    }
                    rotated = true;
                    // phase that makes ⟨a_p, a_q e^{-iφ}⟩ real and positive
                    let phase = gamma / g;
                    let zeta = (beta - alpha) / (R::lit(2.0) * g);
                    let sign = if zeta >= R::zero() { R::one() } else { -R::one() };
                    let t = sign / (zeta.abs() + (R::one() + zeta * zeta).sqrt());
                    let c = R::one() / (R::one() + t * t).sqrt();
                    let s = c * t;
                    let pc = phase.conj();
                    for i in 0..n {
                        let ap = cols[p][i];
                        let aq = cols[q][i] * pc;
                        cols[p][i] = ap * c - aq * s;
                        cols[q][i] = ap * s + aq * c;
                        let vp = v[p][i];
                        let vq = v[q][i] * pc;
                        v[p][i] = vp * c - vq * s;
                        v[q][i] = vp * s + vq * c;
                    }
                }
            }
            if !rotated {
                break;
            }
        }

        let mut order: Vec<(R, usize)> =
            cols.iter().enumerate().map(|(j, c)| (c.iter().map(|z| z.norm_sqr()).sum::<R>().sqrt(), j)).collect();
        order.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal).then(a.1.cmp(&b.1)));
        Self { values: order.iter().map(|(s, _)| *s).collect(), right: order.iter().map(|(_, j)| v[*j].clone()).collect() }
    }

    /// Number of singular values above `threshold`.
    pub fn rank(&self, threshold: R) -> usize {
        self.values.iter().filter(|&&s| s > threshold).count()
    }
}

pub fn singular_values<R: Real>(a: &ComplexMatrix<R>) -> Vec<R> {
    Svd::compute(a).values
}
