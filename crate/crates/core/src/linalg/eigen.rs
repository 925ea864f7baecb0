//! Eigenvalues of a dense complex matrix: balancing, Householder reduction to
//! upper Hessenberg form, then shifted QR sweeps with Givens rotations and
//! Wilkinson shifts.

use super::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::{czero, Real, C};

/// Diagonal similarity scaling (radix 2) that equalizes row and column norms.
pub fn balance<R: Real>(a: &ComplexMatrix<R>) -> ComplexMatrix<R> {
    let n = a.dim();
    let mut m = a.clone();
    let two = R::lit(2.0);
    let four = R::lit(4.0);
    for _ in 0..100 {
        let mut converged = true;
        for i in 0..n {
            let mut c = R::zero();
            let mut r = R::zero();
            for j in 0..n {
                if j != i {
                    c += m[(j, i)].re.abs() + m[(j, i)].im.abs();
                    r += m[(i, j)].re.abs() + m[(i, j)].im.abs();
                }
            }
            if c == R::zero() || r == R::zero() {
                continue;
            }
            let s = c + r;
            let mut f = R::one();
            let g = r / two;
            while c < g {
                f *= two;
                c *= four;
            }
            let g = r * two;
            while c > g {
                f /= two;
                c /= four;
            }
            if (c + r) / f < R::lit(0.95) * s {
                converged = false;
                let finv = R::one() / f;
                for j in 0..n {
                    m[(i, j)] *= finv;
                    m[(j, i)] *= f;
                }
            }
        }
        if converged {
            break;
        }
    }
    m
}

/// Unitary similarity to upper Hessenberg form.
pub fn hessenberg<R: Real>(a: &ComplexMatrix<R>) -> ComplexMatrix<R> {
    let n = a.dim();
    let mut h = a.clone();
    if n < 3 {
        return h;
    }
    for k in 0..n - 2 {
        let x: Vec<C<R>> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let xnorm = x.iter().map(|z| z.norm_sqr()).sum::<R>().sqrt();
        if xnorm == R::zero() {
            continue;
        }
        let x0 = x[0];
        let phase = if x0.norm() == R::zero() { C::new(R::one(), R::zero()) } else { x0 / x0.norm() };
        let alpha = -phase * xnorm;
        let mut v = x;
        v[0] -= alpha;
        let vnorm2 = v.iter().map(|z| z.norm_sqr()).sum::<R>();
        if vnorm2 == R::zero() {
            continue;
        }
        let beta = R::lit(2.0) / vnorm2;
        // H ← (I - β v v*) H
        for j in 0..n {
            let s = v.iter().enumerate().fold(czero::<R>(), |acc, (t, vi)| acc + vi.conj() * h[(k + 1 + t, j)]);
            let s = s * beta;
            for (t, vi) in v.iter().enumerate() {
                h[(k + 1 + t, j)] -= vi * s;
            }
        }
        // H ← H (I - β v v*)
        for i in 0..n {
            let s = v.iter().enumerate().fold(czero::<R>(), |acc, (t, vi)| acc + h[(i, k + 1 + t)] * vi);
            let s = s * beta;
            for (t, vi) in v.iter().enumerate() {
                h[(i, k + 1 + t)] -= s * vi.conj();
            }
        }
        for i in k + 2..n {
            h[(i, k)] = czero();
        }
    }
    h
}

/// Givens rotation `G = [[c, s], [-conj(s), c]]` with `G [a; b] = [r; 0]`.
fn givens<R: Real>(a: C<R>, b: C<R>) -> (R, C<R>) {
    let na = a.norm();
    let r = (na * na + b.norm_sqr()).sqrt();
    if r == R::zero() {
        return (R::one(), czero());
    }
    if na == R::zero() {
        return (R::zero(), C::new(R::one(), R::zero()));
    }
    let c = na / r;
    let s = (a / na) * b.conj() / r;
    (c, s)
}

fn wilkinson_shift<R: Real>(a: C<R>, b: C<R>, c: C<R>, d: C<R>) -> C<R> {
    let half = R::lit(0.5);
    let m = (a + d) * half;
    let disc = ((a - d) * half * ((a - d) * half) + b * c).sqrt();
    let l1 = m + disc;
    let l2 = m - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// All eigenvalues of `a` (with repetition), in the order they deflate.
pub fn eigenvalues<R: Real>(a: &ComplexMatrix<R>) -> Result<Vec<C<R>>> {
    let n = a.dim();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut h = hessenberg(&balance(a));
    let eps = R::epsilon();
    let norm = h.frobenius_norm().max(R::min_positive_value());
    let mut out = vec![czero(); n];
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    let max_total = 60 * n.max(4);

    loop {
        if hi == 0 {
            out[0] = h[(0, 0)];
            break;
        }
        // find the start of the active unreduced block
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let diag = h[(lo, lo)].norm() + h[(lo - 1, lo - 1)].norm();
            let scale = if diag == R::zero() { norm } else { diag };
            if sub <= eps * scale {
                h[(lo, lo - 1)] = czero();
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            out[hi] = h[(hi, hi)];
            hi -= 1;
            iter = 0;
            continue;
        }

        iter += 1;
        total += 1;
        if total > max_total {
            let residual = h[(hi, hi - 1)].norm().to_f64_lossy();
            return Err(Error::ConvergenceFailure { residual });
        }

        let mu = if iter % 11 == 0 {
            // exceptional shift to break cycles
            h[(hi, hi)] + C::new(h[(hi, hi - 1)].norm() * R::lit(0.75), R::zero())
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };

        for i in lo..=hi {
            h[(i, i)] -= mu;
        }
        let mut rots = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
            for j in k..=hi {
                let x = h[(k, j)];
                let y = h[(k + 1, j)];
                h[(k, j)] = x * c + s * y;
                h[(k + 1, j)] = -s.conj() * x + y * c;
            }
            rots.push((c, s));
        }
        for (off, &(c, s)) in rots.iter().enumerate() {
            let k = lo + off;
            let top = (k + 2).min(hi);
            for i in lo..=top {
                let x = h[(i, k)];
                let y = h[(i, k + 1)];
                h[(i, k)] = x * c + y * s.conj();
                h[(i, k + 1)] = -x * s + y * c;
            }
        }
        for i in lo..=hi {
            h[(i, i)] += mu;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted(mut v: Vec<C<f64>>) -> Vec<C<f64>> {
        v.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
        v
    }

    #[test]
    fn diagonal_eigenvalues() {
        let m = ComplexMatrix::from_diag(&[C::new(1.0, 0.0), C::new(0.0, 1.0)]);
        let ev = sorted(eigenvalues(&m).unwrap());
        assert!((ev[0] - C::new(0.0, 1.0)).norm() < 1e-15);
        assert!((ev[1] - C::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn rotation_eigenvalues() {
        let m = ComplexMatrix::from_real_rows(&[vec![0.6, 0.8], vec![-0.8, 0.6]]).unwrap();
        let ev = sorted(eigenvalues(&m).unwrap());
        assert!((ev[0] - C::new(0.6, -0.8)).norm() < 1e-14);
        assert!((ev[1] - C::new(0.6, 0.8)).norm() < 1e-14);
    }

    #[test]
    fn companion_matrix_roots() {
        // x^3 - 6x^2 + 11x - 6 = (x-1)(x-2)(x-3)
        let m = ComplexMatrix::from_real_rows(&[vec![6.0, -11.0, 6.0], vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]])
            .unwrap();
        let ev = sorted(eigenvalues(&m).unwrap());
        for (e, want) in ev.iter().zip([1.0, 2.0, 3.0]) {
            assert!((e - C::new(want, 0.0)).norm() < 1e-12, "{e} vs {want}");
        }
    }

    #[test]
    fn hessenberg_preserves_trace_and_shape() {
        let rows: Vec<Vec<C<f64>>> = (0..5)
            .map(|i| (0..5).map(|j| C::new(((i * 7 + j * 3) % 5) as f64 - 2.0, ((i + 2 * j) % 3) as f64)).collect())
            .collect();
        let m = ComplexMatrix::from_rows(&rows).unwrap();
        let h = hessenberg(&m);
        let tr = |x: &ComplexMatrix<f64>| (0..5).fold(C::new(0.0, 0.0), |a, i| a + x[(i, i)]);
        assert!((tr(&m) - tr(&h)).norm() < 1e-12);
        for i in 2..5 {
            for j in 0..i - 1 {
                assert_eq!(h[(i, j)], C::new(0.0, 0.0));
            }
        }
        assert!((m.frobenius_norm() - h.frobenius_norm()).abs() < 1e-12);
    }

    #[test]
    fn f32_eigenvalues() {
        let m = ComplexMatrix::<f32>::from_real_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let mut ev: Vec<f32> = eigenvalues(&m).unwrap().iter().map(|z| z.re).collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((ev[0] - 1.0).abs() < 1e-5 && (ev[1] - 3.0).abs() < 1e-5);
    }
}
