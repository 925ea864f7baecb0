//! Simultaneous returns of rotations: smallest `m` with every `e^{2πi m θ_j}`
//! close to 1, and rational recognition of angles.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::taxonomy::chord;

/// Largest candidate count scanned before giving up, whatever the pigeonhole
/// bound says.
pub const DEFAULT_SCAN_CAP: u64 = 2_000_000_000;

const CHUNK: u64 = 1 << 15;

/// Distance from `x` to the nearest integer.
#[inline]
pub fn dist_to_int<R: Real>(x: R) -> R {
    (x - x.round()).abs()
}

/// `asin(δ/2)/π`: `chord(x) < δ` exactly when `dist_to_int(x) <` this value.
pub fn circle_radius<R: Real>(delta: R) -> R {
    if delta >= R::lit(2.0) {
        R::lit(0.5)
    } else {
        (delta / R::lit(2.0)).asin() / R::PI()
    }
}

/// Upper bound on the answer from Dirichlet's pigeonhole argument applied to
/// the angles `n_min·θ_j`: with `N = ⌊1/η⌋ + 1` some `q ≤ N^d` has every
/// `‖q·n_min·θ_j‖ ≤ 1/N < η`. Saturates at `u64::MAX`.
pub fn pigeonhole_bound<R: Real>(dim: usize, delta: R, n_min: u64) -> u64 {
    let eta = circle_radius(delta).to_f64_lossy();
    let n = (1.0 / eta).floor() + 1.0;
    let bound = n.powi(dim as i32) * n_min as f64;
    if bound >= u64::MAX as f64 {
        u64::MAX
    } else {
        bound as u64
    }
}

/// Max chord of `m·θ_j` over the list.
pub fn max_chord<R: Real>(theta: &[R], m: u64) -> R {
    let mr = R::from_u64(m).unwrap_or_else(R::infinity);
    theta.iter().map(|&t| chord(mul_mod1(mr, reduce(t)))).fold(R::zero(), R::max)
}

/// `m·t mod 1` with the rounding error of the product added back, so the
/// residue stays accurate for large `m`.
#[inline]
pub fn mul_mod1<R: Real>(m: R, t: R) -> R {
    let hi = m * t;
    let lo = m.mul_add(t, -hi);
    (hi - hi.round()) + lo
}

/// Representative of `θ mod 1` in `[-1/2, 1/2]`.
fn reduce<R: Real>(t: R) -> R {
    t - t.round()
}

/// Smallest `m ≥ n_min` with `max_j chord(m θ_j) < δ`.
///
/// The scan budget is the pigeonhole bound capped at [`DEFAULT_SCAN_CAP`].
pub fn find_simultaneous_return<R: Real>(theta: &[R], delta: R, n_min: u64) -> Result<u64> {
    find_simultaneous_return_capped(theta, delta, n_min, DEFAULT_SCAN_CAP)
}

pub fn find_simultaneous_return_capped<R: Real>(theta: &[R], delta: R, n_min: u64, cap: u64) -> Result<u64> {
    if !(delta > R::zero()) || !delta.is_finite() {
        return Err(Error::InvalidInput("delta must be finite and positive".into()));
    }
    if theta.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidInput("angles must be finite".into()));
    }
    let n_min = n_min.max(1);
    if theta.is_empty() {
        return Ok(n_min);
    }
    let reduced: Vec<R> = theta.iter().map(|&t| reduce(t)).collect();
    let eta = circle_radius(delta);
    // loose prefilter, the chord is the judge
    let pre = eta * (R::one() + R::lit(1e-6)) + R::epsilon() * R::lit(64.0);
    let budget = pigeonhole_bound(theta.len(), delta, n_min).min(cap);
    let last = n_min.saturating_add(budget);

    let hit = |m: u64| -> bool {
        let mr = R::from_u64(m).unwrap_or_else(R::infinity);
        reduced.iter().all(|&t| dist_to_int(mr * t) < pre) && reduced.iter().all(|&t| chord(mul_mod1(mr, t)) < delta)
    };

    // most answers are small: one sequential chunk first
    let first_end = n_min.saturating_add(CHUNK).min(last);
    if let Some(m) = (n_min..first_end).find(|&m| hit(m)) {
        return Ok(m);
    }
    let round = CHUNK * rayon::current_num_threads().max(1) as u64 * 4;
    let mut start = first_end;
    while start < last {
        let end = start.saturating_add(round).min(last);
        let n_chunks = (end - start).div_ceil(CHUNK);
        let found = (0..n_chunks)
            .into_par_iter()
            .filter_map(|c| {
                let lo = start + c * CHUNK;
                let hi = (lo + CHUNK).min(end);
                (lo..hi).find(|&m| hit(m))
            })
            .min();
        if let Some(m) = found {
            return Ok(m);
        }
        start = end;
    }
    Err(Error::BudgetExhausted { budget })
}

/// Best rational `p/q` (`q ≤ max_den`) within `tol` of `x`, from the continued
/// fraction convergents of `x`. Returns the first convergent that qualifies.
pub fn rational_approximation<R: Real>(x: R, max_den: u64, tol: R) -> Option<(i64, u64)> {
    let xf = x.to_f64_lossy();
    let tolf = tol.to_f64_lossy();
    if !xf.is_finite() || xf.abs() > 1e15 {
        return None;
    }
    let (mut p0, mut q0, mut p1, mut q1) = (0i128, 1i128, 1i128, 0i128);
    let mut r = xf;
    for _ in 0..64 {
        let a = r.floor();
        let ai = a as i128;
        let p2 = ai * p1 + p0;
        let q2 = ai * q1 + q0;
        if q2 > max_den as i128 {
            break;
        }
        if (xf - p2 as f64 / q2 as f64).abs() <= tolf {
            return Some((p2 as i64, q2 as u64));
        }
        let frac = r - a;
        if frac <= 0.0 {
            break;
        }
        r = 1.0 / frac;
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
    }
    None
}
