//! Numerical orbit engine: iterate a finite-dimensional action and record
//! ε-returns. Used as the brute-force oracle against the analytic classifiers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{vec_dist, vec_norm, ComplexMatrix};
use crate::scalar::{czero, Real, C};
use crate::taxonomy::{Evidence, Level, RecurrenceVerdict};

pub const EMPIRICAL_TAG: &str = "empirical (horizon-limited)";
pub const DEFAULT_GUARD: f64 = 1e12;
/// Orbits shrinking below this fraction of `‖x‖` count as collapsed.
pub const COLLAPSE_RATIO: f64 = 1e-12;

/// A linear map on `ℂ^dim`.
pub trait OperatorAction<R: Real>: Sync {
    fn dim(&self) -> usize;

    /// Writes `T x` into `out`; both have length `dim`.
    fn apply_into(&self, x: &[C<R>], out: &mut [C<R>]);

    fn apply(&self, x: &[C<R>]) -> Vec<C<R>> {
        let mut out = vec![czero(); self.dim()];
        self.apply_into(x, &mut out);
        out
    }
}

impl<R: Real> OperatorAction<R> for ComplexMatrix<R> {
    fn dim(&self) -> usize {
        ComplexMatrix::dim(self)
    }

    fn apply_into(&self, x: &[C<R>], out: &mut [C<R>]) {
        self.mul_vec_into(x, out)
    }
}

impl<R: Real, T: OperatorAction<R> + ?Sized> OperatorAction<R> for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn apply_into(&self, x: &[C<R>], out: &mut [C<R>]) {
        (**self).apply_into(x, out)
    }
}

impl<R: Real> OperatorAction<R> for Box<dyn OperatorAction<R> + Send> {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn apply_into(&self, x: &[C<R>], out: &mut [C<R>]) {
        (**self).apply_into(x, out)
    }
}

/// Block action `T1 ⊕ T2`.
#[derive(Debug, Clone)]
pub struct DirectSum<A, B> {
    pub first: A,
    pub second: B,
}

pub fn direct_sum<A, B>(first: A, second: B) -> DirectSum<A, B> {
    DirectSum { first, second }
}

impl<R: Real, A: OperatorAction<R>, B: OperatorAction<R>> OperatorAction<R> for DirectSum<A, B> {
    fn dim(&self) -> usize {
        self.first.dim() + self.second.dim()
    }

    fn apply_into(&self, x: &[C<R>], out: &mut [C<R>]) {
        let k = self.first.dim();
        let (o1, o2) = out.split_at_mut(k);
        self.first.apply_into(&x[..k], o1);
        self.second.apply_into(&x[k..], o2);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReturnRecord<R> {
    pub vector_id: String,
    /// `(n, ‖T^n x - x‖)` for `n = 1, 2, ...` up to the horizon or the abort.
    pub samples: Vec<(u64, R)>,
    pub eps_return_times: Vec<u64>,
    pub eps: R,
    /// Set when the orbit left the growth guard and the scan stopped early.
    pub overflow: bool,
    pub x_norm: R,
    pub min_norm_ratio: R,
    pub max_norm_ratio: R,
}

impl<R: Real> ReturnRecord<R> {
    pub fn distance_at(&self, n: u64) -> Option<R> {
        let i = n.checked_sub(1)? as usize;
        self.samples.get(i).map(|s| s.1)
    }

    /// The orbit collapsed towards 0 and cannot come back within `eps`.
    pub fn collapsed(&self) -> bool {
        self.min_norm_ratio < R::lit(COLLAPSE_RATIO) && self.eps < self.x_norm / R::lit(2.0)
    }

    /// CSV with header `n,distance,is_return`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,distance,is_return\n");
        for &(n, d) in &self.samples {
            out.push_str(&format!("{n},{},{}\n", d.to_f64_lossy(), d < self.eps));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOptions<R> {
    pub horizon: u64,
    pub eps: R,
    /// The scan stops once `‖T^n x‖ > guard·‖x‖`.
    pub guard: R,
}

impl<R: Real> ScanOptions<R> {
    pub fn new(horizon: u64, eps: R) -> Self {
        Self { horizon, eps, guard: R::lit(DEFAULT_GUARD) }
    }

    fn validate(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(Error::InvalidInput("horizon must be at least 1".into()));
        }
        if !(self.eps > R::zero()) || !self.eps.is_finite() {
            return Err(Error::InvalidInput("eps must be finite and positive".into()));
        }
        if !(self.guard > R::one()) {
            return Err(Error::InvalidInput("growth guard must exceed 1".into()));
        }
        Ok(())
    }
}

pub fn scan_returns<R: Real, T: OperatorAction<R> + ?Sized>(
    t: &T,
    x: &[C<R>],
    horizon: u64,
    eps: R,
) -> Result<ReturnRecord<R>> {
    scan_returns_with(t, x, "x", &ScanOptions::new(horizon, eps))
}

pub fn scan_returns_with<R: Real, T: OperatorAction<R> + ?Sized>(
    t: &T,
    x: &[C<R>],
    vector_id: &str,
    opts: &ScanOptions<R>,
) -> Result<ReturnRecord<R>> {
    opts.validate()?;
    if x.len() != t.dim() {
        return Err(Error::InvalidInput(format!("vector has length {}, operator dimension is {}", x.len(), t.dim())));
    }
    let x_norm = vec_norm(x);
    if !x_norm.is_finite() {
        return Err(Error::InvalidInput("vector has non-finite entries".into()));
    }
    if x_norm == R::zero() {
        return Err(Error::ZeroVector);
    }
    let mut y = x.to_vec();
    let mut next = vec![czero(); x.len()];
    let mut rec = ReturnRecord {
        vector_id: vector_id.to_string(),
        samples: Vec::with_capacity(opts.horizon.min(1 << 20) as usize),
        eps_return_times: Vec::new(),
        eps: opts.eps,
        overflow: false,
        x_norm,
        min_norm_ratio: R::one(),
        max_norm_ratio: R::one(),
    };
    for n in 1..=opts.horizon {
        t.apply_into(&y, &mut next);
        std::mem::swap(&mut y, &mut next);
        let ratio = vec_norm(&y) / x_norm;
        if !ratio.is_finite() || ratio > opts.guard {
            rec.overflow = true;
            rec.max_norm_ratio = if ratio.is_finite() { ratio } else { R::infinity() };
            break;
        }
        rec.min_norm_ratio = rec.min_norm_ratio.min(ratio);
        rec.max_norm_ratio = rec.max_norm_ratio.max(ratio);
        let d = vec_dist(&y, x);
        rec.samples.push((n, d));
        if d < opts.eps {
            rec.eps_return_times.push(n);
        }
    }
    Ok(rec)
}

/// Outcome of an ensemble scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalVerdict {
    pub verdict: RecurrenceVerdict,
    /// True when the verdict rests on observed returns, a guard violation or a
    /// collapse; false when it only reflects the horizon running out.
    pub conclusive: bool,
    pub failing_vector: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalOptions<R> {
    pub scan: ScanOptions<R>,
    /// Size of the fresh unit-vector ensemble checked for uniform rigidity.
    pub adversarial: usize,
    pub seed: u64,
    /// How many common return times are tried for the uniform check.
    pub common_candidates: usize,
}

impl<R: Real> EmpiricalOptions<R> {
    pub fn new(horizon: u64, eps: R) -> Self {
        Self { scan: ScanOptions::new(horizon, eps), adversarial: 16, seed: 0xad5e_75a1, common_candidates: 8 }
    }
}

/// Gaussian random complex vector.
pub fn gaussian_vector<R: Real>(dim: usize, rng: &mut ChaCha8Rng) -> Vec<C<R>> {
    (0..dim)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            C::new(R::lit(re), R::lit(im))
        })
        .collect()
}

fn normalized<R: Real>(v: Vec<C<R>>) -> Vec<C<R>> {
    let n = vec_norm(&v);
    v.into_iter().map(|z| z / n).collect()
}

/// Default ensemble of 32 unit vectors: 16 Gaussian, 8 canonical basis
/// vectors (cycling when `dim < 8`) and 8 small perturbations of `near`
/// (the all-ones vector when absent).
pub fn default_ensemble<R: Real>(dim: usize, seed: u64, near: Option<&[C<R>]>) -> Vec<Vec<C<R>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(32);
    for _ in 0..16 {
        out.push(normalized(gaussian_vector(dim, &mut rng)));
    }
    for k in 0..8 {
        let mut e = vec![czero(); dim];
        e[k % dim] = C::new(R::one(), R::zero());
        out.push(e);
    }
    let base: Vec<C<R>> = match near {
        Some(v) if v.len() == dim && vec_norm(v) > R::zero() => normalized(v.to_vec()),
        _ => normalized(vec![C::new(R::one(), R::zero()); dim]),
    };
    for _ in 0..8 {
        let p = gaussian_vector::<R>(dim, &mut rng);
        let v: Vec<C<R>> = base.iter().zip(&p).map(|(b, q)| b + q * R::lit(1e-3)).collect();
        out.push(normalized(v));
    }
    out
}

fn apply_power<R: Real, T: OperatorAction<R> + ?Sized>(t: &T, x: &[C<R>], n: u64) -> Vec<C<R>> {
    let mut y = x.to_vec();
    let mut next = vec![czero(); x.len()];
    for _ in 0..n {
        t.apply_into(&y, &mut next);
        std::mem::swap(&mut y, &mut next);
    }
    y
}

/// Sorted intersection of the return-time sets.
fn common_times<R>(records: &[ReturnRecord<R>]) -> Vec<u64> {
    let mut common = records[0].eps_return_times.clone();
    for r in &records[1..] {
        let set = &r.eps_return_times;
        common.retain(|n| set.binary_search(n).is_ok());
    }
    common
}

/// Empirical recurrence level of `t` over `ensemble`, with all scans run in
/// parallel. Never proves more than the scans show.
pub fn empirical_verdict<R: Real, T: OperatorAction<R> + ?Sized>(
    t: &T,
    ensemble: &[Vec<C<R>>],
    opts: &EmpiricalOptions<R>,
) -> Result<EmpiricalVerdict> {
    if ensemble.is_empty() {
        return Err(Error::InvalidInput("ensemble must not be empty".into()));
    }
    let records: Vec<ReturnRecord<R>> = ensemble
        .par_iter()
        .enumerate()
        .map(|(i, x)| scan_returns_with(t, x, &format!("v{i}"), &opts.scan))
        .collect::<Result<_>>()?;
    Ok(verdict_from_records(t, &records, opts))
}

pub fn verdict_from_records<R: Real, T: OperatorAction<R> + ?Sized>(
    t: &T,
    records: &[ReturnRecord<R>],
    opts: &EmpiricalOptions<R>,
) -> EmpiricalVerdict {
    let tag = Evidence::TheoremTag(EMPIRICAL_TAG.into());
    if let Some(r) = records.iter().find(|r| r.overflow) {
        let v = RecurrenceVerdict::not_recurrent(format!(
            "{}: orbit norm exceeded {}·‖x‖",
            r.vector_id,
            opts.scan.guard.to_f64_lossy()
        ))
        .with(tag);
        return EmpiricalVerdict { verdict: v, conclusive: true, failing_vector: Some(r.vector_id.clone()) };
    }
    if let Some(r) = records.iter().find(|r| r.collapsed()) {
        let v = RecurrenceVerdict::not_recurrent(format!("{}: orbit collapsed towards 0", r.vector_id)).with(tag);
        return EmpiricalVerdict { verdict: v, conclusive: true, failing_vector: Some(r.vector_id.clone()) };
    }
    if let Some(r) = records.iter().find(|r| r.eps_return_times.is_empty()) {
        let v = RecurrenceVerdict::not_recurrent(format!(
            "{}: no return within {} steps",
            r.vector_id, opts.scan.horizon
        ))
        .with(tag);
        return EmpiricalVerdict { verdict: v, conclusive: false, failing_vector: Some(r.vector_id.clone()) };
    }

    let common = common_times(records);
    if common.is_empty() {
        let v = RecurrenceVerdict::new(Level::Recurrent, tag);
        return EmpiricalVerdict { verdict: v, conclusive: true, failing_vector: None };
    }

    let dim = t.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let fresh: Vec<Vec<C<R>>> = (0..opts.adversarial).map(|_| normalized(gaussian_vector(dim, &mut rng))).collect();
    let uniform: Vec<u64> = common
        .iter()
        .copied()
        .take(opts.common_candidates)
        .filter(|&n| {
            let ensemble_ok = records.iter().all(|r| {
                r.distance_at(n).map(|d| d < opts.scan.eps * r.x_norm).unwrap_or(false)
            });
            ensemble_ok
                && fresh.par_iter().all(|u| vec_dist(&apply_power(t, u, n), u) < opts.scan.eps)
        })
        .collect();
    let v = if uniform.is_empty() {
        RecurrenceVerdict::new(Level::Rigid, tag).with_witness(common)
    } else {
        RecurrenceVerdict::new(Level::UniformlyRigid, tag).with_witness(uniform)
    };
    EmpiricalVerdict { verdict: v, conclusive: true, failing_vector: None }
}
