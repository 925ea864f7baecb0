//! Randomized structural laws binding the classifiers to each other and to
//! the orbit engine, with the seeded instance generators they draw from.

use num_complex::Complex64;
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::diophantine::rational_approximation;
use crate::error::{Error, Result};
use crate::linalg::{inner, vec_dist, vec_norm, ComplexMatrix};
use crate::matrix_dynamics::{classify_complex, m_isometry_defect, probe_vectors, structural_checks};
use crate::orbit::{gaussian_vector, scan_returns};
use crate::scalar::unit_phase;
use crate::taxonomy::{meet_verdicts, Level, Tolerance};

type M = ComplexMatrix<f64>;

/// Registered laws with the statement each one checks.
pub const LAWS: &[(&str, &str)] = &[
    ("unimodular_multiple_law", "Rec(T) = Rec(λT) for |λ| = 1"),
    ("power_law", "T is recurrent iff T^p is recurrent"),
    ("inverse_law", "an invertible T is recurrent iff T^{-1} is recurrent"),
    ("rigid_power_law", "if T is (uniformly) rigid then so is T^p"),
    ("direct_sum_law", "T1 ⊕ T2 recurrent forces both T1 and T2 recurrent"),
    ("product_recurrence_law", "T recurrent in finite dimension gives T ⊕ T recurrent"),
    ("contraction_law", "a recurrent contraction is a surjective isometry"),
    ("power_bounded_law", "a recurrent power-bounded T has Rec(T) = X"),
    ("normal_law", "a recurrent normal operator is unitary"),
    ("m_isometry_law", "unitaries are (1,2)- and (2,2)-isometries; recurrent m-isometries are unitary"),
    ("discrete_spectrum_law", "a basis of unimodular eigenvectors makes T recurrent"),
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LawFailure {
    pub instance: String,
    pub expected: String,
    pub observed: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LawReport {
    pub law_id: String,
    pub statement: String,
    pub instances_run: usize,
    /// Instances on which the law's hypothesis held, so the assertion was
    /// actually exercised.
    pub premise_held: usize,
    pub failures: Vec<LawFailure>,
}

impl LawReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Generator families for matrix instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `U diag(e^{2πi p/q}) U^{-1}` with `q ≤ 8`.
    RationalRotation,
    /// `U diag(e^{2πiθ}) U^{-1}` with uniform `θ`.
    IrrationalRotation,
    /// One eigenvalue of modulus in `[0.5, 0.9] ∪ [1.1, 1.5]`.
    OffCircle,
    /// One 2×2 Jordan block at a unimodular eigenvalue.
    Jordan,
}

impl Family {
    pub fn is_recurrent(self) -> bool {
        matches!(self, Family::RationalRotation | Family::IrrationalRotation)
    }
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub family: Family,
    pub matrix: M,
    /// Diagonal (or Jordan) factor `D` in `T = U D U^{-1}`.
    pub core: M,
    pub basis: M,
    pub basis_inv: M,
    pub cond: f64,
    pub angles: Vec<f64>,
}

impl Instance {
    pub fn describe(&self) -> String {
        let angles: Vec<String> = self.angles.iter().map(|a| format!("{a:.6}")).collect();
        format!("{:?} dim={} cond={:.2} angles=[{}]", self.family, self.matrix.dim(), self.cond, angles.join(","))
    }
}

/// Haar-like unitary from Gram–Schmidt on Gaussian columns.
pub fn random_unitary(n: usize, rng: &mut ChaCha8Rng) -> M {
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v: Vec<Complex64> = gaussian_vector(n, rng);
        for _ in 0..2 {
            for q in &cols {
                let c = inner(q, &v);
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= c * qi;
                }
            }
        }
        let nv = vec_norm(&v);
        if nv > 1e-8 {
            cols.push(v.into_iter().map(|z| z / nv).collect());
        }
    }
    let mut u = M::zeros(n);
    for (j, c) in cols.iter().enumerate() {
        for i in 0..n {
            u[(i, j)] = c[i];
        }
    }
    u
}

/// `U = Q1 diag(s) Q2` with log-uniform `s ∈ [1, max_cond]`, and its inverse.
pub fn conditioned_basis(n: usize, max_cond: f64, rng: &mut ChaCha8Rng) -> (M, M, f64) {
    let q1 = random_unitary(n, rng);
    let q2 = random_unitary(n, rng);
    let mut s: Vec<f64> = (0..n).map(|_| max_cond.powf(rng.gen::<f64>())).collect();
    if n > 1 {
        s[0] = 1.0;
    }
    let smax = s.iter().cloned().fold(0.0, f64::max);
    let smin = s.iter().cloned().fold(f64::INFINITY, f64::min);
    let ds = M::from_diag(&s.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>());
    let dinv = M::from_diag(&s.iter().map(|&x| Complex64::new(1.0 / x, 0.0)).collect::<Vec<_>>());
    let u = q1.matmul(&ds).matmul(&q2);
    let uinv = q2.adjoint().matmul(&dinv).matmul(&q1.adjoint());
    (u, uinv, smax / smin)
}

fn rational_angle(rng: &mut ChaCha8Rng) -> f64 {
    let q = rng.gen_range(1..=8u32);
    let p = rng.gen_range(0..q);
    p as f64 / q as f64
}

/// Random instance of `family` in dimension `dim` with `cond(U) ≤ 100`.
pub fn generate(family: Family, dim: usize, rng: &mut ChaCha8Rng) -> Instance {
    let (u, uinv, cond) = conditioned_basis(dim, 100.0, rng);
    let mut angles: Vec<f64> = (0..dim)
        .map(|_| if family == Family::RationalRotation { rational_angle(rng) } else { rng.gen::<f64>() })
        .collect();
    let mut diag: Vec<Complex64> = angles.iter().map(|&a| unit_phase(a)).collect();
    let mut core;
    match family {
        Family::RationalRotation | Family::IrrationalRotation => core = M::from_diag(&diag),
        Family::OffCircle => {
            let k = rng.gen_range(0..dim);
            let r = if rng.gen::<bool>() { rng.gen_range(0.5..0.9) } else { rng.gen_range(1.1..1.5) };
            diag[k] *= r;
            core = M::from_diag(&diag);
        }
        Family::Jordan => {
            // needs dim ≥ 2; the first two slots share an eigenvalue
            angles[1] = angles[0];
            diag[1] = diag[0];
            core = M::from_diag(&diag);
            core[(0, 1)] = Complex64::new(1.0, 0.0);
        }
    }
    let matrix = u.matmul(&core).matmul(&uinv);
    Instance { family, matrix, core, basis: u, basis_inv: uinv, cond, angles }
}

fn instance_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn mixed_instance(rng: &mut ChaCha8Rng, min_dim: usize, max_dim: usize) -> Instance {
    let family = match rng.gen_range(0..4) {
        0 => Family::RationalRotation,
        1 => Family::IrrationalRotation,
        2 => Family::OffCircle,
        _ => Family::Jordan,
    };
    let lo = if family == Family::Jordan { min_dim.max(2) } else { min_dim };
    let dim = rng.gen_range(lo..=max_dim.max(lo));
    generate(family, dim, rng)
}

fn random_normal(rng: &mut ChaCha8Rng, dim: usize) -> (M, bool) {
    let q = random_unitary(dim, rng);
    let unimodular = rng.gen::<bool>();
    let mu: Vec<Complex64> = (0..dim)
        .map(|_| {
            let r = if unimodular || rng.gen::<f64>() < 0.5 { 1.0 } else { rng.gen_range(0.3..1.7) };
            unit_phase(rng.gen::<f64>()) * r
        })
        .collect();
    (q.matmul(&M::from_diag(&mu)).matmul(&q.adjoint()), unimodular)
}

enum Outcome {
    Pass { premise: bool },
    Fail(LawFailure),
}

fn fail(instance: String, expected: impl Into<String>, observed: impl Into<String>) -> Outcome {
    Outcome::Fail(LawFailure { instance, expected: expected.into(), observed: observed.into() })
}

fn level(t: &M, tol: &Tolerance<f64>) -> Result<Level> {
    Ok(classify_complex(t, tol)?.level)
}

fn as_bool(l: Level) -> &'static str {
    if l.is_recurrent() {
        "recurrent"
    } else {
        "not recurrent"
    }
}

fn lambdas() -> [(Complex64, Option<u64>); 3] {
    [
        (Complex64::new(0.0, 1.0), Some(4)),
        (unit_phase(1.0 / 3.0), Some(3)),
        (unit_phase(2f64.sqrt()), None),
    ]
}

fn power_applied(t: &M, x: &[Complex64], n: u64) -> Vec<Complex64> {
    t.pow(n).mul_vec(x)
}

fn run_instance(id: &str, i: u64, rng: &mut ChaCha8Rng, tol: &Tolerance<f64>) -> Result<Outcome> {
    let ok = |premise| Ok(Outcome::Pass { premise });
    match id {
        "unimodular_multiple_law" => {
            let inst = mixed_instance(rng, 1, 4);
            let (lambda, period) = lambdas()[(i % 3) as usize];
            let desc = format!("{} λ={lambda:.6}", inst.describe());
            let v = classify_complex(&inst.matrix, tol)?;
            let lt = inst.matrix.scale(lambda);
            let l2 = level(&lt, tol)?;
            if v.level != l2 {
                return Ok(fail(desc, v.level.to_string(), l2.to_string()));
            }
            // a common period of T and λ is a return time of λT
            if let (Some(q), Some(w), Family::RationalRotation) = (period, v.witness(), inst.family) {
                let m = q.lcm(&w[0]);
                let x: Vec<Complex64> = gaussian_vector(inst.matrix.dim(), rng);
                let d = vec_dist(&power_applied(&lt, &x, m), &x) / vec_norm(&x);
                if d > 1e-6 {
                    return Ok(fail(desc, format!("return of λT at n = {m}"), format!("relative distance {d:e}")));
                }
            }
            ok(v.level.is_recurrent())
        }
        "power_law" | "rigid_power_law" => {
            let inst = mixed_instance(rng, 1, 4);
            let p = [2u64, 3, 5][(i % 3) as usize];
            let desc = format!("{} p={p}", inst.describe());
            let l1 = level(&inst.matrix, tol)?;
            let lp = level(&inst.matrix.pow(p), tol)?;
            if id == "power_law" {
                if l1.is_recurrent() != lp.is_recurrent() {
                    return Ok(fail(desc, as_bool(l1), as_bool(lp)));
                }
                ok(l1.is_recurrent())
            } else if l1 >= Level::Rigid && lp < l1 {
                Ok(fail(desc, format!("T^p at least {l1}"), lp.to_string()))
            } else {
                ok(l1 >= Level::Rigid)
            }
        }
        "inverse_law" => {
            let inst = mixed_instance(rng, 1, 4);
            let inv = inst.matrix.inverse().ok_or_else(|| Error::CertificationFailure("singular instance".into()))?;
            let (l1, l2) = (level(&inst.matrix, tol)?, level(&inv, tol)?);
            if l1.is_recurrent() != l2.is_recurrent() {
                return Ok(fail(inst.describe(), as_bool(l1), as_bool(l2)));
            }
            ok(l1.is_recurrent())
        }
        "direct_sum_law" => {
            let a = mixed_instance(rng, 1, 3);
            let b = mixed_instance(rng, 1, 3);
            let desc = format!("{} ⊕ {}", a.describe(), b.describe());
            let va = classify_complex(&a.matrix, tol)?;
            let vb = classify_complex(&b.matrix, tol)?;
            let vs = classify_complex(&a.matrix.direct_sum(&b.matrix), tol)?;
            let expected = meet_verdicts(&va, &vb).level;
            if vs.level.is_recurrent() && !(va.level.is_recurrent() && vb.level.is_recurrent()) {
                return Ok(fail(desc, "a summand-wise recurrent pair", format!("{} ⊕ {} = {}", va.level, vb.level, vs.level)));
            }
            if vs.level != expected {
                return Ok(fail(desc, expected.to_string(), vs.level.to_string()));
            }
            ok(vs.level.is_recurrent())
        }
        "product_recurrence_law" => {
            let inst = mixed_instance(rng, 1, 3);
            let v = classify_complex(&inst.matrix, tol)?;
            let tt = inst.matrix.direct_sum(&inst.matrix);
            let l2 = level(&tt, tol)?;
            if v.level.is_recurrent() && !l2.is_recurrent() {
                return Ok(fail(inst.describe(), "T ⊕ T recurrent", l2.to_string()));
            }
            if let (Some(w), Family::RationalRotation) = (v.witness(), inst.family) {
                let x: Vec<Complex64> = gaussian_vector(tt.dim(), rng);
                let d = vec_dist(&power_applied(&tt, &x, w[0]), &x) / vec_norm(&x);
                if d > 1e-6 {
                    return Ok(fail(inst.describe(), format!("return of T ⊕ T at n = {}", w[0]), format!("{d:e}")));
                }
            }
            ok(v.level.is_recurrent())
        }
        "contraction_law" => {
            let dim = rng.gen_range(1..=4usize);
            let (t, kind) = match i % 4 {
                0 => (random_unitary(dim, rng), "unitary"),
                1 => {
                    let s: Vec<Complex64> = (0..dim).map(|_| Complex64::new(rng.gen_range(0.5..=1.0), 0.0)).collect();
                    (random_unitary(dim, rng).matmul(&M::from_diag(&s)), "unitary times positive contraction")
                }
                2 => {
                    let u = random_unitary(dim, rng);
                    let g = M::from_rows(&(0..dim).map(|_| gaussian_vector(dim, rng)).collect::<Vec<_>>())?;
                    (u.direct_sum(&g.scale(Complex64::new(0.9 / g.norm2(), 0.0))), "unitary ⊕ strict contraction")
                }
                _ => {
                    let g = M::from_rows(&(0..dim).map(|_| gaussian_vector(dim, rng)).collect::<Vec<_>>())?;
                    (g.scale(Complex64::new(1.0 / g.norm2(), 0.0)), "gaussian scaled to norm 1")
                }
            };
            let desc = format!("#{i} {kind} dim={}", t.dim());
            let l = level(&t, tol)?;
            if l == Level::UniformlyRigid {
                for x in probe_vectors::<f64>(t.dim(), 32, 0xc0_17ac7 + i) {
                    let d = (vec_norm(&t.mul_vec(&x)) - vec_norm(&x)).abs();
                    if d > 1e-8 {
                        return Ok(fail(desc, "‖Tx‖ = ‖x‖", format!("|‖Tx‖ - ‖x‖| = {d:e}")));
                    }
                }
            }
            ok(l == Level::UniformlyRigid)
        }
        "power_bounded_law" => {
            let dim = rng.gen_range(1..=4usize);
            let inst = generate(Family::RationalRotation, dim, rng);
            let l = level(&inst.matrix, tol)?;
            if !l.is_recurrent() {
                return Ok(fail(inst.describe(), "recurrent", l.to_string()));
            }
            for k in 0..8 {
                let x: Vec<Complex64> = gaussian_vector(dim, rng);
                let rec = scan_returns(&inst.matrix, &x, 1000, 1e-6 * vec_norm(&x))?;
                if rec.eps_return_times.is_empty() {
                    return Ok(fail(inst.describe(), format!("vector {k} returns"), "no return within 1000 steps"));
                }
            }
            ok(true)
        }
        "normal_law" => {
            let dim = rng.gen_range(1..=5usize);
            let (t, _) = random_normal(rng, dim);
            let l = level(&t, tol)?;
            if l.is_recurrent() {
                let d = t.adjoint().matmul(&t).sub(&M::identity(dim)).norm2();
                if d >= 1e-8 {
                    return Ok(fail(format!("#{i} normal dim={dim}"), "‖T*T - I‖ < 1e-8", format!("{d:e}")));
                }
            }
            ok(l.is_recurrent())
        }
        "m_isometry_law" => {
            let dim = rng.gen_range(1..=5usize);
            let desc = format!("#{i} dim={dim}");
            if i % 2 == 0 {
                let u = random_unitary(dim, rng);
                for x in probe_vectors::<f64>(dim, 32, 0x15_0e7 + i) {
                    for m in [1u32, 2] {
                        let d = m_isometry_defect(&u, &x, m, 2.0).abs();
                        if d > 1e-8 {
                            return Ok(fail(desc, format!("({m},2)-defect 0"), format!("{d:e}")));
                        }
                    }
                }
                ok(true)
            } else {
                let inst = mixed_instance(rng, dim, dim);
                match structural_checks(&inst.matrix, tol) {
                    Ok(r) => ok(r.level.is_recurrent()
                        && (r.get("m_isometry(1,2)_witnessed") == Some(true) || r.get("m_isometry(2,2)_witnessed") == Some(true))),
                    Err(Error::InconsistentVerdicts(e)) => Ok(fail(inst.describe(), "unitary", e)),
                    Err(e) => Err(e),
                }
            }
        }
        "discrete_spectrum_law" => {
            let dim = rng.gen_range(1..=6usize);
            let family = if i % 2 == 0 { Family::RationalRotation } else { Family::IrrationalRotation };
            let inst = generate(family, dim, rng);
            let l = level(&inst.matrix, tol)?;
            if l != Level::UniformlyRigid {
                return Ok(fail(inst.describe(), "uniformly rigid", l.to_string()));
            }
            ok(true)
        }
        _ => Err(Error::UnknownLaw(id.to_string())),
    }
}

/// Runs `budget` seeded instances of law `law_id` in parallel. The report only
/// depends on `(law_id, budget, seed)`.
pub fn run_law(law_id: &str, budget: usize, seed: u64) -> Result<LawReport> {
    run_law_with(law_id, budget, seed, &Tolerance::default())
}

pub fn run_law_with(law_id: &str, budget: usize, seed: u64, tol: &Tolerance<f64>) -> Result<LawReport> {
    let statement = LAWS
        .iter()
        .find(|(id, _)| *id == law_id)
        .map(|(_, s)| s.to_string())
        .ok_or_else(|| Error::UnknownLaw(law_id.to_string()))?;
    tol.validate()?;
    let outcomes: Vec<Outcome> = (0..budget as u64)
        .into_par_iter()
        .map(|i| run_instance(law_id, i, &mut instance_rng(seed, i), tol))
        .collect::<Result<_>>()?;
    let mut report =
        LawReport { law_id: law_id.to_string(), statement, instances_run: budget, premise_held: 0, failures: Vec::new() };
    for o in outcomes {
        match o {
            Outcome::Pass { premise } => report.premise_held += premise as usize,
            Outcome::Fail(f) => {
                report.premise_held += 1;
                report.failures.push(f);
            }
        }
    }
    Ok(report)
}

/// Rational angle recognition at the default tolerance, exposed for callers
/// that need exact periods of generated instances.
pub fn period_of(angles: &[f64]) -> Option<u64> {
    let tol = Tolerance::<f64>::default();
    angles.iter().try_fold(1u64, |acc, &a| {
        rational_approximation(a, tol.max_denominator, tol.unimodular_eps).map(|(_, q)| acc.lcm(&q))
    })
}
