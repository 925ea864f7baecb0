//! Recurrence of matrices on `ℂ^d` and `ℝ^d`.
//!
//! A matrix is recurrent exactly when it is similar to a diagonal matrix with
//! unimodular entries, and in finite dimensions that already makes it
//! uniformly rigid. Everything here reduces to a clustered spectrum with
//! numerically estimated geometric multiplicities.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, vec_norm, ComplexMatrix, Svd};
use crate::scalar::{turns, Real, C};
use crate::taxonomy::{unit_circle_distance, Level, RecurrenceVerdict, Tolerance};

pub const TAG_MATRIX: &str = "matrix: recurrent iff similar to a unimodular diagonal, which is uniform rigidity";
pub const TAG_REAL_MATRIX: &str = "real matrix: recurrent iff similar to rotation blocks and entries +1/-1";

/// Eigenvalues that differ by less than this (relative to the spectral scale)
/// are merged when their eigenvectors are also nearly parallel; a defective
/// eigenvalue splits into such a cluster under rounding.
const SPLIT_RADIUS: f64 = 1e-3;
const PARALLEL_SIN: f64 = 1e-3;

/// One eigenvalue with its multiplicities.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenCluster<R> {
    pub value: C<R>,
    pub algebraic: usize,
    pub geometric: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumReport<R> {
    pub eigenvalues: Vec<C<R>>,
    pub algebraic_multiplicities: Vec<usize>,
    pub geometric_multiplicities: Vec<usize>,
    pub spectral_radius: R,
    pub all_unimodular: bool,
    pub diagonalizable: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub fragile: Vec<String>,
}

impl<R: Real> SpectrumReport<R> {
    pub fn clusters(&self) -> Vec<EigenCluster<R>> {
        (0..self.eigenvalues.len())
            .map(|i| EigenCluster {
                value: self.eigenvalues[i],
                algebraic: self.algebraic_multiplicities[i],
                geometric: self.geometric_multiplicities[i],
            })
            .collect()
    }

    /// Turn angles `arg(λ)/2π` of the distinct eigenvalues.
    pub fn angles(&self) -> Vec<R> {
        self.eigenvalues.iter().map(|&z| turns(z)).collect()
    }
}

fn find(parent: &mut [usize], i: usize) -> usize {
    let mut r = i;
    while parent[r] != r {
        r = parent[r];
    }
    let mut j = i;
    while parent[j] != r {
        let next = parent[j];
        parent[j] = r;
        j = next;
    }
    r
}

/// `sin` of the angle between two unit vectors.
fn sin_angle<R: Real>(u: &[C<R>], v: &[C<R>]) -> R {
    let ip = crate::linalg::inner(u, v).norm();
    (R::one() - (ip * ip).min(R::one())).max(R::zero()).sqrt()
}

pub fn spectrum<R: Real>(t: &ComplexMatrix<R>, tol: &Tolerance<R>) -> Result<SpectrumReport<R>> {
    tol.validate()?;
    if !t.is_finite() {
        return Err(Error::InvalidInput("matrix has non-finite entries".into()));
    }
    let n = t.dim();
    let raw = eigenvalues(t)?;
    let smax = Svd::compute(t).values[0].max(R::min_positive_value());
    let scale = raw.iter().fold(R::one(), |m, z| m.max(z.norm()));
    let threshold = tol.rank_eps * smax;

    // null direction of T - λI for every computed eigenvalue
    let null: Vec<Vec<C<R>>> = raw.iter().map(|&l| Svd::compute(&t.shifted(l)).right[n - 1].clone()).collect();

    let mut parent: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in i + 1..n {
            let d = (raw[i] - raw[j]).norm();
            let close = d <= tol.unimodular_eps;
            let split = d <= R::lit(SPLIT_RADIUS) * scale && sin_angle(&null[i], &null[j]) < R::lit(PARALLEL_SIN);
            if close || split {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[b.max(a)] = a.min(b);
                }
            }
        }
    }

    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_of: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        match root_of[r] {
            Some(g) => groups[g].push(i),
            None => {
                root_of[r] = Some(groups.len());
                groups.push(vec![i]);
            }
        }
    }

    let mut fragile = Vec::new();
    let mut values = Vec::with_capacity(groups.len());
    let mut alg = Vec::with_capacity(groups.len());
    let mut geo = Vec::with_capacity(groups.len());
    for g in &groups {
        let k = R::from_usize(g.len()).unwrap();
        let mu = g.iter().fold(C::new(R::zero(), R::zero()), |acc, &i| acc + raw[i]) / k;
        let sv = Svd::compute(&t.shifted(mu)).values;
        let rank = sv.iter().filter(|&&s| s > threshold).count();
        let mut gm = n - rank;
        let retained_min = sv.iter().copied().filter(|&s| s > threshold).fold(R::infinity(), R::min);
        let dropped_max = sv.iter().copied().filter(|&s| s <= threshold).fold(R::zero(), R::max);
        let ten = R::lit(10.0);
        if retained_min < ten * threshold || (dropped_max > threshold / ten) {
            fragile.push(format!("rank of T - ({mu})I decided within 10x of the threshold {}", threshold));
        }
        if gm == 0 {
            gm = 1;
            fragile.push(format!("T - ({mu})I numerically full rank; geometric multiplicity forced to 1"));
        }
        let dist = unit_circle_distance(mu);
        if dist > tol.unimodular_eps / ten && dist < ten * tol.unimodular_eps {
            fragile.push(format!("eigenvalue {mu} lies within 10x of the unimodular tolerance"));
        }
        values.push(mu);
        alg.push(g.len());
        geo.push(gm.min(g.len()));
    }

    let spectral_radius = values.iter().fold(R::zero(), |m, z| m.max(z.norm()));
    let all_unimodular = values.iter().all(|&z| unit_circle_distance(z) <= tol.unimodular_eps);
    let diagonalizable = alg.iter().zip(&geo).all(|(a, g)| a == g);
    Ok(SpectrumReport {
        eigenvalues: values,
        algebraic_multiplicities: alg,
        geometric_multiplicities: geo,
        spectral_radius,
        all_unimodular,
        diagonalizable,
        fragile,
    })
}

/// Verdict from an already computed spectrum.
pub fn verdict_from_spectrum<R: Real>(s: &SpectrumReport<R>, tol: &Tolerance<R>) -> RecurrenceVerdict {
    let clusters = s.clusters();
    let mut v = if let Some(c) = clusters.iter().find(|c| unit_circle_distance(c.value) > tol.unimodular_eps) {
        RecurrenceVerdict::not_recurrent(format!(
            "eigenvalue {} off the unit circle (| |λ| - 1 | = {:e})",
            c.value,
            unit_circle_distance(c.value).to_f64_lossy()
        ))
    } else if let Some(c) = clusters.iter().find(|c| c.geometric < c.algebraic) {
        RecurrenceVerdict::not_recurrent(format!(
            "eigenvalue {} is defective (algebraic multiplicity {}, geometric {})",
            c.value, c.algebraic, c.geometric
        ))
    } else {
        RecurrenceVerdict::by_theorem(Level::UniformlyRigid, TAG_MATRIX)
    };
    if v.level == Level::NotRecurrent {
        v = v.with(crate::taxonomy::Evidence::TheoremTag(TAG_MATRIX.into()));
    }
    v.fragile.extend(s.fragile.iter().cloned());
    v
}

pub fn classify_complex<R: Real>(t: &ComplexMatrix<R>, tol: &Tolerance<R>) -> Result<RecurrenceVerdict> {
    Ok(verdict_from_spectrum(&spectrum(t, tol)?, tol))
}

/// Counts of the blocks in the real normal form of a recurrent real matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RealNormalForm {
    pub rotation_blocks: usize,
    pub plus_one: usize,
    pub minus_one: usize,
}

fn real_normal_form<R: Real>(s: &SpectrumReport<R>, tol: &Tolerance<R>) -> RealNormalForm {
    let mut f = RealNormalForm { rotation_blocks: 0, plus_one: 0, minus_one: 0 };
    for c in s.clusters() {
        if c.value.im.abs() <= tol.unimodular_eps {
            if c.value.re > R::zero() {
                f.plus_one += c.algebraic;
            } else {
                f.minus_one += c.algebraic;
            }
        } else if c.value.im > R::zero() {
            f.rotation_blocks += c.algebraic;
        }
    }
    f
}

/// Classification of a real matrix through its complexification; recurrent
/// verdicts also name the real normal form.
pub fn classify_real<R: Real>(t: &ComplexMatrix<R>, tol: &Tolerance<R>) -> Result<RecurrenceVerdict> {
    if !t.is_real() {
        return Err(Error::InvalidInput("classify_real needs a real matrix".into()));
    }
    let s = spectrum(t, tol)?;
    let mut v = verdict_from_spectrum(&s, tol);
    if v.level == Level::UniformlyRigid {
        let f = real_normal_form(&s, tol);
        v = v.with(crate::taxonomy::Evidence::TheoremTag(TAG_REAL_MATRIX.into())).with(
            crate::taxonomy::Evidence::TheoremTag(format!(
                "real normal form: {} rotation block(s), {} entries +1, {} entries -1",
                f.rotation_blocks, f.plus_one, f.minus_one
            )),
        );
    }
    Ok(v)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionCheck<R> {
    pub tag: &'static str,
    pub passed: bool,
    pub witness: Option<C<R>>,
}

/// Spectral necessary conditions for recurrence, rigidity and uniform
/// rigidity, each with the eigenvalue that decides it.
pub fn necessary_conditions<R: Real>(t: &ComplexMatrix<R>, tol: &Tolerance<R>) -> Result<Vec<ConditionCheck<R>>> {
    let s = spectrum(t, tol)?;
    Ok(conditions_from_spectrum(&s, tol))
}

pub fn conditions_from_spectrum<R: Real>(s: &SpectrumReport<R>, tol: &Tolerance<R>) -> Vec<ConditionCheck<R>> {
    let largest = s.eigenvalues.iter().copied().fold(None, |best: Option<C<R>>, z| match best {
        Some(b) if b.norm() >= z.norm() => Some(b),
        _ => Some(z),
    });
    let off = s.eigenvalues.iter().copied().find(|&z| unit_circle_distance(z) > tol.unimodular_eps);
    let radius_ok = s.spectral_radius >= R::one() - tol.unimodular_eps;
    let circle_ok = off.is_none();
    let rec_ok = radius_ok && circle_ok;
    let disk_ok = s.spectral_radius <= R::one() + tol.unimodular_eps;
    let rigid_witness = if !disk_ok || !radius_ok { largest } else { off };
    vec![
        ConditionCheck {
            tag: "recurrence: spectral radius at least 1",
            passed: radius_ok,
            witness: if radius_ok { None } else { largest },
        },
        ConditionCheck { tag: "recurrence: every spectral component meets the circle", passed: circle_ok, witness: off },
        ConditionCheck {
            tag: "rigidity: recurrent with spectrum in the closed disk",
            passed: rec_ok && disk_ok,
            witness: if rec_ok && disk_ok { None } else { rigid_witness },
        },
        ConditionCheck { tag: "uniform rigidity: spectrum on the circle", passed: circle_ok, witness: off },
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructuralCheck {
    pub tag: String,
    pub holds: bool,
    /// The quantity compared against the tolerance.
    pub measure: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructuralReport {
    pub level: Level,
    pub checks: Vec<StructuralCheck>,
}

impl StructuralReport {
    pub fn get(&self, tag: &str) -> Option<bool> {
        self.checks.iter().find(|c| c.tag == tag).map(|c| c.holds)
    }
}

pub const ENSEMBLE_SIZE: usize = 64;
const ENSEMBLE_SEED: u64 = 0x5eed_0f0b_b175;

/// Deterministic unit vectors used by the ensemble-witnessed checks.
pub fn probe_vectors<R: Real>(dim: usize, count: usize, seed: u64) -> Vec<Vec<C<R>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let v: Vec<C<R>> = (0..dim)
                .map(|_| {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    C::new(R::lit(re), R::lit(im))
                })
                .collect();
            let n = vec_norm(&v);
            v.into_iter().map(|z| z / n).collect()
        })
        .collect()
}

fn binomial(m: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (m - i) as f64 / (i + 1) as f64)
}

/// `Σ_k (-1)^{m-k} C(m,k) ‖T^k x‖^p`, evaluated in `f64`.
pub fn m_isometry_defect<R: Real>(t: &ComplexMatrix<R>, x: &[C<R>], m: u32, p: f64) -> f64 {
    let mut y = x.to_vec();
    let mut sum = 0.0;
    for k in 0..=m {
        let sign = if (m - k) % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * binomial(m, k) * vec_norm(&y).to_f64_lossy().powf(p);
        y = t.mul_vec(&y);
    }
    sum
}

/// Finite-dimensional structural checks and the implications between them
/// and the recurrence verdict.
///
/// Comparisons use `10·unimodular_eps·max(1, ‖T‖²)` as slack. Normal,
/// hyponormal, contractive and (m,p)-isometric recurrent matrices must be
/// unitary; a violation means the tolerances are inconsistent and is returned
/// as [`Error::InconsistentVerdicts`].
pub fn structural_checks<R: Real>(t: &ComplexMatrix<R>, tol: &Tolerance<R>) -> Result<StructuralReport> {
    let level = classify_complex(t, tol)?.level;
    let n = t.dim();
    let norm = t.norm2();
    let slack = R::lit(10.0) * tol.unimodular_eps * norm.max(R::one()).powi(2);
    let slack_f = slack.to_f64_lossy();
    let adj = t.adjoint();
    let tt = adj.matmul(t);

    let normal_defect = tt.sub(&t.matmul(&adj)).frobenius_norm();
    let unitary_defect = tt.sub(&ComplexMatrix::identity(n)).frobenius_norm();

    let probes = probe_vectors::<R>(n, ENSEMBLE_SIZE, ENSEMBLE_SEED);
    let hypo_excess = probes
        .iter()
        .map(|h| (vec_norm(&adj.mul_vec(h)) - vec_norm(&t.mul_vec(h))).to_f64_lossy())
        .fold(f64::NEG_INFINITY, f64::max);

    // sup_{n ≤ 256} ‖T^n‖ against ten times max_{n ≤ 16} ‖T^n‖
    let mut power = t.clone();
    let mut early = R::zero();
    let mut sup = R::zero();
    for k in 1..=256u32 {
        let nk = power.norm2();
        if !nk.is_finite() {
            sup = R::infinity();
            break;
        }
        if k <= 16 {
            early = early.max(nk);
        }
        sup = sup.max(nk);
        power = power.matmul(t);
    }
    let pb_ratio = if early > R::zero() { (sup / early).to_f64_lossy() } else { 0.0 };

    let m_defect = |m: u32, p: f64| probes.iter().map(|x| m_isometry_defect(t, x, m, p).abs()).fold(0.0, f64::max);
    let m12 = m_defect(1, 2.0);
    let m22 = m_defect(2, 2.0);

    let checks = vec![
        StructuralCheck { tag: "normal".into(), holds: normal_defect <= slack, measure: normal_defect.to_f64_lossy() },
        StructuralCheck { tag: "hyponormal_witnessed".into(), holds: hypo_excess <= slack_f, measure: hypo_excess },
        StructuralCheck { tag: "unitary".into(), holds: unitary_defect <= slack, measure: unitary_defect.to_f64_lossy() },
        StructuralCheck { tag: "contraction".into(), holds: norm <= R::one() + slack, measure: norm.to_f64_lossy() },
        StructuralCheck { tag: "power_bounded_witnessed".into(), holds: pb_ratio <= 10.0, measure: pb_ratio },
        StructuralCheck { tag: "m_isometry(1,2)_witnessed".into(), holds: m12 <= slack_f, measure: m12 },
        StructuralCheck { tag: "m_isometry(2,2)_witnessed".into(), holds: m22 <= slack_f, measure: m22 },
    ];
    let report = StructuralReport { level, checks };

    if level.is_recurrent() && report.get("unitary") != Some(true) {
        for premise in ["normal", "hyponormal_witnessed", "contraction", "m_isometry(1,2)_witnessed", "m_isometry(2,2)_witnessed"] {
            if report.get(premise) == Some(true) {
                return Err(Error::InconsistentVerdicts(format!(
                    "{premise} and recurrent but not unitary (‖T*T - I‖ = {:e})",
                    unitary_defect.to_f64_lossy()
                )));
            }
        }
    }
    Ok(report)
}
