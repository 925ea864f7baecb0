//! Multiplication operators `f ↦ φf` on `L²(X, μ)` with atomic `μ`, on
//! `C(K)` with connected `K`, and on Hardy, Bergman, Dirichlet and Bloch
//! spaces, plus the image criterion for adjoints on `H²`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{turns, unit_phase, Real, C};
use crate::sequence::{
    build_rigidity_sequence, decide_liminf_sup, multiples, uniform_witness, AngleSequence, LiminfDecision,
    WITNESS_COUNT,
};
use crate::taxonomy::{unit_circle_distance, Evidence, Level, RecurrenceVerdict, RigiditySequence, Tolerance};

pub const TAG_L2: &str = "L2(μ): recurrent iff rigid iff φ^{k_n} -> 1 a.e.; uniformly rigid iff ‖φ^{k_n} - 1‖_∞ -> 0";
pub const TAG_CK: &str = "C(K), K connected: recurrent iff φ is a unimodular constant";
pub const TAG_ANALYTIC: &str = "Hardy/Bergman/Dirichlet/Bloch: M_φ recurrent iff φ is a unimodular constant";
pub const TAG_ADJOINT: &str = "H2: M_φ* recurrent iff hypercyclic iff φ(D) meets the unit circle; never rigid";

pub const DEFAULT_POLAR_GRID: usize = 256;
pub const MIN_GRID: usize = 16;

/// `(weight, value)`, serialized as `[weight, [re, im]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom<R>(pub R, pub C<R>);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
#[serde(bound(deserialize = "R: Deserialize<'de> + Default"))]
pub enum DiscreteMeasureSymbol<R> {
    Atoms { atoms: Vec<Atom<R>> },
    /// Countable essential range; weights of infinite families default to
    /// `2^{-k}`.
    Countable {
        range: AngleSequence<R>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        weights: Option<Vec<R>>,
    },
}

impl<R: Real> DiscreteMeasureSymbol<R> {
    pub fn validate(&self) -> Result<()> {
        let check = |w: &[R]| -> Result<()> {
            if w.iter().any(|x| !x.is_finite() || *x <= R::zero()) {
                return Err(Error::InvalidInput("atom weights must be finite and positive".into()));
            }
            Ok(())
        };
        match self {
            DiscreteMeasureSymbol::Atoms { atoms } => {
                if atoms.is_empty() {
                    return Err(Error::InvalidInput("at least one atom is required".into()));
                }
                check(&atoms.iter().map(|a| a.0).collect::<Vec<_>>())?;
                if atoms.iter().any(|a| !a.1.re.is_finite() || !a.1.im.is_finite()) {
                    return Err(Error::InvalidInput("atom values must be finite".into()));
                }
                Ok(())
            }
            DiscreteMeasureSymbol::Countable { range, weights } => {
                range.validate()?;
                if let Some(w) = weights {
                    check(w)?;
                    match range.len() {
                        Some(n) if n != w.len() => {
                            return Err(Error::InvalidInput(format!("{} weights for {n} angles", w.len())))
                        }
                        None => return Err(Error::InvalidInput("explicit weights need a finite range".into())),
                        _ => {}
                    }
                }
                Ok(())
            }
        }
    }
}

/// Sorted, de-duplicated angles in `[0, 1)` of a unimodular atom list.
pub fn canonical_angles<R: Real>(atoms: &[Atom<R>]) -> Vec<R> {
    let mut t: Vec<R> = atoms
        .iter()
        .map(|a| {
            let x = turns(a.1);
            x - x.floor()
        })
        .collect();
    t.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    t.dedup();
    t
}

fn atom_sequence<R: Real>(atoms: &[Atom<R>]) -> AngleSequence<R> {
    AngleSequence::FiniteList { angles: canonical_angles(atoms), moduli: None }
}

/// Rigidity sequence of `M_φ` on `L²(μ)`; for atom lists this is the
/// sequence of the canonical angle list.
pub fn mult_rigidity_sequence<R: Real>(
    phi: &DiscreteMeasureSymbol<R>,
    count: usize,
    tol: &Tolerance<R>,
) -> Result<RigiditySequence<R>> {
    phi.validate()?;
    match phi {
        DiscreteMeasureSymbol::Atoms { atoms } => build_rigidity_sequence(&atom_sequence(atoms), count, tol),
        DiscreteMeasureSymbol::Countable { range, .. } => build_rigidity_sequence(range, count, tol),
    }
}

pub fn classify_mult_l2<R: Real>(phi: &DiscreteMeasureSymbol<R>, tol: &Tolerance<R>) -> Result<RecurrenceVerdict> {
    phi.validate()?;
    tol.validate()?;
    match phi {
        DiscreteMeasureSymbol::Atoms { atoms } => {
            if let Some((i, a)) = atoms.iter().enumerate().find(|(_, a)| unit_circle_distance(a.1) > tol.unimodular_eps) {
                return Ok(RecurrenceVerdict::not_recurrent(format!(
                    "atom {i} of weight {} has |φ| = {}",
                    a.0,
                    a.1.norm()
                ))
                .with(Evidence::TheoremTag(TAG_L2.into())));
            }
            let seq = atom_sequence(atoms);
            match decide_liminf_sup(&seq, tol)? {
                LiminfDecision::ZeroLiminf { witness, sup_at_witness } => {
                    Ok(RecurrenceVerdict::by_theorem(Level::UniformlyRigid, TAG_L2)
                        .with_witness(uniform_witness(&seq, witness, sup_at_witness, tol)?)
                        .with(Evidence::TheoremTag("finite range: a.e. and uniform convergence coincide".into())))
                }
                _ => Err(Error::CertificationFailure("finite range without a simultaneous return".into())),
            }
        }
        DiscreteMeasureSymbol::Countable { range, .. } => {
            if let Some((k, r)) = range.off_circle(tol) {
                return Ok(RecurrenceVerdict::not_recurrent(format!("|φ| = {r} on the atom of value {k}"))
                    .with(Evidence::TheoremTag(TAG_L2.into())));
            }
            Ok(match decide_liminf_sup(range, tol)? {
                LiminfDecision::ZeroLiminf { witness, sup_at_witness } => {
                    RecurrenceVerdict::by_theorem(Level::UniformlyRigid, TAG_L2)
                        .with_witness(uniform_witness(range, witness, sup_at_witness, tol)?)
                }
                LiminfDecision::PositiveLiminf { certificate, .. } => RecurrenceVerdict::by_theorem(Level::Rigid, TAG_L2)
                    .with_witness(build_rigidity_sequence(range, WITNESS_COUNT, tol)?.terms)
                    .with(Evidence::ViolatedCondition(format!("not uniformly rigid: {certificate}"))),
                LiminfDecision::Undecidable { reason } => return Err(Error::Undecidable(reason)),
            })
        }
    }
}

/// Continuous symbol on a connected compact set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ContinuousSymbol<R> {
    Constant { c: C<R> },
    Sampled { values: Vec<C<R>> },
}

pub fn classify_mult_ck<R: Real>(phi: &ContinuousSymbol<R>, tol: &Tolerance<R>) -> Result<RecurrenceVerdict> {
    let eps = tol.unimodular_eps;
    let reject = |why: String| RecurrenceVerdict::not_recurrent(why).with(Evidence::TheoremTag(TAG_CK.into()));
    let values = match phi {
        ContinuousSymbol::Constant { c } => std::slice::from_ref(c),
        ContinuousSymbol::Sampled { values } => {
            if values.len() < MIN_GRID {
                return Err(Error::GridTooCoarse { got: values.len(), need: MIN_GRID });
            }
            values.as_slice()
        }
    };
    if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidInput("symbol values must be finite".into()));
    }
    if let Some((i, z)) = values.iter().enumerate().find(|(_, z)| unit_circle_distance(**z) > eps) {
        return Ok(reject(format!("|φ| = {} at sample {i}", z.norm())));
    }
    if let Some((i, z)) = values.iter().enumerate().find(|(_, z)| (**z - values[0]).norm() > eps) {
        return Ok(reject(format!(
            "φ takes the distinct values {} and {z} (samples 0 and {i}); on connected K the image contains an arc J and sup_J |z^k - 1| does not tend to 0",
            values[0]
        )));
    }
    Ok(constant_verdict(values[0], TAG_CK, tol))
}

fn constant_verdict<R: Real>(c: C<R>, tag: &str, tol: &Tolerance<R>) -> RecurrenceVerdict {
    let theta = turns(c);
    let seq = AngleSequence::FiniteList { angles: vec![theta - theta.floor()], moduli: None };
    let witness = decide_liminf_sup(&seq, tol)
        .ok()
        .and_then(|d| match d {
            LiminfDecision::ZeroLiminf { witness, sup_at_witness } => uniform_witness(&seq, witness, sup_at_witness, tol).ok(),
            _ => None,
        })
        .unwrap_or_else(|| multiples(1, WITNESS_COUNT));
    RecurrenceVerdict::by_theorem(Level::UniformlyRigid, tag).with_witness(witness)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AnalyticMultiplier<R> {
    Constant { c: C<R> },
    /// `Σ coeffs[m] z^m`, degree at least 1.
    Polynomial { coeffs: Vec<C<R>> },
    Sampled { values: Vec<C<R>> },
}

impl<R: Real> AnalyticMultiplier<R> {
    pub fn validate(&self) -> Result<()> {
        let finite = |v: &[C<R>]| v.iter().all(|z| z.re.is_finite() && z.im.is_finite());
        match self {
            AnalyticMultiplier::Constant { c } if !finite(std::slice::from_ref(c)) => {
                Err(Error::InvalidInput("constant must be finite".into()))
            }
            AnalyticMultiplier::Polynomial { coeffs } => {
                if !finite(coeffs) {
                    return Err(Error::InvalidInput("coefficients must be finite".into()));
                }
                if polynomial_degree(coeffs).unwrap_or(0) == 0 {
                    return Err(Error::InvalidInput("polynomial multipliers need degree at least 1".into()));
                }
                Ok(())
            }
            AnalyticMultiplier::Sampled { values } if !finite(values) || values.is_empty() => {
                Err(Error::InvalidInput("samples must be finite and non-empty".into()))
            }
            _ => Ok(()),
        }
    }
}

fn polynomial_degree<R: Real>(coeffs: &[C<R>]) -> Option<usize> {
    coeffs.iter().rposition(|z| z.norm() != R::zero())
}

fn horner<R: Real>(coeffs: &[C<R>], z: C<R>) -> C<R> {
    coeffs.iter().rev().fold(C::new(R::zero(), R::zero()), |acc, &a| acc * z + a)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "space", content = "p", rename_all = "snake_case")]
pub enum AnalyticSpace<R> {
    Hardy(R),
    Bergman(R),
    Dirichlet,
    Bloch,
}

impl<R: Real> AnalyticSpace<R> {
    /// `hardy:2`, `bergman:2`, `dirichlet`, `bloch`; a bare `hardy` means `p = 2`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let (name, p) = match s.split_once(':') {
            Some((n, p)) => (
                n.to_string(),
                Some(p.parse::<f64>().map_err(|_| Error::InvalidInput(format!("bad exponent in `{s}`")))?),
            ),
            None => (s.clone(), None),
        };
        let p = R::lit(p.unwrap_or(2.0));
        let space = match name.as_str() {
            "hardy" | "h" => AnalyticSpace::Hardy(p),
            "bergman" | "a" => AnalyticSpace::Bergman(p),
            "dirichlet" => AnalyticSpace::Dirichlet,
            "bloch" => AnalyticSpace::Bloch,
            _ => return Err(Error::InvalidInput(format!("unknown space `{s}`"))),
        };
        space.validate()?;
        Ok(space)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            AnalyticSpace::Hardy(p) | AnalyticSpace::Bergman(p) if !(p.is_finite() && *p >= R::one()) => {
                Err(Error::InvalidInput("exponent must be finite and at least 1".into()))
            }
            _ => Ok(()),
        }
    }
}

pub fn classify_mult_analytic<R: Real>(
    phi: &AnalyticMultiplier<R>,
    space: &AnalyticSpace<R>,
    tol: &Tolerance<R>,
) -> Result<RecurrenceVerdict> {
    phi.validate()?;
    space.validate()?;
    let reject = |why: String| RecurrenceVerdict::not_recurrent(why).with(Evidence::TheoremTag(TAG_ANALYTIC.into()));
    let c = match phi {
        AnalyticMultiplier::Constant { c } => *c,
        AnalyticMultiplier::Polynomial { coeffs } => {
            return Ok(reject(format!(
                "non-constant multiplier of degree {}: only unimodular constants are recurrent",
                polynomial_degree(coeffs).unwrap_or(0)
            )))
        }
        AnalyticMultiplier::Sampled { values } => {
            match values.iter().enumerate().find(|(_, z)| (**z - values[0]).norm() > tol.unimodular_eps) {
                Some((i, z)) => {
                    return Ok(reject(format!("non-constant multiplier: samples 0 and {i} give {} and {z}", values[0])))
                }
                None => values[0],
            }
        }
    };
    if unit_circle_distance(c) > tol.unimodular_eps {
        return Ok(reject(format!("|c| = {} is not 1", c.norm())));
    }
    Ok(constant_verdict(c, TAG_ANALYTIC, tol))
}

/// Recurrence of `M_φ*` on `H²` for a polynomial `φ` of degree at least 1,
/// on the default polar grid.
pub fn adjoint_mult_h2_recurrence<R: Real>(phi: &AnalyticMultiplier<R>, tol: &Tolerance<R>) -> Result<RecurrenceVerdict> {
    adjoint_mult_h2_recurrence_on_grid(phi, DEFAULT_POLAR_GRID, tol)
}

/// Samples `|φ| - 1` on radii `i/grid` and angles `j/grid`; the image meets
/// the circle when a sample is within tolerance of 0 or the sign changes.
pub fn adjoint_mult_h2_recurrence_on_grid<R: Real>(
    phi: &AnalyticMultiplier<R>,
    grid: usize,
    tol: &Tolerance<R>,
) -> Result<RecurrenceVerdict> {
    phi.validate()?;
    let coeffs = match phi {
        AnalyticMultiplier::Polynomial { coeffs } => coeffs,
        _ => return Err(Error::InvalidInput("adjoint criterion needs a polynomial symbol".into())),
    };
    if grid < MIN_GRID {
        return Err(Error::GridTooCoarse { got: grid, need: MIN_GRID });
    }
    let g = R::from_usize(grid).unwrap();
    let mut closest: Option<(R, C<R>)> = None;
    let (mut below, mut above): (Option<C<R>>, Option<C<R>>) = (None, None);
    for i in 0..grid {
        let r = R::from_usize(i).unwrap() / g;
        for j in 0..grid {
            let z = unit_phase(R::from_usize(j).unwrap() / g) * r;
            let d = horner(coeffs, z).norm() - R::one();
            if closest.is_none_or(|(m, _)| d.abs() < m) {
                closest = Some((d.abs(), z));
            }
            if d < R::zero() {
                below.get_or_insert(z);
            } else if d > R::zero() {
                above.get_or_insert(z);
            }
            if i == 0 {
                break;
            }
        }
    }
    let (gap, at) = closest.expect("grid is non-empty");
    let eps = tol.unimodular_eps;
    let v = match (below, above) {
        (Some(b), Some(a)) => RecurrenceVerdict::by_theorem(Level::Recurrent, TAG_ADJOINT).with(Evidence::TheoremTag(
            format!("|φ| - 1 changes sign between z = {b} and z = {a}"),
        )),
        _ if gap <= eps => RecurrenceVerdict::by_theorem(Level::Recurrent, TAG_ADJOINT)
            .with(Evidence::TheoremTag(format!("||φ({at})| - 1| = {gap}")))
            .mark_fragile("image touches the circle without a sign change on the grid"),
        _ => {
            let v = RecurrenceVerdict::not_recurrent(format!("||φ| - 1| >= {gap} on the grid, attained near z = {at}"))
                .with(Evidence::TheoremTag(TAG_ADJOINT.into()));
            if gap < R::lit(10.0) / g {
                v.mark_fragile("image approaches the circle within the grid resolution")
            } else {
                v
            }
        }
    };
    Ok(v)
}
