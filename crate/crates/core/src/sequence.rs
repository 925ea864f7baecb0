//! Diagonal operators and weighted backward shifts on `c0`, `ℓ^p` and `ℓ^∞`.

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::diophantine::{find_simultaneous_return, max_chord, rational_approximation};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::scalar::{unit_phase, Real, C};
use crate::taxonomy::{chord, unit_circle_distance, Evidence, Level, RecurrenceVerdict, RigiditySequence, Tolerance};

pub const TAG_DIAGONAL_SEQ: &str = "diagonal on c0/lp: rigid iff unimodular; uniformly rigid iff liminf_n sup_k |λ_k^n - 1| = 0";
pub const TAG_DIAGONAL_LINF: &str = "diagonal on l_inf: recurrent iff uniformly rigid iff liminf_n sup_k |λ_k^n - 1| = 0";
pub const TAG_SHIFT: &str = "weighted shift: recurrent iff hypercyclic";
pub const TAG_SHIFT_NEVER_RIGID: &str = "weighted shift: never rigid, ‖B^n e_k - e_k‖ >= 1";
pub const TAG_SHIFT_LINF: &str = "l_inf: no weighted backward shift B_w or I + B_w is recurrent";
pub const TAG_I_PLUS_SHIFT: &str = "I + B_w is hypercyclic for every unilateral weight";

/// Target sup-distance for liminf witnesses.
pub const WITNESS_TARGET: f64 = 0.1;

/// Decaying angle rules `θ_k → 0`, `k ≥ 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum DecayGenerator<R> {
    /// `θ_k = scale · k^{-exponent}`, exponent > 0.
    Power { scale: R, exponent: R },
    /// `θ_k = scale · ratio^k`, 0 < ratio < 1.
    Geometric { scale: R, ratio: R },
    /// `θ_k = 1/k!`.
    InverseFactorial,
}

/// Finite presentation of the unimodular symbol `λ_k = e^{2πiθ_k}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AngleSequence<R> {
    /// Finitely many angles; `moduli` optionally scales each `λ_k`.
    FiniteList {
        angles: Vec<R>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        moduli: Option<Vec<R>>,
    },
    /// `θ_k = kθ`. Irrationality cannot be read off a float and must be
    /// asserted by the caller.
    ArithmeticFamily {
        theta: R,
        #[serde(default)]
        certified_irrational: bool,
    },
    DecayingFamily { generator: DecayGenerator<R> },
    RationalList { angles: Vec<Ratio<i64>> },
}

impl<R: Real> AngleSequence<R> {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidInput(m.to_string()));
        match self {
            AngleSequence::FiniteList { angles, moduli } => {
                if angles.is_empty() {
                    return bad("finite angle list must not be empty");
                }
                if angles.iter().any(|t| !t.is_finite()) {
                    return bad("angles must be finite");
                }
                if let Some(m) = moduli {
                    if m.len() != angles.len() {
                        return bad("moduli and angles differ in length");
                    }
                    if m.iter().any(|r| !r.is_finite() || *r < R::zero()) {
                        return bad("moduli must be finite and non-negative");
                    }
                }
            }
            AngleSequence::ArithmeticFamily { theta, .. } => {
                if !theta.is_finite() {
                    return bad("theta must be finite");
                }
            }
            AngleSequence::DecayingFamily { generator } => match generator {
                DecayGenerator::Power { scale, exponent } => {
                    if !scale.is_finite() || !exponent.is_finite() || *exponent <= R::zero() {
                        return bad("power decay needs a finite scale and a positive exponent");
                    }
                }
                DecayGenerator::Geometric { scale, ratio } => {
                    if !scale.is_finite() || !(*ratio > R::zero() && *ratio < R::one()) {
                        return bad("geometric decay needs a finite scale and a ratio in (0, 1)");
                    }
                }
                DecayGenerator::InverseFactorial => {}
            },
            AngleSequence::RationalList { angles } => {
                if angles.is_empty() {
                    return bad("rational angle list must not be empty");
                }
                if angles.iter().any(|r| *r.denom() < 1) {
                    return bad("denominators must be at least 1");
                }
            }
        }
        Ok(())
    }

    /// Number of coordinates, `None` for infinite families.
    pub fn len(&self) -> Option<usize> {
        match self {
            AngleSequence::FiniteList { angles, .. } => Some(angles.len()),
            AngleSequence::RationalList { angles } => Some(angles.len()),
            _ => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == Some(0)
    }

    /// `θ_k` for `k ≥ 1`.
    pub fn angle(&self, k: usize) -> Option<R> {
        match self {
            AngleSequence::FiniteList { angles, .. } => angles.get(k.checked_sub(1)?).copied(),
            AngleSequence::RationalList { angles } => {
                let r = angles.get(k.checked_sub(1)?)?;
                Some(R::lit(*r.numer() as f64) / R::lit(*r.denom() as f64))
            }
            AngleSequence::ArithmeticFamily { theta, .. } => Some(R::from_usize(k)? * *theta),
            AngleSequence::DecayingFamily { generator } => {
                let kr = R::from_usize(k)?;
                Some(match generator {
                    DecayGenerator::Power { scale, exponent } => *scale * kr.powf(-*exponent),
                    DecayGenerator::Geometric { scale, ratio } => *scale * ratio.powf(kr),
                    DecayGenerator::InverseFactorial => (1..=k).fold(R::one(), |acc, i| acc / R::from_usize(i).unwrap()),
                })
            }
        }
    }

    /// `|λ_k|` for `k ≥ 1`.
    pub fn modulus(&self, k: usize) -> R {
        match self {
            AngleSequence::FiniteList { moduli: Some(m), .. } => m.get(k.wrapping_sub(1)).copied().unwrap_or_else(R::one),
            _ => R::one(),
        }
    }

    pub fn symbol(&self, k: usize) -> Option<C<R>> {
        Some(unit_phase(self.angle(k)?) * self.modulus(k))
    }

    /// First coordinate whose modulus is off the circle.
    pub fn off_circle(&self, tol: &Tolerance<R>) -> Option<(usize, R)> {
        match self {
            AngleSequence::FiniteList { moduli: Some(m), .. } => m
                .iter()
                .enumerate()
                .find(|(_, &r)| (r - R::one()).abs() > tol.unimodular_eps)
                .map(|(i, &r)| (i + 1, r)),
            _ => None,
        }
    }

    /// Angles of coordinates `1..=n` (all of them for finite lists).
    fn head(&self, n: usize) -> Vec<R> {
        match self {
            AngleSequence::FiniteList { angles, .. } => angles.clone(),
            AngleSequence::RationalList { angles } => {
                angles.iter().map(|r| R::lit(*r.numer() as f64) / R::lit(*r.denom() as f64)).collect()
            }
            _ => (1..=n).filter_map(|k| self.angle(k)).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpaceTag<R> {
    C0,
    Lp(R),
    Linf,
}

impl<R: Real> SpaceTag<R> {
    /// Parses `c0`, `linf`, `l<p>` (e.g. `l2`) or `lp:<p>`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let tag = match s.as_str() {
            "c0" => SpaceTag::C0,
            "linf" | "l_inf" | "l∞" => SpaceTag::Linf,
            _ => {
                let p = s.strip_prefix("lp:").or_else(|| s.strip_prefix('l'));
                let p: f64 = p
                    .and_then(|p| p.parse().ok())
                    .ok_or_else(|| Error::InvalidInput(format!("unknown space `{s}`")))?;
                SpaceTag::Lp(R::lit(p))
            }
        };
        tag.validate()?;
        Ok(tag)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SpaceTag::Lp(p) if !(p.is_finite() && *p >= R::one()) => {
                Err(Error::InvalidInput("lp needs a finite p >= 1".into()))
            }
            _ => Ok(()),
        }
    }
}

/// Answer to "is `liminf_n sup_k |λ_k^n - 1|` zero?".
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum LiminfDecision<R> {
    /// `witness` is a time at which the sup is `sup_at_witness`; the sup can
    /// be pushed below any target along a subsequence.
    ZeroLiminf { witness: u64, sup_at_witness: R },
    /// For all large `n` the sup stays above `lower_bound`.
    PositiveLiminf { lower_bound: R, certificate: String },
    Undecidable { reason: String },
}

fn lcm_of_denominators(angles: &[Ratio<i64>]) -> u64 {
    angles.iter().fold(1u64, |acc, r| acc.lcm(&(*r.denom() as u64)))
}

/// Exact `chord(m·p/q)` through the residue `m·p mod q`.
fn rational_chord<R: Real>(r: &Ratio<i64>, m: u64) -> R {
    let q = *r.denom() as i128;
    let res = ((m as i128 * *r.numer() as i128) % q + q) % q;
    if res == 0 {
        R::zero()
    } else {
        chord(R::lit(res as f64) / R::lit(q as f64))
    }
}

pub fn decide_liminf_sup<R: Real>(seq: &AngleSequence<R>, tol: &Tolerance<R>) -> Result<LiminfDecision<R>> {
    seq.validate()?;
    tol.validate()?;
    Ok(match seq {
        AngleSequence::RationalList { angles } => {
            LiminfDecision::ZeroLiminf { witness: lcm_of_denominators(angles), sup_at_witness: R::zero() }
        }
        AngleSequence::FiniteList { angles, .. } => {
            let rationals: Option<Vec<(i64, u64)>> = angles
                .iter()
                .map(|&t| rational_approximation(t, tol.max_denominator, tol.unimodular_eps))
                .collect();
            let witness = match rationals {
                Some(r) => r.iter().fold(1u64, |acc, (_, q)| acc.lcm(q)),
                None => find_simultaneous_return(angles, R::lit(WITNESS_TARGET), 1)?,
            };
            LiminfDecision::ZeroLiminf { witness, sup_at_witness: max_chord(angles, witness) }
        }
        AngleSequence::ArithmeticFamily { theta, certified_irrational } => {
            match rational_approximation(*theta, tol.max_denominator, tol.unimodular_eps) {
                Some((_, q)) => LiminfDecision::ZeroLiminf { witness: q, sup_at_witness: R::zero() },
                None if *certified_irrational => LiminfDecision::PositiveLiminf {
                    lower_bound: R::lit(2.0),
                    certificate: "irrational θ: {k n θ} is dense mod 1, so sup_k |λ_k^n - 1| = 2 for every n".into(),
                },
                None => LiminfDecision::Undecidable {
                    reason: format!(
                        "θ = {} has no rational approximation with denominator <= {} within {:e} and is not certified irrational",
                        theta,
                        tol.max_denominator,
                        tol.unimodular_eps.to_f64_lossy()
                    ),
                },
            }
        }
        AngleSequence::DecayingFamily { generator } => match generator {
            DecayGenerator::Power { scale, exponent } if *scale != R::zero() => {
                let a = R::lit(2.0).powf(-*exponent - R::one());
                LiminfDecision::PositiveLiminf {
                    lower_bound: chord(a),
                    certificate: format!(
                        "consecutive ratios of n·θ_k are at most 2^{exponent}, so once |n·scale| >= 1/2 some k puts n·θ_k in [{}, 1/2]",
                        a
                    ),
                }
            }
            DecayGenerator::Geometric { scale, ratio } if *scale != R::zero() => {
                let a = *ratio / R::lit(2.0);
                LiminfDecision::PositiveLiminf {
                    lower_bound: chord(a),
                    certificate: format!(
                        "consecutive ratios of n·θ_k equal 1/{ratio}, so once |n·scale| >= 1/2 some k puts n·θ_k in [{a}, 1/2]"
                    ),
                }
            }
            DecayGenerator::Power { .. } | DecayGenerator::Geometric { .. } => {
                LiminfDecision::ZeroLiminf { witness: 1, sup_at_witness: R::zero() }
            }
            DecayGenerator::InverseFactorial => {
                // at n = m!, m!/k! is an integer for k <= m and at most 1/(m+1) beyond
                let m = 20u64;
                let witness = (1..=m).product::<u64>();
                LiminfDecision::ZeroLiminf { witness, sup_at_witness: chord(R::one() / R::lit((m + 1) as f64)) }
            }
        },
    })
}

/// Default length of witness sequences attached to rigid verdicts.
pub const WITNESS_COUNT: usize = 5;

pub fn classify_diagonal<R: Real>(
    seq: &AngleSequence<R>,
    space: &SpaceTag<R>,
    tol: &Tolerance<R>,
) -> Result<RecurrenceVerdict> {
    seq.validate()?;
    space.validate()?;
    let tag = match space {
        SpaceTag::Linf => TAG_DIAGONAL_LINF,
        _ => TAG_DIAGONAL_SEQ,
    };
    if let Some((k, r)) = seq.off_circle(tol) {
        return Ok(RecurrenceVerdict::not_recurrent(format!("|λ_{k}| = {r} is not unimodular"))
            .with(Evidence::TheoremTag(tag.into())));
    }
    Ok(match decide_liminf_sup(seq, tol)? {
        LiminfDecision::ZeroLiminf { witness, sup_at_witness } => RecurrenceVerdict::by_theorem(Level::UniformlyRigid, tag)
            .with_witness(uniform_witness(seq, witness, sup_at_witness, tol)?),
        LiminfDecision::PositiveLiminf { certificate, .. } => match space {
            SpaceTag::Linf => RecurrenceVerdict::not_recurrent(format!("liminf_n sup_k |λ_k^n - 1| > 0: {certificate}"))
                .with(Evidence::TheoremTag(tag.into())),
            _ => RecurrenceVerdict::by_theorem(Level::Rigid, tag)
                .with_witness(build_rigidity_sequence(seq, WITNESS_COUNT, tol)?.terms)
                .with(Evidence::ViolatedCondition(format!("not uniformly rigid: {certificate}"))),
        },
        LiminfDecision::Undecidable { reason } => return Err(Error::Undecidable(reason)),
    })
}

/// Witness terms for a uniformly rigid diagonal: multiples of an exact
/// period, the certified rigidity sequence of a finite list, or factorials
/// for the inverse-factorial family.
pub fn uniform_witness<R: Real>(seq: &AngleSequence<R>, witness: u64, sup_at_witness: R, tol: &Tolerance<R>) -> Result<Vec<u64>> {
    if sup_at_witness == R::zero() {
        return Ok(multiples(witness, WITNESS_COUNT));
    }
    match seq {
        AngleSequence::DecayingFamily { generator: DecayGenerator::InverseFactorial } => {
            Ok((16..=20u64).map(|m| (1..=m).product()).collect())
        }
        _ => Ok(build_rigidity_sequence(seq, WITNESS_COUNT, tol)?.terms),
    }
}

/// `w, 2w, ..., count·w`.
pub fn multiples(w: u64, count: usize) -> Vec<u64> {
    (1..=count as u64).map(|i| i * w.max(1)).collect()
}

/// Builds `ρ_1 < ρ_2 < ...` with `max_j chord(ρ_n θ_j) < 1/n`; `j` runs over
/// the whole list for finite presentations and over `j ≤ n` otherwise. Every
/// term is re-certified before it is emitted.
pub fn build_rigidity_sequence<R: Real>(
    seq: &AngleSequence<R>,
    count: usize,
    tol: &Tolerance<R>,
) -> Result<RigiditySequence<R>> {
    seq.validate()?;
    if count == 0 {
        return Err(Error::InvalidInput("count must be at least 1".into()));
    }
    if let Some((k, r)) = seq.off_circle(tol) {
        return Err(Error::InvalidInput(format!("|λ_{k}| = {r} is not unimodular")));
    }
    let mut terms = Vec::with_capacity(count);
    let mut defect = Vec::with_capacity(count);
    let mut prev = 0u64;
    for n in 1..=count {
        let delta = R::one() / R::from_usize(n).unwrap();
        let (m, d) = match seq {
            AngleSequence::RationalList { angles } => {
                let sup = |m: u64| angles.iter().map(|r| rational_chord::<R>(r, m)).fold(R::zero(), R::max);
                let m = (prev + 1..).find(|&m| sup(m) < delta).expect("multiples of the lcm always qualify");
                (m, sup(m))
            }
            _ => {
                let angles = seq.head(n);
                let m = find_simultaneous_return(&angles, delta, prev + 1)?;
                (m, max_chord(&angles, m))
            }
        };
        if !(d < delta) || m <= prev {
            return Err(Error::CertificationFailure(format!("term {n}: m = {m} has defect {d} >= 1/{n}")));
        }
        terms.push(m);
        defect.push(d);
        prev = m;
    }
    Ok(RigiditySequence { terms, defect })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShiftKind {
    Unilateral,
    Bilateral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShiftVariant {
    #[serde(rename = "b_w")]
    Bw,
    #[serde(rename = "i_plus_b_w")]
    IPlusBw,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum TailRule<R> {
    Constant { value: R },
    Periodic { pattern: Vec<R> },
}

impl<R: Real> TailRule<R> {
    fn pattern(&self) -> &[R] {
        match self {
            TailRule::Constant { value } => std::slice::from_ref(value),
            TailRule::Periodic { pattern } => pattern,
        }
    }
}

/// Weights `w_k` of `B e_k = w_k e_{k-1}`: an explicit window starting at
/// index `start` followed by a constant or periodic tail on each side.
/// Unilateral shifts live on `e_0, e_1, ...` with `start = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightSequence<R> {
    pub kind: ShiftKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<i64>,
    #[serde(default)]
    pub window: Vec<R>,
    pub right_tail: TailRule<R>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub left_tail: Option<TailRule<R>>,
}

impl<R: Real> WeightSequence<R> {
    pub fn constant(kind: ShiftKind, value: R) -> Self {
        let left_tail = match kind {
            ShiftKind::Bilateral => Some(TailRule::Constant { value }),
            ShiftKind::Unilateral => None,
        };
        Self { kind, start: None, window: Vec::new(), right_tail: TailRule::Constant { value }, left_tail }
    }

    pub fn start(&self) -> i64 {
        self.start.unwrap_or(match self.kind {
            ShiftKind::Unilateral => 1,
            ShiftKind::Bilateral => 0,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidInput(m.to_string()));
        let ok = |w: &R| w.is_finite() && *w > R::zero();
        if !self.window.iter().all(ok) {
            return bad("weights must be finite and positive");
        }
        for tail in std::iter::once(&self.right_tail).chain(self.left_tail.as_ref()) {
            let p = tail.pattern();
            if p.is_empty() || !p.iter().all(ok) {
                return bad("tail patterns must be non-empty with finite positive weights");
            }
        }
        match self.kind {
            ShiftKind::Unilateral => {
                if self.start() != 1 {
                    return bad("unilateral weights start at index 1");
                }
                if self.left_tail.is_some() {
                    return bad("unilateral weights have no left tail");
                }
            }
            ShiftKind::Bilateral => {
                if self.left_tail.is_none() {
                    return bad("bilateral weights need a left tail");
                }
            }
        }
        Ok(())
    }

    /// `w_i`; unilateral indices below 1 have no weight.
    pub fn weight(&self, i: i64) -> Option<R> {
        let s = self.start();
        let len = self.window.len() as i64;
        if i >= s && i < s + len {
            return Some(self.window[(i - s) as usize]);
        }
        if i >= s + len {
            let p = self.right_tail.pattern();
            return Some(p[((i - s - len) as usize) % p.len()]);
        }
        let p = self.left_tail.as_ref()?.pattern();
        Some(p[((s - 1 - i) as usize) % p.len()])
    }

    pub fn sup(&self) -> R {
        let tails = std::iter::once(&self.right_tail).chain(self.left_tail.as_ref()).flat_map(|t| t.pattern().iter());
        self.window.iter().chain(tails).fold(R::zero(), |m, &w| m.max(w))
    }
}

/// Long-run behaviour of the products of a periodic tail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TailGrowth {
    /// Geometric mean above 1: products tend to infinity.
    Expanding,
    /// Geometric mean below 1: products tend to 0.
    Contracting,
    /// Pattern product exactly 1: products stay bounded above and below.
    Balanced,
    /// Geometric mean within tolerance of 1 without being exactly 1.
    Unresolved,
}

pub fn tail_growth<R: Real>(tail: &TailRule<R>, eps: R) -> TailGrowth {
    let p = tail.pattern();
    let product = p.iter().fold(R::one(), |acc, &w| acc * w);
    if product == R::one() {
        return TailGrowth::Balanced;
    }
    let mean_log = p.iter().map(|w| w.ln()).sum::<R>() / R::from_usize(p.len()).unwrap();
    if mean_log > eps {
        TailGrowth::Expanding
    } else if mean_log < -eps {
        TailGrowth::Contracting
    } else {
        TailGrowth::Unresolved
    }
}

/// Salas' characterization of hypercyclic bilateral backward shifts
/// `B e_k = w_k e_{k-1}` on `c0(ℤ)` and `ℓ^p(ℤ)`:
/// `B_w` is hypercyclic iff for every `q ∈ ℤ`
/// `liminf_n max(∏_{ν=q-n+1}^{q} w_ν, ∏_{ν=q+1}^{q+n} 1/w_ν) = 0`.
/// For eventually periodic tails both products are comparable to `g_-^n` and
/// `g_+^{-n}` (geometric means of the left and right patterns), so the
/// condition reads `g_- < 1 < g_+`. The unilateral case is
/// `sup_n ∏_{i=1}^n w_i = ∞`, i.e. `g_+ > 1`.
#[derive(Debug, Clone, Copy, Default)]
pub struct SalasCriterion;

#[derive(Debug, Clone, PartialEq)]
pub enum CriterionOutcome {
    Hypercyclic(String),
    NotHypercyclic(String),
    Unresolved(String),
}

impl SalasCriterion {
    pub fn decide<R: Real>(&self, w: &WeightSequence<R>, eps: R) -> CriterionOutcome {
        let right = tail_growth(&w.right_tail, eps);
        match w.kind {
            ShiftKind::Unilateral => match right {
                TailGrowth::Expanding => CriterionOutcome::Hypercyclic("sup_n ∏_{i<=n} w_i = ∞ (tail geometric mean > 1)".into()),
                TailGrowth::Contracting | TailGrowth::Balanced => {
                    CriterionOutcome::NotHypercyclic("sup_n ∏_{i<=n} w_i < ∞ (tail geometric mean <= 1)".into())
                }
                TailGrowth::Unresolved => {
                    CriterionOutcome::Unresolved("tail geometric mean is within tolerance of 1".into())
                }
            },
            ShiftKind::Bilateral => {
                let left = w.left_tail.as_ref().map(|t| tail_growth(t, eps)).unwrap_or(TailGrowth::Unresolved);
                let right_fails = matches!(right, TailGrowth::Contracting | TailGrowth::Balanced);
                let left_fails = matches!(left, TailGrowth::Expanding | TailGrowth::Balanced);
                if right == TailGrowth::Expanding && left == TailGrowth::Contracting {
                    CriterionOutcome::Hypercyclic("left geometric mean < 1 < right geometric mean".into())
                } else if right_fails {
                    CriterionOutcome::NotHypercyclic("right products ∏ 1/w_ν do not tend to 0".into())
                } else if left_fails {
                    CriterionOutcome::NotHypercyclic("left products ∏ w_ν do not tend to 0".into())
                } else {
                    CriterionOutcome::Unresolved("a tail geometric mean is within tolerance of 1".into())
                }
            }
        }
    }
}

pub fn classify_shift<R: Real>(
    w: &WeightSequence<R>,
    space: &SpaceTag<R>,
    variant: ShiftVariant,
    tol: &Tolerance<R>,
) -> Result<RecurrenceVerdict> {
    w.validate()?;
    space.validate()?;
    tol.validate()?;
    let w1 = w.weight(1).expect("index 1 always has a weight");
    if let SpaceTag::Linf = space {
        let condition = match variant {
            ShiftVariant::Bw => {
                let sup = w.sup();
                let m_star = (R::lit(5.0) * sup / w1 + R::one()).ceil();
                format!(
                    "recurrence would force some weight above w_1 (M - 1)/5 for every M; at M = 10 that is {}, and M = {} exceeds sup w = {}",
                    w1 * R::lit(9.0) / R::lit(5.0),
                    m_star,
                    sup
                )
            }
            ShiftVariant::IPlusBw => {
                let n = (R::lit(5.0) / w1).floor() + R::one();
                format!(
                    "N = {n} gives N·w_1 = {} > 5, while recurrence would force N·w_1 < 5",
                    n * w1
                )
            }
        };
        return Ok(RecurrenceVerdict::not_recurrent(condition).with(Evidence::TheoremTag(TAG_SHIFT_LINF.into())));
    }
    let recurrent = |extra: String| {
        RecurrenceVerdict::by_theorem(Level::Recurrent, TAG_SHIFT)
            .with(Evidence::TheoremTag(extra))
            .with(Evidence::TheoremTag(TAG_SHIFT_NEVER_RIGID.into()))
    };
    match (variant, w.kind) {
        (ShiftVariant::IPlusBw, ShiftKind::Unilateral) => Ok(recurrent(TAG_I_PLUS_SHIFT.into())),
        (ShiftVariant::IPlusBw, ShiftKind::Bilateral) => Err(Error::UnresolvedCriterion(
            "no hypercyclicity criterion for I + B_w with bilateral weights is implemented".into(),
        )),
        (ShiftVariant::Bw, _) => match SalasCriterion.decide(w, tol.unimodular_eps) {
            CriterionOutcome::Hypercyclic(why) => Ok(recurrent(format!("Salas criterion: {why}"))),
            CriterionOutcome::NotHypercyclic(why) => Ok(RecurrenceVerdict::not_recurrent(format!("not hypercyclic: {why}"))
                .with(Evidence::TheoremTag(TAG_SHIFT.into()))),
            CriterionOutcome::Unresolved(why) => Err(Error::UnresolvedCriterion(why)),
        },
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "operator", rename_all = "snake_case", bound(deserialize = "R: Deserialize<'de> + Default"))]
pub enum SequenceOperator<R> {
    Diagonal { symbol: AngleSequence<R> },
    Shift { weights: WeightSequence<R>, variant: ShiftVariant },
}

/// Compression to `dim` coordinates; coordinates shifted out of range are
/// dropped.
pub fn truncate<R: Real>(op: &SequenceOperator<R>, dim: usize) -> Result<ComplexMatrix<R>> {
    if dim == 0 {
        return Err(Error::InvalidInput("truncation dimension must be at least 1".into()));
    }
    match op {
        SequenceOperator::Diagonal { symbol } => {
            symbol.validate()?;
            if let Some(len) = symbol.len() {
                if dim > len {
                    return Err(Error::InvalidInput(format!("symbol has {len} coordinates, asked for {dim}")));
                }
            }
            let diag: Vec<C<R>> = (1..=dim).map(|k| symbol.symbol(k).unwrap()).collect();
            Ok(ComplexMatrix::from_diag(&diag))
        }
        SequenceOperator::Shift { weights, variant } => {
            weights.validate()?;
            let offset = match weights.kind {
                ShiftKind::Unilateral => 0i64,
                ShiftKind::Bilateral => -((dim / 2) as i64),
            };
            let mut m = ComplexMatrix::zeros(dim);
            for p in 1..dim {
                let w = weights.weight(p as i64 + offset).expect("in-range weight");
                m[(p - 1, p)] = C::new(w, R::zero());
            }
            if *variant == ShiftVariant::IPlusBw {
                m = m.add(&ComplexMatrix::identity(dim));
            }
            Ok(m)
        }
    }
}

pub fn unit_circle_ok<R: Real>(z: C<R>, tol: &Tolerance<R>) -> bool {
    unit_circle_distance(z) <= tol.unimodular_eps
}
