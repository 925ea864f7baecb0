//! Composition operators `f ↦ f∘φ` on `C([0,1])`, `H(ℂ)`, `H(ℂ*)`, `H(𝔻)` and
//! `H²(𝔻)`, with the fixed-point taxonomy of linear fractional self-maps of
//! the disk.

use serde::{Deserialize, Serialize};

use crate::diophantine::rational_approximation;
use crate::error::{Error, Result};
use crate::scalar::{cone, czero, turns, unit_phase, Real, C};
use crate::sequence::{build_rigidity_sequence, multiples, AngleSequence, WITNESS_COUNT};
use crate::taxonomy::{chord, unit_circle_distance, Evidence, Level, RecurrenceVerdict, Tolerance};

pub const TAG_HD: &str = "H(D): recurrent iff univalent without interior fixed point, or an elliptic automorphism; rigid iff elliptic automorphism";
pub const TAG_H2: &str = "H2: recurrent iff hyperbolic without interior fixed point, parabolic automorphism or elliptic automorphism; uniformly rigid iff conjugate to a rational rotation";
pub const TAG_ENTIRE: &str = "H(C): recurrent iff φ(z) = az + b with |a| = 1; rigid iff additionally a != 1 or φ = id";
pub const TAG_PUNCTURED: &str = "H(C*): recurrent iff φ(z) = az with |a| = 1 or φ(z) = a/z";
pub const TAG_INTERVAL: &str = "C([0,1]): recurrent iff φ(x) = x or φ(x) = 1 - x";
pub const TAG_NEVER_UNIFORM: &str = "uniform rigidity is not asserted on Fréchet spaces";

pub const BOUNDARY_GRID: usize = 4096;
pub const MIN_INTERVAL_GRID: usize = 16;

/// `φ(z) = (az + b)/(cz + d)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFractionalMap<R> {
    pub a: C<R>,
    pub b: C<R>,
    pub c: C<R>,
    pub d: C<R>,
}

impl<R: Real> LinearFractionalMap<R> {
    pub fn new(a: C<R>, b: C<R>, c: C<R>, d: C<R>) -> Self {
        Self { a, b, c, d }
    }

    pub fn identity() -> Self {
        Self::new(cone(), czero(), czero(), cone())
    }

    /// `z ↦ λz`.
    pub fn rotation(lambda: C<R>) -> Self {
        Self::new(lambda, czero(), czero(), cone())
    }

    pub fn det(&self) -> C<R> {
        self.a * self.d - self.b * self.c
    }

    fn scale(&self) -> R {
        [self.a, self.b, self.c, self.d].iter().fold(R::zero(), |m, z| m.max(z.norm()))
    }

    pub fn is_finite(&self) -> bool {
        [self.a, self.b, self.c, self.d].iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `None` at the pole.
    pub fn eval(&self, z: C<R>) -> Option<C<R>> {
        let den = self.c * z + self.d;
        if den == czero() {
            None
        } else {
            Some((self.a * z + self.b) / den)
        }
    }

    /// `φ'(z) = (ad - bc)/(cz + d)²`.
    pub fn derivative(&self, z: C<R>) -> C<R> {
        let den = self.c * z + self.d;
        self.det() / (den * den)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        Self::new(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )
    }

    /// Same map with `ad - bc = 1`.
    pub fn normalized(&self) -> Self {
        let s = self.det().sqrt();
        if s == czero() {
            return *self;
        }
        Self::new(self.a / s, self.b / s, self.c / s, self.d / s)
    }

    pub fn is_degenerate(&self, tol: &Tolerance<R>) -> bool {
        let sc = self.scale();
        sc == R::zero() || self.det().norm() <= tol.rank_eps * sc * sc
    }
}

/// `n`-th iterate through powers of the coefficient matrix, renormalized to
/// unit determinant after every product.
pub fn iterate_lfm<R: Real>(phi: &LinearFractionalMap<R>, n: u64) -> LinearFractionalMap<R> {
    let mut result = LinearFractionalMap::identity();
    let mut base = phi.normalized();
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            result = result.compose(&base).normalized();
        }
        e >>= 1;
        if e > 0 {
            base = base.compose(&base).normalized();
        }
    }
    result
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "taxon", rename_all = "snake_case")]
pub enum LfmTaxon<R> {
    Parabolic {
        automorphism: bool,
        fixed_point: C<R>,
    },
    HyperbolicBoundary {
        attractive: C<R>,
        /// `None` stands for the point at infinity.
        other: Option<C<R>>,
        automorphism: bool,
    },
    InteriorAttractive {
        fixed_point: C<R>,
    },
    EllipticAutomorphism {
        interior_fp: C<R>,
        multiplier: C<R>,
    },
}

impl<R> LfmTaxon<R> {
    pub fn name(&self) -> &'static str {
        match self {
            LfmTaxon::Parabolic { .. } => "parabolic",
            LfmTaxon::HyperbolicBoundary { .. } => "hyperbolic_boundary",
            LfmTaxon::InteriorAttractive { .. } => "interior_attractive",
            LfmTaxon::EllipticAutomorphism { .. } => "elliptic_automorphism",
        }
    }

    pub fn is_automorphism(&self) -> bool {
        match self {
            LfmTaxon::Parabolic { automorphism, .. } | LfmTaxon::HyperbolicBoundary { automorphism, .. } => {
                *automorphism
            }
            LfmTaxon::InteriorAttractive { .. } => false,
            LfmTaxon::EllipticAutomorphism { .. } => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LfmClassification<R> {
    pub taxon: LfmTaxon<R>,
    pub boundary_max: R,
    pub boundary_min: R,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub fragile: Vec<String>,
}

/// Extremes of `|φ|` on the unit circle: a uniform grid, then a local
/// golden-section refinement around the extreme grid points.
fn boundary_extremes<R: Real>(phi: &LinearFractionalMap<R>) -> Option<(R, R)> {
    let n = BOUNDARY_GRID;
    let modulus = |t: R| phi.eval(unit_phase(t)).map(|w| w.norm());
    let mut vals = Vec::with_capacity(n);
    for k in 0..n {
        let t = R::from_usize(k).unwrap() / R::from_usize(n).unwrap();
        let m = modulus(t)?;
        if !m.is_finite() {
            return None;
        }
        vals.push(m);
    }
    let h = R::one() / R::from_usize(n).unwrap();
    let (imax, _) = vals.iter().enumerate().fold((0, R::neg_infinity()), |b, (i, &v)| if v > b.1 { (i, v) } else { b });
    let (imin, _) = vals.iter().enumerate().fold((0, R::infinity()), |b, (i, &v)| if v < b.1 { (i, v) } else { b });
    let refine = |center: usize, sign: R| -> Option<R> {
        let c = R::from_usize(center).unwrap() * h;
        let (mut lo, mut hi) = (c - h, c + h);
        let g = R::lit(0.618_033_988_749_894_9);
        let f = |t: R| modulus(t).map(|m| m * sign);
        for _ in 0..60 {
            let x1 = hi - g * (hi - lo);
            let x2 = lo + g * (hi - lo);
            if f(x1)? > f(x2)? {
                hi = x2;
            } else {
                lo = x1;
            }
        }
        modulus((lo + hi) / R::lit(2.0))
    };
    let max = vals[imax].max(refine(imax, R::one())?);
    let min = vals[imin].min(refine(imin, -R::one())?);
    Some((max, min))
}

fn check_fixed<R: Real>(phi: &LinearFractionalMap<R>, z: C<R>) -> Result<()> {
    let w = phi.eval(z).ok_or_else(|| Error::CertificationFailure(format!("fixed point {z} is a pole")))?;
    let slack = R::lit(1e-10).max(R::epsilon() * R::lit(1e3)) * z.norm().max(R::one());
    if (w - z).norm() > slack {
        return Err(Error::CertificationFailure(format!("|φ({z}) - {z}| = {} exceeds {slack}", (w - z).norm())));
    }
    Ok(())
}

/// Fixed-point taxonomy of a linear fractional self-map of the disk.
pub fn classify_lfm<R: Real>(phi: &LinearFractionalMap<R>, tol: &Tolerance<R>) -> Result<LfmClassification<R>> {
    tol.validate()?;
    if !phi.is_finite() {
        return Err(Error::InvalidInput("coefficients must be finite".into()));
    }
    if phi.is_degenerate(tol) {
        return Err(Error::DegenerateMap);
    }
    let p = phi.normalized();
    let eps = tol.unimodular_eps;
    let mut fragile = Vec::new();

    // self-map test
    if p.c != czero() && p.d.norm() <= p.c.norm() {
        return Err(Error::NotSelfMap(format!("pole {} lies in the closed disk", -p.d / p.c)));
    }
    let at0 = p.eval(czero()).ok_or_else(|| Error::NotSelfMap("pole at 0".into()))?;
    if at0.norm() >= R::one() {
        return Err(Error::NotSelfMap(format!("|φ(0)| = {} >= 1", at0.norm())));
    }
    let (bmax, bmin) = boundary_extremes(&p).ok_or_else(|| Error::NotSelfMap("pole on the unit circle".into()))?;
    if bmax > R::one() + eps {
        return Err(Error::NotSelfMap(format!("max |φ| on the circle is {bmax}")));
    }
    let automorphism = bmin >= R::one() - eps;
    let band = eps.sqrt();

    // identity
    let is_id = (p.a - p.d).norm() <= eps && p.b.norm() <= eps && p.c.norm() <= eps;
    let taxon = if is_id {
        LfmTaxon::EllipticAutomorphism { interior_fp: czero(), multiplier: cone() }
    } else {
        // fixed points: c z² + (d - a) z - b = 0
        let (roots, double): (Vec<Option<C<R>>>, bool) = if p.c.norm() <= eps * p.scale() {
            // affine: z ↦ (a/d) z + b/d, with ∞ fixed
            let k = p.a / p.d;
            if (k - cone()).norm() <= eps {
                (vec![None, None], true)
            } else {
                (vec![Some((p.b / p.d) / (cone::<R>() - k)), None], false)
            }
        } else {
            let disc = (p.d - p.a) * (p.d - p.a) + p.b * p.c * R::lit(4.0);
            let scale = (p.a.norm() + p.d.norm()).powi(2).max(R::min_positive_value());
            let rel = disc.norm() / scale;
            let two_c = p.c * R::lit(2.0);
            if rel < eps {
                if rel >= eps / R::lit(10.0) {
                    fragile.push(format!("parabolic by a discriminant of relative size {:e}", rel.to_f64_lossy()));
                }
                (vec![Some((p.a - p.d) / two_c)], true)
            } else {
                let s = disc.sqrt();
                (vec![Some((p.a - p.d + s) / two_c), Some((p.a - p.d - s) / two_c)], false)
            }
        };
        for z in roots.iter().flatten() {
            check_fixed(&p, *z)?;
        }
        let interior = roots.iter().flatten().copied().find(|z| z.norm() < R::one() - band);
        if let Some(z) = roots.iter().flatten().find(|z| (z.norm() - R::one()).abs() <= band * R::lit(10.0) && (z.norm() - R::one()).abs() > band / R::lit(10.0)) {
            fragile.push(format!("fixed point {z} is close to the unit circle"));
        }
        if let Some(fp) = interior {
            let m = p.derivative(fp);
            if automorphism && unit_circle_distance(m) <= band {
                LfmTaxon::EllipticAutomorphism { interior_fp: fp, multiplier: m / m.norm() }
            } else {
                LfmTaxon::InteriorAttractive { fixed_point: fp }
            }
        } else if double {
            let fp = roots[0].ok_or_else(|| Error::NotSelfMap("translation fixes only infinity".into()))?;
            LfmTaxon::Parabolic { automorphism, fixed_point: fp }
        } else {
            let mut pts: Vec<(Option<C<R>>, R)> = roots
                .iter()
                .map(|z| (*z, z.map(|w| p.derivative(w).norm()).unwrap_or_else(R::infinity)))
                .collect();
            pts.sort_by(|x, y| x.1.partial_cmp(&y.1).unwrap_or(std::cmp::Ordering::Equal));
            let attractive = pts[0].0.ok_or_else(|| Error::CertificationFailure("no finite boundary fixed point".into()))?;
            if (attractive.norm() - R::one()).abs() > band {
                return Err(Error::CertificationFailure(format!(
                    "no fixed point on the circle (closest {attractive})"
                )));
            }
            LfmTaxon::HyperbolicBoundary { attractive, other: pts[1].0, automorphism }
        }
    };
    Ok(LfmClassification { taxon, boundary_max: bmax, boundary_min: bmin, fragile })
}

/// Symbols accepted on `H(𝔻)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DiskSymbol<R> {
    Lfm(LinearFractionalMap<R>),
    /// Caller-asserted facts about a general holomorphic self-map.
    General { univalent: bool, fixed_point_free: bool },
}

fn rotation_witness<R: Real>(multiplier: C<R>, tol: &Tolerance<R>) -> Result<Vec<u64>> {
    let theta = turns(multiplier);
    if let Some((_, q)) = rational_approximation(theta, tol.max_denominator, tol.unimodular_eps) {
        return Ok(multiples(q, WITNESS_COUNT));
    }
    let seq = AngleSequence::FiniteList { angles: vec![theta], moduli: None };
    Ok(build_rigidity_sequence(&seq, WITNESS_COUNT, tol)?.terms)
}

fn with_fragile(mut v: RecurrenceVerdict, notes: &[String]) -> RecurrenceVerdict {
    v.fragile.extend(notes.iter().cloned());
    v
}

pub fn classify_composition_hd<R: Real>(symbol: &DiskSymbol<R>, tol: &Tolerance<R>) -> Result<RecurrenceVerdict> {
    match symbol {
        DiskSymbol::General { univalent, fixed_point_free } => Ok(if *univalent && *fixed_point_free {
            RecurrenceVerdict::by_theorem(Level::Recurrent, TAG_HD)
                .with(Evidence::TheoremTag("univalent and fixed-point free: hypercyclic".into()))
        } else if !*univalent {
            RecurrenceVerdict::not_recurrent("symbol is not univalent").with(Evidence::TheoremTag(TAG_HD.into()))
        } else {
            RecurrenceVerdict::not_recurrent("interior fixed point of a non-automorphism: iterates converge to it")
                .with(Evidence::TheoremTag(TAG_HD.into()))
        }),
        DiskSymbol::Lfm(phi) => {
            let cls = classify_lfm(phi, tol)?;
            let v = match cls.taxon {
                LfmTaxon::EllipticAutomorphism { multiplier, .. } => RecurrenceVerdict::by_theorem(Level::Rigid, TAG_HD)
                    .with_witness(rotation_witness(multiplier, tol)?)
                    .with(Evidence::TheoremTag(TAG_NEVER_UNIFORM.into())),
                LfmTaxon::InteriorAttractive { fixed_point } => RecurrenceVerdict::not_recurrent(format!(
                    "interior attractive fixed point {fixed_point}: only constants are orbit limits"
                ))
                .with(Evidence::TheoremTag(TAG_HD.into())),
                LfmTaxon::Parabolic { .. } | LfmTaxon::HyperbolicBoundary { .. } => {
                    RecurrenceVerdict::by_theorem(Level::Recurrent, TAG_HD).with(Evidence::TheoremTag(
                        "no interior fixed point: hereditarily hypercyclic, hence not rigid".into(),
                    ))
                }
            };
            Ok(with_fragile(v, &cls.fragile))
        }
    }
}

pub fn classify_composition_h2<R: Real>(phi: &LinearFractionalMap<R>, tol: &Tolerance<R>) -> Result<RecurrenceVerdict> {
    let cls = classify_lfm(phi, tol)?;
    let v = match cls.taxon {
        LfmTaxon::EllipticAutomorphism { multiplier, .. } => {
            let theta = turns(multiplier);
            match rational_approximation(theta, tol.max_denominator, tol.unimodular_eps) {
                Some((p, q)) => RecurrenceVerdict::by_theorem(Level::UniformlyRigid, TAG_H2)
                    .with_witness(multiples(q, WITNESS_COUNT))
                    .with(Evidence::TheoremTag(format!("multiplier angle {p}/{q}"))),
                None => RecurrenceVerdict::by_theorem(Level::Rigid, TAG_H2)
                    .with_witness(rotation_witness(multiplier, tol)?)
                    .with(Evidence::TheoremTag(format!("rationality undecided at Q = {}", tol.max_denominator))),
            }
        }
        LfmTaxon::HyperbolicBoundary { .. } => RecurrenceVerdict::by_theorem(Level::Recurrent, TAG_H2),
        LfmTaxon::Parabolic { automorphism: true, .. } => RecurrenceVerdict::by_theorem(Level::Recurrent, TAG_H2),
        LfmTaxon::Parabolic { automorphism: false, fixed_point } => RecurrenceVerdict::not_recurrent(format!(
            "parabolic non-automorphism fixing {fixed_point}: only constants can be orbit limits"
        ))
        .with(Evidence::TheoremTag(TAG_H2.into())),
        LfmTaxon::InteriorAttractive { fixed_point } => {
            RecurrenceVerdict::not_recurrent(format!("interior attractive fixed point {fixed_point}"))
                .with(Evidence::TheoremTag(TAG_H2.into()))
        }
    };
    Ok(with_fragile(v, &cls.fragile))
}

/// `‖C_φ^n f - f‖²` in `H²` for `φ(z) = λz` and the polynomial
/// `f = Σ a_m z^m`, i.e. `Σ |a_m|² |1 - λ^{mn}|²`.
///
/// Rational angles (as recognised under `tol`) are reduced exactly, so the
/// result is exactly 0 at multiples of the denominator.
pub fn verify_h2_rotation<R: Real>(lambda: C<R>, coeffs: &[C<R>], n: u64, tol: &Tolerance<R>) -> Result<R> {
    if unit_circle_distance(lambda) > tol.unimodular_eps {
        return Err(Error::InvalidInput(format!("|λ| = {} is not 1", lambda.norm())));
    }
    if coeffs.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidInput("coefficients must be finite".into()));
    }
    let theta = turns(lambda);
    let exact = rational_approximation(theta, tol.max_denominator, tol.unimodular_eps);
    let mut sum = R::zero();
    for (m, a) in coeffs.iter().enumerate() {
        let c = match exact {
            Some((p, q)) => {
                let q = q as i128;
                let r = ((m as i128 * n as i128 % q) * p as i128 % q + q) % q;
                if r == 0 {
                    R::zero()
                } else {
                    chord(R::lit(r as f64) / R::lit(q as f64))
                }
            }
            None => chord(R::from_u64(m as u64 * n).unwrap() * theta),
        };
        sum += a.norm_sqr() * c * c;
    }
    Ok(sum)
}

/// Entire symbol `φ(z) = az + b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineSymbol<R> {
    pub a: C<R>,
    pub b: C<R>,
}

pub fn classify_composition_entire<R: Real>(phi: &AffineSymbol<R>, tol: &Tolerance<R>) -> Result<RecurrenceVerdict> {
    let eps = tol.unimodular_eps;
    if unit_circle_distance(phi.a) > eps {
        return Ok(RecurrenceVerdict::not_recurrent(format!("|a| = {} is not 1", phi.a.norm()))
            .with(Evidence::TheoremTag(TAG_ENTIRE.into())));
    }
    let a_is_one = (phi.a - cone()).norm() <= eps;
    let v = if a_is_one && phi.b.norm() <= eps {
        RecurrenceVerdict::by_theorem(Level::Rigid, TAG_ENTIRE).with_witness(multiples(1, WITNESS_COUNT))
    } else if a_is_one {
        RecurrenceVerdict::by_theorem(Level::Recurrent, TAG_ENTIRE)
            .with(Evidence::TheoremTag("translation: hereditarily hypercyclic, hence not rigid".into()))
    } else {
        RecurrenceVerdict::by_theorem(Level::Rigid, TAG_ENTIRE).with_witness(rotation_witness(phi.a, tol)?)
    };
    let v = v.with(Evidence::TheoremTag(TAG_NEVER_UNIFORM.into()));
    let d = (phi.a - cone()).norm();
    Ok(if d > eps / R::lit(10.0) && d < eps * R::lit(10.0) {
        v.mark_fragile("a is within 10x of the tolerance from 1")
    } else {
        v
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "a", rename_all = "snake_case")]
pub enum PuncturedSymbol<R> {
    /// `z ↦ az`.
    Mult(C<R>),
    /// `z ↦ a/z`.
    Inv(C<R>),
}

pub fn classify_composition_punctured<R: Real>(
    phi: &PuncturedSymbol<R>,
    tol: &Tolerance<R>,
) -> Result<RecurrenceVerdict> {
    let a = match phi {
        PuncturedSymbol::Mult(a) | PuncturedSymbol::Inv(a) => *a,
    };
    if a.norm() == R::zero() || !a.re.is_finite() || !a.im.is_finite() {
        return Err(Error::InvalidInput("a must be finite and non-zero".into()));
    }
    Ok(match phi {
        PuncturedSymbol::Inv(_) => RecurrenceVerdict::by_theorem(Level::Rigid, TAG_PUNCTURED)
            .with_witness(multiples(2, WITNESS_COUNT))
            .with(Evidence::TheoremTag("C_φ² = I".into())),
        PuncturedSymbol::Mult(a) if unit_circle_distance(*a) <= tol.unimodular_eps => {
            RecurrenceVerdict::by_theorem(Level::Rigid, TAG_PUNCTURED).with_witness(rotation_witness(*a, tol)?)
        }
        PuncturedSymbol::Mult(a) => RecurrenceVerdict::not_recurrent(format!("|a| = {} is not 1", a.norm()))
            .with(Evidence::TheoremTag(TAG_PUNCTURED.into())),
    }
    .with(Evidence::TheoremTag(TAG_NEVER_UNIFORM.into())))
}

/// Continuous self-maps of `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IntervalSymbol<R> {
    Identity,
    Reflection,
    /// `φ(x) = p x + q`.
    Affine { p: R, q: R },
    Sampled { grid: Vec<R>, values: Vec<R> },
}

fn interval_rejection<R: Real>(xs: &[R], vs: &[R], tol: R) -> String {
    let n = xs.len();
    let increasing = vs.windows(2).all(|w| w[1] > w[0] + tol);
    let decreasing = vs.windows(2).all(|w| w[1] < w[0] - tol);
    if !increasing && !decreasing {
        // a continuous map that is not strictly monotone is not injective
        for i in 1..n {
            for j in 0..i {
                if (vs[i] - vs[j]).abs() <= tol {
                    return format!("not injective: φ({}) = φ({}) = {}", xs[j], xs[i], vs[i]);
                }
            }
        }
        for i in 1..n - 1 {
            if (vs[i] - vs[i - 1]) * (vs[i + 1] - vs[i]) <= R::zero() {
                return format!("not injective: φ turns at x = {}", xs[i]);
            }
        }
    }
    let lo = vs.iter().copied().fold(R::infinity(), R::min);
    let hi = vs.iter().copied().fold(R::neg_infinity(), R::max);
    if lo > tol || hi < R::one() - tol {
        return format!("not surjective: image is [{lo}, {hi}]");
    }
    let target = |x: R| if increasing { x } else { R::one() - x };
    let (i, _) = xs
        .iter()
        .zip(vs)
        .enumerate()
        .map(|(i, (&x, &v))| (i, (v - target(x)).abs()))
        .fold((0, R::zero()), |b, c| if c.1 > b.1 { c } else { b });
    let what = if increasing { "increasing but not the identity" } else { "decreasing but not the reflection" };
    format!("{what}: |φ(x0) - {}| = {} at x0 = {}", if increasing { "x0" } else { "(1 - x0)" }, (vs[i] - target(xs[i])).abs(), xs[i])
}

pub fn classify_composition_interval<R: Real>(
    phi: &IntervalSymbol<R>,
    tol: &Tolerance<R>,
) -> Result<RecurrenceVerdict> {
    let eps = tol.unimodular_eps;
    let identity = || RecurrenceVerdict::by_theorem(Level::UniformlyRigid, TAG_INTERVAL).with_witness(multiples(1, WITNESS_COUNT));
    let reflection = || {
        RecurrenceVerdict::by_theorem(Level::UniformlyRigid, TAG_INTERVAL)
            .with_witness(multiples(2, WITNESS_COUNT))
            .with(Evidence::TheoremTag("C_φ² = I".into()))
    };
    let reject = |why: String| RecurrenceVerdict::not_recurrent(why).with(Evidence::TheoremTag(TAG_INTERVAL.into()));
    match phi {
        IntervalSymbol::Identity => Ok(identity()),
        IntervalSymbol::Reflection => Ok(reflection()),
        IntervalSymbol::Affine { p, q } => {
            let (p, q) = (*p, *q);
            let (v0, v1) = (q, p + q);
            if !(p.is_finite() && q.is_finite()) {
                return Err(Error::InvalidInput("affine coefficients must be finite".into()));
            }
            if v0.min(v1) < -eps || v0.max(v1) > R::one() + eps {
                return Err(Error::InvalidInput(format!("φ(x) = {p}x + {q} does not map [0,1] into itself")));
            }
            if (p - R::one()).abs() <= eps && q.abs() <= eps {
                return Ok(identity());
            }
            if (p + R::one()).abs() <= eps && (q - R::one()).abs() <= eps {
                return Ok(reflection());
            }
            if p.abs() <= eps {
                return Ok(reject(format!("not injective: φ is the constant {q}")));
            }
            let half = R::lit(0.5);
            Ok(reject(format!(
                "not surjective: image is [{}, {}]; |φ(x0) - x0| = {} at x0 = {}",
                v0.min(v1),
                v0.max(v1),
                (p * half + q - half).abs(),
                half
            )))
        }
        IntervalSymbol::Sampled { grid, values } => {
            if grid.len() != values.len() {
                return Err(Error::InvalidInput("grid and values differ in length".into()));
            }
            if grid.len() < MIN_INTERVAL_GRID {
                return Err(Error::GridTooCoarse { got: grid.len(), need: MIN_INTERVAL_GRID });
            }
            let finite = grid.iter().chain(values).all(|x| x.is_finite());
            let inside = |x: &R| *x >= -eps && *x <= R::one() + eps;
            if !finite || !grid.iter().all(inside) || !values.iter().all(inside) {
                return Err(Error::InvalidInput("grid and values must lie in [0,1]".into()));
            }
            if !grid.windows(2).all(|w| w[1] > w[0]) {
                return Err(Error::InvalidInput("grid must be strictly increasing".into()));
            }
            let sup = |f: &dyn Fn(R) -> R| grid.iter().zip(values).map(|(&x, &v)| (v - f(x)).abs()).fold(R::zero(), R::max);
            if sup(&|x| x) <= eps {
                return Ok(identity());
            }
            if sup(&|x| R::one() - x) <= eps {
                return Ok(reflection());
            }
            Ok(reject(interval_rejection(grid, values, eps)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C<f64> {
        C::new(re, im)
    }

    fn tol() -> Tolerance<f64> {
        Tolerance::default()
    }

    #[test]
    fn rotation_is_elliptic() {
        let cls = classify_lfm(&LinearFractionalMap::rotation(c(0.0, 1.0)), &tol()).unwrap();
        match cls.taxon {
            LfmTaxon::EllipticAutomorphism { interior_fp, multiplier } => {
                assert!(interior_fp.norm() < 1e-15);
                assert!((multiplier - c(0.0, 1.0)).norm() < 1e-15);
            }
            t => panic!("{t:?}"),
        }
    }

    #[test]
    fn degenerate_and_non_self_maps() {
        let deg = LinearFractionalMap::new(c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(4.0, 0.0));
        assert_eq!(classify_lfm(&deg, &tol()).unwrap_err(), Error::DegenerateMap);
        let big = LinearFractionalMap::rotation(c(2.0, 0.0));
        assert!(matches!(classify_lfm(&big, &tol()), Err(Error::NotSelfMap(_))));
        let pole = LinearFractionalMap::new(c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.5, 0.0));
        assert!(matches!(classify_lfm(&pole, &tol()), Err(Error::NotSelfMap(_))));
    }

    #[test]
    fn iterate_rotation_four_times() {
        let it = iterate_lfm(&LinearFractionalMap::rotation(c(0.0, 1.0)), 4);
        let z = c(0.3, -0.2);
        assert!((it.eval(z).unwrap() - z).norm() < 1e-15);
    }

    #[test]
    fn h2_rotation_values() {
        let i = c(0.0, 1.0);
        assert_eq!(verify_h2_rotation(i, &[c(0.0, 0.0), c(1.0, 0.0)], 4, &tol()).unwrap(), 0.0);
        let v = verify_h2_rotation(i, &[c(0.0, 0.0), c(1.0, 0.0)], 1, &tol()).unwrap();
        assert!((v - 2.0).abs() < 1e-15);
    }

    #[test]
    fn affine_interval_rejections() {
        let v = classify_composition_interval(&IntervalSymbol::Affine { p: 0.9, q: 0.0 }, &tol()).unwrap();
        assert_eq!(v.level, Level::NotRecurrent);
        assert!(v.violated_condition().unwrap().starts_with("not surjective"));
        let v = classify_composition_interval(&IntervalSymbol::Affine { p: 0.0, q: 0.3 }, &tol()).unwrap();
        assert!(v.violated_condition().unwrap().starts_with("not injective"));
    }

    #[test]
    fn cayley_parabolic_maps() {
        let auto = LinearFractionalMap::new(c(-1.0, 2.0), c(1.0, 0.0), c(-1.0, 0.0), c(1.0, 2.0));
        match classify_lfm(&auto, &tol()).unwrap().taxon {
            LfmTaxon::Parabolic { automorphism: true, fixed_point } => assert!((fixed_point - c(1.0, 0.0)).norm() < 1e-12),
            t => panic!("{t:?}"),
        }
        let non = LinearFractionalMap::new(c(-1.0, 1.0), c(1.0, 1.0), c(-1.0, -1.0), c(1.0, 3.0));
        match classify_lfm(&non, &tol()).unwrap().taxon {
            LfmTaxon::Parabolic { automorphism: false, fixed_point } => assert!((fixed_point - c(1.0, 0.0)).norm() < 1e-12),
            t => panic!("{t:?}"),
        }
        assert_eq!(classify_composition_h2(&auto, &tol()).unwrap().level, Level::Recurrent);
        assert_eq!(classify_composition_h2(&non, &tol()).unwrap().level, Level::NotRecurrent);
    }

    #[test]
    fn hyperbolic_automorphism() {
        let phi = LinearFractionalMap::new(c(1.0, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(1.0, 0.0));
        match classify_lfm(&phi, &tol()).unwrap().taxon {
            LfmTaxon::HyperbolicBoundary { attractive, other, automorphism } => {
                assert!(automorphism);
                assert!((attractive - c(1.0, 0.0)).norm() < 1e-12);
                assert!((other.unwrap() - c(-1.0, 0.0)).norm() < 1e-12);
                assert!((phi.derivative(attractive) - c(1.0 / 3.0, 0.0)).norm() < 1e-12);
            }
            t => panic!("{t:?}"),
        }
        let half = LinearFractionalMap::new(c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(2.0, 0.0));
        match classify_lfm(&half, &tol()).unwrap().taxon {
            LfmTaxon::HyperbolicBoundary { other: None, automorphism: false, .. } => {}
            t => panic!("{t:?}"),
        }
        let contr = LinearFractionalMap::new(c(0.5, 0.0), c(0.1, 0.0), c(0.0, 0.0), c(1.0, 0.0));
        assert!(matches!(classify_lfm(&contr, &tol()).unwrap().taxon, LfmTaxon::InteriorAttractive { .. }));
    }
}
