//! Recurrence-class lattice, tolerance policy and the numeric primitives every
//! classifier shares.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Real, C};

/// Numerical slack used by every decision in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance<R> {
    /// Slack on `| |λ| - 1 |` when deciding that a number lies on the unit circle.
    pub unimodular_eps: R,
    /// Distance below which an orbit point counts as a return.
    pub return_eps: R,
    /// Relative singular-value threshold (times the largest singular value).
    pub rank_eps: R,
    /// Largest denominator tried when recognising rational angles.
    pub max_denominator: u64,
}

impl<R: Real> Default for Tolerance<R> {
    fn default() -> Self {
        Self {
            unimodular_eps: R::lit(1e-9),
            return_eps: R::lit(1e-6),
            rank_eps: R::lit(1e-9),
            max_denominator: 10_000,
        }
    }
}

impl<R: Real> Tolerance<R> {
    pub fn validate(&self) -> Result<()> {
        let ok = |x: R| x.is_finite() && x > R::zero();
        if !ok(self.unimodular_eps) || !ok(self.return_eps) || !ok(self.rank_eps) {
            return Err(Error::InvalidInput("tolerances must be finite and strictly positive".into()));
        }
        if self.max_denominator == 0 {
            return Err(Error::InvalidInput("max_denominator must be at least 1".into()));
        }
        Ok(())
    }
}

/// Recurrence levels, ordered `NotRecurrent < Recurrent < Rigid < UniformlyRigid`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Level {
    NotRecurrent,
    Recurrent,
    Rigid,
    UniformlyRigid,
}

impl Level {
    pub fn is_recurrent(self) -> bool {
        self >= Level::Recurrent
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Level::NotRecurrent => "not recurrent",
            Level::Recurrent => "recurrent",
            Level::Rigid => "rigid",
            Level::UniformlyRigid => "uniformly rigid",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Evidence {
    /// Strictly increasing return times witnessing the claimed level.
    WitnessSequence(Vec<u64>),
    /// A necessary condition that fails.
    ViolatedCondition(String),
    /// The characterization theorem the verdict rests on.
    TheoremTag(String),
}

/// A level together with the evidence that supports it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecurrenceVerdict {
    pub level: Level,
    pub evidence: Vec<Evidence>,
    /// Decisions taken within a tolerance band of the boundary.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fragile: Vec<String>,
}

impl RecurrenceVerdict {
    pub fn new(level: Level, evidence: Evidence) -> Self {
        Self { level, evidence: vec![evidence], fragile: Vec::new() }
    }

    pub fn not_recurrent(condition: impl Into<String>) -> Self {
        Self::new(Level::NotRecurrent, Evidence::ViolatedCondition(condition.into()))
    }

    pub fn by_theorem(level: Level, tag: impl Into<String>) -> Self {
        Self::new(level, Evidence::TheoremTag(tag.into()))
    }

    pub fn with(mut self, evidence: Evidence) -> Self {
        self.evidence.push(evidence);
        self
    }

    pub fn with_witness(self, terms: Vec<u64>) -> Self {
        debug_assert!(terms.windows(2).all(|w| w[0] < w[1]));
        self.with(Evidence::WitnessSequence(terms))
    }

    pub fn mark_fragile(mut self, note: impl Into<String>) -> Self {
        self.fragile.push(note.into());
        self
    }

    pub fn is_fragile(&self) -> bool {
        !self.fragile.is_empty()
    }

    pub fn witness(&self) -> Option<&[u64]> {
        self.evidence.iter().find_map(|e| match e {
            Evidence::WitnessSequence(w) => Some(w.as_slice()),
            _ => None,
        })
    }

    pub fn violated_condition(&self) -> Option<&str> {
        self.evidence.iter().find_map(|e| match e {
            Evidence::ViolatedCondition(c) => Some(c.as_str()),
            _ => None,
        })
    }
}

/// Witnessing sequence `(k_n)` with the sup-distance achieved at each term.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RigiditySequence<R> {
    pub terms: Vec<u64>,
    pub defect: Vec<R>,
}

impl<R: Real> RigiditySequence<R> {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_strictly_increasing(&self) -> bool {
        self.terms.windows(2).all(|w| w[0] < w[1])
    }

    /// CSV with header `n,term,defect`, one row per term.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,term,defect\n");
        for (i, (t, d)) in self.terms.iter().zip(&self.defect).enumerate() {
            out.push_str(&format!("{},{},{}\n", i + 1, t, d.to_f64_lossy()));
        }
        out
    }
}

/// `| |z| - 1 |`.
pub fn unit_circle_distance<R: Real>(z: C<R>) -> R {
    (z.norm() - R::one()).abs()
}

/// Chord length `|e^{2πiθ} - 1| = 2|sin πθ|`.
///
/// Evaluated through the sine so that tiny defects near integer `θ` keep
/// their relative accuracy.
pub fn chord<R: Real>(theta: R) -> R {
    let r = theta - theta.round();
    R::lit(2.0) * (R::PI() * r).sin().abs()
}

/// Lattice meet: the lower of the two levels, evidence concatenated.
pub fn meet_verdicts(v1: &RecurrenceVerdict, v2: &RecurrenceVerdict) -> RecurrenceVerdict {
    let mut evidence = v1.evidence.clone();
    evidence.extend(v2.evidence.iter().cloned());
    let mut fragile = v1.fragile.clone();
    fragile.extend(v2.fragile.iter().cloned());
    RecurrenceVerdict { level: v1.level.min(v2.level), evidence, fragile }
}
