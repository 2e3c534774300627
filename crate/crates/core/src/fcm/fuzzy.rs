//! Fuzzification of causal weights into low/medium/high labels and the
//! label-wise comparison that yields the surprise set.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{ConceptId, WeightMatrix};
use crate::error::{Error, Result};
use crate::matrix::ConceptMatrix;

/// Memberships closer than this are treated as tied.
pub const TIE_EPSILON: f64 = 1e-12;

/// Degrees of membership of a magnitude in the low, medium and high sets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MembershipResult {
    pub beta: f64,
    pub theta: f64,
    pub gamma: f64,
}

/// Evaluates the three piecewise-linear membership functions at `x`.
///
/// Low is flat at 1 below 0.3 and ramps down over [0.3, 0.4); medium ramps
/// up over [0.3, 0.4), is flat on [0.4, 0.6) and ramps down over
/// [0.6, 0.7); high ramps up over [0.6, 0.7) and is flat from 0.7.
pub fn membership(x: f64) -> Result<MembershipResult> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::MembershipDomain(x));
    }
    let beta = if x < 0.3 {
        1.0
    } else if x < 0.4 {
        -10.0 * x + 4.0
    } else {
        0.0
    };
    let theta = if (0.3..0.4).contains(&x) {
        10.0 * x - 3.0
    } else if (0.4..0.6).contains(&x) {
        1.0
    } else if (0.6..0.7).contains(&x) {
        -10.0 * x + 7.0
    } else {
        0.0
    };
    let gamma = if (0.6..0.7).contains(&x) {
        10.0 * x - 6.0
    } else if x >= 0.7 {
        1.0
    } else {
        0.0
    };
    Ok(MembershipResult {
        beta: beta.clamp(0.0, 1.0),
        theta: theta.clamp(0.0, 1.0),
        gamma: gamma.clamp(0.0, 1.0),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Magnitude {
    Low,
    Medium,
    High,
}

impl Magnitude {
    fn symbol(self) -> char {
        match self {
            Magnitude::Low => 'L',
            Magnitude::Medium => 'M',
            Magnitude::High => 'H',
        }
    }
}

/// Fuzzified causal relation: no edge, or a signed magnitude class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum SignedFuzzyLabel {
    #[default]
    Zero,
    Positive(Magnitude),
    Negative(Magnitude),
}

impl SignedFuzzyLabel {
    pub fn magnitude(self) -> Option<Magnitude> {
        match self {
            SignedFuzzyLabel::Zero => None,
            SignedFuzzyLabel::Positive(m) | SignedFuzzyLabel::Negative(m) => Some(m),
        }
    }

    pub fn negated(self) -> Self {
        match self {
            SignedFuzzyLabel::Zero => SignedFuzzyLabel::Zero,
            SignedFuzzyLabel::Positive(m) => SignedFuzzyLabel::Negative(m),
            SignedFuzzyLabel::Negative(m) => SignedFuzzyLabel::Positive(m),
        }
    }
}

impl fmt::Display for SignedFuzzyLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SignedFuzzyLabel::Zero => f.write_str("0"),
            SignedFuzzyLabel::Positive(m) => write!(f, "+{}", m.symbol()),
            SignedFuzzyLabel::Negative(m) => write!(f, "-{}", m.symbol()),
        }
    }
}

impl FromStr for SignedFuzzyLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("not a fuzzy label: `{s}`"));
        if s == "0" {
            return Ok(SignedFuzzyLabel::Zero);
        }
        let mut chars = s.chars();
        let sign = chars.next().ok_or_else(bad)?;
        let magnitude = match chars.next() {
            Some('L') => Magnitude::Low,
            Some('M') => Magnitude::Medium,
            Some('H') => Magnitude::High,
            _ => return Err(bad()),
        };
        if chars.next().is_some() {
            return Err(bad());
        }
        match sign {
            '+' => Ok(SignedFuzzyLabel::Positive(magnitude)),
            '-' | '\u{2212}' => Ok(SignedFuzzyLabel::Negative(magnitude)),
            _ => Err(bad()),
        }
    }
}

impl From<SignedFuzzyLabel> for String {
    fn from(l: SignedFuzzyLabel) -> Self {
        l.to_string()
    }
}

impl TryFrom<String> for SignedFuzzyLabel {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// Labels a signed weight with its highest-membership set. A zero weight
/// is [`SignedFuzzyLabel::Zero`]; ties go to the lower set.
pub fn fuzzify_weight(w: f64) -> Result<SignedFuzzyLabel> {
    if !(-1.0..=1.0).contains(&w) {
        return Err(Error::WeightOutOfRange(w));
    }
    if w == 0.0 {
        return Ok(SignedFuzzyLabel::Zero);
    }
    let m = membership(w.abs())?;
    let mut best = (Magnitude::Low, m.beta);
    for candidate in [(Magnitude::Medium, m.theta), (Magnitude::High, m.gamma)] {
        if candidate.1 > best.1 + TIE_EPSILON {
            best = candidate;
        }
    }
    Ok(if w > 0.0 {
        SignedFuzzyLabel::Positive(best.0)
    } else {
        SignedFuzzyLabel::Negative(best.0)
    })
}

pub type FuzzifiedMatrix = ConceptMatrix<SignedFuzzyLabel>;

pub fn fuzzify_matrix(weights: &WeightMatrix) -> Result<FuzzifiedMatrix> {
    weights.try_map(|&w| fuzzify_weight(w))
}

/// An ordered concept pair whose fuzzified relation differs between the
/// learner and the companion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SurprisePair {
    pub i: ConceptId,
    pub j: ConceptId,
}

impl SurprisePair {
    pub fn new(i: u32, j: u32) -> Self {
        Self {
            i: ConceptId(i),
            j: ConceptId(j),
        }
    }
}

impl fmt::Display for SurprisePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{},{}>", self.i.0, self.j.0)
    }
}

/// Every position whose labels differ in sign, magnitude class or
/// presence. Pairs are named by the ids of `learner`.
pub fn compare_fuzzified(learner: &FuzzifiedMatrix, companion: &FuzzifiedMatrix) -> Result<BTreeSet<SurprisePair>> {
    if learner.dim() != companion.dim() {
        return Err(Error::DimensionMismatch(learner.dim(), companion.dim()));
    }
    let ids = learner.ids();
    Ok(learner
        .entries()
        .filter(|&(r, c, label)| label != companion.at(r, c))
        .map(|(r, c, _)| SurprisePair { i: ids[r], j: ids[c] })
        .collect())
}
