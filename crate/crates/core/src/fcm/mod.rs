//! Fuzzy cognitive maps: a concept set plus a signed causal weight matrix.
//!
//! Both the learner's self-reported understanding and the companion's
//! expert knowledge are held as an [`Fcm`]. Maps are compared structurally
//! (see [`compare_fuzzified`]); no activation dynamics are run on them.

mod fuzzy;

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::ConceptMatrix;

pub use fuzzy::{
    compare_fuzzified, fuzzify_matrix, fuzzify_weight, membership, FuzzifiedMatrix, Magnitude, MembershipResult,
    SignedFuzzyLabel, SurprisePair, TIE_EPSILON,
};

pub type WeightMatrix = ConceptMatrix<f64>;

/// 1-based concept identifier, rendered as `C<n>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ConceptId(pub u32);

impl fmt::Display for ConceptId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Concept {
    pub id: ConceptId,
    pub name: String,
}

impl Concept {
    pub fn new(id: u32, name: impl Into<String>) -> Self {
        Self {
            id: ConceptId(id),
            name: name.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub from: ConceptId,
    pub to: ConceptId,
    pub w: f64,
}

/// Wire form of an FCM: the concept list and the nonzero edges.
/// Edges that are not listed have weight 0.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FcmDocument {
    pub concepts: Vec<Concept>,
    #[serde(default)]
    pub edges: Vec<Edge>,
}

impl FcmDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::parse("fcm document", e))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    InvalidConceptId { id: u32 },
    DuplicateConceptId { id: ConceptId },
    EmptyName { id: ConceptId },
    DuplicateName { name: String },
    UnknownEndpoint { from: ConceptId, to: ConceptId },
    DuplicateEdge { from: ConceptId, to: ConceptId },
    WeightOutOfRange { from: ConceptId, to: ConceptId, w: f64 },
    NonzeroDiagonal { id: ConceptId, w: f64 },
    DimensionMismatch { concepts: usize, dim: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::InvalidConceptId { id } => write!(f, "invalid concept id {id} (ids start at 1)"),
            Violation::DuplicateConceptId { id } => write!(f, "duplicate concept id {id}"),
            Violation::EmptyName { id } => write!(f, "empty name for concept {id}"),
            Violation::DuplicateName { name } => write!(f, "duplicate concept name `{name}`"),
            Violation::UnknownEndpoint { from, to } => {
                write!(f, "edge {from} -> {to} references an unknown concept")
            }
            Violation::DuplicateEdge { from, to } => write!(f, "duplicate edge {from} -> {to}"),
            Violation::WeightOutOfRange { from, to, w } => {
                write!(f, "weight out of range: {from} -> {to} = {w}")
            }
            Violation::NonzeroDiagonal { id, w } => write!(f, "nonzero diagonal: {id} -> {id} = {w}"),
            Violation::DimensionMismatch { concepts, dim } => {
                write!(f, "matrix is {dim}x{dim} but there are {concepts} concepts")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    fn into_result(self) -> Result<()> {
        if self.is_ok() {
            Ok(())
        } else {
            Err(Error::InvalidFcm(
                self.violations.iter().map(ToString::to_string).collect(),
            ))
        }
    }
}

fn check_concepts(concepts: &[Concept], out: &mut Vec<Violation>) {
    let mut ids = HashSet::new();
    let mut names = HashSet::new();
    for c in concepts {
        if c.id.0 == 0 {
            out.push(Violation::InvalidConceptId { id: 0 });
        }
        if !ids.insert(c.id) {
            out.push(Violation::DuplicateConceptId { id: c.id });
        }
        if c.name.trim().is_empty() {
            out.push(Violation::EmptyName { id: c.id });
        } else if !names.insert(c.name.as_str()) {
            out.push(Violation::DuplicateName { name: c.name.clone() });
        }
    }
}

fn check_weight(from: ConceptId, to: ConceptId, w: f64, out: &mut Vec<Violation>) {
    if !(-1.0..=1.0).contains(&w) {
        out.push(Violation::WeightOutOfRange { from, to, w });
    }
    if from == to && w != 0.0 {
        out.push(Violation::NonzeroDiagonal { id: from, w });
    }
}

/// Checks every FCM invariant on a document and reports all violations.
pub fn validate_fcm(doc: &FcmDocument) -> ValidationReport {
    let mut violations = Vec::new();
    check_concepts(&doc.concepts, &mut violations);
    let known: HashSet<ConceptId> = doc.concepts.iter().map(|c| c.id).collect();
    let mut seen = HashSet::new();
    for e in &doc.edges {
        if !known.contains(&e.from) || !known.contains(&e.to) {
            violations.push(Violation::UnknownEndpoint { from: e.from, to: e.to });
        }
        if !seen.insert((e.from, e.to)) {
            violations.push(Violation::DuplicateEdge { from: e.from, to: e.to });
        }
        check_weight(e.from, e.to, e.w, &mut violations);
    }
    ValidationReport { violations }
}

/// A validated fuzzy cognitive map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FcmDocument", into = "FcmDocument")]
pub struct Fcm {
    concepts: Vec<Concept>,
    weights: WeightMatrix,
}

impl Fcm {
    pub fn new(concepts: Vec<Concept>, weights: WeightMatrix) -> Result<Self> {
        let fcm = Self { concepts, weights };
        fcm.validate().into_result()?;
        Ok(fcm)
    }

    pub fn from_edges(concepts: Vec<Concept>, edges: impl IntoIterator<Item = (u32, u32, f64)>) -> Result<Self> {
        Self::try_from(FcmDocument {
            concepts,
            edges: edges
                .into_iter()
                .map(|(from, to, w)| Edge {
                    from: ConceptId(from),
                    to: ConceptId(to),
                    w,
                })
                .collect(),
        })
    }

    pub fn empty() -> Self {
        Self {
            concepts: Vec::new(),
            weights: WeightMatrix::filled(Vec::new()),
        }
    }

    pub fn concepts(&self) -> &[Concept] {
        &self.concepts
    }

    pub fn ids(&self) -> &[ConceptId] {
        self.weights.ids()
    }

    pub fn len(&self) -> usize {
        self.concepts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }

    pub fn weights(&self) -> &WeightMatrix {
        &self.weights
    }

    pub fn concept(&self, id: ConceptId) -> Option<&Concept> {
        self.concepts.iter().find(|c| c.id == id)
    }

    pub fn contains(&self, id: ConceptId) -> bool {
        self.concept(id).is_some()
    }

    pub fn id_by_name(&self, name: &str) -> Option<ConceptId> {
        self.concepts.iter().find(|c| c.name == name).map(|c| c.id)
    }

    pub fn weight(&self, from: ConceptId, to: ConceptId) -> Option<f64> {
        self.weights.get(from, to).copied()
    }

    /// Re-checks every invariant. Always ok for values built through the
    /// public constructors.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        check_concepts(&self.concepts, &mut violations);
        let ids: Vec<ConceptId> = self.concepts.iter().map(|c| c.id).collect();
        if ids != self.weights.ids() {
            violations.push(Violation::DimensionMismatch {
                concepts: ids.len(),
                dim: self.weights.dim(),
            });
            return ValidationReport { violations };
        }
        for (r, c, &w) in self.weights.entries() {
            check_weight(ids[r], ids[c], w, &mut violations);
        }
        ValidationReport { violations }
    }

    pub fn to_document(&self) -> FcmDocument {
        let ids = self.weights.ids();
        FcmDocument {
            concepts: self.concepts.clone(),
            edges: self
                .weights
                .entries()
                .filter(|(_, _, &w)| w != 0.0)
                .map(|(r, c, &w)| Edge {
                    from: ids[r],
                    to: ids[c],
                    w,
                })
                .collect(),
        }
    }

    pub(crate) fn add_concept(&mut self, concept: Concept) -> Result<()> {
        if self.contains(concept.id) {
            return Err(Error::DuplicateConcept(concept.id));
        }
        if concept.name.trim().is_empty() || self.id_by_name(&concept.name).is_some() {
            return Err(Error::InvalidFcm(vec![format!(
                "cannot add concept {} named `{}`",
                concept.id, concept.name
            )]));
        }
        self.weights.push_concept(concept.id);
        self.concepts.push(concept);
        Ok(())
    }

    pub(crate) fn set_weight(&mut self, from: ConceptId, to: ConceptId, w: f64) -> Result<()> {
        let r = self.weights.index_of(from).ok_or(Error::UnknownConcept(from))?;
        let c = self.weights.index_of(to).ok_or(Error::UnknownConcept(to))?;
        if from == to {
            return Err(Error::SelfLoop(from));
        }
        if !(-1.0..=1.0).contains(&w) {
            return Err(Error::WeightOutOfRange(w));
        }
        *self.weights.at_mut(r, c) = w;
        Ok(())
    }
}

impl TryFrom<FcmDocument> for Fcm {
    type Error = Error;

    fn try_from(doc: FcmDocument) -> Result<Self> {
        validate_fcm(&doc).into_result()?;
        let ids: Vec<ConceptId> = doc.concepts.iter().map(|c| c.id).collect();
        let mut weights = WeightMatrix::filled(ids);
        for e in &doc.edges {
            let r = weights.index_of(e.from).expect("validated endpoint");
            let c = weights.index_of(e.to).expect("validated endpoint");
            *weights.at_mut(r, c) = e.w;
        }
        Ok(Self {
            concepts: doc.concepts,
            weights,
        })
    }
}

impl From<Fcm> for FcmDocument {
    fn from(fcm: Fcm) -> Self {
        fcm.to_document()
    }
}

/// A concept present in both maps, with its id on each side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SharedConcept {
    pub learner: ConceptId,
    pub companion: ConceptId,
}

/// Result of splitting the companion's concepts against the learner's.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConceptPartition {
    /// Concepts known to both, in learner order.
    pub shared: Vec<SharedConcept>,
    /// Companion concepts the learner has not met, by companion id.
    pub c_new: BTreeSet<ConceptId>,
}

impl ConceptPartition {
    /// The intersection, in companion ids.
    pub fn intersection(&self) -> BTreeSet<ConceptId> {
        self.shared.iter().map(|s| s.companion).collect()
    }
}

/// Splits the companion's concepts into those the learner shares and those
/// new to the learner. Concepts are matched by name; learner-only concepts
/// are ignored.
pub fn concept_partition(learner: &Fcm, companion: &Fcm) -> ConceptPartition {
    let by_name: HashMap<&str, ConceptId> = companion.concepts.iter().map(|c| (c.name.as_str(), c.id)).collect();
    let shared: Vec<SharedConcept> = learner
        .concepts
        .iter()
        .filter_map(|c| {
            by_name.get(c.name.as_str()).map(|&companion| SharedConcept {
                learner: c.id,
                companion,
            })
        })
        .collect();
    let known: HashSet<ConceptId> = shared.iter().map(|s| s.companion).collect();
    let c_new = companion
        .concepts
        .iter()
        .map(|c| c.id)
        .filter(|id| !known.contains(id))
        .collect();
    ConceptPartition { shared, c_new }
}

/// Drops the rows and columns of `removed` from the companion's weight
/// matrix. Surviving concepts keep their relative order and every surviving
/// entry is copied unchanged.
pub fn reduce_matrix(companion: &Fcm, removed: &BTreeSet<ConceptId>) -> Result<WeightMatrix> {
    if let Some(&missing) = removed.iter().find(|id| !companion.contains(**id)) {
        return Err(Error::UnknownConcept(missing));
    }
    let keep: Vec<ConceptId> = companion
        .ids()
        .iter()
        .copied()
        .filter(|id| !removed.contains(id))
        .collect();
    Ok(companion
        .weights
        .select(&keep)
        .expect("kept ids come from the companion"))
}
