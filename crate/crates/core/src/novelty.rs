//! Novelty detection: what is new or surprising to a learner, and which
//! nearby learning activities embed it.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::fcm::{
    compare_fuzzified, concept_partition, fuzzify_matrix, reduce_matrix, ConceptId, ConceptPartition, Fcm,
    FuzzifiedMatrix, SurprisePair, WeightMatrix,
};
use crate::world::{distance, Position, WorldMap};

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ActivityProperties {
    pub name: String,
    #[serde(default)]
    pub objectives: String,
    #[serde(default)]
    pub background: String,
}

/// A positioned activity in the world and the concepts it teaches.
/// Concept ids are in the companion's id space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearningActivity {
    pub id: String,
    #[serde(flatten)]
    pub properties: ActivityProperties,
    pub concepts: Vec<ConceptId>,
    pub position: Position,
    pub interaction_radius: f64,
}

impl LearningActivity {
    pub fn name(&self) -> &str {
        &self.properties.name
    }

    pub fn contains(&self, p: Position) -> bool {
        distance(self.position, p) <= self.interaction_radius
    }
}

/// Why an activity was flagged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", content = "concept", rename_all = "snake_case")]
pub enum Trigger {
    NewConcept(ConceptId),
    SurpriseConcept(ConceptId),
}

impl Trigger {
    pub fn concept(self) -> ConceptId {
        match self {
            Trigger::NewConcept(c) | Trigger::SurpriseConcept(c) => c,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ActivityNovelty {
    pub novel: bool,
    pub triggers: Vec<Trigger>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct NoveltyReport {
    pub c_new: BTreeSet<ConceptId>,
    pub r_s: BTreeSet<SurprisePair>,
    pub novel_activities: BTreeMap<String, ActivityNovelty>,
}

impl NoveltyReport {
    pub fn is_novel(&self, activity_id: &str) -> bool {
        self.novel_activities.get(activity_id).is_some_and(|a| a.novel)
    }
}

/// Full output of the novelty pipeline, including the intermediate
/// matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub partition: ConceptPartition,
    /// Companion matrix with the new concepts removed (companion order).
    pub reduced: WeightMatrix,
    /// Learner labels over the shared concepts, learner order and ids.
    pub learner_fuzzified: FuzzifiedMatrix,
    /// Companion labels aligned to the learner's order and ids.
    pub companion_fuzzified: FuzzifiedMatrix,
    /// Surprise pairs in learner ids.
    pub r_s: BTreeSet<SurprisePair>,
}

impl Detection {
    pub fn c_new(&self) -> &BTreeSet<ConceptId> {
        &self.partition.c_new
    }

    /// Surprise pairs translated into companion ids, the space activities
    /// are authored in.
    pub fn r_s_companion(&self) -> BTreeSet<SurprisePair> {
        let to_companion = |id: ConceptId| {
            self.partition
                .shared
                .iter()
                .find(|s| s.learner == id)
                .map(|s| s.companion)
                .expect("surprise pairs only involve shared concepts")
        };
        self.r_s
            .iter()
            .map(|p| SurprisePair {
                i: to_companion(p.i),
                j: to_companion(p.j),
            })
            .collect()
    }

    pub fn report<'a>(&self, activities: impl IntoIterator<Item = &'a LearningActivity>) -> NoveltyReport {
        mark_novel(activities, self.c_new(), &self.r_s_companion())
    }
}

/// Runs concept partition, matrix reduction, fuzzification and comparison.
pub fn detect(learner: &Fcm, companion: &Fcm) -> Result<Detection> {
    let partition = concept_partition(learner, companion);
    let reduced = reduce_matrix(companion, &partition.c_new)?;

    let learner_ids: Vec<ConceptId> = partition.shared.iter().map(|s| s.learner).collect();
    let companion_ids: Vec<ConceptId> = partition.shared.iter().map(|s| s.companion).collect();
    let aligned = reduced
        .select(&companion_ids)
        .and_then(|m| m.relabel(learner_ids.clone()))
        .expect("shared concepts survive the reduction");
    let learner_weights = learner
        .weights()
        .select(&learner_ids)
        .expect("shared concepts come from the learner");

    let learner_fuzzified = fuzzify_matrix(&learner_weights)?;
    let companion_fuzzified = fuzzify_matrix(&aligned)?;
    let r_s = compare_fuzzified(&learner_fuzzified, &companion_fuzzified)?;
    Ok(Detection {
        partition,
        reduced,
        learner_fuzzified,
        companion_fuzzified,
        r_s,
    })
}

/// Every concept id that appears on either side of a surprise pair.
pub fn surprise_concepts(r_s: &BTreeSet<SurprisePair>) -> BTreeSet<ConceptId> {
    r_s.iter().flat_map(|p| [p.i, p.j]).collect()
}

/// Activities within `rho` of `pos` (closed ball), nearest first, ties
/// broken by id.
pub fn activities_in_vicinity(pos: Position, world: &WorldMap, rho: f64) -> Vec<&LearningActivity> {
    let mut near: Vec<(f64, &LearningActivity)> = world
        .activities
        .iter()
        .map(|a| (distance(pos, a.position), a))
        .filter(|(d, _)| *d <= rho)
        .collect();
    near.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.id.cmp(&b.1.id)));
    near.into_iter().map(|(_, a)| a).collect()
}

/// Flags each activity that embeds a new concept or a concept involved in
/// a surprise pair. `r_s` must be in the activities' id space.
pub fn mark_novel<'a>(
    activities: impl IntoIterator<Item = &'a LearningActivity>,
    c_new: &BTreeSet<ConceptId>,
    r_s: &BTreeSet<SurprisePair>,
) -> NoveltyReport {
    let surprising = surprise_concepts(r_s);
    let novel_activities = activities
        .into_iter()
        .map(|a| {
            let triggers: Vec<Trigger> = a
                .concepts
                .iter()
                .filter_map(|&c| {
                    if c_new.contains(&c) {
                        Some(Trigger::NewConcept(c))
                    } else if surprising.contains(&c) {
                        Some(Trigger::SurpriseConcept(c))
                    } else {
                        None
                    }
                })
                .collect();
            (
                a.id.clone(),
                ActivityNovelty {
                    novel: !triggers.is_empty(),
                    triggers,
                },
            )
        })
        .collect();
    NoveltyReport {
        c_new: c_new.clone(),
        r_s: r_s.clone(),
        novel_activities,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fcm::Concept;
    use crate::world::Bounds;

    fn activity(id: &str, concepts: &[u32], x: f64) -> LearningActivity {
        LearningActivity {
            id: id.into(),
            properties: ActivityProperties {
                name: id.to_uppercase(),
                ..Default::default()
            },
            concepts: concepts.iter().copied().map(ConceptId).collect(),
            position: Position::new(x, 0.0, 0.0),
            interaction_radius: 1.0,
        }
    }

    fn world(activities: Vec<LearningActivity>) -> WorldMap {
        WorldMap {
            id: "line".into(),
            name: String::new(),
            bounds: Bounds {
                min: Position::new(-100.0, -100.0, -100.0),
                max: Position::new(100.0, 100.0, 100.0),
            },
            spawn: Position::default(),
            vicinity_radius: 10.0,
            companion_fcm: "c".into(),
            activities,
        }
    }

    #[test]
    fn vicinity_is_a_closed_ball() {
        let w = world(vec![
            activity("far", &[1], 15.0),
            activity("edge", &[1], 10.0),
            activity("near", &[1], 5.0),
        ]);
        let ids: Vec<&str> = activities_in_vicinity(Position::default(), &w, 10.0)
            .iter()
            .map(|a| a.id.as_str())
            .collect();
        assert_eq!(ids, ["near", "edge"]);
    }

    #[test]
    fn vicinity_ties_are_ordered_by_id() {
        let w = world(vec![activity("b", &[1], 3.0), activity("a", &[1], -3.0)]);
        let ids: Vec<&str> = activities_in_vicinity(Position::default(), &w, 10.0)
            .iter()
            .map(|a| a.id.as_str())
            .collect();
        assert_eq!(ids, ["a", "b"]);
    }

    #[test]
    fn surprise_concepts_unfold_pairs() {
        assert!(surprise_concepts(&BTreeSet::new()).is_empty());
        assert_eq!(
            surprise_concepts(&BTreeSet::from([SurprisePair::new(1, 2)])),
            BTreeSet::from([ConceptId(1), ConceptId(2)])
        );
    }

    #[test]
    fn new_concept_triggers_are_recorded() {
        let a = activity("lab", &[5, 9], 0.0);
        let r = mark_novel([&a], &BTreeSet::from([ConceptId(9)]), &BTreeSet::new());
        assert_eq!(
            r.novel_activities["lab"].triggers,
            vec![Trigger::NewConcept(ConceptId(9))]
        );
        assert!(r.is_novel("lab"));
    }

    #[test]
    fn empty_learner_sees_everything_as_new() {
        let companion = Fcm::from_edges(
            vec![Concept::new(1, "a"), Concept::new(2, "b"), Concept::new(3, "c")],
            [(1, 2, 0.5), (2, 3, -0.9)],
        )
        .unwrap();
        let d = detect(&Fcm::empty(), &companion).unwrap();
        assert_eq!(d.c_new(), &BTreeSet::from([ConceptId(1), ConceptId(2), ConceptId(3)]));
        assert!(d.r_s.is_empty());
        assert_eq!(d.learner_fuzzified.dim(), 0);
    }

    #[test]
    fn learner_ids_are_remapped_by_name() {
        let companion = Fcm::from_edges(
            vec![Concept::new(1, "a"), Concept::new(2, "b"), Concept::new(3, "c")],
            [(1, 2, 0.9), (2, 3, -0.9)],
        )
        .unwrap();
        // same names, different ids and order; only b -> c disagrees
        let learner = Fcm::from_edges(
            vec![
                Concept::new(7, "c"),
                Concept::new(5, "a"),
                Concept::new(6, "b"),
                Concept::new(8, "own"),
            ],
            [(5, 6, 0.8), (6, 7, 0.9), (8, 5, 0.5)],
        )
        .unwrap();
        let d = detect(&learner, &companion).unwrap();
        assert!(d.c_new().is_empty());
        assert_eq!(d.r_s, BTreeSet::from([SurprisePair::new(6, 7)]));
        assert_eq!(d.r_s_companion(), BTreeSet::from([SurprisePair::new(2, 3)]));
    }
}
