//! The simulated learning environment: positions, avatar movement, the
//! input-event log and learner FCM editing.

use std::collections::{HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fcm::{Concept, ConceptId, Fcm};
use crate::novelty::LearningActivity;
use crate::policy::{EventKind, InputEvent};

/// Number of timestamped avatar positions kept per session.
pub const POSITION_RING: usize = 8;

pub const DEFAULT_VICINITY_RADIUS: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Position {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Position {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

pub fn distance(a: Position, b: Position) -> f64 {
    ((a.x - b.x).powi(2) + (a.y - b.y).powi(2) + (a.z - b.z).powi(2)).sqrt()
}

/// Axis-aligned box, inclusive on every face.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub min: Position,
    pub max: Position,
}

impl Bounds {
    pub fn contains(&self, p: Position) -> bool {
        p.is_finite()
            && (self.min.x..=self.max.x).contains(&p.x)
            && (self.min.y..=self.max.y).contains(&p.y)
            && (self.min.z..=self.max.z).contains(&p.z)
    }
}

fn default_vicinity() -> f64 {
    DEFAULT_VICINITY_RADIUS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldMap {
    pub id: String,
    #[serde(default)]
    pub name: String,
    pub bounds: Bounds,
    pub spawn: Position,
    #[serde(default = "default_vicinity")]
    pub vicinity_radius: f64,
    /// Id of the companion's knowledge map for this world.
    pub companion_fcm: String,
    pub activities: Vec<LearningActivity>,
}

impl WorldMap {
    pub fn from_json(text: &str) -> Result<Self> {
        let world: WorldMap = serde_json::from_str(text).map_err(|e| Error::parse("world document", e))?;
        world.validate()?;
        Ok(world)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidWorld(format!("{}: {msg}", self.id)));
        if !self.bounds.contains(self.spawn) {
            return bad("spawn lies outside the bounds".into());
        }
        if !(self.vicinity_radius > 0.0) {
            return bad("vicinity_radius must be positive".into());
        }
        let mut ids = HashSet::new();
        for a in &self.activities {
            if !ids.insert(a.id.as_str()) {
                return bad(format!("duplicate activity id `{}`", a.id));
            }
            if a.concepts.is_empty() {
                return bad(format!("activity `{}` embeds no concepts", a.id));
            }
            if !(a.interaction_radius > 0.0) {
                return bad(format!("activity `{}` needs a positive interaction_radius", a.id));
            }
            if !self.bounds.contains(a.position) {
                return bad(format!("activity `{}` lies outside the bounds", a.id));
            }
        }
        Ok(())
    }

    /// Checks that every activity concept exists in the companion map.
    pub fn check_concepts(&self, companion: &Fcm) -> Result<()> {
        for a in &self.activities {
            if let Some(&c) = a.concepts.iter().find(|&&c| !companion.contains(c)) {
                return Err(Error::InvalidWorld(format!(
                    "{}: activity `{}` embeds {c}, which the companion map lacks",
                    self.id, a.id
                )));
            }
        }
        Ok(())
    }

    pub fn activity(&self, id: &str) -> Option<&LearningActivity> {
        self.activities.iter().find(|a| a.id == id)
    }

    /// The nearest activity whose interaction radius contains `p`.
    pub fn activity_at(&self, p: Position) -> Option<&LearningActivity> {
        self.activities.iter().filter(|a| a.contains(p)).min_by(|a, b| {
            distance(a.position, p)
                .total_cmp(&distance(b.position, p))
                .then_with(|| a.id.cmp(&b.id))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PositionSample {
    pub t: u64,
    pub position: Position,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum FcmEdit {
    /// Adds a concept from the companion's palette (by companion id).
    AddConcept {
        concept: ConceptId,
    },
    SetEdge {
        from: ConceptId,
        to: ConceptId,
        w: f64,
    },
    ClearEdge {
        from: ConceptId,
        to: ConceptId,
    },
}

/// Per-session view of the learner inside the world.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionWorldState {
    pub avatar: Position,
    pub samples: VecDeque<PositionSample>,
    pub events: Vec<InputEvent>,
    pub learner_fcm: Fcm,
    pub engaged: Option<String>,
}

impl SessionWorldState {
    pub fn new(world: &WorldMap, learner_fcm: Fcm) -> Self {
        Self {
            avatar: world.spawn,
            samples: VecDeque::from([PositionSample {
                t: 0,
                position: world.spawn,
            }]),
            events: Vec::new(),
            learner_fcm,
            engaged: None,
        }
    }

    /// Latest time seen in either the event log or the position samples.
    pub fn last_time(&self) -> u64 {
        let e = self.events.last().map_or(0, |e| e.t);
        let s = self.samples.back().map_or(0, |s| s.t);
        e.max(s)
    }

    fn check_time(&self, t: u64) -> Result<()> {
        let last = self.last_time();
        if t < last {
            return Err(Error::TimeRegression { t, last });
        }
        Ok(())
    }

    /// Teleports the avatar to `target`. Movement is click-driven, so a
    /// `mouse_left` event is logged too. The click itself does not count as
    /// engaging the activity the avatar lands in.
    pub fn move_avatar(&mut self, world: &WorldMap, target: Position, now: u64) -> Result<()> {
        if !world.bounds.contains(target) {
            return Err(Error::OutOfBounds {
                x: target.x,
                y: target.y,
                z: target.z,
            });
        }
        self.check_time(now)?;
        self.avatar = target;
        if self.samples.len() == POSITION_RING {
            self.samples.pop_front();
        }
        self.samples.push_back(PositionSample {
            t: now,
            position: target,
        });
        self.events.push(InputEvent {
            t: now,
            kind: EventKind::MouseLeft,
        });
        if let Some(id) = &self.engaged {
            if !world.activity(id).is_some_and(|a| a.contains(target)) {
                self.engaged = None;
            }
        }
        Ok(())
    }

    /// Appends an input event. A click or key press while inside an
    /// activity's interaction radius engages that activity.
    pub fn record_event(&mut self, world: &WorldMap, ev: InputEvent) -> Result<()> {
        self.check_time(ev.t)?;
        self.events.push(ev);
        if ev.kind.is_action() {
            if let Some(a) = world.activity_at(self.avatar) {
                self.engaged = Some(a.id.clone());
            }
        }
        Ok(())
    }

    pub fn apply_fcm_edit(&mut self, palette: &Fcm, edit: &FcmEdit) -> Result<()> {
        match *edit {
            FcmEdit::AddConcept { concept } => {
                let c = palette.concept(concept).ok_or(Error::UnknownConcept(concept))?;
                if self.learner_fcm.id_by_name(&c.name).is_some() {
                    return Err(Error::DuplicateConcept(concept));
                }
                self.learner_fcm.add_concept(Concept {
                    id: c.id,
                    name: c.name.clone(),
                })
            }
            FcmEdit::SetEdge { from, to, w } => self.learner_fcm.set_weight(from, to, w),
            FcmEdit::ClearEdge { from, to } => self.learner_fcm.set_weight(from, to, 0.0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::novelty::ActivityProperties;

    fn world() -> WorldMap {
        WorldMap {
            id: "w".into(),
            name: String::new(),
            bounds: Bounds {
                min: Position::new(0.0, 0.0, 0.0),
                max: Position::new(100.0, 100.0, 10.0),
            },
            spawn: Position::new(10.0, 10.0, 0.0),
            vicinity_radius: 10.0,
            companion_fcm: "c".into(),
            activities: vec![LearningActivity {
                id: "a".into(),
                properties: ActivityProperties {
                    name: "A".into(),
                    ..Default::default()
                },
                concepts: vec![ConceptId(1)],
                position: Position::new(20.0, 20.0, 0.0),
                interaction_radius: 3.0,
            }],
        }
    }

    fn palette() -> Fcm {
        Fcm::from_edges((1..=9).map(|i| Concept::new(i, format!("c{i}"))).collect(), []).unwrap()
    }

    fn state() -> SessionWorldState {
        let learner = Fcm::from_edges((1..=8).map(|i| Concept::new(i, format!("c{i}"))).collect(), []).unwrap();
        SessionWorldState::new(&world(), learner)
    }

    #[test]
    fn distances() {
        assert_eq!(
            distance(Position::new(0.0, 0.0, 0.0), Position::new(3.0, 4.0, 0.0)),
            5.0
        );
        assert_eq!(
            distance(Position::new(1.0, 2.0, 3.0), Position::new(1.0, 2.0, 3.0)),
            0.0
        );
        let d = distance(Position::new(1.0, 1.0, 1.0), Position::new(2.0, 2.0, 2.0));
        assert!((d - 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn move_within_bounds_logs_sample_and_event() {
        let mut s = state();
        s.move_avatar(&world(), Position::new(50.0, 50.0, 0.0), 100).unwrap();
        assert_eq!(s.avatar, Position::new(50.0, 50.0, 0.0));
        assert_eq!(s.samples.len(), 2);
        assert_eq!(
            s.events,
            vec![InputEvent {
                t: 100,
                kind: EventKind::MouseLeft
            }]
        );
    }

    #[test]
    fn move_outside_bounds_leaves_state_unchanged() {
        let mut s = state();
        let before = s.clone();
        assert!(matches!(
            s.move_avatar(&world(), Position::new(150.0, 50.0, 0.0), 100),
            Err(Error::OutOfBounds { .. })
        ));
        assert_eq!(s, before);
    }

    #[test]
    fn moving_away_grows_the_distance() {
        let w = world();
        let mut s = state();
        for (k, x) in [25.0, 30.0, 40.0].into_iter().enumerate() {
            s.move_avatar(&w, Position::new(x, 20.0, 0.0), 100 * (k as u64 + 1))
                .unwrap();
        }
        let d: Vec<f64> = s
            .samples
            .iter()
            .rev()
            .take(3)
            .map(|p| distance(p.position, w.activities[0].position))
            .collect();
        assert!(d[0] > d[1] && d[1] > d[2]);
    }

    #[test]
    fn ring_keeps_latest_samples() {
        let w = world();
        let mut s = state();
        for t in 1..=20 {
            s.move_avatar(&w, Position::new(t as f64, 0.0, 0.0), t).unwrap();
        }
        assert_eq!(s.samples.len(), POSITION_RING);
        assert_eq!(s.samples.back().unwrap().t, 20);
    }

    #[test]
    fn event_log_rejects_time_regression() {
        let w = world();
        let mut s = state();
        s.record_event(
            &w,
            InputEvent {
                t: 4000,
                kind: EventKind::KeyPress,
            },
        )
        .unwrap();
        s.record_event(
            &w,
            InputEvent {
                t: 5000,
                kind: EventKind::KeyPress,
            },
        )
        .unwrap();
        let err = s
            .record_event(
                &w,
                InputEvent {
                    t: 3000,
                    kind: EventKind::KeyPress,
                },
            )
            .unwrap_err();
        assert!(matches!(err, Error::TimeRegression { t: 3000, last: 5000 }));
        assert_eq!(s.events.len(), 2);
    }

    #[test]
    fn engagement_needs_an_action_inside_the_radius() {
        let w = world();
        let mut s = state();
        s.move_avatar(&w, Position::new(21.0, 20.0, 0.0), 10).unwrap();
        assert_eq!(s.engaged, None);
        s.record_event(
            &w,
            InputEvent {
                t: 20,
                kind: EventKind::MouseMove,
            },
        )
        .unwrap();
        assert_eq!(s.engaged, None);
        s.record_event(
            &w,
            InputEvent {
                t: 30,
                kind: EventKind::KeyPress,
            },
        )
        .unwrap();
        assert_eq!(s.engaged.as_deref(), Some("a"));
        s.move_avatar(&w, Position::new(60.0, 20.0, 0.0), 40).unwrap();
        assert_eq!(s.engaged, None);
    }

    #[test]
    fn fcm_edits() {
        let p = palette();
        let mut s = state();
        s.apply_fcm_edit(&p, &FcmEdit::AddConcept { concept: ConceptId(9) })
            .unwrap();
        assert!(s.learner_fcm.contains(ConceptId(9)));
        assert_eq!(s.learner_fcm.weight(ConceptId(9), ConceptId(1)), Some(0.0));

        s.apply_fcm_edit(
            &p,
            &FcmEdit::SetEdge {
                from: ConceptId(4),
                to: ConceptId(7),
                w: 1.0,
            },
        )
        .unwrap();
        assert_eq!(s.learner_fcm.weight(ConceptId(4), ConceptId(7)), Some(1.0));
        s.apply_fcm_edit(
            &p,
            &FcmEdit::ClearEdge {
                from: ConceptId(4),
                to: ConceptId(7),
            },
        )
        .unwrap();
        assert_eq!(s.learner_fcm.weight(ConceptId(4), ConceptId(7)), Some(0.0));

        let before = s.clone();
        for bad in [
            FcmEdit::SetEdge {
                from: ConceptId(4),
                to: ConceptId(4),
                w: 0.5,
            },
            FcmEdit::SetEdge {
                from: ConceptId(4),
                to: ConceptId(12),
                w: 0.5,
            },
            FcmEdit::SetEdge {
                from: ConceptId(4),
                to: ConceptId(5),
                w: -1.5,
            },
            FcmEdit::AddConcept { concept: ConceptId(42) },
            FcmEdit::AddConcept { concept: ConceptId(3) },
        ] {
            assert!(s.apply_fcm_edit(&p, &bad).is_err(), "{bad:?}");
        }
        assert_eq!(s, before);
    }

    #[test]
    fn world_validation() {
        let mut w = world();
        assert!(w.validate().is_ok());
        w.activities[0].position = Position::new(-5.0, 0.0, 0.0);
        assert!(w.validate().is_err());
        let mut w = world();
        w.activities.push(w.activities[0].clone());
        assert!(w.validate().is_err());
    }
}
