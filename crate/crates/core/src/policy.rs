//! When and how to stimulate curiosity.
//!
//! The companion waits `τ = n·T` after spotting novel activities near the
//! learner, where `T` is the learner's mean interval between clicks and key
//! presses. If the learner neither engages a candidate nor heads for it in
//! that window, one candidate is picked uniformly at random and a prompt is
//! rendered from a fixed template, shaped by the learner's curiosity
//! profile.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fcm::ConceptId;
use crate::world::{distance, Position, PositionSample};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    MouseLeft,
    MouseRight,
    MouseMove,
    KeyPress,
}

impl EventKind {
    /// Clicks and key presses; pointer motion only turns the view.
    pub fn is_action(self) -> bool {
        !matches!(self, EventKind::MouseMove)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputEvent {
    /// Milliseconds since session start.
    pub t: u64,
    pub kind: EventKind,
}

/// Mean gap in ms between consecutive click/key events, or `fallback_ms`
/// when there are fewer than two of them.
pub fn mean_action_interval(events: &[InputEvent], fallback_ms: f64) -> f64 {
    let times: Vec<u64> = events.iter().filter(|e| e.kind.is_action()).map(|e| e.t).collect();
    if times.len() < 2 {
        return fallback_ms;
    }
    let span = times[times.len() - 1] - times[0];
    span as f64 / (times.len() - 1) as f64
}

/// `τ = n·T`, rounded to the nearest millisecond.
pub fn wait_duration(mean_interval_ms: f64, n: u32) -> Result<u64> {
    if n < 1 {
        return Err(Error::InvalidParameter("n must be a positive integer".into()));
    }
    if !(mean_interval_ms > 0.0) || !mean_interval_ms.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "mean action interval must be positive, got {mean_interval_ms}"
        )));
    }
    Ok((f64::from(n) * mean_interval_ms).round() as u64)
}

/// Answers to an M-item, 1–7 curiosity questionnaire.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<u8>", into = "Vec<u8>")]
pub struct CuriosityProfile {
    responses: Vec<u8>,
}

impl CuriosityProfile {
    pub fn new(responses: Vec<u8>) -> Result<Self> {
        if responses.is_empty() {
            return Err(Error::InvalidParameter("curiosity profile has no responses".into()));
        }
        if let Some(r) = responses.iter().find(|r| !(1..=7).contains(*r)) {
            return Err(Error::InvalidParameter(format!(
                "curiosity response {r} is outside 1..=7"
            )));
        }
        Ok(Self { responses })
    }

    pub fn responses(&self) -> &[u8] {
        &self.responses
    }

    pub fn mean(&self) -> f64 {
        self.responses.iter().map(|&r| f64::from(r)).sum::<f64>() / self.responses.len() as f64
    }
}

impl TryFrom<Vec<u8>> for CuriosityProfile {
    type Error = Error;

    fn try_from(v: Vec<u8>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<CuriosityProfile> for Vec<u8> {
    fn from(p: CuriosityProfile) -> Self {
        p.responses
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PropensityClass {
    Low,
    Medium,
    High,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileThresholds {
    pub low_below: f64,
    pub high_at_or_above: f64,
}

impl Default for ProfileThresholds {
    fn default() -> Self {
        Self {
            low_below: 3.0,
            high_at_or_above: 5.0,
        }
    }
}

pub fn classify_profile(cp: &CuriosityProfile, thresholds: &ProfileThresholds) -> PropensityClass {
    let mean = cp.mean();
    if mean < thresholds.low_below {
        PropensityClass::Low
    } else if mean < thresholds.high_at_or_above {
        PropensityClass::Medium
    } else {
        PropensityClass::High
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Complexity {
    Simple,
    Moderate,
    Rich,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Medium {
    #[default]
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Persuasion {
    Suggestion,
    Question,
    Challenge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StimulationStrategy {
    pub complexity: Complexity,
    pub medium: Medium,
    pub persuasion: Persuasion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrategyTable {
    pub low: StimulationStrategy,
    pub medium: StimulationStrategy,
    pub high: StimulationStrategy,
}

impl Default for StrategyTable {
    fn default() -> Self {
        let row = |complexity, persuasion| StimulationStrategy {
            complexity,
            medium: Medium::Text,
            persuasion,
        };
        Self {
            low: row(Complexity::Simple, Persuasion::Suggestion),
            medium: row(Complexity::Moderate, Persuasion::Question),
            high: row(Complexity::Rich, Persuasion::Challenge),
        }
    }
}

pub fn strategy_for(class: PropensityClass, table: &StrategyTable) -> StimulationStrategy {
    match class {
        PropensityClass::Low => table.low,
        PropensityClass::Medium => table.medium,
        PropensityClass::High => table.high,
    }
}

/// Tunables for the stimulation policy. Missing fields take defaults, so a
/// partial document works as a set of overrides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PolicyConfig {
    pub n: u32,
    #[serde(rename = "fallback_T0_ms")]
    pub fallback_t0_ms: f64,
    /// Overrides the world's vicinity radius when set.
    pub vicinity_radius: Option<f64>,
    pub moving_away_samples: usize,
    pub profile_thresholds: ProfileThresholds,
    pub strategy_table: StrategyTable,
    /// A prompted activity is not prompted again for this many τ.
    pub cooldown_factor: u32,
}

impl Default for PolicyConfig {
    fn default() -> Self {
        Self {
            n: 3,
            fallback_t0_ms: 2000.0,
            vicinity_radius: None,
            moving_away_samples: 3,
            profile_thresholds: ProfileThresholds::default(),
            strategy_table: StrategyTable::default(),
            cooldown_factor: 5,
        }
    }
}

impl PolicyConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.into()));
        if self.n < 1 {
            return bad("n must be at least 1");
        }
        if !(self.fallback_t0_ms > 0.0) {
            return bad("fallback_T0_ms must be positive");
        }
        if self.vicinity_radius.is_some_and(|r| !(r > 0.0)) {
            return bad("vicinity_radius must be positive");
        }
        if self.moving_away_samples < 2 {
            return bad("moving_away_samples must be at least 2");
        }
        if self.profile_thresholds.low_below > self.profile_thresholds.high_at_or_above {
            return bad("profile thresholds are inverted");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaitCandidate {
    pub activity_id: String,
    pub position: Position,
}

/// An open wait: novel activities were spotted and the companion is giving
/// the learner `τ` to act on their own.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaitState {
    pub candidates: Vec<WaitCandidate>,
    pub opened_at: u64,
    pub deadline: u64,
    pub tau_ms: u64,
    pub anchor_position: Position,
}

impl WaitState {
    pub fn open(candidates: Vec<WaitCandidate>, now: u64, tau_ms: u64, anchor: Position) -> Result<Self> {
        if candidates.is_empty() {
            return Err(Error::InvalidParameter("a wait needs at least one candidate".into()));
        }
        let tau_ms = tau_ms.max(1);
        Ok(Self {
            candidates,
            opened_at: now,
            deadline: now + tau_ms,
            tau_ms,
            anchor_position: anchor,
        })
    }

    pub fn has_candidate(&self, activity_id: &str) -> bool {
        self.candidates.iter().any(|c| c.activity_id == activity_id)
    }

    fn nearest_candidate_distance(&self, p: Position) -> f64 {
        self.candidates
            .iter()
            .map(|c| distance(c.position, p))
            .fold(f64::INFINITY, f64::min)
    }

    /// Whether the distance to the nearest candidate strictly increased
    /// across the last `k` positions (the anchor counts as the first).
    pub fn moving_away(&self, history: &[PositionSample], k: usize) -> bool {
        let mut track: Vec<Position> = vec![self.anchor_position];
        track.extend(history.iter().filter(|s| s.t > self.opened_at).map(|s| s.position));
        if k < 2 || track.len() < k {
            return false;
        }
        let d: Vec<f64> = track[track.len() - k..]
            .iter()
            .map(|&p| self.nearest_candidate_distance(p))
            .collect();
        d.windows(2).all(|w| w[1] > w[0])
    }
}

/// What the companion sees when it re-evaluates a wait.
#[derive(Debug, Clone, Copy)]
pub struct WaitSnapshot<'a> {
    pub now: u64,
    pub positions: &'a [PositionSample],
    pub engaged: Option<&'a str>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoActionReason {
    Waiting,
    Engaged,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StimulusCause {
    Deadline,
    MovingAway,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "decision", rename_all = "snake_case")]
pub enum WaitDecision {
    NoAction { reason: NoActionReason },
    Stimulate { activity_id: String, cause: StimulusCause },
}

pub fn evaluate_wait<R: Rng + ?Sized>(
    state: &WaitState,
    snapshot: WaitSnapshot<'_>,
    moving_away_samples: usize,
    rng: &mut R,
) -> WaitDecision {
    if snapshot.now < state.deadline && snapshot.engaged.is_some_and(|id| state.has_candidate(id)) {
        return WaitDecision::NoAction {
            reason: NoActionReason::Engaged,
        };
    }
    let cause = if snapshot.now >= state.deadline {
        StimulusCause::Deadline
    } else if state.moving_away(snapshot.positions, moving_away_samples) {
        StimulusCause::MovingAway
    } else {
        return WaitDecision::NoAction {
            reason: NoActionReason::Waiting,
        };
    };
    let pick = rng.random_range(0..state.candidates.len());
    WaitDecision::Stimulate {
        activity_id: state.candidates[pick].activity_id.clone(),
        cause,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TemplateKind {
    NewConcept,
    SurprisingConcept,
}

const NEW_PREFIX: &str = "Would you like to learn something about ";
const NEW_MIDDLE: &str = "? You can explore it by participating in ";
const NEW_SUFFIX: &str = " here.";
const SURPRISE_PREFIX: &str = "There may be other ways of explaining the concept ";
const SURPRISE_MIDDLE: &str = ", would you like to see how it is done in ";
const SURPRISE_SUFFIX: &str = "?";

impl TemplateKind {
    fn parts(self) -> (&'static str, &'static str, &'static str) {
        match self {
            TemplateKind::NewConcept => (NEW_PREFIX, NEW_MIDDLE, NEW_SUFFIX),
            TemplateKind::SurprisingConcept => (SURPRISE_PREFIX, SURPRISE_MIDDLE, SURPRISE_SUFFIX),
        }
    }

    pub fn fill(self, concept: &str, activity: &str) -> String {
        let (p, m, s) = self.parts();
        format!("{p}{concept}{m}{activity}{s}")
    }

    /// Recovers `(concept, activity)` from text produced by [`Self::fill`].
    pub fn extract(self, text: &str) -> Option<(String, String)> {
        let (p, m, s) = self.parts();
        let body = text.strip_prefix(p)?.strip_suffix(s)?;
        let (concept, activity) = body.split_once(m)?;
        Some((concept.to_owned(), activity.to_owned()))
    }
}

impl fmt::Display for TemplateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TemplateKind::NewConcept => "new_concept",
            TemplateKind::SurprisingConcept => "surprising_concept",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prompt {
    /// The filled template, verbatim.
    pub text: String,
    /// Optional follow-up sentence chosen by the strategy's complexity.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elaboration: Option<String>,
    pub activity_id: String,
    pub template: TemplateKind,
    pub concept_id: ConceptId,
    pub issued_at: u64,
}

impl Prompt {
    pub fn full_text(&self) -> String {
        match &self.elaboration {
            Some(e) => format!("{} {e}", self.text),
            None => self.text.clone(),
        }
    }
}

/// What a prompt is about.
#[derive(Debug, Clone, Copy)]
pub struct PromptSubject<'a> {
    pub concept_id: ConceptId,
    pub concept_name: &'a str,
    pub activity_id: &'a str,
    pub activity_name: &'a str,
}

fn elaboration(c: Complexity) -> Option<&'static str> {
    match c {
        Complexity::Simple => Some("It only takes a moment to have a look."),
        Complexity::Moderate => None,
        Complexity::Rich => Some("Before you start, try to predict what you will find."),
    }
}

pub fn render_prompt(
    template: TemplateKind,
    subject: PromptSubject<'_>,
    ss: &StimulationStrategy,
    now: u64,
) -> Result<Prompt> {
    if subject.concept_name.trim().is_empty() || subject.activity_name.trim().is_empty() {
        return Err(Error::InvalidParameter("prompt names must be non-empty".into()));
    }
    Ok(Prompt {
        text: template.fill(subject.concept_name, subject.activity_name),
        elaboration: elaboration(ss.complexity).map(str::to_owned),
        activity_id: subject.activity_id.to_owned(),
        template,
        concept_id: subject.concept_id,
        issued_at: now,
    })
}

/// Arousal, valence and dominance, each in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MoodEstimate {
    pub arousal: f64,
    pub valence: f64,
    pub dominance: f64,
}

impl MoodEstimate {
    pub const NEUTRAL: Self = Self {
        arousal: 0.5,
        valence: 0.5,
        dominance: 0.5,
    };
}

/// Placeholder for mood inference from input dynamics: always neutral.
pub fn mood_stub(_events: &[InputEvent]) -> MoodEstimate {
    MoodEstimate::NEUTRAL
}
