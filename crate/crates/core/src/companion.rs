//! The monitor → detect → wait → stimulate loop for one learner.
//!
//! [`Companion`] borrows the immutable world and expert map; all per-learner
//! state lives in a serialisable [`SessionState`]. Every mutation goes
//! through [`Companion::apply`], which returns the [`Record`]s it produced.
//! Time only moves when an action carries a later timestamp; a pending wait
//! whose deadline falls at or before that timestamp fires first.

use std::collections::{BTreeMap, BTreeSet};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fcm::{ConceptId, Fcm, FcmDocument, SurprisePair};
use crate::novelty::{activities_in_vicinity, detect, NoveltyReport, Trigger};
use crate::policy::{
    classify_profile, evaluate_wait, mean_action_interval, render_prompt, strategy_for, wait_duration,
    CuriosityProfile, EventKind, InputEvent, NoActionReason, PolicyConfig, Prompt, PromptSubject, StimulusCause,
    TemplateKind, WaitCandidate, WaitDecision, WaitSnapshot, WaitState,
};
use crate::world::{distance, FcmEdit, Position, SessionWorldState, WorldMap};

/// One learner action, timestamped in ms since session start.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Action {
    Move {
        t: u64,
        to: Position,
    },
    Input {
        t: u64,
        kind: EventKind,
    },
    Edit {
        t: u64,
        edit: FcmEdit,
    },
    /// Interact with an activity the avatar is standing in.
    Engage {
        t: u64,
        activity: String,
    },
    Respond {
        t: u64,
        prompt: usize,
        accept: bool,
    },
    /// Advance the clock with no input.
    Tick {
        t: u64,
    },
}

impl Action {
    pub fn time(&self) -> u64 {
        match *self {
            Action::Move { t, .. }
            | Action::Input { t, .. }
            | Action::Edit { t, .. }
            | Action::Engage { t, .. }
            | Action::Respond { t, .. }
            | Action::Tick { t } => t,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WaitCloseReason {
    Engaged,
    Deadline,
    MovingAway,
    /// No candidate is novel any more after an FCM change.
    Resolved,
    /// The avatar left the vicinity of every candidate.
    LeftVicinity,
}

impl From<StimulusCause> for WaitCloseReason {
    fn from(c: StimulusCause) -> Self {
        match c {
            StimulusCause::Deadline => WaitCloseReason::Deadline,
            StimulusCause::MovingAway => WaitCloseReason::MovingAway,
        }
    }
}

/// Something observable the companion did or saw.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "snake_case")]
pub enum Record {
    EventIngested {
        t: u64,
        kind: EventKind,
    },
    AvatarMoved {
        t: u64,
        to: Position,
    },
    ActivityEngaged {
        t: u64,
        activity: String,
    },
    NoveltyComputed {
        t: u64,
        c_new: BTreeSet<ConceptId>,
        r_s: BTreeSet<SurprisePair>,
        novel: Vec<String>,
    },
    WaitOpened {
        t: u64,
        candidates: Vec<String>,
        tau_ms: u64,
        deadline: u64,
    },
    WaitClosed {
        t: u64,
        reason: WaitCloseReason,
    },
    PromptIssued {
        t: u64,
        index: usize,
        prompt: Prompt,
    },
    PromptResponse {
        t: u64,
        index: usize,
        accepted: bool,
    },
    FcmEdited {
        t: u64,
        edit: FcmEdit,
    },
    FcmReplaced {
        t: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Acknowledgment {
    pub t: u64,
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutboxEntry {
    pub index: usize,
    pub prompt: Prompt,
    pub acknowledged: Option<Acknowledgment>,
}

/// Everything the companion keeps about one learner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionState {
    pub id: String,
    pub world_id: String,
    pub seed: u64,
    /// Random draws made so far; each draw uses its own ChaCha stream.
    pub rng_draws: u64,
    pub profile: CuriosityProfile,
    pub config: PolicyConfig,
    pub clock: u64,
    pub world: SessionWorldState,
    pub novelty: NoveltyReport,
    pub wait: Option<WaitState>,
    pub outbox: Vec<OutboxEntry>,
    /// Activity id → time before which it is not prompted again.
    pub cooldowns: BTreeMap<String, u64>,
    /// Activities the learner has engaged at least once.
    pub explored: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaitStatus {
    pub candidates: Vec<String>,
    pub opened_at: u64,
    pub deadline: u64,
    pub tau_ms: u64,
}

/// Read-only view of a session at its latest tick.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateSnapshot {
    pub session_id: String,
    pub world_id: String,
    pub clock: u64,
    pub avatar: Position,
    pub engaged: Option<String>,
    pub nearby: Vec<String>,
    pub learner_fcm: FcmDocument,
    pub novelty: NoveltyReport,
    pub wait: Option<WaitStatus>,
    pub prompts_issued: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct Companion<'a> {
    world: &'a WorldMap,
    knowledge: &'a Fcm,
}

impl<'a> Companion<'a> {
    pub fn new(world: &'a WorldMap, knowledge: &'a Fcm) -> Result<Self> {
        world.validate()?;
        world.check_concepts(knowledge)?;
        Ok(Self { world, knowledge })
    }

    pub fn world(&self) -> &'a WorldMap {
        self.world
    }

    pub fn knowledge(&self) -> &'a Fcm {
        self.knowledge
    }

    /// Builds a fresh session with the avatar at the world's spawn point
    /// and an initial novelty report.
    pub fn start(
        &self,
        id: impl Into<String>,
        learner_fcm: Fcm,
        profile: CuriosityProfile,
        config: PolicyConfig,
        seed: u64,
    ) -> Result<(SessionState, Vec<Record>)> {
        config.validate()?;
        let mut state = SessionState {
            id: id.into(),
            world_id: self.world.id.clone(),
            seed,
            rng_draws: 0,
            profile,
            config,
            clock: 0,
            world: SessionWorldState::new(self.world, learner_fcm),
            novelty: NoveltyReport::default(),
            wait: None,
            outbox: Vec::new(),
            cooldowns: BTreeMap::new(),
            explored: BTreeSet::new(),
        };
        let mut out = Vec::new();
        self.refresh_novelty(&mut state, &mut out)?;
        self.tick(&mut state, &mut out)?;
        Ok((state, out))
    }

    /// Applies one action. On error the state is left untouched.
    pub fn apply(&self, state: &mut SessionState, action: &Action) -> Result<Vec<Record>> {
        self.apply_batch(state, std::slice::from_ref(action))
    }

    /// Applies a batch atomically: either every action lands or none does.
    pub fn apply_batch(&self, state: &mut SessionState, actions: &[Action]) -> Result<Vec<Record>> {
        let mut next = state.clone();
        let mut out = Vec::new();
        for action in actions {
            self.step(&mut next, action, &mut out)?;
        }
        *state = next;
        Ok(out)
    }

    /// Swaps in a whole new learner map.
    pub fn replace_fcm(&self, state: &mut SessionState, fcm: Fcm) -> Result<Vec<Record>> {
        let mut next = state.clone();
        let mut out = Vec::new();
        next.world.learner_fcm = fcm;
        out.push(Record::FcmReplaced { t: next.clock });
        self.refresh_novelty(&mut next, &mut out)?;
        self.tick(&mut next, &mut out)?;
        *state = next;
        Ok(out)
    }

    pub fn snapshot(&self, state: &SessionState) -> StateSnapshot {
        StateSnapshot {
            session_id: state.id.clone(),
            world_id: state.world_id.clone(),
            clock: state.clock,
            avatar: state.world.avatar,
            engaged: state.world.engaged.clone(),
            nearby: activities_in_vicinity(state.world.avatar, self.world, self.vicinity(state))
                .into_iter()
                .map(|a| a.id.clone())
                .collect(),
            learner_fcm: state.world.learner_fcm.to_document(),
            novelty: state.novelty.clone(),
            wait: state.wait.as_ref().map(|w| WaitStatus {
                candidates: w.candidates.iter().map(|c| c.activity_id.clone()).collect(),
                opened_at: w.opened_at,
                deadline: w.deadline,
                tau_ms: w.tau_ms,
            }),
            prompts_issued: state.outbox.len(),
        }
    }

    fn vicinity(&self, state: &SessionState) -> f64 {
        state.config.vicinity_radius.unwrap_or(self.world.vicinity_radius)
    }

    fn step(&self, state: &mut SessionState, action: &Action, out: &mut Vec<Record>) -> Result<()> {
        let t = action.time();
        let last = state.clock.max(state.world.last_time());
        if t < last {
            return Err(Error::TimeRegression { t, last });
        }
        self.fire_due(state, t, out)?;
        state.clock = t;

        let engaged_before = state.world.engaged.clone();
        match action {
            Action::Move { to, .. } => {
                state.world.move_avatar(self.world, *to, t)?;
                out.push(Record::AvatarMoved { t, to: *to });
            }
            Action::Input { kind, .. } => {
                state.world.record_event(self.world, InputEvent { t, kind: *kind })?;
                out.push(Record::EventIngested { t, kind: *kind });
            }
            Action::Edit { edit, .. } => {
                state.world.apply_fcm_edit(self.knowledge, edit)?;
                out.push(Record::FcmEdited { t, edit: edit.clone() });
                self.refresh_novelty(state, out)?;
            }
            Action::Engage { activity, .. } => {
                let a = self
                    .world
                    .activity(activity)
                    .ok_or_else(|| Error::UnknownActivity(activity.clone()))?;
                if !a.contains(state.world.avatar) {
                    return Err(Error::NotInRange(activity.clone()));
                }
                let kind = EventKind::KeyPress;
                state.world.record_event(self.world, InputEvent { t, kind })?;
                state.world.engaged = Some(a.id.clone());
                out.push(Record::EventIngested { t, kind });
            }
            Action::Respond { prompt, accept, .. } => {
                let entry = state
                    .outbox
                    .get_mut(*prompt)
                    .ok_or_else(|| Error::InvalidParameter(format!("no prompt with index {prompt}")))?;
                entry.acknowledged = Some(Acknowledgment { t, accepted: *accept });
                out.push(Record::PromptResponse {
                    t,
                    index: *prompt,
                    accepted: *accept,
                });
            }
            Action::Tick { .. } => {}
        }
        if let Some(id) = &state.world.engaged {
            if engaged_before.as_ref() != Some(id) {
                out.push(Record::ActivityEngaged {
                    t,
                    activity: id.clone(),
                });
            }
            state.explored.insert(id.clone());
        }
        self.tick(state, out)
    }

    /// Fires every wait whose deadline is at or before `until`.
    fn fire_due(&self, state: &mut SessionState, until: u64, out: &mut Vec<Record>) -> Result<()> {
        while let Some(deadline) = state.wait.as_ref().map(|w| w.deadline).filter(|&d| d <= until) {
            state.clock = deadline;
            self.tick(state, out)?;
        }
        Ok(())
    }

    fn refresh_novelty(&self, state: &mut SessionState, out: &mut Vec<Record>) -> Result<()> {
        let detection = detect(&state.world.learner_fcm, self.knowledge)?;
        state.novelty = detection.report(&self.world.activities);
        out.push(Record::NoveltyComputed {
            t: state.clock,
            c_new: state.novelty.c_new.clone(),
            r_s: state.novelty.r_s.clone(),
            novel: state
                .novelty
                .novel_activities
                .iter()
                .filter(|(_, n)| n.novel)
                .map(|(id, _)| id.clone())
                .collect(),
        });
        if let Some(wait) = &mut state.wait {
            wait.candidates.retain(|c| state.novelty.is_novel(&c.activity_id));
            if wait.candidates.is_empty() {
                state.wait = None;
                out.push(Record::WaitClosed {
                    t: state.clock,
                    reason: WaitCloseReason::Resolved,
                });
            }
        }
        Ok(())
    }

    /// Re-evaluates an open wait, or opens one if novel activities are near.
    fn tick(&self, state: &mut SessionState, out: &mut Vec<Record>) -> Result<()> {
        let now = state.clock;
        if let Some(wait) = &state.wait {
            let mut rng = ChaCha8Rng::seed_from_u64(state.seed);
            rng.set_stream(state.rng_draws);
            let samples: Vec<_> = state.world.samples.iter().copied().collect();
            let snapshot = WaitSnapshot {
                now,
                positions: &samples,
                engaged: state.world.engaged.as_deref(),
            };
            match evaluate_wait(wait, snapshot, state.config.moving_away_samples, &mut rng) {
                WaitDecision::NoAction {
                    reason: NoActionReason::Waiting,
                } => {
                    let (avatar, rho) = (state.world.avatar, self.vicinity(state));
                    let wait = state.wait.as_mut().expect("wait is open");
                    wait.candidates.retain(|c| distance(avatar, c.position) <= rho);
                    if !wait.candidates.is_empty() {
                        return Ok(());
                    }
                    state.wait = None;
                    out.push(Record::WaitClosed {
                        t: now,
                        reason: WaitCloseReason::LeftVicinity,
                    });
                }
                WaitDecision::NoAction {
                    reason: NoActionReason::Engaged,
                } => {
                    state.wait = None;
                    out.push(Record::WaitClosed {
                        t: now,
                        reason: WaitCloseReason::Engaged,
                    });
                }
                WaitDecision::Stimulate { activity_id, cause } => {
                    state.rng_draws += 1;
                    let tau = wait.tau_ms;
                    state.wait = None;
                    out.push(Record::WaitClosed {
                        t: now,
                        reason: cause.into(),
                    });
                    self.issue_prompt(state, &activity_id, tau, out)?;
                }
            }
        }
        self.maybe_open_wait(state, out)
    }

    fn maybe_open_wait(&self, state: &mut SessionState, out: &mut Vec<Record>) -> Result<()> {
        let now = state.clock;
        let candidates: Vec<WaitCandidate> =
            activities_in_vicinity(state.world.avatar, self.world, self.vicinity(state))
                .into_iter()
                .filter(|a| state.novelty.is_novel(&a.id))
                .filter(|a| !state.explored.contains(&a.id))
                .filter(|a| state.world.engaged.as_deref() != Some(a.id.as_str()))
                .filter(|a| state.cooldowns.get(&a.id).is_none_or(|&until| until <= now))
                .map(|a| WaitCandidate {
                    activity_id: a.id.clone(),
                    position: a.position,
                })
                .collect();
        if candidates.is_empty() {
            return Ok(());
        }
        let mean = mean_action_interval(&state.world.events, state.config.fallback_t0_ms).max(1.0);
        let tau = wait_duration(mean, state.config.n)?;
        let wait = WaitState::open(candidates, now, tau, state.world.avatar)?;
        out.push(Record::WaitOpened {
            t: now,
            candidates: wait.candidates.iter().map(|c| c.activity_id.clone()).collect(),
            tau_ms: wait.tau_ms,
            deadline: wait.deadline,
        });
        state.wait = Some(wait);
        Ok(())
    }

    fn issue_prompt(&self, state: &mut SessionState, activity_id: &str, tau: u64, out: &mut Vec<Record>) -> Result<()> {
        let now = state.clock;
        let activity = self
            .world
            .activity(activity_id)
            .ok_or_else(|| Error::UnknownActivity(activity_id.to_owned()))?;
        let triggers = state
            .novelty
            .novel_activities
            .get(activity_id)
            .map(|n| n.triggers.as_slice())
            .unwrap_or_default();
        // something new takes precedence over something surprising
        let (template, concept) = triggers
            .iter()
            .find_map(|t| match *t {
                Trigger::NewConcept(c) => Some((TemplateKind::NewConcept, c)),
                Trigger::SurpriseConcept(_) => None,
            })
            .or_else(|| triggers.first().map(|t| (TemplateKind::SurprisingConcept, t.concept())))
            .ok_or_else(|| Error::InvalidParameter(format!("activity `{activity_id}` is not novel")))?;
        let concept_name = &self
            .knowledge
            .concept(concept)
            .ok_or(Error::UnknownConcept(concept))?
            .name;
        let class = classify_profile(&state.profile, &state.config.profile_thresholds);
        let strategy = strategy_for(class, &state.config.strategy_table);
        let prompt = render_prompt(
            template,
            PromptSubject {
                concept_id: concept,
                concept_name,
                activity_id,
                activity_name: activity.name(),
            },
            &strategy,
            now,
        )?;
        let index = state.outbox.len();
        state.outbox.push(OutboxEntry {
            index,
            prompt: prompt.clone(),
            acknowledged: None,
        });
        state.cooldowns.insert(
            activity_id.to_owned(),
            now + u64::from(state.config.cooldown_factor) * tau,
        );
        out.push(Record::PromptIssued { t: now, index, prompt });
        Ok(())
    }
}
