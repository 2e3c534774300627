//! Deterministic scripted learners.
//!
//! A [`Scenario`] names a world, a starting learner map and a behaviour
//! script. [`run_scenario`] drives the same [`Companion`] the HTTP service
//! uses, on a simulated clock that only moves with the script, and returns
//! the full [`Transcript`] plus summary [`Metrics`].

pub mod stats;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::catalog::Catalog;
use crate::companion::{Action, Companion, Record, SessionState};
use crate::error::{Error, Result};
use crate::policy::{CuriosityProfile, EventKind, PolicyConfig};
use crate::world::{FcmEdit, Position};

pub use stats::{improvement_pct, welch_t, SamplesFile, SpreadKind, SurveySample, WelchResult};

fn default_gap() -> u64 {
    500
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "snake_case")]
pub enum ScriptStep {
    MoveTo {
        to: Position,
    },
    Idle {
        ms: u64,
    },
    InputBurst {
        kind: EventKind,
        count: u32,
        gap_ms: u64,
    },
    /// Walk into the activity and interact with it.
    EngageActivity {
        id: String,
    },
    EditFcm {
        edit: FcmEdit,
    },
    /// Take up the latest unanswered prompt: acknowledge it, then engage
    /// the prompted activity.
    AcceptPrompt,
    IgnorePrompt,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub world: String,
    pub learner_fcm: String,
    /// Defaults to the world's own companion map.
    #[serde(default)]
    pub companion_fcm: Option<String>,
    pub profile: CuriosityProfile,
    pub seed: u64,
    #[serde(default)]
    pub policy: PolicyConfig,
    /// Simulated time consumed by each discrete learner action.
    #[serde(default = "default_gap")]
    pub action_gap_ms: u64,
    pub script: Vec<ScriptStep>,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::parse("scenario document", e))
    }

    pub fn bundled(name: &str) -> Result<Self> {
        let (_, text) = crate::catalog::BUNDLED_SCENARIOS
            .iter()
            .find(|(n, _)| *n == name)
            .ok_or_else(|| Error::NotFound {
                kind: "scenario",
                id: name.to_owned(),
            })?;
        Self::from_json(text)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Metrics {
    pub prompts_issued: usize,
    pub prompts_accepted: usize,
    pub activities_engaged: usize,
    pub time_idle_ms: u64,
}

impl fmt::Display for Metrics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "prompts_issued={}", self.prompts_issued)?;
        writeln!(f, "prompts_accepted={}", self.prompts_accepted)?;
        writeln!(f, "activities_engaged={}", self.activities_engaged)?;
        write!(f, "time_idle_ms={}", self.time_idle_ms)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptHeader {
    pub scenario: String,
    pub world: String,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Transcript {
    pub header: TranscriptHeader,
    pub records: Vec<Record>,
}

impl Transcript {
    /// JSON Lines: the header, then one record per line.
    pub fn to_jsonl(&self) -> String {
        let mut out = serde_json::to_string(&self.header).expect("header serialises");
        out.push('\n');
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("record serialises"));
            out.push('\n');
        }
        out
    }

    pub fn prompts(&self) -> impl Iterator<Item = &crate::policy::Prompt> {
        self.records.iter().filter_map(|r| match r {
            Record::PromptIssued { prompt, .. } => Some(prompt),
            _ => None,
        })
    }

    /// Counts derived from the records alone.
    pub fn metrics(&self, time_idle_ms: u64) -> Metrics {
        let count = |f: fn(&Record) -> bool| self.records.iter().filter(|r| f(r)).count();
        Metrics {
            prompts_issued: count(|r| matches!(r, Record::PromptIssued { .. })),
            prompts_accepted: count(|r| matches!(r, Record::PromptResponse { accepted: true, .. })),
            activities_engaged: count(|r| matches!(r, Record::ActivityEngaged { .. })),
            time_idle_ms,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub transcript: Transcript,
    pub metrics: Metrics,
    pub final_state: SessionState,
}

struct Runner<'a> {
    companion: Companion<'a>,
    state: SessionState,
    records: Vec<Record>,
    clock: u64,
}

impl Runner<'_> {
    fn act(&mut self, action: Action) -> Result<()> {
        self.records.extend(self.companion.apply(&mut self.state, &action)?);
        Ok(())
    }

    fn latest_pending_prompt(&self) -> Result<(usize, String)> {
        self.state
            .outbox
            .iter()
            .rev()
            .find(|e| e.acknowledged.is_none())
            .map(|e| (e.index, e.prompt.activity_id.clone()))
            .ok_or_else(|| Error::InvalidScript("no unanswered prompt to respond to".into()))
    }

    fn engage(&mut self, id: &str, gap: u64) -> Result<()> {
        let target = self
            .companion
            .world()
            .activity(id)
            .ok_or_else(|| Error::UnknownActivity(id.to_owned()))?
            .position;
        self.clock += gap;
        self.act(Action::Move {
            t: self.clock,
            to: target,
        })?;
        self.clock += gap;
        self.act(Action::Engage {
            t: self.clock,
            activity: id.to_owned(),
        })
    }
}

/// Runs a scenario against documents from `catalog`.
pub fn run_scenario(scenario: &Scenario, catalog: &Catalog) -> Result<RunOutput> {
    let world = catalog.world(&scenario.world)?;
    let knowledge_id = scenario.companion_fcm.as_deref().unwrap_or(&world.companion_fcm);
    let companion = Companion::new(world, catalog.fcm(knowledge_id)?)?;
    let learner = catalog.fcm(&scenario.learner_fcm)?.clone();
    let (state, records) = companion.start(
        scenario.name.clone(),
        learner,
        scenario.profile.clone(),
        scenario.policy.clone(),
        scenario.seed,
    )?;
    let mut run = Runner {
        companion,
        state,
        records,
        clock: 0,
    };
    let gap = scenario.action_gap_ms;
    let mut idle = 0;

    for (k, step) in scenario.script.iter().enumerate() {
        let step_err = |e: Error| Error::InvalidScript(format!("step {}: {e}", k + 1));
        match step {
            ScriptStep::MoveTo { to } => {
                run.clock += gap;
                run.act(Action::Move { t: run.clock, to: *to })
            }
            ScriptStep::Idle { ms } => {
                run.clock += ms;
                idle += ms;
                run.act(Action::Tick { t: run.clock })
            }
            ScriptStep::InputBurst { kind, count, gap_ms } => (0..*count).try_for_each(|_| {
                run.clock += gap_ms;
                run.act(Action::Input {
                    t: run.clock,
                    kind: *kind,
                })
            }),
            ScriptStep::EngageActivity { id } => run.engage(id, gap),
            ScriptStep::EditFcm { edit } => {
                run.clock += gap;
                run.act(Action::Edit {
                    t: run.clock,
                    edit: edit.clone(),
                })
            }
            ScriptStep::AcceptPrompt => run.latest_pending_prompt().and_then(|(index, activity)| {
                run.clock += gap;
                run.act(Action::Respond {
                    t: run.clock,
                    prompt: index,
                    accept: true,
                })?;
                run.engage(&activity, gap)
            }),
            ScriptStep::IgnorePrompt => run.latest_pending_prompt().and_then(|(index, _)| {
                run.clock += gap;
                run.act(Action::Respond {
                    t: run.clock,
                    prompt: index,
                    accept: false,
                })
            }),
        }
        .map_err(step_err)?;
    }

    let transcript = Transcript {
        header: TranscriptHeader {
            scenario: scenario.name.clone(),
            world: scenario.world.clone(),
            seed: scenario.seed,
        },
        records: run.records,
    };
    let metrics = transcript.metrics(idle);
    Ok(RunOutput {
        transcript,
        metrics,
        final_state: run.state,
    })
}
