//! A curiosity-stimulating companion for virtual learning environments.
//!
//! The companion compares a learner's fuzzy cognitive map (FCM) with its own
//! expert map, finds concepts the learner has never met and relations the
//! learner holds with a different strength or sign, and uses those to spot
//! learning activities that would be novel or surprising. When the learner
//! lingers near such an activity without engaging, it issues a short prompt
//! shaped by the learner's curiosity profile.
//!
//! - [`fcm`]: maps, validation, fuzzification and comparison
//! - [`novelty`]: the detection pipeline and activity marking
//! - [`world`]: the 3-D world model and per-session world state
//! - [`policy`]: wait timing, profile classification and prompt rendering
//! - [`companion`]: the session state machine shared by the simulator and
//!   the HTTP service
//! - [`sim`]: scripted learners and two-sample statistics
//! - [`service`]: the HTTP session API

// `!(x > 0.0)` is used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod companion;
pub mod error;
pub mod fcm;
pub mod matrix;
pub mod novelty;
pub mod policy;
pub mod replay;
pub mod service;
pub mod sim;
pub mod world;

pub use catalog::Catalog;
pub use companion::{Action, Companion, Record, SessionState};
pub use error::{Error, Result};
pub use fcm::{Concept, ConceptId, Fcm, FcmDocument, SignedFuzzyLabel, SurprisePair};
pub use novelty::{detect, Detection, LearningActivity, NoveltyReport};
pub use policy::{CuriosityProfile, PolicyConfig, Prompt};
pub use world::{Position, WorldMap};
