//! Golden replay of the plant-transport worked example: a learner who has
//! met eight of the companion's nine concepts and holds one misconception
//! about salt concentration and osmosis.
//!
//! [`replay_dir`] loads the three fixture documents from disk, runs the
//! novelty pipeline and checks every intermediate result against the
//! reference values below.

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::Path;

use crate::catalog::load_fcm;
use crate::error::{Error, Result};
use crate::fcm::{ConceptId, Fcm, FuzzifiedMatrix, SignedFuzzyLabel, SurprisePair, WeightMatrix};
use crate::novelty::{detect, mark_novel, Detection, NoveltyReport};
use crate::world::WorldMap;

pub const LEARNER_FILE: &str = "fcm/plant-learner.json";
pub const COMPANION_FILE: &str = "fcm/plant-companion.json";
pub const WORLD_FILE: &str = "worlds/cos-plant.json";

/// Activity teaching diffusion (C5) and the one teaching osmosis (C7).
pub const DIFFUSION_ACTIVITY: &str = "a1";
pub const OSMOSIS_ACTIVITY: &str = "a2";

pub const GOLDEN_C_NEW: &[u32] = &[9];

/// Nonzero entries of the reduced companion matrix, 1-based.
pub const GOLDEN_REDUCED: &[(usize, usize, f64)] = &[
    (1, 4, -1.0),
    (2, 4, 0.5),
    (3, 4, 0.8),
    (4, 5, 0.8),
    (4, 6, 0.5),
    (4, 7, -0.6),
    (6, 8, -0.1),
    (8, 6, -1.0),
];

pub const GOLDEN_LEARNER_LABELS: &[(usize, usize, &str)] = &[
    (1, 4, "-H"),
    (2, 4, "+M"),
    (3, 4, "+L"),
    (4, 5, "+H"),
    (4, 6, "+L"),
    (4, 7, "+H"),
    (6, 8, "-L"),
];

pub const GOLDEN_COMPANION_LABELS: &[(usize, usize, &str)] = &[
    (1, 4, "-H"),
    (2, 4, "+M"),
    (3, 4, "+H"),
    (4, 5, "+H"),
    (4, 6, "+M"),
    (4, 7, "-M"),
    (6, 8, "-L"),
    (8, 6, "-H"),
];

pub const GOLDEN_R_S: &[(u32, u32)] = &[(3, 4), (4, 6), (4, 7), (8, 6)];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub ok: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct ReplayReport {
    pub detection: Detection,
    pub novelty: NoveltyReport,
    pub checks: Vec<Check>,
}

impl ReplayReport {
    pub fn all_match(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }
}

fn dense<T: Clone + Default>(n: usize, sparse: impl IntoIterator<Item = (usize, usize, T)>) -> Vec<T> {
    let mut cells = vec![T::default(); n * n];
    for (r, c, v) in sparse {
        cells[(r - 1) * n + (c - 1)] = v;
    }
    cells
}

fn cells<T: Clone>(m: &crate::matrix::ConceptMatrix<T>) -> Vec<T> {
    m.rows().flat_map(|r| r.iter().cloned()).collect()
}

fn check_weights(name: &'static str, got: &WeightMatrix, golden: &[(usize, usize, f64)]) -> Check {
    let want = dense(8, golden.iter().copied());
    let got_cells = cells(got);
    let ok = got.dim() == 8 && got_cells.iter().zip(&want).all(|(a, b)| (a - b).abs() < 1e-12);
    Check {
        name,
        ok,
        detail: format!("{}x{} matrix", got.dim(), got.dim()),
    }
}

fn check_labels(name: &'static str, got: &FuzzifiedMatrix, golden: &[(usize, usize, &str)]) -> Check {
    let want = dense(
        8,
        golden
            .iter()
            .map(|&(r, c, s)| (r, c, s.parse::<SignedFuzzyLabel>().expect("golden label"))),
    );
    let got_cells = cells(got);
    let mismatches: Vec<String> = got_cells
        .iter()
        .zip(&want)
        .enumerate()
        .filter(|(_, (a, b))| a != b)
        .map(|(k, (a, b))| format!("[{},{}] {a} != {b}", k / 8 + 1, k % 8 + 1))
        .collect();
    Check {
        name,
        ok: got.dim() == 8 && mismatches.is_empty(),
        detail: if mismatches.is_empty() {
            "all labels match".into()
        } else {
            mismatches.join(", ")
        },
    }
}

/// Runs the worked example on already-loaded documents.
pub fn replay(learner: &Fcm, companion: &Fcm, world: &WorldMap) -> Result<ReplayReport> {
    let detection = detect(learner, companion)?;
    let root: Vec<_> = [DIFFUSION_ACTIVITY, OSMOSIS_ACTIVITY]
        .iter()
        .map(|id| world.activity(id).ok_or_else(|| Error::UnknownActivity((*id).into())))
        .collect::<Result<_>>()?;
    let novelty = mark_novel(root, detection.c_new(), &detection.r_s_companion());

    let want_new: BTreeSet<ConceptId> = GOLDEN_C_NEW.iter().copied().map(ConceptId).collect();
    let want_rs: BTreeSet<SurprisePair> = GOLDEN_R_S.iter().map(|&(i, j)| SurprisePair::new(i, j)).collect();
    let fmt_set = |s: &BTreeSet<SurprisePair>| s.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ");

    let checks = vec![
        Check {
            name: "C_new",
            ok: detection.c_new() == &want_new,
            detail: format!("{:?}", detection.c_new()),
        },
        check_weights("reduced companion matrix", &detection.reduced, GOLDEN_REDUCED),
        check_labels("learner labels", &detection.learner_fuzzified, GOLDEN_LEARNER_LABELS),
        check_labels(
            "companion labels",
            &detection.companion_fuzzified,
            GOLDEN_COMPANION_LABELS,
        ),
        Check {
            name: "R_S",
            ok: detection.r_s == want_rs,
            detail: format!("{{{}}}", fmt_set(&detection.r_s)),
        },
        Check {
            name: "osmosis activity novel",
            ok: novelty.is_novel(OSMOSIS_ACTIVITY),
            detail: format!("{:?}", novelty.novel_activities.get(OSMOSIS_ACTIVITY)),
        },
        Check {
            name: "diffusion activity not novel",
            ok: !novelty.is_novel(DIFFUSION_ACTIVITY),
            detail: format!("{:?}", novelty.novel_activities.get(DIFFUSION_ACTIVITY)),
        },
    ];
    Ok(ReplayReport {
        detection,
        novelty,
        checks,
    })
}

/// Loads the fixture documents under `dir` and replays them.
pub fn replay_dir(dir: &Path) -> Result<ReplayReport> {
    let learner = load_fcm(&dir.join(LEARNER_FILE))?;
    let companion = load_fcm(&dir.join(COMPANION_FILE))?;
    let world_path = dir.join(WORLD_FILE);
    let text = fs::read_to_string(&world_path).map_err(|e| Error::io(&world_path, e))?;
    replay(&learner, &companion, &WorldMap::from_json(&text)?)
}

impl fmt::Display for ReplayReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = &self.detection;
        let new: Vec<String> = d.c_new().iter().map(ToString::to_string).collect();
        writeln!(f, "C_new = {{{}}}", new.join(", "))?;
        writeln!(f, "\nlearner (fuzzified):\n{}", d.learner_fuzzified)?;
        writeln!(f, "companion, reduced (fuzzified):\n{}", d.companion_fuzzified)?;
        let rs: Vec<String> = d.r_s.iter().map(ToString::to_string).collect();
        writeln!(f, "R_S = {{{}}}\n", rs.join(", "))?;
        for (id, n) in &self.novelty.novel_activities {
            let verdict = if n.novel { "potentially novel" } else { "not novel" };
            writeln!(f, "activity {id}: {verdict} {:?}", n.triggers)?;
        }
        writeln!(f)?;
        for c in &self.checks {
            writeln!(
                f,
                "[{}] {}: {}",
                if c.ok { "match" } else { "MISMATCH" },
                c.name,
                c.detail
            )?;
        }
        Ok(())
    }
}
