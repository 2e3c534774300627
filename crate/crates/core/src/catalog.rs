//! Worlds and knowledge maps addressable by id.
//!
//! A catalog directory holds `worlds/<id>.json` and `fcm/<id>.json`; the
//! FCM id is the file stem. The fixtures under `fixtures/` are compiled in
//! and available through [`Catalog::bundled`].

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use crate::companion::Companion;
use crate::error::{Error, Result};
use crate::fcm::{Fcm, FcmDocument};
use crate::world::WorldMap;

pub const BUNDLED_FCMS: &[(&str, &str)] = &[
    ("plant-learner", include_str!("../fixtures/fcm/plant-learner.json")),
    ("plant-companion", include_str!("../fixtures/fcm/plant-companion.json")),
    ("expert-learner", include_str!("../fixtures/fcm/expert-learner.json")),
];

pub const BUNDLED_WORLDS: &[&str] = &[include_str!("../fixtures/worlds/cos-plant.json")];

pub const BUNDLED_SCENARIOS: &[(&str, &str)] = &[
    (
        "paper-example",
        include_str!("../fixtures/scenarios/paper-example.json"),
    ),
    ("self-driven", include_str!("../fixtures/scenarios/self-driven.json")),
    (
        "knows-everything",
        include_str!("../fixtures/scenarios/knows-everything.json"),
    ),
    (
        "bored-learner",
        include_str!("../fixtures/scenarios/bored-learner.json"),
    ),
    ("wanderer", include_str!("../fixtures/scenarios/wanderer.json")),
];

/// On-disk location of the fixtures this crate was built with.
pub fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn load_fcm(path: &Path) -> Result<Fcm> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Fcm::try_from(FcmDocument::from_json(&text)?)
}

#[derive(Debug, Clone, Default)]
pub struct Catalog {
    worlds: BTreeMap<String, WorldMap>,
    fcms: BTreeMap<String, Fcm>,
}

impl Catalog {
    pub fn bundled() -> Self {
        let mut catalog = Self::default();
        for (id, text) in BUNDLED_FCMS {
            let doc = FcmDocument::from_json(text).expect("bundled fcm parses");
            catalog.insert_fcm(*id, Fcm::try_from(doc).expect("bundled fcm is valid"));
        }
        for text in BUNDLED_WORLDS {
            catalog
                .insert_world(WorldMap::from_json(text).expect("bundled world is valid"))
                .expect("bundled world resolves");
        }
        catalog
    }

    /// Bundled documents plus anything found under `dir`, which wins on id
    /// clashes. Missing subdirectories are fine.
    pub fn with_dir(dir: &Path) -> Result<Self> {
        let mut catalog = Self::bundled();
        for path in json_files(&dir.join("fcm"))? {
            let id = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_owned();
            catalog.insert_fcm(id, load_fcm(&path)?);
        }
        for path in json_files(&dir.join("worlds"))? {
            let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            catalog.insert_world(WorldMap::from_json(&text)?)?;
        }
        Ok(catalog)
    }

    pub fn insert_fcm(&mut self, id: impl Into<String>, fcm: Fcm) {
        self.fcms.insert(id.into(), fcm);
    }

    /// Adds a world after checking its companion map is known and covers
    /// every activity concept.
    pub fn insert_world(&mut self, world: WorldMap) -> Result<()> {
        world.validate()?;
        world.check_concepts(self.fcm(&world.companion_fcm)?)?;
        self.worlds.insert(world.id.clone(), world);
        Ok(())
    }

    pub fn world(&self, id: &str) -> Result<&WorldMap> {
        self.worlds.get(id).ok_or_else(|| Error::NotFound {
            kind: "world",
            id: id.to_owned(),
        })
    }

    pub fn fcm(&self, id: &str) -> Result<&Fcm> {
        self.fcms.get(id).ok_or_else(|| Error::NotFound {
            kind: "fcm",
            id: id.to_owned(),
        })
    }

    pub fn world_ids(&self) -> impl Iterator<Item = &str> {
        self.worlds.keys().map(String::as_str)
    }

    /// The companion for a world, bound to the world's expert map.
    pub fn companion(&self, world_id: &str) -> Result<Companion<'_>> {
        let world = self.world(world_id)?;
        Companion::new(world, self.fcm(&world.companion_fcm)?)
    }
}

fn json_files(dir: &Path) -> Result<Vec<PathBuf>> {
    if !dir.is_dir() {
        return Ok(Vec::new());
    }
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
        .collect();
    files.sort();
    Ok(files)
}
