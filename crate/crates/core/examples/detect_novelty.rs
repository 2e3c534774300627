//! Diff a learner's map against the companion's and mark which activities
//! in the world would be new or surprising.
//!
//!     cargo run --example detect_novelty

use curious_companion::novelty::{activities_in_vicinity, detect};
use curious_companion::{Catalog, Position};

fn main() -> curious_companion::Result<()> {
    let catalog = Catalog::bundled();
    let learner = catalog.fcm("plant-learner")?;
    let companion = catalog.fcm("plant-companion")?;
    let world = catalog.world("cos-plant")?;

    let detection = detect(learner, companion)?;
    for id in detection.c_new() {
        let name = &companion.concept(*id).expect("known concept").name;
        println!("new to the learner: {id} {name}");
    }
    for pair in &detection.r_s {
        let (from, to) = (learner.concept(pair.i).unwrap(), learner.concept(pair.j).unwrap());
        println!(
            "surprising: {} -> {}  learner {} vs companion {}",
            from.name,
            to.name,
            detection.learner_fuzzified.get(pair.i, pair.j).unwrap(),
            detection.companion_fuzzified.get(pair.i, pair.j).unwrap(),
        );
    }

    let report = detection.report(&world.activities);
    let here = Position::new(50.0, 50.0, 0.0);
    println!("\nactivities within {} of {here:?}:", world.vicinity_radius);
    for a in activities_in_vicinity(here, world, world.vicinity_radius) {
        let verdict = if report.is_novel(&a.id) { "novel" } else { "familiar" };
        println!("  {} ({}): {verdict}", a.id, a.name());
    }
    Ok(())
}
