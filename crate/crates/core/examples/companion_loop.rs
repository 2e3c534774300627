//! Drive a companion session by hand: walk the avatar around the world,
//! let time pass, correct the learner's map and watch the companion react.
//!
//!     cargo run --example companion_loop

use curious_companion::fcm::ConceptId;
use curious_companion::world::FcmEdit;
use curious_companion::{Action, Catalog, CuriosityProfile, PolicyConfig, Position, Record};

fn show(records: &[Record]) {
    for r in records {
        println!("  {}", serde_json::to_string(r).unwrap());
    }
}

fn main() -> curious_companion::Result<()> {
    let catalog = Catalog::bundled();
    let companion = catalog.companion("cos-plant")?;
    let learner = catalog.fcm("plant-learner")?.clone();
    let profile = CuriosityProfile::new(vec![4, 5, 3, 4])?;
    let (mut state, records) = companion.start("demo", learner, profile, PolicyConfig::default(), 1)?;
    println!("session started");
    show(&records);

    let steps = [
        Action::Move {
            t: 1_000,
            to: Position::new(50.0, 52.0, 0.0),
        },
        Action::Tick { t: 10_000 },
        // the learner fixes the misconception about salt and osmosis
        Action::Edit {
            t: 12_000,
            edit: FcmEdit::SetEdge {
                from: ConceptId(4),
                to: ConceptId(7),
                w: -0.6,
            },
        },
        Action::Move {
            t: 13_000,
            to: Position::new(78.0, 79.0, 0.0),
        },
        Action::Tick { t: 60_000 },
    ];
    for action in &steps {
        println!("{}", serde_json::to_string(action).unwrap());
        show(&companion.apply(&mut state, action)?);
    }

    println!("\noutbox:");
    for entry in &state.outbox {
        println!(
            "  #{} at {} ms: {}",
            entry.index,
            entry.prompt.issued_at,
            entry.prompt.full_text()
        );
    }
    Ok(())
}
