//! Run every bundled scripted learner and compare their metrics.
//!
//!     cargo run --example simulate [SCENARIO]

use curious_companion::catalog::BUNDLED_SCENARIOS;
use curious_companion::sim::{run_scenario, Scenario};
use curious_companion::Catalog;

fn main() -> curious_companion::Result<()> {
    let catalog = Catalog::bundled();
    let only = std::env::args().nth(1);
    for (name, _) in BUNDLED_SCENARIOS {
        if only.as_deref().is_some_and(|o| o != *name) {
            continue;
        }
        let out = run_scenario(&Scenario::bundled(name)?, &catalog)?;
        println!("== {name}");
        println!("{}", out.metrics);
        for p in out.transcript.prompts() {
            println!("  [{} ms] {}", p.issued_at, p.text);
        }
        if only.is_some() {
            print!("\n{}", out.transcript.to_jsonl());
        }
    }
    Ok(())
}
