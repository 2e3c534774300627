//! Replay the plant-transport worked example from the fixture files and
//! check every intermediate result against its golden value.
//!
//!     cargo run --example worked_example [FIXTURE_DIR]

use std::path::PathBuf;
use std::process::ExitCode;

use curious_companion::catalog::fixtures_dir;
use curious_companion::replay::replay_dir;

fn main() -> ExitCode {
    let dir = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(fixtures_dir);
    match replay_dir(&dir) {
        Ok(report) => {
            print!("{report}");
            if report.all_match() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
    }
}
