use std::fs;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use curious_companion::catalog::{fixtures_dir, Catalog};
use curious_companion::fcm::{validate_fcm, FcmDocument};
use curious_companion::replay::replay_dir;
use curious_companion::service::{self, DATA_DIR_ENV};
use curious_companion::sim::{run_scenario, SamplesFile, Scenario};
use curious_companion::Error;

#[derive(Parser)]
#[command(
    name = "curious-companion",
    version,
    about = "Curiosity companion: novelty detection, simulation and session service"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check an FCM document and list every violation.
    ValidateFcm { path: PathBuf },
    /// Replay the plant-transport worked example against its golden values.
    PaperExample {
        /// Directory holding fcm/ and worlds/ fixtures.
        #[arg(long, default_value_os_t = fixtures_dir())]
        fixtures: PathBuf,
    },
    /// Run a scripted learner and print its metrics.
    Run {
        /// Scenario file, or the name of a bundled scenario.
        scenario: String,
        #[arg(long)]
        seed: Option<u64>,
        /// Where to write the JSON Lines transcript.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Extra catalog directory with fcm/ and worlds/.
        #[arg(long)]
        catalog: Option<PathBuf>,
    },
    /// Welch's t for two summarised samples.
    StatsWelch { samples: PathBuf },
    /// Serve the HTTP session API.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, env = DATA_DIR_ENV)]
        data_dir: Option<PathBuf>,
    },
}

/// Domain failures exit 1; usage and I/O problems exit 2.
enum Failure {
    Domain(String),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io { .. } | Error::Parse { .. } | Error::NotFound { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Domain(e.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e).into())
}

fn validate(path: &Path) -> Result<(), Failure> {
    let doc = FcmDocument::from_json(&read(path)?)?;
    let report = validate_fcm(&doc);
    if report.is_ok() {
        println!(
            "{}: ok ({} concepts, {} edges)",
            path.display(),
            doc.concepts.len(),
            doc.edges.len()
        );
        return Ok(());
    }
    for v in &report.violations {
        println!("{v}");
    }
    Err(Failure::Domain(format!("{} violation(s)", report.violations.len())))
}

fn paper_example(fixtures: &Path) -> Result<(), Failure> {
    let report = replay_dir(fixtures)?;
    print!("{report}");
    if report.all_match() {
        Ok(())
    } else {
        Err(Failure::Domain(
            "worked example does not match the golden values".into(),
        ))
    }
}

fn run(scenario: &str, seed: Option<u64>, out: Option<&Path>, catalog: Option<&Path>) -> Result<(), Failure> {
    let path = Path::new(scenario);
    let mut sc = if path.is_file() {
        Scenario::from_json(&read(path)?)?
    } else {
        Scenario::bundled(scenario)?
    };
    if let Some(seed) = seed {
        sc.seed = seed;
    }
    let catalog = match catalog {
        Some(dir) => Catalog::with_dir(dir)?,
        None => Catalog::bundled(),
    };
    let output = run_scenario(&sc, &catalog)?;
    if let Some(out) = out {
        fs::write(out, output.transcript.to_jsonl()).map_err(|e| Failure::from(Error::io(out, e)))?;
    }
    println!("{}", output.metrics);
    Ok(())
}

fn stats(samples: &Path) -> Result<(), Failure> {
    let file = SamplesFile::from_json(&read(samples)?)?;
    let r = file.evaluate()?;
    let verdict = if r.significant {
        "Significant"
    } else {
        "Not significant"
    };
    println!("t={:.3} {verdict}", r.t);
    Ok(())
}

fn serve(port: u16, data_dir: Option<PathBuf>) -> Result<(), Failure> {
    let rt = tokio::runtime::Runtime::new().map_err(|e| Failure::Usage(e.to_string()))?;
    let addr = SocketAddr::from(([0, 0, 0, 0], port));
    rt.block_on(service::serve(addr, data_dir))?;
    Ok(())
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::from_default_env())
        .with_writer(std::io::stderr)
        .init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::ValidateFcm { path } => validate(&path),
        Command::PaperExample { fixtures } => paper_example(&fixtures),
        Command::Run {
            scenario,
            seed,
            out,
            catalog,
        } => run(&scenario, seed, out.as_deref(), catalog.as_deref()),
        Command::StatsWelch { samples } => stats(&samples),
        Command::Serve { port, data_dir } => serve(port, data_dir),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
