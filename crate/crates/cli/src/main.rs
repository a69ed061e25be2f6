mod commands;
mod scene;

use clap::{Parser, Subcommand};
use commands::{Invalid, Output};
use scene::Scene;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_INVALID: u8 = 2;
const EXIT_UNDECIDED: u8 = 3;

#[derive(Parser)]
#[command(name = "polystrata", version, about = "Monoids, polysimplicial sets, strata and tempered towers from scene files")]
struct Cli {
    /// Scene file.
    scene: PathBuf,

    /// Directory for reports and artifacts.
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,

    /// Seed for randomized tie-breaking. Nothing is randomized at present.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monoid structure: rank, saturation, faces.
    Monoid {
        #[command(subcommand)]
        action: MonoidCommand,
    },
    /// Properties of a monoid map.
    Map {
        #[command(subcommand)]
        action: MapCommand,
    },
    /// Polysimplicial sets.
    Poly {
        #[command(subcommand)]
        action: PolyCommand,
    },
    /// Fiber complexes of charts and descent data.
    Fibration {
        #[command(subcommand)]
        action: FibrationCommand,
    },
    /// Strata of chart families.
    Strata {
        #[command(subcommand)]
        action: StrataCommand,
    },
    /// Fundamental group of a complex or of the closed fiber of a descent datum.
    Pi1 { id: String },
    /// Extensions by Galois actions and their towers.
    Tempered {
        #[command(subcommand)]
        action: TemperedCommand,
    },
}

#[derive(Subcommand)]
enum MonoidCommand {
    Analyze { id: String },
}

#[derive(Subcommand)]
enum MapCommand {
    Classify {
        id: String,
        /// Degree bound for bounded searches.
        #[arg(long, value_parser = positive)]
        bound: Option<usize>,
        /// Primes for the Kummer check, comma separated.
        #[arg(long, value_delimiter = ',')]
        primes: Vec<u64>,
    },
}

#[derive(Subcommand)]
enum PolyCommand {
    OPoset { id: String },
    InteriorFree { id: String },
    Realize { id: String },
}

#[derive(Subcommand)]
enum FibrationCommand {
    /// Fiber complex over a base face (the closed point by default).
    C { id: String, face: Option<String> },
}

#[derive(Subcommand)]
enum StrataCommand {
    /// Cospecialization of strata from `face1` to the larger `face2`.
    Cospec { family: String, face1: String, face2: String },
}

#[derive(Subcommand)]
enum TemperedCommand {
    Lift { id: String },
    Tower { id: String },
    Cospec { from: String, to: String },
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if n > 0 => Ok(n),
        _ => Err(format!("`{s}` is not a positive integer")),
    }
}

fn dispatch(scene: &Scene, command: &Command) -> Result<Output, Invalid> {
    match command {
        Command::Monoid { action: MonoidCommand::Analyze { id } } => commands::monoid_analyze(scene, id),
        Command::Map { action: MapCommand::Classify { id, bound, primes } } => {
            commands::map_classify(scene, id, *bound, primes.clone())
        }
        Command::Poly { action } => match action {
            PolyCommand::OPoset { id } => commands::poly_o_poset(scene, id),
            PolyCommand::InteriorFree { id } => commands::poly_interior_free(scene, id),
            PolyCommand::Realize { id } => commands::poly_realize(scene, id),
        },
        Command::Fibration { action: FibrationCommand::C { id, face } } => commands::fibration_c(scene, id, face.as_deref()),
        Command::Strata { action: StrataCommand::Cospec { family, face1, face2 } } => {
            commands::strata_cospec(scene, family, face1, face2)
        }
        Command::Pi1 { id } => commands::pi1(scene, id),
        Command::Tempered { action } => match action {
            TemperedCommand::Lift { id } => commands::tempered_lift(scene, id),
            TemperedCommand::Tower { id } => commands::tempered_tower(scene, id),
            TemperedCommand::Cospec { from, to } => commands::tempered_cospec(scene, from, to),
        },
    }
}

fn write_outputs(dir: &Path, out: &Output) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(format!("{}.report.txt", out.stem)), out.report_text())?;
    for (name, body) in &out.artifacts {
        std::fs::write(dir.join(name), body)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let _ = cli.seed;
    let scene = match Scene::load(&cli.scene) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {}: {e}", cli.scene.display());
            return ExitCode::from(EXIT_INVALID);
        }
    };
    let out = match dispatch(&scene, &cli.command) {
        Ok(o) => o,
        Err(Invalid(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_INVALID);
        }
    };
    print!("{}", out.report_text());
    if let Err(e) = write_outputs(&cli.out_dir, &out) {
        eprintln!("error: cannot write to {}: {e}", cli.out_dir.display());
        return ExitCode::FAILURE;
    }
    if out.undecided {
        ExitCode::from(EXIT_UNDECIDED)
    } else {
        ExitCode::SUCCESS
    }
}
