use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand as ClapSubcommand};
use ergowalk_cli::{output_dir, parse_config, run_experiment, Subcommand};

#[derive(Parser)]
#[command(name = "ergowalk", version, about = "Run time-average experiments from JSON configs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(ClapSubcommand)]
enum Command {
    /// Discrete torus scenarios
    Lattice(RunArgs),
    /// Periodic graph scenarios
    Crystal(RunArgs),
    /// Continuous torus scenarios
    Torus(RunArgs),
    /// Sphere scenarios
    Sphere(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output directory; defaults to $ERGOWALK_OUT_DIR/<scenario> or results/<scenario>
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
    /// Eigenvalue grouping tolerance for crystal scenarios
    #[arg(long)]
    tolerance: Option<f64>,
}

const EXIT_FAILED: u8 = 1;
const EXIT_INVALID: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (subcommand, args) = match cli.command {
        Command::Lattice(a) => (Subcommand::Lattice, a),
        Command::Crystal(a) => (Subcommand::Crystal, a),
        Command::Torus(a) => (Subcommand::Torus, a),
        Command::Sphere(a) => (Subcommand::Sphere, a),
    };
    let mut config = match parse_config(&args.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INVALID);
        }
    };
    if config.subcommand != subcommand {
        eprintln!(
            "error: scenario {} belongs to the {} subcommand, not {subcommand}",
            config.scenario.name(),
            config.subcommand
        );
        return ExitCode::from(EXIT_INVALID);
    }
    if let Some(tol) = args.tolerance {
        if !(tol > 0.0 && tol.is_finite()) {
            eprintln!("error: --tolerance must be positive, got {tol}");
            return ExitCode::from(EXIT_INVALID);
        }
        config.tolerance = Some(tol);
    }
    if config.tolerance.is_some() && subcommand != Subcommand::Crystal {
        eprintln!("note: the grouping tolerance only affects crystal scenarios");
    }
    if let Some(n) = args.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(EXIT_INVALID);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot start the thread pool: {e}");
            return ExitCode::from(EXIT_INVALID);
        }
    }
    let report = match run_experiment(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INVALID);
        }
    };
    for check in &report.checks {
        println!("{}", check.describe());
    }
    let dir = output_dir(args.out.as_deref(), &config);
    if let Err(e) = report.write(&dir) {
        eprintln!("error: cannot write {}: {e}", dir.display());
        return ExitCode::from(EXIT_INVALID);
    }
    println!("wrote {}", dir.display());
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAILED)
    }
}
