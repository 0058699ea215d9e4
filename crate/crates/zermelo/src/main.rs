use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use zermelo::config::Tolerances;
use zermelo::scenario::{run_scenario, Scenario};

/// Verification workbench for Randers metrics built from navigation data.
#[derive(Parser)]
#[command(name = "zermelo", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the suites requested by a scenario config.
    Verify {
        /// Path to a scenario JSON file.
        scenario: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Run the reduced invariant sweep of every module.
    Selftest,
    /// Parse an expression and print its canonical form.
    ExprCheck {
        /// Expression text, e.g. "x1^2 - x2^2".
        text: String,
    },
}

#[derive(Args)]
struct Overrides {
    /// Override the sampling seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the number of levels.
    #[arg(long)]
    levels: Option<usize>,
    /// Override the per-level sample count.
    #[arg(long)]
    samples: Option<usize>,
    /// Override the absolute per-level constancy tolerance.
    #[arg(long)]
    tol_abs: Option<f64>,
    /// Override the relative per-level constancy tolerance.
    #[arg(long)]
    tol_rel: Option<f64>,
    /// Directory for CSV output (one file per scenario).
    #[arg(long)]
    csv_dir: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Verify {
            scenario,
            overrides,
        } => verify(&scenario, &overrides),
        Command::Selftest => {
            let mut out = std::io::stdout();
            zermelo::selftest::selftest(&Tolerances::default(), &mut out)
        }
        Command::ExprCheck { text } => expr_check(&text),
    };
    ExitCode::from(code as u8)
}

fn verify(path: &PathBuf, overrides: &Overrides) -> i32 {
    let mut sc = match Scenario::from_path(path) {
        Ok(sc) => sc,
        Err(e) => {
            eprintln!("{}", e);
            return 2;
        }
    };
    if let Some(seed) = overrides.seed {
        sc.sampling.seed = seed;
    }
    if let Some(levels) = overrides.levels {
        sc.sampling.levels = levels;
    }
    if let Some(samples) = overrides.samples {
        sc.sampling.count = samples;
    }
    if let Some(tol) = overrides.tol_abs {
        sc.tolerances.level_abs = tol;
    }
    if let Some(tol) = overrides.tol_rel {
        sc.tolerances.level_rel = tol;
    }
    let run = run_scenario(&sc);
    print!("{}", run.report());
    if let (Some(dir), Some(csv)) = (&overrides.csv_dir, &run.csv) {
        if let Err(e) = std::fs::create_dir_all(dir)
            .and_then(|_| std::fs::write(dir.join(format!("{}.csv", run.name)), csv))
        {
            eprintln!("csv error: {}", e);
            return 2;
        }
    }
    run.exit_code
}

fn expr_check(text: &str) -> i32 {
    match zermelo::expr::parse_expr(text) {
        Ok(ast) => {
            println!("parsed: {}", ast);
            println!("coordinates used: {}", ast.min_dim());
            0
        }
        Err(e) => {
            eprintln!("{}", e);
            2
        }
    }
}
