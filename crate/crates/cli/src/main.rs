//! Batch runner for the toolkit's experiments.
//!
//! Exit status 0 means no violations, 1 means at least one, 2 means the
//! command line or an input file was unusable.

mod experiments;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use experiments::{Flags, Outcome, Usage};
use report::{ExperimentConfig, Report, Timing, Verdict};

#[derive(Parser)]
#[command(name = "profinite", version, about = "Run a toolkit experiment and report violations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, global = true)]
    n: Option<usize>,
    #[arg(long, global = true)]
    k: Option<usize>,
    #[arg(long, global = true)]
    points: Option<usize>,
    #[arg(long, global = true)]
    samples: Option<usize>,
    #[arg(long, global = true)]
    depth: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Pairs with s·t^ω = t·s^ω in K_n generate nilpotent subsemigroups and share ω-powers (--n: largest level).
    OmegaCommute,
    /// a^n and b^n merge in K_n modulo the image of (ab^ω, ba^ω) (--n: largest level).
    PowerMerge,
    /// Decide θ₃ for two pseudowords, written like `ab(ba)^w`.
    Theta3 { x: String, y: String },
    /// Decide θ₄ for two pseudowords.
    Theta4 { x: String, y: String },
    /// Cantor-function kernel against θ₃, exhaustive plus seeded random pairs.
    CantorKernel,
    /// Check a derivation script (--k: number of limit instances required).
    CheckDerivation { file: PathBuf },
    /// Finite K_n quotients separate sampled pairs exactly when θ₄ does.
    Separation,
    /// Adjunction between unary algebras and generated monoids on small carriers.
    Adjunction,
    /// Homomorphisms from the countdown algebra collapse after a repeat.
    Collapse,
    /// Functoriality and separation along towers of onto homomorphisms.
    Tower,
    /// Polish codec round trips, unique readability and decode errors.
    PolishRoundtrip,
    /// The terms t_k, s_k that the Polish form cannot tell apart in the limit.
    PolishCounterexample,
    /// The three ω-expressions agree over small transformation monoids.
    OmegaIdentity,
    /// Separating monoids make the Polish form faithful for unary signatures.
    UnarySeparation,
    /// Write the shipped derivation scripts as JSON into a directory.
    ExportScripts { dir: PathBuf },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::OmegaCommute => "omega-commute",
            Command::PowerMerge => "power-merge",
            Command::Theta3 { .. } => "theta3",
            Command::Theta4 { .. } => "theta4",
            Command::CantorKernel => "cantor-kernel",
            Command::CheckDerivation { .. } => "check-derivation",
            Command::Separation => "separation",
            Command::Adjunction => "adjunction",
            Command::Collapse => "collapse",
            Command::Tower => "tower",
            Command::PolishRoundtrip => "polish-roundtrip",
            Command::PolishCounterexample => "polish-counterexample",
            Command::OmegaIdentity => "omega-identity",
            Command::UnarySeparation => "unary-separation",
            Command::ExportScripts { .. } => "export-scripts",
        }
    }
}

fn dispatch(command: &Command, flags: &Flags, config: &mut ExperimentConfig) -> anyhow::Result<Outcome> {
    use experiments as e;
    match command {
        Command::OmegaCommute => e::omega_commute(flags, config),
        Command::PowerMerge => e::power_merge_cmd(flags, config),
        Command::Theta3 { x, y } => e::theta(3, x, y, flags, config),
        Command::Theta4 { x, y } => e::theta(4, x, y, flags, config),
        Command::CantorKernel => e::cantor_kernel(flags, config),
        Command::CheckDerivation { file } => e::check_derivation_cmd(file, flags, config),
        Command::Separation => e::separation(flags, config),
        Command::Adjunction => e::adjunction(flags, config),
        Command::Collapse => e::collapse(flags, config),
        Command::Tower => e::tower(flags, config),
        Command::PolishRoundtrip => e::polish_roundtrip(flags, config),
        Command::PolishCounterexample => e::polish_counterexample(flags, config),
        Command::OmegaIdentity => e::omega_identity(flags, config),
        Command::UnarySeparation => e::unary_separation(flags, config),
        Command::ExportScripts { dir } => e::export_scripts(dir, flags, config),
    }
}

fn run(cli: &Cli) -> anyhow::Result<Report> {
    let flags = Flags {
        n: cli.n,
        k: cli.k,
        points: cli.points,
        samples: cli.samples,
        depth: cli.depth,
        seed: cli.seed,
    };
    let mut config = ExperimentConfig {
        command: cli.command.name().to_string(),
        ..ExperimentConfig::default()
    };
    let start = Instant::now();
    let outcome = dispatch(&cli.command, &flags, &mut config)?;
    let result = if outcome.violations.is_empty() {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(Report {
        config,
        result,
        violations: outcome.violations,
        stats: outcome.stats,
        version: env!("CARGO_PKG_VERSION"),
        timing: Timing {
            elapsed_ms: start.elapsed().as_millis(),
        },
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            let kind = if e.is::<Usage>() { "usage" } else { "error" };
            eprintln!("{kind}: {e:#}");
            return ExitCode::from(2);
        }
    };
    let mut text = match cli.format {
        Format::Text => report.to_text(),
        Format::Json => serde_json::to_string_pretty(&report).expect("serializable"),
    };
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("error: writing {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    match report.result {
        Verdict::Pass => ExitCode::SUCCESS,
        Verdict::Fail => ExitCode::from(1),
    }
}
