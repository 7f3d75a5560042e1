use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lagrangian_surgery::fibre::DEFAULT_RULE;
use lagrangian_surgery::report::{self, Report, SurgeryParams};

/// Invariant checks for symplectic 6-manifolds built by Lagrangian surgery.
///
/// Inputs are JSON files or fixture names (see `LAGSURG_FIXTURES`).
#[derive(Parser)]
#[command(name = "lagsurg", version)]
struct Cli {
    /// Print the full report as JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Kähler obstruction tests on a cohomology profile.
    ProfileCheck {
        /// Profile file, fixture name, or `salvage:alpha,beta,eps,A,B,sign`.
        profile: String,
        /// Class to test, as comma-separated rationals in the profile's basis.
        #[arg(long, allow_hyphen_values = true)]
        omega: Option<String>,
    },
    /// Apply a surgery and report the new invariants.
    Surgery {
        /// conifold, odp-blowup, triple-point or an-chain.
        kind: String,
        /// Profile file or fixture name (not needed for an-chain).
        profile: Option<String>,
        /// Sphere count (conifold) or chain length (an-chain).
        #[arg(long)]
        n: Option<i64>,
        /// Rank of the vanishing classes.
        #[arg(long)]
        r: Option<i64>,
        /// Symplectic area of the exceptional curve (odp-blowup), default 1.
        #[arg(long)]
        a: Option<String>,
    },
    /// Check that a Dehn-twist word closes up.
    Monodromy {
        /// Word file or fixture name.
        word: String,
    },
    /// Fibre-product nodes and matching-sphere intersection graph.
    FibreProduct {
        first: String,
        second: String,
        /// Intersection rule id.
        #[arg(long, default_value = DEFAULT_RULE)]
        rule: String,
    },
    /// Numerical checks of the node and cotangent local models.
    LocalModels {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        /// Sphere dimension.
        #[arg(long, default_value_t = 3)]
        n: usize,
    },
    /// Look up (b2, c1³) in the table of Fano threefolds.
    FanoLookup { b2: u32, c1cubed: i64 },
}

fn run(command: Command) -> Report {
    match command {
        Command::ProfileCheck { profile, omega } => report::cmd_profile_check(&profile, omega.as_deref()),
        Command::Surgery { kind, profile, n, r, a } => match SurgeryParams::from_kind(&kind, n, r, a.as_deref()) {
            Ok(params) => report::cmd_surgery(profile.as_deref(), &params),
            Err(e) => Report::input_error("surgery", serde_json::json!({ "kind": kind }), &e),
        },
        Command::Monodromy { word } => report::cmd_monodromy(&word),
        Command::FibreProduct { first, second, rule } => report::cmd_fibre_product(&first, &second, &rule),
        Command::LocalModels { seed, samples, n } => report::cmd_local_models(seed, samples, n),
        Command::FanoLookup { b2, c1cubed } => report::cmd_fano_lookup(b2, c1cubed),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = run(cli.command);
    if cli.json {
        println!("{}", report.to_json_string());
    } else {
        print!("{}", report.render_text());
    }
    ExitCode::from(report.exit_code as u8)
}
