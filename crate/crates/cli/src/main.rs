mod algebra;
mod geometry;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Generalized cluster algebras and shear coordinates on orbifold surfaces.
///
/// Exit status is 0 when every check passes, 1 when one fails and 2 on bad
/// input. Random sweeps use ChaCha8 seeded by `--seed`.
#[derive(Parser, Debug)]
#[command(name = "orbiteich", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Seed for the ChaCha8 generator.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Overrides the check's tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Print the report as JSON.
    #[arg(long, global = true)]
    pub json: bool,
}

impl Global {
    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    pub fn tol(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Mutate a seed along directions, or apply a move script to a spine.
    Mutate(algebra::MutateArgs),
    /// Check that mutation sequences only divide exactly.
    CheckLaurent(algebra::LaurentArgs),
    /// Sign of every coefficient on rank-2 geometric seeds.
    CheckPositivity(algebra::PositivityArgs),
    /// Explore the exchange graph of a fixed-coefficient seed.
    FiniteType(algebra::FiniteTypeArgs),
    /// Golden A2, B2 and G2 cycles against the printed formulas.
    Rank2Cycles(algebra::CycleArgs),
    /// Evaluate words on a spine, or sample rotation-free words.
    Geodesic(geometry::GeodesicArgs),
    /// Polygon identities for rotations around orbifold points.
    VerifyIdentities(geometry::IdentityArgs),
    /// Lambda-length relation at an orbifold point.
    CcPrime(geometry::CcPrimeArgs),
    /// Poisson matrix, center and flip compatibility.
    Poisson(geometry::PoissonArgs),
    /// Geodesic functions under flips and spiral inversions.
    Invariance(geometry::InvarianceArgs),
}

/// Result of a subcommand: a serializable report plus its rendering.
pub struct Outcome {
    pub pass: bool,
    pub report: serde_json::Value,
    pub text: String,
}

impl Outcome {
    pub fn new<T: Serialize>(pass: bool, report: &T, text: String) -> Outcome {
        Outcome {
            pass,
            report: serde_json::to_value(report).expect("reports serialize"),
            text,
        }
    }
}

pub fn read_input(path: &PathBuf) -> anyhow::Result<String> {
    std::fs::read_to_string(path).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = cli.global;
    let outcome = match cli.command {
        Command::Mutate(a) => algebra::mutate(&g, a),
        Command::CheckLaurent(a) => algebra::check_laurent(&g, a),
        Command::CheckPositivity(a) => algebra::check_positivity(&g, a),
        Command::FiniteType(a) => algebra::finite_type(&g, a),
        Command::Rank2Cycles(a) => algebra::rank2_cycles(&g, a),
        Command::Geodesic(a) => geometry::geodesic(&g, a),
        Command::VerifyIdentities(a) => geometry::verify_identities(&g, a),
        Command::CcPrime(a) => geometry::cc_prime(&g, a),
        Command::Poisson(a) => geometry::poisson(&g, a),
        Command::Invariance(a) => geometry::invariance(&g, a),
    };
    match outcome {
        Ok(o) => {
            if g.json {
                println!("{}", serde_json::to_string_pretty(&o.report).expect("json"));
            } else {
                print!("{}", o.text);
            }
            if o.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
