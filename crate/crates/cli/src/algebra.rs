use std::fmt::Write;
use std::path::PathBuf;

use anyhow::Context;
use clap::Args;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use orbiteich::cluster::golden::{verify_cycle, Rank2Type};
use orbiteich::cluster::random::{random_directions, random_seed, SeedShape};
use orbiteich::cluster::{
    check_laurent_bounded, finite_type_probe, geometric_rank2_seed, mutation_sequence, Coefficient, CoefficientMode,
    GenSeed, LaurentReport, SeedFile,
};
use orbiteich::{CyclotomicField, PolyRing};
use orbiteich::fatgraph::SpineFile;
use orbiteich::mcg::{apply_move, Move, ShearUpdate};

use crate::{read_input, Global, Outcome};

fn load_seed(path: &PathBuf) -> anyhow::Result<GenSeed> {
    let file = SeedFile::from_json(&read_input(path)?)?;
    Ok(file.to_seed()?)
}

#[derive(Args, Debug)]
pub struct MutateArgs {
    /// Seed file, or spine file when `--moves` is given.
    #[arg(long)]
    input: PathBuf,
    /// Mutation directions, 0-based and comma separated.
    #[arg(long, value_delimiter = ',')]
    dirs: Vec<usize>,
    /// Move script: a JSON list of `{"kind", "target"}`.
    #[arg(long)]
    moves: Option<PathBuf>,
}

#[derive(Serialize)]
struct AppliedMove {
    #[serde(rename = "move")]
    mv: Move,
    updates: Vec<ShearUpdate>,
}

#[derive(Serialize)]
struct MovedSpine {
    spine: SpineFile,
    moves: Vec<AppliedMove>,
}

pub fn mutate(_g: &Global, a: MutateArgs) -> anyhow::Result<Outcome> {
    if let Some(script) = a.moves {
        let mut spine = SpineFile::from_json(&read_input(&a.input)?)?.to_spine()?;
        let moves: Vec<Move> = serde_json::from_str(&read_input(&script)?).context("move script")?;
        let mut applied = Vec::new();
        for mv in moves {
            let rec = apply_move(&spine, mv).with_context(|| format!("{mv:?}"))?;
            applied.push(AppliedMove {
                mv,
                updates: rec.updates.clone(),
            });
            spine = rec.after;
        }
        let out = SpineFile::from_spine(&spine);
        let text = out.to_json() + "\n";
        return Ok(Outcome::new(true, &MovedSpine { spine: out, moves: applied }, text));
    }
    let seed = load_seed(&a.input)?;
    let seeds = mutation_sequence(&seed, &a.dirs).map_err(|e| anyhow::anyhow!("{e}"))?;
    let file = SeedFile::from_seed(seeds.last().expect("nonempty"));
    let text = file.to_json() + "\n";
    Ok(Outcome::new(true, &file, text))
}

#[derive(Args, Debug)]
pub struct LaurentArgs {
    /// Seed file; random seeds of rank 1..=4 when absent.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Directions for `--input`; random ones when empty.
    #[arg(long, value_delimiter = ',')]
    dirs: Vec<usize>,
    /// Number of random sequences.
    #[arg(long, default_value_t = 200)]
    samples: usize,
    /// Longest sequence.
    #[arg(long, default_value_t = 10)]
    depth: usize,
    /// Largest exchange-polynomial exponent box to expand; `inf` for none.
    #[arg(long, default_value_t = 1e4)]
    budget: f64,
}

#[derive(Serialize)]
struct LaurentSweep {
    sequences: usize,
    mutations_checked: usize,
    inexact_divisions: usize,
    truncated: usize,
    budget: f64,
    /// Sequences that divided inexactly or were cut short.
    findings: Vec<LaurentReport>,
    pass: bool,
}

pub fn check_laurent(g: &Global, a: LaurentArgs) -> anyhow::Result<Outcome> {
    let mut rng = g.rng();
    let jobs: Vec<(GenSeed, Vec<usize>)> = match &a.input {
        Some(path) => {
            let seed = load_seed(path)?;
            let dirs = if a.dirs.is_empty() {
                random_directions(&mut rng, seed.rank(), a.depth)
            } else {
                a.dirs.clone()
            };
            vec![(seed, dirs)]
        }
        None => (0..a.samples)
            .map(|_| {
                let shape = SeedShape {
                    rank: rng.gen_range(1..=4),
                    max_entry: 3,
                    max_degree: 3,
                    orders: vec![4, 5],
                };
                let seed = random_seed(&mut rng, &shape)?;
                let len = rng.gen_range(1..=a.depth);
                let dirs = random_directions(&mut rng, shape.rank, len);
                Ok((seed, dirs))
            })
            .collect::<anyhow::Result<_>>()?,
    };
    let reports: Vec<LaurentReport> = jobs
        .par_iter()
        .map(|(s, d)| check_laurent_bounded(s, d, a.budget))
        .collect::<Result<_, _>>()?;
    let inexact = reports.iter().filter(|r| !r.laurent).count();
    let truncated = reports.iter().filter(|r| r.truncated.is_some()).count();
    let sweep = LaurentSweep {
        sequences: reports.len(),
        mutations_checked: reports.iter().map(|r| r.steps_completed).sum(),
        inexact_divisions: inexact,
        truncated,
        budget: a.budget,
        findings: reports.into_iter().filter(|r| !r.laurent || r.truncated.is_some()).collect(),
        pass: inexact == 0 && truncated == 0,
    };
    let text = format!(
        "{} sequences, {} mutations checked, {} inexact divisions, {} truncated at budget {}\n",
        sweep.sequences, sweep.mutations_checked, inexact, truncated, a.budget
    );
    Ok(Outcome::new(sweep.pass, &sweep, text))
}

#[derive(Args, Debug)]
pub struct PositivityArgs {
    /// Orbifold orders.
    #[arg(long, value_delimiter = ',', default_values_t = [3, 4, 5, 6])]
    p: Vec<u32>,
    #[arg(long, default_value_t = 8)]
    depth: usize,
}

pub fn check_positivity(_g: &Global, a: PositivityArgs) -> anyhow::Result<Outcome> {
    let cases: Vec<(u32, (u32, u32))> = a.p.iter().flat_map(|&p| [(p, (2, 1)), (p, (2, 2))]).collect();
    let reports = cases
        .par_iter()
        .map(|&(p, d)| orbiteich::cluster::positivity_search(&geometric_rank2_seed(p, d)?, a.depth))
        .collect::<Result<Vec<_>, _>>()?;
    let mut text = String::new();
    for r in &reports {
        writeln!(
            text,
            "p = {} d = {:?}: {} variables, embed-positive {}, integer cone {}, {} counterexamples",
            r.p,
            r.d,
            r.variables_checked,
            r.all_embed_positive,
            r.all_integer_cone,
            r.counterexamples.len()
        )?;
    }
    let pass = reports.iter().all(|r| r.all_embed_positive);
    Ok(Outcome::new(pass, &reports, text))
}

#[derive(Args, Debug)]
pub struct FiniteTypeArgs {
    /// Seed file.
    #[arg(long, conflicts_with = "kind")]
    input: Option<PathBuf>,
    /// Rank-2 type with all theta coefficients 1, instead of a file.
    #[arg(long = "type", value_name = "A2|B2|G2")]
    kind: Option<Rank2Type>,
    #[arg(long, default_value_t = 12)]
    depth: usize,
    #[arg(long, default_value_t = 64)]
    max_variables: usize,
}

pub fn finite_type(_g: &Global, a: FiniteTypeArgs) -> anyhow::Result<Outcome> {
    let seed = match (&a.input, a.kind) {
        (Some(path), _) => load_seed(path)?,
        (None, Some(t)) => {
            let field = CyclotomicField::new(1);
            let ring = PolyRing::new(field.clone(), ["x", "y"]);
            let one = Coefficient::scalar(field.one(), 0);
            let coeffs = t.d().iter().map(|&d| vec![one.clone(); d as usize + 1]).collect();
            GenSeed::new(ring, t.matrix(), coeffs, CoefficientMode::Fixed)?
        }
        (None, None) => anyhow::bail!("give --input or --type"),
    };
    let r = finite_type_probe(&seed, a.max_variables, a.depth)?;
    let verdict = match r.finite {
        Some(true) => "finite",
        Some(false) => "infinite",
        None => "undecided",
    };
    let text = format!(
        "{verdict}: {} cluster variables, {} seeds, depth {}\n",
        r.variable_count, r.seeds_visited, r.depth_reached
    );
    Ok(Outcome::new(true, &r, text))
}

#[derive(Args, Debug)]
pub struct CycleArgs {
    /// One type; all three when absent.
    #[arg(long = "type", value_name = "A2|B2|G2")]
    kind: Option<Rank2Type>,
}

pub fn rank2_cycles(_g: &Global, a: CycleArgs) -> anyhow::Result<Outcome> {
    let kinds = match a.kind {
        Some(t) => vec![t],
        None => vec![Rank2Type::A2, Rank2Type::B2, Rank2Type::G2],
    };
    let reports = kinds.into_iter().map(verify_cycle).collect::<Result<Vec<_>, _>>()?;
    let mut text = String::new();
    for r in &reports {
        writeln!(text, "{} period {}: {}", r.kind, r.period, if r.pass { "pass" } else { "FAIL" })?;
        for s in &r.steps {
            let mark = match (&s.expected, s.matches) {
                (None, _) => "",
                (Some(_), true) => "  [matches]",
                (Some(_), false) => "  [MISMATCH]",
            };
            writeln!(text, "  {} (k = {}): {}{mark}", s.name, s.direction, s.computed)?;
        }
    }
    let pass = reports.iter().all(|r| r.pass);
    Ok(Outcome::new(pass, &reports, text))
}
