use std::fmt::Write;
use std::path::PathBuf;

use anyhow::Context;
use clap::Args;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use orbiteich::fatgraph::random::random_spine;
use orbiteich::fatgraph::{library, mat_vec, matrix_rank, Spine, SpineFile, Surface};
use orbiteich::geodesics::{
    fp_power_is_scalar, geodesic_function, geodesic_function_symbolic, lambda_ring, pgon_sweep, random_closed_word,
    GeodesicValue, PathWord, Token,
};
use orbiteich::lambda::cc_prime_sweep;
use orbiteich::mcg::{
    apply_move, available_moves, bracket_residual, check_move_invariance, flip_pending, is_self_folded,
    pending_flip_via_hole, poisson_compatible, transport_path, InvarianceReport, Move,
};

use crate::{read_input, Global, Outcome};

#[derive(Args, Debug, Clone)]
pub struct SpineSource {
    /// Spine file.
    #[arg(long, conflicts_with = "spine")]
    input: Option<PathBuf>,
    /// Library spine: torus-with-hole, theta, pants-dumbbell, tripod,
    /// treegraph or torus-two-holes. Repeatable.
    #[arg(long)]
    spine: Vec<String>,
}

impl SpineSource {
    /// The chosen spines, or `default` library spines when none was named.
    fn load(&self, default: &[&str]) -> anyhow::Result<Vec<(String, Spine)>> {
        if let Some(path) = &self.input {
            let spine = SpineFile::from_json(&read_input(path)?)?.to_spine()?;
            return Ok(vec![(path.display().to_string(), spine)]);
        }
        let names: Vec<String> = if self.spine.is_empty() {
            default.iter().map(|s| s.to_string()).collect()
        } else {
            self.spine.clone()
        };
        names
            .into_iter()
            .map(|n| {
                let s = library::by_name(&n).with_context(|| format!("no library spine {n:?}"))?;
                Ok((n, s))
            })
            .collect()
    }
}

fn random_shears(rng: &mut ChaCha8Rng, s: &Spine) -> Spine {
    let z: Vec<f64> = (0..s.edges().len()).map(|_| rng.gen_range(-2.0..2.0)).collect();
    s.with_shears(&z)
}

#[derive(Args, Debug)]
pub struct GeodesicArgs {
    #[command(flatten)]
    source: SpineSource,
    /// Word such as "1 R 2 L"; repeatable.
    #[arg(long)]
    word: Vec<String>,
    /// Also expand the trace in `l<label> = e^{Z/2}`.
    #[arg(long)]
    symbolic: bool,
    /// Sample this many rotation-free closed words on random shears instead.
    #[arg(long)]
    samples: Option<usize>,
    /// Shortest sampled word before closing up.
    #[arg(long, default_value_t = 6)]
    depth: usize,
}

#[derive(Serialize)]
struct WordValue {
    word: String,
    value: GeodesicValue,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace_polynomial: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    positive_integer_coefficients: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    extreme_terms: Option<bool>,
}

#[derive(Serialize)]
struct HyperbolicFinding {
    spine: String,
    word: String,
    shears: Vec<f64>,
    trace: f64,
    reason: String,
}

#[derive(Serialize)]
struct HyperbolicSweep {
    words: usize,
    min_trace: f64,
    symbolic_checked: usize,
    findings: Vec<HyperbolicFinding>,
    pass: bool,
}

pub fn geodesic(g: &Global, a: GeodesicArgs) -> anyhow::Result<Outcome> {
    let mut rng = g.rng();
    if let Some(n) = a.samples {
        let tol = g.tol(1e-9);
        let spines: Vec<(String, Spine)> = a
            .source
            .load(&["torus-with-hole", "theta", "pants-dumbbell", "treegraph", "torus-two-holes"])?
            .into_iter()
            .filter(|(_, s)| s.edges().len() > s.pending_edges().len())
            .collect();
        anyhow::ensure!(!spines.is_empty(), "no spine has an inner edge");
        let mut sweep = HyperbolicSweep {
            words: 0,
            min_trace: f64::INFINITY,
            symbolic_checked: 0,
            findings: Vec::new(),
            pass: true,
        };
        for i in 0..n {
            let (name, base) = &spines[i % spines.len()];
            let spine = random_shears(&mut rng, base);
            let len = rng.gen_range(1..=a.depth.max(1));
            let w = random_closed_word(&mut rng, &spine, len, false).context("no rotation-free closed word")?;
            let v = geodesic_function(&w, &spine)?;
            let sym = geodesic_function_symbolic(&w, &spine, &lambda_ring(&spine))?;
            sweep.words += 1;
            sweep.symbolic_checked += 1;
            sweep.min_trace = sweep.min_trace.min(v.trace);
            let mut reasons = Vec::new();
            if v.trace < 2.0 - tol {
                reasons.push("trace below 2");
            }
            if !(sym.positivity.all_integer_cone && sym.positivity.all_embed_positive) {
                reasons.push("coefficient not a positive integer");
            }
            if !sym.has_extreme_terms {
                reasons.push("missing e^{+-sum Z/2}");
            }
            if !reasons.is_empty() {
                sweep.findings.push(HyperbolicFinding {
                    spine: name.clone(),
                    word: w.to_string(),
                    shears: spine.shears(),
                    trace: v.trace,
                    reason: reasons.join(", "),
                });
            }
        }
        sweep.pass = sweep.findings.is_empty();
        let text = format!(
            "{} rotation-free words, min trace {:.6}, {} symbolic traces, {} findings\n",
            sweep.words,
            sweep.min_trace,
            sweep.symbolic_checked,
            sweep.findings.len()
        );
        return Ok(Outcome::new(sweep.pass, &sweep, text));
    }
    let spines = a.source.load(&["torus-with-hole"])?;
    anyhow::ensure!(spines.len() == 1, "give one spine");
    anyhow::ensure!(!a.word.is_empty(), "give --word or --samples");
    let spine = &spines[0].1;
    let ring = lambda_ring(spine);
    let mut out = Vec::new();
    let mut text = String::new();
    for text_word in &a.word {
        let w: PathWord = text_word.parse()?;
        let value = geodesic_function(&w, spine)?;
        let mut wv = WordValue {
            word: w.to_string(),
            value,
            trace_polynomial: None,
            positive_integer_coefficients: None,
            extreme_terms: None,
        };
        writeln!(text, "{}: trace {} ({:?})", wv.word, wv.value.trace, wv.value.kind)?;
        if a.symbolic {
            let sym = geodesic_function_symbolic(&w, spine, &ring)?;
            writeln!(text, "  G = {}", sym.trace)?;
            wv.trace_polynomial = Some(sym.trace.to_string());
            wv.positive_integer_coefficients = Some(sym.positivity.all_integer_cone && sym.positivity.all_embed_positive);
            wv.extreme_terms = Some(sym.has_extreme_terms);
        }
        out.push(wv);
    }
    Ok(Outcome::new(true, &out, text))
}

#[derive(Args, Debug)]
pub struct IdentityArgs {
    /// Orders to check.
    #[arg(long, value_delimiter = ',', default_values_t = [2, 3, 4, 5, 6, 7, 8])]
    p: Vec<u32>,
    /// Random angles per order.
    #[arg(long, default_value_t = 100)]
    samples: usize,
}

#[derive(Serialize)]
struct IdentityOrder {
    p: u32,
    samples: usize,
    max_residual: f64,
    /// `F_p^p = (-1)^{p-1}` in the cyclotomic field.
    fp_power_exact: bool,
    pass: bool,
}

pub fn verify_identities(g: &Global, a: IdentityArgs) -> anyhow::Result<Outcome> {
    let mut rng = g.rng();
    let tol = g.tol(1e-9);
    let mut out = Vec::new();
    let mut text = String::new();
    for &p in &a.p {
        let reports = pgon_sweep(&mut rng, p, a.samples)?;
        let max_residual = reports.iter().map(|r| r.max_residual).fold(0.0, f64::max);
        let exact = fp_power_is_scalar(p);
        let pass = max_residual < tol && exact;
        writeln!(
            text,
            "p = {p}: max residual {max_residual:.3e} over {} angles, F_p^p scalar {exact}",
            a.samples
        )?;
        out.push(IdentityOrder {
            p,
            samples: a.samples,
            max_residual,
            fp_power_exact: exact,
            pass,
        });
    }
    let pass = out.iter().all(|o| o.pass);
    Ok(Outcome::new(pass, &out, text))
}

#[derive(Args, Debug)]
pub struct CcPrimeArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [2, 3, 4, 5, 6, 7, 8])]
    p: Vec<u32>,
    #[arg(long, default_value_t = 100)]
    samples: usize,
}

#[derive(Serialize)]
struct CcPrimeOrder {
    p: u32,
    samples: usize,
    max_residual: f64,
    failures: usize,
    pass: bool,
}

pub fn cc_prime(g: &Global, a: CcPrimeArgs) -> anyhow::Result<Outcome> {
    let mut rng = g.rng();
    let tol = g.tol(1e-9);
    let mut out = Vec::new();
    let mut text = String::new();
    for &p in &a.p {
        let reports = cc_prime_sweep(&mut rng, p, a.samples, tol)?;
        let max_residual = reports.iter().map(|r| r.residual).fold(0.0, f64::max);
        let failures = reports.iter().filter(|r| !r.pass).count();
        writeln!(text, "p = {p}: max relative residual {max_residual:.3e}, {failures} failures")?;
        out.push(CcPrimeOrder {
            p,
            samples: a.samples,
            max_residual,
            failures,
            pass: failures == 0,
        });
    }
    let pass = out.iter().all(|o| o.pass);
    Ok(Outcome::new(pass, &out, text))
}

#[derive(Args, Debug)]
pub struct PoissonArgs {
    #[command(flatten)]
    source: SpineSource,
    /// Check edge counts and centers on the whole library.
    #[arg(long, conflicts_with_all = ["samples", "input", "spine"])]
    counts: bool,
    /// Random spines to check instead of a given one.
    #[arg(long)]
    samples: Option<usize>,
}

#[derive(Serialize)]
struct FlipCompatibility {
    #[serde(rename = "move")]
    mv: Move,
    matrix_mutation: Option<bool>,
    self_folded: bool,
    bracket_residual: f64,
}

#[derive(Serialize)]
struct PoissonReport {
    name: String,
    surface: Surface,
    edges: usize,
    expected_edges: i64,
    valid: bool,
    matrix: Vec<Vec<i64>>,
    skew: bool,
    center_dim: usize,
    /// Boundary vectors, pending edges counted twice.
    boundary: Vec<Vec<i64>>,
    boundary_in_kernel: bool,
    boundary_rank: usize,
    flips: Vec<FlipCompatibility>,
    /// Structure checks: skew, kernel spanned by the `s` boundary vectors.
    center_pass: bool,
    /// Every flip mutates the matrix at its index.
    mutation_pass: bool,
    /// As `mutation_pass`, ignoring flips next to self-folded configurations.
    mutation_pass_regular: bool,
    bracket_pass: bool,
}

fn poisson_report(name: String, s: &Spine) -> PoissonReport {
    let b = s.poisson_matrix();
    let n = b.len();
    let skew = (0..n).all(|i| (0..n).all(|j| b[i][j] == -b[j][i]));
    let center_dim = n - matrix_rank(&b);
    let boundary = s.poisson_center();
    let boundary_in_kernel = boundary.iter().all(|v| mat_vec(&b, v).iter().all(|&x| x == 0));
    let boundary_rank = matrix_rank(&boundary);
    let surface = s.surface();
    let flips: Vec<FlipCompatibility> = available_moves(s)
        .into_iter()
        .filter_map(|mv| {
            let rec = apply_move(s, mv).ok()?;
            Some(FlipCompatibility {
                mv,
                matrix_mutation: poisson_compatible(&rec),
                self_folded: is_self_folded(&rec),
                bracket_residual: bracket_residual(s, mv).ok()?,
            })
        })
        .collect();
    let center_pass = skew
        && boundary_in_kernel
        && center_dim == surface.s as usize
        && boundary_rank == surface.s as usize
        && boundary.len() == surface.s as usize;
    PoissonReport {
        name,
        surface,
        edges: n,
        expected_edges: surface.edge_count(),
        valid: s.validate().valid,
        matrix: b,
        skew,
        center_dim,
        boundary,
        boundary_in_kernel,
        boundary_rank,
        mutation_pass: flips.iter().all(|f| f.matrix_mutation != Some(false)),
        mutation_pass_regular: flips.iter().all(|f| f.self_folded || f.matrix_mutation != Some(false)),
        bracket_pass: flips.iter().all(|f| f.bracket_residual < orbiteich::mcg::BRACKET_TOL),
        flips,
        center_pass,
    }
}

#[derive(Serialize)]
struct CountRow {
    name: String,
    surface: Surface,
    edges: usize,
    expected_edges: i64,
    valid: bool,
    center_dim: usize,
    pass: bool,
}

pub fn poisson(g: &Global, a: PoissonArgs) -> anyhow::Result<Outcome> {
    if a.counts {
        let rows: Vec<CountRow> = library::all()
            .into_iter()
            .map(|(name, s)| {
                let r = poisson_report(name.to_string(), &s);
                CountRow {
                    pass: r.valid && r.edges as i64 == r.expected_edges && r.center_dim == r.surface.s as usize,
                    name: r.name,
                    surface: r.surface,
                    edges: r.edges,
                    expected_edges: r.expected_edges,
                    valid: r.valid,
                    center_dim: r.center_dim,
                }
            })
            .collect();
        let mut text = String::new();
        for r in &rows {
            writeln!(
                text,
                "{}: (g, s, r) = ({}, {}, {}), E = {} (6g-6+3s+2r = {}), center {}",
                r.name, r.surface.g, r.surface.s, r.surface.r, r.edges, r.expected_edges, r.center_dim
            )?;
        }
        let pass = rows.iter().all(|r| r.pass);
        return Ok(Outcome::new(pass, &rows, text));
    }
    let spines = match a.samples {
        Some(n) => {
            let mut rng = g.rng();
            (0..n)
                .map(|i| {
                    let orders: Vec<u32> = (0..rng.gen_range(0..=2)).map(|_| rng.gen_range(2..=6)).collect();
                    let t = 2 * rng.gen_range(1..=3) + orders.len() % 2;
                    (format!("random-{i}"), random_spine(&mut rng, t, &orders))
                })
                .collect()
        }
        None => a.source.load(&["torus-with-hole"])?,
    };
    let reports: Vec<PoissonReport> = spines.into_iter().map(|(n, s)| poisson_report(n, &s)).collect();
    let mut text = String::new();
    for r in &reports {
        let mismatched = r.flips.iter().filter(|f| f.matrix_mutation == Some(false)).count();
        let folded = r.flips.iter().filter(|f| f.matrix_mutation == Some(false) && f.self_folded).count();
        writeln!(
            text,
            "{}: E = {}, s = {}, center {}, boundary rank {}, skew {}, flips {} ({} not matrix mutation, {} of them self-folded), bracket preserved {}",
            r.name,
            r.edges,
            r.surface.s,
            r.center_dim,
            r.boundary_rank,
            r.skew,
            r.flips.len(),
            mismatched,
            folded,
            r.bracket_pass
        )?;
    }
    let pass = reports.iter().all(|r| r.center_pass && r.mutation_pass && r.bracket_pass);
    Ok(Outcome::new(pass, &reports, text))
}

#[derive(Args, Debug)]
pub struct InvarianceArgs {
    #[command(flatten)]
    source: SpineSource,
    /// Move script replacing the default of every available move.
    #[arg(long)]
    moves: Option<PathBuf>,
    /// Random closed words per spine.
    #[arg(long, default_value_t = 20)]
    samples: usize,
    /// Random shear assignments per move.
    #[arg(long, default_value_t = 25)]
    shear_samples: usize,
    /// Shortest sampled word before closing up.
    #[arg(long, default_value_t = 8)]
    depth: usize,
}

#[derive(Serialize)]
struct ViaHole {
    label: u32,
    max_diff: f64,
    pass: bool,
}

#[derive(Serialize)]
struct SpineInvariance {
    name: String,
    words: Vec<String>,
    moves: Vec<InvarianceReport>,
    via_hole: Vec<ViaHole>,
    pass: bool,
}

/// `n` random closed words, half of them rotation-free, plus one winding
/// each orbifold point `k` times for every `k`.
fn sample_words(rng: &mut ChaCha8Rng, s: &Spine, n: usize, depth: usize) -> Vec<PathWord> {
    let mut words = Vec::new();
    for i in 0..4 * n {
        if words.len() == n {
            break;
        }
        let len = rng.gen_range(2..=depth.max(2));
        if let Some(w) = random_closed_word(rng, s, len, i % 2 == 1) {
            words.push(w);
        }
    }
    for e in s.pending_edges() {
        let (label, p) = (s.edges()[e].label, s.pending_order(e).unwrap());
        for k in 1..p {
            for _ in 0..10_000 {
                let Some(w) = random_closed_word(rng, s, 3, true) else { break };
                if w.tokens.contains(&Token::Rotate { edge: label, k }) {
                    words.push(w);
                    break;
                }
            }
        }
    }
    words
}

pub fn invariance(g: &Global, a: InvarianceArgs) -> anyhow::Result<Outcome> {
    let mut rng = g.rng();
    let tol = g.tol(1e-9);
    let script: Option<Vec<Move>> = match &a.moves {
        Some(path) => Some(serde_json::from_str(&read_input(path)?).context("move script")?),
        None => None,
    };
    let spines = a.source.load(&["torus-with-hole", "treegraph", "torus-two-holes"])?;
    let mut out = Vec::new();
    let mut text = String::new();
    for (name, base) in spines {
        let spine = random_shears(&mut rng, &base);
        let words = sample_words(&mut rng, &spine, a.samples, a.depth);
        let mut moves = Vec::new();
        match &script {
            None => {
                for mv in available_moves(&spine) {
                    moves.push(check_move_invariance(&mut rng, &spine, &words, mv, a.shear_samples, tol)?);
                }
            }
            Some(list) => {
                let (mut cur, mut cur_words) = (spine.clone(), words.clone());
                for &mv in list {
                    moves.push(check_move_invariance(&mut rng, &cur, &cur_words, mv, a.shear_samples, tol)?);
                    let rec = apply_move(&cur, mv)?;
                    cur_words = cur_words.iter().map(|w| transport_path(w, &rec)).collect::<Result<_, _>>()?;
                    cur = rec.after;
                }
            }
        }
        let mut via_hole = Vec::new();
        for e in spine.pending_edges() {
            let label = spine.edges()[e].label;
            let mut max_diff = 0.0f64;
            for _ in 0..a.shear_samples {
                let s = random_shears(&mut rng, &spine);
                let (x, y) = (flip_pending(&s, label)?, pending_flip_via_hole(&s, label)?);
                for (u, v) in x.after.shears().iter().zip(y.after.shears()) {
                    max_diff = max_diff.max((u - v).abs());
                }
            }
            via_hole.push(ViaHole {
                label,
                max_diff,
                pass: max_diff < 1e-12,
            });
        }
        let pass = moves.iter().all(|m| m.pass) && via_hole.iter().all(|v| v.pass);
        writeln!(text, "{name}: {} words, {} moves", words.len(), moves.len())?;
        for m in &moves {
            let worst = m.words.iter().map(|w| w.max_rel_err).fold(0.0, f64::max);
            writeln!(
                text,
                "  {:?} {}: max relative error {worst:.3e}, center {} -> {}, matrix mutation {:?}{}, {}",
                m.mv.kind,
                m.mv.target,
                m.center_dim_before,
                m.center_dim_after,
                m.poisson_compatible,
                if m.self_folded { " (self-folded)" } else { "" },
                if m.pass { "pass" } else { "FAIL" }
            )?;
        }
        for v in &via_hole {
            writeln!(text, "  via hole at {}: max difference {:.3e}", v.label, v.max_diff)?;
        }
        out.push(SpineInvariance {
            name,
            words: words.iter().map(|w| w.to_string()).collect(),
            moves,
            via_hole,
            pass,
        });
    }
    let pass = out.iter().all(|s| s.pass);
    Ok(Outcome::new(pass, &out, text))
}
