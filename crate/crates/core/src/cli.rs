//! The `twoprover` command line.
//!
//! Exit codes: 0 success, 1 a verified inequality failed, 2 usage, parse or
//! any other error.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::catalog;
use crate::error::{Error, Result};
use crate::io::{parse_formula, read_game, serialize_game, GameDocument};
use crate::quantum::{CMatrix, QuantumStrategy};
use crate::scalar::{Rational, Scalar};
use crate::suites::{run_suite, Suite, SuiteOptions, SuiteReport, SuiteSize};
use crate::transforms::{oracularize_multi_round, oracularize_pcp, oracularize_pcp_dummy, parallel_repeat, pcp_from_1in3};
use crate::values::{
    classical_value, entangled_lower_bound, multi_round_value, no_signaling_value, pcp_value, SeeSawOptions,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

const ENV_HELP: &str = "Size guards can be raised through the environment variables \
TWOPROVER_MAX_TABLE_ENTRIES, TWOPROVER_MAX_LP_VARIABLES and TWOPROVER_MAX_LP_CONSTRAINTS.";

#[derive(Parser, Debug)]
#[command(name = "twoprover", version, about = "Two-prover one-round games and their precursors", after_help = ENV_HELP)]
struct Cli {
    /// Emit a machine-readable JSON report on stdout.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute a game value.
    Value(ValueArgs),
    /// Transform a game file.
    Transform(TransformArgs),
    /// Run a seeded verification suite.
    Verify(VerifyArgs),
    /// Generate a game from another description.
    Gen(GenArgs),
    /// Write a built-in game.
    Catalog(CatalogArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ValueKind {
    Classical,
    NoSignaling,
    EntangledLb,
    MultiRound,
    Pcp,
}

#[derive(Args, Debug)]
struct ValueArgs {
    kind: ValueKind,
    file: PathBuf,
    /// Local dimensions for the see-saw, as `d1,d2`.
    #[arg(long, value_parser = parse_dims, default_value = "2,2")]
    dims: (usize, usize),
    #[arg(long, default_value_t = 10)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 300)]
    max_iters: usize,
    /// Write the optimal strategy as JSON.
    #[arg(long)]
    witness: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TransformKind {
    Oracularize,
    OracularizeDummy,
    Repeat,
}

#[derive(Args, Debug)]
struct TransformArgs {
    kind: TransformKind,
    file: PathBuf,
    /// Number of parallel copies for `repeat`.
    #[arg(short = 'n', default_value_t = 2)]
    copies: usize,
    /// Output file; stdout when absent.
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(value_parser = parse_suite)]
    suite: Suite,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of samples; each suite has its own default.
    #[arg(long)]
    samples: Option<usize>,
    /// Instance sizes, e.g. `q=2,a=2,r=2` or `positions=4,dims=2`.
    #[arg(long, value_parser = parse_size)]
    size: Option<SuiteSize>,
    /// Break the first inequality of sample 0.
    #[arg(long, hide = true)]
    perturb: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GenKind {
    #[value(name = "pcp-1in3")]
    Pcp1in3,
}

#[derive(Args, Debug)]
struct GenArgs {
    kind: GenKind,
    formula: PathBuf,
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CatalogGame {
    Chsh,
    MagicSquare,
    MagicSquareRc,
    #[value(name = "tiny-1in3")]
    Tiny1in3,
}

#[derive(Args, Debug)]
struct CatalogArgs {
    game: CatalogGame,
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
}

fn parse_dims(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or("expected d1,d2")?;
    let a: usize = a.trim().parse().map_err(|_| "d1 is not a positive integer")?;
    let b: usize = b.trim().parse().map_err(|_| "d2 is not a positive integer")?;
    if a == 0 || b == 0 {
        return Err("dimensions must be positive".into());
    }
    Ok((a, b))
}

fn parse_suite(s: &str) -> std::result::Result<Suite, String> {
    Suite::from_name(s).ok_or_else(|| {
        let names: Vec<&str> = Suite::ALL.iter().map(|s| s.name()).collect();
        format!("unknown suite `{s}`; expected one of {}", names.join(", "))
    })
}

fn parse_size(s: &str) -> std::result::Result<SuiteSize, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// What a command produced: human text, a JSON report, and the exit code.
struct Outcome {
    text: String,
    json: Value,
    code: i32,
}

impl Outcome {
    fn ok(text: String, json: Value) -> Self {
        Outcome { text, json, code: EXIT_OK }
    }
}

/// Runs the CLI on `args` (including the program name), printing to stdout
/// and stderr, and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let json = cli.json;
    match execute(cli.command) {
        Ok(out) => {
            if json {
                println!("{}", serde_json::to_string_pretty(&out.json).expect("report serializes"));
            } else if !out.text.is_empty() {
                print!("{}", out.text);
            }
            out.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            if json {
                println!("{}", json!({ "error": e.to_string(), "exit_code": EXIT_ERROR }));
            }
            EXIT_ERROR
        }
    }
}

fn execute(command: Command) -> Result<Outcome> {
    match command {
        Command::Value(a) => value(a),
        Command::Transform(a) => transform(a),
        Command::Verify(a) => verify(a),
        Command::Gen(a) => generate(a),
        Command::Catalog(a) => write_catalog(a),
    }
}

fn two_prover(doc: GameDocument, what: &str) -> Result<crate::model::TwoProverGame<Rational>> {
    match doc {
        GameDocument::TwoProver(g) => Ok(g),
        other => Err(Error::invalid(format!("{what} needs a two_prover_one_round game, got {}", other.kind()))),
    }
}

fn value_report(kind: &str, value: &Rational, exact: bool, method: Value) -> Outcome {
    let text = format!("{kind} value: {} ({:.12})\n", value.to_text(), value.to_f64());
    let json = json!({
        "command": "value", "kind": kind, "value": value.to_text(), "float": value.to_f64(),
        "exact": exact, "method": method,
    });
    Outcome::ok(text, json)
}

fn value(a: ValueArgs) -> Result<Outcome> {
    let doc = read_game(&a.file)?;
    let (outcome, witness) = match a.kind {
        ValueKind::Classical => {
            let g = two_prover(doc, "classical")?;
            let r = classical_value(&g)?;
            let w = json!({ "kind": "deterministic", "f1": r.witness.f1, "f2": r.witness.f2 });
            (value_report("classical", &r.value, r.exact, json!(r.method)), w)
        }
        ValueKind::NoSignaling => {
            let g = two_prover(doc, "no-signaling")?;
            let r = no_signaling_value(&g)?;
            let table: Vec<String> = r.witness.table().iter().map(Scalar::to_text).collect();
            let w = json!({ "kind": "no_signaling", "counts": r.witness.counts(), "table": table });
            (value_report("no-signaling", &r.value, r.exact, json!(r.method)), w)
        }
        ValueKind::MultiRound => {
            let GameDocument::MultiRound(g) = doc else {
                return Err(Error::invalid(format!("multi-round needs a multi_round game, got {}", doc.kind())));
            };
            let r = multi_round_value(&g)?;
            let w = json!({ "kind": "deterministic_multi_round", "answers": r.witness.answers });
            (value_report("multi-round", &r.value, r.exact, json!(r.method)), w)
        }
        ValueKind::Pcp => {
            let GameDocument::Pcp(g) = doc else {
                return Err(Error::invalid(format!("pcp needs a pcp3 game, got {}", doc.kind())));
            };
            let r = pcp_value(&g)?;
            let w = json!({ "kind": "proof", "proof": r.witness });
            (value_report("pcp", &r.value, r.exact, json!(r.method)), w)
        }
        ValueKind::EntangledLb => {
            let g = two_prover(doc, "entangled-lb")?;
            let opts = SeeSawOptions {
                dims: a.dims,
                restarts: a.restarts,
                max_iters: a.max_iters,
                seed: a.seed,
                ..SeeSawOptions::default()
            };
            let r = entangled_lower_bound(&g, &opts)?;
            let text = format!("entangled lower bound: {:.12} (dims {}x{}, {} restarts, seed {})\n", r.value, a.dims.0, a.dims.1, a.restarts, a.seed);
            let report = json!({
                "command": "value", "kind": "entangled-lb", "value": r.value, "exact": false,
                "method": r.method, "dims": [a.dims.0, a.dims.1], "restarts": a.restarts, "seed": a.seed,
            });
            (Outcome::ok(text, report), quantum_json(&r.witness))
        }
    };
    if let Some(path) = &a.witness {
        std::fs::write(path, serde_json::to_string_pretty(&witness).expect("witness serializes"))?;
    }
    Ok(outcome)
}

fn matrix_json(m: &CMatrix) -> Value {
    let rows: Vec<Vec<[f64; 2]>> =
        (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect();
    json!(rows)
}

fn quantum_json(s: &QuantumStrategy) -> Value {
    let povms = |ps: &[crate::quantum::Povm]| -> Value {
        ps.iter().map(|p| p.elements().iter().map(|e| matrix_json(e.matrix())).collect::<Vec<_>>()).collect()
    };
    let state: Vec<[f64; 2]> = s.state().iter().map(|z| [z.re, z.im]).collect();
    json!({
        "kind": "quantum", "dims": [s.dims().0, s.dims().1], "state": state,
        "povms1": povms(s.povms1()), "povms2": povms(s.povms2()),
    })
}

fn emit(doc: &GameDocument, output: Option<&Path>, what: &str) -> Result<Outcome> {
    let text = serialize_game(doc);
    let summary = json!({ "command": what, "kind": doc.kind(), "output": output.map(|p| p.display().to_string()) });
    match output {
        Some(path) => {
            std::fs::write(path, &text)?;
            Ok(Outcome::ok(format!("wrote {} game to {}\n", doc.kind(), path.display()), summary))
        }
        None => {
            let mut summary = summary;
            summary["game"] = serde_json::from_str(&text).expect("serialized game is JSON");
            Ok(Outcome::ok(text, summary))
        }
    }
}

fn transform(a: TransformArgs) -> Result<Outcome> {
    let doc = read_game(&a.file)?;
    let out = match (a.kind, doc) {
        (TransformKind::Oracularize, GameDocument::MultiRound(g)) => oracularize_multi_round(&g)?.game,
        (TransformKind::Oracularize, GameDocument::Pcp(g)) => oracularize_pcp(&g)?.game,
        (TransformKind::OracularizeDummy, GameDocument::Pcp(g)) => oracularize_pcp_dummy(&g)?.game,
        (TransformKind::Repeat, GameDocument::TwoProver(g)) => parallel_repeat(&g, a.copies)?,
        (kind, doc) => {
            return Err(Error::invalid(format!("transform {kind:?} does not apply to a {} game", doc.kind())));
        }
    };
    emit(&GameDocument::TwoProver(out), a.output.as_deref(), "transform")
}

fn generate(a: GenArgs) -> Result<Outcome> {
    let GenKind::Pcp1in3 = a.kind;
    let text = std::fs::read_to_string(&a.formula)?;
    let f = parse_formula(&text)?;
    let g = pcp_from_1in3::<Rational>(&f)?.game;
    emit(&GameDocument::Pcp(g), a.output.as_deref(), "gen")
}

fn write_catalog(a: CatalogArgs) -> Result<Outcome> {
    let doc = match a.game {
        CatalogGame::Chsh => GameDocument::TwoProver(catalog::chsh()),
        CatalogGame::MagicSquare => GameDocument::TwoProver(catalog::magic_square()),
        CatalogGame::MagicSquareRc => GameDocument::TwoProver(catalog::magic_square_rc()),
        CatalogGame::Tiny1in3 => GameDocument::Pcp(catalog::tiny_1in3()),
    };
    emit(&doc, a.output.as_deref(), "catalog")
}

fn verify(a: VerifyArgs) -> Result<Outcome> {
    let mut opts = SuiteOptions::new(a.suite, a.seed);
    if let Some(k) = a.samples {
        opts.samples = k;
    }
    if let Some(size) = a.size {
        opts.size = size;
    }
    opts.perturb = a.perturb;
    let report = run_suite(a.suite, &opts)?;
    let code = if report.all_hold() { EXIT_OK } else { EXIT_VIOLATION };
    Ok(Outcome { text: render_suite(&report), json: suite_json(&report), code })
}

fn render_suite(report: &SuiteReport) -> String {
    let mut out = String::new();
    for s in &report.samples {
        out.push_str(&format!("sample {}: {}\n", s.index, s.instance));
        for r in &s.inequalities {
            let mark = if r.holds { "ok  " } else { "FAIL" };
            out.push_str(&format!("  {mark} {:<40} lhs {} <= rhs {} (tol {})\n", r.label, r.lhs, r.rhs, r.tolerance));
        }
    }
    let (held, total) = report.tally();
    let failed = report.samples.iter().filter(|s| !s.holds).count();
    out.push_str(&format!(
        "{}: {held}/{total} inequalities hold over {} samples (seed {}), {failed} samples with violations\n",
        report.suite,
        report.samples.len(),
        report.seed
    ));
    out
}

fn suite_json(report: &SuiteReport) -> Value {
    let (held, total) = report.tally();
    let mut v = serde_json::to_value(report).expect("report serializes");
    v["command"] = json!("verify");
    v["holding"] = json!(held);
    v["total"] = json!(total);
    v["all_hold"] = json!(report.all_hold());
    v
}

