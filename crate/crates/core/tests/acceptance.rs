//! Acceptance checks, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines always reach the output.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use twoprover::catalog;
use twoprover::instances::{random_multi_round_game, random_pcp_game, random_two_prover_game};
use twoprover::io::{parse_game, serialize_game, GameDocument};
use twoprover::quantum::{catalog_magic_square, eval_quantum};
use twoprover::suites::{run_suite, Suite, SuiteOptions};
use twoprover::transforms::{oracularize_multi_round, oracularize_pcp, parallel_repeat};
use twoprover::values::{
    classical_value, entangled_lower_bound, multi_round_value, no_signaling_value, pcp_value, see_saw, SeeSawOptions,
};
use twoprover::{Rational, Scalar};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn r(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

fn within(limit: Duration, start: Instant) -> Result<(), String> {
    let t = start.elapsed();
    if t <= limit {
        Ok(())
    } else {
        Err(format!("took {t:.2?}, limit {limit:?}"))
    }
}

fn expect_eq(what: &str, got: &Rational, want: &Rational) -> Result<(), String> {
    if got == want {
        Ok(())
    } else {
        Err(format!("{what} = {}, expected {}", got.to_text(), want.to_text()))
    }
}

fn c1() -> Outcome {
    let mut notes = Vec::new();
    for (name, run) in [
        ("classical(CHSH)", Box::new(|| classical_value(&catalog::chsh()).map(|v| (v.value, r(3, 4)))) as Box<dyn Fn() -> _>),
        ("classical(MagicSquare)", Box::new(|| classical_value(&catalog::magic_square()).map(|v| (v.value, r(17, 18))))),
        ("ns(CHSH)", Box::new(|| no_signaling_value(&catalog::chsh()).map(|v| (v.value, Rational::one())))),
    ] {
        let start = Instant::now();
        let (got, want) = run().map_err(|e| e.to_string())?;
        expect_eq(name, &got, &want)?;
        within(Duration::from_secs(1), start)?;
        notes.push(format!("{name}={} in {:.0?}", got.to_text(), start.elapsed()));
    }
    Ok(notes.join(", "))
}

fn c2() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let tol = 1e-9;
    let mut strict = 0;
    for i in 0..50 {
        let counts = [rng.random_range(1..=3), rng.random_range(1..=3), rng.random_range(1..=2), rng.random_range(1..=2)];
        let g = random_two_prover_game(counts, 0.5, &mut rng).map_err(|e| e.to_string())?;
        let classical = classical_value(&g).map_err(|e| e.to_string())?.value.to_f64();
        let ns = no_signaling_value(&g).map_err(|e| e.to_string())?.value.to_f64();
        let opts = SeeSawOptions { restarts: 4, seed: rng.random(), ..SeeSawOptions::default() };
        let lb = entangled_lower_bound(&g, &opts).map_err(|e| e.to_string())?.value;
        if !(classical <= lb + tol && lb <= ns + tol) {
            return Err(format!("game {i} counts {counts:?}: classical {classical} lb {lb} ns {ns}"));
        }
        strict += (lb > classical + 1e-6) as usize;
    }
    within(Duration::from_secs(120), start)?;
    Ok(format!("50 games, {strict} with lb above classical, {:.2?}", start.elapsed()))
}

fn c3() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut below_one = 0;
    for i in 0..30 {
        let positions = rng.random_range(3..=5);
        let g = random_pcp_game(positions, 2, 5, 0.3, &mut rng).map_err(|e| e.to_string())?;
        let w = pcp_value(&g).map_err(|e| e.to_string())?.value;
        let o = oracularize_pcp(&g).map_err(|e| e.to_string())?;
        let v = classical_value(&o.game).map_err(|e| e.to_string())?.value;
        let bound = Rational::one() - (Rational::one() - w.clone()) / r(3, 1);
        if !(w <= v && v <= bound) {
            return Err(format!("game {i}: w {} classical {} bound {}", w.to_text(), v.to_text(), bound.to_text()));
        }
        below_one += (w < Rational::one()) as usize;
    }
    within(Duration::from_secs(120), start)?;
    Ok(format!("30 games, {below_one} with w < 1, {:.2?}", start.elapsed()))
}

fn c4() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut below_one = 0;
    for i in 0..20 {
        let g = random_multi_round_game(2, 2, 2, 0.25, &mut rng).map_err(|e| e.to_string())?;
        let w = multi_round_value(&g).map_err(|e| e.to_string())?.value;
        let o = oracularize_multi_round(&g).map_err(|e| e.to_string())?;
        let ns = no_signaling_value(&o.game).map_err(|e| e.to_string())?.value;
        let bound = Rational::one() - (Rational::one() - w.clone()) / r(6, 1);
        if ns > bound {
            return Err(format!("game {i}: w {} ns {} bound {}", w.to_text(), ns.to_text(), bound.to_text()));
        }
        below_one += (w < Rational::one()) as usize;
    }
    within(Duration::from_secs(300), start)?;
    Ok(format!("20 games, {below_one} with w < 1, {:.2?}", start.elapsed()))
}

fn suite_failures(suite: Suite, opts: &SuiteOptions) -> Result<(twoprover::suites::SuiteReport, usize), String> {
    let report = run_suite(suite, opts).map_err(|e| e.to_string())?;
    let failing = report.samples.iter().flat_map(|s| &s.inequalities).filter(|r| !r.holds).count();
    Ok((report, failing))
}

fn c5() -> Outcome {
    let start = Instant::now();
    let mut opts = SuiteOptions::new(Suite::NsClaims, 5);
    opts.samples = 20;
    opts.size.strategies = Some(10);
    let (report, failing) = suite_failures(Suite::NsClaims, &opts)?;
    let rows: Vec<_> = report.samples.iter().flat_map(|s| &s.inequalities).collect();
    if let Some(row) = rows.iter().find(|r| r.tolerance != "0") {
        return Err(format!("row `{}` has tolerance {}", row.label, row.tolerance));
    }
    for sample in &report.samples {
        let strategies = sample.inequalities.iter().filter(|r| r.label.ends_with("eps-covers-consistency")).count();
        if strategies < 11 {
            return Err(format!("sample {} covers only {strategies} strategies", sample.index));
        }
    }
    if failing > 0 {
        return Err(format!("{failing} of {} rows fail", rows.len()));
    }
    within(Duration::from_secs(300), start)?;
    Ok(format!("{} rows over 20 games x 11 strategies, {:.2?}", rows.len(), start.elapsed()))
}

fn c6() -> Outcome {
    let start = Instant::now();
    let opts = SuiteOptions::new(Suite::ComClaims, 6);
    if opts.samples < 100 {
        return Err(format!("only {} samples", opts.samples));
    }
    let (report, failing) = suite_failures(Suite::ComClaims, &opts)?;
    let rows: Vec<_> = report.samples.iter().flat_map(|s| &s.inequalities).collect();
    let required = [
        "d1-mean-square",
        "d2-mean-square",
        "d3-mean-square",
        "d4-mean-square",
        "distance-fidelity",
        "fidelity-disagreement",
        "selection",
        "d-aggregate",
        "soundness",
    ];
    for sample in &report.samples {
        for key in required {
            if !sample.inequalities.iter().any(|r| r.label.starts_with(key)) {
                return Err(format!("sample {} has no `{key}` row", sample.index));
            }
        }
    }
    if let Some(row) = rows.iter().find(|r| r.tolerance.parse::<f64>().map_or(true, |t| t > 1e-7)) {
        return Err(format!("row `{}` has tolerance {}", row.label, row.tolerance));
    }
    if failing > 0 {
        return Err(format!("{failing} of {} rows fail", rows.len()));
    }
    within(Duration::from_secs(600), start)?;
    Ok(format!("{} rows over {} strategies, {:.2?}", rows.len(), report.samples.len(), start.elapsed()))
}

fn c7() -> Outcome {
    let start = Instant::now();
    let opts = SeeSawOptions { dims: (2, 2), restarts: 10, seed: 7, ..SeeSawOptions::default() };
    let chsh = see_saw(&catalog::chsh(), &opts).map_err(|e| e.to_string())?.best.value;
    if chsh < 0.853 {
        return Err(format!("see-saw on CHSH reached {chsh}"));
    }
    let (g, s) = catalog_magic_square();
    let v = eval_quantum(&g.to_float(), &s).map_err(|e| e.to_string())?;
    if (v - 1.0).abs() > 1e-9 {
        return Err(format!("magic square strategy evaluates to {v}"));
    }
    expect_eq("classical(MagicSquare)", &classical_value(&g).map_err(|e| e.to_string())?.value, &r(17, 18))?;
    within(Duration::from_secs(60), start)?;
    Ok(format!("CHSH see-saw {chsh:.6}, magic square {v:.12}, {:.2?}", start.elapsed()))
}

fn c8() -> Outcome {
    let start = Instant::now();
    let g = parallel_repeat(&catalog::chsh(), 2).map_err(|e| e.to_string())?;
    expect_eq("ns(CHSH^2)", &no_signaling_value(&g).map_err(|e| e.to_string())?.value, &Rational::one())?;
    expect_eq("classical(CHSH^2)", &classical_value(&g).map_err(|e| e.to_string())?.value, &r(10, 16))?;
    Ok(format!("ns 1, classical 5/8, {:.2?}", start.elapsed()))
}

fn c9() -> Outcome {
    let docs = [
        ("chsh", GameDocument::TwoProver(catalog::chsh())),
        ("magic-square", GameDocument::TwoProver(catalog::magic_square())),
        ("magic-square-rc", GameDocument::TwoProver(catalog::magic_square_rc())),
        ("tiny-1in3", GameDocument::Pcp(catalog::tiny_1in3())),
    ];
    for (name, doc) in &docs {
        let text = serialize_game(doc);
        let back = parse_game(&text).map_err(|e| format!("{name}: {e}"))?;
        if &back != doc || serialize_game(&back) != text {
            return Err(format!("{name} does not round-trip"));
        }
    }
    let bin = env!("CARGO_BIN_EXE_twoprover");
    let mut codes = Vec::new();
    for suite in Suite::ALL {
        for perturb in [false, true] {
            let mut cmd = Command::new(bin);
            cmd.args(["verify", suite.name(), "--seed", "9", "--samples", "3", "--size", "strategies=2"]);
            if perturb {
                cmd.arg("--perturb");
            }
            let code = cmd.output().map_err(|e| e.to_string())?.status.code();
            let want = if perturb { 1 } else { 0 };
            if code != Some(want) {
                return Err(format!("verify {} perturb={perturb} exited {code:?}", suite.name()));
            }
            codes.push(code);
        }
    }
    Ok(format!("{} catalog games round-trip, {} verify runs exit as expected", docs.len(), codes.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("exact small values", c1),
        ("value sandwich on random games", c2),
        ("oracularized PCP classical bounds", c3),
        ("multi-round no-signaling soundness", c4),
        ("no-signaling rounding claims", c5),
        ("commuting-operator rounding claims", c6),
        ("see-saw and magic square", c7),
        ("parallel repetition of CHSH", c8),
        ("serialization and verify exit codes", c9),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(note) => println!("PASS criterion {} ({name}): {note}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {} ({name}): {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
