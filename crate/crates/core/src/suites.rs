//! Seeded verification suites behind `twoprover verify`.
//!
//! Every sample draws its own instance from a ChaCha stream keyed by the
//! sample index, so samples run in parallel and reports come back in index
//! order regardless of scheduling.

use std::str::FromStr;

use num::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::instances::{random_multi_round_game, random_ns_strategies, random_pcp_game};
use crate::model::{BipartiteStrategy, MultiRoundGame, PcpGame};
use crate::quantum::{random_povm, random_projective_povm, random_state, random_strategy, symmetrize_second_prover};
use crate::rounding::{
    canonicalize_prefix_answers, com_decompose, hybrid_family, ns_decompose, round_com, round_no_signaling,
    verify_claim_selection, verify_com_claims, verify_lemma_distance, verify_ns_claims, InequalityReport, InequalityRow,
};
use crate::scalar::{Rational, Scalar};
use crate::transforms::{oracularize_multi_round, oracularize_pcp_dummy, OracularizedMultiRound};
use crate::values::{entangled_lower_bound, multi_round_value, no_signaling_value, pcp_value, SeeSawOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Suite {
    LemmaWns,
    LemmaGame,
    NsClaims,
    ComClaims,
    LemmaDistance,
    ClaimSelection,
}

impl Suite {
    pub const ALL: [Suite; 6] =
        [Suite::LemmaWns, Suite::LemmaGame, Suite::NsClaims, Suite::ComClaims, Suite::LemmaDistance, Suite::ClaimSelection];

    pub fn name(self) -> &'static str {
        match self {
            Suite::LemmaWns => "lemma-wns",
            Suite::LemmaGame => "lemma-game",
            Suite::NsClaims => "ns-claims",
            Suite::ComClaims => "com-claims",
            Suite::LemmaDistance => "lemma-distance",
            Suite::ClaimSelection => "claim-selection",
        }
    }

    pub fn from_name(name: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|s| s.name() == name)
    }

    pub fn default_samples(self) -> usize {
        match self {
            Suite::LemmaWns | Suite::NsClaims => 20,
            Suite::LemmaGame => 10,
            Suite::ComClaims | Suite::LemmaDistance | Suite::ClaimSelection => 100,
        }
    }
}

/// Instance-size overrides, parsed from `key=value` pairs separated by
/// commas. Keys: `q`, `a`, `r`, `positions`, `checks`, `dims`, `outcomes`,
/// `strategies`, `restarts`, `density`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SuiteSize {
    pub questions: Option<usize>,
    pub answers: Option<usize>,
    pub rounds: Option<usize>,
    pub positions: Option<usize>,
    pub checks: Option<usize>,
    pub dims: Option<usize>,
    pub outcomes: Option<usize>,
    pub strategies: Option<usize>,
    pub restarts: Option<usize>,
    pub density: Option<f64>,
}

impl FromStr for SuiteSize {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut size = SuiteSize::default();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) =
                part.split_once('=').ok_or_else(|| Error::invalid(format!("size entry `{part}` is not key=value")))?;
            let bad = || Error::invalid(format!("size entry `{part}` has an invalid value"));
            if key.trim() == "density" {
                let d: f64 = value.trim().parse().map_err(|_| bad())?;
                if !(0.0..=1.0).contains(&d) {
                    return Err(bad());
                }
                size.density = Some(d);
                continue;
            }
            let n: usize = value.trim().parse().map_err(|_| bad())?;
            if n == 0 {
                return Err(bad());
            }
            let slot = match key.trim() {
                "q" => &mut size.questions,
                "a" => &mut size.answers,
                "r" => &mut size.rounds,
                "positions" => &mut size.positions,
                "checks" => &mut size.checks,
                "dims" => &mut size.dims,
                "outcomes" => &mut size.outcomes,
                "strategies" => &mut size.strategies,
                "restarts" => &mut size.restarts,
                other => return Err(Error::invalid(format!("unknown size key `{other}`"))),
            };
            *slot = Some(n);
        }
        Ok(size)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteOptions {
    pub seed: u64,
    pub samples: usize,
    pub size: SuiteSize,
    /// Force the first inequality of sample 0 to fail.
    pub perturb: bool,
}

impl SuiteOptions {
    pub fn new(suite: Suite, seed: u64) -> Self {
        SuiteOptions { seed, samples: suite.default_samples(), size: SuiteSize::default(), perturb: false }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleReport {
    pub index: usize,
    pub instance: String,
    pub inequalities: Vec<InequalityRow>,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub seed: u64,
    pub samples: Vec<SampleReport>,
}

impl SuiteReport {
    pub fn all_hold(&self) -> bool {
        self.samples.iter().all(|s| s.holds)
    }

    /// `(holding, total)` inequality counts.
    pub fn tally(&self) -> (usize, usize) {
        let rows = self.samples.iter().flat_map(|s| &s.inequalities);
        rows.fold((0, 0), |(h, t), r| (h + r.holds as usize, t + 1))
    }
}

pub fn run_suite(suite: Suite, opts: &SuiteOptions) -> Result<SuiteReport> {
    if opts.samples == 0 {
        return Err(Error::invalid("a suite needs at least one sample"));
    }
    let samples = (0..opts.samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(i as u64);
            let perturb = opts.perturb && i == 0;
            let (instance, inequalities) = match suite {
                Suite::LemmaWns => lemma_wns(&opts.size, perturb, &mut rng),
                Suite::LemmaGame => lemma_game(&opts.size, perturb, &mut rng),
                Suite::NsClaims => ns_claims(&opts.size, perturb, &mut rng),
                Suite::ComClaims => com_claims(&opts.size, perturb, &mut rng),
                Suite::LemmaDistance => lemma_distance(&opts.size, perturb, &mut rng),
                Suite::ClaimSelection => claim_selection(&opts.size, perturb, &mut rng),
            }?;
            let holds = inequalities.iter().all(|r| r.holds);
            Ok(SampleReport { index: i, instance, inequalities, holds })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SuiteReport { suite: suite.name(), seed: opts.seed, samples })
}

/// Default accept densities, low enough that most instances have value
/// below 1 and the soundness bounds are not vacuous.
pub const MULTI_ROUND_DENSITY: f64 = 0.25;
pub const PCP_DENSITY: f64 = 0.2;

type Sample = Result<(String, Vec<InequalityRow>)>;

fn finish<S: Scalar>(mut report: InequalityReport<S>, perturb: bool) -> Vec<InequalityRow> {
    if perturb {
        report.perturb_entry(0, &S::from_ratio(1, 1000));
    }
    report.rows()
}

fn multi_round_instance(size: &SuiteSize, rng: &mut ChaCha8Rng) -> Result<MultiRoundGame<Rational>> {
    random_multi_round_game(
        size.questions.unwrap_or(2),
        size.answers.unwrap_or(2),
        size.rounds.unwrap_or(2),
        size.density.unwrap_or(MULTI_ROUND_DENSITY),
        rng,
    )
}

/// Positions default to a random choice of 3 or 4, binary alphabet.
fn pcp_instance(size: &SuiteSize, rng: &mut ChaCha8Rng) -> Result<PcpGame<Rational>> {
    let positions = size.positions.unwrap_or_else(|| rng.random_range(3..=4));
    random_pcp_game(positions, 2, size.checks.unwrap_or(4), size.density.unwrap_or(PCP_DENSITY), rng)
}

fn describe_multi_round(g: &MultiRoundGame<Rational>, w: &Rational) -> String {
    format!("|Q|={} |A|={} r={} w={}", g.q_count(), g.a_count(), g.rounds(), w.to_text())
}

fn lemma_wns(size: &SuiteSize, perturb: bool, rng: &mut ChaCha8Rng) -> Sample {
    let g = multi_round_instance(size, rng)?;
    let w = multi_round_value(&g)?.value;
    let o = oracularize_multi_round(&g)?;
    let ns = no_signaling_value(&o.game)?.value;
    let r = Rational::from_usize(g.rounds());
    let bound = Rational::one() - (Rational::one() - w.clone()) / (Rational::from_usize(3) * r);
    let mut report = InequalityReport::default();
    report.check("ns-value", ns, bound, &Rational::zero());
    Ok((describe_multi_round(&g, &w), finish(report, perturb)))
}

fn ns_claims(size: &SuiteSize, perturb: bool, rng: &mut ChaCha8Rng) -> Sample {
    let g = multi_round_instance(size, rng)?;
    let w = multi_round_value(&g)?.value;
    let o = oracularize_multi_round(&g)?;
    let anchor = no_signaling_value(&o.game)?.witness;
    let others = random_ns_strategies(&o.game, &anchor, size.strategies.unwrap_or(10), rng)?;
    let mut report = InequalityReport::default();
    for (tag, theta) in std::iter::once(("lp".to_string(), &anchor)).chain(others.iter().enumerate().map(|(j, s)| (format!("s{j}"), s))) {
        for e in ns_report(&g, &o, theta, &w)?.entries {
            report.check(format!("{tag} {}", e.label), e.lhs, e.rhs, &e.tolerance);
        }
    }
    Ok((describe_multi_round(&g, &w), finish(report, perturb)))
}

/// The full no-signaling rounding pipeline for one strategy.
pub fn ns_report(
    g: &MultiRoundGame<Rational>,
    o: &OracularizedMultiRound<Rational>,
    theta: &BipartiteStrategy<Rational>,
    w: &Rational,
) -> Result<InequalityReport<Rational>> {
    let theta = canonicalize_prefix_answers(o, theta)?;
    let t = ns_decompose(g, o, &theta)?;
    let rounded = round_no_signaling(&t);
    let hy = hybrid_family(&t, &rounded, g)?;
    Ok(verify_ns_claims(&t, &hy, Some(w)))
}

fn lemma_game(size: &SuiteSize, perturb: bool, rng: &mut ChaCha8Rng) -> Sample {
    let positions = size.positions.unwrap_or(4);
    let g = random_pcp_game(positions, 2, size.checks.unwrap_or(4), size.density.unwrap_or(PCP_DENSITY), rng)?;
    let w = pcp_value(&g)?.value;
    let o = oracularize_pcp_dummy(&g)?;
    let d = size.dims.unwrap_or(2);
    let opts = SeeSawOptions { dims: (d, d), restarts: size.restarts.unwrap_or(3), max_iters: 200, seed: rng.random(), ..SeeSawOptions::default() };
    let lb = entangled_lower_bound(&o.game, &opts)?.value;
    let q_eff = o.marginal.iter().filter(|m| !m.is_zero()).count() as f64;
    let gap = 1.0 - w.to_f64();
    let c = 1.0 + 15.0 * std::f64::consts::SQRT_2;
    let bound = 1.0 - gap * gap / (c * c * q_eff * q_eff);
    let mut report = InequalityReport::default();
    report.check("entangled-lb", lb, bound, &1e-6);
    let instance = format!("Q={positions} checks={} w={}", g.check_count(), w.to_text());
    Ok((instance, finish(report, perturb)))
}

fn com_claims(size: &SuiteSize, perturb: bool, rng: &mut ChaCha8Rng) -> Sample {
    let g = pcp_instance(size, rng)?;
    let gf = g.map_scalar(|v| v.to_f64());
    let w = pcp_value(&g)?.value;
    let o = oracularize_pcp_dummy(&g)?;
    let d = size.dims.unwrap_or(2);
    let s = random_strategy(d, d, o.game.counts(), rng)?;
    let s = symmetrize_second_prover(&s, &o.pairs, o.alphabet)?;
    let t = com_decompose(&o, &s)?;
    let rounding = round_com(&t)?;
    let mut report = verify_com_claims(&gf, w.to_f64(), &t, &rounding)?;
    let mut seq = t.queried.clone();
    seq.shuffle(rng);
    seq.truncate(3);
    for i in 0..seq.len() {
        report.entries.push(verify_claim_selection(&t, &seq, i)?);
    }
    let instance = format!("Q={} checks={} w={}", g.positions(), g.check_count(), w.to_text());
    Ok((instance, finish(report, perturb)))
}

fn claim_selection(size: &SuiteSize, perturb: bool, rng: &mut ChaCha8Rng) -> Sample {
    let g = pcp_instance(size, rng)?;
    let o = oracularize_pcp_dummy(&g)?;
    let d = size.dims.unwrap_or(2);
    let s = random_strategy(d, d, o.game.counts(), rng)?;
    let s = symmetrize_second_prover(&s, &o.pairs, o.alphabet)?;
    let t = com_decompose(&o, &s)?;
    let mut seq = t.queried.clone();
    seq.shuffle(rng);
    seq.truncate(size.checks.map_or(3, |m| m.max(1)));
    let mut report = InequalityReport::default();
    for i in 0..seq.len() {
        report.entries.push(verify_claim_selection(&t, &seq, i)?);
    }
    Ok((format!("Q={} sequence={seq:?}", g.positions()), finish(report, perturb)))
}

/// Even samples use projective measurements, odd samples generic ones.
fn lemma_distance(size: &SuiteSize, perturb: bool, rng: &mut ChaCha8Rng) -> Sample {
    let d = size.dims.unwrap_or(2);
    let k = size.outcomes.unwrap_or(2);
    let projective = rng.random_bool(0.5);
    let (m, n) = if projective {
        (random_projective_povm(d, k, rng), random_projective_povm(d, k, rng))
    } else {
        (random_povm(d, k, rng), random_povm(d, k, rng))
    };
    let phi = random_state(d * d, rng);
    let lemma = verify_lemma_distance(&m, &n, &phi)?;
    let mut report = InequalityReport::default();
    report.check("distance-fidelity", lemma.d_squared, lemma.fidelity_gap, &1e-8);
    report.check("fidelity-disagreement", lemma.fidelity_gap, lemma.disagreement, &1e-8);
    let kind = if projective { "projective" } else { "generic" };
    Ok((format!("d={d} outcomes={k} {kind}"), finish(report, perturb)))
}
