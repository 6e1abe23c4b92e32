//! Seeded random instances for property checks and the verify suites.
//!
//! Games draw `pi` uniformly over a random nonempty support and accept each
//! answer tuple independently with probability `density`.

use num::One;
use rand::seq::index::sample;
use rand::Rng;

use crate::error::{Error, Result};
use crate::lp::{solve_lp, LinearProgram, LpStatus};
use crate::model::{index, BipartiteStrategy, MultiRoundGame, PcpGame, TwoProverGame};
use crate::scalar::{Rational, Scalar};
use crate::values::no_signaling_lp;

fn uniform_over_support<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<Rational> {
    let mut support: Vec<bool> = (0..n).map(|_| rng.random_bool(0.6)).collect();
    if !support.iter().any(|&s| s) {
        support[rng.random_range(0..n)] = true;
    }
    let size = support.iter().filter(|&&s| s).count() as i64;
    support.into_iter().map(|s| if s { Rational::from_ratio(1, size) } else { Rational::from_ratio(0, 1) }).collect()
}

/// A distribution with small integer weights, so exact arithmetic stays cheap.
/// Zero entries are likely, which keeps the sample near the polytope's faces.
pub fn random_distribution<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<Rational> {
    let mut weights: Vec<i64> = (0..n).map(|_| rng.random_range(0..4)).collect();
    if weights.iter().all(|&w| w == 0) {
        weights[rng.random_range(0..n)] = 1;
    }
    let total: i64 = weights.iter().sum();
    weights.into_iter().map(|w| Rational::from_ratio(w, total)).collect()
}

pub fn random_two_prover_game<R: Rng + ?Sized>(
    counts: [usize; 4],
    density: f64,
    rng: &mut R,
) -> Result<TwoProverGame<Rational>> {
    let [q1c, q2c, a1c, a2c] = counts;
    let pi = uniform_over_support(q1c * q2c, rng);
    let predicate = (0..q1c * q2c * a1c * a2c).map(|_| Rational::from_ratio(rng.random_bool(density) as i64, 1)).collect();
    TwoProverGame::new(counts, pi, predicate)
}

pub fn random_multi_round_game<R: Rng + ?Sized>(
    q_count: usize,
    a_count: usize,
    rounds: usize,
    density: f64,
    rng: &mut R,
) -> Result<MultiRoundGame<Rational>> {
    let qn = index::pow(q_count, rounds);
    let an = index::pow(a_count, rounds);
    let pi = uniform_over_support(qn, rng);
    let predicate = (0..qn * an).map(|_| rng.random_bool(density) as u8).collect();
    MultiRoundGame::new(q_count, a_count, rounds, pi, predicate)
}

/// Checks on distinct random triples of `positions`, at most `max_checks`.
pub fn random_pcp_game<R: Rng + ?Sized>(
    positions: usize,
    alphabet: usize,
    max_checks: usize,
    density: f64,
    rng: &mut R,
) -> Result<PcpGame<Rational>> {
    if positions < 3 {
        return Err(Error::invalid("a three-query game needs at least three positions"));
    }
    let mut all = Vec::new();
    for a in 0..positions {
        for b in a + 1..positions {
            for c in b + 1..positions {
                all.push([a, b, c]);
            }
        }
    }
    let count = rng.random_range(1..=max_checks.clamp(1, all.len()));
    let mut chosen: Vec<usize> = sample(rng, all.len(), count).into_vec();
    chosen.sort_unstable();
    let triples: Vec<[usize; 3]> = chosen.iter().map(|&i| all[i]).collect();
    let pi = vec![Rational::from_ratio(1, count as i64); count];
    let a3 = alphabet * alphabet * alphabet;
    let predicate = (0..count * a3).map(|_| rng.random_bool(density) as u8).collect();
    PcpGame::new(positions, alphabet, triples, pi, predicate)
}

/// Product of independent random local strategies.
pub fn random_product_strategy<R: Rng + ?Sized>(counts: [usize; 4], rng: &mut R) -> Result<BipartiteStrategy<Rational>> {
    let [q1c, q2c, a1c, a2c] = counts;
    let local1: Vec<Vec<Rational>> = (0..q1c).map(|_| random_distribution(a1c, rng)).collect();
    let local2: Vec<Vec<Rational>> = (0..q2c).map(|_| random_distribution(a2c, rng)).collect();
    BipartiteStrategy::product(&local1, &local2)
}

/// A vertex of the no-signaling polytope on the support of `g`, found by
/// maximizing a random integer objective.
pub fn random_ns_vertex<R: Rng + ?Sized>(g: &TwoProverGame<Rational>, rng: &mut R) -> Result<BipartiteStrategy<Rational>> {
    let ns = no_signaling_lp(g)?;
    let objective = (0..ns.lp.variables()).map(|_| Rational::from_ratio(rng.random_range(-3..=3), 1)).collect();
    let mut lp = LinearProgram::maximize(objective);
    for c in ns.lp.constraints() {
        lp.add(c.coeffs.clone(), c.relation, c.rhs.clone())?;
    }
    let solution = solve_lp(&lp)?;
    if solution.status != LpStatus::Optimal {
        return Err(Error::invalid(format!("random-objective LP reported {:?}", solution.status)));
    }
    ns.strategy(g, &solution.point)
}

/// `lambda * x + (1 - lambda) * y`.
pub fn mix(lambda: &Rational, x: &BipartiteStrategy<Rational>, y: &BipartiteStrategy<Rational>) -> Result<BipartiteStrategy<Rational>> {
    if x.counts() != y.counts() {
        return Err(Error::dims("mixed strategies have different shapes"));
    }
    let rest = Rational::one() - lambda.clone();
    let table = x.table().iter().zip(y.table()).map(|(a, b)| lambda * a + &rest * b).collect();
    BipartiteStrategy::new(x.counts(), table)
}

/// `count` no-signaling strategies for `g` cycling through three kinds:
/// polytope vertices, products of random marginals, and random mixtures of
/// the two with `anchor` (typically the LP optimum).
pub fn random_ns_strategies<R: Rng + ?Sized>(
    g: &TwoProverGame<Rational>,
    anchor: &BipartiteStrategy<Rational>,
    count: usize,
    rng: &mut R,
) -> Result<Vec<BipartiteStrategy<Rational>>> {
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let s = match i % 3 {
            0 => random_ns_vertex(g, rng)?,
            1 => random_product_strategy(g.counts(), rng)?,
            _ => {
                let other = if rng.random_bool(0.5) {
                    random_ns_vertex(g, rng)?
                } else {
                    random_product_strategy(g.counts(), rng)?
                };
                let lambda = Rational::from_ratio(rng.random_range(1..8), 8);
                mix(&lambda, anchor, &other)?
            }
        };
        out.push(s);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::Zero;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_objects_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            assert!(random_two_prover_game([3, 2, 2, 2], 0.5, &mut rng).unwrap().validate().is_valid());
            assert!(random_multi_round_game(2, 2, 2, 0.5, &mut rng).unwrap().validate().is_valid());
            let p = random_pcp_game(5, 2, 4, 0.5, &mut rng).unwrap();
            assert!(p.validate().is_valid());
            assert!(p.triples().iter().all(|t| t[0] < t[1] && t[1] < t[2] && t[2] < 5));
        }
    }

    #[test]
    fn strategies_are_no_signaling() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let g = random_two_prover_game([2, 3, 2, 2], 0.5, &mut rng).unwrap();
        let anchor = crate::values::no_signaling_value(&g).unwrap().witness;
        for s in random_ns_strategies(&g, &anchor, 9, &mut rng).unwrap() {
            assert!(s.validate().is_valid());
            assert!(s.is_no_signaling(&Rational::zero()).no_signaling);
        }
    }
}
