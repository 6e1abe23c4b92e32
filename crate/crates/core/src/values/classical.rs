use std::ops::{Add, Sub};

use num::{BigInt, Integer, One, ToPrimitive, Zero};

use super::{Method, ValueResult};
use crate::error::Result;
use crate::limits::{checked_pow, Limits};
use crate::model::{DeterministicBipartiteStrategy, TwoProverGame};
use crate::scalar::{Rational, Scalar, ScalarMode};

/// Accumulator used by the enumeration: scaled integers when the weights
/// allow it, otherwise the game's own scalar.
trait Acc: Clone + PartialOrd + Add<Output = Self> + Sub<Output = Self> {
    fn zero() -> Self;
}

impl Acc for i128 {
    fn zero() -> Self {
        0
    }
}

impl Acc for f64 {
    fn zero() -> Self {
        0.0
    }
}

impl Acc for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
}

/// Weights `w[((x * qo + o) * ax + ai) * ao + bi]` with the enumerated
/// prover first.
struct Layout {
    qx: usize,
    qo: usize,
    ax: usize,
    ao: usize,
}

/// Best assignment of the enumerated prover, with best responses.
fn enumerate<T: Acc>(w: &[T], l: &Layout) -> (Vec<usize>, Vec<usize>) {
    let at = |x: usize, o: usize, a: usize, b: usize| &w[((x * l.qo + o) * l.ax + a) * l.ao + b];
    let mut f = vec![0usize; l.qx];
    let mut score = vec![T::zero(); l.qo * l.ao];
    for x in 0..l.qx {
        for o in 0..l.qo {
            for b in 0..l.ao {
                score[o * l.ao + b] = score[o * l.ao + b].clone() + at(x, o, 0, b).clone();
            }
        }
    }
    let total = |score: &[T]| -> T {
        (0..l.qo).fold(T::zero(), |acc, o| {
            let best = score[o * l.ao..(o + 1) * l.ao]
                .iter()
                .fold(None::<&T>, |m, v| match m {
                    Some(m) if m >= v => Some(m),
                    _ => Some(v),
                })
                .cloned()
                .unwrap_or_else(T::zero);
            acc + best
        })
    };
    let mut best_value = total(&score);
    let mut best_f = f.clone();
    'outer: loop {
        // Odometer step, last digit fastest.
        let mut x = l.qx;
        loop {
            if x == 0 {
                break 'outer;
            }
            x -= 1;
            let old = f[x];
            let new = if old + 1 == l.ax { 0 } else { old + 1 };
            f[x] = new;
            for o in 0..l.qo {
                for b in 0..l.ao {
                    let i = o * l.ao + b;
                    score[i] = score[i].clone() + at(x, o, new, b).clone() - at(x, o, old, b).clone();
                }
            }
            if new != 0 {
                break;
            }
        }
        let v = total(&score);
        if v > best_value {
            best_value = v;
            best_f = f.clone();
        }
    }
    // Best responses to the winning assignment, first maximum on ties.
    let responses = (0..l.qo)
        .map(|o| {
            let mut best = 0;
            let mut best_v: Option<T> = None;
            for b in 0..l.ao {
                let v = (0..l.qx).fold(T::zero(), |acc, x| acc + at(x, o, best_f[x], b).clone());
                if best_v.as_ref().is_none_or(|m| v > *m) {
                    best_v = Some(v);
                    best = b;
                }
            }
            best
        })
        .collect();
    (best_f, responses)
}

/// Scales rational weights to integers sharing one denominator, when the
/// result fits comfortably in `i128`.
fn integer_weights(w: &[Rational]) -> Option<Vec<i128>> {
    let mut lcm = BigInt::one();
    for v in w {
        lcm = lcm.lcm(v.denom());
        if lcm.bits() > 96 {
            return None;
        }
    }
    w.iter()
        .map(|v| (v.numer() * (&lcm / v.denom())).to_i128())
        .collect()
}

pub fn classical_value<S: Scalar>(g: &TwoProverGame<S>) -> Result<ValueResult<S, DeterministicBipartiteStrategy>> {
    classical_value_with_limits(g, &Limits::from_env())
}

/// Exact maximum over deterministic strategy pairs. The prover with fewer
/// assignments is enumerated and the other plays best responses.
pub fn classical_value_with_limits<S: Scalar>(
    g: &TwoProverGame<S>,
    limits: &Limits,
) -> Result<ValueResult<S, DeterministicBipartiteStrategy>> {
    let [q1, q2, a1, a2] = g.counts();
    let swap = checked_pow(a2, q2) < checked_pow(a1, q1);
    let game = if swap { g.swap_provers() } else { g.clone() };
    let [qx, qo, ax, ao] = game.counts();
    limits.check_table("classical strategy enumeration", checked_pow(ax, qx).saturating_mul((qo * ao) as u128))?;
    let weights = game.weights();
    let layout = Layout { qx, qo, ax, ao };
    let (fx, fo) = match S::MODE {
        ScalarMode::Float => enumerate(&weights.iter().map(Scalar::to_f64).collect::<Vec<_>>(), &layout),
        ScalarMode::Rational => {
            let exact: Vec<Rational> = weights.iter().map(|v| v.to_rational().expect("rational mode")).collect();
            match integer_weights(&exact) {
                Some(ints) => enumerate(&ints, &layout),
                None => enumerate(&exact, &layout),
            }
        }
    };
    let witness = if swap {
        DeterministicBipartiteStrategy::new(fo, fx)
    } else {
        DeterministicBipartiteStrategy::new(fx, fo)
    };
    let value = witness.evaluate(g)?;
    Ok(ValueResult { value, witness, method: Method::ClassicalEnumeration, exact: S::MODE == ScalarMode::Rational })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{chsh, magic_square, magic_square_rc};

    fn r(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn chsh_three_quarters() {
        let v = classical_value(&chsh()).unwrap();
        assert_eq!(v.value, r(3, 4));
        assert_eq!(v.witness.evaluate(&chsh()).unwrap(), r(3, 4));
    }

    #[test]
    fn magic_square_variants() {
        assert_eq!(classical_value(&magic_square()).unwrap().value, r(17, 18));
        assert_eq!(classical_value(&magic_square_rc()).unwrap().value, r(8, 9));
    }

    #[test]
    fn float_mode_agrees() {
        let v = classical_value(&chsh().to_float()).unwrap();
        assert!((v.value - 0.75).abs() < 1e-12);
        assert!(!v.exact);
    }

    #[test]
    fn rejecting_game_is_zero() {
        let g = TwoProverGame::from_fn([2, 3, 2, 2], |_, _| r(1, 6), |_, _, _, _| r(0, 1)).unwrap();
        assert_eq!(classical_value(&g).unwrap().value, r(0, 1));
    }

    #[test]
    fn rational_fallback_path() {
        let big = [r(1, 1), r(0, 1)];
        let w = vec![r(1, i64::MAX), r(1, i64::MAX - 1), r(1, i64::MAX - 2)];
        assert!(integer_weights(&w).is_none());
        let layout = Layout { qx: 1, qo: 1, ax: 2, ao: 1 };
        let (fx, _) = enumerate(&big, &layout);
        assert_eq!(fx, vec![0]);
    }
}
