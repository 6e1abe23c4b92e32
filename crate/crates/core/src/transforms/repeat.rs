use crate::error::{Error, Result};
use crate::limits::{checked_pow, Limits};
use crate::model::{index, TwoProverGame};
use crate::scalar::Scalar;

/// The `n`-fold parallel repetition: questions drawn from `pi^n`, answers are
/// `n`-tuples, and the verifier accepts iff every coordinate accepts.
/// Tuples are encoded big-endian with coordinate 0 most significant.
pub fn parallel_repeat<S: Scalar>(g: &TwoProverGame<S>, n: usize) -> Result<TwoProverGame<S>> {
    if n == 0 {
        return Err(Error::invalid("repetition count must be positive"));
    }
    let [q1, q2, a1, a2] = g.counts();
    let entries = [q1, q2, a1, a2]
        .iter()
        .fold(1u128, |acc, &c| acc.saturating_mul(checked_pow(c, n)));
    Limits::from_env().check_table("repeated predicate", entries)?;
    let counts = [q1, q2, a1, a2].map(|c| index::pow(c, n));
    let digits = |i: usize, base: usize| index::decode(i, base, n);
    let pi = |i1: usize, i2: usize| {
        let (x, y) = (digits(i1, q1), digits(i2, q2));
        (0..n).fold(S::one(), |acc, t| acc * g.pi(x[t], y[t]).clone())
    };
    let mut game = TwoProverGame::from_fn(counts, pi, |i1, i2, j1, j2| {
        let (x, y, u, v) = (digits(i1, q1), digits(i2, q2), digits(j1, a1), digits(j2, a2));
        let mut acc = S::one();
        for t in 0..n {
            let p = g.predicate(x[t], y[t], u[t], v[t]);
            if p.is_zero() {
                return S::zero();
            }
            acc = acc * p.clone();
        }
        acc
    })?;
    if n == 1 {
        game.labels = g.labels.clone();
    }
    Ok(game)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::chsh;

    #[test]
    fn single_copy_is_identity() {
        assert_eq!(parallel_repeat(&chsh(), 1).unwrap(), chsh());
    }

    #[test]
    fn shapes_and_validity() {
        let g = parallel_repeat(&chsh(), 2).unwrap();
        assert_eq!(g.counts(), [4, 4, 4, 4]);
        assert!(g.validate().is_valid());
    }
}
