use super::{c, max_abs, CMatrix, CVector, HermitianOperator, Povm, QuantumStrategy};
use crate::error::{Error, Result};

fn check_shape(s: &QuantumStrategy, pairs: &[(usize, usize)], alphabet: usize) -> Result<()> {
    let [_, q2, _, a2] = s.counts();
    if q2 != pairs.len() || a2 != alphabet * alphabet {
        return Err(Error::dims(format!(
            "prover 2 has {q2} questions with {a2} outcomes, expected {} pairs with {} outcomes",
            pairs.len(),
            alphabet * alphabet
        )));
    }
    Ok(())
}

/// Largest entry of any `N_{qq}^{(a, b)}` with `a != b`, over the equal
/// pairs. Prover-2 answers are encoded `a * |A| + b`.
pub fn equal_pair_violation(s: &QuantumStrategy, pairs: &[(usize, usize)], alphabet: usize) -> Result<f64> {
    check_shape(s, pairs, alphabet)?;
    let mut worst: f64 = 0.0;
    for (j, &(p, q)) in pairs.iter().enumerate() {
        if p != q {
            continue;
        }
        for a in 0..alphabet {
            for b in (0..alphabet).filter(|&b| b != a) {
                worst = worst.max(max_abs(s.povms2()[j].element(a * alphabet + b).matrix()));
            }
        }
    }
    Ok(worst)
}

/// Makes prover 2 answer two equal letters on every equal pair.
///
/// An EPR pair is appended with one qubit per prover. Prover 1 ignores it.
/// On a question `(q, q)` prover 2 runs its old measurement and reports the
/// first or the second letter twice, choosing by measuring its EPR qubit.
/// Other questions are untouched.
pub fn symmetrize_second_prover(s: &QuantumStrategy, pairs: &[(usize, usize)], alphabet: usize) -> Result<QuantumStrategy> {
    check_shape(s, pairs, alphabet)?;
    let (d1, d2) = s.dims();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut state = CVector::zeros(4 * d1 * d2);
    for i1 in 0..d1 {
        for i2 in 0..d2 {
            let amp = s.state()[i1 * d2 + i2] * c(h);
            for e in 0..2 {
                state[(i1 * 2 + e) * (2 * d2) + i2 * 2 + e] = amp;
            }
        }
    }
    let povms1 = s.povms1().iter().map(|p| p.tensor_identity(2)).collect();
    let zero = CMatrix::zeros(2, 2);
    let mut ket0 = zero.clone();
    ket0[(0, 0)] = c(1.0);
    let mut ket1 = zero;
    ket1[(1, 1)] = c(1.0);
    let mut povms2 = Vec::with_capacity(pairs.len());
    for (j, &(p, q)) in pairs.iter().enumerate() {
        let old = &s.povms2()[j];
        if p != q {
            povms2.push(old.tensor_identity(2));
            continue;
        }
        let first = |a: usize| -> CMatrix {
            (0..alphabet).map(|b| old.element(a * alphabet + b).matrix().clone()).fold(CMatrix::zeros(d2, d2), |x, y| x + y)
        };
        let second = |a: usize| -> CMatrix {
            (0..alphabet).map(|b| old.element(b * alphabet + a).matrix().clone()).fold(CMatrix::zeros(d2, d2), |x, y| x + y)
        };
        let elements = (0..alphabet * alphabet)
            .map(|code| {
                let (a, b) = (code / alphabet, code % alphabet);
                if a == b {
                    HermitianOperator::hermitian_part(&(first(a).kronecker(&ket0) + second(a).kronecker(&ket1)))
                } else {
                    HermitianOperator::zeros(2 * d2)
                }
            })
            .collect();
        povms2.push(Povm::new(elements)?);
    }
    QuantumStrategy::new(2 * d1, 2 * d2, state, povms1, povms2)
}
