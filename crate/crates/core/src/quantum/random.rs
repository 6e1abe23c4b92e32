use num::complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{c, CMatrix, CVector, HermitianOperator, Povm, QuantumStrategy};
use crate::error::Result;

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// A normalized complex Gaussian vector.
pub fn random_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CVector {
    let v = CVector::from_fn(dim, |_, _| gaussian(rng));
    let n = v.norm();
    v / c(n)
}

/// Haar-distributed unitary from the QR decomposition of a Gaussian matrix,
/// with the phases of `R`'s diagonal moved into `Q`.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(d, d, |_, _| gaussian(rng));
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    CMatrix::from_fn(d, d, |i, j| {
        let diag = r[(j, j)];
        let phase = if diag.norm() > 0.0 { diag / c(diag.norm()) } else { c(1.0) };
        q[(i, j)] * phase
    })
}

/// A projective measurement: the columns of a random unitary, each given to
/// a uniformly random outcome.
pub fn random_projective_povm<R: Rng + ?Sized>(d: usize, outcomes: usize, rng: &mut R) -> Povm {
    let u = random_unitary(d, rng);
    let mut elements = vec![CMatrix::zeros(d, d); outcomes];
    for col in 0..d {
        let a = rng.random_range(0..outcomes);
        let v = u.column(col);
        elements[a] += v * v.adjoint();
    }
    let elements = elements.iter().map(HermitianOperator::hermitian_part).collect();
    Povm::new(elements).expect("rank-one projectors of a unitary form a PVM")
}

/// A generic (non-projective) measurement `S^{-1/2} G_a^* G_a S^{-1/2}`
/// with Gaussian `G_a` and `S = sum_a G_a^* G_a`.
pub fn random_povm<R: Rng + ?Sized>(d: usize, outcomes: usize, rng: &mut R) -> Povm {
    let raw: Vec<CMatrix> = (0..outcomes)
        .map(|_| {
            let g = CMatrix::from_fn(d, d, |_, _| gaussian(rng));
            g.adjoint() * g
        })
        .collect();
    let total = raw.iter().fold(CMatrix::zeros(d, d), |acc, p| acc + p);
    let (values, vectors) = HermitianOperator::hermitian_part(&total).eigen();
    let inv_sqrt = CMatrix::from_diagonal(&CVector::from_iterator(d, values.iter().map(|v| c(1.0 / v.sqrt()))));
    let w = &vectors * inv_sqrt * vectors.adjoint();
    let elements = raw.iter().map(|p| HermitianOperator::hermitian_part(&(&w * p * &w))).collect();
    Povm::new(elements).expect("normalized Gram family is a POVM")
}

/// Random state and random projective measurements for every question.
pub fn random_strategy<R: Rng + ?Sized>(d1: usize, d2: usize, counts: [usize; 4], rng: &mut R) -> Result<QuantumStrategy> {
    let [q1, q2, a1, a2] = counts;
    let state = random_state(d1 * d2, rng);
    let povms1 = (0..q1).map(|_| random_projective_povm(d1, a1, rng)).collect();
    let povms2 = (0..q2).map(|_| random_projective_povm(d2, a2, rng)).collect();
    QuantumStrategy::new(d1, d2, state, povms1, povms2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::max_abs;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for d in 1..5 {
            let u = random_unitary(d, &mut rng);
            assert!(max_abs(&(u.adjoint() * &u - CMatrix::identity(d, d))) < 1e-12);
        }
    }

    #[test]
    fn random_povm_is_projective() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let p = random_projective_povm(3, 4, &mut rng);
        assert!(p.is_projective());
        assert_eq!(p.outcomes(), 4);
    }

    #[test]
    fn generic_povm_sums_to_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = random_povm(3, 2, &mut rng);
        let total = p.elements().iter().fold(CMatrix::zeros(3, 3), |acc, e| acc + e.matrix());
        assert!(max_abs(&(total - CMatrix::identity(3, 3))) < 1e-10);
        assert!(!p.is_projective());
    }
}
