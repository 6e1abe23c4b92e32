//! Finite-dimensional quantum strategies.
//!
//! Prover 1 acts on the first tensor factor and prover 2 on the second, so a
//! state on `C^d1 (x) C^d2` is stored as a vector indexed `i1 * d2 + i2`.
//! Operators are dense complex matrices.

mod magic;
mod random;
mod symmetrize;

use nalgebra::{DMatrix, DVector};
use num::complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{BipartiteStrategy, TwoProverGame};

pub use magic::{catalog_magic_square, magic_square_strategy};
pub use random::{random_povm, random_projective_povm, random_state, random_strategy, random_unitary};
pub use symmetrize::{equal_pair_violation, symmetrize_second_prover};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const POVM_TOL: f64 = 1e-9;
pub const STATE_TOL: f64 = 1e-10;

pub(crate) fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub(crate) fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// A Hermitian matrix, checked entrywise to 1e-10 on construction.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator(CMatrix);

impl HermitianOperator {
    pub fn new(m: CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::dims(format!("operator is {}x{}", m.nrows(), m.ncols())));
        }
        let skew = max_abs(&(&m - m.adjoint()));
        if skew > HERMITIAN_TOL {
            return Err(Error::invalid(format!("operator is not Hermitian (deviation {skew:e})")));
        }
        Ok(HermitianOperator(m))
    }

    /// Symmetrizes `(m + m^dagger) / 2` instead of checking.
    pub fn hermitian_part(m: &CMatrix) -> Self {
        HermitianOperator((m + m.adjoint()) * c(0.5))
    }

    pub fn identity(d: usize) -> Self {
        HermitianOperator(CMatrix::identity(d, d))
    }

    pub fn zeros(d: usize) -> Self {
        HermitianOperator(CMatrix::zeros(d, d))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    /// Eigenvalues in ascending order with matching eigenvector columns.
    pub fn eigen(&self) -> (Vec<f64>, CMatrix) {
        let e = self.0.clone().symmetric_eigen();
        let mut order: Vec<usize> = (0..e.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| e.eigenvalues[a].total_cmp(&e.eigenvalues[b]));
        let values = order.iter().map(|&i| e.eigenvalues[i]).collect();
        let vectors = CMatrix::from_fn(self.dim(), order.len(), |r, col| e.eigenvectors[(r, order[col])]);
        (values, vectors)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigen().0.first().copied().unwrap_or(0.0)
    }

    /// `<v| A |v>`, real part.
    pub fn expectation(&self, v: &CVector) -> f64 {
        v.dotc(&(&self.0 * v)).re
    }
}

/// The PSD square root. Eigenvalues in `[-1e-9, 0)` are treated as 0; more
/// negative ones are an error.
pub fn psd_sqrt(op: &HermitianOperator) -> Result<HermitianOperator> {
    let (values, vectors) = op.eigen();
    if let Some(&v) = values.iter().find(|&&v| v < -POVM_TOL) {
        return Err(Error::invalid(format!("operator has eigenvalue {v:e} below -1e-9")));
    }
    let d = op.dim();
    let roots = DVector::from_iterator(values.len(), values.iter().map(|&v| c(v.max(0.0).sqrt())));
    let scaled = CMatrix::from_fn(d, values.len(), |r, col| vectors[(r, col)] * roots[col]);
    Ok(HermitianOperator::hermitian_part(&(scaled * vectors.adjoint())))
}

/// `sqrt(1 - |<phi|psi>|^2)`, the trace distance of two pure states.
pub fn pure_state_trace_distance(phi: &CVector, psi: &CVector) -> Result<f64> {
    if phi.len() != psi.len() {
        return Err(Error::dims(format!("states of dimension {} and {}", phi.len(), psi.len())));
    }
    for v in [phi, psi] {
        if (v.norm() - 1.0).abs() > 1e-8 {
            return Err(Error::invalid(format!("state has norm {}", v.norm())));
        }
    }
    let overlap = phi.dotc(psi).norm_sqr();
    Ok((1.0 - overlap).max(0.0).sqrt())
}

/// A POVM: PSD elements summing to the identity.
#[derive(Clone, Debug, PartialEq)]
pub struct Povm {
    elements: Vec<HermitianOperator>,
    projective: bool,
}

impl Povm {
    /// Validates positivity and completeness to 1e-9 and records whether
    /// every element is idempotent to 1e-9.
    pub fn new(elements: Vec<HermitianOperator>) -> Result<Self> {
        let d = elements.first().map(|e| e.dim()).ok_or_else(|| Error::invalid("POVM has no outcomes"))?;
        if elements.iter().any(|e| e.dim() != d) {
            return Err(Error::dims("POVM elements differ in dimension"));
        }
        let mut total = CMatrix::zeros(d, d);
        for (a, e) in elements.iter().enumerate() {
            let min = e.min_eigenvalue();
            if min < -POVM_TOL {
                return Err(Error::invalid(format!("POVM element {a} has eigenvalue {min:e}")));
            }
            total += e.matrix();
        }
        let gap = max_abs(&(total - CMatrix::identity(d, d)));
        if gap > POVM_TOL {
            return Err(Error::invalid(format!("POVM elements sum to identity only within {gap:e}")));
        }
        let projective = elements.iter().all(|e| max_abs(&(e.matrix() * e.matrix() - e.matrix())) <= POVM_TOL);
        Ok(Povm { elements, projective })
    }

    /// Builds from raw matrices, taking Hermitian parts first.
    pub fn from_matrices(ms: Vec<CMatrix>) -> Result<Self> {
        Self::new(ms.iter().map(HermitianOperator::hermitian_part).collect())
    }

    /// The measurement that always reports `outcome`.
    pub fn constant(d: usize, outcomes: usize, outcome: usize) -> Self {
        let elements = (0..outcomes)
            .map(|a| if a == outcome { HermitianOperator::identity(d) } else { HermitianOperator::zeros(d) })
            .collect();
        Povm { elements, projective: true }
    }

    pub fn outcomes(&self) -> usize {
        self.elements.len()
    }

    pub fn dim(&self) -> usize {
        self.elements[0].dim()
    }

    pub fn is_projective(&self) -> bool {
        self.projective
    }

    pub fn element(&self, a: usize) -> &HermitianOperator {
        &self.elements[a]
    }

    pub fn elements(&self) -> &[HermitianOperator] {
        &self.elements
    }

    /// `M_a (x) I_k` for every element.
    pub fn tensor_identity(&self, k: usize) -> Povm {
        let id = CMatrix::identity(k, k);
        Povm {
            elements: self.elements.iter().map(|e| HermitianOperator(e.matrix().kronecker(&id))).collect(),
            projective: self.projective,
        }
    }
}

/// Shared pure state plus one POVM per question for each prover.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumStrategy {
    d1: usize,
    d2: usize,
    state: CVector,
    povms1: Vec<Povm>,
    povms2: Vec<Povm>,
}

impl QuantumStrategy {
    pub fn new(d1: usize, d2: usize, state: CVector, povms1: Vec<Povm>, povms2: Vec<Povm>) -> Result<Self> {
        if d1 == 0 || d2 == 0 {
            return Err(Error::invalid("local dimensions must be positive"));
        }
        if state.len() != d1 * d2 {
            return Err(Error::dims(format!("state has dimension {}, expected {}", state.len(), d1 * d2)));
        }
        if (state.norm() - 1.0).abs() > STATE_TOL {
            return Err(Error::invalid(format!("state has norm {}", state.norm())));
        }
        for (side, povms, d) in [(1, &povms1, d1), (2, &povms2, d2)] {
            if povms.iter().any(|p| p.dim() != d) {
                return Err(Error::dims(format!("prover {side} measurement does not act on C^{d}")));
            }
            if povms.windows(2).any(|w| w[0].outcomes() != w[1].outcomes()) {
                return Err(Error::dims(format!("prover {side} measurements differ in outcome count")));
            }
        }
        Ok(QuantumStrategy { d1, d2, state, povms1, povms2 })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.d1, self.d2)
    }

    pub fn state(&self) -> &CVector {
        &self.state
    }

    pub fn povms1(&self) -> &[Povm] {
        &self.povms1
    }

    pub fn povms2(&self) -> &[Povm] {
        &self.povms2
    }

    /// `[q1_count, q2_count, a1_count, a2_count]` of the games it can play.
    pub fn counts(&self) -> [usize; 4] {
        [
            self.povms1.len(),
            self.povms2.len(),
            self.povms1.first().map_or(0, Povm::outcomes),
            self.povms2.first().map_or(0, Povm::outcomes),
        ]
    }

    pub fn is_projective(&self) -> bool {
        self.povms1.iter().chain(&self.povms2).all(Povm::is_projective)
    }

    /// The state as a `d1 x d2` coefficient matrix.
    pub fn state_matrix(&self) -> CMatrix {
        CMatrix::from_fn(self.d1, self.d2, |i, j| self.state[i * self.d2 + j])
    }

    /// `M (x) I` as a matrix on the joint space.
    pub fn lift1(&self, m: &CMatrix) -> CMatrix {
        m.kronecker(&CMatrix::identity(self.d2, self.d2))
    }

    /// `I (x) N` as a matrix on the joint space.
    pub fn lift2(&self, n: &CMatrix) -> CMatrix {
        CMatrix::identity(self.d1, self.d1).kronecker(n)
    }
}

/// `p(a1, a2) = <Psi| M_{q1}^{a1} (x) N_{q2}^{a2} |Psi>`, indexed
/// `a1 * a2_count + a2`.
pub fn joint_distribution(s: &QuantumStrategy, q1: usize, q2: usize) -> Result<Vec<f64>> {
    let m = s.povms1.get(q1).ok_or_else(|| Error::dims(format!("prover 1 has no question {q1}")))?;
    let n = s.povms2.get(q2).ok_or_else(|| Error::dims(format!("prover 2 has no question {q2}")))?;
    let psi = s.state_matrix();
    // <Psi|M (x) N|Psi> = tr(Psi^dagger M Psi N^T) = sum_ij (Psi^dagger M Psi)_ij N_ij.
    let mut out = Vec::with_capacity(m.outcomes() * n.outcomes());
    for ma in m.elements() {
        let left = psi.adjoint() * ma.matrix() * &psi;
        for nb in n.elements() {
            let value: Complex64 = left.iter().zip(nb.matrix().iter()).map(|(x, y)| x * y).sum();
            out.push(value.re);
        }
    }
    Ok(out)
}

pub fn to_bipartite_strategy(s: &QuantumStrategy, counts: [usize; 4]) -> Result<BipartiteStrategy<f64>> {
    if s.counts() != counts {
        return Err(Error::dims(format!("strategy shape {:?} does not match game {:?}", s.counts(), counts)));
    }
    let [q1c, q2c, ..] = counts;
    let mut table = Vec::new();
    for q1 in 0..q1c {
        for q2 in 0..q2c {
            table.extend(joint_distribution(s, q1, q2)?);
        }
    }
    BipartiteStrategy::new(counts, table)
}

/// Winning probability of a quantum strategy.
pub fn eval_quantum(g: &TwoProverGame<f64>, s: &QuantumStrategy) -> Result<f64> {
    if s.counts() != g.counts() {
        return Err(Error::dims(format!("strategy shape {:?} does not match game {:?}", s.counts(), g.counts())));
    }
    let mut total = 0.0;
    for (q1, q2) in g.support() {
        let p = joint_distribution(s, q1, q2)?;
        let row = g.predicate_row(q1, q2);
        total += g.pi(q1, q2) * p.iter().zip(row).map(|(x, r)| x * r).sum::<f64>();
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis_povm() -> Povm {
        let p0 = CMatrix::from_fn(2, 2, |i, j| c((i == 0 && j == 0) as u8 as f64));
        let p1 = CMatrix::from_fn(2, 2, |i, j| c((i == 1 && j == 1) as u8 as f64));
        Povm::from_matrices(vec![p0, p1]).unwrap()
    }

    #[test]
    fn product_state_point_mass() {
        let state = CVector::from_vec(vec![c(1.0), c(0.0), c(0.0), c(0.0)]);
        let s = QuantumStrategy::new(2, 2, state, vec![basis_povm()], vec![basis_povm()]).unwrap();
        let p = joint_distribution(&s, 0, 0).unwrap();
        assert!((p[0] - 1.0).abs() < 1e-12 && p[1..].iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn epr_pair_correlated_bits() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let state = CVector::from_vec(vec![c(h), c(0.0), c(0.0), c(h)]);
        let s = QuantumStrategy::new(2, 2, state, vec![basis_povm()], vec![basis_povm()]).unwrap();
        let p = joint_distribution(&s, 0, 0).unwrap();
        for (got, want) in p.iter().zip([0.5, 0.0, 0.0, 0.5]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn psd_sqrt_examples() {
        let id = HermitianOperator::identity(3);
        assert!(max_abs(&(psd_sqrt(&id).unwrap().into_matrix() - CMatrix::identity(3, 3))) < 1e-12);
        let d = HermitianOperator::new(CMatrix::from_diagonal(&CVector::from_vec(vec![c(4.0), c(9.0)]))).unwrap();
        let want = CMatrix::from_diagonal(&CVector::from_vec(vec![c(2.0), c(3.0)]));
        assert!(max_abs(&(psd_sqrt(&d).unwrap().into_matrix() - want)) < 1e-12);
        let neg = HermitianOperator::new(CMatrix::from_diagonal(&CVector::from_vec(vec![c(-1e-3), c(1.0)]))).unwrap();
        assert!(psd_sqrt(&neg).is_err());
        let tiny = HermitianOperator::new(CMatrix::from_diagonal(&CVector::from_vec(vec![c(-1e-11), c(1.0)]))).unwrap();
        assert!(psd_sqrt(&tiny).is_ok());
    }

    #[test]
    fn trace_distance_examples() {
        let e0 = CVector::from_vec(vec![c(1.0), c(0.0)]);
        let e1 = CVector::from_vec(vec![c(0.0), c(1.0)]);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = CVector::from_vec(vec![c(h), c(h)]);
        assert!(pure_state_trace_distance(&e0, &e0).unwrap().abs() < 1e-12);
        assert!((pure_state_trace_distance(&e0, &e1).unwrap() - 1.0).abs() < 1e-12);
        assert!((pure_state_trace_distance(&e0, &plus).unwrap() - h).abs() < 1e-12);
        assert!(pure_state_trace_distance(&e0, &(e1 * c(2.0))).is_err());
    }

    #[test]
    fn povm_validation() {
        let bad = Povm::from_matrices(vec![CMatrix::identity(2, 2), CMatrix::identity(2, 2)]);
        assert!(bad.is_err());
        let half = CMatrix::identity(2, 2) * c(0.5);
        let p = Povm::from_matrices(vec![half.clone(), half]).unwrap();
        assert!(!p.is_projective());
        assert!(basis_povm().is_projective());
    }

    #[test]
    fn non_hermitian_rejected() {
        let m = CMatrix::from_fn(2, 2, |i, j| c((i < j) as u8 as f64));
        assert!(HermitianOperator::new(m).is_err());
    }
}
