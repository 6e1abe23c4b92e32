use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{classical_value, Method, ValueResult};
use crate::error::{Error, Result};
use crate::model::TwoProverGame;
use crate::quantum::{c, eval_quantum, random_state, random_unitary, CMatrix, CVector, HermitianOperator, Povm, QuantumStrategy};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct SeeSawOptions {
    pub dims: (usize, usize),
    pub restarts: usize,
    pub max_iters: usize,
    pub seed: u64,
    /// Stop a restart once a full iteration gains less than this.
    pub tolerance: f64,
    /// Use the optimal classical strategy as restart 0.
    pub warm_start: bool,
}

impl Default for SeeSawOptions {
    fn default() -> Self {
        SeeSawOptions { dims: (2, 2), restarts: 10, max_iters: 300, seed: 0, tolerance: 1e-11, warm_start: true }
    }
}

/// One restart: the objective after every step (prover 1, prover 2,
/// state, repeated), starting with the initial strategy.
#[derive(Clone, Debug, PartialEq)]
pub struct SeeSawRun {
    pub restart: usize,
    pub warm: bool,
    pub value: f64,
    pub iterations: usize,
    pub trace: Vec<f64>,
}

impl SeeSawRun {
    /// True iff no half-step lowered the objective by more than `slack`.
    pub fn is_monotone(&self, slack: f64) -> bool {
        self.trace.windows(2).all(|w| w[1] >= w[0] - slack)
    }
}

#[derive(Clone, Debug)]
pub struct SeeSawReport {
    pub best: ValueResult<f64, QuantumStrategy>,
    pub best_restart: usize,
    pub runs: Vec<SeeSawRun>,
}

/// A projective measurement kept as an orthonormal basis whose vectors are
/// labelled with outcomes.
#[derive(Clone, Debug)]
struct Frame {
    basis: CMatrix,
    labels: Vec<usize>,
}

impl Frame {
    fn elements(&self, outcomes: usize) -> Vec<CMatrix> {
        let d = self.basis.nrows();
        let mut out = vec![CMatrix::zeros(d, d); outcomes];
        for (j, &a) in self.labels.iter().enumerate() {
            let v = self.basis.column(j);
            out[a] += v * v.adjoint();
        }
        out
    }

    /// Pairwise coordinate ascent on `sum_a tr(M_a B_a)`: for each outcome
    /// pair, the span of their basis vectors is re-split along the
    /// eigenvectors of `B_a - B_b`. Never decreases the objective.
    fn improve(&mut self, ops: &[CMatrix]) {
        let outcomes = ops.len();
        for a in 0..outcomes {
            for b in a + 1..outcomes {
                let idx: Vec<usize> = (0..self.labels.len()).filter(|&j| self.labels[j] == a || self.labels[j] == b).collect();
                if idx.is_empty() {
                    continue;
                }
                let v = CMatrix::from_fn(self.basis.nrows(), idx.len(), |r, col| self.basis[(r, idx[col])]);
                let x = v.adjoint() * (&ops[a] - &ops[b]) * &v;
                let (values, vectors) = HermitianOperator::hermitian_part(&x).eigen();
                let w = v * vectors;
                for (t, &j) in idx.iter().enumerate() {
                    self.basis.set_column(j, &w.column(t));
                    self.labels[j] = if values[t] > 0.0 { a } else { b };
                }
            }
        }
    }
}

struct Problem {
    counts: [usize; 4],
    /// `(q1, q2, pi, predicate row)` over the support.
    terms: Vec<(usize, usize, f64, Vec<f64>)>,
    d1: usize,
    d2: usize,
}

struct Iterate {
    state: CVector,
    m: Vec<Frame>,
    n: Vec<Frame>,
}

impl Problem {
    fn state_matrix(&self, state: &CVector) -> CMatrix {
        CMatrix::from_fn(self.d1, self.d2, |i, j| state[i * self.d2 + j])
    }

    fn objective(&self, it: &Iterate) -> f64 {
        let [_, _, a1c, a2c] = self.counts;
        let psi = self.state_matrix(&it.state);
        let m: Vec<Vec<CMatrix>> = it.m.iter().map(|f| f.elements(a1c)).collect();
        let n: Vec<Vec<CMatrix>> = it.n.iter().map(|f| f.elements(a2c)).collect();
        let left: Vec<Vec<CMatrix>> = m.iter().map(|ms| ms.iter().map(|x| psi.adjoint() * x * &psi).collect()).collect();
        let mut total = 0.0;
        for (q1, q2, p, row) in &self.terms {
            for a1 in 0..a1c {
                for a2 in 0..a2c {
                    let r = row[a1 * a2c + a2];
                    if r == 0.0 {
                        continue;
                    }
                    let v: f64 = left[*q1][a1].iter().zip(n[*q2][a2].iter()).map(|(x, y)| (x * y).re).sum();
                    total += p * r * v;
                }
            }
        }
        total
    }

    fn update_state(&self, it: &mut Iterate) {
        let [_, _, a1c, a2c] = self.counts;
        let dim = self.d1 * self.d2;
        let m: Vec<Vec<CMatrix>> = it.m.iter().map(|f| f.elements(a1c)).collect();
        let n: Vec<Vec<CMatrix>> = it.n.iter().map(|f| f.elements(a2c)).collect();
        let mut op = CMatrix::zeros(dim, dim);
        for (q1, q2, p, row) in &self.terms {
            for a1 in 0..a1c {
                let mut k = CMatrix::zeros(self.d2, self.d2);
                for a2 in 0..a2c {
                    let r = row[a1 * a2c + a2];
                    if r != 0.0 {
                        k += &n[*q2][a2] * c(r);
                    }
                }
                op += m[*q1][a1].kronecker(&k) * c(*p);
            }
        }
        let (_, vectors) = HermitianOperator::hermitian_part(&op).eigen();
        let top = vectors.column(dim - 1).into_owned();
        let norm = top.norm();
        it.state = top / c(norm);
    }

    fn update_prover1(&self, it: &mut Iterate) {
        let [q1c, _, a1c, a2c] = self.counts;
        let psi = self.state_matrix(&it.state);
        let n: Vec<Vec<CMatrix>> = it.n.iter().map(|f| f.elements(a2c)).collect();
        for q in 0..q1c {
            let mut k = vec![CMatrix::zeros(self.d2, self.d2); a1c];
            for (_, q2, p, row) in self.terms.iter().filter(|t| t.0 == q) {
                for (a1, slot) in k.iter_mut().enumerate() {
                    for a2 in 0..a2c {
                        let r = row[a1 * a2c + a2];
                        if r != 0.0 {
                            *slot += &n[*q2][a2] * c(p * r);
                        }
                    }
                }
            }
            // tr((M (x) N) |Psi><Psi|) = tr(M Psi N^T Psi^dagger).
            let ops: Vec<CMatrix> = k.iter().map(|x| &psi * x.transpose() * psi.adjoint()).collect();
            it.m[q].improve(&ops);
        }
    }

    fn update_prover2(&self, it: &mut Iterate) {
        let [_, q2c, a1c, a2c] = self.counts;
        let psi = self.state_matrix(&it.state);
        let m: Vec<Vec<CMatrix>> = it.m.iter().map(|f| f.elements(a1c)).collect();
        for q in 0..q2c {
            let mut l = vec![CMatrix::zeros(self.d1, self.d1); a2c];
            for (q1, _, p, row) in self.terms.iter().filter(|t| t.1 == q) {
                for (a2, slot) in l.iter_mut().enumerate() {
                    for a1 in 0..a1c {
                        let r = row[a1 * a2c + a2];
                        if r != 0.0 {
                            *slot += &m[*q1][a1] * c(p * r);
                        }
                    }
                }
            }
            // tr((M (x) N) |Psi><Psi|) = tr(N (Psi^dagger M Psi)^T).
            let ops: Vec<CMatrix> = l.iter().map(|x| (psi.adjoint() * x * &psi).transpose()).collect();
            it.n[q].improve(&ops);
        }
    }

    fn random_iterate(&self, rng: &mut ChaCha8Rng) -> Iterate {
        use rand::Rng;
        let [q1c, q2c, a1c, a2c] = self.counts;
        let frame = |d: usize, outcomes: usize, rng: &mut ChaCha8Rng| Frame {
            basis: random_unitary(d, rng),
            labels: {
                let shift = rng.random_range(0..outcomes);
                (0..d).map(|j| (j + shift) % outcomes).collect()
            },
        };
        let state = random_state(self.d1 * self.d2, rng);
        let m = (0..q1c).map(|_| frame(self.d1, a1c, rng)).collect();
        let n = (0..q2c).map(|_| frame(self.d2, a2c, rng)).collect();
        Iterate { state, m, n }
    }

    fn classical_iterate(&self, f1: &[usize], f2: &[usize]) -> Iterate {
        let mut state = CVector::zeros(self.d1 * self.d2);
        state[0] = c(1.0);
        let fixed = |d: usize, a: usize| Frame { basis: CMatrix::identity(d, d), labels: vec![a; d] };
        Iterate {
            state,
            m: f1.iter().map(|&a| fixed(self.d1, a)).collect(),
            n: f2.iter().map(|&a| fixed(self.d2, a)).collect(),
        }
    }

    fn run(&self, mut it: Iterate, max_iters: usize, tolerance: f64) -> (Iterate, Vec<f64>, usize) {
        let mut trace = vec![self.objective(&it)];
        let mut iterations = 0;
        while iterations < max_iters {
            let before = *trace.last().expect("nonempty");
            self.update_prover1(&mut it);
            trace.push(self.objective(&it));
            self.update_prover2(&mut it);
            trace.push(self.objective(&it));
            self.update_state(&mut it);
            trace.push(self.objective(&it));
            iterations += 1;
            if trace.last().expect("nonempty") - before < tolerance {
                break;
            }
        }
        (it, trace, iterations)
    }

    fn strategy(&self, it: &Iterate) -> Result<QuantumStrategy> {
        let [_, _, a1c, a2c] = self.counts;
        let povms1 = it.m.iter().map(|f| Povm::from_matrices(f.elements(a1c))).collect::<Result<Vec<_>>>()?;
        let povms2 = it.n.iter().map(|f| Povm::from_matrices(f.elements(a2c))).collect::<Result<Vec<_>>>()?;
        let norm = it.state.norm();
        QuantumStrategy::new(self.d1, self.d2, &it.state / c(norm), povms1, povms2)
    }
}

/// See-saw search for a good entangled strategy with local dimensions
/// `opts.dims`. Restarts run in parallel; the result depends only on the
/// options.
pub fn see_saw<S: Scalar>(g: &TwoProverGame<S>, opts: &SeeSawOptions) -> Result<SeeSawReport> {
    let (d1, d2) = opts.dims;
    if d1 == 0 || d2 == 0 {
        return Err(Error::invalid("see-saw dimensions must be positive"));
    }
    if opts.restarts == 0 {
        return Err(Error::invalid("see-saw needs at least one restart"));
    }
    let gf = g.map_scalar(|v| v.to_f64());
    let problem = Problem {
        counts: g.counts(),
        terms: gf
            .support()
            .into_iter()
            .map(|(q1, q2)| (q1, q2, *gf.pi(q1, q2), gf.predicate_row(q1, q2).to_vec()))
            .collect(),
        d1,
        d2,
    };
    let warm = if opts.warm_start {
        classical_value(g).ok().map(|v| (v.witness.f1, v.witness.f2))
    } else {
        None
    };
    let results: Vec<(SeeSawRun, Iterate)> = (0..opts.restarts)
        .into_par_iter()
        .map(|restart| {
            let (start, is_warm) = match (&warm, restart) {
                (Some((f1, f2)), 0) => (problem.classical_iterate(f1, f2), true),
                _ => {
                    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
                    rng.set_stream(restart as u64);
                    (problem.random_iterate(&mut rng), false)
                }
            };
            let (it, trace, iterations) = problem.run(start, opts.max_iters, opts.tolerance);
            let value = *trace.last().expect("nonempty");
            (SeeSawRun { restart, warm: is_warm, value, iterations, trace }, it)
        })
        .collect();
    let mut best = 0;
    for (i, (run, _)) in results.iter().enumerate() {
        if run.value > results[best].0.value {
            best = i;
        }
    }
    let witness = problem.strategy(&results[best].1)?;
    let value = eval_quantum(&gf, &witness)?;
    let runs = results.into_iter().map(|(run, _)| run).collect();
    Ok(SeeSawReport {
        best: ValueResult { value, witness, method: Method::SeeSaw, exact: false },
        best_restart: best,
        runs,
    })
}

/// The best see-saw value: a lower bound on the entangled value.
pub fn entangled_lower_bound<S: Scalar>(g: &TwoProverGame<S>, opts: &SeeSawOptions) -> Result<ValueResult<f64, QuantumStrategy>> {
    see_saw(g, opts).map(|r| r.best)
}
