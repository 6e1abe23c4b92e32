use crate::error::{Error, Result};
use crate::limits::{checked_pow, Limits};
use crate::model::{index, PcpGame, PcpProofDistribution};
use crate::quantum::{
    c, equal_pair_violation, psd_sqrt, pure_state_trace_distance, CMatrix, CVector, HermitianOperator, Povm,
    QuantumStrategy,
};
use crate::scalar::Scalar;
use crate::transforms::OracularizedPcpDummy;

use super::{Inequality, InequalityReport};

/// Tolerance for every float inequality of the entangled rounding.
pub const COM_TOLERANCE: f64 = 1e-7;
const SYMMETRY_TOL: f64 = 1e-9;

/// Operators and distances of a projective strategy for a
/// dummy-oracularized PCP game. Position-indexed tables use the base game's
/// position labels; entries for never-queried positions are empty or zero.
#[derive(Clone, Debug)]
pub struct ComRoundingTables {
    pub alphabet: usize,
    pub positions: usize,
    /// Queried positions in label order.
    pub queried: Vec<usize>,
    /// Queried positions by descending `pi(q)`, ties by label.
    pub order: Vec<usize>,
    /// Position of each label in `order`.
    pub rank: Vec<Option<usize>>,
    pub marginal: Vec<f64>,
    pub triples: Vec<[usize; 3]>,
    pub triple_weights: Vec<f64>,
    /// Acceptance probability per triple and answer code.
    pub accept: Vec<Vec<f64>>,
    pub dims: (usize, usize),
    /// The shared state as a `d1 x d2` coefficient matrix.
    pub psi: CMatrix,
    /// `M_{q_i | T}` per triple and slot (prover 1).
    pub m_slot: Vec<[Vec<CMatrix>; 3]>,
    /// `M_T` per triple (prover 1).
    pub m_full: Vec<Vec<CMatrix>>,
    /// `N_{q | q q~}` indexed `[q][q~]` (prover 2).
    pub n_marg: Vec<Vec<Vec<CMatrix>>>,
    pub m_bar: Vec<Vec<CMatrix>>,
    pub n_bar: Vec<Vec<CMatrix>>,
    pub x: Vec<Vec<CMatrix>>,
    pub y: Vec<Vec<CMatrix>>,
    pub d1: Vec<f64>,
    /// `d2(q | q~)`.
    pub d2: Vec<Vec<f64>>,
    /// `d3(q_i | T)` per triple and slot.
    pub d3: Vec<[f64; 3]>,
    pub d4: Vec<Vec<f64>>,
    pub eps: f64,
    pub eps_cons: f64,
    pub eps_sim: f64,
}

/// `<Psi| A (x) B |Psi>` for the coefficient matrix `psi`.
fn expect(psi: &CMatrix, a: &CMatrix, b: &CMatrix) -> f64 {
    let left = psi.adjoint() * a * psi;
    left.iter().zip(b.iter()).map(|(x, y)| (x * y).re).sum()
}

/// `(A (x) I)|Psi>` and `(I (x) B)|Psi>` in coefficient form.
fn apply1(a: &CMatrix, psi: &CMatrix) -> CMatrix {
    a * psi
}

fn apply2(b: &CMatrix, psi: &CMatrix) -> CMatrix {
    psi * b.transpose()
}

/// `D(sum_a |a> (x) u_a, sum_a |a> (x) v_a)` for unit-norm families.
fn family_distance(u: &[CMatrix], v: &[CMatrix]) -> Result<f64> {
    let flat = |f: &[CMatrix]| CVector::from_iterator(f.iter().map(|m| m.len()).sum(), f.iter().flat_map(|m| m.iter().copied()));
    pure_state_trace_distance(&flat(u), &flat(v))
}

fn sqrt_all(ops: &[CMatrix]) -> Result<Vec<CMatrix>> {
    ops.iter().map(|m| psd_sqrt(&HermitianOperator::hermitian_part(m)).map(HermitianOperator::into_matrix)).collect()
}

fn slot_marginal(elements: &[CMatrix], alphabet: usize, slot: usize, width: usize) -> Vec<CMatrix> {
    let d = elements[0].nrows();
    let mut out = vec![CMatrix::zeros(d, d); alphabet];
    for (code, e) in elements.iter().enumerate() {
        let letter = index::decode(code, alphabet, width)[slot];
        out[letter] += e;
    }
    out
}

/// Builds every table of the entangled rounding for strategy `s` in the
/// dummy-oracularized game `o`.
///
/// `s` must be projective and symmetric on equal pairs (see
/// `symmetrize_second_prover`).
pub fn com_decompose<S: Scalar>(o: &OracularizedPcpDummy<S>, s: &QuantumStrategy) -> Result<ComRoundingTables> {
    if s.counts() != o.game.counts() {
        return Err(Error::dims(format!("strategy counts {:?} do not match game {:?}", s.counts(), o.game.counts())));
    }
    if !s.is_projective() {
        return Err(Error::NotProjective("entangled rounding needs projective measurements".into()));
    }
    let violation = equal_pair_violation(s, &o.pairs, o.alphabet)?;
    if violation > SYMMETRY_TOL {
        return Err(Error::NotSymmetrized(violation));
    }
    let a = o.alphabet;
    let nq = o.positions;
    let (d1, d2) = s.dims();
    let psi = s.state_matrix();
    let marginal: Vec<f64> = o.marginal.iter().map(|v| v.to_f64()).collect();
    let queried: Vec<usize> = (0..nq).filter(|&q| !o.marginal[q].is_zero()).collect();
    let mut order = queried.clone();
    order.sort_by(|&p, &q| marginal[q].total_cmp(&marginal[p]).then(p.cmp(&q)));
    let mut rank = vec![None; nq];
    for (i, &q) in order.iter().enumerate() {
        rank[q] = Some(i);
    }
    let triple_weights: Vec<f64> = o.accept.iter().map(|t| t.weight.to_f64()).collect();
    let accept: Vec<Vec<f64>> = o.accept.iter().map(|t| t.accept.iter().map(|v| v.to_f64()).collect()).collect();

    let m_full: Vec<Vec<CMatrix>> =
        s.povms1().iter().map(|p| p.elements().iter().map(|e| e.matrix().clone()).collect()).collect();
    let m_slot: Vec<[Vec<CMatrix>; 3]> = m_full
        .iter()
        .map(|els| [slot_marginal(els, a, 0, 3), slot_marginal(els, a, 1, 3), slot_marginal(els, a, 2, 3)])
        .collect();

    let mut n_marg = vec![vec![Vec::new(); nq]; nq];
    for &q in &queried {
        for &qt in &queried {
            let (pair, coord) = if q <= qt { ((q, qt), 0) } else { ((qt, q), 1) };
            let j = o.pair_index(pair.0, pair.1).ok_or_else(|| Error::invalid("queried pair missing from the game"))?;
            let els: Vec<CMatrix> = s.povms2()[j].elements().iter().map(|e| e.matrix().clone()).collect();
            n_marg[q][qt] = slot_marginal(&els, a, coord, 2);
        }
    }

    let mut m_bar = vec![Vec::new(); nq];
    let mut n_bar = vec![Vec::new(); nq];
    for &q in &queried {
        let mut acc = vec![CMatrix::zeros(d1, d1); a];
        for (t, triple) in o.triples.iter().enumerate() {
            for (slot, &p) in triple.iter().enumerate() {
                if p == q {
                    for (x, m) in acc.iter_mut().zip(&m_slot[t][slot]) {
                        *x += m * c(triple_weights[t]);
                    }
                }
            }
        }
        let scale = 1.0 / (3.0 * marginal[q]);
        m_bar[q] = acc.into_iter().map(|x| x * c(scale)).collect();
        let mut accn = vec![CMatrix::zeros(d2, d2); a];
        for &qt in &queried {
            for (x, n) in accn.iter_mut().zip(&n_marg[q][qt]) {
                *x += n * c(marginal[qt]);
            }
        }
        n_bar[q] = accn;
    }
    let mut x = vec![Vec::new(); nq];
    let mut y = vec![Vec::new(); nq];
    for &q in &queried {
        x[q] = sqrt_all(&m_bar[q])?;
        y[q] = sqrt_all(&n_bar[q])?;
    }

    let xs = |q: usize| -> Vec<CMatrix> { x[q].iter().map(|m| apply1(m, &psi)).collect() };
    let ys = |q: usize| -> Vec<CMatrix> { y[q].iter().map(|m| apply2(m, &psi)).collect() };
    let mut d1v = vec![0.0; nq];
    let mut d2v = vec![vec![0.0; nq]; nq];
    let mut d4v = vec![vec![0.0; nq]; nq];
    for &q in &queried {
        d1v[q] = family_distance(&xs(q), &ys(q))?;
        for &qt in &queried {
            let ns: Vec<CMatrix> = n_marg[q][qt].iter().map(|m| apply2(m, &psi)).collect();
            d2v[q][qt] = family_distance(&xs(q), &ns)?;
            let mut left = Vec::with_capacity(a * a);
            let mut right = Vec::with_capacity(a * a);
            for a1 in 0..a {
                for a2 in 0..a {
                    left.push(&x[qt][a2] * &x[q][a1] * &psi);
                    right.push(&x[q][a1] * &x[qt][a2] * &psi);
                }
            }
            d4v[q][qt] = family_distance(&left, &right)?;
        }
    }
    let mut d3v = Vec::with_capacity(o.triples.len());
    for (t, triple) in o.triples.iter().enumerate() {
        let mut row = [0.0; 3];
        for (slot, &q) in triple.iter().enumerate() {
            let ms: Vec<CMatrix> = m_slot[t][slot].iter().map(|m| apply1(m, &psi)).collect();
            row[slot] = family_distance(&ms, &ys(q))?;
        }
        d3v.push(row);
    }

    let identity2 = CMatrix::identity(d2, d2);
    let mut win_cons = 0.0;
    for &q in &queried {
        let agree: f64 = (0..a).map(|b| expect(&psi, &m_bar[q][b], &n_bar[q][b])).sum();
        win_cons += marginal[q] * agree;
    }
    let mut win_sim = 0.0;
    let mut win = 0.0;
    for (t, triple) in o.triples.iter().enumerate() {
        for (code, m) in m_full[t].iter().enumerate() {
            let rv = accept[t][code];
            if rv == 0.0 {
                continue;
            }
            win_sim += triple_weights[t] * rv * expect(&psi, m, &identity2);
            let letters = index::decode(code, a, 3);
            for (slot, &q) in triple.iter().enumerate() {
                win += triple_weights[t] / 3.0 * rv * expect(&psi, m, &n_bar[q][letters[slot]]);
            }
        }
    }

    Ok(ComRoundingTables {
        alphabet: a,
        positions: nq,
        queried,
        order,
        rank,
        marginal,
        triples: o.triples.clone(),
        triple_weights,
        accept,
        dims: (d1, d2),
        psi,
        m_slot,
        m_full,
        n_marg,
        m_bar,
        n_bar,
        x,
        y,
        d1: d1v,
        d2: d2v,
        d3: d3v,
        d4: d4v,
        eps: 1.0 - win,
        eps_cons: 1.0 - win_cons,
        eps_sim: 1.0 - win_sim,
    })
}

/// The rounded proof distribution `theta(Pi) = ||X_{Q}..X_{1}|Psi>||^2`,
/// applying positions in descending-marginal order. Unqueried positions
/// are fixed to letter 0.
#[derive(Clone, Debug)]
pub struct ComRounding {
    /// Unnormalized `theta` over `A^positions`, position 0 most significant.
    pub raw: Vec<f64>,
    /// `1 - sum(raw)`.
    pub deficit: f64,
    pub distribution: PcpProofDistribution<f64>,
}

impl ComRounding {
    /// `theta(a_1, a_2, a_3 | T)` from the unnormalized table.
    pub fn triple_marginal(&self, t: &ComRoundingTables, triple: [usize; 3]) -> Vec<f64> {
        let a = t.alphabet;
        let mut out = vec![0.0; a * a * a];
        for (code, v) in self.raw.iter().enumerate() {
            let proof = index::decode(code, a, t.positions);
            out[(proof[triple[0]] * a + proof[triple[1]]) * a + proof[triple[2]]] += v;
        }
        out
    }
}

pub fn round_com(t: &ComRoundingTables) -> Result<ComRounding> {
    let a = t.alphabet;
    Limits::from_env().check_table("rounded proof distribution", checked_pow(a, t.positions))?;
    let mut raw = vec![0.0; index::pow(a, t.positions)];
    let mut proof = vec![0usize; t.positions];
    fn walk(t: &ComRoundingTables, depth: usize, v: &CMatrix, proof: &mut [usize], raw: &mut [f64]) {
        if depth == t.order.len() {
            raw[index::encode(proof, t.alphabet)] = v.norm_squared();
            return;
        }
        let q = t.order[depth];
        for letter in 0..t.alphabet {
            let next = &t.x[q][letter] * v;
            proof[q] = letter;
            walk(t, depth + 1, &next, proof, raw);
        }
        proof[q] = 0;
    }
    walk(t, 0, &t.psi, &mut proof, &mut raw);
    let total: f64 = raw.iter().sum();
    let distribution = PcpProofDistribution::dense(t.positions, a, raw.iter().map(|v| v / total).collect())?;
    Ok(ComRounding { deficit: 1.0 - total, raw, distribution })
}

/// The aggregate distance `d(q1, q2, q3)` bounding the per-triple gap
/// between the rounded and the real first-prover distribution.
fn triple_distance(t: &ComRoundingTables, ti: usize) -> f64 {
    let mut total = 0.0;
    for (slot, &q) in t.triples[ti].iter().enumerate() {
        let rq = t.rank[q].expect("triple positions are queried");
        for &p in &t.order[..rq] {
            total += 2.0 * t.d1[p] + t.d4[q][p];
        }
        total += t.d1[q] + t.d3[ti][slot];
    }
    total
}

/// Every inequality of the entangled soundness argument, given the base
/// game's value `w`.
pub fn verify_com_claims(
    g: &PcpGame<f64>,
    w: f64,
    t: &ComRoundingTables,
    rounding: &ComRounding,
) -> Result<InequalityReport<f64>> {
    if g.positions() != t.positions || g.alphabet() != t.alphabet {
        return Err(Error::dims("base game does not match the rounding tables"));
    }
    let tol = COM_TOLERANCE;
    let mut report = InequalityReport::default();
    let pi = &t.marginal;
    let q_eff = t.queried.len() as f64;

    report.check("eps-covers-consistency", t.eps_cons, t.eps, &tol);
    report.check("eps-covers-simulation", t.eps_sim, t.eps, &tol);
    report.check("rounding-deficit", rounding.deficit.abs(), 0.0, &tol);

    let e1: f64 = t.queried.iter().map(|&q| pi[q] * t.d1[q].powi(2)).sum();
    report.check("d1-mean-square", e1, 2.0 * t.eps_cons, &tol);
    let mut e2 = 0.0;
    let mut e4 = 0.0;
    for &q in &t.queried {
        for &qt in &t.queried {
            e2 += pi[q] * pi[qt] * t.d2[q][qt].powi(2);
            e4 += pi[q] * pi[qt] * t.d4[q][qt].powi(2);
        }
    }
    report.check("d2-mean-square", e2, 2.0 * t.eps_cons, &tol);
    let e3: f64 =
        t.d3.iter().zip(&t.triple_weights).map(|(row, w)| w * row.iter().map(|d| d * d).sum::<f64>() / 3.0).sum();
    report.check("d3-mean-square", e3, 2.0 * t.eps_cons, &tol);
    report.check("d4-mean-square", e4, 32.0 * t.eps_cons, &tol);
    for &q in &t.queried {
        for &p in &t.queried {
            let bound = 2.0 * (t.d2[q][p] + t.d2[p][q]);
            report.check(format!("d4-pair q={q} p={p}"), t.d4[q][p], bound, &tol);
        }
    }

    for &q in &t.queried {
        let lemma = lemma_distance_matrices(&t.m_bar[q], &t.n_bar[q], &t.psi)?;
        report.check(format!("distance-fidelity q={q}"), lemma.d_squared, lemma.fidelity_gap, &tol);
        report.check(format!("fidelity-disagreement q={q}"), lemma.fidelity_gap, lemma.disagreement, &tol);
    }

    let identity2 = CMatrix::identity(t.dims.1, t.dims.1);
    let mut expected_d = 0.0;
    let mut rounded_win = 0.0;
    for (ti, triple) in t.triples.iter().enumerate() {
        let theta = rounding.triple_marginal(t, *triple);
        let real: Vec<f64> = t.m_full[ti].iter().map(|m| expect(&t.psi, m, &identity2)).collect();
        let sd = 0.5 * theta.iter().zip(&real).map(|(x, y)| (x - y).abs()).sum::<f64>();
        let d = triple_distance(t, ti);
        report.check(format!("triple-sd T={triple:?}"), sd, d, &tol);
        expected_d += t.triple_weights[ti] * d;
        rounded_win += t.triple_weights[ti] * theta.iter().zip(&t.accept[ti]).map(|(x, r)| x * r).sum::<f64>();
    }
    report.check("rounded-value", rounded_win, w, &tol);
    report.check("simulation-gap", 1.0 - w - t.eps_sim, expected_d, &tol);
    let c_bound = 15.0 * std::f64::consts::SQRT_2;
    report.check("d-aggregate", expected_d, c_bound * q_eff * t.eps_cons.max(0.0).sqrt(), &tol);
    let soundness = (1.0 - w).powi(2) / ((1.0 + c_bound).powi(2) * q_eff * q_eff);
    report.check("soundness", soundness, t.eps, &tol);
    Ok(report)
}

/// Moves the operator at `i` (0-based) of the sequence `positions` to act
/// first and reports the statistical difference against the bound built
/// from `d1` and `d4` over the positions it passes.
pub fn verify_claim_selection(t: &ComRoundingTables, positions: &[usize], i: usize) -> Result<Inequality<f64>> {
    let m = positions.len();
    if i >= m {
        return Err(Error::invalid(format!("index {i} outside a sequence of length {m}")));
    }
    if positions.iter().any(|&q| t.rank.get(q).copied().flatten().is_none()) {
        return Err(Error::invalid("selection uses an unqueried position"));
    }
    let a = t.alphabet;
    Limits::from_env().check_table("selection sequences", checked_pow(a, m))?;
    let mut moved_order: Vec<usize> = vec![i];
    moved_order.extend((0..m).filter(|&j| j != i));
    let apply = |seq: &[usize], z: &[usize]| -> f64 {
        let mut v = t.psi.clone();
        for &j in seq {
            v = &t.x[positions[j]][z[j]] * v;
        }
        v.norm_squared()
    };
    let natural: Vec<usize> = (0..m).collect();
    let mut lhs = 0.0;
    for code in 0..index::pow(a, m) {
        let z = index::decode(code, a, m);
        lhs += (apply(&natural, &z) - apply(&moved_order, &z)).abs();
    }
    lhs *= 0.5;
    let ti = positions[i];
    let rhs: f64 = positions[..i].iter().map(|&p| 2.0 * t.d1[p] + t.d4[ti][p]).sum();
    Ok(Inequality::new(format!("selection i={i} of {positions:?}"), lhs, rhs, COM_TOLERANCE))
}

/// The three quantities of the distance lemma for commuting measurements
/// `M (x) I` and `I (x) N` on a state.
#[derive(Clone, Debug, PartialEq)]
pub struct LemmaDistance {
    /// `D^2(psi, xi)`.
    pub d_squared: f64,
    /// `2 (1 - <psi|xi>)`.
    pub fidelity_gap: f64,
    /// `2p`, twice the disagreement probability.
    pub disagreement: f64,
    pub holds: bool,
}

/// `M` acts on the first tensor factor of `phi` and `N` on the second.
pub fn verify_lemma_distance(m: &Povm, n: &Povm, phi: &CVector) -> Result<LemmaDistance> {
    if m.outcomes() != n.outcomes() {
        return Err(Error::dims("measurements have different outcome sets"));
    }
    let (dm, dn) = (m.dim(), n.dim());
    if phi.len() != dm * dn {
        return Err(Error::dims(format!("state has dimension {}, expected {}", phi.len(), dm * dn)));
    }
    let psi = CMatrix::from_fn(dm, dn, |i, j| phi[i * dn + j]);
    let ms: Vec<CMatrix> = m.elements().iter().map(|e| e.matrix().clone()).collect();
    let ns: Vec<CMatrix> = n.elements().iter().map(|e| e.matrix().clone()).collect();
    lemma_distance_matrices(&ms, &ns, &psi)
}

fn lemma_distance_matrices(ms: &[CMatrix], ns: &[CMatrix], psi: &CMatrix) -> Result<LemmaDistance> {
    let sm = sqrt_all(ms)?;
    let sn = sqrt_all(ns)?;
    let u: Vec<CMatrix> = sm.iter().map(|x| apply1(x, psi)).collect();
    let v: Vec<CMatrix> = sn.iter().map(|y| apply2(y, psi)).collect();
    let d = family_distance(&u, &v)?;
    let overlap: f64 = u.iter().zip(&v).map(|(x, y)| x.dotc(y).re).sum();
    let agree: f64 = ms.iter().zip(ns).map(|(a, b)| expect(psi, a, b)).sum();
    let out_d2 = d * d;
    let fidelity_gap = 2.0 * (1.0 - overlap);
    let disagreement = 2.0 * (1.0 - agree);
    let holds = out_d2 <= fidelity_gap + 1e-8 && fidelity_gap <= disagreement + 1e-8;
    Ok(LemmaDistance { d_squared: out_d2, fidelity_gap, disagreement, holds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::eval_pcp;
    use crate::quantum::{random_strategy, symmetrize_second_prover, to_bipartite_strategy};
    use crate::scalar::Rational;
    use crate::transforms::oracularize_pcp_dummy;
    use crate::values::pcp_value;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn exactly_one(a: usize, b: usize, c: usize) -> bool {
        a + b + c == 1
    }

    fn parity(a: usize, b: usize, c: usize) -> bool {
        (a + b + c).is_multiple_of(2)
    }

    fn game() -> PcpGame<Rational> {
        PcpGame::from_checks(
            4,
            2,
            vec![
                ([0, 1, 2], Rational::from_ratio(1, 2), exactly_one as fn(usize, usize, usize) -> bool),
                ([1, 2, 3], Rational::from_ratio(1, 4), parity),
                ([0, 2, 3], Rational::from_ratio(1, 4), exactly_one),
            ],
        )
        .unwrap()
    }

    fn honest(o: &OracularizedPcpDummy<Rational>, proof: &[usize]) -> QuantumStrategy {
        let det = o.honest_strategy(proof).unwrap();
        let [_, _, a1c, a2c] = o.game.counts();
        let p1 = det.f1.iter().map(|&a| Povm::constant(1, a1c, a)).collect();
        let p2 = det.f2.iter().map(|&a| Povm::constant(1, a2c, a)).collect();
        QuantumStrategy::new(1, 1, CVector::from_element(1, c(1.0)), p1, p2).unwrap()
    }

    #[test]
    fn honest_strategy_is_exact() {
        let g = game();
        let o = oracularize_pcp_dummy(&g).unwrap();
        let proof = vec![1, 0, 0, 0];
        let s = honest(&o, &proof);
        let t = com_decompose(&o, &s).unwrap();
        assert!(t.eps_cons.abs() < 1e-12);
        for &q in &t.queried {
            assert!(t.d1[q] < 1e-7);
            for &p in &t.queried {
                assert!(t.d2[q][p] < 1e-7 && t.d4[q][p] < 1e-7);
            }
        }
        assert!(t.d3.iter().flatten().all(|&d| d < 1e-7));
        let rounding = round_com(&t).unwrap();
        let point = index::encode(&proof, 2);
        assert!((rounding.raw[point] - 1.0).abs() < 1e-7);
        let gf = g.map_scalar(|v| v.to_f64());
        let w = pcp_value(&gf).unwrap().value;
        let report = verify_com_claims(&gf, w, &t, &rounding).unwrap();
        assert!(report.all_hold(), "{:?}", report.violations());
    }

    #[test]
    fn random_strategies_satisfy_every_bound() {
        let g = game();
        let gf = g.map_scalar(|v| v.to_f64());
        let w = pcp_value(&gf).unwrap().value;
        let o = oracularize_pcp_dummy(&g).unwrap();
        let of = o.game.to_float();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..8 {
            let s = random_strategy(2, 2, o.game.counts(), &mut rng).unwrap();
            let s = symmetrize_second_prover(&s, &o.pairs, o.alphabet).unwrap();
            let t = com_decompose(&o, &s).unwrap();
            let induced = to_bipartite_strategy(&s, o.game.counts()).unwrap();
            let value = crate::model::eval_two_prover(&of, &induced).unwrap();
            assert!((t.eps - (1.0 - value)).abs() < 1e-9);
            for &q in &t.queried {
                assert!((0.0..=1.0 + 1e-12).contains(&t.d1[q]));
            }
            let rounding = round_com(&t).unwrap();
            assert!(rounding.deficit.abs() < 1e-7);
            assert!(eval_pcp(&gf, &rounding.distribution).unwrap() <= w + 1e-9);
            let report = verify_com_claims(&gf, w, &t, &rounding).unwrap();
            assert!(report.all_hold(), "{:?}", report.violations());
            for i in 0..3 {
                let sel = verify_claim_selection(&t, &[0, 2, 3], i).unwrap();
                assert!(sel.holds, "{sel:?}");
            }
        }
    }

    #[test]
    fn identity_proportional_measurements_round_to_uniform() {
        let g = game();
        let o = oracularize_pcp_dummy(&g).unwrap();
        let t = com_decompose(&o, &honest(&o, &[0, 0, 0, 0])).unwrap();
        let mut flat = t.clone();
        for &q in &t.queried {
            flat.x[q] = vec![CMatrix::identity(1, 1) * c(std::f64::consts::FRAC_1_SQRT_2); 2];
        }
        let rounding = round_com(&flat).unwrap();
        assert_eq!(t.queried.len(), 4);
        assert!(rounding.raw.iter().all(|v| (v - 1.0 / 16.0).abs() < 1e-12));
    }

    #[test]
    fn lemma_distance_examples() {
        let basis = |d: usize| {
            Povm::from_matrices((0..d).map(|i| CMatrix::from_fn(d, d, |r, s| if r == i && s == i { c(1.0) } else { c(0.0) })).collect()).unwrap()
        };
        let epr = CVector::from_vec(vec![c(std::f64::consts::FRAC_1_SQRT_2), c(0.0), c(0.0), c(std::f64::consts::FRAC_1_SQRT_2)]);
        let same = verify_lemma_distance(&basis(2), &basis(2), &epr).unwrap();
        assert!(same.d_squared.abs() < 1e-12 && same.disagreement.abs() < 1e-12 && same.holds);
        let flipped = Povm::from_matrices(basis(2).elements().iter().rev().map(|e| e.matrix().clone()).collect()).unwrap();
        let opposite = verify_lemma_distance(&basis(2), &flipped, &epr).unwrap();
        assert!((opposite.disagreement - 2.0).abs() < 1e-12 && opposite.holds);
    }

    #[test]
    fn rejects_unsymmetrized_and_non_projective() {
        let g = game();
        let o = oracularize_pcp_dummy(&g).unwrap();
        let [_, _, a1c, a2c] = o.game.counts();
        let p1 = (0..o.triples.len()).map(|_| Povm::constant(1, a1c, 0)).collect::<Vec<_>>();
        let p2 = (0..o.pairs.len()).map(|_| Povm::constant(1, a2c, 1)).collect::<Vec<_>>();
        let s = QuantumStrategy::new(1, 1, CVector::from_element(1, c(1.0)), p1.clone(), p2).unwrap();
        assert!(matches!(com_decompose(&o, &s), Err(Error::NotSymmetrized(_))));
        let half = |k: usize| {
            Povm::from_matrices((0..k).map(|i| CMatrix::from_element(1, 1, c(if i < 2 { 0.5 } else { 0.0 }))).collect()).unwrap()
        };
        let p2 = (0..o.pairs.len()).map(|_| half(a2c)).collect::<Vec<_>>();
        let s = QuantumStrategy::new(1, 1, CVector::from_element(1, c(1.0)), p1, p2).unwrap();
        assert!(matches!(com_decompose(&o, &s), Err(Error::NotProjective(_))));
    }
}
