//! A see-saw optimum on the dummy-oracularized contradictory formula, pushed
//! through symmetrization and the commuting-operator rounding.

use twoprover::catalog::tiny_1in3;
use twoprover::quantum::{equal_pair_violation, eval_quantum, symmetrize_second_prover};
use twoprover::rounding::{com_decompose, round_com, verify_com_claims};
use twoprover::transforms::oracularize_pcp_dummy;
use twoprover::values::{pcp_value, see_saw, SeeSawOptions};
use twoprover::Scalar;

#[test]
fn optimized_strategy_rounds_soundly() {
    let g = tiny_1in3();
    let w = pcp_value(&g).unwrap().value.to_f64();
    assert_eq!(w, 0.5);
    let o = oracularize_pcp_dummy(&g).unwrap();
    let of = o.game.to_float();
    let opts = SeeSawOptions { dims: (2, 2), restarts: 5, seed: 11, ..SeeSawOptions::default() };
    let best = see_saw(&o.game, &opts).unwrap().best;
    assert!(best.value < 1.0);

    let s = symmetrize_second_prover(&best.witness, &o.pairs, o.alphabet).unwrap();
    assert!(equal_pair_violation(&s, &o.pairs, o.alphabet).unwrap() < 1e-9);
    let t = com_decompose(&o, &s).unwrap();
    assert!((1.0 - t.eps - eval_quantum(&of, &s).unwrap()).abs() < 1e-9);

    let rounding = round_com(&t).unwrap();
    let report = verify_com_claims(&g.map_scalar(|v| v.to_f64()), w, &t, &rounding).unwrap();
    for e in &report.entries {
        assert!(e.holds, "{} : {} > {}", e.label, e.lhs, e.rhs);
    }
    assert!(report.entries.iter().any(|e| e.label == "soundness"));
}
