//! Cross-checks the simplex against brute-force vertex enumeration on small
//! programs.

use num::{Signed, Zero};
use proptest::prelude::*;
use twoprover::lp::{solve_lp, LinearProgram, LpStatus, Relation};
use twoprover::{Rational, Scalar};

fn r(n: i64) -> Rational {
    Rational::from_ratio(n, 1)
}

/// Solves a square system exactly; `None` if singular.
fn solve_square(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).find(|&i| !a[i][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        for i in 0..n {
            if i != col && !a[i][col].is_zero() {
                let f = &a[i][col] / &a[col][col];
                for j in 0..n {
                    let d = &f * &a[col][j];
                    a[i][j] -= d;
                }
                let d = &f * &b[col];
                b[i] -= d;
            }
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

/// Best objective over all basic feasible solutions, or `None` when there is
/// no feasible vertex.
fn vertex_oracle(lp: &LinearProgram) -> Option<Rational> {
    let n = lp.variables();
    let mut hyperplanes: Vec<(Vec<Rational>, Rational)> =
        lp.constraints().iter().map(|c| (c.coeffs.clone(), c.rhs.clone())).collect();
    for j in 0..n {
        let mut e = vec![r(0); n];
        e[j] = r(1);
        hyperplanes.push((e, r(0)));
    }
    let m = hyperplanes.len();
    let mut best: Option<Rational> = None;
    let mut pick = vec![0usize; n];
    fn rec(
        start: usize,
        depth: usize,
        pick: &mut Vec<usize>,
        m: usize,
        visit: &mut dyn FnMut(&[usize]),
    ) {
        if depth == pick.len() {
            visit(pick);
            return;
        }
        for i in start..m {
            pick[depth] = i;
            rec(i + 1, depth + 1, pick, m, visit);
        }
    }
    rec(0, 0, &mut pick, m, &mut |chosen| {
        let a = chosen.iter().map(|&i| hyperplanes[i].0.clone()).collect();
        let b = chosen.iter().map(|&i| hyperplanes[i].1.clone()).collect();
        if let Some(x) = solve_square(a, b) {
            if lp.is_feasible(&x) {
                let v = lp.objective_at(&x);
                if best.as_ref().is_none_or(|b| v > *b) {
                    best = Some(v);
                }
            }
        }
    });
    best
}

#[test]
fn two_variable_example_matches_vertices() {
    let mut lp = LinearProgram::maximize(vec![r(3), r(2)]);
    lp.add(vec![r(1), r(1)], Relation::Le, r(4)).unwrap();
    lp.add(vec![r(1), r(3)], Relation::Le, r(6)).unwrap();
    let s = solve_lp(&lp).unwrap();
    assert_eq!(s.status, LpStatus::Optimal);
    assert_eq!(s.value, vertex_oracle(&lp));
    assert_eq!(s.value, Some(r(12)));
}

fn relation() -> impl Strategy<Value = Relation> {
    prop_oneof![Just(Relation::Le), Just(Relation::Ge), Just(Relation::Eq)]
}

fn small_lp() -> impl Strategy<Value = LinearProgram> {
    (1usize..=3).prop_flat_map(|n| {
        let row = (proptest::collection::vec(-4i64..=4, n), relation(), -6i64..=6);
        (
            proptest::collection::vec(-5i64..=5, n),
            proptest::collection::vec(row, 0..=4),
        )
            .prop_map(move |(c, rows)| {
                let mut lp = LinearProgram::maximize(c.into_iter().map(r).collect());
                // Keeps the feasible region bounded so the oracle is complete.
                lp.add(vec![r(1); n], Relation::Le, r(10)).unwrap();
                for (coeffs, rel, rhs) in rows {
                    lp.add(coeffs.into_iter().map(r).collect(), rel, r(rhs)).unwrap();
                }
                lp
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn simplex_agrees_with_vertex_enumeration(lp in small_lp()) {
        let s = solve_lp(&lp).unwrap();
        match vertex_oracle(&lp) {
            None => prop_assert_eq!(s.status, LpStatus::Infeasible),
            Some(best) => {
                prop_assert_eq!(s.status, LpStatus::Optimal);
                prop_assert_eq!(s.value.clone(), Some(best));
                prop_assert!(s.check_certificate(&lp).is_ok());
                prop_assert!(s.point.iter().all(|v| !v.is_negative()));
            }
        }
    }
}
