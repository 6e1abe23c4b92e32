//! Built-in games.

use crate::model::{PcpGame, TwoProverGame};
use crate::scalar::{Rational, Scalar};
use crate::transforms::{pcp_from_1in3, Literal, OneInThreeFormula};

fn bit(value: usize, i: usize) -> usize {
    (value >> (2 - i)) & 1
}

fn parity(value: usize) -> usize {
    value.count_ones() as usize % 2
}

fn indicator(b: bool) -> Rational {
    if b {
        Rational::from_ratio(1, 1)
    } else {
        Rational::from_ratio(0, 1)
    }
}

/// CHSH: uniform bits, win iff `a1 xor a2 = q1 and q2`.
pub fn chsh() -> TwoProverGame<Rational> {
    TwoProverGame::from_fn([2, 2, 2, 2], |_, _| Rational::from_ratio(1, 4), |q1, q2, a1, a2| indicator(a1 ^ a2 == q1 & q2))
        .expect("static dimensions")
}

/// The nine cells of the 3x3 square on each of its six lines: rows 0..3,
/// then columns 3..6.
pub fn magic_square_line_cells(line: usize) -> [usize; 3] {
    if line < 3 {
        [3 * line, 3 * line + 1, 3 * line + 2]
    } else {
        let c = line - 3;
        [c, c + 3, c + 6]
    }
}

/// Magic Square, line versus cell.
///
/// Prover 1 gets one of the six lines and answers three bits (rows must have
/// even parity, columns odd); prover 2 gets one of the three cells on that
/// line and answers one bit, which must equal prover 1's bit for that cell.
/// Questions are uniform over the 18 (line, cell) pairs.
pub fn magic_square() -> TwoProverGame<Rational> {
    TwoProverGame::from_fn(
        [6, 9, 8, 2],
        |line, cell| {
            if magic_square_line_cells(line).contains(&cell) {
                Rational::from_ratio(1, 18)
            } else {
                Rational::from_ratio(0, 1)
            }
        },
        |line, cell, a1, a2| {
            let cells = magic_square_line_cells(line);
            let Some(pos) = cells.iter().position(|&c| c == cell) else {
                return indicator(false);
            };
            let parity_ok = parity(a1) == usize::from(line >= 3);
            indicator(parity_ok && bit(a1, pos) == a2)
        },
    )
    .expect("static dimensions")
}

/// Magic Square, row versus column: prover 1 fills a row (even parity),
/// prover 2 a column (odd parity), and they must agree on the shared cell.
pub fn magic_square_rc() -> TwoProverGame<Rational> {
    TwoProverGame::from_fn(
        [3, 3, 8, 8],
        |_, _| Rational::from_ratio(1, 9),
        |row, col, a1, a2| indicator(parity(a1) == 0 && parity(a2) == 1 && bit(a1, col) == bit(a2, row)),
    )
    .expect("static dimensions")
}

/// The contradictory formula `{(x1, x2, x3), (!x1, !x2, !x3)}`: the
/// first clause wants one true variable, the second two. Value 1/2.
pub fn tiny_1in3_formula() -> OneInThreeFormula {
    let clause = |positive| [0, 1, 2].map(|var| Literal { var, positive });
    OneInThreeFormula { variables: 3, clauses: vec![clause(true), clause(false)] }
}

pub fn tiny_1in3() -> PcpGame<Rational> {
    pcp_from_1in3(&tiny_1in3_formula()).expect("static formula").game
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_games_validate() {
        for g in [chsh(), magic_square(), magic_square_rc()] {
            assert!(g.validate().is_valid(), "{}", g.validate());
            assert!(g.is_boolean_predicate());
        }
    }

    #[test]
    fn tiny_formula_is_contradictory() {
        let g = tiny_1in3();
        assert!(g.validate().is_valid());
        let best = (0..8)
            .map(|code| g.eval_proof(&[code >> 2, (code >> 1) & 1, code & 1]).unwrap())
            .max()
            .unwrap();
        assert_eq!(best, Rational::from_ratio(1, 2));
    }

    #[test]
    fn every_cell_lies_on_one_row_and_one_column() {
        for cell in 0..9 {
            let lines = (0..6).filter(|&l| magic_square_line_cells(l).contains(&cell)).count();
            assert_eq!(lines, 2);
        }
    }
}
