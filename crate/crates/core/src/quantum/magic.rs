use super::{c, CMatrix, CVector, Povm, QuantumStrategy};
use crate::catalog::{magic_square, magic_square_line_cells};
use crate::model::TwoProverGame;
use crate::scalar::Rational;
use num::complex::Complex64;

fn pauli(name: char) -> CMatrix {
    let i = Complex64::new(0.0, 1.0);
    match name {
        'I' => CMatrix::identity(2, 2),
        'X' => CMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)]),
        'Y' => CMatrix::from_row_slice(2, 2, &[c(0.0), -i, i, c(0.0)]),
        'Z' => CMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1.0)]),
        _ => unreachable!("unknown Pauli {name}"),
    }
}

/// Two-qubit observable for a cell of the square, row-major.
fn cell_observable(cell: usize) -> CMatrix {
    const CELLS: [(f64, &str); 9] = [
        (1.0, "XI"),
        (1.0, "IX"),
        (1.0, "XX"),
        (1.0, "IZ"),
        (1.0, "ZI"),
        (1.0, "ZZ"),
        (-1.0, "XZ"),
        (-1.0, "ZX"),
        (1.0, "YY"),
    ];
    let (sign, ops) = CELLS[cell];
    let mut chars = ops.chars();
    let (a, b) = (chars.next().unwrap(), chars.next().unwrap());
    pauli(a).kronecker(&pauli(b)) * c(sign)
}

fn outcome_projector(observable: &CMatrix, bit: usize) -> CMatrix {
    let sign = if bit == 0 { 1.0 } else { -1.0 };
    (CMatrix::identity(4, 4) + observable * c(sign)) * c(0.5)
}

/// The perfect strategy for [`magic_square`]: two EPR pairs, prover 1
/// measures the three commuting observables of its line jointly, prover 2
/// measures its cell's observable.
pub fn magic_square_strategy() -> QuantumStrategy {
    // Prover 1 holds the first qubit of each pair, prover 2 the second.
    let mut state = CVector::zeros(16);
    for i in 0..4 {
        state[i * 4 + i] = c(0.5);
    }
    let povms1 = (0..6)
        .map(|line| {
            let cells = magic_square_line_cells(line);
            let elements = (0..8)
                .map(|a| {
                    (0..3).fold(CMatrix::identity(4, 4), |acc, k| {
                        acc * outcome_projector(&cell_observable(cells[k]), (a >> (2 - k)) & 1)
                    })
                })
                .collect();
            Povm::from_matrices(elements).expect("commuting projectors")
        })
        .collect();
    // Every cell observable is real symmetric or a product of Y's, so it
    // equals its transpose and prover 2 measures it unchanged.
    let povms2 = (0..9)
        .map(|cell| {
            let o = cell_observable(cell);
            Povm::from_matrices(vec![outcome_projector(&o, 0), outcome_projector(&o, 1)]).expect("projector pair")
        })
        .collect();
    QuantumStrategy::new(4, 4, state, povms1, povms2).expect("static strategy")
}

pub fn catalog_magic_square() -> (TwoProverGame<Rational>, QuantumStrategy) {
    (magic_square(), magic_square_strategy())
}
