//! Game models, strategy tables, and winning-probability evaluation.

mod multi_round;
mod pcp;
mod two_prover;
mod validate;

pub use multi_round::{
    eval_multi_round, DeterministicMultiRoundStrategy, MultiRoundGame, MultiRoundStrategy,
};
pub use pcp::{eval_pcp, AggregatedTriple, PcpGame, PcpProofDistribution};
pub use two_prover::{
    eval_two_prover, BipartiteStrategy, DeterministicBipartiteStrategy, Labels, NoSignalingCheck,
    TwoProverGame,
};
pub use validate::{ValidationReport, Violation, ViolationKind};

/// Big-endian mixed-radix helpers shared by every dense table.
pub mod index {
    /// `base^exp` as usize; callers guard sizes before calling.
    pub fn pow(base: usize, exp: usize) -> usize {
        (0..exp).fold(1usize, |acc, _| acc * base)
    }

    /// Encodes digits (first digit most significant) in the given base.
    pub fn encode(digits: &[usize], base: usize) -> usize {
        digits.iter().fold(0, |acc, &d| acc * base + d)
    }

    pub fn decode(mut index: usize, base: usize, len: usize) -> Vec<usize> {
        let mut digits = vec![0; len];
        for slot in digits.iter_mut().rev() {
            *slot = index % base;
            index /= base;
        }
        digits
    }

    /// Index of the length-`k` prefix of an encoded length-`len` tuple.
    pub fn prefix(index: usize, base: usize, len: usize, k: usize) -> usize {
        index / pow(base, len - k)
    }

}
