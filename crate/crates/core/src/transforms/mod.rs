//! Game transformations.

mod formula;
mod multi_round;
mod pcp;
mod prefix;
mod repeat;

pub use formula::{pcp_from_1in3, Literal, OneInThreeFormula, PcpFromFormula};
pub use multi_round::{oracularize_multi_round, oracularize_multi_round_with, OracularizedMultiRound};
pub use pcp::{
    oracularize_pcp, oracularize_pcp_dummy, oracularize_pcp_dummy_with, oracularize_pcp_with, DummyBranch,
    OracularizedPcp, OracularizedPcpDummy,
};
pub use prefix::PrefixIndex;
pub use repeat::parallel_repeat;

/// Which of the two verifier tests an oracularized predicate includes.
/// `Both` is the real game; the single-test variants measure the failure
/// probability of each test on its own.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Tests {
    #[default]
    Both,
    SimulationOnly,
    ConsistencyOnly,
}

impl Tests {
    pub(crate) fn simulation(self) -> bool {
        self != Tests::ConsistencyOnly
    }

    pub(crate) fn consistency(self) -> bool {
        self != Tests::SimulationOnly
    }
}
