//! Game values: exact (classical, multi-round, PCP, no-signaling) and
//! heuristic (see-saw lower bounds on the entangled value).

mod classical;
mod exact;
mod no_signaling;
mod seesaw;

use serde::Serialize;

pub use classical::{classical_value, classical_value_with_limits};
pub use exact::{multi_round_value, pcp_value};
pub use no_signaling::{no_signaling_lp, no_signaling_value, NoSignalingLp};
pub use seesaw::{entangled_lower_bound, see_saw, SeeSawOptions, SeeSawReport, SeeSawRun};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ClassicalEnumeration,
    BackwardInduction,
    ProofEnumeration,
    NoSignalingLp,
    SeeSaw,
}

/// A value together with a strategy achieving it.
#[derive(Clone, Debug, PartialEq)]
pub struct ValueResult<S, W> {
    pub value: S,
    pub witness: W,
    pub method: Method,
    /// True when `value` is the exact optimum over the strategy class.
    pub exact: bool,
}
