//! Cech machinery over finite covers: nerves, sampled transition functions,
//! logarithm lifts, the integer Chern cocycle, and cocycle evaluation on a
//! fundamental 2-cycle.

pub mod cocycle;
pub mod lift;
pub mod nerve;
pub mod transition;

pub use cocycle::{chern_cocycle, CechCocycle, CechGroup, Unit};
pub use lift::{lift_logs, unlift, LogLift};
pub use nerve::{
    permutation_sign, CoverNerve, Face, OverlapComponent, PairKey, PathRef, TripleKey,
    TripleSample,
};
pub use transition::{
    transitions_from_fn, trivial_transitions, CocycleReport, TransitionData,
};
