//! Max-flow programs for a fixed digraph.
//!
//! The main program starts from the zero flow and, for every path length
//! `k = 1, …, n − 1`, repeats `m` times: find an augmenting flow that only
//! uses shortest `s`-`t` paths of length exactly `k` in the residual network
//! and saturates at least one residual arc, then augment. The subroutine
//! works in four phases: fattest path values `a_{i,v}` by dynamic
//! programming, a greedy push from the source in index order, a push into
//! the sink, and a clean-up in reverse index order that returns excess
//! `Y_v^i` stuck at intermediate nodes.

mod build;
mod network;

pub use build::{build_find_augmenting_flow, build_maxflow_program, phase, AugmentLayout, MaxFlowLayout};
pub use network::{flow_value, FlowError, FlowInstance, FlowNetwork};
