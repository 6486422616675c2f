//! Max-affine arithmetic programs and exact ReLU networks.
//!
//! The crate provides a small branch-free intermediate representation
//! ([`program`]), a ReLU network object ([`net`]), a compiler in both
//! directions between them ([`compiler`]), generators for the minimum
//! spanning tree and maximum flow programs ([`mst`], [`maxflow`]), and
//! classical reference algorithms used as test oracles ([`oracles`]).

pub mod compiler;
pub mod maxflow;
pub mod mst;
pub mod net;
pub mod num;
pub mod oracles;
pub mod program;
pub mod random;
