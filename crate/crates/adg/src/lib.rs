//! Algebraically defined bipartite graphs over finite fields.
//!
//! The crate builds graphs whose adjacency is given by polynomial
//! equations over F_q, computes their exact metric invariants (BFS
//! neighborhoods, girth, diameter, 3-neighborhood census) and symmetry
//! invariants (automorphism group order, isomorphism testing), and runs a
//! registry of machine-checkable verification suites over them. All
//! arithmetic is exact; there is no floating point anywhere.

pub mod adgraph;
pub mod ff;
pub mod metrics;
pub mod poly;
pub mod rng;
pub mod symmetry;
pub mod verify;

mod error;

pub use error::{Error, Result};
