//! Unitary addition Cayley graphs `U(R)` over finite commutative rings.
//!
//! The crate builds `U(R)` for products of odd-order local rings (and `Z_n`
//! for even `n`), materializes explicit optimal colorings, cliques and
//! achromatic colorings, checks them with independent verifiers, and
//! confirms closed-form parameter values with exact solvers and a seeded
//! heuristic achromatic search.

pub mod bitset;
pub mod cli;
pub mod colorings;
pub mod graph;
pub mod oracle;
pub mod ring;
pub mod search;
pub mod verify;

pub use colorings::{CliqueWitness, ColorClass, Coloring};
pub use graph::{build_graph, Graph, GraphStats, UnitaryGraph};
pub use ring::{LocalFactor, RingElement, RingSpec};
