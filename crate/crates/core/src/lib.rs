//! Constructions and verification of almost resolvable `k`-cycle systems
//! (k-ARCS) of the tensor product `(K_u × K_g)(λ)`.
//!
//! A k-ARCS is a decomposition of the host into partial `C_k`-factors, each of
//! which spans every part but one; every part is missed by exactly `λ(g−1)/2`
//! factors.

pub mod arcs;
pub mod blocks;
pub mod cli;
pub mod compose;
pub mod graphs;
pub mod io;
mod search;
pub mod verify;

pub use arcs::{build_arcs, check_feasibility, ArcsError, Feasibility, Params};
pub use graphs::{Cycle, Decomposition, PartialFactor, Vertex};
pub use verify::verify_arcs;
