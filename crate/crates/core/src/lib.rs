//! Bounded model checking and k-induction for a small C-like language,
//! strengthened by invariants inferred over template abstract domains.

pub mod solver;
pub mod types;
pub mod corpus;
pub mod domains;
pub mod engine;
pub mod frontend;
pub mod inference;
pub mod session;
pub mod ssa;
