//! Discrete Morse matchings through a rigid-edge reduction to partially rigid
//! orientation problems, and the homology, persistence, scalar-field and
//! pruning pipelines built on top of them.

pub mod complex;
pub mod cut;
pub mod gadget;
pub mod hasse;
pub mod homology;
pub mod matrix;
pub mod morse;
pub mod persistence;
pub mod pipeline;
pub mod pop;
pub mod prune;
pub mod scalar;
