//! Large scale (coarse) structures on finite ground sets.
//!
//! The crate works with finite windows: a ground set of indexed points,
//! families of subsets (the computational stand-in for uniformly bounded
//! families), relations on pairs (controlled sets), ∞-metrics, group
//! oracles with exact normal forms, and the asymptotic-dimension
//! machinery built on top of them. Every identity the library relies on
//! is exposed as an executable law in [`laws`].

pub mod asdim;
pub mod entourage;
pub mod error;
pub mod group;
pub mod higson;
pub mod io;
pub mod laws;
pub mod metric;
pub mod sets;

pub use error::{Error, Result};
pub use sets::{Family, GroundSet, PointSet, Universe};
