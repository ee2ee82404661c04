//! Certified finite-window constructions of geodesic ray bundles in locally
//! finite graphs: CGR prefixes, horofunction classes, combinatorial sectors,
//! special vertices, `Geo₁` and the orbit data built on top of it.
//!
//! Everything runs on a [`space::Space`], which pairs a lazily described
//! graph with a metric that either has a closed form or is certified by a
//! sufficiently large [`graph::Window`].

mod error;

pub mod certify;
pub mod endgame;
pub mod export;
pub mod families;
pub mod graph;
pub mod horo;
pub mod rays;
pub mod scenario;
pub mod space;

pub use error::{Error, Result};
