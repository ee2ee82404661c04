//! Lazy locally finite graphs, certified windows, distances and geodesic
//! intervals.

mod delta;
mod metric;
mod window;
mod word;

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use delta::estimate_delta;
pub use metric::{
    all_geodesics, ball, geodesic_prefixes, interval, interval_within, is_geodesic, ExactMetric,
    Metric,
};
pub use window::Window;
pub use word::{path_type, shortlex_cmp, GeneratorOrder, PathType};

/// Opaque vertex handle, stable for the lifetime of a graph instance.
///
/// Families choose an injective encoding; free groups intern reduced words
/// per graph instance.
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VertexId(pub u64);

impl fmt::Debug for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

/// Neighbor enumeration for a connected, uniformly locally finite simple
/// graph, plus the metadata the constructions need.
pub trait AdjacencyOracle: Send + Sync {
    /// The base point `z0` (the identity for Cayley graphs).
    fn base_point(&self) -> VertexId;

    fn neighbors(&self, v: VertexId) -> Vec<VertexId>;

    fn degree_bound(&self) -> usize;

    /// Human-readable vertex label, e.g. `x3` or `aB`.
    fn vertex_label(&self, v: VertexId) -> String;

    fn parse_vertex(&self, label: &str) -> Option<VertexId>;

    /// Family-specific canonical order used for every set-valued output.
    fn canonical_cmp(&self, a: VertexId, b: VertexId) -> Ordering {
        a.cmp(&b)
    }

    /// Names of the edge labels (generators for Cayley graphs).
    fn generator_labels(&self) -> Option<&[String]> {
        None
    }

    /// Index into [`generator_labels`](Self::generator_labels) of the edge `u -> v`.
    fn edge_label(&self, _u: VertexId, _v: VertexId) -> Option<usize> {
        None
    }

    /// Closed-form path metric, when the family has one.
    fn exact_distance(&self, _u: VertexId, _v: VertexId) -> Option<u32> {
        None
    }

    fn cayley(&self) -> Option<&dyn CayleyStructure> {
        None
    }

    /// Tags of family-named boundary points, e.g. `eta` or `eta+`.
    fn named_points(&self) -> Vec<String> {
        Vec::new()
    }

    /// Vertex `n` of the reference ray of a named boundary point.
    fn named_ray_vertex(&self, _tag: &str, _n: usize) -> Option<VertexId> {
        None
    }
}

/// Group structure on the vertex set of a Cayley graph. Generator `s` sends
/// `g` to `g * s`.
pub trait CayleyStructure: Send + Sync {
    fn identity(&self) -> VertexId;
    fn multiply(&self, g: VertexId, h: VertexId) -> VertexId;
    fn inverse(&self, g: VertexId) -> VertexId;
    fn generator(&self, s: usize) -> VertexId;
    fn generator_count(&self) -> usize;
    /// Shortlex-least word for `g` with respect to `order`.
    fn normal_form(&self, g: VertexId, order: &GeneratorOrder) -> Vec<usize>;
}

/// Word length of `g`.
pub fn word_length(cayley: &dyn CayleyStructure, g: VertexId) -> usize {
    cayley
        .normal_form(g, &GeneratorOrder::natural(cayley.generator_count()))
        .len()
}

/// Sort vertices by the oracle's canonical order and drop duplicates.
pub fn sort_canonical(oracle: &dyn AdjacencyOracle, vertices: &mut Vec<VertexId>) {
    vertices.sort_by(|a, b| oracle.canonical_cmp(*a, *b));
    vertices.dedup();
}

pub fn labels(oracle: &dyn AdjacencyOracle, vertices: &[VertexId]) -> Vec<String> {
    vertices.iter().map(|v| oracle.vertex_label(*v)).collect()
}

pub fn parse_vertex(oracle: &dyn AdjacencyOracle, label: &str) -> crate::Result<VertexId> {
    oracle
        .parse_vertex(label.trim())
        .ok_or_else(|| crate::Error::UnknownVertex(label.trim().to_string()))
}
