use serde::Serialize;

use crate::graph::VertexId;

/// How an infinite object was approximated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum Certification {
    /// Equal to the true object (closed form or exact oracle agreement).
    Exact,
    /// Unchanged over the scanned indices `n0..=horizon`.
    StableObserved { n0: u32, horizon: u32 },
    /// A plain truncation with no stability evidence.
    Truncated,
}

impl Certification {
    /// The weaker of two tags; stability ranges intersect.
    pub fn weakest(self, other: Certification) -> Certification {
        use Certification::*;
        match (self, other) {
            (Truncated, _) | (_, Truncated) => Truncated,
            (Exact, x) | (x, Exact) => x,
            (StableObserved { n0: a, horizon: h }, StableObserved { n0: b, horizon: k }) => {
                StableObserved {
                    n0: a.max(b),
                    horizon: h.min(k),
                }
            }
        }
    }

    pub fn tag(&self) -> String {
        match self {
            Certification::Exact => "Exact".to_string(),
            Certification::StableObserved { n0, horizon } => {
                format!("StableObserved({n0},{horizon})")
            }
            Certification::Truncated => "Truncated".to_string(),
        }
    }
}

/// A vertex set in canonical order together with its certification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertifiedSet {
    pub vertices: Vec<VertexId>,
    pub certification: Certification,
}

impl CertifiedSet {
    pub fn contains(&self, v: VertexId) -> bool {
        self.vertices.contains(&v)
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}
