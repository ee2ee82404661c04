use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{AdjacencyOracle, VertexId};
use crate::{Error, Result};

/// Sequence of edge labels along a path, as indices into the oracle's
/// generator labels.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PathType(pub Vec<usize>);

impl PathType {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn render(&self, labels: &[String]) -> String {
        self.0.iter().map(|&s| labels[s].as_str()).collect()
    }

    pub fn is_prefix_of(&self, other: &PathType) -> bool {
        other.0.starts_with(&self.0)
    }

    /// Lexicographic comparison with letters ranked by `order`.
    pub fn cmp_by(&self, other: &PathType, order: &GeneratorOrder) -> Ordering {
        let a = self.0.iter().map(|&s| order.rank(s));
        let b = other.0.iter().map(|&s| order.rank(s));
        a.cmp(b)
    }
}

/// Total order on the generating set, e.g. `a<A<b<B`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorOrder {
    ranks: Vec<usize>,
}

impl GeneratorOrder {
    /// Index order: generator `i` has rank `i`.
    pub fn natural(count: usize) -> Self {
        Self {
            ranks: (0..count).collect(),
        }
    }

    /// Parses `s1<s2<...` over the given labels; every label must appear once.
    pub fn parse(text: &str, labels: &[String]) -> Result<Self> {
        let names: Vec<&str> = text.split('<').map(str::trim).collect();
        if names.len() != labels.len() {
            return Err(Error::Parse(format!(
                "order `{text}` must list all {} generators",
                labels.len()
            )));
        }
        let mut ranks = vec![usize::MAX; labels.len()];
        for (rank, name) in names.iter().enumerate() {
            let idx = labels
                .iter()
                .position(|l| l == name)
                .ok_or_else(|| Error::Parse(format!("unknown generator `{name}` in order")))?;
            if ranks[idx] != usize::MAX {
                return Err(Error::Parse(format!(
                    "generator `{name}` repeated in order"
                )));
            }
            ranks[idx] = rank;
        }
        Ok(Self { ranks })
    }

    pub fn rank(&self, generator: usize) -> usize {
        self.ranks[generator]
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    /// Generators sorted from least to greatest.
    pub fn sorted(&self) -> Vec<usize> {
        let mut g: Vec<usize> = (0..self.ranks.len()).collect();
        g.sort_by_key(|&s| self.ranks[s]);
        g
    }

    pub fn display(&self, labels: &[String]) -> String {
        let names: Vec<&str> = self.sorted().iter().map(|&s| labels[s].as_str()).collect();
        names.join("<")
    }
}

impl fmt::Display for PathType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(usize::to_string).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// Labels of the consecutive edges of `path`.
pub fn path_type(oracle: &dyn AdjacencyOracle, path: &[VertexId]) -> Result<PathType> {
    if oracle.generator_labels().is_none() {
        return Err(Error::NotCayley);
    }
    path.windows(2)
        .map(|pair| {
            oracle.edge_label(pair[0], pair[1]).ok_or_else(|| {
                Error::NotAPath(oracle.vertex_label(pair[0]), oracle.vertex_label(pair[1]))
            })
        })
        .collect::<Result<Vec<_>>>()
        .map(PathType)
}

/// Shortlex order on group elements: word length first, then lexicographic
/// on normal forms with letters ranked by `order`.
pub fn shortlex_cmp(
    oracle: &dyn AdjacencyOracle,
    u: VertexId,
    v: VertexId,
    order: &GeneratorOrder,
) -> Result<Ordering> {
    let cayley = oracle.cayley().ok_or(Error::NotCayley)?;
    if u == v {
        return Ok(Ordering::Equal);
    }
    let a = PathType(cayley.normal_form(u, order));
    let b = PathType(cayley.normal_form(v, order));
    Ok(a.len().cmp(&b.len()).then_with(|| a.cmp_by(&b, order)))
}
