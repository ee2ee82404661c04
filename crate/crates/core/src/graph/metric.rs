use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::Arc;

use super::{sort_canonical, AdjacencyOracle, VertexId};
use crate::{Error, Result};

/// Certified path metric on a lazily described graph.
pub trait Metric: Send + Sync {
    fn oracle(&self) -> &dyn AdjacencyOracle;

    /// Global path-metric distance, or an error if it cannot be certified.
    fn dist(&self, u: VertexId, v: VertexId) -> Result<u32>;
}

/// Metric backed by the family's closed-form distance.
pub struct ExactMetric {
    oracle: Arc<dyn AdjacencyOracle>,
}

impl ExactMetric {
    pub fn new(oracle: Arc<dyn AdjacencyOracle>) -> Result<Self> {
        let b = oracle.base_point();
        oracle.exact_distance(b, b).ok_or(Error::NoExactOracle)?;
        Ok(Self { oracle })
    }
}

impl Metric for ExactMetric {
    fn oracle(&self) -> &dyn AdjacencyOracle {
        self.oracle.as_ref()
    }

    fn dist(&self, u: VertexId, v: VertexId) -> Result<u32> {
        self.oracle.exact_distance(u, v).ok_or(Error::NoExactOracle)
    }
}

/// Vertices of the ball `B(center, radius)`, canonical order.
pub fn ball(oracle: &dyn AdjacencyOracle, center: VertexId, radius: u32) -> Vec<VertexId> {
    let mut seen: HashMap<VertexId, u32> = HashMap::from([(center, 0)]);
    let mut queue = VecDeque::from([center]);
    while let Some(v) = queue.pop_front() {
        let d = seen[&v];
        if d == radius {
            continue;
        }
        for w in oracle.neighbors(v) {
            if let std::collections::hash_map::Entry::Vacant(e) = seen.entry(w) {
                e.insert(d + 1);
                queue.push_back(w);
            }
        }
    }
    let mut out: Vec<VertexId> = seen.into_keys().collect();
    sort_canonical(oracle, &mut out);
    out
}

/// The geodesic interval `{z : d(x,z) + d(z,y) = d(x,y)}`.
pub fn interval(metric: &dyn Metric, x: VertexId, y: VertexId) -> Result<Vec<VertexId>> {
    interval_within(metric, x, y, u32::MAX)
}

/// The part of the interval `Γ(x,y)` at distance at most `depth` from `x`.
///
/// Walks the geodesic DAG from `x`: `w` follows `v` iff `d(w,y) = d(v,y) - 1`.
/// Only distances to `y` are queried.
pub fn interval_within(
    metric: &dyn Metric,
    x: VertexId,
    y: VertexId,
    depth: u32,
) -> Result<Vec<VertexId>> {
    let oracle = metric.oracle();
    let total = metric.dist(x, y)?;
    let mut out = vec![x];
    let mut layer = vec![x];
    let mut k = 0;
    while k < total && k < depth {
        let remaining = total - k - 1;
        let mut next = HashSet::new();
        for &v in &layer {
            for w in oracle.neighbors(v) {
                if !next.contains(&w) && metric.dist(w, y)? == remaining {
                    next.insert(w);
                }
            }
        }
        layer = next.into_iter().collect();
        out.extend_from_slice(&layer);
        k += 1;
    }
    sort_canonical(oracle, &mut out);
    Ok(out)
}

/// Every geodesic path from `x` to `y`, in lexicographic canonical order.
/// Fails with `TooManyPrefixes` once more than `cap` paths exist.
pub fn all_geodesics(
    metric: &dyn Metric,
    x: VertexId,
    y: VertexId,
    cap: usize,
) -> Result<Vec<Vec<VertexId>>> {
    let oracle = metric.oracle();
    let total = metric.dist(x, y)?;
    let mut succ: HashMap<VertexId, Vec<VertexId>> = HashMap::new();
    let mut layer = vec![x];
    for k in 0..total {
        let remaining = total - k - 1;
        let mut next = HashSet::new();
        for &v in &layer {
            let mut list = Vec::new();
            for w in oracle.neighbors(v) {
                if metric.dist(w, y)? == remaining {
                    list.push(w);
                    next.insert(w);
                }
            }
            sort_canonical(oracle, &mut list);
            succ.insert(v, list);
        }
        layer = next.into_iter().collect();
    }

    let mut out = Vec::new();
    let mut path = vec![x];
    extend_paths(&succ, total as usize, &mut path, &mut out, cap)?;
    Ok(out)
}

fn extend_paths(
    succ: &HashMap<VertexId, Vec<VertexId>>,
    total: usize,
    path: &mut Vec<VertexId>,
    out: &mut Vec<Vec<VertexId>>,
    cap: usize,
) -> Result<()> {
    if path.len() == total + 1 {
        if out.len() >= cap {
            return Err(Error::TooManyPrefixes(cap));
        }
        out.push(path.clone());
        return Ok(());
    }
    let last = *path.last().expect("path is never empty");
    for &w in succ.get(&last).map(Vec::as_slice).unwrap_or(&[]) {
        path.push(w);
        extend_paths(succ, total, path, out, cap)?;
        path.pop();
    }
    Ok(())
}

/// Distinct length-`len` prefixes of geodesics from `x` to `y`, in
/// lexicographic canonical order. Every vertex of the geodesic DAG extends to
/// `y`, so only the first `len` layers are built.
pub fn geodesic_prefixes(
    metric: &dyn Metric,
    x: VertexId,
    y: VertexId,
    len: u32,
    cap: usize,
) -> Result<Vec<Vec<VertexId>>> {
    let oracle = metric.oracle();
    let total = metric.dist(x, y)?;
    let depth = len.min(total);
    let mut succ: HashMap<VertexId, Vec<VertexId>> = HashMap::new();
    let mut layer = vec![x];
    for k in 0..depth {
        let remaining = total - k - 1;
        let mut next = HashSet::new();
        for &v in &layer {
            let mut list = Vec::new();
            for w in oracle.neighbors(v) {
                if metric.dist(w, y)? == remaining {
                    list.push(w);
                    next.insert(w);
                }
            }
            sort_canonical(oracle, &mut list);
            succ.insert(v, list);
        }
        layer = next.into_iter().collect();
    }
    let mut out = Vec::new();
    let mut path = vec![x];
    extend_paths(&succ, depth as usize, &mut path, &mut out, cap)?;
    Ok(out)
}

/// Whether a vertex sequence is a geodesic path.
pub fn is_geodesic(metric: &dyn Metric, path: &[VertexId]) -> Result<bool> {
    let oracle = metric.oracle();
    let Some((&first, rest)) = path.split_first() else {
        return Ok(true);
    };
    let mut prev = first;
    for &v in rest {
        if !oracle.neighbors(prev).contains(&v) {
            return Err(Error::NotAPath(
                oracle.vertex_label(prev),
                oracle.vertex_label(v),
            ));
        }
        prev = v;
    }
    Ok(metric.dist(first, prev)? as usize == path.len() - 1)
}
