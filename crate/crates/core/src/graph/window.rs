use std::collections::hash_map::Entry;
use std::collections::{HashMap, VecDeque};
use std::sync::{Arc, RwLock};

use super::{AdjacencyOracle, Metric, VertexId};
use crate::{Error, Result};

/// The exact ball `B(center, radius)` of an infinite graph, with BFS
/// distances computed inside the ball.
///
/// A window distance `d_W(u, v)` is reported as global only when
/// `|u| + |v| + d_W(u, v) <= 2 * radius` (depths measured from the center).
/// Any geodesic between `u` and `v` then stays inside the ball, so the
/// in-window value is the true one. In particular every pair inside
/// `B(center, radius / 2)` is certified.
pub struct Window {
    oracle: Arc<dyn AdjacencyOracle>,
    center: VertexId,
    radius: u32,
    vertices: Vec<VertexId>,
    index: HashMap<VertexId, u32>,
    depth: Vec<u32>,
    adjacency: Vec<Vec<u32>>,
    complete: bool,
    rows: RwLock<HashMap<u32, Arc<Vec<u32>>>>,
}

impl std::fmt::Debug for Window {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Window")
            .field("center", &self.center)
            .field("radius", &self.radius)
            .field("vertices", &self.vertices.len())
            .finish()
    }
}

impl Window {
    /// BFS the ball of the given radius, validating degree bound, symmetry
    /// and simplicity on every explored vertex.
    pub fn build(oracle: Arc<dyn AdjacencyOracle>, center: VertexId, radius: u32) -> Result<Self> {
        let bound = oracle.degree_bound();
        let mut depth_of: HashMap<VertexId, u32> = HashMap::new();
        let mut order = Vec::new();
        let mut neighbor_cache: HashMap<VertexId, Vec<VertexId>> = HashMap::new();
        depth_of.insert(center, 0);
        let mut queue = VecDeque::from([center]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let d = depth_of[&v];
            let nbrs = checked_neighbors(oracle.as_ref(), v, bound)?;
            if d < radius {
                for &w in &nbrs {
                    if let Entry::Vacant(slot) = depth_of.entry(w) {
                        slot.insert(d + 1);
                        queue.push_back(w);
                    }
                }
            }
            neighbor_cache.insert(v, nbrs);
        }
        // Symmetry on explored vertices; neighbors just outside the ball are
        // queried once more so that the boundary is checked too.
        for (&v, nbrs) in &neighbor_cache {
            for &w in nbrs {
                let back = match neighbor_cache.get(&w) {
                    Some(list) => list.contains(&v),
                    None => checked_neighbors(oracle.as_ref(), w, bound)?.contains(&v),
                };
                if !back {
                    return Err(Error::OracleAsymmetry {
                        from: oracle.vertex_label(v),
                        to: oracle.vertex_label(w),
                    });
                }
            }
        }

        let mut vertices = order;
        vertices.sort_by(|a, b| oracle.canonical_cmp(*a, *b));
        let index: HashMap<VertexId, u32> = vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (*v, i as u32))
            .collect();
        let depth = vertices.iter().map(|v| depth_of[v]).collect();
        let adjacency: Vec<Vec<u32>> = vertices
            .iter()
            .map(|v| {
                neighbor_cache[v]
                    .iter()
                    .filter_map(|w| index.get(w).copied())
                    .collect()
            })
            .collect();
        let complete = vertices
            .iter()
            .zip(&adjacency)
            .all(|(v, local)| local.len() == neighbor_cache[v].len());
        Ok(Self {
            oracle,
            center,
            radius,
            vertices,
            index,
            depth,
            adjacency,
            complete,
            rows: RwLock::new(HashMap::new()),
        })
    }

    pub fn center(&self) -> VertexId {
        self.center
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    /// Radius of the ball around the center in which all pairwise distances
    /// are certified.
    pub fn certified_radius(&self) -> u32 {
        if self.complete {
            self.radius
        } else {
            self.radius / 2
        }
    }

    /// True when the ball is a whole (finite) component, so every window
    /// distance is global.
    pub fn is_complete(&self) -> bool {
        self.complete
    }

    /// Vertices in canonical order.
    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.index.contains_key(&v)
    }

    /// Distance from the center (always exact: BFS layers are global).
    pub fn depth(&self, v: VertexId) -> Option<u32> {
        self.index.get(&v).map(|&i| self.depth[i as usize])
    }

    /// Edges inside the window, each once, in canonical order of endpoints.
    pub fn edges(&self) -> Vec<(VertexId, VertexId)> {
        let mut out = Vec::new();
        for (i, nbrs) in self.adjacency.iter().enumerate() {
            for &j in nbrs {
                if (i as u32) < j {
                    out.push((self.vertices[i], self.vertices[j as usize]));
                }
            }
        }
        out
    }

    /// Neighbors of `v` that lie in the window.
    pub fn local_neighbors(&self, v: VertexId) -> Vec<VertexId> {
        match self.index.get(&v) {
            Some(&i) => self.adjacency[i as usize]
                .iter()
                .map(|&j| self.vertices[j as usize])
                .collect(),
            None => Vec::new(),
        }
    }

    pub fn oracle_arc(&self) -> &Arc<dyn AdjacencyOracle> {
        &self.oracle
    }

    /// In-window BFS distance, certified or not.
    pub fn window_dist(&self, u: VertexId, v: VertexId) -> Result<u32> {
        let iu = self.local(u)?;
        let iv = self.local(v)?;
        Ok(self.pair_dist(iu, iv))
    }

    /// Whether `dist(u, v)` is certified global.
    pub fn is_certified(&self, u: VertexId, v: VertexId) -> bool {
        match (self.index.get(&u), self.index.get(&v)) {
            (Some(&iu), Some(&iv)) => {
                let dw = self.pair_dist(iu, iv);
                self.certifies(iu, iv, dw)
            }
            _ => false,
        }
    }

    fn certifies(&self, iu: u32, iv: u32, dw: u32) -> bool {
        self.complete || self.depth[iu as usize] + self.depth[iv as usize] + dw <= 2 * self.radius
    }

    fn local(&self, v: VertexId) -> Result<u32> {
        self.index
            .get(&v)
            .copied()
            .ok_or_else(|| Error::OutsideWindow(self.oracle.vertex_label(v)))
    }

    /// Window distance between local indices, reusing a cached BFS row from
    /// either endpoint.
    fn pair_dist(&self, a: u32, b: u32) -> u32 {
        {
            let rows = self.rows.read().expect("row cache poisoned");
            if let Some(r) = rows.get(&a) {
                return r[b as usize];
            }
            if let Some(r) = rows.get(&b) {
                return r[a as usize];
            }
        }
        // Callers keep the second argument fixed across a sweep.
        let row = Arc::new(self.bfs_row(b));
        let d = row[a as usize];
        self.rows
            .write()
            .expect("row cache poisoned")
            .entry(b)
            .or_insert(row);
        d
    }

    fn bfs_row(&self, source: u32) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.vertices.len()];
        dist[source as usize] = 0;
        let mut queue = VecDeque::from([source]);
        while let Some(v) = queue.pop_front() {
            let d = dist[v as usize];
            for &w in &self.adjacency[v as usize] {
                if dist[w as usize] == u32::MAX {
                    dist[w as usize] = d + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }
}

impl Metric for Window {
    fn oracle(&self) -> &dyn AdjacencyOracle {
        self.oracle.as_ref()
    }

    fn dist(&self, u: VertexId, v: VertexId) -> Result<u32> {
        if u == v {
            return Ok(0);
        }
        let iu = self.local(u)?;
        let iv = self.local(v)?;
        let dw = self.pair_dist(iu, iv);
        if self.certifies(iu, iv, dw) {
            Ok(dw)
        } else {
            Err(Error::Uncertified(
                self.oracle.vertex_label(u),
                self.oracle.vertex_label(v),
            ))
        }
    }
}

fn checked_neighbors(
    oracle: &dyn AdjacencyOracle,
    v: VertexId,
    bound: usize,
) -> Result<Vec<VertexId>> {
    let nbrs = oracle.neighbors(v);
    if nbrs.len() > bound {
        return Err(Error::DegreeBoundViolated {
            vertex: oracle.vertex_label(v),
            degree: nbrs.len(),
            bound,
        });
    }
    let mut sorted = nbrs.clone();
    sorted.sort();
    sorted.dedup();
    if sorted.len() != nbrs.len() || nbrs.contains(&v) {
        return Err(Error::NotSimple(oracle.vertex_label(v)));
    }
    Ok(nbrs)
}
