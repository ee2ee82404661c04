use std::cmp::Ordering;

use crate::graph::{AdjacencyOracle, VertexId};

/// Chamber graph of the tiling of the plane by equilateral triangles: one
/// vertex per triangle, adjacent when the triangles share a side. This is the
/// hexagonal lattice. Triangles are `up(i,j)` and `down(i,j)`, and
/// `up(i,j)` touches `down(i,j)`, `down(i-1,j)` and `down(i,j-1)`; those three
/// sides are the edge directions `p`, `q`, `r`.
pub struct A2Chambers {
    labels: Vec<String>,
}

impl Default for A2Chambers {
    fn default() -> Self {
        Self::new()
    }
}

fn zigzag(n: i64) -> u64 {
    if n >= 0 {
        2 * n as u64
    } else {
        2 * n.unsigned_abs() - 1
    }
}

fn unzigzag(z: u64) -> i64 {
    if z.is_multiple_of(2) {
        (z / 2) as i64
    } else {
        -(z.div_ceil(2) as i64)
    }
}

const DIRECTIONS: [(usize, usize); 6] = [(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)];

impl A2Chambers {
    pub fn new() -> Self {
        Self {
            labels: ["p", "q", "r"].iter().map(|s| s.to_string()).collect(),
        }
    }

    /// `down = false` for up-triangles.
    pub fn vertex(&self, i: i64, j: i64, down: bool) -> VertexId {
        let (a, b) = (zigzag(i), zigzag(j));
        let pair = (a + b) * (a + b + 1) / 2 + b;
        VertexId(2 * pair + u64::from(down))
    }

    pub fn decode(&self, v: VertexId) -> (i64, i64, bool) {
        let pair = v.0 / 2;
        // Inverse Cantor pairing.
        let w = ((((8 * pair + 1) as f64).sqrt() as u64).saturating_sub(1)) / 2;
        let mut w = w;
        while (w + 1) * (w + 2) / 2 <= pair {
            w += 1;
        }
        while w * (w + 1) / 2 > pair {
            w -= 1;
        }
        let b = pair - w * (w + 1) / 2;
        let a = w - b;
        (unzigzag(a), unzigzag(b), v.0 % 2 == 1)
    }

    /// Neighbor across the side of direction `dir`.
    pub fn step(&self, v: VertexId, dir: usize) -> VertexId {
        let (i, j, down) = self.decode(v);
        match (down, dir) {
            (false, 0) => self.vertex(i, j, true),
            (false, 1) => self.vertex(i - 1, j, true),
            (false, _) => self.vertex(i, j - 1, true),
            (true, 0) => self.vertex(i, j, false),
            (true, 1) => self.vertex(i + 1, j, false),
            (true, _) => self.vertex(i, j + 1, false),
        }
    }

    fn direction_tag(first: usize, second: usize) -> String {
        format!("dir{first}{second}")
    }
}

impl AdjacencyOracle for A2Chambers {
    fn base_point(&self) -> VertexId {
        self.vertex(0, 0, false)
    }

    fn neighbors(&self, v: VertexId) -> Vec<VertexId> {
        (0..3).map(|d| self.step(v, d)).collect()
    }

    fn degree_bound(&self) -> usize {
        3
    }

    fn vertex_label(&self, v: VertexId) -> String {
        let (i, j, down) = self.decode(v);
        format!("{}({i},{j})", if down { 'd' } else { 'u' })
    }

    fn parse_vertex(&self, label: &str) -> Option<VertexId> {
        let down = match label.chars().next()? {
            'u' => false,
            'd' => true,
            _ => return None,
        };
        let inner = label[1..].strip_prefix('(')?.strip_suffix(')')?;
        let (i, j) = inner.split_once(',')?;
        Some(self.vertex(i.trim().parse().ok()?, j.trim().parse().ok()?, down))
    }

    fn canonical_cmp(&self, a: VertexId, b: VertexId) -> Ordering {
        self.decode(a).cmp(&self.decode(b))
    }

    fn generator_labels(&self) -> Option<&[String]> {
        Some(&self.labels)
    }

    fn edge_label(&self, u: VertexId, v: VertexId) -> Option<usize> {
        (0..3).find(|&d| self.step(u, d) == v)
    }

    fn named_points(&self) -> Vec<String> {
        DIRECTIONS
            .iter()
            .map(|&(a, b)| Self::direction_tag(a, b))
            .collect()
    }

    /// Zigzag ray alternating two side directions from the base chamber.
    fn named_ray_vertex(&self, tag: &str, n: usize) -> Option<VertexId> {
        let &(first, second) = DIRECTIONS
            .iter()
            .find(|&&(a, b)| Self::direction_tag(a, b) == tag)?;
        let mut v = self.base_point();
        for k in 0..n {
            v = self.step(v, if k % 2 == 0 { first } else { second });
        }
        Some(v)
    }
}
