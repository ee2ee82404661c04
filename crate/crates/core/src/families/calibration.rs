//! Brute-force calibration of ladder edge sets against the published set
//! identities, on a finite truncation of the ladder.

use std::collections::{BTreeSet, VecDeque};

use super::ladder::{Rail, RungLadder, RungPattern};
use crate::graph::AdjacencyOracle;
use crate::{Error, Result};

/// Number of ladder indices kept in the truncation.
const LENGTH: i64 = 40;
/// Identities are compared on indices up to this bound.
const COMPARE: i64 = 8;
/// Index of the far rail vertices standing in for the two ray classes.
const FAR: i64 = LENGTH - 3;
/// Sectors are kept away from the cut end of the truncation.
const SECTOR: i64 = 20;
/// Length of the geodesic that must fit in the sector intersection.
const STRAIGHT: u32 = 6;

type Node = (Rail, i64);

struct Truncation {
    nodes: Vec<Node>,
    adjacency: Vec<Vec<usize>>,
    dist: Vec<Vec<u32>>,
}

impl Truncation {
    fn new(ladder: &RungLadder) -> Option<Self> {
        let nodes: Vec<Node> = (1..=LENGTH)
            .flat_map(|n| [Rail::X, Rail::Y, Rail::Z].map(|r| (r, n)))
            .collect();
        let pos = |(r, n): Node| 3 * (n - 1) as usize + r as usize;
        let adjacency: Vec<Vec<usize>> = nodes
            .iter()
            .map(|&(r, n)| {
                ladder
                    .neighbors(ladder.vertex(r, n))
                    .into_iter()
                    .map(|w| ladder.decode(w))
                    .filter(|&(_, m)| m <= LENGTH)
                    .map(pos)
                    .collect()
            })
            .collect();
        let dist: Vec<Vec<u32>> = (0..nodes.len()).map(|s| bfs(&adjacency, s)).collect();
        if dist[0].contains(&u32::MAX) {
            return None;
        }
        Some(Self {
            nodes,
            adjacency,
            dist,
        })
    }

    fn pos(&self, (r, n): Node) -> usize {
        3 * (n - 1) as usize + r as usize
    }

    fn far(&self, rail: Rail) -> usize {
        self.pos((rail, FAR))
    }

    fn sector(&self, v: usize, rail: Rail) -> BTreeSet<usize> {
        let t = self.far(rail);
        (0..self.nodes.len())
            .filter(|&z| self.nodes[z].1 <= SECTOR)
            .filter(|&z| self.dist[v][z] + self.dist[z][t] == self.dist[v][t])
            .collect()
    }

    fn geo(&self, v: usize) -> BTreeSet<usize> {
        &self.sector(v, Rail::X) | &self.sector(v, Rail::Y)
    }

    /// Class of a special vertex, `None` when not special.
    fn special_class(&self, v: usize) -> Option<Rail> {
        let (qx, qy) = (self.sector(v, Rail::X), self.sector(v, Rail::Y));
        let both: BTreeSet<usize> = &qx & &qy;
        let mut layer = vec![v];
        for k in 0..STRAIGHT {
            layer = layer
                .iter()
                .flat_map(|&u| self.adjacency[u].iter().copied())
                .filter(|w| both.contains(w) && self.dist[v][*w] == k + 1)
                .collect();
            if layer.is_empty() {
                return None;
            }
        }
        match (qx == both, qy == both) {
            (true, false) => Some(Rail::X),
            (false, true) => Some(Rail::Y),
            _ => None,
        }
    }

    fn geo1(&self, v: usize) -> Option<BTreeSet<usize>> {
        let geo = self.geo(v);
        let mut out = BTreeSet::new();
        for rail in [Rail::X, Rail::Y] {
            let candidates: Vec<usize> = geo
                .iter()
                .copied()
                .filter(|&y| self.nodes[y].1 <= COMPARE && self.special_class(y) == Some(rail))
                .collect();
            let best = candidates.iter().map(|&y| self.dist[v][y]).min()?;
            for &y in candidates.iter().filter(|&&y| self.dist[v][y] == best) {
                out.extend(self.sector(y, rail));
            }
        }
        Some(out)
    }

    fn cut(&self, set: &BTreeSet<usize>) -> BTreeSet<Node> {
        set.iter()
            .map(|&i| self.nodes[i])
            .filter(|&(_, n)| n <= COMPARE)
            .collect()
    }

    fn trace(&self, t: usize) -> Vec<i64> {
        (0..self.nodes.len())
            .filter(|&i| self.nodes[i].1 <= 3)
            .map(|y| self.dist[t][y] as i64 - self.dist[t][0] as i64)
            .collect()
    }
}

fn bfs(adjacency: &[Vec<usize>], source: usize) -> Vec<u32> {
    let mut dist = vec![u32::MAX; adjacency.len()];
    dist[source] = 0;
    let mut queue = VecDeque::from([source]);
    while let Some(v) = queue.pop_front() {
        for &w in &adjacency[v] {
            if dist[w] == u32::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

fn all(pred: impl Fn(Node) -> bool) -> BTreeSet<Node> {
    (1..=COMPARE)
        .flat_map(|n| [Rail::X, Rail::Y, Rail::Z].map(|r| (r, n)))
        .filter(|&v| pred(v))
        .collect()
}

fn expect(name: &str, got: BTreeSet<Node>, want: BTreeSet<Node>) -> Result<()> {
    if got == want {
        Ok(())
    } else {
        Err(Error::CalibrationFailed(name.to_string()))
    }
}

/// Checks the first bad ladder: `Q(x1,ξ_x)={x_n}`, `Q(x1,ξ_y)=X`,
/// `Q(z1,ξ_y)={z1,y_n}`, `Geo(x1,η)=X`, `Geo(z1,η)={z1,x_n,y_n}`, two classes.
pub fn calibrate_one(ladder: &RungLadder) -> Result<()> {
    let t = Truncation::new(ladder)
        .ok_or_else(|| Error::CalibrationFailed("graph is connected".into()))?;
    let x1 = t.pos((Rail::X, 1));
    let z1 = t.pos((Rail::Z, 1));
    if t.trace(t.far(Rail::X)) == t.trace(t.far(Rail::Y)) {
        return Err(Error::CalibrationFailed("Xi(eta) has two elements".into()));
    }
    expect(
        "Q(x1,xi_x) = {x_n}",
        t.cut(&t.sector(x1, Rail::X)),
        all(|(r, _)| r == Rail::X),
    )?;
    expect(
        "Q(x1,xi_y) = X",
        t.cut(&t.sector(x1, Rail::Y)),
        all(|_| true),
    )?;
    expect(
        "Q(z1,xi_y) = {z1,y_n}",
        t.cut(&t.sector(z1, Rail::Y)),
        all(|v| v == (Rail::Z, 1) || v.0 == Rail::Y),
    )?;
    expect("Geo(x1,eta) = X", t.cut(&t.geo(x1)), all(|_| true))?;
    expect(
        "Geo(z1,eta) = {z1,x_n,y_n}",
        t.cut(&t.geo(z1)),
        all(|v| v == (Rail::Z, 1) || v.0 != Rail::Z),
    )
}

/// Checks the second bad ladder: every vertex special,
/// `(z_m,y_{m+1})(y_n)` a CGR, `Geo(x1,η)=X∖{y1}`, the two stated Geo₁ sets,
/// infinite `Geo` and finite `Geo₁` symmetric differences.
pub fn calibrate_two(ladder: &RungLadder) -> Result<()> {
    let t = Truncation::new(ladder)
        .ok_or_else(|| Error::CalibrationFailed("graph is connected".into()))?;
    let x1 = t.pos((Rail::X, 1));
    let y1 = t.pos((Rail::Y, 1));
    for n in 1..=COMPARE - 2 {
        for r in [Rail::X, Rail::Y, Rail::Z] {
            if t.special_class(t.pos((r, n))).is_none() {
                return Err(Error::CalibrationFailed(
                    "all vertices are eta-special".into(),
                ));
            }
        }
    }
    for m in 1..=COMPARE {
        let z = t.pos((Rail::Z, m));
        let ok = (m + 1..FAR).all(|n| t.dist[z][t.pos((Rail::Y, n))] == (n - m) as u32);
        if !ok {
            return Err(Error::CalibrationFailed(
                "(z_m,y_{m+1})(y_n) is a CGR".into(),
            ));
        }
    }
    let geo_x = t.geo(x1);
    let geo_y = t.geo(y1);
    expect(
        "Geo(x1,eta) = X - {y1}",
        t.cut(&geo_x),
        all(|v| v != (Rail::Y, 1)),
    )?;
    let g1x = t
        .geo1(x1)
        .ok_or_else(|| Error::CalibrationFailed("Y(x1,xi) nonempty".into()))?;
    let g1y = t
        .geo1(y1)
        .ok_or_else(|| Error::CalibrationFailed("Y(y1,xi) nonempty".into()))?;
    expect(
        "Geo1(x1,eta) = {x_n, y_{n+1}, z_1, z_{2n+2}}",
        t.cut(&g1x),
        all(|(r, n)| match r {
            Rail::X => true,
            Rail::Y => n >= 2,
            Rail::Z => n == 1 || (n % 2 == 0 && n >= 4),
        }),
    )?;
    expect(
        "Geo1(y1,eta) = {x_{n+1}, y_n, z_{2n}}",
        t.cut(&g1y),
        all(|(r, n)| match r {
            Rail::X => n >= 2,
            Rail::Y => true,
            Rail::Z => n % 2 == 0,
        }),
    )?;
    let deep = |a: &BTreeSet<usize>, b: &BTreeSet<usize>| {
        t.cut(&(a ^ b)).iter().map(|&(_, n)| n).max().unwrap_or(0)
    };
    if deep(&geo_x, &geo_y) < COMPARE - 1 {
        return Err(Error::CalibrationFailed(
            "Geo(x1) and Geo(y1) have infinite symmetric difference".into(),
        ));
    }
    if deep(&g1x, &g1y) > 2 {
        return Err(Error::CalibrationFailed(
            "Geo1(x1) and Geo1(y1) have finite symmetric difference".into(),
        ));
    }
    Ok(())
}

/// Every rung pattern of the second bad ladder, with at most `max_extra`
/// extra rungs per parity drawn from nearby rail positions, that passes
/// calibration.
pub fn search_two(max_extra: usize) -> Vec<RungPattern> {
    let options: Vec<(Rail, i64)> = vec![
        (Rail::X, -1),
        (Rail::X, 0),
        (Rail::X, 1),
        (Rail::X, 2),
        (Rail::Y, 0),
        (Rail::Y, -1),
    ];
    let subsets: Vec<Vec<(Rail, i64)>> = (0..1u32 << options.len())
        .filter(|m| m.count_ones() as usize <= max_extra)
        .map(|m| {
            (0..options.len())
                .filter(|i| m & (1 << i) != 0)
                .map(|i| options[i])
                .collect()
        })
        .collect();
    let mut found = Vec::new();
    for even in &subsets {
        for odd in &subsets {
            let pattern = RungPattern {
                even: even.clone(),
                odd: odd.clone(),
            };
            if let Ok(ladder) = RungLadder::bad_ladder_two(&pattern) {
                if calibrate_two(&ladder).is_ok() {
                    found.push(pattern);
                }
            }
        }
    }
    found
}
