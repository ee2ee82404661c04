use std::cmp::Ordering;
use std::fmt;

use crate::graph::{AdjacencyOracle, VertexId};
use crate::{Error, Result};

/// Rails of a ladder, in canonical order within one index.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rail {
    X = 0,
    Y = 1,
    Z = 2,
}

impl Rail {
    fn from_index(i: u64) -> Self {
        match i {
            0 => Rail::X,
            1 => Rail::Y,
            _ => Rail::Z,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Rail::X => 'x',
            Rail::Y => 'y',
            Rail::Z => 'z',
        }
    }

    /// Position across the ladder, used for edge labels: `x < z < y`.
    fn height(self) -> u8 {
        match self {
            Rail::X => 0,
            Rail::Z => 1,
            Rail::Y => 2,
        }
    }
}

/// Where the middle vertex `z_m` attaches: a rail and an index offset from `m`.
pub type Rung = (Rail, i64);

/// Rung attachment rule for `z_m`, split by the parity of `m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RungPattern {
    pub even: Vec<Rung>,
    pub odd: Vec<Rung>,
}

impl RungPattern {
    pub fn uniform(rungs: &[Rung]) -> Self {
        Self {
            even: rungs.to_vec(),
            odd: rungs.to_vec(),
        }
    }

    fn for_index(&self, m: i64) -> &[Rung] {
        if m % 2 == 0 {
            &self.even
        } else {
            &self.odd
        }
    }

    /// Parses `even:x0,y-1;odd:x0`. A single list without a parity prefix
    /// applies to both.
    pub fn parse(text: &str) -> Result<Self> {
        let parse_list = |list: &str| -> Result<Vec<Rung>> {
            list.split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|item| {
                    let mut chars = item.chars();
                    let rail = match chars.next() {
                        Some('x') => Rail::X,
                        Some('y') => Rail::Y,
                        Some('z') => Rail::Z,
                        _ => return Err(Error::Parse(format!("bad rung `{item}`"))),
                    };
                    let offset = chars
                        .as_str()
                        .parse::<i64>()
                        .map_err(|_| Error::Parse(format!("bad rung offset in `{item}`")))?;
                    Ok((rail, offset))
                })
                .collect()
        };
        let mut even = None;
        let mut odd = None;
        for part in text.split(';').map(str::trim).filter(|s| !s.is_empty()) {
            if let Some(rest) = part.strip_prefix("even:") {
                even = Some(parse_list(rest)?);
            } else if let Some(rest) = part.strip_prefix("odd:") {
                odd = Some(parse_list(rest)?);
            } else {
                let both = parse_list(part)?;
                even = Some(both.clone());
                odd = Some(both);
            }
        }
        Ok(Self {
            even: even.unwrap_or_default(),
            odd: odd.unwrap_or_default(),
        })
    }
}

impl fmt::Display for RungPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |rungs: &[Rung]| {
            rungs
                .iter()
                .map(|(r, o)| format!("{}{}", r.letter(), o))
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(f, "even:{};odd:{}", list(&self.even), list(&self.odd))
    }
}

/// Three-rail ladder on `{x_n, y_n, z_n | n >= 1}`: rails `x_n - x_{n+1}` and
/// `y_n - y_{n+1}`, with each `z_m` attached to the rails by a rung pattern.
/// Handle of `r_n` is `3(n-1) + rail`.
pub struct RungLadder {
    name: &'static str,
    rungs: RungPattern,
    degree: usize,
    labels: Vec<String>,
}

impl RungLadder {
    pub fn new(name: &'static str, rungs: RungPattern) -> Result<Self> {
        if rungs
            .even
            .iter()
            .chain(&rungs.odd)
            .any(|(r, _)| *r == Rail::Z)
        {
            return Err(Error::NotSimple(
                "middle vertices may only attach to rails".into(),
            ));
        }
        let mut ladder = Self {
            name,
            rungs,
            degree: 0,
            labels: ["f", "b", "u", "d"].iter().map(|s| s.to_string()).collect(),
        };
        // The pattern is 2-periodic, so a few indices past the largest
        // offset already realise every degree.
        let reach = ladder
            .rungs
            .even
            .iter()
            .chain(&ladder.rungs.odd)
            .map(|(_, o)| o.unsigned_abs())
            .max()
            .unwrap_or(0) as i64;
        ladder.degree = (1..=2 * reach + 6)
            .flat_map(|n| [Rail::X, Rail::Y, Rail::Z].map(|r| (r, n)))
            .map(|(r, n)| ladder.neighbors(ladder.vertex(r, n)).len())
            .max()
            .unwrap_or(0);
        Ok(ladder)
    }

    /// Bad ladder with one boundary point and two horofunction classes:
    /// each middle vertex is joined to both rails at its own index.
    pub fn bad_ladder_one() -> Self {
        Self::new(
            "bad-ladder-1",
            RungPattern::uniform(&[(Rail::X, 0), (Rail::Y, 0)]),
        )
        .expect("valid pattern")
    }

    /// Second bad ladder: `z_m - y_{m+1}` always, plus a calibrated pattern.
    pub fn bad_ladder_two(extra: &RungPattern) -> Result<Self> {
        let mut rungs = extra.clone();
        for list in [&mut rungs.even, &mut rungs.odd] {
            if !list.contains(&(Rail::Y, 1)) {
                list.insert(0, (Rail::Y, 1));
            }
        }
        Self::new("bad-ladder-2", rungs)
    }

    /// Extra rungs of the accepted second bad ladder beyond `z_m - y_{m+1}`.
    pub fn minimal_two_pattern() -> RungPattern {
        RungPattern {
            even: vec![(Rail::X, 0), (Rail::Y, -1)],
            odd: vec![(Rail::X, 0)],
        }
    }

    pub fn name(&self) -> &'static str {
        self.name
    }

    pub fn rungs(&self) -> &RungPattern {
        &self.rungs
    }

    pub fn vertex(&self, rail: Rail, n: i64) -> VertexId {
        assert!(n >= 1, "ladder indices start at 1");
        VertexId(3 * (n as u64 - 1) + rail as u64)
    }

    pub fn decode(&self, v: VertexId) -> (Rail, i64) {
        (Rail::from_index(v.0 % 3), (v.0 / 3) as i64 + 1)
    }

    fn edge_exists(&self, m: i64, rail: Rail, n: i64) -> bool {
        self.rungs
            .for_index(m)
            .iter()
            .any(|&(r, o)| r == rail && m + o == n)
    }
}

impl AdjacencyOracle for RungLadder {
    fn base_point(&self) -> VertexId {
        self.vertex(Rail::X, 1)
    }

    fn neighbors(&self, v: VertexId) -> Vec<VertexId> {
        let (rail, n) = self.decode(v);
        let mut out = Vec::new();
        match rail {
            Rail::Z => {
                for &(r, o) in self.rungs.for_index(n) {
                    if n + o >= 1 {
                        out.push(self.vertex(r, n + o));
                    }
                }
            }
            Rail::X | Rail::Y => {
                if n > 1 {
                    out.push(self.vertex(rail, n - 1));
                }
                out.push(self.vertex(rail, n + 1));
                let mut offsets: Vec<i64> = self
                    .rungs
                    .even
                    .iter()
                    .chain(&self.rungs.odd)
                    .filter(|(r, _)| *r == rail)
                    .map(|(_, o)| *o)
                    .collect();
                offsets.sort_unstable();
                offsets.dedup();
                let mut zs: Vec<i64> = offsets
                    .into_iter()
                    .map(|o| n - o)
                    .filter(|&m| m >= 1 && self.edge_exists(m, rail, n))
                    .collect();
                zs.sort_unstable();
                zs.dedup();
                out.extend(zs.into_iter().map(|m| self.vertex(Rail::Z, m)));
            }
        }
        out
    }

    fn degree_bound(&self) -> usize {
        self.degree
    }

    fn vertex_label(&self, v: VertexId) -> String {
        let (rail, n) = self.decode(v);
        format!("{}{}", rail.letter(), n)
    }

    fn parse_vertex(&self, label: &str) -> Option<VertexId> {
        let mut chars = label.chars();
        let rail = match chars.next()? {
            'x' => Rail::X,
            'y' => Rail::Y,
            'z' => Rail::Z,
            _ => return None,
        };
        let n: i64 = chars.as_str().parse().ok()?;
        (n >= 1).then(|| self.vertex(rail, n))
    }

    fn generator_labels(&self) -> Option<&[String]> {
        Some(&self.labels)
    }

    fn edge_label(&self, u: VertexId, v: VertexId) -> Option<usize> {
        if !self.neighbors(u).contains(&v) {
            return None;
        }
        let ((ru, nu), (rv, nv)) = (self.decode(u), self.decode(v));
        Some(if ru == rv {
            if nv > nu {
                0
            } else {
                1
            }
        } else if rv.height() > ru.height() {
            2
        } else {
            3
        })
    }

    fn named_points(&self) -> Vec<String> {
        vec!["eta".to_string()]
    }

    fn named_ray_vertex(&self, tag: &str, n: usize) -> Option<VertexId> {
        (tag == "eta").then(|| self.vertex(Rail::X, n as i64 + 1))
    }
}

/// The ladder `Z x {0,1}`: rails and a rung at every integer. Handle of
/// `(m, i)` is `2 zigzag(m) + i`.
pub struct ZLadder {
    labels: Vec<String>,
}

impl Default for ZLadder {
    fn default() -> Self {
        Self::new()
    }
}

impl ZLadder {
    pub fn new() -> Self {
        Self {
            labels: ["f", "b", "u", "d"].iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn vertex(&self, m: i64, i: u8) -> VertexId {
        let zz = if m >= 0 {
            2 * m as u64
        } else {
            2 * (-m) as u64 - 1
        };
        VertexId(2 * zz + i as u64)
    }

    pub fn decode(&self, v: VertexId) -> (i64, u8) {
        let zz = v.0 / 2;
        let m = if zz.is_multiple_of(2) {
            (zz / 2) as i64
        } else {
            -(zz.div_ceil(2) as i64)
        };
        (m, (v.0 % 2) as u8)
    }
}

impl AdjacencyOracle for ZLadder {
    fn base_point(&self) -> VertexId {
        self.vertex(0, 0)
    }

    fn neighbors(&self, v: VertexId) -> Vec<VertexId> {
        let (m, i) = self.decode(v);
        vec![
            self.vertex(m - 1, i),
            self.vertex(m + 1, i),
            self.vertex(m, 1 - i),
        ]
    }

    fn degree_bound(&self) -> usize {
        3
    }

    fn vertex_label(&self, v: VertexId) -> String {
        let (m, i) = self.decode(v);
        format!("({m},{i})")
    }

    fn parse_vertex(&self, label: &str) -> Option<VertexId> {
        let inner = label.strip_prefix('(')?.strip_suffix(')')?;
        let (m, i) = inner.split_once(',')?;
        let m: i64 = m.trim().parse().ok()?;
        let i: u8 = i.trim().parse().ok()?;
        (i <= 1).then(|| self.vertex(m, i))
    }

    fn canonical_cmp(&self, a: VertexId, b: VertexId) -> Ordering {
        self.decode(a).cmp(&self.decode(b))
    }

    fn generator_labels(&self) -> Option<&[String]> {
        Some(&self.labels)
    }

    fn edge_label(&self, u: VertexId, v: VertexId) -> Option<usize> {
        let ((mu, iu), (mv, iv)) = (self.decode(u), self.decode(v));
        match (mv - mu, iv as i8 - iu as i8) {
            (1, 0) => Some(0),
            (-1, 0) => Some(1),
            (0, 1) => Some(2),
            (0, -1) => Some(3),
            _ => None,
        }
    }

    fn exact_distance(&self, u: VertexId, v: VertexId) -> Option<u32> {
        let ((mu, iu), (mv, iv)) = (self.decode(u), self.decode(v));
        Some((mu - mv).unsigned_abs() as u32 + u32::from(iu != iv))
    }

    fn named_points(&self) -> Vec<String> {
        vec!["eta+".to_string(), "eta-".to_string()]
    }

    fn named_ray_vertex(&self, tag: &str, n: usize) -> Option<VertexId> {
        match tag {
            "eta+" => Some(self.vertex(n as i64, 0)),
            "eta-" => Some(self.vertex(-(n as i64), 0)),
            _ => None,
        }
    }
}
