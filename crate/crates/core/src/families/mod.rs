//! Built-in graph families with closed-form metadata.

mod a2;
pub mod calibration;
mod custom;
mod free_group;
mod ladder;

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

pub use a2::A2Chambers;
pub use custom::{EdgeListGraph, TableGroup};
pub use free_group::{reduce, FreeGroup, Letter};
pub use ladder::{Rail, Rung, RungLadder, RungPattern, ZLadder};

use crate::certify::{Certification, CertifiedSet};
use crate::graph::{sort_canonical, AdjacencyOracle, VertexId};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilyKind {
    FreeGroup {
        rank: usize,
    },
    ZLadder,
    BadLadderI,
    BadLadderII {
        pattern: RungPattern,
    },
    A2TildeChamber,
    /// Edge list; `path` is only recorded for reports.
    EdgeList {
        path: String,
        text: String,
    },
    MultiplicationTable {
        path: String,
        text: String,
    },
}

/// Which constructions have closed forms.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ExactOracles {
    pub distance: bool,
    pub geo: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    /// A valid hyperbolicity constant, when the family is hyperbolic and one
    /// is known.
    pub delta_bound: Option<u32>,
    pub exact: ExactOracles,
}

impl FamilySpec {
    pub fn new(kind: FamilyKind) -> Self {
        let (delta_bound, exact) = match &kind {
            FamilyKind::FreeGroup { .. } => (
                Some(0),
                ExactOracles {
                    distance: true,
                    geo: true,
                },
            ),
            FamilyKind::ZLadder => (
                Some(1),
                ExactOracles {
                    distance: true,
                    geo: true,
                },
            ),
            FamilyKind::BadLadderI => (
                Some(2),
                ExactOracles {
                    distance: false,
                    geo: true,
                },
            ),
            FamilyKind::BadLadderII { pattern } => (
                Some(2),
                ExactOracles {
                    distance: false,
                    geo: *pattern == RungLadder::minimal_two_pattern(),
                },
            ),
            FamilyKind::A2TildeChamber => (None, ExactOracles::default()),
            FamilyKind::EdgeList { .. } => (None, ExactOracles::default()),
            FamilyKind::MultiplicationTable { .. } => (
                None,
                ExactOracles {
                    distance: true,
                    geo: false,
                },
            ),
        };
        Self {
            kind,
            delta_bound,
            exact,
        }
    }

    pub fn free_group(rank: usize) -> Self {
        Self::new(FamilyKind::FreeGroup { rank })
    }

    pub fn z_ladder() -> Self {
        Self::new(FamilyKind::ZLadder)
    }

    pub fn bad_ladder_one() -> Self {
        Self::new(FamilyKind::BadLadderI)
    }

    pub fn bad_ladder_two() -> Self {
        Self::new(FamilyKind::BadLadderII {
            pattern: RungLadder::minimal_two_pattern(),
        })
    }

    pub fn a2() -> Self {
        Self::new(FamilyKind::A2TildeChamber)
    }

    /// Family selection by name, as on the command line. Custom families take
    /// `edges:PATH` or `table:PATH`.
    pub fn parse(name: &str, rank: Option<usize>, pattern: Option<&str>) -> Result<Self> {
        let kind = match name {
            "free-group" | "free" | "F" => FamilyKind::FreeGroup {
                rank: rank.unwrap_or(2),
            },
            "z-ladder" | "zladder" => FamilyKind::ZLadder,
            "bad-ladder-1" | "bad-ladder-i" => FamilyKind::BadLadderI,
            "bad-ladder-2" | "bad-ladder-ii" => FamilyKind::BadLadderII {
                pattern: match pattern {
                    None | Some("minimal") => RungLadder::minimal_two_pattern(),
                    Some(p) => RungPattern::parse(p)?,
                },
            },
            "a2" | "a2-chambers" => FamilyKind::A2TildeChamber,
            other => {
                if let Some(path) = other.strip_prefix("edges:") {
                    FamilyKind::EdgeList {
                        path: path.to_string(),
                        text: std::fs::read_to_string(path)?,
                    }
                } else if let Some(path) = other.strip_prefix("table:") {
                    FamilyKind::MultiplicationTable {
                        path: path.to_string(),
                        text: std::fs::read_to_string(path)?,
                    }
                } else {
                    return Err(Error::Parse(format!("unknown family `{other}`")));
                }
            }
        };
        if rank == Some(0) {
            return Err(Error::Parse("rank must be positive".into()));
        }
        Ok(Self::new(kind))
    }

    pub fn is_hyperbolic(&self) -> bool {
        !matches!(self.kind, FamilyKind::A2TildeChamber)
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            FamilyKind::FreeGroup { rank } => write!(f, "free-group(rank={rank})"),
            FamilyKind::ZLadder => write!(f, "z-ladder"),
            FamilyKind::BadLadderI => write!(f, "bad-ladder-1"),
            FamilyKind::BadLadderII { pattern } => write!(f, "bad-ladder-2({pattern})"),
            FamilyKind::A2TildeChamber => write!(f, "a2-chambers"),
            FamilyKind::EdgeList { path, .. } => write!(f, "edges:{path}"),
            FamilyKind::MultiplicationTable { path, .. } => write!(f, "table:{path}"),
        }
    }
}

/// Builds the oracle; ladder edge sets are calibrated against the published
/// identities first.
pub fn build_family(spec: &FamilySpec) -> Result<Arc<dyn AdjacencyOracle>> {
    Ok(match &spec.kind {
        FamilyKind::FreeGroup { rank } => {
            if !(1..=12).contains(rank) {
                return Err(Error::Parse(format!("unsupported free group rank {rank}")));
            }
            Arc::new(FreeGroup::new(*rank))
        }
        FamilyKind::ZLadder => Arc::new(ZLadder::new()),
        FamilyKind::BadLadderI => {
            let ladder = RungLadder::bad_ladder_one();
            calibration::calibrate_one(&ladder)?;
            Arc::new(ladder)
        }
        FamilyKind::BadLadderII { pattern } => {
            let ladder = RungLadder::bad_ladder_two(pattern)?;
            calibration::calibrate_two(&ladder)?;
            Arc::new(ladder)
        }
        FamilyKind::A2TildeChamber => Arc::new(A2Chambers::new()),
        FamilyKind::EdgeList { text, .. } => Arc::new(EdgeListGraph::parse(text)?),
        FamilyKind::MultiplicationTable { text, .. } => Arc::new(TableGroup::parse(text)?),
    })
}

/// A family-specific boundary point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NamedBoundaryPoint {
    /// Tagged point with a family reference ray, e.g. `eta` or `eta+`.
    Tag(String),
    /// The limit of `prefix · period^∞` read from the identity.
    Periodic {
        prefix: Vec<usize>,
        period: Vec<usize>,
    },
}

impl NamedBoundaryPoint {
    /// Textual ray form accepted by the ray parser.
    pub fn ray_text(&self, oracle: &dyn AdjacencyOracle) -> String {
        match self {
            NamedBoundaryPoint::Tag(t) => format!("@{t}"),
            NamedBoundaryPoint::Periodic { prefix, period } => {
                let labels = oracle.generator_labels().unwrap_or(&[]);
                let word =
                    |w: &[usize]| -> String { w.iter().map(|&s| labels[s].as_str()).collect() };
                format!(
                    "{}|{}|{}",
                    oracle.vertex_label(oracle.base_point()),
                    word(prefix),
                    word(period)
                )
            }
        }
    }
}

/// Named boundary points. Free groups list the one-letter periodic points;
/// [`periodic_points`] enumerates more.
pub fn family_boundary_points(spec: &FamilySpec) -> Result<Vec<NamedBoundaryPoint>> {
    match &spec.kind {
        FamilyKind::FreeGroup { rank } => Ok((0..2 * rank)
            .map(|s| NamedBoundaryPoint::Periodic {
                prefix: Vec::new(),
                period: vec![s],
            })
            .collect()),
        FamilyKind::EdgeList { .. } | FamilyKind::MultiplicationTable { .. } => {
            Err(Error::NotEnumerable)
        }
        _ => Ok(build_family(spec)?
            .named_points()
            .into_iter()
            .map(NamedBoundaryPoint::Tag)
            .collect()),
    }
}

/// Purely periodic points `w^∞` of a free group with `w` cyclically reduced,
/// primitive and of length at most `max_period`, in shortlex order of `w`.
pub fn periodic_points(rank: usize, max_period: usize) -> Vec<NamedBoundaryPoint> {
    let letters = 2 * rank;
    let mut out = Vec::new();
    let mut layer: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..max_period {
        let mut next = Vec::new();
        for w in &layer {
            for s in 0..letters {
                if w.last().is_some_and(|&l| l == s ^ 1) {
                    continue;
                }
                let mut v = w.clone();
                v.push(s);
                next.push(v);
            }
        }
        for w in &next {
            let cyclic = w.len() == 1 || w[0] != (w[w.len() - 1] ^ 1);
            let primitive = (1..w.len())
                .filter(|d| w.len() % d == 0)
                .all(|d| w.chunks(d).any(|c| c != &w[..d]));
            if cyclic && primitive {
                out.push(NamedBoundaryPoint::Periodic {
                    prefix: Vec::new(),
                    period: w.clone(),
                });
            }
        }
        layer = next;
    }
    out
}

/// Closed-form `Geo(x, η)` restricted to `B(x, radius)`.
pub fn exact_geo(
    spec: &FamilySpec,
    oracle: &dyn AdjacencyOracle,
    x: VertexId,
    eta: &NamedBoundaryPoint,
    radius: u32,
) -> Result<CertifiedSet> {
    if !spec.exact.geo {
        return Err(Error::NoExactOracle);
    }
    let member = geo_predicate(spec, oracle, x, eta)?;
    // Every member lies on a CGR from x made of members, so a search through
    // members alone reaches each one at its true distance.
    let mut vertices = Vec::new();
    if member(x) {
        let mut seen = HashSet::from([x]);
        let mut layer = vec![x];
        for _ in 0..radius {
            let mut next = Vec::new();
            for &v in &layer {
                for w in oracle.neighbors(v) {
                    if member(w) && seen.insert(w) {
                        next.push(w);
                    }
                }
            }
            vertices.extend_from_slice(&layer);
            layer = next;
        }
        vertices.extend(layer);
    }
    sort_canonical(oracle, &mut vertices);
    Ok(CertifiedSet {
        vertices,
        certification: Certification::Exact,
    })
}

type Member<'a> = Box<dyn Fn(VertexId) -> bool + 'a>;

fn geo_predicate<'a>(
    spec: &FamilySpec,
    oracle: &'a dyn AdjacencyOracle,
    x: VertexId,
    eta: &NamedBoundaryPoint,
) -> Result<Member<'a>> {
    let tag = match eta {
        NamedBoundaryPoint::Tag(t) => Some(t.as_str()),
        NamedBoundaryPoint::Periodic { .. } => None,
    };
    let ladder_index = |v: VertexId| -> (u64, i64) { (v.0 % 3, (v.0 / 3) as i64 + 1) };
    let (rx, m) = ladder_index(x);
    match (&spec.kind, tag) {
        (FamilyKind::FreeGroup { rank }, None) => {
            let NamedBoundaryPoint::Periodic { prefix, period } = eta else {
                unreachable!()
            };
            let cayley = oracle.cayley().ok_or(Error::NotCayley)?;
            let natural = crate::graph::GeneratorOrder::natural(2 * rank);
            let word = move |v: VertexId| cayley.normal_form(v, &natural);
            let u = word(x);
            let (prefix, period) = (prefix.clone(), period.clone());
            let letter_at = move |i: usize| -> usize {
                if i < prefix.len() {
                    prefix[i]
                } else {
                    period[(i - prefix.len()) % period.len()]
                }
            };
            let shared = (0..u.len()).take_while(|&i| u[i] == letter_at(i)).count();
            // The ray from x backs up to the branch point, then follows η.
            Ok(Box::new(move |v: VertexId| {
                let w = word(v);
                if w.len() <= u.len() && u.starts_with(&w) {
                    w.len() >= shared
                } else {
                    w.len() > shared && (0..w.len()).all(|i| w[i] == letter_at(i))
                }
            }))
        }
        (FamilyKind::ZLadder, Some(t)) if t == "eta+" || t == "eta-" => {
            let ladder = ZLadder::new();
            let (mx, _) = ladder.decode(x);
            let forward = t == "eta+";
            Ok(Box::new(move |v| {
                let (mv, _) = ladder.decode(v);
                if forward {
                    mv >= mx
                } else {
                    mv <= mx
                }
            }))
        }
        (FamilyKind::BadLadderI, Some("eta")) => Ok(Box::new(move |v| {
            let (r, n) = ladder_index(v);
            if rx == Rail::Z as u64 {
                (r != Rail::Z as u64 && n >= m) || v == x
            } else {
                n >= m
            }
        })),
        (FamilyKind::BadLadderII { .. }, Some("eta")) => {
            let m_even = m % 2 == 0;
            Ok(Box::new(move |v| {
                let (r, n) = ladder_index(v);
                let z_even = r == Rail::Z as u64 && n % 2 == 0;
                match rx {
                    0 => match r {
                        1 => n > m,
                        _ => n >= m,
                    },
                    1 => match r {
                        1 => n >= m,
                        0 => n >= m + 1 + i64::from(m_even),
                        _ => z_even && n > m,
                    },
                    _ => match r {
                        0 => n >= m,
                        1 => n > m,
                        _ => v == x || (z_even && n >= m + 2),
                    },
                }
            }))
        }
        _ => Err(Error::NoExactOracle),
    }
}
