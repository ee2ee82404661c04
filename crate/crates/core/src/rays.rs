//! Boundary points as reference rays, CGR prefixes toward them, `Geo(x,η)`
//! windows and fellow-travelling audits.

use std::cmp::Ordering;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::certify::{Certification, CertifiedSet};
use crate::graph::{
    ball, parse_vertex, sort_canonical, AdjacencyOracle, CayleyStructure, PathType, VertexId,
};
use crate::space::Space;
use crate::{Error, Result};

/// Truncation depths: `h` reference-ray depth, `r` window radius, `s`
/// stabilisation patience.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Horizon {
    #[serde(rename = "H")]
    pub h: u32,
    #[serde(rename = "R")]
    pub r: u32,
    #[serde(rename = "S")]
    pub s: u32,
}

impl Horizon {
    pub fn new(h: u32, r: u32, s: u32) -> Result<Self> {
        if r < 1 || h < r || s < 1 || s > h {
            return Err(Error::InvalidHorizon(format!(
                "need H >= R >= 1 and 1 <= S <= H, got H={h} R={r} S={s}"
            )));
        }
        Ok(Self { h, r, s })
    }

    /// Defaults for radius `r`: `S = 2δ + 2` and `H = 4R + 8`.
    pub fn for_radius(r: u32, delta: u32) -> Self {
        Self {
            h: 4 * r + 8,
            r: r.max(1),
            s: 2 * delta + 2,
        }
    }

    /// Same patience and depth margin at another radius.
    pub fn with_radius(&self, r: u32) -> Self {
        let h = (self.h + 4 * r).saturating_sub(4 * self.r).max(r);
        Self { h, r, s: self.s }
    }

    /// Parses `H,R,S`.
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<u32> = text
            .split(',')
            .map(|p| {
                p.trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad horizon `{text}`")))
            })
            .collect::<Result<_>>()?;
        match parts.as_slice() {
            [h, r, s] => Self::new(*h, *r, *s),
            _ => Err(Error::Parse(format!("horizon must be H,R,S, got `{text}`"))),
        }
    }
}

impl fmt::Display for Horizon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.h, self.r, self.s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RayKind {
    /// `origin · prefix · period^∞`, following edge labels.
    Periodic { prefix: PathType, period: PathType },
    /// A family reference ray.
    Named(String),
}

/// A boundary point given by a reference geodesic ray.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RaySpec {
    pub origin: VertexId,
    pub kind: RayKind,
}

fn parse_word(text: &str, labels: &[String]) -> Result<PathType> {
    let mut by_length: Vec<(usize, &String)> = labels.iter().enumerate().collect();
    by_length.sort_by(|a, b| b.1.len().cmp(&a.1.len()).then(a.0.cmp(&b.0)));
    let mut rest = text.trim();
    let mut out = Vec::new();
    while !rest.is_empty() {
        let (idx, label) = by_length
            .iter()
            .find(|(_, l)| !l.is_empty() && rest.starts_with(l.as_str()))
            .ok_or_else(|| Error::Parse(format!("cannot read generators in `{text}`")))?;
        out.push(*idx);
        rest = &rest[label.len()..];
    }
    Ok(PathType(out))
}

impl RaySpec {
    /// Parses `origin|prefix|period` (e.g. `e|b|ab`), or `@tag` /
    /// `origin@tag` for family-named points.
    pub fn parse(oracle: &dyn AdjacencyOracle, text: &str) -> Result<Self> {
        let text = text.trim();
        if let Some((origin, tag)) = text.split_once('@') {
            let expected = oracle
                .named_ray_vertex(tag, 0)
                .ok_or_else(|| Error::Parse(format!("unknown boundary point `@{tag}`")))?;
            if !origin.is_empty() && parse_vertex(oracle, origin)? != expected {
                return Err(Error::Parse(format!(
                    "named ray `@{tag}` starts at {}",
                    oracle.vertex_label(expected)
                )));
            }
            return Ok(Self {
                origin: expected,
                kind: RayKind::Named(tag.to_string()),
            });
        }
        let labels = oracle.generator_labels().ok_or(Error::NotCayley)?;
        let parts: Vec<&str> = text.split('|').collect();
        let [origin, prefix, period] = parts.as_slice() else {
            return Err(Error::Parse(format!(
                "ray must be `origin|prefix|period` or `@tag`, got `{text}`"
            )));
        };
        let period = parse_word(period, labels)?;
        if period.is_empty() {
            return Err(Error::Parse("ray period must be nonempty".into()));
        }
        Ok(Self {
            origin: parse_vertex(oracle, origin)?,
            kind: RayKind::Periodic {
                prefix: parse_word(prefix, labels)?,
                period,
            },
        })
    }

    pub fn render(&self, oracle: &dyn AdjacencyOracle) -> String {
        match &self.kind {
            RayKind::Named(tag) => format!("@{tag}"),
            RayKind::Periodic { prefix, period } => {
                let labels = oracle.generator_labels().unwrap_or(&[]);
                format!(
                    "{}|{}|{}",
                    oracle.vertex_label(self.origin),
                    prefix.render(labels),
                    period.render(labels)
                )
            }
        }
    }

    /// The ray translated by the group element `g` (left multiplication).
    pub fn translate(&self, cayley: &dyn CayleyStructure, g: VertexId) -> Result<Self> {
        match &self.kind {
            RayKind::Periodic { .. } => Ok(Self {
                origin: cayley.multiply(g, self.origin),
                kind: self.kind.clone(),
            }),
            RayKind::Named(_) => Err(Error::NotCayley),
        }
    }

    /// The first `len + 1` vertices, validated as a geodesic.
    pub fn vertices(&self, space: &Space, len: u32) -> Result<Vec<VertexId>> {
        let oracle = space.oracle();
        let mut out = Vec::with_capacity(len as usize + 1);
        match &self.kind {
            RayKind::Named(tag) => {
                for n in 0..=len as usize {
                    out.push(
                        oracle
                            .named_ray_vertex(tag, n)
                            .ok_or_else(|| Error::Parse(format!("unknown point `@{tag}`")))?,
                    );
                }
            }
            RayKind::Periodic { prefix, period } => {
                let mut v = self.origin;
                out.push(v);
                for n in 0..len as usize {
                    let s = if n < prefix.len() {
                        prefix.0[n]
                    } else {
                        period.0[(n - prefix.len()) % period.len()]
                    };
                    v = step(oracle, v, s)?;
                    out.push(v);
                }
            }
        }
        for (n, &v) in out.iter().enumerate() {
            if space.dist(self.origin, v)? != n as u32 {
                return Err(Error::NotGeodesic(n));
            }
        }
        Ok(out)
    }
}

fn step(oracle: &dyn AdjacencyOracle, v: VertexId, s: usize) -> Result<VertexId> {
    if let Some(cayley) = oracle.cayley() {
        return Ok(cayley.multiply(v, cayley.generator(s)));
    }
    oracle
        .neighbors(v)
        .into_iter()
        .find(|&w| oracle.edge_label(v, w) == Some(s))
        .ok_or_else(|| Error::NotAPath(oracle.vertex_label(v), format!("label {s}")))
}

/// Vertex `n` of the reference ray.
pub fn reference_vertex(space: &Space, ray: &RaySpec, n: u32) -> Result<VertexId> {
    Ok(*ray.vertices(space, n)?.last().expect("nonempty"))
}

/// The reference ray re-based at `x`: from index `anchor` on,
/// `d(x, r_n) = n + shift`.
#[derive(Clone, Debug)]
pub struct Rebase {
    pub ray: Vec<VertexId>,
    pub anchor: u32,
    pub shift: i64,
}

impl Rebase {
    /// Reference-ray vertex at distance `n` from `x`.
    pub fn at_distance(&self, n: u32) -> Result<VertexId> {
        let idx = n as i64 - self.shift;
        if idx < self.anchor as i64 || idx >= self.ray.len() as i64 {
            return Err(Error::HorizonTooSmall(format!(
                "distance {n} is outside the re-based range"
            )));
        }
        Ok(self.ray[idx as usize])
    }
}

/// Re-bases a finite geodesic `ray` at `x`, requiring the offset
/// `d(x, ray_n) - n` to be constant on the last `patience` indices at least.
pub fn rebase_path(space: &Space, x: VertexId, ray: &[VertexId], patience: u32) -> Result<Rebase> {
    let offsets: Vec<i64> = ray
        .iter()
        .enumerate()
        .map(|(n, &v)| Ok(space.dist(x, v)? as i64 - n as i64))
        .collect::<Result<_>>()?;
    let last = *offsets.last().expect("nonempty ray");
    let anchor = offsets
        .iter()
        .rposition(|&c| c != last)
        .map_or(0, |i| i + 1);
    if (ray.len() - 1 - anchor) < patience as usize {
        return Err(Error::Unstable(format!(
            "offset of {} to the reference ray still moving near index {}",
            space.label(x),
            anchor
        )));
    }
    Ok(Rebase {
        ray: ray.to_vec(),
        anchor: anchor as u32,
        shift: last,
    })
}

/// A geodesic path from an origin, truncated from a longer geodesic toward
/// the boundary point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CgrPrefix {
    pub vertices: Vec<VertexId>,
    /// Reference-ray index of the vertex it was aimed at.
    pub target_index: u32,
}

impl CgrPrefix {
    pub fn origin(&self) -> VertexId {
        self.vertices[0]
    }

    pub fn len(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.len() <= 1
    }

    pub fn truncate(&self, len: usize) -> CgrPrefix {
        CgrPrefix {
            vertices: self.vertices[..=len.min(self.len())].to_vec(),
            target_index: self.target_index,
        }
    }
}

/// CGR prefixes from one origin, kept as the layers of their geodesic DAG.
///
/// A geodesic path of length `k` from `x` extends to a geodesic to a target
/// exactly when its endpoint does, so the prefixes of length `k` are all the
/// layered paths ending in `layers[k]`, and a path's horofunction values and
/// sectors depend only on its last few vertices.
#[derive(Clone, Debug)]
pub struct PrefixSet {
    pub origin: VertexId,
    /// `layers[k]`: endpoints of prefixes of length `k`, canonical order.
    pub layers: Vec<Vec<VertexId>>,
    pub certification: Certification,
    pub rebase: Rebase,
    pub target_index: u32,
}

impl PrefixSet {
    pub fn horizon(&self) -> u32 {
        self.layers.len() as u32 - 1
    }

    /// Vertices of all prefixes inside `B(x, r)`.
    pub fn vertices_within(&self, oracle: &dyn AdjacencyOracle, r: u32) -> Vec<VertexId> {
        let mut out: Vec<VertexId> =
            self.layers[..=(r as usize).min(self.layers.len() - 1)].concat();
        sort_canonical(oracle, &mut out);
        out
    }

    fn successors(&self, oracle: &dyn AdjacencyOracle, v: VertexId, k: usize) -> Vec<VertexId> {
        let next = &self.layers[k + 1];
        let mut out: Vec<VertexId> = oracle
            .neighbors(v)
            .into_iter()
            .filter(|w| next.contains(w))
            .collect();
        sort_canonical(oracle, &mut out);
        out
    }

    /// Layered paths from `start` (at depth `from`) down to depth `to`, in
    /// lexicographic canonical order.
    fn paths_between(
        &self,
        oracle: &dyn AdjacencyOracle,
        start: VertexId,
        from: usize,
        to: usize,
        cap: usize,
    ) -> Result<Vec<Vec<VertexId>>> {
        let mut out = Vec::new();
        let mut stack = vec![(vec![start], from)];
        while let Some((path, k)) = stack.pop() {
            if k == to {
                if out.len() >= cap {
                    return Err(Error::TooManyPrefixes(cap));
                }
                out.push(path);
                continue;
            }
            let last = *path.last().expect("nonempty");
            for w in self.successors(oracle, last, k).into_iter().rev() {
                let mut p = path.clone();
                p.push(w);
                stack.push((p, k + 1));
            }
        }
        Ok(out)
    }

    /// Every prefix of length `len`, in lexicographic canonical order.
    pub fn prefixes(
        &self,
        oracle: &dyn AdjacencyOracle,
        len: u32,
        cap: usize,
    ) -> Result<Vec<CgrPrefix>> {
        let len = (len as usize).min(self.layers.len() - 1);
        Ok(self
            .paths_between(oracle, self.origin, 0, len, cap)?
            .into_iter()
            .map(|vertices| CgrPrefix {
                vertices,
                target_index: self.target_index,
            })
            .collect())
    }

    /// The last `s + 1` vertices of every full-length prefix, in
    /// lexicographic canonical order.
    pub fn tails(
        &self,
        oracle: &dyn AdjacencyOracle,
        s: u32,
        cap: usize,
    ) -> Result<Vec<Vec<VertexId>>> {
        let h = self.layers.len() - 1;
        let from = h - (s as usize).min(h);
        let mut out = Vec::new();
        for &v in &self.layers[from] {
            out.extend(self.paths_between(oracle, v, from, h, cap)?);
            if out.len() > cap {
                return Err(Error::TooManyPrefixes(cap));
            }
        }
        Ok(out)
    }

    /// The least full-length prefix ending with `tail`.
    pub fn completion(&self, space: &Space, tail: &[VertexId]) -> Result<CgrPrefix> {
        let oracle = space.oracle();
        let from = self.layers.len() - tail.len();
        let goal = tail[0];
        let mut vertices = vec![self.origin];
        for k in 0..from {
            let last = *vertices.last().expect("nonempty");
            let remaining = (from - k - 1) as u32;
            let mut next = None;
            for w in self.successors(oracle, last, k) {
                if space.dist(w, goal)? == remaining {
                    next = Some(w);
                    break;
                }
            }
            vertices.push(next.ok_or_else(|| Error::NotGeodesic(k + 1))?);
        }
        vertices.extend_from_slice(&tail[1..]);
        Ok(CgrPrefix {
            vertices,
            target_index: self.target_index,
        })
    }
}

pub(crate) fn cmp_sequences(
    oracle: &dyn AdjacencyOracle,
    a: &[VertexId],
    b: &[VertexId],
) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match oracle.canonical_cmp(*x, *y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

/// Length of the reference ray needed to re-base at `x` for horizon `h`.
fn ray_length(space: &Space, x: VertexId, ray: &RaySpec, h: &Horizon) -> Result<u32> {
    let offset = space.dist(x, ray.origin)?;
    Ok(h.h + 2 * h.s + offset + 2 * space.delta.unwrap_or(0) + 2)
}

/// Re-bases `ray` at `x` for horizon `h`.
pub fn rebase(space: &Space, x: VertexId, ray: &RaySpec, h: &Horizon) -> Result<Rebase> {
    let len = ray_length(space, x, ray, h)?;
    let vertices = ray.vertices(space, len)?;
    rebase_path(space, x, &vertices, h.s)
}

fn certify_target(space: &Space, x: VertexId, t: VertexId) -> Result<u32> {
    space.dist(t, x).map_err(|e| match e {
        Error::Uncertified(..) | Error::OutsideWindow(_) => {
            Error::HorizonTooSmall(format!("target {} is not certified", space.label(t)))
        }
        other => other,
    })
}

/// Layers `0..=len` of the geodesics of length `len + extension` from `x` to
/// the fellow-travel corridor `B(r, 2δ)` around the re-based ray.
fn layers_at(
    space: &Space,
    x: VertexId,
    base: &Rebase,
    len: u32,
    extension: u32,
) -> Result<Vec<Vec<VertexId>>> {
    let oracle = space.oracle();
    let reach = len + extension;
    let center = base.at_distance(reach)?;
    let corridor = space.delta.unwrap_or(0) * 2;
    let mut targets = Vec::new();
    for t in ball(oracle, center, corridor) {
        if certify_target(space, x, t)? == reach {
            targets.push(t);
        }
    }
    let mut layers = vec![vec![x]];
    for k in 0..len {
        let remaining = reach - k - 1;
        let mut next = Vec::new();
        for &v in &layers[k as usize] {
            for w in oracle.neighbors(v) {
                if next.contains(&w) || space.dist(w, x)? != k + 1 {
                    continue;
                }
                for &t in &targets {
                    if space.dist(w, t)? == remaining {
                        next.push(w);
                        break;
                    }
                }
            }
        }
        sort_canonical(oracle, &mut next);
        layers.push(next);
    }
    Ok(layers)
}

/// CGR prefixes of length `H` from `x` toward the boundary point, tagged
/// `StableObserved` when their `R`-truncations agree for every horizon in
/// `H-S..=H`.
pub fn enumerate_cgr_prefixes(
    space: &Space,
    x: VertexId,
    ray: &RaySpec,
    h: &Horizon,
) -> Result<PrefixSet> {
    let base = rebase(space, x, ray, h)?;
    let runs: Vec<Result<Vec<Vec<VertexId>>>> = (h.h - h.s..=h.h)
        .into_par_iter()
        .map(|len| layers_at(space, x, &base, len, h.s))
        .collect();
    let mut runs: Vec<Vec<Vec<VertexId>>> = runs.into_iter().collect::<Result<_>>()?;
    // The truncated prefix sets agree iff their endpoint layers at R do;
    // when R > H-S the shortest run stops earlier and that depth is compared.
    let r = h.r.min(h.h - h.s) as usize;
    let reference = &runs[0][r];
    for run in &runs[1..] {
        if run[r] != *reference {
            return Err(Error::Unstable(format!(
                "CGR prefixes from {} within radius {} change with the horizon",
                space.label(x),
                h.r
            )));
        }
    }
    let target_index = (h.h as i64 + h.s as i64 - base.shift).max(0) as u32;
    Ok(PrefixSet {
        origin: x,
        layers: runs.pop().unwrap_or_default(),
        certification: Certification::StableObserved {
            n0: h.h - h.s,
            horizon: h.h,
        },
        rebase: base,
        target_index,
    })
}

/// Vertices within `B(x,R)` on the enumerated CGR prefixes from `x`; `Exact`
/// when a family closed form exists and agrees.
pub fn geo_window(space: &Space, x: VertexId, ray: &RaySpec, h: &Horizon) -> Result<CertifiedSet> {
    let set = enumerate_cgr_prefixes(space, x, ray, h)?;
    let vertices = set.vertices_within(space.oracle(), h.r);
    let certification = match exact_geo_for(space, x, ray, h.r) {
        Some(exact) if exact.vertices == vertices => Certification::Exact,
        _ => set.certification,
    };
    Ok(CertifiedSet {
        vertices,
        certification,
    })
}

/// The family's closed-form Geo for this ray, when one applies.
pub fn exact_geo_for(
    space: &Space,
    x: VertexId,
    ray: &RaySpec,
    radius: u32,
) -> Option<CertifiedSet> {
    use crate::families::{exact_geo, NamedBoundaryPoint};
    let spec = space.spec.as_ref()?;
    let point = match &ray.kind {
        RayKind::Named(tag) => NamedBoundaryPoint::Tag(tag.clone()),
        RayKind::Periodic { prefix, period } => {
            if ray.origin != space.oracle().base_point() {
                // Translated rays: prepend the origin's word.
                let cayley = space.oracle().cayley()?;
                let mut word = cayley.normal_form(ray.origin, &space.order);
                word.extend(&prefix.0);
                NamedBoundaryPoint::Periodic {
                    prefix: reduce_letters(&word),
                    period: period.0.clone(),
                }
            } else {
                NamedBoundaryPoint::Periodic {
                    prefix: prefix.0.clone(),
                    period: period.0.clone(),
                }
            }
        }
    };
    exact_geo(spec, space.oracle(), x, &point, radius).ok()
}

fn reduce_letters(word: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::new();
    for &l in word {
        if out.last() == Some(&(l ^ 1)) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct FellowTravelReport {
    pub origin: String,
    /// Number of distinct prefix endpoints at depth `H`.
    pub endpoints: usize,
    pub max_deviation: u32,
    pub bound: u32,
    pub pass: bool,
}

/// Largest `d(x_n, x'_n)` over pairs of enumerated prefixes from `x`, against
/// the bound `2δ`. Any two vertices of a layer lie on a pair of prefixes, so
/// this is the largest layer diameter.
pub fn fellow_travel_audit(
    space: &Space,
    x: VertexId,
    ray: &RaySpec,
    h: &Horizon,
    delta: u32,
) -> Result<FellowTravelReport> {
    let set = enumerate_cgr_prefixes(space, x, ray, h)?;
    let widths: Vec<Result<u32>> = set
        .layers
        .par_iter()
        .map(|layer| {
            let mut worst = 0;
            for (i, &a) in layer.iter().enumerate() {
                for &b in &layer[i + 1..] {
                    worst = worst.max(space.dist(a, b)?);
                }
            }
            Ok(worst)
        })
        .collect();
    let max_deviation = widths
        .into_iter()
        .try_fold(0, |acc, r| r.map(|d| acc.max(d)))?;
    Ok(FellowTravelReport {
        origin: space.label(x),
        endpoints: set.layers.last().map_or(0, Vec::len),
        max_deviation,
        bound: 2 * delta,
        pass: max_deviation <= 2 * delta,
    })
}
