//! Persistent type strings `s_n`, their base points `T_n`, the least base
//! point `g_n`, the normalised sets `H_n`, and the orbit audit built on them.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::graph::{ball, path_type, shortlex_cmp, sort_canonical, PathType, VertexId};
use crate::horo::Bundle;
use crate::rays::{enumerate_cgr_prefixes, Horizon};
use crate::{Error, Result};

/// Finite stand-in for "occurs infinitely often": a type needs witnesses in
/// every dyadic depth band `[D·2^j, D·2^(j+1))` that fits inside `[0, R]`,
/// and at least `min_witnesses` of them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct InfinitudeProxy {
    pub depth_threshold: u32,
    pub min_witnesses: usize,
}

impl Default for InfinitudeProxy {
    fn default() -> Self {
        Self {
            depth_threshold: 2,
            min_witnesses: 2,
        }
    }
}

impl InfinitudeProxy {
    /// Dyadic bands `[lo, hi)` inside `[0, radius]`.
    pub fn bands(&self, radius: u32) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        let mut lo = self.depth_threshold.max(1);
        while 2 * lo <= radius + 1 {
            out.push((lo, 2 * lo));
            lo *= 2;
        }
        out
    }

    pub fn accepts(&self, depths: &[u32], radius: u32) -> bool {
        let bands = self.bands(radius);
        !bands.is_empty()
            && depths.len() >= self.min_witnesses
            && bands
                .iter()
                .all(|&(lo, hi)| depths.iter().any(|&d| lo <= d && d < hi))
    }
}

/// `C^η` restricted to base points in `Geo₁(e,η) ∩ B(e,R)` and types of
/// length `n`.
pub fn c_eta_window(bundle: &Bundle, n: u32) -> Result<Vec<(VertexId, PathType)>> {
    let space = bundle.space();
    let e = space.oracle().base_point();
    let h = bundle.horizon();
    let local = Horizon {
        h: h.h,
        r: n.max(1),
        s: h.s,
    };
    let mut out = Vec::new();
    for g in bundle.geo1_window(e)?.vertices {
        let set = enumerate_cgr_prefixes(space, g, bundle.ray(), &local)?;
        let mut types: Vec<PathType> = set
            .prefixes(space.oracle(), n, space.prefix_cap)?
            .iter()
            .map(|p| path_type(space.oracle(), &p.vertices[..=n as usize]))
            .collect::<Result<_>>()?;
        types.sort();
        types.dedup();
        out.extend(types.into_iter().map(|t| (g, t)));
    }
    Ok(out)
}

/// A chosen `s_n` with the depths of its witnesses.
#[derive(Clone, Debug, Serialize)]
pub struct TypeChoice {
    pub s_n: PathType,
    pub witness_depths: Vec<u32>,
}

/// Least type of length `n` accepted by the proxy.
pub fn s_eta_n(bundle: &Bundle, n: u32, proxy: &InfinitudeProxy) -> Result<TypeChoice> {
    let pairs = c_eta_window(bundle, n)?;
    choose_type(bundle, &pairs, n, proxy)
}

fn choose_type(
    bundle: &Bundle,
    pairs: &[(VertexId, PathType)],
    n: u32,
    proxy: &InfinitudeProxy,
) -> Result<TypeChoice> {
    if n == 0 {
        return Ok(TypeChoice {
            s_n: PathType::default(),
            witness_depths: Vec::new(),
        });
    }
    let space = bundle.space();
    let e = space.oracle().base_point();
    let mut depths: BTreeMap<&PathType, Vec<u32>> = BTreeMap::new();
    for (g, t) in pairs {
        depths.entry(t).or_default().push(space.dist(*g, e)?);
    }
    let r = bundle.horizon().r;
    depths
        .into_iter()
        .filter(|(_, d)| proxy.accepts(d, r))
        .min_by(|a, b| a.0.cmp_by(b.0, &space.order))
        .map(|(t, mut d)| {
            d.sort_unstable();
            TypeChoice {
                s_n: t.clone(),
                witness_depths: d,
            }
        })
        .ok_or(Error::NoCandidate(n as usize))
}

#[derive(Clone, Debug, Serialize)]
pub struct EndgameRow {
    pub n: u32,
    pub s_n: PathType,
    pub t_n: Vec<VertexId>,
    pub g_n: VertexId,
    pub k_n: u32,
    pub h_n: Vec<VertexId>,
    pub witness_depths: Vec<u32>,
}

/// `T_n`, `g_n`, `k_n` and `H_n` for index `n`.
pub fn t_g_k_h(bundle: &Bundle, n: u32, proxy: &InfinitudeProxy) -> Result<EndgameRow> {
    let space = bundle.space();
    let oracle = space.oracle();
    let cayley = oracle.cayley().ok_or(Error::NotCayley)?;
    let pairs = c_eta_window(bundle, n)?;
    let choice = choose_type(bundle, &pairs, n, proxy)?;
    let mut t_n: Vec<VertexId> = pairs
        .iter()
        .filter(|(_, t)| *t == choice.s_n)
        .map(|(g, _)| *g)
        .collect();
    t_n.sort_by(|a, b| shortlex_cmp(oracle, *a, *b, &space.order).expect("Cayley family"));
    t_n.dedup();
    let g_n = *t_n.first().ok_or(Error::NoCandidate(n as usize))?;
    let inv = cayley.inverse(g_n);
    let mut h_n: Vec<VertexId> = t_n.iter().map(|&t| cayley.multiply(inv, t)).collect();
    sort_canonical(oracle, &mut h_n);
    Ok(EndgameRow {
        n,
        s_n: choice.s_n,
        k_n: space.dist(g_n, cayley.identity())?,
        t_n,
        g_n,
        h_n,
        witness_depths: choice.witness_depths,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct EndgameState {
    pub rows: Vec<EndgameRow>,
    pub proxy: InfinitudeProxy,
}

impl EndgameState {
    /// Rows `0..=n_max`; `n_max` defaults to `R/4`.
    pub fn compute(bundle: &Bundle, n_max: Option<u32>, proxy: InfinitudeProxy) -> Result<Self> {
        bundle.space().oracle().cayley().ok_or(Error::NotCayley)?;
        let n_max = n_max.unwrap_or(bundle.horizon().r / 4);
        let rows = (0..=n_max)
            .into_par_iter()
            .map(|n| t_g_k_h(bundle, n, &proxy))
            .collect::<Result<_>>()?;
        Ok(Self { rows, proxy })
    }

    /// Prefix coherence, monotone `k_n`, and `e ∈ H_n`.
    pub fn violations(&self, identity: VertexId) -> Vec<String> {
        let mut out = Vec::new();
        for w in self.rows.windows(2) {
            if !w[0].s_n.is_prefix_of(&w[1].s_n) {
                out.push(format!("s_{} is not a prefix of s_{}", w[0].n, w[1].n));
            }
            if w[1].k_n < w[0].k_n {
                out.push(format!("k_{} < k_{}", w[1].n, w[0].n));
            }
        }
        for row in &self.rows {
            if !row.h_n.contains(&identity) {
                out.push(format!("e is missing from H_{}", row.n));
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ZVerdict {
    #[serde(rename = "LIKELY-Z")]
    LikelyZ,
    #[serde(rename = "LIKELY-NOT-Z")]
    LikelyNotZ,
    #[serde(rename = "INCONCLUSIVE")]
    Inconclusive,
}

impl std::fmt::Display for ZVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::LikelyZ => "LIKELY-Z",
            Self::LikelyNotZ => "LIKELY-NOT-Z",
            Self::Inconclusive => "INCONCLUSIVE",
        })
    }
}

/// Reads the trend of `k_n` over the second half of the rows: constant means
/// some base point persists; a slope of at least `slope` means it escapes.
pub fn z_heuristic(state: &EndgameState, slope: f64) -> ZVerdict {
    let tail = &state.rows[state.rows.len() / 2..];
    let (Some(first), Some(last)) = (tail.first(), tail.last()) else {
        return ZVerdict::Inconclusive;
    };
    if tail.len() < 2 {
        return ZVerdict::Inconclusive;
    }
    if tail.iter().all(|r| r.k_n == first.k_n) {
        return ZVerdict::LikelyZ;
    }
    let rise = (last.k_n - first.k_n.min(last.k_n)) as f64 / (last.n - first.n) as f64;
    if rise >= slope {
        ZVerdict::LikelyNotZ
    } else {
        ZVerdict::Inconclusive
    }
}

pub const DEFAULT_Z_SLOPE: f64 = 0.5;

#[derive(Clone, Debug, Serialize)]
pub struct AuditRow {
    pub n: u32,
    pub same_type: bool,
    /// Least `w` with `H_n(η) = w·H_n(θ)` on the common decidable region.
    pub witness: Option<String>,
    pub witness_length: Option<u32>,
    /// Deepest element of `g·T_n(η) Δ T_n(θ)` inside `B(e, R-|g|)`.
    pub tail_depth: Option<u32>,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct AuditPair {
    pub ray: String,
    pub g: String,
    pub translated: String,
    /// First `n` from which `g·T_n(η)` and `T_n(θ)` agree on every scanned row.
    pub threshold: Option<u32>,
    /// Z-heuristic on η. Agreement past a threshold is only required when
    /// `k_n` grows; with a persistent basepoint the sets may differ forever.
    pub z: ZVerdict,
    pub rows: Vec<AuditRow>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AuditReport {
    pub delta: u32,
    pub witness_bound: u32,
    pub pairs: Vec<AuditPair>,
    pub violations: Vec<String>,
    pub pass: bool,
}

/// For each `(η, g)` and `θ = gη`: `s_n(η) = s_n(θ)`, a translation witness
/// `w` between `H_n(η)` and `H_n(θ)` with `|w| <= 8δ`, and agreement of
/// `g·T_n(η)` with `T_n(θ)` away from the origin.
pub fn fn_class_audit(
    pairs: &[(&Bundle, &Bundle, VertexId)],
    delta: u32,
    n_max: Option<u32>,
    proxy: InfinitudeProxy,
) -> Result<AuditReport> {
    let mut out = Vec::new();
    let mut violations = Vec::new();
    for &(eta, theta, g) in pairs {
        let space = eta.space();
        let oracle = space.oracle();
        let cayley = oracle.cayley().ok_or(Error::NotCayley)?;
        let e = cayley.identity();
        let r = eta.horizon().r;
        let g_len = space.dist(g, e)?;
        let se = EndgameState::compute(eta, n_max, proxy)?;
        let st = EndgameState::compute(theta, n_max, proxy)?;
        let tag = |n: u32| {
            format!(
                "{} with g={} at n={n}",
                eta.ray().render(oracle),
                space.label(g)
            )
        };
        let inner = r.saturating_sub(g_len);
        let mut rows = Vec::new();
        for (a, b) in se.rows.iter().zip(&st.rows) {
            let mut witness = None;
            for w in ball(oracle, e, 8 * delta + 2) {
                if translates(space, a, b, w, r)? {
                    witness = Some(w);
                    break;
                }
            }
            let moved: Vec<VertexId> = a.t_n.iter().map(|&t| cayley.multiply(g, t)).collect();
            let mut tail_depth = None;
            for v in moved
                .iter()
                .filter(|v| !b.t_n.contains(v))
                .chain(b.t_n.iter().filter(|v| !moved.contains(v)))
            {
                let d = space.dist(*v, e)?;
                if d <= inner {
                    tail_depth = Some(tail_depth.map_or(d, |t: u32| t.max(d)));
                }
            }
            rows.push(AuditRow {
                n: a.n,
                same_type: a.s_n == b.s_n,
                witness: witness.map(|w| space.label(w)),
                witness_length: witness.map(|w| space.dist(w, e)).transpose()?,
                tail_depth,
                pass: false,
            });
        }
        // Rows before the threshold may differ by a finite set near `e`;
        // a difference in the outer half of the window is never excused.
        let threshold = rows
            .iter()
            .rposition(|row| row.tail_depth.is_some())
            .map_or(Some(0), |i| rows.get(i + 1).map(|row| row.n));
        let z = z_heuristic(&se, DEFAULT_Z_SLOPE);
        let last_n = rows.last().map_or(0, |row| row.n);
        if threshold.is_none() && z != ZVerdict::LikelyZ {
            violations.push(format!(
                "{} with g={}: g·T_n and T_n(gη) never agree up to n={last_n}",
                eta.ray().render(oracle),
                space.label(g),
            ));
        }
        for row in &mut rows {
            // Without a threshold the tail half, as in the Z-heuristic.
            let stable = row.n >= threshold.unwrap_or(last_n - last_n / 2);
            let witness_ok = match row.witness_length {
                Some(l) => l <= 8 * delta,
                None => !stable,
            };
            let tail_ok = row.tail_depth.is_none_or(|d| 2 * d <= inner);
            if !row.same_type {
                violations.push(format!("{}: s_n differs", tag(row.n)));
            }
            if !witness_ok {
                violations.push(format!("{}: no witness within 8δ", tag(row.n)));
            }
            if !tail_ok {
                violations.push(format!("{}: g·T_n and T_n(gη) differ far out", tag(row.n)));
            }
            row.pass = row.same_type && witness_ok && tail_ok;
        }
        out.push(AuditPair {
            ray: eta.ray().render(oracle),
            g: space.label(g),
            translated: theta.ray().render(oracle),
            threshold,
            z,
            rows,
        });
    }
    Ok(AuditReport {
        delta,
        witness_bound: 8 * delta,
        pass: violations.is_empty(),
        pairs: out,
        violations,
    })
}

/// `H_n(η) = w·H_n(θ)` on the elements both windows decide: `k` with
/// `|g^η k| <= R` and `|g^θ w⁻¹ k| <= R`.
fn translates(
    space: &crate::space::Space,
    a: &EndgameRow,
    b: &EndgameRow,
    w: VertexId,
    r: u32,
) -> Result<bool> {
    let cayley = space.oracle().cayley().ok_or(Error::NotCayley)?;
    let e = cayley.identity();
    let w_inv = cayley.inverse(w);
    let decidable = |k: VertexId| -> Result<bool> {
        let on_eta = space.dist(cayley.multiply(a.g_n, k), e)? <= r;
        let on_theta = space.dist(cayley.multiply(b.g_n, cayley.multiply(w_inv, k)), e)? <= r;
        Ok(on_eta && on_theta)
    };
    let moved: Vec<VertexId> = b.h_n.iter().map(|&h| cayley.multiply(w, h)).collect();
    for k in a.h_n.iter().chain(&moved) {
        if decidable(*k)? && (a.h_n.contains(k) != moved.contains(k)) {
            return Ok(false);
        }
    }
    Ok(true)
}
