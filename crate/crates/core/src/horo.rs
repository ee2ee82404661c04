//! Horofunction traces, the classes `Ξ(η)`, combinatorial sectors, special
//! vertices, `Y(x,ξ)`, `Geo₁` windows and symmetric-difference verdicts.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use serde::Serialize;

use crate::certify::{Certification, CertifiedSet};
use crate::graph::{ball, interval_within, sort_canonical, VertexId};
use crate::rays::{
    cmp_sequences, enumerate_cgr_prefixes, geo_window, rebase_path, CgrPrefix, Horizon, RaySpec,
};
use crate::space::Space;
use crate::{Error, Result};

/// Values of `f_{p_n}(y) = d(p_n,y) - d(p_n,z0)` on an observation set, once
/// constant along the tail of a prefix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HoroTrace {
    pub observation: Vec<VertexId>,
    pub values: Vec<i64>,
    pub stabilized_at: u32,
    pub source: CgrPrefix,
}

impl HoroTrace {
    pub fn value(&self, y: VertexId) -> Option<i64> {
        self.observation
            .iter()
            .position(|&o| o == y)
            .map(|i| self.values[i])
    }
}

/// Values of `f_{p_n}` on `observation` along `path`, required constant
/// over the last `patience + 1` vertices. Returns the values and the first
/// index from which all of them are constant.
fn tail_values(
    space: &Space,
    path: &[VertexId],
    observation: &[VertexId],
    patience: u32,
) -> Result<(Vec<i64>, usize)> {
    let z0 = space.oracle().base_point();
    let last = path.len() - 1;
    let f = |n: usize, y: VertexId| -> Result<i64> {
        let p = path[n];
        Ok(space.dist(p, y)? as i64 - space.dist(p, z0)? as i64)
    };
    let mut values = Vec::with_capacity(observation.len());
    let mut stable_from = 0;
    for &y in observation {
        let v = f(last, y)?;
        let mut n = last;
        while n > 0 && f(n - 1, y)? == v {
            n -= 1;
        }
        if last - n < patience as usize {
            return Err(Error::Unstable(format!(
                "horofunction value at {} still changing at index {}",
                space.label(y),
                n
            )));
        }
        stable_from = stable_from.max(n);
        values.push(v);
    }
    Ok((values, stable_from))
}

/// Trace of `prefix` on `observation`: each value must be constant for the
/// last `S` indices.
pub fn horotrace_of_prefix(
    space: &Space,
    prefix: &CgrPrefix,
    observation: &[VertexId],
    h: &Horizon,
) -> Result<HoroTrace> {
    if prefix.len() < h.s as usize {
        return Err(Error::HorizonTooSmall(format!(
            "prefix of length {} is shorter than the patience {}",
            prefix.len(),
            h.s
        )));
    }
    let (values, stable_from) = tail_values(space, &prefix.vertices, observation, h.s)?;
    Ok(HoroTrace {
        observation: observation.to_vec(),
        values,
        stabilized_at: stable_from as u32,
        source: prefix.clone(),
    })
}

/// One element of `Ξ(η)`: a trace shared by a group of prefixes from `z0`.
#[derive(Clone, Debug, Serialize)]
pub struct XiClass {
    pub id: usize,
    pub trace: HoroTrace,
    pub representative: CgrPrefix,
    /// How many prefix tails from `z0` share this trace.
    pub members: usize,
}

impl XiClass {
    pub fn name(&self) -> String {
        format!("xi{}", self.id)
    }
}

/// Reach of the default observation set beyond `4δ`.
pub const DEFAULT_OBSERVATION_REACH: u32 = 2;

/// Default observation set `B(z0, 4δ + reach)`.
pub fn default_observation(space: &Space, reach: u32) -> Vec<VertexId> {
    let d = space.delta.unwrap_or(0);
    ball(space.oracle(), space.oracle().base_point(), 4 * d + reach)
}

/// Largest `|B(v, 2δ)|` over `v ∈ B(z0, radius)`. Cayley graphs are
/// vertex-transitive, so one ball suffices there.
pub fn class_bound(space: &Space, delta: u32, radius: u32) -> usize {
    let oracle = space.oracle();
    let z0 = oracle.base_point();
    if oracle.cayley().is_some() {
        return ball(oracle, z0, 2 * delta).len();
    }
    ball(oracle, z0, radius)
        .into_iter()
        .map(|v| ball(oracle, v, 2 * delta).len())
        .max()
        .unwrap_or(1)
}

/// Groups the stable CGR prefixes from `z0` by trace on `observation`.
pub fn enumerate_xi(
    space: &Space,
    ray: &RaySpec,
    observation: &[VertexId],
    h: &Horizon,
) -> Result<(Vec<XiClass>, Certification)> {
    let delta = space.delta()?;
    let z0 = space.oracle().base_point();
    let set = enumerate_cgr_prefixes(space, z0, ray, h)?;
    // Traces only see the last S+1 vertices, so prefixes are grouped by tail.
    let first = (h.h - h.s) as usize;
    let mut groups: Vec<(Vec<i64>, Vec<VertexId>, usize, usize)> = Vec::new();
    for tail in set.tails(space.oracle(), h.s, space.prefix_cap)? {
        let (values, from) = match tail_values(space, &tail, observation, h.s) {
            Ok(t) => t,
            Err(Error::Unstable(_)) => continue,
            Err(e) => return Err(e),
        };
        match groups.iter_mut().find(|g| g.0 == values) {
            Some(g) => g.2 += 1,
            None => groups.push((values, tail, 1, first + from)),
        }
    }
    if groups.is_empty() {
        return Err(Error::Unstable(
            "no CGR prefix from the base point has a stable trace".into(),
        ));
    }
    let bound = class_bound(space, delta, h.r);
    if groups.len() > bound {
        return Err(Error::TooManyClasses {
            found: groups.len(),
            bound,
        });
    }
    let mut classes = Vec::with_capacity(groups.len());
    for (values, tail, members, stabilized_at) in groups {
        let representative = set.completion(space, &tail)?;
        classes.push(XiClass {
            id: 0,
            trace: HoroTrace {
                observation: observation.to_vec(),
                values,
                stabilized_at: stabilized_at as u32,
                source: representative.clone(),
            },
            representative,
            members,
        });
    }
    classes.sort_by(|a, b| {
        cmp_sequences(
            space.oracle(),
            &a.representative.vertices,
            &b.representative.vertices,
        )
    });
    for (id, c) in classes.iter_mut().enumerate() {
        c.id = id;
    }
    Ok((classes, set.certification))
}

/// `Q(x,ξ) ∩ B(x,R)`.
#[derive(Clone, Debug, Serialize)]
pub struct SectorWindow {
    pub base: VertexId,
    pub xi: usize,
    pub vertices: Vec<VertexId>,
    pub certification: Certification,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpecialVerdict {
    pub pass: bool,
    /// `ξ_{x,η}` when special.
    pub class: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub pass: bool,
    pub certification: Certification,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SymdiffMode {
    Geo,
    Geo1,
}

impl std::str::FromStr for SymdiffMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "geo" => Ok(Self::Geo),
            "geo1" => Ok(Self::Geo1),
            _ => Err(Error::Parse(format!("mode must be geo or geo1, got `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SymdiffRow {
    #[serde(rename = "R")]
    pub radius: u32,
    /// `Δ` is compared inside `B(z0, region)`.
    pub region: u32,
    pub elements: Vec<String>,
    pub max_depth: u32,
    pub bounded: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SymdiffVerdict {
    #[serde(rename = "BOUNDED")]
    Bounded,
    #[serde(rename = "UNBOUNDED-TREND")]
    UnboundedTrend,
}

impl std::fmt::Display for SymdiffVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Bounded => "BOUNDED",
            Self::UnboundedTrend => "UNBOUNDED-TREND",
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SymdiffReport {
    pub mode: SymdiffMode,
    pub x: String,
    pub y: String,
    pub rows: Vec<SymdiffRow>,
    pub verdict: SymdiffVerdict,
}

type SectorKey = (VertexId, usize, u32);

/// `Ξ(η)` for one boundary point and horizon, with sector and
/// special-vertex caches. All horofunction-level constructions go through it.
pub struct Bundle<'s> {
    space: &'s Space,
    ray: RaySpec,
    h: Horizon,
    observation: Vec<VertexId>,
    classes: Vec<XiClass>,
    class_certification: Certification,
    sectors: Mutex<HashMap<SectorKey, Arc<Vec<VertexId>>>>,
    specials: Mutex<HashMap<VertexId, SpecialVerdict>>,
}

impl<'s> Bundle<'s> {
    /// Uses [`default_observation`] with reach [`DEFAULT_OBSERVATION_REACH`].
    pub fn new(space: &'s Space, ray: RaySpec, h: Horizon) -> Result<Self> {
        let observation = default_observation(space, DEFAULT_OBSERVATION_REACH);
        Self::with_observation(space, ray, h, observation)
    }

    pub fn with_observation(
        space: &'s Space,
        ray: RaySpec,
        h: Horizon,
        observation: Vec<VertexId>,
    ) -> Result<Self> {
        let (classes, class_certification) = enumerate_xi(space, &ray, &observation, &h)?;
        Ok(Self {
            space,
            ray,
            h,
            observation,
            classes,
            class_certification,
            sectors: Mutex::new(HashMap::new()),
            specials: Mutex::new(HashMap::new()),
        })
    }

    /// The same boundary point at radius `r`.
    pub fn with_radius(&self, r: u32) -> Result<Bundle<'s>> {
        Bundle::with_observation(
            self.space,
            self.ray.clone(),
            self.h.with_radius(r),
            self.observation.clone(),
        )
    }

    pub fn space(&self) -> &'s Space {
        self.space
    }

    pub fn ray(&self) -> &RaySpec {
        &self.ray
    }

    pub fn horizon(&self) -> Horizon {
        self.h
    }

    pub fn observation(&self) -> &[VertexId] {
        &self.observation
    }

    pub fn classes(&self) -> &[XiClass] {
        &self.classes
    }

    pub fn class_certification(&self) -> Certification {
        self.class_certification
    }

    fn class(&self, xi: usize) -> Result<&XiClass> {
        self.classes
            .get(xi)
            .ok_or_else(|| Error::Parse(format!("no class xi{xi}")))
    }

    fn sector_certification(&self) -> Certification {
        self.class_certification
            .weakest(Certification::StableObserved {
                n0: self.h.h - self.h.s,
                horizon: self.h.h,
            })
    }

    /// `Q(x,ξ) ∩ B(x,depth)`: the intervals from `x` to the tail of the
    /// representative re-based at `x`, constant over the last `S` indices.
    fn sector_to_depth(&self, x: VertexId, xi: usize, depth: u32) -> Result<Arc<Vec<VertexId>>> {
        let key = (x, xi, depth);
        if let Some(s) = self.sectors.lock().expect("sector cache").get(&key) {
            return Ok(s.clone());
        }
        let rep = &self.class(xi)?.representative;
        let base = rebase_path(self.space, x, &rep.vertices, self.h.s).map_err(|e| match e {
            Error::Unstable(msg) => Error::NoConvergentRay(msg),
            other => other,
        })?;
        let metric = self.space.metric();
        let last = rep.len();
        // The re-based tail covers at least the last S indices.
        debug_assert!(base.anchor as usize + self.h.s as usize <= last);
        let first = last - self.h.s as usize;
        let sector = interval_within(metric, x, rep.vertices[last], depth)?;
        for n in first..last {
            if interval_within(metric, x, rep.vertices[n], depth)? != sector {
                return Err(Error::Unstable(format!(
                    "sector of xi{xi} at {} changes with the horizon",
                    self.space.label(x)
                )));
            }
        }
        let sector = Arc::new(sector);
        self.sectors
            .lock()
            .expect("sector cache")
            .insert(key, sector.clone());
        Ok(sector)
    }

    /// `Q(x,ξ) ∩ B(x,R)`.
    pub fn sector_window(&self, x: VertexId, xi: usize) -> Result<SectorWindow> {
        Ok(SectorWindow {
            base: x,
            xi,
            vertices: self.sector_to_depth(x, xi, self.h.r)?.to_vec(),
            certification: self.sector_certification(),
        })
    }

    /// `Q(y,ξ) ∩ B(x,R)`.
    pub fn sector_seen_from(&self, x: VertexId, y: VertexId, xi: usize) -> Result<Vec<VertexId>> {
        let offset = self.space.dist(x, y)?;
        let sector = self.sector_to_depth(y, xi, self.h.r + offset)?;
        let mut out = Vec::new();
        for &v in sector.iter() {
            if self.space.dist(v, x)? <= self.h.r {
                out.push(v);
            }
        }
        Ok(out)
    }

    /// `ξ(y)` on the observation set.
    pub fn xi_value(&self, xi: usize, y: VertexId) -> Result<i64> {
        self.class(xi)?
            .trace
            .value(y)
            .ok_or_else(|| Error::OutsideObservationSet(self.space.label(y)))
    }

    /// `dist(x,a) + ξ(a) - ξ(x)`.
    pub fn dist_x_xi(&self, x: VertexId, xi: usize, a: VertexId) -> Result<u32> {
        let value = self.space.dist(x, a)? as i64 + self.xi_value(xi, a)? - self.xi_value(xi, x)?;
        Ok(value.max(0) as u32)
    }

    /// Whether every vertex of the prefix inside `B(x,R)` lies in every
    /// sector at its origin.
    pub fn is_straight_prefix(&self, prefix: &CgrPrefix) -> Result<Verdict> {
        let x = prefix.origin();
        let head = &prefix.vertices[..=prefix.len().min(self.h.r as usize)];
        let mut pass = true;
        for xi in 0..self.classes.len() {
            let sector = self.sector_to_depth(x, xi, self.h.r)?;
            pass &= head
                .iter()
                .all(|v| sector.binary_search_by(|s| self.cmp(*s, *v)).is_ok());
        }
        Ok(Verdict {
            pass,
            certification: self.sector_certification(),
        })
    }

    fn cmp(&self, a: VertexId, b: VertexId) -> std::cmp::Ordering {
        self.space.oracle().canonical_cmp(a, b)
    }

    /// Vertices common to every sector at `x`, inside `B(x,R)`.
    pub fn sector_intersection(&self, x: VertexId) -> Result<Vec<VertexId>> {
        let mut common: Option<Vec<VertexId>> = None;
        for xi in 0..self.classes.len() {
            let sector = self.sector_to_depth(x, xi, self.h.r)?;
            common = Some(match common {
                None => sector.to_vec(),
                Some(c) => c.into_iter().filter(|v| sector.contains(v)).collect(),
            });
        }
        Ok(common.unwrap_or_default())
    }

    /// `x` is special when the sector intersection still holds a geodesic
    /// of length `R` from `x`; its class is the one whose sector is exactly
    /// that intersection.
    pub fn is_special(&self, x: VertexId) -> Result<SpecialVerdict> {
        if let Some(v) = self.specials.lock().expect("special cache").get(&x) {
            return Ok(v.clone());
        }
        let common = self.sector_intersection(x)?;
        let oracle = self.space.oracle();
        let mut layer = vec![x];
        for k in 0..self.h.r {
            let mut next = Vec::new();
            for &u in &layer {
                for w in oracle.neighbors(u) {
                    if common.contains(&w) && !next.contains(&w) && self.space.dist(w, x)? == k + 1
                    {
                        next.push(w);
                    }
                }
            }
            layer = next;
            if layer.is_empty() {
                break;
            }
        }
        let verdict = if layer.is_empty() {
            SpecialVerdict {
                pass: false,
                class: None,
            }
        } else {
            let mut matching = Vec::new();
            for xi in 0..self.classes.len() {
                if *self.sector_to_depth(x, xi, self.h.r)? == common {
                    matching.push(xi);
                }
            }
            match matching.as_slice() {
                [xi] => SpecialVerdict {
                    pass: true,
                    class: Some(*xi),
                },
                [] => {
                    return Err(Error::Unstable(format!(
                        "no sector at {} equals the intersection; widen the observation set",
                        self.space.label(x)
                    )))
                }
                _ => {
                    return Err(Error::Unstable(format!(
                        "several classes share the sector at {}; widen the observation set",
                        self.space.label(x)
                    )))
                }
            }
        };
        self.specials
            .lock()
            .expect("special cache")
            .insert(x, verdict.clone());
        Ok(verdict)
    }

    /// `Y(x,ξ)`: the closest special vertices of class `ξ` in `Geo(x,η)`,
    /// ties kept.
    pub fn y_set(&self, x: VertexId, xi: usize) -> Result<Vec<VertexId>> {
        self.class(xi)?;
        let geo = geo_window(self.space, x, &self.ray, &self.h)?;
        let mut levels: BTreeMap<u32, Vec<VertexId>> = BTreeMap::new();
        for &v in &geo.vertices {
            levels.entry(self.space.dist(v, x)?).or_default().push(v);
        }
        for level in levels.values() {
            let mut found = Vec::new();
            for &v in level {
                if self.is_special(v)?.class == Some(xi) {
                    found.push(v);
                }
            }
            if !found.is_empty() {
                return Ok(found);
            }
        }
        Err(Error::NotFoundWithinWindow(format!(
            "no special vertex of class xi{xi} within {} of {}",
            self.h.r,
            self.space.label(x)
        )))
    }

    /// `Geo₁(x,η) ∩ B(x,R)`.
    pub fn geo1_window(&self, x: VertexId) -> Result<CertifiedSet> {
        let mut vertices = Vec::new();
        for xi in 0..self.classes.len() {
            for y in self.y_set(x, xi)? {
                vertices.extend(self.sector_seen_from(x, y, xi)?);
            }
        }
        sort_canonical(self.space.oracle(), &mut vertices);
        Ok(CertifiedSet {
            vertices,
            certification: self.sector_certification(),
        })
    }

    fn window_set(&self, x: VertexId, mode: SymdiffMode) -> Result<Vec<VertexId>> {
        Ok(match mode {
            SymdiffMode::Geo => geo_window(self.space, x, &self.ray, &self.h)?.vertices,
            SymdiffMode::Geo1 => self.geo1_window(x)?.vertices,
        })
    }

    /// `Geo(x) Δ Geo(y)` or `Geo₁(x) Δ Geo₁(y)` over increasing radii.
    ///
    /// At radius `R'` both windows cover `B(z0, R' - max(|x|, |y|))`, where
    /// `Δ` is compared. A radius is bounded when no element of `Δ` reaches
    /// the outer half of the window (`2|v| > R'`); the verdict is bounded
    /// when every radius is and the deepest element stays put.
    pub fn symdiff_report(
        &self,
        x: VertexId,
        y: VertexId,
        mode: SymdiffMode,
        radii: &[u32],
    ) -> Result<SymdiffReport> {
        let space = self.space;
        let z0 = space.oracle().base_point();
        let offset = space.dist(x, z0)?.max(space.dist(y, z0)?);
        let mut rows = Vec::new();
        for &r in radii {
            let region = r.saturating_sub(offset);
            let bundle = if r == self.h.r {
                None
            } else {
                Some(self.with_radius(r)?)
            };
            let b = bundle.as_ref().unwrap_or(self);
            let a = b.window_set(x, mode)?;
            let c = b.window_set(y, mode)?;
            let mut delta: Vec<VertexId> = a
                .iter()
                .filter(|v| !c.contains(v))
                .chain(c.iter().filter(|v| !a.contains(v)))
                .copied()
                .collect();
            sort_canonical(space.oracle(), &mut delta);
            let mut elements = Vec::new();
            let mut max_depth = 0;
            let mut bounded = true;
            for v in delta {
                let depth = space.dist(v, z0)?;
                if depth > region {
                    continue;
                }
                max_depth = max_depth.max(depth);
                bounded &= 2 * depth <= r;
                elements.push(space.label(v));
            }
            rows.push(SymdiffRow {
                radius: r,
                region,
                elements,
                max_depth,
                bounded,
            });
        }
        let steady = rows.windows(2).all(|w| w[0].max_depth == w[1].max_depth);
        let verdict = if rows.iter().all(|r| r.bounded) && steady {
            SymdiffVerdict::Bounded
        } else {
            SymdiffVerdict::UnboundedTrend
        };
        Ok(SymdiffReport {
            mode,
            x: space.label(x),
            y: space.label(y),
            rows,
            verdict,
        })
    }
}
