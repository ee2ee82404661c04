use std::collections::HashMap;

use rayon::prelude::*;

use super::{VertexId, Window};
use crate::Result;

/// Geodesic DAG of `Γ(a,b)` inside the window, vertices listed from `b`
/// back to `a` so successors are always evaluated first.
struct Dag {
    order: Vec<VertexId>,
    succ: HashMap<VertexId, Vec<VertexId>>,
}

fn dag(window: &Window, a: VertexId, b: VertexId) -> Result<Dag> {
    let total = window.window_dist(a, b)?;
    let mut order = vec![a];
    let mut succ = HashMap::new();
    let mut layer = vec![a];
    for k in 0..total {
        let remaining = total - k - 1;
        let mut next: Vec<VertexId> = Vec::new();
        for &v in &layer {
            let mut list = Vec::new();
            for w in window.local_neighbors(v) {
                if window.window_dist(w, b)? == remaining {
                    list.push(w);
                    if !next.contains(&w) {
                        next.push(w);
                    }
                }
            }
            succ.insert(v, list);
        }
        order.extend_from_slice(&next);
        layer = next;
    }
    order.reverse();
    Ok(Dag { order, succ })
}

impl Dag {
    /// Max over geodesics `P` of `min_{q in P} d(p, q)`.
    fn farthest_side(&self, window: &Window, p: VertexId) -> Result<u32> {
        let mut val: HashMap<VertexId, u32> = HashMap::with_capacity(self.order.len());
        for &v in &self.order {
            let best = self
                .succ
                .get(&v)
                .and_then(|s| s.iter().map(|w| val[w]).max());
            let here = window.window_dist(v, p)?;
            val.insert(v, best.map_or(here, |b| b.min(here)));
        }
        Ok(val[self.order.last().expect("dag has its source")])
    }
}

/// Smallest `δ` making every geodesic triangle with corners in the certified
/// ball `δ`-slim. Distances from a side point to the other sides are taken in
/// the window, which can only overestimate them, so the result is an upper
/// bound for this window.
pub fn estimate_delta(window: &Window) -> Result<u32> {
    let corners: Vec<VertexId> = window
        .vertices()
        .iter()
        .copied()
        .filter(|&v| {
            window
                .depth(v)
                .is_some_and(|d| d <= window.certified_radius())
        })
        .collect();
    let mut dags: HashMap<(VertexId, VertexId), Dag> = HashMap::new();
    for &a in &corners {
        for &b in &corners {
            dags.insert((a, b), dag(window, a, b)?);
        }
    }
    let per_corner: Vec<Result<u32>> = corners
        .par_iter()
        .map(|&a| {
            let mut best = 0;
            for &b in &corners {
                let side = &dags[&(a, b)];
                for &c in &corners {
                    let (bc, ac) = (&dags[&(b, c)], &dags[&(a, c)]);
                    for &p in &side.order {
                        let slim = bc
                            .farthest_side(window, p)?
                            .min(ac.farthest_side(window, p)?);
                        best = best.max(slim);
                    }
                }
            }
            Ok(best)
        })
        .collect();
    per_corner
        .into_iter()
        .try_fold(0, |acc, r| r.map(|d| acc.max(d)))
}
