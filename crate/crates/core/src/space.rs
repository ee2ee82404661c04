use std::sync::Arc;

use crate::families::{build_family, FamilySpec};
use crate::graph::{AdjacencyOracle, ExactMetric, GeneratorOrder, Metric, Window};
use crate::rays::Horizon;
use crate::{Error, Result};

/// Default cap on enumerated geodesic paths per query.
pub const DEFAULT_PREFIX_CAP: usize = 50_000;

/// A graph together with the certified metric every construction runs on.
pub struct Space {
    pub spec: Option<FamilySpec>,
    pub oracle: Arc<dyn AdjacencyOracle>,
    pub metric: Arc<dyn Metric>,
    pub delta: Option<u32>,
    pub order: GeneratorOrder,
    pub prefix_cap: usize,
}

impl Space {
    /// Builds the family and a metric large enough for queries at distance up
    /// to `reach` from the base point under horizon `h`. Families with a
    /// closed-form distance skip the window.
    pub fn for_family(spec: &FamilySpec, h: &Horizon, reach: u32) -> Result<Self> {
        let oracle = build_family(spec)?;
        let mut space = Self::from_oracle(oracle, spec.delta_bound, h, reach)?;
        space.spec = Some(spec.clone());
        Ok(space)
    }

    pub fn from_oracle(
        oracle: Arc<dyn AdjacencyOracle>,
        delta: Option<u32>,
        h: &Horizon,
        reach: u32,
    ) -> Result<Self> {
        let base = oracle.base_point();
        let metric: Arc<dyn Metric> = if oracle.exact_distance(base, base).is_some() {
            Arc::new(ExactMetric::new(oracle.clone())?)
        } else {
            let radius = Self::window_radius(h, delta.unwrap_or(0), reach);
            Arc::new(Window::build(oracle.clone(), base, radius)?)
        };
        let order = GeneratorOrder::natural(oracle.generator_labels().map_or(0, <[String]>::len));
        Ok(Self {
            spec: None,
            oracle,
            metric,
            delta,
            order,
            prefix_cap: DEFAULT_PREFIX_CAP,
        })
    }

    /// Window radius certifying every distance the constructions query:
    /// prefixes reach depth `reach + H + S + 2δ`, sectors from special
    /// vertices add up to `2R`, and certification needs twice that.
    pub fn window_radius(h: &Horizon, delta: u32, reach: u32) -> u32 {
        2 * (reach + h.h + h.s + 2 * h.r + 2 * delta + 4)
    }

    pub fn with_order(mut self, order: GeneratorOrder) -> Self {
        self.order = order;
        self
    }

    pub fn delta(&self) -> Result<u32> {
        self.delta.ok_or(Error::NotHyperbolic)
    }

    pub fn metric(&self) -> &dyn Metric {
        self.metric.as_ref()
    }

    pub fn oracle(&self) -> &dyn AdjacencyOracle {
        self.oracle.as_ref()
    }

    pub fn dist(&self, u: crate::graph::VertexId, v: crate::graph::VertexId) -> Result<u32> {
        self.metric.dist(u, v)
    }

    pub fn label(&self, v: crate::graph::VertexId) -> String {
        self.oracle.vertex_label(v)
    }
}
