//! Scenario files: a flat `key: value` header followed by one `op:` line per
//! construction. Running a scenario writes one artifact per operation and
//! collects every failed expectation or invariant.
//!
//! ```text
//! family: bad-ladder-2
//! ray: @eta
//! horizon: 48,10,6
//! op: symdiff x=x1 y=y1 mode=geo radii=8,16,24 expect=UNBOUNDED-TREND
//! ```

use std::cell::OnceCell;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::endgame::{self, EndgameState, InfinitudeProxy};
use crate::export::{self, Format, Report};
use crate::families::{FamilyKind, FamilySpec, Rail};
use crate::graph::{
    ball, estimate_delta, labels, parse_vertex, AdjacencyOracle, GeneratorOrder, VertexId, Window,
};
use crate::horo::{default_observation, Bundle, SymdiffMode, DEFAULT_OBSERVATION_REACH};
use crate::rays::{self, Horizon, RaySpec};
use crate::space::Space;
use crate::{Error, Result};

/// One `op:` line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Operation {
    pub name: String,
    pub params: BTreeMap<String, String>,
}

impl Operation {
    /// Parses `name k=v k=v`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut parts = text.split_whitespace();
        let name = parts
            .next()
            .ok_or_else(|| Error::Parse("empty operation".into()))?
            .to_string();
        if !OPERATIONS.contains(&name.as_str()) {
            return Err(Error::Parse(format!("unknown operation `{name}`")));
        }
        let mut params = BTreeMap::new();
        for p in parts {
            let (k, v) = p
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("parameter `{p}` is not key=value")))?;
            params.insert(k.to_string(), v.to_string());
        }
        Ok(Self { name, params })
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.params.get(key).map(String::as_str)
    }

    fn number(&self, key: &str) -> Result<Option<u32>> {
        self.get(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| Error::Parse(format!("`{key}` must be a number, got `{v}`")))
            })
            .transpose()
    }

    fn numbers(&self, key: &str) -> Result<Option<Vec<u32>>> {
        self.get(key)
            .map(|v| {
                v.split(',')
                    .map(|n| {
                        n.parse()
                            .map_err(|_| Error::Parse(format!("bad list `{v}` for `{key}`")))
                    })
                    .collect()
            })
            .transpose()
    }
}

/// Operation names accepted on `op:` lines and by `--op`.
pub const OPERATIONS: &[&str] = &[
    "window", "delta", "prefixes", "geo", "fellow", "xi", "sector", "special", "straight", "yset",
    "geo1", "overlay", "symdiff", "endgame", "z", "audit",
];

#[derive(Clone, Debug)]
pub struct Scenario {
    pub family: FamilySpec,
    pub ray: Option<String>,
    pub horizon: Horizon,
    /// Largest distance from the base point of any queried origin.
    pub reach: u32,
    /// Observation set is `B(z0, 4δ + observe)`.
    pub observe: u32,
    pub seed: u64,
    pub order: Option<String>,
    pub format: Option<Format>,
    pub operations: Vec<Operation>,
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self> {
        let mut header: BTreeMap<String, String> = BTreeMap::new();
        let mut operations = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("line {}: expected `key: value`", i + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            if key == "op" {
                operations.push(Operation::parse(value)?);
            } else if header.insert(key.to_string(), value.to_string()).is_some() {
                return Err(Error::Parse(format!(
                    "line {}: duplicate key `{key}`",
                    i + 1
                )));
            }
        }
        let take = |k: &str| header.get(k).map(String::as_str);
        for key in header.keys() {
            if ![
                "family", "rank", "pattern", "ray", "horizon", "radius", "reach", "observe",
                "seed", "order", "format",
            ]
            .contains(&key.as_str())
            {
                return Err(Error::Parse(format!("unknown key `{key}`")));
            }
        }
        let rank = take("rank")
            .map(|r| {
                r.parse()
                    .map_err(|_| Error::Parse(format!("bad rank `{r}`")))
            })
            .transpose()?;
        let family = FamilySpec::parse(
            take("family").ok_or_else(|| Error::Parse("missing `family`".into()))?,
            rank,
            take("pattern"),
        )?;
        let horizon = match (take("horizon"), take("radius")) {
            (Some(h), _) => Horizon::parse(h)?,
            (None, Some(r)) => Horizon::for_radius(
                r.parse()
                    .map_err(|_| Error::Parse(format!("bad radius `{r}`")))?,
                family.delta_bound.unwrap_or(0),
            ),
            (None, None) => Horizon::for_radius(8, family.delta_bound.unwrap_or(0)),
        };
        let parse_u = |k: &str, default: u64| -> Result<u64> {
            take(k)
                .map(|v| {
                    v.parse()
                        .map_err(|_| Error::Parse(format!("bad `{k}` value `{v}`")))
                })
                .transpose()
                .map(|v| v.unwrap_or(default))
        };
        Ok(Self {
            reach: parse_u("reach", horizon.r as u64)? as u32,
            observe: parse_u("observe", DEFAULT_OBSERVATION_REACH as u64)? as u32,
            seed: parse_u("seed", 0)?,
            family,
            ray: take("ray").map(str::to_string),
            horizon,
            order: take("order").map(str::to_string),
            format: take("format").map(str::parse).transpose()?,
            operations,
        })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Horizon covering every radius the operations sweep over.
    fn widest_horizon(&self) -> Result<Horizon> {
        let mut r = self.horizon.r;
        for op in &self.operations {
            if let Some(radii) = op.numbers("radii")? {
                r = r.max(radii.into_iter().max().unwrap_or(0));
            }
        }
        Ok(self.horizon.with_radius(r))
    }
}

/// Artifacts written and failures collected by [`run_scenario`].
#[derive(Debug, Default)]
pub struct Outcome {
    pub artifacts: Vec<PathBuf>,
    pub failures: Vec<String>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        i32::from(!self.failures.is_empty())
    }
}

struct Context<'a> {
    scenario: &'a Scenario,
    space: &'a Space,
    ray: Option<RaySpec>,
    bundle: OnceCell<Bundle<'a>>,
}

impl<'a> Context<'a> {
    fn oracle(&self) -> &dyn AdjacencyOracle {
        self.space.oracle()
    }

    fn vertex(&self, op: &Operation, key: &str) -> Result<VertexId> {
        match op.get(key) {
            Some(label) => parse_vertex(self.oracle(), label),
            None => Ok(self.oracle().base_point()),
        }
    }

    fn ray(&self) -> Result<&RaySpec> {
        self.ray
            .as_ref()
            .ok_or_else(|| Error::Parse("operation needs a `ray`".into()))
    }

    fn bundle(&self) -> Result<&Bundle<'a>> {
        if self.bundle.get().is_none() {
            let ray = self.ray()?.clone();
            let observation = default_observation(self.space, self.scenario.observe);
            let _ = self.bundle.set(Bundle::with_observation(
                self.space,
                ray,
                self.scenario.horizon,
                observation,
            )?);
        }
        Ok(self.bundle.get().expect("just built"))
    }

    fn labels(&self, vertices: &[VertexId]) -> Vec<String> {
        labels(self.oracle(), vertices)
    }

    fn report(&self, op: &Operation) -> Report {
        let mut r =
            Report::new(&op.name, self.scenario.horizon).input("family", &self.scenario.family);
        if let Some(ray) = &self.scenario.ray {
            r = r.input("ray", ray);
        }
        for (k, v) in &op.params {
            if k != "out" && k != "format" {
                r = r.input(k, v);
            }
        }
        r
    }
}

/// Builds the family once, then runs every operation in order, writing its
/// artifact under `out_dir`. Errors from a single operation are recorded as
/// failures; only setup errors abort the run.
pub fn run_scenario(scenario: &Scenario, out_dir: &Path) -> Result<Outcome> {
    let widest = scenario.widest_horizon()?;
    let mut space = Space::for_family(&scenario.family, &widest, scenario.reach)?;
    if let Some(order) = &scenario.order {
        let gen = space.oracle().generator_labels().ok_or(Error::NotCayley)?;
        let order = GeneratorOrder::parse(order, gen)?;
        space = space.with_order(order);
    }
    let ray = scenario
        .ray
        .as_deref()
        .map(|r| RaySpec::parse(space.oracle(), r))
        .transpose()?;
    let ctx = Context {
        scenario,
        space: &space,
        ray,
        bundle: OnceCell::new(),
    };
    let mut outcome = Outcome::default();
    for (i, op) in scenario.operations.iter().enumerate() {
        let format = match op.get("format") {
            Some(f) => f.parse()?,
            None => scenario.format.unwrap_or_else(|| default_format(&op.name)),
        };
        let name = op
            .get("out")
            .map(str::to_string)
            .unwrap_or_else(|| format!("{:02}-{}.{}", i + 1, op.name, format.extension()));
        match run_operation(&ctx, op, format) {
            Ok((text, failures)) => {
                let path = out_dir.join(name);
                export::write_artifact(&path, &text)?;
                outcome.artifacts.push(path);
                outcome.failures.extend(
                    failures
                        .into_iter()
                        .map(|f| format!("op {} ({}): {f}", i + 1, op.name)),
                );
            }
            Err(e) => outcome
                .failures
                .push(format!("op {} ({}): {e}", i + 1, op.name)),
        }
    }
    Ok(outcome)
}

fn default_format(op: &str) -> Format {
    match op {
        "overlay" => Format::Dot,
        "endgame" => Format::Csv,
        _ => Format::Json,
    }
}

type OpResult = Result<(String, Vec<String>)>;

fn expect(op: &Operation, report: &Report, failures: &mut Vec<String>) {
    if let Some(want) = op.get("expect") {
        let got = report.verdict.clone().unwrap_or_default();
        if got != want {
            failures.push(format!("expected verdict {want}, got {got}"));
        }
    }
    if let Some(want) = op.get("expect_count") {
        let got = report.elements.len().to_string();
        if got != want {
            failures.push(format!("expected {want} elements, got {got}"));
        }
    }
    if let Some(want) = op.get("expect_set") {
        let mut want: Vec<&str> = want.split(',').filter(|s| !s.is_empty()).collect();
        let mut got: Vec<&str> = report.elements.iter().map(String::as_str).collect();
        want.sort_unstable();
        got.sort_unstable();
        if got != want {
            failures.push(format!(
                "expected set {{{}}}, got {{{}}}",
                want.join(","),
                got.join(",")
            ));
        }
    }
}

fn json_only(format: Format, report: &Report) -> Result<String> {
    match format {
        Format::Json => Ok(report.to_json()),
        other => Err(Error::UnsupportedFormat(other.extension().to_string())),
    }
}

fn run_operation(ctx: &Context, op: &Operation, format: Format) -> OpResult {
    let h = ctx.scenario.horizon;
    let mut failures = Vec::new();
    let mut report = ctx.report(op);
    match op.name.as_str() {
        "window" => {
            let center = ctx.vertex(op, "center")?;
            let radius = op.number("radius")?.unwrap_or(h.r);
            let window = Window::build(ctx.space.oracle.clone(), center, radius)?;
            let text = match format {
                Format::Json => export::window_json(&window),
                Format::Dot => export::window_dot(&window),
                Format::Csv => return Err(Error::UnsupportedFormat("csv".into())),
            };
            return Ok((text, failures));
        }
        "delta" => {
            let center = ctx.vertex(op, "center")?;
            let radius = op.number("radius")?.unwrap_or(h.r);
            let window = Window::build(ctx.space.oracle.clone(), center, radius)?;
            let delta = estimate_delta(&window)?;
            report.verdict = Some(delta.to_string());
            report.certification = "Truncated".into();
            if let Some(bound) = ctx.space.delta {
                if delta > bound {
                    failures.push(format!(
                        "estimated δ {delta} exceeds the family bound {bound}"
                    ));
                }
            }
        }
        "prefixes" => {
            let x = ctx.vertex(op, "x")?;
            let set = rays::enumerate_cgr_prefixes(ctx.space, x, ctx.ray()?, &h)?;
            report.certification = set.certification.tag();
            report.elements = set
                .prefixes(
                    ctx.oracle(),
                    op.number("len")?.unwrap_or(h.r),
                    ctx.space.prefix_cap,
                )?
                .iter()
                .map(|p| ctx.labels(&p.vertices).join(" "))
                .collect();
        }
        "geo" => {
            let x = ctx.vertex(op, "x")?;
            let set = rays::geo_window(ctx.space, x, ctx.ray()?, &h)?;
            report.certification = set.certification.tag();
            report.elements = ctx.labels(&set.vertices);
        }
        "fellow" => {
            let delta = ctx.space.delta()?;
            let origins = match op.number("all")? {
                Some(r) => ball(ctx.oracle(), ctx.oracle().base_point(), r),
                None => vec![ctx.vertex(op, "x")?],
            };
            let mut reports = Vec::new();
            for x in origins {
                let r = rays::fellow_travel_audit(ctx.space, x, ctx.ray()?, &h, delta)?;
                if !r.pass {
                    failures.push(format!(
                        "deviation {} from {} exceeds 2δ = {}",
                        r.max_deviation, r.origin, r.bound
                    ));
                }
                report
                    .elements
                    .push(format!("{}: {}", r.origin, r.max_deviation));
                reports.push(r);
            }
            report.certification = "StableObserved".into();
            report.verdict = Some(if failures.is_empty() { "PASS" } else { "FAIL" }.into());
            report.details = Some(json!(reports));
        }
        "xi" => {
            let bundle = ctx.bundle()?;
            report.certification = bundle.class_certification().tag();
            report.elements = bundle
                .classes()
                .iter()
                .map(|c| {
                    format!(
                        "{}: {}",
                        c.name(),
                        ctx.labels(&c.representative.vertices[..=h.r as usize])
                            .join(" ")
                    )
                })
                .collect();
            report.verdict = Some(bundle.classes().len().to_string());
            report.details = Some(json!({
                "observation": ctx.labels(bundle.observation()),
                "traces": bundle.classes().iter().map(|c| &c.trace.values).collect::<Vec<_>>(),
            }));
        }
        "sector" => {
            let x = ctx.vertex(op, "x")?;
            let xi = op.number("xi")?.unwrap_or(0) as usize;
            let s = ctx.bundle()?.sector_window(x, xi)?;
            report.certification = s.certification.tag();
            report.elements = ctx.labels(&s.vertices);
        }
        "special" => {
            let targets = match op.number("radius")? {
                Some(r) => {
                    let x = ctx.vertex(op, "x")?;
                    ball(ctx.oracle(), x, r)
                }
                None => vec![ctx.vertex(op, "x")?],
            };
            let bundle = ctx.bundle()?;
            let mut passed = 0;
            for v in &targets {
                let verdict = bundle.is_special(*v)?;
                passed += usize::from(verdict.pass);
                report.elements.push(match verdict.class {
                    Some(c) => format!("{}: PASS xi{c}", ctx.labels(&[*v])[0]),
                    None => format!("{}: FAIL", ctx.labels(&[*v])[0]),
                });
            }
            report.certification = bundle.class_certification().tag();
            report.verdict = Some(if passed == targets.len() {
                "PASS".into()
            } else if passed == 0 {
                "FAIL".into()
            } else {
                "MIXED".into()
            });
        }
        "straight" => {
            let x = ctx.vertex(op, "x")?;
            let set = rays::enumerate_cgr_prefixes(ctx.space, x, ctx.ray()?, &h)?;
            let bundle = ctx.bundle()?;
            let mut all = true;
            for head in set.prefixes(ctx.oracle(), h.r, ctx.space.prefix_cap)? {
                let v = bundle.is_straight_prefix(&head)?;
                all &= v.pass;
                report.elements.push(format!(
                    "{}: {}",
                    ctx.labels(&head.vertices).join(" "),
                    if v.pass { "PASS" } else { "FAIL" }
                ));
                report.certification = v.certification.tag();
            }
            report.verdict = Some(if all { "PASS" } else { "FAIL" }.into());
        }
        "yset" => {
            let x = ctx.vertex(op, "x")?;
            let xi = op.number("xi")?.unwrap_or(0) as usize;
            let y = ctx.bundle()?.y_set(x, xi)?;
            report.certification = ctx.bundle()?.class_certification().tag();
            report.elements = ctx.labels(&y);
        }
        "geo1" => {
            let x = ctx.vertex(op, "x")?;
            let set = ctx.bundle()?.geo1_window(x)?;
            report.certification = set.certification.tag();
            report.elements = ctx.labels(&set.vertices);
            if let Some(note) = geo1_note(ctx, x, &set.vertices) {
                report.details = Some(json!({ "note": note }));
            }
        }
        "overlay" => {
            let x = ctx.vertex(op, "x")?;
            let ray = ctx.ray()?.clone();
            let geo = rays::geo_window(ctx.space, x, &ray, &h)?;
            let bundle = ctx.bundle()?;
            let geo1 = bundle.geo1_window(x)?;
            let mut sets = vec![
                ("Geo1".to_string(), geo1.vertices),
                ("Geo".to_string(), geo.vertices),
            ];
            for c in bundle.classes() {
                sets.push((
                    format!("Q({})", c.name()),
                    bundle.sector_window(x, c.id)?.vertices,
                ));
            }
            let region = ball(ctx.oracle(), x, h.r);
            return match format {
                Format::Dot => Ok((export::overlay_dot(ctx.oracle(), &region, &sets), failures)),
                other => Err(Error::UnsupportedFormat(other.extension().to_string())),
            };
        }
        "symdiff" => {
            let x = ctx.vertex(op, "x")?;
            let y = ctx.vertex(op, "y")?;
            let mode: SymdiffMode = op.get("mode").unwrap_or("geo1").parse()?;
            let radii = op.numbers("radii")?.unwrap_or_else(|| vec![h.r]);
            let r = ctx.bundle()?.symdiff_report(x, y, mode, &radii)?;
            report.certification = ctx.bundle()?.class_certification().tag();
            report.elements = r
                .rows
                .last()
                .map(|row| row.elements.clone())
                .unwrap_or_default();
            report.verdict = Some(r.verdict.to_string());
            report.details = Some(json!(r.rows));
        }
        "endgame" => {
            let n_max = op.number("n_max")?;
            let state = EndgameState::compute(ctx.bundle()?, n_max, proxy(op)?)?;
            let e = ctx.oracle().base_point();
            failures.extend(state.violations(e));
            return match format {
                Format::Csv => Ok((export::endgame_csv(ctx.oracle(), &state)?, failures)),
                Format::Json => {
                    report.certification = ctx.bundle()?.class_certification().tag();
                    report.verdict = Some(if failures.is_empty() { "PASS" } else { "FAIL" }.into());
                    report.details = Some(json!(state));
                    Ok((report.to_json(), failures))
                }
                Format::Dot => Err(Error::UnsupportedFormat("dot".into())),
            };
        }
        "z" => {
            let n_max = op.number("n_max")?;
            let state = EndgameState::compute(ctx.bundle()?, n_max, proxy(op)?)?;
            let slope = op
                .get("slope")
                .map(|s| {
                    s.parse::<f64>()
                        .map_err(|_| Error::Parse(format!("bad slope `{s}`")))
                })
                .transpose()?
                .unwrap_or(endgame::DEFAULT_Z_SLOPE);
            report.verdict = Some(endgame::z_heuristic(&state, slope).to_string());
            report.elements = state
                .rows
                .iter()
                .map(|r| format!("k_{}={}", r.n, r.k_n))
                .collect();
        }
        "audit" => {
            let delta = ctx.space.delta()?;
            let samples = op.number("samples")?.unwrap_or(3);
            let length = op.number("length")?.unwrap_or(3);
            let n_max = op.number("n_max")?;
            let elements = match op.get("g") {
                Some(list) => list
                    .split(',')
                    .map(|g| parse_vertex(ctx.oracle(), g))
                    .collect::<Result<Vec<_>>>()?,
                None => sample_elements(ctx.oracle(), ctx.scenario.seed, samples, length)?,
            };
            let eta = ctx.bundle()?;
            let cayley = ctx.oracle().cayley().ok_or(Error::NotCayley)?;
            let translated: Vec<Bundle> = elements
                .iter()
                .map(|&g| Bundle::new(ctx.space, eta.ray().translate(cayley, g)?, eta.horizon()))
                .collect::<Result<_>>()?;
            let pairs: Vec<(&Bundle, &Bundle, VertexId)> = translated
                .iter()
                .zip(&elements)
                .map(|(t, &g)| (eta, t, g))
                .collect();
            let audit = endgame::fn_class_audit(&pairs, delta, n_max, proxy(op)?)?;
            failures.extend(audit.violations.clone());
            report.verdict = Some(if audit.pass { "PASS" } else { "FAIL" }.into());
            report.elements = ctx.labels(&elements);
            report.details = Some(json!(audit));
        }
        other => return Err(Error::Parse(format!("unknown operation `{other}`"))),
    }
    expect(op, &report, &mut failures);
    Ok((json_only(format, &report)?, failures))
}

fn proxy(op: &Operation) -> Result<InfinitudeProxy> {
    let mut p = InfinitudeProxy::default();
    if let Some(d) = op.number("depth")? {
        p.depth_threshold = d;
    }
    if let Some(m) = op.number("witnesses")? {
        p.min_witnesses = m as usize;
    }
    Ok(p)
}

/// The first bad ladder lists `z_m` in its own `Geo₁`; the computed set may
/// not, and reports say so.
fn geo1_note(ctx: &Context, x: VertexId, set: &[VertexId]) -> Option<String> {
    if ctx.scenario.family.kind != FamilyKind::BadLadderI || set.contains(&x) {
        return None;
    }
    let label = ctx.oracle().vertex_label(x);
    label.starts_with(Rail::Z.letter()).then(|| {
        format!("{label} is not special, so it is absent from the computed set; the stated identity lists it")
    })
}

/// `count` distinct group elements of word length `1..=length`, drawn with
/// a seeded generator.
pub fn sample_elements(
    oracle: &dyn AdjacencyOracle,
    seed: u64,
    count: u32,
    length: u32,
) -> Result<Vec<VertexId>> {
    let cayley = oracle.cayley().ok_or(Error::NotCayley)?;
    let e = cayley.identity();
    let pool: Vec<VertexId> = ball(oracle, e, length)
        .into_iter()
        .filter(|&v| v != e)
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let want = (count as usize).min(pool.len());
    while out.len() < want {
        let g = pool[rng.gen_range(0..pool.len())];
        if !out.contains(&g) {
            out.push(g);
        }
    }
    Ok(out)
}
