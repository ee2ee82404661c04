//! End-to-end acceptance checks. Runs without the test harness and prints
//! one PASS/FAIL line per criterion, including the time taken against its
//! budget. Any failure makes the binary exit nonzero.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

use common::*;
use horobundle::endgame::{fn_class_audit, s_eta_n, EndgameState, InfinitudeProxy};
use horobundle::families::FamilySpec;
use horobundle::graph::{ball, estimate_delta, VertexId, Window};
use horobundle::horo::{Bundle, SymdiffMode, SymdiffVerdict};
use horobundle::rays::{enumerate_cgr_prefixes, fellow_travel_audit, geo_window, Horizon, RaySpec};
use horobundle::scenario::{run_scenario, sample_elements, Scenario};
use horobundle::space::Space;

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn bundle<'s>(sp: &'s Space, ray: &str, h: Horizon) -> Bundle<'s> {
    Bundle::new(sp, RaySpec::parse(sp.oracle(), ray).unwrap(), h).unwrap()
}

fn class_on(b: &Bundle, letter: char) -> usize {
    let sp = b.space();
    b.classes()
        .iter()
        .find(|c| {
            sp.label(*c.representative.vertices.last().unwrap())
                .starts_with(letter)
        })
        .map(|c| c.id)
        .expect("class along the rail")
}

/// The part of `s` inside `B(x, r)` on the model ladder.
fn within(model: &Model, x: &str, r: u32, s: BTreeSet<String>) -> BTreeSet<String> {
    let d = model.distances(x);
    s.into_iter().filter(|v| d[v] <= r).collect()
}

fn rails(letters: &str, indices: std::ops::RangeInclusive<i64>) -> BTreeSet<String> {
    letters
        .chars()
        .flat_map(|c| rail(c, indices.clone()))
        .collect()
}

fn bad_ladder_one() -> Check {
    let r = 12;
    let h = Horizon::for_radius(r, 2);
    let sp = space(&FamilySpec::bad_ladder_one(), &h, 6);
    let b = bundle(&sp, "@eta", h);
    let model = bad_ladder_one_model(60);
    ensure!(b.classes().len() == 2, "|Xi| = {}", b.classes().len());
    let (xi_x, xi_y) = (class_on(&b, 'x'), class_on(&b, 'y'));
    let all = rails("xyz", 1..=r as i64 + 2);
    let q = |x: &str, xi| names(&sp, &b.sector_window(v(&sp, x), xi).unwrap().vertices);
    ensure!(
        q("x1", xi_x) == within(&model, "x1", r, rails("x", 1..=14)),
        "Q(x1, xi_x)"
    );
    ensure!(
        q("x1", xi_y) == within(&model, "x1", r, all.clone()),
        "Q(x1, xi_y)"
    );
    let mut zy = rails("y", 1..=14);
    zy.insert("z1".into());
    ensure!(q("z1", xi_y) == within(&model, "z1", r, zy), "Q(z1, xi_y)");
    let ray = RaySpec::parse(sp.oracle(), "@eta").unwrap();
    let geo = |x: &str| names(&sp, &geo_window(&sp, v(&sp, x), &ray, &h).unwrap().vertices);
    ensure!(geo("x1") == within(&model, "x1", r, all), "Geo(x1)");
    let mut z1 = rails("xy", 1..=14);
    z1.insert("z1".into());
    ensure!(geo("z1") == within(&model, "z1", r, z1), "Geo(z1)");
    for n in 1..=5 {
        let z = b.is_special(v(&sp, &format!("z{n}"))).unwrap();
        ensure!(!z.pass, "z{n} passed is_special");
        for (letter, xi) in [('x', xi_x), ('y', xi_y)] {
            let s = b.is_special(v(&sp, &format!("{letter}{n}"))).unwrap();
            ensure!(
                s.pass && s.class == Some(xi),
                "{letter}{n}: {:?}",
                (s.pass, s.class)
            );
        }
    }
    Ok(format!("R={r}, 5 sets exact, 15 specials"))
}

fn bad_ladder_two() -> Check {
    let h = Horizon::for_radius(24, 2);
    let sp = space(&FamilySpec::bad_ladder_two(), &h, 4);
    let b = bundle(&sp, "@eta", h);
    let z0 = sp.oracle().base_point();
    for x in ball(sp.oracle(), z0, 4) {
        ensure!(
            b.is_special(x).unwrap().pass,
            "{} failed is_special",
            sp.label(x)
        );
    }
    let (x1, y1) = (v(&sp, "x1"), v(&sp, "y1"));
    let sweep = [8, 16, 24];
    let geo = b.symdiff_report(x1, y1, SymdiffMode::Geo, &sweep).unwrap();
    ensure!(
        geo.verdict == SymdiffVerdict::UnboundedTrend,
        "Geo symdiff {:?}",
        geo.verdict
    );
    let geo1 = b.symdiff_report(x1, y1, SymdiffMode::Geo1, &sweep).unwrap();
    ensure!(
        geo1.verdict == SymdiffVerdict::Bounded,
        "Geo1 symdiff {:?}",
        geo1.verdict
    );
    let depths: Vec<u32> = geo1.rows.iter().map(|r| r.max_depth).collect();
    ensure!(
        depths.windows(2).all(|w| w[0] == w[1]),
        "Geo1 depths {depths:?}"
    );

    let evens = |from: i64| {
        (from..=30)
            .map(|n| format!("z{}", 2 * n))
            .collect::<BTreeSet<_>>()
    };
    let mut want_x1 = rails("x", 1..=60);
    want_x1.extend(rail('y', 2..=60));
    want_x1.insert("z1".into());
    want_x1.extend(evens(2));
    let mut want_y1 = rails("y", 1..=60);
    want_y1.extend(rail('x', 2..=60));
    want_y1.extend(evens(1));
    for r in sweep {
        let br = b.with_radius(r).unwrap();
        for (x, want) in [("x1", &want_x1), ("y1", &want_y1)] {
            let xv = v(&sp, x);
            let near = names(&sp, &ball(sp.oracle(), xv, r));
            let got = names(&sp, &br.geo1_window(xv).unwrap().vertices);
            let want: BTreeSet<String> = want.intersection(&near).cloned().collect();
            ensure!(got == want, "Geo1({x}) at R={r}");
        }
    }
    Ok(format!(
        "Geo trend {:?}, Geo1 depth {}",
        geo.rows.iter().map(|r| r.max_depth).collect::<Vec<_>>(),
        depths[0]
    ))
}

fn free_group() -> Check {
    let h = Horizon::for_radius(32, 0);
    let sp = space(&FamilySpec::free_group(2), &h, 4);
    let c = sp.oracle().cayley().unwrap();
    let text = "e||ab";
    let ray = RaySpec::parse(sp.oracle(), text).unwrap();
    let b = bundle(&sp, text, h);
    let e = v(&sp, "e");
    ensure!(b.classes().len() == 1, "|Xi| = {}", b.classes().len());
    let geo1 = names(&sp, &b.geo1_window(e).unwrap().vertices);
    ensure!(
        geo1 == set(periodic_ray("ab", 32)),
        "Geo1(e) is not the ray"
    );

    let small = bundle(&sp, text, h.with_radius(20));
    let gs = sample_elements(sp.oracle(), 7, 20, 4).unwrap();
    ensure!(gs.len() == 20, "sampled {}", gs.len());
    for &g in &gs {
        let rep = small
            .symdiff_report(e, g, SymdiffMode::Geo1, &[12, 16, 20])
            .unwrap();
        ensure!(
            rep.verdict == SymdiffVerdict::Bounded,
            "symdiff(e, {}) {:?}",
            sp.label(g),
            rep.verdict
        );
    }

    let st = EndgameState::compute(&b, Some(8), InfinitudeProxy::default()).unwrap();
    ensure!(st.rows.len() == 9, "{} rows", st.rows.len());
    for w in st.rows.windows(2) {
        ensure!(
            w[1].s_n.0.starts_with(&w[0].s_n.0),
            "s_{} is not a prefix of s_{}",
            w[0].n,
            w[1].n
        );
    }
    for row in &st.rows {
        ensure!(row.k_n == 0, "k_{} = {}", row.n, row.k_n);
        ensure!(row.h_n.contains(&e), "e not in H_{}", row.n);
    }

    let audit_h = h.with_radius(24);
    let eta = Bundle::new(&sp, ray.clone(), audit_h).unwrap();
    let gs = sample_elements(sp.oracle(), 7, 6, 3).unwrap();
    let thetas: Vec<Bundle> = gs
        .iter()
        .map(|&g| Bundle::new(&sp, ray.translate(c, g).unwrap(), audit_h).unwrap())
        .collect();
    let pairs: Vec<_> = thetas.iter().zip(&gs).map(|(t, &g)| (&eta, t, g)).collect();
    let rep = fn_class_audit(&pairs, 0, Some(5), InfinitudeProxy::default()).unwrap();
    ensure!(rep.pass, "audit: {:?}", rep.violations);
    let mut witnessed = 0;
    for pair in &rep.pairs {
        for row in &pair.rows {
            if let Some(w) = &row.witness {
                ensure!(w == "e", "g={} n={}: witness {w}", pair.g, row.n);
                witnessed += 1;
            }
        }
    }
    ensure!(witnessed > 0, "no witnesses");
    Ok(format!(
        "20 symdiffs bounded, 9 rows, {witnessed} witnesses all e"
    ))
}

fn hyperbolicity() -> Check {
    let f2 = FamilySpec::free_group(2);
    for r in [4, 6] {
        let o = horobundle::families::build_family(&f2).unwrap();
        let c = o.base_point();
        let d = estimate_delta(&Window::build(o, c, r).unwrap()).unwrap();
        ensure!(d == 0, "F2 delta {d} at radius {r}");
    }
    let mut ladder = Vec::new();
    for r in 6..=12 {
        let o = horobundle::families::build_family(&FamilySpec::z_ladder()).unwrap();
        let c = o.base_point();
        ladder.push(estimate_delta(&Window::build(o, c, r).unwrap()).unwrap());
    }
    ensure!(
        ladder.iter().all(|&d| d == ladder[0] && d <= 2),
        "Z-ladder deltas {ladder:?}"
    );

    let mut origins = 0;
    for (spec, rays) in [
        (FamilySpec::bad_ladder_one(), vec!["@eta"]),
        (FamilySpec::bad_ladder_two(), vec!["@eta"]),
        (FamilySpec::z_ladder(), vec!["@eta+", "@eta-"]),
        (f2, vec!["e||ab", "e||a"]),
    ] {
        let delta = spec.delta_bound.unwrap();
        let h = Horizon::for_radius(8, delta);
        let sp = space(&spec, &h, 4);
        for text in rays {
            let ray = RaySpec::parse(sp.oracle(), text).unwrap();
            for x in ball(sp.oracle(), sp.oracle().base_point(), 4) {
                let rep = fellow_travel_audit(&sp, x, &ray, &h, delta).unwrap();
                ensure!(
                    rep.pass && rep.bound == 2 * delta,
                    "{spec} {text} from {}: {rep:?}",
                    sp.label(x)
                );
                origins += 1;
            }
        }
    }
    Ok(format!(
        "F2 delta 0, Z-ladder delta {} on radii 6-12, {origins} origins fellow-travel",
        ladder[0]
    ))
}

/// Largest `|B(v, 2δ)|` over the certified part of `window`, by brute force.
fn max_ball(window: &Window, delta: u32) -> usize {
    let o = window.oracle_arc();
    window
        .vertices()
        .iter()
        .filter(|&&v| window.depth(v).unwrap() <= window.certified_radius())
        .map(|&v| ball(o.as_ref(), v, 2 * delta).len())
        .max()
        .unwrap()
}

fn class_bound_check() -> Check {
    let cases = [
        (FamilySpec::bad_ladder_one(), vec!["@eta"], 8),
        (FamilySpec::bad_ladder_two(), vec!["@eta"], 8),
        (FamilySpec::z_ladder(), vec!["@eta+", "@eta-"], 8),
        (
            FamilySpec::free_group(2),
            vec!["e||a", "e||ab", "e|b|aB", "e||abb"],
            4,
        ),
        (FamilySpec::free_group(3), vec!["e||c", "e||abC"], 3),
    ];
    let mut lines = Vec::new();
    for (spec, rays, radius) in cases {
        let o = horobundle::families::build_family(&spec).unwrap();
        let c = o.base_point();
        let window = Window::build(o, c, radius).unwrap();
        let delta = estimate_delta(&window).unwrap();
        let bound = max_ball(&window, delta);
        let h = Horizon::for_radius(8, spec.delta_bound.unwrap());
        let sp = space(&spec, &h, 2);
        for text in rays {
            let n = bundle(&sp, text, h).classes().len();
            ensure!(n <= bound, "{spec} {text}: {n} classes > {bound}");
            lines.push(format!("{n}<={bound}"));
        }
    }
    Ok(lines.join(" "))
}

fn displacement() -> Check {
    let mut checked = 0;
    let mut worst = 0;
    // (family, ray, prefixes per origin, prefix length, observation radius)
    for (spec, text, per_origin, len, reach) in [
        (FamilySpec::bad_ladder_one(), "@eta", 6, 8, 12),
        (FamilySpec::bad_ladder_two(), "@eta", 6, 8, 12),
        (FamilySpec::z_ladder(), "@eta+", 6, 8, 12),
        (FamilySpec::z_ladder(), "@eta-", 6, 8, 12),
        (FamilySpec::free_group(2), "e||ab", 1, 4, 6),
        (FamilySpec::free_group(3), "e||aBc", 1, 3, 5),
    ] {
        let h = Horizon::for_radius(10, spec.delta_bound.unwrap());
        let sp = space(&spec, &h, 2);
        let o = horobundle::families::build_family(&spec).unwrap();
        let z0 = o.base_point();
        let delta = estimate_delta(&Window::build(o, z0, 4).unwrap()).unwrap();
        let z0 = sp.oracle().base_point();
        let obs = ball(sp.oracle(), z0, reach);
        let ray = RaySpec::parse(sp.oracle(), text).unwrap();
        let b = Bundle::with_observation(&sp, ray.clone(), h, obs).unwrap();
        for x in ball(sp.oracle(), z0, 2) {
            let set = enumerate_cgr_prefixes(&sp, x, &ray, &h).unwrap();
            let prefixes = set.prefixes(sp.oracle(), len, 100_000).unwrap();
            for p in prefixes.iter().take(per_origin) {
                for xi in 0..b.classes().len() {
                    let d: Vec<u32> = p
                        .vertices
                        .iter()
                        .map(|&a| b.dist_x_xi(x, xi, a).unwrap())
                        .collect();
                    ensure!(
                        d.windows(2).all(|w| w[0] <= w[1]),
                        "{spec} {text} from {}: {d:?}",
                        sp.label(x)
                    );
                    // Class representatives start at z0.
                    if x == z0 {
                        let top = *d.last().unwrap();
                        ensure!(
                            top <= 4 * delta,
                            "{spec} {text}: displacement {top} > 4*{delta}"
                        );
                        worst = worst.max(top);
                    }
                }
                checked += 1;
            }
        }
    }
    ensure!(checked >= 100, "only {checked} prefixes");
    Ok(format!(
        "{checked} prefixes, max displacement from z0 {worst}"
    ))
}

fn equivariance() -> Check {
    let h = Horizon::for_radius(32, 0);
    let sp = space(&FamilySpec::free_group(2), &h, 3);
    let c = sp.oracle().cayley().unwrap();
    // A translate g·η only reaches its periodic tail at depth |g| + 1, so
    // the bands start past the longest sampled g.
    let p = InfinitudeProxy {
        depth_threshold: 8,
        ..InfinitudeProxy::default()
    };
    let e = v(&sp, "e");
    let gs = sample_elements(sp.oracle(), 11, 10, 3).unwrap();
    ensure!(gs.len() == 10, "sampled {}", gs.len());
    for text in ["e||ab", "e||aB", "e|b|a"] {
        let ray = RaySpec::parse(sp.oracle(), text).unwrap();
        let eta = Bundle::new(&sp, ray.clone(), h).unwrap();
        let base = eta.geo1_window(e).unwrap().vertices;
        let types: Vec<_> = (0..=4)
            .map(|n| {
                s_eta_n(&eta, n, &p)
                    .map(|t| t.s_n)
                    .map_err(|e| format!("{text}: s_{n}: {e}"))
            })
            .collect::<Result<_, _>>()?;
        for &g in &gs {
            let theta = Bundle::new(&sp, ray.translate(c, g).unwrap(), h).unwrap();
            let moved: Vec<VertexId> = base.iter().map(|&w| c.multiply(g, w)).collect();
            let direct = theta.geo1_window(g).unwrap().vertices;
            ensure!(
                names(&sp, &moved) == names(&sp, &direct),
                "{text}, g={}: Geo1",
                sp.label(g)
            );
            for (n, want) in types.iter().enumerate() {
                let got = s_eta_n(&theta, n as u32, &p)
                    .map_err(|e| format!("{text}, g={}: s_{n}: {e}", sp.label(g)))?
                    .s_n;
                ensure!(got == *want, "{text}, g={}: s_{n}", sp.label(g));
            }
        }
    }
    Ok("3 rays x 10 elements, Geo1 and s_0..s_4".into())
}

fn artifacts(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read(&p).unwrap(),
            )
        })
        .collect();
    out.sort();
    out
}

fn determinism() -> Check {
    let corpus = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    let mut files: Vec<_> = std::fs::read_dir(&corpus)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "scn"))
        .collect();
    files.sort();
    ensure!(!files.is_empty(), "empty corpus");
    let mut total = 0;
    for f in &files {
        let s = Scenario::from_file(f).unwrap();
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        let first = run_scenario(&s, a.path()).unwrap();
        let second = run_scenario(&s, b.path()).unwrap();
        ensure!(
            first.failures == second.failures,
            "{}: failures differ",
            f.display()
        );
        let (x, y) = (artifacts(a.path()), artifacts(b.path()));
        ensure!(x == y, "{}: artifacts differ", f.display());
        total += x.len();
    }
    Ok(format!(
        "{} scenarios, {total} artifacts identical",
        files.len()
    ))
}

/// Name, time budget in seconds, check.
type Criterion = (&'static str, u64, fn() -> Check);

fn main() {
    let criteria: [Criterion; 8] = [
        ("bad ladder I sets", 1, bad_ladder_one),
        ("bad ladder II sets and sweep", 5, bad_ladder_two),
        ("free group", 10, free_group),
        ("hyperbolicity and fellow travelling", 30, hyperbolicity),
        ("class-count bound", 10, class_bound_check),
        ("displacement along prefixes", 10, displacement),
        ("equivariance", 10, equivariance),
        ("determinism", 60, determinism),
    ];
    let mut failed = 0;
    for (i, (name, budget, check)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panic: {msg}"))
        });
        let took = start.elapsed();
        let result = match result {
            Ok(detail) if took > Duration::from_secs(budget) => {
                Err(format!("{detail}; over the {budget} s budget"))
            }
            other => other,
        };
        let (verdict, detail) = match &result {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        failed += usize::from(result.is_err());
        println!(
            "criterion {}: {verdict} {name} ({detail}) [{:.2} s, budget {budget} s]",
            i + 1,
            took.as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
