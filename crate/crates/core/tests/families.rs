mod common;

use std::io::Write as _;

use common::*;
use horobundle::families::calibration::{calibrate_one, calibrate_two, search_two};
use horobundle::families::{
    build_family, exact_geo, family_boundary_points, periodic_points, FamilySpec,
    NamedBoundaryPoint, Rail, RungLadder, RungPattern,
};
use horobundle::graph::{ball, labels, parse_vertex, AdjacencyOracle};
use horobundle::rays::{enumerate_cgr_prefixes, Horizon, RaySpec};
use horobundle::Error;

fn exact(
    spec: &FamilySpec,
    x: &str,
    eta: &NamedBoundaryPoint,
    radius: u32,
) -> std::collections::BTreeSet<String> {
    let o = build_family(spec).unwrap();
    let x = parse_vertex(o.as_ref(), x).unwrap();
    let set = exact_geo(spec, o.as_ref(), x, eta, radius).unwrap();
    labels(o.as_ref(), &set.vertices).into_iter().collect()
}

fn eta() -> NamedBoundaryPoint {
    NamedBoundaryPoint::Tag("eta".into())
}

#[test]
fn free_group_is_a_four_regular_tree() {
    let o = build_family(&FamilySpec::free_group(2)).unwrap();
    assert_eq!(o.degree_bound(), 4);
    for w in reduced_words(3) {
        let g = parse_vertex(o.as_ref(), &word_label(&w)).unwrap();
        let mut got: Vec<String> = labels(o.as_ref(), &o.neighbors(g));
        got.sort();
        let mut want: Vec<String> = ['a', 'A', 'b', 'B']
            .iter()
            .map(|c| word_label(&free_reduce(&format!("{w}{c}"))))
            .collect();
        want.sort();
        assert_eq!(got, want, "neighbors of {w}");
    }
}

#[test]
fn z_ladder_is_cubic() {
    let o = build_family(&FamilySpec::z_ladder()).unwrap();
    let model = z_ladder_model(12);
    for m in -5..=5 {
        for i in 0..2 {
            let label = format!("({m},{i})");
            let v = parse_vertex(o.as_ref(), &label).unwrap();
            let got: std::collections::BTreeSet<String> =
                labels(o.as_ref(), &o.neighbors(v)).into_iter().collect();
            assert_eq!(
                got,
                model
                    .ball(&label, 1)
                    .into_iter()
                    .filter(|l| *l != label)
                    .collect()
            );
        }
    }
}

#[test]
fn bad_ladder_one_adjacency_matches_model() {
    let o = build_family(&FamilySpec::bad_ladder_one()).unwrap();
    let model = bad_ladder_one_model(30);
    for c in ["x1", "y1", "z1", "x4", "z7", "y9"] {
        let v = parse_vertex(o.as_ref(), c).unwrap();
        assert_eq!(
            names_of(o.as_ref(), &ball(o.as_ref(), v, 3)),
            model.ball(c, 3)
        );
    }
}

fn names_of(
    o: &dyn AdjacencyOracle,
    vs: &[horobundle::graph::VertexId],
) -> std::collections::BTreeSet<String> {
    labels(o, vs).into_iter().collect()
}

#[test]
fn boundary_points() {
    assert_eq!(
        family_boundary_points(&FamilySpec::bad_ladder_one()).unwrap(),
        vec![eta()]
    );
    assert_eq!(
        family_boundary_points(&FamilySpec::z_ladder()).unwrap(),
        vec![
            NamedBoundaryPoint::Tag("eta+".into()),
            NamedBoundaryPoint::Tag("eta-".into())
        ]
    );
    let f1 = family_boundary_points(&FamilySpec::free_group(1)).unwrap();
    assert_eq!(f1.len(), 2);
    let o = build_family(&FamilySpec::free_group(1)).unwrap();
    let texts: Vec<String> = f1.iter().map(|p| p.ray_text(o.as_ref())).collect();
    assert_eq!(texts, vec!["e||a", "e||A"]);
    // Cyclically reduced primitive words of length <= 2 in F2.
    assert_eq!(periodic_points(2, 1).len(), 4);
    assert_eq!(periodic_points(2, 2).len(), 4 + 8);
}

#[test]
fn exact_geo_closed_forms() {
    let r = 10;
    let all: std::collections::BTreeSet<String> = ['x', 'y', 'z']
        .iter()
        .flat_map(|&c| rail(c, 1..=11))
        .collect();
    let within =
        |x: &str, s: std::collections::BTreeSet<String>| -> std::collections::BTreeSet<String> {
            let d = bad_ladder_one_model(40).distances(x);
            s.into_iter().filter(|v| d[v] <= r).collect()
        };
    let bl1 = FamilySpec::bad_ladder_one();
    assert_eq!(exact(&bl1, "x1", &eta(), r), within("x1", all.clone()));
    let mut z1 = rail('x', 1..=11);
    z1.extend(rail('y', 1..=11));
    z1.insert("z1".into());
    assert_eq!(exact(&bl1, "z1", &eta(), r), within("z1", z1));

    let bl2 = FamilySpec::bad_ladder_two();
    let got = exact(&bl2, "y1", &eta(), 6);
    let o = build_family(&bl2).unwrap();
    let y1 = parse_vertex(o.as_ref(), "y1").unwrap();
    let near: std::collections::BTreeSet<String> = names_of(o.as_ref(), &ball(o.as_ref(), y1, 6));
    let mut want = rail('x', 2..=20);
    want.extend(rail('y', 1..=20));
    want.extend((1..=10).map(|n| format!("z{}", 2 * n)));
    assert_eq!(got, want.intersection(&near).cloned().collect());

    let f2 = FamilySpec::free_group(2);
    let ab = NamedBoundaryPoint::Periodic {
        prefix: vec![],
        period: vec![0, 2],
    };
    assert_eq!(exact(&f2, "e", &ab, 4), set(periodic_ray("ab", 4)));
}

#[test]
fn exact_oracles_agree_with_generic_prefixes() {
    let cases: Vec<(FamilySpec, &str, Vec<&str>)> = vec![
        (
            FamilySpec::bad_ladder_one(),
            "@eta",
            vec!["x1", "z1", "y2", "z3"],
        ),
        (
            FamilySpec::bad_ladder_two(),
            "@eta",
            vec!["x1", "y1", "z1", "z2"],
        ),
        (
            FamilySpec::free_group(2),
            "e||ab",
            vec!["e", "a", "B", "ba"],
        ),
        (
            FamilySpec::z_ladder(),
            "@eta+",
            vec!["(0,0)", "(0,1)", "(-2,1)"],
        ),
    ];
    for (spec, ray_text, origins) in cases {
        let h = Horizon::for_radius(8, spec.delta_bound.unwrap());
        let sp = space(&spec, &h, 4);
        let ray = RaySpec::parse(sp.oracle(), ray_text).unwrap();
        let point = match ray_text.strip_prefix('@') {
            Some(tag) => NamedBoundaryPoint::Tag(tag.into()),
            None => NamedBoundaryPoint::Periodic {
                prefix: vec![],
                period: vec![0, 2],
            },
        };
        for x in origins {
            let xv = v(&sp, x);
            let generic = enumerate_cgr_prefixes(&sp, xv, &ray, &h).unwrap();
            let generic = names(&sp, &generic.vertices_within(sp.oracle(), h.r));
            let closed = match exact_geo(&spec, sp.oracle(), xv, &point, h.r) {
                Ok(s) => names(&sp, &s.vertices),
                Err(Error::NoExactOracle) => continue,
                Err(e) => panic!("{e}"),
            };
            assert_eq!(generic, closed, "{spec} from {x}");
        }
    }
}

#[test]
fn ladder_calibrations() {
    calibrate_one(&RungLadder::bad_ladder_one()).unwrap();
    let two = RungLadder::bad_ladder_two(&RungLadder::minimal_two_pattern()).unwrap();
    calibrate_two(&two).unwrap();
    // The uniform-rung ladder fails the second calibration.
    let wrong = RungLadder::new(
        "uniform",
        RungPattern::uniform(&[(Rail::X, 0), (Rail::Y, 0)]),
    )
    .unwrap();
    assert!(matches!(
        calibrate_two(&wrong),
        Err(Error::CalibrationFailed(_))
    ));
    assert!(search_two(2).contains(&RungLadder::minimal_two_pattern()));
}

#[test]
fn rung_pattern_text_round_trips() {
    let p = RungPattern::parse("even:x0,y-1;odd:x0").unwrap();
    assert_eq!(p, RungLadder::minimal_two_pattern());
    assert_eq!(RungPattern::parse(&p.to_string()).unwrap(), p);
    assert!(RungLadder::new("bad", RungPattern::uniform(&[(Rail::Z, 0)])).is_err());
}

#[test]
fn edge_list_and_table_families() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("hexagon.txt");
    let mut f = std::fs::File::create(&path).unwrap();
    writeln!(f, "# six-cycle\nbase p0").unwrap();
    for i in 0..6 {
        writeln!(f, "p{i} p{}", (i + 1) % 6).unwrap();
    }
    let spec = FamilySpec::parse(&format!("edges:{}", path.display()), None, None).unwrap();
    let h = Horizon::new(4, 2, 1).unwrap();
    let sp = space(&spec, &h, 2);
    assert_eq!(sp.dist(v(&sp, "p0"), v(&sp, "p3")).unwrap(), 3);
    assert_eq!(sp.oracle().degree_bound(), 2);

    let path = dir.path().join("z3.txt");
    std::fs::write(
        &path,
        "elements 0 1 2\ngenerators 1 2\nrow 0 : 0 1 2\nrow 1 : 1 2 0\nrow 2 : 2 0 1\n",
    )
    .unwrap();
    let spec = FamilySpec::parse(&format!("table:{}", path.display()), None, None).unwrap();
    let sp = space(&spec, &h, 2);
    let c = sp.oracle().cayley().unwrap();
    assert_eq!(c.multiply(v(&sp, "2"), v(&sp, "2")), v(&sp, "1"));
    assert_eq!(sp.dist(v(&sp, "0"), v(&sp, "2")).unwrap(), 1);

    std::fs::write(&path, "base a\na b\nc d\n").unwrap();
    assert!(
        FamilySpec::parse(&format!("edges:{}", path.display()), None, None)
            .and_then(|s| build_family(&s).map(|_| ()))
            .is_err()
    );
}
