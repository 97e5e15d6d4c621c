//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

mod common;

use polymut_core::deform::{
    self, fiber_class, general_fiber, is_admissible, mutation_to_deformation, reduce_to_polygon,
    Decomposition, Dilation,
};
use polymut_core::divpoly::{self, Affine, PLFunc, PointLabel};
use polymut_core::fano::{
    self, diophantine_class, markov_tree, predicted_mutation_weights, triangle_from_weights,
    WeightTriple,
};
use polymut_core::geom::{
    area, dual, lattice_equivalent, lattice_points, minkowski_difference, minkowski_sum, Polygon,
    RatMatrix, Vec2,
};
use polymut_core::laurent::{
    self, algebraic_mutate, period_sequence, MutationSpec, Strictness, Variable,
};
use polymut_core::mutation::{self, dual_map, mutation_graph, HeightScan, MutationGraph, PLMap};
use polymut_core::rational::{rat, ratio, Rational};
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use std::collections::BTreeSet;
use std::time::{Duration, Instant};

const MARKOV_DEPTH: usize = 4;
const MARKOV_TIME_LIMIT: Duration = Duration::from_secs(10);
const LAURENT_TIME_LIMIT: Duration = Duration::from_secs(1);
const PROPERTY_TIME_LIMIT: Duration = Duration::from_secs(60);
const PROPERTY_CASES: u32 = 1000;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn poly(pts: &[(i64, i64)]) -> Polygon {
    Polygon::from_vertices(pts.iter().map(|&(x, y)| Vec2::int(x, y)).collect())
}

fn wt(a: u64, b: u64, c: u64) -> WeightTriple {
    WeightTriple::new([a, b, c]).unwrap()
}

fn markov_graph() -> Result<(MutationGraph, Duration), String> {
    let start = Instant::now();
    let p2 = triangle_from_weights(&wt(1, 1, 1)).map_err(|e| e.to_string())?;
    let g =
        mutation_graph(&p2, MARKOV_DEPTH, HeightScan::EdgeNormals).map_err(|e| e.to_string())?;
    Ok((g, start.elapsed()))
}

fn markov_chain(g: &MutationGraph, elapsed: Duration) -> Outcome {
    let found: BTreeSet<[u64; 3]> = g.nodes.iter().map(|n| n.weights.sorted()).collect();
    let expected: BTreeSet<[u64; 3]> = markov_tree(MARKOV_DEPTH)
        .map_err(|e| e.to_string())?
        .iter()
        .map(|t| t.squares().unwrap().sorted())
        .collect();
    ensure(found.len() == g.nodes.len(), || {
        "duplicate weight classes among nodes".into()
    })?;
    ensure(found == expected, || {
        format!("nodes {found:?} != squares {expected:?}")
    })?;
    for sample in [[1, 1, 1], [1, 1, 4], [1, 4, 25], [4, 25, 841], [1, 25, 169]] {
        ensure(found.contains(&sample), || format!("missing {sample:?}"))?;
    }
    ensure(elapsed < MARKOV_TIME_LIMIT, || format!("took {elapsed:?}"))?;
    Ok(format!(
        "{} nodes, {} edges, {elapsed:.2?}",
        g.nodes.len(),
        g.edges.len()
    ))
}

fn weight_formula(g: &MutationGraph) -> Outcome {
    let mut failures = Vec::new();
    for e in &g.edges {
        let rep = &g.nodes[e.from].representative;
        let image = mutation::mutate(rep, &e.data).map_err(|err| err.to_string())?;
        let got = fano::weights(&image).map_err(|err| err.to_string())?;
        let Some(apex) = e.apex else {
            failures.push(format!("edge {}->{} has no isolated vertex", e.from, e.to));
            continue;
        };
        let predicted = predicted_mutation_weights(&g.nodes[e.from].weights, apex)
            .map_err(|err| err.to_string())?;
        if !got.same_up_to_permutation(&predicted) || got.sorted() != g.nodes[e.to].weights.sorted()
        {
            failures.push(format!(
                "edge {}->{}: {got} vs predicted {predicted}",
                e.from, e.to
            ));
        }
    }
    ensure(failures.is_empty(), || failures.join("; "))?;
    Ok(format!("{} edges, 0 failures", g.edges.len()))
}

fn diophantine_invariance(g: &MutationGraph) -> Outcome {
    for n in &g.nodes {
        let d = diophantine_class(&n.weights).map_err(|e| e.to_string())?;
        ensure(d.m == 3 && d.k == 1 && d.c == [1, 1, 1], || {
            format!("{}: {d:?}", n.weights)
        })?;
    }
    let seed = triangle_from_weights(&wt(1, 2, 9)).map_err(|e| e.to_string())?;
    let chain = mutation_graph(&seed, 3, HeightScan::EdgeNormals).map_err(|e| e.to_string())?;
    ensure(chain.nodes.len() > 3, || {
        format!("only {} nodes from (1,2,9)", chain.nodes.len())
    })?;
    for n in &chain.nodes {
        let d = diophantine_class(&n.weights).map_err(|e| e.to_string())?;
        ensure(d.m == 4 && d.k == 1 && d.c == [1, 1, 2], || {
            format!("{}: {d:?}", n.weights)
        })?;
    }
    Ok(format!(
        "Markov m/k = 3, c = {{1,1,1}} on {} nodes; (1,2,9) chain m/k = 4, c = {{1,1,2}} on {} nodes",
        g.nodes.len(),
        chain.nodes.len()
    ))
}

fn duality_commutation(g: &MutationGraph) -> Outcome {
    for e in &g.edges {
        let rep = &g.nodes[e.from].representative;
        let direct = mutation::mutate(rep, &e.data).map_err(|err| err.to_string())?;
        let image = dual_map(
            &PLMap::new(&e.data),
            &dual(rep).map_err(|err| err.to_string())?,
        );
        let via_dual = dual(&image).map_err(|err| err.to_string())?;
        ensure(via_dual == direct, || {
            format!("edge {}->{}: {via_dual} != {direct}", e.from, e.to)
        })?;
    }
    let p = poly(&[(0, -1), (1, 2), (-1, 2)]);
    let md = &mutation::find_factors(&p, &Vec2::int(0, -1)).map_err(|e| e.to_string())?[0];
    let image = dual_map(&PLMap::new(md), &dual(&p).unwrap());
    ensure(image == poly(&[(-3, -2), (0, 1), (3, 1)]), || {
        format!("phi image {image}")
    })?;
    ensure(
        dual(&image).unwrap() == mutation::mutate(&p, md).unwrap(),
        || "P(1,1,4) instance".into(),
    )?;
    Ok(format!(
        "{} edges plus the P(1,1,4) instance",
        g.edges.len()
    ))
}

fn laurent_compatibility() -> Outcome {
    let start = Instant::now();
    let f = laurent::parse("y^-1 + x^-1*(1+x)^2*y^2").map_err(|e| e.to_string())?;
    let g = laurent::parse("1+x").map_err(|e| e.to_string())?;
    let spec = MutationSpec::new(Variable::Y, g).map_err(|e| e.to_string())?;
    let m = algebraic_mutate(&f, &spec, Strictness::Warn).map_err(|e| e.to_string())?;
    let newt_f = f.newton_polytope().map_err(|e| e.to_string())?;
    let lhs = m.result.newton_polytope().map_err(|e| e.to_string())?;
    let rhs = mutation::mutate(&newt_f, &m.data).map_err(|e| e.to_string())?;
    ensure(lhs == rhs, || format!("Newt = {lhs}, mutate = {rhs}"))?;
    let (pf, pm) = (period_sequence(&f, 8), period_sequence(&m.result, 8));
    ensure(pf == pm, || format!("periods differ: {pf:?} vs {pm:?}"))?;
    let p2 = laurent::parse("x + y + x^-1*y^-1").unwrap();
    let expected: Vec<Rational> = [1, 0, 0, 6, 0, 0, 90].iter().map(|&n| rat(n)).collect();
    ensure(period_sequence(&p2, 6) == expected, || "P^2 period".into())?;
    let elapsed = start.elapsed();
    ensure(elapsed < LAURENT_TIME_LIMIT, || format!("took {elapsed:?}"))?;
    Ok(format!("phi*f = {}, {elapsed:.2?}", m.result))
}

fn p114_divpoly() -> Result<divpoly::DivPoly, String> {
    divpoly::from_polygon(&poly(&[(-6, 2), (6, 2), (0, -1)])).map_err(|e| e.to_string())
}

fn min_of(fs: &[(Rational, i64)]) -> PLFunc {
    let affs: Vec<Affine> = fs
        .iter()
        .map(|(s, c)| Affine::new(s.clone(), rat(*c)))
        .collect();
    PLFunc::min_of((rat(-6), rat(6)), &affs).unwrap()
}

fn smoothing_branch() -> Outcome {
    let dp = p114_divpoly()?;
    ensure(dp.interval() == &(rat(-6), rat(6)), || {
        "box is not [-6,6]".into()
    })?;
    let d = Decomposition {
        label: PointLabel::Infinity,
        phi0: min_of(&[(ratio(-1, 2), 0)]),
        phi1: min_of(&[(rat(1), 1), (rat(0), 1)]),
    };
    ensure(d.phi0.slopes() == vec![ratio(-1, 2)], || {
        "first part slope".into()
    })?;
    let slopes: BTreeSet<Rational> = d.phi1.slopes().into_iter().collect();
    ensure(slopes == BTreeSet::from([rat(0), rat(1)]), || {
        "second part slopes".into()
    })?;
    let phi = dp.coeff(&PointLabel::Infinity).unwrap();
    let report = is_admissible(phi, &d.phi0, &d.phi1).map_err(|e| e.to_string())?;
    ensure(report.admissible, || report.violations.join("; "))?;
    let pipeline = deform::mutation_decomposition(&dp).map_err(|e| e.to_string())?;
    ensure(pipeline == d, || {
        "pipeline decomposition differs from the slope -1/2, {0,1} one".into()
    })?;
    let fiber = general_fiber(&dp, &d).map_err(|e| e.to_string())?;
    let reduced = reduce_to_polygon(&fiber).map_err(|e| e.to_string())?;
    let target = poly(&[(-1, -1), (2, -1), (-1, 2)]).scale(&rat(2));
    ensure(
        lattice_equivalent(&reduced.polygon, &target).is_some(),
        || format!("fiber {} not equivalent to 2 * P^2 dual", reduced.polygon),
    )?;
    Ok(format!(
        "fiber {} ~ 2*conv((-1,-1),(2,-1),(-1,2))",
        reduced.polygon
    ))
}

fn product_branch() -> Outcome {
    let dp = p114_divpoly()?;
    let d = Decomposition {
        label: PointLabel::Infinity,
        phi0: min_of(&[(ratio(1, 2), 1), (rat(0), 1)]),
        phi1: min_of(&[(rat(0), 0), (ratio(-1, 2), 0)]),
    };
    let phi = dp.coeff(&PointLabel::Infinity).unwrap();
    let report = is_admissible(phi, &d.phi0, &d.phi1).map_err(|e| e.to_string())?;
    ensure(report.admissible, || report.violations.join("; "))?;
    let reduced = reduce_to_polygon(&general_fiber(&dp, &d).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let r = &reduced.polygon;
    ensure(r.len() == 4 && area(r) == rat(18), || {
        format!("fiber {r}, area {}", area(r))
    })?;
    let source = diophantine_class(&wt(1, 1, 4)).unwrap();
    let class = fiber_class(r, &source);
    ensure(!class.in_class && class.diophantine != Some(source), || {
        "fiber classified in class".into()
    })?;
    Ok(format!("fiber {r}, area 18, not in class"))
}

fn corollary_predicate(g: &MutationGraph) -> Outcome {
    for e in &g.edges {
        let rep = &g.nodes[e.from].representative;
        let cert = mutation_to_deformation(rep, &e.data, Dilation::Auto)
            .map_err(|err| format!("edge {}->{}: {err}", e.from, e.to))?;
        let failed: Vec<&str> = cert
            .corollary
            .clauses
            .iter()
            .filter(|c| !c.pass)
            .map(|c| c.name)
            .collect();
        ensure(cert.corollary.pass, || {
            format!("edge {}->{}: {failed:?}", e.from, e.to)
        })?;
        ensure(cert.fiber_class.in_class, || {
            format!("edge {}->{}: fiber out of class", e.from, e.to)
        })?;
    }
    Ok(format!("{} certificates", g.edges.len()))
}

fn run_property<S: proptest::strategy::Strategy>(
    name: &str,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    let mut runner = TestRunner::new(Config {
        cases: PROPERTY_CASES,
        failure_persistence: None,
        ..Config::default()
    });
    runner
        .run(&strategy, test)
        .map_err(|e| format!("{name}: {e}"))
}

fn property_suites() -> Outcome {
    use proptest::prelude::*;
    use proptest::prop_assert_eq;
    let start = Instant::now();
    run_property(
        "dual involution",
        common::polygon_around_origin(6, 8),
        |p| {
            let back = dual(&dual(&p).unwrap()).unwrap();
            prop_assert_eq!(back, p);
            Ok(())
        },
    )?;
    run_property(
        "hull of lattice points",
        common::lattice_polygon(6, 8),
        |p| {
            let pts = lattice_points(&p);
            prop_assert!(pts.iter().all(|v| p.contains(v)));
            prop_assert_eq!(Polygon::hull(pts), p);
            Ok(())
        },
    )?;
    run_property(
        "minkowski adjunction",
        (
            common::any_lattice_polygon(4, 6),
            common::any_lattice_polygon(4, 6),
        ),
        |(a, b)| {
            let sum = minkowski_sum(&a, &b);
            prop_assert_eq!(minkowski_difference(&sum, &b), Some(a));
            Ok(())
        },
    )?;
    run_property(
        "area under unimodular maps",
        (common::lattice_polygon(6, 8), common::unimodular()),
        |(p, m)| {
            let image = p.map_linear(&RatMatrix::from_int(m));
            prop_assert_eq!(area(&image), area(&p));
            Ok(())
        },
    )?;
    run_property("parse/render roundtrip", common::laurent(8), |f| {
        let back =
            laurent::parse(&f.to_string()).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(back, f);
        Ok(())
    })?;
    let elapsed = start.elapsed();
    ensure(elapsed < PROPERTY_TIME_LIMIT, || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!("5 suites x {PROPERTY_CASES} cases, {elapsed:.2?}"))
}

fn main() {
    let mut results: Vec<(&str, Outcome)> = Vec::new();
    match markov_graph() {
        Ok((g, elapsed)) => {
            results.push(("AC1 Markov chain reproduction", markov_chain(&g, elapsed)));
            results.push(("AC2 weight formula", weight_formula(&g)));
            results.push(("AC3 Diophantine invariance", diophantine_invariance(&g)));
            results.push(("AC4 duality commutation", duality_commutation(&g)));
            results.push(("AC5 Laurent compatibility", laurent_compatibility()));
            results.push(("AC6 smoothing branch", smoothing_branch()));
            results.push(("AC7 product branch", product_branch()));
            results.push(("AC8 corollary predicate", corollary_predicate(&g)));
        }
        Err(e) => {
            for name in ["AC1", "AC2", "AC3", "AC4", "AC8"] {
                results.push((name, Err(format!("mutation graph failed: {e}"))));
            }
            results.push(("AC5 Laurent compatibility", laurent_compatibility()));
            results.push(("AC6 smoothing branch", smoothing_branch()));
            results.push(("AC7 product branch", product_branch()));
        }
    }
    results.push(("AC9 property suites", property_suites()));

    let mut failed = 0;
    for (name, outcome) in &results {
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name}: {why}");
            }
        }
    }
    println!("{} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
