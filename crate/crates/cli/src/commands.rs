use crate::args::{Command, DivpolySource, Input, Source};
use crate::{CliError, Report, MAX_SCAN_VAR};
use polymut_core::deform::{self, corollary_check, Decomposition, Dilation};
use polymut_core::divpoly::{self, DivPoly};
use polymut_core::fano::{self, markov_tree, WeightTriple};
use polymut_core::geom::{self, Polygon, Vec2};
use polymut_core::laurent::{self, LaurentPoly, MutationSpec, Strictness, Variable};
use polymut_core::mutation::{self, HeightScan, MutationData};
use polymut_core::rational::RatStr;
use polymut_core::{verify, Error};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};
use std::io::Read;

/// Recorded with every mutation certificate.
const CONVENTION: &str = "height function w with factor conv(0, t * (-w_y, w_x)); \
                          w = (0,-1) corresponds to y -> y/g and w = (-1,0) to x -> x/g";

fn domain<E: Into<Error>>(e: E) -> CliError {
    CliError::Domain(e.into())
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("core types serialize")
}

fn read_input(input: &Input) -> Result<String, CliError> {
    let trimmed = input.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        return Ok(input.clone());
    }
    if input == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| CliError::Input(format!("stdin: {e}")))?;
        return Ok(s);
    }
    std::fs::read_to_string(input).map_err(|e| CliError::Input(format!("{input}: {e}")))
}

fn parse_json<T: DeserializeOwned>(input: &Input) -> Result<T, CliError> {
    serde_json::from_str(&read_input(input)?).map_err(|e| CliError::Input(e.to_string()))
}

fn scan() -> Result<HeightScan, CliError> {
    match std::env::var(MAX_SCAN_VAR) {
        Err(_) => Ok(HeightScan::EdgeNormals),
        Ok(v) => v.parse().map(HeightScan::Box).map_err(|_| {
            CliError::Usage(format!(
                "{MAX_SCAN_VAR} must be a nonnegative integer, got {v:?}"
            ))
        }),
    }
}

fn source_polygon(source: &Source) -> Result<Polygon, CliError> {
    match (&source.polygon, &source.weights) {
        (Some(p), _) => parse_json(p),
        (None, Some(w)) => fano::triangle_from_weights(w).map_err(domain),
        (None, None) => Err(CliError::Usage(
            "one of --polygon or --weights is required".into(),
        )),
    }
}

fn source_weights(source: &Source) -> Result<WeightTriple, CliError> {
    match (&source.polygon, &source.weights) {
        (_, Some(w)) => Ok(*w),
        (Some(p), None) => fano::weights(&parse_json(p)?).map_err(domain),
        (None, None) => Err(CliError::Usage(
            "one of --polygon or --weights is required".into(),
        )),
    }
}

fn all_factors(p: &Polygon, w: Option<&Vec2>) -> Result<Vec<MutationData>, CliError> {
    let ws = match w {
        Some(w) => vec![w.clone()],
        None => scan()?.candidates(p),
    };
    let mut found = Vec::new();
    for w in &ws {
        found.extend(mutation::find_factors(p, w).map_err(domain)?);
    }
    Ok(found)
}

fn laurent_poly(s: &str) -> Result<LaurentPoly, CliError> {
    s.parse().map_err(domain)
}

pub(crate) fn execute(command: &Command) -> Result<Report, CliError> {
    match command {
        Command::Hull { points } => {
            let pts: Vec<Vec2> = parse_json(points)?;
            let hull = geom::convex_hull(pts).map_err(domain)?;
            Ok(Report::ok(to_json(&hull)))
        }
        Command::Dual(arg) => {
            let p: Polygon = parse_json(&arg.polygon)?;
            Ok(Report::ok(to_json(&geom::dual(&p).map_err(domain)?)))
        }
        Command::Weights(arg) => {
            let p: Polygon = parse_json(&arg.polygon)?;
            let w = fano::weights(&p).map_err(domain)?;
            Ok(Report::ok(json!({ "weights": w })))
        }
        Command::Multiplicity(arg) => {
            let p: Polygon = parse_json(&arg.polygon)?;
            let m = fano::multiplicity(&p).map_err(domain)?;
            Ok(Report::ok(json!({ "multiplicity": m })))
        }
        Command::Triangle { weights } => {
            let t = fano::triangle_from_weights(weights).map_err(domain)?;
            Ok(Report::ok(to_json(&t)))
        }
        Command::Factors { polygon, w } => {
            let p: Polygon = parse_json(&polygon.polygon)?;
            Ok(Report::ok(to_json(&all_factors(&p, w.as_ref())?)))
        }
        Command::Mutate { polygon, w, t } => mutate(&parse_json(&polygon.polygon)?, w, *t),
        Command::Graph { source, depth } => {
            let p = source_polygon(source)?;
            let g = mutation::mutation_graph(&p, *depth, scan()?).map_err(domain)?;
            Ok(Report::ok(to_json(&g)))
        }
        Command::Markov { depth } => {
            let tree = markov_tree(*depth).map_err(domain)?;
            let triples: Vec<[u64; 3]> = tree.iter().map(|t| t.get()).collect();
            Ok(Report::ok(to_json(&triples)))
        }
        Command::Diophantine { source } => {
            let w = source_weights(source)?;
            Ok(Report::ok(to_json(
                &fano::diophantine_class(&w).map_err(domain)?,
            )))
        }
        Command::LaurentMutate {
            f,
            g,
            divide,
            strict,
        } => laurent_mutate(f, g, *divide, *strict),
        Command::Period { f, dmax } => {
            let seq = laurent::period_sequence(&laurent_poly(f)?, *dmax);
            let seq: Vec<RatStr> = seq.into_iter().map(RatStr).collect();
            Ok(Report::ok(to_json(&seq)))
        }
        Command::Divpoly { source } => divpoly_command(source),
        Command::Deform {
            source,
            w,
            t,
            dilation,
        } => deform_command(source, w.as_ref(), *t, *dilation),
        Command::CheckCorollary { input, t } => check_corollary(input, *t),
        Command::BatchVerify { corpus } => {
            let report = verify::batch_verify(corpus).map_err(domain)?;
            Ok(Report {
                pass: report.pass,
                doc: to_json(&report),
            })
        }
    }
}

fn mutate(p: &Polygon, w: &Vec2, t: u64) -> Result<Report, CliError> {
    let md = mutation::mutation_data(p, w, t).map_err(domain)?;
    let q = mutation::mutate(p, &md).map_err(domain)?;
    let heights: Vec<Value> = p
        .canonical()
        .vertices()
        .iter()
        .map(|v| json!({"vertex": v, "height": RatStr(v.pair(w))}))
        .collect();
    let mut certificate = to_json(&md);
    let obj = certificate
        .as_object_mut()
        .expect("mutation data is an object");
    obj.insert("heights".into(), Value::Array(heights));
    obj.insert("convention".into(), json!(CONVENTION));
    Ok(Report::ok(
        json!({"polygon": q, "certificate": certificate}),
    ))
}

fn laurent_mutate(f: &str, g: &str, divide: Variable, strict: bool) -> Result<Report, CliError> {
    let f = laurent_poly(f)?;
    let spec = MutationSpec::new(divide, laurent_poly(g)?).map_err(domain)?;
    let strictness = if strict {
        Strictness::Strict
    } else {
        Strictness::Warn
    };
    let m = laurent::algebraic_mutate(&f, &spec, strictness).map_err(domain)?;
    Ok(Report::ok(json!({
        "f": f,
        "result": m.result,
        "newton_before": f.newton_polytope().map_err(domain)?,
        "newton_after": m.result.newton_polytope().map_err(domain)?,
        "mutation": m.data,
        "convention": CONVENTION,
        "warnings": m.warnings,
    })))
}

fn divpoly_command(source: &DivpolySource) -> Result<Report, CliError> {
    match (&source.polygon, &source.divpoly) {
        (Some(p), _) => {
            let p: Polygon = parse_json(p)?;
            let dp = divpoly::from_polygon(&p).map_err(domain)?;
            let report = divpoly::validate(&dp);
            Ok(Report::ok(json!({"divpoly": dp, "validation": report})))
        }
        (None, Some(d)) => {
            let dp: DivPoly = parse_json(d)?;
            let report = divpoly::validate(&dp);
            let polygon = divpoly::to_polygon(&dp).map_err(domain)?;
            Ok(Report {
                pass: report.is_valid(),
                doc: json!({"polygon": polygon, "validation": report}),
            })
        }
        (None, None) => Err(CliError::Usage(
            "one of --polygon or --divpoly is required".into(),
        )),
    }
}

fn deform_command(
    source: &Source,
    w: Option<&Vec2>,
    t: u64,
    dilation: Dilation,
) -> Result<Report, CliError> {
    let p = source_polygon(source)?;
    let md = match w {
        Some(w) => mutation::mutation_data(&p, w, t).map_err(domain)?,
        None => all_factors(&p, None)?
            .into_iter()
            .next()
            .ok_or_else(|| CliError::Input(format!("{p} admits no mutation")))?,
    };
    let cert = deform::mutation_to_deformation(&p, &md, dilation).map_err(domain)?;
    Ok(Report::ok(to_json(&cert)))
}

fn check_corollary(input: &Input, t: Option<u64>) -> Result<Report, CliError> {
    let value: Value = parse_json(input)?;
    let (d, factor_length) = match value.get("decomposition") {
        Some(d) => {
            let length = value.get("factor_length").and_then(Value::as_u64);
            (d.clone(), t.or(length))
        }
        None => (value, t),
    };
    let d: Decomposition = serde_json::from_value(d).map_err(|e| CliError::Input(e.to_string()))?;
    let report = corollary_check(&d, factor_length);
    Ok(Report {
        pass: report.pass,
        doc: to_json(&report),
    })
}
