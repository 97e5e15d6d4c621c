//! Batch verification of a corpus directory against the cross-module
//! invariants.
//!
//! Each `*.json` file in the corpus holds one entry, in one of these forms:
//!
//! - a bare polygon `{"vertices": [["x","y"], ...]}`,
//! - `{"polygon": {"vertices": ...}}`,
//! - `{"weights": [a, b, c]}`, expanded with `triangle_from_weights`,
//! - `{"laurent": {"f": "...", "g": "...", "divide": "y"}}`.
//!
//! Polygon entries are checked for duality commutation over every mutation.
//! Triangles are also checked for Diophantine constancy and deformation
//! certificates. Laurent entries get Newton compatibility and period
//! invariance.

use crate::deform::{mutation_to_deformation, Dilation};
use crate::fano::{self, WeightTriple};
use crate::geom::{dual, Polygon};
use crate::laurent::{self, algebraic_mutate, period_sequence, MutationSpec, Strictness, Variable};
use crate::mutation::{self, dual_map, find_factors, HeightScan, MutationData, PLMap};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Number of period coefficients compared for Laurent entries.
pub const PERIOD_LENGTH: usize = 8;

#[derive(Debug, thiserror::Error)]
pub enum VerifyError {
    #[error("cannot read corpus {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
enum Entry {
    Polygon(Polygon),
    Weights(WeightTriple),
    Laurent(LaurentEntry),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct LaurentEntry {
    f: String,
    g: String,
    divide: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EntryError {
    pub kind: &'static str,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EntryReport {
    pub file: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<EntryError>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BatchReport {
    pub pass: bool,
    pub entries: Vec<EntryReport>,
}

/// Verifies every `*.json` file in `corpus`, in file-name order.
pub fn batch_verify(corpus: &Path) -> Result<BatchReport, VerifyError> {
    let io = |source| VerifyError::Io {
        path: corpus.to_path_buf(),
        source,
    };
    let mut files: Vec<PathBuf> = std::fs::read_dir(corpus)
        .map_err(io)?
        .map(|e| e.map(|e| e.path()))
        .collect::<Result<_, _>>()
        .map_err(io)?;
    files.retain(|p| p.is_file() && p.extension().is_some_and(|e| e == "json"));
    files.sort();
    let entries: Vec<EntryReport> = files.iter().map(|p| verify_file(p)).collect();
    Ok(BatchReport {
        pass: entries.iter().all(|e| e.pass),
        entries,
    })
}

fn verify_file(path: &Path) -> EntryReport {
    let file = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let failed = |kind, message: String| EntryReport {
        file: file.clone(),
        pass: false,
        checks: Vec::new(),
        error: Some(EntryError { kind, message }),
    };
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return failed("io", e.to_string()),
    };
    let entry = match parse_entry(&text) {
        Ok(e) => e,
        Err(e) => return failed("parse", e.to_string()),
    };
    let checks = match entry {
        Entry::Polygon(p) => polygon_checks(&p),
        Entry::Weights(w) => match fano::triangle_from_weights(&w) {
            Ok(t) => polygon_checks(&t),
            Err(e) => return failed("domain", e.to_string()),
        },
        Entry::Laurent(l) => match laurent_checks(&l) {
            Ok(c) => c,
            Err(e) => return failed("parse", e.to_string()),
        },
    };
    EntryReport {
        file,
        pass: checks.iter().all(|c| c.pass),
        checks,
        error: None,
    }
}

fn parse_entry(text: &str) -> Result<Entry, serde_json::Error> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    if value.get("vertices").is_some() {
        return serde_json::from_value(value).map(Entry::Polygon);
    }
    serde_json::from_value(value)
}

fn check(name: &'static str, failures: Vec<String>, total: usize) -> Check {
    Check {
        name,
        pass: failures.is_empty(),
        detail: if failures.is_empty() {
            format!("{total} cases")
        } else {
            failures.join("; ")
        },
    }
}

fn all_mutations(p: &Polygon) -> Result<Vec<MutationData>, mutation::MutationError> {
    let mut found = Vec::new();
    for w in HeightScan::EdgeNormals.candidates(p) {
        found.extend(find_factors(p, &w)?);
    }
    Ok(found)
}

fn polygon_checks(p: &Polygon) -> Vec<Check> {
    if !fano::is_fano(p) {
        return vec![Check {
            name: "fano",
            pass: false,
            detail: format!("{p} is not a Fano polygon"),
        }];
    }
    let mutations = match all_mutations(p) {
        Ok(m) => m,
        Err(e) => {
            return vec![Check {
                name: "mutations",
                pass: false,
                detail: e.to_string(),
            }]
        }
    };
    let mut checks = vec![duality_check(p, &mutations)];
    if p.len() == 3 {
        checks.push(diophantine_check(p, &mutations));
        checks.push(pipeline_check(p, &mutations));
    }
    checks
}

fn duality_check(p: &Polygon, mutations: &[MutationData]) -> Check {
    let mut failures = Vec::new();
    let source_dual = dual(p).expect("Fano polygons have bounded duals");
    for md in mutations {
        let lhs = dual(&dual_map(&PLMap::new(md), &source_dual));
        match (lhs, mutation::mutate(p, md)) {
            (Ok(a), Ok(b)) if a == b => {}
            (a, b) => failures.push(format!("w = {}: {a:?} vs {b:?}", md.w)),
        }
    }
    check("duality", failures, mutations.len())
}

fn diophantine_check(p: &Polygon, mutations: &[MutationData]) -> Check {
    let class_of = |t: &Polygon| fano::weights(t).and_then(|w| fano::diophantine_class(&w));
    let source = match class_of(p) {
        Ok(c) => c,
        Err(e) => return check("diophantine", vec![e.to_string()], 0),
    };
    let mut failures = Vec::new();
    for md in mutations {
        match mutation::mutate(p, md) {
            Ok(q) if q.len() != 3 => {}
            Ok(q) => match class_of(&q) {
                Ok(c) if c == source => {}
                Ok(c) => failures.push(format!("w = {}: class {c:?}", md.w)),
                Err(e) => failures.push(format!("w = {}: {e}", md.w)),
            },
            Err(e) => failures.push(format!("w = {}: {e}", md.w)),
        }
    }
    check("diophantine", failures, mutations.len())
}

fn pipeline_check(p: &Polygon, mutations: &[MutationData]) -> Check {
    let mut failures = Vec::new();
    for md in mutations {
        match mutation_to_deformation(p, md, Dilation::Auto) {
            Ok(cert) if cert.corollary.pass && cert.fiber_class.in_class => {}
            Ok(cert) if !cert.corollary.pass => {
                failures.push(format!("w = {}: corollary fails", md.w))
            }
            Ok(_) => failures.push(format!("w = {}: fiber out of class", md.w)),
            Err(e) => failures.push(format!("w = {}: {e}", md.w)),
        }
    }
    check("pipeline", failures, mutations.len())
}

fn laurent_checks(entry: &LaurentEntry) -> Result<Vec<Check>, laurent::LaurentError> {
    let f: laurent::LaurentPoly = entry.f.parse()?;
    let g: laurent::LaurentPoly = entry.g.parse()?;
    let divide: Variable = entry
        .divide
        .parse()
        .map_err(laurent::LaurentError::InvalidSpec)?;
    let spec = MutationSpec::new(divide, g)?;
    let mutated = match algebraic_mutate(&f, &spec, Strictness::Strict) {
        Ok(m) => m,
        Err(e) => {
            return Ok(vec![Check {
                name: "newton",
                pass: false,
                detail: e.to_string(),
            }])
        }
    };
    let newton = match (f.newton_polytope(), mutated.result.newton_polytope()) {
        (Ok(src), Ok(img)) => match mutation::mutation_hull(&src, &mutated.data) {
            Ok(q) if q == img => Vec::new(),
            Ok(q) => vec![format!("Newt(phi*f) = {img}, mutated Newt(f) = {q}")],
            Err(e) => vec![e.to_string()],
        },
        (Err(e), _) | (_, Err(e)) => vec![e.to_string()],
    };
    let before = period_sequence(&f, PERIOD_LENGTH);
    let after = period_sequence(&mutated.result, PERIOD_LENGTH);
    let period = if before == after {
        Vec::new()
    } else {
        vec![format!("periods differ: {before:?} vs {after:?}")]
    };
    Ok(vec![
        check("newton", newton, 1),
        check("period", period, PERIOD_LENGTH + 1),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corpus(files: &[(&str, &str)]) -> tempfile::TempDir {
        let dir = tempfile::tempdir().unwrap();
        for (name, body) in files {
            std::fs::write(dir.path().join(name), body).unwrap();
        }
        dir
    }

    #[test]
    fn empty_corpus_passes_with_no_entries() {
        let dir = corpus(&[]);
        let report = batch_verify(dir.path()).unwrap();
        assert!(report.pass);
        assert!(report.entries.is_empty());
    }

    #[test]
    fn corrupted_file_gives_parse_entry() {
        let dir = corpus(&[
            ("a.json", r#"{"weights": [1, 1, 4]}"#),
            ("b.json", r#"{"vertices": [["0", "oops"]]}"#),
            ("notes.txt", "ignored"),
        ]);
        let report = batch_verify(dir.path()).unwrap();
        assert!(!report.pass);
        assert_eq!(report.entries.len(), 2);
        assert!(report.entries[0].pass);
        assert_eq!(report.entries[1].file, "b.json");
        assert_eq!(report.entries[1].error.as_ref().unwrap().kind, "parse");
    }

    #[test]
    fn entries_run_their_checks() {
        let dir = corpus(&[
            (
                "p2.json",
                r#"{"polygon": {"vertices": [["1","0"],["0","1"],["-1","-1"]]}}"#,
            ),
            (
                "laurent.json",
                r#"{"laurent": {"f": "y^-1 + x^-1*(1+x)^2*y^2", "g": "1+x", "divide": "y"}}"#,
            ),
            (
                "hexagon.json",
                r#"{"vertices": [["1","0"],["1","1"],["0","1"],["-1","0"],["-1","-1"],["0","-1"]]}"#,
            ),
        ]);
        let report = batch_verify(dir.path()).unwrap();
        let names: Vec<Vec<&str>> = report
            .entries
            .iter()
            .map(|e| e.checks.iter().map(|c| c.name).collect())
            .collect();
        assert_eq!(
            names,
            vec![
                vec!["duality"],
                vec!["newton", "period"],
                vec!["duality", "diophantine", "pipeline"]
            ]
        );
        assert!(report.pass, "{report:?}");
    }

    #[test]
    fn non_fano_polygon_fails() {
        let dir = corpus(&[(
            "bad.json",
            r#"{"vertices": [["2","0"],["0","2"],["-2","-2"]]}"#,
        )]);
        let report = batch_verify(dir.path()).unwrap();
        assert!(!report.pass);
        assert_eq!(report.entries[0].checks[0].name, "fano");
    }

    #[test]
    fn missing_directory_is_an_error() {
        assert!(batch_verify(Path::new("/nonexistent/corpus")).is_err());
    }
}
