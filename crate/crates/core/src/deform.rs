//! One-parameter deformations from admissible Minkowski decompositions, and
//! the pipeline turning a combinatorial mutation into such a deformation.

use crate::divpoly::{self, Affine, DivPoly, DivPolyError, PLFunc, PointLabel};
use crate::fano::{self, DiophantineClass, FanoError, WeightTriple};
use crate::geom::{dual, lattice_equivalent, LatticeMap, Polygon, RatMatrix, Vec2};
use crate::mutation::{self, MutationData, MutationError};
use crate::rational::{self, RatStr, Rational};
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DeformError {
    #[error(transparent)]
    Mutation(#[from] MutationError),
    #[error(transparent)]
    DivPoly(#[from] DivPolyError),
    #[error(transparent)]
    Fano(#[from] FanoError),
    #[error("dilation {0} does not make the dual polygon a lattice polygon")]
    NoLatticeDilation(u64),
    #[error("decomposition is not admissible: {}", .0.join("; "))]
    Inadmissible(Vec<String>),
    #[error("general fiber is not lattice-equivalent to the dilated dual of the mutation")]
    FiberMismatch,
    #[error("no reduction to two coefficients: {0}")]
    IrreducibleToToric(String),
    #[error("functions have different domains")]
    DomainMismatch,
    #[error("label {0} already present")]
    LabelCollision(PointLabel),
    #[error("label {0} is not present")]
    MissingLabel(PointLabel),
    #[error("the factor must be a segment with the origin as a vertex")]
    UnsupportedFactor,
    #[error("coordinates exceed 64-bit range")]
    Overflow,
}

/// `Φ_P = Φ⁰ + Φ¹` at the point `label`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    pub label: PointLabel,
    pub phi0: PLFunc,
    pub phi1: PLFunc,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdmissibilityReport {
    pub admissible: bool,
    pub violations: Vec<String>,
}

/// Checks that the parts sum to `phi`, have lattice graphs, and that on
/// each affine piece of `phi` at most one part has a non-integral slope.
pub fn is_admissible(
    phi: &PLFunc,
    phi0: &PLFunc,
    phi1: &PLFunc,
) -> Result<AdmissibilityReport, DeformError> {
    if phi.domain() != phi0.domain() || phi.domain() != phi1.domain() {
        return Err(DeformError::DomainMismatch);
    }
    let mut violations = Vec::new();
    let sum = phi0.add(phi1)?;
    let sums_up = sum.same_function(phi);
    if !sums_up {
        violations.push(format!("parts sum to {sum}, not {phi}"));
    }
    for (name, part) in [("first", phi0), ("second", phi1)] {
        if !part.is_lattice_graph() {
            violations.push(format!("{name} part {part} has a non-lattice graph vertex"));
        }
    }
    if sums_up {
        for piece in phi.pieces() {
            let s0 = phi0.slope_right_of(&piece.lo);
            let s1 = phi1.slope_right_of(&piece.lo);
            if !rational::is_integer(&s0) && !rational::is_integer(&s1) {
                violations.push(format!(
                    "both parts have non-integral slopes ({}, {}) on [{}, {}]",
                    rational::format(&s0),
                    rational::format(&s1),
                    rational::format(&piece.lo),
                    rational::format(&piece.hi)
                ));
            }
        }
    }
    Ok(AdmissibilityReport {
        admissible: violations.is_empty(),
        violations,
    })
}

fn fresh_param(dp: &DivPoly) -> PointLabel {
    (0..)
        .map(|i| match i {
            0 => PointLabel::Param("s".into()),
            i => PointLabel::Param(format!("s{i}")),
        })
        .find(|l| dp.coeff(l).is_none())
        .expect("finitely many labels")
}

/// Replaces `Φ_P` by `Φ⁰` at `P` and `Φ¹` at the new point `label`.
pub fn general_fiber_at(
    dp: &DivPoly,
    d: &Decomposition,
    label: PointLabel,
) -> Result<DivPoly, DeformError> {
    let phi = dp
        .coeff(&d.label)
        .ok_or_else(|| DeformError::MissingLabel(d.label.clone()))?;
    if dp.coeff(&label).is_some() {
        return Err(DeformError::LabelCollision(label));
    }
    let report = is_admissible(phi, &d.phi0, &d.phi1)?;
    if !report.admissible {
        return Err(DeformError::Inadmissible(report.violations));
    }
    let mut out = dp.clone();
    out.insert(d.label.clone(), d.phi0.clone())?;
    out.insert(label.clone(), d.phi1.clone())?;
    out.set_split(Some((d.label.clone(), label)));
    Ok(out)
}

/// [`general_fiber_at`] a fresh parameter label `s` (or `s1`, `s2`, ...).
pub fn general_fiber(dp: &DivPoly, d: &Decomposition) -> Result<DivPoly, DeformError> {
    general_fiber_at(dp, d, fresh_param(dp))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Shift {
    pub from: PointLabel,
    pub to: PointLabel,
    pub affine: Affine,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Reduction {
    pub shifts: Vec<Shift>,
    /// Every shift has integral slope and intercept, so the reduced
    /// divisorial polytope describes an isomorphic polarized variety.
    pub integral_shifts: bool,
    pub divpoly: DivPoly,
    pub polygon: Polygon,
}

fn has_integral_slopes(f: &PLFunc) -> bool {
    f.slopes().iter().all(rational::is_integer)
}

fn is_split_pair(dp: &DivPoly, a: &PointLabel, b: &PointLabel) -> bool {
    dp.split()
        .is_some_and(|(x, y)| (x == a && y == b) || (x == b && y == a))
}

/// The move that resolves a split point: an affine coefficient away from
/// the split pair is absorbed by the new label of the pair.
fn split_shift(dp: &DivPoly) -> Option<Shift> {
    let (a, b) = dp.split()?;
    let from = dp
        .nontrivial_labels()
        .into_iter()
        .find(|l| *l != a && *l != b && dp.coeff(l).and_then(PLFunc::as_affine).is_some())?;
    Some(Shift {
        from: from.clone(),
        to: b.clone(),
        affine: dp.coeff(from)?.as_affine()?,
    })
}

/// Picks the next shift once no split move applies. An affine coefficient
/// with integral slope and lattice graph moves to the first other
/// nontrivial label; failing that, any affine coefficient moves to a label
/// outside its split pair, preferring targets with integral slopes.
fn next_shift(dp: &DivPoly) -> Option<Shift> {
    let labels: Vec<PointLabel> = dp.nontrivial_labels().into_iter().cloned().collect();
    let affine_at = |l: &PointLabel| dp.coeff(l).and_then(PLFunc::as_affine);
    let integral = labels.iter().find(|l| {
        let f = dp.coeff(l).unwrap();
        f.as_affine().is_some() && has_integral_slopes(f) && f.is_lattice_graph()
    });
    if let Some(from) = integral {
        let to = labels.iter().find(|l| *l != from)?;
        return Some(Shift {
            from: from.clone(),
            to: to.clone(),
            affine: affine_at(from)?,
        });
    }
    for from in &labels {
        let Some(affine) = affine_at(from) else {
            continue;
        };
        let mut targets: Vec<&PointLabel> = labels
            .iter()
            .filter(|t| *t != from && !is_split_pair(dp, from, t))
            .collect();
        targets.sort_by_key(|t| !has_integral_slopes(dp.coeff(t).unwrap()));
        if let Some(to) = targets.first() {
            return Some(Shift {
                from: from.clone(),
                to: (*to).clone(),
                affine,
            });
        }
    }
    None
}

/// Resolves the split point first, then moves affine coefficients between
/// labels until at most two are nontrivial, and reads off the polygon.
pub fn reduce_to_polygon(dp: &DivPoly) -> Result<Reduction, DeformError> {
    let mut cur = dp.clone();
    let mut shifts = Vec::new();
    loop {
        let shift = if let Some(shift) = split_shift(&cur) {
            shift
        } else if cur.nontrivial_labels().len() > 2 {
            next_shift(&cur).ok_or_else(|| {
                DeformError::IrreducibleToToric(format!(
                    "{} nontrivial coefficients and no admissible affine shift",
                    cur.nontrivial_labels().len()
                ))
            })?
        } else {
            break;
        };
        cur = cur.shift_affine(&shift.from, &shift.to, &shift.affine)?;
        shifts.push(shift);
    }
    if let Some(l) = cur
        .nontrivial_labels()
        .into_iter()
        .find(|l| !cur.coeff(l).unwrap().is_lattice_graph())
    {
        return Err(DeformError::IrreducibleToToric(format!(
            "remaining coefficient at {l} has a non-lattice graph"
        )));
    }
    let polygon = divpoly::to_polygon(&cur)?;
    let integral_shifts = shifts.iter().all(|s| {
        rational::is_integer(&s.affine.slope) && rational::is_integer(&s.affine.intercept)
    });
    Ok(Reduction {
        shifts,
        integral_shifts,
        divpoly: cur,
        polygon,
    })
}

/// Fan data of a fiber polygon: whether the polygon spanned by its
/// primitive inner normals is a fake weighted projective plane with the
/// expected Diophantine class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiberClass {
    pub in_class: bool,
    pub weights: Option<WeightTriple>,
    pub multiplicity: Option<u64>,
    pub diophantine: Option<DiophantineClass>,
}

pub fn fiber_class(fiber: &Polygon, expected: &DiophantineClass) -> FiberClass {
    let fake = fano::fan_polygon(fiber)
        .filter(|f| f.len() == 3)
        .and_then(|f| fano::fake_plane(&f).ok());
    let diophantine = fake.and_then(|f| fano::diophantine_class(&f.weights).ok());
    FiberClass {
        in_class: diophantine.as_ref() == Some(expected),
        weights: fake.map(|f| f.weights),
        multiplicity: fake.map(|f| f.multiplicity),
        diophantine,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Clause {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

/// Whether the decomposition has the shape forced by a mutation: an affine
/// first part and a second part with slopes `{0, k}`, `k` an integer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorollaryReport {
    pub pass: bool,
    pub clauses: Vec<Clause>,
    pub common_slope: Option<RatStr>,
    pub offsets: Vec<RatStr>,
    pub matches_factor_length: Option<bool>,
}

pub fn corollary_check(d: &Decomposition, factor_length: Option<u64>) -> CorollaryReport {
    let fmt_all = |v: &[Rational]| {
        v.iter()
            .map(rational::format)
            .collect::<Vec<_>>()
            .join(", ")
    };
    let affine0 = d.phi0.as_affine();
    let slopes1 = d.phi1.slopes();
    let integral = slopes1.iter().all(rational::is_integer);
    let has_zero = slopes1.iter().any(Zero::is_zero);
    let clauses = vec![
        Clause {
            name: "first part affine",
            pass: affine0.is_some(),
            detail: format!("slopes {{{}}}", fmt_all(&d.phi0.slopes())),
        },
        Clause {
            name: "exactly two affine pieces",
            pass: slopes1.len() == 2,
            detail: format!("{} pieces", slopes1.len()),
        },
        Clause {
            name: "integral slopes",
            pass: integral,
            detail: format!("slopes {{{}}}", fmt_all(&slopes1)),
        },
        Clause {
            name: "one slope is zero",
            pass: has_zero,
            detail: format!("slopes {{{}}}", fmt_all(&slopes1)),
        },
    ];
    let pass = clauses.iter().all(|c| c.pass);
    let matches_factor_length = match (pass, factor_length) {
        (true, Some(t)) => Some(
            slopes1
                .iter()
                .any(|s| s.abs() == Rational::from_integer(t.into())),
        ),
        _ => None,
    };
    CorollaryReport {
        pass,
        clauses,
        common_slope: affine0.map(|a| RatStr(a.slope)),
        offsets: slopes1.into_iter().map(RatStr).collect(),
        matches_factor_length,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dilation {
    /// Smallest factor making both the dual and the mutated dual lattice
    /// polygons.
    Auto,
    Fixed(u64),
}

impl FromStr for Dilation {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "auto" => Ok(Dilation::Auto),
            n => match n.parse::<u64>() {
                Ok(a) if a > 0 => Ok(Dilation::Fixed(a)),
                _ => Err(format!(
                    "dilation must be 'auto' or a positive integer, got {s:?}"
                )),
            },
        }
    }
}

impl fmt::Display for Dilation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dilation::Auto => f.write_str("auto"),
            Dilation::Fixed(a) => write!(f, "{a}"),
        }
    }
}

/// All stages of the mutation-to-deformation pipeline, each re-checkable.
/// Polygons after `normalization` live in coordinates where the height
/// function is `(0, -1)` and the factor is `conv(0, t e1)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeformationCertificate {
    pub source: Polygon,
    pub mutation: MutationData,
    pub mutated: Polygon,
    pub factor_length: u64,
    /// Unimodular map on `N`; the dual side transforms by its inverse
    /// transpose.
    pub normalization: LatticeMap,
    pub dilation: u64,
    pub divpoly: DivPoly,
    pub decomposition: Decomposition,
    pub admissibility: AdmissibilityReport,
    pub general_fiber: DivPoly,
    pub reduction: Reduction,
    /// The dilated dual of the normalized mutated polygon.
    pub target: Polygon,
    /// Lattice map taking the reduced fiber polygon onto `target`.
    pub witness: LatticeMap,
    pub fiber_class: FiberClass,
    /// Whether `Φ_0` with each part of the decomposition is again
    /// admissible, i.e. the family extends over the projective line.
    pub p1_extension: [bool; 2],
    pub corollary: CorollaryReport,
}

/// Unimodular `A` with `A f = e1` and second row `-w`, so that `w` reads
/// `(0, -1)` on the dual side.
fn normalization(w: &Vec2, f: &Vec2) -> Result<[[i64; 2]; 2], DeformError> {
    let (w1, w2) = w.to_i64().ok_or(DeformError::Overflow)?;
    let (f1, f2) = f.to_i64().ok_or(DeformError::Overflow)?;
    let eg = f1.extended_gcd(&f2);
    debug_assert_eq!(eg.gcd.abs(), 1);
    let (r1, r2) = (eg.x * eg.gcd, eg.y * eg.gcd);
    let a = [[r1, r2], [-w1, -w2]];
    debug_assert_eq!((a[0][0] * a[1][1] - a[0][1] * a[1][0]).abs(), 1);
    Ok(a)
}

fn lcm_of_vertex_denominators(p: &Polygon) -> Result<u64, DeformError> {
    let coords = p.vertices().iter().flat_map(|v| [&v.x, &v.y]);
    rational::lcm_of_denominators(coords)
        .to_u64()
        .ok_or(DeformError::Overflow)
}

/// `Φ⁰` is the linear function with the slope of `Φ_Infinity` just right of
/// zero, and `Φ¹ = Φ_Infinity - Φ⁰`.
pub fn mutation_decomposition(dp: &DivPoly) -> Result<Decomposition, DeformError> {
    let phi = dp
        .coeff(&PointLabel::Infinity)
        .ok_or(DeformError::MissingLabel(PointLabel::Infinity))?;
    let zero = Rational::zero();
    let affine = Affine::new(phi.slope_right_of(&zero), Rational::zero());
    let phi0 = PLFunc::affine(dp.interval().clone(), &affine)?;
    let phi1 = phi.sub_affine(&affine);
    let phi1 = PLFunc::new(phi1.breaks().to_vec(), phi1.values().to_vec())?;
    Ok(Decomposition {
        label: PointLabel::Infinity,
        phi0,
        phi1,
    })
}

pub fn mutation_to_deformation(
    p: &Polygon,
    md: &MutationData,
    dilation: Dilation,
) -> Result<DeformationCertificate, DeformError> {
    let mutated = mutation::mutate(p, md)?;
    let end = match md.factor.vertices() {
        [a, b] if a.is_zero() => b.clone(),
        [a, b] if b.is_zero() => a.clone(),
        _ => return Err(DeformError::UnsupportedFactor),
    };
    let t = md.factor_length().to_u64().ok_or(DeformError::Overflow)?;
    let direction = end.scale(&Rational::from_integer(t.into()).recip());
    let a = normalization(&md.w, &direction)?;
    let to_normal = RatMatrix::from_int(a);
    let source_n = p.map_linear(&to_normal);
    let mutated_n = mutated.map_linear(&to_normal);
    let source_dual = dual(&source_n).map_err(|_| MutationError::NotFano)?;
    let mutated_dual = dual(&mutated_n).map_err(|_| MutationError::NotFano)?;

    let scale = match dilation {
        Dilation::Auto => {
            let (x, y) = (
                lcm_of_vertex_denominators(&source_dual)?,
                lcm_of_vertex_denominators(&mutated_dual)?,
            );
            x.lcm(&y)
        }
        Dilation::Fixed(k) => {
            if k % lcm_of_vertex_denominators(&source_dual)? != 0 {
                return Err(DeformError::NoLatticeDilation(k));
            }
            k
        }
    };
    let k = Rational::from_integer(scale.into());
    let dp = divpoly::from_polygon(&source_dual.scale(&k))?;
    let decomposition = mutation_decomposition(&dp)?;
    let phi_inf = dp
        .coeff(&PointLabel::Infinity)
        .expect("from_polygon labels");
    let admissibility = is_admissible(phi_inf, &decomposition.phi0, &decomposition.phi1)?;
    if !admissibility.admissible {
        return Err(DeformError::Inadmissible(admissibility.violations));
    }
    let fiber = general_fiber(&dp, &decomposition)?;
    let reduction = reduce_to_polygon(&fiber)?;
    let target = mutated_dual.scale(&k);
    let witness =
        lattice_equivalent(&reduction.polygon, &target).ok_or(DeformError::FiberMismatch)?;

    let expected = fano::diophantine_class(&fano::weights(p)?)?;
    let phi_zero = dp.coeff(&PointLabel::Zero).expect("from_polygon labels");
    let extends = |part: &PLFunc| -> Result<bool, DeformError> {
        Ok(is_admissible(&phi_zero.add(part)?, phi_zero, part)?.admissible)
    };
    let p1_extension = [extends(&decomposition.phi0)?, extends(&decomposition.phi1)?];
    let corollary = corollary_check(&decomposition, Some(t));
    Ok(DeformationCertificate {
        source: p.clone(),
        mutation: md.clone(),
        mutated,
        factor_length: t,
        normalization: LatticeMap::linear(a),
        dilation: scale,
        divpoly: dp,
        decomposition,
        admissibility,
        general_fiber: fiber,
        fiber_class: fiber_class(&reduction.polygon, &expected),
        reduction,
        target,
        witness,
        p1_extension,
        corollary,
    })
}
