//! Divisorial polytopes over the projective line for toric surfaces with a
//! one-dimensional subtorus action.

use crate::geom::{Polygon, Vec2};
use crate::rational::{self, rat, RatStr, Rational};
use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DivPolyError {
    #[error("polygon is not a lattice polygon")]
    NotLattice,
    #[error("polygon is not full-dimensional")]
    NotFullDimensional,
    #[error("breakpoints must be strictly increasing with one value each: {0}")]
    BadBreakpoints(String),
    #[error("function is not concave")]
    NotConcave,
    #[error("coefficient domains differ from the box")]
    DomainMismatch,
    #[error("{0} coefficients are nonzero, at most two allowed")]
    TooManyNontrivialCoefficients(usize),
    #[error("upper and lower envelopes cross")]
    EmptyFiber,
    #[error("label {0} is not present")]
    MissingLabel(PointLabel),
}

/// `u -> slope * u + intercept`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Affine {
    pub slope: Rational,
    pub intercept: Rational,
}

impl Affine {
    pub fn new(slope: Rational, intercept: Rational) -> Self {
        Self { slope, intercept }
    }

    pub fn zero() -> Self {
        Self::new(Rational::zero(), Rational::zero())
    }

    pub fn eval(&self, u: &Rational) -> Rational {
        &self.slope * u + &self.intercept
    }

    pub fn is_zero(&self) -> bool {
        self.slope.is_zero() && self.intercept.is_zero()
    }
}

impl fmt::Display for Affine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}*u + {}",
            rational::format(&self.slope),
            rational::format(&self.intercept)
        )
    }
}

#[derive(Serialize, Deserialize)]
struct AffineRepr {
    slope: RatStr,
    intercept: RatStr,
}

impl Serialize for Affine {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        AffineRepr {
            slope: RatStr(self.slope.clone()),
            intercept: RatStr(self.intercept.clone()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Affine {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = AffineRepr::deserialize(d)?;
        Ok(Affine::new(r.slope.0, r.intercept.0))
    }
}

/// One affine piece of a piecewise-linear function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Piece {
    pub lo: Rational,
    pub hi: Rational,
    pub affine: Affine,
}

/// A concave piecewise-linear function on a closed interval, stored by its
/// breakpoints (including both endpoints) and values there. Breakpoints
/// where the slope does not change are dropped.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PLFunc {
    breaks: Vec<Rational>,
    values: Vec<Rational>,
}

impl PLFunc {
    pub fn new(breaks: Vec<Rational>, values: Vec<Rational>) -> Result<Self, DivPolyError> {
        if breaks.len() < 2 || breaks.len() != values.len() {
            return Err(DivPolyError::BadBreakpoints(format!(
                "{} breakpoints, {} values",
                breaks.len(),
                values.len()
            )));
        }
        if breaks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(DivPolyError::BadBreakpoints(
                "not strictly increasing".into(),
            ));
        }
        let slopes: Vec<Rational> = (0..breaks.len() - 1)
            .map(|i| (&values[i + 1] - &values[i]) / (&breaks[i + 1] - &breaks[i]))
            .collect();
        if slopes.windows(2).any(|s| s[1] > s[0]) {
            return Err(DivPolyError::NotConcave);
        }
        let n = breaks.len();
        let keep: Vec<usize> = (0..n)
            .filter(|&i| i == 0 || i == n - 1 || slopes[i - 1] != slopes[i])
            .collect();
        Ok(Self {
            breaks: keep.iter().map(|&i| breaks[i].clone()).collect(),
            values: keep.iter().map(|&i| values[i].clone()).collect(),
        })
    }

    pub fn affine(domain: (Rational, Rational), a: &Affine) -> Result<Self, DivPolyError> {
        let (lo, hi) = domain;
        let (vl, vh) = (a.eval(&lo), a.eval(&hi));
        Self::new(vec![lo, hi], vec![vl, vh])
    }

    pub fn zero(domain: (Rational, Rational)) -> Result<Self, DivPolyError> {
        Self::affine(domain, &Affine::zero())
    }

    /// Pointwise minimum of affine functions, which is always concave.
    pub fn min_of(domain: (Rational, Rational), fs: &[Affine]) -> Result<Self, DivPolyError> {
        let (lo, hi) = domain;
        let mut points: BTreeSet<Rational> = BTreeSet::from([lo.clone(), hi.clone()]);
        for (i, f) in fs.iter().enumerate() {
            for g in &fs[i + 1..] {
                if f.slope != g.slope {
                    let u = (&g.intercept - &f.intercept) / (&f.slope - &g.slope);
                    if u > lo && u < hi {
                        points.insert(u);
                    }
                }
            }
        }
        let eval = |u: &Rational| fs.iter().map(|f| f.eval(u)).min().expect("nonempty");
        let breaks: Vec<Rational> = points.into_iter().collect();
        let values = breaks.iter().map(eval).collect();
        Self::new(breaks, values)
    }

    pub fn domain(&self) -> (Rational, Rational) {
        (self.breaks[0].clone(), self.breaks.last().unwrap().clone())
    }

    pub fn breaks(&self) -> &[Rational] {
        &self.breaks
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn slopes(&self) -> Vec<Rational> {
        self.pieces().into_iter().map(|p| p.affine.slope).collect()
    }

    pub fn pieces(&self) -> Vec<Piece> {
        self.breaks
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(b, v)| {
                let slope = (&v[1] - &v[0]) / (&b[1] - &b[0]);
                let intercept = &v[0] - &slope * &b[0];
                Piece {
                    lo: b[0].clone(),
                    hi: b[1].clone(),
                    affine: Affine::new(slope, intercept),
                }
            })
            .collect()
    }

    /// The affine function when there is a single piece.
    pub fn as_affine(&self) -> Option<Affine> {
        match self.pieces().as_slice() {
            [p] => Some(p.affine.clone()),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Zero::is_zero)
    }

    /// Value at `u`, which must lie in the domain.
    pub fn eval(&self, u: &Rational) -> Rational {
        let (lo, hi) = self.domain();
        assert!(*u >= lo && *u <= hi, "evaluation outside the domain");
        let i = self.breaks.partition_point(|b| b < u);
        if i < self.breaks.len() && self.breaks[i] == *u {
            return self.values[i].clone();
        }
        let (b0, b1) = (&self.breaks[i - 1], &self.breaks[i]);
        let (v0, v1) = (&self.values[i - 1], &self.values[i]);
        v0 + (v1 - v0) * (u - b0) / (b1 - b0)
    }

    /// Slope on the piece starting at `u` (or ending there, at the right
    /// endpoint).
    pub fn slope_right_of(&self, u: &Rational) -> Rational {
        let pieces = self.pieces();
        pieces
            .iter()
            .find(|p| p.lo <= *u && *u < p.hi)
            .unwrap_or_else(|| pieces.last().unwrap())
            .affine
            .slope
            .clone()
    }

    /// Graph vertices lie in `Z x Z`.
    pub fn is_lattice_graph(&self) -> bool {
        self.breaks
            .iter()
            .chain(&self.values)
            .all(rational::is_integer)
    }

    pub fn integral(&self) -> Rational {
        self.breaks
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(b, v)| (&b[1] - &b[0]) * (&v[0] + &v[1]) / rat(2))
            .sum()
    }

    fn combine(
        &self,
        other: &PLFunc,
        op: impl Fn(Rational, Rational) -> Rational,
    ) -> Result<PLFunc, DivPolyError> {
        if self.domain() != other.domain() {
            return Err(DivPolyError::DomainMismatch);
        }
        let points: BTreeSet<&Rational> = self.breaks.iter().chain(&other.breaks).collect();
        let breaks: Vec<Rational> = points.into_iter().cloned().collect();
        let values = breaks
            .iter()
            .map(|u| op(self.eval(u), other.eval(u)))
            .collect();
        PLFunc::new(breaks, values)
    }

    pub fn add(&self, other: &PLFunc) -> Result<PLFunc, DivPolyError> {
        self.combine(other, |a, b| a + b)
    }

    /// Fails with `NotConcave` when the difference is not concave.
    pub fn sub(&self, other: &PLFunc) -> Result<PLFunc, DivPolyError> {
        self.combine(other, |a, b| a - b)
    }

    pub fn add_affine(&self, a: &Affine) -> PLFunc {
        Self {
            breaks: self.breaks.clone(),
            values: self
                .breaks
                .iter()
                .zip(&self.values)
                .map(|(u, v)| v + a.eval(u))
                .collect(),
        }
    }

    pub fn sub_affine(&self, a: &Affine) -> PLFunc {
        self.add_affine(&Affine::new(-&a.slope, -&a.intercept))
    }

    /// Equality as functions: values agree at all breakpoints of both.
    pub fn same_function(&self, other: &PLFunc) -> bool {
        self.domain() == other.domain()
            && self
                .breaks
                .iter()
                .chain(&other.breaks)
                .all(|u| self.eval(u) == other.eval(u))
    }
}

impl fmt::Display for PLFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pts: Vec<String> = self
            .breaks
            .iter()
            .zip(&self.values)
            .map(|(u, v)| format!("{}:{}", rational::format(u), rational::format(v)))
            .collect();
        write!(f, "[{}]", pts.join(", "))
    }
}

#[derive(Serialize, Deserialize)]
struct PLFuncRepr {
    breaks: Vec<RatStr>,
    values: Vec<RatStr>,
}

impl Serialize for PLFunc {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PLFuncRepr {
            breaks: self.breaks.iter().cloned().map(RatStr).collect(),
            values: self.values.iter().cloned().map(RatStr).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PLFunc {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = PLFuncRepr::deserialize(d)?;
        PLFunc::new(
            r.breaks.into_iter().map(|x| x.0).collect(),
            r.values.into_iter().map(|x| x.0).collect(),
        )
        .map_err(serde::de::Error::custom)
    }
}

/// A closed point of the projective line. Serialized as `"0"`, `"inf"` or
/// the parameter's name.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PointLabel {
    Zero,
    Infinity,
    Param(String),
}

impl fmt::Display for PointLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PointLabel::Zero => f.write_str("0"),
            PointLabel::Infinity => f.write_str("inf"),
            PointLabel::Param(name) => f.write_str(name),
        }
    }
}

impl std::str::FromStr for PointLabel {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "0" => Ok(PointLabel::Zero),
            "inf" => Ok(PointLabel::Infinity),
            "" => Err("empty point label".into()),
            name => Ok(PointLabel::Param(name.to_string())),
        }
    }
}

impl Serialize for PointLabel {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PointLabel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

/// An interval together with concave coefficient functions at finitely
/// many labelled points; unlabelled points carry the zero function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivPoly {
    interval: (Rational, Rational),
    coeffs: BTreeMap<PointLabel, PLFunc>,
    /// The labels sharing a split coefficient in a general fiber.
    split: Option<(PointLabel, PointLabel)>,
}

impl DivPoly {
    pub fn new(
        interval: (Rational, Rational),
        coeffs: BTreeMap<PointLabel, PLFunc>,
    ) -> Result<Self, DivPolyError> {
        if interval.0 >= interval.1 || coeffs.values().any(|c| c.domain() != interval) {
            return Err(DivPolyError::DomainMismatch);
        }
        Ok(Self {
            interval,
            coeffs,
            split: None,
        })
    }

    pub fn interval(&self) -> &(Rational, Rational) {
        &self.interval
    }

    pub fn coeffs(&self) -> &BTreeMap<PointLabel, PLFunc> {
        &self.coeffs
    }

    pub fn coeff(&self, label: &PointLabel) -> Option<&PLFunc> {
        self.coeffs.get(label)
    }

    pub fn split(&self) -> Option<&(PointLabel, PointLabel)> {
        self.split.as_ref()
    }

    pub(crate) fn set_split(&mut self, pair: Option<(PointLabel, PointLabel)>) {
        self.split = pair;
    }

    pub(crate) fn insert(&mut self, label: PointLabel, f: PLFunc) -> Result<(), DivPolyError> {
        if f.domain() != self.interval {
            return Err(DivPolyError::DomainMismatch);
        }
        self.coeffs.insert(label, f);
        Ok(())
    }

    /// Labels whose coefficient is not identically zero.
    pub fn nontrivial_labels(&self) -> Vec<&PointLabel> {
        self.coeffs
            .iter()
            .filter(|(_, f)| !f.is_zero())
            .map(|(l, _)| l)
            .collect()
    }

    /// The degree function `u -> sum of coefficients`.
    pub fn degree(&self) -> PLFunc {
        let zero = PLFunc::zero(self.interval.clone()).expect("nonempty interval");
        self.coeffs
            .values()
            .try_fold(zero, |acc, f| acc.add(f))
            .expect("sums of concave functions on one domain")
    }

    /// Moves the affine function `a` from one label to another; the degree
    /// function is unchanged.
    pub fn shift_affine(
        &self,
        from: &PointLabel,
        to: &PointLabel,
        a: &Affine,
    ) -> Result<DivPoly, DivPolyError> {
        for l in [from, to] {
            if !self.coeffs.contains_key(l) {
                return Err(DivPolyError::MissingLabel(l.clone()));
            }
        }
        let mut out = self.clone();
        let f = out.coeffs[from].sub_affine(a);
        out.coeffs.insert(from.clone(), f);
        let g = out.coeffs[to].add_affine(a);
        out.coeffs.insert(to.clone(), g);
        Ok(out)
    }
}

#[derive(Serialize, Deserialize)]
struct DivPolyRepr {
    #[serde(rename = "box")]
    interval: [RatStr; 2],
    coeffs: BTreeMap<PointLabel, PLFunc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    split: Option<(PointLabel, PointLabel)>,
}

impl Serialize for DivPoly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        DivPolyRepr {
            interval: [
                RatStr(self.interval.0.clone()),
                RatStr(self.interval.1.clone()),
            ],
            coeffs: self.coeffs.clone(),
            split: self.split.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DivPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = DivPolyRepr::deserialize(d)?;
        let [lo, hi] = r.interval;
        let mut dp = DivPoly::new((lo.0, hi.0), r.coeffs).map_err(serde::de::Error::custom)?;
        dp.split = r.split;
        Ok(dp)
    }
}

/// Divisorial polytope of a lattice polygon for the projection onto the
/// first coordinate: the upper envelope sits at `Zero`, the negated lower
/// envelope at `Infinity`.
pub fn from_polygon(delta: &Polygon) -> Result<DivPoly, DivPolyError> {
    if delta.dim() < 2 {
        return Err(DivPolyError::NotFullDimensional);
    }
    if !delta.is_lattice() {
        return Err(DivPolyError::NotLattice);
    }
    let us: BTreeSet<Rational> = delta.vertices().iter().map(|v| v.x.clone()).collect();
    let breaks: Vec<Rational> = us.into_iter().collect();
    let e1 = Vec2::int(1, 0);
    let (mut upper, mut lower) = (Vec::new(), Vec::new());
    for u in &breaks {
        let sec = delta
            .line_section(&e1, u)
            .expect("u within the polygon's range");
        let ys = sec.vertices().iter().map(|v| &v.y);
        upper.push(ys.clone().max().unwrap().clone());
        lower.push(-ys.min().unwrap());
    }
    let interval = (breaks[0].clone(), breaks.last().unwrap().clone());
    let coeffs = BTreeMap::from([
        (PointLabel::Zero, PLFunc::new(breaks.clone(), upper)?),
        (PointLabel::Infinity, PLFunc::new(breaks, lower)?),
    ]);
    DivPoly::new(interval, coeffs)
}

/// The polygon `{(u, x) : -lower(u) <= x <= upper(u)}`. `Zero` is the upper
/// envelope and `Infinity` the lower; a parameter label fills whichever
/// slot is free, upper first.
pub fn to_polygon(dp: &DivPoly) -> Result<Polygon, DivPolyError> {
    let nontrivial = dp.nontrivial_labels();
    if nontrivial.len() > 2 {
        return Err(DivPolyError::TooManyNontrivialCoefficients(
            nontrivial.len(),
        ));
    }
    let zero = PLFunc::zero(dp.interval.clone())?;
    let mut upper: Option<&PLFunc> = None;
    let mut lower: Option<&PLFunc> = None;
    let mut params = Vec::new();
    for l in &nontrivial {
        match l {
            PointLabel::Zero => upper = Some(&dp.coeffs[*l]),
            PointLabel::Infinity => lower = Some(&dp.coeffs[*l]),
            PointLabel::Param(_) => params.push(&dp.coeffs[*l]),
        }
    }
    for f in params {
        if upper.is_none() {
            upper = Some(f);
        } else {
            lower = Some(f);
        }
    }
    let (upper, lower) = (upper.unwrap_or(&zero), lower.unwrap_or(&zero));
    let us: BTreeSet<&Rational> = upper.breaks().iter().chain(lower.breaks()).collect();
    let mut points = Vec::new();
    for u in us {
        let (top, bottom) = (upper.eval(u), -lower.eval(u));
        if top < bottom {
            return Err(DivPolyError::EmptyFiber);
        }
        points.push(Vec2::new(u.clone(), top));
        points.push(Vec2::new(u.clone(), bottom));
    }
    Ok(Polygon::hull(points))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    InteriorDegree,
    EndpointDegree,
    LatticeGraph,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    /// Informational remarks, e.g. endpoints of degree zero.
    pub notes: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Positive degree inside the box, nonnegative degree (principal when zero)
/// at its endpoints, and lattice graphs for every coefficient.
pub fn validate(dp: &DivPoly) -> ValidationReport {
    let mut violations = Vec::new();
    let mut notes = Vec::new();
    let deg = dp.degree();
    for u in [&dp.interval.0, &dp.interval.1] {
        let d = deg.eval(u);
        if d.is_negative() {
            violations.push(Violation {
                kind: ViolationKind::EndpointDegree,
                detail: format!(
                    "degree {} < 0 at u = {}",
                    rational::format(&d),
                    rational::format(u)
                ),
            });
        } else if d.is_zero() {
            notes.push(format!(
                "endpoint: principal at u = {}",
                rational::format(u)
            ));
        }
    }
    for piece in deg.pieces() {
        let mid = (&piece.lo + &piece.hi) / rat(2);
        if !piece.affine.eval(&mid).is_positive() {
            violations.push(Violation {
                kind: ViolationKind::InteriorDegree,
                detail: format!(
                    "degree not positive on ({}, {})",
                    rational::format(&piece.lo),
                    rational::format(&piece.hi)
                ),
            });
        }
    }
    for (label, f) in &dp.coeffs {
        if !f.is_lattice_graph() {
            violations.push(Violation {
                kind: ViolationKind::LatticeGraph,
                detail: format!("coefficient at {label} has a non-lattice graph vertex: {f}"),
            });
        }
    }
    ValidationReport { violations, notes }
}
