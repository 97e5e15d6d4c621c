//! Exact 2D polyhedral primitives on the lattices `N` and `M`.
//!
//! Every coordinate is a [`Rational`]. Points and segments are ordinary
//! [`Polygon`] values of dimension 0 and 1, so slice and factor arithmetic
//! never has to special-case them. Half-planes are only materialised on
//! demand (see [`Polygon::constraints`]).

use crate::rational::{self, ceil, floor, is_integer, rat, RatStr, Rational};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Neg, Sub};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GeomError {
    #[error("the origin is not in the strict interior of the polygon")]
    OriginNotInterior,
    #[error("polygon is not full-dimensional")]
    NotFullDimensional,
    #[error("zero vector has no primitive form")]
    ZeroVector,
    #[error("vector {0} is not integral")]
    NotIntegral(Box<Vec2>),
    #[error("empty point set")]
    Empty,
}

/// A vector of `N_Q` or `M_Q`. Ordering is lexicographic `(x, y)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Vec2 {
    pub x: Rational,
    pub y: Rational,
}

impl Vec2 {
    pub fn new(x: Rational, y: Rational) -> Self {
        Self { x, y }
    }

    pub fn int(x: i64, y: i64) -> Self {
        Self::new(rat(x), rat(y))
    }

    pub fn zero() -> Self {
        Self::int(0, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    /// The pairing `<self, other>` (usual dot product).
    pub fn pair(&self, other: &Vec2) -> Rational {
        &self.x * &other.x + &self.y * &other.y
    }

    /// `det[self other]`.
    pub fn cross(&self, other: &Vec2) -> Rational {
        &self.x * &other.y - &self.y * &other.x
    }

    pub fn scale(&self, k: &Rational) -> Vec2 {
        Vec2::new(&self.x * k, &self.y * k)
    }

    /// Rotation by a quarter turn counterclockwise.
    pub fn perp(&self) -> Vec2 {
        Vec2::new(-&self.y, self.x.clone())
    }

    pub fn is_lattice(&self) -> bool {
        is_integer(&self.x) && is_integer(&self.y)
    }

    pub fn to_int(&self) -> Option<(BigInt, BigInt)> {
        self.is_lattice()
            .then(|| (self.x.numer().clone(), self.y.numer().clone()))
    }

    pub fn to_i64(&self) -> Option<(i64, i64)> {
        Some((rational::to_i64(&self.x)?, rational::to_i64(&self.y)?))
    }

    pub fn from_int(x: &BigInt, y: &BigInt) -> Vec2 {
        Vec2::new(
            Rational::from_integer(x.clone()),
            Rational::from_integer(y.clone()),
        )
    }
}

impl Add for &Vec2 {
    type Output = Vec2;
    fn add(self, o: &Vec2) -> Vec2 {
        Vec2::new(&self.x + &o.x, &self.y + &o.y)
    }
}

impl Sub for &Vec2 {
    type Output = Vec2;
    fn sub(self, o: &Vec2) -> Vec2 {
        Vec2::new(&self.x - &o.x, &self.y - &o.y)
    }
}

impl Neg for &Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-&self.x, -&self.y)
    }
}

impl fmt::Display for Vec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({},{})",
            rational::format(&self.x),
            rational::format(&self.y)
        )
    }
}

impl Serialize for Vec2 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [RatStr(self.x.clone()), RatStr(self.y.clone())].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Vec2 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let [x, y] = <[RatStr; 2]>::deserialize(d)?;
        Ok(Vec2::new(x.0, y.0))
    }
}

/// Divides an integral nonzero vector by the gcd of its entries.
pub fn primitivize(v: &Vec2) -> Result<Vec2, GeomError> {
    let (x, y) = v
        .to_int()
        .ok_or_else(|| GeomError::NotIntegral(Box::new(v.clone())))?;
    if x.is_zero() && y.is_zero() {
        return Err(GeomError::ZeroVector);
    }
    let g = x.gcd(&y);
    Ok(Vec2::from_int(&(x / &g), &(y / &g)))
}

pub fn is_primitive(v: &Vec2) -> bool {
    match v.to_int() {
        Some((x, y)) => x.gcd(&y).is_one(),
        None => false,
    }
}

/// Closed half-plane `normal . x <= offset`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalfPlane {
    pub normal: Vec2,
    pub offset: Rational,
}

impl HalfPlane {
    pub fn new(normal: Vec2, offset: Rational) -> Self {
        Self { normal, offset }
    }

    pub fn contains(&self, p: &Vec2) -> bool {
        self.normal.pair(p) <= self.offset
    }
}

/// Intersection of finitely many half-planes whose intersection is known to
/// be bounded. Returns `None` when it is empty.
///
/// Every vertex of a nonempty bounded region is cut out by two constraints
/// with independent normals, so the candidates are all pairwise line
/// intersections that satisfy every constraint.
pub fn intersect_half_planes(constraints: &[HalfPlane]) -> Option<Polygon> {
    let mut feasible = Vec::new();
    for (i, a) in constraints.iter().enumerate() {
        for b in &constraints[i + 1..] {
            let det = a.normal.cross(&b.normal);
            if det.is_zero() {
                continue;
            }
            let x = (&a.offset * &b.normal.y - &b.offset * &a.normal.y) / &det;
            let y = (&a.normal.x * &b.offset - &b.normal.x * &a.offset) / &det;
            let p = Vec2::new(x, y);
            if constraints.iter().all(|c| c.contains(&p)) {
                feasible.push(p);
            }
        }
    }
    if feasible.is_empty() {
        None
    } else {
        Some(Polygon::hull(feasible))
    }
}

/// A convex polygon in vertex representation, counterclockwise, possibly
/// degenerate (a point or a segment).
///
/// Equality compares vertex cycles up to rotation, so two polygons are equal
/// exactly when they are the same point set.
#[derive(Debug, Clone)]
pub struct Polygon {
    vertices: Vec<Vec2>,
}

impl Polygon {
    /// Convex hull, returned in canonical order (lexicographically smallest
    /// vertex first, then counterclockwise).
    pub fn hull(mut points: Vec<Vec2>) -> Polygon {
        assert!(!points.is_empty(), "convex hull of an empty point set");
        points.sort();
        points.dedup();
        if points.len() <= 2 {
            return Polygon { vertices: points };
        }
        // Andrew's monotone chain; collinear points are dropped.
        let turn = |o: &Vec2, a: &Vec2, b: &Vec2| (a - o).cross(&(b - o));
        let mut lower: Vec<Vec2> = Vec::new();
        for p in &points {
            while lower.len() >= 2
                && !turn(&lower[lower.len() - 2], &lower[lower.len() - 1], p).is_positive()
            {
                lower.pop();
            }
            lower.push(p.clone());
        }
        let mut upper: Vec<Vec2> = Vec::new();
        for p in points.iter().rev() {
            while upper.len() >= 2
                && !turn(&upper[upper.len() - 2], &upper[upper.len() - 1], p).is_positive()
            {
                upper.pop();
            }
            upper.push(p.clone());
        }
        lower.pop();
        upper.pop();
        lower.extend(upper);
        Polygon { vertices: lower }
    }

    /// Keeps the given cyclic order if it already lists the vertices of a
    /// strictly convex polygon counterclockwise; otherwise falls back to
    /// [`Polygon::hull`].
    pub fn from_vertices(points: Vec<Vec2>) -> Polygon {
        let n = points.len();
        if n >= 3 {
            let strictly_convex_ccw = (0..n).all(|i| {
                let (a, b, c) = (&points[i], &points[(i + 1) % n], &points[(i + 2) % n]);
                (b - a).cross(&(c - b)).is_positive()
            });
            let winding: Rational = (0..n).map(|i| points[i].cross(&points[(i + 1) % n])).sum();
            // A simple convex cycle winds exactly once.
            let hull = Polygon::hull(points.clone());
            if strictly_convex_ccw && winding.is_positive() && hull.vertices.len() == n {
                return Polygon { vertices: points };
            }
            return hull;
        }
        Polygon::hull(points)
    }

    pub fn point(p: Vec2) -> Polygon {
        Polygon { vertices: vec![p] }
    }

    pub fn segment(a: Vec2, b: Vec2) -> Polygon {
        Polygon::hull(vec![a, b])
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn dim(&self) -> usize {
        match self.vertices.len() {
            1 => 0,
            2 => 1,
            _ => 2,
        }
    }

    pub fn is_lattice(&self) -> bool {
        self.vertices.iter().all(Vec2::is_lattice)
    }

    /// Rotated so that the lexicographically smallest vertex comes first.
    pub fn canonical(&self) -> Polygon {
        let start = (0..self.vertices.len())
            .min_by(|&a, &b| self.vertices[a].cmp(&self.vertices[b]))
            .unwrap_or(0);
        let mut v = self.vertices.clone();
        v.rotate_left(start);
        Polygon { vertices: v }
    }

    /// Directed edges `(v_i, v_{i+1})` of a full-dimensional polygon.
    pub fn edges(&self) -> impl Iterator<Item = (&Vec2, &Vec2)> {
        let n = self.vertices.len();
        (0..n).map(move |i| (&self.vertices[i], &self.vertices[(i + 1) % n]))
    }

    /// Half-plane description. Degenerate polygons use pairs of opposite
    /// inequalities for their affine hull.
    pub fn constraints(&self) -> Vec<HalfPlane> {
        match self.vertices.as_slice() {
            [] => Vec::new(),
            [p] => vec![
                HalfPlane::new(Vec2::int(1, 0), p.x.clone()),
                HalfPlane::new(Vec2::int(-1, 0), -&p.x),
                HalfPlane::new(Vec2::int(0, 1), p.y.clone()),
                HalfPlane::new(Vec2::int(0, -1), -&p.y),
            ],
            [p, q] => {
                let d = q - p;
                let n = d.perp();
                vec![
                    HalfPlane::new(n.clone(), n.pair(p)),
                    HalfPlane::new(-&n, -n.pair(p)),
                    HalfPlane::new(d.clone(), d.pair(q)),
                    HalfPlane::new(-&d, -d.pair(p)),
                ]
            }
            _ => self
                .edges()
                .map(|(a, b)| {
                    // Outward normal of a counterclockwise edge.
                    let n = -&(b - a).perp();
                    let c = n.pair(a);
                    HalfPlane::new(n, c)
                })
                .collect(),
        }
    }

    pub fn contains(&self, p: &Vec2) -> bool {
        self.constraints().iter().all(|c| c.contains(p))
    }

    pub fn contains_polygon(&self, other: &Polygon) -> bool {
        other.vertices.iter().all(|v| self.contains(v))
    }

    /// True iff `p` lies in the topological interior (requires dimension 2).
    pub fn contains_strictly(&self, p: &Vec2) -> bool {
        self.dim() == 2
            && self
                .constraints()
                .iter()
                .all(|c| c.normal.pair(p) < c.offset)
    }

    pub fn translate(&self, t: &Vec2) -> Polygon {
        Polygon {
            vertices: self.vertices.iter().map(|v| v + t).collect(),
        }
    }

    /// Dilation `k * P`; `k` must be positive.
    pub fn scale(&self, k: &Rational) -> Polygon {
        assert!(k.is_positive(), "dilation factor must be positive");
        Polygon {
            vertices: self.vertices.iter().map(|v| v.scale(k)).collect(),
        }
    }

    /// Image under the linear map with rows `m`, re-normalised to
    /// counterclockwise order.
    pub fn map_linear(&self, m: &RatMatrix) -> Polygon {
        Polygon::hull(self.vertices.iter().map(|v| m.apply(v)).collect())
    }

    pub fn map_affine(&self, map: &LatticeMap) -> Polygon {
        Polygon::hull(self.vertices.iter().map(|v| map.apply(v)).collect())
    }

    pub fn bounding_box(&self) -> (Vec2, Vec2) {
        let min_x = self.vertices.iter().map(|v| &v.x).min().unwrap().clone();
        let max_x = self.vertices.iter().map(|v| &v.x).max().unwrap().clone();
        let min_y = self.vertices.iter().map(|v| &v.y).min().unwrap().clone();
        let max_y = self.vertices.iter().map(|v| &v.y).max().unwrap().clone();
        (Vec2::new(min_x, min_y), Vec2::new(max_x, max_y))
    }

    /// Intersection with the line `{x : <normal, x> = value}`.
    pub fn line_section(&self, normal: &Vec2, value: &Rational) -> Option<Polygon> {
        let mut cs = self.constraints();
        cs.push(HalfPlane::new(normal.clone(), value.clone()));
        cs.push(HalfPlane::new(-normal, -value));
        intersect_half_planes(&cs)
    }

    pub fn intersect(&self, other: &Polygon) -> Option<Polygon> {
        let mut cs = self.constraints();
        cs.extend(other.constraints());
        intersect_half_planes(&cs)
    }
}

impl PartialEq for Polygon {
    fn eq(&self, other: &Self) -> bool {
        self.canonical().vertices == other.canonical().vertices
    }
}

impl Eq for Polygon {}

impl Hash for Polygon {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.canonical().vertices.hash(state)
    }
}

impl fmt::Display for Polygon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("conv(")?;
        for (i, v) in self.vertices.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str(")")
    }
}

#[derive(Serialize, Deserialize)]
struct PolygonJson {
    vertices: Vec<Vec2>,
}

impl Serialize for Polygon {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PolygonJson {
            vertices: self.canonical().vertices,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Polygon {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = PolygonJson::deserialize(d)?;
        if raw.vertices.is_empty() {
            return Err(serde::de::Error::custom(
                "polygon needs at least one vertex",
            ));
        }
        Ok(Polygon::from_vertices(raw.vertices))
    }
}

pub fn convex_hull(points: Vec<Vec2>) -> Result<Polygon, GeomError> {
    if points.is_empty() {
        return Err(GeomError::Empty);
    }
    Ok(Polygon::hull(points))
}

/// `P* = {u : <u, v> >= -1 for all v in P}`.
pub fn dual(p: &Polygon) -> Result<Polygon, GeomError> {
    if p.dim() < 2 {
        return Err(GeomError::NotFullDimensional);
    }
    if !p.contains_strictly(&Vec2::zero()) {
        return Err(GeomError::OriginNotInterior);
    }
    let verts = p
        .edges()
        .map(|(a, b)| {
            // Solve <u,a> = -1 = <u,b>.
            let det = a.cross(b);
            Vec2::new((&a.y - &b.y) / &det, (&b.x - &a.x) / &det)
        })
        .collect();
    Ok(Polygon::hull(verts))
}

pub fn minkowski_sum(a: &Polygon, b: &Polygon) -> Polygon {
    let pts = a
        .vertices
        .iter()
        .flat_map(|p| b.vertices.iter().map(move |q| p + q))
        .collect();
    Polygon::hull(pts)
}

/// `{x : x + F subset A}`, or `None` when no such point exists.
pub fn minkowski_difference(a: &Polygon, f: &Polygon) -> Option<Polygon> {
    let cs: Vec<HalfPlane> = a
        .constraints()
        .into_iter()
        .map(|c| {
            let reach = f.vertices.iter().map(|v| c.normal.pair(v)).max().unwrap();
            HalfPlane::new(c.normal, &c.offset - reach)
        })
        .collect();
    intersect_half_planes(&cs)
}

/// Exact `(min, max)` of `<w, v>` over `P`.
pub fn height_range(p: &Polygon, w: &Vec2) -> (Rational, Rational) {
    let hs = p.vertices.iter().map(|v| w.pair(v));
    let (mut lo, mut hi) = (None::<Rational>, None::<Rational>);
    for h in hs {
        lo = Some(match lo {
            Some(l) if l <= h => l,
            _ => h.clone(),
        });
        hi = Some(match hi {
            Some(u) if u >= h => u,
            _ => h,
        });
    }
    (lo.unwrap(), hi.unwrap())
}

/// Some lattice point `x` with `<w, x> = 1`, for primitive integral `w`.
fn unit_preimage(w: &Vec2) -> Vec2 {
    let (a, b) = w.to_int().expect("height function must be integral");
    let eg = a.extended_gcd(&b);
    let sign = if eg.gcd.is_negative() {
        -BigInt::one()
    } else {
        BigInt::one()
    };
    debug_assert!(eg.gcd.abs().is_one(), "height function must be primitive");
    Vec2::from_int(&(eg.x * &sign), &(eg.y * &sign))
}

/// `w_h(P) = conv(H_{w,h} cap P cap N)`: the hull of the lattice points of
/// `P` at height `h`. `w` must be primitive.
pub fn slice(p: &Polygon, w: &Vec2, h: &BigInt) -> Option<Polygon> {
    let hq = Rational::from_integer(h.clone());
    let section = p.line_section(w, &hq)?;
    let base = unit_preimage(w).scale(&hq);
    let dir = w.perp();
    let norm = dir.pair(&dir);
    let params: Vec<Rational> = section
        .vertices
        .iter()
        .map(|v| (v - &base).pair(&dir) / &norm)
        .collect();
    let lo = ceil(params.iter().min().unwrap());
    let hi = floor(params.iter().max().unwrap());
    if lo > hi {
        return None;
    }
    let at = |k: &BigInt| &base + &dir.scale(&Rational::from_integer(k.clone()));
    Some(Polygon::hull(vec![at(&lo), at(&hi)]))
}

/// All integer points of `P`, sorted lexicographically.
pub fn lattice_points(p: &Polygon) -> Vec<Vec2> {
    let (lo, hi) = p.bounding_box();
    let mut out = Vec::new();
    let mut y = ceil(&lo.y);
    let y_max = floor(&hi.y);
    let e2 = Vec2::int(0, 1);
    while y <= y_max {
        let yq = Rational::from_integer(y.clone());
        if let Some(sec) = p.line_section(&e2, &yq) {
            let x_lo = ceil(sec.vertices.iter().map(|v| &v.x).min().unwrap());
            let x_hi = floor(sec.vertices.iter().map(|v| &v.x).max().unwrap());
            let mut x = x_lo;
            while x <= x_hi {
                out.push(Vec2::new(Rational::from_integer(x.clone()), yq.clone()));
                x += 1;
            }
        }
        y += 1;
    }
    out.sort();
    out
}

/// Euclidean area (shoelace).
pub fn area(p: &Polygon) -> Rational {
    if p.dim() < 2 {
        return Rational::zero();
    }
    let twice: Rational = p.edges().map(|(a, b)| a.cross(b)).sum();
    twice.abs() / rat(2)
}

/// Rational 2x2 matrix acting on column vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatMatrix(pub [[Rational; 2]; 2]);

impl RatMatrix {
    pub fn apply(&self, v: &Vec2) -> Vec2 {
        let m = &self.0;
        Vec2::new(
            &m[0][0] * &v.x + &m[0][1] * &v.y,
            &m[1][0] * &v.x + &m[1][1] * &v.y,
        )
    }

    pub fn det(&self) -> Rational {
        let m = &self.0;
        &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0]
    }

    pub fn inverse(&self) -> Option<RatMatrix> {
        let d = self.det();
        if d.is_zero() {
            return None;
        }
        let m = &self.0;
        Some(RatMatrix([
            [&m[1][1] / &d, -&m[0][1] / &d],
            [-&m[1][0] / &d, &m[0][0] / &d],
        ]))
    }

    pub fn mul(&self, o: &RatMatrix) -> RatMatrix {
        let (a, b) = (&self.0, &o.0);
        let e = |i: usize, j: usize| &a[i][0] * &b[0][j] + &a[i][1] * &b[1][j];
        RatMatrix([[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]])
    }

    pub fn transpose(&self) -> RatMatrix {
        let m = &self.0;
        RatMatrix([
            [m[0][0].clone(), m[1][0].clone()],
            [m[0][1].clone(), m[1][1].clone()],
        ])
    }

    /// Matrix with the given columns.
    pub fn from_columns(c0: &Vec2, c1: &Vec2) -> RatMatrix {
        RatMatrix([[c0.x.clone(), c1.x.clone()], [c0.y.clone(), c1.y.clone()]])
    }

    pub fn from_int(m: [[i64; 2]; 2]) -> RatMatrix {
        RatMatrix(m.map(|row| row.map(rat)))
    }

    pub fn to_int(&self) -> Option<[[i64; 2]; 2]> {
        let m = &self.0;
        let e = |r: &Rational| rational::to_i64(r);
        Some([[e(&m[0][0])?, e(&m[0][1])?], [e(&m[1][0])?, e(&m[1][1])?]])
    }
}

/// Affine lattice automorphism `x -> U x + t` with `|det U| = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeMap {
    pub matrix: [[i64; 2]; 2],
    pub translation: [i64; 2],
}

impl LatticeMap {
    pub fn identity() -> Self {
        Self {
            matrix: [[1, 0], [0, 1]],
            translation: [0, 0],
        }
    }

    pub fn linear(matrix: [[i64; 2]; 2]) -> Self {
        Self {
            matrix,
            translation: [0, 0],
        }
    }

    pub fn apply(&self, v: &Vec2) -> Vec2 {
        let p = RatMatrix::from_int(self.matrix).apply(v);
        &p + &Vec2::int(self.translation[0], self.translation[1])
    }

    pub fn det(&self) -> i64 {
        let m = self.matrix;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn inverse(&self) -> LatticeMap {
        let m = self.matrix;
        let d = self.det();
        let inv = [[m[1][1] * d, -m[0][1] * d], [-m[1][0] * d, m[0][0] * d]];
        let t = self.translation;
        LatticeMap {
            matrix: inv,
            translation: [
                -(inv[0][0] * t[0] + inv[0][1] * t[1]),
                -(inv[1][0] * t[0] + inv[1][1] * t[1]),
            ],
        }
    }

    /// `self` after `first`.
    pub fn compose(&self, first: &LatticeMap) -> LatticeMap {
        let (a, b) = (self.matrix, first.matrix);
        let m = [
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ];
        let t = first.translation;
        LatticeMap {
            matrix: m,
            translation: [
                a[0][0] * t[0] + a[0][1] * t[1] + self.translation[0],
                a[1][0] * t[0] + a[1][1] * t[1] + self.translation[1],
            ],
        }
    }
}

/// Finds `U` unimodular and `t` integral with `U P + t = Q`.
///
/// Brute force over vertex matchings: the two edges at the first vertex of
/// `P` form a basis of `Q^2`, and an affine map must send them to the two
/// edges at some vertex of `Q`, in one of two orders.
pub fn lattice_equivalent(p: &Polygon, q: &Polygon) -> Option<LatticeMap> {
    let n = p.len();
    if n != q.len() {
        return None;
    }
    if p.dim() < 2 {
        return degenerate_equivalence(p, q);
    }
    let pv = p.vertices();
    let qv = q.vertices();
    let e = RatMatrix::from_columns(&(&pv[1] - &pv[0]), &(&pv[n - 1] - &pv[0]));
    let e_inv = e.inverse()?;
    let mut target: Vec<&Vec2> = qv.iter().collect();
    target.sort();
    for j in 0..n {
        let next = &qv[(j + 1) % n];
        let prev = &qv[(j + n - 1) % n];
        for (f1, f2) in [(next, prev), (prev, next)] {
            let f = RatMatrix::from_columns(&(f1 - &qv[j]), &(f2 - &qv[j]));
            let u = f.mul(&e_inv);
            if !u.det().abs().is_one() {
                continue;
            }
            let Some(m) = u.to_int() else { continue };
            let t = &qv[j] - &u.apply(&pv[0]);
            let Some((tx, ty)) = t.to_i64() else { continue };
            let map = LatticeMap {
                matrix: m,
                translation: [tx, ty],
            };
            let mut image: Vec<Vec2> = pv.iter().map(|v| map.apply(v)).collect();
            image.sort();
            if image.iter().zip(&target).all(|(a, b)| a == *b) {
                return Some(map);
            }
        }
    }
    None
}

/// Points and segments with lattice vertices: translate, and for segments
/// send one primitive direction to the other via completed bases.
fn degenerate_equivalence(p: &Polygon, q: &Polygon) -> Option<LatticeMap> {
    let pv: Vec<(i64, i64)> = p
        .vertices()
        .iter()
        .map(Vec2::to_i64)
        .collect::<Option<_>>()?;
    let qv: Vec<(i64, i64)> = q
        .vertices()
        .iter()
        .map(Vec2::to_i64)
        .collect::<Option<_>>()?;
    let translate = |m: [[i64; 2]; 2], from: (i64, i64), to: (i64, i64)| LatticeMap {
        matrix: m,
        translation: [
            to.0 - (m[0][0] * from.0 + m[0][1] * from.1),
            to.1 - (m[1][0] * from.0 + m[1][1] * from.1),
        ],
    };
    if pv.len() == 1 {
        return Some(translate([[1, 0], [0, 1]], pv[0], qv[0]));
    }
    let direction = |a: (i64, i64), b: (i64, i64)| (b.0 - a.0, b.1 - a.1);
    let (dp, dq) = (direction(pv[0], pv[1]), direction(qv[0], qv[1]));
    let (gp, gq) = (dp.0.gcd(&dp.1), dq.0.gcd(&dq.1));
    if gp != gq {
        return None;
    }
    // Columns (a, b) and a complement (c, d) with a d - b c = 1.
    let basis = |(a, b): (i64, i64)| {
        let e = a.extended_gcd(&b);
        [[a, -e.y], [b, e.x]]
    };
    let bp = basis((dp.0 / gp, dp.1 / gp));
    let bq = basis((dq.0 / gq, dq.1 / gq));
    // Inverse of a determinant-one matrix.
    let bp_inv = [[bp[1][1], -bp[0][1]], [-bp[1][0], bp[0][0]]];
    let m = [
        [
            bq[0][0] * bp_inv[0][0] + bq[0][1] * bp_inv[1][0],
            bq[0][0] * bp_inv[0][1] + bq[0][1] * bp_inv[1][1],
        ],
        [
            bq[1][0] * bp_inv[0][0] + bq[1][1] * bp_inv[1][0],
            bq[1][0] * bp_inv[0][1] + bq[1][1] * bp_inv[1][1],
        ],
    ];
    Some(translate(m, pv[0], qv[0]))
}

/// Row-style Hermite normal form of a rank-2 integer matrix given by its
/// columns, under left multiplication by `GL_2(Z)`.
pub(crate) fn hermite_columns(cols: &[(BigInt, BigInt)]) -> Vec<(BigInt, BigInt)> {
    let mut r1: Vec<BigInt> = cols.iter().map(|c| c.0.clone()).collect();
    let mut r2: Vec<BigInt> = cols.iter().map(|c| c.1.clone()).collect();
    let sub_mul = |a: &mut Vec<BigInt>, b: &[BigInt], q: &BigInt| {
        for (x, y) in a.iter_mut().zip(b) {
            *x -= q * y;
        }
    };
    let j0 = (0..cols.len())
        .find(|&j| !r1[j].is_zero() || !r2[j].is_zero())
        .expect("rank-2 matrix");
    while !r2[j0].is_zero() {
        let q = r1[j0].div_floor(&r2[j0]);
        let r2c = r2.clone();
        sub_mul(&mut r1, &r2c, &q);
        std::mem::swap(&mut r1, &mut r2);
    }
    if r1[j0].is_negative() {
        r1.iter_mut().for_each(|x| *x = -x.clone());
    }
    let j1 = (j0 + 1..cols.len())
        .find(|&j| !r2[j].is_zero())
        .expect("rank-2 matrix");
    if r2[j1].is_negative() {
        r2.iter_mut().for_each(|x| *x = -x.clone());
    }
    let q = r1[j1].div_floor(&r2[j1]);
    sub_mul(&mut r1, &r2, &q);
    r1.into_iter().zip(r2).collect()
}

/// Canonical representative of the `GL_2(Z)` orbit of a full-dimensional
/// lattice polygon (the origin stays fixed, no translations).
///
/// Minimum of the Hermite normal forms over all dihedral relabellings of
/// the vertex cycle.
pub fn gl2_normal_form(p: &Polygon) -> Option<Polygon> {
    if p.dim() < 2 {
        return None;
    }
    let cols: Vec<(BigInt, BigInt)> = p
        .vertices()
        .iter()
        .map(|v| v.to_int())
        .collect::<Option<_>>()?;
    let n = cols.len();
    let mut best: Option<Vec<(BigInt, BigInt)>> = None;
    for start in 0..n {
        for step in [1, n - 1] {
            let ordered: Vec<_> = (0..n)
                .map(|k| cols[(start + k * step) % n].clone())
                .collect();
            let h = hermite_columns(&ordered);
            if best.as_ref().is_none_or(|b| h.cmp(b) == Ordering::Less) {
                best = Some(h);
            }
        }
    }
    let verts = best?.iter().map(|(x, y)| Vec2::from_int(x, y)).collect();
    Some(Polygon::hull(verts))
}

/// Linear map `M` (as a unimodular integer matrix) taking the lattice basis
/// `{a, b}` to the standard basis, if `{a, b}` is a lattice basis.
pub fn basis_to_standard(a: &Vec2, b: &Vec2) -> Option<[[i64; 2]; 2]> {
    let m = RatMatrix::from_columns(a, b).inverse()?;
    if !m.det().abs().is_one() {
        return None;
    }
    m.to_int()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn poly(pts: &[(i64, i64)]) -> Polygon {
        Polygon::hull(pts.iter().map(|&(x, y)| Vec2::int(x, y)).collect())
    }

    fn rv(x: (i64, i64), y: (i64, i64)) -> Vec2 {
        Vec2::new(ratio(x.0, x.1), ratio(y.0, y.1))
    }

    #[test]
    fn hull_drops_interior_point() {
        let h = Polygon::hull(vec![
            Vec2::int(0, 0),
            Vec2::int(1, 0),
            Vec2::int(0, 1),
            rv((1, 4), (1, 4)),
        ]);
        assert_eq!(h, poly(&[(0, 0), (1, 0), (0, 1)]));
        assert_eq!(h.vertices()[0], Vec2::int(0, 0));
    }

    #[test]
    fn hull_of_single_point() {
        let h = Polygon::hull(vec![Vec2::int(1, 1)]);
        assert_eq!(h.dim(), 0);
        assert_eq!(h.vertices(), &[Vec2::int(1, 1)]);
    }

    #[test]
    fn hull_removes_origin_inside_triangle() {
        let h = poly(&[(0, -1), (1, 2), (-1, 2), (0, 0)]);
        assert_eq!(h, poly(&[(0, -1), (1, 2), (-1, 2)]));
        assert_eq!(h.len(), 3);
    }

    #[test]
    fn hull_drops_collinear_boundary_points() {
        let h = poly(&[(0, 0), (1, 0), (2, 0), (2, 2), (0, 2), (1, 2)]);
        assert_eq!(h.len(), 4);
    }

    #[test]
    fn from_vertices_keeps_ccw_order() {
        let p = Polygon::from_vertices(vec![Vec2::int(0, -1), Vec2::int(1, 2), Vec2::int(-1, 2)]);
        assert_eq!(p.vertices()[0], Vec2::int(0, -1));
        // Clockwise input is re-hulled.
        let q = Polygon::from_vertices(vec![Vec2::int(0, -1), Vec2::int(-1, 2), Vec2::int(1, 2)]);
        assert_eq!(q.vertices()[0], Vec2::int(-1, 2));
        assert_eq!(p, q);
    }

    #[test]
    fn dual_examples() {
        let p2 = poly(&[(1, 0), (0, 1), (-1, -1)]);
        assert_eq!(dual(&p2).unwrap(), poly(&[(2, -1), (-1, 2), (-1, -1)]));

        let p114 = poly(&[(0, -1), (1, 2), (-1, 2)]);
        let expected = Polygon::hull(vec![Vec2::int(-3, 1), Vec2::int(3, 1), rv((0, 1), (-1, 2))]);
        assert_eq!(dual(&p114).unwrap(), expected);

        let cross = poly(&[(1, 0), (0, 1), (-1, 0), (0, -1)]);
        assert_eq!(
            dual(&cross).unwrap(),
            poly(&[(1, 1), (-1, 1), (-1, -1), (1, -1)])
        );
    }

    #[test]
    fn dual_requires_interior_origin() {
        let p = poly(&[(0, 0), (1, 0), (0, 1)]);
        assert_eq!(dual(&p), Err(GeomError::OriginNotInterior));
        let s = poly(&[(-1, 0), (1, 0)]);
        assert_eq!(dual(&s), Err(GeomError::NotFullDimensional));
    }

    #[test]
    fn minkowski_examples() {
        let a = poly(&[(0, 0), (1, 0)]);
        let b = poly(&[(0, 0), (0, 1)]);
        assert_eq!(
            minkowski_sum(&a, &b),
            poly(&[(0, 0), (1, 0), (1, 1), (0, 1)])
        );

        let tri = poly(&[(0, 0), (2, 0), (0, 1)]);
        let shifted = minkowski_sum(&tri, &Polygon::point(Vec2::int(2, 3)));
        assert_eq!(shifted, tri.translate(&Vec2::int(2, 3)));

        let top = poly(&[(-1, 2), (1, 2)]);
        let twice_f = poly(&[(0, 0), (2, 0)]);
        assert_eq!(minkowski_sum(&top, &twice_f), poly(&[(-1, 2), (3, 2)]));
        assert_eq!(
            minkowski_difference(&top, &twice_f),
            Some(Polygon::point(Vec2::int(-1, 2)))
        );
    }

    #[test]
    fn minkowski_difference_intervals() {
        let a = poly(&[(-3, 5), (4, 5)]);
        let f = poly(&[(0, 0), (2, 0)]);
        assert_eq!(minkowski_difference(&a, &f), Some(poly(&[(-3, 5), (2, 5)])));
        let pt = Polygon::point(Vec2::int(1, 1));
        assert_eq!(minkowski_difference(&pt, &f), None);
        // Full-dimensional case: square minus a segment.
        let sq = poly(&[(0, 0), (3, 0), (3, 3), (0, 3)]);
        assert_eq!(
            minkowski_difference(&sq, &f),
            Some(poly(&[(0, 0), (1, 0), (1, 3), (0, 3)]))
        );
    }

    #[test]
    fn slice_examples() {
        let p = poly(&[(0, -1), (1, 2), (-1, 2)]);
        let w = Vec2::int(0, -1);
        assert_eq!(
            slice(&p, &w, &BigInt::from(-1)),
            Some(Polygon::point(Vec2::int(0, 1)))
        );
        assert_eq!(
            slice(&p, &w, &BigInt::from(-2)),
            Some(poly(&[(-1, 2), (1, 2)]))
        );
        assert_eq!(slice(&p, &w, &BigInt::from(2)), None);
    }

    #[test]
    fn slice_along_oblique_height() {
        // Lattice points of the square [0,3]^2 with x + y = 3.
        let sq = poly(&[(0, 0), (3, 0), (3, 3), (0, 3)]);
        let s = slice(&sq, &Vec2::int(1, 1), &BigInt::from(3)).unwrap();
        assert_eq!(s, poly(&[(0, 3), (3, 0)]));
        // Rational slice without lattice points.
        let thin = Polygon::hull(vec![
            rv((1, 3), (0, 1)),
            rv((2, 3), (0, 1)),
            rv((1, 2), (1, 1)),
        ]);
        assert_eq!(slice(&thin, &Vec2::int(0, 1), &BigInt::from(0)), None);
    }

    #[test]
    fn height_range_examples() {
        let p = poly(&[(0, -1), (1, 2), (-1, 2)]);
        assert_eq!(height_range(&p, &Vec2::int(0, -1)), (rat(-2), rat(1)));
        let p2 = poly(&[(1, 0), (0, 1), (-1, -1)]);
        assert_eq!(height_range(&p2, &Vec2::int(1, 1)), (rat(-2), rat(1)));
        let o = Polygon::point(Vec2::zero());
        assert_eq!(height_range(&o, &Vec2::int(3, 5)), (rat(0), rat(0)));
    }

    #[test]
    fn lattice_points_examples() {
        assert_eq!(lattice_points(&poly(&[(0, 0), (1, 0), (0, 1)])).len(), 3);
        assert_eq!(
            lattice_points(&poly(&[(-1, -1), (1, -1), (-1, 1), (1, 1)])).len(),
            9
        );
        let pts = lattice_points(&poly(&[(0, -1), (1, 2), (-1, 2)]));
        let expected: Vec<Vec2> = [(-1, 2), (0, -1), (0, 0), (0, 1), (0, 2), (1, 2)]
            .iter()
            .map(|&(x, y)| Vec2::int(x, y))
            .collect();
        assert_eq!(pts, expected);
    }

    #[test]
    fn lattice_equivalence_examples() {
        let a = poly(&[(0, 0), (1, 0), (0, 1)]);
        let b = poly(&[(0, 0), (1, 0), (1, 1)]);
        let m = lattice_equivalent(&a, &b).unwrap();
        assert_eq!(a.map_affine(&m), b);

        let p2 = poly(&[(1, 0), (0, 1), (-1, -1)]);
        let big = poly(&[(0, 0), (3, 0), (0, 3)]);
        assert!(lattice_equivalent(&p2, &big).is_none());

        let x = poly(&[(-6, 5), (0, -1), (6, -1)]);
        let y = poly(&[(-2, -2), (4, -2), (-2, 4)]);
        let m = lattice_equivalent(&x, &y).unwrap();
        assert_eq!(x.map_affine(&m), y);
        assert_eq!(m.det().abs(), 1);
    }

    #[test]
    fn area_examples() {
        assert_eq!(area(&poly(&[(0, 0), (1, 0), (1, 1), (0, 1)])), rat(1));
        let dual114 = Polygon::hull(vec![Vec2::int(-3, 1), Vec2::int(3, 1), rv((0, 1), (-1, 2))]);
        assert_eq!(area(&dual114), ratio(9, 2));
        assert_eq!(area(&poly(&[(-1, -1), (2, -1), (-1, 2)])), ratio(9, 2));
        assert_eq!(area(&poly(&[(0, 0), (5, 0)])), rat(0));
    }

    #[test]
    fn primitivize_examples() {
        assert_eq!(primitivize(&Vec2::int(4, -6)).unwrap(), Vec2::int(2, -3));
        assert_eq!(primitivize(&Vec2::int(0, 5)).unwrap(), Vec2::int(0, 1));
        assert_eq!(primitivize(&Vec2::int(3, 7)).unwrap(), Vec2::int(3, 7));
        assert_eq!(primitivize(&Vec2::zero()), Err(GeomError::ZeroVector));
    }

    #[test]
    fn normal_form_is_orbit_invariant() {
        let p = poly(&[(0, -1), (1, 2), (-1, 2)]);
        let shear = LatticeMap::linear([[1, 3], [0, 1]]);
        let flip = LatticeMap::linear([[0, 1], [1, 0]]);
        let q = p.map_affine(&shear).map_affine(&flip);
        assert_eq!(gl2_normal_form(&p), gl2_normal_form(&q));
        let p2 = poly(&[(1, 0), (0, 1), (-1, -1)]);
        assert_ne!(gl2_normal_form(&p), gl2_normal_form(&p2));
    }

    #[test]
    fn lattice_map_inverse_and_compose() {
        let m = LatticeMap {
            matrix: [[2, 1], [1, 1]],
            translation: [3, -4],
        };
        let id = m.inverse().compose(&m);
        assert_eq!(id, LatticeMap::identity());
        let v = Vec2::int(5, 7);
        assert_eq!(m.inverse().apply(&m.apply(&v)), v);
    }
}
