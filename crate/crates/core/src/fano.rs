//! Fano triangles, weights of fake weighted projective planes, the
//! Diophantine invariant shared by mutation-equivalent triangles, and Markov
//! triples.

use crate::geom::{self, is_primitive, Polygon, Vec2};
use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FanoError {
    #[error("polygon has {0} vertices, expected a triangle")]
    NotATriangle(usize),
    #[error("polygon is not Fano")]
    NotFano,
    #[error("polygon is not a lattice polygon")]
    NotLattice,
    #[error("weights {0:?} are not pairwise coprime")]
    NotWellFormed([u64; 3]),
    #[error("weight {weight} does not divide {square}")]
    NotDivisible { weight: u64, square: u128 },
    #[error("weights must be positive with gcd 1, got {0:?}")]
    InvalidWeights([u64; 3]),
    #[error("({0}, {1}, {2}) is not a Markov triple")]
    NotMarkov(u64, u64, u64),
    #[error("integer overflow (values exceed 64 bits)")]
    Overflow,
}

/// Coprime positive weights `(l1, l2, l3)`, ordered like the vertices they
/// belong to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "[u64; 3]", into = "[u64; 3]")]
pub struct WeightTriple([u64; 3]);

impl WeightTriple {
    pub fn new(w: [u64; 3]) -> Result<Self, FanoError> {
        if w.contains(&0) || w[0].gcd(&w[1]).gcd(&w[2]) != 1 {
            return Err(FanoError::InvalidWeights(w));
        }
        Ok(Self(w))
    }

    pub fn get(&self) -> [u64; 3] {
        self.0
    }

    pub fn sorted(&self) -> [u64; 3] {
        let mut s = self.0;
        s.sort_unstable();
        s
    }

    /// Pairwise coprime weights give a well-formed weighted projective plane.
    pub fn is_well_formed(&self) -> bool {
        let [a, b, c] = self.0;
        a.gcd(&b) == 1 && b.gcd(&c) == 1 && a.gcd(&c) == 1
    }

    pub fn sum(&self) -> u128 {
        self.0.iter().map(|&x| x as u128).sum()
    }

    pub fn same_up_to_permutation(&self, other: &WeightTriple) -> bool {
        self.sorted() == other.sorted()
    }
}

impl TryFrom<[u64; 3]> for WeightTriple {
    type Error = FanoError;
    fn try_from(w: [u64; 3]) -> Result<Self, FanoError> {
        WeightTriple::new(w)
    }
}

impl From<WeightTriple> for [u64; 3] {
    fn from(w: WeightTriple) -> [u64; 3] {
        w.0
    }
}

impl fmt::Display for WeightTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.0;
        write!(f, "({a},{b},{c})")
    }
}

/// A fake weighted projective plane: `P(weights) / (N/N')` with
/// `multiplicity = [N : N']`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FakePlaneData {
    pub weights: WeightTriple,
    pub multiplicity: u64,
}

pub fn is_fano(p: &Polygon) -> bool {
    p.dim() == 2
        && p.is_lattice()
        && p.contains_strictly(&Vec2::zero())
        && p.vertices().iter().all(is_primitive)
}

/// `det(v_{i+1}, v_{i+2})` for each vertex `v_i` of a lattice triangle.
fn opposite_minors(t: &Polygon) -> Result<[BigInt; 3], FanoError> {
    if t.len() != 3 {
        return Err(FanoError::NotATriangle(t.len()));
    }
    if !t.is_lattice() {
        return Err(FanoError::NotLattice);
    }
    let v = t.vertices();
    let m = |i: usize| v[(i + 1) % 3].cross(&v[(i + 2) % 3]).numer().clone();
    Ok([m(0), m(1), m(2)])
}

fn to_u64(v: &BigInt) -> Result<u64, FanoError> {
    v.to_u64().ok_or(FanoError::Overflow)
}

/// The coprime positive solution of `l1 v1 + l2 v2 + l3 v3 = 0`, in vertex
/// order.
pub fn weights(t: &Polygon) -> Result<WeightTriple, FanoError> {
    let minors = opposite_minors(t)?;
    if !is_fano(t) {
        return Err(FanoError::NotFano);
    }
    let g = minors[0].gcd(&minors[1]).gcd(&minors[2]);
    let w = [
        to_u64(&(&minors[0] / &g))?,
        to_u64(&(&minors[1] / &g))?,
        to_u64(&(&minors[2] / &g))?,
    ];
    WeightTriple::new(w)
}

/// Index of the sublattice spanned by the vertices: the gcd of the three
/// 2x2 vertex minors.
pub fn multiplicity(t: &Polygon) -> Result<u64, FanoError> {
    let minors = opposite_minors(t)?;
    let g = minors[0].gcd(&minors[1]).gcd(&minors[2]);
    if g.is_zero() {
        return Err(FanoError::NotFano);
    }
    to_u64(&g)
}

pub fn fake_plane(t: &Polygon) -> Result<FakePlaneData, FanoError> {
    Ok(FakePlaneData {
        weights: weights(t)?,
        multiplicity: multiplicity(t)?,
    })
}

type Mat3 = [[BigInt; 3]; 3];

fn mat3_identity() -> Mat3 {
    std::array::from_fn(|i| std::array::from_fn(|j| BigInt::from((i == j) as i64)))
}

fn mat3_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    std::array::from_fn(|i| std::array::from_fn(|j| (0..3).map(|k| &a[i][k] * &b[k][j]).sum()))
}

/// 3x3 unimodular matrix acting on coordinates `(p, q)` that sends the
/// column `(x, y)` (with `gcd = g`) to `(g, 0)`.
fn gcd_step(x: &BigInt, y: &BigInt, p: usize, q: usize) -> (Mat3, BigInt) {
    let eg = x.extended_gcd(y);
    let g = eg.gcd.clone();
    let mut m = mat3_identity();
    m[p][p] = eg.x;
    m[p][q] = eg.y;
    m[q][p] = -(y / &g);
    m[q][q] = x / &g;
    (m, g)
}

/// A Fano triangle of multiplicity one whose weights, in vertex order, are
/// `w`.
///
/// Row-reduces the column `w` to `e1` with a unimodular `A`; the last two
/// rows of `A` then map `Z^3` onto `Z^2` with kernel spanned by `w`, and
/// their columns are the vertices. The result is brought to Hermite form to
/// keep coordinates small.
pub fn triangle_from_weights(w: &WeightTriple) -> Result<Polygon, FanoError> {
    if !w.is_well_formed() {
        return Err(FanoError::NotWellFormed(w.get()));
    }
    let l = w.get().map(BigInt::from);
    let (m1, g12) = gcd_step(&l[0], &l[1], 0, 1);
    let (m2, g) = gcd_step(&g12, &l[2], 0, 2);
    debug_assert!(g.is_one());
    let a = mat3_mul(&m2, &m1);
    let cols: Vec<(BigInt, BigInt)> = (0..3).map(|j| (a[1][j].clone(), a[2][j].clone())).collect();
    let mut cols = geom::hermite_columns(&cols);
    let v: Vec<Vec2> = cols.iter().map(|(x, y)| Vec2::from_int(x, y)).collect();
    if v[0].cross(&v[1]).is_negative() {
        for c in cols.iter_mut() {
            c.0 = -c.0.clone();
        }
    }
    let tri = Polygon::from_vertices(cols.iter().map(|(x, y)| Vec2::from_int(x, y)).collect());
    debug_assert_eq!(weights(&tri).map(|x| x.get()), Ok(w.get()));
    Ok(tri)
}

/// Weights after mutating away vertex `i` (0-based): the other two weights,
/// followed by `(l_j + l_k)^2 / l_i`, reduced to coprime form.
pub fn predicted_mutation_weights(w: &WeightTriple, i: usize) -> Result<WeightTriple, FanoError> {
    assert!(i < 3, "vertex index out of range");
    let l = w.get();
    let (lj, lk) = (l[(i + 1) % 3], l[(i + 2) % 3]);
    let s = lj as u128 + lk as u128;
    let square = s.checked_mul(s).ok_or(FanoError::Overflow)?;
    if square % l[i] as u128 != 0 {
        return Err(FanoError::NotDivisible {
            weight: l[i],
            square,
        });
    }
    let new = u64::try_from(square / l[i] as u128).map_err(|_| FanoError::Overflow)?;
    let g = lj.gcd(&lk).gcd(&new);
    WeightTriple::new([lj / g, lk / g, new / g])
}

/// The equation `m x1 x2 x3 = k (c1 x1^2 + c2 x2^2 + c3 x3^2)` solved by a
/// weight triple via `l_i = c_i x_i^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DiophantineClass {
    pub m: u128,
    pub k: u128,
    /// Squarefree coefficients, sorted ascending.
    pub c: [u64; 3],
}

/// Writes `n = c * x^2` with `c` squarefree, by trial division.
pub fn squarefree_decomposition(n: u64) -> (u64, u64) {
    assert!(n > 0);
    let mut rest = n;
    let mut c = 1u64;
    let mut p = 2u64;
    while p.saturating_mul(p) <= rest {
        let mut e = 0;
        while rest.is_multiple_of(p) {
            rest /= p;
            e += 1;
        }
        if e % 2 == 1 {
            c *= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    c *= rest;
    let x = (n / c).sqrt();
    debug_assert_eq!(x * x * c, n);
    (c, x)
}

pub fn diophantine_class(w: &WeightTriple) -> Result<DiophantineClass, FanoError> {
    let parts = w.get().map(squarefree_decomposition);
    let prod = parts
        .iter()
        .try_fold(1u128, |acc, &(_, x)| acc.checked_mul(x as u128))
        .ok_or(FanoError::Overflow)?;
    let sum = w.sum();
    let g = sum.gcd(&prod);
    let mut c = parts.map(|(c, _)| c);
    c.sort_unstable();
    Ok(DiophantineClass {
        m: sum / g,
        k: prod / g,
        c,
    })
}

/// Sorted solution `a <= b <= c` of `a^2 + b^2 + c^2 = 3abc`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "[u64; 3]")]
pub struct MarkovTriple {
    a: u64,
    b: u64,
    c: u64,
}

impl From<MarkovTriple> for [u64; 3] {
    fn from(t: MarkovTriple) -> [u64; 3] {
        t.get()
    }
}

impl MarkovTriple {
    pub fn new(a: u64, b: u64, c: u64) -> Result<Self, FanoError> {
        let mut s = [a, b, c];
        s.sort_unstable();
        let [a, b, c] = s;
        let sq = |x: u64| (x as u128).checked_mul(x as u128);
        let lhs = (|| sq(a)?.checked_add(sq(b)?)?.checked_add(sq(c)?))();
        let rhs = (|| {
            3u128
                .checked_mul(a as u128)?
                .checked_mul(b as u128)?
                .checked_mul(c as u128)
        })();
        match (lhs, rhs) {
            (Some(l), Some(r)) if l == r && a > 0 => Ok(Self { a, b, c }),
            (Some(_), Some(_)) => Err(FanoError::NotMarkov(a, b, c)),
            _ => Err(FanoError::Overflow),
        }
    }

    pub fn root() -> Self {
        Self { a: 1, b: 1, c: 1 }
    }

    pub fn get(&self) -> [u64; 3] {
        [self.a, self.b, self.c]
    }

    pub fn squares(&self) -> Result<WeightTriple, FanoError> {
        let sq = |x: u64| x.checked_mul(x).ok_or(FanoError::Overflow);
        WeightTriple::new([sq(self.a)?, sq(self.b)?, sq(self.c)?])
    }

    /// Vieta jump in coordinate `i`: `x_i -> 3 x_j x_k - x_i`.
    pub fn jump(&self, i: usize) -> Result<MarkovTriple, FanoError> {
        let mut v = self.get();
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let prod = 3u64
            .checked_mul(v[j])
            .and_then(|x| x.checked_mul(v[k]))
            .ok_or(FanoError::Overflow)?;
        v[i] = prod - v[i];
        MarkovTriple::new(v[0], v[1], v[2])
    }
}

impl fmt::Display for MarkovTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.a, self.b, self.c)
    }
}

/// The distinct triples one Vieta jump away, sorted.
pub fn markov_neighbors(t: &MarkovTriple) -> Result<Vec<MarkovTriple>, FanoError> {
    let set: BTreeSet<MarkovTriple> = (0..3).map(|i| t.jump(i)).collect::<Result<_, _>>()?;
    Ok(set.into_iter().collect())
}

/// Every triple reachable from `(1,1,1)` in at most `depth` jumps.
pub fn markov_tree(depth: usize) -> Result<BTreeSet<MarkovTriple>, FanoError> {
    let mut seen = BTreeSet::from([MarkovTriple::root()]);
    let mut frontier = vec![MarkovTriple::root()];
    for _ in 0..depth {
        let mut next = Vec::new();
        for t in &frontier {
            for n in markov_neighbors(t)? {
                if seen.insert(n) {
                    next.push(n);
                }
            }
        }
        frontier = next;
    }
    Ok(seen)
}

/// The polygon spanned by the primitive inner edge normals of a
/// full-dimensional polygon in `M_Q`; its face fan is the normal fan.
pub fn fan_polygon(r: &Polygon) -> Option<Polygon> {
    if r.dim() < 2 {
        return None;
    }
    let rays: Option<Vec<Vec2>> = r
        .edges()
        .map(|(a, b)| {
            let d = b - a;
            // Scale the inner normal to an integral vector first.
            let den = crate::rational::lcm_of_denominators([&d.x, &d.y]);
            let n = d
                .perp()
                .scale(&crate::rational::Rational::from_integer(den));
            geom::primitivize(&n).ok()
        })
        .collect();
    Some(Polygon::from_vertices(rays?))
}
