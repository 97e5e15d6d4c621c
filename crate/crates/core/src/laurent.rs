//! Laurent polynomials in two variables with rational coefficients,
//! algebraic mutations and period sequences.

use crate::geom::{Polygon, Vec2};
use crate::mutation::MutationData;
use crate::rational::{self, rat, Rational};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LaurentError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("zero denominator at offset {offset}")]
    ZeroDenominator { offset: usize },
    #[error("polynomial is not divisible")]
    NotDivisible,
    #[error("the zero polynomial has no Newton polytope")]
    ZeroPolynomial,
    #[error("grade {0} is not divisible by the matching power of g")]
    DivisibilityFails(i64),
    #[error("invalid mutation: {0}")]
    InvalidSpec(String),
}

pub type Exponent = (i64, i64);

/// A finite sum of monomials `c x^a y^b` with nonzero rational `c`, kept
/// in lexicographic exponent order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    terms: BTreeMap<Exponent, Rational>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial((0, 0), rat(1))
    }

    pub fn monomial(e: Exponent, c: Rational) -> Self {
        let mut p = Self::zero();
        p.add_term(e, c);
        p
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial((0, 0), c)
    }

    pub fn x() -> Self {
        Self::monomial((1, 0), rat(1))
    }

    pub fn y() -> Self {
        Self::monomial((0, 1), rat(1))
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Exponent, Rational)>) -> Self {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, e: Exponent, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, e: Exponent) -> Rational {
        self.terms.get(&e).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn constant_term(&self) -> Rational {
        self.coefficient((0, 0))
    }

    /// The single term of a monomial.
    pub fn as_monomial(&self) -> Option<(Exponent, &Rational)> {
        match self.terms.len() {
            1 => self.terms.iter().next().map(|(e, c)| (*e, c)),
            _ => None,
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::from_terms(self.terms.iter().map(|(e, v)| (*e, v * c)))
    }

    pub fn shift(&self, by: Exponent) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| ((e.0 + by.0, e.1 + by.1), c.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Inverse of a monomial; other polynomials are not units.
    pub fn inverse(&self) -> Option<Self> {
        let ((a, b), c) = self.as_monomial()?;
        Some(Self::monomial((-a, -b), c.recip()))
    }

    fn leading(&self) -> Option<(&Exponent, &Rational)> {
        self.terms.iter().next_back()
    }

    fn exponent_box(&self) -> Option<(Exponent, Exponent)> {
        let mut es = self.terms.keys();
        let first = *es.next()?;
        Some(es.fold((first, first), |(lo, hi), e| {
            (
                (lo.0.min(e.0), lo.1.min(e.1)),
                (hi.0.max(e.0), hi.1.max(e.1)),
            )
        }))
    }

    /// Exact quotient `f / g`, by lexicographic leading-term reduction. The
    /// quotient's exponents must fit the box forced by the Newton
    /// polytopes, which bounds the reduction.
    pub fn div_exact(&self, g: &LaurentPoly) -> Result<LaurentPoly, LaurentError> {
        let Some((g_lead_e, g_lead_c)) = g.leading() else {
            return Err(LaurentError::NotDivisible);
        };
        let Some((f_lo, f_hi)) = self.exponent_box() else {
            return Ok(Self::zero());
        };
        let (g_lo, g_hi) = g.exponent_box().expect("nonzero");
        let q_lo = (f_lo.0 - g_lo.0, f_lo.1 - g_lo.1);
        let q_hi = (f_hi.0 - g_hi.0, f_hi.1 - g_hi.1);
        let mut rem = self.clone();
        let mut quot = Self::zero();
        while let Some((e, c)) = rem.leading() {
            let qe = (e.0 - g_lead_e.0, e.1 - g_lead_e.1);
            if qe.0 < q_lo.0 || qe.0 > q_hi.0 || qe.1 < q_lo.1 || qe.1 > q_hi.1 {
                return Err(LaurentError::NotDivisible);
            }
            let qc = c / g_lead_c;
            rem = &rem - &g.shift(qe).scale(&qc);
            quot.add_term(qe, qc);
        }
        Ok(quot)
    }

    pub fn newton_polytope(&self) -> Result<Polygon, LaurentError> {
        if self.is_zero() {
            return Err(LaurentError::ZeroPolynomial);
        }
        Ok(Polygon::hull(
            self.terms.keys().map(|&(a, b)| Vec2::int(a, b)).collect(),
        ))
    }

    /// Exponents of `var` that occur, in increasing order, with the
    /// coefficient of each power.
    pub fn grades(&self, var: Variable) -> BTreeMap<i64, LaurentPoly> {
        let mut out: BTreeMap<i64, LaurentPoly> = BTreeMap::new();
        for (&e, c) in &self.terms {
            let (grade, rest) = match var {
                Variable::X => (e.0, (0, e.1)),
                Variable::Y => (e.1, (e.0, 0)),
            };
            out.entry(grade).or_default().add_term(rest, c.clone());
        }
        out
    }

    pub fn uses_only(&self, var: Variable) -> bool {
        self.terms.keys().all(|e| match var {
            Variable::X => e.1 == 0,
            Variable::Y => e.0 == 0,
        })
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, o: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, o: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(*e, -c);
        }
        out
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        self.scale(&rat(-1))
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, o: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (a, c) in &self.terms {
            for (b, d) in &o.terms {
                out.add_term((a.0 + b.0, a.1 + b.1), c * d);
            }
        }
        out
    }
}

fn write_monomial(f: &mut fmt::Formatter<'_>, (a, b): Exponent) -> fmt::Result {
    let mut parts = Vec::new();
    for (name, e) in [("x", a), ("y", b)] {
        match e {
            0 => {}
            1 => parts.push(name.to_string()),
            _ => parts.push(format!("{name}^{e}")),
        }
    }
    f.write_str(&parts.join("*"))
}

/// Renders as e.g. `-3/2*x^-1*y + x + 2`, in lexicographic order.
impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (&e, c)) in self.terms.iter().enumerate() {
            let mag = c.abs();
            match (i, c.is_negative()) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if e == (0, 0) {
                f.write_str(&rational::format(&mag))?;
            } else {
                if !mag.is_one() {
                    write!(f, "{}*", rational::format(&mag))?;
                }
                write_monomial(f, e)?;
            }
        }
        Ok(())
    }
}

impl FromStr for LaurentPoly {
    type Err = LaurentError;
    fn from_str(s: &str) -> Result<Self, LaurentError> {
        parse(s)
    }
}

impl Serialize for LaurentPoly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for LaurentPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Recursive-descent parser over bytes.
///
/// ```text
/// expr   := [sign] term (sign term)*
/// term   := factor ([*] factor)*
/// factor := atom [^ [sign] int]
/// atom   := int [/ int] | x | y | x1 | x2 | ( expr )
/// ```
struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err<T>(&self, at: usize, message: impl Into<String>) -> Result<T, LaurentError> {
        Err(LaurentError::Syntax {
            offset: at,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<LaurentPoly, LaurentError> {
        let mut negate = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                true
            }
            Some(b'+') => {
                self.pos += 1;
                false
            }
            _ => false,
        };
        let mut acc = LaurentPoly::zero();
        loop {
            let t = self.term()?;
            acc = if negate { &acc - &t } else { &acc + &t };
            match self.peek() {
                Some(b'+') => negate = false,
                Some(b'-') => negate = true,
                _ => return Ok(acc),
            }
            self.pos += 1;
        }
    }

    fn starts_factor(&mut self) -> bool {
        matches!(self.peek(), Some(b) if b.is_ascii_alphanumeric() || b == b'(')
    }

    fn term(&mut self) -> Result<LaurentPoly, LaurentError> {
        let mut acc = self.factor()?;
        loop {
            // Juxtaposition multiplies like an explicit `*`.
            if self.eat(b'*') || self.starts_factor() {
                acc = &acc * &self.factor()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<LaurentPoly, LaurentError> {
        self.skip_ws();
        let start = self.pos;
        let base = self.atom()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let exp_at = {
            self.skip_ws();
            self.pos
        };
        let neg = if self.eat(b'-') {
            true
        } else {
            self.eat(b'+');
            false
        };
        let Some(n) = self.integer()? else {
            return self.err(exp_at, "expected an integer exponent");
        };
        let n: u32 = match u32::try_from(&n) {
            Ok(n) if n <= 10_000 => n,
            _ => return self.err(exp_at, "exponent out of range"),
        };
        let powered = base.pow(n);
        if !neg {
            return Ok(powered);
        }
        match powered.inverse() {
            Some(inv) => Ok(inv),
            None => self.err(start, "negative power of a non-monomial"),
        }
    }

    fn integer(&mut self) -> Result<Option<BigInt>, LaurentError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Ok(None);
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(Some(digits.parse().expect("digits parse")))
    }

    fn atom(&mut self) -> Result<LaurentPoly, LaurentError> {
        let at = {
            self.skip_ws();
            self.pos
        };
        match self.peek() {
            Some(b) if b.is_ascii_digit() => {
                let num = self.integer()?.expect("digit present");
                let den = if self.eat(b'/') {
                    let den_at = {
                        self.skip_ws();
                        self.pos
                    };
                    match self.integer()? {
                        Some(d) if d.is_zero() => {
                            return Err(LaurentError::ZeroDenominator { offset: den_at })
                        }
                        Some(d) => d,
                        None => return self.err(den_at, "expected an integer denominator"),
                    }
                } else {
                    BigInt::one()
                };
                Ok(LaurentPoly::constant(Rational::new(num, den)))
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(b')') {
                    let here = self.pos;
                    return self.err(here, "expected ')'");
                }
                Ok(inner)
            }
            Some(b) if b.is_ascii_alphabetic() => {
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                match &self.src[at..self.pos] {
                    b"x" | b"x1" => Ok(LaurentPoly::x()),
                    b"y" | b"x2" => Ok(LaurentPoly::y()),
                    other => self.err(
                        at,
                        format!("unknown variable {:?}", String::from_utf8_lossy(other)),
                    ),
                }
            }
            Some(_) => self.err(at, "unexpected character"),
            None => self.err(at, "unexpected end of input"),
        }
    }
}

pub fn parse(s: &str) -> Result<LaurentPoly, LaurentError> {
    let mut p = Parser {
        src: s.as_bytes(),
        pos: 0,
    };
    let f = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return p.err(p.pos, "unexpected trailing input");
    }
    Ok(f)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variable {
    X,
    Y,
}

impl Variable {
    pub fn other(self) -> Variable {
        match self {
            Variable::X => Variable::Y,
            Variable::Y => Variable::X,
        }
    }

    /// Height function matching the substitution `var -> var / g`: positive
    /// powers of `var` sit at negative heights.
    pub fn height_function(self) -> Vec2 {
        match self {
            Variable::X => Vec2::int(-1, 0),
            Variable::Y => Vec2::int(0, -1),
        }
    }

    fn place(self, grade: i64, rest: Exponent) -> Exponent {
        match self {
            Variable::X => (grade, rest.1),
            Variable::Y => (rest.0, grade),
        }
    }
}

impl FromStr for Variable {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "x" | "x1" => Ok(Variable::X),
            "y" | "x2" => Ok(Variable::Y),
            _ => Err(format!("unknown variable {s:?} (expected x or y)")),
        }
    }
}

/// The substitution `divide -> divide / g`, with `g` in the other variable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MutationSpec {
    pub divide: Variable,
    pub g: LaurentPoly,
}

impl MutationSpec {
    pub fn new(divide: Variable, g: LaurentPoly) -> Result<Self, LaurentError> {
        if g.is_zero() {
            return Err(LaurentError::InvalidSpec("g must be nonzero".into()));
        }
        if !g.uses_only(divide.other()) {
            return Err(LaurentError::InvalidSpec(format!(
                "g = {g} must not involve the divided variable"
            )));
        }
        Ok(Self { divide, g })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strictness {
    /// Report missing hypotheses as warnings.
    #[default]
    Warn,
    /// Treat missing hypotheses as errors.
    Strict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AlgebraicMutation {
    pub result: LaurentPoly,
    /// The combinatorial shadow: height function, `Newt(g)` and the Newton
    /// polytopes of the divided grades.
    pub data: MutationData,
    pub warnings: Vec<String>,
}

/// Applies `var -> var / g`: grade `i` is divided by `g^i` when `i > 0`
/// and multiplied by `g^-i` when `i < 0`.
pub fn algebraic_mutate(
    f: &LaurentPoly,
    spec: &MutationSpec,
    strictness: Strictness,
) -> Result<AlgebraicMutation, LaurentError> {
    let newt = f.newton_polytope()?;
    let grades = f.grades(spec.divide);
    let mut warnings = Vec::new();
    if !newt.contains(&Vec2::zero()) {
        warnings.push("the origin is not in the Newton polytope of f".to_string());
    }
    let (lo, hi) = (
        *grades.keys().next().expect("nonzero"),
        *grades.keys().next_back().expect("nonzero"),
    );
    if !(lo < 0 && hi > 0) {
        warnings.push(format!(
            "grades of f in the divided variable span [{lo}, {hi}], not both signs"
        ));
    }
    if strictness == Strictness::Strict && !warnings.is_empty() {
        return Err(LaurentError::InvalidSpec(warnings.join("; ")));
    }

    let mut result = LaurentPoly::zero();
    let mut slabs = BTreeMap::new();
    for (&i, fi) in &grades {
        let part = if i > 0 {
            let gi = spec.g.pow(i as u32);
            fi.div_exact(&gi)
                .map_err(|_| LaurentError::DivisibilityFails(i))?
        } else {
            fi * &spec.g.pow((-i) as u32)
        };
        let placed = LaurentPoly::from_terms(
            part.terms()
                .map(|(e, c)| (spec.divide.place(i, *e), c.clone())),
        );
        if i > 0 {
            slabs.insert(-i, Some(placed.newton_polytope()?));
        }
        result = &result + &placed;
    }
    for h in -hi.max(0)..0 {
        slabs.entry(h).or_insert(None);
    }
    let data = MutationData {
        w: spec.divide.height_function(),
        factor: spec.g.newton_polytope()?,
        slabs,
    };
    Ok(AlgebraicMutation {
        result,
        data,
        warnings,
    })
}

/// Constant terms of `f^0, ..., f^dmax`, the Taylor coefficients of the
/// classical period of `f`.
pub fn period_sequence(f: &LaurentPoly, dmax: usize) -> Vec<Rational> {
    let mut out = Vec::with_capacity(dmax + 1);
    let mut power = LaurentPoly::one();
    out.push(power.constant_term());
    for _ in 0..dmax {
        power = &power * f;
        out.push(power.constant_term());
    }
    out
}
