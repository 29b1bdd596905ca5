//! Short Weierstrass curves `y^2 = x^3 + a x + b` over Q and their
//! rational points, with exact chord-tangent arithmetic.

use std::fmt;
use std::str::FromStr;

use num::{BigInt, One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use crate::json;
use crate::ntheory::{exact_sqrt, factorize, gcd, parse_bigrat, BigRat, Budget};

/// Torsion orders over Q never exceed this (Mazur).
pub const MAX_TORSION_ORDER: u32 = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EllipticError {
    #[error("curve y^2 = x^3 + ({a})x + ({b}) is singular")]
    Singular { a: BigRat, b: BigRat },
    #[error("point {0} is not on the curve")]
    NotOnCurve(PointQ),
    #[error("operation needs integral coefficients; scale the model first")]
    NonIntegralModel,
    #[error("cannot parse point {0:?}; expected \"O\" or \"(x, y)\"")]
    ParsePoint(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CurveQ {
    a: BigRat,
    b: BigRat,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PointQ {
    Infinity,
    Affine { x: BigRat, y: BigRat },
}

impl PointQ {
    pub fn affine(x: BigRat, y: BigRat) -> Self {
        PointQ::Affine { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        PointQ::Affine { x: BigRat::from_integer(x.into()), y: BigRat::from_integer(y.into()) }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, PointQ::Infinity)
    }

    pub fn x(&self) -> Option<&BigRat> {
        match self {
            PointQ::Infinity => None,
            PointQ::Affine { x, .. } => Some(x),
        }
    }

    pub fn y(&self) -> Option<&BigRat> {
        match self {
            PointQ::Infinity => None,
            PointQ::Affine { y, .. } => Some(y),
        }
    }

    pub fn to_json(&self) -> Value {
        json!(self.to_string())
    }
}

impl fmt::Display for PointQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PointQ::Infinity => f.write_str("O"),
            PointQ::Affine { x, y } => write!(f, "({x}, {y})"),
        }
    }
}

impl FromStr for PointQ {
    type Err = EllipticError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t == "O" || t == "o" {
            return Ok(PointQ::Infinity);
        }
        let bad = || EllipticError::ParsePoint(s.to_string());
        let inner = t.strip_prefix('(').and_then(|r| r.strip_suffix(')')).ok_or_else(bad)?;
        let (x, y) = inner.split_once(',').ok_or_else(bad)?;
        Ok(PointQ::Affine {
            x: parse_bigrat(x).map_err(|_| bad())?,
            y: parse_bigrat(y).map_err(|_| bad())?,
        })
    }
}

impl CurveQ {
    pub fn new(a: BigRat, b: BigRat) -> Result<Self, EllipticError> {
        let c = CurveQ { a, b };
        if c.discriminant().is_zero() {
            return Err(EllipticError::Singular { a: c.a, b: c.b });
        }
        Ok(c)
    }

    pub fn from_ints(a: i64, b: i64) -> Result<Self, EllipticError> {
        Self::new(BigRat::from_integer(a.into()), BigRat::from_integer(b.into()))
    }

    pub fn a(&self) -> &BigRat {
        &self.a
    }

    pub fn b(&self) -> &BigRat {
        &self.b
    }

    /// `-16 (4 a^3 + 27 b^2)`.
    pub fn discriminant(&self) -> BigRat {
        let four_a3 = BigRat::from_integer(4.into()) * &self.a * &self.a * &self.a;
        let b2 = BigRat::from_integer(27.into()) * &self.b * &self.b;
        BigRat::from_integer((-16).into()) * (four_a3 + b2)
    }

    pub fn is_integral(&self) -> bool {
        self.a.is_integer() && self.b.is_integer()
    }

    /// Right-hand side `x^3 + a x + b`.
    pub fn rhs(&self, x: &BigRat) -> BigRat {
        x * x * x + &self.a * x + &self.b
    }

    pub fn to_json(&self) -> Value {
        json!({ "a": json::rat(&self.a), "b": json::rat(&self.b) })
    }
}

impl fmt::Display for CurveQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "y^2 = x^3 + ({})x + ({})", self.a, self.b)
    }
}

pub fn on_curve(e: &CurveQ, p: &PointQ) -> bool {
    match p {
        PointQ::Infinity => true,
        PointQ::Affine { x, y } => y * y == e.rhs(x),
    }
}

fn require_on_curve(e: &CurveQ, p: &PointQ) -> Result<(), EllipticError> {
    if on_curve(e, p) {
        Ok(())
    } else {
        Err(EllipticError::NotOnCurve(p.clone()))
    }
}

pub fn neg(e: &CurveQ, p: &PointQ) -> Result<PointQ, EllipticError> {
    require_on_curve(e, p)?;
    Ok(neg_unchecked(p))
}

fn neg_unchecked(p: &PointQ) -> PointQ {
    match p {
        PointQ::Infinity => PointQ::Infinity,
        PointQ::Affine { x, y } => PointQ::Affine { x: x.clone(), y: -y },
    }
}

/// Chord-tangent addition.
pub fn add(e: &CurveQ, p: &PointQ, q: &PointQ) -> Result<PointQ, EllipticError> {
    require_on_curve(e, p)?;
    require_on_curve(e, q)?;
    Ok(add_unchecked(e, p, q))
}

fn add_unchecked(e: &CurveQ, p: &PointQ, q: &PointQ) -> PointQ {
    let (x1, y1, x2, y2) = match (p, q) {
        (PointQ::Infinity, _) => return q.clone(),
        (_, PointQ::Infinity) => return p.clone(),
        (PointQ::Affine { x: x1, y: y1 }, PointQ::Affine { x: x2, y: y2 }) => (x1, y1, x2, y2),
    };
    let slope = if x1 != x2 {
        (y2 - y1) / (x2 - x1)
    } else if y1 == y2 && !y1.is_zero() {
        // tangent
        let three = BigRat::from_integer(3.into());
        let two = BigRat::from_integer(2.into());
        (three * x1 * x1 + &e.a) / (two * y1)
    } else {
        // vertical line: P = -Q
        return PointQ::Infinity;
    };
    let x3 = &slope * &slope - x1 - x2;
    let y3 = slope * (x1 - &x3) - y1;
    PointQ::Affine { x: x3, y: y3 }
}

/// `k P` by double-and-add; negative `k` multiplies `-P`.
pub fn mul(e: &CurveQ, k: &BigInt, p: &PointQ) -> Result<PointQ, EllipticError> {
    require_on_curve(e, p)?;
    Ok(mul_unchecked(e, k, p))
}

fn mul_unchecked(e: &CurveQ, k: &BigInt, p: &PointQ) -> PointQ {
    let base = if k.is_negative() { neg_unchecked(p) } else { p.clone() };
    let k = k.abs();
    let mut acc = PointQ::Infinity;
    for i in (0..k.bits()).rev() {
        acc = add_unchecked(e, &acc, &acc);
        if k.bit(i) {
            acc = add_unchecked(e, &acc, &base);
        }
    }
    acc
}

/// Order of `P` if it is a torsion point, `None` otherwise.
///
/// Computes `kP` for `k = 1..=12`; over Q no torsion point has larger
/// order, so no multiple reaching `O` within that range proves infinite order.
pub fn is_torsion(e: &CurveQ, p: &PointQ) -> Result<Option<u32>, EllipticError> {
    if !e.is_integral() {
        return Err(EllipticError::NonIntegralModel);
    }
    require_on_curve(e, p)?;
    let mut multiple = PointQ::Infinity;
    for k in 1..=MAX_TORSION_ORDER {
        multiple = add_unchecked(e, &multiple, p);
        if multiple.is_infinity() {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

/// Integral model reached by `(x, y) -> (u^2 x, u^3 y)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScaledModel {
    pub curve: CurveQ,
    pub u: BigRat,
}

impl ScaledModel {
    /// Maps a point of the original curve onto the scaled one.
    pub fn forward(&self, p: &PointQ) -> PointQ {
        match p {
            PointQ::Infinity => PointQ::Infinity,
            PointQ::Affine { x, y } => {
                let u2 = &self.u * &self.u;
                let u3 = &u2 * &self.u;
                PointQ::Affine { x: x * u2, y: y * u3 }
            }
        }
    }

    pub fn backward(&self, p: &PointQ) -> PointQ {
        match p {
            PointQ::Infinity => PointQ::Infinity,
            PointQ::Affine { x, y } => {
                let u2 = &self.u * &self.u;
                let u3 = &u2 * &self.u;
                PointQ::Affine { x: x / u2, y: y / u3 }
            }
        }
    }
}

/// Smallest positive integer `u` with `a u^4` and `b u^6` integral.
///
/// `u` is assembled prime by prime from the factored denominators
/// (`v_p(u) = max(ceil(v_p(den a) / 4), ceil(v_p(den b) / 6))`). If a
/// denominator does not factor within the default budget, `u` falls back to
/// `den(a) * den(b)`, which is integral but possibly not minimal.
pub fn scale_model(e: &CurveQ) -> ScaledModel {
    let u = minimal_scale(e.a.denom(), e.b.denom());
    let ur = BigRat::from_integer(u);
    let u4 = num::pow(ur.clone(), 4);
    let u6 = num::pow(ur.clone(), 6);
    let curve = CurveQ { a: &e.a * u4, b: &e.b * u6 };
    ScaledModel { curve, u: ur }
}

fn minimal_scale(den_a: &BigInt, den_b: &BigInt) -> BigInt {
    let (Ok(fa), Ok(fb)) = (factorize(den_a, Budget::default()), factorize(den_b, Budget::default())) else {
        unreachable!("denominators are positive");
    };
    if !fa.complete || !fb.complete {
        return den_a * den_b;
    }
    let mut needed: std::collections::BTreeMap<BigInt, u32> = Default::default();
    for (p, k) in &fa.factors {
        let v = needed.entry(p.clone()).or_default();
        *v = (*v).max(k.div_ceil(4));
    }
    for (p, k) in &fb.factors {
        let v = needed.entry(p.clone()).or_default();
        *v = (*v).max(k.div_ceil(6));
    }
    needed.into_iter().fold(BigInt::one(), |acc, (p, v)| acc * num::pow(p, v as usize))
}

/// Points with `x = p / q^2`, `|p| <= H`, `1 <= q <= H`, `gcd(p, q) = 1`,
/// sorted with their negatives. Requires an integral model.
///
/// Rows of the `(p, q)` grid are scanned in parallel on the current rayon
/// pool; the sorted output does not depend on the pool size.
pub fn naive_point_search(e: &CurveQ, height_bound: &BigInt) -> Result<Vec<PointQ>, EllipticError> {
    if !e.is_integral() {
        return Err(EllipticError::NonIntegralModel);
    }
    let Some(h) = height_bound.to_i64().filter(|h| *h >= 0) else {
        return Ok(Vec::new());
    };
    let a = e.a.to_integer();
    let b = e.b.to_integer();
    let mut points: Vec<PointQ> = (1..=h)
        .into_par_iter()
        .flat_map_iter(|q| {
            let q = BigInt::from(q);
            let q2 = &q * &q;
            let q3 = &q2 * &q;
            let q4 = &q2 * &q2;
            let q6 = &q3 * &q3;
            let aq4 = &a * &q4;
            let bq6 = &b * &q6;
            (-h..=h)
                .filter_map(|p| {
                    let p = BigInt::from(p);
                    if !gcd(&p, &q).is_one() {
                        return None;
                    }
                    let value = &p * &p * &p + &aq4 * &p + &bq6;
                    let r = exact_sqrt(&value)?;
                    let x = BigRat::new(p, q2.clone());
                    let y = BigRat::new(r, q3.clone());
                    Some((x, y))
                })
                .flat_map(|(x, y)| {
                    let neg_y = -&y;
                    let mut pair = vec![PointQ::Affine { x: x.clone(), y }];
                    if !neg_y.is_zero() {
                        pair.push(PointQ::Affine { x, y: neg_y });
                    }
                    pair
                })
                .collect::<Vec<_>>()
        })
        .collect();
    points.sort();
    points.dedup();
    Ok(points)
}

pub fn is_integral_point(p: &PointQ) -> bool {
    match p {
        PointQ::Infinity => true,
        PointQ::Affine { x, y } => x.is_integer() && y.is_integer(),
    }
}
