//! Complete 2-descent on `y^2 = (x - e1)(x - e2)(x - e3)` with integral,
//! pairwise distinct roots.
//!
//! A point maps to the square classes of `(x - e1, x - e2)`; the class of
//! `x - e3` is their product. The pair `(b1, b2)` corresponds to the
//! homogeneous space
//!
//! ```text
//! b1 z1^2 - b2 z2^2      = (e2 - e1) w^2
//! b1 z1^2 - b1 b2 z3^2   = (e3 - e1) w^2
//! ```
//!
//! which has a `Q_v` point exactly when the pair's image in
//! `(Q_v^* / Q_v^*2)^2` lies in the image of `E(Q_v)` under the same map.
//! That local image is a subgroup of known dimension (1 at the real place,
//! 2 at odd primes, 3 at 2), so it is found by collecting classes of local
//! points until the span is full. Only `v = inf`, `v = 2` and the primes of
//! the root differences need checking.

use std::collections::BTreeSet;
use std::fmt;

use num::{BigInt, Integer, One, Signed, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use crate::elliptic::{self, CurveQ, EllipticError, PointQ, ScaledModel};
use crate::json;
use crate::ntheory::{exact_sqrt, factorize, valuation, BigRat, Budget, NtError, SquareClass};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DescentError {
    #[error("roots must be pairwise distinct, got {0}, {1}, {2}")]
    RepeatedRoots(BigInt, BigInt, BigInt),
    #[error("point {0} is not on the curve")]
    NotOnCurve(PointQ),
    #[error("factorization of {value} incomplete within budget (unfactored cofactor {cofactor})")]
    IncompleteFactorization { value: BigInt, cofactor: BigInt },
    #[error("accepted pairs are not closed under multiplication: {a} * {b} is missing")]
    ClosureViolation { a: SquareClassPair, b: SquareClassPair },
    #[error("local image at {place} stayed at dimension {found} < {expected}")]
    LocalImageIncomplete { place: Place, found: u32, expected: u32 },
    #[error(transparent)]
    Elliptic(#[from] EllipticError),
}

impl From<NtError> for DescentError {
    fn from(e: NtError) -> Self {
        match e {
            NtError::IncompleteFactorization { value, cofactor } => DescentError::IncompleteFactorization { value, cofactor },
            other => unreachable!("unexpected arithmetic error in descent: {other}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SplitCurve {
    e: [BigInt; 3],
}

impl SplitCurve {
    pub fn new(e1: BigInt, e2: BigInt, e3: BigInt) -> Result<Self, DescentError> {
        if e1 == e2 || e1 == e3 || e2 == e3 {
            return Err(DescentError::RepeatedRoots(e1, e2, e3));
        }
        Ok(SplitCurve { e: [e1, e2, e3] })
    }

    pub fn from_ints(e1: i64, e2: i64, e3: i64) -> Result<Self, DescentError> {
        Self::new(e1.into(), e2.into(), e3.into())
    }

    pub fn roots(&self) -> &[BigInt; 3] {
        &self.e
    }

    /// `((e1 - e2)(e1 - e3)(e2 - e3))^2`.
    pub fn discriminant_core(&self) -> BigInt {
        let [e1, e2, e3] = &self.e;
        let d = (e1 - e2) * (e1 - e3) * (e2 - e3);
        &d * &d
    }

    pub fn rhs(&self, x: &BigRat) -> BigRat {
        let [e1, e2, e3] = &self.e;
        (x - rat(e1)) * (x - rat(e2)) * (x - rat(e3))
    }

    pub fn contains(&self, p: &PointQ) -> bool {
        match p {
            PointQ::Infinity => true,
            PointQ::Affine { x, y } => y * y == self.rhs(x),
        }
    }

    pub fn to_json(&self) -> Value {
        json::ints(self.e.iter())
    }
}

impl fmt::Display for SplitCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [e1, e2, e3] = &self.e;
        write!(f, "y^2 = (x - ({e1}))(x - ({e2}))(x - ({e3}))")
    }
}

fn rat(n: &BigInt) -> BigRat {
    BigRat::from_integer(n.clone())
}

/// Short Weierstrass form of a split curve, reached by `X = x - shift`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeierstrassModel {
    pub curve: CurveQ,
    pub shift: BigRat,
}

impl WeierstrassModel {
    pub fn from_split(&self, p: &PointQ) -> PointQ {
        match p {
            PointQ::Infinity => PointQ::Infinity,
            PointQ::Affine { x, y } => PointQ::affine(x - &self.shift, y.clone()),
        }
    }

    pub fn to_split(&self, p: &PointQ) -> PointQ {
        match p {
            PointQ::Infinity => PointQ::Infinity,
            PointQ::Affine { x, y } => PointQ::affine(x + &self.shift, y.clone()),
        }
    }
}

/// Expands the cubic and removes the `x^2` term with `x = X + (e1 + e2 + e3) / 3`.
pub fn to_weierstrass(c: &SplitCurve) -> WeierstrassModel {
    let [e1, e2, e3] = &c.e;
    let s1 = rat(&(e1 + e2 + e3));
    let s2 = rat(&(e1 * e2 + e1 * e3 + e2 * e3));
    let s3 = rat(&(e1 * e2 * e3));
    let shift = &s1 / BigRat::from_integer(3.into());
    // x^3 - s1 x^2 + s2 x - s3 at x = X + h, s1 = 3h: X^3 + (s2 - 3h^2) X + (-2h^3 + s2 h - s3)
    let three = BigRat::from_integer(3.into());
    let a = &s2 - three * &shift * &shift;
    let b = BigRat::from_integer((-2).into()) * &shift * &shift * &shift + &s2 * &shift - s3;
    let curve = CurveQ::new(a, b).expect("distinct roots give a nonsingular curve");
    WeierstrassModel { curve, shift }
}

/// Pair of squarefree integers representing a class in `(Q^* / Q^*2)^2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SquareClassPair {
    pub b1: BigInt,
    pub b2: BigInt,
}

impl SquareClassPair {
    pub fn new(b1: BigInt, b2: BigInt) -> Self {
        SquareClassPair { b1, b2 }
    }

    pub fn identity() -> Self {
        SquareClassPair { b1: BigInt::one(), b2: BigInt::one() }
    }

    /// Componentwise product with squares removed; both sides squarefree.
    pub fn mul(&self, other: &Self) -> Self {
        SquareClassPair { b1: squarefree_mul(&self.b1, &other.b1), b2: squarefree_mul(&self.b2, &other.b2) }
    }

    pub fn to_json(&self) -> Value {
        json!([json::int(&self.b1), json::int(&self.b2)])
    }
}

impl fmt::Display for SquareClassPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.b1, self.b2)
    }
}

fn squarefree_mul(a: &BigInt, b: &BigInt) -> BigInt {
    let g = a.gcd(b);
    (a / &g) * (b / &g)
}

/// A place of Q: the real place or a prime.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Place {
    Real,
    Prime(BigInt),
}

impl Place {
    fn width(&self) -> u32 {
        match self {
            Place::Real => 1,
            Place::Prime(p) => SquareClass::width(p),
        }
    }

    fn class(&self, r: &BigRat) -> u8 {
        match self {
            Place::Real => SquareClass::real(r).0,
            Place::Prime(p) => SquareClass::at_prime(r, p).0,
        }
    }

    /// Dimension of `E(Q_v) / 2E(Q_v)` for a curve with full 2-torsion.
    fn image_dimension(&self) -> u32 {
        match self {
            Place::Real => 1,
            Place::Prime(p) if *p == BigInt::from(2) => 3,
            Place::Prime(_) => 2,
        }
    }

    pub fn to_json(&self) -> Value {
        json!(self.to_string())
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Real => f.write_str("inf"),
            Place::Prime(p) => write!(f, "{p}"),
        }
    }
}

/// The pair of rationals `(x - e1, x - e2)` representing the image of `P`,
/// with a vanishing coordinate replaced by the product of the other two
/// differences at that root.
fn image_representatives(c: &SplitCurve, x: &BigRat) -> (BigRat, BigRat) {
    let [e1, e2, e3] = &c.e;
    let d1 = x - rat(e1);
    let d2 = x - rat(e2);
    if d1.is_zero() {
        (rat(&((e1 - e2) * (e1 - e3))), d2)
    } else if d2.is_zero() {
        (d1, rat(&((e2 - e1) * (e2 - e3))))
    } else {
        (d1, d2)
    }
}

/// Signed primes dividing some root difference, ascending.
fn bad_primes(c: &SplitCurve, budget: Budget) -> Result<Vec<BigInt>, DescentError> {
    let [e1, e2, e3] = &c.e;
    let mut primes = BTreeSet::new();
    for d in [e1 - e2, e1 - e3, e2 - e3] {
        let f = factorize(&d, budget)?;
        if !f.complete {
            return Err(DescentError::IncompleteFactorization { value: d, cofactor: f.unfactored.iter().product() });
        }
        primes.extend(f.primes().cloned());
    }
    Ok(primes.into_iter().collect())
}

/// Squarefree part of a nonzero rational whose odd-valuation primes all lie
/// in `primes`; `None` if some other prime occurs to an odd power.
fn squarefree_over(r: &BigRat, primes: &[BigInt]) -> Option<BigInt> {
    let n = r.numer() * r.denom();
    let mut s = if n.is_negative() { -BigInt::one() } else { BigInt::one() };
    for p in primes {
        if n.is_multiple_of(p) && valuation(&n, p) % 2 == 1 {
            s *= p;
        }
    }
    exact_sqrt(&(n / &s)).map(|_| s)
}

/// Image of `P` in `(Q^* / Q^*2)^2` as squarefree representatives.
pub fn descent_image(c: &SplitCurve, p: &PointQ) -> Result<SquareClassPair, DescentError> {
    descent_image_with(c, p, Budget::default())
}

pub fn descent_image_with(c: &SplitCurve, p: &PointQ, budget: Budget) -> Result<SquareClassPair, DescentError> {
    if !c.contains(p) {
        return Err(DescentError::NotOnCurve(p.clone()));
    }
    let PointQ::Affine { x, .. } = p else {
        return Ok(SquareClassPair::identity());
    };
    let primes = bad_primes(c, budget)?;
    let (r1, r2) = image_representatives(c, x);
    let b1 = squarefree_over(&r1, &primes).expect("point on curve has classes supported on bad primes");
    let b2 = squarefree_over(&r2, &primes).expect("point on curve has classes supported on bad primes");
    Ok(SquareClassPair { b1, b2 })
}

/// Every pair of signed squarefree products of primes dividing a root
/// difference. Sorted; always contains `(1, 1)`.
pub fn candidate_pairs(c: &SplitCurve, budget: Budget) -> Result<Vec<SquareClassPair>, DescentError> {
    let primes = bad_primes(c, budget)?;
    let singles = signed_squarefree_products(&primes);
    let mut out: Vec<SquareClassPair> = singles
        .iter()
        .flat_map(|b1| singles.iter().map(move |b2| SquareClassPair::new(b1.clone(), b2.clone())))
        .collect();
    out.sort();
    Ok(out)
}

fn signed_squarefree_products(primes: &[BigInt]) -> Vec<BigInt> {
    let mut all = vec![BigInt::one()];
    for p in primes {
        let scaled: Vec<BigInt> = all.iter().map(|d| d * p).collect();
        all.extend(scaled);
    }
    let negatives: Vec<BigInt> = all.iter().map(|d| -d).collect();
    all.extend(negatives);
    all.sort();
    all
}

/// Subspace of a small F2 vector space, kept in echelon form.
#[derive(Debug, Clone, Default)]
struct Span {
    basis: Vec<u8>,
}

impl Span {
    fn reduce(&self, mut v: u8) -> u8 {
        for b in &self.basis {
            let top = 1u8 << (7 - b.leading_zeros());
            if v & top != 0 {
                v ^= b;
            }
        }
        v
    }

    fn insert(&mut self, v: u8) {
        let v = self.reduce(v);
        if v != 0 {
            self.basis.push(v);
            self.basis.sort_by(|a, b| b.cmp(a));
            // re-reduce so leading bits stay distinct
            let mut echelon: Vec<u8> = Vec::new();
            for b in std::mem::take(&mut self.basis) {
                let r = Span { basis: echelon.clone() }.reduce(b);
                if r != 0 {
                    echelon.push(r);
                    echelon.sort_by(|a, b| b.cmp(a));
                }
            }
            self.basis = echelon;
        }
    }

    fn contains(&self, v: u8) -> bool {
        self.reduce(v) == 0
    }

    fn dim(&self) -> u32 {
        self.basis.len() as u32
    }
}

/// Image of `E(Q_v)` in `(Q_v^* / Q_v^*2)^2` at one place.
#[derive(Debug, Clone)]
pub struct LocalImage {
    place: Place,
    span: Span,
}

impl LocalImage {
    pub fn place(&self) -> &Place {
        &self.place
    }

    fn vector(&self, r1: &BigRat, r2: &BigRat) -> u8 {
        self.place.class(r1) | self.place.class(r2) << self.place.width()
    }

    pub fn contains(&self, pair: &SquareClassPair) -> bool {
        self.span.contains(self.vector(&rat(&pair.b1), &rat(&pair.b2)))
    }
}

/// Radii tried for the local point search before giving up.
const SEARCH_RADII: [i64; 4] = [8, 32, 128, 512];

/// Collects classes of points of `E(Q_v)` until their span has the known
/// dimension.
pub fn local_image(c: &SplitCurve, place: &Place) -> Result<LocalImage, DescentError> {
    let mut image = LocalImage { place: place.clone(), span: Span::default() };
    let expected = place.image_dimension();
    let [e1, e2, e3] = &c.e;

    // rational 2-torsion first
    for root in &c.e {
        let (r1, r2) = image_representatives(c, &rat(root));
        image.span.insert(image.vector(&r1, &r2));
    }
    let consider = |x: &BigRat, image: &mut LocalImage| {
        let d1 = x - rat(e1);
        let d2 = x - rat(e2);
        let d3 = x - rat(e3);
        if d1.is_zero() || d2.is_zero() || d3.is_zero() {
            return;
        }
        let (c1, c2, c3) = (place.class(&d1), place.class(&d2), place.class(&d3));
        // f(x) = d1 d2 d3 must be a local square
        if c1 ^ c2 ^ c3 == 0 {
            image.span.insert(c1 | c2 << place.width());
        }
    };
    if image.span.dim() >= expected {
        return Ok(image);
    }

    match place {
        Place::Real => {
            // the bounded component lies between the two smallest roots
            let mut sorted = c.e.clone();
            sorted.sort();
            let mid = rat(&(&sorted[0] + &sorted[1])) / BigRat::from_integer(2.into());
            consider(&mid, &mut image);
            consider(&rat(&(&sorted[2] + 1)), &mut image);
        }
        Place::Prime(p) => {
            let depth = [e1 - e2, e1 - e3, e2 - e3].iter().map(|d| valuation(d, p)).max().unwrap_or(0)
                + if *p == BigInt::from(2) { 4 } else { 2 };
            for radius in SEARCH_RADII {
                for t in (-radius..=radius).filter(|t| *t != 0) {
                    let t = BigInt::from(t);
                    let mut pk = BigInt::one();
                    for _ in 0..=depth {
                        for root in &c.e {
                            consider(&rat(&(root + &pk * &t)), &mut image);
                        }
                        pk *= p;
                    }
                    // points with x of negative valuation
                    let mut denom = BigInt::one();
                    for _ in 0..3 {
                        denom *= p * p;
                        consider(&BigRat::new(t.clone(), denom.clone()), &mut image);
                    }
                    if image.span.dim() >= expected {
                        return Ok(image);
                    }
                }
            }
        }
    }
    if image.span.dim() >= expected {
        Ok(image)
    } else {
        Err(DescentError::LocalImageIncomplete { place: place.clone(), found: image.span.dim(), expected })
    }
}

/// Places where a pair can be obstructed: infinity, 2 and the primes of the
/// root differences.
pub fn places(c: &SplitCurve, budget: Budget) -> Result<Vec<Place>, DescentError> {
    let mut primes = bad_primes(c, budget)?;
    if !primes.contains(&BigInt::from(2)) {
        primes.push(BigInt::from(2));
        primes.sort();
    }
    Ok(std::iter::once(Place::Real).chain(primes.into_iter().map(Place::Prime)).collect())
}

/// Local images at all relevant places, computed in parallel.
pub fn local_images(c: &SplitCurve, budget: Budget) -> Result<Vec<LocalImage>, DescentError> {
    places(c, budget)?.par_iter().map(|v| local_image(c, v)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Solvability {
    Solvable,
    Obstructed(Place),
}

/// First place where the homogeneous space of `pair` has no local point.
pub fn first_obstruction(images: &[LocalImage], pair: &SquareClassPair) -> Solvability {
    images
        .iter()
        .find(|im| !im.contains(pair))
        .map_or(Solvability::Solvable, |im| Solvability::Obstructed(im.place.clone()))
}

pub fn locally_solvable(c: &SplitCurve, pair: &SquareClassPair, budget: Budget) -> Result<Solvability, DescentError> {
    Ok(first_obstruction(&local_images(c, budget)?, pair))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelmerReport {
    pub curve: SplitCurve,
    pub accepted_pairs: Vec<SquareClassPair>,
    pub selmer_dim: u32,
    pub selmer_rank_bound: u32,
    pub local_obstructions: Vec<(SquareClassPair, Place)>,
    pub places_checked: Vec<Place>,
}

impl SelmerReport {
    pub fn contains(&self, pair: &SquareClassPair) -> bool {
        self.accepted_pairs.binary_search(pair).is_ok()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema": json::SCHEMA_VERSION,
            "e": self.curve.to_json(),
            "accepted": self.accepted_pairs.iter().map(SquareClassPair::to_json).collect::<Vec<_>>(),
            "dim": self.selmer_dim,
            "rank_bound": self.selmer_rank_bound,
            "obstructions": self.local_obstructions.iter()
                .map(|(pair, place)| json!({ "pair": pair.to_json(), "place": place.to_json() }))
                .collect::<Vec<_>>(),
            "places": self.places_checked.iter().map(Place::to_json).collect::<Vec<_>>(),
        })
    }
}

/// 2-Selmer group of the curve and the rank bound `dim - 2`.
pub fn two_selmer(c: &SplitCurve, budget: Budget) -> Result<SelmerReport, DescentError> {
    let images = local_images(c, budget)?;
    let candidates = candidate_pairs(c, budget)?;
    let verdicts: Vec<Solvability> = candidates.par_iter().map(|pair| first_obstruction(&images, pair)).collect();
    let mut accepted = Vec::new();
    let mut obstructions = Vec::new();
    for (pair, verdict) in candidates.into_iter().zip(verdicts) {
        match verdict {
            Solvability::Solvable => accepted.push(pair),
            Solvability::Obstructed(place) => obstructions.push((pair, place)),
        }
    }
    check_group(&accepted)?;
    let selmer_dim = accepted.len().trailing_zeros();
    Ok(SelmerReport {
        curve: c.clone(),
        selmer_rank_bound: selmer_dim.saturating_sub(2),
        selmer_dim,
        accepted_pairs: accepted,
        local_obstructions: obstructions,
        places_checked: images.into_iter().map(|im| im.place).collect(),
    })
}

/// `accepted` (sorted) must contain the identity, have power-of-two size and
/// be closed under multiplication.
fn check_group(accepted: &[SquareClassPair]) -> Result<(), DescentError> {
    let identity = SquareClassPair::identity();
    if accepted.binary_search(&identity).is_err() {
        return Err(DescentError::ClosureViolation { a: identity.clone(), b: identity });
    }
    for a in accepted {
        for b in accepted {
            if accepted.binary_search(&a.mul(b)).is_err() {
                return Err(DescentError::ClosureViolation { a: a.clone(), b: b.clone() });
            }
        }
    }
    if !accepted.len().is_power_of_two() {
        // closed and containing 1 forces a power of two; unreachable in practice
        return Err(DescentError::ClosureViolation { a: accepted[0].clone(), b: accepted[0].clone() });
    }
    Ok(())
}

/// Search model for a split curve: shifted, then scaled to integral form.
pub struct SearchModel {
    pub weierstrass: WeierstrassModel,
    pub scaled: ScaledModel,
}

impl SearchModel {
    pub fn new(c: &SplitCurve) -> Self {
        let weierstrass = to_weierstrass(c);
        let scaled = elliptic::scale_model(&weierstrass.curve);
        SearchModel { weierstrass, scaled }
    }

    pub fn from_split(&self, p: &PointQ) -> PointQ {
        self.scaled.forward(&self.weierstrass.from_split(p))
    }

    pub fn to_split(&self, p: &PointQ) -> PointQ {
        self.weierstrass.to_split(&self.scaled.backward(p))
    }

    /// Order of a split-model point, `None` when it has infinite order.
    pub fn torsion_order(&self, p: &PointQ) -> Result<Option<u32>, DescentError> {
        Ok(elliptic::is_torsion(&self.scaled.curve, &self.from_split(p))?)
    }
}

/// Points on the split model found by naive search on the integral model.
pub fn search_points(c: &SplitCurve, height: &BigInt) -> Result<Vec<PointQ>, DescentError> {
    let model = SearchModel::new(c);
    let mut pts: Vec<PointQ> =
        elliptic::naive_point_search(&model.scaled.curve, height)?.iter().map(|p| model.to_split(p)).collect();
    pts.sort();
    Ok(pts)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankWindow {
    pub lower: u32,
    pub upper: u32,
    /// Non-torsion point backing `lower = 1`, on the split model.
    pub witness: Option<PointQ>,
    pub selmer: SelmerReport,
}

impl RankWindow {
    pub fn certified(&self) -> bool {
        self.lower == self.upper
    }

    /// `rank-certified-<r>` when the bounds pinch, `uncertified` otherwise.
    pub fn tag(&self) -> String {
        if self.certified() {
            format!("rank-certified-{}", self.lower)
        } else {
            "uncertified".to_string()
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema": json::SCHEMA_VERSION,
            "lower": self.lower,
            "upper": self.upper,
            "tag": self.tag(),
            "witness": self.witness.as_ref().map(PointQ::to_json),
            "selmer": self.selmer.to_json(),
        })
    }
}

/// Rank bounds: lower is 1 when a non-torsion point turns up among `extra`
/// or the naive search up to `height`; upper is the Selmer bound.
pub fn rank_window(
    c: &SplitCurve,
    height: &BigInt,
    extra: &[PointQ],
    budget: Budget,
) -> Result<RankWindow, DescentError> {
    let selmer = two_selmer(c, budget)?;
    let model = SearchModel::new(c);
    let mut witness = None;
    for p in extra {
        if !c.contains(p) {
            return Err(DescentError::NotOnCurve(p.clone()));
        }
        if model.torsion_order(p)?.is_none() {
            witness = Some(p.clone());
            break;
        }
    }
    if witness.is_none() {
        for p in search_points(c, height)? {
            if model.torsion_order(&p)?.is_none() {
                witness = Some(p);
                break;
            }
        }
    }
    let lower = witness.is_some() as u32;
    Ok(RankWindow { lower, upper: selmer.selmer_rank_bound.max(lower), witness, selmer })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    use crate::ntheory::squarefree_part;

    fn pair(b1: i64, b2: i64) -> SquareClassPair {
        SquareClassPair::new(b1.into(), b2.into())
    }

    fn congruent(n: i64) -> SplitCurve {
        SplitCurve::from_ints(0, n, -n).unwrap()
    }

    fn r(n: i64, d: i64) -> BigRat {
        BigRat::new(n.into(), d.into())
    }

    #[test]
    fn weierstrass_examples() {
        let w = to_weierstrass(&SplitCurve::from_ints(-1, 0, 1).unwrap());
        assert_eq!(w.curve, CurveQ::from_ints(-1, 0).unwrap());
        assert_eq!(w.shift, r(0, 1));
        let w = to_weierstrass(&congruent(5));
        assert_eq!(w.curve, CurveQ::from_ints(-25, 0).unwrap());
        let w = to_weierstrass(&SplitCurve::from_ints(0, 1, 2).unwrap());
        assert_eq!(w.curve, CurveQ::from_ints(-1, 0).unwrap());
        assert_eq!(w.shift, r(1, 1));
        // non-integral shift round-trips points exactly
        let c = SplitCurve::from_ints(0, 1, 3).unwrap();
        let w = to_weierstrass(&c);
        assert_eq!(w.shift, r(4, 3));
        for p in search_points(&c, &BigInt::from(20)).unwrap() {
            assert!(c.contains(&p));
            assert!(elliptic::on_curve(&w.curve, &w.from_split(&p)));
            assert_eq!(w.to_split(&w.from_split(&p)), p);
        }
        assert!(SplitCurve::from_ints(1, 1, 2).is_err());
    }

    #[test]
    fn image_examples() {
        let c = congruent(5);
        assert_eq!(descent_image(&c, &PointQ::from_ints(-4, 6)).unwrap(), pair(-1, -1));
        assert_eq!(descent_image(&c, &PointQ::Infinity).unwrap(), pair(1, 1));
        assert_eq!(descent_image(&c, &PointQ::from_ints(0, 0)).unwrap(), pair(-1, -5));
        assert!(matches!(descent_image(&c, &PointQ::from_ints(1, 1)), Err(DescentError::NotOnCurve(_))));
        // agrees with squarefree parts computed by full factorization
        let p = elliptic::mul(&CurveQ::from_ints(-25, 0).unwrap(), &3.into(), &PointQ::from_ints(-4, 6)).unwrap();
        let PointQ::Affine { x, .. } = &p else { panic!() };
        let sf = |q: BigRat| squarefree_part(&(q.numer() * q.denom())).unwrap().0;
        let img = descent_image(&c, &p).unwrap();
        assert_eq!(img, SquareClassPair::new(sf(x.clone()), sf(x - r(5, 1))));
    }

    #[test]
    fn candidate_examples() {
        let c = SplitCurve::from_ints(-1, 0, 1).unwrap();
        let cands = candidate_pairs(&c, Budget::default()).unwrap();
        assert_eq!(cands.len(), 16);
        for b1 in [-2, -1, 1, 2] {
            for b2 in [-2, -1, 1, 2] {
                assert!(cands.contains(&pair(b1, b2)));
            }
        }
        assert_eq!(candidate_pairs(&SplitCurve::from_ints(0, 1, 2).unwrap(), Budget::default()).unwrap().len(), 16);
        assert!(candidate_pairs(&congruent(7), Budget::default()).unwrap().contains(&pair(1, 1)));
    }

    #[test]
    fn solvability_examples() {
        let c = SplitCurve::from_ints(-1, 0, 1).unwrap();
        let b = Budget::default();
        assert_eq!(locally_solvable(&c, &pair(1, 1), b).unwrap(), Solvability::Solvable);
        // x + 1 < 0 forces x < -1, and then x - 1 < 0 too: the product is negative
        assert_eq!(locally_solvable(&c, &pair(-1, -1), b).unwrap(), Solvability::Obstructed(Place::Real));
        assert_eq!(locally_solvable(&congruent(5), &pair(-1, -1), b).unwrap(), Solvability::Solvable);
    }

    /// Real-place oracle: sign patterns of (x - e1, x - e2) over x with f(x) > 0.
    fn real_oracle(c: &SplitCurve, pr: &SquareClassPair) -> bool {
        let mut xs: Vec<BigRat> = Vec::new();
        let mut sorted = c.roots().to_vec();
        sorted.sort();
        xs.push(rat(&sorted[0]) - r(1, 1));
        for w in sorted.windows(2) {
            xs.push((rat(&w[0]) + rat(&w[1])) / r(2, 1));
        }
        xs.push(rat(&sorted[2]) + r(1, 1));
        let [e1, e2, _] = c.roots();
        let mut patterns: Vec<(bool, bool)> = xs
            .iter()
            .filter(|x| c.rhs(x).is_positive())
            .map(|x| ((x - rat(e1)).is_negative(), (x - rat(e2)).is_negative()))
            .collect();
        for root in c.roots() {
            let (a, b) = image_representatives(c, &rat(root));
            patterns.push((a.is_negative(), b.is_negative()));
        }
        patterns.contains(&(pr.b1.is_negative(), pr.b2.is_negative()))
    }

    /// p-adic oracle: every class pair `(x - e1, x - e2)` realized by some x
    /// with f(x) a square in Q_p, x running over all residues mod p^k and
    /// over r / p^(2j), plus the torsion images.
    fn padic_oracle(c: &SplitCurve, p: i64, k: u32) -> HashSet<(SquareClass, SquareClass)> {
        let pb = BigInt::from(p);
        let cls = |q: &BigRat| SquareClass::at_prime(q, &pb);
        let mut seen = HashSet::new();
        for root in c.roots() {
            let (a, b) = image_representatives(c, &rat(root));
            seen.insert((cls(&a), cls(&b)));
        }
        let [e1, e2, e3] = c.roots();
        let modulus = p.pow(k);
        for j in 0..=2u32 {
            let den = BigInt::from(p.pow(2 * j));
            for t in 0..modulus {
                let x = BigRat::new(t.into(), den.clone());
                let (d1, d2, d3) = (&x - rat(e1), &x - rat(e2), &x - rat(e3));
                if d1.is_zero() || d2.is_zero() || d3.is_zero() {
                    continue;
                }
                if cls(&(&d1 * &d2 * &d3)).is_square() {
                    seen.insert((cls(&d1), cls(&d2)));
                }
            }
        }
        seen
    }

    fn oracle_curves() -> Vec<SplitCurve> {
        let mut cs: Vec<SplitCurve> = (1..=7).map(congruent).collect();
        for (a, b, c) in [(0, 1, 2), (0, 3, 8), (-2, 1, 6), (0, 2, 9), (-5, 3, 7)] {
            cs.push(SplitCurve::from_ints(a, b, c).unwrap());
        }
        cs
    }

    #[test]
    fn local_images_match_exhaustive_oracles() {
        for c in oracle_curves() {
            let images = local_images(&c, Budget::default()).unwrap();
            let cands = candidate_pairs(&c, Budget::default()).unwrap();
            for im in &images {
                let realized = match im.place() {
                    Place::Real => None,
                    Place::Prime(p) => {
                        let p = i64::try_from(p).unwrap();
                        let k = if p == 2 { 9 } else if p < 10 { 5 } else { 3 };
                        Some((BigInt::from(p), padic_oracle(&c, p, k)))
                    }
                };
                for pr in &cands {
                    let expected = match &realized {
                        None => real_oracle(&c, pr),
                        Some((p, seen)) => {
                            seen.contains(&(SquareClass::at_prime(&rat(&pr.b1), p), SquareClass::at_prime(&rat(&pr.b2), p)))
                        }
                    };
                    assert_eq!(im.contains(pr), expected, "{c} pair {pr} at {}", im.place());
                }
            }
        }
    }

    #[test]
    fn congruent_number_ranks() {
        for (n, rank) in [(1, 0), (2, 0), (3, 0), (4, 0), (5, 1), (6, 1), (7, 1)] {
            let report = two_selmer(&congruent(n), Budget::default()).unwrap();
            assert_eq!(report.selmer_rank_bound, rank, "N = {n}");
            assert!(report.accepted_pairs.len().is_power_of_two());
        }
    }

    #[test]
    fn rank_windows() {
        let w = rank_window(&congruent(5), &BigInt::from(10), &[], Budget::default()).unwrap();
        assert_eq!((w.lower, w.upper, w.tag().as_str()), (1, 1, "rank-certified-1"));
        let w = rank_window(&SplitCurve::from_ints(-1, 0, 1).unwrap(), &BigInt::from(10), &[], Budget::default()).unwrap();
        assert_eq!((w.lower, w.upper, w.tag().as_str()), (0, 0, "rank-certified-0"));
        // y^2 = x^3 - 25x with the search disabled still certifies from a supplied point
        let w = rank_window(&congruent(5), &BigInt::from(0), &[PointQ::from_ints(-4, 6)], Budget::default()).unwrap();
        assert!(w.certified());
        // N = 7 has its smallest generator at x = 25, so height 10 leaves a gap
        let w = rank_window(&congruent(7), &BigInt::from(10), &[], Budget::default()).unwrap();
        assert_eq!((w.lower, w.upper, w.tag().as_str()), (0, 1, "uncertified"));
    }

    #[test]
    fn torsion_images_are_accepted() {
        for c in oracle_curves() {
            let report = two_selmer(&c, Budget::default()).unwrap();
            for root in c.roots() {
                let t = PointQ::affine(rat(root), r(0, 1));
                assert!(report.contains(&descent_image(&c, &t).unwrap()), "{c}");
            }
            assert!(report.selmer_dim >= 2);
        }
    }

    #[test]
    fn found_points_are_never_obstructed() {
        for c in oracle_curves() {
            let report = two_selmer(&c, Budget::default()).unwrap();
            for p in search_points(&c, &BigInt::from(30)).unwrap() {
                assert!(report.contains(&descent_image(&c, &p).unwrap()), "{c}: {p}");
            }
        }
    }

    #[test]
    fn report_json_shape() {
        let report = two_selmer(&congruent(5), Budget::default()).unwrap();
        let v = report.to_json();
        assert_eq!(v["e"], json!([0, 5, -5]));
        assert_eq!(v["rank_bound"], json!(1));
        assert_eq!(v["dim"], json!(3));
        assert_eq!(v["accepted"].as_array().unwrap().len(), 8);
        assert_eq!(v["places"][0], json!("inf"));
    }
}
