//! Diophantine sets: `S = { a in Z^n : exists b in Z^m with P(a, b) = 0 }`.
//!
//! Membership is only semi-decidable, so [`member_search`] scans a finite
//! witness box and reports the bound it used instead of a verdict.
//!
//! Witness order: shells of increasing max-norm `s = 0, 1, ..., bound`; within
//! a shell, tuples with `max |y_i| = s` in lexicographic order of their integer
//! values (so `(-s, ..)` comes first). The first tuple in this order with
//! `P = 0` is returned, which makes results independent of the bound once the
//! bound covers the witness. Subtrees whose exact interval bound excludes 0
//! are skipped; this never changes which witness is found.

mod parse;
mod poly;

use num::{BigInt, One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};
use thiserror::Error;

use crate::json;
use crate::ntheory::four_squares;
use poly::{Compiled, Interval};

pub use parse::{parse_polynomial, ParseError, ParsedPolynomial, MAX_EXPONENT};
pub use poly::IntPolynomial;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiophantineError {
    #[error("expected {expected} values, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("a Diophantine set needs at least one parameter variable")]
    NoParameters,
    #[error("search bound must lie in 0..=2^62, got {0}")]
    InvalidBound(BigInt),
    #[error("parameter {0} is too large for witness search")]
    ParameterTooLarge(BigInt),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiophantineSet {
    poly: IntPolynomial,
    n_params: usize,
    m_witnesses: usize,
}

impl DiophantineSet {
    pub fn new(poly: IntPolynomial, n_params: usize) -> Result<Self, DiophantineError> {
        if n_params == 0 {
            return Err(DiophantineError::NoParameters);
        }
        if n_params > poly.arity() {
            return Err(DiophantineError::ArityMismatch { expected: poly.arity(), got: n_params });
        }
        let m_witnesses = poly.arity() - n_params;
        Ok(DiophantineSet { poly, n_params, m_witnesses })
    }

    /// Parses a polynomial in `x1..xN, y1..yM`; `N` is at least 1.
    pub fn parse(text: &str) -> Result<Self, DiophantineError> {
        let parsed = parse_polynomial(text, 1, 0)?;
        Self::new(parsed.poly, parsed.n_params)
    }

    /// `{ n : n >= 0 }` as `x1 - y1^2 - y2^2 - y3^2 - y4^2 = 0`.
    pub fn four_squares() -> Self {
        Self::parse("x1 - y1^2 - y2^2 - y3^2 - y4^2").expect("fixed polynomial parses")
    }

    pub fn poly(&self) -> &IntPolynomial {
        &self.poly
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn m_witnesses(&self) -> usize {
        self.m_witnesses
    }

    pub fn variable_names(&self) -> Vec<String> {
        (1..=self.n_params)
            .map(|i| format!("x{i}"))
            .chain((1..=self.m_witnesses).map(|j| format!("y{j}")))
            .collect()
    }

    pub fn render(&self) -> String {
        self.poly.render(&self.variable_names())
    }

    /// Whether `witness` certifies membership of `params`.
    pub fn verifies(&self, params: &[BigInt], witness: &[BigInt]) -> Result<bool, DiophantineError> {
        let point: Vec<BigInt> = params.iter().chain(witness).cloned().collect();
        Ok(eval(&self.poly, &point)?.is_zero())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MembershipStatus {
    MemberWithWitness,
    NoWitnessWithinBound,
}

impl MembershipStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            MembershipStatus::MemberWithWitness => "member-with-witness",
            MembershipStatus::NoWitnessWithinBound => "no-witness-within-bound",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MembershipResult {
    pub status: MembershipStatus,
    pub witness: Option<Vec<BigInt>>,
    pub bound_used: BigInt,
    /// Max-norm shell of the witness, when one was found by search.
    pub shell: Option<u64>,
    pub note: Option<String>,
}

impl MembershipResult {
    pub fn is_member(&self) -> bool {
        self.status == MembershipStatus::MemberWithWitness
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "schema": json::SCHEMA_VERSION,
            "status": self.status.as_str(),
            "witness": self.witness.as_ref().map(|w| json::ints(w)),
            "bound_used": json::int(&self.bound_used),
        });
        if let Some(s) = self.shell {
            v["shell"] = json!(s);
        }
        if let Some(n) = &self.note {
            v["note"] = json!(n);
        }
        v
    }
}

pub fn eval(poly: &IntPolynomial, point: &[BigInt]) -> Result<BigInt, DiophantineError> {
    poly.eval(point)
        .ok_or(DiophantineError::ArityMismatch { expected: poly.arity(), got: point.len() })
}

const MAX_BOUND: i64 = 1 << 62;

/// Scans the witness box `[-bound, bound]^m` in shell order (see module docs).
pub fn member_search(set: &DiophantineSet, params: &[BigInt], bound: &BigInt) -> Result<MembershipResult, DiophantineError> {
    if params.len() != set.n_params {
        return Err(DiophantineError::ArityMismatch { expected: set.n_params, got: params.len() });
    }
    let limit = match bound.to_i64() {
        Some(b) if (0..=MAX_BOUND).contains(&b) => b,
        _ => return Err(DiophantineError::InvalidBound(bound.clone())),
    };
    let fixed: Vec<i128> = params
        .iter()
        .map(|p| p.to_i128().ok_or_else(|| DiophantineError::ParameterTooLarge(p.clone())))
        .collect::<Result<_, _>>()?;

    let compiled = Compiled::new(&set.poly);
    let mut search = ShellSearch { compiled: &compiled, fixed: &fixed, m: set.m_witnesses, point: Vec::new() };
    for s in 0..=limit {
        if let Some(w) = search.shell(s as i128) {
            return Ok(MembershipResult {
                status: MembershipStatus::MemberWithWitness,
                witness: Some(w.into_iter().map(BigInt::from).collect()),
                bound_used: bound.clone(),
                shell: Some(s as u64),
                note: None,
            });
        }
        if set.m_witnesses == 0 {
            break;
        }
    }
    Ok(MembershipResult {
        status: MembershipStatus::NoWitnessWithinBound,
        witness: None,
        bound_used: bound.clone(),
        shell: None,
        note: None,
    })
}

struct ShellSearch<'a> {
    compiled: &'a Compiled<'a>,
    fixed: &'a [i128],
    m: usize,
    point: Vec<i128>,
}

impl ShellSearch<'_> {
    fn shell(&mut self, s: i128) -> Option<Vec<i128>> {
        self.point.clear();
        self.point.extend_from_slice(self.fixed);
        if self.m == 0 {
            return self.compiled.vanishes_at(&self.point).then(Vec::new);
        }
        if !self.may_vanish(s, None) {
            return None;
        }
        self.descend(s, false)
    }

    /// Interval test over the box with the current prefix fixed and the next
    /// coordinate restricted to `next`.
    fn may_vanish(&self, s: i128, next: Option<Interval>) -> bool {
        let mut boxes: Vec<Interval> = self.point.iter().map(|v| Interval::point(*v)).collect();
        boxes.extend(next);
        boxes.resize(self.fixed.len() + self.m, Interval { lo: -s, hi: s });
        self.compiled.bound(&boxes).map_or(true, |iv| iv.contains_zero())
    }

    fn descend(&mut self, s: i128, on_shell: bool) -> Option<Vec<i128>> {
        let last = self.point.len() - self.fixed.len() + 1 == self.m;
        if last && !on_shell {
            let ends: &[i128] = if s == 0 { &[0] } else { &[-s, s] };
            return ends.iter().find_map(|&v| self.visit(s, v, false));
        }
        self.scan(s, -s, s, on_shell)
    }

    /// Leftmost witness with the next coordinate in `[lo, hi]`, halving the
    /// range so that whole blocks failing the interval test are skipped.
    fn scan(&mut self, s: i128, lo: i128, hi: i128, on_shell: bool) -> Option<Vec<i128>> {
        if lo == hi {
            return self.visit(s, lo, on_shell);
        }
        if !self.may_vanish(s, Some(Interval { lo, hi })) {
            return None;
        }
        let mid = lo + (hi - lo).div_euclid(2);
        self.scan(s, lo, mid, on_shell).or_else(|| self.scan(s, mid + 1, hi, on_shell))
    }

    fn visit(&mut self, s: i128, v: i128, on_shell: bool) -> Option<Vec<i128>> {
        let last = self.point.len() - self.fixed.len() + 1 == self.m;
        self.point.push(v);
        let found = if last {
            self.compiled.vanishes_at(&self.point).then(|| self.point[self.fixed.len()..].to_vec())
        } else if self.may_vanish(s, None) {
            self.descend(s, on_shell || v.abs() == s)
        } else {
            None
        };
        self.point.pop();
        found
    }
}

/// Membership in `{ n : n >= 0 }` through a four-squares witness.
pub fn nonneg_witness(n: &BigInt) -> MembershipResult {
    if n.is_negative() {
        return MembershipResult {
            status: MembershipStatus::NoWitnessWithinBound,
            witness: None,
            bound_used: BigInt::zero(),
            shell: None,
            note: Some("a sum of four squares is never negative, so no bound yields a witness".into()),
        };
    }
    let w = four_squares(n).expect("non-negative input");
    MembershipResult {
        status: MembershipStatus::MemberWithWitness,
        bound_used: w[0].clone(),
        shell: w[0].to_u64(),
        witness: Some(w.to_vec()),
        note: None,
    }
}

/// `F_0 = 0, F_1 = 1, F_{k+1} = F_k + F_{k-1}`.
pub fn fibonacci(n: u64) -> BigInt {
    let (mut a, mut b) = (BigInt::zero(), BigInt::one());
    for _ in 0..n {
        let next = &a + &b;
        a = std::mem::replace(&mut b, next);
    }
    a
}

/// `(F_n, F_{n+1})` via `F_2k = F_k (2 F_{k+1} - F_k)`, `F_{2k+1} = F_k^2 + F_{k+1}^2`.
pub fn fibonacci_pair(n: u64) -> (BigInt, BigInt) {
    if n == 0 {
        return (BigInt::zero(), BigInt::one());
    }
    let (f, g) = fibonacci_pair(n / 2);
    let even = &f * (&g * 2u32 - &f);
    let odd = &f * &f + &g * &g;
    if n % 2 == 0 {
        (even, odd)
    } else {
        let next = &even + &odd;
        (odd, next)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn b(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn bs(v: &[i64]) -> Vec<BigInt> {
        v.iter().copied().map(b).collect()
    }

    /// Independent oracle: enumerate the whole box, sort by (max-norm, lex).
    fn first_witness_oracle(set: &DiophantineSet, params: &[i64], bound: i64) -> Option<Vec<i64>> {
        let m = set.m_witnesses();
        let mut all: Vec<Vec<i64>> = vec![vec![]];
        for _ in 0..m {
            all = all
                .into_iter()
                .flat_map(|t| (-bound..=bound).map(move |v| [t.clone(), vec![v]].concat()))
                .collect();
        }
        all.sort_by_key(|t| (t.iter().map(|v| v.abs()).max().unwrap_or(0), t.clone()));
        all.into_iter().find(|t| set.verifies(&bs(params), &bs(t)).unwrap())
    }

    #[test]
    fn eval_examples() {
        let set = DiophantineSet::four_squares();
        assert_eq!(eval(set.poly(), &bs(&[7, 2, 1, 1, 1])).unwrap(), b(0));
        assert_eq!(eval(&IntPolynomial::zero(2), &bs(&[5, 6])).unwrap(), b(0));
        let p = parse_polynomial("x1^2 + y1^2", 0, 0).unwrap().poly;
        assert_eq!(eval(&p, &bs(&[3, 4])).unwrap(), b(25));
        assert_eq!(
            eval(&p, &bs(&[3])),
            Err(DiophantineError::ArityMismatch { expected: 2, got: 1 })
        );
    }

    #[test]
    fn search_examples() {
        let set = DiophantineSet::four_squares();
        let r = member_search(&set, &bs(&[7]), &b(3)).unwrap();
        assert!(r.is_member());
        assert_eq!(r.shell, Some(2));
        assert_eq!(r.witness, Some(bs(&[-2, -1, -1, -1])));
        assert_eq!(first_witness_oracle(&set, &[7], 3), Some(vec![-2, -1, -1, -1]));

        let r = member_search(&set, &bs(&[-1]), &b(100)).unwrap();
        assert_eq!(r.status, MembershipStatus::NoWitnessWithinBound);
        assert_eq!(r.bound_used, b(100));

        let only_params = DiophantineSet::parse("x1").unwrap();
        assert_eq!(only_params.m_witnesses(), 0);
        let r = member_search(&only_params, &bs(&[0]), &b(5)).unwrap();
        assert!(r.is_member());
        assert_eq!(r.witness, Some(vec![]));
        assert!(!member_search(&only_params, &bs(&[3]), &b(5)).unwrap().is_member());

        assert!(matches!(member_search(&set, &bs(&[1, 2]), &b(3)), Err(DiophantineError::ArityMismatch { .. })));
        assert!(matches!(member_search(&set, &bs(&[1]), &b(-1)), Err(DiophantineError::InvalidBound(_))));
    }

    #[test]
    fn search_order_matches_exhaustive_oracle() {
        let sets = [
            "x1 - y1^2 - y2^2 - y3^2 - y4^2",
            "x1 - y1*y2 - 3",
            "y1^2 - x1*y2^2 - 1",
            "x1 - y1^3 - y2^3 - y3^3",
            "(y1 - 2)*(y2 + 1) - x1",
            "y1^2 + y2^2 - x1^2 - x2",
        ];
        for text in sets {
            let set = DiophantineSet::parse(text).unwrap();
            for a in -6..=12 {
                let params: Vec<i64> = vec![a; set.n_params()];
                for bound in [0, 1, 3] {
                    let got = member_search(&set, &bs(&params), &b(bound)).unwrap();
                    let want = first_witness_oracle(&set, &params, bound);
                    assert_eq!(got.witness, want.map(|w| bs(&w)), "{text} a={a} bound={bound}");
                }
            }
        }
    }

    #[test]
    fn four_squares_set_is_the_non_negatives() {
        let set = DiophantineSet::four_squares();
        for n in -300i64..=300 {
            let bound = (n.unsigned_abs() as f64).sqrt().ceil() as i64;
            let r = member_search(&set, &bs(&[n]), &b(bound)).unwrap();
            assert_eq!(r.is_member(), n >= 0, "n={n}");
            if let Some(w) = &r.witness {
                assert!(set.verifies(&bs(&[n]), w).unwrap());
            }
            let nn = nonneg_witness(&b(n));
            assert_eq!(nn.is_member(), n >= 0);
            if let Some(w) = &nn.witness {
                assert!(set.verifies(&bs(&[n]), w).unwrap());
            }
        }
    }

    #[test]
    fn nonneg_examples() {
        assert_eq!(nonneg_witness(&b(7)).witness, Some(bs(&[2, 1, 1, 1])));
        assert_eq!(nonneg_witness(&b(0)).witness, Some(bs(&[0, 0, 0, 0])));
        let neg = nonneg_witness(&b(-5));
        assert_eq!(neg.status, MembershipStatus::NoWitnessWithinBound);
        assert_eq!(neg.bound_used, b(0));
        assert!(neg.note.is_some());
    }

    #[test]
    fn fibonacci_examples() {
        assert_eq!(fibonacci(0), b(0));
        assert_eq!(fibonacci(10), b(55));
        assert_eq!(fibonacci(50), b(12_586_269_025));
        assert_eq!(fibonacci_pair(50).0, b(12_586_269_025));
    }

    #[test]
    fn fibonacci_doubling_identity() {
        let fs: Vec<BigInt> = (0..=1001).map(fibonacci).collect();
        for n in 0..=500usize {
            assert_eq!(fs[2 * n], &fs[n] * (&fs[n + 1] * 2u32 - &fs[n]));
            assert_eq!(fibonacci_pair(n as u64), (fs[n].clone(), fs[n + 1].clone()));
        }
    }

    proptest! {
        #[test]
        fn witnesses_are_sound_and_stable(
            coeffs in proptest::collection::vec(-4i64..=4, 4),
            a in -20i64..20,
            bound in 0i64..4,
        ) {
            // c0*x1 + c1*y1^2 + c2*y1*y2 + c3*y2 + 1
            let p = IntPolynomial::from_terms(3, [
                (b(coeffs[0]), vec![1, 0, 0]),
                (b(coeffs[1]), vec![0, 2, 0]),
                (b(coeffs[2]), vec![0, 1, 1]),
                (b(coeffs[3]), vec![0, 0, 1]),
                (b(1), vec![0, 0, 0]),
            ]);
            let set = DiophantineSet::new(p, 1).unwrap();
            let r = member_search(&set, &bs(&[a]), &b(bound)).unwrap();
            if let Some(w) = &r.witness {
                prop_assert!(set.verifies(&bs(&[a]), w).unwrap());
                // found at bound B implies the same witness at every larger bound
                for bigger in bound..bound + 3 {
                    let again = member_search(&set, &bs(&[a]), &b(bigger)).unwrap();
                    prop_assert_eq!(again.witness.as_ref(), Some(w));
                }
            }
        }
    }
}
