//! Solutions of the Pell family `x^2 - (a^2 - 1) y^2 = 1`.
//!
//! For `a >= 2` the fundamental solution is `(a, 1)` and every positive
//! solution is `(x_n, y_n)` with `x_n + y_n sqrt(a^2 - 1) = (a + sqrt(a^2 - 1))^n`.
//!
//! The divisibility criterion is sometimes quoted as
//! `y_m^2 | y_n <=> y_m | n`. That form fails at `(a, m, n) = (2, 2, 4)`:
//! `y_2 = 4` divides 4 but `16` does not divide `y_4 = 56`. The classical lemma
//! is `y_m^2 | y_n <=> m y_m | n`. [`DivisibilityReport`] records all three
//! predicates so either reading can be checked.

use num::{BigInt, Integer, One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};
use thiserror::Error;

use crate::json;
use crate::ntheory::exact_sqrt;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PellError {
    #[error("parameter a must be at least 2, got {0}")]
    ParameterTooSmall(BigInt),
    #[error("bound must be between 1 and 2^64 - 1, got {0}")]
    InvalidBound(BigInt),
    #[error("indices m and n must be at least 1 (got m = {m}, n = {n})")]
    InvalidIndex { m: u64, n: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PellSolution {
    pub a: BigInt,
    pub index: u64,
    pub x: BigInt,
    pub y: BigInt,
}

impl PellSolution {
    pub fn to_json(&self) -> Value {
        json!({ "a": json::int(&self.a), "n": self.index, "x": json::int(&self.x), "y": json::int(&self.y) })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisibilityReport {
    pub a: BigInt,
    pub m: u64,
    pub n: u64,
    pub y_m: BigInt,
    pub y_n: BigInt,
    /// `y_m^2 | y_n`
    pub ymsq_divides_yn: bool,
    /// `y_m | n`
    pub ym_divides_n: bool,
    /// `m * y_m | n`
    pub m_ym_divides_n: bool,
}

impl DivisibilityReport {
    /// Whether the classical equivalence `y_m^2 | y_n <=> m y_m | n` holds here.
    pub fn classical_law_holds(&self) -> bool {
        self.ymsq_divides_yn == self.m_ym_divides_n
    }

    /// Whether the literal reading `y_m^2 | y_n <=> y_m | n` holds here.
    pub fn literal_law_holds(&self) -> bool {
        self.ymsq_divides_yn == self.ym_divides_n
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema": json::SCHEMA_VERSION,
            "a": json::int(&self.a),
            "m": self.m,
            "n": self.n,
            "y_m": json::int(&self.y_m),
            "y_n": json::int(&self.y_n),
            "ymsq_divides_yn": self.ymsq_divides_yn,
            "ym_divides_n": self.ym_divides_n,
            "m_ym_divides_n": self.m_ym_divides_n,
        })
    }
}

fn check_parameter(a: &BigInt) -> Result<BigInt, PellError> {
    if *a < BigInt::from(2) {
        return Err(PellError::ParameterTooSmall(a.clone()));
    }
    Ok(a * a - 1u32)
}

/// `(x_n, y_n)` for `n = 0..=count`, generated by
/// `x_{n+1} = a x_n + d y_n`, `y_{n+1} = x_n + a y_n` with `d = a^2 - 1`.
pub fn pell_sequence(a: &BigInt, count: u64) -> Result<Vec<PellSolution>, PellError> {
    let d = check_parameter(a)?;
    let mut out = Vec::with_capacity(count as usize + 1);
    let (mut x, mut y) = (BigInt::one(), BigInt::zero());
    for index in 0..=count {
        let next = (a * &x + &d * &y, &x + a * &y);
        out.push(PellSolution { a: a.clone(), index, x, y });
        (x, y) = next;
    }
    Ok(out)
}

/// The single solution of index `n`, by repeated squaring in `Z[sqrt(d)]`.
pub fn pell_solution(a: &BigInt, n: u64) -> Result<PellSolution, PellError> {
    let d = check_parameter(a)?;
    let mul = |(p, q): &(BigInt, BigInt), (r, s): &(BigInt, BigInt)| (p * r + &d * q * s, p * s + q * r);
    let mut acc = (BigInt::one(), BigInt::zero());
    let mut base = (a.clone(), BigInt::one());
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul(&acc, &base);
        }
        base = mul(&base, &base);
        e >>= 1;
    }
    Ok(PellSolution { a: a.clone(), index: n, x: acc.0, y: acc.1 })
}

pub fn verify_pell(a: &BigInt, x: &BigInt, y: &BigInt) -> bool {
    x * x - (a * a - 1u32) * y * y == BigInt::one()
}

/// Every positive solution with `1 <= y <= bound`, found by testing whether
/// `(a^2 - 1) y^2 + 1` is a perfect square. Sorted by `y`.
pub fn enumerate_solutions_below(a: &BigInt, bound: &BigInt) -> Result<Vec<(BigInt, BigInt)>, PellError> {
    let d = check_parameter(a)?;
    let limit = match bound.to_u64() {
        Some(b) if b >= 1 => b,
        _ => return Err(PellError::InvalidBound(bound.clone())),
    };
    let mut out = Vec::new();
    for y in 1..=limit {
        let y = BigInt::from(y);
        if let Some(x) = exact_sqrt(&(&d * &y * &y + 1u32)) {
            out.push((x, y));
        }
    }
    Ok(out)
}

pub fn divisibility_report(a: &BigInt, m: u64, n: u64) -> Result<DivisibilityReport, PellError> {
    check_parameter(a)?;
    if m < 1 || n < 1 {
        return Err(PellError::InvalidIndex { m, n });
    }
    let seq = pell_sequence(a, m.max(n))?;
    let y_m = seq[m as usize].y.clone();
    let y_n = seq[n as usize].y.clone();
    let n_big = BigInt::from(n);
    let divides = |d: &BigInt, v: &BigInt| !d.is_zero() && v.is_multiple_of(d);
    Ok(DivisibilityReport {
        ymsq_divides_yn: divides(&(&y_m * &y_m), &y_n),
        ym_divides_n: divides(&y_m, &n_big),
        m_ym_divides_n: divides(&(BigInt::from(m) * &y_m), &n_big),
        a: a.clone(),
        m,
        n,
        y_m,
        y_n,
    })
}

/// Whether `(x, y)` is a positive solution listed in `seq`.
pub fn in_sequence(seq: &[PellSolution], x: &BigInt, y: &BigInt) -> bool {
    y.is_positive() && seq.iter().any(|s| &s.x == x && &s.y == y)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn pairs(seq: &[PellSolution]) -> Vec<(i64, i64)> {
        seq.iter().map(|s| (s.x.to_i64().unwrap(), s.y.to_i64().unwrap())).collect()
    }

    /// Multiplies out (a + sqrt(d))^n one factor at a time in Z[sqrt(d)].
    fn expand_power(a: i64, n: u32) -> (BigInt, BigInt) {
        let d = b(a * a - 1);
        let (mut p, mut q) = (b(1), b(0));
        for _ in 0..n {
            (p, q) = (&p * a + &d * &q, &p + &q * a);
        }
        (p, q)
    }

    #[test]
    fn sequence_examples() {
        assert_eq!(expand_power(2, 3), (b(26), b(15)));
        assert_eq!(pairs(&pell_sequence(&b(2), 3).unwrap()), vec![(1, 0), (2, 1), (7, 4), (26, 15)]);
        assert_eq!(pairs(&pell_sequence(&b(2), 0).unwrap()), vec![(1, 0)]);
        assert_eq!(expand_power(5, 2), (b(49), b(10)));
        assert_eq!(pairs(&pell_sequence(&b(5), 2).unwrap())[2], (49, 10));
        assert_eq!(pell_sequence(&b(1), 3), Err(PellError::ParameterTooSmall(b(1))));
    }

    #[test]
    fn single_index_fast_path_matches_recurrence() {
        for a in 2..12 {
            let seq = pell_sequence(&b(a), 60).unwrap();
            for s in &seq {
                assert_eq!(&pell_solution(&b(a), s.index).unwrap(), s);
                assert_eq!((s.x.clone(), s.y.clone()), expand_power(a, s.index as u32));
            }
        }
    }

    #[test]
    fn verify_examples() {
        assert!(verify_pell(&b(2), &b(7), &b(4)));
        assert!(verify_pell(&b(2), &b(1), &b(0)));
        assert!(!verify_pell(&b(2), &b(7), &b(5)));
    }

    #[test]
    fn enumeration_examples() {
        let found = enumerate_solutions_below(&b(2), &b(20)).unwrap();
        assert_eq!(found, vec![(b(2), b(1)), (b(7), b(4)), (b(26), b(15))]);
        assert_eq!(enumerate_solutions_below(&b(3), &b(1)).unwrap(), vec![(b(3), b(1))]);
        assert_eq!(enumerate_solutions_below(&b(2), &b(0)), Err(PellError::InvalidBound(b(0))));
        assert!(enumerate_solutions_below(&b(0), &b(5)).is_err());
    }

    #[test]
    fn divisibility_examples() {
        let seq = pell_sequence(&b(2), 8).unwrap();
        assert_eq!(seq[8].y, b(10864));
        assert_eq!(seq[4].y, b(56));

        let r = divisibility_report(&b(2), 2, 8).unwrap();
        assert!(r.ymsq_divides_yn && r.m_ym_divides_n);
        let r = divisibility_report(&b(2), 2, 4).unwrap();
        assert!(!r.ymsq_divides_yn && r.ym_divides_n);
        assert!(r.classical_law_holds());
        assert!(!r.literal_law_holds());
        let r = divisibility_report(&b(2), 1, 5).unwrap();
        assert!(r.ymsq_divides_yn && r.ym_divides_n && r.m_ym_divides_n);
        assert_eq!(divisibility_report(&b(2), 0, 5), Err(PellError::InvalidIndex { m: 0, n: 5 }));
    }

    #[test]
    fn addition_law_holds() {
        for a in 2..=20 {
            let d = b(a * a - 1);
            let seq = pell_sequence(&b(a), 100).unwrap();
            for s in &seq {
                assert!(verify_pell(&b(a), &s.x, &s.y));
            }
            for m in (0..=50).step_by(7) {
                for n in 0..=50 {
                    let (sm, sn, smn) = (&seq[m], &seq[n], &seq[m + n]);
                    assert_eq!(smn.x, &sm.x * &sn.x + &d * &sm.y * &sn.y);
                    assert_eq!(smn.y, &sm.x * &sn.y + &sm.y * &sn.x);
                }
            }
        }
    }

    #[test]
    fn brute_force_solutions_are_in_the_sequence() {
        for a in 2..=10 {
            let seq = pell_sequence(&b(a), 40).unwrap();
            for (x, y) in enumerate_solutions_below(&b(a), &b(10_000)).unwrap() {
                assert!(in_sequence(&seq, &x, &y), "a={a} ({x}, {y})");
            }
        }
    }

    #[test]
    fn divisibility_laws_on_small_ranges() {
        for a in 2..=8 {
            for m in 1..=12u64 {
                for n in 1..=120u64 {
                    let r = divisibility_report(&b(a), m, n).unwrap();
                    assert!(r.classical_law_holds(), "a={a} m={m} n={n}");
                    assert_eq!(r.y_n.is_multiple_of(&r.y_m), n % m == 0, "a={a} m={m} n={n}");
                }
            }
        }
    }
}
