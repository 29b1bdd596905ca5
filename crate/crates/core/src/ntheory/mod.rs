//! Exact integer and rational primitives shared by every other module.

mod factor;
mod padic;
mod primes;
mod squares;

use num::{BigInt, Integer, One, Signed, Zero};
use thiserror::Error;

pub use factor::{factorize, squarefree_part, Budget, Factorization, TRIAL_DIVISION_BOUND};
pub use padic::{is_padic_square, valuation, SquareClass};
pub use primes::{is_prime, is_prime_seeded, small_primes, PRIMALITY_SEED};
pub use squares::{four_squares, two_squares_prime, FOUR_SQUARES_LEX_LIMIT};

pub type BigRat = num::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NtError {
    #[error("input must be nonzero")]
    Zero,
    #[error("input must be non-negative, got {0}")]
    Negative(BigInt),
    #[error("modulus must be odd and positive, got {0}")]
    BadModulus(BigInt),
    #[error("{0} is not prime")]
    NotPrime(BigInt),
    #[error("factorization of {value} incomplete within budget (unfactored cofactor {cofactor})")]
    IncompleteFactorization { value: BigInt, cofactor: BigInt },
    #[error("cannot parse {0:?} as a number")]
    Parse(String),
}

/// Non-negative greatest common divisor, with `gcd(0, 0) = 0`.
pub fn gcd(a: &BigInt, b: &BigInt) -> BigInt {
    a.gcd(b)
}

/// Jacobi symbol `(a/n)` for odd positive `n`.
pub fn jacobi(a: &BigInt, n: &BigInt) -> Result<i8, NtError> {
    if !n.is_positive() || n.is_even() {
        return Err(NtError::BadModulus(n.clone()));
    }
    let mut a = a.mod_floor(n);
    let mut n = n.clone();
    let mut result = 1i8;
    let three = BigInt::from(3);
    let five = BigInt::from(5);
    let eight = BigInt::from(8);
    let four = BigInt::from(4);
    while !a.is_zero() {
        while a.is_even() {
            a >>= 1;
            let r = n.mod_floor(&eight);
            if r == three || r == five {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a.mod_floor(&four) == three && n.mod_floor(&four) == three {
            result = -result;
        }
        a = a.mod_floor(&n);
    }
    if n.is_one() {
        Ok(result)
    } else {
        Ok(0)
    }
}

/// Floor of the square root of a non-negative integer.
pub fn isqrt(n: &BigInt) -> BigInt {
    debug_assert!(!n.is_negative());
    n.sqrt()
}

/// Returns the exact square root when `n` is a perfect square.
pub fn exact_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    // quadratic residues mod 64 reject most non-squares cheaply
    const SQUARES_MOD_64: u64 = {
        let mut mask = 0u64;
        let mut i = 0;
        while i < 64 {
            mask |= 1 << (i * i % 64);
            i += 1;
        }
        mask
    };
    let low = n.iter_u32_digits().next().unwrap_or(0) & 63;
    if (SQUARES_MOD_64 >> low) & 1 == 0 {
        return None;
    }
    let r = n.sqrt();
    if &r * &r == *n {
        Some(r)
    } else {
        None
    }
}

/// Exact square root of a non-negative rational, if it has one.
pub fn rational_sqrt(r: &BigRat) -> Option<BigRat> {
    let num = exact_sqrt(r.numer())?;
    let den = exact_sqrt(r.denom())?;
    Some(BigRat::new(num, den))
}

pub fn parse_bigint(s: &str) -> Result<BigInt, NtError> {
    s.trim().parse().map_err(|_| NtError::Parse(s.to_string()))
}

/// Parses `"p/q"` or a plain integer.
pub fn parse_bigrat(s: &str) -> Result<BigRat, NtError> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p = parse_bigint(p)?;
            let q = parse_bigint(q)?;
            if q.is_zero() {
                return Err(NtError::Parse(s.to_string()));
            }
            Ok(BigRat::new(p, q))
        }
        None => Ok(BigRat::from_integer(parse_bigint(s)?)),
    }
}
