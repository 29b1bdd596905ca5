use num::{BigInt, Integer, One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use super::{exact_sqrt, is_prime, NtError};

/// Below this bound `four_squares` returns the lexicographically smallest
/// `(a, b, c, d)` with `a >= b >= c >= d >= 0`. At or above it the result is
/// found by a seeded randomized descent and is some valid witness.
pub const FOUR_SQUARES_LEX_LIMIT: u64 = 1 << 32;

const DESCENT_SEED: u64 = 0x4c61_6772_616e_6765;

fn isqrt_u64(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

fn ceil_sqrt_u64(n: u64) -> u64 {
    let r = isqrt_u64(n);
    if r * r == n {
        r
    } else {
        r + 1
    }
}

fn lex_smallest(n: u64) -> [u64; 4] {
    // a is the largest part, so a^2 >= n/4
    for a in ceil_sqrt_u64(n.div_ceil(4))..=isqrt_u64(n) {
        let r1 = n - a * a;
        for b in ceil_sqrt_u64(r1.div_ceil(3))..=a.min(isqrt_u64(r1)) {
            let r2 = r1 - b * b;
            for c in ceil_sqrt_u64(r2.div_ceil(2))..=b.min(isqrt_u64(r2)) {
                let r3 = r2 - c * c;
                let d = isqrt_u64(r3);
                if d * d == r3 && d <= c {
                    return [a, b, c, d];
                }
            }
        }
    }
    unreachable!("Lagrange: every non-negative integer is a sum of four squares")
}

/// `a^2 + b^2 = p` for a prime `p = 1 (mod 4)` (or `p = 2`), with `a >= b > 0`.
pub fn two_squares_prime(p: &BigInt) -> Option<(BigInt, BigInt)> {
    if *p == BigInt::from(2) {
        return Some((BigInt::one(), BigInt::one()));
    }
    if p.mod_floor(&BigInt::from(4)) != BigInt::one() {
        return None;
    }
    let exp = (p - 1u32) / 4u32;
    let minus_one = p - 1u32;
    // t = c^((p-1)/4) is a square root of -1 for any non-residue c
    let t = (2u32..)
        .map(|c| BigInt::from(c).modpow(&exp, p))
        .find(|t| (t * t).mod_floor(p) == minus_one)?;
    let (mut r0, mut r1) = (p.clone(), t);
    while &r1 * &r1 > *p {
        let r2 = r0.mod_floor(&r1);
        r0 = r1;
        r1 = r2;
    }
    let b = exact_sqrt(&(p - &r1 * &r1))?;
    Some(if r1 >= b { (r1, b) } else { (b, r1) })
}

fn randomized_descent(n: &BigInt) -> [BigInt; 4] {
    // n = 4^k * m with m not divisible by 4; solve for m and scale by 2^k
    let mut m = n.clone();
    let mut k = 0u32;
    while (&m % 4u32).is_zero() {
        m >>= 2;
        k += 1;
    }
    let mut rng = ChaCha20Rng::seed_from_u64(DESCENT_SEED ^ m.iter_u64_digits().fold(0u64, |h, w| h.rotate_left(9) ^ w));
    let span = m.sqrt() + 1u32;
    let bytes = (span.bits() as usize).div_ceil(8) + 8;
    let draw = |rng: &mut ChaCha20Rng| {
        let raw: Vec<u8> = (0..bytes).map(|_| rng.gen()).collect();
        BigInt::from_bytes_le(num::bigint::Sign::Plus, &raw).mod_floor(&span)
    };
    // parities of (x, y) making m - x^2 - y^2 = 1 (mod 4)
    let (x_odd, y_odd) = match (&m % 4u32).to_u32().unwrap() {
        1 => (false, false),
        2 => (true, false),
        _ => (true, true),
    };
    let fix = |v: BigInt, odd: bool| if v.is_odd() == odd { v } else { v + 1u32 };
    loop {
        let x = fix(draw(&mut rng), x_odd);
        let y = fix(draw(&mut rng), y_odd);
        let rest = &m - &x * &x - &y * &y;
        if !rest.is_positive() {
            continue;
        }
        let pair = if rest.is_one() {
            Some((BigInt::one(), BigInt::zero()))
        } else if is_prime(&rest) {
            two_squares_prime(&rest)
        } else {
            None
        };
        if let Some((c, d)) = pair {
            let scale = BigInt::one() << k;
            let mut out = [x * &scale, y * &scale, c * &scale, d * &scale];
            out.sort_by(|a, b| b.cmp(a));
            return out;
        }
    }
}

/// Four squares summing to `n`, sorted descending.
pub fn four_squares(n: &BigInt) -> Result<[BigInt; 4], NtError> {
    if n.is_negative() {
        return Err(NtError::Negative(n.clone()));
    }
    match n.to_u64() {
        Some(small) if small < FOUR_SQUARES_LEX_LIMIT => Ok(lex_smallest(small).map(BigInt::from)),
        _ => Ok(randomized_descent(n)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sum(w: &[BigInt; 4]) -> BigInt {
        w.iter().map(|v| v * v).sum()
    }

    /// Exhaustive oracle over a >= b >= c >= d >= 0, scanned lexicographically.
    fn lex_oracle(n: u64) -> [u64; 4] {
        let top = isqrt_u64(n);
        for a in 0..=top {
            for b in 0..=a {
                for c in 0..=b {
                    for d in 0..=c {
                        if a * a + b * b + c * c + d * d == n {
                            return [a, b, c, d];
                        }
                    }
                }
            }
        }
        unreachable!()
    }

    #[test]
    fn examples() {
        assert_eq!(four_squares(&BigInt::zero()).unwrap(), [0, 0, 0, 0].map(BigInt::from));
        assert_eq!(lex_oracle(7), [2, 1, 1, 1]);
        assert_eq!(four_squares(&BigInt::from(7)).unwrap(), [2, 1, 1, 1].map(BigInt::from));
        let w = four_squares(&BigInt::from(310)).unwrap();
        assert_eq!(sum(&w), BigInt::from(310));
        assert!(matches!(four_squares(&BigInt::from(-1)), Err(NtError::Negative(_))));
    }

    #[test]
    fn matches_exhaustive_lex_order() {
        for n in 0..400u64 {
            assert_eq!(four_squares(&BigInt::from(n)).unwrap(), lex_oracle(n).map(BigInt::from), "n={n}");
        }
    }

    #[test]
    fn re_sums_up_to_1e5() {
        for n in 0..=100_000u64 {
            let w = four_squares(&BigInt::from(n)).unwrap();
            assert_eq!(sum(&w), BigInt::from(n), "n={n}");
            assert!(w.windows(2).all(|p| p[0] >= p[1]) && !w[3].is_negative());
        }
    }

    #[test]
    fn large_inputs_use_descent() {
        let big: BigInt = BigInt::from(10).pow(40) + 12345u32;
        for n in [BigInt::from(FOUR_SQUARES_LEX_LIMIT), big.clone(), &big * 16u32, &big * 4u32 + 3u32, BigInt::from(7) << 100u32] {
            let w = four_squares(&n).unwrap();
            assert_eq!(sum(&w), n);
            assert_eq!(four_squares(&n).unwrap(), w);
        }
    }

    #[test]
    fn two_squares_for_primes() {
        for p in [5u64, 13, 17, 29, 1_000_000_009, 998_244_353] {
            let (a, b) = two_squares_prime(&BigInt::from(p)).unwrap();
            assert_eq!(&a * &a + &b * &b, BigInt::from(p));
        }
        assert!(two_squares_prime(&BigInt::from(7)).is_none());
    }
}
