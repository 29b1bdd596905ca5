use std::sync::OnceLock;

use num::{BigInt, BigUint, Integer, One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// Seed for the random Miller-Rabin bases used above 64 bits.
pub const PRIMALITY_SEED: u64 = 0x6e74_6b69_745f_6d72;

const RANDOM_ROUNDS: usize = 64;

// Deterministic for every n < 3.3 * 10^24.
const WITNESSES_64: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

const SIEVE_LIMIT: usize = 1_000_000;

/// All primes below 10^6, sieved once.
pub fn small_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let mut composite = vec![false; SIEVE_LIMIT];
        let mut primes = Vec::with_capacity(80_000);
        for i in 2..SIEVE_LIMIT {
            if !composite[i] {
                primes.push(i as u32);
                let mut j = i * i;
                while j < SIEVE_LIMIT {
                    composite[j] = true;
                    j += i;
                }
            }
        }
        primes
    })
}

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

pub(crate) fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &WITNESSES_64 {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &WITNESSES_64 {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn strong_probable_prime(n: &BigUint, n_minus_1: &BigUint, d: &BigUint, s: u64, a: &BigUint) -> bool {
    let mut x = a.modpow(d, n);
    if x.is_one() || &x == n_minus_1 {
        return true;
    }
    for _ in 1..s {
        x = &x * &x % n;
        if &x == n_minus_1 {
            return true;
        }
        if x.is_one() {
            return false;
        }
    }
    false
}

/// Primality test: exact below 2^64, error below 2^-128 above.
///
/// Inputs `<= 1` (including all negatives) are not prime.
pub fn is_prime(n: &BigInt) -> bool {
    is_prime_seeded(n, PRIMALITY_SEED)
}

/// [`is_prime`] with an explicit seed for the random bases above 64 bits.
/// The bases depend only on `(seed, n)`, so results are reproducible.
pub fn is_prime_seeded(n: &BigInt, seed: u64) -> bool {
    if !n.is_positive() {
        return false;
    }
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    let n = n.magnitude();
    for &p in small_primes().iter().take(200) {
        if (n % p).is_zero() {
            return false;
        }
    }
    let n_minus_1 = n - 1u32;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    if !strong_probable_prime(n, &n_minus_1, &d, s, &BigUint::from(2u32)) {
        return false;
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed ^ n.iter_u64_digits().fold(0u64, |h, w| h.rotate_left(7) ^ w));
    let bytes = (n.bits() as usize).div_ceil(8) + 8;
    let span = n - 3u32;
    for _ in 0..RANDOM_ROUNDS {
        let raw: Vec<u8> = (0..bytes).map(|_| rng.gen()).collect();
        let a = BigUint::from_bytes_le(&raw).mod_floor(&span) + 2u32;
        if !strong_probable_prime(n, &n_minus_1, &d, s, &a) {
            return false;
        }
    }
    true
}
