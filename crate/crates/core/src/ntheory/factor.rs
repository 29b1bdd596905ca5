use std::collections::BTreeMap;

use num::{BigInt, BigUint, Integer, One, Signed, ToPrimitive, Zero};

use super::primes::{is_prime_u64, mul_mod, small_primes};
use super::{is_prime, NtError};

/// Trial division covers every prime below this bound.
pub const TRIAL_DIVISION_BOUND: u64 = 1_000_000;

/// Iteration allowance for Pollard rho, shared across all cofactors of one input.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget(pub u64);

impl Default for Budget {
    fn default() -> Self {
        Budget(2_000_000)
    }
}

/// Prime factorization of a nonzero integer.
///
/// When `complete` is false, `unfactored` holds the composite cofactors the
/// rho budget could not split; `factors` still lists only proven primes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub sign: i8,
    pub factors: Vec<(BigInt, u32)>,
    pub unfactored: Vec<BigInt>,
    pub complete: bool,
}

impl Factorization {
    /// sign * prod p^e * prod(unfactored).
    pub fn product(&self) -> BigInt {
        let mut acc = BigInt::from(self.sign);
        for (p, e) in &self.factors {
            acc *= num::pow(p.clone(), *e as usize);
        }
        for c in &self.unfactored {
            acc *= c;
        }
        acc
    }

    pub fn primes(&self) -> impl Iterator<Item = &BigInt> {
        self.factors.iter().map(|(p, _)| p)
    }
}

/// Trial division to [`TRIAL_DIVISION_BOUND`], then Brent's variant of
/// Pollard rho within `budget`.
pub fn factorize(n: &BigInt, budget: Budget) -> Result<Factorization, NtError> {
    if n.is_zero() {
        return Err(NtError::Zero);
    }
    let sign = if n.is_negative() { -1 } else { 1 };
    let mut found: BTreeMap<BigUint, u32> = BTreeMap::new();
    let mut rest = n.magnitude().clone();

    for &p in small_primes() {
        if BigUint::from(p as u64 * p as u64) > rest {
            break;
        }
        while (&rest % p).is_zero() {
            rest /= p;
            *found.entry(BigUint::from(p)).or_default() += 1;
        }
    }

    let mut unfactored = Vec::new();
    if !rest.is_one() {
        let bound_sq = BigUint::from(TRIAL_DIVISION_BOUND) * TRIAL_DIVISION_BOUND;
        if rest < bound_sq {
            *found.entry(rest).or_default() += 1;
        } else {
            let mut remaining = budget.0;
            let mut stack = vec![rest];
            while let Some(c) = stack.pop() {
                if is_prime(&BigInt::from(c.clone())) {
                    *found.entry(c).or_default() += 1;
                    continue;
                }
                let root = c.sqrt();
                if &root * &root == c {
                    stack.push(root.clone());
                    stack.push(root);
                    continue;
                }
                match split(&c, &mut remaining) {
                    Some(d) => {
                        let other = &c / &d;
                        stack.push(d);
                        stack.push(other);
                    }
                    None => unfactored.push(BigInt::from(c)),
                }
            }
        }
    }
    unfactored.sort();

    Ok(Factorization {
        sign,
        complete: unfactored.is_empty(),
        factors: found.into_iter().map(|(p, e)| (BigInt::from(p), e)).collect(),
        unfactored,
    })
}

/// `n = s * t^2` with `s` squarefree carrying the sign of `n` and `t > 0`.
pub fn squarefree_part(n: &BigInt) -> Result<(BigInt, BigInt), NtError> {
    let f = factorize(n, Budget::default())?;
    if !f.complete {
        return Err(NtError::IncompleteFactorization {
            value: n.clone(),
            cofactor: f.unfactored.iter().product(),
        });
    }
    let mut s = BigInt::from(f.sign);
    let mut t = BigInt::one();
    for (p, e) in &f.factors {
        if e % 2 == 1 {
            s *= p;
        }
        t *= num::pow(p.clone(), (*e / 2) as usize);
    }
    Ok((s, t))
}

/// Finds a nontrivial divisor of the odd composite `n`, or `None` once the
/// budget runs out.
fn split(n: &BigUint, remaining: &mut u64) -> Option<BigUint> {
    let small = n.to_u64();
    debug_assert!(small.map_or(true, |s| !is_prime_u64(s)));
    let mut c = 1u64;
    while *remaining > 0 {
        let found = match small {
            Some(s) => brent_u64(s, c, remaining).map(BigUint::from),
            None => brent_big(n, &BigUint::from(c), remaining),
        };
        if found.is_some() {
            return found;
        }
        c += 1;
    }
    None
}

const BATCH: u64 = 128;

fn brent_u64(n: u64, c: u64, remaining: &mut u64) -> Option<u64> {
    let f = |v: u64| (mul_mod(v, v, n) + c) % n;
    let (mut y, mut r, mut q, mut g) = (2u64, 1u64, 1u64, 1u64);
    let mut x = y;
    let mut ys = y;
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            let steps = BATCH.min(r - k);
            for _ in 0..steps {
                y = f(y);
                q = mul_mod(q, x.abs_diff(y), n);
            }
            g = q.gcd(&n);
            k += steps;
            *remaining = remaining.saturating_sub(steps);
            if *remaining == 0 && g == 1 {
                return None;
            }
        }
        r *= 2;
    }
    if g == n {
        loop {
            ys = f(ys);
            g = x.abs_diff(ys).gcd(&n);
            if g > 1 {
                break;
            }
        }
    }
    (g != n).then_some(g)
}

fn brent_big(n: &BigUint, c: &BigUint, remaining: &mut u64) -> Option<BigUint> {
    let f = |v: &BigUint| (v * v + c) % n;
    let one = BigUint::one();
    let (mut y, mut r, mut q, mut g) = (BigUint::from(2u32), 1u64, one.clone(), one.clone());
    let mut x = y.clone();
    let mut ys = y.clone();
    let diff = |a: &BigUint, b: &BigUint| if a > b { a - b } else { b - a };
    while g.is_one() {
        x = y.clone();
        for _ in 0..r {
            y = f(&y);
        }
        let mut k = 0;
        while k < r && g.is_one() {
            ys = y.clone();
            let steps = BATCH.min(r - k);
            for _ in 0..steps {
                y = f(&y);
                q = q * diff(&x, &y) % n;
            }
            g = q.gcd(n);
            k += steps;
            *remaining = remaining.saturating_sub(steps);
            if *remaining == 0 && g.is_one() {
                return None;
            }
        }
        r *= 2;
    }
    if &g == n {
        loop {
            ys = f(&ys);
            g = diff(&x, &ys).gcd(n);
            if !g.is_one() {
                break;
            }
        }
    }
    (&g != n).then_some(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn b(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn trial(mut n: u64) -> Vec<(u64, u32)> {
        let mut out = Vec::new();
        let mut d = 2;
        while d * d <= n {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            if e > 0 {
                out.push((d, e));
            }
            d += 1;
        }
        if n > 1 {
            out.push((n, 1));
        }
        out
    }

    fn pairs(f: &Factorization) -> Vec<(u64, u32)> {
        f.factors.iter().map(|(p, e)| (p.to_u64().unwrap(), *e)).collect()
    }

    #[test]
    fn examples() {
        let f = factorize(&b(360), Budget::default()).unwrap();
        assert_eq!(pairs(&f), vec![(2, 3), (3, 2), (5, 1)]);
        assert!(f.complete);
        assert_eq!(f.sign, 1);

        let f = factorize(&b(-7), Budget::default()).unwrap();
        assert_eq!(f.sign, -1);
        assert_eq!(pairs(&f), vec![(7, 1)]);

        assert_eq!(trial(10403), vec![(101, 1), (103, 1)]);
        let f = factorize(&b(10403), Budget::default()).unwrap();
        assert_eq!(pairs(&f), vec![(101, 1), (103, 1)]);

        assert_eq!(factorize(&b(0), Budget::default()), Err(NtError::Zero));
        let f = factorize(&b(1), Budget::default()).unwrap();
        assert!(f.factors.is_empty() && f.complete);
    }

    #[test]
    fn rho_splits_products_of_large_primes() {
        let p = BigInt::from(1_000_003u64);
        let q = BigInt::from(998_244_353u64);
        let r = BigInt::from(18_446_744_073_709_551_557u64);
        let n = &p * &q * &q * &r;
        let f = factorize(&n, Budget::default()).unwrap();
        assert!(f.complete);
        assert_eq!(f.factors, vec![(p, 1), (q, 2), (r, 1)]);
        assert_eq!(f.product(), n);
    }

    #[test]
    fn exhausted_budget_is_reported() {
        let p = BigInt::from(1_000_000_007u64);
        let q = BigInt::from(1_000_000_009u64);
        let n = BigInt::from(12) * &p * &q;
        let f = factorize(&n, Budget(0)).unwrap();
        assert!(!f.complete);
        assert_eq!(f.unfactored, vec![&p * &q]);
        assert_eq!(f.product(), n);
    }

    #[test]
    fn squarefree_examples() {
        assert_eq!(squarefree_part(&b(18)).unwrap(), (b(2), b(3)));
        assert_eq!(squarefree_part(&b(-4)).unwrap(), (b(-1), b(2)));
        assert_eq!(squarefree_part(&b(3600)).unwrap(), (b(1), b(60)));
        assert_eq!(squarefree_part(&b(0)), Err(NtError::Zero));
    }

    proptest! {
        #[test]
        fn complete_factorization_round_trips(n in 1u64..1_000_000_000_000, neg in any::<bool>()) {
            let v = if neg { -(n as i64) } else { n as i64 };
            let f = factorize(&b(v), Budget::default()).unwrap();
            prop_assert!(f.complete);
            prop_assert_eq!(f.product(), b(v));
            prop_assert!(f.factors.windows(2).all(|w| w[0].0 < w[1].0));
            prop_assert!(f.primes().all(is_prime));
        }

        #[test]
        fn squarefree_part_is_squarefree(n in -10_000_000i64..10_000_000) {
            prop_assume!(n != 0);
            let (s, t) = squarefree_part(&b(n)).unwrap();
            prop_assert_eq!(&s * &t * &t, b(n));
            prop_assert!(t.is_positive());
            prop_assert_eq!(s.signum(), b(n).signum());
            let s = s.abs().to_u64().unwrap();
            let mut d = 2u64;
            while d * d <= s && d <= 10_000 {
                prop_assert!(s % (d * d) != 0);
                d += 1;
            }
        }
    }
}
