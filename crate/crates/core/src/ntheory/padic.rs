use num::{BigInt, Integer, Signed, ToPrimitive, Zero};

use super::{is_prime, jacobi, BigRat, NtError};

/// Exponent of `p` in the nonzero integer `n`.
pub fn valuation(n: &BigInt, p: &BigInt) -> u32 {
    debug_assert!(!n.is_zero());
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

fn strip(n: &BigInt, p: &BigInt) -> (u32, BigInt) {
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(p);
        if !r.is_zero() {
            return (v, n);
        }
        n = q;
        v += 1;
    }
}

/// Class of a nonzero rational in `Q_p^* / Q_p^*2` (or `R^* / R^*2`) as a
/// vector over F2.
///
/// Bit 0 is the valuation parity (the sign at the real place). For odd `p`
/// bit 1 marks a non-residue unit part; for `p = 2` bits 1 and 2 are the
/// characters `u = 3 (mod 4)` and `u = 3, 5 (mod 8)` of the unit part.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SquareClass(pub u8);

impl SquareClass {
    pub const TRIVIAL: SquareClass = SquareClass(0);

    /// Number of bits used at `p`: 2 for odd primes, 3 at 2.
    pub fn width(p: &BigInt) -> u32 {
        if *p == BigInt::from(2) {
            3
        } else {
            2
        }
    }

    pub fn real(r: &BigRat) -> SquareClass {
        SquareClass(r.is_negative() as u8)
    }

    /// Class at the prime `p`; `p` is assumed prime and `r` nonzero.
    pub fn at_prime(r: &BigRat, p: &BigInt) -> SquareClass {
        debug_assert!(!r.is_zero());
        let (vn, un) = strip(r.numer(), p);
        let (vd, ud) = strip(r.denom(), p);
        let parity = ((vn + vd) % 2) as u8;
        // u = un/ud has the same class as un*ud since ud^2 is a square unit
        let unit = un * ud;
        if *p == BigInt::from(2) {
            let m = unit.mod_floor(&BigInt::from(8)).to_u8().unwrap_or(0);
            let mod4 = (m % 4 == 3) as u8;
            let mod8 = (m == 3 || m == 5) as u8;
            SquareClass(parity | mod4 << 1 | mod8 << 2)
        } else {
            // p prime, so the Jacobi symbol is the Legendre symbol
            let nonresidue = (jacobi(&unit, p).unwrap_or(0) == -1) as u8;
            SquareClass(parity | nonresidue << 1)
        }
    }

    pub fn is_square(self) -> bool {
        self.0 == 0
    }
}

/// Whether the nonzero rational `r` is a square in `Q_p`.
pub fn is_padic_square(r: &BigRat, p: &BigInt) -> Result<bool, NtError> {
    if !is_prime(p) {
        return Err(NtError::NotPrime(p.clone()));
    }
    if r.is_zero() {
        return Err(NtError::Zero);
    }
    Ok(SquareClass::at_prime(r, p).is_square())
}
