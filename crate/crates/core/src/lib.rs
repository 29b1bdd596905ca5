//! Exact-arithmetic number theory toolkit.
//!
//! Modules build on each other bottom-up: [`ntheory`] supplies integers,
//! rationals, primality and factorization; [`pell`] and [`diophantine`] cover
//! Pell sequences and bounded witness search; [`elliptic`] implements the
//! group law on short Weierstrass curves over Q; [`descent`] runs a complete
//! 2-descent on curves with rational 2-torsion; [`family`] builds the
//! two-parameter family with a built-in point and certifies rank one members.

pub mod ntheory;

pub use num::BigInt;
pub use ntheory::BigRat;
pub mod json;
pub mod pell;
pub mod diophantine;
pub mod elliptic;
pub mod descent;
pub mod family;
