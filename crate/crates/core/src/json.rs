//! JSON encoding helpers. Integers are written as exact JSON numbers of any
//! length, rationals and points as strings.

use std::str::FromStr;

use num::BigInt;
use serde_json::{Number, Value};

use crate::ntheory::BigRat;

/// Version tag carried by every emitted document.
pub const SCHEMA_VERSION: u32 = 1;

pub fn int(n: &BigInt) -> Value {
    Value::Number(Number::from_str(&n.to_string()).expect("decimal integer is a valid JSON number"))
}

pub fn ints<'a>(items: impl IntoIterator<Item = &'a BigInt>) -> Value {
    Value::Array(items.into_iter().map(int).collect())
}

pub fn rat(r: &BigRat) -> Value {
    Value::String(r.to_string())
}
