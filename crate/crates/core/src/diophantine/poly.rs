use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num::{BigInt, One, Signed, ToPrimitive, Zero};

/// Sparse polynomial with integer coefficients in `arity` variables.
///
/// Terms are keyed by exponent vector; zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntPolynomial {
    arity: usize,
    terms: BTreeMap<Vec<u32>, BigInt>,
}

impl IntPolynomial {
    pub fn zero(arity: usize) -> Self {
        IntPolynomial { arity, terms: BTreeMap::new() }
    }

    pub fn constant(arity: usize, c: BigInt) -> Self {
        let mut p = Self::zero(arity);
        p.add_term(vec![0; arity], c);
        p
    }

    /// The polynomial consisting of the single variable with index `var`.
    pub fn var(arity: usize, var: usize) -> Self {
        assert!(var < arity, "variable index {var} out of range for arity {arity}");
        let mut exps = vec![0; arity];
        exps[var] = 1;
        let mut p = Self::zero(arity);
        p.add_term(exps, BigInt::one());
        p
    }

    /// Builds from `(coefficient, exponents)` pairs, merging duplicates.
    pub fn from_terms(arity: usize, terms: impl IntoIterator<Item = (BigInt, Vec<u32>)>) -> Self {
        let mut p = Self::zero(arity);
        for (c, e) in terms {
            assert_eq!(e.len(), arity, "exponent vector length must equal arity");
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, exps: Vec<u32>, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += c;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
            Entry::Vacant(slot) => {
                slot.insert(c);
            }
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &BigInt)> {
        self.terms.iter()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.arity, other.arity);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        IntPolynomial {
            arity: self.arity,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.arity, other.arity);
        let mut out = Self::zero(self.arity);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, mut k: u32) -> Self {
        let mut acc = Self::constant(self.arity, BigInt::one());
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        acc
    }

    /// Exact value at `point`; `None` if the point has the wrong length.
    pub fn eval(&self, point: &[BigInt]) -> Option<BigInt> {
        if point.len() != self.arity {
            return None;
        }
        let mut total = BigInt::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (v, k) in point.iter().zip(e) {
                if *k > 0 {
                    t *= num::pow(v.clone(), *k as usize);
                }
            }
            total += t;
        }
        Some(total)
    }
}

impl fmt::Display for IntPolynomial {
    /// Renders with variables named `v1..vN`; callers that know the
    /// parameter/witness split use [`IntPolynomial::render`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (1..=self.arity).map(|i| format!("v{i}")).collect();
        f.write_str(&self.render(&names))
    }
}

impl IntPolynomial {
    /// Text form using the given variable names, parseable back by
    /// [`super::parse_polynomial`] when the names are `x*`/`y*`.
    pub fn render(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        // highest total degree first
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|(ea, _), (eb, _)| {
            let da: u32 = ea.iter().sum();
            let db: u32 = eb.iter().sum();
            db.cmp(&da).then(eb.cmp(ea))
        });
        for (i, (e, c)) in terms.into_iter().enumerate() {
            let sign = if c.is_negative() { "-" } else { "+" };
            if i == 0 {
                if c.is_negative() {
                    out.push('-');
                }
            } else {
                out.push_str(&format!(" {sign} "));
            }
            let mag = c.abs();
            let factors: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, k)| **k > 0)
                .map(|(v, k)| if *k == 1 { names[v].clone() } else { format!("{}^{k}", names[v]) })
                .collect();
            if factors.is_empty() {
                out.push_str(&mag.to_string());
            } else {
                if !mag.is_one() {
                    out.push_str(&format!("{mag}*"));
                }
                out.push_str(&factors.join("*"));
            }
        }
        out
    }
}

/// Closed integer interval used to bound a polynomial over a box.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Interval {
    pub lo: i128,
    pub hi: i128,
}

impl Interval {
    pub fn point(v: i128) -> Self {
        Interval { lo: v, hi: v }
    }

    fn pow(self, k: u32) -> Option<Self> {
        let a = self.lo.checked_pow(k)?;
        let b = self.hi.checked_pow(k)?;
        if k % 2 == 0 && self.lo < 0 && self.hi > 0 {
            Some(Interval { lo: 0, hi: a.max(b) })
        } else {
            Some(Interval { lo: a.min(b), hi: a.max(b) })
        }
    }

    fn mul(self, o: Self) -> Option<Self> {
        let c = [
            self.lo.checked_mul(o.lo)?,
            self.lo.checked_mul(o.hi)?,
            self.hi.checked_mul(o.lo)?,
            self.hi.checked_mul(o.hi)?,
        ];
        Some(Interval { lo: *c.iter().min()?, hi: *c.iter().max()? })
    }

    pub fn contains_zero(self) -> bool {
        self.lo <= 0 && 0 <= self.hi
    }
}

/// Polynomial preprocessed for repeated evaluation on small integer points.
pub(crate) struct Compiled<'a> {
    poly: &'a IntPolynomial,
    small: Option<Vec<(i128, Vec<u32>)>>,
}

impl<'a> Compiled<'a> {
    pub fn new(poly: &'a IntPolynomial) -> Self {
        let small = poly.terms.iter().map(|(e, c)| c.to_i128().map(|c| (c, e.clone()))).collect();
        Compiled { poly, small }
    }

    /// Bounds the polynomial over the box; `None` when the bound overflows
    /// i128, in which case nothing can be concluded.
    pub fn bound(&self, boxes: &[Interval]) -> Option<Interval> {
        let terms = self.small.as_ref()?;
        let mut acc = Interval::point(0);
        for (c, e) in terms {
            let mut t = Interval::point(*c);
            for (iv, k) in boxes.iter().zip(e) {
                if *k > 0 {
                    t = t.mul(iv.pow(*k)?)?;
                }
            }
            acc = Interval { lo: acc.lo.checked_add(t.lo)?, hi: acc.hi.checked_add(t.hi)? };
        }
        Some(acc)
    }

    /// Exact test for `P(point) = 0`.
    pub fn vanishes_at(&self, point: &[i128]) -> bool {
        let boxes: Vec<Interval> = point.iter().map(|v| Interval::point(*v)).collect();
        match self.bound(&boxes) {
            Some(iv) => iv.lo == 0,
            None => {
                let big: Vec<BigInt> = point.iter().map(|v| BigInt::from(*v)).collect();
                self.poly.eval(&big).is_some_and(|v| v.is_zero())
            }
        }
    }
}
