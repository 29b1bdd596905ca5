//! The family `y^2 = (x - a1 f)(x - a2 f)(x - a3 f)` with `f = f(m/n)` and
//! `f(x) = (x - a1)(x - a2)(x - a3)`.
//!
//! Every member has the point `(f m/n, f^2)` on it. Scaling by `u = n^3`
//! clears denominators: with `F = (m - a1 n)(m - a2 n)(m - a3 n)` the member
//! becomes the split curve with roots `a_i F n^3` and the point
//! `(F m n^2, F^2 n^3)`.

use std::ops::RangeInclusive;

use num::{BigInt, Integer, One, Signed, Zero};
use rayon::prelude::*;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::descent::{self, DescentError, SearchModel, SelmerReport, SplitCurve};
use crate::elliptic::PointQ;
use crate::json;
use crate::ntheory::{is_prime, BigRat, Budget};

/// Recorded in every report so readers know which model the numbers refer to.
pub const MODEL_NOTE: &str = "integral model: e_i = a_i*F*n^3, point (F*m*n^2, F^2*n^3)";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("parameters must be pairwise distinct, got {0}, {1}, {2}")]
    RepeatedParams(BigInt, BigInt, BigInt),
    #[error("n must be at least 1, got {0}")]
    NonPositiveN(BigInt),
    #[error("m = {m} and n = {n} are not coprime")]
    NotCoprime { m: BigInt, n: BigInt },
    #[error("m/n = {m}/{n} is a root of f, so the member is degenerate")]
    Degenerate { m: BigInt, n: BigInt },
    #[error("member (m = {m}, n = {n}) has a non-torsion point but Selmer bound 0")]
    Inconsistent { m: BigInt, n: BigInt },
    #[error("member (m = {m}, n = {n}): {source}")]
    Descent { m: BigInt, n: BigInt, source: DescentError },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FamilyParams {
    a: [BigInt; 3],
}

impl FamilyParams {
    pub fn new(a1: BigInt, a2: BigInt, a3: BigInt) -> Result<Self, FamilyError> {
        if a1 == a2 || a1 == a3 || a2 == a3 {
            return Err(FamilyError::RepeatedParams(a1, a2, a3));
        }
        Ok(FamilyParams { a: [a1, a2, a3] })
    }

    pub fn from_ints(a1: i64, a2: i64, a3: i64) -> Result<Self, FamilyError> {
        Self::new(a1.into(), a2.into(), a3.into())
    }

    pub fn a(&self) -> &[BigInt; 3] {
        &self.a
    }

    /// The three linear forms `m - a_i n`.
    pub fn linear_forms(&self, m: &BigInt, n: &BigInt) -> [BigInt; 3] {
        self.a.clone().map(|ai| m - ai * n)
    }

    pub fn to_json(&self) -> Value {
        json::ints(self.a.iter())
    }
}

/// `(t - a1)(t - a2)(t - a3)`.
pub fn f_eval(params: &FamilyParams, t: &BigRat) -> BigRat {
    params.a.iter().map(|ai| t - BigRat::from_integer(ai.clone())).product()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyMember {
    pub params: FamilyParams,
    pub m: BigInt,
    pub n: BigInt,
    /// `(m - a1 n)(m - a2 n)(m - a3 n)`
    pub f: BigInt,
    pub curve: SplitCurve,
    pub taut_point: PointQ,
    pub disc_core: BigInt,
}

pub fn make_member(params: &FamilyParams, m: &BigInt, n: &BigInt) -> Result<FamilyMember, FamilyError> {
    if !n.is_positive() {
        return Err(FamilyError::NonPositiveN(n.clone()));
    }
    if !m.gcd(n).is_one() {
        return Err(FamilyError::NotCoprime { m: m.clone(), n: n.clone() });
    }
    let f: BigInt = params.linear_forms(m, n).iter().product();
    if f.is_zero() {
        return Err(FamilyError::Degenerate { m: m.clone(), n: n.clone() });
    }
    let n2 = n * n;
    let n3 = &n2 * n;
    let [e1, e2, e3] = params.a.clone().map(|ai| ai * &f * &n3);
    let curve = SplitCurve::new(e1, e2, e3).expect("distinct parameters and F != 0 give distinct roots");
    let x = &f * m * &n2;
    let y = &f * &f * &n3;
    let taut_point = PointQ::affine(BigRat::from_integer(x), BigRat::from_integer(y));
    assert!(curve.contains(&taut_point), "tautological point off the curve for m = {m}, n = {n}");
    Ok(FamilyMember { params: params.clone(), m: m.clone(), n: n.clone(), disc_core: n * &f, f, curve, taut_point })
}

/// `n (m - a1 n)(m - a2 n)(m - a3 n)`.
pub fn disc_core(member: &FamilyMember) -> BigInt {
    &member.n * &member.f
}

/// Coprime `(m, n)` in the box with `n` prime and every `|m - a_i n|`
/// prime, ordered by `m` then `n`. Signs are ignored: `-7` counts as prime.
pub fn four_primes_search(
    params: &FamilyParams,
    m_range: RangeInclusive<i64>,
    n_range: RangeInclusive<i64>,
) -> Vec<(BigInt, BigInt)> {
    let ms: Vec<i64> = m_range.collect();
    ms.par_iter()
        .flat_map_iter(|&m| {
            let m = BigInt::from(m);
            n_range
                .clone()
                .filter_map(|n| {
                    let n = BigInt::from(n);
                    let ok = is_prime(&n)
                        && m.gcd(&n).is_one()
                        && params.linear_forms(&m, &n).iter().all(|l| is_prime(&l.abs()));
                    ok.then(|| (m.clone(), n))
                })
                .collect::<Vec<_>>()
        })
        .collect()
}

/// Every coprime `(m, n)` with `n >= 1` and `F != 0`, ordered by `m` then `n`.
pub fn all_members_in_box(
    params: &FamilyParams,
    m_range: RangeInclusive<i64>,
    n_range: RangeInclusive<i64>,
) -> Vec<(BigInt, BigInt)> {
    let mut out = Vec::new();
    for m in m_range {
        for n in n_range.clone().filter(|n| *n >= 1) {
            let (m, n) = (BigInt::from(m), BigInt::from(n));
            if m.gcd(&n).is_one() && params.linear_forms(&m, &n).iter().all(|l| !l.is_zero()) {
                out.push((m, n));
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MemberReport {
    pub member: FamilyMember,
    /// Order of the tautological point, `None` if it has infinite order.
    pub taut_torsion: Option<u32>,
    /// Non-torsion point used for the lower bound (the tautological point
    /// unless that is torsion and the search found another).
    pub witness: Option<PointQ>,
    pub selmer: Option<SelmerReport>,
    pub certified: bool,
    pub inconclusive_reason: Option<String>,
}

impl MemberReport {
    pub fn lower(&self) -> u32 {
        self.witness.is_some() as u32
    }

    pub fn to_json(&self) -> Value {
        let m = &self.member;
        let mut obj = Map::new();
        obj.insert("schema".into(), json!(json::SCHEMA_VERSION));
        obj.insert("params".into(), m.params.to_json());
        obj.insert("m".into(), json::int(&m.m));
        obj.insert("n".into(), json::int(&m.n));
        obj.insert("F".into(), json::int(&m.f));
        obj.insert("disc_core".into(), json::int(&m.disc_core));
        obj.insert("e".into(), m.curve.to_json());
        obj.insert("model".into(), json!(MODEL_NOTE));
        obj.insert("taut_point".into(), m.taut_point.to_json());
        obj.insert("taut_torsion".into(), json!(self.taut_torsion));
        obj.insert("witness".into(), json!(self.witness.as_ref().map(|p| p.to_string())));
        obj.insert("selmer".into(), self.selmer.as_ref().map_or(Value::Null, SelmerReport::to_json));
        obj.insert("certified".into(), json!(self.certified));
        if let Some(reason) = &self.inconclusive_reason {
            obj.insert("inconclusive_reason".into(), json!(reason));
        }
        Value::Object(obj)
    }
}

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub m_range: RangeInclusive<i64>,
    pub n_range: RangeInclusive<i64>,
    /// Restrict to boxes where `n` and all `|m - a_i n|` are prime.
    pub prime_filter: bool,
    /// Height for a fallback point search when the tautological point is torsion.
    pub search_height: BigInt,
    pub budget: Budget,
}

/// Builds, checks and descends on every member of the box. Members are
/// processed in parallel on the current rayon pool and returned in box order.
pub fn rank_one_pipeline(params: &FamilyParams, cfg: &PipelineConfig) -> Result<Vec<MemberReport>, FamilyError> {
    let pairs = if cfg.prime_filter {
        four_primes_search(params, cfg.m_range.clone(), cfg.n_range.clone())
    } else {
        all_members_in_box(params, cfg.m_range.clone(), cfg.n_range.clone())
    };
    pairs.par_iter().map(|(m, n)| member_report(params, m, n, cfg)).collect()
}

pub fn member_report(params: &FamilyParams, m: &BigInt, n: &BigInt, cfg: &PipelineConfig) -> Result<MemberReport, FamilyError> {
    let member = make_member(params, m, n)?;
    let model = SearchModel::new(&member.curve);
    let taut_torsion = model.torsion_order(&member.taut_point).expect("tautological point is on the curve");
    let mut witness = taut_torsion.is_none().then(|| member.taut_point.clone());
    let mut inconclusive = Vec::new();

    if witness.is_none() {
        match descent::search_points(&member.curve, &cfg.search_height) {
            Ok(points) => {
                witness = points.into_iter().find(|p| matches!(model.torsion_order(p), Ok(None)));
            }
            Err(e) => inconclusive.push(format!("point search failed: {e}")),
        }
        if witness.is_none() {
            inconclusive.push(format!("tautological point has order {}", taut_torsion.unwrap_or(0)));
        }
    }

    let selmer = match descent::two_selmer(&member.curve, cfg.budget) {
        Ok(report) => Some(report),
        Err(e @ (DescentError::ClosureViolation { .. } | DescentError::LocalImageIncomplete { .. })) => {
            return Err(FamilyError::Descent { m: m.clone(), n: n.clone(), source: e });
        }
        Err(e) => {
            inconclusive.push(format!("descent failed: {e}"));
            None
        }
    };
    if let Some(report) = &selmer {
        if witness.is_some() && report.selmer_rank_bound == 0 {
            return Err(FamilyError::Inconsistent { m: m.clone(), n: n.clone() });
        }
        if report.selmer_rank_bound > 1 {
            inconclusive.push(format!("Selmer rank bound {} exceeds 1", report.selmer_rank_bound));
        }
    }
    let certified = certifies(witness.is_some(), selmer.as_ref().map(|s| s.selmer_rank_bound));
    Ok(MemberReport {
        member,
        taut_torsion,
        witness,
        selmer,
        certified,
        inconclusive_reason: (!inconclusive.is_empty()).then(|| inconclusive.join("; ")),
    })
}

/// Rank exactly one needs both a non-torsion point and a Selmer bound of 1.
fn certifies(has_witness: bool, rank_bound: Option<u32>) -> bool {
    has_witness && rank_bound == Some(1)
}
