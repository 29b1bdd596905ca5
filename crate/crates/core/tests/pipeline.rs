use num::{BigInt, Signed};
use proptest::prelude::*;

use ntkit::descent::{self, SplitCurve};
use ntkit::diophantine::{member_search, nonneg_witness, DiophantineSet};
use ntkit::elliptic::{self, CurveQ, PointQ};
use ntkit::family::{self, FamilyParams, PipelineConfig};
use ntkit::ntheory::{isqrt, Budget};

fn b(v: i64) -> BigInt {
    BigInt::from(v)
}

fn pool(n: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap()
}

#[test]
fn family_reports_ignore_thread_count() {
    let params = FamilyParams::from_ints(0, 1, 2).unwrap();
    let cfg = PipelineConfig {
        m_range: -30..=30,
        n_range: 1..=5,
        prime_filter: false,
        search_height: b(4),
        budget: Budget::default(),
    };
    let run = |threads| {
        pool(threads).install(|| {
            let reports = family::rank_one_pipeline(&params, &cfg).unwrap();
            reports.iter().map(|r| r.to_json().to_string()).collect::<Vec<_>>()
        })
    };
    let one = run(1);
    assert!(!one.is_empty());
    assert_eq!(one, run(3));
}

#[test]
fn selmer_reports_ignore_thread_count() {
    for n in [5, 6, 34, 41] {
        let c = SplitCurve::from_ints(0, n, -n).unwrap();
        let run = |threads| pool(threads).install(|| descent::two_selmer(&c, Budget::default()).unwrap().to_json());
        assert_eq!(run(1), run(4), "N={n}");
    }
}

// A point found on the short model comes back to the split model, and its
// descent image is one of the accepted classes.
#[test]
fn search_descend_round_trip() {
    let c = SplitCurve::from_ints(-2, 1, 3).unwrap();
    let report = descent::two_selmer(&c, Budget::default()).unwrap();
    let pts = descent::search_points(&c, &b(20)).unwrap();
    assert!(!pts.is_empty());
    for p in &pts {
        assert!(c.contains(p));
        assert!(report.contains(&descent::descent_image(&c, p).unwrap()));
    }
}

#[test]
fn scaled_search_agrees_with_original_curve() {
    let a = "-25/16".parse().unwrap();
    let e = CurveQ::new(a, "0".parse().unwrap()).unwrap();
    let scaled = elliptic::scale_model(&e);
    for p in elliptic::naive_point_search(&scaled.curve, &b(12)).unwrap() {
        let back = scaled.backward(&p);
        assert!(elliptic::on_curve(&e, &back), "{p} -> {back}");
        assert_eq!(scaled.forward(&back), p);
    }
    assert!(elliptic::on_curve(&e, &PointQ::Infinity));
}

fn ceil_sqrt(n: i64) -> BigInt {
    let r = isqrt(&b(n.abs()));
    if &r * &r == b(n.abs()) { r } else { r + 1 }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn four_squares_box_search_matches_sign(n in -2000i64..=2000) {
        let set = DiophantineSet::four_squares();
        let res = member_search(&set, &[b(n)], &ceil_sqrt(n)).unwrap();
        prop_assert_eq!(res.is_member(), n >= 0);
        if let Some(w) = res.witness {
            prop_assert!(set.verifies(&[b(n)], &w).unwrap());
            // shell order gives the smallest max-norm, never above the Lagrange witness
            let lagrange = nonneg_witness(&b(n)).witness.unwrap();
            let norm = |v: &[BigInt]| v.iter().map(|c| c.abs()).max().unwrap();
            prop_assert!(norm(&w) <= norm(&lagrange));
        }
    }
}
