//! Property-based invariants for the numeric building blocks.

use proptest::prelude::*;

use facetfilter::feature::FeatureId;
use facetfilter::gcm::{kl_bernoulli, necessity_from_parts};
use facetfilter::metrics::{betai, t11su, ConfusionCounts};
use facetfilter::profile::sigmoid;
use facetfilter::SparseVector;

/// Counts as a run can actually produce: delivered relevant documents
/// never exceed the relevant documents in the stream.
fn counts() -> impl Strategy<Value = ConfusionCounts> {
    (1u64..1000, 0u64..1000).prop_flat_map(|(total, n)| {
        (0..=total).prop_map(move |r| ConfusionCounts {
            relevant_delivered: r,
            nonrelevant_delivered: n,
            relevant_total: total,
        })
    })
}

/// Sparse vectors over a tiny shared vocabulary so dot products overlap.
fn sparse() -> impl Strategy<Value = SparseVector> {
    proptest::collection::vec((0u8..8, -10.0..10.0f64), 0..8).prop_map(|entries| {
        entries
            .into_iter()
            .map(|(i, w)| (FeatureId::term(format!("w{i}")), w))
            .collect()
    })
}

proptest! {
    #[test]
    fn t11su_is_a_unit_interval_score(c in counts()) {
        let v: f64 = t11su(&c).unwrap();
        prop_assert!((0.0..=1.0).contains(&v));
    }

    #[test]
    fn t11su_rewards_hits_and_penalizes_misses(c in counts()) {
        let v: f64 = t11su(&c).unwrap();
        if c.relevant_delivered < c.relevant_total {
            let mut hit = c;
            hit.relevant_delivered += 1;
            let vh: f64 = t11su(&hit).unwrap();
            prop_assert!(vh >= v);
        }
        let mut miss = c;
        miss.nonrelevant_delivered += 1;
        let vm: f64 = t11su(&miss).unwrap();
        prop_assert!(vm <= v);
    }

    #[test]
    fn kl_is_nonnegative_and_zero_at_the_target(
        p in 0.0..=1.0f64,
        t in 0.001..0.999f64,
    ) {
        let v: f64 = kl_bernoulli(p, t).unwrap();
        prop_assert!(v >= -1e-15);
        let at_target: f64 = kl_bernoulli(t, t).unwrap();
        prop_assert!(at_target.abs() < 1e-12);
    }

    #[test]
    fn necessity_stays_a_probability(
        a in 0.001..0.999f64,
        b in 0.001..0.999f64,
        q in 0.001..0.999f64,
    ) {
        let n: f64 = necessity_from_parts(a, b, q);
        prop_assert!((0.0..=1.0).contains(&n), "n = {n}");
    }

    #[test]
    fn betai_is_a_cdf_in_x(a in 0.5..10.0f64, b in 0.5..10.0f64, x in 0.0..=1.0f64) {
        let v = betai(a, b, x);
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&v));
        // monotone: nudging x up never decreases the value
        let x2 = (x + 0.05).min(1.0);
        prop_assert!(betai(a, b, x2) >= v - 1e-9);
    }

    #[test]
    fn sigmoid_is_symmetric_and_bounded(z in -50.0..50.0f64) {
        let s: f64 = sigmoid(z);
        prop_assert!((0.0..=1.0).contains(&s));
        let t: f64 = sigmoid(-z);
        prop_assert!((s + t - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dot_is_symmetric_and_linear(a in sparse(), b in sparse(), c in sparse(), k in -5.0..5.0f64) {
        prop_assert!((a.dot(&b) - b.dot(&a)).abs() < 1e-9);
        // (a + k·b)·c == a·c + k·(b·c)
        let mut combined = a.clone();
        combined.add_scaled(k, &b);
        let lhs = combined.dot(&c);
        let rhs = a.dot(&c) + k * b.dot(&c);
        prop_assert!((lhs - rhs).abs() < 1e-8, "{lhs} vs {rhs}");
    }

    #[test]
    fn norm_sq_matches_self_dot(a in sparse()) {
        prop_assert!((a.norm_sq() - a.dot(&a)).abs() < 1e-9);
    }

    #[test]
    fn facet_ids_round_trip_through_strings(
        facet in "[a-z]{1,6}",
        value in "[a-z0-9 ]{1,6}",
    ) {
        prop_assume!(!value.trim().is_empty());
        let f = FeatureId::facet(&facet, &value);
        let parsed = FeatureId::facet_from_str(&f.name).unwrap();
        prop_assert_eq!(f, parsed);
    }
}
