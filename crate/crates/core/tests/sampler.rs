use debruijn_census::sampler::*;
use debruijn_census::series::Census;
use debruijn_census::{level_histogram, parse_debruijn, term_stats, FamilySpec, MarkSpec};

fn small_specs() -> Vec<FamilySpec> {
    vec![FamilySpec::index(1), FamilySpec::index(2), FamilySpec::levels(1), FamilySpec::levels(2)]
}

#[test]
fn small_sizes_follow_the_exact_distribution() {
    let census = Census::new();
    let mut seed = 100;
    for spec in small_specs() {
        for n in 1..=8 {
            if census.count_closed(spec, n).unwrap() == 0 {
                continue;
            }
            for mark in MarkSpec::all(spec).into_iter().skip(1).take(4) {
                seed += 1;
                let t = distribution_test(&census, spec, mark, n, 100_000, seed).unwrap();
                assert!(t.passes(1e-3), "{spec} n={n} {mark}: {t:?}");
            }
            seed += 1;
            let t = uniformity_test(&census, spec, n, 100_000, seed).unwrap();
            assert!(t.passes(1e-3), "{spec} n={n} terms: {t:?}");
        }
    }
}

#[test]
fn five_terms_equally_often() {
    let census = Census::new();
    let terms = sample_terms(&census, FamilySpec::index(1), 5, 100_000, 2024).unwrap();
    let mut counts = std::collections::BTreeMap::new();
    for t in &terms {
        *counts.entry(t.to_string()).or_insert(0u64) += 1;
    }
    assert_eq!(counts.len(), 5);
    for (t, c) in &counts {
        let f = *c as f64 / 1e5;
        assert!((f - 0.2).abs() < 0.01, "{t}: {f}");
    }
}

#[test]
fn sampled_terms_are_consistent() {
    let census = Census::new();
    for spec in [FamilySpec::index(3), FamilySpec::levels(4), FamilySpec::levels(8)] {
        for t in sample_terms(&census, spec, 500, 10, 5).unwrap() {
            assert!(spec.contains(&t));
            let s = term_stats(&t);
            let h = level_histogram(&t);
            assert_eq!(s.size, 500);
            assert_eq!((h.leaves(), h.unary(), h.binary()), (s.leaf_count, s.unary_count, s.binary_count));
            assert_eq!(parse_debruijn(&t.to_string()).unwrap(), t);
        }
    }
}

#[test]
fn batches_are_reproducible() {
    let census = Census::new();
    let a = batch_stats(&census, FamilySpec::levels(3), MarkSpec::LeavesAtLevel(2), 120, 300, 77).unwrap();
    let b = batch_stats(&census, FamilySpec::levels(3), MarkSpec::LeavesAtLevel(2), 120, 300, 77).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    assert!(!a.mean_flagged, "{a:?}");
    let mean_leaves: f64 = a.level_means.iter().map(|l| l[0]).sum();
    let total = batch_stats(&census, FamilySpec::levels(3), MarkSpec::TotalLeaves, 120, 300, 77).unwrap();
    assert!((mean_leaves - total.empirical_mean).abs() < 1e-9);
}

#[test]
fn levels_leaf_mean_is_near_the_limit() {
    let census = Census::new();
    let s = batch_stats(&census, FamilySpec::levels(4), MarkSpec::TotalLeaves, 1000, 2000, 3).unwrap();
    let r = s.empirical_mean / 1000.0;
    assert!((r / 0.4463973717 - 1.0).abs() < 0.02, "{r}");
}

#[test]
fn empty_sizes_are_rejected() {
    let census = Census::new();
    assert!(sample_terms(&census, FamilySpec::levels(1), 3, 1, 0).is_err());
    assert!(batch_stats(&census, FamilySpec::index(2), MarkSpec::TotalLeaves, 1, 5, 0).is_err());
}
