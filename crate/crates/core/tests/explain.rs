mod common;

use common::*;
use glex_core::explain::{pdp_direct, ShapMatrix};
use glex_core::model::{ComparisonRule, Tree};
use glex_core::synth::random_dataset;
use glex_core::{decompose_fast, importance, pdp, remove_features, shap_bruteforce, shap_from_components};
use glex_core::{Dataset, Error, FeatureSet, TreeEnsemble};
use proptest::prelude::*;

fn set(v: &[usize]) -> FeatureSet {
    FeatureSet::try_from_indices(v.iter().copied()).unwrap()
}

fn shap_of(model: &TreeEnsemble<f64>, data: &Dataset<f64>) -> ShapMatrix<f64> {
    shap_from_components(&decompose_fast(model, data).unwrap())
}

#[test]
fn depth2_shap_hand_values() {
    let model = ensemble(vec![depth2_tree()], 0.0, 2);
    let data = quadrants();
    let shap = shap_of(&model, &data);
    assert!((shap.phi0 - 2.0).abs() < 1e-12);
    assert!((shap.get(0, 0) + 1.25).abs() < 1e-12);
    assert!((shap.get(0, 1) + 0.75).abs() < 1e-12);
    let (phi0, phi) = shap_bruteforce(&model, data.row(0)).unwrap();
    assert!((phi0 - 2.0).abs() < 1e-12);
    assert!((phi[0] + 1.25).abs() < 1e-12 && (phi[1] + 0.75).abs() < 1e-12);
}

#[test]
fn oracle_matches_components_random() {
    let model = random_model(8, 20, 4, 1234);
    let data = random_dataset(100, 8, 1234);
    let shap = shap_of(&model, &data);
    for (i, x) in data.rows().enumerate() {
        let (phi0, phi) = shap_bruteforce(&model, x).unwrap();
        assert!((phi0 - shap.phi0).abs() < 1e-9);
        for k in 0..8 {
            assert!((phi[k] - shap.get(i, k)).abs() < 1e-9);
        }
    }
}

#[test]
fn permutation_definition_agrees() {
    let model = random_model(4, 10, 3, 99);
    let data = random_dataset(10, 4, 99);
    let shap = shap_of(&model, &data);
    for (i, x) in data.rows().enumerate() {
        let phi = permutation_shap(&model, x);
        for k in 0..4 {
            assert!((phi[k] - shap.get(i, k)).abs() < 1e-9);
        }
    }
}

#[test]
fn oracle_refuses_wide_models() {
    let model = random_model(30, 2, 2, 0);
    let x = vec![0.0; 30];
    assert!(matches!(shap_bruteforce(&model, &x), Err(Error::OracleDimension { .. })));
}

#[test]
fn dummy_feature_gets_zero() {
    let model = random_model(3, 10, 3, 4);
    let wide = TreeEnsemble::new(model.trees().to_vec(), model.base_offset(), 5, vec![]).unwrap();
    let data = random_dataset(20, 5, 4);
    let shap = shap_of(&wide, &data);
    for i in 0..20 {
        assert_eq!(shap.get(i, 3), 0.0);
        assert_eq!(shap.get(i, 4), 0.0);
    }
}

#[test]
fn symmetric_features_share_credit() {
    // f(x0, x1) symmetric under swapping both the split features and covers
    let t = |a: usize, b: usize| {
        Tree::new(
            vec![
                split(a, 0.0, 1, 2, 8.0),
                leaf(1.0, 4.0),
                split(b, 0.0, 3, 4, 4.0),
                leaf(2.0, 2.0),
                leaf(7.0, 2.0),
            ],
            0,
            ComparisonRule::LessThan,
        )
    };
    let model = ensemble(vec![t(0, 1), t(1, 0)], 0.0, 2);
    let data = Dataset::from_rows(vec![], &[vec![0.5, 0.5], vec![-0.5, -0.5], vec![0.3, 0.3]]).unwrap();
    let shap = shap_of(&model, &data);
    for i in 0..3 {
        assert!((shap.get(i, 0) - shap.get(i, 1)).abs() < 1e-12);
    }
}

#[test]
fn linearity_over_ensembles() {
    let a = random_model(4, 6, 3, 1);
    let b = random_model(4, 6, 3, 2);
    let mut trees = a.trees().to_vec();
    trees.extend(b.trees().iter().cloned());
    let sum = a.with_trees(trees, a.base_offset() + b.base_offset());
    let data = random_dataset(25, 4, 3);
    let (sa, sb, ss) = (shap_of(&a, &data), shap_of(&b, &data), shap_of(&sum, &data));
    assert!((ss.phi0 - sa.phi0 - sb.phi0).abs() < 1e-9);
    for i in 0..25 {
        for k in 0..4 {
            assert!((ss.get(i, k) - sa.get(i, k) - sb.get(i, k)).abs() < 1e-9);
        }
    }
}

#[test]
fn pdp_examples() {
    let model = ensemble(vec![depth1_tree()], 0.0, 1);
    let data = Dataset::from_rows(vec![], &[vec![0.2], vec![0.9]]).unwrap();
    let store = decompose_fast(&model, &data).unwrap();
    let curve = pdp(&store, &data, set(&[0]));
    assert!((curve.values[0] - 1.0).abs() < 1e-12 && (curve.values[1] - 3.0).abs() < 1e-12);
    assert_eq!(curve.eval_points, vec![vec![0.2], vec![0.9]]);
    let flat = pdp(&store, &data, FeatureSet::EMPTY);
    assert!(flat.values.iter().all(|&v| v == store.intercept()));
}

#[test]
fn pdp_equals_direct_marginalization() {
    let model = random_model(5, 12, 4, 31);
    let data = random_dataset(40, 5, 31);
    let store = decompose_fast(&model, &data).unwrap();
    for s in FeatureSet::full(5).submasks() {
        let curve = pdp(&store, &data, s);
        for (i, x) in data.rows().enumerate() {
            assert!((curve.values[i] - pdp_direct(&model, x, s)).abs() < 1e-9);
            assert!((curve.values[i] - value_oracle(&model, s, x)).abs() < 1e-9);
        }
    }
}

#[test]
fn main_effects_only_importances_agree() {
    let trees = (0..4)
        .map(|k| {
            Tree::new(
                vec![split(k, 0.1 * k as f64, 1, 2, 10.0), leaf(k as f64, 3.0), leaf(-1.0, 7.0)],
                0,
                ComparisonRule::LessThan,
            )
        })
        .collect();
    let model = ensemble(trees, 0.0, 4);
    let data = random_dataset(50, 4, 8);
    let store = decompose_fast(&model, &data).unwrap();
    let shap = shap_from_components(&store);
    let report = importance(&store, &shap);
    for k in 0..4 {
        assert!((report.shap[k] - report.split[k]).abs() < 1e-12);
        assert!((report.component[&set(&[k])] - report.shap[k]).abs() < 1e-12);
    }
}

#[test]
fn importance_is_nonnegative_and_bounds_shap() {
    let model = random_model(5, 20, 4, 50);
    let data = random_dataset(80, 5, 50);
    let store = decompose_fast(&model, &data).unwrap();
    let report = importance(&store, &shap_from_components(&store));
    for k in 0..5 {
        assert!(report.shap[k] >= 0.0);
        // |Σ m_S/|S|| ≤ Σ |m_S|/|S|
        assert!(report.shap[k] <= report.split[k] + 1e-12);
    }
    assert!(report.component.values().all(|&v| v >= 0.0));
}

#[test]
fn debias_examples() {
    let model = ensemble(vec![depth2_tree()], 0.0, 2);
    let data = quadrants();
    let store = decompose_fast(&model, &data).unwrap();
    let same = remove_features(&store, FeatureSet::EMPTY);
    assert_eq!(same.store, store);
    let without1 = remove_features(&store, set(&[1]));
    assert_eq!(without1.store.subsets().collect::<Vec<_>>(), vec![set(&[0])]);
    assert_eq!(without1.store.intercept(), 2.0);
    // f0 left: 2 - 1.5; f0 right: 2 + 1.5
    assert!((without1.predict(0).unwrap() - 0.5).abs() < 1e-12);
    assert!((without1.predict(3).unwrap() - 3.5).abs() < 1e-12);
    assert!(without1.predict(4).is_err());
}

#[test]
fn debias_equals_marginalizing_removed_features() {
    let model = random_model(5, 15, 4, 77);
    let data = random_dataset(30, 5, 77);
    let store = decompose_fast(&model, &data).unwrap();
    for u in [set(&[0]), set(&[1, 3]), set(&[0, 2, 4])] {
        let kept = FeatureSet::full(5) - u;
        let debiased = remove_features(&store, u).predictions();
        for (i, x) in data.rows().enumerate() {
            assert!((debiased[i] - value_oracle(&model, kept, x)).abs() < 1e-9);
        }
        for s in remove_features(&store, u).store.subsets() {
            assert!(!s.intersects(u));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn efficiency_of_shap(seed in 0u64..100_000, trees in 1usize..=20, depth in 1usize..=4) {
        let model = random_model(6, trees, depth, seed);
        let data = random_dataset(20, 6, seed);
        let shap = shap_of(&model, &data);
        for (i, x) in data.rows().enumerate() {
            prop_assert!((shap.total(i) - model.predict(x).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn oracle_equivalence(seed in 0u64..100_000, d in 1usize..=6, trees in 1usize..=10, depth in 1usize..=4) {
        let model = random_model(d, trees, depth, seed);
        let data = random_dataset(5, d, seed);
        let shap = shap_of(&model, &data);
        for (i, x) in data.rows().enumerate() {
            let (_, phi) = shap_bruteforce(&model, x).unwrap();
            for k in 0..d {
                prop_assert!((phi[k] - shap.get(i, k)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn removal_composes(seed in 0u64..100_000, a in 0u64..32, b in 0u64..32) {
        let model = random_model(5, 10, 3, seed);
        let data = random_dataset(10, 5, seed);
        let store = decompose_fast(&model, &data).unwrap();
        let (a, b) = (FeatureSet::from_bits(a), FeatureSet::from_bits(b));
        let stepwise = remove_features(&store, a).remove(b);
        let once = remove_features(&store, a | b);
        prop_assert_eq!(stepwise, once);
    }
}
