mod common;

use common::*;
use glex_core::marginalize::{coverage_mean, marginal_predict, marginal_predict_all};
use glex_core::synth::random_dataset;
use glex_core::FeatureSet;
use proptest::prelude::*;

#[test]
fn recursion_matches_path_enumeration() {
    let model = random_model(6, 10, 4, 3);
    let data = random_dataset(50, 6, 3);
    for tree in model.trees() {
        for u in FeatureSet::full(6).submasks() {
            for x in data.rows() {
                let a = marginal_predict(tree, u, x);
                let b = path_oracle(tree, u, x);
                assert!((a - b).abs() < 1e-12, "{u}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn matrix_matches_recursion_depth4() {
    let model = random_model(5, 1, 4, 11);
    let tree = &model.trees()[0];
    let data = random_dataset(200, 5, 11);
    let m = marginal_predict_all(tree, &data).unwrap();
    assert_eq!(m.n_cols(), 1 << tree.features().len());
    for col in 0..m.n_cols() {
        let u = m.subset(col);
        for (i, x) in data.rows().enumerate() {
            assert!((m.column_local(col)[i] - marginal_predict(tree, u, x)).abs() < 1e-12);
        }
    }
}

#[test]
fn matrix_endpoints() {
    let model = random_model(4, 5, 4, 2);
    let data = random_dataset(100, 4, 5);
    for tree in model.trees() {
        let m = marginal_predict_all(tree, &data).unwrap();
        let plain = m.column(FeatureSet::EMPTY);
        for (i, x) in data.rows().enumerate() {
            assert_eq!(plain[i], tree.predict(x));
        }
        let mean = coverage_mean(tree);
        for &v in m.column(tree.features()) {
            assert!((v - mean).abs() < 1e-12);
        }
    }
}

#[test]
fn coverage_weights_sum_to_one() {
    let model = random_model(4, 20, 5, 8);
    for tree in model.trees() {
        for (i, node) in tree.nodes().iter().enumerate() {
            if !node.is_leaf() {
                let (l, r) = tree.child_weights(i);
                assert!((l + r - 1.0).abs() <= 1e-6);
            }
        }
    }
}

#[test]
fn depth1_fixture() {
    let t = depth1_tree();
    assert!((marginal_predict(&t, FeatureSet::singleton(0), &[0.2]) - 1.8).abs() < 1e-15);
    assert_eq!(marginal_predict(&t, FeatureSet::singleton(5), &[0.2, 0., 0., 0., 0., 7.0]), 1.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn matrix_equals_recursion(seed in 0u64..10_000, depth in 1usize..=6, d in 1usize..=6) {
        let model = random_model(d, 1, depth, seed);
        let tree = &model.trees()[0];
        let data = random_dataset(40, d, seed ^ 0x5eed);
        let m = marginal_predict_all(tree, &data).unwrap();
        for col in 0..m.n_cols() {
            let u = m.subset(col);
            for (i, x) in data.rows().enumerate() {
                prop_assert!((m.column_local(col)[i] - marginal_predict(tree, u, x)).abs() < 1e-12);
            }
        }
    }
}
