mod common;

use common::*;
use glex_core::model::{parse_booster_dump, parse_native_model, to_native_json, ComparisonRule, DumpOptions};
use glex_core::synth::random_dataset;
use glex_core::{validate, Ensemble, FeatureSet, TreeEnsemble};
use proptest::prelude::*;

const DUMP: &str = include_str!("fixtures/depth1_dump.json");
const NATIVE: &str = include_str!("fixtures/depth2_native.json");

#[test]
fn dump_fixture_matches_hand_tree() {
    let opts = DumpOptions {
        feature_names: None,
        base_offset: 0.25,
    };
    let m: Ensemble = parse_booster_dump(DUMP, &opts).unwrap();
    assert_eq!(m.rule(), ComparisonRule::LessThan);
    assert_eq!(m.trees()[0].features(), FeatureSet::singleton(0));
    assert_eq!(m.trees()[0].nodes()[0].cover(), 100.0);
    assert_eq!(m.predict(&[0.3]).unwrap(), 1.25);
    assert_eq!(m.predict(&[0.5]).unwrap(), 3.25);
    let hand = ensemble(vec![depth1_tree()], 0.25, 1);
    let back: Ensemble = parse_native_model(&to_native_json(&m)).unwrap();
    for x in [-1.0, 0.3, 0.5, 0.7, 9.0] {
        assert_eq!(back.predict(&[x]).unwrap(), hand.predict(&[x]).unwrap());
    }
}

#[test]
fn native_fixture_routes_ties_left() {
    let m: Ensemble = parse_native_model(NATIVE).unwrap();
    assert_eq!(m.feature_names(), &["hr".to_string(), "temp".to_string()]);
    assert_eq!(m.rule(), ComparisonRule::LessOrEqual);
    assert_eq!(m.predict(&[0.5, 0.5]).unwrap(), 0.0);
    assert_eq!(m.predict(&[0.51, 0.5]).unwrap(), 2.0);
    assert!(validate(&m).is_empty());
}

#[test]
fn dump_with_declared_names() {
    let text = DUMP.replace("\"f0\"", "\"hr\"");
    let opts = DumpOptions {
        feature_names: Some(vec!["temp".into(), "hr".into()]),
        base_offset: 0.0,
    };
    let m: Ensemble = parse_booster_dump(&text, &opts).unwrap();
    assert_eq!(m.d(), 2);
    assert_eq!(m.trees()[0].features(), FeatureSet::singleton(1));
    let missing = DumpOptions {
        feature_names: Some(vec!["temp".into()]),
        base_offset: 0.0,
    };
    assert!(parse_booster_dump::<f64>(&text, &missing).is_err());
}

#[test]
fn f32_models_parse() {
    let m: TreeEnsemble<f32> = parse_native_model(NATIVE).unwrap();
    assert_eq!(m.predict(&[0.9, 0.9]).unwrap(), 5.0f32);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn native_round_trip_is_bitwise(seed in 0u64..100_000, d in 1usize..=6, trees in 1usize..=8, depth in 0usize..=5) {
        let m = random_model(d, trees, depth, seed);
        let back: Ensemble = parse_native_model(&to_native_json(&m)).unwrap();
        prop_assert_eq!(&back, &m);
        let data = random_dataset(20, d, seed);
        for x in data.rows() {
            prop_assert_eq!(back.predict(x).unwrap().to_bits(), m.predict(x).unwrap().to_bits());
        }
    }

    #[test]
    fn prediction_is_additive(seed in 0u64..100_000, trees in 1usize..=12) {
        let m = random_model(4, trees, 4, seed);
        let data = random_dataset(20, 4, seed);
        for x in data.rows() {
            let mut acc = m.base_offset();
            for b in 0..m.trees().len() {
                acc += m.single_tree(b).predict(x).unwrap();
            }
            prop_assert_eq!(acc, m.predict(x).unwrap());
        }
    }
}
