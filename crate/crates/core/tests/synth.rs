use glex_core::synth::{fit_gbt, generate, refit_without, BoostParams, Scenario, SimSpec};
use glex_core::{validate, Dataset, FeatureSet};

fn params(rounds: usize, depth: usize) -> BoostParams {
    BoostParams {
        rounds,
        max_depth: depth,
        learning_rate: 0.1,
        min_rows_per_leaf: 1,
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn mse(pred: &[f64], truth: &[f64]) -> f64 {
    pred.iter().zip(truth).map(|(p, t)| (p - t).powi(2)).sum::<f64>() / pred.len() as f64
}

#[test]
fn interaction_sample_moments() {
    let (x, y) = generate(&SimSpec::new(Scenario::Interaction2d, 1_000_000, 3)).unwrap();
    let (a, b) = (x.column(0), x.column(1));
    let n = a.len() as f64;
    let mean = |v: &[f64]| v.iter().sum::<f64>() / n;
    let (ma, mb) = (mean(&a), mean(&b));
    let cov = a.iter().zip(&b).map(|(p, q)| (p - ma) * (q - mb)).sum::<f64>() / n;
    let sd = |v: &[f64], m: f64| (v.iter().map(|p| (p - m).powi(2)).sum::<f64>() / n).sqrt();
    let corr = cov / (sd(&a, ma) * sd(&b, mb));
    assert!((corr - 0.3).abs() < 0.005, "{corr}");
    assert!((mean(&y) - 0.6).abs() < 0.02);
}

#[test]
fn salary_target_gap() {
    let (x, y) = generate(&SimSpec::new(Scenario::Salary, 10_000, 0)).unwrap();
    let by = |s: f64| (0..x.n()).filter(|&i| x.get(i, 0) == s).map(|i| y[i]).collect();
    let gap = median(by(1.0)) - median(by(0.0));
    assert!((gap - 30.0).abs() < 1.0, "{gap}");
}

#[test]
fn step_recovered_by_one_split() {
    let xs: Vec<Vec<f64>> = (0..1000).map(|i| vec![-1.0 + 2.0 * i as f64 / 999.0]).collect();
    let y: Vec<f64> = xs.iter().map(|r| if r[0] > 0.0 { 1.0 } else { 0.0 }).collect();
    let data = Dataset::from_rows(vec![], &xs).unwrap();
    let p = BoostParams {
        learning_rate: 1.0,
        ..params(1, 1)
    };
    let m = fit_gbt(&data, &y, &p).unwrap();
    assert_eq!(m.trees().len(), 1);
    let pred = m.predict_dataset(&data).unwrap();
    assert!(mse(&pred, &y) < 0.01);
}

#[test]
fn interaction_fit_converges_centrally() {
    let (x, y) = generate(&SimSpec::new(Scenario::Interaction2d, 10_000, 1)).unwrap();
    let m = fit_gbt(&x, &y, &params(300, 2)).unwrap();
    let (test, truth) = generate(&SimSpec::new(Scenario::Interaction2d, 5_000, 2)).unwrap();
    let central: Vec<usize> = (0..test.n())
        .filter(|&i| test.row(i).iter().all(|v| v.abs() <= 1.5))
        .collect();
    let pred: Vec<f64> = central.iter().map(|&i| m.predict(test.row(i)).unwrap()).collect();
    let want: Vec<f64> = central.iter().map(|&i| truth[i]).collect();
    let err = mse(&pred, &want);
    assert!(err < 0.05, "{err}");
}

#[test]
fn fits_are_valid_and_deterministic() {
    let (x, y) = generate(&SimSpec::new(Scenario::Importance4d, 2_000, 5)).unwrap();
    let p = BoostParams {
        min_rows_per_leaf: 20,
        ..params(30, 3)
    };
    let a = fit_gbt(&x, &y, &p).unwrap();
    let b = fit_gbt(&x, &y, &p).unwrap();
    assert_eq!(a, b);
    assert!(validate(&a).is_empty());
    assert_eq!(a.rule(), glex_core::model::ComparisonRule::LessOrEqual);
    for t in a.trees() {
        assert_eq!(t.nodes()[t.root()].cover(), 2000.0);
        for node in t.nodes() {
            assert!(node.cover() >= 20.0);
            assert_eq!(node.cover().fract(), 0.0);
        }
    }
    assert!((a.base_offset() - y.iter().sum::<f64>() / 2000.0).abs() < 1e-12);
}

#[test]
fn refit_without_nothing_is_a_plain_fit() {
    let (x, y) = generate(&SimSpec::new(Scenario::Salary, 500, 2)).unwrap();
    let p = params(20, 2);
    assert_eq!(refit_without(&x, &y, &p, FeatureSet::EMPTY).unwrap(), fit_gbt(&x, &y, &p).unwrap());
    assert!(refit_without(&x, &y, &p, FeatureSet::full(2)).is_err());
}

#[test]
fn dropping_an_interacting_feature_costs_accuracy() {
    let (x, y) = generate(&SimSpec::new(Scenario::Importance4d, 5_000, 8)).unwrap();
    let (test, truth) = generate(&SimSpec::new(Scenario::Importance4d, 2_000, 9)).unwrap();
    let p = params(100, 3);
    let full = fit_gbt(&x, &y, &p).unwrap();
    let drop = FeatureSet::singleton(1);
    let reduced = refit_without(&x, &y, &p, drop).unwrap();
    let full_err = mse(&full.predict_dataset(&test).unwrap(), &truth);
    let reduced_err = mse(&reduced.predict_dataset(&test.without_columns(drop)).unwrap(), &truth);
    assert!(reduced_err > full_err, "{reduced_err} <= {full_err}");
    assert_eq!(reduced.d(), 3);
}

#[test]
fn refit_keeps_proxy_gap() {
    let (x, y) = generate(&SimSpec::new(Scenario::Salary, 10_000, 0)).unwrap();
    let drop = FeatureSet::singleton(0);
    let m = refit_without(&x, &y, &params(300, 2), drop).unwrap();
    let pred = m.predict_dataset(&x.without_columns(drop)).unwrap();
    let by = |s: f64| (0..x.n()).filter(|&i| x.get(i, 0) == s).map(|i| pred[i]).collect();
    let gap = median(by(1.0)) - median(by(0.0));
    assert!((gap - 29.79).abs() < 2.0, "{gap}");
}
