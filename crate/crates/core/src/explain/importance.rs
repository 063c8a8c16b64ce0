use std::collections::BTreeMap;

use crate::decompose::ComponentStore;
use crate::feature_set::FeatureSet;
use crate::num::Real;

use super::ShapMatrix;

/// Empirical importance measures over the explained rows.
#[derive(Clone, Debug, PartialEq)]
pub struct ImportanceReport<T> {
    /// Mean `|φ_k|`.
    pub shap: Vec<T>,
    /// Mean `Σ_{S∋k} |m_S| / |S|`; interactions cannot cancel main effects.
    pub split: Vec<T>,
    /// Mean `|m_S|` per realized subset.
    pub component: BTreeMap<FeatureSet, T>,
}

pub fn importance<T: Real>(store: &ComponentStore<T>, shap: &ShapMatrix<T>) -> ImportanceReport<T> {
    assert_eq!(store.n(), shap.n(), "store and SHAP rows differ");
    let (n, d) = (store.n(), store.d());
    let mean = |sum: T| if n == 0 { T::zero() } else { sum / T::lit(n as f64) };

    let mut shap_sum = vec![T::zero(); d];
    for i in 0..n {
        for (acc, v) in shap_sum.iter_mut().zip(shap.row(i)) {
            *acc += v.abs();
        }
    }

    let mut split_sum = vec![T::zero(); d];
    let mut component = BTreeMap::new();
    for (s, col) in store.iter() {
        let abs_sum: T = col.iter().map(|v| v.abs()).sum();
        component.insert(s, mean(abs_sum));
        let share = abs_sum / T::lit(s.len() as f64);
        for k in s {
            split_sum[k] += share;
        }
    }

    ImportanceReport {
        shap: shap_sum.into_iter().map(mean).collect(),
        split: split_sum.into_iter().map(mean).collect(),
        component,
    }
}
