use crate::decompose::ComponentStore;
use crate::feature_set::FeatureSet;
use crate::model::{Dataset, TreeEnsemble};
use crate::num::Real;

use super::shap::value_function;

/// Partial dependence of `subset` evaluated at the explained rows.
#[derive(Clone, Debug, PartialEq)]
pub struct PdpCurve<T> {
    pub subset: FeatureSet,
    /// `x_S` per evaluation row, features in ascending order.
    pub eval_points: Vec<Vec<T>>,
    pub values: Vec<T>,
}

/// `ξ_S = Σ_{U ⊆ S} m_U` at every row of the store. `data` supplies the
/// coordinates and must be the rows the store was computed on.
pub fn pdp<T: Real>(store: &ComponentStore<T>, data: &Dataset<T>, subset: FeatureSet) -> PdpCurve<T> {
    assert_eq!(store.n(), data.n(), "store and data rows differ");
    let values = (0..store.n()).map(|i| store.subset_sum(subset, i)).collect();
    let eval_points = data
        .rows()
        .map(|x| subset.iter().map(|k| x[k]).collect())
        .collect();
    PdpCurve {
        subset,
        eval_points,
        values,
    }
}

/// Partial dependence by marginalizing every feature outside `subset`
/// directly in each tree.
pub fn pdp_direct<T: Real>(ensemble: &TreeEnsemble<T>, x: &[T], subset: FeatureSet) -> T {
    value_function(ensemble, subset, x)
}
