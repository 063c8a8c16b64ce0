use crate::decompose::ComponentStore;
use crate::error::Result;
use crate::feature_set::FeatureSet;
use crate::num::Real;

/// Decomposition with every component touching `removed` dropped.
#[derive(Clone, Debug, PartialEq)]
pub struct DebiasedModel<T> {
    pub removed: FeatureSet,
    pub store: ComponentStore<T>,
}

impl<T: Real> DebiasedModel<T> {
    /// Intercept plus the surviving components at `row`.
    pub fn predict(&self, row: usize) -> Result<T> {
        self.store.check_row(row)?;
        Ok(self.store.row_sum(row))
    }

    /// Removes `more` on top of the features already removed.
    pub fn remove(&self, more: FeatureSet) -> Self {
        remove_features(&self.store, more).with_removed(self.removed | more)
    }

    fn with_removed(mut self, removed: FeatureSet) -> Self {
        self.removed = removed;
        self
    }

    pub fn predictions(&self) -> Vec<T> {
        (0..self.store.n()).map(|i| self.store.row_sum(i)).collect()
    }
}

pub fn remove_features<T: Real>(store: &ComponentStore<T>, removed: FeatureSet) -> DebiasedModel<T> {
    DebiasedModel {
        removed,
        store: store.filtered(|s| !s.intersects(removed)),
    }
}
