use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::feature_set::FeatureSet;
use crate::num::Real;

/// Component values `m_S(x_i)` for the explained rows, plus the intercept.
///
/// Only subsets contained in some tree's feature set are stored; every other
/// component is identically zero.
#[derive(Clone, Debug, PartialEq)]
pub struct ComponentStore<T> {
    n: usize,
    d: usize,
    intercept: T,
    components: BTreeMap<FeatureSet, Vec<T>>,
}

impl<T: Real> ComponentStore<T> {
    /// Panics if a column length differs from `n` or a subset is empty.
    pub fn from_parts(n: usize, d: usize, intercept: T, components: BTreeMap<FeatureSet, Vec<T>>) -> Self {
        for (s, col) in &components {
            assert!(!s.is_empty(), "intercept is stored separately");
            assert_eq!(col.len(), n, "component {s} has wrong length");
        }
        ComponentStore {
            n,
            d,
            intercept,
            components,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn intercept(&self) -> T {
        self.intercept
    }

    pub fn set_intercept(&mut self, value: T) {
        self.intercept = value;
    }

    pub fn get(&self, s: FeatureSet) -> Option<&[T]> {
        self.components.get(&s).map(Vec::as_slice)
    }

    pub fn get_mut(&mut self, s: FeatureSet) -> Option<&mut [T]> {
        self.components.get_mut(&s).map(Vec::as_mut_slice)
    }

    /// `m_S(x_row)`; zero for unrealized subsets, the intercept for `S = ∅`.
    pub fn value(&self, s: FeatureSet, row: usize) -> T {
        if s.is_empty() {
            return self.intercept;
        }
        self.components.get(&s).map_or(T::zero(), |c| c[row])
    }

    /// Realized subsets in ascending bit order.
    pub fn subsets(&self) -> impl Iterator<Item = FeatureSet> + '_ {
        self.components.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (FeatureSet, &[T])> + '_ {
        self.components.iter().map(|(s, c)| (*s, c.as_slice()))
    }

    pub fn realized_count(&self) -> usize {
        self.components.len()
    }

    /// Maximal interaction order over realized subsets.
    pub fn q(&self) -> usize {
        self.components.keys().map(|s| s.len()).max().unwrap_or(0)
    }

    /// Intercept plus every component at `row`.
    pub fn row_sum(&self, row: usize) -> T {
        let mut acc = self.intercept;
        for col in self.components.values() {
            acc += col[row];
        }
        acc
    }

    /// Intercept plus components over subsets of `s` at `row`.
    pub fn subset_sum(&self, s: FeatureSet, row: usize) -> T {
        let mut acc = self.intercept;
        for (u, col) in &self.components {
            if u.is_subset_of(s) {
                acc += col[row];
            }
        }
        acc
    }

    /// Keeps only components satisfying `keep`; the intercept always stays.
    pub fn filtered(&self, mut keep: impl FnMut(FeatureSet) -> bool) -> Self {
        ComponentStore {
            n: self.n,
            d: self.d,
            intercept: self.intercept,
            components: self
                .components
                .iter()
                .filter(|(s, _)| keep(**s))
                .map(|(s, c)| (*s, c.clone()))
                .collect(),
        }
    }

    pub fn check_row(&self, row: usize) -> Result<()> {
        if row >= self.n {
            return Err(Error::RowOutOfRange { row, n: self.n });
        }
        Ok(())
    }

    /// Largest `|a - b|` over the intercept and all components of either store.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        let mut worst = (self.intercept - other.intercept).abs();
        let keys: std::collections::BTreeSet<_> =
            self.components.keys().chain(other.components.keys()).collect();
        for &s in keys {
            for row in 0..self.n.max(other.n) {
                let a = if row < self.n { self.value(s, row) } else { T::zero() };
                let b = if row < other.n { other.value(s, row) } else { T::zero() };
                worst = worst.max((a - b).abs());
            }
        }
        worst
    }
}
