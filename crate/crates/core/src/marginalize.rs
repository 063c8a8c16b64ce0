//! Coverage-weighted marginalization of single trees.
//!
//! Marginalizing a feature set `U` out of a tree replaces every split on a
//! feature in `U` by the coverage-weighted average of its two subtrees and
//! routes all other splits by the observation's value.

use std::ops::Range;

use crate::error::{Error, Result};
use crate::feature_set::FeatureSet;
use crate::model::{Dataset, Tree, TreeNode};
use crate::num::Real;

/// Default ceiling on tree depth for subset-matrix based algorithms.
pub const DEFAULT_MAX_DEPTH: usize = 10;

/// Environment variable overriding [`DEFAULT_MAX_DEPTH`].
pub const MAX_DEPTH_ENV: &str = "GLEX_MAX_DEPTH";

/// Depth cap for the exponential-in-depth algorithms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DepthCap(pub usize);

impl Default for DepthCap {
    fn default() -> Self {
        DepthCap(DEFAULT_MAX_DEPTH)
    }
}

impl DepthCap {
    /// Reads [`MAX_DEPTH_ENV`], falling back to the default when unset.
    pub fn from_env() -> Result<Self> {
        match std::env::var(MAX_DEPTH_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .map(DepthCap)
                .map_err(|_| Error::InvalidParams(format!("{MAX_DEPTH_ENV}={v:?} is not a depth"))),
            Err(_) => Ok(DepthCap::default()),
        }
    }

    /// Bounds both the depth and the number of distinct split features,
    /// which sets the `2^|T|` subset-matrix width.
    pub fn check<T: Real>(self, index: usize, tree: &Tree<T>) -> Result<()> {
        if tree.depth() > self.0 {
            return Err(Error::DepthCapExceeded {
                tree: index,
                depth: tree.depth(),
                cap: self.0,
            });
        }
        if tree.features().len() > self.0 {
            return Err(Error::FeatureCapExceeded {
                tree: index,
                features: tree.features().len(),
                cap: self.0,
            });
        }
        Ok(())
    }
}

/// Tree prediction at `x` with the features in `marginalized` integrated out
/// against the coverage measure.
///
/// `x` is only read at split features outside `marginalized`; features the
/// tree never splits on have no effect.
pub fn marginal_predict<T: Real>(tree: &Tree<T>, marginalized: FeatureSet, x: &[T]) -> T {
    recurse(tree, tree.root(), marginalized, x)
}

fn recurse<T: Real>(tree: &Tree<T>, node: usize, u: FeatureSet, x: &[T]) -> T {
    match tree.nodes()[node] {
        TreeNode::Leaf { value, .. } => value,
        TreeNode::Split {
            feature,
            threshold,
            left,
            right,
            ..
        } => {
            if u.contains(feature) {
                let (wl, wr) = tree.child_weights(node);
                wl * recurse(tree, left, u, x) + wr * recurse(tree, right, u, x)
            } else if tree.rule().goes_left(x[feature], threshold) {
                recurse(tree, left, u, x)
            } else {
                recurse(tree, right, u, x)
            }
        }
    }
}

/// Fully marginalized tree: the coverage-weighted mean of its leaves.
pub fn coverage_mean<T: Real>(tree: &Tree<T>) -> T {
    marginal_predict(tree, tree.features(), &[])
}

/// Marginalized predictions of one tree for every subset `U` of its feature
/// set and every row: an `n x 2^|T|` matrix stored column by column.
#[derive(Clone, Debug)]
pub struct SubsetMatrix<T> {
    features: FeatureSet,
    local: Vec<usize>,
    n: usize,
    data: Vec<T>,
}

impl<T: Real> SubsetMatrix<T> {
    pub fn n_rows(&self) -> usize {
        self.n
    }

    pub fn n_cols(&self) -> usize {
        1 << self.local.len()
    }

    /// The tree feature set `T` indexing the columns.
    pub fn features(&self) -> FeatureSet {
        self.features
    }

    /// Local column index of `U`; features outside `T` are ignored.
    pub fn local_index(&self, u: FeatureSet) -> usize {
        self.local
            .iter()
            .enumerate()
            .filter(|(_, &f)| u.contains(f))
            .fold(0, |acc, (r, _)| acc | 1 << r)
    }

    /// Global subset for a local column index.
    pub fn subset(&self, col: usize) -> FeatureSet {
        local_to_global(&self.local, col)
    }

    pub fn column(&self, u: FeatureSet) -> &[T] {
        self.column_local(self.local_index(u))
    }

    #[inline]
    pub fn column_local(&self, col: usize) -> &[T] {
        &self.data[col * self.n..(col + 1) * self.n]
    }

    pub fn get(&self, row: usize, u: FeatureSet) -> T {
        self.column(u)[row]
    }
}

pub(crate) fn local_to_global(local: &[usize], col: usize) -> FeatureSet {
    local
        .iter()
        .enumerate()
        .filter(|(r, _)| col >> r & 1 == 1)
        .fold(FeatureSet::EMPTY, |acc, (_, &f)| acc | FeatureSet::singleton(f))
}

/// All-subsets marginalization in one recursion over the tree, with the
/// default depth cap.
pub fn marginal_predict_all<T: Real>(tree: &Tree<T>, data: &Dataset<T>) -> Result<SubsetMatrix<T>> {
    marginal_predict_all_capped(tree, data, DepthCap::default())
}

pub fn marginal_predict_all_capped<T: Real>(
    tree: &Tree<T>,
    data: &Dataset<T>,
    cap: DepthCap,
) -> Result<SubsetMatrix<T>> {
    cap.check(0, tree)?;
    if let Some(max) = tree.features().max() {
        if max >= data.d() {
            return Err(Error::DimensionMismatch {
                expected: max + 1,
                found: data.d(),
            });
        }
    }
    Ok(subset_matrix_rows(tree, data, 0..data.n()))
}

/// Subset matrix over a contiguous block of rows. Callers ensure the tree
/// fits the data and the depth cap.
pub(crate) fn subset_matrix_rows<T: Real>(
    tree: &Tree<T>,
    data: &Dataset<T>,
    rows: Range<usize>,
) -> SubsetMatrix<T> {
    let features = tree.features();
    let local: Vec<usize> = features.iter().collect();
    let mut bit_of = vec![0usize; features.max().map_or(0, |m| m + 1)];
    for (r, &f) in local.iter().enumerate() {
        bit_of[f] = 1 << r;
    }
    let ncols = 1usize << local.len();
    let n = rows.len();
    let data = fill(tree, tree.root(), data, &rows, ncols, &bit_of);
    SubsetMatrix {
        features,
        local,
        n,
        data,
    }
}

fn fill<T: Real>(
    tree: &Tree<T>,
    node: usize,
    data: &Dataset<T>,
    rows: &Range<usize>,
    ncols: usize,
    bit_of: &[usize],
) -> Vec<T> {
    let m = rows.len();
    match tree.nodes()[node] {
        TreeNode::Leaf { value, .. } => vec![value; ncols * m],
        TreeNode::Split {
            feature,
            threshold,
            left,
            right,
            ..
        } => {
            let mut out = fill(tree, left, data, rows, ncols, bit_of);
            let right = fill(tree, right, data, rows, ncols, bit_of);
            let (wl, wr) = tree.child_weights(node);
            let bit = bit_of[feature];
            let rule = tree.rule();
            let go_left: Vec<bool> = rows
                .clone()
                .map(|i| rule.goes_left(data.get(i, feature), threshold))
                .collect();
            for col in 0..ncols {
                let o = &mut out[col * m..(col + 1) * m];
                let r = &right[col * m..(col + 1) * m];
                if col & bit != 0 {
                    for (oi, &ri) in o.iter_mut().zip(r) {
                        *oi = wl * *oi + wr * ri;
                    }
                } else {
                    for ((oi, &ri), &gl) in o.iter_mut().zip(r).zip(&go_left) {
                        if !gl {
                            *oi = ri;
                        }
                    }
                }
            }
            out
        }
    }
}
