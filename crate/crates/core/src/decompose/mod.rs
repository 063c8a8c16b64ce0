//! Identified functional decomposition of tree ensembles.
//!
//! Every tree with feature set `T` contributes to the components `m_S` with
//! `S ⊆ T`:
//!
//! `m_S(x) += Σ_{T\S ⊆ U ⊆ T} (-1)^{|S| - |T\U|} · marginal(tree, U, x)`
//!
//! Writing `U = (T \ S) ∪ W` with `W ⊆ S`, the sign is `(-1)^{|W|}`.

mod grid;
mod store;

pub use grid::{
    decompose_grid, estimate_density, identification_probe, identification_residual,
    required_subsets, verify_identification, EmpiricalDensity, GridEnsemble, GridTerm, ProbeLayout,
};
pub use store::ComponentStore;

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use crate::error::Result;
use crate::feature_set::FeatureSet;
use crate::marginalize::{coverage_mean, marginal_predict, subset_matrix_rows, DepthCap};
use crate::model::{Dataset, Tree, TreeEnsemble};
use crate::num::Real;

/// Rows per work unit; results do not depend on it.
const ROW_BLOCK: usize = 512;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algorithm {
    /// One coverage recursion per (row, tree, S, U).
    Naive,
    /// One all-subsets recursion per tree, then signed column sums.
    Fast,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct DecomposeOptions {
    pub depth_cap: DepthCap,
}

pub fn decompose_naive<T: Real>(ensemble: &TreeEnsemble<T>, data: &Dataset<T>) -> Result<ComponentStore<T>> {
    decompose(ensemble, data, Algorithm::Naive, &DecomposeOptions::default())
}

pub fn decompose_fast<T: Real>(ensemble: &TreeEnsemble<T>, data: &Dataset<T>) -> Result<ComponentStore<T>> {
    decompose(ensemble, data, Algorithm::Fast, &DecomposeOptions::default())
}

/// Decomposes `ensemble` at every row of `data`.
///
/// Rows are processed in parallel blocks on the current rayon pool; each
/// row's arithmetic is fixed, so output is identical for any pool size.
pub fn decompose<T: Real>(
    ensemble: &TreeEnsemble<T>,
    data: &Dataset<T>,
    algorithm: Algorithm,
    opts: &DecomposeOptions,
) -> Result<ComponentStore<T>> {
    ensemble.check_columns(data)?;
    for (b, tree) in ensemble.trees().iter().enumerate() {
        opts.depth_cap.check(b, tree)?;
    }
    let (subsets, plans) = plan(ensemble.trees());

    let mut intercept = ensemble.base_offset();
    for tree in ensemble.trees() {
        intercept += coverage_mean(tree);
    }

    let n = data.n();
    let starts: Vec<usize> = (0..n).step_by(ROW_BLOCK).collect();
    let blocks: Vec<Vec<Vec<T>>> = starts
        .par_iter()
        .map(|&start| {
            let rows = start..(start + ROW_BLOCK).min(n);
            match algorithm {
                Algorithm::Naive => naive_block(ensemble.trees(), &plans, subsets.len(), data, rows),
                Algorithm::Fast => fast_block(ensemble.trees(), &plans, subsets.len(), data, rows),
            }
        })
        .collect();

    let mut components: BTreeMap<FeatureSet, Vec<T>> = BTreeMap::new();
    for (slot, &s) in subsets.iter().enumerate() {
        let mut col = Vec::with_capacity(n);
        for block in &blocks {
            col.extend_from_slice(&block[slot]);
        }
        components.insert(s, col);
    }
    Ok(ComponentStore::from_parts(n, ensemble.d(), intercept, components))
}

/// Per-tree bookkeeping: local bit `r` stands for feature `local[r]`.
struct TreePlan {
    full: usize,
    // component slot per nonempty local subset S
    slots: Vec<usize>,
    // global feature set per local subset U
    globals: Vec<FeatureSet>,
}

fn plan<T: Real>(trees: &[Tree<T>]) -> (Vec<FeatureSet>, Vec<TreePlan>) {
    let mut realized = BTreeSet::new();
    for tree in trees {
        realized.extend(tree.features().submasks().filter(|s| !s.is_empty()));
    }
    let subsets: Vec<FeatureSet> = realized.into_iter().collect();
    let slot_of: BTreeMap<FeatureSet, usize> =
        subsets.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let plans = trees
        .iter()
        .map(|tree| {
            let local: Vec<usize> = tree.features().iter().collect();
            let ncols = 1usize << local.len();
            let globals: Vec<FeatureSet> = (0..ncols)
                .map(|c| crate::marginalize::local_to_global(&local, c))
                .collect();
            let slots = globals
                .iter()
                .map(|s| slot_of.get(s).copied().unwrap_or(usize::MAX))
                .collect();
            TreePlan {
                full: ncols - 1,
                slots,
                globals,
            }
        })
        .collect();
    (subsets, plans)
}

/// Calls `f(slot, local_u, negative)` for every (S, U) pair of the sign sum
/// in a fixed order shared by both algorithms.
#[inline]
fn for_each_signed_term(plan: &TreePlan, mut f: impl FnMut(usize, usize, bool)) {
    for s in 1..=plan.full {
        let slot = plan.slots[s];
        let rest = plan.full ^ s;
        for w in FeatureSet::from_bits(s as u64).submasks() {
            f(slot, rest | w.bits() as usize, w.is_odd());
        }
    }
}

#[inline]
fn accumulate<T: Real>(acc: &mut T, value: T, negative: bool) {
    if negative {
        *acc -= value;
    } else {
        *acc += value;
    }
}

fn naive_block<T: Real>(
    trees: &[Tree<T>],
    plans: &[TreePlan],
    n_slots: usize,
    data: &Dataset<T>,
    rows: std::ops::Range<usize>,
) -> Vec<Vec<T>> {
    let start = rows.start;
    let mut out = vec![vec![T::zero(); rows.len()]; n_slots];
    for i in rows {
        let x = data.row(i);
        let r = i - start;
        for (tree, plan) in trees.iter().zip(plans) {
            for_each_signed_term(plan, |slot, u, negative| {
                let v = marginal_predict(tree, plan.globals[u], x);
                accumulate(&mut out[slot][r], v, negative);
            });
        }
    }
    out
}

fn fast_block<T: Real>(
    trees: &[Tree<T>],
    plans: &[TreePlan],
    n_slots: usize,
    data: &Dataset<T>,
    rows: std::ops::Range<usize>,
) -> Vec<Vec<T>> {
    let m = rows.len();
    let mut out = vec![vec![T::zero(); m]; n_slots];
    for (tree, plan) in trees.iter().zip(plans) {
        if plan.full == 0 {
            continue;
        }
        let matrix = subset_matrix_rows(tree, data, rows.clone());
        for_each_signed_term(plan, |slot, u, negative| {
            let col = matrix.column_local(u);
            for (acc, &v) in out[slot].iter_mut().zip(col) {
                accumulate(acc, v, negative);
            }
        });
    }
    out
}
