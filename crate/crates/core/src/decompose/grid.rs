//! Decomposition of piecewise-constant grid models against an empirical
//! hyperrectangle density.
//!
//! Each feature `k` has an increasing list of cell corners `G_k`; cell `c`
//! covers `[G_k[c], G_k[c+1])` and the last cell extends to the right without
//! bound. A term `(S, b)` stores one value per cell of `×_{k∈S} G_k` in
//! row-major order over the ascending features of `S`.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use super::ComponentStore;
use crate::error::{Error, Result};
use crate::feature_set::FeatureSet;
use crate::model::{ComparisonRule, Dataset, TreeEnsemble};
use crate::num::Real;

/// Largest array a single term may hold when converting tree ensembles.
const MAX_TERM_CELLS: usize = 1 << 24;

const DENSITY_TOLERANCE: f64 = 1e-12;

const ROW_BLOCK: usize = 256;

#[derive(Clone, Debug, PartialEq)]
pub struct GridTerm<T> {
    pub subset: FeatureSet,
    /// Index `b` of the tree (or forest member) the term came from.
    pub tree: usize,
    pub values: Vec<T>,
}

#[derive(Clone, Debug)]
pub struct GridEnsemble<T> {
    grids: Vec<Vec<T>>,
    terms: Vec<GridTerm<T>>,
    n_trees: usize,
}

impl<T: Real> GridEnsemble<T> {
    /// `grids[k]` may be empty for features no term uses. Term values are
    /// averaged over `n_trees` members during decomposition.
    pub fn new(grids: Vec<Vec<T>>, terms: Vec<GridTerm<T>>, n_trees: usize) -> Result<Self> {
        if n_trees == 0 {
            return Err(Error::Grid("at least one tree required".into()));
        }
        if grids.len() > FeatureSet::CAPACITY {
            return Err(Error::TooManyFeatures {
                d: grids.len(),
                max: FeatureSet::CAPACITY,
            });
        }
        for (k, g) in grids.iter().enumerate() {
            if g.iter().any(|v| !v.is_finite()) || g.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Grid(format!("grid {k} is not strictly increasing")));
            }
        }
        let ens = GridEnsemble {
            grids,
            terms,
            n_trees,
        };
        for term in &ens.terms {
            if term.tree >= n_trees {
                return Err(Error::Grid(format!(
                    "term {} refers to tree {} of {n_trees}",
                    term.subset, term.tree
                )));
            }
            let cells = ens.cell_count(term.subset)?;
            if term.values.len() != cells {
                return Err(Error::Grid(format!(
                    "term {} has {} values for {cells} cells",
                    term.subset,
                    term.values.len()
                )));
            }
        }
        Ok(ens)
    }

    pub fn grids(&self) -> &[Vec<T>] {
        &self.grids
    }

    pub fn terms(&self) -> &[GridTerm<T>] {
        &self.terms
    }

    pub fn n_trees(&self) -> usize {
        self.n_trees
    }

    pub fn d(&self) -> usize {
        self.grids.len()
    }

    /// Number of cells of `×_{k∈S} G_k`.
    pub fn cell_count(&self, s: FeatureSet) -> Result<usize> {
        cell_count(&self.grids, s)
    }

    /// Sum of all terms at `x`, divided by the number of trees.
    pub fn predict(&self, x: &[T]) -> Result<T> {
        let mut acc = T::zero();
        for term in &self.terms {
            let mut idx = 0;
            for k in term.subset {
                idx = idx * self.grids[k].len() + cell_of(&self.grids[k], k, x[k])?;
            }
            acc += term.values[idx];
        }
        Ok(acc / T::lit(self.n_trees as f64))
    }

    /// Exact grid encoding of a tree ensemble, one term per distinct tree
    /// feature set and a single member (sums are not averaged).
    ///
    /// Corners are the split thresholds (shifted to the next float for `le`
    /// rules so lower-closed cells route like the trees) plus a lower corner
    /// at or below the minimum of `data`.
    pub fn from_tree_ensemble(ensemble: &TreeEnsemble<T>, data: &Dataset<T>) -> Result<Self> {
        ensemble.check_columns(data)?;
        let d = ensemble.d();
        let mut corners: Vec<Vec<T>> = vec![Vec::new(); d];
        for tree in ensemble.trees() {
            for node in tree.nodes() {
                if let crate::model::TreeNode::Split {
                    feature, threshold, ..
                } = *node
                {
                    let c = match ensemble.rule() {
                        ComparisonRule::LessThan => threshold,
                        ComparisonRule::LessOrEqual => threshold.next_up(),
                    };
                    corners[feature].push(c);
                }
            }
        }
        for (k, g) in corners.iter_mut().enumerate() {
            if g.is_empty() {
                continue;
            }
            g.sort_by(|a, b| a.partial_cmp(b).expect("finite thresholds"));
            g.dedup();
            let first = g[0];
            let data_min = (0..data.n()).map(|i| data.get(i, k)).fold(T::infinity(), T::min);
            let lower = if data_min < first {
                data_min
            } else {
                first - T::one().max(first.abs())
            };
            g.insert(0, lower);
        }

        let mut by_set: BTreeMap<FeatureSet, Vec<usize>> = BTreeMap::new();
        for (b, tree) in ensemble.trees().iter().enumerate() {
            by_set.entry(tree.features()).or_default().push(b);
        }
        let mut terms = vec![GridTerm {
            subset: FeatureSet::EMPTY,
            tree: 0,
            values: vec![ensemble.base_offset()],
        }];
        for (s, members) in by_set {
            let cells = cell_count(&corners, s)?;
            if cells > MAX_TERM_CELLS {
                return Err(Error::Grid(format!(
                    "feature set {s} needs {cells} cells (limit {MAX_TERM_CELLS})"
                )));
            }
            let feats: Vec<usize> = s.iter().collect();
            let mut x = vec![T::zero(); d];
            let mut counter = vec![0usize; feats.len()];
            let mut values = Vec::with_capacity(cells);
            for _ in 0..cells {
                for (j, &k) in feats.iter().enumerate() {
                    x[k] = corners[k][counter[j]];
                }
                let mut v = T::zero();
                for &b in &members {
                    v += ensemble.trees()[b].predict(&x);
                }
                values.push(v);
                for j in (0..feats.len()).rev() {
                    counter[j] += 1;
                    if counter[j] < corners[feats[j]].len() {
                        break;
                    }
                    counter[j] = 0;
                }
            }
            if s.is_empty() {
                terms[0].values[0] += values[0];
            } else {
                terms.push(GridTerm {
                    subset: s,
                    tree: 0,
                    values,
                });
            }
        }
        GridEnsemble::new(corners, terms, 1)
    }
}

fn cell_count<T>(grids: &[Vec<T>], s: FeatureSet) -> Result<usize> {
    let mut cells = 1usize;
    for k in s {
        let len = grids.get(k).map_or(0, Vec::len);
        if len == 0 {
            return Err(Error::Grid(format!("no grid for feature {k}")));
        }
        cells = cells
            .checked_mul(len)
            .ok_or_else(|| Error::Grid(format!("cell count overflow for {s}")))?;
    }
    Ok(cells)
}

#[inline]
fn cell_of<T: Real>(grid: &[T], feature: usize, x: T) -> Result<usize> {
    let p = grid.partition_point(|&g| g <= x);
    if p == 0 {
        return Err(Error::OutOfGrid {
            feature,
            value: x.as_f64(),
        });
    }
    Ok(p - 1)
}

/// Probability weights per cell of `×_{k∈U} G_k` for a family of subsets `U`.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalDensity<T> {
    weights: BTreeMap<FeatureSet, Vec<T>>,
}

impl<T: Real> EmpiricalDensity<T> {
    /// Validates non-negativity, unit mass and cell counts against `grids`.
    pub fn from_weights(grids: &[Vec<T>], weights: BTreeMap<FeatureSet, Vec<T>>) -> Result<Self> {
        for (u, w) in &weights {
            let cells = cell_count(grids, *u)?;
            if w.len() != cells {
                return Err(Error::Grid(format!(
                    "density for {u} has {} weights for {cells} cells",
                    w.len()
                )));
            }
            if w.iter().any(|v| !(*v >= T::zero())) {
                return Err(Error::Grid(format!("density for {u} has negative weights")));
            }
            let total: T = w.iter().copied().sum();
            if (total - T::one()).abs() > T::lit(DENSITY_TOLERANCE) {
                return Err(Error::Grid(format!("density for {u} sums to {total}")));
            }
        }
        Ok(EmpiricalDensity { weights })
    }

    pub fn weights(&self, u: FeatureSet) -> Result<&[T]> {
        self.weights
            .get(&u)
            .map(Vec::as_slice)
            .ok_or(Error::MissingDensity(u))
    }

    pub fn subsets(&self) -> impl Iterator<Item = FeatureSet> + '_ {
        self.weights.keys().copied()
    }
}

/// Every `U ⊆ T` over all terms `T` (including the empty set).
pub fn required_subsets<T: Real>(grid: &GridEnsemble<T>) -> Vec<FeatureSet> {
    let mut all = BTreeSet::new();
    for term in grid.terms() {
        all.extend(term.subset.submasks());
    }
    all.into_iter().collect()
}

/// Cell frequencies `a_U(cell) / n` for each requested subset.
pub fn estimate_density<T: Real>(
    data: &Dataset<T>,
    grids: &[Vec<T>],
    subsets: &[FeatureSet],
) -> Result<EmpiricalDensity<T>> {
    if data.n() == 0 {
        return Err(Error::InvalidParams("density needs at least one row".into()));
    }
    let n = T::lit(data.n() as f64);
    let mut weights = BTreeMap::new();
    for &u in subsets {
        if let Some(max) = u.max() {
            if max >= data.d() {
                return Err(Error::DimensionMismatch {
                    expected: max + 1,
                    found: data.d(),
                });
            }
        }
        let cells = cell_count(grids, u)?;
        let mut counts = vec![0usize; cells];
        for x in data.rows() {
            let mut idx = 0;
            for k in u {
                idx = idx * grids[k].len() + cell_of(&grids[k], k, x[k])?;
            }
            counts[idx] += 1;
        }
        weights.insert(u, counts.into_iter().map(|c| T::lit(c as f64) / n).collect());
    }
    Ok(EmpiricalDensity { weights })
}

struct TermPlan<'a, T> {
    values: &'a [T],
    feats: Vec<usize>,
    dims: Vec<usize>,
    strides: Vec<usize>,
    // per local U: positions of U's features and the density weights
    u_pos: Vec<Vec<usize>>,
    u_weights: Vec<&'a [T]>,
    // component slot per nonempty local S
    slots: Vec<usize>,
}

impl<T: Real> TermPlan<'_, T> {
    fn full(&self) -> usize {
        (1 << self.feats.len()) - 1
    }

    /// `Σ_{x_U} m(x_{T\U} fixed by cells, x_U) · p_U(x_U)`.
    fn update(&self, u: usize, cells: &[usize]) -> T {
        let pos = &self.u_pos[u];
        let mut idx = 0;
        for (r, &c) in cells.iter().enumerate() {
            if u >> r & 1 == 0 {
                idx += c * self.strides[r];
            }
        }
        let mut counter = vec![0usize; pos.len()];
        let mut acc = T::zero();
        for &p in self.u_weights[u] {
            acc += self.values[idx] * p;
            for j in (0..pos.len()).rev() {
                let r = pos[j];
                counter[j] += 1;
                idx += self.strides[r];
                if counter[j] < self.dims[r] {
                    break;
                }
                idx -= self.strides[r] * self.dims[r];
                counter[j] = 0;
            }
        }
        acc
    }
}

/// Identified components of a grid model. Output is averaged over the
/// ensemble's `n_trees` members.
pub fn decompose_grid<T: Real>(
    grid: &GridEnsemble<T>,
    density: &EmpiricalDensity<T>,
    data: &Dataset<T>,
) -> Result<ComponentStore<T>> {
    let used = grid
        .terms()
        .iter()
        .fold(FeatureSet::EMPTY, |acc, t| acc | t.subset);
    if let Some(max) = used.max() {
        if max >= data.d() {
            return Err(Error::DimensionMismatch {
                expected: max + 1,
                found: data.d(),
            });
        }
    }
    let mut realized = BTreeSet::new();
    for term in grid.terms() {
        realized.extend(term.subset.submasks().filter(|s| !s.is_empty()));
    }
    let subsets: Vec<FeatureSet> = realized.into_iter().collect();
    let slot_of: BTreeMap<FeatureSet, usize> =
        subsets.iter().enumerate().map(|(i, &s)| (s, i)).collect();

    let mut plans = Vec::with_capacity(grid.terms().len());
    for term in grid.terms() {
        let feats: Vec<usize> = term.subset.iter().collect();
        let dims: Vec<usize> = feats.iter().map(|&k| grid.grids()[k].len()).collect();
        let mut strides = vec![1usize; feats.len()];
        for r in (0..feats.len().saturating_sub(1)).rev() {
            strides[r] = strides[r + 1] * dims[r + 1];
        }
        let ncols = 1usize << feats.len();
        let mut u_pos = Vec::with_capacity(ncols);
        let mut u_weights = Vec::with_capacity(ncols);
        let mut slots = Vec::with_capacity(ncols);
        for u in 0..ncols {
            let pos: Vec<usize> = (0..feats.len()).filter(|r| u >> r & 1 == 1).collect();
            let global = crate::marginalize::local_to_global(&feats, u);
            u_weights.push(density.weights(global)?);
            u_pos.push(pos);
            slots.push(slot_of.get(&global).copied().unwrap_or(usize::MAX));
        }
        plans.push(TermPlan {
            values: &term.values,
            feats,
            dims,
            strides,
            u_pos,
            u_weights,
            slots,
        });
    }

    let scale = T::one() / T::lit(grid.n_trees() as f64);
    // integrating out every feature of a term leaves a constant
    let constants: Vec<T> = plans
        .iter()
        .map(|plan| plan.update(plan.full(), &vec![0; plan.feats.len()]))
        .collect();
    let mut intercept = T::zero();
    for &c in &constants {
        intercept += c;
    }

    let n = data.n();
    let starts: Vec<usize> = (0..n).step_by(ROW_BLOCK).collect();
    let blocks: Vec<Result<Vec<Vec<T>>>> = starts
        .par_iter()
        .map(|&start| {
            let end = (start + ROW_BLOCK).min(n);
            let m = end - start;
            let mut out = vec![vec![T::zero(); m]; subsets.len()];
            let mut cells = Vec::new();
            for i in start..end {
                let x = data.row(i);
                for (plan, &constant) in plans.iter().zip(&constants) {
                    cells.clear();
                    for &k in &plan.feats {
                        cells.push(cell_of(&grid.grids()[k], k, x[k])?);
                    }
                    let full = plan.full();
                    for u in 0..=full {
                        let update = if u == full {
                            constant
                        } else {
                            plan.update(u, &cells)
                        };
                        let rest = full ^ u;
                        for w in FeatureSet::from_bits(u as u64).submasks() {
                            let s = rest | w.bits() as usize;
                            if s == 0 {
                                continue;
                            }
                            let acc = &mut out[plan.slots[s]][i - start];
                            if w.is_odd() {
                                *acc -= update;
                            } else {
                                *acc += update;
                            }
                        }
                    }
                }
            }
            Ok(out)
        })
        .collect();

    let mut components: BTreeMap<FeatureSet, Vec<T>> =
        subsets.iter().map(|&s| (s, Vec::with_capacity(n))).collect();
    for block in blocks {
        let block = block?;
        for (slot, col) in block.into_iter().enumerate() {
            components
                .get_mut(&subsets[slot])
                .expect("slot subset present")
                .extend(col.into_iter().map(|v| v * scale));
        }
    }
    Ok(ComponentStore::from_parts(n, data.d(), intercept * scale, components))
}

/// Row layout of an identification probe: base row `i`, cell `c` of
/// `×_{k∈S} G_k` sits at row `i * cells + c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProbeLayout {
    pub subset: FeatureSet,
    pub base_rows: usize,
    pub cells: usize,
}

/// Copies of every row with `x_S` replaced by each cell corner of `S`.
pub fn identification_probe<T: Real>(
    data: &Dataset<T>,
    grids: &[Vec<T>],
    s: FeatureSet,
) -> Result<(Dataset<T>, ProbeLayout)> {
    let cells = cell_count(grids, s)?;
    let feats: Vec<usize> = s.iter().collect();
    let mut values = Vec::with_capacity(data.n() * cells * data.d());
    for x in data.rows() {
        let mut counter = vec![0usize; feats.len()];
        for _ in 0..cells {
            let start = values.len();
            values.extend_from_slice(x);
            for (j, &k) in feats.iter().enumerate() {
                values[start + k] = grids[k][counter[j]];
            }
            for j in (0..feats.len()).rev() {
                counter[j] += 1;
                if counter[j] < grids[feats[j]].len() {
                    break;
                }
                counter[j] = 0;
            }
        }
    }
    let probe = Dataset::new(data.names().to_vec(), values)?;
    Ok((
        probe,
        ProbeLayout {
            subset: s,
            base_rows: data.n(),
            cells,
        },
    ))
}

/// Largest `|Σ_{T∩S≠∅} Σ_{x_S} m_T · p_S(x_S)|` over the base rows, for a
/// store decomposed at the probe rows. Zero for `S = ∅`.
pub fn identification_residual<T: Real>(
    store: &ComponentStore<T>,
    layout: &ProbeLayout,
    density: &EmpiricalDensity<T>,
) -> Result<T> {
    if layout.subset.is_empty() {
        return Ok(T::zero());
    }
    if store.n() != layout.base_rows * layout.cells {
        return Err(Error::DimensionMismatch {
            expected: layout.base_rows * layout.cells,
            found: store.n(),
        });
    }
    let p = density.weights(layout.subset)?;
    let mut worst = T::zero();
    for i in 0..layout.base_rows {
        let mut residual = T::zero();
        for (t, col) in store.iter() {
            if !t.intersects(layout.subset) {
                continue;
            }
            let block = &col[i * layout.cells..(i + 1) * layout.cells];
            for (v, w) in block.iter().zip(p) {
                residual += *v * *w;
            }
        }
        worst = worst.max(residual.abs());
    }
    Ok(worst)
}

/// Checks marginal identification of the grid decomposition for `S` at the
/// rows of `data`.
pub fn verify_identification<T: Real>(
    grid: &GridEnsemble<T>,
    density: &EmpiricalDensity<T>,
    data: &Dataset<T>,
    s: FeatureSet,
) -> Result<T> {
    if s.is_empty() {
        return Ok(T::zero());
    }
    let (probe, layout) = identification_probe(data, grid.grids(), s)?;
    let store = decompose_grid(grid, density, &probe)?;
    identification_residual(&store, &layout, density)
}
