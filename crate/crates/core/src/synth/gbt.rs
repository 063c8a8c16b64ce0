//! Squared-error gradient boosting with exact greedy CART trees.
//!
//! Trees are grown level by level. For every feature the rows are scanned
//! once per level in presorted order, accumulating left-hand statistics per
//! open node; candidate thresholds are midpoints between consecutive
//! distinct values inside a node. Ties in gain keep the earliest candidate
//! (lowest feature, then lowest threshold).

use crate::error::{Error, Result};
use crate::feature_set::FeatureSet;
use crate::model::{ComparisonRule, Dataset, Tree, TreeEnsemble, TreeNode};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoostParams {
    pub rounds: usize,
    pub max_depth: usize,
    pub learning_rate: f64,
    pub min_rows_per_leaf: usize,
}

impl Default for BoostParams {
    fn default() -> Self {
        BoostParams {
            rounds: 100,
            max_depth: 3,
            learning_rate: 0.1,
            min_rows_per_leaf: 1,
        }
    }
}

impl BoostParams {
    fn validate(&self, n: usize) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParams(m));
        if self.rounds == 0 {
            return bad("rounds must be >= 1".into());
        }
        if !(1..=10).contains(&self.max_depth) {
            return bad(format!("max_depth {} outside [1, 10]", self.max_depth));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) {
            return bad(format!("learning_rate {} outside (0, 1]", self.learning_rate));
        }
        let min_rows = self.min_rows_per_leaf.max(1);
        if n < 2 * min_rows {
            return bad(format!("{n} rows cannot hold two leaves of {min_rows} rows"));
        }
        Ok(())
    }
}

// Relative gain below which a split is treated as noise.
const GAIN_EPS: f64 = 1e-12;

struct BuildNode {
    sum: f64,
    count: usize,
    split: Option<(usize, f64, usize, usize)>,
}

#[derive(Clone, Copy)]
struct Candidate {
    gain: f64,
    feature: usize,
    threshold: f64,
}

#[derive(Clone, Copy, Default)]
struct ScanState {
    left_sum: f64,
    left_count: usize,
    last: f64,
}

pub fn fit_gbt(data: &Dataset<f64>, y: &[f64], params: &BoostParams) -> Result<TreeEnsemble<f64>> {
    let (n, d) = (data.n(), data.d());
    if y.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: y.len(),
        });
    }
    params.validate(n)?;
    if d > FeatureSet::CAPACITY {
        return Err(Error::TooManyFeatures {
            d,
            max: FeatureSet::CAPACITY,
        });
    }
    let rule = ComparisonRule::LessOrEqual;
    let base = y.iter().sum::<f64>() / n as f64;
    if y.iter().all(|&v| v == y[0]) {
        let tree = Tree::leaf(0.0, n as f64, rule);
        return TreeEnsemble::new(vec![tree], y[0], d, data.names().to_vec());
    }

    let sorted: Vec<Vec<u32>> = (0..d)
        .map(|k| {
            let mut idx: Vec<u32> = (0..n as u32).collect();
            idx.sort_by(|&a, &b| data.get(a as usize, k).total_cmp(&data.get(b as usize, k)));
            idx
        })
        .collect();
    let min_rows = params.min_rows_per_leaf.max(1);

    let mut pred = vec![base; n];
    let mut residual = vec![0.0; n];
    let mut node_of = vec![0u32; n];
    let mut trees = Vec::with_capacity(params.rounds);
    for _ in 0..params.rounds {
        for i in 0..n {
            residual[i] = y[i] - pred[i];
        }
        node_of.fill(0);
        let nodes = grow(data, &residual, &sorted, &mut node_of, params.max_depth, min_rows);
        let leaf_value: Vec<f64> = nodes
            .iter()
            .map(|nd| params.learning_rate * nd.sum / nd.count as f64)
            .collect();
        for i in 0..n {
            pred[i] += leaf_value[node_of[i] as usize];
        }
        let single_leaf = nodes.len() == 1;
        let tree_nodes = nodes
            .iter()
            .zip(&leaf_value)
            .map(|(nd, &value)| match nd.split {
                Some((feature, threshold, left, right)) => TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    cover: nd.count as f64,
                },
                None => TreeNode::Leaf {
                    value,
                    cover: nd.count as f64,
                },
            })
            .collect();
        trees.push(Tree::new(tree_nodes, 0, rule));
        if single_leaf {
            // residual means are now zero; later rounds would repeat this tree
            break;
        }
    }
    TreeEnsemble::new(trees, base, d, data.names().to_vec())
}

fn grow(
    data: &Dataset<f64>,
    residual: &[f64],
    sorted: &[Vec<u32>],
    node_of: &mut [u32],
    max_depth: usize,
    min_rows: usize,
) -> Vec<BuildNode> {
    let n = residual.len();
    let mut nodes = vec![BuildNode {
        sum: residual.iter().sum(),
        count: n,
        split: None,
    }];
    let mut open: Vec<usize> = vec![0];
    // open node id -> slot in the per-level arrays
    let mut slot_of = vec![usize::MAX; 1];
    for _ in 0..max_depth {
        if open.is_empty() {
            break;
        }
        slot_of.resize(nodes.len(), usize::MAX);
        slot_of.fill(usize::MAX);
        for (slot, &v) in open.iter().enumerate() {
            slot_of[v] = slot;
        }
        let mut sumsq = vec![0.0; open.len()];
        for i in 0..n {
            let slot = slot_of[node_of[i] as usize];
            if slot != usize::MAX {
                sumsq[slot] += residual[i] * residual[i];
            }
        }
        let mut best: Vec<Option<Candidate>> = vec![None; open.len()];
        for (k, order) in sorted.iter().enumerate() {
            let mut state = vec![ScanState::default(); open.len()];
            for &row in order {
                let row = row as usize;
                let slot = slot_of[node_of[row] as usize];
                if slot == usize::MAX {
                    continue;
                }
                let x = data.get(row, k);
                let st = &mut state[slot];
                let node = &nodes[open[slot]];
                let right_count = node.count - st.left_count;
                if st.left_count >= min_rows && right_count >= min_rows && x > st.last {
                    let right_sum = node.sum - st.left_sum;
                    let gain = st.left_sum * st.left_sum / st.left_count as f64
                        + right_sum * right_sum / right_count as f64
                        - node.sum * node.sum / node.count as f64;
                    if gain > GAIN_EPS * sumsq[slot] && best[slot].is_none_or(|b| gain > b.gain) {
                        let mut threshold = 0.5 * (st.last + x);
                        if threshold >= x {
                            threshold = st.last;
                        }
                        best[slot] = Some(Candidate {
                            gain,
                            feature: k,
                            threshold,
                        });
                    }
                }
                st.left_sum += residual[row];
                st.left_count += 1;
                st.last = x;
            }
        }

        let mut next_open = Vec::new();
        let mut child_of: Vec<Option<(usize, f64, usize, usize)>> = vec![None; open.len()];
        for (slot, cand) in best.iter().enumerate() {
            if let Some(c) = cand {
                let left = nodes.len();
                nodes.push(BuildNode {
                    sum: 0.0,
                    count: 0,
                    split: None,
                });
                nodes.push(BuildNode {
                    sum: 0.0,
                    count: 0,
                    split: None,
                });
                nodes[open[slot]].split = Some((c.feature, c.threshold, left, left + 1));
                child_of[slot] = Some((c.feature, c.threshold, left, left + 1));
                next_open.push(left);
                next_open.push(left + 1);
            }
        }
        if next_open.is_empty() {
            break;
        }
        for i in 0..n {
            let slot = slot_of[node_of[i] as usize];
            if slot == usize::MAX {
                continue;
            }
            if let Some((k, thr, l, r)) = child_of[slot] {
                let child = if data.get(i, k) <= thr { l } else { r };
                node_of[i] = child as u32;
                nodes[child].sum += residual[i];
                nodes[child].count += 1;
            }
        }
        open = next_open;
    }
    nodes
}

/// Fits on the dataset with the columns in `drop` removed.
pub fn refit_without(
    data: &Dataset<f64>,
    y: &[f64],
    params: &BoostParams,
    drop: FeatureSet,
) -> Result<TreeEnsemble<f64>> {
    if data.d() > 0 && FeatureSet::full(data.d().min(64)).is_subset_of(drop) {
        return Err(Error::InvalidParams("cannot drop every feature".into()));
    }
    fit_gbt(&data.without_columns(drop), y, params)
}
