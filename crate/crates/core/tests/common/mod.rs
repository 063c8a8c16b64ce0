#![allow(dead_code)]

use glex_core::model::{ComparisonRule, Tree, TreeNode};
use glex_core::synth::{random_ensemble, RandomEnsembleSpec};
use glex_core::{Dataset, FeatureSet, TreeEnsemble};

pub fn split(feature: usize, threshold: f64, left: usize, right: usize, cover: f64) -> TreeNode<f64> {
    TreeNode::Split {
        feature,
        threshold,
        left,
        right,
        cover,
    }
}

pub fn leaf(value: f64, cover: f64) -> TreeNode<f64> {
    TreeNode::Leaf { value, cover }
}

/// Split on f0 at 0.5, covers 60/40, leaves 1.0 / 3.0.
pub fn depth1_tree() -> Tree<f64> {
    Tree::new(
        vec![split(0, 0.5, 1, 2, 100.0), leaf(1.0, 60.0), leaf(3.0, 40.0)],
        0,
        ComparisonRule::LessThan,
    )
}

/// Root on f0 at 0.5, both children on f1 at 0.5, equal leaf covers,
/// leaves a=0 (left/left), b=1, c=2, d=5 (right/right).
pub fn depth2_tree() -> Tree<f64> {
    Tree::new(
        vec![
            split(0, 0.5, 1, 2, 100.0),
            split(1, 0.5, 3, 4, 50.0),
            split(1, 0.5, 5, 6, 50.0),
            leaf(0.0, 25.0),
            leaf(1.0, 25.0),
            leaf(2.0, 25.0),
            leaf(5.0, 25.0),
        ],
        0,
        ComparisonRule::LessThan,
    )
}

pub fn ensemble(trees: Vec<Tree<f64>>, base: f64, d: usize) -> TreeEnsemble<f64> {
    TreeEnsemble::new(trees, base, d, vec![]).unwrap()
}

/// The four quadrant rows of the depth-2 fixture: (a, b, c, d) order.
pub fn quadrants() -> Dataset<f64> {
    Dataset::from_rows(
        vec![],
        &[vec![0.2, 0.2], vec![0.2, 0.8], vec![0.8, 0.2], vec![0.8, 0.8]],
    )
    .unwrap()
}

pub fn random_model(d: usize, trees: usize, depth: usize, seed: u64) -> TreeEnsemble<f64> {
    random_ensemble(&RandomEnsembleSpec::new(d, trees, depth, seed)).unwrap()
}

/// Marginalized tree prediction by enumerating root-to-leaf paths: each leaf
/// is weighted by the product over its path of the cover ratio (marginalized
/// split) or the routing indicator (observed split).
pub fn path_oracle(tree: &Tree<f64>, u: FeatureSet, x: &[f64]) -> f64 {
    let mut total = 0.0;
    let mut stack = vec![(tree.root(), 1.0)];
    while let Some((node, weight)) = stack.pop() {
        match tree.nodes()[node] {
            TreeNode::Leaf { value, .. } => total += weight * value,
            TreeNode::Split {
                feature,
                threshold,
                left,
                right,
                cover,
            } => {
                let cl = tree.nodes()[left].cover() / cover;
                let cr = tree.nodes()[right].cover() / cover;
                if u.contains(feature) {
                    stack.push((left, weight * cl));
                    stack.push((right, weight * cr));
                } else if tree.rule().goes_left(x[feature], threshold) {
                    stack.push((left, weight));
                } else {
                    stack.push((right, weight));
                }
            }
        }
    }
    total
}

/// Ensemble prediction with every feature outside `keep` marginalized.
pub fn value_oracle(model: &TreeEnsemble<f64>, keep: FeatureSet, x: &[f64]) -> f64 {
    model.base_offset()
        + model
            .trees()
            .iter()
            .map(|t| path_oracle(t, t.features() - keep, x))
            .sum::<f64>()
}

/// Component `m_S(x)` by inclusion-exclusion over the marginalized
/// ensemble: `Σ_{V ⊆ S} (-1)^{|S \ V|} value(V)`.
pub fn mobius_oracle(model: &TreeEnsemble<f64>, s: FeatureSet, x: &[f64]) -> f64 {
    let mut total = 0.0;
    for v in s.submasks() {
        let sign = if (s - v).len().is_multiple_of(2) { 1.0 } else { -1.0 };
        total += sign * value_oracle(model, v, x);
    }
    total
}

/// Shapley values by averaging marginal contributions over all orderings.
pub fn permutation_shap(model: &TreeEnsemble<f64>, x: &[f64]) -> Vec<f64> {
    let d = model.d();
    assert!(d <= 7, "permutation oracle is factorial in d");
    let mut phi = vec![0.0; d];
    let mut order: Vec<usize> = (0..d).collect();
    let mut count = 0usize;
    permute(&mut order, 0, &mut |perm| {
        let mut s = FeatureSet::EMPTY;
        let mut prev = value_oracle(model, s, x);
        for &k in perm {
            s.insert(k);
            let cur = value_oracle(model, s, x);
            phi[k] += cur - prev;
            prev = cur;
        }
        count += 1;
    });
    phi.iter().map(|p| p / count as f64).collect()
}

fn permute(items: &mut [usize], start: usize, f: &mut impl FnMut(&[usize])) {
    if start == items.len() {
        f(items);
        return;
    }
    for i in start..items.len() {
        items.swap(start, i);
        permute(items, start + 1, f);
        items.swap(start, i);
    }
}
