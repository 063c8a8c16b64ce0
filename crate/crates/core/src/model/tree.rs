use serde::{Deserialize, Serialize};

use crate::feature_set::FeatureSet;
use crate::num::Real;

/// How a split condition routes a row whose value equals the threshold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ComparisonRule {
    /// `x < threshold` goes left (booster dump convention).
    #[serde(rename = "lt")]
    LessThan,
    /// `x <= threshold` goes left.
    #[serde(rename = "le")]
    LessOrEqual,
}

impl ComparisonRule {
    #[inline]
    pub fn goes_left<T: Real>(self, x: T, threshold: T) -> bool {
        match self {
            ComparisonRule::LessThan => x < threshold,
            ComparisonRule::LessOrEqual => x <= threshold,
        }
    }

    pub fn code(self) -> &'static str {
        match self {
            ComparisonRule::LessThan => "lt",
            ComparisonRule::LessOrEqual => "le",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TreeNode<T> {
    Leaf {
        value: T,
        cover: T,
    },
    Split {
        feature: usize,
        threshold: T,
        left: usize,
        right: usize,
        cover: T,
    },
}

impl<T: Real> TreeNode<T> {
    pub fn cover(&self) -> T {
        match self {
            TreeNode::Leaf { cover, .. } | TreeNode::Split { cover, .. } => *cover,
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, TreeNode::Leaf { .. })
    }
}

/// A binary regression tree with per-node coverage.
///
/// Construction never panics on malformed input; structural problems are
/// reported by [`crate::model::validate`].
#[derive(Clone, Debug, PartialEq)]
pub struct Tree<T> {
    nodes: Vec<TreeNode<T>>,
    root: usize,
    rule: ComparisonRule,
    features: FeatureSet,
    depth: usize,
    // cover(child) / cover(node) for split nodes, (0, 0) for leaves
    weights: Vec<(T, T)>,
}

impl<T: Real> Tree<T> {
    pub fn new(nodes: Vec<TreeNode<T>>, root: usize, rule: ComparisonRule) -> Self {
        let mut features = FeatureSet::EMPTY;
        let cover_of = |i: usize| nodes.get(i).map(TreeNode::cover);
        let weights = nodes
            .iter()
            .map(|node| match *node {
                TreeNode::Split {
                    feature,
                    left,
                    right,
                    cover,
                    ..
                } => {
                    if feature < FeatureSet::CAPACITY {
                        features.insert(feature);
                    }
                    match (cover_of(left), cover_of(right)) {
                        (Some(cl), Some(cr)) => (cl / cover, cr / cover),
                        _ => (T::zero(), T::zero()),
                    }
                }
                TreeNode::Leaf { .. } => (T::zero(), T::zero()),
            })
            .collect();
        let depth = safe_depth(&nodes, root);
        Tree {
            nodes,
            root,
            rule,
            features,
            depth,
            weights,
        }
    }

    /// A tree consisting of one leaf.
    pub fn leaf(value: T, cover: T, rule: ComparisonRule) -> Self {
        Tree::new(vec![TreeNode::Leaf { value, cover }], 0, rule)
    }

    pub fn nodes(&self) -> &[TreeNode<T>] {
        &self.nodes
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn rule(&self) -> ComparisonRule {
        self.rule
    }

    /// Union of split features over internal nodes.
    pub fn features(&self) -> FeatureSet {
        self.features
    }

    /// Number of edges on the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Normalized child coverages `(C_left, C_right)` of node `i`.
    #[inline]
    pub fn child_weights(&self, i: usize) -> (T, T) {
        self.weights[i]
    }

    /// Leaf value reached by `x`. Requires a validated tree.
    pub fn predict(&self, x: &[T]) -> T {
        let mut i = self.root;
        loop {
            match self.nodes[i] {
                TreeNode::Leaf { value, .. } => return value,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    ..
                } => {
                    i = if self.rule.goes_left(x[feature], threshold) {
                        left
                    } else {
                        right
                    };
                }
            }
        }
    }

    /// Tree with every leaf value multiplied by `factor`; covers unchanged.
    pub fn scaled(&self, factor: T) -> Self {
        let nodes = self
            .nodes
            .iter()
            .map(|n| match *n {
                TreeNode::Leaf { value, cover } => TreeNode::Leaf {
                    value: value * factor,
                    cover,
                },
                ref split => split.clone(),
            })
            .collect();
        Tree::new(nodes, self.root, self.rule)
    }

    pub fn cast<U: Real>(&self) -> Tree<U> {
        let c = |v: T| U::lit(v.as_f64());
        let nodes = self
            .nodes
            .iter()
            .map(|n| match *n {
                TreeNode::Leaf { value, cover } => TreeNode::Leaf {
                    value: c(value),
                    cover: c(cover),
                },
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    cover,
                } => TreeNode::Split {
                    feature,
                    threshold: c(threshold),
                    left,
                    right,
                    cover: c(cover),
                },
            })
            .collect();
        Tree::new(nodes, self.root, self.rule)
    }
}

// Longest path from root, visiting each node at most once so cycles and
// dangling indices cannot loop or panic.
fn safe_depth<T>(nodes: &[TreeNode<T>], root: usize) -> usize {
    if root >= nodes.len() {
        return 0;
    }
    let mut seen = vec![false; nodes.len()];
    let mut stack = vec![(root, 0usize)];
    let mut depth = 0;
    while let Some((i, d)) = stack.pop() {
        if i >= nodes.len() || seen[i] {
            continue;
        }
        seen[i] = true;
        depth = depth.max(d);
        if let TreeNode::Split { left, right, .. } = nodes[i] {
            stack.push((right, d + 1));
            stack.push((left, d + 1));
        }
    }
    depth
}
