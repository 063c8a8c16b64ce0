//! Tree-ensemble regression models: representation, validation, prediction
//! and the two on-disk formats.

mod dataset;
mod dump;
mod native;
mod tree;

use std::fmt;

pub use dataset::Dataset;
pub use dump::{parse_booster_dump, DumpOptions};
pub use native::{parse_native_model, to_native_json};
pub use tree::{ComparisonRule, Tree, TreeNode};

use crate::error::{Error, Result};
use crate::feature_set::FeatureSet;
use crate::num::Real;

/// Relative tolerance for `cover(node) == cover(left) + cover(right)`.
pub const COVER_TOLERANCE: f64 = 1e-6;

/// Additive ensemble `base_offset + sum_b tree_b(x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TreeEnsemble<T> {
    trees: Vec<Tree<T>>,
    base_offset: T,
    d: usize,
    feature_names: Vec<String>,
    rule: ComparisonRule,
}

impl<T: Real> TreeEnsemble<T> {
    /// Builds and validates an ensemble. An empty `feature_names` gets
    /// `f0, f1, ..` filled in.
    pub fn new(
        trees: Vec<Tree<T>>,
        base_offset: T,
        d: usize,
        feature_names: Vec<String>,
    ) -> Result<Self> {
        let ensemble = Self::from_parts_unchecked(trees, base_offset, d, feature_names);
        let violations = validate(&ensemble);
        if violations.is_empty() {
            Ok(ensemble)
        } else {
            Err(Error::InvalidModel(violations))
        }
    }

    /// No invariant checks; pair with [`validate`].
    pub fn from_parts_unchecked(
        trees: Vec<Tree<T>>,
        base_offset: T,
        d: usize,
        mut feature_names: Vec<String>,
    ) -> Self {
        if feature_names.is_empty() {
            feature_names = (0..d).map(|k| format!("f{k}")).collect();
        }
        let rule = trees
            .first()
            .map(Tree::rule)
            .unwrap_or(ComparisonRule::LessThan);
        TreeEnsemble {
            trees,
            base_offset,
            d,
            feature_names,
            rule,
        }
    }

    pub fn trees(&self) -> &[Tree<T>] {
        &self.trees
    }

    pub fn base_offset(&self) -> T {
        self.base_offset
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn rule(&self) -> ComparisonRule {
        self.rule
    }

    pub fn max_depth(&self) -> usize {
        self.trees.iter().map(Tree::depth).max().unwrap_or(0)
    }

    /// Union of all trees' feature sets.
    pub fn features(&self) -> FeatureSet {
        self.trees
            .iter()
            .fold(FeatureSet::EMPTY, |acc, t| acc | t.features())
    }

    /// Largest tree feature set size, an upper bound on the interaction order.
    pub fn max_interaction_order(&self) -> usize {
        self.trees.iter().map(|t| t.features().len()).max().unwrap_or(0)
    }

    pub fn predict(&self, x: &[T]) -> Result<T> {
        if x.len() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                found: x.len(),
            });
        }
        Ok(self.predict_unchecked(x))
    }

    pub(crate) fn predict_unchecked(&self, x: &[T]) -> T {
        let mut acc = self.base_offset;
        for tree in &self.trees {
            acc += tree.predict(x);
        }
        acc
    }

    pub fn predict_dataset(&self, data: &Dataset<T>) -> Result<Vec<T>> {
        self.check_columns(data)?;
        Ok(data.rows().map(|x| self.predict_unchecked(x)).collect())
    }

    pub(crate) fn check_columns(&self, data: &Dataset<T>) -> Result<()> {
        if data.d() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                found: data.d(),
            });
        }
        Ok(())
    }

    /// Ensemble holding the single tree `b` and a zero offset.
    pub fn single_tree(&self, b: usize) -> Self {
        Self::from_parts_unchecked(
            vec![self.trees[b].clone()],
            T::zero(),
            self.d,
            self.feature_names.clone(),
        )
    }

    pub fn with_trees(&self, trees: Vec<Tree<T>>, base_offset: T) -> Self {
        Self::from_parts_unchecked(trees, base_offset, self.d, self.feature_names.clone())
    }

    pub fn cast<U: Real>(&self) -> TreeEnsemble<U> {
        TreeEnsemble::from_parts_unchecked(
            self.trees.iter().map(Tree::cast).collect(),
            U::lit(self.base_offset.as_f64()),
            self.d,
            self.feature_names.clone(),
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ViolationKind {
    NoTrees,
    TooManyFeatures(usize),
    FeatureNameCount { names: usize, d: usize },
    EmptyTree,
    RootOutOfRange(usize),
    NonPositiveCover(f64),
    NonFinite,
    FeatureOutOfRange(usize),
    ChildOutOfRange(usize),
    ParentCount(usize),
    Unreachable,
    CoverMismatch { node: f64, children: f64 },
    MixedComparisonRule,
}

/// One failed model invariant, located by tree and node where applicable.
#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub tree: Option<usize>,
    pub node: Option<usize>,
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.tree, self.node) {
            (Some(t), Some(n)) => write!(f, "tree {t} node {n}: ")?,
            (Some(t), None) => write!(f, "tree {t}: ")?,
            _ => {}
        }
        match &self.kind {
            ViolationKind::NoTrees => write!(f, "ensemble has no trees"),
            ViolationKind::TooManyFeatures(d) => {
                write!(f, "d = {d} exceeds {}", FeatureSet::CAPACITY)
            }
            ViolationKind::FeatureNameCount { names, d } => {
                write!(f, "{names} feature names for d = {d}")
            }
            ViolationKind::EmptyTree => write!(f, "tree has no nodes"),
            ViolationKind::RootOutOfRange(r) => write!(f, "root index {r} out of range"),
            ViolationKind::NonPositiveCover(c) => write!(f, "cover {c} is not positive"),
            ViolationKind::NonFinite => write!(f, "non-finite value or threshold"),
            ViolationKind::FeatureOutOfRange(k) => write!(f, "split feature {k} >= d"),
            ViolationKind::ChildOutOfRange(c) => write!(f, "child index {c} out of range"),
            ViolationKind::ParentCount(p) => write!(f, "node has {p} parents"),
            ViolationKind::Unreachable => write!(f, "node unreachable from root"),
            ViolationKind::CoverMismatch { node, children } => write!(
                f,
                "cover {node} differs from children cover sum {children}"
            ),
            ViolationKind::MixedComparisonRule => {
                write!(f, "comparison rule differs from the first tree")
            }
        }
    }
}

/// Checks every structural and coverage invariant; empty iff the model is valid.
pub fn validate<T: Real>(ensemble: &TreeEnsemble<T>) -> Vec<Violation> {
    let mut out = Vec::new();
    let global = |kind| Violation {
        tree: None,
        node: None,
        kind,
    };
    if ensemble.trees.is_empty() {
        out.push(global(ViolationKind::NoTrees));
    }
    if ensemble.d > FeatureSet::CAPACITY {
        out.push(global(ViolationKind::TooManyFeatures(ensemble.d)));
    }
    if ensemble.feature_names.len() != ensemble.d {
        out.push(global(ViolationKind::FeatureNameCount {
            names: ensemble.feature_names.len(),
            d: ensemble.d,
        }));
    }
    if !ensemble.base_offset.is_finite() {
        out.push(global(ViolationKind::NonFinite));
    }
    for (b, tree) in ensemble.trees.iter().enumerate() {
        if tree.rule() != ensemble.rule {
            out.push(Violation {
                tree: Some(b),
                node: None,
                kind: ViolationKind::MixedComparisonRule,
            });
        }
        validate_tree(b, tree, ensemble.d, &mut out);
    }
    out
}

fn validate_tree<T: Real>(b: usize, tree: &Tree<T>, d: usize, out: &mut Vec<Violation>) {
    let nodes = tree.nodes();
    let at = |node: Option<usize>, kind| Violation {
        tree: Some(b),
        node,
        kind,
    };
    if nodes.is_empty() {
        out.push(at(None, ViolationKind::EmptyTree));
        return;
    }
    if tree.root() >= nodes.len() {
        out.push(at(None, ViolationKind::RootOutOfRange(tree.root())));
        return;
    }
    let mut parents = vec![0usize; nodes.len()];
    for (i, node) in nodes.iter().enumerate() {
        let cover = node.cover();
        if !cover.is_finite() {
            out.push(at(Some(i), ViolationKind::NonFinite));
        } else if cover <= T::zero() {
            out.push(at(Some(i), ViolationKind::NonPositiveCover(cover.as_f64())));
        }
        match *node {
            TreeNode::Leaf { value, .. } => {
                if !value.is_finite() {
                    out.push(at(Some(i), ViolationKind::NonFinite));
                }
            }
            TreeNode::Split {
                feature,
                threshold,
                left,
                right,
                cover,
            } => {
                if feature >= d {
                    out.push(at(Some(i), ViolationKind::FeatureOutOfRange(feature)));
                }
                if !threshold.is_finite() {
                    out.push(at(Some(i), ViolationKind::NonFinite));
                }
                let mut in_range = true;
                for child in [left, right] {
                    if child >= nodes.len() {
                        out.push(at(Some(i), ViolationKind::ChildOutOfRange(child)));
                        in_range = false;
                    } else {
                        parents[child] += 1;
                    }
                }
                if in_range {
                    let sum = nodes[left].cover() + nodes[right].cover();
                    let tol = T::lit(COVER_TOLERANCE) * cover.abs();
                    if !((sum - cover).abs() <= tol) {
                        out.push(at(
                            Some(i),
                            ViolationKind::CoverMismatch {
                                node: cover.as_f64(),
                                children: sum.as_f64(),
                            },
                        ));
                    }
                }
            }
        }
    }
    for (i, &p) in parents.iter().enumerate() {
        let expected = usize::from(i != tree.root());
        if p != expected {
            out.push(at(Some(i), ViolationKind::ParentCount(p)));
        }
    }
    // With single parents everywhere, unreachable nodes are exactly the cycles.
    let mut seen = vec![false; nodes.len()];
    let mut stack = vec![tree.root()];
    while let Some(i) = stack.pop() {
        if i >= nodes.len() || seen[i] {
            continue;
        }
        seen[i] = true;
        if let TreeNode::Split { left, right, .. } = nodes[i] {
            stack.push(left);
            stack.push(right);
        }
    }
    for (i, reached) in seen.iter().enumerate() {
        if !reached {
            out.push(at(Some(i), ViolationKind::Unreachable));
        }
    }
}
