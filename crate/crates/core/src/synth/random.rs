use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::feature_set::FeatureSet;
use crate::model::{ComparisonRule, Dataset, Tree, TreeEnsemble, TreeNode};

/// Shape of a random ensemble. Trees have depth at most `max_depth`; the
/// root always splits when `max_depth > 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RandomEnsembleSpec {
    pub d: usize,
    pub n_trees: usize,
    pub max_depth: usize,
    pub rule: ComparisonRule,
    pub seed: u64,
    /// Probability that a non-root internal node splits.
    pub split_prob: f64,
    /// Grow every tree to exactly `max_depth`.
    pub full: bool,
}

impl RandomEnsembleSpec {
    pub fn new(d: usize, n_trees: usize, max_depth: usize, seed: u64) -> Self {
        RandomEnsembleSpec {
            d,
            n_trees,
            max_depth,
            rule: ComparisonRule::LessThan,
            seed,
            split_prob: 0.9,
            full: false,
        }
    }
}

const ROOT_COVER: f64 = 1e6;

/// Random valid ensemble: thresholds and leaves are standard normal, child
/// covers split the parent cover by a uniform fraction in `[0.1, 0.9]`.
pub fn random_ensemble(spec: &RandomEnsembleSpec) -> Result<TreeEnsemble<f64>> {
    if spec.d == 0 || spec.d > FeatureSet::CAPACITY {
        return Err(Error::InvalidParams(format!("d = {} outside [1, 64]", spec.d)));
    }
    if spec.n_trees == 0 {
        return Err(Error::InvalidParams("n_trees must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(101);
    let trees = (0..spec.n_trees)
        .map(|_| {
            let mut nodes = Vec::new();
            grow(&mut rng, spec, &mut nodes, 0, ROOT_COVER);
            Tree::new(nodes, 0, spec.rule)
        })
        .collect();
    let base = rng.sample(StandardNormal);
    let names = (0..spec.d).map(|k| format!("x{k}")).collect();
    TreeEnsemble::new(trees, base, spec.d, names)
}

fn grow(rng: &mut ChaCha8Rng, spec: &RandomEnsembleSpec, nodes: &mut Vec<TreeNode<f64>>, depth: usize, cover: f64) -> usize {
    let id = nodes.len();
    let split = depth < spec.max_depth && (depth == 0 || spec.full || rng.random_bool(spec.split_prob));
    if !split {
        nodes.push(TreeNode::Leaf {
            value: rng.sample(StandardNormal),
            cover,
        });
        return id;
    }
    let feature = rng.random_range(0..spec.d);
    let threshold: f64 = rng.sample(StandardNormal);
    let frac = rng.random_range(0.1..=0.9);
    let left_cover = cover * frac;
    let right_cover = cover - left_cover;
    nodes.push(TreeNode::Leaf { value: 0.0, cover });
    let left = grow(rng, spec, nodes, depth + 1, left_cover);
    let right = grow(rng, spec, nodes, depth + 1, right_cover);
    nodes[id] = TreeNode::Split {
        feature,
        threshold,
        left,
        right,
        cover,
    };
    id
}

/// `n x d` independent standard normal values.
pub fn random_dataset(n: usize, d: usize, seed: u64) -> Dataset<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(102);
    let values = (0..n * d).map(|_| rng.sample(StandardNormal)).collect();
    let names = (0..d).map(|k| format!("x{k}")).collect();
    Dataset::new(names, values).expect("normal draws are finite")
}
