//! Versioned native JSON model format.

use serde::{Deserialize, Serialize};

use super::{ComparisonRule, Tree, TreeEnsemble, TreeNode};
use crate::error::{Error, Result};
use crate::num::Real;

const VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    version: u32,
    d: usize,
    #[serde(default)]
    feature_names: Vec<String>,
    #[serde(default)]
    base_offset: f64,
    comparison_rule: ComparisonRule,
    trees: Vec<DocTree>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DocTree {
    root: usize,
    nodes: Vec<DocNode>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum DocNode {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
        cover: f64,
    },
    Leaf {
        leaf: f64,
        cover: f64,
    },
}

pub fn parse_native_model<T: Real>(text: &str) -> Result<TreeEnsemble<T>> {
    let doc: Document = serde_json::from_str(text)?;
    if doc.version != VERSION {
        return Err(Error::Format(format!(
            "unsupported native model version {} (expected {VERSION})",
            doc.version
        )));
    }
    let rule = doc.comparison_rule;
    let trees = doc
        .trees
        .into_iter()
        .map(|t| {
            let nodes = t
                .nodes
                .into_iter()
                .map(|n| match n {
                    DocNode::Leaf { leaf, cover } => TreeNode::Leaf {
                        value: T::lit(leaf),
                        cover: T::lit(cover),
                    },
                    DocNode::Split {
                        feature,
                        threshold,
                        left,
                        right,
                        cover,
                    } => TreeNode::Split {
                        feature,
                        threshold: T::lit(threshold),
                        left,
                        right,
                        cover: T::lit(cover),
                    },
                })
                .collect();
            Tree::new(nodes, t.root, rule)
        })
        .collect();
    TreeEnsemble::new(trees, T::lit(doc.base_offset), doc.d, doc.feature_names)
}

pub fn to_native_json<T: Real>(ensemble: &TreeEnsemble<T>) -> String {
    let doc = Document {
        version: VERSION,
        d: ensemble.d(),
        feature_names: ensemble.feature_names().to_vec(),
        base_offset: ensemble.base_offset().as_f64(),
        comparison_rule: ensemble.rule(),
        trees: ensemble
            .trees()
            .iter()
            .map(|t| DocTree {
                root: t.root(),
                nodes: t
                    .nodes()
                    .iter()
                    .map(|n| match *n {
                        TreeNode::Leaf { value, cover } => DocNode::Leaf {
                            leaf: value.as_f64(),
                            cover: cover.as_f64(),
                        },
                        TreeNode::Split {
                            feature,
                            threshold,
                            left,
                            right,
                            cover,
                        } => DocNode::Split {
                            feature,
                            threshold: threshold.as_f64(),
                            left,
                            right,
                            cover: cover.as_f64(),
                        },
                    })
                    .collect(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("model document serializes")
}
