//! Parser for the booster "dump with statistics" JSON export.
//!
//! The document is an array of recursive node objects:
//!
//! ```json
//! [{"nodeid": 0, "split": "f0", "split_condition": 0.5, "yes": 1, "no": 2,
//!   "missing": 1, "cover": 100,
//!   "children": [{"nodeid": 1, "leaf": 1.0, "cover": 60},
//!                {"nodeid": 2, "leaf": 3.0, "cover": 40}]}]
//! ```
//!
//! Splits route `x < split_condition` to `yes`.

use std::collections::HashMap;

use serde::Deserialize;

use super::{ComparisonRule, Tree, TreeEnsemble, TreeNode};
use crate::error::{Error, Result};
use crate::num::Real;

#[derive(Clone, Debug, Default)]
pub struct DumpOptions {
    /// Declared feature list. Without one, split names must look like `f<k>`.
    pub feature_names: Option<Vec<String>>,
    pub base_offset: f64,
}

#[derive(Deserialize)]
struct DumpNode {
    nodeid: usize,
    split: Option<SplitName>,
    split_condition: Option<f64>,
    yes: Option<usize>,
    no: Option<usize>,
    missing: Option<usize>,
    cover: Option<f64>,
    leaf: Option<f64>,
    #[serde(default)]
    children: Vec<DumpNode>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum SplitName {
    Name(String),
    Index(usize),
}

pub fn parse_booster_dump<T: Real>(text: &str, opts: &DumpOptions) -> Result<TreeEnsemble<T>> {
    let roots: Vec<DumpNode> = serde_json::from_str(text)?;
    let lookup: Option<HashMap<&str, usize>> = opts.feature_names.as_ref().map(|names| {
        names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i))
            .collect()
    });
    let resolve = |name: &SplitName| -> Result<usize> {
        match (name, &lookup) {
            (SplitName::Name(s), Some(map)) => map
                .get(s.as_str())
                .copied()
                .ok_or_else(|| Error::UnknownFeature(s.clone())),
            (SplitName::Index(k), Some(map)) if *k < map.len() => Ok(*k),
            (SplitName::Index(k), None) => Ok(*k),
            (SplitName::Name(s), None) => s
                .strip_prefix('f')
                .and_then(|k| k.parse().ok())
                .ok_or_else(|| Error::UnknownFeature(s.clone())),
            (SplitName::Index(k), Some(_)) => Err(Error::UnknownFeature(k.to_string())),
        }
    };

    let mut trees = Vec::with_capacity(roots.len());
    let mut max_feature = None;
    for (b, root) in roots.iter().enumerate() {
        let mut nodes = Vec::new();
        flatten(b, root, &resolve, &mut nodes, &mut max_feature)?;
        trees.push(Tree::new(nodes, 0, ComparisonRule::LessThan));
    }
    let (d, names) = match &opts.feature_names {
        Some(names) => (names.len(), names.clone()),
        None => (max_feature.map_or(0, |k: usize| k + 1), Vec::new()),
    };
    TreeEnsemble::new(trees, T::lit(opts.base_offset), d, names)
}

// Pre-order flattening; returns the index assigned to `node`.
fn flatten<T: Real>(
    b: usize,
    node: &DumpNode,
    resolve: &dyn Fn(&SplitName) -> Result<usize>,
    out: &mut Vec<TreeNode<T>>,
    max_feature: &mut Option<usize>,
) -> Result<usize> {
    let cover = node.cover.ok_or(Error::MissingCover {
        tree: b,
        node: node.nodeid,
    })?;
    let index = out.len();
    if let Some(value) = node.leaf {
        out.push(TreeNode::Leaf {
            value: T::lit(value),
            cover: T::lit(cover),
        });
        return Ok(index);
    }
    let malformed = |what: &str| {
        Error::Format(format!("tree {b}, node {}: {what}", node.nodeid))
    };
    let split = node.split.as_ref().ok_or_else(|| malformed("neither leaf nor split"))?;
    let feature = resolve(split)?;
    *max_feature = Some(max_feature.map_or(feature, |m| m.max(feature)));
    let threshold = node
        .split_condition
        .ok_or_else(|| malformed("split without split_condition"))?;
    let (yes, no) = node
        .yes
        .zip(node.no)
        .ok_or_else(|| malformed("split without yes/no children"))?;
    if let Some(missing) = node.missing {
        if missing != yes && missing != no {
            return Err(Error::MissingBranch {
                tree: b,
                node: node.nodeid,
                missing,
            });
        }
    }
    let child = |id: usize| {
        node.children
            .iter()
            .find(|c| c.nodeid == id)
            .ok_or_else(|| malformed(&format!("child {id} not among children")))
    };
    let (yes_node, no_node) = (child(yes)?, child(no)?);
    if node.children.len() != 2 {
        return Err(malformed("split must have exactly two children"));
    }
    out.push(TreeNode::Leaf {
        value: T::zero(),
        cover: T::zero(),
    });
    let left = flatten(b, yes_node, resolve, out, max_feature)?;
    let right = flatten(b, no_node, resolve, out, max_feature)?;
    out[index] = TreeNode::Split {
        feature,
        threshold: T::lit(threshold),
        left,
        right,
        cover: T::lit(cover),
    };
    Ok(index)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{parse_native_model, to_native_json};

    const DEPTH1: &str = r#"[{"nodeid":0,"depth":0,"split":"f0","split_condition":0.5,
        "yes":1,"no":2,"missing":1,"gain":12.5,"cover":100,
        "children":[{"nodeid":2,"leaf":3.0,"cover":40},{"nodeid":1,"leaf":1.0,"cover":60}]}]"#;

    #[test]
    fn single_leaf() {
        let opts = DumpOptions {
            feature_names: Some(vec!["a".into()]),
            base_offset: 0.25,
        };
        let m: TreeEnsemble<f64> =
            parse_booster_dump(r#"[{"nodeid":0,"leaf":0.5,"cover":100}]"#, &opts).unwrap();
        assert_eq!(m.trees().len(), 1);
        assert_eq!(m.predict(&[123.0]).unwrap(), 0.75);
    }

    #[test]
    fn depth1_matches_native() {
        let m: TreeEnsemble<f64> = parse_booster_dump(DEPTH1, &DumpOptions::default()).unwrap();
        let tree = &m.trees()[0];
        assert_eq!(tree.features().iter().collect::<Vec<_>>(), vec![0]);
        assert_eq!(tree.nodes()[tree.root()].cover(), 100.0);
        assert_eq!(m.predict(&[0.3]).unwrap(), 1.0);
        assert_eq!(m.predict(&[0.5]).unwrap(), 3.0);

        let native: TreeEnsemble<f64> = parse_native_model(&to_native_json(&m)).unwrap();
        for x in [-1.0, 0.3, 0.5, 0.7] {
            assert_eq!(native.predict(&[x]).unwrap(), m.predict(&[x]).unwrap());
        }
    }

    #[test]
    fn inconsistent_cover_is_invalid() {
        let text = DEPTH1.replace("\"cover\":40", "\"cover\":30");
        let err = parse_booster_dump::<f64>(&text, &DumpOptions::default()).unwrap_err();
        assert!(matches!(err, Error::InvalidModel(_)));
    }

    #[test]
    fn missing_cover_is_hard_error() {
        let text = DEPTH1.replace(",\"cover\":100", "");
        let err = parse_booster_dump::<f64>(&text, &DumpOptions::default()).unwrap_err();
        assert!(matches!(err, Error::MissingCover { tree: 0, node: 0 }));
    }

    #[test]
    fn unknown_feature_name() {
        let opts = DumpOptions {
            feature_names: Some(vec!["age".into()]),
            base_offset: 0.0,
        };
        let err = parse_booster_dump::<f64>(DEPTH1, &opts).unwrap_err();
        assert!(matches!(err, Error::UnknownFeature(ref s) if s == "f0"));
    }

    #[test]
    fn distinct_missing_branch_rejected() {
        let text = DEPTH1.replace("\"missing\":1", "\"missing\":7");
        let err = parse_booster_dump::<f64>(&text, &DumpOptions::default()).unwrap_err();
        assert!(matches!(err, Error::MissingBranch { missing: 7, .. }));
    }

    #[test]
    fn malformed_json() {
        assert!(matches!(
            parse_booster_dump::<f64>("[{", &DumpOptions::default()),
            Err(Error::Json(_))
        ));
    }
}
