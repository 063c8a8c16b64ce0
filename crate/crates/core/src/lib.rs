//! Exact functional decomposition of tree ensembles.
//!
//! A fitted ensemble `m(x)` is written as a sum of components `m_S(x_S)`
//! over feature subsets `S`, identified by requiring that every component
//! integrates to zero over each of its own features. Interventional SHAP
//! values, partial dependence, importance scores and post-hoc feature
//! removal all follow from the components.
//!
//! ```
//! use glex_core::{decompose_fast, shap_from_components, Dataset, Ensemble};
//! use glex_core::model::{ComparisonRule, Tree, TreeNode};
//!
//! let tree = Tree::new(
//!     vec![
//!         TreeNode::Split { feature: 0, threshold: 0.5, left: 1, right: 2, cover: 100.0 },
//!         TreeNode::Leaf { value: 1.0, cover: 60.0 },
//!         TreeNode::Leaf { value: 3.0, cover: 40.0 },
//!     ],
//!     0,
//!     ComparisonRule::LessThan,
//! );
//! let model = Ensemble::new(vec![tree], 0.0, 1, vec![]).unwrap();
//! let data = Dataset::from_rows(vec![], &[vec![0.7]]).unwrap();
//! let store = decompose_fast(&model, &data).unwrap();
//! let shap = shap_from_components(&store);
//! assert!((shap.phi0 + shap.get(0, 0) - 3.0).abs() < 1e-12);
//! ```

pub mod bench;
pub mod decompose;
pub mod error;
pub mod explain;
pub mod feature_set;
pub mod marginalize;
pub mod model;
pub mod num;
pub mod output;
pub mod synth;

pub use decompose::{decompose, decompose_fast, decompose_grid, decompose_naive, Algorithm, ComponentStore, DecomposeOptions};
pub use error::{Error, Result};
pub use explain::{importance, pdp, remove_features, shap_bruteforce, shap_from_components};
pub use feature_set::{subset_label, FeatureSet};
pub use marginalize::{marginal_predict, marginal_predict_all, DepthCap};
pub use model::{validate, Dataset, TreeEnsemble};
pub use num::Real;

pub type Ensemble = TreeEnsemble<f64>;
pub type Ensemble32 = TreeEnsemble<f32>;
pub type Data = Dataset<f64>;
pub type Data32 = Dataset<f32>;
pub type Components = ComponentStore<f64>;
pub type Components32 = ComponentStore<f32>;
pub type Shap = explain::ShapMatrix<f64>;
pub type Grid = decompose::GridEnsemble<f64>;
