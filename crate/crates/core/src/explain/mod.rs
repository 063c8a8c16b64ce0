//! Explanations derived from an identified decomposition: interventional
//! SHAP values, partial dependence, importance measures and post-hoc
//! feature removal.

mod debias;
mod importance;
mod pdp;
mod shap;

pub use debias::{remove_features, DebiasedModel};
pub use importance::{importance, ImportanceReport};
pub use pdp::{pdp, pdp_direct, PdpCurve};
pub use shap::{shap_bruteforce, shap_from_components, value_function, ShapMatrix, ORACLE_MAX_D};
