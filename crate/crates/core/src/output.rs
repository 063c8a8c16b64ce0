//! Long-format CSV and JSON writers for the command-line artifacts.
//! Subsets are labelled with [`subset_label`].

use std::io::Write;

use serde::Serialize;

use crate::decompose::ComponentStore;
use crate::error::Result;
use crate::explain::{ImportanceReport, PdpCurve, ShapMatrix};
use crate::feature_set::{subset_label, FeatureSet};
use crate::num::Real;

/// `row_id,subset,value`; per row the intercept (empty subset) first, then
/// realized subsets in ascending bit order.
pub fn write_components<T: Real, W: Write>(out: W, store: &ComponentStore<T>, names: &[String]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["row_id", "subset", "value"])?;
    let labels: Vec<(FeatureSet, String)> = store.subsets().map(|s| (s, subset_label(s, names))).collect();
    for i in 0..store.n() {
        let id = i.to_string();
        w.write_record([id.as_str(), "", &store.intercept().to_string()])?;
        for (s, label) in &labels {
            w.write_record([id.as_str(), label, &store.value(*s, i).to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Metadata {
    pub model_hash: String,
    pub algorithm: String,
    pub n: usize,
    pub d: usize,
    pub q: usize,
    pub intercept: f64,
    pub realized_subsets: Vec<String>,
}

impl Metadata {
    pub fn new<T: Real>(store: &ComponentStore<T>, names: &[String], model_hash: String, algorithm: &str) -> Self {
        Metadata {
            model_hash,
            algorithm: algorithm.to_string(),
            n: store.n(),
            d: store.d(),
            q: store.q(),
            intercept: store.intercept().as_f64(),
            realized_subsets: store.subsets().map(|s| subset_label(s, names)).collect(),
        }
    }
}

pub fn write_json<S: Serialize, W: Write>(mut out: W, value: &S) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

/// `row_id,feature,phi`; the baseline `phi0` is the row with an empty feature.
pub fn write_shap<T: Real, W: Write>(out: W, shap: &ShapMatrix<T>, names: &[String]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["row_id", "feature", "phi"])?;
    for i in 0..shap.n() {
        let id = i.to_string();
        w.write_record([id.as_str(), "", &shap.phi0.to_string()])?;
        for (name, v) in names.iter().zip(shap.row(i)) {
            w.write_record([id.as_str(), name, &v.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// `row_id,<one column per subset feature>,xi`.
pub fn write_pdp<T: Real, W: Write>(out: W, curve: &PdpCurve<T>, names: &[String]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["row_id".to_string()];
    header.extend(curve.subset.iter().map(|k| names[k].clone()));
    header.push("xi".into());
    w.write_record(&header)?;
    for (i, (point, v)) in curve.eval_points.iter().zip(&curve.values).enumerate() {
        let mut rec = vec![i.to_string()];
        rec.extend(point.iter().map(T::to_string));
        rec.push(v.to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// `kind,key,value` with kinds `shap`, `split` and `component`.
pub fn write_importance<T: Real, W: Write>(out: W, report: &ImportanceReport<T>, names: &[String]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["kind", "key", "value"])?;
    for (name, v) in names.iter().zip(&report.shap) {
        w.write_record(["shap", name, &v.to_string()])?;
    }
    for (name, v) in names.iter().zip(&report.split) {
        w.write_record(["split", name, &v.to_string()])?;
    }
    for (s, v) in &report.component {
        w.write_record(["component", &subset_label(*s, names), &v.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// `row_id,yhat`.
pub fn write_predictions<T: Real, W: Write>(out: W, values: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["row_id", "yhat"])?;
    for (i, v) in values.iter().enumerate() {
        w.write_record([i.to_string(), v.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
