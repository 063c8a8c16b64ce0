use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;

use glex_core::model::{parse_booster_dump, parse_native_model, DumpOptions};
use glex_core::{Data, Ensemble, Error, Result};
use sha2::{Digest, Sha256};

use crate::ModelArgs;

pub struct LoadedModel {
    pub ensemble: Ensemble,
    /// SHA-256 of the model file bytes, hex encoded.
    pub hash: String,
}

pub fn model(args: &ModelArgs) -> Result<LoadedModel> {
    let text = read_text(&args.model)?;
    let hash = format!("{:x}", Sha256::digest(text.as_bytes()));
    let ensemble = if text.trim_start().starts_with('[') {
        let opts = DumpOptions {
            feature_names: args.features.as_deref().map(feature_list).transpose()?,
            base_offset: args.base_offset,
        };
        parse_booster_dump(&text, &opts)?
    } else {
        if args.features.is_some() {
            return Err(Error::InvalidParams(
                "--features applies to booster dumps; native models carry their own names".into(),
            ));
        }
        parse_native_model(&text)?
    };
    Ok(LoadedModel { ensemble, hash })
}

fn feature_list(spec: &str) -> Result<Vec<String>> {
    let names: Vec<String> = match spec.strip_prefix('@') {
        Some(path) => read_text(Path::new(path))?
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(String::from)
            .collect(),
        None => spec.split(',').map(|s| s.trim().to_string()).collect(),
    };
    if names.iter().any(String::is_empty) {
        return Err(Error::InvalidParams(format!("empty feature name in {spec:?}")));
    }
    Ok(names)
}

pub fn data(path: &Path) -> Result<Data> {
    Data::read_csv(File::open(path).map_err(|e| with_path(e, path))?)
}

/// The columns of `data` in model order: by name when every model feature
/// is present, otherwise by position when the widths agree.
pub fn features_for(ensemble: &Ensemble, data: &Data) -> Result<Data> {
    let names = ensemble.feature_names();
    if names.iter().all(|n| data.column_index(n).is_some()) {
        return data.select_columns(names);
    }
    if data.d() == ensemble.d() {
        return Ok(data.clone());
    }
    let missing = names.iter().find(|n| data.column_index(n).is_none()).unwrap();
    Err(Error::UnknownFeature(missing.clone()))
}

pub fn feature_indices(ensemble: &Ensemble, names: &[String]) -> Result<Vec<usize>> {
    names
        .iter()
        .map(|n| {
            ensemble
                .feature_names()
                .iter()
                .position(|m| m == n)
                .ok_or_else(|| Error::UnknownFeature(n.clone()))
        })
        .collect()
}

pub fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).map_err(|e| with_path(e, path))?))
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| with_path(e, path))
}

fn with_path(e: std::io::Error, path: &Path) -> Error {
    Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}
