use std::io::{self, Write};

use glex_core::bench::{run_bench, BenchPoint};
use glex_core::decompose::{decompose_grid, estimate_density, required_subsets, GridEnsemble};
use glex_core::explain::{pdp, ShapMatrix, ORACLE_MAX_D};
use glex_core::model::to_native_json;
use glex_core::output::{
    write_components, write_importance, write_json, write_pdp, write_predictions, write_shap, Metadata,
};
use glex_core::synth::{fit_gbt, generate, BoostParams, SimSpec};
use glex_core::{
    decompose, importance, remove_features, shap_bruteforce, shap_from_components, validate, Algorithm,
    Components, Data, DecomposeOptions, DepthCap, Ensemble, Error, FeatureSet, Result,
};
use rayon::prelude::*;

use crate::load::{self, LoadedModel};
use crate::{
    AlgorithmArg, BenchArgs, DebiasArgs, DecomposeArgs, ExplainArgs, FitArgs, ImportanceArgs, Outcome, PdpArgs, ShapArgs,
    SimulateArgs, ValidateArgs,
};

struct Prepared {
    model: LoadedModel,
    data: Data,
    opts: DecomposeOptions,
}

fn prepare(args: &ExplainArgs) -> Result<Prepared> {
    let model = load::model(&args.model)?;
    let raw = load::data(&args.data)?;
    let data = load::features_for(&model.ensemble, &raw)?;
    let opts = DecomposeOptions {
        depth_cap: DepthCap::from_env()?,
    };
    Ok(Prepared { model, data, opts })
}

/// Components at the rows of `eval`. The grid path estimates its density
/// from `background`.
fn components(
    ensemble: &Ensemble,
    background: &Data,
    eval: &Data,
    algorithm: AlgorithmArg,
    opts: &DecomposeOptions,
) -> Result<Components> {
    match algorithm {
        AlgorithmArg::Naive => decompose(ensemble, eval, Algorithm::Naive, opts),
        AlgorithmArg::Fast => decompose(ensemble, eval, Algorithm::Fast, opts),
        AlgorithmArg::Grid => {
            for (b, tree) in ensemble.trees().iter().enumerate() {
                opts.depth_cap.check(b, tree)?;
            }
            let grid = GridEnsemble::from_tree_ensemble(ensemble, background)?;
            let density = estimate_density(background, grid.grids(), &required_subsets(&grid))?;
            decompose_grid(&grid, &density, eval)
        }
    }
}

fn subset_of(ensemble: &Ensemble, names: &[String]) -> Result<FeatureSet> {
    FeatureSet::try_from_indices(load::feature_indices(ensemble, names)?)
}

pub fn decompose_cmd(args: &DecomposeArgs) -> Result<Outcome> {
    let c = &args.common;
    let p = prepare(c)?;
    let store = components(&p.model.ensemble, &p.data, &p.data, c.algorithm, &p.opts)?;
    let names = p.model.ensemble.feature_names();
    write_components(load::create(&c.out)?, &store, names)?;
    let meta_path = args.meta.clone().unwrap_or_else(|| c.out.with_extension("json"));
    let meta = Metadata::new(&store, names, p.model.hash, c.algorithm.name());
    write_json(load::create(&meta_path)?, &meta)?;
    Ok(Outcome::Ok)
}

pub fn shap(args: &ShapArgs) -> Result<Outcome> {
    let c = &args.common;
    let p = prepare(c)?;
    let ensemble = &p.model.ensemble;
    let values = if args.oracle {
        if ensemble.d() > ORACLE_MAX_D {
            return Err(Error::OracleDimension {
                d: ensemble.d(),
                max: ORACLE_MAX_D,
            });
        }
        let rows: Vec<(f64, Vec<f64>)> = (0..p.data.n())
            .into_par_iter()
            .map(|i| shap_bruteforce(ensemble, p.data.row(i)))
            .collect::<Result<_>>()?;
        let phi0 = rows.first().map_or(0.0, |r| r.0);
        let flat = rows.into_iter().flat_map(|r| r.1).collect();
        ShapMatrix::new(phi0, p.data.n(), ensemble.d(), flat)
    } else {
        shap_from_components(&components(ensemble, &p.data, &p.data, c.algorithm, &p.opts)?)
    };
    write_shap(load::create(&c.out)?, &values, ensemble.feature_names())?;
    if args.check_efficiency {
        let pred = ensemble.predict_dataset(&p.data)?;
        let mut worst = 0.0f64;
        for (i, y) in pred.iter().enumerate() {
            let err = (values.total(i) - y).abs() / y.abs().max(1.0);
            worst = worst.max(err);
            if err > args.tolerance {
                eprintln!("glex: efficiency violated at row {i}: phi0 + sum(phi) = {}, prediction = {y}", values.total(i));
                return Ok(Outcome::Failed);
            }
        }
        eprintln!("efficiency ok: max relative error {worst:e}");
    }
    Ok(Outcome::Ok)
}

pub fn pdp_cmd(args: &PdpArgs) -> Result<Outcome> {
    let c = &args.common;
    let p = prepare(c)?;
    let ensemble = &p.model.ensemble;
    let subset = subset_of(ensemble, &args.subset)?;
    let eval = match args.grid {
        Some(k) => grid_rows(&p.data, subset, k)?,
        None => p.data.clone(),
    };
    let store = components(ensemble, &p.data, &eval, c.algorithm, &p.opts)?;
    let curve = pdp(&store, &eval, subset);
    write_pdp(load::create(&c.out)?, &curve, ensemble.feature_names())?;
    Ok(Outcome::Ok)
}

/// Cartesian grid of `k` evenly spaced values per feature of `subset`,
/// spanning the observed range; other columns are copied from row 0.
fn grid_rows(data: &Data, subset: FeatureSet, k: usize) -> Result<Data> {
    if k == 0 || data.n() == 0 {
        return Err(Error::InvalidParams("--grid needs k >= 1 and a non-empty dataset".into()));
    }
    let axes: Vec<(usize, Vec<f64>)> = subset
        .iter()
        .map(|f| {
            let col = data.column(f);
            let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let pts = if k == 1 {
                vec![lo]
            } else {
                (0..k).map(|j| lo + (hi - lo) * j as f64 / (k - 1) as f64).collect()
            };
            (f, pts)
        })
        .collect();
    let mut rows = vec![data.row(0).to_vec()];
    for (f, pts) in &axes {
        rows = rows
            .iter()
            .flat_map(|r| {
                pts.iter().map(move |&v| {
                    let mut r = r.clone();
                    r[*f] = v;
                    r
                })
            })
            .collect();
    }
    Data::from_rows(data.names().to_vec(), &rows)
}

pub fn importance_cmd(args: &ImportanceArgs) -> Result<Outcome> {
    let c = &args.common;
    let mut p = prepare(c)?;
    if let Some(path) = &args.reference {
        p.data = load::features_for(&p.model.ensemble, &load::data(path)?)?;
    }
    let store = components(&p.model.ensemble, &p.data, &p.data, c.algorithm, &p.opts)?;
    let report = importance(&store, &shap_from_components(&store));
    write_importance(load::create(&c.out)?, &report, p.model.ensemble.feature_names())?;
    Ok(Outcome::Ok)
}

pub fn debias(args: &DebiasArgs) -> Result<Outcome> {
    let c = &args.common;
    let model = load::model(&c.model)?;
    let raw = load::data(&c.data)?;
    let data = load::features_for(&model.ensemble, &raw)?;
    let opts = DecomposeOptions {
        depth_cap: DepthCap::from_env()?,
    };
    let ensemble = &model.ensemble;
    let removed = subset_of(ensemble, &args.remove)?;
    let store = components(ensemble, &data, &data, c.algorithm, &opts)?;
    let debiased = remove_features(&store, removed);
    let pred = debiased.predictions();
    write_predictions(load::create(&c.out)?, &pred)?;
    if let Some(path) = &args.components_out {
        write_components(load::create(path)?, &debiased.store, ensemble.feature_names())?;
    }
    if let Some(col) = &args.gap_by {
        let k = raw
            .column_index(col)
            .ok_or_else(|| Error::UnknownFeature(col.clone()))?;
        let groups = raw.column(k);
        let full = ensemble.predict_dataset(&data)?;
        let report = serde_json::json!({
            "by": col,
            "full": median_gap(&groups, &full)?,
            "debiased": median_gap(&groups, &pred)?,
        });
        write_json(io::stdout().lock(), &report)?;
    }
    Ok(Outcome::Ok)
}

/// Median of `values` where the group column takes its larger value, minus
/// the median where it takes its smaller one.
fn median_gap(groups: &[f64], values: &[f64]) -> Result<f64> {
    let mut levels: Vec<f64> = groups.to_vec();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    if levels.len() != 2 {
        return Err(Error::InvalidParams(format!(
            "--gap-by needs a column with exactly two values, found {}",
            levels.len()
        )));
    }
    let median_at = |level: f64| {
        let mut v: Vec<f64> = groups
            .iter()
            .zip(values)
            .filter(|(g, _)| **g == level)
            .map(|(_, v)| *v)
            .collect();
        v.sort_by(f64::total_cmp);
        let m = v.len();
        if m % 2 == 1 {
            v[m / 2]
        } else {
            0.5 * (v[m / 2 - 1] + v[m / 2])
        }
    };
    Ok(median_at(levels[1]) - median_at(levels[0]))
}

pub fn simulate(args: &SimulateArgs) -> Result<Outcome> {
    let mut spec = SimSpec::new(args.scenario.parse()?, args.n, args.seed).with_corr(args.corr);
    spec.hours_sd = args.hours_sd;
    let (x, y) = generate(&spec)?;
    x.write_csv(load::create(&args.out)?, Some(("y", &y)))?;
    Ok(Outcome::Ok)
}

pub fn fit(args: &FitArgs) -> Result<Outcome> {
    let raw = load::data(&args.data)?;
    let t = raw
        .column_index(&args.target)
        .ok_or_else(|| Error::UnknownFeature(args.target.clone()))?;
    for name in &args.drop {
        if raw.column_index(name).is_none() || *name == args.target {
            return Err(Error::UnknownFeature(name.clone()));
        }
    }
    let keep: Vec<String> = raw
        .names()
        .iter()
        .filter(|n| **n != args.target && !args.drop.contains(n))
        .cloned()
        .collect();
    let x = raw.select_columns(&keep)?;
    let y = raw.column(t);
    let params = BoostParams {
        rounds: args.rounds,
        max_depth: args.depth,
        learning_rate: args.learning_rate,
        min_rows_per_leaf: args.min_rows,
    };
    let model = fit_gbt(&x, &y, &params)?;
    let mut out = load::create(&args.out)?;
    out.write_all(to_native_json(&model).as_bytes())?;
    out.flush()?;
    Ok(Outcome::Ok)
}

pub fn bench(args: &BenchArgs) -> Result<Outcome> {
    let mut points = Vec::new();
    for &n in &args.n {
        for &d in &args.d {
            for &rounds in &args.rounds {
                for &depth in &args.depth {
                    points.push(BenchPoint { n, d, rounds, depth });
                }
            }
        }
    }
    let opts = DecomposeOptions {
        depth_cap: DepthCap::from_env()?,
    };
    let records = run_bench(&points, args.seed, &opts)?;
    match &args.out {
        Some(path) => write_json(load::create(path)?, &records)?,
        None => write_json(io::stdout().lock(), &records)?,
    }
    Ok(Outcome::Ok)
}

pub fn validate_cmd(args: &ValidateArgs) -> Result<Outcome> {
    let model = match load::model(&args.model) {
        Ok(m) => m,
        Err(Error::InvalidModel(violations)) => {
            for v in &violations {
                println!("{v}");
            }
            return Ok(Outcome::Failed);
        }
        Err(e) => return Err(e),
    };
    let violations = validate(&model.ensemble);
    if violations.is_empty() {
        let m = &model.ensemble;
        println!(
            "ok: {} trees, d = {}, max depth {}, max interaction order {}",
            m.trees().len(),
            m.d(),
            m.max_depth(),
            m.max_interaction_order()
        );
        return Ok(Outcome::Ok);
    }
    for v in &violations {
        println!("{v}");
    }
    Ok(Outcome::Failed)
}
