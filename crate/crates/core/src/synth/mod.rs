//! Simulated data for the interaction, importance and de-biasing
//! experiments, a small exact-greedy boosting learner, and random tree
//! ensembles for property tests and benchmarks.

mod gbt;
mod random;

pub use gbt::{fit_gbt, refit_without, BoostParams};
pub use random::{random_dataset, random_ensemble, RandomEnsembleSpec};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::model::Dataset;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scenario {
    /// `y = x1 + x2 + 2 x1 x2` with standard normal, correlated `(x1, x2)`.
    Interaction2d,
    /// `y = x1 + x3 + x2 x3 - 2 x2 x3 x4` with independent standard normals.
    Importance4d,
    /// `y = hours + 20 sex`, hours centred at 30 (sex 0) or 40 (sex 1).
    Salary,
}

impl Scenario {
    // ChaCha stream id, so scenarios sharing a seed draw independent numbers
    fn stream(self) -> u64 {
        match self {
            Scenario::Interaction2d => 1,
            Scenario::Importance4d => 2,
            Scenario::Salary => 3,
        }
    }
}

impl std::str::FromStr for Scenario {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "interaction2d" => Ok(Scenario::Interaction2d),
            "importance4d" => Ok(Scenario::Importance4d),
            "salary" => Ok(Scenario::Salary),
            other => Err(Error::InvalidParams(format!("unknown scenario {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimSpec {
    pub scenario: Scenario,
    pub n: usize,
    pub seed: u64,
    /// Correlation of `(x1, x2)`; interaction2d only.
    pub corr: f64,
    /// Standard deviation of weekly hours; salary only.
    pub hours_sd: f64,
}

impl SimSpec {
    pub fn new(scenario: Scenario, n: usize, seed: u64) -> Self {
        SimSpec {
            scenario,
            n,
            seed,
            corr: 0.3,
            hours_sd: 4.0,
        }
    }

    pub fn with_corr(mut self, corr: f64) -> Self {
        self.corr = corr;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidParams(format!("n = {} < 2", self.n)));
        }
        if !(self.corr > -1.0 && self.corr < 1.0) {
            return Err(Error::InvalidParams(format!("corr = {} outside (-1, 1)", self.corr)));
        }
        if !(self.hours_sd >= 0.0) {
            return Err(Error::InvalidParams("hours_sd must be non-negative".into()));
        }
        Ok(())
    }
}

/// Draws the scenario's features and noiseless target. Deterministic in the seed.
pub fn generate(spec: &SimSpec) -> Result<(Dataset<f64>, Vec<f64>)> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(spec.scenario.stream());
    let mut normal = || -> f64 { rng.sample(StandardNormal) };
    let n = spec.n;
    let names = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    let (names, d) = match spec.scenario {
        Scenario::Interaction2d => (names(&["x1", "x2"]), 2),
        Scenario::Importance4d => (names(&["x1", "x2", "x3", "x4"]), 4),
        Scenario::Salary => (names(&["sex", "hours"]), 2),
    };
    let mut values = Vec::with_capacity(n * d);
    let mut y = Vec::with_capacity(n);
    for i in 0..n {
        match spec.scenario {
            Scenario::Interaction2d => {
                let z1 = normal();
                let z2 = normal();
                let x1 = z1;
                let x2 = spec.corr * z1 + (1.0 - spec.corr * spec.corr).sqrt() * z2;
                values.extend([x1, x2]);
                y.push(x1 + x2 + 2.0 * x1 * x2);
            }
            Scenario::Importance4d => {
                let x: [f64; 4] = [normal(), normal(), normal(), normal()];
                values.extend(x);
                y.push(x[0] + x[2] + x[1] * x[2] - 2.0 * x[1] * x[2] * x[3]);
            }
            Scenario::Salary => {
                let sex = (i % 2) as f64;
                let hours = 30.0 + 10.0 * sex + spec.hours_sd * normal();
                values.extend([sex, hours]);
                y.push(hours + 20.0 * sex);
            }
        }
    }
    Ok((Dataset::new(names, values)?, y))
}
