use crate::decompose::ComponentStore;
use crate::error::{Error, Result};
use crate::feature_set::FeatureSet;
use crate::marginalize::marginal_predict;
use crate::model::TreeEnsemble;
use crate::num::Real;

/// Dimension limit for exact subset enumeration.
pub const ORACLE_MAX_D: usize = 20;

/// Per-row Shapley values `φ_k(x_i)` and the shared baseline `φ_0`.
#[derive(Clone, Debug, PartialEq)]
pub struct ShapMatrix<T> {
    pub phi0: T,
    n: usize,
    d: usize,
    values: Vec<T>,
}

impl<T: Real> ShapMatrix<T> {
    pub fn new(phi0: T, n: usize, d: usize, values: Vec<T>) -> Self {
        assert_eq!(values.len(), n * d);
        ShapMatrix { phi0, n, d, values }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.values[i * self.d..(i + 1) * self.d]
    }

    pub fn get(&self, i: usize, k: usize) -> T {
        self.values[i * self.d + k]
    }

    /// `φ_0 + Σ_k φ_k(x_i)`.
    pub fn total(&self, i: usize) -> T {
        self.row(i).iter().fold(self.phi0, |acc, &v| acc + v)
    }
}

/// Shapley values from components: each component is split equally among
/// the features it involves, `φ_k = Σ_{S∋k} m_S / |S|`.
pub fn shap_from_components<T: Real>(store: &ComponentStore<T>) -> ShapMatrix<T> {
    let (n, d) = (store.n(), store.d());
    let mut values = vec![T::zero(); n * d];
    for (s, col) in store.iter() {
        let inv = T::one() / T::lit(s.len() as f64);
        for k in s {
            for (i, &v) in col.iter().enumerate() {
                values[i * d + k] += v * inv;
            }
        }
    }
    ShapMatrix::new(store.intercept(), n, d, values)
}

/// Interventional value function `v(S)`: the prediction at `x` with every
/// feature outside `S` marginalized against the coverage measure.
pub fn value_function<T: Real>(ensemble: &TreeEnsemble<T>, s: FeatureSet, x: &[T]) -> T {
    let mut acc = ensemble.base_offset();
    for tree in ensemble.trees() {
        acc += marginal_predict(tree, tree.features() - s, x);
    }
    acc
}

/// Exact Shapley values at `x` by the weighted subset sum
/// `φ_k = Σ_{S ⊆ D\{k}} |S|!(d-|S|-1)!/d! · (v(S ∪ k) - v(S))`.
///
/// Returns `(φ_0, φ)` with `φ_0 = v(∅)`.
pub fn shap_bruteforce<T: Real>(ensemble: &TreeEnsemble<T>, x: &[T]) -> Result<(T, Vec<T>)> {
    let d = ensemble.d();
    if d > ORACLE_MAX_D {
        return Err(Error::OracleDimension { d, max: ORACLE_MAX_D });
    }
    if x.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: x.len(),
        });
    }
    let v: Vec<T> = (0..1u64 << d)
        .map(|bits| value_function(ensemble, FeatureSet::from_bits(bits), x))
        .collect();
    // |S|!(d-|S|-1)!/d! = 1 / (d · C(d-1, |S|))
    let mut weight = Vec::with_capacity(d);
    let mut binom = 1.0f64;
    for s in 0..d {
        weight.push(T::lit(1.0 / (d as f64 * binom)));
        binom = binom * (d - 1 - s) as f64 / (s + 1) as f64;
    }
    let mut phi = vec![T::zero(); d];
    for bits in 0..1usize << d {
        let size = bits.count_ones() as usize;
        for (k, p) in phi.iter_mut().enumerate() {
            if bits >> k & 1 == 0 {
                *p += weight[size] * (v[bits | 1 << k] - v[bits]);
            }
        }
    }
    Ok((v[0], phi))
}
