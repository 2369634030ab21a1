use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{substream, Regressor, MODEL_VERSION};
use crate::cart::{grow_tree, GrowConfig, RegressionTree};
use crate::data::Dataset;
use crate::{Error, Result};

/// One bagged tree with the rows it was grown on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestTree {
    pub tree: RegressionTree,
    /// Bootstrap draw, sorted; repeats allowed.
    pub bag: Vec<u32>,
    /// Training rows absent from `bag`, ascending.
    pub oob: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub version: u32,
    pub seed: u64,
    pub n_features: usize,
    pub n_train: usize,
    /// Grow settings with `mtry` resolved.
    pub grow: GrowConfig,
    pub trees: Vec<ForestTree>,
}

/// Default candidate count per node: a third of the features, rounded up.
pub(crate) fn default_mtry(n_features: usize) -> usize {
    n_features.div_ceil(3).max(1)
}

/// Bags `k_trees` trees. Tree `k` draws its bootstrap sample and its
/// per-node feature subsets from stream `k` of `seed`, so the result does
/// not depend on the rayon thread count.
pub fn train_forest(
    train: &Dataset,
    k_trees: usize,
    config: &GrowConfig,
    seed: u64,
) -> Result<ForestModel> {
    if train.is_empty() {
        return Err(Error::invalid("cannot train a forest on an empty dataset"));
    }
    if k_trees == 0 {
        return Err(Error::invalid("a forest needs at least one tree"));
    }
    let mut grow = *config;
    if grow.mtry.is_none() {
        grow.mtry = Some(default_mtry(train.n_features()));
    }
    grow.validate(train.n_features())?;

    let n = train.len();
    let trees = (0..k_trees)
        .into_par_iter()
        .map(|k| {
            let mut rng = substream(seed, k as u64);
            let mut bag: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
            bag.sort_unstable();
            let tree = grow_tree(train, train.response(), &bag, &grow, &mut rng)?;
            let mut in_bag = vec![false; n];
            for &i in &bag {
                in_bag[i] = true;
            }
            let oob = (0..n).filter(|&i| !in_bag[i]).map(|i| i as u32).collect();
            Ok(ForestTree {
                tree,
                bag: bag.into_iter().map(|i| i as u32).collect(),
                oob,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(ForestModel {
        version: MODEL_VERSION,
        seed,
        n_features: train.n_features(),
        n_train: n,
        grow,
        trees,
    })
}

impl ForestModel {
    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn n_trees(&self) -> usize {
        self.trees.len()
    }

    /// Mean over all trees.
    pub fn predict(&self, row: &[f64]) -> Result<f64> {
        self.predict_truncated(row, self.trees.len())
    }

    /// Mean over the first `k` trees.
    pub fn predict_truncated(&self, row: &[f64], k: usize) -> Result<f64> {
        if row.len() != self.n_features {
            return Err(Error::Arity {
                expected: self.n_features,
                got: row.len(),
            });
        }
        if k == 0 || k > self.trees.len() {
            return Err(Error::invalid(format!(
                "cannot truncate a {}-tree forest to {k} trees",
                self.trees.len()
            )));
        }
        let sum: f64 = self.trees[..k]
            .iter()
            .map(|t| t.tree.predict_unchecked(row))
            .sum();
        Ok(sum / k as f64)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let model: ForestModel = serde_json::from_str(text)?;
        if model.version != MODEL_VERSION {
            return Err(Error::invalid(format!(
                "unsupported model version {}",
                model.version
            )));
        }
        if model.trees.is_empty() {
            return Err(Error::invalid("forest has no trees"));
        }
        Ok(model)
    }
}

impl Regressor for ForestModel {
    fn n_features(&self) -> usize {
        self.n_features
    }

    fn predict_row(&self, row: &[f64]) -> Result<f64> {
        self.predict(row)
    }
}

pub fn predict_forest(model: &ForestModel, row: &[f64]) -> Result<f64> {
    model.predict(row)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{FeatureMeta, ResponseMode};

    fn toy(n: usize) -> Dataset {
        let rows: Vec<Vec<f64>> = (0..n).map(|i| vec![i as f64, (i % 7) as f64]).collect();
        let y = (0..n)
            .map(|i| if i < n / 2 { 1.0 } else { 5.0 } + (i % 3) as f64)
            .collect();
        Dataset::new(
            rows,
            y,
            vec![FeatureMeta::numeric("a"), FeatureMeta::numeric("b")],
            ResponseMode::Rate,
        )
        .unwrap()
    }

    #[test]
    fn constant_response_single_leaf() {
        let d = Dataset::new(
            (0..10).map(|i| vec![i as f64]).collect(),
            vec![4.0; 10],
            vec![FeatureMeta::numeric("x")],
            ResponseMode::Rate,
        )
        .unwrap();
        let m = train_forest(&d, 1, &GrowConfig::default(), 3).unwrap();
        assert_eq!(m.trees[0].tree.nodes().len(), 1);
        assert_eq!(m.predict(&[2.0]).unwrap(), 4.0);
    }

    #[test]
    fn deterministic_bytes() {
        let d = toy(60);
        let a = train_forest(&d, 10, &GrowConfig::default(), 5)
            .unwrap()
            .to_json()
            .unwrap();
        let b = train_forest(&d, 10, &GrowConfig::default(), 5)
            .unwrap()
            .to_json()
            .unwrap();
        assert_eq!(a, b);
        let c = train_forest(&d, 10, &GrowConfig::default(), 6)
            .unwrap()
            .to_json()
            .unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn bag_and_oob_cover_rows() {
        let d = toy(50);
        let m = train_forest(&d, 5, &GrowConfig::default(), 1).unwrap();
        for t in &m.trees {
            assert_eq!(t.bag.len(), 50);
            let mut all: Vec<u32> = t.bag.clone();
            all.extend(&t.oob);
            all.sort_unstable();
            all.dedup();
            assert_eq!(all, (0..50).collect::<Vec<u32>>());
            assert!(t.oob.iter().all(|i| t.bag.binary_search(i).is_err()));
        }
    }

    #[test]
    fn averages_trees() {
        let mut m = train_forest(&toy(20), 3, &GrowConfig::default(), 1).unwrap();
        for (t, v) in m.trees.iter_mut().zip([1.0, 2.0, 6.0]) {
            t.tree = RegressionTree::constant(2, v);
        }
        assert_eq!(m.predict(&[0.0, 0.0]).unwrap(), 3.0);
        assert_eq!(m.predict_truncated(&[0.0, 0.0], 2).unwrap(), 1.5);
        assert!(m.predict(&[0.0]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let m = train_forest(&toy(30), 4, &GrowConfig::default(), 8).unwrap();
        let back = ForestModel::from_json(&m.to_json().unwrap()).unwrap();
        assert_eq!(back, m);
    }
}
