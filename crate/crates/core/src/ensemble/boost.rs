use serde::{Deserialize, Serialize};

use super::{substream, Regressor, MODEL_VERSION};
use crate::cart::{grow_tree, GrowConfig, RegressionTree};
use crate::data::Dataset;
use crate::{Error, Result};

/// Stagewise least-squares boosting model: `F0 + lr * sum(stage(x))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoostModel {
    pub version: u32,
    pub seed: u64,
    pub n_features: usize,
    pub initial_value: f64,
    pub learning_rate: f64,
    pub stage_config: GrowConfig,
    pub stages: Vec<RegressionTree>,
}

impl BoostModel {
    /// Stage trees of depth at most 5 with at least 5 rows per leaf.
    pub fn default_stage_config() -> GrowConfig {
        GrowConfig {
            min_leaf: 5,
            max_depth: Some(5),
            mtry: None,
            min_gain: 0.0,
        }
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn n_stages(&self) -> usize {
        self.stages.len()
    }

    pub fn predict(&self, row: &[f64]) -> Result<f64> {
        self.predict_truncated(row, self.stages.len())
    }

    /// Prediction using only the first `k` stages; `k = 0` gives `F0`.
    pub fn predict_truncated(&self, row: &[f64], k: usize) -> Result<f64> {
        if row.len() != self.n_features {
            return Err(Error::Arity {
                expected: self.n_features,
                got: row.len(),
            });
        }
        if k > self.stages.len() {
            return Err(Error::invalid(format!(
                "cannot truncate a {}-stage model to {k} stages",
                self.stages.len()
            )));
        }
        // Same accumulation order as training, so training predictions
        // reproduce bit for bit.
        let mut acc = self.initial_value;
        for stage in &self.stages[..k] {
            acc += self.learning_rate * stage.predict_unchecked(row);
        }
        Ok(acc)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let model: BoostModel = serde_json::from_str(text)?;
        if model.version != MODEL_VERSION {
            return Err(Error::invalid(format!(
                "unsupported model version {}",
                model.version
            )));
        }
        Ok(model)
    }
}

impl Regressor for BoostModel {
    fn n_features(&self) -> usize {
        self.n_features
    }

    fn predict_row(&self, row: &[f64]) -> Result<f64> {
        self.predict(row)
    }
}

/// Fits `k_stages` trees, each to the residuals of the model so far.
pub fn train_lsboost(
    train: &Dataset,
    k_stages: usize,
    learning_rate: f64,
    stage_config: &GrowConfig,
    seed: u64,
) -> Result<BoostModel> {
    if train.is_empty() {
        return Err(Error::invalid("cannot boost on an empty dataset"));
    }
    if !(learning_rate > 0.0 && learning_rate <= 1.0) {
        return Err(Error::invalid(format!(
            "learning rate must lie in (0, 1], got {learning_rate}"
        )));
    }
    stage_config.validate(train.n_features())?;

    let y = train.response();
    let n = train.len();
    let initial_value = y.iter().sum::<f64>() / n as f64;
    let mut fitted = vec![initial_value; n];
    let rows: Vec<usize> = (0..n).collect();
    let mut stages = Vec::with_capacity(k_stages);
    let mut residuals = vec![0.0; n];

    for m in 0..k_stages {
        for i in 0..n {
            residuals[i] = y[i] - fitted[i];
        }
        let mut rng = substream(seed, m as u64);
        let tree = grow_tree(train, &residuals, &rows, stage_config, &mut rng)?;
        let candidate: Vec<f64> = fitted
            .iter()
            .enumerate()
            .map(|(i, f)| f + learning_rate * tree.predict_unchecked(train.row(i)))
            .collect();
        // Zero stage when rounding would raise the training loss.
        if sse(y, &candidate) <= sse(y, &fitted) {
            fitted = candidate;
            stages.push(tree);
        } else {
            stages.push(RegressionTree::constant(train.n_features(), 0.0));
        }
    }

    Ok(BoostModel {
        version: MODEL_VERSION,
        seed,
        n_features: train.n_features(),
        initial_value,
        learning_rate,
        stage_config: *stage_config,
        stages,
    })
}

fn sse(y: &[f64], fitted: &[f64]) -> f64 {
    y.iter().zip(fitted).map(|(y, f)| (y - f).powi(2)).sum()
}

pub fn predict_boost(model: &BoostModel, row: &[f64]) -> Result<f64> {
    model.predict(row)
}
