//! Tree ensembles built on [`crate::cart`].

mod boost;
mod forest;
mod importance;
mod sensitivity;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use boost::{predict_boost, train_lsboost, BoostModel};
pub use forest::{predict_forest, train_forest, ForestModel, ForestTree};
pub use importance::{boost_importance, variable_importance, FeatureImportance, ImportanceReport};
pub use sensitivity::{
    boost_curve, forest_curve, sensitivity_curve, FamilyConfig, SensitivityCurve, SensitivityPoint,
};

use crate::{Error, Result};

/// Version of the model JSON layout.
pub const MODEL_VERSION: u32 = 1;

/// Independent random stream `stream` under `seed`. Streams are keyed by
/// counter, so tree `k` sees the same randomness however trees are
/// scheduled.
pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Forest,
    Boost,
}

impl Family {
    pub fn label(self) -> &'static str {
        match self {
            Family::Forest => "RF",
            Family::Boost => "LSBoost",
        }
    }
}

/// Anything that maps a feature row to a prediction.
pub trait Regressor: Sync {
    fn n_features(&self) -> usize;

    fn predict_row(&self, row: &[f64]) -> Result<f64>;

    fn predict_rows(&self, rows: &[Vec<f64>]) -> Result<Vec<f64>> {
        if let Some(bad) = rows.iter().find(|r| r.len() != self.n_features()) {
            return Err(Error::Arity {
                expected: self.n_features(),
                got: bad.len(),
            });
        }
        rows.par_iter().map(|r| self.predict_row(r)).collect()
    }
}

/// A trained model of either family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FittedModel {
    Forest(ForestModel),
    Boost(BoostModel),
}

impl FittedModel {
    pub fn family(&self) -> Family {
        match self {
            FittedModel::Forest(_) => Family::Forest,
            FittedModel::Boost(_) => Family::Boost,
        }
    }
}

impl Regressor for FittedModel {
    fn n_features(&self) -> usize {
        match self {
            FittedModel::Forest(m) => m.n_features(),
            FittedModel::Boost(m) => m.n_features(),
        }
    }

    fn predict_row(&self, row: &[f64]) -> Result<f64> {
        match self {
            FittedModel::Forest(m) => m.predict(row),
            FittedModel::Boost(m) => m.predict(row),
        }
    }
}
