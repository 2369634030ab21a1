//! Test error as a function of ensemble size.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{train_forest, train_lsboost, BoostModel, Family, ForestModel};
use crate::cart::GrowConfig;
use crate::data::Dataset;
use crate::metrics::{mae, mse};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensitivityPoint {
    pub trees: usize,
    pub mae: f64,
    pub mse: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityCurve {
    pub family: Family,
    pub points: Vec<SensitivityPoint>,
}

/// Settings for training one family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FamilyConfig {
    Forest {
        grow: GrowConfig,
    },
    Boost {
        grow: GrowConfig,
        learning_rate: f64,
    },
}

fn check_counts(tree_counts: &[usize], available: usize) -> Result<()> {
    if tree_counts.is_empty() {
        return Err(Error::invalid("tree counts must be non-empty"));
    }
    if tree_counts[0] == 0 || tree_counts.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid(
            "tree counts must be positive and strictly increasing",
        ));
    }
    if *tree_counts.last().unwrap() > available {
        return Err(Error::invalid(format!(
            "model has {available} members, curve asks for {}",
            tree_counts.last().unwrap()
        )));
    }
    Ok(())
}

/// Trains once at the largest count and scores truncated ensembles.
pub fn sensitivity_curve(
    train: &Dataset,
    test: &Dataset,
    family: &FamilyConfig,
    tree_counts: &[usize],
    seed: u64,
) -> Result<SensitivityCurve> {
    check_counts(tree_counts, usize::MAX)?;
    let k = *tree_counts.last().unwrap();
    match family {
        FamilyConfig::Forest { grow } => {
            forest_curve(&train_forest(train, k, grow, seed)?, test, tree_counts)
        }
        FamilyConfig::Boost {
            grow,
            learning_rate,
        } => boost_curve(
            &train_lsboost(train, k, *learning_rate, grow, seed)?,
            test,
            tree_counts,
        ),
    }
}

pub fn forest_curve(
    model: &ForestModel,
    test: &Dataset,
    tree_counts: &[usize],
) -> Result<SensitivityCurve> {
    check_counts(tree_counts, model.n_trees())?;
    if test.n_features() != model.n_features {
        return Err(Error::Arity {
            expected: model.n_features,
            got: test.n_features(),
        });
    }
    // Running sums over trees, one column per test row.
    let per_tree: Vec<Vec<f64>> = model.trees[..*tree_counts.last().unwrap()]
        .par_iter()
        .map(|t| {
            test.rows()
                .iter()
                .map(|r| t.tree.predict_unchecked(r))
                .collect()
        })
        .collect();
    let mut sums = vec![0.0; test.len()];
    let mut points = Vec::with_capacity(tree_counts.len());
    let mut next = 0;
    for (k, preds) in per_tree.iter().enumerate() {
        for (s, p) in sums.iter_mut().zip(preds) {
            *s += p;
        }
        if k + 1 == tree_counts[next] {
            let avg: Vec<f64> = sums.iter().map(|s| s / (k + 1) as f64).collect();
            points.push(SensitivityPoint {
                trees: k + 1,
                mae: mae(test.response(), &avg)?,
                mse: mse(test.response(), &avg)?,
            });
            next += 1;
        }
    }
    Ok(SensitivityCurve {
        family: Family::Forest,
        points,
    })
}

pub fn boost_curve(
    model: &BoostModel,
    test: &Dataset,
    tree_counts: &[usize],
) -> Result<SensitivityCurve> {
    check_counts(tree_counts, model.n_stages())?;
    if test.n_features() != model.n_features {
        return Err(Error::Arity {
            expected: model.n_features,
            got: test.n_features(),
        });
    }
    let mut acc = vec![model.initial_value; test.len()];
    let mut points = Vec::with_capacity(tree_counts.len());
    let mut next = 0;
    for (k, stage) in model.stages[..*tree_counts.last().unwrap()]
        .iter()
        .enumerate()
    {
        for (a, r) in acc.iter_mut().zip(test.rows()) {
            *a += model.learning_rate * stage.predict_unchecked(r);
        }
        if k + 1 == tree_counts[next] {
            points.push(SensitivityPoint {
                trees: k + 1,
                mae: mae(test.response(), &acc)?,
                mse: mse(test.response(), &acc)?,
            });
            next += 1;
        }
    }
    Ok(SensitivityCurve {
        family: Family::Boost,
        points,
    })
}
