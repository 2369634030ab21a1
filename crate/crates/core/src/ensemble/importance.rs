//! Permutation and node-purity variable importance.

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{substream, BoostModel, Family, ForestModel};
use crate::data::Dataset;
use crate::{Error, Result, SCHEMA_VERSION};

/// Permutation repeats used for boosting models, which have no oob rows.
const BOOST_REPEATS: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureImportance {
    pub name: String,
    /// Mean MSE increase after permuting the feature, as a percentage of
    /// the mean baseline MSE.
    pub pct_inc_mse: f64,
    /// Standard error of `pct_inc_mse` across trees (or repeats).
    pub std_error: f64,
    /// Ranks the permutation measure. For forests this is
    /// `pct_inc_mse / std_error` when defined; otherwise `pct_inc_mse`.
    pub permutation_score: f64,
    /// Total split gain on the feature, averaged over trees.
    pub purity: f64,
    /// `purity` as a fraction of the total over features.
    pub purity_share: f64,
    pub permutation_rank: usize,
    pub purity_rank: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceReport {
    pub schema_version: u32,
    pub family: Family,
    pub features: Vec<FeatureImportance>,
    /// Feature names, most important first.
    pub permutation_order: Vec<String>,
    pub purity_order: Vec<String>,
}

impl ImportanceReport {
    pub fn get(&self, name: &str) -> Option<&FeatureImportance> {
        self.features.iter().find(|f| f.name == name)
    }
}

/// Importance of every feature of a trained forest.
///
/// The permutation measure shuffles one feature within each tree's
/// out-of-bag rows and records the rise in that tree's oob MSE. The purity
/// measure sums split gains per feature.
pub fn variable_importance(
    model: &ForestModel,
    train: &Dataset,
    seed: u64,
) -> Result<ImportanceReport> {
    check_data(model.n_features, model.n_train, train)?;
    if let Some(k) = model.trees.iter().position(|t| t.oob.is_empty()) {
        return Err(Error::invalid(format!(
            "tree {k} has no out-of-bag rows; use more training rows or more trees"
        )));
    }
    let p = model.n_features;

    // (baseline mse, per-feature mse increase) per tree
    let per_tree: Vec<(f64, Vec<f64>)> = model
        .trees
        .par_iter()
        .enumerate()
        .map(|(k, t)| {
            let oob: Vec<usize> = t.oob.iter().map(|&i| i as usize).collect();
            let y = train.response();
            let mse_of = |pred: &dyn Fn(usize) -> f64| {
                oob.iter().map(|&i| (y[i] - pred(i)).powi(2)).sum::<f64>() / oob.len() as f64
            };
            let baseline = mse_of(&|i| t.tree.predict_unchecked(train.row(i)));
            let mut row = vec![0.0; p];
            let increases = (0..p)
                .map(|j| {
                    let mut donors = oob.clone();
                    donors.shuffle(&mut substream(seed, (k * p + j) as u64));
                    let sse: f64 = oob
                        .iter()
                        .zip(&donors)
                        .map(|(&i, &d)| {
                            row.copy_from_slice(train.row(i));
                            row[j] = train.row(d)[j];
                            (y[i] - t.tree.predict_unchecked(&row)).powi(2)
                        })
                        .sum();
                    sse / oob.len() as f64 - baseline
                })
                .collect();
            (baseline, increases)
        })
        .collect();

    let baselines: Vec<f64> = per_tree.iter().map(|(b, _)| *b).collect();
    let increases: Vec<Vec<f64>> = per_tree.into_iter().map(|(_, inc)| inc).collect();

    let mut purity = vec![0.0; p];
    for t in &model.trees {
        for (acc, g) in purity.iter_mut().zip(t.tree.gain_by_feature()) {
            *acc += g;
        }
    }
    let k = model.trees.len() as f64;
    purity.iter_mut().for_each(|v| *v /= k);

    Ok(assemble(
        Family::Forest,
        train,
        &baselines,
        &increases,
        purity,
        true,
    ))
}

/// Importance for a boosting model. The permutation measure shuffles each
/// feature over the rows of `data` several times and ranks by the mean
/// percent increase; purity sums stage split gains, averaged over stages.
pub fn boost_importance(model: &BoostModel, data: &Dataset, seed: u64) -> Result<ImportanceReport> {
    check_data(model.n_features, data.len(), data)?;
    let p = model.n_features;
    let y = data.response();
    let n = data.len();
    let mse = |preds: &[f64]| {
        preds
            .iter()
            .zip(y)
            .map(|(f, t)| (t - f).powi(2))
            .sum::<f64>()
            / n as f64
    };

    let base_preds: Vec<f64> = (0..n)
        .map(|i| model.predict(data.row(i)))
        .collect::<Result<_>>()?;
    let baseline = mse(&base_preds);

    let repeats: Vec<Vec<f64>> = (0..BOOST_REPEATS)
        .into_par_iter()
        .map(|r| {
            let mut row = vec![0.0; p];
            (0..p)
                .map(|j| {
                    let mut donors: Vec<usize> = (0..n).collect();
                    donors.shuffle(&mut substream(seed, (r * p + j) as u64));
                    let preds: Vec<f64> = (0..n)
                        .map(|i| {
                            row.copy_from_slice(data.row(i));
                            row[j] = data.row(donors[i])[j];
                            model.predict(&row).expect("arity checked")
                        })
                        .collect();
                    mse(&preds) - baseline
                })
                .collect()
        })
        .collect();

    let mut purity = vec![0.0; p];
    for stage in &model.stages {
        for (acc, g) in purity.iter_mut().zip(stage.gain_by_feature()) {
            *acc += g;
        }
    }
    if !model.stages.is_empty() {
        let k = model.stages.len() as f64;
        purity.iter_mut().for_each(|v| *v /= k);
    }

    Ok(assemble(
        Family::Boost,
        data,
        &[baseline; BOOST_REPEATS],
        &repeats,
        purity,
        false,
    ))
}

fn check_data(n_features: usize, n_rows: usize, data: &Dataset) -> Result<()> {
    if data.n_features() != n_features {
        return Err(Error::Arity {
            expected: n_features,
            got: data.n_features(),
        });
    }
    if data.len() != n_rows {
        return Err(Error::invalid(format!(
            "model was trained on {n_rows} rows, dataset has {}",
            data.len()
        )));
    }
    Ok(())
}

fn assemble(
    family: Family,
    data: &Dataset,
    baselines: &[f64],
    increases: &[Vec<f64>],
    purity: Vec<f64>,
    standardize: bool,
) -> ImportanceReport {
    let p = data.n_features();
    let reps = increases.len();
    let mean_baseline = baselines.iter().sum::<f64>() / reps as f64;
    let names = data.feature_names();
    let total_purity: f64 = purity.iter().sum();

    let mut features: Vec<FeatureImportance> = (0..p)
        .map(|j| {
            let pct: Vec<f64> = increases
                .iter()
                .map(|inc| {
                    if mean_baseline > 0.0 {
                        100.0 * inc[j] / mean_baseline
                    } else {
                        0.0
                    }
                })
                .collect();
            let mean = pct.iter().sum::<f64>() / reps as f64;
            let std_error = if reps >= 2 {
                let var = pct.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (reps - 1) as f64;
                (var / reps as f64).sqrt()
            } else {
                0.0
            };
            let permutation_score = if standardize && reps >= 2 && std_error > 0.0 {
                mean / std_error
            } else {
                mean
            };
            FeatureImportance {
                name: names[j].clone(),
                pct_inc_mse: mean,
                std_error,
                permutation_score,
                purity: purity[j],
                purity_share: if total_purity > 0.0 {
                    purity[j] / total_purity
                } else {
                    0.0
                },
                permutation_rank: 0,
                purity_rank: 0,
            }
        })
        .collect();

    let order_by = |key: &dyn Fn(&FeatureImportance) -> f64| -> Vec<usize> {
        let mut idx: Vec<usize> = (0..p).collect();
        idx.sort_by(|&a, &b| {
            key(&features[b])
                .total_cmp(&key(&features[a]))
                .then(a.cmp(&b))
        });
        idx
    };
    let perm_order = order_by(&|f| f.permutation_score);
    let purity_order = order_by(&|f| f.purity);
    for (rank, &j) in perm_order.iter().enumerate() {
        features[j].permutation_rank = rank + 1;
    }
    for (rank, &j) in purity_order.iter().enumerate() {
        features[j].purity_rank = rank + 1;
    }

    ImportanceReport {
        schema_version: SCHEMA_VERSION,
        family,
        permutation_order: perm_order.iter().map(|&j| names[j].clone()).collect(),
        purity_order: purity_order.iter().map(|&j| names[j].clone()).collect(),
        features,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cart::GrowConfig;
    use crate::data::{FeatureMeta, ResponseMode};
    use crate::ensemble::{train_forest, train_lsboost};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn signal_plus_noise(n: usize, seed: u64) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..3).map(|_| rng.random::<f64>()).collect())
            .collect();
        let y = rows
            .iter()
            .map(|r| 10.0 * r[1] + rng.random::<f64>())
            .collect();
        Dataset::new(
            rows,
            y,
            vec![
                FeatureMeta::numeric("a"),
                FeatureMeta::numeric("b"),
                FeatureMeta::numeric("c"),
            ],
            ResponseMode::Rate,
        )
        .unwrap()
    }

    #[test]
    fn single_feature_holds_all_purity() {
        let d = Dataset::new(
            (0..40).map(|i| vec![i as f64]).collect(),
            (0..40).map(|i| (i / 10) as f64).collect(),
            vec![FeatureMeta::numeric("x")],
            ResponseMode::Rate,
        )
        .unwrap();
        let m = train_forest(&d, 20, &GrowConfig::default(), 2).unwrap();
        let r = variable_importance(&m, &d, 2).unwrap();
        assert_eq!(r.features[0].purity_share, 1.0);
        assert!(r.features[0].purity > 0.0);
    }

    #[test]
    fn unused_feature_scores_zero() {
        let d = signal_plus_noise(150, 4);
        // Only feature b is ever offered to the trees.
        let rows: Vec<Vec<f64>> = d.rows().iter().map(|r| vec![r[1], 0.0]).collect();
        let d2 = Dataset::new(
            rows,
            d.response().to_vec(),
            vec![FeatureMeta::numeric("b"), FeatureMeta::numeric("constant")],
            ResponseMode::Rate,
        )
        .unwrap();
        let m = train_forest(&d2, 30, &GrowConfig::default(), 1).unwrap();
        let r = variable_importance(&m, &d2, 9).unwrap();
        let unused = r.get("constant").unwrap();
        assert_eq!(unused.purity, 0.0);
        assert_eq!(unused.pct_inc_mse, 0.0);
        assert_eq!(r.permutation_order[0], "b");
    }

    #[test]
    fn signal_feature_ranks_first() {
        let d = signal_plus_noise(200, 8);
        let m = train_forest(&d, 50, &GrowConfig::default(), 3).unwrap();
        let r = variable_importance(&m, &d, 3).unwrap();
        assert_eq!(r.permutation_order[0], "b");
        assert_eq!(r.purity_order[0], "b");
        assert_eq!(r.get("b").unwrap().permutation_rank, 1);

        let b = train_lsboost(
            &d,
            30,
            0.5,
            &crate::ensemble::BoostModel::default_stage_config(),
            0,
        )
        .unwrap();
        let rb = boost_importance(&b, &d, 1).unwrap();
        assert_eq!(rb.permutation_order[0], "b");
        assert_eq!(rb.purity_order[0], "b");
    }

    #[test]
    fn empty_oob_is_error() {
        let d = signal_plus_noise(2, 1);
        let m = (0..200)
            .map(|s| train_forest(&d, 1, &GrowConfig::default(), s).unwrap())
            .find(|m| m.trees[0].oob.is_empty())
            .expect("some seed bags both rows");
        assert!(variable_importance(&m, &d, 0).is_err());
    }
}
