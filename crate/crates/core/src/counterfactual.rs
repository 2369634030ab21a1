//! Lane-width what-if simulation.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cart::GrowConfig;
use crate::data::{
    make_dataset, split_indices, AggregatedSection, Dataset, DatasetOptions, ResponseMode,
};
use crate::ensemble::{train_forest, train_lsboost, BoostModel, Family, FittedModel, Regressor};
use crate::stats::{
    boxplot_summary, kruskal_wallis, nemenyi, percent_changes, GroupSummary, KruskalWallisResult,
    PairwiseMatrix, PercentChangeTable,
};
use crate::{Error, Result, SCHEMA_VERSION};

pub const LANE_WIDTH: &str = "lane_width";
pub const DEFAULT_WIDTHS: [u32; 4] = [9, 10, 11, 12];

/// Every original row repeated once per lane width.
#[derive(Debug, Clone, PartialEq)]
pub struct CounterfactualDataset {
    pub rows: Vec<Vec<f64>>,
    /// `(original row, lane width)` for each expanded row.
    pub provenance: Vec<(usize, u32)>,
    pub widths: Vec<u32>,
    pub lane_feature: usize,
    pub n_original: usize,
    pub mode: ResponseMode,
}

impl CounterfactualDataset {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

fn check_widths(widths: &[u32]) -> Result<Vec<u32>> {
    if widths.is_empty() {
        return Err(Error::invalid("at least one lane width is required"));
    }
    let mut sorted = widths.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != widths.len() {
        return Err(Error::invalid("lane widths must be distinct"));
    }
    if sorted[0] == 0 {
        return Err(Error::invalid("lane widths must be positive"));
    }
    Ok(sorted)
}

/// Row-major product of rows and widths (ascending), with the lane-width
/// column overwritten.
pub fn expand_lane_widths(dataset: &Dataset, widths: &[u32]) -> Result<CounterfactualDataset> {
    if dataset.is_empty() {
        return Err(Error::invalid("cannot expand an empty dataset"));
    }
    let widths = check_widths(widths)?;
    let lane_feature = dataset
        .feature_index(LANE_WIDTH)
        .ok_or_else(|| Error::invalid(format!("dataset has no `{LANE_WIDTH}` feature to vary")))?;
    let mut rows = Vec::with_capacity(dataset.len() * widths.len());
    let mut provenance = Vec::with_capacity(rows.capacity());
    for (i, row) in dataset.rows().iter().enumerate() {
        for &w in &widths {
            let mut r = row.clone();
            r[lane_feature] = w as f64;
            rows.push(r);
            provenance.push((i, w));
        }
    }
    Ok(CounterfactualDataset {
        rows,
        provenance,
        widths,
        lane_feature,
        n_original: dataset.len(),
        mode: dataset.mode(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WidthGroup {
    pub width: u32,
    pub summary: GroupSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectReport {
    pub schema_version: u32,
    pub response_mode: ResponseMode,
    pub response_label: String,
    pub family: Option<Family>,
    pub n_features: usize,
    pub widths: Vec<u32>,
    pub groups: Vec<WidthGroup>,
    /// Mean prediction per width.
    pub marginal_means: BTreeMap<u32, f64>,
    /// Mean over every expanded prediction.
    pub grand_mean: f64,
    pub percent_changes: Option<PercentChangeTable>,
    pub kruskal_wallis: Option<KruskalWallisResult>,
    pub nemenyi: Option<PairwiseMatrix>,
    pub note: Option<String>,
}

impl EffectReport {
    /// Widths ordered by marginal mean, highest first.
    pub fn ordering(&self) -> Vec<u32> {
        let mut w: Vec<u32> = self.widths.clone();
        w.sort_by(|a, b| {
            self.marginal_means[b]
                .total_cmp(&self.marginal_means[a])
                .then(a.cmp(b))
        });
        w
    }

    pub fn boxplot_csv(&self) -> String {
        let mut out = String::from(
            "lane_width,n,mean,min,q1,median,q3,max,whisker_low,whisker_high,outliers\n",
        );
        for g in &self.groups {
            let s = &g.summary;
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{}\n",
                g.width,
                s.n,
                s.mean,
                s.min,
                s.q1,
                s.median,
                s.q3,
                s.max,
                s.whisker_low,
                s.whisker_high,
                s.outliers.len()
            ));
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

pub fn width_label(w: u32) -> String {
    format!("{w} ft")
}

/// Predicts every expanded row and assembles group summaries, percent
/// changes and the rank tests over the width groups.
pub fn simulate_effect<M: Regressor + ?Sized>(
    model: &M,
    expanded: &CounterfactualDataset,
) -> Result<EffectReport> {
    if expanded.widths.len() < 2 {
        return Err(Error::invalid(
            "effect simulation needs at least 2 lane widths",
        ));
    }
    let preds = model.predict_rows(&expanded.rows)?;
    let k = expanded.widths.len();
    let mut by_width: Vec<Vec<f64>> = vec![Vec::with_capacity(expanded.n_original); k];
    for (i, p) in preds.iter().enumerate() {
        by_width[i % k].push(*p);
    }

    let groups = expanded
        .widths
        .iter()
        .zip(&by_width)
        .map(|(&width, values)| {
            Ok(WidthGroup {
                width,
                summary: boxplot_summary(values)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let marginal_means: BTreeMap<u32, f64> =
        groups.iter().map(|g| (g.width, g.summary.mean)).collect();
    let grand_mean = preds.iter().sum::<f64>() / preds.len() as f64;

    let degenerate = preds.iter().all(|&p| p == preds[0]);
    let (percent, kw, pairwise, note) = if degenerate {
        let percent = if grand_mean > 0.0 {
            Some(percent_changes(&marginal_means, grand_mean)?)
        } else {
            None
        };
        let note = "no detectable effect: every simulated prediction is identical, so the rank tests are undefined";
        (percent, None, None, Some(note.to_string()))
    } else {
        let labels = expanded.widths.iter().map(|&w| width_label(w)).collect();
        (
            Some(percent_changes(&marginal_means, grand_mean)?),
            Some(kruskal_wallis(&by_width)?),
            Some(nemenyi(&by_width)?.with_labels(labels)),
            None,
        )
    };

    Ok(EffectReport {
        schema_version: SCHEMA_VERSION,
        response_mode: expanded.mode,
        response_label: expanded.mode.label().to_string(),
        family: None,
        n_features: model.n_features(),
        widths: expanded.widths.clone(),
        groups,
        marginal_means,
        grand_mean,
        percent_changes: percent,
        kruskal_wallis: kw,
        nemenyi: pairwise,
        note,
    })
}

/// Training settings shared by both response modes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSettings {
    pub train_fraction: f64,
    pub n_trees: usize,
    pub forest: GrowConfig,
    pub boost: GrowConfig,
    pub learning_rate: f64,
}

impl Default for ModelSettings {
    fn default() -> Self {
        ModelSettings {
            train_fraction: 0.8,
            n_trees: 200,
            forest: GrowConfig::default(),
            boost: BoostModel::default_stage_config(),
            learning_rate: 1.0,
        }
    }
}

pub fn fit_family(
    train: &Dataset,
    family: Family,
    settings: &ModelSettings,
    seed: u64,
) -> Result<FittedModel> {
    Ok(match family {
        Family::Forest => FittedModel::Forest(train_forest(
            train,
            settings.n_trees,
            &settings.forest,
            seed,
        )?),
        Family::Boost => FittedModel::Boost(train_lsboost(
            train,
            settings.n_trees,
            settings.learning_rate,
            &settings.boost,
            seed,
        )?),
    })
}

/// Repeats the lane-width simulation with the mean crash count as the
/// response and the exposure columns as extra predictors. The model is fit
/// on the training split and the simulation runs over every section.
pub fn counts_mode_replication(
    sections: &[AggregatedSection],
    options: &DatasetOptions,
    settings: &ModelSettings,
    widths: &[u32],
    family: Family,
    seed: u64,
) -> Result<EffectReport> {
    let options = DatasetOptions {
        mode: ResponseMode::Counts,
        ..options.clone()
    };
    let data = make_dataset(sections, &options)?;
    let (train_idx, _) = split_indices(data.len(), settings.train_fraction, seed)?;
    let model = fit_family(
        &data.subset(&train_idx),
        family,
        settings,
        seed.wrapping_add(1),
    )?;
    let mut report = simulate_effect(&model, &expand_lane_widths(&data, widths)?)?;
    report.family = Some(family);
    Ok(report)
}
