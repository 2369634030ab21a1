use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::rate::{crash_rate, RateParameters};
use super::record::AggregatedSection;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResponseMode {
    /// Exposure-normalized crash rate.
    Rate,
    /// Mean yearly crash count.
    Counts,
}

impl ResponseMode {
    pub fn label(self) -> &'static str {
        match self {
            ResponseMode::Rate => "crash rate",
            ResponseMode::Counts => "crash count",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FeatureKind {
    Numeric,
    /// Values are indices into `levels`.
    Categorical {
        levels: Vec<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMeta {
    pub name: String,
    #[serde(flatten)]
    pub kind: FeatureKind,
}

impl FeatureMeta {
    pub fn numeric(name: impl Into<String>) -> Self {
        FeatureMeta {
            name: name.into(),
            kind: FeatureKind::Numeric,
        }
    }

    pub fn categorical(name: impl Into<String>, levels: Vec<String>) -> Self {
        FeatureMeta {
            name: name.into(),
            kind: FeatureKind::Categorical { levels },
        }
    }

    pub fn is_categorical(&self) -> bool {
        matches!(self.kind, FeatureKind::Categorical { .. })
    }
}

/// Feature matrix, response and per-column metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    rows: Vec<Vec<f64>>,
    response: Vec<f64>,
    features: Vec<FeatureMeta>,
    mode: ResponseMode,
}

impl Dataset {
    pub fn new(
        rows: Vec<Vec<f64>>,
        response: Vec<f64>,
        features: Vec<FeatureMeta>,
        mode: ResponseMode,
    ) -> Result<Self> {
        if rows.len() != response.len() {
            return Err(Error::invalid(format!(
                "{} rows but {} responses",
                rows.len(),
                response.len()
            )));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != features.len() {
                return Err(Error::Arity {
                    expected: features.len(),
                    got: row.len(),
                });
            }
            for (value, meta) in row.iter().zip(&features) {
                let ok = match &meta.kind {
                    FeatureKind::Numeric => value.is_finite(),
                    FeatureKind::Categorical { levels } => {
                        value.fract() == 0.0 && *value >= 0.0 && (*value as usize) < levels.len()
                    }
                };
                if !ok {
                    return Err(Error::invalid(format!(
                        "row {i}: bad value {value} for feature `{}`",
                        meta.name
                    )));
                }
            }
        }
        if let Some(bad) = response.iter().find(|y| !(y.is_finite() && **y >= 0.0)) {
            return Err(Error::invalid(format!(
                "response values must be finite and >= 0, got {bad}"
            )));
        }
        Ok(Dataset {
            rows,
            response,
            features,
            mode,
        })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.features.len()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i]
    }

    pub fn response(&self) -> &[f64] {
        &self.response
    }

    pub fn features(&self) -> &[FeatureMeta] {
        &self.features
    }

    pub fn mode(&self) -> ResponseMode {
        self.mode
    }

    pub fn feature_index(&self, name: &str) -> Option<usize> {
        self.features.iter().position(|f| f.name == name)
    }

    pub fn feature_names(&self) -> Vec<String> {
        self.features.iter().map(|f| f.name.clone()).collect()
    }

    /// Rows at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            response: indices.iter().map(|&i| self.response[i]).collect(),
            features: self.features.clone(),
            mode: self.mode,
        }
    }
}

/// Predictor columns available from an aggregated section.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Feature {
    SectionLength,
    Shoulder,
    SpeedLimit,
    OnStreetParking,
    OneWay,
    NumLanes,
    RoadClass,
    Median,
    LaneWidth,
    Cbd,
    AadtPerLane,
}

impl Feature {
    pub const RATE_SET: [Feature; 8] = [
        Feature::Shoulder,
        Feature::SpeedLimit,
        Feature::OnStreetParking,
        Feature::OneWay,
        Feature::RoadClass,
        Feature::Median,
        Feature::LaneWidth,
        Feature::Cbd,
    ];

    pub const COUNTS_SET: [Feature; 11] = [
        Feature::SectionLength,
        Feature::Shoulder,
        Feature::SpeedLimit,
        Feature::OnStreetParking,
        Feature::OneWay,
        Feature::NumLanes,
        Feature::RoadClass,
        Feature::Median,
        Feature::LaneWidth,
        Feature::Cbd,
        Feature::AadtPerLane,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Feature::SectionLength => "section_length",
            Feature::Shoulder => "shoulder",
            Feature::SpeedLimit => "speed_limit",
            Feature::OnStreetParking => "on_street_parking",
            Feature::OneWay => "one_way",
            Feature::NumLanes => "num_lanes",
            Feature::RoadClass => "road_class",
            Feature::Median => "median",
            Feature::LaneWidth => "lane_width",
            Feature::Cbd => "cbd",
            Feature::AadtPerLane => "aadt_per_lane",
        }
    }

    pub fn default_set(mode: ResponseMode) -> &'static [Feature] {
        match mode {
            ResponseMode::Rate => &Self::RATE_SET,
            ResponseMode::Counts => &Self::COUNTS_SET,
        }
    }

    fn value(self, s: &AggregatedSection, levels: &[String]) -> f64 {
        let a = &s.attributes;
        let bit = |b: bool| if b { 1.0 } else { 0.0 };
        match self {
            Feature::SectionLength => a.section_length,
            Feature::Shoulder => bit(a.shoulder),
            Feature::SpeedLimit => a.speed_limit,
            Feature::OnStreetParking => bit(a.on_street_parking),
            Feature::OneWay => bit(a.one_way),
            Feature::NumLanes => a.num_lanes as f64,
            Feature::RoadClass => levels
                .iter()
                .position(|l| *l == a.road_class)
                .expect("level table built from the same sections")
                as f64,
            Feature::Median => bit(a.median),
            Feature::LaneWidth => a.lane_width,
            Feature::Cbd => bit(a.cbd),
            Feature::AadtPerLane => s.aadt_per_lane,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetOptions {
    pub mode: ResponseMode,
    pub rate: RateParameters,
    /// Overrides the mode's default predictor set.
    pub features: Option<Vec<Feature>>,
}

impl DatasetOptions {
    pub fn new(mode: ResponseMode) -> Self {
        DatasetOptions {
            mode,
            rate: RateParameters::default(),
            features: None,
        }
    }
}

/// Builds the model-ready dataset: rate mode responds with the crash rate,
/// counts mode with the mean crash count plus the exposure columns as
/// predictors.
pub fn make_dataset(sections: &[AggregatedSection], options: &DatasetOptions) -> Result<Dataset> {
    if sections.is_empty() {
        return Err(Error::invalid("no sections to build a dataset from"));
    }
    let features: Vec<Feature> = match &options.features {
        Some(list) => {
            let unique: BTreeSet<_> = list.iter().collect();
            if list.is_empty() || unique.len() != list.len() {
                return Err(Error::Config(
                    "feature override must be non-empty and free of repeats".into(),
                ));
            }
            list.clone()
        }
        None => Feature::default_set(options.mode).to_vec(),
    };

    let levels: Vec<String> = sections
        .iter()
        .map(|s| s.attributes.road_class.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();

    let meta = features
        .iter()
        .map(|f| match f {
            Feature::RoadClass => FeatureMeta::categorical(f.name(), levels.clone()),
            _ => FeatureMeta::numeric(f.name()),
        })
        .collect();

    let rows = sections
        .iter()
        .map(|s| features.iter().map(|f| f.value(s, &levels)).collect())
        .collect();

    let response = sections
        .iter()
        .map(|s| match options.mode {
            ResponseMode::Rate => crash_rate(
                s.crash_count,
                s.attributes.section_length,
                s.attributes.num_lanes,
                s.aadt_per_lane,
                &options.rate,
            ),
            ResponseMode::Counts => Ok(s.crash_count),
        })
        .collect::<Result<Vec<_>>>()?;

    Dataset::new(rows, response, meta, options.mode)
}

/// Shuffled train/test index split; both halves are returned sorted.
pub fn split_indices(n: usize, train_fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if n < 2 {
        return Err(Error::invalid("need at least 2 rows to split"));
    }
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::invalid(format!(
            "train fraction must lie in (0, 1), got {train_fraction}"
        )));
    }
    let n_train = ((train_fraction * n as f64).round() as usize).clamp(1, n - 1);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut train = order[..n_train].to_vec();
    let mut test = order[n_train..].to_vec();
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

pub fn train_test_split(
    dataset: &Dataset,
    train_fraction: f64,
    seed: u64,
) -> Result<(Dataset, Dataset)> {
    let (train, test) = split_indices(dataset.len(), train_fraction, seed)?;
    Ok((dataset.subset(&train), dataset.subset(&test)))
}
