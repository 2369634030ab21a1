//! Run configuration and the `generate` / `run` commands.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cart::GrowConfig;
use crate::counterfactual::{
    counts_mode_replication, expand_lane_widths, fit_family, simulate_effect, EffectReport,
    ModelSettings, DEFAULT_WIDTHS,
};
use crate::data::{
    aggregate_sections, generate_synthetic_with_truth, ingest_csv, make_dataset, split_indices,
    write_csv, ColumnMap, DatasetOptions, Feature, IngestionReport, RateParameters, ResponseMode,
    SyntheticConfig,
};
use crate::ensemble::{
    boost_curve, boost_importance, forest_curve, variable_importance, BoostModel, Family,
    FittedModel, ImportanceReport, Regressor, SensitivityCurve,
};
use crate::io::{sha256_hex, write_atomic};
use crate::metrics::{adequacy_check, AdequacyTable, HistogramSpec};
use crate::plot::{effect_boxplot_svg, sensitivity_svg, Metric};
use crate::{Error, Result, SCHEMA_VERSION};

/// Which fitted model drives the lane-width simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EffectModel {
    /// The family chosen by the adequacy check.
    Winner,
    Forest,
    Boost,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Master seed; every random stage derives its own seed from it.
    pub seed: u64,
    /// CSV of section-year records. Exactly one of `input` and `generator`.
    pub input: Option<PathBuf>,
    /// Synthetic data in place of an input file. Its `seed` is replaced by
    /// one derived from the master seed.
    pub generator: Option<SyntheticConfig>,
    pub output_dir: PathBuf,
    pub response_mode: ResponseMode,
    /// Also run the lane-width simulation with crash counts as the response.
    pub counts_replication: bool,
    pub train_fraction: f64,
    pub n_trees: usize,
    pub learning_rate: f64,
    pub histogram_bins: usize,
    pub histogram_proportions: bool,
    pub lane_widths: Vec<u32>,
    pub sensitivity_counts: Vec<usize>,
    pub effect_model: EffectModel,
    /// Predictor override; the response mode's default set when absent.
    pub features: Option<Vec<Feature>>,
    /// Also write both fitted models as JSON.
    pub save_models: bool,
    pub rate: RateParameters,
    pub forest: GrowConfig,
    pub boost: GrowConfig,
    pub columns: ColumnMap,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            input: None,
            generator: None,
            output_dir: PathBuf::from("out"),
            response_mode: ResponseMode::Rate,
            counts_replication: false,
            train_fraction: 0.8,
            n_trees: 200,
            learning_rate: 1.0,
            histogram_bins: 20,
            histogram_proportions: false,
            lane_widths: DEFAULT_WIDTHS.to_vec(),
            sensitivity_counts: vec![1, 10, 25, 50, 100, 150, 200],
            effect_model: EffectModel::Winner,
            features: None,
            save_models: false,
            rate: RateParameters::default(),
            forest: GrowConfig::default(),
            boost: BoostModel::default_stage_config(),
            columns: ColumnMap::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    fn feature_count(&self) -> usize {
        self.features
            .as_ref()
            .map_or_else(|| Feature::default_set(self.response_mode).len(), Vec::len)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        match (&self.input, &self.generator) {
            (Some(_), Some(_)) => {
                return fail("set either `input` or `[generator]`, not both".into())
            }
            (None, None) => return fail("one of `input` or `[generator]` is required".into()),
            (None, Some(g)) => g.validate()?,
            (Some(_), None) => {}
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return fail(format!(
                "train_fraction must lie in (0, 1), got {}",
                self.train_fraction
            ));
        }
        if self.n_trees == 0 {
            return fail("n_trees must be >= 1".into());
        }
        if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) {
            return fail(format!(
                "learning_rate must lie in (0, 1], got {}",
                self.learning_rate
            ));
        }
        if self.histogram_bins == 0 {
            return fail("histogram_bins must be >= 1".into());
        }
        let mut widths = self.lane_widths.clone();
        widths.sort_unstable();
        widths.dedup();
        if widths.len() < 2 || widths.len() != self.lane_widths.len() || widths[0] == 0 {
            return fail("lane_widths needs at least 2 distinct positive widths".into());
        }
        let counts = &self.sensitivity_counts;
        if counts.is_empty() || counts[0] == 0 || counts.windows(2).any(|w| w[0] >= w[1]) {
            return fail("sensitivity_counts must be positive and strictly increasing".into());
        }
        if *counts.last().unwrap() > self.n_trees {
            return fail(format!(
                "sensitivity_counts may not exceed n_trees ({}), got {}",
                self.n_trees,
                counts.last().unwrap()
            ));
        }
        if let Some(list) = &self.features {
            if !list.contains(&Feature::LaneWidth) {
                return fail("the feature override must include lane_width".into());
            }
        }
        self.rate.validate()?;
        let p = self.feature_count();
        self.forest.validate(p)?;
        self.boost.validate(p)?;
        if self.counts_replication {
            let counts_p = self
                .dataset_options(ResponseMode::Counts)
                .features
                .map_or(Feature::COUNTS_SET.len(), |f| f.len());
            self.forest.validate(counts_p)?;
            self.boost.validate(counts_p)?;
        }
        Ok(())
    }

    fn model_settings(&self) -> ModelSettings {
        ModelSettings {
            train_fraction: self.train_fraction,
            n_trees: self.n_trees,
            forest: self.forest,
            boost: self.boost,
            learning_rate: self.learning_rate,
        }
    }

    /// Counts mode always carries the exposure columns, override or not.
    fn dataset_options(&self, mode: ResponseMode) -> DatasetOptions {
        let features = self.features.clone().map(|mut list| {
            if mode == ResponseMode::Counts {
                for f in [
                    Feature::SectionLength,
                    Feature::NumLanes,
                    Feature::AadtPerLane,
                ] {
                    if !list.contains(&f) {
                        list.push(f);
                    }
                }
            }
            list
        });
        DatasetOptions {
            mode,
            rate: self.rate,
            features,
        }
    }

    fn resolved_generator(&self) -> Option<SyntheticConfig> {
        self.generator.clone().map(|g| SyntheticConfig {
            seed: derive_seed(self.seed, Stream::Generator),
            ..g
        })
    }
}

/// Random stages, each with its own derived seed.
#[derive(Debug, Clone, Copy)]
#[repr(u64)]
pub enum Stream {
    Generator = 1,
    Split = 2,
    Forest = 3,
    Boost = 4,
    Importance = 5,
    Counts = 6,
}

/// SplitMix64 finalizer over the master seed and stage tag.
pub fn derive_seed(seed: u64, stream: Stream) -> u64 {
    let mut z = seed ^ (stream as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Artifact {
    pub file: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedPlan {
    pub generator: Option<u64>,
    pub split: u64,
    pub forest: u64,
    pub boost: u64,
    pub importance: u64,
    pub counts: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub tool_version: String,
    /// Resolved configuration, generator seed included.
    pub config: RunConfig,
    pub seeds: SeedPlan,
    pub input_sha256: String,
    pub n_sections: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub winner: Family,
    pub effect_family: Family,
    pub artifacts: Vec<Artifact>,
}

/// Everything a run produced, kept in memory alongside the written files.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub ingestion: IngestionReport,
    pub adequacy: AdequacyTable,
    pub importance: ImportanceReport,
    pub sensitivity: Vec<SensitivityCurve>,
    pub effect: EffectReport,
    pub counts_effect: Option<EffectReport>,
    pub manifest: RunManifest,
    pub output_dir: PathBuf,
}

#[derive(Debug, Clone)]
pub struct GenerateOutcome {
    pub csv: PathBuf,
    pub truth: PathBuf,
    pub n_records: usize,
}

fn json<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text.into_bytes())
}

fn write_all(dir: &Path, files: &[(String, Vec<u8>)]) -> Result<()> {
    fs::create_dir_all(dir)?;
    for (name, bytes) in files {
        write_atomic(&dir.join(name), bytes)?;
    }
    Ok(())
}

/// Writes the synthetic CSV and the generator truth file.
pub fn cmd_generate(config: &RunConfig) -> Result<GenerateOutcome> {
    let generator = config
        .resolved_generator()
        .ok_or_else(|| Error::Config("`generate` needs a `[generator]` table".into()))?;
    generator.validate()?;
    let data = generate_synthetic_with_truth(&generator).map_err(|e| e.in_stage("generate"))?;
    let mut csv = Vec::new();
    write_csv(&data.records, &config.columns, &mut csv)?;
    let files = vec![
        ("synthetic.csv".to_string(), csv),
        ("generator_truth.json".to_string(), json(&data.truth)?),
    ];
    write_all(&config.output_dir, &files).map_err(|e| e.in_stage("write"))?;
    Ok(GenerateOutcome {
        csv: config.output_dir.join("synthetic.csv"),
        truth: config.output_dir.join("generator_truth.json"),
        n_records: data.records.len(),
    })
}

fn sensitivity_csv(curves: &[SensitivityCurve]) -> String {
    let mut out = String::from("model,trees,mean_absolute_error,mean_squared_error\n");
    for c in curves {
        for p in &c.points {
            out.push_str(&format!(
                "{},{},{},{}\n",
                c.family.label(),
                p.trees,
                p.mae,
                p.mse
            ));
        }
    }
    out
}

fn table3_csv(report: &EffectReport) -> String {
    report.kruskal_wallis.as_ref().map_or_else(
        || "chi_squared,degrees_of_freedom,p_value\nNA,NA,NA\n".to_string(),
        |kw| kw.to_csv(),
    )
}

fn table4_csv(report: &EffectReport) -> String {
    report.percent_changes.as_ref().map_or_else(
        || "from_width,to_width,percent_change\n".to_string(),
        |t| t.to_csv(),
    )
}

fn table5_csv(report: &EffectReport) -> String {
    report
        .nemenyi
        .as_ref()
        .map_or_else(|| "group\n".to_string(), |m| m.to_csv())
}

fn effect_files(report: &EffectReport, suffix: &str) -> Result<Vec<(String, Vec<u8>)>> {
    Ok(vec![
        (format!("effect_report{suffix}.json"), json(report)?),
        (
            format!("table3_kruskal_wallis{suffix}.csv"),
            table3_csv(report).into_bytes(),
        ),
        (
            format!("table4_percent_change{suffix}.csv"),
            table4_csv(report).into_bytes(),
        ),
        (
            format!("table5_nemenyi{suffix}.csv"),
            table5_csv(report).into_bytes(),
        ),
        (
            format!("effect_boxplot{suffix}.csv"),
            report.boxplot_csv().into_bytes(),
        ),
        (
            format!("effect_boxplot{suffix}.svg"),
            effect_boxplot_svg(report).into_bytes(),
        ),
    ])
}

/// Runs the whole pipeline and writes its artifacts. Nothing is written
/// unless every stage succeeds.
pub fn cmd_run(config: &RunConfig) -> Result<RunOutcome> {
    config.validate()?;
    let seeds = SeedPlan {
        generator: config
            .generator
            .as_ref()
            .map(|_| derive_seed(config.seed, Stream::Generator)),
        split: derive_seed(config.seed, Stream::Split),
        forest: derive_seed(config.seed, Stream::Forest),
        boost: derive_seed(config.seed, Stream::Boost),
        importance: derive_seed(config.seed, Stream::Importance),
        counts: config
            .counts_replication
            .then(|| derive_seed(config.seed, Stream::Counts)),
    };

    let source = match (&config.input, config.resolved_generator()) {
        (Some(path), _) => fs::read(path).map_err(|e| Error::from(e).in_stage("ingest"))?,
        (None, Some(generator)) => {
            let data =
                generate_synthetic_with_truth(&generator).map_err(|e| e.in_stage("generate"))?;
            let mut csv = Vec::new();
            write_csv(&data.records, &config.columns, &mut csv)
                .map_err(|e| e.in_stage("generate"))?;
            csv
        }
        (None, None) => unreachable!("validated"),
    };
    let ingested =
        ingest_csv(source.as_slice(), &config.columns).map_err(|e| e.in_stage("ingest"))?;
    let sections = aggregate_sections(&ingested.records).map_err(|e| e.in_stage("aggregate"))?;
    let data = make_dataset(&sections, &config.dataset_options(config.response_mode))
        .map_err(|e| e.in_stage("dataset"))?;
    let (train_idx, test_idx) = split_indices(data.len(), config.train_fraction, seeds.split)
        .map_err(|e| e.in_stage("split"))?;
    let (train, test) = (data.subset(&train_idx), data.subset(&test_idx));

    let settings = config.model_settings();
    let train_stage =
        |family, seed| fit_family(&train, family, &settings, seed).map_err(|e| e.in_stage("train"));
    let (forest, boost) = match (
        train_stage(Family::Forest, seeds.forest)?,
        train_stage(Family::Boost, seeds.boost)?,
    ) {
        (FittedModel::Forest(f), FittedModel::Boost(b)) => (f, b),
        _ => unreachable!("fit_family returns the requested family"),
    };

    let sensitivity = vec![
        forest_curve(&forest, &test, &config.sensitivity_counts)
            .map_err(|e| e.in_stage("sensitivity"))?,
        boost_curve(&boost, &test, &config.sensitivity_counts)
            .map_err(|e| e.in_stage("sensitivity"))?,
    ];

    let spec = HistogramSpec {
        bins: config.histogram_bins,
        range: None,
        proportions: config.histogram_proportions,
    };
    let adequacy = (|| {
        let forest_pred = forest.predict_rows(test.rows())?;
        let boost_pred = boost.predict_rows(test.rows())?;
        adequacy_check(test.response(), &forest_pred, &boost_pred, &spec)
    })()
    .map_err(|e| e.in_stage("adequacy"))?;
    let winner = adequacy.winner;

    let importance = match winner {
        Family::Forest => variable_importance(&forest, &train, seeds.importance),
        Family::Boost => boost_importance(&boost, &train, seeds.importance),
    }
    .map_err(|e| e.in_stage("importance"))?;

    let effect_family = match config.effect_model {
        EffectModel::Winner => winner,
        EffectModel::Forest => Family::Forest,
        EffectModel::Boost => Family::Boost,
    };
    let effect_model: &dyn Regressor = match effect_family {
        Family::Forest => &forest,
        Family::Boost => &boost,
    };
    let mut effect = expand_lane_widths(&data, &config.lane_widths)
        .and_then(|expanded| simulate_effect(effect_model, &expanded))
        .map_err(|e| e.in_stage("counterfactual"))?;
    effect.family = Some(effect_family);

    let counts_effect = match seeds.counts {
        Some(seed) if config.response_mode == ResponseMode::Rate => Some(
            counts_mode_replication(
                &sections,
                &config.dataset_options(ResponseMode::Counts),
                &settings,
                &config.lane_widths,
                effect_family,
                seed,
            )
            .map_err(|e| e.in_stage("counts replication"))?,
        ),
        _ => None,
    };

    let mut files: Vec<(String, Vec<u8>)> = vec![
        ("ingestion_report.json".into(), json(&ingested.report)?),
        ("adequacy.csv".into(), adequacy.to_csv().into_bytes()),
        ("adequacy.json".into(), json(&adequacy)?),
        ("importance.json".into(), json(&importance)?),
        (
            "sensitivity.csv".into(),
            sensitivity_csv(&sensitivity).into_bytes(),
        ),
    ];
    for curve in &sensitivity {
        let tag = curve.family.label().to_lowercase();
        for metric in [Metric::Mae, Metric::Mse] {
            files.push((
                format!("sensitivity_{tag}_{}.svg", metric.name().to_lowercase()),
                sensitivity_svg(curve, metric).into_bytes(),
            ));
        }
    }
    files.extend(effect_files(&effect, "")?);
    if let Some(report) = &counts_effect {
        files.extend(effect_files(report, "_counts")?);
    }
    if config.save_models {
        files.push(("model_rf.json".into(), forest.to_json()?.into_bytes()));
        files.push(("model_lsboost.json".into(), boost.to_json()?.into_bytes()));
    }

    let mut resolved = config.clone();
    resolved.generator = config.resolved_generator();
    let manifest = RunManifest {
        schema_version: SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config: resolved,
        seeds,
        input_sha256: sha256_hex(&source),
        n_sections: data.len(),
        n_train: train.len(),
        n_test: test.len(),
        winner,
        effect_family,
        artifacts: files
            .iter()
            .map(|(name, bytes)| Artifact {
                file: name.clone(),
                sha256: sha256_hex(bytes),
            })
            .collect(),
    };
    files.push(("run_manifest.json".into(), json(&manifest)?));
    write_all(&config.output_dir, &files).map_err(|e| e.in_stage("write"))?;

    Ok(RunOutcome {
        ingestion: ingested.report,
        adequacy,
        importance,
        sensitivity,
        effect,
        counts_effect,
        manifest,
        output_dir: config.output_dir.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config(dir: &Path) -> RunConfig {
        RunConfig {
            generator: Some(SyntheticConfig {
                n_sections: 120,
                years: 3,
                ..SyntheticConfig::default()
            }),
            output_dir: dir.to_path_buf(),
            n_trees: 20,
            sensitivity_counts: vec![1, 5, 20],
            ..RunConfig::default()
        }
    }

    #[test]
    fn seeds_are_distinct_per_stage() {
        let all = [
            Stream::Generator,
            Stream::Split,
            Stream::Forest,
            Stream::Boost,
            Stream::Importance,
            Stream::Counts,
        ]
        .map(|s| derive_seed(7, s));
        for i in 0..all.len() {
            for j in 0..i {
                assert_ne!(all[i], all[j]);
            }
        }
        assert_ne!(derive_seed(7, Stream::Split), derive_seed(8, Stream::Split));
    }

    #[test]
    fn validation() {
        let dir = tempfile::tempdir().unwrap();
        let good = small_config(dir.path());
        good.validate().unwrap();
        let bad = [
            RunConfig {
                train_fraction: 1.0,
                ..good.clone()
            },
            RunConfig {
                input: Some("x.csv".into()),
                ..good.clone()
            },
            RunConfig {
                generator: None,
                ..good.clone()
            },
            RunConfig {
                learning_rate: 0.0,
                ..good.clone()
            },
            RunConfig {
                lane_widths: vec![9],
                ..good.clone()
            },
            RunConfig {
                sensitivity_counts: vec![1, 50],
                ..good.clone()
            },
        ];
        for cfg in bad {
            assert!(matches!(cfg.validate(), Err(Error::Config(_))), "{cfg:?}");
        }
    }

    #[test]
    fn toml_round_trip() {
        let text = r#"
            seed = 3
            n_trees = 50
            sensitivity_counts = [1, 50]
            [generator]
            n_sections = 40
            [forest]
            min_leaf = 3
        "#;
        let cfg = RunConfig::from_toml_str(text).unwrap();
        assert_eq!(cfg.seed, 3);
        assert_eq!(cfg.forest.min_leaf, 3);
        assert_eq!(cfg.generator.as_ref().unwrap().n_sections, 40);
        let back = RunConfig::from_toml_str(&cfg.to_toml_string().unwrap()).unwrap();
        assert_eq!(back, cfg);
        assert!(RunConfig::from_toml_str("bogus = 1").is_err());
    }

    #[test]
    fn run_writes_everything_and_is_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let config = small_config(dir.path());
        let first = cmd_run(&config).unwrap();
        assert_eq!(first.effect.kruskal_wallis.as_ref().map(|k| k.df), Some(3));
        let mut names: Vec<String> = first
            .manifest
            .artifacts
            .iter()
            .map(|a| a.file.clone())
            .collect();
        names.push("run_manifest.json".into());
        let before: Vec<Vec<u8>> = names
            .iter()
            .map(|n| fs::read(dir.path().join(n)).unwrap())
            .collect();
        let second = cmd_run(&config).unwrap();
        assert_eq!(first.manifest, second.manifest);
        for (name, bytes) in names.iter().zip(&before) {
            assert_eq!(&fs::read(dir.path().join(name)).unwrap(), bytes, "{name}");
        }
        for a in &first.manifest.artifacts {
            assert_eq!(
                sha256_hex(&fs::read(dir.path().join(&a.file)).unwrap()),
                a.sha256
            );
        }
    }

    #[test]
    fn invalid_config_writes_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("never");
        let cfg = RunConfig {
            train_fraction: 1.0,
            ..small_config(&out)
        };
        assert!(cmd_run(&cfg).is_err());
        assert!(!out.exists());
    }
}
