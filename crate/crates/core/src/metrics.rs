//! Prediction error, histogram similarity and model selection.

use serde::{Deserialize, Serialize};

use crate::ensemble::Family;
use crate::{Error, Result, SCHEMA_VERSION};

fn check_pair(truth: &[f64], pred: &[f64]) -> Result<()> {
    if truth.len() != pred.len() {
        return Err(Error::invalid(format!(
            "length mismatch: {} truth values, {} predictions",
            truth.len(),
            pred.len()
        )));
    }
    if truth.is_empty() {
        return Err(Error::invalid("metrics need at least one value"));
    }
    Ok(())
}

pub fn mae(truth: &[f64], pred: &[f64]) -> Result<f64> {
    check_pair(truth, pred)?;
    Ok(truth
        .iter()
        .zip(pred)
        .map(|(y, f)| (y - f).abs())
        .sum::<f64>()
        / truth.len() as f64)
}

pub fn mse(truth: &[f64], pred: &[f64]) -> Result<f64> {
    check_pair(truth, pred)?;
    Ok(truth
        .iter()
        .zip(pred)
        .map(|(y, f)| (y - f).powi(2))
        .sum::<f64>()
        / truth.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistogramSpec {
    pub bins: usize,
    /// Shared `[lo, hi]`; the union's min and max when absent.
    pub range: Option<(f64, f64)>,
    /// Use bin proportions instead of raw counts.
    pub proportions: bool,
}

impl Default for HistogramSpec {
    fn default() -> Self {
        HistogramSpec {
            bins: 20,
            range: None,
            proportions: false,
        }
    }
}

impl HistogramSpec {
    pub fn validate(&self) -> Result<()> {
        if self.bins == 0 {
            return Err(Error::invalid("histogram needs at least one bin"));
        }
        if let Some((lo, hi)) = self.range {
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::invalid(format!("bad histogram range [{lo}, {hi}]")));
            }
        }
        Ok(())
    }

    fn resolve_range(&self, a: &[f64], b: &[f64]) -> (f64, f64) {
        if let Some(r) = self.range {
            return r;
        }
        let (lo, hi) = a
            .iter()
            .chain(b)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            });
        if lo < hi {
            (lo, hi)
        } else {
            (lo - 0.5, hi + 0.5)
        }
    }
}

/// Equal-width bin counts over `[lo, hi]`; out-of-range values clamp to the
/// end bins.
pub fn histogram(values: &[f64], bins: usize, lo: f64, hi: f64) -> Vec<usize> {
    let mut counts = vec![0; bins];
    let width = (hi - lo) / bins as f64;
    for &v in values {
        let b = ((v - lo) / width).floor();
        let idx = if b < 0.0 || b.is_nan() {
            0
        } else {
            (b as usize).min(bins - 1)
        };
        counts[idx] += 1;
    }
    counts
}

/// `(1/Q) * sum_q min(H_q(truth), H_q(pred))` over a shared binning.
pub fn histogram_intersection(truth: &[f64], pred: &[f64], spec: &HistogramSpec) -> Result<f64> {
    check_pair(truth, pred)?;
    spec.validate()?;
    let (lo, hi) = spec.resolve_range(truth, pred);
    let ht = histogram(truth, spec.bins, lo, hi);
    let hp = histogram(pred, spec.bins, lo, hi);
    let scale = if spec.proportions {
        truth.len() as f64
    } else {
        1.0
    };
    let overlap: f64 = ht
        .iter()
        .zip(&hp)
        .map(|(a, b)| (*a.min(b)) as f64 / scale)
        .sum();
    Ok(overlap / spec.bins as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdequacyRow {
    pub family: Family,
    pub mae: f64,
    pub mse: f64,
    pub histogram_intersection: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdequacyTable {
    pub schema_version: u32,
    /// Boosting first, then the forest.
    pub rows: Vec<AdequacyRow>,
    pub winner: Family,
}

impl AdequacyTable {
    /// Picks the lower test MSE, then the lower MAE; an exact tie keeps the
    /// forest.
    pub fn from_rows(forest: AdequacyRow, boost: AdequacyRow) -> Self {
        let boost_wins =
            boost.mse < forest.mse || (boost.mse == forest.mse && boost.mae < forest.mae);
        AdequacyTable {
            schema_version: SCHEMA_VERSION,
            rows: vec![boost, forest],
            winner: if boost_wins {
                Family::Boost
            } else {
                Family::Forest
            },
        }
    }

    pub fn row(&self, family: Family) -> Option<&AdequacyRow> {
        self.rows.iter().find(|r| r.family == family)
    }

    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("model,mean_absolute_error,mean_squared_error,histogram_intersection\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{}\n",
                r.family.label(),
                r.mae,
                r.mse,
                r.histogram_intersection
            ));
        }
        out
    }
}

pub fn adequacy_check(
    truth: &[f64],
    forest_pred: &[f64],
    boost_pred: &[f64],
    spec: &HistogramSpec,
) -> Result<AdequacyTable> {
    let row = |family, pred: &[f64]| -> Result<AdequacyRow> {
        Ok(AdequacyRow {
            family,
            mae: mae(truth, pred)?,
            mse: mse(truth, pred)?,
            histogram_intersection: histogram_intersection(truth, pred, spec)?,
        })
    };
    Ok(AdequacyTable::from_rows(
        row(Family::Forest, forest_pred)?,
        row(Family::Boost, boost_pred)?,
    ))
}
