use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Five-number summary with Tukey whiskers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub n: usize,
    pub mean: f64,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    /// Most extreme observations within 1.5 IQR of the quartiles.
    pub whisker_low: f64,
    pub whisker_high: f64,
    pub outliers: Vec<f64>,
}

/// Linear interpolation between order statistics at position `(n-1)p`.
fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let pos = (sorted.len() - 1) as f64 * p;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn boxplot_summary(values: &[f64]) -> Result<GroupSummary> {
    if values.is_empty() {
        return Err(Error::invalid("box-plot summary needs at least one value"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("box-plot values must be finite"));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let q1 = quantile_sorted(&sorted, 0.25);
    let q3 = quantile_sorted(&sorted, 0.75);
    let iqr = q3 - q1;
    let (fence_lo, fence_hi) = (q1 - 1.5 * iqr, q3 + 1.5 * iqr);
    let inside = || {
        sorted
            .iter()
            .copied()
            .filter(|&v| v >= fence_lo && v <= fence_hi)
    };
    Ok(GroupSummary {
        n: sorted.len(),
        mean: sorted.iter().sum::<f64>() / sorted.len() as f64,
        min: sorted[0],
        q1,
        median: quantile_sorted(&sorted, 0.5),
        q3,
        max: sorted[sorted.len() - 1],
        whisker_low: inside().next().unwrap_or(q1),
        whisker_high: inside().next_back().unwrap_or(q3),
        outliers: sorted
            .iter()
            .copied()
            .filter(|&v| v < fence_lo || v > fence_hi)
            .collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PercentChangeRow {
    pub from: u32,
    pub to: u32,
    pub percent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PercentChangeTable {
    pub rows: Vec<PercentChangeRow>,
    pub grand_mean: f64,
    #[serde(skip)]
    means: BTreeMap<u32, f64>,
}

impl PercentChangeTable {
    /// `100 (mean_to - mean_from) / grand_mean` for any two groups.
    pub fn percent_change(&self, from: u32, to: u32) -> Option<f64> {
        if let Some(r) = self.rows.iter().find(|r| r.from == from && r.to == to) {
            return Some(r.percent);
        }
        if let Some(r) = self.rows.iter().find(|r| r.from == to && r.to == from) {
            return Some(-r.percent);
        }
        let (a, b) = (self.means.get(&from)?, self.means.get(&to)?);
        Some(100.0 * (b - a) / self.grand_mean)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("from_width,to_width,percent_change\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{:+.1}\n", r.from, r.to, r.percent));
        }
        out
    }
}

/// Percent change between every pair of groups, relative to the grand mean.
///
/// Rows run over destinations in ascending order, each paired with every
/// smaller source: for widths 9..12 that is (10,9), (11,9), (12,9),
/// (11,10), (12,10), (12,11), read as "going from the first width to the
/// second".
pub fn percent_changes(
    group_means: &BTreeMap<u32, f64>,
    grand_mean: f64,
) -> Result<PercentChangeTable> {
    if group_means.len() < 2 {
        return Err(Error::invalid("percent changes need at least 2 groups"));
    }
    if !(grand_mean > 0.0) || !grand_mean.is_finite() {
        return Err(Error::domain(format!(
            "grand mean must be positive, got {grand_mean}"
        )));
    }
    let keys: Vec<u32> = group_means.keys().copied().collect();
    let mut rows = Vec::new();
    for (ti, &to) in keys.iter().enumerate() {
        for &from in keys[ti + 1..].iter() {
            rows.push(PercentChangeRow {
                from,
                to,
                percent: 100.0 * (group_means[&to] - group_means[&from]) / grand_mean,
            });
        }
    }
    Ok(PercentChangeTable {
        rows,
        grand_mean,
        means: group_means.clone(),
    })
}
