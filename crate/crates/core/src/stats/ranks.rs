use serde::{Deserialize, Serialize};

use super::distributions::{chi_square_sf, studentized_range_sf};
use super::format_p;
use crate::{Error, Result};

/// Joint midranks (1-based, ties averaged) and the tie term `Σ (t³ - t)`.
pub fn midranks(values: &[f64]) -> (Vec<f64>, f64) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut ties = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && values[order[j]] == values[order[i]] {
            j += 1;
        }
        // Positions i..j share the ranks i+1..=j.
        let rank = (i + 1 + j) as f64 / 2.0;
        for &idx in &order[i..j] {
            ranks[idx] = rank;
        }
        let t = (j - i) as f64;
        ties += t * t * t - t;
        i = j;
    }
    (ranks, ties)
}

struct RankedGroups {
    sizes: Vec<usize>,
    mean_ranks: Vec<f64>,
    n: usize,
    ties: f64,
}

fn rank_groups<G: AsRef<[f64]>>(groups: &[G]) -> Result<RankedGroups> {
    if groups.len() < 2 {
        return Err(Error::invalid("rank tests need at least 2 groups"));
    }
    if groups.iter().any(|g| g.as_ref().is_empty()) {
        return Err(Error::invalid("every group must be non-empty"));
    }
    let pooled: Vec<f64> = groups
        .iter()
        .flat_map(|g| g.as_ref().iter().copied())
        .collect();
    if pooled.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("values must be finite"));
    }
    if pooled.iter().all(|&v| v == pooled[0]) {
        return Err(Error::invalid(
            "all values are identical; the tie correction degenerates",
        ));
    }
    let (ranks, ties) = midranks(&pooled);
    let mut sizes = Vec::with_capacity(groups.len());
    let mut mean_ranks = Vec::with_capacity(groups.len());
    let mut offset = 0;
    for g in groups {
        let len = g.as_ref().len();
        let sum: f64 = ranks[offset..offset + len].iter().sum();
        sizes.push(len);
        mean_ranks.push(sum / len as f64);
        offset += len;
    }
    Ok(RankedGroups {
        sizes,
        mean_ranks,
        n: pooled.len(),
        ties,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KruskalWallisResult {
    /// Tie-corrected H.
    pub h_statistic: f64,
    pub df: u32,
    pub p_value: f64,
    pub n: usize,
    /// `1 - Σ(t³ - t) / (N³ - N)`; exactly 1 without ties.
    pub tie_correction: f64,
}

impl KruskalWallisResult {
    pub fn to_csv(&self) -> String {
        format!(
            "chi_squared,degrees_of_freedom,p_value\n{:.4},{},{}\n",
            self.h_statistic,
            self.df,
            format_p(self.p_value)
        )
    }
}

/// Kruskal-Wallis H test on two or more groups, referred to a chi-square
/// with `groups - 1` degrees of freedom.
pub fn kruskal_wallis<G: AsRef<[f64]>>(groups: &[G]) -> Result<KruskalWallisResult> {
    let r = rank_groups(groups)?;
    let n = r.n as f64;
    let centre = (n + 1.0) / 2.0;
    let spread: f64 = r
        .sizes
        .iter()
        .zip(&r.mean_ranks)
        .map(|(&size, &m)| size as f64 * (m - centre).powi(2))
        .sum();
    let tie_correction = 1.0 - r.ties / (n * n * n - n);
    let h = 12.0 / (n * (n + 1.0)) * spread / tie_correction;
    let df = (groups.len() - 1) as u32;
    Ok(KruskalWallisResult {
        h_statistic: h,
        df,
        p_value: chi_square_sf(h, df as f64)?,
        n: r.n,
        tie_correction,
    })
}

/// Lower triangle of pairwise results: row `r` is group `r + 1`, column
/// `c` is group `c`, populated for `c <= r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseMatrix {
    pub labels: Vec<String>,
    pub statistics: Vec<Vec<Option<f64>>>,
    pub p_values: Vec<Vec<Option<f64>>>,
}

impl PairwiseMatrix {
    pub fn k(&self) -> usize {
        self.labels.len()
    }

    /// p-value for groups `i != j`, in either order.
    pub fn p(&self, i: usize, j: usize) -> Option<f64> {
        let (hi, lo) = if i > j { (i, j) } else { (j, i) };
        if hi == lo || hi >= self.k() {
            return None;
        }
        self.p_values[hi - 1][lo]
    }

    pub fn populated(&self) -> usize {
        self.p_values
            .iter()
            .flatten()
            .filter(|p| p.is_some())
            .count()
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), self.labels.len(), "one label per group");
        self.labels = labels;
        self
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("group");
        for label in &self.labels[..self.k() - 1] {
            out.push(',');
            out.push_str(label);
        }
        out.push('\n');
        for (r, row) in self.p_values.iter().enumerate() {
            out.push_str(&self.labels[r + 1]);
            for p in row {
                out.push(',');
                out.push_str(&p.map_or_else(|| "-".to_string(), format_p));
            }
            out.push('\n');
        }
        out
    }
}

/// Nemenyi all-pairs comparison on joint midranks:
/// `|R̄i - R̄j| / sqrt(N(N+1)/12 * (1/ni + 1/nj))`, with p from the
/// studentized range of `k` normals at `statistic * √2`.
pub fn nemenyi<G: AsRef<[f64]>>(groups: &[G]) -> Result<PairwiseMatrix> {
    let r = rank_groups(groups)?;
    let k = groups.len();
    let n = r.n as f64;
    let mut statistics = vec![vec![None; k - 1]; k - 1];
    let mut p_values = vec![vec![None; k - 1]; k - 1];
    for i in 1..k {
        for j in 0..i {
            let se =
                (n * (n + 1.0) / 12.0 * (1.0 / r.sizes[i] as f64 + 1.0 / r.sizes[j] as f64)).sqrt();
            let stat = (r.mean_ranks[i] - r.mean_ranks[j]).abs() / se;
            statistics[i - 1][j] = Some(stat);
            p_values[i - 1][j] = Some(studentized_range_sf(stat * std::f64::consts::SQRT_2, k)?);
        }
    }
    Ok(PairwiseMatrix {
        labels: (1..=k).map(|i| i.to_string()).collect(),
        statistics,
        p_values,
    })
}
