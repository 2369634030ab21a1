//! Squared-error regression trees.
//!
//! Trees are grown greedily: every node takes the split with the largest
//! SSE reduction among a candidate feature set, and growth stops when no
//! admissible split remains. Numeric features split at midpoints between
//! consecutive distinct values with `<=` going left. Categorical features
//! split into two level sets. With few levels present every bipartition is
//! tried; otherwise levels are ordered by mean response and contiguous cuts
//! are scanned, which is optimal when `min_leaf` does not bind.
//!
//! Ties between equal-gain splits go to the lowest feature index, then the
//! smallest threshold or the lexicographically smallest left level set. The
//! left set of a categorical split always holds the smallest level present
//! at the node.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, FeatureKind};
use crate::{Error, Result};

/// Gains at or below this fraction of the node SSE are treated as zero.
const RELATIVE_GAIN_FLOOR: f64 = 1e-12;
/// Gains closer than this fraction of the node SSE count as tied.
const RELATIVE_TIE: f64 = 1e-10;
/// Up to this many levels present at a node, every bipartition is searched;
/// above it only contiguous cuts of the mean-ordered levels are.
const EXHAUSTIVE_LEVELS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GrowConfig {
    pub min_leaf: usize,
    pub max_depth: Option<usize>,
    /// Candidate features drawn per node; all features when absent.
    pub mtry: Option<usize>,
    pub min_gain: f64,
}

impl Default for GrowConfig {
    fn default() -> Self {
        GrowConfig {
            min_leaf: 5,
            max_depth: None,
            mtry: None,
            min_gain: 0.0,
        }
    }
}

impl GrowConfig {
    pub fn validate(&self, n_features: usize) -> Result<()> {
        if self.min_leaf == 0 {
            return Err(Error::Config("min_leaf must be >= 1".into()));
        }
        if let Some(m) = self.mtry {
            if m == 0 || m > n_features {
                return Err(Error::Config(format!(
                    "mtry must lie in [1, {n_features}], got {m}"
                )));
            }
        }
        if !(self.min_gain >= 0.0 && self.min_gain.is_finite()) {
            return Err(Error::Config("min_gain must be finite and >= 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SplitRule {
    /// `x <= value` goes left.
    Threshold { value: f64 },
    /// Levels in `left` go left, levels in `right` go right; any other level
    /// follows `unseen_left`, the side that received more training rows.
    Levels {
        left: Vec<u32>,
        right: Vec<u32>,
        unseen_left: bool,
    },
}

impl SplitRule {
    pub fn goes_left(&self, x: f64) -> bool {
        match self {
            SplitRule::Threshold { value } => x <= *value,
            SplitRule::Levels {
                left,
                right,
                unseen_left,
            } => {
                let level = x as u32;
                if left.binary_search(&level).is_ok() {
                    true
                } else if right.binary_search(&level).is_ok() {
                    false
                } else {
                    *unseen_left
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitCandidate {
    pub feature: usize,
    pub rule: SplitRule,
    /// SSE(parent) - SSE(left) - SSE(right).
    pub gain: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TreeNode {
    Leaf {
        value: f64,
        n: usize,
        sse: f64,
    },
    Split {
        feature: usize,
        rule: SplitRule,
        left: usize,
        right: usize,
        /// Mean response at the node.
        value: f64,
        n: usize,
        sse: f64,
        gain: f64,
    },
}

impl TreeNode {
    pub fn n(&self) -> usize {
        match self {
            TreeNode::Leaf { n, .. } | TreeNode::Split { n, .. } => *n,
        }
    }

    pub fn sse(&self) -> f64 {
        match self {
            TreeNode::Leaf { sse, .. } | TreeNode::Split { sse, .. } => *sse,
        }
    }

    pub fn value(&self) -> f64 {
        match self {
            TreeNode::Leaf { value, .. } | TreeNode::Split { value, .. } => *value,
        }
    }
}

/// A grown tree stored as a node arena; the root is node 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionTree {
    n_features: usize,
    nodes: Vec<TreeNode>,
}

impl RegressionTree {
    /// A single-leaf tree.
    pub fn constant(n_features: usize, value: f64) -> Self {
        RegressionTree {
            n_features,
            nodes: vec![TreeNode::Leaf {
                value,
                n: 0,
                sse: 0.0,
            }],
        }
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn root(&self) -> &TreeNode {
        &self.nodes[0]
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, TreeNode::Leaf { .. }))
            .count()
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[TreeNode], i: usize) -> usize {
            match &nodes[i] {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Split { left, right, .. } => {
                    1 + walk(nodes, *left).max(walk(nodes, *right))
                }
            }
        }
        walk(&self.nodes, 0)
    }

    pub fn predict(&self, row: &[f64]) -> Result<f64> {
        if row.len() != self.n_features {
            return Err(Error::Arity {
                expected: self.n_features,
                got: row.len(),
            });
        }
        Ok(self.predict_unchecked(row))
    }

    pub(crate) fn predict_unchecked(&self, row: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                TreeNode::Leaf { value, .. } => return *value,
                TreeNode::Split {
                    feature,
                    rule,
                    left,
                    right,
                    ..
                } => {
                    i = if rule.goes_left(row[*feature]) {
                        *left
                    } else {
                        *right
                    }
                }
            }
        }
    }

    /// Total split gain per feature.
    pub fn gain_by_feature(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n_features];
        for node in &self.nodes {
            if let TreeNode::Split { feature, gain, .. } = node {
                out[*feature] += gain;
            }
        }
        out
    }

    pub fn leaf_value_range(&self) -> (f64, f64) {
        self.nodes
            .iter()
            .filter_map(|n| match n {
                TreeNode::Leaf { value, .. } => Some(*value),
                _ => None,
            })
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(v), hi.max(v))
            })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let tree: RegressionTree = serde_json::from_str(text)?;
        tree.check_links()?;
        Ok(tree)
    }

    fn check_links(&self) -> Result<()> {
        if self.nodes.is_empty() {
            return Err(Error::invalid("tree has no nodes"));
        }
        for (i, node) in self.nodes.iter().enumerate() {
            if let TreeNode::Split {
                feature,
                left,
                right,
                ..
            } = node
            {
                if *left <= i
                    || *right <= i
                    || *left >= self.nodes.len()
                    || *right >= self.nodes.len()
                {
                    return Err(Error::invalid(format!("node {i} has bad child links")));
                }
                if *feature >= self.n_features {
                    return Err(Error::invalid(format!(
                        "node {i} splits on unknown feature"
                    )));
                }
            }
        }
        Ok(())
    }
}

struct NodeStats {
    mean: f64,
    sse: f64,
}

fn node_stats(targets: &[f64], rows: &[usize]) -> NodeStats {
    let n = rows.len() as f64;
    let mean = rows.iter().map(|&r| targets[r]).sum::<f64>() / n;
    let sse = rows.iter().map(|&r| (targets[r] - mean).powi(2)).sum();
    NodeStats { mean, sse }
}

/// Best admissible split of `rows` over `candidates` (ascending feature
/// indices). `targets` is indexed by dataset row. Returns `None` when no
/// split has gain above `min_gain` with both children holding at least
/// `min_leaf` rows.
pub fn best_split(
    data: &Dataset,
    targets: &[f64],
    rows: &[usize],
    candidates: &[usize],
    config: &GrowConfig,
) -> Option<SplitCandidate> {
    if rows.is_empty() {
        return None;
    }
    let stats = node_stats(targets, rows);
    best_split_with(data, targets, rows, candidates, config, &stats)
}

fn best_split_with(
    data: &Dataset,
    targets: &[f64],
    rows: &[usize],
    candidates: &[usize],
    config: &GrowConfig,
    stats: &NodeStats,
) -> Option<SplitCandidate> {
    let min_leaf = config.min_leaf.max(1);
    if rows.len() < 2 * min_leaf || stats.sse <= 0.0 {
        return None;
    }
    let floor = config.min_gain.max(RELATIVE_GAIN_FLOOR * stats.sse);
    let tie = RELATIVE_TIE * stats.sse;

    let mut best: Option<SplitCandidate> = None;
    let mut scratch: Vec<(f64, f64)> = Vec::with_capacity(rows.len());
    for &feature in candidates {
        let found = match &data.features()[feature].kind {
            FeatureKind::Numeric => numeric_split(
                data,
                targets,
                rows,
                feature,
                min_leaf,
                stats.mean,
                tie,
                &mut scratch,
            ),
            FeatureKind::Categorical { levels } => categorical_split(
                data,
                targets,
                rows,
                feature,
                levels.len(),
                min_leaf,
                stats.mean,
                tie,
            ),
        };
        if let Some((rule, gain)) = found {
            if gain > floor && best.as_ref().is_none_or(|b| gain > b.gain + tie) {
                best = Some(SplitCandidate {
                    feature,
                    rule,
                    gain,
                });
            }
        }
    }
    best
}

#[allow(clippy::too_many_arguments)]
fn numeric_split(
    data: &Dataset,
    targets: &[f64],
    rows: &[usize],
    feature: usize,
    min_leaf: usize,
    mean: f64,
    tie: f64,
    pairs: &mut Vec<(f64, f64)>,
) -> Option<(SplitRule, f64)> {
    pairs.clear();
    pairs.extend(
        rows.iter()
            .map(|&r| (data.row(r)[feature], targets[r] - mean)),
    );
    pairs.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));

    let n = pairs.len();
    let total: f64 = pairs.iter().map(|p| p.1).sum();
    let base = total * total / n as f64;
    let mut left_sum = 0.0;
    let mut best: Option<(usize, f64)> = None;
    for i in 0..n - 1 {
        left_sum += pairs[i].1;
        let n_left = i + 1;
        if n_left < min_leaf {
            continue;
        }
        if n - n_left < min_leaf {
            break;
        }
        if pairs[i].0 == pairs[i + 1].0 {
            continue;
        }
        let right_sum = total - left_sum;
        let gain = left_sum * left_sum / n_left as f64
            + right_sum * right_sum / (n - n_left) as f64
            - base;
        if best.is_none_or(|(_, g)| gain > g + tie) {
            best = Some((i, gain));
        }
    }
    best.map(|(i, gain)| {
        let (a, b) = (pairs[i].0, pairs[i + 1].0);
        let mut value = a + (b - a) / 2.0;
        if value >= b {
            value = a;
        }
        (SplitRule::Threshold { value }, gain)
    })
}

#[allow(clippy::too_many_arguments)]
fn categorical_split(
    data: &Dataset,
    targets: &[f64],
    rows: &[usize],
    feature: usize,
    n_levels: usize,
    min_leaf: usize,
    mean: f64,
    tie: f64,
) -> Option<(SplitRule, f64)> {
    let mut count = vec![0usize; n_levels];
    let mut sum = vec![0.0f64; n_levels];
    for &r in rows {
        let level = data.row(r)[feature] as usize;
        count[level] += 1;
        sum[level] += targets[r] - mean;
    }
    let present: Vec<usize> = (0..n_levels).filter(|&l| count[l] > 0).collect();
    if present.len() < 2 {
        return None;
    }
    let candidates: Vec<Vec<usize>> = if present.len() <= EXHAUSTIVE_LEVELS {
        let rest = &present[1..];
        (0..(1usize << rest.len()) - 1)
            .map(|mask| {
                let mut left = vec![present[0]];
                left.extend(
                    rest.iter()
                        .enumerate()
                        .filter(|(i, _)| mask >> i & 1 == 1)
                        .map(|(_, &l)| l),
                );
                left
            })
            .collect()
    } else {
        let smallest = present[0];
        let mut by_mean = present.clone();
        by_mean.sort_by(|&a, &b| {
            (sum[a] / count[a] as f64)
                .total_cmp(&(sum[b] / count[b] as f64))
                .then(a.cmp(&b))
        });
        (1..by_mean.len())
            .map(|cut| {
                let (prefix, suffix) = by_mean.split_at(cut);
                let mut left = if prefix.contains(&smallest) {
                    prefix.to_vec()
                } else {
                    suffix.to_vec()
                };
                left.sort_unstable();
                left
            })
            .collect()
    };
    let mut candidates = candidates;
    candidates.sort();

    let n = rows.len();
    let total: f64 = present.iter().map(|&l| sum[l]).sum();
    let base = total * total / n as f64;
    let mut best: Option<(Vec<usize>, usize, f64)> = None;
    for left in candidates {
        let left_n: usize = left.iter().map(|&l| count[l]).sum();
        let right_n = n - left_n;
        if left_n < min_leaf || right_n < min_leaf {
            continue;
        }
        let left_sum: f64 = left.iter().map(|&l| sum[l]).sum();
        let right_sum = total - left_sum;
        let gain =
            left_sum * left_sum / left_n as f64 + right_sum * right_sum / right_n as f64 - base;
        if best.as_ref().is_none_or(|(_, _, g)| gain > g + tie) {
            best = Some((left, left_n, gain));
        }
    }
    let best = best.map(|(left, n_left, gain)| {
        let right = present
            .iter()
            .filter(|l| !left.contains(l))
            .map(|&l| l as u32)
            .collect();
        (
            left.into_iter().map(|l| l as u32).collect::<Vec<u32>>(),
            right,
            n_left,
            gain,
        )
    });
    best.map(|(left, right, n_left, gain)| {
        let unseen_left = n_left >= n - n_left;
        (
            SplitRule::Levels {
                left,
                right,
                unseen_left,
            },
            gain,
        )
    })
}

/// Grows a tree on the dataset rows listed in `sample` (repeats allowed)
/// against `targets`, which is indexed by dataset row.
pub fn grow_tree<R: Rng + ?Sized>(
    data: &Dataset,
    targets: &[f64],
    sample: &[usize],
    config: &GrowConfig,
    rng: &mut R,
) -> Result<RegressionTree> {
    if sample.is_empty() {
        return Err(Error::invalid("cannot grow a tree on an empty sample"));
    }
    if targets.len() != data.len() {
        return Err(Error::invalid(
            "targets must have one entry per dataset row",
        ));
    }
    config.validate(data.n_features())?;
    let mut grower = Grower {
        data,
        targets,
        config,
        all_features: (0..data.n_features()).collect(),
        nodes: Vec::new(),
    };
    grower.grow(sample.to_vec(), 0, rng);
    Ok(RegressionTree {
        n_features: data.n_features(),
        nodes: grower.nodes,
    })
}

struct Grower<'a> {
    data: &'a Dataset,
    targets: &'a [f64],
    config: &'a GrowConfig,
    all_features: Vec<usize>,
    nodes: Vec<TreeNode>,
}

impl Grower<'_> {
    fn grow<R: Rng + ?Sized>(&mut self, rows: Vec<usize>, depth: usize, rng: &mut R) -> usize {
        let id = self.nodes.len();
        let stats = node_stats(self.targets, &rows);
        let leaf = TreeNode::Leaf {
            value: stats.mean,
            n: rows.len(),
            sse: stats.sse,
        };
        self.nodes.push(leaf);

        let depth_ok = self.config.max_depth.is_none_or(|d| depth < d);
        if !depth_ok || rows.len() < 2 * self.config.min_leaf || stats.sse <= 0.0 {
            return id;
        }

        let p = self.data.n_features();
        let drawn;
        let candidates: &[usize] = match self.config.mtry {
            Some(m) if m < p => {
                let mut c = rand::seq::index::sample(rng, p, m).into_vec();
                c.sort_unstable();
                drawn = c;
                &drawn
            }
            _ => &self.all_features,
        };

        let Some(split) = best_split_with(
            self.data,
            self.targets,
            &rows,
            candidates,
            self.config,
            &stats,
        ) else {
            return id;
        };

        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
            .iter()
            .partition(|&&r| split.rule.goes_left(self.data.row(r)[split.feature]));
        drop(rows);
        let left = self.grow(left_rows, depth + 1, rng);
        let right = self.grow(right_rows, depth + 1, rng);
        self.nodes[id] = TreeNode::Split {
            feature: split.feature,
            rule: split.rule,
            left,
            right,
            value: stats.mean,
            n: self.nodes[left].n() + self.nodes[right].n(),
            sse: stats.sse,
            gain: split.gain,
        };
        id
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{FeatureMeta, ResponseMode};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn numeric(xs: &[f64], ys: &[f64]) -> Dataset {
        Dataset::new(
            xs.iter().map(|&x| vec![x]).collect(),
            ys.to_vec(),
            vec![FeatureMeta::numeric("x")],
            ResponseMode::Rate,
        )
        .unwrap()
    }

    fn all_rows(d: &Dataset) -> Vec<usize> {
        (0..d.len()).collect()
    }

    fn one_leaf() -> GrowConfig {
        GrowConfig {
            min_leaf: 1,
            ..GrowConfig::default()
        }
    }

    #[test]
    fn constant_response_has_no_split() {
        let d = numeric(&[1.0, 2.0, 3.0, 4.0], &[0.1; 4]);
        assert!(best_split(&d, d.response(), &all_rows(&d), &[0], &one_leaf()).is_none());
    }

    #[test]
    fn step_split() {
        let d = numeric(&[1.0, 2.0, 3.0, 4.0], &[0.0, 0.0, 10.0, 10.0]);
        let s = best_split(&d, d.response(), &all_rows(&d), &[0], &one_leaf()).unwrap();
        assert_eq!(s.rule, SplitRule::Threshold { value: 2.5 });
        assert!((s.gain - 100.0).abs() < 1e-12);
    }

    #[test]
    fn categorical_groups_low_levels() {
        let d = Dataset::new(
            [0.0, 0.0, 1.0, 1.0, 2.0, 2.0]
                .iter()
                .map(|&x| vec![x])
                .collect(),
            vec![0.0, 0.0, 0.0, 0.0, 10.0, 10.0],
            vec![FeatureMeta::categorical(
                "c",
                vec!["A".into(), "B".into(), "C".into()],
            )],
            ResponseMode::Rate,
        )
        .unwrap();
        let s = best_split(&d, d.response(), &all_rows(&d), &[0], &one_leaf()).unwrap();
        assert_eq!(
            s.rule,
            SplitRule::Levels {
                left: vec![0, 1],
                right: vec![2],
                unseen_left: true
            }
        );
        // Parent SSE: mean 10/3, 4*(10/3)^2 + 2*(20/3)^2 = 400/3.
        assert!((s.gain - 400.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn min_leaf_forces_non_contiguous_levels() {
        // Level means order as 3 < 0 < 2, but both contiguous cuts leave a
        // single row on one side.
        let d = Dataset::new(
            [3.0, 2.0, 0.0, 0.0].iter().map(|&x| vec![x]).collect(),
            vec![0.0, 5.0, 3.0, 5.0],
            vec![FeatureMeta::categorical(
                "c",
                (0..4).map(|l| l.to_string()).collect(),
            )],
            ResponseMode::Rate,
        )
        .unwrap();
        let config = GrowConfig {
            min_leaf: 2,
            ..GrowConfig::default()
        };
        let s = best_split(&d, d.response(), &all_rows(&d), &[0], &config).unwrap();
        assert_eq!(
            s.rule,
            SplitRule::Levels {
                left: vec![0],
                right: vec![2, 3],
                unseen_left: true
            }
        );
        assert!((s.gain - 2.25).abs() < 1e-12);
    }

    #[test]
    fn min_leaf_blocks_split() {
        let d = numeric(&[1.0, 2.0, 3.0, 4.0], &[0.0, 0.0, 10.0, 10.0]);
        let config = GrowConfig {
            min_leaf: 3,
            ..GrowConfig::default()
        };
        assert!(best_split(&d, d.response(), &all_rows(&d), &[0], &config).is_none());
    }

    #[test]
    fn single_row_tree_is_leaf() {
        let d = numeric(&[3.0], &[7.0]);
        let t = grow_tree(
            &d,
            d.response(),
            &[0],
            &one_leaf(),
            &mut ChaCha8Rng::seed_from_u64(0),
        )
        .unwrap();
        assert_eq!(t.nodes().len(), 1);
        assert_eq!(t.predict(&[100.0]).unwrap(), 7.0);
    }

    #[test]
    fn step_tree_and_predictions() {
        let d = numeric(&[1.0, 2.0, 3.0, 4.0], &[0.0, 0.0, 10.0, 10.0]);
        let t = grow_tree(
            &d,
            d.response(),
            &all_rows(&d),
            &one_leaf(),
            &mut ChaCha8Rng::seed_from_u64(0),
        )
        .unwrap();
        assert_eq!(t.depth(), 1);
        assert_eq!(t.n_leaves(), 2);
        assert_eq!(t.predict(&[1.0]).unwrap(), 0.0);
        assert_eq!(t.predict(&[100.0]).unwrap(), 10.0);
        assert!(matches!(t.predict(&[1.0, 2.0]), Err(Error::Arity { .. })));
    }

    #[test]
    fn depth_zero_is_global_mean() {
        let d = numeric(&[1.0, 2.0, 3.0, 4.0], &[0.0, 0.0, 10.0, 10.0]);
        let config = GrowConfig {
            max_depth: Some(0),
            ..one_leaf()
        };
        let t = grow_tree(
            &d,
            d.response(),
            &all_rows(&d),
            &config,
            &mut ChaCha8Rng::seed_from_u64(0),
        )
        .unwrap();
        assert_eq!(t.nodes().len(), 1);
        assert_eq!(t.predict(&[2.0]).unwrap(), 5.0);
    }

    #[test]
    fn unseen_level_goes_to_larger_side() {
        let d = Dataset::new(
            [0.0, 0.0, 0.0, 1.0].iter().map(|&x| vec![x]).collect(),
            vec![1.0, 1.0, 1.0, 5.0],
            vec![FeatureMeta::categorical(
                "c",
                vec!["A".into(), "B".into(), "C".into()],
            )],
            ResponseMode::Rate,
        )
        .unwrap();
        let t = grow_tree(
            &d,
            d.response(),
            &all_rows(&d),
            &one_leaf(),
            &mut ChaCha8Rng::seed_from_u64(0),
        )
        .unwrap();
        assert_eq!(t.predict(&[2.0]).unwrap(), 1.0);
        assert_eq!(t.predict(&[1.0]).unwrap(), 5.0);
    }

    #[test]
    fn json_round_trip() {
        let d = numeric(
            &[1.0, 2.0, 3.0, 4.0, 5.0],
            &[0.1, 0.7, 0.3, 10.0 / 3.0, 9.0],
        );
        let t = grow_tree(
            &d,
            d.response(),
            &all_rows(&d),
            &one_leaf(),
            &mut ChaCha8Rng::seed_from_u64(0),
        )
        .unwrap();
        let back = RegressionTree::from_json(&t.to_json().unwrap()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn rejects_bad_links() {
        let text = r#"{"n_features":1,"nodes":[{"kind":"split","feature":0,"rule":{"type":"threshold","value":1.0},"left":0,"right":1,"value":0.0,"n":2,"sse":0.0,"gain":0.0}]}"#;
        assert!(RegressionTree::from_json(text).is_err());
    }
}
