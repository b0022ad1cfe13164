//! Binary CART classification tree. Numeric splits test value <= threshold
//! with thresholds at midpoints between consecutive distinct sorted values;
//! one-hot indicator columns split at 0.5 through the same machinery.
//! Grown to purity by default, no pruning.

use super::TreeParams;
use crate::preprocess::FeatureMatrix;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitCriterion {
    /// Gini impurity decrease.
    Gini,
    /// Information gain in bits.
    InfoGain,
}

/// Result of scoring one column.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitScore {
    /// Best threshold, or None when the column admits no split.
    pub threshold: Option<f64>,
    /// Impurity decrease (Gini) or information gain (bits); 0 for a
    /// constant column.
    pub score: f64,
}

fn gini(pos: usize, total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let p = pos as f64 / total as f64;
    2.0 * p * (1.0 - p)
}

fn entropy_bits(pos: usize, total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let p = pos as f64 / total as f64;
    let mut h = 0.0;
    if p > 0.0 {
        h -= p * p.log2();
    }
    if p < 1.0 {
        h -= (1.0 - p) * (1.0 - p).log2();
    }
    h
}

fn impurity(criterion: SplitCriterion, pos: usize, total: usize) -> f64 {
    match criterion {
        SplitCriterion::Gini => gini(pos, total),
        SplitCriterion::InfoGain => entropy_bits(pos, total),
    }
}

/// Scores every candidate threshold of one column (midpoints between
/// consecutive distinct sorted values) and returns the best; ties break
/// toward the lowest threshold.
pub fn split_score(values: &[f64], labels: &[bool], criterion: SplitCriterion) -> SplitScore {
    split_score_min_leaf(values, labels, criterion, 1)
}

pub(crate) fn split_score_min_leaf(
    values: &[f64],
    labels: &[bool],
    criterion: SplitCriterion,
    min_leaf: usize,
) -> SplitScore {
    let n = values.len();
    debug_assert_eq!(n, labels.len());
    if n < 2 {
        return SplitScore {
            threshold: None,
            score: 0.0,
        };
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
    let total_pos = labels.iter().filter(|&&l| l).count();
    let parent = impurity(criterion, total_pos, n);

    let mut best: Option<(f64, f64)> = None; // (threshold, score)
    let mut left_pos = 0usize;
    for (left_n, window) in order.windows(2).enumerate() {
        let (i, j) = (window[0], window[1]);
        if labels[i] {
            left_pos += 1;
        }
        let left_n = left_n + 1;
        if values[i] == values[j] {
            continue; // no boundary between equal values
        }
        if left_n < min_leaf || n - left_n < min_leaf {
            continue;
        }
        let threshold = values[i] + (values[j] - values[i]) / 2.0;
        let right_n = n - left_n;
        let right_pos = total_pos - left_pos;
        let weighted = (left_n as f64 / n as f64) * impurity(criterion, left_pos, left_n)
            + (right_n as f64 / n as f64) * impurity(criterion, right_pos, right_n);
        let score = parent - weighted;
        // strict improvement keeps the lowest threshold on ties
        if best.map_or(true, |(_, s)| score > s) {
            best = Some((threshold, score));
        }
    }
    match best {
        Some((threshold, score)) => SplitScore {
            threshold: Some(threshold),
            score: score.max(0.0),
        },
        None => SplitScore {
            threshold: None,
            score: 0.0,
        },
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TreeNode {
    Leaf {
        positive: bool,
        pos_count: usize,
        neg_count: usize,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

/// Arena-allocated binary tree; node 0 is the root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeModel {
    pub nodes: Vec<TreeNode>,
}

impl TreeModel {
    pub fn predict_row(&self, row: &[f64]) -> bool {
        let mut idx = 0usize;
        loop {
            match &self.nodes[idx] {
                TreeNode::Leaf { positive, .. } => return *positive,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    idx = if row[*feature] <= *threshold {
                        *left
                    } else {
                        *right
                    };
                }
            }
        }
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, TreeNode::Leaf { .. }))
            .count()
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[TreeNode], idx: usize) -> usize {
            match &nodes[idx] {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Split { left, right, .. } => {
                    1 + walk(nodes, *left).max(walk(nodes, *right))
                }
            }
        }
        walk(&self.nodes, 0)
    }
}

struct Grower<'a> {
    x: &'a FeatureMatrix,
    params: &'a TreeParams,
    nodes: Vec<TreeNode>,
}

impl Grower<'_> {
    fn leaf(&mut self, rows: &[usize]) -> usize {
        let pos_count = rows.iter().filter(|&&r| self.x.labels[r]).count();
        let neg_count = rows.len() - pos_count;
        // majority; exact tie goes to the positive class
        self.nodes.push(TreeNode::Leaf {
            positive: pos_count >= neg_count,
            pos_count,
            neg_count,
        });
        self.nodes.len() - 1
    }

    fn grow(&mut self, rows: &[usize], depth: usize) -> usize {
        let pos = rows.iter().filter(|&&r| self.x.labels[r]).count();
        let pure = pos == 0 || pos == rows.len();
        let depth_capped = self.params.max_depth.is_some_and(|d| depth >= d);
        if pure || depth_capped || rows.len() < 2 * self.params.min_leaf {
            return self.leaf(rows);
        }

        let labels: Vec<bool> = rows.iter().map(|&r| self.x.labels[r]).collect();
        let mut best: Option<(f64, usize, f64)> = None; // (score, feature, threshold)
        let mut column = vec![0.0; rows.len()];
        for feature in 0..self.x.n_features() {
            for (c, &r) in column.iter_mut().zip(rows) {
                *c = self.x.row(r)[feature];
            }
            let result = split_score_min_leaf(
                &column,
                &labels,
                self.params.criterion,
                self.params.min_leaf,
            );
            if let Some(threshold) = result.threshold {
                // strict improvement: earlier feature wins ties
                if best.map_or(result.score > 0.0, |(s, _, _)| result.score > s) {
                    best = Some((result.score, feature, threshold));
                }
            }
        }

        let Some((_, feature, threshold)) = best else {
            return self.leaf(rows);
        };
        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
            .iter()
            .partition(|&&r| self.x.row(r)[feature] <= threshold);
        if left_rows.is_empty() || right_rows.is_empty() {
            // midpoint rounded onto a sample value; no usable boundary
            return self.leaf(rows);
        }

        let idx = self.nodes.len();
        self.nodes.push(TreeNode::Split {
            feature,
            threshold,
            left: usize::MAX,
            right: usize::MAX,
        });
        let left = self.grow(&left_rows, depth + 1);
        let right = self.grow(&right_rows, depth + 1);
        if let TreeNode::Split {
            left: l, right: r, ..
        } = &mut self.nodes[idx]
        {
            *l = left;
            *r = right;
        }
        idx
    }
}

pub fn fit_tree(x: &FeatureMatrix, params: &TreeParams) -> TreeModel {
    let rows: Vec<usize> = (0..x.n_rows()).collect();
    let mut grower = Grower {
        x,
        params,
        nodes: Vec::new(),
    };
    grower.grow(&rows, 0);
    TreeModel {
        nodes: grower.nodes,
    }
}
