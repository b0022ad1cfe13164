//! K-nearest-neighbor presets. A lazy learner: fitting stores the training
//! matrix verbatim; all work happens at prediction time.
//!
//! Distances: euclidean ‖a−b‖₂, minkowski3 (Σ|aᵢ−bᵢ|³)^(1/3), cosine
//! 1 − a·b/(‖a‖‖b‖) with the zero-vector distance defined as 1. Voting is
//! uniform majority or squared-inverse-distance weighted; ties break toward
//! the single nearest neighbor's label, then the positive class.

use super::{ClassifierError, KnnParams};
use crate::numkernel::{dot, Matrix};
use crate::preprocess::FeatureMatrix;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KnnMetric {
    Euclidean,
    Cosine,
    Minkowski3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KnnWeighting {
    Uniform,
    SquaredInverse,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    pub train: Matrix,
    pub labels: Vec<bool>,
    pub k: usize,
    pub metric: KnnMetric,
    pub weighting: KnnWeighting,
}

pub fn distance(metric: KnnMetric, a: &[f64], b: &[f64]) -> f64 {
    match metric {
        KnnMetric::Euclidean => a
            .iter()
            .zip(b)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt(),
        KnnMetric::Minkowski3 => a
            .iter()
            .zip(b)
            .map(|(x, y)| (x - y).abs().powi(3))
            .sum::<f64>()
            .cbrt(),
        KnnMetric::Cosine => {
            let na = dot(a, a).sqrt();
            let nb = dot(b, b).sqrt();
            if na == 0.0 || nb == 0.0 {
                1.0
            } else {
                1.0 - dot(a, b) / (na * nb)
            }
        }
    }
}

pub fn fit_knn(x: &FeatureMatrix, params: &KnnParams) -> Result<KnnModel, ClassifierError> {
    if params.k > x.n_rows() {
        return Err(ClassifierError::KTooLarge {
            k: params.k,
            n: x.n_rows(),
        });
    }
    Ok(KnnModel {
        train: x.values.clone(),
        labels: x.labels.clone(),
        k: params.k,
        metric: params.metric,
        weighting: params.weighting,
    })
}

/// Votes on the label of `x` from the k nearest stored samples.
pub fn knn_vote(model: &KnnModel, x: &[f64]) -> bool {
    let n = model.train.rows();
    let mut dists: Vec<(f64, usize)> = (0..n)
        .map(|i| (distance(model.metric, model.train.row(i), x), i))
        .collect();
    // deterministic neighbor order: distance, then stored index
    dists.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    let neighbors = &dists[..model.k];

    let mut pos_weight = 0.0;
    let mut neg_weight = 0.0;
    for &(d, i) in neighbors {
        let w = match model.weighting {
            KnnWeighting::Uniform => 1.0,
            KnnWeighting::SquaredInverse => 1.0 / (d * d).max(1e-12),
        };
        if model.labels[i] {
            pos_weight += w;
        } else {
            neg_weight += w;
        }
    }
    if pos_weight != neg_weight {
        return pos_weight > neg_weight;
    }
    // tie: the single nearest neighbor decides, unless the minimum distance
    // is shared by neighbors of both labels, in which case positive wins
    let nearest = neighbors[0];
    let ambiguous = neighbors
        .iter()
        .any(|&(d, i)| d == nearest.0 && model.labels[i] != model.labels[nearest.1]);
    if ambiguous {
        true
    } else {
        model.labels[nearest.1]
    }
}
