//! Linear and quadratic discriminant analysis. Each class is modeled as a
//! Gaussian; LDA pools one covariance across classes, QDA estimates one per
//! class. Covariances are ridge-regularized (1e-6·trace/d, escalated ×10
//! until positive definite) because one-hot columns make raw covariances
//! singular.

use super::ClassifierError;
use crate::numkernel::{cholesky, mean_and_covariance, solve_with_factor, Matrix, NumError};
use crate::preprocess::FeatureMatrix;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiscriminantKind {
    Linear,
    Quadratic,
}

/// Per-class Gaussian in factored form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassGaussian {
    pub mean: Vec<f64>,
    /// Cholesky factor of the (regularized) covariance.
    pub chol: Matrix,
    pub log_det: f64,
    pub log_prior: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscriminantModel {
    pub kind: DiscriminantKind,
    /// index 0 = positive class, 1 = negative class
    pub classes: Vec<ClassGaussian>,
    /// ridge actually applied to each covariance, for audit
    pub ridge: f64,
}

/// Factors cov + ridge·I, escalating the ridge ×10 until positive definite.
fn factor_with_escalation(cov: &Matrix, d: usize) -> Result<(Matrix, f64, f64), ClassifierError> {
    let trace: f64 = (0..d).map(|i| cov[(i, i)]).sum();
    let mut ridge = (1e-6 * trace / d as f64).max(1e-12);
    for _ in 0..60 {
        match cholesky(cov, ridge) {
            Ok(l) => {
                let log_det = 2.0 * (0..d).map(|i| l[(i, i)].ln()).sum::<f64>();
                return Ok((l, log_det, ridge));
            }
            Err(NumError::NotPositiveDefinite { .. }) => ridge *= 10.0,
            Err(e) => return Err(e.into()),
        }
    }
    Err(ClassifierError::DegenerateData(
        "covariance could not be regularized to positive definite".into(),
    ))
}

fn class_matrix(x: &FeatureMatrix, positive: bool) -> Matrix {
    let rows: Vec<usize> = (0..x.n_rows())
        .filter(|&i| x.labels[i] == positive)
        .collect();
    let mut data = Vec::with_capacity(rows.len() * x.n_features());
    for &r in &rows {
        data.extend_from_slice(x.row(r));
    }
    Matrix::new(rows.len(), x.n_features(), data)
}

pub fn fit_discriminant(
    x: &FeatureMatrix,
    kind: DiscriminantKind,
) -> Result<DiscriminantModel, ClassifierError> {
    let d = x.n_features();
    let n = x.n_rows();
    let pos = class_matrix(x, true);
    let neg = class_matrix(x, false);
    for (m, which) in [(&pos, "positive"), (&neg, "negative")] {
        if m.rows() < 2 {
            return Err(ClassifierError::DegenerateData(format!(
                "{which} class has {} samples; discriminant analysis needs at least 2 per class",
                m.rows()
            )));
        }
    }
    let (mean_pos, cov_pos) = mean_and_covariance(&pos)?;
    let (mean_neg, cov_neg) = mean_and_covariance(&neg)?;
    let prior_pos = (pos.rows() as f64 / n as f64).ln();
    let prior_neg = (neg.rows() as f64 / n as f64).ln();

    let build = |mean: Vec<f64>, cov: &Matrix, log_prior: f64| -> Result<_, ClassifierError> {
        let (chol, log_det, ridge) = factor_with_escalation(cov, d)?;
        Ok((
            ClassGaussian {
                mean,
                chol,
                log_det,
                log_prior,
            },
            ridge,
        ))
    };

    match kind {
        DiscriminantKind::Quadratic => {
            let (gp, r1) = build(mean_pos, &cov_pos, prior_pos)?;
            let (gn, r2) = build(mean_neg, &cov_neg, prior_neg)?;
            Ok(DiscriminantModel {
                kind,
                classes: vec![gp, gn],
                ridge: r1.max(r2),
            })
        }
        DiscriminantKind::Linear => {
            // pooled covariance: ((n₊-1)S₊ + (n₋-1)S₋) / (n-2)
            let wp = (pos.rows() - 1) as f64;
            let wn = (neg.rows() - 1) as f64;
            let denom = (n - 2) as f64;
            let mut pooled = Matrix::zeros(d, d);
            for i in 0..d {
                for j in 0..d {
                    pooled[(i, j)] = (wp * cov_pos[(i, j)] + wn * cov_neg[(i, j)]) / denom;
                }
            }
            let (gp, r1) = build(mean_pos, &pooled, prior_pos)?;
            let (gn, r2) = build(mean_neg, &pooled, prior_neg)?;
            Ok(DiscriminantModel {
                kind,
                classes: vec![gp, gn],
                ridge: r1.max(r2),
            })
        }
    }
}

/// Gaussian log-density score per class (up to the shared constant):
/// −½·logdet(Σ_c) − ½·(x−μ_c)ᵀΣ_c⁻¹(x−μ_c) + log π_c.
/// Index 0 is the positive class. Predicted class = argmax.
pub fn discriminant_score(model: &DiscriminantModel, x: &[f64]) -> [f64; 2] {
    let mut scores = [0.0; 2];
    for (s, class) in scores.iter_mut().zip(&model.classes) {
        let centered: Vec<f64> = x.iter().zip(&class.mean).map(|(v, m)| v - m).collect();
        let solved = solve_with_factor(&class.chol, &centered);
        let mahalanobis: f64 = centered.iter().zip(&solved).map(|(a, b)| a * b).sum();
        *s = -0.5 * class.log_det - 0.5 * mahalanobis + class.log_prior;
    }
    scores
}
