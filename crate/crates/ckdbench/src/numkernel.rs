//! Dense linear-algebra kernel for the discriminant, SVM and
//! Levenberg-Marquardt code paths: matrix products, symmetric
//! positive-definite solves via Cholesky, log-determinants, and
//! mean/covariance estimation.
//!
//! Everything is 64-bit, row-major, and Cholesky-only; none of the
//! consumers need a general LU.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum NumError {
    #[error("matrix is not positive definite (pivot {pivot} at column {col})")]
    NotPositiveDefinite { col: usize, pivot: f64 },
    #[error("need at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

/// Dense row-major matrix of f64.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(rows * cols, data.len(), "rows*cols must equal data length");
        Matrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "inner dimensions must agree");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, v.len(), "inner dimensions must agree");
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    /// Gram matrix AᵀA accumulated row by row; cheaper than a full
    /// transpose-then-multiply for tall matrices.
    pub fn gram(&self) -> Matrix {
        let d = self.cols;
        let mut out = Matrix::zeros(d, d);
        for i in 0..self.rows {
            let r = self.row(i);
            for a in 0..d {
                let ra = r[a];
                if ra == 0.0 {
                    continue;
                }
                for b in a..d {
                    out[(a, b)] += ra * r[b];
                }
            }
        }
        for a in 0..d {
            for b in 0..a {
                out[(a, b)] = out[(b, a)];
            }
        }
        out
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Lower-triangular Cholesky factor L of A + ridge·I (A assumed symmetric).
pub fn cholesky(a: &Matrix, ridge: f64) -> Result<Matrix, NumError> {
    let n = a.rows();
    if a.cols() != n {
        return Err(NumError::DimensionMismatch(format!(
            "cholesky needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut diag = a[(j, j)] + ridge;
        for k in 0..j {
            diag -= l[(j, k)] * l[(j, k)];
        }
        if diag <= 0.0 || !diag.is_finite() {
            return Err(NumError::NotPositiveDefinite {
                col: j,
                pivot: diag,
            });
        }
        let ljj = diag.sqrt();
        l[(j, j)] = ljj;
        for i in (j + 1)..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / ljj;
        }
    }
    Ok(l)
}

fn forward_substitute(l: &Matrix, b: &[f64]) -> Vec<f64> {
    let n = l.rows();
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[(i, k)] * y[k];
        }
        y[i] = s / l[(i, i)];
    }
    y
}

fn back_substitute(l: &Matrix, y: &[f64]) -> Vec<f64> {
    let n = l.rows();
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in (i + 1)..n {
            s -= l[(k, i)] * x[k];
        }
        x[i] = s / l[(i, i)];
    }
    x
}

/// Solves (A + ridge·I)x = b via Cholesky for symmetric positive-definite A.
pub fn solve_spd(a: &Matrix, b: &[f64], ridge: f64) -> Result<Vec<f64>, NumError> {
    if b.len() != a.rows() {
        return Err(NumError::DimensionMismatch(format!(
            "solve_spd: matrix is {}x{} but rhs has length {}",
            a.rows(),
            a.cols(),
            b.len()
        )));
    }
    let l = cholesky(a, ridge)?;
    let y = forward_substitute(&l, b);
    Ok(back_substitute(&l, &y))
}

/// Solve with a pre-computed Cholesky factor.
pub fn solve_with_factor(l: &Matrix, b: &[f64]) -> Vec<f64> {
    let y = forward_substitute(l, b);
    back_substitute(l, &y)
}

/// log det(A + ridge·I) = 2·Σ log L_ii.
pub fn log_det_spd(a: &Matrix, ridge: f64) -> Result<f64, NumError> {
    let l = cholesky(a, ridge)?;
    Ok(2.0 * (0..l.rows()).map(|i| l[(i, i)].ln()).sum::<f64>())
}

/// Sample mean vector and covariance with 1/(n-1) normalization.
pub fn mean_and_covariance(x: &Matrix) -> Result<(Vec<f64>, Matrix), NumError> {
    let n = x.rows();
    let d = x.cols();
    if n < 2 {
        return Err(NumError::TooFewSamples(n));
    }
    let mut mean = vec![0.0; d];
    for i in 0..n {
        for (m, v) in mean.iter_mut().zip(x.row(i)) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= n as f64;
    }
    let mut cov = Matrix::zeros(d, d);
    let mut centered = vec![0.0; d];
    for i in 0..n {
        for (c, (v, m)) in centered.iter_mut().zip(x.row(i).iter().zip(&mean)) {
            *c = v - m;
        }
        for a in 0..d {
            let ca = centered[a];
            if ca == 0.0 {
                continue;
            }
            for b in a..d {
                cov[(a, b)] += ca * centered[b];
            }
        }
    }
    let norm = 1.0 / (n as f64 - 1.0);
    for a in 0..d {
        for b in a..d {
            cov[(a, b)] *= norm;
            cov[(b, a)] = cov[(a, b)];
        }
    }
    Ok((mean, cov))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    fn seeded_spd(n: usize, seed: u64) -> Matrix {
        // A = MᵀM + I is SPD for any M.
        let mut rng = Rng::seed_from_u64(seed);
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = rng.uniform(-1.0, 1.0);
            }
        }
        let mut a = m.transpose().matmul(&m);
        for i in 0..n {
            a[(i, i)] += 1.0;
        }
        a
    }

    /// Independent naive Gauss-elimination solver used as the oracle for
    /// solve_spd; no pivot ordering tricks, written before the Cholesky path.
    fn gauss_solve(a: &Matrix, b: &[f64]) -> Vec<f64> {
        let n = a.rows();
        let mut aug: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let mut r = a.row(i).to_vec();
                r.push(b[i]);
                r
            })
            .collect();
        for col in 0..n {
            let pivot_row = (col..n)
                .max_by(|&i, &j| aug[i][col].abs().partial_cmp(&aug[j][col].abs()).unwrap())
                .unwrap();
            aug.swap(col, pivot_row);
            let pivot = aug[col][col];
            for row in (col + 1)..n {
                let f = aug[row][col] / pivot;
                for k in col..=n {
                    aug[row][k] -= f * aug[col][k];
                }
            }
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = aug[i][n];
            for k in (i + 1)..n {
                s -= aug[i][k] * x[k];
            }
            x[i] = s / aug[i][i];
        }
        x
    }

    /// Cofactor-expansion determinant; oracle for log_det_spd.
    fn det_cofactor(a: &Matrix) -> f64 {
        let n = a.rows();
        if n == 1 {
            return a[(0, 0)];
        }
        let mut det = 0.0;
        for j in 0..n {
            let mut minor = Matrix::zeros(n - 1, n - 1);
            for i in 1..n {
                let mut cj = 0;
                for k in 0..n {
                    if k == j {
                        continue;
                    }
                    minor[(i - 1, cj)] = a[(i, k)];
                    cj += 1;
                }
            }
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            det += sign * a[(0, j)] * det_cofactor(&minor);
        }
        det
    }

    #[test]
    fn solve_identity() {
        let a = Matrix::identity(2);
        let x = solve_spd(&a, &[3.0, 4.0], 0.0).unwrap();
        assert_eq!(x, vec![3.0, 4.0]);
    }

    #[test]
    fn solve_diagonal() {
        let a = Matrix::new(2, 2, vec![4.0, 0.0, 0.0, 9.0]);
        let x = solve_spd(&a, &[8.0, 27.0], 0.0).unwrap();
        assert!((x[0] - 2.0).abs() < 1e-12);
        assert!((x[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn solve_matches_gauss_oracle() {
        let a = seeded_spd(6, 99);
        let mut rng = Rng::seed_from_u64(100);
        let b: Vec<f64> = (0..6).map(|_| rng.uniform(-2.0, 2.0)).collect();
        let x = solve_spd(&a, &b, 0.0).unwrap();
        let expected = gauss_solve(&a, &b);
        for (xi, ei) in x.iter().zip(&expected) {
            assert!((xi - ei).abs() < 1e-8, "{xi} vs {ei}");
        }
        // residual bound from the contract
        let r = a.matvec(&x);
        let binf = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (ri, bi) in r.iter().zip(&b) {
            assert!((ri - bi).abs() < 1e-8 * (1.0 + binf));
        }
    }

    #[test]
    fn solve_recovers_known_solution() {
        let a = seeded_spd(8, 5);
        let x0: Vec<f64> = (0..8).map(|i| (i as f64) - 3.5).collect();
        let b = a.matvec(&x0);
        let x = solve_spd(&a, &b, 0.0).unwrap();
        for (xi, ei) in x.iter().zip(&x0) {
            assert!((xi - ei).abs() < 1e-8);
        }
    }

    #[test]
    fn not_positive_definite_detected() {
        let a = Matrix::new(2, 2, vec![1.0, 2.0, 2.0, 1.0]); // eigenvalues 3, -1
        match cholesky(&a, 0.0) {
            Err(NumError::NotPositiveDefinite { .. }) => {}
            other => panic!("expected NotPositiveDefinite, got {other:?}"),
        }
    }

    #[test]
    fn logdet_identity_and_diagonal() {
        assert!(log_det_spd(&Matrix::identity(3), 0.0).unwrap().abs() < 1e-12);
        let a = Matrix::new(2, 2, vec![2.0, 0.0, 0.0, 8.0]);
        assert!((log_det_spd(&a, 0.0).unwrap() - 16.0f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn logdet_matches_cofactor_oracle() {
        let a = seeded_spd(5, 17);
        let ld = log_det_spd(&a, 0.0).unwrap();
        let det = det_cofactor(&a);
        assert!(det > 0.0);
        let rel = (ld - det.ln()).abs() / det.ln().abs().max(1.0);
        assert!(rel < 1e-8, "logdet {} vs oracle {}", ld, det.ln());
    }

    #[test]
    fn cholesky_round_trip() {
        // L seeded lower-triangular with positive diagonal; factor LLᵀ back.
        let n = 6;
        let mut rng = Rng::seed_from_u64(31);
        let mut l = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..i {
                l[(i, j)] = rng.uniform(-1.0, 1.0);
            }
            l[(i, i)] = rng.uniform(0.5, 2.0);
        }
        let a = l.matmul(&l.transpose());
        let l2 = cholesky(&a, 0.0).unwrap();
        for i in 0..n {
            for j in 0..n {
                assert!((l[(i, j)] - l2[(i, j)]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn mean_cov_two_points() {
        let x = Matrix::new(2, 2, vec![0.0, 0.0, 2.0, 0.0]);
        let (mean, cov) = mean_and_covariance(&x).unwrap();
        assert_eq!(mean, vec![1.0, 0.0]);
        assert_eq!(cov[(0, 0)], 2.0);
        assert_eq!(cov[(0, 1)], 0.0);
        assert_eq!(cov[(1, 1)], 0.0);
    }

    #[test]
    fn mean_cov_duplication_scaling() {
        // Duplicating every row k times keeps the mean and rescales the
        // covariance by k(n-1)/(kn-1); checked against brute force.
        let n = 5;
        let d = 3;
        let mut rng = Rng::seed_from_u64(8);
        let base: Vec<f64> = (0..n * d).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let x = Matrix::new(n, d, base.clone());
        let (mean, cov) = mean_and_covariance(&x).unwrap();
        for k in [2usize, 4] {
            let mut dup = Vec::new();
            for _ in 0..k {
                dup.extend_from_slice(&base);
            }
            let xk = Matrix::new(k * n, d, dup);
            let (mean_k, cov_k) = mean_and_covariance(&xk).unwrap();
            for (a, b) in mean.iter().zip(&mean_k) {
                assert!((a - b).abs() < 1e-12);
            }
            let factor = (k as f64) * (n as f64 - 1.0) / ((k * n) as f64 - 1.0);
            for i in 0..d {
                for j in 0..d {
                    assert!((cov_k[(i, j)] - factor * cov[(i, j)]).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn whitened_data_has_identity_covariance() {
        let n = 200;
        let d = 3;
        let mut rng = Rng::seed_from_u64(12);
        let mut data = Vec::with_capacity(n * d);
        for _ in 0..n {
            let a = rng.next_normal();
            let b = rng.next_normal();
            let c = rng.next_normal();
            data.extend_from_slice(&[a, a * 0.5 + b, b - 0.3 * c]);
        }
        let x = Matrix::new(n, d, data);
        let (mean, cov) = mean_and_covariance(&x).unwrap();
        let l = cholesky(&cov, 0.0).unwrap();
        // whiten: z = L⁻¹ (x - mean)
        let mut white = Matrix::zeros(n, d);
        for i in 0..n {
            let centered: Vec<f64> = x.row(i).iter().zip(&mean).map(|(v, m)| v - m).collect();
            let z = forward_substitute(&l, &centered);
            white.row_mut(i).copy_from_slice(&z);
        }
        let (_, wcov) = mean_and_covariance(&white).unwrap();
        for i in 0..d {
            for j in 0..d {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!(
                    (wcov[(i, j)] - expect).abs() < 1e-8,
                    "wcov[{i},{j}] = {}",
                    wcov[(i, j)]
                );
            }
        }
    }

    #[test]
    fn too_few_samples() {
        let x = Matrix::new(1, 2, vec![1.0, 2.0]);
        assert_eq!(
            mean_and_covariance(&x).unwrap_err(),
            NumError::TooFewSamples(1)
        );
    }
}
