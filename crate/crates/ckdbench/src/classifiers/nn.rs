//! Feedforward network with one sigmoid output, trained on mean squared
//! error either by full-batch gradient descent or by Levenberg-Marquardt
//! (damped Gauss-Newton over the per-sample residuals).

use super::{ClassifierError, NnParams};
use crate::numkernel::{solve_spd, Matrix, NumError};
use crate::preprocess::FeatureMatrix;
use crate::rng::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Sigmoid,
    /// Test configuration: turns the net into a (piecewise) linear model so
    /// Levenberg-Marquardt can be checked against closed-form least squares.
    Identity,
}

impl Activation {
    fn apply(&self, z: f64) -> f64 {
        match self {
            Activation::Sigmoid => 1.0 / (1.0 + (-z).exp()),
            Activation::Identity => z,
        }
    }

    /// Derivative expressed through the activation output.
    fn derivative_from_output(&self, a: f64) -> f64 {
        match self {
            Activation::Sigmoid => a * (1.0 - a),
            Activation::Identity => 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    /// out×in weight matrix.
    pub weights: Matrix,
    pub bias: Vec<f64>,
}

/// Fully-connected network with a single output unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Network {
    pub layers: Vec<Layer>,
    pub activation: Activation,
}

impl Network {
    /// `sizes` = [inputs, hidden..., 1]; weights uniform in (-0.5, 0.5).
    pub fn init(sizes: &[usize], activation: Activation, rng: &mut Rng) -> Network {
        assert!(sizes.len() >= 2 && *sizes.last().unwrap() == 1);
        let layers = sizes
            .windows(2)
            .map(|w| {
                let (inp, out) = (w[0], w[1]);
                let data: Vec<f64> = (0..inp * out).map(|_| rng.uniform(-0.5, 0.5)).collect();
                Layer {
                    weights: Matrix::new(out, inp, data),
                    bias: (0..out).map(|_| rng.uniform(-0.5, 0.5)).collect(),
                }
            })
            .collect();
        Network { layers, activation }
    }

    pub fn n_inputs(&self) -> usize {
        self.layers[0].weights.cols()
    }

    pub fn param_count(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weights.data().len() + l.bias.len())
            .sum()
    }

    pub fn params(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.param_count());
        for layer in &self.layers {
            out.extend_from_slice(layer.weights.data());
            out.extend_from_slice(&layer.bias);
        }
        out
    }

    pub fn set_params(&mut self, params: &[f64]) {
        let mut offset = 0;
        for layer in &mut self.layers {
            let wlen = layer.weights.data().len();
            let rows = layer.weights.rows();
            let cols = layer.weights.cols();
            layer.weights = Matrix::new(rows, cols, params[offset..offset + wlen].to_vec());
            offset += wlen;
            let blen = layer.bias.len();
            layer.bias.copy_from_slice(&params[offset..offset + blen]);
            offset += blen;
        }
        debug_assert_eq!(offset, params.len());
    }

    /// Output for one input row.
    pub fn forward(&self, row: &[f64]) -> f64 {
        let mut a = row.to_vec();
        for layer in &self.layers {
            let mut next = Vec::with_capacity(layer.bias.len());
            for j in 0..layer.bias.len() {
                let z = crate::numkernel::dot(layer.weights.row(j), &a) + layer.bias[j];
                next.push(self.activation.apply(z));
            }
            a = next;
        }
        a[0]
    }

    /// Output plus d(output)/d(params) for one row, via backpropagation.
    pub fn output_and_grad(&self, row: &[f64]) -> (f64, Vec<f64>) {
        // forward pass keeping every activation
        let mut activations: Vec<Vec<f64>> = vec![row.to_vec()];
        for layer in &self.layers {
            let prev = activations.last().unwrap();
            let mut a = Vec::with_capacity(layer.bias.len());
            for j in 0..layer.bias.len() {
                let z = crate::numkernel::dot(layer.weights.row(j), prev) + layer.bias[j];
                a.push(self.activation.apply(z));
            }
            activations.push(a);
        }
        let output = activations.last().unwrap()[0];

        // backward pass: delta = d(output)/d(z) per unit
        let mut grad = vec![0.0; self.param_count()];
        let mut delta = vec![self.activation.derivative_from_output(output)];
        // parameter offsets per layer
        let mut offsets = Vec::with_capacity(self.layers.len());
        let mut acc = 0;
        for layer in &self.layers {
            offsets.push(acc);
            acc += layer.weights.data().len() + layer.bias.len();
        }
        for (l, layer) in self.layers.iter().enumerate().rev() {
            let input = &activations[l];
            let base = offsets[l];
            let wlen = layer.weights.data().len();
            for j in 0..layer.bias.len() {
                let dj = delta[j];
                let wrow = base + j * input.len();
                for (i, inp) in input.iter().enumerate() {
                    grad[wrow + i] = dj * inp;
                }
                grad[base + wlen + j] = dj;
            }
            if l > 0 {
                let mut prev_delta = vec![0.0; input.len()];
                for (i, pd) in prev_delta.iter_mut().enumerate() {
                    let mut s = 0.0;
                    for j in 0..layer.bias.len() {
                        s += delta[j] * layer.weights[(j, i)];
                    }
                    *pd = s * self.activation.derivative_from_output(input[i]);
                }
                delta = prev_delta;
            }
        }
        (output, grad)
    }
}

/// Mean squared error over the batch.
pub fn mse(network: &Network, x: &Matrix, targets: &[f64]) -> f64 {
    let n = x.rows();
    let mut sum = 0.0;
    for i in 0..n {
        let d = network.forward(x.row(i)) - targets[i];
        sum += d * d;
    }
    sum / n as f64
}

/// Gradient of the batch MSE with respect to every weight and bias.
pub fn nn_gradient(network: &Network, x: &Matrix, targets: &[f64]) -> Vec<f64> {
    let n = x.rows();
    let mut grad = vec![0.0; network.param_count()];
    for i in 0..n {
        let (out, g) = network.output_and_grad(x.row(i));
        let scale = 2.0 * (out - targets[i]) / n as f64;
        for (acc, gi) in grad.iter_mut().zip(&g) {
            *acc += scale * gi;
        }
    }
    grad
}

/// Full-batch gradient descent until the loss change drops below 1e-9 or
/// the epoch budget runs out.
pub fn train_gd(
    network: &mut Network,
    x: &Matrix,
    targets: &[f64],
    learning_rate: f64,
    max_epochs: usize,
) -> Result<f64, ClassifierError> {
    let mut prev_loss = mse(network, x, targets);
    if !prev_loss.is_finite() {
        return Err(ClassifierError::NonFiniteLoss { epoch: 0 });
    }
    for epoch in 1..=max_epochs {
        let grad = nn_gradient(network, x, targets);
        let mut params = network.params();
        for (p, g) in params.iter_mut().zip(&grad) {
            *p -= learning_rate * g;
        }
        network.set_params(&params);
        let loss = mse(network, x, targets);
        if !loss.is_finite() {
            return Err(ClassifierError::NonFiniteLoss { epoch });
        }
        if (prev_loss - loss).abs() < 1e-9 {
            return Ok(loss);
        }
        prev_loss = loss;
    }
    Ok(prev_loss)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LmOutcome {
    pub final_loss: f64,
    pub accepted_steps: usize,
    /// false when the epoch budget ran out with progress still possible.
    pub converged: bool,
}

/// One damped Gauss-Newton direction: solves (JᵀJ + λI)Δ = Jᵀr.
/// Exposed for the large-λ limit check (Δ approaches the gradient
/// direction as λ grows).
pub fn lm_direction(
    network: &Network,
    x: &Matrix,
    targets: &[f64],
    lambda: f64,
) -> Result<Vec<f64>, NumError> {
    let (jtj, jtr, _) = normal_equations(network, x, targets);
    solve_spd(&jtj, &jtr, lambda)
}

fn normal_equations(network: &Network, x: &Matrix, targets: &[f64]) -> (Matrix, Vec<f64>, f64) {
    let n = x.rows();
    let d = network.param_count();
    let mut j = Matrix::zeros(n, d);
    let mut r = vec![0.0; n];
    for i in 0..n {
        let (out, g) = network.output_and_grad(x.row(i));
        r[i] = out - targets[i];
        j.row_mut(i).copy_from_slice(&g);
    }
    let jtj = j.gram();
    let mut jtr = vec![0.0; d];
    for i in 0..n {
        let ri = r[i];
        if ri == 0.0 {
            continue;
        }
        for (acc, v) in jtr.iter_mut().zip(j.row(i)) {
            *acc += v * ri;
        }
    }
    let sse = r.iter().map(|v| v * v).sum();
    (jtj, jtr, sse)
}

const LM_LAMBDA_CEILING: f64 = 1e10;
const LM_GRADIENT_FLOOR: f64 = 1e-8;

/// Levenberg-Marquardt: accepted steps strictly decrease the loss and relax
/// the damping; rejected steps tighten it. Stops on the epoch budget, a
/// vanative gradient, or the damping ceiling.
pub fn train_lm(
    network: &mut Network,
    x: &Matrix,
    targets: &[f64],
    lambda0: f64,
    factor: f64,
    max_epochs: usize,
) -> Result<LmOutcome, ClassifierError> {
    let mut lambda = lambda0;
    let mut accepted_steps = 0usize;
    let (mut jtj, mut jtr, mut sse) = normal_equations(network, x, targets);
    if !sse.is_finite() {
        return Err(ClassifierError::NonFiniteLoss { epoch: 0 });
    }
    let n = x.rows() as f64;
    for epoch in 1..=max_epochs {
        let grad_norm = jtr.iter().map(|v| v * v).sum::<f64>().sqrt();
        if grad_norm < LM_GRADIENT_FLOOR {
            return Ok(LmOutcome {
                final_loss: sse / n,
                accepted_steps,
                converged: true,
            });
        }
        let step = match solve_spd(&jtj, &jtr, lambda) {
            Ok(s) => s,
            Err(NumError::NotPositiveDefinite { .. }) => {
                lambda *= factor;
                if lambda > LM_LAMBDA_CEILING {
                    return Ok(LmOutcome {
                        final_loss: sse / n,
                        accepted_steps,
                        converged: true,
                    });
                }
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        let old_params = network.params();
        let trial: Vec<f64> = old_params.iter().zip(&step).map(|(p, s)| p - s).collect();
        network.set_params(&trial);
        let (t_jtj, t_jtr, t_sse) = normal_equations(network, x, targets);
        if t_sse.is_finite() && t_sse < sse {
            // accepted: keep the move, relax damping
            accepted_steps += 1;
            lambda /= factor;
            jtj = t_jtj;
            jtr = t_jtr;
            sse = t_sse;
        } else {
            // rejected: restore and tighten damping
            network.set_params(&old_params);
            lambda *= factor;
            if lambda > LM_LAMBDA_CEILING {
                return Ok(LmOutcome {
                    final_loss: sse / n,
                    accepted_steps,
                    converged: true,
                });
            }
        }
        let _ = epoch;
    }
    Ok(LmOutcome {
        final_loss: sse / n,
        accepted_steps,
        converged: false,
    })
}

pub fn fit_gd(x: &FeatureMatrix, params: &NnParams, seed: u64) -> Result<Network, ClassifierError> {
    let mut rng = Rng::seed_from_u64(seed);
    let sizes = [x.n_features(), params.hidden_units, 1];
    let mut network = Network::init(&sizes, params.activation, &mut rng);
    let targets = x.binary_labels();
    train_gd(
        &mut network,
        &x.values,
        &targets,
        params.learning_rate,
        params.gd_max_epochs,
    )?;
    Ok(network)
}

pub fn fit_lm(
    x: &FeatureMatrix,
    params: &NnParams,
    seed: u64,
) -> Result<(Network, bool), ClassifierError> {
    let mut rng = Rng::seed_from_u64(seed);
    let sizes = [x.n_features(), params.hidden_units, 1];
    let mut network = Network::init(&sizes, params.activation, &mut rng);
    let targets = x.binary_labels();
    let outcome = train_lm(
        &mut network,
        &x.values,
        &targets,
        params.lm_damping,
        params.lm_factor,
        params.lm_max_epochs,
    )?;
    Ok((network, outcome.converged))
}
