//! Classifier architectures, cross-entropy gradients, and evaluation.
//!
//! Both desk-scale architectures expose their parameters as one flat vector
//! so the over-the-air path never cares what the model looks like:
//!
//! - multinomial logistic regression: `W (classes x dim)` then `b`;
//! - one-hidden-layer MLP with tanh: `U (hidden x dim)`, `c`, then
//!   `W (classes x hidden)`, `b`.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;
use rand::Rng;

use super::{standard_normal, Dataset, LearningError};
use crate::oac::SignVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Architecture {
    Logistic { input_dim: usize, classes: usize },
    Mlp { input_dim: usize, hidden: usize, classes: usize },
}

impl Architecture {
    pub fn param_count(&self) -> usize {
        match *self {
            Architecture::Logistic { input_dim, classes } => classes * (input_dim + 1),
            Architecture::Mlp { input_dim, hidden, classes } => {
                hidden * (input_dim + 1) + classes * (hidden + 1)
            }
        }
    }

    pub fn classes(&self) -> usize {
        match *self {
            Architecture::Logistic { classes, .. } | Architecture::Mlp { classes, .. } => classes,
        }
    }

    pub fn input_dim(&self) -> usize {
        match *self {
            Architecture::Logistic { input_dim, .. } | Architecture::Mlp { input_dim, .. } => {
                input_dim
            }
        }
    }
}

/// A model: its architecture descriptor plus the flat parameter vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelState {
    pub arch: Architecture,
    pub weights: Vec<f64>,
}

impl ModelState {
    pub fn new(arch: Architecture, weights: Vec<f64>) -> Result<Self, LearningError> {
        if weights.len() != arch.param_count() {
            return Err(LearningError::ParamCountMismatch {
                expected: arch.param_count(),
                got: weights.len(),
            });
        }
        Ok(Self { arch, weights })
    }

    pub fn param_count(&self) -> usize {
        self.weights.len()
    }
}

/// Initializes parameters as `scale * N(0, 1)` draws.
pub fn init_model<R: Rng>(arch: Architecture, scale: f64, rng: &mut R) -> ModelState {
    let weights = (0..arch.param_count())
        .map(|_| scale * standard_normal(rng))
        .collect();
    ModelState { arch, weights }
}

/// Class scores for one sample.
fn logits(model: &ModelState, x: &[f64]) -> Vec<f64> {
    match model.arch {
        Architecture::Logistic { input_dim, classes } => {
            let (w, b) = model.weights.split_at(classes * input_dim);
            (0..classes)
                .map(|c| {
                    b[c] + w[c * input_dim..(c + 1) * input_dim]
                        .iter()
                        .zip(x)
                        .map(|(wi, xi)| wi * xi)
                        .sum::<f64>()
                })
                .collect()
        }
        Architecture::Mlp { input_dim, hidden, classes } => {
            let a = hidden_activations(model, x, input_dim, hidden);
            let off = hidden * (input_dim + 1);
            let w = &model.weights[off..off + classes * hidden];
            let b = &model.weights[off + classes * hidden..];
            (0..classes)
                .map(|c| {
                    b[c] + w[c * hidden..(c + 1) * hidden]
                        .iter()
                        .zip(&a)
                        .map(|(wi, ai)| wi * ai)
                        .sum::<f64>()
                })
                .collect()
        }
    }
}

fn hidden_activations(model: &ModelState, x: &[f64], input_dim: usize, hidden: usize) -> Vec<f64> {
    let u = &model.weights[..hidden * input_dim];
    let c = &model.weights[hidden * input_dim..hidden * (input_dim + 1)];
    (0..hidden)
        .map(|h| {
            (c[h] + u[h * input_dim..(h + 1) * input_dim]
                .iter()
                .zip(x)
                .map(|(ui, xi)| ui * xi)
                .sum::<f64>())
            .tanh()
        })
        .collect()
}

fn softmax(mut z: Vec<f64>) -> Vec<f64> {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut total = 0.0;
    for v in z.iter_mut() {
        *v = (*v - max).exp();
        total += *v;
    }
    for v in z.iter_mut() {
        *v /= total;
    }
    z
}

/// Mean cross-entropy loss over the indexed batch.
pub fn batch_loss(
    model: &ModelState,
    ds: &Dataset,
    indices: &[usize],
) -> Result<f64, LearningError> {
    if indices.is_empty() || indices.iter().any(|&i| i >= ds.len()) {
        return Err(LearningError::BadBatch);
    }
    let mut total = 0.0;
    for &i in indices {
        let p = softmax(logits(model, &ds.samples[i]));
        total -= p[ds.labels[i]].max(1e-300).ln();
    }
    Ok(total / indices.len() as f64)
}

/// Mean cross-entropy gradient over the indexed batch, flattened in the
/// same layout as the parameter vector.
pub fn stochastic_gradient(
    model: &ModelState,
    ds: &Dataset,
    indices: &[usize],
) -> Result<Vec<f64>, LearningError> {
    if indices.is_empty() || indices.iter().any(|&i| i >= ds.len()) {
        return Err(LearningError::BadBatch);
    }
    let mut grad = vec![0.0; model.param_count()];
    let scale = 1.0 / indices.len() as f64;
    for &i in indices {
        let x = &ds.samples[i];
        let y = ds.labels[i];
        match model.arch {
            Architecture::Logistic { input_dim, classes } => {
                let mut dz = softmax(logits(model, x));
                dz[y] -= 1.0;
                let (gw, gb) = grad.split_at_mut(classes * input_dim);
                for c in 0..classes {
                    let row = &mut gw[c * input_dim..(c + 1) * input_dim];
                    for (g, xi) in row.iter_mut().zip(x) {
                        *g += scale * dz[c] * xi;
                    }
                    gb[c] += scale * dz[c];
                }
            }
            Architecture::Mlp { input_dim, hidden, classes } => {
                let a = hidden_activations(model, x, input_dim, hidden);
                let off = hidden * (input_dim + 1);
                let w = &model.weights[off..off + classes * hidden];
                let mut dz = softmax(logits(model, x));
                dz[y] -= 1.0;
                // Backprop through the output layer.
                let mut da = vec![0.0; hidden];
                for c in 0..classes {
                    for h in 0..hidden {
                        da[h] += w[c * hidden + h] * dz[c];
                    }
                }
                // tanh' = 1 - a^2.
                let dpre: Vec<f64> = da.iter().zip(&a).map(|(d, ai)| d * (1.0 - ai * ai)).collect();
                for h in 0..hidden {
                    let row = &mut grad[h * input_dim..(h + 1) * input_dim];
                    for (g, xi) in row.iter_mut().zip(x) {
                        *g += scale * dpre[h] * xi;
                    }
                    grad[hidden * input_dim + h] += scale * dpre[h];
                }
                for c in 0..classes {
                    let row = &mut grad[off + c * hidden..off + (c + 1) * hidden];
                    for (g, ai) in row.iter_mut().zip(&a) {
                        *g += scale * dz[c] * ai;
                    }
                    grad[off + classes * hidden + c] += scale * dz[c];
                }
            }
        }
    }
    Ok(grad)
}

/// Sign-SGD step: `w <- w - eta * vote` per component.
pub fn apply_update(
    model: &mut ModelState,
    eta: f64,
    votes: &SignVector,
) -> Result<(), LearningError> {
    if votes.len() != model.param_count() {
        return Err(LearningError::UpdateLengthMismatch {
            expected: model.param_count(),
            got: votes.len(),
        });
    }
    for (w, &v) in model.weights.iter_mut().zip(votes.values()) {
        *w -= eta * v as f64;
    }
    Ok(())
}

/// Fraction of correct argmax predictions, optionally restricted to samples
/// whose label is in `label_filter` (the personalized accuracy).
pub fn evaluate(
    model: &ModelState,
    test: &Dataset,
    label_filter: Option<&BTreeSet<usize>>,
) -> Result<f64, LearningError> {
    let mut seen = 0usize;
    let mut correct = 0usize;
    for (x, &y) in test.samples.iter().zip(&test.labels) {
        if let Some(filter) = label_filter {
            if !filter.contains(&y) {
                continue;
            }
        }
        seen += 1;
        let z = logits(model, x);
        let best = z
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).expect("non-finite logit"))
            .map(|(c, _)| c)
            .expect("at least one class");
        if best == y {
            correct += 1;
        }
    }
    if seen == 0 {
        return Err(LearningError::EmptyAfterFilter);
    }
    Ok(correct as f64 / seen as f64)
}
