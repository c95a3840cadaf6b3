//! Mini-batch SGD training loop with deterministic shuffling.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::init::{labels, rng_stream};
use crate::matrix::DenseMatrix;

use super::data::{TaskDataset, TaskKind};
use super::metrics::{iou, psnr, MetricsHistory};
use super::model::Model;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    Mse,
    /// Binary cross-entropy on logits.
    Bce,
}

impl FromStr for LossKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mse" => Ok(LossKind::Mse),
            "bce" => Ok(LossKind::Bce),
            other => Err(Error::InvalidModelSpec(format!("unknown loss `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub seed: u64,
    pub loss: LossKind,
}

impl TrainConfig {
    /// Task defaults: 200 epochs at learning rate 0.1 with ~64 SGD steps per
    /// epoch. Tiny-initialized factor pairs escape their flat start at a
    /// rate set by `lr * steps`, so the default batch scales with the
    /// dataset to keep that schedule consistent across grid sizes.
    pub fn for_task(kind: TaskKind, dataset_len: usize, seed: u64) -> Self {
        let batch_size = (dataset_len / 64).clamp(16, 4096).min(dataset_len.max(1));
        TrainConfig {
            epochs: 200,
            learning_rate: 0.1,
            batch_size,
            seed,
            loss: match kind {
                TaskKind::Occupancy => LossKind::Bce,
                TaskKind::ImageFit => LossKind::Mse,
            },
        }
    }
}

/// Mean-over-batch loss value and its gradient at the prediction matrix.
pub(crate) fn loss_value_and_grad(
    kind: LossKind,
    pred: &DenseMatrix,
    targets: &DenseMatrix,
) -> Result<(f64, DenseMatrix)> {
    if pred.shape() != targets.shape() {
        return Err(Error::ShapeMismatch {
            pred: pred.entries().len(),
            target: targets.entries().len(),
        });
    }
    let b = pred.cols() as f64;
    let mut grad = Vec::with_capacity(pred.entries().len());
    let mut value = 0.0;
    match kind {
        LossKind::Mse => {
            for (&p, &t) in pred.entries().iter().zip(targets.entries()) {
                let d = p - t;
                value += d * d;
                grad.push(2.0 * d / b);
            }
        }
        LossKind::Bce => {
            for (&z, &t) in pred.entries().iter().zip(targets.entries()) {
                // stable logits form: max(z, 0) - z t + ln(1 + exp(-|z|))
                value += z.max(0.0) - z * t + (-z.abs()).exp().ln_1p();
                let sig = if z >= 0.0 {
                    1.0 / (1.0 + (-z).exp())
                } else {
                    let e = z.exp();
                    e / (1.0 + e)
                };
                grad.push((sig - t) / b);
            }
        }
    }
    value /= b;
    let grad = DenseMatrix::from_vec_unchecked(pred.rows(), pred.cols(), grad);
    Ok((value, grad))
}

/// Trains in place with plain mini-batch SGD and returns the loss history
/// plus the final task metric (PSNR for images, IoU for occupancy).
///
/// Shuffling, batching, and updates are all driven by the config seed, so a
/// run is bitwise reproducible. A non-finite loss aborts with the partial
/// history attached to the error.
pub fn train(model: &mut Model, data: &TaskDataset, cfg: &TrainConfig) -> Result<MetricsHistory> {
    let n = data.len();
    if cfg.batch_size == 0 || cfg.batch_size > n {
        return Err(Error::InvalidModelSpec(format!(
            "batch_size {} must be in 1..={n}",
            cfg.batch_size
        )));
    }
    if data.dim() != model.in_dim() {
        return Err(Error::DimensionMismatch {
            context: "dataset dim vs model input",
            left: (data.dim(), 1),
            right: (model.in_dim(), 1),
        });
    }
    let mut rng = rng_stream(cfg.seed, labels::SHUFFLE);
    let mut order: Vec<usize> = (0..n).collect();
    let mut history = Vec::with_capacity(cfg.epochs);

    for epoch in 0..cfg.epochs {
        // Fisher-Yates from the shuffle stream
        for i in (1..n).rev() {
            let j = rand::Rng::random_range(&mut rng, 0..=i);
            order.swap(i, j);
        }
        let mut epoch_loss = 0.0;
        for chunk in order.chunks(cfg.batch_size) {
            let (x, t) = gather_batch(data, chunk);
            let (loss, grads) = match model.loss_and_grads(&x, &t, cfg.loss) {
                Ok(ok) => ok,
                Err(Error::NonFiniteLoss { .. }) => {
                    return Err(non_finite(epoch, history, model, data));
                }
                Err(e) => return Err(e),
            };
            if !loss.is_finite() {
                return Err(non_finite(epoch, history, model, data));
            }
            model.apply_sgd(&grads, cfg.learning_rate);
            epoch_loss += loss * chunk.len() as f64;
        }
        let mean = epoch_loss / n as f64;
        if !mean.is_finite() {
            return Err(non_finite(epoch, history, model, data));
        }
        history.push(mean);
    }

    let preds = predict_all(model, data)?;
    let mut result = MetricsHistory {
        loss: history,
        final_psnr: None,
        final_iou: None,
        param_count: model.param_count(),
        compression_rate: model.compression_rate(),
    };
    match data.task_kind {
        TaskKind::ImageFit => result.final_psnr = Some(psnr(&preds, data.targets())?),
        TaskKind::Occupancy => result.final_iou = Some(iou(&preds, data.targets(), 0.5)?),
    }
    Ok(result)
}

fn non_finite(
    epoch: usize,
    history: Vec<f64>,
    model: &Model,
    _data: &TaskDataset,
) -> Error {
    Error::NonFiniteLoss {
        epoch,
        partial: MetricsHistory {
            loss: history,
            final_psnr: None,
            final_iou: None,
            param_count: model.param_count(),
            compression_rate: model.compression_rate(),
        },
    }
}

fn gather_batch(data: &TaskDataset, idx: &[usize]) -> (DenseMatrix, DenseMatrix) {
    let dim = data.dim();
    let b = idx.len();
    let mut x = vec![0.0; dim * b];
    let mut t = vec![0.0; b];
    for (col, &i) in idx.iter().enumerate() {
        let input = data.input(i);
        for (row, &v) in input.iter().enumerate() {
            x[row * b + col] = v;
        }
        t[col] = data.targets()[i];
    }
    (
        DenseMatrix::from_vec_unchecked(dim, b, x),
        DenseMatrix::from_vec_unchecked(1, b, t),
    )
}

/// Model predictions over the whole dataset, in dataset order.
pub fn predict_all(model: &Model, data: &TaskDataset) -> Result<Vec<f64>> {
    let n = data.len();
    let dim = data.dim();
    let chunk = 8192.min(n);
    let mut out = Vec::with_capacity(n);
    let mut start = 0;
    while start < n {
        let end = (start + chunk).min(n);
        let b = end - start;
        let mut x = vec![0.0; dim * b];
        for col in 0..b {
            let input = data.input(start + col);
            for (row, &v) in input.iter().enumerate() {
                x[row * b + col] = v;
            }
        }
        let batch = DenseMatrix::from_vec_unchecked(dim, b, x);
        let pred = model.forward_batch(&batch)?;
        out.extend_from_slice(pred.row(0));
        start = end;
    }
    Ok(out)
}
