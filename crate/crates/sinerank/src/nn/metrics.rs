//! Reconstruction metrics and the per-run training record.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::CsvTable;

/// Peak signal-to-noise ratio in dB for targets in `[0, 1]`.
/// A zero-MSE match reports the capped sentinel 99.0.
pub fn psnr(pred: &[f64], target: &[f64]) -> Result<f64> {
    if pred.len() != target.len() || pred.is_empty() {
        return Err(Error::ShapeMismatch {
            pred: pred.len(),
            target: target.len(),
        });
    }
    let mse = pred
        .iter()
        .zip(target)
        .map(|(p, t)| (p - t) * (p - t))
        .sum::<f64>()
        / pred.len() as f64;
    if mse == 0.0 {
        Ok(99.0)
    } else {
        Ok(10.0 * (1.0 / mse).log10())
    }
}

/// Intersection over union of thresholded logits against binary targets.
/// Occupancy is `sigmoid(logit) > threshold`; both-empty scores 1.0.
pub fn iou(pred_logits: &[f64], target_bits: &[f64], threshold: f64) -> Result<f64> {
    if pred_logits.len() != target_bits.len() {
        return Err(Error::ShapeMismatch {
            pred: pred_logits.len(),
            target: target_bits.len(),
        });
    }
    // sigmoid(z) > threshold  <=>  z > logit(threshold)
    let cut = (threshold / (1.0 - threshold)).ln();
    let mut inter = 0usize;
    let mut union = 0usize;
    for (&z, &t) in pred_logits.iter().zip(target_bits) {
        let p = z > cut;
        let t = t == 1.0;
        if p && t {
            inter += 1;
        }
        if p || t {
            union += 1;
        }
    }
    if union == 0 {
        Ok(1.0)
    } else {
        Ok(inter as f64 / union as f64)
    }
}

/// Per-epoch losses plus the final task metric and size accounting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsHistory {
    pub loss: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_psnr: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_iou: Option<f64>,
    pub param_count: usize,
    pub compression_rate: f64,
}

impl MetricsHistory {
    /// The task metric regardless of kind (PSNR for images, IoU for volumes).
    pub fn final_metric(&self) -> Option<f64> {
        self.final_psnr.or(self.final_iou)
    }

    /// `epoch,loss` rows.
    pub fn loss_csv(&self) -> String {
        let mut t = CsvTable::new(&["epoch", "loss"]);
        for (epoch, loss) in self.loss.iter().enumerate() {
            t.row(&[epoch.to_string(), loss.to_string()]);
        }
        t.finish()
    }
}
