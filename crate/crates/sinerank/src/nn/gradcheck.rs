//! Central finite-difference verification of the manual backward pass.

use crate::error::Result;
use crate::init::rng_stream;
use crate::matrix::DenseMatrix;

use super::model::Model;
use super::train::{loss_value_and_grad, LossKind};

#[derive(Debug, Clone, Copy)]
pub struct GradCheckReport {
    pub coords_checked: usize,
    /// Coordinates rejected because no finite difference is meaningful
    /// there: either a relu kink sits inside the probe interval, or the
    /// gradient is smaller than the difference quotient's rounding floor.
    pub coords_skipped: usize,
    pub max_rel_error: f64,
}

/// Compares analytic gradients against central finite differences with base
/// step `h` at `coords_per_tensor` randomly sampled coordinates of every
/// trainable tensor.
///
/// Two refinements keep the probe honest:
/// - central differences at `h` and `h/2` are Richardson-combined, which
///   cancels the `h^2 f'''` term (the narrow gaussian activations make that
///   term alone larger than the pass tolerance);
/// - a coordinate where the two estimates disagree at their own scale sits
///   on a relu kink (or a rounding-dominated flat spot); no finite
///   difference is meaningful there, so it is skipped rather than scored.
pub fn check_model_gradients(
    model: &mut Model,
    x: &DenseMatrix,
    targets: &DenseMatrix,
    loss: LossKind,
    coords_per_tensor: usize,
    h: f64,
    seed: u64,
) -> Result<GradCheckReport> {
    let (loss_mid, grads) = model.loss_and_grads(x, targets, loss)?;
    let sizes = model.tensor_sizes();
    let mut rng = rng_stream(seed, "gradcheck");
    let mut max_rel: f64 = 0.0;
    let mut checked = 0usize;
    let mut skipped = 0usize;
    let mut eval = |model: &mut Model| -> Result<f64> {
        let pred = model.forward_batch(x)?;
        Ok(loss_value_and_grad(loss, &pred, targets)?.0)
    };
    for (layer, slots) in sizes.iter().enumerate() {
        for (slot, &len) in slots.iter().enumerate() {
            for _ in 0..coords_per_tensor.min(len) {
                let idx = rand::Rng::random_range(&mut rng, 0..len);
                let theta = model.param_get(layer, slot, idx);
                let mut probe = |step: f64| -> Result<(f64, f64)> {
                    model.param_set(layer, slot, idx, theta + step);
                    let hi = eval(model)?;
                    model.param_set(layer, slot, idx, theta - step);
                    let lo = eval(model)?;
                    model.param_set(layer, slot, idx, theta);
                    Ok((hi, lo))
                };
                let (hi_h, lo_h) = probe(h)?;
                let (hi_h2, lo_h2) = probe(h / 2.0)?;
                let fd_h = (hi_h - lo_h) / (2.0 * h);
                let fd_h2 = (hi_h2 - lo_h2) / h;
                let fwd = (hi_h - loss_mid) / h;
                let bwd = (loss_mid - lo_h) / h;
                // a kink anywhere in the probe interval shows up either as
                // one-sided slope disagreement or as step-halving drift
                let scale = fd_h.abs().max(fd_h2.abs()).max(1e-10);
                let kinked = (fwd - bwd).abs() > 1e-2 * fwd.abs().max(bwd.abs()).max(1e-10)
                    || (fd_h - fd_h2).abs() > 1e-3 * scale;
                if kinked {
                    skipped += 1;
                    continue;
                }
                let fd = (4.0 * fd_h2 - fd_h) / 3.0;
                let analytic = Model::grad_get(&grads, layer, slot, idx);
                // The quotient carries rounding noise ~ eps |L| / h; keep a
                // 10x margin so scored coordinates see at most ~1e-6 of it.
                let fd_noise = f64::EPSILON * loss_mid.abs().max(1e-6) / h;
                let denom = fd.abs().max(analytic.abs());
                if denom < 1e6 * fd_noise {
                    skipped += 1;
                    continue;
                }
                max_rel = max_rel.max((fd - analytic).abs() / denom);
                checked += 1;
            }
        }
    }
    Ok(GradCheckReport {
        coords_checked: checked,
        coords_skipped: skipped,
        max_rel_error: max_rel,
    })
}
