//! Fully-connected coordinate networks with dense and low-rank layers,
//! differentiated by hand.
//!
//! Batches are matrices with samples as columns: a layer maps `X` (in x B)
//! to `phi(W_eff X + b 1^T)`. For a sine low-rank layer the effective weight
//! is `sin(omega U V^T) / g`, materialized once per step; its factor
//! gradients follow the chain rule through the elementwise sine:
//!
//! ```text
//! G  = dL/dZ X^T                 (gradient at the effective weight)
//! dM = (omega / g) cos(omega M) . G     with M = U V^T
//! dU = dM V,   dV = dM^T U
//! ```
//!
//! `omega` and `g` are fixed: they receive no gradient and never move.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::init::{labels, rng_stream, sample_uniform};
use crate::matrix::{gemm, DenseMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LayerKind {
    Dense,
    LowrankPlain,
    LowrankSine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Gaussian,
    Relu,
    SineAct,
    None,
}

/// One layer description. `k` applies to the low-rank kinds, `omega` to the
/// sine kind, `gaussian_width` to the gaussian activation (default 0.1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LayerSpec {
    pub in_dim: usize,
    pub out_dim: usize,
    pub kind: LayerKind,
    pub k: Option<usize>,
    pub omega: Option<f64>,
    pub activation: Activation,
    pub gaussian_width: Option<f64>,
}

impl LayerSpec {
    pub fn dense(in_dim: usize, out_dim: usize, activation: Activation) -> Self {
        LayerSpec {
            in_dim,
            out_dim,
            kind: LayerKind::Dense,
            k: None,
            omega: None,
            activation,
            gaussian_width: None,
        }
    }

    pub fn lowrank(
        in_dim: usize,
        out_dim: usize,
        k: usize,
        omega: Option<f64>,
        sine: bool,
        activation: Activation,
    ) -> Self {
        LayerSpec {
            in_dim,
            out_dim,
            kind: if sine {
                LayerKind::LowrankSine
            } else {
                LayerKind::LowrankPlain
            },
            k: Some(k),
            omega,
            activation,
            gaussian_width: None,
        }
    }
}

/// Frequency defaults per rank, used when a sine layer spec leaves `omega`
/// unset: 200, 100, 50, 20 for ranks 1, 2, 3-5, and above.
pub fn default_omega_for_rank(k: usize) -> f64 {
    match k {
        0 | 1 => 200.0,
        2 => 100.0,
        3..=5 => 50.0,
        _ => 20.0,
    }
}

const DEFAULT_GAUSSIAN_WIDTH: f64 = 0.1;

#[derive(Debug, Clone)]
pub(crate) enum Weights {
    Dense {
        w: DenseMatrix,
        b: Vec<f64>,
    },
    LowRank {
        u: DenseMatrix,
        v: DenseMatrix,
        b: Vec<f64>,
        omega: f64,
        gain: f64,
        sine: bool,
    },
}

#[derive(Debug, Clone)]
pub(crate) struct Layer {
    pub(crate) weights: Weights,
    pub(crate) activation: Activation,
    pub(crate) gaussian_width: f64,
}

/// A trainable stack of layers.
#[derive(Debug, Clone)]
pub struct Model {
    pub(crate) layers: Vec<Layer>,
    specs: Vec<LayerSpec>,
}

/// Per-layer parameter gradients, mirroring the trainable tensors. The fixed
/// `omega` and `gain` have no slots here by construction.
#[derive(Debug, Clone)]
pub enum TensorGrads {
    Dense {
        dw: DenseMatrix,
        db: Vec<f64>,
    },
    LowRank {
        du: DenseMatrix,
        dv: DenseMatrix,
        db: Vec<f64>,
    },
}

struct LayerCache {
    pre: DenseMatrix,
    /// `(omega / g) cos(omega M)` for sine layers: the elementwise factor
    /// that maps the effective-weight gradient to the product gradient.
    dcoef: Option<DenseMatrix>,
    /// Materialized effective weight for sine layers.
    effective: Option<DenseMatrix>,
}

/// Builds a model from chained layer specs, deterministically from `seed`.
///
/// Dense weights are Kaiming-uniform over the input fan; low-rank factors are
/// `U(-1/N, 1/N)` with `N` = the layer's input width; biases start at zero.
/// The final layer must use no activation (it produces logits or raw values).
pub fn build_model(specs: &[LayerSpec], seed: u64) -> Result<Model> {
    if specs.is_empty() {
        return Err(Error::InvalidModelSpec("no layers".into()));
    }
    for (i, pair) in specs.windows(2).enumerate() {
        if pair[0].out_dim != pair[1].in_dim {
            return Err(Error::DimChainMismatch {
                index: i,
                out: pair[0].out_dim,
                next_in: pair[1].in_dim,
            });
        }
    }
    if specs.last().unwrap().activation != Activation::None {
        return Err(Error::InvalidModelSpec(
            "final layer must use activation `none`".into(),
        ));
    }
    let mut rng = rng_stream(seed, labels::INIT);
    let mut layers = Vec::with_capacity(specs.len());
    for spec in specs {
        let (m, n) = (spec.out_dim, spec.in_dim);
        if m == 0 || n == 0 {
            return Err(Error::EmptyShape { rows: m, cols: n });
        }
        let weights = match spec.kind {
            LayerKind::Dense => {
                let bound = (6.0 / n as f64).sqrt();
                let w = sample_uniform(m, n, bound, &mut rng);
                Weights::Dense { w, b: vec![0.0; m] }
            }
            LayerKind::LowrankPlain | LayerKind::LowrankSine => {
                let k = spec
                    .k
                    .ok_or_else(|| Error::InvalidModelSpec("low-rank layer missing k".into()))?;
                if k < 1 || k > m.min(n) {
                    return Err(Error::InvalidRank { k, m, n });
                }
                let sine = spec.kind == LayerKind::LowrankSine;
                let omega = if sine {
                    spec.omega.unwrap_or_else(|| default_omega_for_rank(k))
                } else {
                    0.0
                };
                let bound = 1.0 / n as f64;
                let u = sample_uniform(m, k, bound, &mut rng);
                let v = sample_uniform(n, k, bound, &mut rng);
                Weights::LowRank {
                    u,
                    v,
                    b: vec![0.0; m],
                    omega,
                    gain: (n as f64).sqrt(),
                    sine,
                }
            }
        };
        let gaussian_width = spec.gaussian_width.unwrap_or(DEFAULT_GAUSSIAN_WIDTH);
        if gaussian_width <= 0.0 {
            return Err(Error::InvalidModelSpec(
                "gaussian width must be positive".into(),
            ));
        }
        layers.push(Layer {
            weights,
            activation: spec.activation,
            gaussian_width,
        });
    }
    Ok(Model {
        layers,
        specs: specs.to_vec(),
    })
}

impl Model {
    pub fn specs(&self) -> &[LayerSpec] {
        &self.specs
    }

    pub fn in_dim(&self) -> usize {
        self.specs[0].in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.specs.last().unwrap().out_dim
    }

    /// Trainable parameter count across all layers.
    pub fn param_count(&self) -> usize {
        self.layers
            .iter()
            .map(|l| match &l.weights {
                Weights::Dense { w, b } => w.rows() * w.cols() + b.len(),
                Weights::LowRank { u, v, b, .. } => {
                    u.rows() * u.cols() + v.rows() * v.cols() + b.len()
                }
            })
            .sum()
    }

    /// Parameters relative to the all-dense model of the same shape.
    pub fn compression_rate(&self) -> f64 {
        let dense: usize = self
            .specs
            .iter()
            .map(|s| s.out_dim * s.in_dim + s.out_dim)
            .sum();
        self.param_count() as f64 / dense as f64
    }

    /// Effective weight of one layer (dense weight, `U V^T`, or the sine map).
    pub fn effective_weight(&self, layer: usize) -> DenseMatrix {
        match &self.layers[layer].weights {
            Weights::Dense { w, .. } => w.clone(),
            Weights::LowRank {
                u, v, omega, gain, sine, ..
            } => {
                let product = u.matmul(&v.transpose()).expect("validated shapes");
                if *sine {
                    product.sine_modulate(*omega).scaled(1.0 / *gain)
                } else {
                    product
                }
            }
        }
    }

    /// Single-sample forward pass returning the full output vector.
    pub fn forward_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.in_dim() {
            return Err(Error::DimensionMismatch {
                context: "model input",
                left: (self.in_dim(), 1),
                right: (x.len(), 1),
            });
        }
        let batch = DenseMatrix::new(x.len(), 1, x.to_vec())?;
        let out = self.forward_batch(&batch)?;
        Ok(out.entries().to_vec())
    }

    /// Single-sample scalar prediction (the models here end in one output).
    pub fn forward_model(&self, x: &[f64]) -> Result<f64> {
        let y = self.forward_vec(x)?;
        if y.len() != 1 {
            return Err(Error::InvalidModelSpec(format!(
                "scalar forward on a model with {} outputs",
                y.len()
            )));
        }
        Ok(y[0])
    }

    /// Batched inference; columns are samples.
    pub fn forward_batch(&self, x: &DenseMatrix) -> Result<DenseMatrix> {
        let (mut acts, _) = self.forward_batch_cached(x, false)?;
        Ok(acts.pop().unwrap())
    }

    /// Effective sine weight plus the backward coefficient `(w/g) cos(w M)`,
    /// both from a single fused pass over the product entries.
    fn sine_effective_and_dcoef(
        u: &DenseMatrix,
        v: &DenseMatrix,
        omega: f64,
        gain: f64,
    ) -> (DenseMatrix, DenseMatrix) {
        let product = u.matmul(&v.transpose()).expect("validated shapes");
        let inv_gain = 1.0 / gain;
        let dscale = omega * inv_gain;
        let n = product.entries().len();
        let mut eff = Vec::with_capacity(n);
        let mut dcoef = Vec::with_capacity(n);
        for &m in product.entries() {
            let (s, c) = (omega * m).sin_cos();
            eff.push(s * inv_gain);
            dcoef.push(c * dscale);
        }
        let (rows, cols) = product.shape();
        (
            DenseMatrix::from_vec_unchecked(rows, cols, eff),
            DenseMatrix::from_vec_unchecked(rows, cols, dcoef),
        )
    }

    /// Runs the stack, returning the activation chain (input first, output
    /// last) and per-layer cache entries when requested.
    fn forward_batch_cached(
        &self,
        x: &DenseMatrix,
        keep_cache: bool,
    ) -> Result<(Vec<DenseMatrix>, Vec<LayerCache>)> {
        if x.rows() != self.in_dim() {
            return Err(Error::DimensionMismatch {
                context: "batch input rows",
                left: (self.in_dim(), 0),
                right: x.shape(),
            });
        }
        let batch = x.cols();
        let mut caches = Vec::with_capacity(if keep_cache { self.layers.len() } else { 0 });
        let mut acts: Vec<DenseMatrix> = Vec::with_capacity(self.layers.len() + 1);
        acts.push(x.clone());
        for layer in &self.layers {
            let current = acts.last().unwrap();
            let (pre, dcoef, effective) = match &layer.weights {
                Weights::Dense { w, b } => {
                    let mut z = DenseMatrix::zeros(w.rows(), batch);
                    gemm(1.0, w, false, current, false, 0.0, &mut z);
                    add_bias_rows(&mut z, b);
                    (z, None, None)
                }
                Weights::LowRank {
                    u,
                    v,
                    b,
                    omega,
                    gain,
                    sine,
                } => {
                    if *sine {
                        let (effective, dcoef) =
                            Self::sine_effective_and_dcoef(u, v, *omega, *gain);
                        let mut z = DenseMatrix::zeros(u.rows(), batch);
                        gemm(1.0, &effective, false, current, false, 0.0, &mut z);
                        add_bias_rows(&mut z, b);
                        (z, Some(dcoef), Some(effective))
                    } else {
                        // factored path: U (V^T X)
                        let mut vtx = DenseMatrix::zeros(v.cols(), batch);
                        gemm(1.0, v, true, current, false, 0.0, &mut vtx);
                        let mut z = DenseMatrix::zeros(u.rows(), batch);
                        gemm(1.0, u, false, &vtx, false, 0.0, &mut z);
                        add_bias_rows(&mut z, b);
                        (z, None, None)
                    }
                }
            };
            let post = apply_activation(&pre, layer.activation, layer.gaussian_width);
            if keep_cache {
                caches.push(LayerCache {
                    pre,
                    dcoef,
                    effective,
                });
            }
            acts.push(post);
        }
        Ok((acts, caches))
    }

    /// Forward + loss + manual backward over a batch. Returns the loss and
    /// one gradient block per layer.
    pub fn loss_and_grads(
        &self,
        x: &DenseMatrix,
        targets: &DenseMatrix,
        loss: super::train::LossKind,
    ) -> Result<(f64, Vec<TensorGrads>)> {
        let (acts, caches) = self.forward_batch_cached(x, true)?;
        let pred = acts.last().unwrap();
        let (value, mut d_out) = super::train::loss_value_and_grad(loss, pred, targets)?;
        let mut grads: Vec<TensorGrads> = Vec::with_capacity(self.layers.len());
        for (idx, layer) in self.layers.iter().enumerate().rev() {
            let cache = &caches[idx];
            let input = &acts[idx];
            let post = &acts[idx + 1];
            // d_out is dL/d(post); convert to dL/d(pre) through the activation.
            let dz = activation_backward(&d_out, &cache.pre, post, layer);
            let db = row_sums(&dz);
            let (grad, dx) = match &layer.weights {
                Weights::Dense { w, .. } => {
                    let mut dw = DenseMatrix::zeros(w.rows(), w.cols());
                    gemm(1.0, &dz, false, input, true, 0.0, &mut dw);
                    let dx = if idx > 0 {
                        let mut dx = DenseMatrix::zeros(w.cols(), dz.cols());
                        gemm(1.0, w, true, &dz, false, 0.0, &mut dx);
                        dx
                    } else {
                        DenseMatrix::zeros(1, 1)
                    };
                    (TensorGrads::Dense { dw, db }, dx)
                }
                Weights::LowRank { u, v, sine, .. } => {
                    if *sine {
                        let dcoef = cache.dcoef.as_ref().expect("cached for sine layers");
                        let effective = cache.effective.as_ref().expect("cached for sine layers");
                        // G = dZ X^T at the effective weight
                        let mut g = DenseMatrix::zeros(u.rows(), v.rows());
                        gemm(1.0, &dz, false, input, true, 0.0, &mut g);
                        // dM = (omega/gain) cos(omega M) . G, coefficient cached
                        let mut dm = g;
                        for (dmij, c) in dm.entries_mut().iter_mut().zip(dcoef.entries()) {
                            *dmij *= c;
                        }
                        let mut du = DenseMatrix::zeros(u.rows(), u.cols());
                        gemm(1.0, &dm, false, v, false, 0.0, &mut du);
                        let mut dv = DenseMatrix::zeros(v.rows(), v.cols());
                        gemm(1.0, &dm, true, u, false, 0.0, &mut dv);
                        let dx = if idx > 0 {
                            let mut dx = DenseMatrix::zeros(v.rows(), dz.cols());
                            gemm(1.0, effective, true, &dz, false, 0.0, &mut dx);
                            dx
                        } else {
                            DenseMatrix::zeros(1, 1)
                        };
                        (TensorGrads::LowRank { du, dv, db }, dx)
                    } else {
                        // G = dZ X^T stays factored: dU = dZ (X^T V), dV = X (dZ^T U)
                        let mut xtv = DenseMatrix::zeros(dz.cols(), v.cols());
                        gemm(1.0, input, true, v, false, 0.0, &mut xtv);
                        let mut du = DenseMatrix::zeros(u.rows(), u.cols());
                        gemm(1.0, &dz, false, &xtv, false, 0.0, &mut du);
                        let mut dztu = DenseMatrix::zeros(dz.cols(), u.cols());
                        gemm(1.0, &dz, true, u, false, 0.0, &mut dztu);
                        let mut dv = DenseMatrix::zeros(v.rows(), v.cols());
                        gemm(1.0, input, false, &dztu, false, 0.0, &mut dv);
                        let dx = if idx > 0 {
                            // dX = V (U^T dZ)
                            let mut utdz = DenseMatrix::zeros(u.cols(), dz.cols());
                            gemm(1.0, u, true, &dz, false, 0.0, &mut utdz);
                            let mut dx = DenseMatrix::zeros(v.rows(), dz.cols());
                            gemm(1.0, v, false, &utdz, false, 0.0, &mut dx);
                            dx
                        } else {
                            DenseMatrix::zeros(1, 1)
                        };
                        (TensorGrads::LowRank { du, dv, db }, dx)
                    }
                }
            };
            grads.push(grad);
            d_out = dx;
        }
        grads.reverse();
        if !value.is_finite() {
            return Err(Error::NonFiniteLoss {
                epoch: 0,
                partial: super::MetricsHistory {
                    loss: vec![],
                    final_psnr: None,
                    final_iou: None,
                    param_count: self.param_count(),
                    compression_rate: self.compression_rate(),
                },
            });
        }
        Ok((value, grads))
    }

    /// One plain SGD step: `theta -= lr * grad`.
    pub fn apply_sgd(&mut self, grads: &[TensorGrads], lr: f64) {
        assert_eq!(grads.len(), self.layers.len());
        for (layer, grad) in self.layers.iter_mut().zip(grads) {
            match (&mut layer.weights, grad) {
                (Weights::Dense { w, b }, TensorGrads::Dense { dw, db }) => {
                    axpy(w.entries_mut(), dw.entries(), -lr);
                    for (bi, gi) in b.iter_mut().zip(db) {
                        *bi -= lr * gi;
                    }
                }
                (Weights::LowRank { u, v, b, .. }, TensorGrads::LowRank { du, dv, db }) => {
                    axpy(u.entries_mut(), du.entries(), -lr);
                    axpy(v.entries_mut(), dv.entries(), -lr);
                    for (bi, gi) in b.iter_mut().zip(db) {
                        *bi -= lr * gi;
                    }
                }
                _ => unreachable!("gradient kind matches layer kind"),
            }
        }
    }

    // Flat parameter access used by the finite-difference checker.

    pub(crate) fn tensor_sizes(&self) -> Vec<Vec<usize>> {
        self.layers
            .iter()
            .map(|l| match &l.weights {
                Weights::Dense { w, b } => vec![w.entries().len(), b.len()],
                Weights::LowRank { u, v, b, .. } => {
                    vec![u.entries().len(), v.entries().len(), b.len()]
                }
            })
            .collect()
    }

    pub(crate) fn param_get(&self, layer: usize, slot: usize, idx: usize) -> f64 {
        match &self.layers[layer].weights {
            Weights::Dense { w, b } => match slot {
                0 => w.entries()[idx],
                1 => b[idx],
                _ => unreachable!(),
            },
            Weights::LowRank { u, v, b, .. } => match slot {
                0 => u.entries()[idx],
                1 => v.entries()[idx],
                2 => b[idx],
                _ => unreachable!(),
            },
        }
    }

    pub(crate) fn param_set(&mut self, layer: usize, slot: usize, idx: usize, value: f64) {
        match &mut self.layers[layer].weights {
            Weights::Dense { w, b } => match slot {
                0 => w.entries_mut()[idx] = value,
                1 => b[idx] = value,
                _ => unreachable!(),
            },
            Weights::LowRank { u, v, b, .. } => match slot {
                0 => u.entries_mut()[idx] = value,
                1 => v.entries_mut()[idx] = value,
                2 => b[idx] = value,
                _ => unreachable!(),
            },
        }
    }

    pub(crate) fn grad_get(grads: &[TensorGrads], layer: usize, slot: usize, idx: usize) -> f64 {
        match &grads[layer] {
            TensorGrads::Dense { dw, db } => match slot {
                0 => dw.entries()[idx],
                1 => db[idx],
                _ => unreachable!(),
            },
            TensorGrads::LowRank { du, dv, db } => match slot {
                0 => du.entries()[idx],
                1 => dv.entries()[idx],
                2 => db[idx],
                _ => unreachable!(),
            },
        }
    }
}

/// Layer specs for the coordinate-network tasks: a dense input projection to
/// the first hidden width, the listed hidden layers (dense or low-rank), and
/// a dense scalar head. Low-rank replacement applies to the hidden layers
/// only, which is where the parameter mass sits.
pub fn task_model_specs(
    in_dim: usize,
    hidden_widths: &[usize],
    kind: LayerKind,
    k: usize,
    omega: Option<f64>,
    activation: Activation,
) -> Vec<LayerSpec> {
    assert!(!hidden_widths.is_empty());
    let mut specs = Vec::with_capacity(hidden_widths.len() + 2);
    let first = hidden_widths[0];
    specs.push(LayerSpec::dense(in_dim, first, activation));
    let mut prev = first;
    for &w in hidden_widths {
        let spec = match kind {
            LayerKind::Dense => LayerSpec::dense(prev, w, activation),
            LayerKind::LowrankPlain => {
                LayerSpec::lowrank(prev, w, k, None, false, activation)
            }
            LayerKind::LowrankSine => LayerSpec::lowrank(prev, w, k, omega, true, activation),
        };
        specs.push(spec);
        prev = w;
    }
    specs.push(LayerSpec::dense(prev, 1, Activation::None));
    specs
}

fn add_bias_rows(z: &mut DenseMatrix, b: &[f64]) {
    let cols = z.cols();
    let entries = z.entries_mut();
    for (i, &bi) in b.iter().enumerate() {
        for e in entries[i * cols..(i + 1) * cols].iter_mut() {
            *e += bi;
        }
    }
}

fn apply_activation(z: &DenseMatrix, activation: Activation, width: f64) -> DenseMatrix {
    match activation {
        Activation::None => z.clone(),
        Activation::Relu => {
            let entries = z.entries().iter().map(|&v| v.max(0.0)).collect();
            DenseMatrix::from_vec_unchecked(z.rows(), z.cols(), entries)
        }
        Activation::SineAct => {
            let entries = z.entries().iter().map(|&v| v.sin()).collect();
            DenseMatrix::from_vec_unchecked(z.rows(), z.cols(), entries)
        }
        Activation::Gaussian => {
            let inv = 1.0 / (2.0 * width * width);
            let entries = z.entries().iter().map(|&v| (-v * v * inv).exp()).collect();
            DenseMatrix::from_vec_unchecked(z.rows(), z.cols(), entries)
        }
    }
}

/// `dL/d(pre) = dL/d(post) . phi'(pre)`, reusing cached values.
fn activation_backward(
    d_post: &DenseMatrix,
    pre: &DenseMatrix,
    post: &DenseMatrix,
    layer: &Layer,
) -> DenseMatrix {
    match layer.activation {
        Activation::None => d_post.clone(),
        Activation::Relu => {
            let entries = d_post
                .entries()
                .iter()
                .zip(pre.entries())
                .map(|(&g, &z)| if z > 0.0 { g } else { 0.0 })
                .collect();
            DenseMatrix::from_vec_unchecked(d_post.rows(), d_post.cols(), entries)
        }
        Activation::SineAct => {
            let entries = d_post
                .entries()
                .iter()
                .zip(pre.entries())
                .map(|(&g, &z)| g * z.cos())
                .collect();
            DenseMatrix::from_vec_unchecked(d_post.rows(), d_post.cols(), entries)
        }
        Activation::Gaussian => {
            // phi(z) = exp(-z^2 / (2 a^2)), phi'(z) = -(z / a^2) phi(z)
            let inv_a2 = 1.0 / (layer.gaussian_width * layer.gaussian_width);
            let entries = d_post
                .entries()
                .iter()
                .zip(pre.entries().iter().zip(post.entries()))
                .map(|(&g, (&z, &phi))| g * (-z * inv_a2) * phi)
                .collect();
            DenseMatrix::from_vec_unchecked(d_post.rows(), d_post.cols(), entries)
        }
    }
}

fn row_sums(m: &DenseMatrix) -> Vec<f64> {
    (0..m.rows())
        .map(|i| m.row(i).iter().sum::<f64>())
        .collect()
}

fn axpy(dst: &mut [f64], src: &[f64], alpha: f64) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d += alpha * s;
    }
}
