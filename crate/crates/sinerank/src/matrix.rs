//! Dense row-major `f64` matrices and the elementwise maps used throughout.
//!
//! `DenseMatrix` is the universal carrier: weights, low-rank products, and
//! everything the spectral routines consume. Entries are validated finite on
//! construction; all operations on finite inputs stay finite.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Elementwise nonlinearity applied as `phi(omega * x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FnKind {
    Sine,
    Relu,
    Sigmoid,
    Tanh,
    Identity,
}

impl FnKind {
    pub const ALL: [FnKind; 5] = [
        FnKind::Sine,
        FnKind::Relu,
        FnKind::Sigmoid,
        FnKind::Tanh,
        FnKind::Identity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FnKind::Sine => "sine",
            FnKind::Relu => "relu",
            FnKind::Sigmoid => "sigmoid",
            FnKind::Tanh => "tanh",
            FnKind::Identity => "identity",
        }
    }

    fn apply(self, x: f64) -> f64 {
        match self {
            FnKind::Sine => x.sin(),
            FnKind::Relu => x.max(0.0),
            FnKind::Sigmoid => 1.0 / (1.0 + (-x).exp()),
            FnKind::Tanh => x.tanh(),
            FnKind::Identity => x,
        }
    }
}

impl fmt::Display for FnKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FnKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sine" | "sin" => Ok(FnKind::Sine),
            "relu" => Ok(FnKind::Relu),
            "sigmoid" => Ok(FnKind::Sigmoid),
            "tanh" => Ok(FnKind::Tanh),
            "identity" | "id" => Ok(FnKind::Identity),
            other => Err(Error::UnknownFunction(other.to_string())),
        }
    }
}

/// An `m x n` real matrix stored row-major. Immutable in the public API.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl DenseMatrix {
    /// Builds a matrix from row-major entries, validating shape and finiteness.
    pub fn new(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyShape { rows, cols });
        }
        if entries.len() != rows * cols {
            return Err(Error::EntryCount {
                rows,
                cols,
                got: entries.len(),
                expected: rows * cols,
            });
        }
        if let Some((index, &value)) = entries.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFiniteEntry { index, value });
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    /// Internal constructor for values already known finite.
    pub(crate) fn from_vec_unchecked(rows: usize, cols: usize, entries: Vec<f64>) -> Self {
        debug_assert_eq!(entries.len(), rows * cols);
        debug_assert!(entries.iter().all(|v| v.is_finite()));
        Self {
            rows,
            cols,
            entries,
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_vec_unchecked(rows, cols, vec![0.0; rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = 1.0;
        }
        m
    }

    /// Builds from a generator `f(row, col)`; the result is validated finite.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self::new(rows, cols, entries)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut entries = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::EntryCount {
                    rows: r,
                    cols: c,
                    got: row.len(),
                    expected: c,
                });
            }
            entries.extend_from_slice(row);
        }
        Self::new(r, c, entries)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.cols + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub(crate) fn entries_mut(&mut self) -> &mut [f64] {
        &mut self.entries
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&v| v == 0.0)
    }

    pub fn transpose(&self) -> Self {
        let mut out = vec![0.0; self.entries.len()];
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[j * self.rows + i] = self.entries[i * self.cols + j];
            }
        }
        Self::from_vec_unchecked(self.cols, self.rows, out)
    }

    /// Matrix product `self * rhs`.
    pub fn matmul(&self, rhs: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                context: "matmul",
                left: self.shape(),
                right: rhs.shape(),
            });
        }
        let mut out = DenseMatrix::zeros(self.rows, rhs.cols);
        gemm(1.0, self, false, rhs, false, 0.0, &mut out);
        Ok(out)
    }

    /// Matrix-vector product `self * x`.
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch {
                context: "matvec",
                left: self.shape(),
                right: (x.len(), 1),
            });
        }
        let mut y = vec![0.0; self.rows];
        for i in 0..self.rows {
            let row = self.row(i);
            let mut acc = 0.0;
            for j in 0..self.cols {
                acc += row[j] * x[j];
            }
            y[i] = acc;
        }
        Ok(y)
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self::from_vec_unchecked(
            self.rows,
            self.cols,
            self.entries.iter().map(|v| v * c).collect(),
        )
    }

    pub fn add(&self, rhs: &DenseMatrix) -> Result<DenseMatrix> {
        self.zip_with(rhs, "add", |a, b| a + b)
    }

    pub fn sub(&self, rhs: &DenseMatrix) -> Result<DenseMatrix> {
        self.zip_with(rhs, "sub", |a, b| a - b)
    }

    fn zip_with(
        &self,
        rhs: &DenseMatrix,
        context: &'static str,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<DenseMatrix> {
        if self.shape() != rhs.shape() {
            return Err(Error::DimensionMismatch {
                context,
                left: self.shape(),
                right: rhs.shape(),
            });
        }
        let entries = self
            .entries
            .iter()
            .zip(&rhs.entries)
            .map(|(a, b)| f(*a, *b))
            .collect();
        Ok(Self::from_vec_unchecked(self.rows, self.cols, entries))
    }

    /// Square root of the sum of squared entries.
    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Smallest absolute value among nonzero entries (`A^0_min`).
    pub fn min_nonzero_abs(&self) -> Result<f64> {
        let mut min = f64::INFINITY;
        for &v in &self.entries {
            let a = v.abs();
            if a > 0.0 && a < min {
                min = a;
            }
        }
        if min.is_finite() {
            Ok(min)
        } else {
            Err(Error::ZeroMatrix)
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Entrywise `sin(omega * a_ij)`.
    pub fn sine_modulate(&self, omega: f64) -> Self {
        self.map_fn(FnKind::Sine, omega)
    }

    /// Entrywise `phi(omega * a_ij)` for the named nonlinearity.
    pub fn map_fn(&self, kind: FnKind, omega: f64) -> Self {
        let entries = self
            .entries
            .iter()
            .map(|&v| kind.apply(omega * v))
            .collect();
        Self::from_vec_unchecked(self.rows, self.cols, entries)
    }

    /// Entrywise `sqrt(|a_ij|)`.
    pub fn sqrt_abs(&self) -> Self {
        let entries = self.entries.iter().map(|v| v.abs().sqrt()).collect();
        Self::from_vec_unchecked(self.rows, self.cols, entries)
    }
}

/// `c = alpha * op(a) * op(b) + beta * c` where `op` optionally transposes.
/// Transposition is expressed through strides; nothing is copied.
pub(crate) fn gemm(
    alpha: f64,
    a: &DenseMatrix,
    trans_a: bool,
    b: &DenseMatrix,
    trans_b: bool,
    beta: f64,
    c: &mut DenseMatrix,
) {
    let (am, ak, rsa, csa) = if trans_a {
        (a.cols, a.rows, 1isize, a.cols as isize)
    } else {
        (a.rows, a.cols, a.cols as isize, 1isize)
    };
    let (bk, bn, rsb, csb) = if trans_b {
        (b.cols, b.rows, 1isize, b.cols as isize)
    } else {
        (b.rows, b.cols, b.cols as isize, 1isize)
    };
    assert_eq!(ak, bk, "gemm inner dims");
    assert_eq!((c.rows, c.cols), (am, bn), "gemm output dims");
    unsafe {
        matrixmultiply::dgemm(
            am,
            ak,
            bn,
            alpha,
            a.entries.as_ptr(),
            rsa,
            csa,
            b.entries.as_ptr(),
            rsb,
            csb,
            beta,
            c.entries.as_mut_ptr(),
            c.cols as isize,
            1,
        );
    }
}
