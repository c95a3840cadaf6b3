//! Coordinate-regression datasets: procedural images and analytic occupancy
//! volumes on regular grids.

use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::read_pgm;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    ImageFit,
    Occupancy,
}

/// Coordinates in `[-1, 1]` per axis plus the regression targets.
///
/// Inputs are stored flat (`len * dim`, row-major); index order is
/// row-major over `grid_shape` with the last axis fastest.
#[derive(Debug, Clone)]
pub struct TaskDataset {
    pub task_kind: TaskKind,
    pub grid_shape: Vec<usize>,
    dim: usize,
    inputs: Vec<f64>,
    targets: Vec<f64>,
}

impl TaskDataset {
    pub fn new(
        task_kind: TaskKind,
        grid_shape: Vec<usize>,
        dim: usize,
        inputs: Vec<f64>,
        targets: Vec<f64>,
    ) -> Result<Self> {
        let n: usize = grid_shape.iter().product();
        if targets.len() != n || inputs.len() != n * dim {
            return Err(Error::ShapeMismatch {
                pred: inputs.len(),
                target: targets.len(),
            });
        }
        let ok = match task_kind {
            TaskKind::Occupancy => targets.iter().all(|&t| t == 0.0 || t == 1.0),
            TaskKind::ImageFit => targets.iter().all(|&t| (0.0..=1.0).contains(&t)),
        };
        if !ok {
            return Err(Error::InvalidModelSpec(
                "targets out of range for task kind".into(),
            ));
        }
        Ok(Self {
            task_kind,
            grid_shape,
            dim,
            inputs,
            targets,
        })
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn input(&self, i: usize) -> &[f64] {
        &self.inputs[i * self.dim..(i + 1) * self.dim]
    }

    pub fn inputs_flat(&self) -> &[f64] {
        &self.inputs
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }
}

/// Inclusive grid positions spanning `[-1, 1]`.
fn axis_coords(g: usize) -> Vec<f64> {
    (0..g)
        .map(|i| -1.0 + 2.0 * i as f64 / (g - 1) as f64)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OccupancyShape {
    Sphere,
    Torus,
}

impl FromStr for OccupancyShape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sphere" => Ok(OccupancyShape::Sphere),
            "torus" => Ok(OccupancyShape::Torus),
            other => Err(Error::InvalidModelSpec(format!(
                "unknown occupancy shape `{other}`"
            ))),
        }
    }
}

/// Occupancy bit for a point, by analytic membership test.
/// Sphere: radius 0.6 at the origin. Torus: major radius 0.5, minor 0.2,
/// axis z.
pub fn occupancy_bit(shape: OccupancyShape, p: [f64; 3]) -> f64 {
    let inside = match shape {
        OccupancyShape::Sphere => p[0] * p[0] + p[1] * p[1] + p[2] * p[2] <= 0.6 * 0.6,
        OccupancyShape::Torus => {
            let ring = (p[0] * p[0] + p[1] * p[1]).sqrt() - 0.5;
            ring * ring + p[2] * p[2] <= 0.2 * 0.2
        }
    };
    if inside {
        1.0
    } else {
        0.0
    }
}

/// Binary occupancy of an analytic shape over a `grid^3` lattice in
/// `[-1, 1]^3`. Index order: x outermost, z fastest.
pub fn gen_occupancy_task(shape: OccupancyShape, grid: usize) -> TaskDataset {
    assert!(grid >= 8, "occupancy grid must be at least 8 per axis");
    let axis = axis_coords(grid);
    let n = grid * grid * grid;
    let mut inputs = Vec::with_capacity(n * 3);
    let mut targets = Vec::with_capacity(n);
    for &x in &axis {
        for &y in &axis {
            for &z in &axis {
                inputs.extend_from_slice(&[x, y, z]);
                targets.push(occupancy_bit(shape, [x, y, z]));
            }
        }
    }
    TaskDataset::new(
        TaskKind::Occupancy,
        vec![grid, grid, grid],
        3,
        inputs,
        targets,
    )
    .expect("generated occupancy dataset is valid")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImagePattern {
    /// Horizontal ramp: intensity `(x + 1) / 2`.
    Gradient,
    /// 8x8 checkerboard over the domain.
    Checker,
    /// Concentric rings: `0.5 (1 + cos(4 pi r))`.
    Radial,
}

impl FromStr for ImagePattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gradient" => Ok(ImagePattern::Gradient),
            "checker" => Ok(ImagePattern::Checker),
            "radial" => Ok(ImagePattern::Radial),
            other => Err(Error::InvalidModelSpec(format!(
                "unknown image pattern `{other}`"
            ))),
        }
    }
}

/// Pattern intensity at coordinates `(x, y)`, each in `[-1, 1]`.
pub fn pattern_intensity(pattern: ImagePattern, x: f64, y: f64) -> f64 {
    match pattern {
        ImagePattern::Gradient => (x + 1.0) / 2.0,
        ImagePattern::Checker => {
            let cell = |c: f64| (((c + 1.0) / 2.0 * 8.0).floor() as i64).min(7);
            if (cell(x) + cell(y)) % 2 == 0 {
                1.0
            } else {
                0.0
            }
        }
        ImagePattern::Radial => {
            let r = (x * x + y * y).sqrt();
            0.5 * (1.0 + (4.0 * std::f64::consts::PI * r).cos())
        }
    }
}

/// Procedural grayscale target over an `height x width` grid. Inputs are
/// `[x, y]` with `x` along columns and `y` along rows; index order is
/// row-major (`row * width + col`), matching PGM raster order.
pub fn gen_image_task(pattern: ImagePattern, height: usize, width: usize) -> TaskDataset {
    assert!(
        height >= 8 && width >= 8,
        "image grid must be at least 8 per axis"
    );
    let ys = axis_coords(height);
    let xs = axis_coords(width);
    let mut inputs = Vec::with_capacity(height * width * 2);
    let mut targets = Vec::with_capacity(height * width);
    for &y in &ys {
        for &x in &xs {
            inputs.extend_from_slice(&[x, y]);
            targets.push(pattern_intensity(pattern, x, y));
        }
    }
    TaskDataset::new(TaskKind::ImageFit, vec![height, width], 2, inputs, targets)
        .expect("generated image dataset is valid")
}

/// Loads a grayscale PGM as an image-fit dataset with intensities in `[0, 1]`.
pub fn load_image_task(path: &Path) -> Result<TaskDataset> {
    let (width, height, pixels) = read_pgm(path)?;
    let ys = axis_coords(height);
    let xs = axis_coords(width);
    let mut inputs = Vec::with_capacity(height * width * 2);
    let mut targets = Vec::with_capacity(height * width);
    for (row, &y) in ys.iter().enumerate() {
        for (col, &x) in xs.iter().enumerate() {
            inputs.extend_from_slice(&[x, y]);
            targets.push(pixels[row * width + col] as f64 / 255.0);
        }
    }
    TaskDataset::new(TaskKind::ImageFit, vec![height, width], 2, inputs, targets)
}
