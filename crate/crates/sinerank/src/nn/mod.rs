//! Coordinate networks: model construction, manual backprop, training,
//! datasets, and metrics.

pub mod data;
pub mod gradcheck;
pub mod metrics;
pub mod model;
pub mod train;

pub use data::{
    gen_image_task, gen_occupancy_task, load_image_task, ImagePattern, OccupancyShape,
    TaskDataset, TaskKind,
};
pub use metrics::{iou, psnr, MetricsHistory};
pub use model::{
    build_model, default_omega_for_rank, task_model_specs, Activation, LayerKind, LayerSpec,
    Model, TensorGrads,
};
pub use train::{predict_all, train, LossKind, TrainConfig};
