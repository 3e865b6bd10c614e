//! Datasets, classifiers, sign-SGD gradients, and the two-hop training
//! loop that ties them to the over-the-air majority-vote codec.

mod data;
mod model;
mod train;

pub use data::{
    make_synthetic, partition, sample_batch, stratified_split, Dataset, PartitionMode,
    PartitionSpec,
};
pub use model::{
    apply_update, batch_loss, evaluate, init_model, stochastic_gradient, Architecture, ModelState,
};
pub use train::{
    ideal_mv_oracle, train, Aggregation, RoundDeviceMetrics, TrainConfig, TrainLog,
};

use rand::Rng;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LearningError {
    #[error("dataset is malformed: {0}")]
    InvalidDataset(&'static str),
    #[error("synthetic generator needs classes >= 1, dims >= classes, per_class >= 1")]
    BadSyntheticParams,
    #[error("partition needs 1 <= band_count <= class count")]
    BadPartitionSpec,
    #[error("label {label} has no eligible device under the band rule")]
    UnplacedLabel { label: usize },
    #[error("batch must be nonempty and within the dataset")]
    BadBatch,
    #[error("model parameter vector has {got} entries, architecture needs {expected}")]
    ParamCountMismatch { expected: usize, got: usize },
    #[error("update sign vector length {got} does not match parameter count {expected}")]
    UpdateLengthMismatch { expected: usize, got: usize },
    #[error("no test samples remain after the label filter")]
    EmptyAfterFilter,
    #[error("training needs one dataset and one model per device ({0})")]
    ShapeMismatch(&'static str),
    #[error("codec failure: {0}")]
    Codec(#[from] crate::oac::OacError),
    #[error("channel failure: {0}")]
    Channel(#[from] crate::channel::ChannelError),
}

/// One standard-normal draw (Box-Muller, cosine branch).
pub(crate) fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    #[cfg(not(feature = "std"))]
    use num_traits::Float;
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (2.0 * core::f64::consts::PI * u2).cos()
}
