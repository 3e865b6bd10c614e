//! The experiment configuration file: a sectioned TOML document with a
//! mandatory `version` field. Every value is validated against the owning
//! module's preconditions before any work starts, and validation errors
//! name the offending field.
//!
//! The full schema with defaults is documented in the repository README;
//! `ExperimentConfig::example()` is the reference instance.

use aircomp_core::channel::{FadingGranularity, FadingModel, NoiseParams};
use aircomp_core::learning::{Architecture, Aggregation, PartitionMode, PartitionSpec, TrainConfig};
use aircomp_core::topology::{PathLossParams, PlacementMode};
use serde::{Deserialize, Serialize};

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("failed to parse config: {0}")]
    Parse(String),
    #[error("config version {got} is not supported (expected {CONFIG_VERSION})")]
    Version { got: u32 },
    #[error("{field}: {reason}")]
    Invalid { field: &'static str, reason: &'static str },
}

fn invalid(field: &'static str, reason: &'static str) -> ConfigError {
    ConfigError::Invalid { field, reason }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    pub seed: u64,
    pub topology: TopologyConfig,
    pub pathloss: PathLossConfig,
    pub channel: ChannelConfig,
    pub oac: OacConfig,
    pub learning: LearningConfig,
    #[serde(default)]
    pub analysis: AnalysisConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopologyConfig {
    pub cell_count: usize,
    pub isd_m: f64,
    pub ed_count: usize,
    /// "uniform-edge" or "vertices-only".
    pub placement: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathLossConfig {
    pub alpha: f64,
    pub r_ul_m: f64,
    pub r_dl_m: f64,
    /// Gain cutoff for the connectivity sets; omitted means the default
    /// (gain at 1.5x the median nearest-server distance).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub connectivity_threshold: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelConfig {
    /// "flat-iid" or "epa".
    pub fading: String,
    /// "per-symbol" or "per-round" (tapped-delay-line only).
    #[serde(default = "default_granularity")]
    pub granularity: String,
    #[serde(default = "default_scs")]
    pub subcarrier_spacing_hz: f64,
    pub snr_ul_db: f64,
    pub snr_dl_db: f64,
}

fn default_granularity() -> String {
    "per-symbol".into()
}

fn default_scs() -> f64 {
    15_000.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OacConfig {
    pub symbol_energy: f64,
    /// "linear" or "permuted".
    #[serde(default = "default_mapping")]
    pub mapping: String,
    pub subcarriers: usize,
}

fn default_mapping() -> String {
    "linear".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LearningConfig {
    /// "logistic" or "mlp".
    pub arch: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hidden: Option<usize>,
    /// "synthetic" or "idx".
    pub dataset: String,
    #[serde(default = "default_classes")]
    pub classes: usize,
    #[serde(default = "default_dims")]
    pub dims: usize,
    #[serde(default = "default_per_class")]
    pub samples_per_class: usize,
    #[serde(default = "default_test_per_class")]
    pub test_per_class: usize,
    #[serde(default = "default_separation")]
    pub separation: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub idx_train_images: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub idx_train_labels: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub idx_test_images: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub idx_test_labels: Option<String>,
    /// "homogeneous" or "location-heterogeneous".
    pub partition: String,
    #[serde(default = "default_band_count")]
    pub band_count: usize,
    pub eta: f64,
    pub batch_size: usize,
    pub rounds: usize,
    /// "multi-cell", "single-cell", or "local-only".
    pub aggregation: String,
    #[serde(default = "default_init_scale")]
    pub init_scale: f64,
    /// All devices start from one shared draw (default) or from per-device
    /// draws.
    #[serde(default = "default_true")]
    pub shared_init: bool,
}

fn default_classes() -> usize {
    4
}
fn default_dims() -> usize {
    16
}
fn default_per_class() -> usize {
    500
}
fn default_test_per_class() -> usize {
    100
}
fn default_separation() -> f64 {
    2.5
}
fn default_band_count() -> usize {
    5
}
fn default_init_scale() -> f64 {
    0.01
}
fn default_true() -> bool {
    true
}

/// Parameter grids for the `analyze` and `mc` commands, plus the
/// convergence-bound inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    pub symbol_energy: f64,
    pub devices_per_server: Vec<u32>,
    pub servers_per_device: Vec<u32>,
    pub sigma2_es: Vec<f64>,
    pub sigma2_ed: Vec<f64>,
    pub p_i: Vec<f64>,
    pub p_y: Vec<f64>,
    pub gradient_snr: Vec<f64>,
    pub trials: u64,
    pub initial_gap: f64,
    pub smoothness_l1: f64,
    pub sigma_l1: f64,
    pub gamma: u32,
    pub rounds: u64,
    pub device_count: u64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            symbol_energy: 2.0,
            devices_per_server: vec![3, 6],
            servers_per_device: vec![1, 3],
            sigma2_es: vec![0.0, 0.01, 0.1],
            sigma2_ed: vec![0.01],
            p_i: vec![0.5, 0.7, 0.9, 1.0],
            p_y: vec![0.7, 0.9, 0.99],
            gradient_snr: vec![10.0],
            trials: 1_000_000,
            initial_gap: 1.0,
            smoothness_l1: 1.0,
            sigma_l1: 1.0,
            gamma: 2,
            rounds: 100,
            device_count: 120,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.version != CONFIG_VERSION {
            return Err(ConfigError::Version { got: self.version });
        }
        if self.topology.cell_count < 1 {
            return Err(invalid("topology.cell_count", "must be >= 1"));
        }
        if !(self.topology.isd_m > 0.0) {
            return Err(invalid("topology.isd_m", "must be > 0"));
        }
        if self.topology.ed_count < 1 {
            return Err(invalid("topology.ed_count", "must be >= 1"));
        }
        self.placement_mode()?;
        if !(self.pathloss.alpha > 0.0) {
            return Err(invalid("pathloss.alpha", "must be > 0"));
        }
        if !(self.pathloss.r_ul_m > 0.0) || !(self.pathloss.r_dl_m > 0.0) {
            return Err(invalid("pathloss.r_ul_m / r_dl_m", "must be > 0"));
        }
        if let Some(t) = self.pathloss.connectivity_threshold {
            if !(t > 0.0) {
                return Err(invalid("pathloss.connectivity_threshold", "must be > 0"));
            }
        }
        self.fading_model()?;
        if !self.channel.snr_ul_db.is_finite() || !self.channel.snr_dl_db.is_finite() {
            return Err(invalid("channel.snr_ul_db / snr_dl_db", "must be finite"));
        }
        if !(self.oac.symbol_energy > 0.0) {
            return Err(invalid("oac.symbol_energy", "must be > 0"));
        }
        if self.oac.subcarriers < 2 {
            return Err(invalid("oac.subcarriers", "must be >= 2"));
        }
        if self.oac.mapping != "linear" && self.oac.mapping != "permuted" {
            return Err(invalid("oac.mapping", "must be \"linear\" or \"permuted\""));
        }
        self.architecture()?;
        match self.learning.dataset.as_str() {
            "synthetic" => {
                if self.learning.classes < 1
                    || self.learning.dims < self.learning.classes
                    || self.learning.samples_per_class < 1
                    || self.learning.test_per_class < 1
                {
                    return Err(invalid(
                        "learning.classes/dims/samples_per_class/test_per_class",
                        "synthetic data needs classes >= 1, dims >= classes, positive sample counts",
                    ));
                }
            }
            "idx" => {
                if self.learning.idx_train_images.is_none()
                    || self.learning.idx_train_labels.is_none()
                    || self.learning.idx_test_images.is_none()
                    || self.learning.idx_test_labels.is_none()
                {
                    return Err(invalid(
                        "learning.idx_*",
                        "idx data needs all four file paths",
                    ));
                }
            }
            _ => return Err(invalid("learning.dataset", "must be \"synthetic\" or \"idx\"")),
        }
        self.partition_spec()?;
        if !(self.learning.eta > 0.0) {
            return Err(invalid("learning.eta", "must be > 0"));
        }
        if self.learning.batch_size < 1 {
            return Err(invalid("learning.batch_size", "must be >= 1"));
        }
        if self.learning.rounds < 1 {
            return Err(invalid("learning.rounds", "must be >= 1"));
        }
        self.aggregation()?;
        Ok(())
    }

    pub fn placement_mode(&self) -> Result<PlacementMode, ConfigError> {
        match self.topology.placement.as_str() {
            "uniform-edge" => Ok(PlacementMode::UniformEdge),
            "vertices-only" => Ok(PlacementMode::VerticesOnly),
            _ => Err(invalid(
                "topology.placement",
                "must be \"uniform-edge\" or \"vertices-only\"",
            )),
        }
    }

    pub fn path_loss(&self) -> PathLossParams {
        PathLossParams {
            alpha: self.pathloss.alpha,
            r_ul: self.pathloss.r_ul_m,
            r_dl: self.pathloss.r_dl_m,
        }
    }

    pub fn fading_model(&self) -> Result<FadingModel, ConfigError> {
        let granularity = match self.channel.granularity.as_str() {
            "per-symbol" => FadingGranularity::PerSymbol,
            "per-round" => FadingGranularity::PerRound,
            _ => {
                return Err(invalid(
                    "channel.granularity",
                    "must be \"per-symbol\" or \"per-round\"",
                ))
            }
        };
        match self.channel.fading.as_str() {
            "flat-iid" => Ok(FadingModel::flat_iid()),
            "epa" => Ok(FadingModel::epa(self.channel.subcarrier_spacing_hz, granularity)),
            _ => Err(invalid("channel.fading", "must be \"flat-iid\" or \"epa\"")),
        }
    }

    pub fn noise(&self) -> NoiseParams {
        NoiseParams {
            sigma2_es: crate::snr_to_variance(self.channel.snr_ul_db),
            sigma2_ed: crate::snr_to_variance(self.channel.snr_dl_db),
        }
    }

    pub fn architecture(&self) -> Result<Architecture, ConfigError> {
        let (input_dim, classes) = (self.learning.dims, self.learning.classes);
        match self.learning.arch.as_str() {
            "logistic" => Ok(Architecture::Logistic { input_dim, classes }),
            "mlp" => {
                let hidden = self
                    .learning
                    .hidden
                    .ok_or_else(|| invalid("learning.hidden", "required for the mlp arch"))?;
                if hidden < 1 {
                    return Err(invalid("learning.hidden", "must be >= 1"));
                }
                Ok(Architecture::Mlp { input_dim, hidden, classes })
            }
            _ => Err(invalid("learning.arch", "must be \"logistic\" or \"mlp\"")),
        }
    }

    pub fn partition_spec(&self) -> Result<PartitionSpec, ConfigError> {
        match self.learning.partition.as_str() {
            "homogeneous" => Ok(PartitionSpec {
                mode: PartitionMode::Homogeneous,
                band_count: 1,
            }),
            "location-heterogeneous" => {
                if self.learning.band_count < 1 || self.learning.band_count > self.learning.classes
                {
                    return Err(invalid(
                        "learning.band_count",
                        "must be within 1..=classes",
                    ));
                }
                Ok(PartitionSpec {
                    mode: PartitionMode::LocationHeterogeneous,
                    band_count: self.learning.band_count,
                })
            }
            _ => Err(invalid(
                "learning.partition",
                "must be \"homogeneous\" or \"location-heterogeneous\"",
            )),
        }
    }

    pub fn aggregation(&self) -> Result<Aggregation, ConfigError> {
        match self.learning.aggregation.as_str() {
            "multi-cell" => Ok(Aggregation::MultiCell),
            "single-cell" => Ok(Aggregation::SingleCell),
            "local-only" => Ok(Aggregation::LocalOnly),
            _ => Err(invalid(
                "learning.aggregation",
                "must be \"multi-cell\", \"single-cell\", or \"local-only\"",
            )),
        }
    }

    /// The train-loop slice of the configuration.
    pub fn train_config(&self) -> Result<TrainConfig, ConfigError> {
        Ok(TrainConfig {
            eta: self.learning.eta,
            batch_size: self.learning.batch_size,
            rounds: self.learning.rounds,
            seed: self.seed,
            aggregation: self.aggregation()?,
            genie: false,
            fading: self.fading_model()?,
            noise: self.noise(),
            symbol_energy: self.oac.symbol_energy,
            subcarriers: self.oac.subcarriers,
            mapping_seed: if self.oac.mapping == "permuted" { Some(self.seed) } else { None },
            record_votes: false,
        })
    }

    /// A small, fast reference configuration (also the schema example).
    pub fn example() -> Self {
        Self {
            version: CONFIG_VERSION,
            seed: 42,
            topology: TopologyConfig {
                cell_count: 7,
                isd_m: 50.0,
                ed_count: 12,
                placement: "uniform-edge".into(),
            },
            pathloss: PathLossConfig {
                alpha: 4.0,
                r_ul_m: 25.0 / (std::f64::consts::PI / 6.0).cos(),
                r_dl_m: 25.0 / (std::f64::consts::PI / 6.0).cos(),
                connectivity_threshold: None,
            },
            channel: ChannelConfig {
                fading: "flat-iid".into(),
                granularity: "per-symbol".into(),
                subcarrier_spacing_hz: 15_000.0,
                snr_ul_db: 20.0,
                snr_dl_db: 20.0,
            },
            oac: OacConfig {
                symbol_energy: 2.0,
                mapping: "linear".into(),
                subcarriers: 1200,
            },
            learning: LearningConfig {
                arch: "logistic".into(),
                hidden: None,
                dataset: "synthetic".into(),
                classes: 4,
                dims: 16,
                samples_per_class: 500,
                test_per_class: 100,
                separation: 2.5,
                idx_train_images: None,
                idx_train_labels: None,
                idx_test_images: None,
                idx_test_labels: None,
                partition: "homogeneous".into(),
                band_count: 3,
                eta: 0.01,
                batch_size: 16,
                rounds: 200,
                aggregation: "multi-cell".into(),
                init_scale: 0.01,
                shared_init: true,
            },
            analysis: AnalysisConfig::default(),
        }
    }
}
