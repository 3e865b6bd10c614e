//! The four CLI commands. Each writes its artifacts under the output
//! directory and returns a summary that is also serialized to
//! `summary.json` (with the full configuration echoed for provenance).

use std::path::Path;
use std::time::Instant;

use aircomp_core::analysis::{
    compute_ab, convergence_bound, correct_sign_floor, ed_error_prob_bound, ed_error_prob_sum,
    es_success_prob, mc_ed_error_sum, mc_es_success, mc_two_hop_error, BoundInputs,
    ConnectivityParams, SupportMode,
};
use aircomp_core::exec::Executor;
use aircomp_core::learning::{
    init_model, make_synthetic, partition, stratified_split, train, Dataset, ModelState, TrainLog,
};
use aircomp_core::rng::{Purpose, SeedTree};
use aircomp_core::topology::{
    build_hex_grid, compute_link_gains, connectivity_sets, default_connectivity_threshold,
    place_cell_edge_eds, ConnectivitySets, Deployment, LinkGains,
};
use serde::Serialize;

use crate::config::{AnalysisConfig, ConfigError, ExperimentConfig};
use crate::formats::{format_deployment, format_metrics_csv, to_summary_json};
use crate::idx::{load_idx, IdxError};

#[derive(Debug, thiserror::Error)]
pub enum CommandError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("topology: {0}")]
    Topology(#[from] aircomp_core::topology::TopologyError),
    #[error("learning: {0}")]
    Learning(#[from] aircomp_core::learning::LearningError),
    #[error("analysis: {0}")]
    Analysis(#[from] aircomp_core::analysis::AnalysisError),
    #[error(transparent)]
    Idx(#[from] IdxError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

fn write_out(out_dir: &Path, name: &str, contents: &str) -> Result<(), CommandError> {
    std::fs::create_dir_all(out_dir)?;
    std::fs::write(out_dir.join(name), contents)?;
    Ok(())
}

/// Deployment, gains, and connectivity as configured.
pub fn build_topology(
    cfg: &ExperimentConfig,
) -> Result<(Deployment, LinkGains, ConnectivitySets, f64), CommandError> {
    let dep = build_hex_grid(cfg.topology.cell_count, cfg.topology.isd_m)?;
    let dep = place_cell_edge_eds(&dep, cfg.topology.ed_count, cfg.placement_mode()?, cfg.seed)?;
    let plp = cfg.path_loss();
    let gains = compute_link_gains(&dep, &plp)?;
    let threshold = cfg
        .pathloss
        .connectivity_threshold
        .unwrap_or_else(|| default_connectivity_threshold(&dep, &plp));
    let sets = connectivity_sets(&gains, threshold);
    Ok((dep, gains, sets, threshold))
}

#[derive(Debug, Serialize)]
pub struct TopologySummary {
    pub command: &'static str,
    pub server_count: usize,
    pub device_count: usize,
    pub connectivity_threshold: f64,
    pub typical_devices_per_server: usize,
    pub typical_servers_per_device: usize,
    pub isolated_servers: Vec<usize>,
    pub isolated_devices: Vec<usize>,
    pub wall_time_s: f64,
    pub config: ExperimentConfig,
}

pub fn run_topology(
    cfg: &ExperimentConfig,
    out_dir: &Path,
) -> Result<TopologySummary, CommandError> {
    let start = Instant::now();
    let (dep, _gains, sets, threshold) = build_topology(cfg)?;
    write_out(out_dir, "deployment.tsv", &format_deployment(&dep))?;
    let summary = TopologySummary {
        command: "topology",
        server_count: dep.server_count(),
        device_count: dep.device_count(),
        connectivity_threshold: threshold,
        typical_devices_per_server: sets.typical_devices_per_server,
        typical_servers_per_device: sets.typical_servers_per_device,
        isolated_servers: sets.isolated_servers(),
        isolated_devices: sets.isolated_devices(),
        wall_time_s: start.elapsed().as_secs_f64(),
        config: cfg.clone(),
    };
    write_out(out_dir, "summary.json", &to_summary_json(&summary))?;
    Ok(summary)
}

/// Builds the global training pool and the held-out test set.
pub fn build_datasets(cfg: &ExperimentConfig) -> Result<(Dataset, Dataset), CommandError> {
    match cfg.learning.dataset.as_str() {
        "synthetic" => {
            let total = cfg.learning.samples_per_class + cfg.learning.test_per_class;
            let all = make_synthetic(
                cfg.learning.classes,
                cfg.learning.dims,
                total,
                cfg.learning.separation,
                cfg.seed,
            )?;
            let fraction = cfg.learning.test_per_class as f64 / total as f64;
            let (train_pool, test) = stratified_split(&all, fraction, cfg.seed)?;
            Ok((train_pool, test))
        }
        "idx" => {
            let train_pool = load_idx(
                cfg.learning.idx_train_images.as_deref().expect("validated"),
                cfg.learning.idx_train_labels.as_deref().expect("validated"),
            )?;
            let test = load_idx(
                cfg.learning.idx_test_images.as_deref().expect("validated"),
                cfg.learning.idx_test_labels.as_deref().expect("validated"),
            )?;
            Ok((train_pool, test))
        }
        _ => unreachable!("validated"),
    }
}

fn init_models(cfg: &ExperimentConfig, device_count: usize) -> Result<Vec<ModelState>, CommandError> {
    let arch = cfg.architecture()?;
    let tree = SeedTree::new(cfg.seed);
    if cfg.learning.shared_init {
        let model = init_model(arch, cfg.learning.init_scale, &mut tree.stream(Purpose::ModelInit, &[0]));
        Ok(vec![model; device_count])
    } else {
        Ok((0..device_count)
            .map(|k| {
                init_model(
                    arch,
                    cfg.learning.init_scale,
                    &mut tree.stream(Purpose::ModelInit, &[k as u64]),
                )
            })
            .collect())
    }
}

#[derive(Debug, Serialize)]
pub struct AccuracyStats {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

impl AccuracyStats {
    fn from_values(values: &[f64]) -> Self {
        Self {
            mean: values.iter().sum::<f64>() / values.len() as f64,
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SimulateSummary {
    pub command: &'static str,
    pub rounds: usize,
    pub device_count: usize,
    pub server_count: usize,
    pub parameter_count: usize,
    pub ofdm_symbols: usize,
    pub final_acc_all: AccuracyStats,
    pub final_acc_personalized: AccuracyStats,
    pub wall_time_s: f64,
    pub config: ExperimentConfig,
}

/// The full protocol run: topology, data, training, metrics CSV.
pub fn run_simulate(
    cfg: &ExperimentConfig,
    out_dir: &Path,
    exec: &dyn Executor,
) -> Result<SimulateSummary, CommandError> {
    let start = Instant::now();
    let (dep, gains, _sets, _threshold) = build_topology(cfg)?;
    let (train_pool, test) = build_datasets(cfg)?;
    let datasets = partition(&train_pool, &dep, &cfg.partition_spec()?, cfg.seed)?;
    let models = init_models(cfg, dep.device_count())?;
    let train_cfg = cfg.train_config()?;
    let log: TrainLog = train(&train_cfg, &gains, &datasets, models, &test, exec)?;
    write_out(out_dir, "metrics.csv", &format_metrics_csv(&log.metrics))?;

    let last_round = cfg.learning.rounds - 1;
    let finals: Vec<&aircomp_core::learning::RoundDeviceMetrics> =
        log.metrics.iter().filter(|r| r.round == last_round).collect();
    let acc_all: Vec<f64> = finals.iter().map(|r| r.acc_all).collect();
    let acc_pers: Vec<f64> = finals.iter().map(|r| r.acc_personalized).collect();
    let summary = SimulateSummary {
        command: "simulate",
        rounds: cfg.learning.rounds,
        device_count: dep.device_count(),
        server_count: dep.server_count(),
        parameter_count: log.final_models[0].param_count(),
        ofdm_symbols: (2 * log.final_models[0].param_count()).div_ceil(cfg.oac.subcarriers),
        final_acc_all: AccuracyStats::from_values(&acc_all),
        final_acc_personalized: AccuracyStats::from_values(&acc_pers),
        wall_time_s: start.elapsed().as_secs_f64(),
        config: cfg.clone(),
    };
    write_out(out_dir, "summary.json", &to_summary_json(&summary))?;
    Ok(summary)
}

fn param_tuples(a: &AnalysisConfig) -> Vec<ConnectivityParams> {
    let mut tuples = Vec::new();
    for &k_c in &a.devices_per_server {
        for &s_c in &a.servers_per_device {
            for &sigma2_es in &a.sigma2_es {
                for &sigma2_ed in &a.sigma2_ed {
                    tuples.push(ConnectivityParams {
                        devices_per_server: k_c,
                        servers_per_device: s_c,
                        symbol_energy: a.symbol_energy,
                        sigma2_es,
                        sigma2_ed,
                    });
                }
            }
        }
    }
    tuples
}

fn flags_column(nonpositive_denominator: bool, negative_a: bool) -> &'static str {
    match (nonpositive_denominator, negative_a) {
        (true, true) => "K<=2A;A<0",
        (true, false) => "K<=2A",
        (false, true) => "A<0",
        (false, false) => "-",
    }
}

#[derive(Debug, Serialize)]
pub struct TableSummary {
    pub command: &'static str,
    pub rows: usize,
    pub wall_time_s: f64,
    pub config: ExperimentConfig,
}

/// Closed-form table: one row per parameter tuple and probability input.
pub fn run_analyze(cfg: &ExperimentConfig, out_dir: &Path) -> Result<TableSummary, CommandError> {
    let start = Instant::now();
    let a = &cfg.analysis;
    let mut out = String::from(
        "k_c\ts_c\tsigma2_es\tsigma2_ed\tp_i\tp_y\tgradient_snr\tp_y_closed\t\
         ed_err_sum\ted_err_sum_complete\ted_err_bound\ta\tb\tconv_bound\tflags\n",
    );
    let mut rows = 0usize;
    for cp in param_tuples(a) {
        cp.validate()?;
        let bi = BoundInputs {
            initial_gap: a.initial_gap,
            smoothness_l1: a.smoothness_l1,
            sigma_l1: a.sigma_l1,
            gamma: a.gamma,
            rounds: a.rounds,
            device_count: a.device_count,
        };
        let bound = convergence_bound(&bi, &cp)?;
        for &p_i in &a.p_i {
            for &p_y in &a.p_y {
                for &snr in &a.gradient_snr {
                    out.push_str(&format!(
                        "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                        cp.devices_per_server,
                        cp.servers_per_device,
                        cp.sigma2_es,
                        cp.sigma2_ed,
                        p_i,
                        p_y,
                        snr,
                        es_success_prob(p_i, &cp),
                        ed_error_prob_sum(p_y, &cp, SupportMode::ExcludeZero),
                        ed_error_prob_sum(p_y, &cp, SupportMode::Complete),
                        ed_error_prob_bound(&cp, snr),
                        bound.a,
                        bound.b,
                        bound.value,
                        flags_column(bound.nonpositive_denominator, bound.negative_a),
                    ));
                    rows += 1;
                }
            }
        }
    }
    write_out(out_dir, "analysis.tsv", &out)?;
    let summary = TableSummary {
        command: "analyze",
        rows,
        wall_time_s: start.elapsed().as_secs_f64(),
        config: cfg.clone(),
    };
    write_out(out_dir, "summary.json", &to_summary_json(&summary))?;
    Ok(summary)
}

/// Closed form vs Monte-Carlo comparison table.
pub fn run_mc(
    cfg: &ExperimentConfig,
    out_dir: &Path,
    exec: &dyn Executor,
) -> Result<TableSummary, CommandError> {
    let start = Instant::now();
    let a = &cfg.analysis;
    let mut out = String::from(
        "kind\tk_c\ts_c\tsigma2_es\tsigma2_ed\tp\tclosed\tmc\tmc_se\tdiff\n",
    );
    let mut rows = 0usize;
    let mut push_row = |kind: &str, cp: &ConnectivityParams, p: f64, closed: f64, est: aircomp_core::analysis::McEstimate| {
        out.push_str(&format!(
            "{kind}\t{}\t{}\t{}\t{}\t{p}\t{closed}\t{}\t{}\t{}\n",
            cp.devices_per_server,
            cp.servers_per_device,
            cp.sigma2_es,
            cp.sigma2_ed,
            est.probability,
            est.std_error,
            est.probability - closed,
        ));
        rows += 1;
    };
    for cp in param_tuples(a) {
        cp.validate()?;
        for &p_i in &a.p_i {
            let closed = es_success_prob(p_i, &cp);
            let est = mc_es_success(p_i, &cp, a.trials, cfg.seed, exec);
            push_row("es_success", &cp, p_i, closed, est);
        }
        for &p_y in &a.p_y {
            let closed = ed_error_prob_sum(p_y, &cp, SupportMode::ExcludeZero);
            let est = mc_ed_error_sum(p_y, &cp, a.trials, cfg.seed, exec);
            push_row("ed_error_sum", &cp, p_y, closed, est);
        }
        for &snr in &a.gradient_snr {
            let bound = ed_error_prob_bound(&cp, snr);
            let est = mc_two_hop_error(&cp, correct_sign_floor(snr), a.trials, cfg.seed, exec);
            push_row("two_hop_vs_bound", &cp, snr, bound, est);
        }
    }
    // Noiseless sanity row for the constants.
    let clean = ConnectivityParams {
        devices_per_server: a.devices_per_server[0],
        servers_per_device: a.servers_per_device[0],
        symbol_energy: a.symbol_energy,
        sigma2_es: 0.0,
        sigma2_ed: 0.0,
    };
    let (a_const, b_const) = compute_ab(&clean);
    debug_assert_eq!((a_const, b_const), (0.0, 1.0));
    write_out(out_dir, "mc.tsv", &out)?;
    let summary = TableSummary {
        command: "mc",
        rows,
        wall_time_s: start.elapsed().as_secs_f64(),
        config: cfg.clone(),
    };
    write_out(out_dir, "summary.json", &to_summary_json(&summary))?;
    Ok(summary)
}
