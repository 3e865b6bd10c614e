//! The two-hop training loop.
//!
//! Each communication round runs, in order: every device computes a
//! stochastic gradient on its own batch and takes its signs; all devices
//! transmit their votes at once; every server detects its uplink majority
//! vote from the superposed energies and re-encodes it; all servers transmit
//! at once; every device detects the downlink majority vote and applies the
//! sign-SGD step. The first round has no prior downlink, so the straight
//! uplink-then-downlink order is used in every round.
//!
//! All draws are keyed by `(round, entity, purpose)` substreams and all
//! reductions have fixed orders, so the log is identical for any worker
//! count.

use alloc::collections::BTreeSet;
use alloc::sync::Arc;
use alloc::vec::Vec;

use rand::Rng;

use super::data::sample_batch;
use super::model::{apply_update, evaluate, stochastic_gradient, ModelState};
use super::{Dataset, LearningError};
use crate::channel::{draw_channel, ChannelRealization, FadingModel, NoiseParams};
use crate::exec::{run_jobs, Executor};
use crate::oac::{
    detect_mv, encode_votes, sign_of, superpose, GridSymbols, Randomization, ResourceMap,
    SignVector, TxContribution,
};
use crate::rng::{Purpose, SeedTree};
use crate::topology::{ConnectivitySets, LinkGains};

/// Which aggregation path a run exercises.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Aggregation {
    /// Every server aggregates and every device hears every server.
    MultiCell,
    /// Only server 0 (the lattice center) exists; the single-cell baseline.
    SingleCell,
    /// No transmission at all: each device applies its own gradient signs.
    LocalOnly,
}

#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub eta: f64,
    pub batch_size: usize,
    pub rounds: usize,
    pub seed: u64,
    pub aggregation: Aggregation,
    /// Unit channels, unit randomization phases, zero noise. The protocol
    /// then computes exact arithmetic majority votes; used as a test hook.
    pub genie: bool,
    pub fading: FadingModel,
    pub noise: NoiseParams,
    pub symbol_energy: f64,
    pub subcarriers: usize,
    /// `Some(seed)` uses the seeded random resource permutation instead of
    /// the linear interleaving.
    pub mapping_seed: Option<u64>,
    /// Record per-round local signs and applied votes (costs memory).
    pub record_votes: bool,
}

/// One metrics row, as later serialized to the metrics CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundDeviceMetrics {
    pub round: usize,
    pub device: usize,
    pub acc_all: f64,
    pub acc_personalized: f64,
    /// Fraction of indices where the applied vote disagreed with the
    /// device's own gradient sign.
    pub mv_flip_fraction: f64,
}

#[derive(Debug, Clone)]
pub struct TrainLog {
    pub metrics: Vec<RoundDeviceMetrics>,
    pub final_models: Vec<ModelState>,
    /// `[round][device]`, filled when `record_votes` is set.
    pub local_signs: Vec<Vec<SignVector>>,
    /// `[round][device]`, filled when `record_votes` is set.
    pub applied_votes: Vec<Vec<SignVector>>,
}

/// Packs a (server, device) link into the channel substream id.
pub fn link_id(server: usize, device: usize) -> u64 {
    ((server as u64) << 32) | device as u64
}

struct Shared {
    cfg: TrainConfig,
    map: ResourceMap,
    resources: Vec<(usize, usize)>,
    tree: SeedTree,
    gains: LinkGains,
    datasets: Vec<Dataset>,
    class_sets: Vec<BTreeSet<usize>>,
    test: Dataset,
    servers: Vec<usize>,
}

impl Shared {
    fn randomization(&self) -> Randomization {
        if self.cfg.genie {
            Randomization::Unit
        } else {
            Randomization::Qpsk
        }
    }

    /// Fading coefficients for the given links, or all-ones in genie mode.
    fn channels(
        &self,
        links: &[u64],
        purpose: Purpose,
        round: usize,
    ) -> Result<ChannelRealization, LearningError> {
        if self.cfg.genie {
            let one = crate::Complex64::new(1.0, 0.0);
            return Ok(ChannelRealization {
                coeffs: links.iter().map(|_| alloc::vec![one; self.resources.len()]).collect(),
            });
        }
        Ok(draw_channel(&self.cfg.fading, links, &self.resources, &self.tree, purpose, round as u64)?)
    }

    fn noise(&self, sigma2: f64) -> f64 {
        if self.cfg.genie {
            0.0
        } else {
            sigma2
        }
    }
}

/// Error-free reference for the two-hop vote: arithmetic majority over each
/// server's connected devices, then arithmetic majority over each device's
/// connected servers. Ties flip the given coin.
pub fn ideal_mv_oracle<R: Rng>(
    device_signs: &[SignVector],
    connectivity: &ConnectivitySets,
    tie_rng: &mut R,
) -> Vec<SignVector> {
    let q = device_signs.first().map_or(0, SignVector::len);
    let server_votes: Vec<Vec<i8>> = connectivity
        .devices_per_server
        .iter()
        .map(|members| {
            (0..q)
                .map(|i| {
                    let total: i64 = members
                        .iter()
                        .map(|&k| device_signs[k].values()[i] as i64)
                        .sum();
                    sign_of(total as f64, tie_rng)
                })
                .collect()
        })
        .collect();
    connectivity
        .servers_per_device
        .iter()
        .map(|members| {
            SignVector::new(
                (0..q)
                    .map(|i| {
                        let total: i64 =
                            members.iter().map(|&s| server_votes[s][i] as i64).sum();
                        sign_of(total as f64, tie_rng)
                    })
                    .collect(),
            )
            .expect("signs are canonical")
        })
        .collect()
}

/// Runs the full protocol for `cfg.rounds` rounds and returns the per-round
/// per-device metrics together with the final models.
pub fn train(
    cfg: &TrainConfig,
    gains: &LinkGains,
    datasets: &[Dataset],
    models: Vec<ModelState>,
    test: &Dataset,
    exec: &dyn Executor,
) -> Result<TrainLog, LearningError> {
    let device_count = datasets.len();
    if models.len() != device_count || gains.device_count() != device_count {
        return Err(LearningError::ShapeMismatch("datasets, models, and gain columns"));
    }
    if gains.server_count() == 0 || device_count == 0 {
        return Err(LearningError::ShapeMismatch("at least one server and one device"));
    }
    let q = models[0].param_count();
    if models.iter().any(|m| m.param_count() != q) {
        return Err(LearningError::ShapeMismatch("all models must share one parameter count"));
    }
    cfg.noise.validate()?;
    let map = match cfg.mapping_seed {
        None => ResourceMap::linear(q, cfg.subcarriers)?,
        Some(seed) => ResourceMap::permuted(q, cfg.subcarriers, seed)?,
    };
    let servers: Vec<usize> = match cfg.aggregation {
        Aggregation::MultiCell => (0..gains.server_count()).collect(),
        Aggregation::SingleCell => alloc::vec![0],
        Aggregation::LocalOnly => Vec::new(),
    };
    let shared = Arc::new(Shared {
        cfg: cfg.clone(),
        resources: map.elements(),
        map,
        tree: SeedTree::new(cfg.seed),
        gains: gains.clone(),
        datasets: datasets.to_vec(),
        class_sets: datasets.iter().map(Dataset::label_set).collect(),
        test: test.clone(),
        servers,
    });

    let mut models = models;
    let mut log = TrainLog {
        metrics: Vec::with_capacity(cfg.rounds * device_count),
        final_models: Vec::new(),
        local_signs: Vec::new(),
        applied_votes: Vec::new(),
    };

    for round in 0..cfg.rounds {
        // Devices: stochastic gradient signs and uplink grids.
        let grad_jobs: Vec<_> = (0..device_count)
            .map(|k| {
                let ctx = Arc::clone(&shared);
                let model = models[k].clone();
                move || -> Result<(SignVector, GridSymbols), LearningError> {
                    let ds = &ctx.datasets[k];
                    let mut batch_rng = ctx
                        .tree
                        .stream(Purpose::BatchSelection, &[round as u64, k as u64]);
                    let batch = sample_batch(ds.len(), ctx.cfg.batch_size, &mut batch_rng);
                    let grad = stochastic_gradient(&model, ds, &batch)?;
                    let mut tie_rng = ctx
                        .tree
                        .stream(Purpose::GradientSignTie, &[round as u64, k as u64]);
                    let signs = SignVector::from_reals(&grad, &mut tie_rng);
                    let mut phase_rng = ctx
                        .tree
                        .stream(Purpose::UplinkPhase, &[round as u64, k as u64]);
                    let grid = encode_votes(
                        &signs,
                        &ctx.map,
                        ctx.cfg.symbol_energy,
                        ctx.randomization(),
                        &mut phase_rng,
                    )?;
                    Ok((signs, grid))
                }
            })
            .collect();
        let mut signs = Vec::with_capacity(device_count);
        let mut grids = Vec::with_capacity(device_count);
        for result in run_jobs(exec, grad_jobs) {
            let (s, g) = result?;
            signs.push(s);
            grids.push(g);
        }
        let signs = Arc::new(signs);
        let grids = Arc::new(grids);

        // Servers: superpose the uplink, detect, re-encode for the downlink.
        let applied: Vec<SignVector> = if shared.servers.is_empty() {
            // Local-only baseline: apply own signs directly.
            signs.as_ref().clone()
        } else {
            let server_jobs: Vec<_> = shared
                .servers
                .iter()
                .map(|&s| {
                    let ctx = Arc::clone(&shared);
                    let grids = Arc::clone(&grids);
                    move || -> Result<(SignVector, GridSymbols), LearningError> {
                        let links: Vec<u64> =
                            (0..device_count).map(|k| link_id(s, k)).collect();
                        let channels = ctx.channels(&links, Purpose::UplinkChannel, round)?;
                        let contributions: Vec<TxContribution> = (0..device_count)
                            .map(|k| TxContribution {
                                grid: &grids[k],
                                gain: ctx.gains.ul[s][k],
                                channel: &channels.coeffs[k],
                            })
                            .collect();
                        let mut noise_rng = ctx
                            .tree
                            .stream(Purpose::UplinkNoise, &[round as u64, s as u64]);
                        let received = superpose(
                            &ctx.map,
                            &contributions,
                            ctx.noise(ctx.cfg.noise.sigma2_es),
                            &mut noise_rng,
                        )?;
                        let mut tie_rng = ctx
                            .tree
                            .stream(Purpose::UplinkDetectTie, &[round as u64, s as u64]);
                        let (votes, _) = detect_mv(&received, &ctx.map, &mut tie_rng)?;
                        let mut phase_rng = ctx
                            .tree
                            .stream(Purpose::DownlinkPhase, &[round as u64, s as u64]);
                        let grid = encode_votes(
                            &votes,
                            &ctx.map,
                            ctx.cfg.symbol_energy,
                            ctx.randomization(),
                            &mut phase_rng,
                        )?;
                        Ok((votes, grid))
                    }
                })
                .collect();
            let mut server_grids = Vec::with_capacity(shared.servers.len());
            for result in run_jobs(exec, server_jobs) {
                let (_votes, grid) = result?;
                server_grids.push(grid);
            }
            let server_grids = Arc::new(server_grids);

            // Devices: superpose the downlink and detect the final votes.
            let dl_jobs: Vec<_> = (0..device_count)
                .map(|k| {
                    let ctx = Arc::clone(&shared);
                    let server_grids = Arc::clone(&server_grids);
                    move || -> Result<SignVector, LearningError> {
                        let links: Vec<u64> =
                            ctx.servers.iter().map(|&s| link_id(s, k)).collect();
                        let channels = ctx.channels(&links, Purpose::DownlinkChannel, round)?;
                        let contributions: Vec<TxContribution> = ctx
                            .servers
                            .iter()
                            .enumerate()
                            .map(|(si, &s)| TxContribution {
                                grid: &server_grids[si],
                                gain: ctx.gains.dl[s][k],
                                channel: &channels.coeffs[si],
                            })
                            .collect();
                        let mut noise_rng = ctx
                            .tree
                            .stream(Purpose::DownlinkNoise, &[round as u64, k as u64]);
                        let received = superpose(
                            &ctx.map,
                            &contributions,
                            ctx.noise(ctx.cfg.noise.sigma2_ed),
                            &mut noise_rng,
                        )?;
                        let mut tie_rng = ctx
                            .tree
                            .stream(Purpose::DownlinkDetectTie, &[round as u64, k as u64]);
                        let (votes, _) = detect_mv(&received, &ctx.map, &mut tie_rng)?;
                        Ok(votes)
                    }
                })
                .collect();
            run_jobs(exec, dl_jobs)
                .into_iter()
                .collect::<Result<Vec<_>, _>>()?
        };

        // Update and evaluate, one job per device.
        let update_jobs: Vec<_> = (0..device_count)
            .map(|k| {
                let ctx = Arc::clone(&shared);
                let mut model = models[k].clone();
                let votes = applied[k].clone();
                let own = signs[k].clone();
                move || -> Result<(ModelState, RoundDeviceMetrics), LearningError> {
                    apply_update(&mut model, ctx.cfg.eta, &votes)?;
                    let acc_all = evaluate(&model, &ctx.test, None)?;
                    let acc_personalized = evaluate(&model, &ctx.test, Some(&ctx.class_sets[k]))?;
                    let flips = votes
                        .values()
                        .iter()
                        .zip(own.values())
                        .filter(|(a, b)| a != b)
                        .count();
                    Ok((
                        model,
                        RoundDeviceMetrics {
                            round,
                            device: k,
                            acc_all,
                            acc_personalized,
                            mv_flip_fraction: flips as f64 / votes.len() as f64,
                        },
                    ))
                }
            })
            .collect();
        let mut next_models = Vec::with_capacity(device_count);
        for result in run_jobs(exec, update_jobs) {
            let (model, row) = result?;
            next_models.push(model);
            log.metrics.push(row);
        }
        models = next_models;

        if cfg.record_votes {
            log.local_signs.push(signs.as_ref().clone());
            log.applied_votes.push(applied);
        }
    }

    log.final_models = models;
    Ok(log)
}
