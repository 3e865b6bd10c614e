//! Link-level simulator and analysis toolkit for multi-cell non-coherent
//! over-the-air majority-vote aggregation in federated edge learning.
//!
//! Edge devices (EDs) encode the signs of their local stochastic gradients
//! onto dedicated FSK resource pairs; edge servers (ESs) detect per-index
//! majority votes from superposed uplink energies, re-encode them, and the
//! EDs detect the final votes from the superposed downlink — so inter-cell
//! interference contributes to the computation instead of corrupting it.
//!
//! The crate is split into:
//!
//! - [`topology`]: hexagonal ES lattices, cell-edge ED placement, path-loss
//!   link gains, and gain-threshold connectivity sets;
//! - [`channel`]: flat i.i.d. Rayleigh and tapped-delay-line fading plus
//!   complex AWGN, all drawn from keyed substreams;
//! - [`oac`]: the FSK majority-vote codec (resource mapping, vote encoding,
//!   grid superposition, energy detection);
//! - [`learning`]: datasets, label partitions, linear/MLP classifiers,
//!   sign-SGD gradients, and the two-hop training loop;
//! - [`analysis`]: closed-form success/error probabilities and the
//!   convergence bound, each paired with a Monte-Carlo estimator;
//! - [`rng`]: the substream derivation scheme that makes every draw in the
//!   simulator addressable by `(master seed, round, entity, purpose)`;
//! - [`exec`]: a minimal executor abstraction so callers can parallelize
//!   per-entity work without changing any result.
//!
//! The crate is `no_std`-compatible (with `alloc`); everything involving
//! files, the CLI, and text formats lives in the companion `aircomp` crate.

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod analysis;
pub mod channel;
pub mod exec;
pub mod learning;
pub mod oac;
pub mod rng;
pub mod stats;
pub mod topology;

pub use num_complex::Complex64;
