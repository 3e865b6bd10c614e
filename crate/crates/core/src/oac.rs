//! FSK majority-vote codec.
//!
//! Every gradient index owns a dedicated pair of resource elements on the
//! M x N grid. A transmitter signals a +1 vote by putting a randomized
//! unit-modulus symbol of energy `E_s` on the pair's plus element (and
//! nothing on the minus element), and vice versa for -1. All transmitters
//! send simultaneously; the receiver never equalizes anything — it compares
//! the received energies of the two elements and takes the sign of the
//! difference as the majority vote. The same codec serves the uplink
//! (devices vote, servers detect) and the downlink (servers vote, devices
//! detect).

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::channel::complex_gaussian;
use crate::rng::{Purpose, SeedTree};

/// A vector of votes, one per gradient index, each +1 or -1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignVector(Vec<i8>);

impl SignVector {
    pub fn new(values: Vec<i8>) -> Result<Self, OacError> {
        if values.iter().any(|&v| v != 1 && v != -1) {
            return Err(OacError::InvalidSign);
        }
        Ok(Self(values))
    }

    /// Signs of real values; exact zeros become +1 or -1 by fair coin.
    pub fn from_reals<R: Rng>(values: &[f64], rng: &mut R) -> Self {
        Self(values.iter().map(|&v| sign_of(v, rng)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[i8] {
        &self.0
    }
}

/// Randomized sign: +1 for positive, -1 for negative, fair coin at zero.
pub fn sign_of<R: Rng>(x: f64, rng: &mut R) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else if rng.random::<bool>() {
        1
    } else {
        -1
    }
}

/// Maps each gradient index to its distinct (plus, minus) resource elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResourceMap {
    q: usize,
    subcarriers: usize,
    symbols: usize,
    pairs: Vec<[(usize, usize); 2]>,
}

impl ResourceMap {
    /// Linear interleaving: element `r = 2i` carries the plus slot of index
    /// `i` at `(r mod M, r div M)` and `r + 1` carries the minus slot.
    /// Spans `N = ceil(2q / M)` OFDM symbols.
    pub fn linear(q: usize, subcarriers: usize) -> Result<Self, OacError> {
        Self::build(q, subcarriers, None)
    }

    /// Same pair structure, but the 2q elements are a seeded random sample
    /// of the M x N grid, shuffling which physical elements interfere.
    pub fn permuted(q: usize, subcarriers: usize, seed: u64) -> Result<Self, OacError> {
        Self::build(q, subcarriers, Some(seed))
    }

    fn build(q: usize, subcarriers: usize, permute_seed: Option<u64>) -> Result<Self, OacError> {
        if q < 1 || subcarriers < 2 {
            return Err(OacError::BadMapParams { q, subcarriers });
        }
        let symbols = (2 * q).div_ceil(subcarriers);
        let linear_element = |r: usize| (r % subcarriers, r / subcarriers);
        let pairs = match permute_seed {
            None => (0..q)
                .map(|i| [linear_element(2 * i), linear_element(2 * i + 1)])
                .collect(),
            Some(seed) => {
                let mut order: Vec<usize> = (0..subcarriers * symbols).collect();
                let mut rng = SeedTree::new(seed).stream(Purpose::ResourcePermutation, &[]);
                order.shuffle(&mut rng);
                (0..q)
                    .map(|i| [linear_element(order[2 * i]), linear_element(order[2 * i + 1])])
                    .collect()
            }
        };
        Ok(Self { q, subcarriers, symbols, pairs })
    }

    pub fn gradient_count(&self) -> usize {
        self.q
    }

    pub fn subcarriers(&self) -> usize {
        self.subcarriers
    }

    pub fn symbols(&self) -> usize {
        self.symbols
    }

    pub fn pair(&self, i: usize) -> [(usize, usize); 2] {
        self.pairs[i]
    }

    /// All mapped resource elements in slot order:
    /// plus(0), minus(0), plus(1), minus(1), ...
    pub fn elements(&self) -> Vec<(usize, usize)> {
        self.pairs.iter().flat_map(|&[p, m]| [p, m]).collect()
    }
}

/// How the per-index randomization symbol is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Randomization {
    /// A fresh uniform QPSK point per (transmitter, index).
    Qpsk,
    /// Fixed unit phase — the genie hook used by protocol-exactness tests.
    Unit,
}

const QPSK: [Complex64; 4] = [
    Complex64::new(core::f64::consts::FRAC_1_SQRT_2, core::f64::consts::FRAC_1_SQRT_2),
    Complex64::new(-core::f64::consts::FRAC_1_SQRT_2, core::f64::consts::FRAC_1_SQRT_2),
    Complex64::new(-core::f64::consts::FRAC_1_SQRT_2, -core::f64::consts::FRAC_1_SQRT_2),
    Complex64::new(core::f64::consts::FRAC_1_SQRT_2, -core::f64::consts::FRAC_1_SQRT_2),
];

/// One transmitter's sparse grid: per gradient index, the complex symbols on
/// the plus and minus elements (exactly one of which is nonzero).
#[derive(Debug, Clone, PartialEq)]
pub struct GridSymbols {
    pub slots: Vec<[Complex64; 2]>,
    pub symbol_energy: f64,
}

impl GridSymbols {
    /// Active elements as `(m, n, symbol)` triplets, in slot order.
    pub fn active_elements(&self, map: &ResourceMap) -> Vec<(usize, usize, Complex64)> {
        let mut out = Vec::new();
        for (i, slot) in self.slots.iter().enumerate() {
            for side in 0..2 {
                if slot[side].norm_sqr() > 0.0 {
                    let (m, n) = map.pair(i)[side];
                    out.push((m, n, slot[side]));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OacError {
    #[error("sign vectors may only contain +1 and -1")]
    InvalidSign,
    #[error("resource map needs q >= 1 and at least 2 subcarriers (q = {q}, M = {subcarriers})")]
    BadMapParams { q: usize, subcarriers: usize },
    #[error("vote count {votes} does not match the map's gradient count {q}")]
    VoteCountMismatch { votes: usize, q: usize },
    #[error("grid or channel shape mismatch: expected {expected} entries, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
}

/// Builds the transmit grid for one vote vector: vote +1 at index `i` puts
/// `sqrt(E_s) * P` on the plus element and leaves the minus element silent,
/// symmetrically for -1. `P` is drawn per index from `rng`.
pub fn encode_votes<R: Rng>(
    votes: &SignVector,
    map: &ResourceMap,
    symbol_energy: f64,
    randomization: Randomization,
    rng: &mut R,
) -> Result<GridSymbols, OacError> {
    if votes.len() != map.gradient_count() {
        return Err(OacError::VoteCountMismatch { votes: votes.len(), q: map.gradient_count() });
    }
    let amplitude = symbol_energy.sqrt();
    let zero = Complex64::new(0.0, 0.0);
    let slots = votes
        .values()
        .iter()
        .map(|&vote| {
            let phase = match randomization {
                Randomization::Qpsk => QPSK[rng.random_range(0..4)],
                Randomization::Unit => Complex64::new(1.0, 0.0),
            };
            let symbol = amplitude * phase;
            if vote == 1 {
                [symbol, zero]
            } else {
                [zero, symbol]
            }
        })
        .collect();
    Ok(GridSymbols { slots, symbol_energy })
}

/// One transmitter's contribution to a superposition: its grid, its
/// large-scale power gain toward the receiver, and its per-element fading
/// coefficients (aligned with [`ResourceMap::elements`] order).
#[derive(Debug, Clone, Copy)]
pub struct TxContribution<'a> {
    pub grid: &'a GridSymbols,
    pub gain: f64,
    pub channel: &'a [Complex64],
}

/// What one receiver observes on every mapped element.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceivedGrid {
    pub slots: Vec<[Complex64; 2]>,
}

/// Energy statistics of a detection pass: `delta[i]` is the received energy
/// on the plus element minus the energy on the minus element.
#[derive(Debug, Clone, PartialEq)]
pub struct VoteStatistics {
    pub delta: Vec<f64>,
}

/// Sums all contributions element-wise and adds receiver noise on every
/// mapped element, active or not. Contributions are accumulated in slice
/// order and noise is drawn in slot order, which pins the floating-point
/// result bit-for-bit.
pub fn superpose<R: Rng>(
    map: &ResourceMap,
    contributions: &[TxContribution],
    sigma2: f64,
    noise_rng: &mut R,
) -> Result<ReceivedGrid, OacError> {
    let q = map.gradient_count();
    for tx in contributions {
        if tx.grid.slots.len() != q {
            return Err(OacError::ShapeMismatch { expected: q, got: tx.grid.slots.len() });
        }
        if tx.channel.len() != 2 * q {
            return Err(OacError::ShapeMismatch { expected: 2 * q, got: tx.channel.len() });
        }
    }
    let mut slots = vec![[Complex64::new(0.0, 0.0); 2]; q];
    for tx in contributions {
        let amplitude_gain = tx.gain.sqrt();
        for i in 0..q {
            for side in 0..2 {
                slots[i][side] += amplitude_gain * tx.channel[2 * i + side] * tx.grid.slots[i][side];
            }
        }
    }
    for slot in slots.iter_mut() {
        slot[0] += complex_gaussian(noise_rng, sigma2);
        slot[1] += complex_gaussian(noise_rng, sigma2);
    }
    Ok(ReceivedGrid { slots })
}

/// Non-coherent majority-vote detection: per index, the energy difference
/// between the plus and minus elements, with its randomized sign.
pub fn detect_mv<R: Rng>(
    received: &ReceivedGrid,
    map: &ResourceMap,
    tie_rng: &mut R,
) -> Result<(SignVector, VoteStatistics), OacError> {
    if received.slots.len() != map.gradient_count() {
        return Err(OacError::ShapeMismatch {
            expected: map.gradient_count(),
            got: received.slots.len(),
        });
    }
    let delta: Vec<f64> = received
        .slots
        .iter()
        .map(|slot| slot[0].norm_sqr() - slot[1].norm_sqr())
        .collect();
    let votes = SignVector(delta.iter().map(|&d| sign_of(d, tie_rng)).collect());
    Ok((votes, VoteStatistics { delta }))
}
