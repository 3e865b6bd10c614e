//! Keyed substream derivation for reproducible parallel simulation.
//!
//! Every random draw in the simulator comes from a [`ChaCha12Rng`] whose
//! 256-bit seed is derived from `(master seed, purpose tag, path...)` by the
//! keyed hash below. Substreams for distinct tuples are independent, and a
//! substream never depends on how many draws any other substream consumed,
//! so per-entity work can run on any number of workers and still produce
//! bit-identical results to a sequential run.
//!
//! Derivation scheme (the reproducibility contract):
//!
//! 1. start from `state = master_seed XOR DOMAIN`, where
//!    `DOMAIN = 0x616f_6163_2e76_3100` (ASCII "aoac.v1" zero-padded);
//! 2. for each tuple element `e` (the purpose tag followed by the path
//!    words), absorb it with `state = mix64(state ^ mix64(e))`;
//! 3. squeeze the 32-byte ChaCha key as `mix64(state + i)` for
//!    `i = 1, 2, 3, 4`, little-endian.
//!
//! `mix64` is the SplitMix64 finalizer (Steele et al.), a bijective avalanche
//! mix; two tuples differing in any element yield unrelated keys.

use alloc::vec::Vec;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

const DOMAIN: u64 = 0x616f_6163_2e76_3100;

/// SplitMix64 finalizer.
#[inline]
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// What a substream is for. The discriminant is the first tuple element of
/// the derivation, so draws for different purposes never collide even when
/// the rest of the path coincides.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    EdPlacement = 1,
    DatasetSynthesis = 2,
    DatasetSplit = 3,
    Partition = 4,
    ModelInit = 5,
    BatchSelection = 6,
    GradientSignTie = 7,
    UplinkPhase = 8,
    UplinkChannel = 9,
    UplinkNoise = 10,
    UplinkDetectTie = 11,
    DownlinkPhase = 12,
    DownlinkChannel = 13,
    DownlinkNoise = 14,
    DownlinkDetectTie = 15,
    ResourcePermutation = 16,
    McTrialBlock = 17,
    OracleTie = 18,
}

/// Root of a run's substream tree: the master seed plus the derivation rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedTree {
    master: u64,
}

impl SeedTree {
    pub fn new(master: u64) -> Self {
        Self { master }
    }

    pub fn master(&self) -> u64 {
        self.master
    }

    /// Derives the generator for `(purpose, path)`. Typical paths are
    /// `[round, entity]` or `[round, server, device]`; an empty path is fine.
    pub fn stream(&self, purpose: Purpose, path: &[u64]) -> ChaCha12Rng {
        let mut state = self.master ^ DOMAIN;
        state = mix64(state ^ mix64(purpose as u64));
        for &word in path {
            state = mix64(state ^ mix64(word));
        }
        let mut key = [0u8; 32];
        for i in 0..4 {
            let word = mix64(state.wrapping_add(1 + i as u64));
            key[8 * i..8 * (i + 1)].copy_from_slice(&word.to_le_bytes());
        }
        ChaCha12Rng::from_seed(key)
    }
}

/// Splits `total` Monte-Carlo trials into fixed-size blocks, each with its
/// own substream index. Merging block results in index order is what keeps
/// parallel estimates identical to sequential ones.
pub fn trial_blocks(total: u64, block_size: u64) -> Vec<(u64, u64)> {
    assert!(block_size > 0);
    let mut blocks = Vec::new();
    let mut done = 0u64;
    let mut idx = 0u64;
    while done < total {
        let n = block_size.min(total - done);
        blocks.push((idx, n));
        done += n;
        idx += 1;
    }
    blocks
}
