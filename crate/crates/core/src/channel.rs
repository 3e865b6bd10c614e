//! Small-scale fading and receiver noise.
//!
//! Two fading models are supported. `FlatIid` draws an independent
//! unit-variance circularly-symmetric complex Gaussian per (link, resource
//! element) — the regime the closed-form error analysis assumes. The
//! tapped-delay-line model draws per-tap gains `h_l ~ CN(0, p_l)` and
//! evaluates the frequency response
//! `H(m) = sum_l h_l * exp(-j 2 pi m df tau_l)` on the mapped subcarriers,
//! with taps redrawn per OFDM symbol or held for a whole round.
//!
//! Every draw comes from a keyed substream (see [`crate::rng`]), so uplink
//! and downlink realizations, different links, and different rounds are all
//! independent by construction.

use alloc::vec::Vec;

use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;
use rand::Rng;

use crate::rng::{Purpose, SeedTree};

/// One multipath tap: excess delay in seconds and mean linear power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tap {
    pub delay_s: f64,
    pub power: f64,
}

/// Whether tapped-delay-line taps are redrawn per OFDM symbol or held
/// constant for all symbols of a round.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FadingGranularity {
    PerSymbol,
    PerRound,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FadingVariant {
    FlatIid,
    TappedDelayLine {
        taps: Vec<Tap>,
        granularity: FadingGranularity,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FadingModel {
    pub variant: FadingVariant,
    pub subcarrier_spacing_hz: f64,
}

/// ITU Extended Pedestrian A power-delay profile, v1: delays in ns and
/// relative powers in dB, prior to unit-power normalization.
pub const EPA_PROFILE_V1: [(f64, f64); 7] = [
    (0.0, 0.0),
    (30.0, -1.0),
    (70.0, -2.0),
    (90.0, -3.0),
    (110.0, -8.0),
    (190.0, -17.2),
    (410.0, -20.8),
];

impl FadingModel {
    pub fn flat_iid() -> Self {
        Self {
            variant: FadingVariant::FlatIid,
            subcarrier_spacing_hz: 15_000.0,
        }
    }

    /// EPA profile with powers renormalized to sum to 1.
    pub fn epa(subcarrier_spacing_hz: f64, granularity: FadingGranularity) -> Self {
        let linear: Vec<f64> = EPA_PROFILE_V1
            .iter()
            .map(|&(_, db)| 10.0f64.powf(db / 10.0))
            .collect();
        let total: f64 = linear.iter().sum();
        let taps = EPA_PROFILE_V1
            .iter()
            .zip(&linear)
            .map(|(&(delay_ns, _), &p)| Tap {
                delay_s: delay_ns * 1e-9,
                power: p / total,
            })
            .collect();
        Self {
            variant: FadingVariant::TappedDelayLine { taps, granularity },
            subcarrier_spacing_hz,
        }
    }

    pub fn validate(&self) -> Result<(), ChannelError> {
        match &self.variant {
            FadingVariant::FlatIid => Ok(()),
            FadingVariant::TappedDelayLine { taps, .. } => {
                if taps.is_empty() {
                    return Err(ChannelError::EmptyProfile);
                }
                let total: f64 = taps.iter().map(|t| t.power).sum();
                if (total - 1.0).abs() > 1e-12 {
                    return Err(ChannelError::UnnormalizedProfile { total });
                }
                let increasing = taps.windows(2).all(|w| w[1].delay_s > w[0].delay_s);
                if !increasing || taps[0].delay_s < 0.0 {
                    return Err(ChannelError::BadDelays);
                }
                Ok(())
            }
        }
    }
}

/// Receiver noise variances (linear) at the server and device sides.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseParams {
    pub sigma2_es: f64,
    pub sigma2_ed: f64,
}

impl NoiseParams {
    pub fn noiseless() -> Self {
        Self { sigma2_es: 0.0, sigma2_ed: 0.0 }
    }

    pub fn validate(&self) -> Result<(), ChannelError> {
        if self.sigma2_es < 0.0 || self.sigma2_ed < 0.0 {
            return Err(ChannelError::NegativeVariance);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ChannelError {
    #[error("tapped-delay-line profile has no taps")]
    EmptyProfile,
    #[error("tap powers must sum to 1, got {total}")]
    UnnormalizedProfile { total: f64 },
    #[error("tap delays must be non-negative and strictly increasing")]
    BadDelays,
    #[error("noise variance must be non-negative")]
    NegativeVariance,
}

/// Per-link complex coefficients on the mapped resource elements;
/// `coeffs[link][re]` is aligned with the `links` and `resources` slices
/// given to [`draw_channel`].
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub coeffs: Vec<Vec<Complex64>>,
}

/// One draw of a circularly-symmetric complex Gaussian with total variance
/// `variance` (polar form; real and imaginary parts are `N(0, variance/2)`).
pub fn complex_gaussian<R: Rng>(rng: &mut R, variance: f64) -> Complex64 {
    let u1: f64 = 1.0 - rng.random::<f64>(); // (0, 1]
    let u2: f64 = rng.random();
    let radius = (-variance * u1.ln()).sqrt();
    let angle = 2.0 * core::f64::consts::PI * u2;
    Complex64::new(radius * angle.cos(), radius * angle.sin())
}

fn tdl_response(taps: &[Complex64], model_taps: &[Tap], m: usize, spacing_hz: f64) -> Complex64 {
    let mut h = Complex64::new(0.0, 0.0);
    for (gain, tap) in taps.iter().zip(model_taps) {
        let phase = -2.0 * core::f64::consts::PI * m as f64 * spacing_hz * tap.delay_s;
        h += gain * Complex64::new(phase.cos(), phase.sin());
    }
    h
}

/// Draws fading coefficients for every `(link, resource)` pair for one
/// communication round. Each link uses its own substream keyed by
/// `(purpose, round, link id)`, so links may be generated concurrently
/// without changing any value.
pub fn draw_channel(
    model: &FadingModel,
    links: &[u64],
    resources: &[(usize, usize)],
    tree: &SeedTree,
    purpose: Purpose,
    round: u64,
) -> Result<ChannelRealization, ChannelError> {
    model.validate()?;
    let mut coeffs = Vec::with_capacity(links.len());
    for &link in links {
        let mut rng = tree.stream(purpose, &[round, link]);
        let per_link = match &model.variant {
            FadingVariant::FlatIid => resources
                .iter()
                .map(|_| complex_gaussian(&mut rng, 1.0))
                .collect(),
            FadingVariant::TappedDelayLine { taps, granularity } => {
                let draw_taps = |rng: &mut rand_chacha::ChaCha12Rng| -> Vec<Complex64> {
                    taps.iter()
                        .map(|tap| complex_gaussian(rng, tap.power))
                        .collect()
                };
                match granularity {
                    FadingGranularity::PerRound => {
                        let gains = draw_taps(&mut rng);
                        resources
                            .iter()
                            .map(|&(m, _)| {
                                tdl_response(&gains, taps, m, model.subcarrier_spacing_hz)
                            })
                            .collect()
                    }
                    FadingGranularity::PerSymbol => {
                        // One tap set per distinct OFDM symbol, drawn in
                        // increasing symbol order.
                        let mut symbols: Vec<usize> = resources.iter().map(|&(_, n)| n).collect();
                        symbols.sort_unstable();
                        symbols.dedup();
                        let per_symbol: Vec<Vec<Complex64>> =
                            symbols.iter().map(|_| draw_taps(&mut rng)).collect();
                        resources
                            .iter()
                            .map(|&(m, n)| {
                                let idx = symbols.binary_search(&n).expect("symbol present");
                                tdl_response(
                                    &per_symbol[idx],
                                    taps,
                                    m,
                                    model.subcarrier_spacing_hz,
                                )
                            })
                            .collect()
                    }
                }
            }
        };
        coeffs.push(per_link);
    }
    Ok(ChannelRealization { coeffs })
}

/// Draws `count` i.i.d. complex AWGN samples with total variance `sigma2`.
pub fn draw_noise<R: Rng>(rng: &mut R, sigma2: f64, count: usize) -> Vec<Complex64> {
    (0..count).map(|_| complex_gaussian(rng, sigma2)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tree() -> SeedTree {
        SeedTree::new(1234)
    }

    #[test]
    fn single_zero_delay_tap_is_flat_across_subcarriers() {
        let model = FadingModel {
            variant: FadingVariant::TappedDelayLine {
                taps: alloc::vec![Tap { delay_s: 0.0, power: 1.0 }],
                granularity: FadingGranularity::PerRound,
            },
            subcarrier_spacing_hz: 15_000.0,
        };
        let resources: Vec<(usize, usize)> = (0..64).map(|m| (m, 0)).collect();
        let real = draw_channel(&model, &[0], &resources, &tree(), Purpose::UplinkChannel, 0)
            .unwrap();
        let first = real.coeffs[0][0];
        for c in &real.coeffs[0] {
            assert!((c - first).norm_sqr() < 1e-24);
        }
    }

    #[test]
    fn per_symbol_taps_change_between_symbols() {
        let model = FadingModel::epa(15_000.0, FadingGranularity::PerSymbol);
        let resources = alloc::vec![(0, 0), (0, 1)];
        let real = draw_channel(&model, &[0], &resources, &tree(), Purpose::UplinkChannel, 0)
            .unwrap();
        assert!((real.coeffs[0][0] - real.coeffs[0][1]).norm_sqr() > 1e-12);
    }

    #[test]
    fn epa_profile_is_normalized_and_ordered() {
        let model = FadingModel::epa(15_000.0, FadingGranularity::PerRound);
        model.validate().unwrap();
    }

    #[test]
    fn unnormalized_profile_is_rejected() {
        let model = FadingModel {
            variant: FadingVariant::TappedDelayLine {
                taps: alloc::vec![Tap { delay_s: 0.0, power: 0.7 }],
                granularity: FadingGranularity::PerRound,
            },
            subcarrier_spacing_hz: 15_000.0,
        };
        assert!(matches!(
            model.validate(),
            Err(ChannelError::UnnormalizedProfile { .. })
        ));
    }

    #[test]
    fn zero_variance_noise_is_exactly_zero() {
        let mut rng = tree().stream(Purpose::UplinkNoise, &[0]);
        for w in draw_noise(&mut rng, 0.0, 100) {
            assert_eq!(w, Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn links_use_independent_substreams() {
        let resources = alloc::vec![(0, 0)];
        let both = draw_channel(
            &FadingModel::flat_iid(),
            &[7, 8],
            &resources,
            &tree(),
            Purpose::UplinkChannel,
            3,
        )
        .unwrap();
        let seven_alone = draw_channel(
            &FadingModel::flat_iid(),
            &[7],
            &resources,
            &tree(),
            Purpose::UplinkChannel,
            3,
        )
        .unwrap();
        // Same link, same round: identical regardless of batching.
        assert_eq!(both.coeffs[0], seven_alone.coeffs[0]);
        assert_ne!(both.coeffs[0], both.coeffs[1]);
    }

    #[test]
    fn uplink_and_downlink_streams_differ() {
        let resources = alloc::vec![(0, 0)];
        let ul = draw_channel(&FadingModel::flat_iid(), &[7], &resources, &tree(), Purpose::UplinkChannel, 3).unwrap();
        let dl = draw_channel(&FadingModel::flat_iid(), &[7], &resources, &tree(), Purpose::DownlinkChannel, 3).unwrap();
        assert_ne!(ul.coeffs[0], dl.coeffs[0]);
    }
}
