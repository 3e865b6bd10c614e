//! Bridges the codec to the statistical model the analysis assumes: under
//! flat i.i.d. fading with unit gains, the received vote energies are
//! exponential with mean `E_s * (vote count) + sigma2`, and the detector
//! error rate follows the exponential-difference law.

use aircomp_core::analysis::ExpDiffDist;
use aircomp_core::channel::complex_gaussian;
use aircomp_core::oac::{
    detect_mv, encode_votes, superpose, Randomization, ResourceMap, SignVector, TxContribution,
};
use aircomp_core::rng::{Purpose, SeedTree};
use aircomp_core::stats;
use aircomp_core::Complex64;

const SYMBOL_ENERGY: f64 = 2.0;

/// Superposes `plus` +1 voters and `minus` -1 voters through independent
/// Rayleigh channels at unit gain; returns per-trial (plus energy, minus
/// energy, detected vote).
fn run_trials(
    plus: usize,
    minus: usize,
    sigma2: f64,
    trials: usize,
    seed: u64,
) -> Vec<(f64, f64, i8)> {
    let map = ResourceMap::linear(1, 2).unwrap();
    let tree = SeedTree::new(seed);
    let mut phase_rng = tree.stream(Purpose::UplinkPhase, &[0]);
    let mut channel_rng = tree.stream(Purpose::UplinkChannel, &[0]);
    let mut noise_rng = tree.stream(Purpose::UplinkNoise, &[0]);
    let mut tie_rng = tree.stream(Purpose::UplinkDetectTie, &[0]);
    let up = SignVector::new(vec![1]).unwrap();
    let down = SignVector::new(vec![-1]).unwrap();
    let mut out = Vec::with_capacity(trials);
    for _ in 0..trials {
        let grids: Vec<_> = (0..plus + minus)
            .map(|t| {
                let votes = if t < plus { &up } else { &down };
                encode_votes(votes, &map, SYMBOL_ENERGY, Randomization::Qpsk, &mut phase_rng)
                    .unwrap()
            })
            .collect();
        let channels: Vec<[Complex64; 2]> = (0..plus + minus)
            .map(|_| [complex_gaussian(&mut channel_rng, 1.0), complex_gaussian(&mut channel_rng, 1.0)])
            .collect();
        let contributions: Vec<TxContribution> = grids
            .iter()
            .zip(&channels)
            .map(|(grid, ch)| TxContribution { grid, gain: 1.0, channel: ch })
            .collect();
        let received = superpose(&map, &contributions, sigma2, &mut noise_rng).unwrap();
        let (votes, _) = detect_mv(&received, &map, &mut tie_rng).unwrap();
        out.push((
            received.slots[0][0].norm_sqr(),
            received.slots[0][1].norm_sqr(),
            votes.values()[0],
        ));
    }
    out
}

#[test]
fn uplink_vote_energy_means_match_the_model() {
    // 4 plus voters, 2 minus voters, sigma2 = 0.01.
    let trials = 1_000_000;
    let samples = run_trials(4, 2, 0.01, trials, 808);
    let plus_mean = stats::mean(&samples.iter().map(|s| s.0).collect::<Vec<_>>());
    let minus_mean = stats::mean(&samples.iter().map(|s| s.1).collect::<Vec<_>>());
    let mu_plus = SYMBOL_ENERGY * 4.0 + 0.01;
    let mu_minus = SYMBOL_ENERGY * 2.0 + 0.01;
    assert!((plus_mean - mu_plus).abs() / mu_plus < 0.01, "plus mean {plus_mean}");
    assert!((minus_mean - mu_minus).abs() / mu_minus < 0.01, "minus mean {minus_mean}");
}

#[test]
fn uplink_vote_energy_is_exponential() {
    let samples = run_trials(4, 2, 0.01, 100_000, 809);
    let powers: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let ks = stats::ks_test_exponential(&powers, SYMBOL_ENERGY * 4.0 + 0.01);
    assert!(ks.p_value > 0.01, "KS p = {}", ks.p_value);
}

#[test]
fn detector_error_rate_follows_the_exponential_difference_law() {
    let trials = 100_000;
    let samples = run_trials(4, 2, 0.01, trials, 810);
    let errors = samples.iter().filter(|s| s.2 == -1).count() as f64;
    let rate = errors / trials as f64;
    let d = ExpDiffDist::new(SYMBOL_ENERGY * 4.0 + 0.01, SYMBOL_ENERGY * 2.0 + 0.01).unwrap();
    let predicted = 1.0 - d.prob_positive();
    let se = (predicted * (1.0 - predicted) / trials as f64).sqrt();
    assert!(
        (rate - predicted).abs() < 3.0 * se,
        "empirical {rate} vs predicted {predicted} (se {se})"
    );
}

#[test]
fn downlink_path_obeys_the_same_energy_law() {
    // The downlink is the same codec with servers transmitting: 2 correct
    // servers vs 1 wrong one.
    let trials = 200_000;
    let samples = run_trials(2, 1, 0.01, trials, 811);
    let plus_mean = stats::mean(&samples.iter().map(|s| s.0).collect::<Vec<_>>());
    let mu_plus = SYMBOL_ENERGY * 2.0 + 0.01;
    assert!((plus_mean - mu_plus).abs() / mu_plus < 0.01);
    let d = ExpDiffDist::new(mu_plus, SYMBOL_ENERGY * 1.0 + 0.01).unwrap();
    let rate = samples.iter().filter(|s| s.2 == -1).count() as f64 / trials as f64;
    let predicted = 1.0 - d.prob_positive();
    let se = (predicted * (1.0 - predicted) / trials as f64).sqrt();
    assert!((rate - predicted).abs() < 3.0 * se);
}

#[test]
fn genie_detection_equals_arithmetic_majority() {
    // Unit channels and phases, no noise: the detected vote must equal
    // sign(plus - minus) whenever the counts differ.
    let map = ResourceMap::linear(32, 8).unwrap();
    let tree = SeedTree::new(909);
    let mut vote_rng = tree.stream(Purpose::OracleTie, &[0]);
    let mut tie_rng = tree.stream(Purpose::OracleTie, &[1]);
    let channel = vec![Complex64::new(1.0, 0.0); 64];
    for _ in 0..20 {
        let votes: Vec<SignVector> = (0..7)
            .map(|_| {
                SignVector::from_reals(
                    &(0..32)
                        .map(|_| if rand::Rng::random::<bool>(&mut vote_rng) { 1.0 } else { -1.0 })
                        .collect::<Vec<_>>(),
                    &mut vote_rng,
                )
            })
            .collect();
        let grids: Vec<_> = votes
            .iter()
            .map(|v| {
                encode_votes(v, &map, SYMBOL_ENERGY, Randomization::Unit, &mut tie_rng).unwrap()
            })
            .collect();
        let contributions: Vec<TxContribution> = grids
            .iter()
            .map(|grid| TxContribution { grid, gain: 1.0, channel: &channel })
            .collect();
        let received = superpose(&map, &contributions, 0.0, &mut tie_rng).unwrap();
        let (detected, _) = detect_mv(&received, &map, &mut tie_rng).unwrap();
        for i in 0..32 {
            let sum: i32 = votes.iter().map(|v| v.values()[i] as i32).sum();
            assert_ne!(sum, 0, "odd voter count cannot tie");
            assert_eq!(detected.values()[i] as i32, sum.signum(), "index {i}");
        }
    }
}
