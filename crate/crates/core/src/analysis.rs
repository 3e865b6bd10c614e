//! Closed-form decision statistics of the two-hop vote under the
//! fixed-connectivity model, plus Monte-Carlo estimators for each of them.
//!
//! Under fixed connectivity with unit gains, the received energy on a vote
//! element is exponential with mean `E_s * (votes on that element) + sigma2`,
//! so the detector statistic is a difference of two exponentials with
//! density `f(x, mu1, mu2)`. Everything else here is built from that fact:
//! the server's success probability given the per-device correct-sign
//! probability, the device-side error probability summed over server
//! outcomes, its gradient-SNR upper bound, and the convergence-rate
//! constants A and B.
//!
//! Every closed form has a Monte-Carlo twin (`mc_*`) that simulates the
//! underlying draws directly; the pairs are kept independent so either side
//! can catch a defect in the other. The binomial sums are implemented
//! verbatim, starting at index 1; `SupportMode::Complete` adds the zero
//! term for callers that want a probability over the full support.

use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;
use rand::Rng;

use crate::exec::{run_jobs, Executor};
use crate::rng::{trial_blocks, Purpose, SeedTree};

/// Difference of independent exponentials: `Exp(mu1) - Exp(mu2)`
/// (means, not rates).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpDiffDist {
    pub mu1: f64,
    pub mu2: f64,
}

impl ExpDiffDist {
    pub fn new(mu1: f64, mu2: f64) -> Result<Self, AnalysisError> {
        if !(mu1 > 0.0) || !(mu2 > 0.0) {
            return Err(AnalysisError::NonPositiveMean);
        }
        Ok(Self { mu1, mu2 })
    }

    /// Density at `x`.
    pub fn pdf(&self, x: f64) -> f64 {
        if x > 0.0 {
            (-x / self.mu1).exp() / (self.mu1 + self.mu2)
        } else {
            (x / self.mu2).exp() / (self.mu1 + self.mu2)
        }
    }

    /// `P(X > 0) = mu1 / (mu1 + mu2)`.
    pub fn prob_positive(&self) -> f64 {
        self.mu1 / (self.mu1 + self.mu2)
    }
}

/// Connectivity and energy parameters of the fixed-connectivity model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConnectivityParams {
    /// Devices heard by every server (K_c).
    pub devices_per_server: u32,
    /// Servers heard by every device (S_c).
    pub servers_per_device: u32,
    pub symbol_energy: f64,
    pub sigma2_es: f64,
    pub sigma2_ed: f64,
}

impl ConnectivityParams {
    pub fn validate(&self) -> Result<(), AnalysisError> {
        if self.devices_per_server < 1
            || self.servers_per_device < 1
            || !(self.symbol_energy > 0.0)
            || self.sigma2_es < 0.0
            || self.sigma2_ed < 0.0
        {
            return Err(AnalysisError::BadConnectivityParams);
        }
        Ok(())
    }
}

/// Inputs of the convergence-rate bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundInputs {
    /// `F(w0) - F*`, in loss units.
    pub initial_gap: f64,
    /// l1 norm of the per-coordinate smoothness constants.
    pub smoothness_l1: f64,
    /// l1 norm of the per-coordinate gradient-noise scales.
    pub sigma_l1: f64,
    /// Positive integer linking batch size and rounds (`n_b = T / gamma`).
    pub gamma: u32,
    pub rounds: u64,
    pub device_count: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum AnalysisError {
    #[error("exponential means must be positive")]
    NonPositiveMean,
    #[error("connectivity parameters out of range")]
    BadConnectivityParams,
    #[error("bound inputs out of range")]
    BadBoundInputs,
    #[error("bound denominator is exactly zero (device count equals 2A)")]
    DegenerateDenominator,
}

/// Whether a binomial sum keeps the verbatim support (index 1 upward) or
/// includes the zero term.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SupportMode {
    ExcludeZero,
    Complete,
}

/// Probability that a server detects the true sign, given that each of its
/// devices votes correctly with probability `p_i`:
/// `(E_s K_c p_i + sigma2_es) / (E_s K_c + 2 sigma2_es)`.
pub fn es_success_prob(p_i: f64, cp: &ConnectivityParams) -> f64 {
    let ek = cp.symbol_energy * cp.devices_per_server as f64;
    (ek * p_i + cp.sigma2_es) / (ek + 2.0 * cp.sigma2_es)
}

fn binomial_coefficient(n: u32, k: u32) -> f64 {
    let mut c = 1.0;
    for i in 1..=k {
        c = c * (n - k + i) as f64 / i as f64;
    }
    c
}

/// Device-side error probability as the explicit sum over the number of
/// correct servers `S+`, each term weighting the conditional error
/// `(E_s S- + sigma2_ed) / (E_s S_c + 2 sigma2_ed)` by the binomial
/// probability of `S+` successes at rate `p_y`.
pub fn ed_error_prob_sum(p_y: f64, cp: &ConnectivityParams, support: SupportMode) -> f64 {
    let s_c = cp.servers_per_device;
    let denom = cp.symbol_energy * s_c as f64 + 2.0 * cp.sigma2_ed;
    let start = match support {
        SupportMode::ExcludeZero => 1,
        SupportMode::Complete => 0,
    };
    let mut total = 0.0;
    for s_plus in start..=s_c {
        let conditional =
            (cp.symbol_energy * (s_c - s_plus) as f64 + cp.sigma2_ed) / denom;
        let weight = binomial_coefficient(s_c, s_plus)
            * p_y.powi(s_plus as i32)
            * (1.0 - p_y).powi((s_c - s_plus) as i32);
        total += conditional * weight;
    }
    total
}

/// Lower bound on the per-device correct-sign probability at a given
/// gradient SNR: `1 - sqrt(2) / (3 S)`.
pub fn correct_sign_floor(gradient_snr: f64) -> f64 {
    1.0 - 2.0f64.sqrt() / (3.0 * gradient_snr)
}

/// Gradient SNR as printed in the bound's derivation:
/// `|g_i| / (sigma_i^2 / sqrt(n_b))`.
pub fn gradient_snr(grad_magnitude: f64, sigma_i: f64, batch_size: u32) -> f64 {
    grad_magnitude / (sigma_i * sigma_i / (batch_size as f64).sqrt())
}

/// Alternative gradient SNR using the variance-bound scaling
/// `sigma_i^2 / n_b`; exposed because the two scalings coexist upstream.
pub fn gradient_snr_variance_scaled(grad_magnitude: f64, sigma_i: f64, batch_size: u32) -> f64 {
    grad_magnitude / (sigma_i * sigma_i / batch_size as f64)
}

/// Closed-form upper bound on the device-side error probability at a given
/// gradient SNR.
pub fn ed_error_prob_bound(cp: &ConnectivityParams, gradient_snr: f64) -> f64 {
    let ek = cp.symbol_energy * cp.devices_per_server as f64;
    let es = cp.symbol_energy * cp.servers_per_device as f64;
    let p_y_floor = (cp.sigma2_es + ek * correct_sign_floor(gradient_snr))
        / (ek + 2.0 * cp.sigma2_es);
    (cp.sigma2_ed + es * (1.0 - p_y_floor)) / (es + 2.0 * cp.sigma2_ed)
}

/// The convergence-rate constants:
/// `B = S_c (sigma2_es + E_s K_c) / (E_s (S_c + 2 sigma2_ed)(K_c + 2 sigma2_es))`
/// and `A = 1 / (1 + sigma2_ed) - B`.
pub fn compute_ab(cp: &ConnectivityParams) -> (f64, f64) {
    let s_c = cp.servers_per_device as f64;
    let k_c = cp.devices_per_server as f64;
    let b = s_c * (cp.sigma2_es + cp.symbol_energy * k_c)
        / (cp.symbol_energy * (s_c + 2.0 * cp.sigma2_ed) * (k_c + 2.0 * cp.sigma2_es));
    let a = 1.0 / (1.0 + cp.sigma2_ed) - b;
    (a, b)
}

/// Convergence bound plus the flags callers must surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceBound {
    /// Bound on the round-averaged expected l1 gradient norm.
    pub value: f64,
    pub a: f64,
    pub b: f64,
    /// Set when `K <= 2A`: the printed denominator is nonpositive and the
    /// bound is not meaningful as stated.
    pub nonpositive_denominator: bool,
    /// Set when `A < 0`; the `K - 2A` denominator is then dominated by `K`.
    pub negative_a: bool,
}

/// Evaluates the convergence-rate bound
/// `(gap + K |L|_1 / 2 + 2 sqrt(gamma) B (sqrt(2)/3) |sigma|_1) / ((K - 2A) sqrt(T))`
/// with the step size `1/T` and batch size `T/gamma` implied.
pub fn convergence_bound(
    bi: &BoundInputs,
    cp: &ConnectivityParams,
) -> Result<ConvergenceBound, AnalysisError> {
    if bi.initial_gap < 0.0
        || bi.smoothness_l1 < 0.0
        || bi.sigma_l1 < 0.0
        || bi.gamma < 1
        || bi.rounds < 1
        || bi.device_count < 1
    {
        return Err(AnalysisError::BadBoundInputs);
    }
    cp.validate()?;
    let (a, b) = compute_ab(cp);
    let k = bi.device_count as f64;
    let denominator = (k - 2.0 * a) * (bi.rounds as f64).sqrt();
    if denominator == 0.0 {
        return Err(AnalysisError::DegenerateDenominator);
    }
    let numerator = bi.initial_gap
        + 0.5 * k * bi.smoothness_l1
        + 2.0 * (bi.gamma as f64).sqrt() * b * (2.0f64.sqrt() / 3.0) * bi.sigma_l1;
    Ok(ConvergenceBound {
        value: numerator / denominator,
        a,
        b,
        nonpositive_denominator: k - 2.0 * a <= 0.0,
        negative_a: a < 0.0,
    })
}

/// A Monte-Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub probability: f64,
    pub std_error: f64,
    pub trials: u64,
}

impl McEstimate {
    fn from_counts(hits: u64, trials: u64) -> Self {
        let p = hits as f64 / trials as f64;
        Self {
            probability: p,
            std_error: (p * (1.0 - p) / trials as f64).sqrt(),
            trials,
        }
    }
}

const MC_BLOCK: u64 = 1 << 16;

// Oracle tags keep different estimators' substreams apart under one seed.
const TAG_EXPDIFF: u64 = 1;
const TAG_ES_SUCCESS: u64 = 2;
const TAG_ED_ERROR: u64 = 3;
const TAG_TWO_HOP: u64 = 4;

fn exp_draw<R: Rng>(rng: &mut R, mean: f64) -> f64 {
    -mean * (1.0 - rng.random::<f64>()).ln()
}

fn mc_counts<F>(trials: u64, seed: u64, tag: u64, exec: &dyn Executor, per_trial: F) -> McEstimate
where
    F: Fn(&mut rand_chacha::ChaCha12Rng) -> bool + Clone + Send + Sync + 'static,
{
    let tree = SeedTree::new(seed);
    let jobs: Vec<_> = trial_blocks(trials, MC_BLOCK)
        .into_iter()
        .map(|(block, count)| {
            let per_trial = per_trial.clone();
            move || -> u64 {
                let mut rng = tree.stream(Purpose::McTrialBlock, &[tag, block]);
                (0..count).filter(|_| per_trial(&mut rng)).count() as u64
            }
        })
        .collect();
    // Fixed block order; integer counts make the merge exact.
    let hits: u64 = run_jobs(exec, jobs).into_iter().sum();
    McEstimate::from_counts(hits, trials)
}

/// Estimates `P(Exp(mu1) - Exp(mu2) > 0)` by simulation.
pub fn mc_expdiff_positive(
    d: &ExpDiffDist,
    trials: u64,
    seed: u64,
    exec: &dyn Executor,
) -> McEstimate {
    let d = *d;
    mc_counts(trials, seed, TAG_EXPDIFF, exec, move |rng| {
        exp_draw(rng, d.mu1) - exp_draw(rng, d.mu2) > 0.0
    })
}

/// Simulates one uplink detection: binomial correct-vote count, exponential
/// energies, sign comparison. Estimates the server success probability.
pub fn mc_es_success(
    p_i: f64,
    cp: &ConnectivityParams,
    trials: u64,
    seed: u64,
    exec: &dyn Executor,
) -> McEstimate {
    let cp = *cp;
    mc_counts(trials, seed, TAG_ES_SUCCESS, exec, move |rng| {
        let correct = (0..cp.devices_per_server)
            .filter(|_| rng.random::<f64>() < p_i)
            .count() as f64;
        let wrong = cp.devices_per_server as f64 - correct;
        let plus = exp_draw(rng, cp.symbol_energy * correct + cp.sigma2_es);
        let minus = exp_draw(rng, cp.symbol_energy * wrong + cp.sigma2_es);
        plus - minus > 0.0
    })
}

/// Support-matched twin of [`ed_error_prob_sum`] with the verbatim support:
/// trials where no server is correct contribute no error event.
pub fn mc_ed_error_sum(
    p_y: f64,
    cp: &ConnectivityParams,
    trials: u64,
    seed: u64,
    exec: &dyn Executor,
) -> McEstimate {
    let cp = *cp;
    mc_counts(trials, seed, TAG_ED_ERROR, exec, move |rng| {
        let correct = (0..cp.servers_per_device)
            .filter(|_| rng.random::<f64>() < p_y)
            .count() as f64;
        if correct == 0.0 {
            return false;
        }
        let wrong = cp.servers_per_device as f64 - correct;
        let plus = exp_draw(rng, cp.symbol_energy * correct + cp.sigma2_ed);
        let minus = exp_draw(rng, cp.symbol_energy * wrong + cp.sigma2_ed);
        plus - minus < 0.0
    })
}

/// Brute-force oracle for the full two-hop chain under the statistical
/// model: per trial, every server runs a binomial uplink detection, the
/// correct servers are counted, and the device detection runs on the
/// resulting exponential energies. Estimates the end-to-end error rate.
pub fn mc_two_hop_error(
    cp: &ConnectivityParams,
    p_i: f64,
    trials: u64,
    seed: u64,
    exec: &dyn Executor,
) -> McEstimate {
    let cp = *cp;
    mc_counts(trials, seed, TAG_TWO_HOP, exec, move |rng| {
        let mut servers_correct = 0.0;
        for _ in 0..cp.servers_per_device {
            let correct = (0..cp.devices_per_server)
                .filter(|_| rng.random::<f64>() < p_i)
                .count() as f64;
            let wrong = cp.devices_per_server as f64 - correct;
            let plus = exp_draw(rng, cp.symbol_energy * correct + cp.sigma2_es);
            let minus = exp_draw(rng, cp.symbol_energy * wrong + cp.sigma2_es);
            if plus - minus > 0.0 {
                servers_correct += 1.0;
            }
        }
        let servers_wrong = cp.servers_per_device as f64 - servers_correct;
        let plus = exp_draw(rng, cp.symbol_energy * servers_correct + cp.sigma2_ed);
        let minus = exp_draw(rng, cp.symbol_energy * servers_wrong + cp.sigma2_ed);
        plus - minus <= 0.0
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Sequential;

    fn cp(k_c: u32, s_c: u32, sigma2_es: f64, sigma2_ed: f64) -> ConnectivityParams {
        ConnectivityParams {
            devices_per_server: k_c,
            servers_per_device: s_c,
            symbol_energy: 2.0,
            sigma2_es,
            sigma2_ed,
        }
    }

    #[test]
    fn pdf_integrates_to_one() {
        let d = ExpDiffDist::new(2.0, 0.7).unwrap();
        // Trapezoid rule over a range wide enough for both tails.
        let (lo, hi, steps) = (-60.0, 120.0, 3_600_000usize);
        let h = (hi - lo) / steps as f64;
        let mut integral = 0.5 * (d.pdf(lo) + d.pdf(hi));
        for i in 1..steps {
            integral += d.pdf(lo + i as f64 * h);
        }
        integral *= h;
        assert!((integral - 1.0).abs() < 1e-6, "integral = {integral}");
    }

    #[test]
    fn equal_means_are_symmetric() {
        let d = ExpDiffDist::new(1.3, 1.3).unwrap();
        assert_eq!(d.prob_positive(), 0.5);
        assert!((d.pdf(0.4) - d.pdf(-0.4)).abs() < 1e-15);
    }

    #[test]
    fn two_to_one_means_give_two_thirds() {
        let d = ExpDiffDist::new(2.0, 1.0).unwrap();
        assert!((d.prob_positive() - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn es_success_boundary_cases() {
        assert_eq!(es_success_prob(1.0, &cp(6, 3, 0.0, 0.0)), 1.0);
        for sigma in [0.0, 0.01, 0.5, 3.0] {
            let p = es_success_prob(0.5, &cp(6, 3, sigma, 0.0));
            assert!((p - 0.5).abs() < 1e-15, "sigma {sigma}: {p}");
        }
    }

    #[test]
    fn es_success_is_monotone_and_identity_at_zero_noise() {
        let params = cp(6, 3, 0.05, 0.0);
        let mut last = 0.0;
        for i in 0..=100 {
            let p_i = i as f64 / 100.0;
            let p = es_success_prob(p_i, &params);
            assert!(p >= last);
            last = p;
        }
        for p_i in [0.0, 0.3, 0.77, 1.0] {
            assert!((es_success_prob(p_i, &cp(6, 3, 0.0, 0.0)) - p_i).abs() < 1e-15);
        }
    }

    #[test]
    fn ed_error_sum_boundary_cases() {
        let params = cp(6, 3, 0.0, 0.01);
        let at_certainty = ed_error_prob_sum(1.0, &params, SupportMode::ExcludeZero);
        let expected = 0.01 / (2.0 * 3.0 + 2.0 * 0.01);
        assert!((at_certainty - expected).abs() < 1e-15);
        assert_eq!(
            ed_error_prob_sum(1.0, &cp(6, 3, 0.0, 0.0), SupportMode::ExcludeZero),
            0.0
        );
    }

    #[test]
    fn ed_error_sum_is_nonincreasing_on_upper_half() {
        let params = cp(6, 3, 0.01, 0.01);
        let mut last = f64::INFINITY;
        for i in 0..=50 {
            let p_y = 0.5 + 0.5 * i as f64 / 50.0;
            let e = ed_error_prob_sum(p_y, &params, SupportMode::ExcludeZero);
            assert!(e <= last + 1e-15);
            last = e;
        }
    }

    #[test]
    fn complete_support_adds_the_all_wrong_term() {
        let params = cp(6, 3, 0.01, 0.01);
        let p_y = 0.8;
        let verbatim = ed_error_prob_sum(p_y, &params, SupportMode::ExcludeZero);
        let complete = ed_error_prob_sum(p_y, &params, SupportMode::Complete);
        let zero_term = (2.0 * 3.0 + 0.01) / (2.0 * 3.0 + 0.02) * (1.0f64 - p_y).powi(3);
        assert!((complete - verbatim - zero_term).abs() < 1e-15);
    }

    #[test]
    fn bound_vanishes_in_the_clean_limit() {
        let params = cp(6, 3, 0.0, 0.0);
        let b = ed_error_prob_bound(&params, 1e12);
        assert!(b.abs() < 1e-11, "bound = {b}");
    }

    #[test]
    fn bound_dominates_the_matched_exact_sum_on_a_grid() {
        for k_c in [3u32, 6] {
            for s_c in [1u32, 3] {
                for sigma in [0.0, 0.01, 0.1] {
                    for snr in [1.0, 2.0, 5.0, 10.0, 100.0] {
                        let params = cp(k_c, s_c, sigma, sigma);
                        let p_i = correct_sign_floor(snr);
                        let p_y = es_success_prob(p_i, &params);
                        let exact = ed_error_prob_sum(p_y, &params, SupportMode::ExcludeZero);
                        let bound = ed_error_prob_bound(&params, snr);
                        assert!(
                            bound >= exact - 1e-12,
                            "K_c={k_c} S_c={s_c} sigma={sigma} snr={snr}: bound {bound} < exact {exact}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn bound_double_entry_hand_evaluation() {
        // E_s = 2, K_c = 6, S_c = 3, both variances 0.01, snr = 10:
        // recomputed step by step with separately written arithmetic.
        let params = cp(6, 3, 0.01, 0.01);
        let got = ed_error_prob_bound(&params, 10.0);
        let p_i = 1.0 - f64::sqrt(2.0) / 30.0;
        let p_y = (0.01 + 12.0 * p_i) / 12.02;
        let by_hand = (0.01 + 6.0 * (1.0 - p_y)) / 6.02;
        assert!((got - by_hand).abs() < 1e-15, "{got} vs {by_hand}");
    }

    #[test]
    fn noiseless_constants_are_exactly_zero_and_one() {
        let (a, b) = compute_ab(&cp(6, 3, 0.0, 0.0));
        assert_eq!(b, 1.0);
        assert_eq!(a, 0.0);
    }

    #[test]
    fn constants_double_entry_and_positivity() {
        let params = cp(6, 3, 0.01, 0.01);
        let (a, b) = compute_ab(&params);
        // Factored differently: numerator and denominator assembled apart.
        let numerator = 3.0 * (0.01 + 2.0 * 6.0);
        let denominator = 2.0 * (3.0 + 2.0 * 0.01) * (6.0 + 2.0 * 0.01);
        let b2 = numerator / denominator;
        assert!((b - b2).abs() < 1e-12);
        assert!((a - (1.0 / 1.01 - b2)).abs() < 1e-12);
        for k_c in 1..8 {
            for s_c in 1..5 {
                for sigma in [0.0, 0.01, 0.3, 2.0] {
                    let (_, b) = compute_ab(&cp(k_c, s_c, sigma, sigma));
                    assert!(b > 0.0);
                }
            }
        }
    }

    #[test]
    fn noiseless_bound_reduces_to_first_term() {
        let bi = BoundInputs {
            initial_gap: 1.0,
            smoothness_l1: 0.0,
            sigma_l1: 0.0,
            gamma: 1,
            rounds: 100,
            device_count: 10,
        };
        let bound = convergence_bound(&bi, &cp(6, 3, 0.0, 0.0)).unwrap();
        assert_eq!(bound.a, 0.0);
        assert_eq!(bound.b, 1.0);
        assert!((bound.value - 0.01).abs() < 1e-15);
        assert!(!bound.nonpositive_denominator);
    }

    #[test]
    fn quadrupling_rounds_halves_the_bound() {
        let params = cp(6, 3, 0.01, 0.01);
        let base = BoundInputs {
            initial_gap: 2.0,
            smoothness_l1: 1.5,
            sigma_l1: 0.7,
            gamma: 4,
            rounds: 100,
            device_count: 120,
        };
        let long = BoundInputs { rounds: 400, ..base };
        let b1 = convergence_bound(&base, &params).unwrap().value;
        let b4 = convergence_bound(&long, &params).unwrap().value;
        assert!((b4 - b1 / 2.0).abs() < 1e-12);
    }

    #[test]
    fn bound_grows_with_gradient_noise() {
        let params = cp(6, 3, 0.01, 0.01);
        let base = BoundInputs {
            initial_gap: 2.0,
            smoothness_l1: 1.5,
            sigma_l1: 0.7,
            gamma: 4,
            rounds: 100,
            device_count: 120,
        };
        let noisier = BoundInputs { sigma_l1: 1.4, ..base };
        assert!(
            convergence_bound(&noisier, &params).unwrap().value
                > convergence_bound(&base, &params).unwrap().value
        );
    }

    #[test]
    fn gradient_snr_variants_agree_only_at_unit_batch() {
        let printed = gradient_snr(0.5, 0.2, 16);
        let scaled = gradient_snr_variance_scaled(0.5, 0.2, 16);
        assert!((printed / scaled - 0.25).abs() < 1e-12); // sqrt(16)/16
        assert_eq!(
            gradient_snr(0.5, 0.2, 1),
            gradient_snr_variance_scaled(0.5, 0.2, 1)
        );
    }

    #[test]
    fn mc_estimators_are_reproducible() {
        let d = ExpDiffDist::new(2.0, 1.0).unwrap();
        let a = mc_expdiff_positive(&d, 10_000, 3, &Sequential);
        let b = mc_expdiff_positive(&d, 10_000, 3, &Sequential);
        assert_eq!(a, b);
        assert!((a.probability - 2.0 / 3.0).abs() < 4.0 * a.std_error + 1e-9);
    }

    #[test]
    fn perfect_votes_without_noise_never_err() {
        let est = mc_two_hop_error(&cp(6, 3, 0.0, 0.0), 1.0, 20_000, 5, &Sequential);
        assert_eq!(est.probability, 0.0);
    }
}
