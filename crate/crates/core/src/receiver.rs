//! Monte Carlo simulation of the adaptive displacement receiver.
//!
//! The receiver displaces the incoming pulse by its current hypothesis
//! and photon-counts the remainder. Between clicks the displaced field
//! is an inhomogeneous Poisson process; every click triggers a Bayesian
//! posterior update and a switch to the new most probable hypothesis.
//! The decision is the posterior argmax at the pulse end.
//!
//! All probabilities are per-symbol with the pulse duration normalized
//! to 1; a true symbol `m` observed under hypothesis `h` produces the
//! detector rate `2ητ n̄ (1 − ξ cos[(h−m)(ΔωT·t + Δθ)])`.

use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::alphabet::ProtocolParams;
use crate::rng::stream_rng;
use crate::stats::wilson_interval;
use crate::{exec, Error, Result};

/// How the receiver chooses its hypothesis before the first click.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InitialHypothesis {
    /// Always start from the given symbol index.
    Fixed(usize),
    /// Draw the starting hypothesis uniformly per trial.
    RandomUniform,
}

/// Physical imperfections and policies of the receiver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReceiverModel {
    /// Interference visibility ξ of the displacement, in [0, 1].
    pub visibility: f64,
    /// Detection efficiency η, in (0, 1].
    pub efficiency: f64,
    /// Transmittance τ of the signal port of the displacement splitter,
    /// in (0, 1]; the default models the 99:1 tap.
    pub signal_transmittance: f64,
    pub initial_hypothesis: InitialHypothesis,
    /// Safety cap on clicks per trial; unreachable in sane
    /// configurations since the expected count is at most 4·n_bar.
    pub max_events: u64,
}

impl Default for ReceiverModel {
    fn default() -> Self {
        Self {
            visibility: 1.0,
            efficiency: 1.0,
            signal_transmittance: 0.99,
            initial_hypothesis: InitialHypothesis::Fixed(0),
            max_events: 10_000,
        }
    }
}

impl ReceiverModel {
    /// Lossless receiver: unit visibility, efficiency, and transmittance.
    pub fn ideal() -> Self {
        Self {
            signal_transmittance: 1.0,
            ..Self::default()
        }
    }

    /// Check field ranges, and the fixed initial hypothesis against the
    /// alphabet size it will be used with.
    pub fn validate(&self, m: usize) -> Result<()> {
        if !(0.0..=1.0).contains(&self.visibility) {
            return Err(Error::InvalidParams(format!(
                "visibility must lie in [0, 1], got {}",
                self.visibility
            )));
        }
        for (name, v) in [
            ("efficiency", self.efficiency),
            ("signal transmittance", self.signal_transmittance),
        ] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::InvalidParams(format!(
                    "{name} must lie in (0, 1], got {v}"
                )));
            }
        }
        if self.max_events < 1 {
            return Err(Error::InvalidParams("max_events must be >= 1".into()));
        }
        if let InitialHypothesis::Fixed(i) = self.initial_hypothesis {
            if i >= m {
                return Err(Error::InvalidParams(format!(
                    "fixed initial hypothesis {i} out of range for M={m}"
                )));
            }
        }
        Ok(())
    }
}

/// Probability vector over the M input hypotheses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Posterior {
    weights: Vec<f64>,
}

impl Posterior {
    pub fn uniform(m: usize) -> Self {
        Self {
            weights: vec![1.0 / m as f64; m],
        }
    }

    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidParams("posterior cannot be empty".into()));
        }
        if weights.iter().any(|w| !(0.0..=1.0).contains(w)) {
            return Err(Error::InvalidParams(
                "posterior weights must lie in [0, 1]".into(),
            ));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParams(format!(
                "posterior weights sum to {sum}, expected 1"
            )));
        }
        Ok(Self { weights })
    }

    /// Normalize raw nonnegative weights; `None` when they sum to zero.
    fn from_unnormalized(mut weights: Vec<f64>) -> Option<Self> {
        let sum: f64 = weights.iter().sum();
        if sum <= 0.0 || !sum.is_finite() {
            return None;
        }
        for w in &mut weights {
            *w /= sum;
        }
        Some(Self { weights })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Index of the largest weight; ties go to the lowest index.
    pub fn argmax(&self) -> usize {
        argmax(&self.weights)
    }
}

/// First index of the maximum value.
pub(crate) fn argmax(weights: &[f64]) -> usize {
    let mut best = 0;
    for (i, &w) in weights.iter().enumerate().skip(1) {
        if w > weights[best] {
            best = i;
        }
    }
    best
}

/// Everything observed and decided in one simulated pulse.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub true_symbol: usize,
    /// Click times, strictly increasing within (0, 1].
    pub arrivals: Vec<f64>,
    /// Hypothesis per inter-click segment: the initial one plus one per
    /// click, so always `arrivals.len() + 1` entries.
    pub hypotheses: Vec<usize>,
    pub final_posterior: Posterior,
    pub decision: usize,
    /// The click cap was hit; the decision uses the evidence up to it.
    pub cap_exceeded: bool,
    /// Number of all-zero-likelihood updates that fell back to uniform.
    pub degenerate_updates: u32,
}

/// Monte Carlo symbol-error-rate estimate with a Wilson 95% interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SerEstimate {
    pub errors: u64,
    pub trials: u64,
    pub p_hat: f64,
    pub ci95_low: f64,
    pub ci95_high: f64,
    /// Trials that hit the event cap or a degenerate update.
    pub flagged_trials: u64,
}

/// Instantaneous detector rate when symbol `m` is displaced by
/// hypothesis `h` at time `t`:
/// `λ = 2ητ n̄ (1 − ξ cos[(h−m)(ΔωT·t + Δθ)])`.
pub fn displaced_rate(
    m: usize,
    h: usize,
    t: f64,
    p: &ProtocolParams,
    r: &ReceiverModel,
) -> f64 {
    let d = h as f64 - m as f64;
    let base = 2.0 * r.efficiency * r.signal_transmittance * p.n_bar;
    (base * (1.0 - r.visibility * (d * (p.delta_omega_t * t + p.delta_theta)).cos())).max(0.0)
}

/// Largest possible detector rate for the model, the thinning envelope.
pub fn max_rate(p: &ProtocolParams, r: &ReceiverModel) -> f64 {
    2.0 * r.efficiency * r.signal_transmittance * p.n_bar * (1.0 + r.visibility)
}

/// Expected click count on `[t0, t1]`, the closed form of
/// `∫ displaced_rate dt`. The oscillatory part is written as a
/// `cos·sinc` product, which is exact for `d = 0` and stable as
/// `d·ΔωT → 0`.
pub fn rate_integral(
    m: usize,
    h: usize,
    t0: f64,
    t1: f64,
    p: &ProtocolParams,
    r: &ReceiverModel,
) -> f64 {
    debug_assert!((0.0..=1.0).contains(&t0) && t0 <= t1 && t1 <= 1.0);
    let d = h as f64 - m as f64;
    let dt = t1 - t0;
    let carrier = (d * (p.delta_omega_t * (t0 + t1) / 2.0 + p.delta_theta)).cos();
    let cos_mean = carrier * sinc(d * p.delta_omega_t * dt / 2.0);
    let base = 2.0 * r.efficiency * r.signal_transmittance * p.n_bar;
    (base * (dt - r.visibility * cos_mean * dt)).max(0.0)
}

/// sin(x)/x continued through 0.
fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-6 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// Next photon arrival after `t0` under (true `m`, hypothesis `h`), or
/// `None` if the pulse ends first. Thinning against the constant
/// envelope [`max_rate`] is exact for any bounded rate.
pub fn sample_next_arrival(
    m: usize,
    h: usize,
    t0: f64,
    p: &ProtocolParams,
    r: &ReceiverModel,
    rng: &mut impl Rng,
) -> Option<f64> {
    let envelope = max_rate(p, r);
    if envelope <= 0.0 {
        return None;
    }
    let mut t = t0;
    loop {
        let step: f64 = rng.sample(Exp1);
        t += step / envelope;
        if t > 1.0 {
            return None;
        }
        let accept: f64 = rng.gen();
        if accept * envelope < displaced_rate(m, h, t, p, r) {
            return Some(t);
        }
    }
}

/// Posterior update for a click at `t_k` under hypothesis `h`, with the
/// preceding silent stretch `(t_prev, t_k)`:
/// `ζ'(m) ∝ λ(m,h,t_k) · exp(−Λ(m,h,t_prev,t_k)) · ζ(m)`.
///
/// The smallest exponent is factored out before exponentiation; it
/// cancels in the normalization and keeps bright pulses from
/// underflowing. Returns the posterior and whether the update was
/// degenerate (all numerators zero, posterior reset to uniform).
pub fn bayes_click_update(
    post: &Posterior,
    h: usize,
    t_prev: f64,
    t_k: f64,
    p: &ProtocolParams,
    r: &ReceiverModel,
) -> (Posterior, bool) {
    let m = post.weights.len();
    let exponents: Vec<f64> = (0..m)
        .map(|sym| rate_integral(sym, h, t_prev, t_k, p, r))
        .collect();
    let min_exp = exponents.iter().cloned().fold(f64::INFINITY, f64::min);
    let weights: Vec<f64> = (0..m)
        .map(|sym| {
            post.weights[sym] * displaced_rate(sym, h, t_k, p, r) * (min_exp - exponents[sym]).exp()
        })
        .collect();
    match Posterior::from_unnormalized(weights) {
        Some(updated) => (updated, false),
        None => (Posterior::uniform(m), true),
    }
}

/// Survival update for the silent tail `(t_last, 1]`:
/// `ζ'(m) ∝ exp(−Λ(m,h,t_last,1)) · ζ(m)`.
pub fn bayes_final_update(
    post: &Posterior,
    h: usize,
    t_last: f64,
    p: &ProtocolParams,
    r: &ReceiverModel,
) -> Posterior {
    let m = post.weights.len();
    let exponents: Vec<f64> = (0..m)
        .map(|sym| rate_integral(sym, h, t_last, 1.0, p, r))
        .collect();
    let min_exp = exponents.iter().cloned().fold(f64::INFINITY, f64::min);
    let weights: Vec<f64> = (0..m)
        .map(|sym| post.weights[sym] * (min_exp - exponents[sym]).exp())
        .collect();
    // survival factors are strictly positive, so this cannot degenerate
    Posterior::from_unnormalized(weights).unwrap_or_else(|| Posterior::uniform(m))
}

/// Simulate one pulse: sample arrivals under the current hypothesis,
/// update the posterior at each click, switch to the argmax hypothesis
/// (ties to the lowest index), and decide at the pulse end.
pub fn run_trial(
    true_symbol: usize,
    p: &ProtocolParams,
    r: &ReceiverModel,
    rng: &mut impl Rng,
) -> TrialRecord {
    debug_assert!(true_symbol < p.m);
    let mut posterior = Posterior::uniform(p.m);
    let mut h = match r.initial_hypothesis {
        InitialHypothesis::Fixed(i) => i,
        InitialHypothesis::RandomUniform => rng.gen_range(0..p.m),
    };
    let mut hypotheses = vec![h];
    let mut arrivals: Vec<f64> = Vec::new();
    let mut t_prev = 0.0;
    let mut cap_exceeded = false;
    let mut degenerate_updates = 0u32;

    while let Some(t_k) = sample_next_arrival(true_symbol, h, t_prev, p, r, rng) {
        let (updated, degenerate) = bayes_click_update(&posterior, h, t_prev, t_k, p, r);
        posterior = updated;
        degenerate_updates += u32::from(degenerate);
        arrivals.push(t_k);
        h = posterior.argmax();
        hypotheses.push(h);
        t_prev = t_k;
        if arrivals.len() as u64 >= r.max_events {
            cap_exceeded = true;
            break;
        }
    }

    let final_posterior = bayes_final_update(&posterior, h, t_prev, p, r);
    let decision = final_posterior.argmax();
    TrialRecord {
        true_symbol,
        arrivals,
        hypotheses,
        final_posterior,
        decision,
        cap_exceeded,
        degenerate_updates,
    }
}

fn validate_run(p: &ProtocolParams, r: &ReceiverModel, trials: u64) -> Result<()> {
    if trials < 1 {
        return Err(Error::InvalidParams("trials must be >= 1".into()));
    }
    r.validate(p.m)
}

fn trial_counts(p: &ProtocolParams, r: &ReceiverModel, seed: u64, t: usize) -> (u64, u64) {
    let mut rng = stream_rng(seed, t as u64);
    let record = run_trial(t % p.m, p, r, &mut rng);
    (
        u64::from(record.decision != record.true_symbol),
        u64::from(record.cap_exceeded || record.degenerate_updates > 0),
    )
}

fn finish(errors: u64, flagged: u64, trials: u64) -> SerEstimate {
    let (ci95_low, ci95_high) = wilson_interval(errors, trials);
    SerEstimate {
        errors,
        trials,
        p_hat: errors as f64 / trials as f64,
        ci95_low,
        ci95_high,
        flagged_trials: flagged,
    }
}

/// Symbol error rate over `trials` pulses with round-robin true symbols.
/// Each trial draws from its own RNG stream derived from `(seed, trial
/// index)`, so the estimate is bit-identical across thread counts and
/// matches [`estimate_ser_sequential`].
pub fn estimate_ser(
    p: &ProtocolParams,
    r: &ReceiverModel,
    trials: u64,
    seed: u64,
) -> Result<SerEstimate> {
    validate_run(p, r, trials)?;
    let (errors, flagged) = exec::sum2_indexed(trials as usize, |t| trial_counts(p, r, seed, t));
    Ok(finish(errors, flagged, trials))
}

/// Single-threaded twin of [`estimate_ser`]; the reference path for
/// determinism checks and the sequential side of the benchmarks.
pub fn estimate_ser_sequential(
    p: &ProtocolParams,
    r: &ReceiverModel,
    trials: u64,
    seed: u64,
) -> Result<SerEstimate> {
    validate_run(p, r, trials)?;
    let (errors, flagged) =
        exec::sum2_indexed_seq(trials as usize, |t| trial_counts(p, r, seed, t));
    Ok(finish(errors, flagged, trials))
}
