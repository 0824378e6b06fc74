//! Quantum-limited error bounds.
//!
//! The Helstrom bound is evaluated through the square-root measure on the
//! alphabet's Gram matrix, with closed forms for the cases that admit
//! them (binary, PSK via circulant eigenvalues, PPM). The standard
//! quantum limit is a Monte Carlo estimate for an ideal dual-quadrature
//! receiver with minimum-distance decisions.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use crate::alphabet::{Constellation, GramMatrix};
use crate::rng::stream_rng;
use crate::stats::wilson_interval;
use crate::{exec, linalg, Error, Result};

/// How a bound value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundMethod {
    /// Square-root measure on a generic Gram matrix.
    SrmGeneric,
    /// Circulant eigenvalue fast path (PSK).
    PskCirculant,
    /// PPM closed form.
    PpmClosed,
    /// Two-state closed form.
    BinaryClosed,
    /// Monte Carlo standard quantum limit (dual-quadrature).
    SqlMc,
}

/// An error-probability bound plus its provenance. `ci95_halfwidth` is 0
/// for the deterministic methods and half the Wilson 95% interval for
/// the Monte Carlo one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    pub p_error: f64,
    pub method: BoundMethod,
    pub ci95_halfwidth: f64,
}

impl BoundResult {
    fn exact(p_error: f64, method: BoundMethod) -> Self {
        Self {
            p_error: p_error.clamp(0.0, 1.0),
            method,
            ci95_halfwidth: 0.0,
        }
    }
}

/// Square-root-measure error probability for equiprobable pure states
/// with Gram matrix `g`: success is the mean squared diagonal of √G.
/// This equals the Helstrom minimum for symmetric state sets and is the
/// standard stand-in for it otherwise.
pub fn srm_error(g: &GramMatrix) -> Result<BoundResult> {
    let eigen = linalg::hermitian_eigen(g.entries());
    let diag = linalg::sqrt_diagonal(&eigen)?;
    let m = g.size() as f64;
    let success = diag.iter().map(|d| d * d).sum::<f64>() / m;
    Ok(BoundResult::exact(1.0 - success, BoundMethod::SrmGeneric))
}

/// Helstrom bound for two equiprobable pure states with squared overlap
/// `|<psi0|psi1>|^2 = overlap_sq`.
pub fn binary_helstrom(overlap_sq: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&overlap_sq) {
        return Err(Error::InvalidParams(format!(
            "squared overlap must lie in [0, 1], got {overlap_sq}"
        )));
    }
    // (1 - sqrt(1 - x))/2 rewritten to keep full relative precision for
    // small overlaps, where the direct form cancels catastrophically
    Ok(overlap_sq / (2.0 * (1.0 + (1.0 - overlap_sq).sqrt())))
}

/// Helstrom bound of M-ary PSK through the circulant structure of its
/// Gram matrix: the eigenvalues are the DFT of the first row, and the
/// square-root-measure success probability is `((1/M) Σ_k √λ_k)²`.
pub fn psk_helstrom_circulant(m: usize, n_bar: f64) -> Result<BoundResult> {
    let gram = Constellation::psk(m, n_bar)?.gram_matrix();
    let first_row: Vec<Complex64> = (0..m).map(|d| gram.entries()[(0, d)]).collect();
    let mf = m as f64;
    let eigenvalues: Vec<f64> = (0..m)
        .map(|k| {
            first_row
                .iter()
                .enumerate()
                .map(|(d, &g)| g * Complex64::from_polar(1.0, -TAU * (k * d % m) as f64 / mf))
                .sum::<Complex64>()
                .re
        })
        .collect();
    // same clipping policy as the generic eigendecomposition path, so
    // the two agree even on near-singular low-energy Gram matrices
    let clipped = linalg::clipped_eigenvalues(&eigenvalues)?;
    let sqrt_sum: f64 = clipped.iter().map(|l| l.sqrt()).sum();
    let success = (sqrt_sum / mf).powi(2);
    Ok(BoundResult::exact(1.0 - success, BoundMethod::PskCirculant))
}

/// Helstrom bound of M-slot PPM. The Gram matrix is `(1−g)I + gJ` with
/// `g = e^{−n_bar}`, whose square root has a closed-form diagonal.
pub fn ppm_helstrom_closed(m: usize, n_bar: f64) -> Result<BoundResult> {
    if m < 2 {
        return Err(Error::InvalidParams(format!(
            "PPM closed form requires M >= 2, got M={m}"
        )));
    }
    if !n_bar.is_finite() || n_bar < 0.0 {
        return Err(Error::InvalidParams(format!(
            "mean photon number must be finite and >= 0, got {n_bar}"
        )));
    }
    let g = (-n_bar).exp();
    let mf = m as f64;
    let success = (((1.0 + (mf - 1.0) * g).sqrt() + (mf - 1.0) * (1.0 - g).sqrt()) / mf).powi(2);
    Ok(BoundResult::exact(1.0 - success, BoundMethod::PpmClosed))
}

/// Standard quantum limit by Monte Carlo: an ideal receiver measures
/// both quadratures of every mode, seeing the sent symbol's mean vector
/// plus circular complex Gaussian noise of unit variance per complex
/// dimension, and picks the closest mean vector. The mean vectors are
/// rows of a factor `L` with `L L† = S`, the matrix of signal-field
/// inner products (row conjugation relative to the abstract geometry is
/// an isometry, so the error rate is unaffected).
///
/// True symbols are assigned round-robin; each trial draws from its own
/// RNG stream, so the estimate is independent of scheduling.
pub fn sql_error_mc(c: &Constellation, trials: u64, seed: u64) -> Result<BoundResult> {
    if trials < 1 {
        return Err(Error::InvalidParams("trials must be >= 1".into()));
    }
    let m = c.size();
    let factor = linalg::psd_factor(&c.signal_overlaps())?;
    let rank = factor.ncols();
    let mu: Vec<Vec<Complex64>> = (0..m)
        .map(|j| (0..rank).map(|k| factor[(j, k)]).collect())
        .collect();

    let errors = exec::sum_indexed(trials as usize, |t| {
        let mut rng = stream_rng(seed, t as u64);
        let truth = t % m;
        let mut received = Vec::with_capacity(rank);
        for &mean_k in &mu[truth] {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            received.push(mean_k + Complex64::new(re, im) * FRAC_1_SQRT_2);
        }
        let mut best = 0usize;
        let mut best_distance = f64::INFINITY;
        for (h, mean) in mu.iter().enumerate() {
            let d: f64 = mean
                .iter()
                .zip(&received)
                .map(|(a, y)| (y - a).norm_sqr())
                .sum();
            if d < best_distance {
                best_distance = d;
                best = h;
            }
        }
        u64::from(best != truth)
    });

    let p_error = errors as f64 / trials as f64;
    let (lo, hi) = wilson_interval(errors, trials);
    Ok(BoundResult {
        p_error,
        method: BoundMethod::SqlMc,
        ci95_halfwidth: (hi - lo) / 2.0,
    })
}

/// Symbol error of `channels` parallel binary PSK links carrying
/// `n_bar_per_channel` photons each: the composite symbol is wrong when
/// any channel errs, each at its binary Helstrom rate.
pub fn multiplexed_bpsk_error(n_bar_per_channel: f64, channels: u32) -> Result<f64> {
    if channels < 1 {
        return Err(Error::InvalidParams("channels must be >= 1".into()));
    }
    if !n_bar_per_channel.is_finite() || n_bar_per_channel < 0.0 {
        return Err(Error::InvalidParams(format!(
            "mean photon number must be finite and >= 0, got {n_bar_per_channel}"
        )));
    }
    let p = binary_helstrom((-4.0 * n_bar_per_channel).exp())?;
    // 1 - (1-p)^channels, evaluated without cancellation for small p
    Ok(-(channels as f64 * (-p).ln_1p()).exp_m1())
}
