//! Symmetric updating: operating points where every node attains the same
//! age, under both protocols, and the closed-form comparison between them.
//!
//! Scheduled access becomes symmetric with an unbounded turn cap (every turn
//! runs until it succeeds). Random access becomes symmetric when each node's
//! odds-weighted attempt rate p_i tau_i / (1 - tau_i) equals a common value
//! beta, leaving one scalar to tune.

use alloc::vec::Vec;

use crate::error::Error;
use crate::math::{exp, ln};
use crate::model::ChannelProfile;

/// Default relative bracket width at which the bisection stops.
const BETA_DEFAULT_TOL: f64 = 1e-15;
const BISECTION_MAX_ITER: u32 = 200;

/// Network age under symmetric scheduled access, plus the dispersion ratio
/// (sum of inverse squared probabilities over sum of inverses) it features.
pub fn symmetric_sf_age(profile: &ChannelProfile) -> (f64, f64) {
    let s1: f64 = profile.probs().iter().map(|&p| 1.0 / p).sum();
    let s2: f64 = profile.probs().iter().map(|&p| 1.0 / (p * p)).sum();
    let dispersion = s2 / s1;
    (0.5 * (1.0 + s1 + dispersion), dispersion)
}

/// Root of sum_j beta / (beta + p_j) = 1, the unique maximizer of the common
/// success rate. Bisection over the analytic bracket
/// [p_min/(M-1), p_max/(M-1)], on which the left side is strictly
/// increasing; stops when the bracket width falls below `tol` relative to
/// its midpoint.
pub fn beta_star(profile: &ChannelProfile, tol: f64) -> Result<f64, Error> {
    let m = profile.node_count();
    if m < 2 {
        return Err(Error::SingleNode);
    }
    if tol.is_nan() || tol <= 0.0 || tol > 1e-8 {
        return Err(Error::InvalidTolerance { tol });
    }
    let probs = profile.probs();
    let f = |beta: f64| probs.iter().map(|&p| beta / (beta + p)).sum::<f64>() - 1.0;

    let denom = (m - 1) as f64;
    let mut lo = profile.p_min() / denom;
    let mut hi = profile.p_max() / denom;
    if f(lo) >= 0.0 {
        return Ok(lo);
    }
    if f(hi) <= 0.0 {
        return Ok(hi);
    }
    for _ in 0..BISECTION_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if hi - lo < tol * mid {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Symmetric random-access operating point.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricAloha {
    pub beta_star: f64,
    /// Common per-slot success probability of every node.
    pub gamma_star: f64,
    /// Attempt probabilities beta / (beta + p_i) realizing the point.
    pub taus: Vec<f64>,
    /// Common age 1/2 + 1/gamma_star.
    pub age: f64,
}

fn gamma_at(probs: &[f64], beta: f64) -> f64 {
    if probs.len() > 64 {
        beta * exp(probs.iter().map(|&p| ln(p / (beta + p))).sum::<f64>())
    } else {
        beta * probs.iter().map(|&p| p / (beta + p)).product::<f64>()
    }
}

/// Tune the symmetric random-access point: solve for the rate-maximizing
/// beta, then report the common success rate, the per-node attempt
/// probabilities, and the common age.
pub fn symmetric_aloha(profile: &ChannelProfile) -> Result<SymmetricAloha, Error> {
    let beta = beta_star(profile, BETA_DEFAULT_TOL)?;
    let probs = profile.probs();
    let gamma = gamma_at(probs, beta);
    let taus: Vec<f64> = probs.iter().map(|&p| beta / (beta + p)).collect();
    Ok(SymmetricAloha { beta_star: beta, gamma_star: gamma, taus, age: 0.5 + 1.0 / gamma })
}

/// Analytic bounds on the log age ratio between the two symmetric systems.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoremBounds {
    pub lower: f64,
    pub upper: f64,
    /// Half-width: (1 + 2 rho^2)/(M - 1) + rho^2/(M - 1)^2.
    pub l_m: f64,
}

/// ln(2e) is the center of the bounds.
pub const LN_TWO_E: f64 = core::f64::consts::LN_2 + 1.0;

/// Bounds ln(2e) +- L_M on the log ratio of the symmetric ages, from the
/// channel spread rho = p_max / p_min and the network size.
pub fn theorem_bounds(p_min: f64, p_max: f64, node_count: usize) -> Result<TheoremBounds, Error> {
    if p_min.is_nan() || p_min <= 0.0 {
        return Err(Error::NonPositiveProbability { index: 0 });
    }
    if p_max > 1.0 {
        return Err(Error::ProbabilityAboveOne { index: 0 });
    }
    if p_min > p_max {
        return Err(Error::InvalidProbabilityRange { p_min, p_max });
    }
    if node_count < 2 {
        return Err(Error::SingleNode);
    }
    let rho = p_max / p_min;
    let m1 = (node_count - 1) as f64;
    let l_m = (1.0 + 2.0 * rho * rho) / m1 + rho * rho / (m1 * m1);
    Ok(TheoremBounds { lower: LN_TWO_E - l_m, upper: LN_TWO_E + l_m, l_m })
}

/// Everything the symmetric comparison produces for one profile.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricReport {
    pub age_sf: f64,
    pub age_aloha: f64,
    pub beta_star: f64,
    pub gamma_star: f64,
    pub taus: Vec<f64>,
    /// Log age ratio ln(age_aloha / age_sf).
    pub l: f64,
    pub bounds: TheoremBounds,
    /// Dispersion ratio of the scheduled-access age.
    pub r: f64,
    pub rho: f64,
}

/// Compare the two symmetric systems on one profile. The log ratio escaping
/// its analytic bounds is reported as an error: it would falsify the
/// implementation, not the analysis.
pub fn symmetric_compare(profile: &ChannelProfile) -> Result<SymmetricReport, Error> {
    let (age_sf, r) = symmetric_sf_age(profile);
    let aloha = symmetric_aloha(profile)?;
    let l = ln(aloha.age / age_sf);
    let bounds = theorem_bounds(profile.p_min(), profile.p_max(), profile.node_count())?;
    if l < bounds.lower || l > bounds.upper {
        return Err(Error::BoundViolation { value: l, lower: bounds.lower, upper: bounds.upper });
    }
    Ok(SymmetricReport {
        age_sf,
        age_aloha: aloha.age,
        beta_star: aloha.beta_star,
        gamma_star: aloha.gamma_star,
        taus: aloha.taus,
        l,
        bounds,
        r,
        rho: profile.rho(),
    })
}
