//! Parameter optimization: the turn-cap sweep for scheduled access and the
//! attempt-probability solvers for random access.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::aloha::{aloha_age, foc_residuals_raw};
use crate::error::Error;
use crate::math::{cbrt, sqrt};
use crate::model::{AlohaConfig, ChannelProfile, SfConfig};
use crate::sf::sf_age;

/// Network age across turn caps 1..=s_max.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    /// ages[k] is the network age at turn cap k + 1.
    pub ages: Vec<f64>,
    /// Smallest turn cap attaining the minimum age.
    pub best_s: u32,
    /// True when the age strictly decreases over the whole sweep, i.e. the
    /// optimum sits at (or beyond) the sweep boundary.
    pub monotone_decreasing: bool,
}

/// Evaluate the scheduled-access network age for every turn cap up to
/// `s_max`; ties break toward the smallest cap (cheaper turns, same age).
pub fn sf_sweep(profile: &ChannelProfile, s_max: u32) -> Result<SweepResult, Error> {
    if s_max == 0 {
        return Err(Error::ZeroTurnCap);
    }
    let mut ages = Vec::with_capacity(s_max as usize);
    for s in 1..=s_max {
        let cfg = SfConfig::new(profile.clone(), s)?;
        ages.push(sf_age(&cfg)?.ages.network);
    }
    let mut best = 0usize;
    for (k, &a) in ages.iter().enumerate() {
        if a < ages[best] {
            best = k;
        }
    }
    let monotone_decreasing = ages.windows(2).all(|w| w[1] < w[0]);
    Ok(SweepResult { ages, best_s: (best + 1) as u32, monotone_decreasing })
}

/// How a set of attempt probabilities was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TauMethod {
    /// Closed form for two nodes.
    ExactTwo,
    /// Inverse-square-root weights, the large-network closed form.
    Approx,
    /// Damped fixed-point iteration on the stationarity conditions.
    Numeric,
}

impl fmt::Display for TauMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TauMethod::ExactTwo => "exact2",
            TauMethod::Approx => "approx",
            TauMethod::Numeric => "numeric",
        })
    }
}

/// Attempt probabilities with their stationarity residual and achieved age.
#[derive(Debug, Clone, PartialEq)]
pub struct TauSolution {
    pub taus: Vec<f64>,
    pub method: TauMethod,
    pub foc_max_residual: f64,
    pub achieved_age: f64,
}

fn solution(profile: &ChannelProfile, taus: Vec<f64>, method: TauMethod) -> TauSolution {
    let foc = foc_residuals_raw(profile.probs(), &taus);
    let cfg = AlohaConfig::new(profile.clone(), taus.clone()).expect("taus in (0,1)");
    TauSolution { taus, method, foc_max_residual: foc.max_abs, achieved_age: aloha_age(&cfg).network }
}

/// Age-minimizing attempt probabilities for a two-node network:
/// tau_i = 1 / (1 + (p_i / p_j)^(1/3)).
pub fn tau_exact_two(p1: f64, p2: f64) -> Result<TauSolution, Error> {
    let profile = ChannelProfile::new(vec![p1, p2])?;
    let taus = vec![
        1.0 / (1.0 + cbrt(p1 / p2)),
        1.0 / (1.0 + cbrt(p2 / p1)),
    ];
    Ok(solution(&profile, taus, TauMethod::ExactTwo))
}

/// Large-network approximation: weights 1/sqrt(p_i), normalized to sum to
/// one. Undefined for a single node (where tau = 1 is trivially optimal).
pub fn tau_approx(profile: &ChannelProfile) -> Result<TauSolution, Error> {
    if profile.node_count() < 2 {
        return Err(Error::SingleNode);
    }
    let weights: Vec<f64> = profile.probs().iter().map(|&p| 1.0 / sqrt(p)).collect();
    let total: f64 = weights.iter().sum();
    let taus: Vec<f64> = weights.iter().map(|w| w / total).collect();
    Ok(solution(profile, taus, TauMethod::Approx))
}

const TAU_CLAMP_LO: f64 = 1e-9;
const TAU_CLAMP_HI: f64 = 1.0 - 1e-9;

/// Default solver tolerance on the stationarity max-residual.
pub const TAU_DEFAULT_TOL: f64 = 1e-10;
/// Default solver iteration cap.
pub const TAU_DEFAULT_MAX_ITER: usize = 10_000;

/// Stationary attempt probabilities by damped fixed-point iteration,
/// started from the inverse-square-root approximation.
///
/// Each round recomputes the shared sum K of the stationarity conditions and
/// maps every tau to the positive root of K p tau^2 + tau - 1 = 0. A half
/// step is taken instead whenever the full step worsens the max-residual.
pub fn tau_numeric(
    profile: &ChannelProfile,
    tol: f64,
    max_iter: usize,
) -> Result<TauSolution, Error> {
    let start = tau_approx(profile)?;
    tau_numeric_from(profile, &start.taus, tol, max_iter)
}

/// As [`tau_numeric`] but started from a caller-provided iterate (for
/// example the uniform vector 1/M).
pub fn tau_numeric_from(
    profile: &ChannelProfile,
    init: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<TauSolution, Error> {
    if profile.node_count() < 2 {
        return Err(Error::SingleNode);
    }
    if tol.is_nan() || tol <= 0.0 || tol > 1e-6 {
        return Err(Error::InvalidTolerance { tol });
    }
    if init.len() != profile.node_count() {
        return Err(Error::LengthMismatch {
            expected: profile.node_count(),
            actual: init.len(),
        });
    }
    let probs = profile.probs();
    let clamp = |t: f64| t.clamp(TAU_CLAMP_LO, TAU_CLAMP_HI);

    let mut taus: Vec<f64> = init.iter().map(|&t| clamp(t)).collect();
    let mut residual = foc_residuals_raw(probs, &taus).max_abs;

    for _ in 0..max_iter {
        if residual <= tol {
            let mut sol = solution(profile, taus, TauMethod::Numeric);
            sol.foc_max_residual = residual;
            return Ok(sol);
        }
        let shared: f64 = probs
            .iter()
            .zip(&taus)
            .map(|(&p, &t)| (1.0 - t) / (p * t))
            .sum();
        // positive root of K p t^2 + t - 1 = 0, in cancellation-free form
        let mut proposed: Vec<f64> = probs
            .iter()
            .map(|&p| clamp(2.0 / (1.0 + sqrt(1.0 + 4.0 * shared * p))))
            .collect();
        let mut next_residual = foc_residuals_raw(probs, &proposed).max_abs;
        if next_residual > residual {
            for (t, &old) in proposed.iter_mut().zip(&taus) {
                *t = 0.5 * (*t + old);
            }
            next_residual = foc_residuals_raw(probs, &proposed).max_abs;
        }
        taus = proposed;
        residual = next_residual;
    }

    if residual <= tol {
        let mut sol = solution(profile, taus, TauMethod::Numeric);
        sol.foc_max_residual = residual;
        return Ok(sol);
    }
    Err(Error::NoConvergence { iterations: max_iter, residual, last: taus })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ChannelProfile;
    use alloc::vec;

    fn profile(p: &[f64]) -> ChannelProfile {
        ChannelProfile::new(p.to_vec()).unwrap()
    }

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn sweep_finds_heterogeneous_optimum() {
        let r = sf_sweep(&profile(&[0.1, 0.5, 0.9]), 30).unwrap();
        assert_eq!(r.best_s, 7);
        assert!(!r.monotone_decreasing);
        assert_eq!(r.ages.len(), 30);
    }

    #[test]
    fn sweep_perfect_channels_tie_break_smallest() {
        let r = sf_sweep(&profile(&[1.0, 1.0, 1.0]), 10).unwrap();
        assert_eq!(r.best_s, 1);
        assert!(!r.monotone_decreasing);
        // deterministic rotation: Z = 3 always, age 9/6 + 1 = 2.5
        for &a in &r.ages {
            assert_eq!(a, 2.5);
        }
    }

    #[test]
    fn sweep_homogeneous_decreasing() {
        let r = sf_sweep(&profile(&[0.3; 5]), 50).unwrap();
        assert!(r.monotone_decreasing);
        assert_eq!(r.best_s, 50);
    }

    #[test]
    fn sweep_matches_pointwise_age() {
        let p = profile(&[0.2, 0.7]);
        let r = sf_sweep(&p, 12).unwrap();
        for s in 1..=12u32 {
            let direct = sf_age(&SfConfig::new(p.clone(), s).unwrap()).unwrap().ages.network;
            assert_eq!(r.ages[(s - 1) as usize], direct);
        }
    }

    #[test]
    fn exact_two_examples() {
        let s = tau_exact_two(1.0, 1.0).unwrap();
        assert_eq!(s.taus, vec![0.5, 0.5]);
        assert!(s.foc_max_residual <= 1e-12);

        let s = tau_exact_two(0.125, 1.0).unwrap();
        assert_close(s.taus[0], 2.0 / 3.0, 1e-15);
        assert_close(s.taus[1], 1.0 / 3.0, 1e-15);
        assert!(s.foc_max_residual <= 1e-12);

        let s = tau_exact_two(0.5, 0.5).unwrap();
        assert_eq!(s.taus, vec![0.5, 0.5]);
    }

    #[test]
    fn approx_examples() {
        let s = tau_approx(&profile(&[1.0; 4])).unwrap();
        assert_eq!(s.taus, vec![0.25; 4]);

        let s = tau_approx(&profile(&[0.25, 1.0, 1.0])).unwrap();
        assert_close(s.taus[0], 0.5, 1e-15);
        assert_close(s.taus[1], 0.25, 1e-15);
        assert_close(s.taus[2], 0.25, 1e-15);

        let s = tau_approx(&profile(&[0.25, 1.0])).unwrap();
        assert_close(s.taus[0], 2.0 / 3.0, 1e-15);
        assert_close(s.taus[1], 1.0 / 3.0, 1e-15);

        assert_eq!(tau_approx(&profile(&[0.5])), Err(Error::SingleNode));
    }

    #[test]
    fn numeric_matches_closed_form() {
        let s = tau_numeric(&profile(&[0.125, 1.0]), TAU_DEFAULT_TOL, TAU_DEFAULT_MAX_ITER).unwrap();
        assert_close(s.taus[0], 2.0 / 3.0, 1e-8);
        assert_close(s.taus[1], 1.0 / 3.0, 1e-8);
        assert!(s.foc_max_residual <= TAU_DEFAULT_TOL);

        let s = tau_numeric(&profile(&[1.0, 1.0]), TAU_DEFAULT_TOL, TAU_DEFAULT_MAX_ITER).unwrap();
        assert_close(s.taus[0], 0.5, 1e-10);
        assert_close(s.taus[1], 0.5, 1e-10);
    }

    #[test]
    fn numeric_validates_inputs() {
        let p = profile(&[0.5, 0.5]);
        assert!(matches!(
            tau_numeric(&p, 1e-3, 100),
            Err(Error::InvalidTolerance { .. })
        ));
        assert_eq!(tau_numeric(&profile(&[0.5]), 1e-10, 100), Err(Error::SingleNode));
        assert!(matches!(
            tau_numeric_from(&p, &[0.5], 1e-10, 100),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn numeric_reports_nonconvergence() {
        let err = tau_numeric(&profile(&[0.1, 0.9]), 1e-12, 1).unwrap_err();
        match err {
            Error::NoConvergence { iterations, residual, last } => {
                assert_eq!(iterations, 1);
                assert!(residual > 1e-12);
                assert_eq!(last.len(), 2);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn numeric_from_uniform_start_agrees() {
        let p = profile(&[0.3, 0.6, 0.9, 0.2]);
        let a = tau_numeric(&p, 1e-10, 10_000).unwrap();
        let uniform = vec![0.25; 4];
        let b = tau_numeric_from(&p, &uniform, 1e-10, 10_000).unwrap();
        for (x, y) in a.taus.iter().zip(&b.taus) {
            assert_close(*x, *y, 1e-7);
        }
    }
}
