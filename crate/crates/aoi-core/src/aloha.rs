//! Closed-form analysis of slotted random access.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;
use crate::math::{abs, exp, ln};
use crate::model::{network_age, AgeReport, AlohaConfig, UNBOUNDED_AGE};

/// Above this size, per-node products of (1 - tau_j) run in log space to
/// dodge underflow in thousand-node networks.
const LOG_SPACE_THRESHOLD: usize = 64;

/// Per-slot update success probability of each node.
#[derive(Debug, Clone, PartialEq)]
pub struct AlohaRates {
    gammas: Vec<f64>,
}

impl AlohaRates {
    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    pub fn gamma(&self, node: usize) -> f64 {
        self.gammas[node]
    }
}

/// Success rate of node i: it attempts, nobody else does, and its packet
/// decodes.
pub fn aloha_rates(cfg: &AlohaConfig) -> AlohaRates {
    let taus = cfg.attempts();
    let probs = cfg.profile().probs();
    let m = taus.len();

    let certain: Vec<usize> =
        (0..m).filter(|&j| taus[j] == 1.0).collect();

    let others_product = |skip: usize| {
        let mut prod = 1.0;
        for (j, &t) in taus.iter().enumerate() {
            if j != skip {
                prod *= 1.0 - t;
            }
        }
        prod
    };

    let gammas = match certain.len() {
        0 if m <= LOG_SPACE_THRESHOLD => {
            (0..m).map(|i| taus[i] * probs[i] * others_product(i)).collect()
        }
        0 => {
            let total: f64 = taus.iter().map(|&t| ln(1.0 - t)).sum();
            (0..m)
                .map(|i| taus[i] * probs[i] * exp(total - ln(1.0 - taus[i])))
                .collect()
        }
        // exactly one node transmits every slot: it alone can ever succeed
        1 => {
            let winner = certain[0];
            let mut g = vec![0.0; m];
            g[winner] = taus[winner] * probs[winner] * others_product(winner);
            g
        }
        _ => vec![0.0; m],
    };

    AlohaRates { gammas }
}

/// Per-node and network ages. A node with zero success rate gets the
/// unbounded sentinel, which propagates to the network value.
pub fn aloha_age(cfg: &AlohaConfig) -> AgeReport {
    let rates = aloha_rates(cfg);
    let ages: Vec<f64> = rates
        .gammas()
        .iter()
        .map(|&g| if g == 0.0 { UNBOUNDED_AGE } else { 0.5 + 1.0 / g })
        .collect();
    network_age(&ages).expect("profile is nonempty")
}

/// Stationarity residuals of the attempt probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct FocResiduals {
    /// Raw per-node residuals (left side minus shared right side).
    pub residuals: Vec<f64>,
    /// Max-norm of the residuals; solvers test this against their tolerance.
    pub max_abs: f64,
}

fn check_interior(taus: &[f64]) -> Result<(), Error> {
    for (index, &t) in taus.iter().enumerate() {
        if t == 0.0 || t == 1.0 {
            return Err(Error::DegenerateAttempt { index });
        }
    }
    Ok(())
}

pub(crate) fn foc_residuals_raw(probs: &[f64], taus: &[f64]) -> FocResiduals {
    let shared: f64 = probs
        .iter()
        .zip(taus)
        .map(|(&p, &t)| (1.0 - t) / (p * t))
        .sum();
    let residuals: Vec<f64> = probs
        .iter()
        .zip(taus)
        .map(|(&p, &t)| (1.0 - t) / (p * t * t) - shared)
        .collect();
    let max_abs = residuals.iter().fold(0.0, |acc: f64, &r| acc.max(abs(r)));
    FocResiduals { residuals, max_abs }
}

/// First-order optimality residuals: zero everywhere exactly at a stationary
/// point of the network age. Requires every attempt probability strictly
/// inside (0, 1).
pub fn foc_residual(cfg: &AlohaConfig) -> Result<FocResiduals, Error> {
    check_interior(cfg.attempts())?;
    Ok(foc_residuals_raw(cfg.profile().probs(), cfg.attempts()))
}

/// The exponential-bound diagnostics: the two attempt-weighted channel sums
/// and the resulting analytic lower bound on the network age.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproxDiagnostics {
    pub c: f64,
    pub c_prime: f64,
    pub age_lower_bound: f64,
}

/// Lower bound on the network age from bounding every (1 - tau) factor by
/// its exponential. Tight when all attempt probabilities are small.
pub fn aloha_age_lower_bound(cfg: &AlohaConfig) -> Result<ApproxDiagnostics, Error> {
    let taus = cfg.attempts();
    check_interior(taus)?;
    let probs = cfg.profile().probs();
    let m = taus.len() as f64;

    let c: f64 = probs
        .iter()
        .zip(taus)
        .map(|(&p, &t)| (1.0 / p) * (1.0 / t - 1.0))
        .sum();
    let c_prime: f64 = probs.iter().zip(taus).map(|(&p, &t)| 1.0 / (p * t)).sum();
    let tau_sum: f64 = taus.iter().sum();
    let age_lower_bound = 0.5 + exp(tau_sum) * c / m;

    Ok(ApproxDiagnostics { c, c_prime, age_lower_bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ChannelProfile;
    use alloc::vec;

    fn cfg(probs: &[f64], taus: &[f64]) -> AlohaConfig {
        AlohaConfig::new(ChannelProfile::new(probs.to_vec()).unwrap(), taus.to_vec()).unwrap()
    }

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn rates_examples() {
        let r = aloha_rates(&cfg(&[1.0, 1.0], &[0.5, 0.5]));
        assert_eq!(r.gammas(), &[0.25, 0.25]);

        let r = aloha_rates(&cfg(&[0.8, 0.5], &[1.0, 0.0]));
        assert_eq!(r.gammas(), &[0.8, 0.0]);

        let r = aloha_rates(&cfg(&[1.0, 1.0], &[1.0, 1.0]));
        assert_eq!(r.gammas(), &[0.0, 0.0]);
    }

    #[test]
    fn log_space_path_matches_direct_product() {
        // 70 nodes forces the log-space path; compare against direct.
        let m = 70;
        let probs = vec![0.9; m];
        let taus: Vec<f64> = (0..m).map(|i| 0.005 + 0.0001 * i as f64).collect();
        let r = aloha_rates(&cfg(&probs, &taus));
        for i in 0..m {
            let mut prod = 1.0;
            for (j, &tj) in taus.iter().enumerate() {
                if j != i {
                    prod *= 1.0 - tj;
                }
            }
            let direct = taus[i] * probs[i] * prod;
            assert_close(r.gamma(i), direct, direct * 1e-12);
        }
    }

    #[test]
    fn age_examples() {
        let a = aloha_age(&cfg(&[1.0, 1.0], &[0.5, 0.5]));
        assert_eq!(a.per_node, vec![4.5, 4.5]);
        assert_eq!(a.network, 4.5);

        let a = aloha_age(&cfg(&[1.0, 1.0], &[1.0, 0.0]));
        assert_eq!(a.per_node[0], 1.5);
        assert!(a.per_node[1].is_infinite());
        assert!(a.is_unbounded());

        let a = aloha_age(&cfg(&[1.0], &[1.0]));
        assert_eq!(a.network, 1.5);
    }

    #[test]
    fn node_age_consistent_with_geometric_moments() {
        // Age of a geometric(gamma) inter-update process via the base moment
        // formula must equal 1/2 + 1/gamma.
        use crate::model::{age_from_moments, InterUpdateMoments};
        for &g in &[0.05, 0.25, 0.5, 1.0] {
            let m = InterUpdateMoments {
                mean: 1.0 / g,
                second_moment: 2.0 / (g * g) - 1.0 / g,
            };
            let base = age_from_moments(&m).unwrap();
            assert_close(base, 0.5 + 1.0 / g, 1e-12);
        }
    }

    #[test]
    fn foc_examples() {
        let f = foc_residual(&cfg(&[1.0, 1.0], &[0.5, 0.5])).unwrap();
        assert_eq!(f.residuals, vec![0.0, 0.0]);
        assert_eq!(f.max_abs, 0.0);

        let f = foc_residual(&cfg(&[0.125, 1.0], &[2.0 / 3.0, 1.0 / 3.0])).unwrap();
        assert!(f.max_abs <= 1e-12, "max {}", f.max_abs);

        let f = foc_residual(&cfg(&[1.0, 1.0], &[0.9, 0.9])).unwrap();
        assert!(f.residuals[0] != 0.0);
        assert_eq!(f.residuals[0], f.residuals[1]);
    }

    #[test]
    fn foc_rejects_boundary_attempts() {
        assert_eq!(
            foc_residual(&cfg(&[1.0, 1.0], &[0.0, 0.5])),
            Err(Error::DegenerateAttempt { index: 0 })
        );
        assert_eq!(
            foc_residual(&cfg(&[1.0, 1.0], &[0.5, 1.0])),
            Err(Error::DegenerateAttempt { index: 1 })
        );
    }

    #[test]
    fn lower_bound_examples() {
        let d = aloha_age_lower_bound(&cfg(&[1.0, 1.0], &[0.5, 0.5])).unwrap();
        assert_eq!(d.c, 2.0);
        assert_eq!(d.c_prime, 4.0);
        assert!(d.c < d.c_prime);
        assert_close(d.age_lower_bound, 0.5 + core::f64::consts::E, 1e-12);
        let exact = aloha_age(&cfg(&[1.0, 1.0], &[0.5, 0.5])).network;
        assert!(d.age_lower_bound <= exact);
    }

    #[test]
    fn lower_bound_tight_for_small_attempts() {
        for m in [2usize, 5, 10] {
            let probs = vec![0.7; m];
            let taus = vec![1e-4; m];
            let c = cfg(&probs, &taus);
            let exact = aloha_age(&c).network;
            let bound = aloha_age_lower_bound(&c).unwrap().age_lower_bound;
            assert!(bound <= exact);
            assert!((exact - bound) / exact < 1e-6, "ratio gap {}", (exact - bound) / exact);
        }
    }
}
