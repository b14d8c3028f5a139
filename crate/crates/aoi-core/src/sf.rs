//! Closed-form analysis of scheduled access with feedback.
//!
//! A node's gap between successful updates splits into whole turns it wasted,
//! the turns every other node took meanwhile, and the residual slots of the
//! turn that finally succeeded. The closed forms below come from the moments
//! of those three pieces; `sf_moments_oracle` recomputes the same moments by
//! brute-force composition of the underlying distributions and exists to
//! cross-check every term of the algebra.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;
use crate::math::pow_int;
use crate::model::{age_from_moments, network_age, AgeReport, InterUpdateMoments, SfConfig};

/// Truncation guard for the turns-to-update PMF.
const PMF_TERM_CAP: usize = 4_000_000;

/// Tail tolerance used by [`turn_pmfs`] when the caller does not pick one.
const DEFAULT_N_TAIL: f64 = 1e-12;

/// Longest supported turn cap for explicit PMFs (the per-turn distributions
/// have one entry per slot of the cap).
const PMF_TURN_CAP: u32 = 1 << 20;

/// Turn-level distributions of one node under scheduled access:
/// turns needed to update, slots another node's turn occupies, and slots of
/// the node's own updating turn.
#[derive(Debug, Clone, PartialEq)]
pub struct TurnPmfs {
    pmf_n: Vec<f64>,
    n_tail_mass: f64,
    pmf_x: Vec<f64>,
    pmf_y: Vec<f64>,
    r: f64,
}

impl TurnPmfs {
    /// Mass of `N = n` at index `n - 1`, truncated where the remaining tail
    /// drops below the construction tolerance.
    pub fn pmf_n(&self) -> &[f64] {
        &self.pmf_n
    }

    /// Probability mass beyond the truncated list.
    pub fn n_tail_mass(&self) -> f64 {
        self.n_tail_mass
    }

    /// Mass of a turn of this node occupying `a` slots, at index `a - 1`.
    pub fn pmf_x(&self) -> &[f64] {
        &self.pmf_x
    }

    /// Mass of the updating turn occupying `x` slots, at index `x - 1`.
    pub fn pmf_y(&self) -> &[f64] {
        &self.pmf_y
    }

    /// Probability that a turn contains at least one success.
    pub fn r(&self) -> f64 {
        self.r
    }

    /// First and second moments of the truncated turns-to-update count.
    pub fn n_moments(&self) -> (f64, f64) {
        moments_of(&self.pmf_n)
    }

    /// Analytic bounds on what the truncation dropped from the N moments.
    /// For a geometric tail past m terms these are exact remainders:
    /// tail1 = q^m (m + 1/r), tail2 = q^m (m^2 + 2m/r + (2 - r)/r^2).
    pub fn n_tail_moment_bounds(&self) -> (f64, f64) {
        let m = self.pmf_n.len() as f64;
        let qm = self.n_tail_mass;
        let r = self.r;
        let tail1 = qm * (m + 1.0 / r);
        let tail2 = qm * (m * m + 2.0 * m / r + (2.0 - r) / (r * r));
        (tail1, tail2)
    }

    /// First and second moments of another-node turn length (exact).
    pub fn x_moments(&self) -> (f64, f64) {
        moments_of(&self.pmf_x)
    }

    /// First and second moments of the updating-turn length (exact).
    pub fn y_moments(&self) -> (f64, f64) {
        moments_of(&self.pmf_y)
    }
}

fn moments_of(pmf: &[f64]) -> (f64, f64) {
    let mut m1 = 0.0;
    let mut m2 = 0.0;
    for (k, &w) in pmf.iter().enumerate() {
        let v = (k + 1) as f64;
        m1 += v * w;
        m2 += v * v * w;
    }
    (m1, m2)
}

fn check_scalar_prob(p: f64) -> Result<(), Error> {
    if p.is_nan() || p <= 0.0 {
        return Err(Error::NonPositiveProbability { index: 0 });
    }
    if p > 1.0 {
        return Err(Error::ProbabilityAboveOne { index: 0 });
    }
    Ok(())
}

/// Turn length PMF of a node with decode probability `p`: geometric stopped
/// at the cap, with the cap absorbing both "success on the last slot" and
/// "no success at all".
fn turn_length_pmf(p: f64, turn_cap: u32) -> Vec<f64> {
    let s = turn_cap as usize;
    let q = 1.0 - p;
    let mut pmf = vec![0.0; s];
    let mut q_pow = 1.0; // q^(a-1)
    for a in 1..s {
        pmf[a - 1] = q_pow * p;
        q_pow *= q;
    }
    pmf[s - 1] = q_pow; // (1-p)^(S-1)
    pmf
}

/// The three turn-level PMFs for decode probability `p` and turn cap `s`,
/// with the turns-to-update list truncated at the default tail tolerance.
pub fn turn_pmfs(p: f64, s: u32) -> Result<TurnPmfs, Error> {
    turn_pmfs_with_tail(p, s, DEFAULT_N_TAIL)
}

/// As [`turn_pmfs`], with an explicit tail tolerance for the truncated
/// turns-to-update PMF: the list stops at the smallest n with
/// (1 - r)^n < `tail_tol`.
pub fn turn_pmfs_with_tail(p: f64, s: u32, tail_tol: f64) -> Result<TurnPmfs, Error> {
    check_scalar_prob(p)?;
    if s == 0 {
        return Err(Error::ZeroTurnCap);
    }
    if s > PMF_TURN_CAP {
        return Err(Error::TruncationCapExceeded { cap: PMF_TURN_CAP as usize });
    }
    if tail_tol.is_nan() || tail_tol <= 0.0 || tail_tol > 1e-6 {
        return Err(Error::InvalidTolerance { tol: tail_tol });
    }

    let q = 1.0 - p;
    let r = 1.0 - pow_int(q, u64::from(s));

    let pmf_x = turn_length_pmf(p, s);

    // The updating turn is the turn length conditioned on a success.
    let mut pmf_y = vec![0.0; s as usize];
    let mut q_pow = 1.0;
    for x in 1..=s as usize {
        pmf_y[x - 1] = q_pow * p / r;
        q_pow *= q;
    }

    let mut pmf_n = Vec::new();
    let mut tail = 1.0; // (1-r)^(n-1)
    let n_fail = 1.0 - r;
    loop {
        pmf_n.push(tail * r);
        let next = tail * n_fail;
        if next < tail_tol {
            tail = next;
            break;
        }
        tail = next;
        if pmf_n.len() >= PMF_TERM_CAP {
            return Err(Error::TruncationCapExceeded { cap: PMF_TERM_CAP });
        }
    }

    Ok(TurnPmfs { pmf_n, n_tail_mass: tail, pmf_x, pmf_y, r })
}

/// Per-node moments, turn success ratios, and the resulting ages.
#[derive(Debug, Clone, PartialEq)]
pub struct SfAgeBreakdown {
    pub moments: Vec<InterUpdateMoments>,
    /// Flat row-major matrix of r_j / r_i ratios.
    etas: Vec<f64>,
    pub ages: AgeReport,
}

impl SfAgeBreakdown {
    /// Ratio of turn success probabilities r_j / r_i.
    pub fn eta(&self, j: usize, i: usize) -> f64 {
        let m = self.moments.len();
        self.etas[j * m + i]
    }
}

/// Probability that a turn with decode probability `p` and cap `s` contains
/// at least one success.
pub fn turn_success_prob(p: f64, s: u32) -> f64 {
    1.0 - pow_int(1.0 - p, u64::from(s))
}

fn turn_success_probs(cfg: &SfConfig) -> Vec<f64> {
    let s = cfg.turn_cap();
    cfg.profile().probs().iter().map(|&p| turn_success_prob(p, s)).collect()
}

/// Closed-form inter-update moments of `node` under scheduled access.
pub fn sf_moments(cfg: &SfConfig, node: usize) -> Result<InterUpdateMoments, Error> {
    cfg.profile().check_node(node)?;
    let probs = cfg.profile().probs();
    let m = probs.len();
    let s = f64::from(cfg.turn_cap());
    let r = turn_success_probs(cfg);

    let p_own = probs[node];
    let r_own = r[node];
    let eta = |j: usize| r[j] / r_own;

    let mean: f64 = (0..m).map(|j| eta(j) / probs[j]).sum();

    // Second moment, term by term: the node's own geometric part, then per
    // competing node a squared part, the whole-turn gap part, a linear part,
    // and the cross terms between distinct competitors.
    let own = (2.0 - p_own) / (p_own * p_own);
    let mut second = own;
    for j in 0..m {
        if j == node {
            continue;
        }
        let pj = probs[j];
        let e_j = eta(j);
        let square = 2.0 * e_j * e_j / (pj * pj);
        let turn_gap = 2.0 * s / (r_own * pj) * (e_j - 1.0);
        let linear = ((2.0 - p_own) / (p_own * pj) + 2.0 * (1.0 - r[j]) / (pj * pj)) * e_j;
        let mut cross = 0.0;
        for (jp, &p_other) in probs.iter().enumerate() {
            if jp != j && jp != node {
                cross += e_j * eta(jp) / (pj * p_other);
            }
        }
        second += square + turn_gap + linear + (2.0 - r_own) * cross;
    }

    Ok(InterUpdateMoments { mean, second_moment: second })
}

/// Moments recomputed by numeric composition of the truncated turn PMFs,
/// with the reported truncation error bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleMoments {
    pub moments: InterUpdateMoments,
    pub mean_error_bound: f64,
    pub second_error_bound: f64,
}

/// Brute-force composition of the inter-update moments from the turn-level
/// PMFs. Independent of the closed-form algebra in [`sf_moments`]; the two
/// must agree to within the reported truncation bounds plus rounding.
pub fn sf_moments_oracle(
    cfg: &SfConfig,
    node: usize,
    tail_tol: f64,
) -> Result<OracleMoments, Error> {
    cfg.profile().check_node(node)?;
    let probs = cfg.profile().probs();
    let m = probs.len();
    let s_int = cfg.turn_cap();
    let s = f64::from(s_int);

    let own = turn_pmfs_with_tail(probs[node], s_int, tail_tol)?;
    let (e_n, e_n2) = own.n_moments();
    let (d_n, d_n2) = own.n_tail_moment_bounds();
    let (e_y, e_y2) = own.y_moments();

    let others: Vec<(f64, f64)> = (0..m)
        .filter(|&j| j != node)
        .map(|j| moments_of(&turn_length_pmf(probs[j], s_int)))
        .collect();
    let sum_ex: f64 = others.iter().map(|&(e_x, _)| e_x).sum();

    // Gap = (N-1) whole turns of the cap plus N turns of every other node
    // plus the residual slots of the updating turn.
    let mean = s * (e_n - 1.0) + e_n * sum_ex + e_y;

    let e_nn = e_n2 - e_n;
    let w2 = s * s * (e_n2 - 2.0 * e_n + 1.0) + 2.0 * s * (e_n - 1.0) * e_y + e_y2;
    let mut second = w2;
    for (idx, &(e_x, e_x2)) in others.iter().enumerate() {
        let mut t = e_n * e_x2 + e_nn * e_x * e_x + 2.0 * s * e_nn * e_x + 2.0 * e_y * e_n * e_x;
        for (idx2, &(e_x_other, _)) in others.iter().enumerate() {
            if idx2 != idx {
                t += e_n2 * e_x * e_x_other;
            }
        }
        second += t;
    }

    // The composition is linear in the N moments, so the truncation error
    // propagates through the coefficients of E[N] and E[N^2] exactly.
    let mean_error_bound = d_n * (s + sum_ex);
    let mut coef_n = crate::math::abs(2.0 * s * e_y - 2.0 * s * s);
    let mut coef_n2 = s * s;
    for (idx, &(e_x, e_x2)) in others.iter().enumerate() {
        coef_n += crate::math::abs(e_x2 - e_x * e_x - 2.0 * s * e_x + 2.0 * e_y * e_x);
        let mut c2 = e_x * e_x + 2.0 * s * e_x;
        for (idx2, &(e_x_other, _)) in others.iter().enumerate() {
            if idx2 != idx {
                c2 += e_x * e_x_other;
            }
        }
        coef_n2 += c2;
    }
    let second_error_bound = d_n * coef_n + d_n2 * coef_n2;

    Ok(OracleMoments {
        moments: InterUpdateMoments { mean, second_moment: second },
        mean_error_bound,
        second_error_bound,
    })
}

/// Full per-node and network age analysis of a scheduled-access network.
pub fn sf_age(cfg: &SfConfig) -> Result<SfAgeBreakdown, Error> {
    let m = cfg.profile().node_count();
    let r = turn_success_probs(cfg);
    let mut etas = vec![0.0; m * m];
    for j in 0..m {
        for i in 0..m {
            etas[j * m + i] = r[j] / r[i];
        }
    }
    let mut moments = Vec::with_capacity(m);
    let mut ages = Vec::with_capacity(m);
    for node in 0..m {
        let mom = sf_moments(cfg, node)?;
        ages.push(age_from_moments(&mom).expect("closed-form moments have positive mean"));
        moments.push(mom);
    }
    let ages = network_age(&ages)?;
    Ok(SfAgeBreakdown { moments, etas, ages })
}

/// Mean inter-update time of a homogeneous network: M / p, independent of
/// the turn cap.
pub fn sf_homogeneous_mean(p: f64, node_count: usize) -> Result<f64, Error> {
    check_scalar_prob(p)?;
    if node_count == 0 {
        return Err(Error::EmptyProfile);
    }
    Ok(node_count as f64 / p)
}
