//! Shared domain types: channel profiles, protocol configurations,
//! inter-update moments, and the age formula they all feed.

use alloc::vec::Vec;

use crate::error::Error;

/// Sentinel age of a node that never updates (e.g. attempt probability 0, or
/// another node attempting in every slot). Explicitly not a finite float;
/// starved nodes are a legitimate operating point, not an error.
pub const UNBOUNDED_AGE: f64 = f64::INFINITY;

/// Per-node decode-success probabilities of the shared channel.
///
/// Node indices are 0-based throughout the library; user-facing output adds 1.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelProfile {
    probs: Vec<f64>,
}

impl ChannelProfile {
    /// Every probability must lie in (0, 1]. Zero and above-one entries are
    /// rejected with distinct errors.
    pub fn new(probs: Vec<f64>) -> Result<Self, Error> {
        if probs.is_empty() {
            return Err(Error::EmptyProfile);
        }
        for (index, &p) in probs.iter().enumerate() {
            if p.is_nan() || p <= 0.0 {
                return Err(Error::NonPositiveProbability { index });
            }
            if p > 1.0 {
                return Err(Error::ProbabilityAboveOne { index });
            }
        }
        Ok(ChannelProfile { probs })
    }

    pub fn node_count(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, node: usize) -> f64 {
        self.probs[node]
    }

    pub fn p_min(&self) -> f64 {
        self.probs.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn p_max(&self) -> f64 {
        self.probs.iter().copied().fold(0.0, f64::max)
    }

    /// Channel-quality spread p_max / p_min.
    pub fn rho(&self) -> f64 {
        self.p_max() / self.p_min()
    }

    pub(crate) fn check_node(&self, node: usize) -> Result<(), Error> {
        if node < self.probs.len() {
            Ok(())
        } else {
            Err(Error::NodeOutOfRange { node, count: self.probs.len() })
        }
    }
}

/// Scheduled access with feedback: round-robin turns, at most `turn_cap`
/// transmission slots per turn, a turn ends early on success.
#[derive(Debug, Clone, PartialEq)]
pub struct SfConfig {
    profile: ChannelProfile,
    turn_cap: u32,
}

impl SfConfig {
    pub fn new(profile: ChannelProfile, turn_cap: u32) -> Result<Self, Error> {
        if turn_cap == 0 {
            return Err(Error::ZeroTurnCap);
        }
        Ok(SfConfig { profile, turn_cap })
    }

    pub fn profile(&self) -> &ChannelProfile {
        &self.profile
    }

    pub fn turn_cap(&self) -> u32 {
        self.turn_cap
    }
}

/// Slotted random access: node i transmits in each slot independently with
/// probability `attempts[i]`; two or more simultaneous attempts collide.
#[derive(Debug, Clone, PartialEq)]
pub struct AlohaConfig {
    profile: ChannelProfile,
    attempts: Vec<f64>,
}

impl AlohaConfig {
    pub fn new(profile: ChannelProfile, attempts: Vec<f64>) -> Result<Self, Error> {
        if attempts.len() != profile.node_count() {
            return Err(Error::LengthMismatch {
                expected: profile.node_count(),
                actual: attempts.len(),
            });
        }
        for (index, &t) in attempts.iter().enumerate() {
            if t.is_nan() || !(0.0..=1.0).contains(&t) {
                return Err(Error::AttemptOutOfRange { index });
            }
        }
        Ok(AlohaConfig { profile, attempts })
    }

    pub fn profile(&self) -> &ChannelProfile {
        &self.profile
    }

    pub fn attempts(&self) -> &[f64] {
        &self.attempts
    }
}

/// First and second moments of a node's inter-update time, in slots.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterUpdateMoments {
    pub mean: f64,
    pub second_moment: f64,
}

impl InterUpdateMoments {
    /// Checked constructor: inter-update times are at least one slot and the
    /// variance cannot be negative.
    pub fn new(mean: f64, second_moment: f64) -> Result<Self, Error> {
        let valid = mean >= 1.0 && second_moment >= mean * mean;
        if !valid {
            return Err(Error::InvalidMoments { mean, second_moment });
        }
        Ok(InterUpdateMoments { mean, second_moment })
    }

    pub fn variance(&self) -> f64 {
        self.second_moment - self.mean * self.mean
    }
}

/// Ages of every node plus the network average. `UNBOUNDED_AGE` entries
/// propagate to the network value.
#[derive(Debug, Clone, PartialEq)]
pub struct AgeReport {
    pub per_node: Vec<f64>,
    pub network: f64,
}

impl AgeReport {
    pub fn is_unbounded(&self) -> bool {
        self.network == UNBOUNDED_AGE
    }
}

/// Long-run time-average age of a node with the given inter-update moments:
/// second moment over twice the mean, plus the one-slot reset floor (an
/// update is one slot old the moment it arrives).
pub fn age_from_moments(m: &InterUpdateMoments) -> Result<f64, Error> {
    if m.mean.is_nan() || m.mean <= 0.0 {
        return Err(Error::NonPositiveMean);
    }
    Ok(m.second_moment / (2.0 * m.mean) + 1.0)
}

/// Network age: arithmetic mean of the per-node ages. Any unbounded node
/// makes the network age unbounded.
pub fn network_age(per_node: &[f64]) -> Result<AgeReport, Error> {
    if per_node.is_empty() {
        return Err(Error::EmptyAgeList);
    }
    let network = per_node.iter().sum::<f64>() / per_node.len() as f64;
    Ok(AgeReport { per_node: per_node.to_vec(), network })
}
