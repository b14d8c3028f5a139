//! Slotted Monte Carlo simulation of both protocols, with the empirical
//! time-average age estimator. The simulator is the independent check for
//! every closed form in this crate: it never touches the analytic modules.
//!
//! Determinism contract: identical configuration and seed produce identical
//! results on every platform. Slot bookkeeping is integer, the generator is
//! fully specified ([`crate::rng::SplitMix64`]), and each node draws from its
//! own substream so extending a network never perturbs existing nodes.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;
use crate::math::sqrt;
use crate::model::{AlohaConfig, SfConfig};
use crate::rng::SplitMix64;

/// Horizon cap: slot indices stay well inside exact f64 integer range.
pub const MAX_HORIZON: u64 = 1 << 40;

/// Batch count for the batch-means standard error of the age estimate.
const AGE_BATCHES: usize = 30;

/// Which protocol to simulate.
#[derive(Debug, Clone, PartialEq)]
pub enum Protocol {
    Sf(SfConfig),
    Aloha(AlohaConfig),
}

impl Protocol {
    pub fn node_count(&self) -> usize {
        match self {
            Protocol::Sf(c) => c.profile().node_count(),
            Protocol::Aloha(c) => c.profile().node_count(),
        }
    }
}

/// What to do with the stretch before a node's first update: drop it.
/// Statistics cover the window between the first and last recorded update,
/// so the unknown initial age contributes nothing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WarmupPolicy {
    #[default]
    DropUntilFirstUpdate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub protocol: Protocol,
    pub horizon: u64,
    pub seed: u64,
    pub warmup: WarmupPolicy,
}

impl SimConfig {
    pub fn new(protocol: Protocol, horizon: u64, seed: u64) -> Result<Self, Error> {
        if horizon == 0 || horizon > MAX_HORIZON {
            return Err(Error::InvalidHorizon { horizon });
        }
        Ok(SimConfig { protocol, horizon, seed, warmup: WarmupPolicy::DropUntilFirstUpdate })
    }
}

/// Everything recorded for one node over one run.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeStats {
    /// Slot indices (1-based) of successful updates, strictly increasing.
    pub timestamps: Vec<u64>,
    /// Gaps between consecutive updates, each at least one slot.
    pub z_samples: Vec<u64>,
    pub z_mean: Option<f64>,
    pub z_mean_se: Option<f64>,
    pub z_second: Option<f64>,
    pub z_second_se: Option<f64>,
    /// Empirical time-average age over the inter-update window.
    pub age: Option<f64>,
    /// Batch-means standard error of the age estimate.
    pub age_se: Option<f64>,
}

impl NodeStats {
    pub fn update_count(&self) -> usize {
        self.timestamps.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub horizon: u64,
    pub seed: u64,
    pub nodes: Vec<NodeStats>,
}

fn mean_and_se(values: &[f64]) -> (Option<f64>, Option<f64>) {
    let n = values.len();
    if n == 0 {
        return (None, None);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (Some(mean), None);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    (Some(mean), Some(sqrt(var / n as f64)))
}

/// Time-average age of a window of inter-update gaps: per gap the age ramps
/// from 1, contributing z^2/2 + z of age-slot area over z slots.
fn age_of_window(z: &[u64]) -> f64 {
    let mut area = 0.0;
    let mut time = 0.0;
    for &zi in z {
        let zf = zi as f64;
        area += zf * zf * 0.5 + zf;
        time += zf;
    }
    area / time
}

fn batch_means_age_se(z: &[u64]) -> Option<f64> {
    let n = z.len();
    let batches = n.min(AGE_BATCHES);
    if batches < 2 {
        return None;
    }
    let base = n / batches;
    let rem = n % batches;
    let mut estimates = Vec::with_capacity(batches);
    let mut start = 0usize;
    for b in 0..batches {
        let len = base + usize::from(b < rem);
        estimates.push(age_of_window(&z[start..start + len]));
        start += len;
    }
    let (_, se) = mean_and_se(&estimates);
    se
}

fn node_stats(timestamps: Vec<u64>) -> NodeStats {
    let z_samples: Vec<u64> =
        timestamps.windows(2).map(|w| w[1] - w[0]).collect();
    let n = z_samples.len();
    if n == 0 {
        return NodeStats {
            timestamps,
            z_samples,
            z_mean: None,
            z_mean_se: None,
            z_second: None,
            z_second_se: None,
            age: None,
            age_se: None,
        };
    }
    let zf: Vec<f64> = z_samples.iter().map(|&z| z as f64).collect();
    let sq: Vec<f64> = zf.iter().map(|z| z * z).collect();
    let (z_mean, z_mean_se) = mean_and_se(&zf);
    let (z_second, z_second_se) = mean_and_se(&sq);
    let age = Some(age_of_window(&z_samples));
    let age_se = batch_means_age_se(&z_samples);
    NodeStats { timestamps, z_samples, z_mean, z_mean_se, z_second, z_second_se, age, age_se }
}

/// Run one simulation. Slots are numbered from 1; an update lands at the end
/// of its slot.
///
/// Scheduled access cycles nodes 1..M; the turn holder transmits each slot
/// and its turn ends on success or when the cap is exhausted. Random access
/// has every node attempt independently each slot; a slot delivers an update
/// only when exactly one node attempted and its decode succeeded.
pub fn simulate(cfg: &SimConfig) -> SimResult {
    let m = cfg.protocol.node_count();
    let mut streams: Vec<SplitMix64> =
        (0..m).map(|i| SplitMix64::substream(cfg.seed, i as u64)).collect();
    let mut timestamps: Vec<Vec<u64>> = vec![Vec::new(); m];

    match &cfg.protocol {
        Protocol::Sf(sf) => {
            let probs = sf.profile().probs();
            let cap = sf.turn_cap();
            let mut holder = 0usize;
            let mut used: u32 = 0;
            for slot in 1..=cfg.horizon {
                used += 1;
                let success = streams[holder].bernoulli(probs[holder]);
                if success {
                    timestamps[holder].push(slot);
                }
                if success || used == cap {
                    holder = (holder + 1) % m;
                    used = 0;
                }
            }
        }
        Protocol::Aloha(al) => {
            let probs = al.profile().probs();
            let taus = al.attempts();
            for slot in 1..=cfg.horizon {
                let mut attempts = 0u32;
                let mut delivered: Option<usize> = None;
                for i in 0..m {
                    if streams[i].bernoulli(taus[i]) {
                        // decode drawn unconditionally so each node's stream
                        // consumption depends only on its own attempts
                        let decoded = streams[i].bernoulli(probs[i]);
                        attempts += 1;
                        if attempts == 1 && decoded {
                            delivered = Some(i);
                        }
                    }
                }
                if attempts == 1 {
                    if let Some(i) = delivered {
                        timestamps[i].push(slot);
                    }
                }
            }
        }
    }

    SimResult {
        horizon: cfg.horizon,
        seed: cfg.seed,
        nodes: timestamps.into_iter().map(node_stats).collect(),
    }
}

/// Empirical time-average age of one node, over the window from its first to
/// its last update. Needs at least two updates to have a window at all.
pub fn empirical_age(result: &SimResult, node: usize) -> Result<f64, Error> {
    let stats = result
        .nodes
        .get(node)
        .ok_or(Error::NodeOutOfRange { node, count: result.nodes.len() })?;
    if stats.timestamps.len() < 2 {
        return Err(Error::TooFewUpdates { node });
    }
    Ok(age_of_window(&stats.z_samples))
}

/// Per-node aggregates over independent replications.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeAggregate {
    pub age_mean: Option<f64>,
    /// Standard error across replications.
    pub age_se: Option<f64>,
    pub z_mean: Option<f64>,
    pub z_mean_se: Option<f64>,
    pub z_second: Option<f64>,
    pub z_second_se: Option<f64>,
    pub total_updates: u64,
    /// Replications that produced an age estimate for this node.
    pub contributing: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateSummary {
    pub replications: u32,
    pub base_seed: u64,
    pub nodes: Vec<NodeAggregate>,
}

/// Run `replications` independent simulations seeded base_seed,
/// base_seed + 1, ... and pool the per-node estimates. Replications are
/// independent; callers may distribute them and merge by index.
pub fn replicate(
    cfg: &SimConfig,
    replications: u32,
    base_seed: u64,
) -> Result<ReplicateSummary, Error> {
    if replications == 0 {
        return Err(Error::ZeroReplications);
    }
    let m = cfg.protocol.node_count();
    let mut ages: Vec<Vec<f64>> = vec![Vec::new(); m];
    let mut means: Vec<Vec<f64>> = vec![Vec::new(); m];
    let mut seconds: Vec<Vec<f64>> = vec![Vec::new(); m];
    let mut updates = vec![0u64; m];

    for r in 0..replications {
        let run = SimConfig {
            protocol: cfg.protocol.clone(),
            horizon: cfg.horizon,
            seed: base_seed.wrapping_add(u64::from(r)),
            warmup: cfg.warmup,
        };
        let result = simulate(&run);
        for (i, stats) in result.nodes.iter().enumerate() {
            updates[i] += stats.timestamps.len() as u64;
            if let Some(a) = stats.age {
                ages[i].push(a);
            }
            if let Some(zm) = stats.z_mean {
                means[i].push(zm);
            }
            if let Some(z2) = stats.z_second {
                seconds[i].push(z2);
            }
        }
    }

    let nodes = (0..m)
        .map(|i| {
            let (age_mean, age_se) = mean_and_se(&ages[i]);
            let (z_mean, z_mean_se) = mean_and_se(&means[i]);
            let (z_second, z_second_se) = mean_and_se(&seconds[i]);
            NodeAggregate {
                age_mean,
                age_se,
                z_mean,
                z_mean_se,
                z_second,
                z_second_se,
                total_updates: updates[i],
                contributing: ages[i].len() as u32,
            }
        })
        .collect();

    Ok(ReplicateSummary { replications, base_seed, nodes })
}
