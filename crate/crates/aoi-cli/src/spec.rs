//! JSON-facing parameter documents. Each CLI invocation resolves to one of
//! these structs, either from `--spec FILE` or from quick-use flags; the
//! resolved document is echoed into every output file so a run can be
//! reproduced from the file alone.

use serde::{Deserialize, Serialize};

fn default_seed() -> u64 {
    1
}

fn default_scatter_p_low() -> f64 {
    0.1
}

fn default_scatter_p_high() -> f64 {
    0.9
}

fn default_cdf_p_low() -> f64 {
    0.0
}

fn default_cdf_p_high() -> f64 {
    1.0
}

fn default_min_p() -> f64 {
    1e-6
}

fn default_tol() -> f64 {
    aoi_core::optimize::TAU_DEFAULT_TOL
}

fn default_max_iter() -> usize {
    aoi_core::optimize::TAU_DEFAULT_MAX_ITER
}

fn default_replications() -> u32 {
    1
}

/// Canned experiment, selected by the `kind` tag.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum ExperimentSpec {
    #[serde(rename = "s_sweep")]
    SSweep(SweepSpec),
    #[serde(rename = "sf_vs_aloha_scatter")]
    Scatter(ScatterSpec),
    #[serde(rename = "approx_error_cdf")]
    ApproxCdf(ApproxCdfSpec),
}

impl ExperimentSpec {
    pub fn output(&self) -> Option<&str> {
        match self {
            ExperimentSpec::SSweep(s) => s.output.as_deref(),
            ExperimentSpec::Scatter(s) => s.output.as_deref(),
            ExperimentSpec::ApproxCdf(s) => s.output.as_deref(),
        }
    }
}

/// Network age for every turn cap 1..=s_max of one profile.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub p: Vec<f64>,
    pub s_max: u32,
    #[serde(default)]
    pub output: Option<String>,
}

/// Symmetric-updating ages of many random networks, with the fitted ratio.
/// Profiles draw each probability uniformly from (p_low, p_high]; network k
/// uses seed `seed + k`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScatterSpec {
    pub networks: u32,
    pub nodes: u32,
    #[serde(default = "default_scatter_p_low")]
    pub p_low: f64,
    #[serde(default = "default_scatter_p_high")]
    pub p_high: f64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub output: Option<String>,
}

/// Distribution of the age penalty of the closed-form attempt probabilities
/// against the numerically optimized ones, per network size. Probabilities
/// draw uniformly from (p_low, p_high], rejecting values below min_p; sample
/// k of size index i uses seed `seed + i * samples + k`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApproxCdfSpec {
    pub m_values: Vec<u32>,
    pub samples: u32,
    #[serde(default = "default_cdf_p_low")]
    pub p_low: f64,
    #[serde(default = "default_cdf_p_high")]
    pub p_high: f64,
    #[serde(default = "default_min_p")]
    pub min_p: f64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub output: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyzeSfSpec {
    pub p: Vec<f64>,
    pub s: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyzeAlohaSpec {
    pub p: Vec<f64>,
    pub tau: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeSSpec {
    pub p: Vec<f64>,
    pub s_max: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TauMethodKind {
    Numeric,
    Approx,
    Exact2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TauStart {
    Approx,
    Uniform,
    /// Run from both starting points and report any discrepancy.
    Both,
}

fn default_method() -> TauMethodKind {
    TauMethodKind::Numeric
}

fn default_start() -> TauStart {
    TauStart::Approx
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeTauSpec {
    pub p: Vec<f64>,
    #[serde(default = "default_method")]
    pub method: TauMethodKind,
    #[serde(default = "default_start")]
    pub start: TauStart,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymmetricSpec {
    pub p: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProtocolKind {
    Sf,
    Aloha,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateSpec {
    pub protocol: ProtocolKind,
    pub p: Vec<f64>,
    /// Turn cap; required for the scheduled protocol.
    #[serde(default)]
    pub s: Option<u32>,
    /// Attempt probabilities; required for the random-access protocol.
    #[serde(default)]
    pub tau: Option<Vec<f64>>,
    pub horizon: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_replications")]
    pub replications: u32,
    /// Optional per-update trace output path (single runs only).
    #[serde(default)]
    pub trace: Option<String>,
}
