//! Ad-hoc analysis commands. All emit CSV documents; node columns are
//! 1-based in every output.

use aoi_core::aloha::{aloha_age, aloha_age_lower_bound, aloha_rates, foc_residual};
use aoi_core::model::{AlohaConfig, ChannelProfile, SfConfig};
use aoi_core::optimize::{sf_sweep, tau_approx, tau_exact_two, tau_numeric, tau_numeric_from};
use aoi_core::sf::sf_age;
use aoi_core::sim::{replicate, simulate, Protocol, SimConfig, SimResult};
use aoi_core::symmetric::symmetric_compare;

use crate::csvfmt::{fmt_f64, fmt_opt, Csv};
use crate::error::CliError;
use crate::spec::{
    AnalyzeAlohaSpec, AnalyzeSfSpec, OptimizeSSpec, OptimizeTauSpec, ProtocolKind, SimulateSpec,
    SymmetricSpec, TauMethodKind, TauStart,
};

fn spec_json<T: serde::Serialize>(spec: &T) -> String {
    serde_json::to_string(spec).expect("spec serializes")
}

pub fn analyze_sf(spec: &AnalyzeSfSpec) -> Result<String, CliError> {
    let profile = ChannelProfile::new(spec.p.clone())?;
    let cfg = SfConfig::new(profile.clone(), spec.s)?;
    let breakdown = sf_age(&cfg)?;

    let mut csv = Csv::new(&spec_json(spec), None);
    csv.row(["node", "p", "r", "z_mean", "z_second", "age"]);
    for i in 0..profile.node_count() {
        let p = profile.prob(i);
        let r = aoi_core::sf::turn_success_prob(p, spec.s);
        csv.row([
            (i + 1).to_string(),
            fmt_f64(p),
            fmt_f64(r),
            fmt_f64(breakdown.moments[i].mean),
            fmt_f64(breakdown.moments[i].second_moment),
            fmt_f64(breakdown.ages.per_node[i]),
        ]);
    }
    csv.summary("network_age", &fmt_f64(breakdown.ages.network));
    Ok(csv.finish())
}

pub fn analyze_aloha(spec: &AnalyzeAlohaSpec) -> Result<String, CliError> {
    let profile = ChannelProfile::new(spec.p.clone())?;
    let cfg = AlohaConfig::new(profile.clone(), spec.tau.clone())?;
    let rates = aloha_rates(&cfg);
    let ages = aloha_age(&cfg);

    let mut csv = Csv::new(&spec_json(spec), None);
    csv.row(["node", "p", "tau", "gamma", "age"]);
    for i in 0..profile.node_count() {
        csv.row([
            (i + 1).to_string(),
            fmt_f64(profile.prob(i)),
            fmt_f64(cfg.attempts()[i]),
            fmt_f64(rates.gamma(i)),
            fmt_f64(ages.per_node[i]),
        ]);
    }
    csv.summary("network_age", &fmt_f64(ages.network));
    // stationarity and bound diagnostics only exist away from the boundary
    if let Ok(foc) = foc_residual(&cfg) {
        csv.summary("foc_max_residual", &fmt_f64(foc.max_abs));
    }
    if let Ok(diag) = aloha_age_lower_bound(&cfg) {
        csv.summary("c", &fmt_f64(diag.c));
        csv.summary("c_prime", &fmt_f64(diag.c_prime));
        csv.summary("age_lower_bound", &fmt_f64(diag.age_lower_bound));
    }
    Ok(csv.finish())
}

pub fn optimize_s(spec: &OptimizeSSpec) -> Result<String, CliError> {
    let profile = ChannelProfile::new(spec.p.clone())?;
    let sweep = sf_sweep(&profile, spec.s_max)?;

    let mut csv = Csv::new(&spec_json(spec), None);
    csv.row(["s", "network_age"]);
    for (k, &age) in sweep.ages.iter().enumerate() {
        csv.row([(k + 1).to_string(), fmt_f64(age)]);
    }
    csv.summary("best_s", &sweep.best_s.to_string());
    csv.summary("monotone_decreasing", &sweep.monotone_decreasing.to_string());
    Ok(csv.finish())
}

pub fn optimize_tau(spec: &OptimizeTauSpec) -> Result<String, CliError> {
    let profile = ChannelProfile::new(spec.p.clone())?;
    let mut csv = Csv::new(&spec_json(spec), None);

    let solution = match spec.method {
        TauMethodKind::Exact2 => {
            if profile.node_count() != 2 {
                return Err(CliError::validation("exact2 applies to two-node networks only"));
            }
            tau_exact_two(profile.prob(0), profile.prob(1))?
        }
        TauMethodKind::Approx => tau_approx(&profile)?,
        TauMethodKind::Numeric => match spec.start {
            TauStart::Approx => tau_numeric(&profile, spec.tol, spec.max_iter)?,
            TauStart::Uniform => {
                let uniform = vec![1.0 / profile.node_count() as f64; profile.node_count()];
                tau_numeric_from(&profile, &uniform, spec.tol, spec.max_iter)?
            }
            TauStart::Both => {
                let from_approx = tau_numeric(&profile, spec.tol, spec.max_iter)?;
                let uniform = vec![1.0 / profile.node_count() as f64; profile.node_count()];
                let from_uniform = tau_numeric_from(&profile, &uniform, spec.tol, spec.max_iter)?;
                let gap = from_approx
                    .taus
                    .iter()
                    .zip(&from_uniform.taus)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0f64, f64::max);
                csv.summary("uniform_start_age", &fmt_f64(from_uniform.achieved_age));
                csv.summary(
                    "uniform_start_residual",
                    &fmt_f64(from_uniform.foc_max_residual),
                );
                csv.summary("start_max_tau_gap", &fmt_f64(gap));
                if gap > 1e-6 {
                    csv.comment("warning: starts converged to different stationary points");
                }
                if from_uniform.achieved_age < from_approx.achieved_age {
                    from_uniform
                } else {
                    from_approx
                }
            }
        },
    };

    csv.row(["node", "p", "tau"]);
    for (i, &t) in solution.taus.iter().enumerate() {
        csv.row([(i + 1).to_string(), fmt_f64(profile.prob(i)), fmt_f64(t)]);
    }
    csv.summary("method", &solution.method.to_string());
    csv.summary("foc_max_residual", &fmt_f64(solution.foc_max_residual));
    csv.summary("achieved_age", &fmt_f64(solution.achieved_age));
    Ok(csv.finish())
}

pub fn symmetric(spec: &SymmetricSpec) -> Result<String, CliError> {
    let profile = ChannelProfile::new(spec.p.clone())?;
    let report = symmetric_compare(&profile)?;

    let mut csv = Csv::new(&spec_json(spec), None);
    csv.row(["node", "p", "tau"]);
    for (i, &t) in report.taus.iter().enumerate() {
        csv.row([(i + 1).to_string(), fmt_f64(profile.prob(i)), fmt_f64(t)]);
    }
    csv.summary("beta_star", &fmt_f64(report.beta_star));
    csv.summary("gamma_star", &fmt_f64(report.gamma_star));
    csv.summary("age_sf", &fmt_f64(report.age_sf));
    csv.summary("age_aloha", &fmt_f64(report.age_aloha));
    csv.summary("l", &fmt_f64(report.l));
    csv.summary("l_m", &fmt_f64(report.bounds.l_m));
    csv.summary("bound_lower", &fmt_f64(report.bounds.lower));
    csv.summary("bound_upper", &fmt_f64(report.bounds.upper));
    csv.summary("r", &fmt_f64(report.r));
    csv.summary("rho", &fmt_f64(report.rho));
    Ok(csv.finish())
}

pub struct SimulateOutput {
    pub csv: String,
    /// Per-update trace document, when requested.
    pub trace: Option<String>,
}

fn build_protocol(spec: &SimulateSpec, profile: ChannelProfile) -> Result<Protocol, CliError> {
    match spec.protocol {
        ProtocolKind::Sf => {
            let s = spec
                .s
                .ok_or_else(|| CliError::validation("scheduled protocol needs a turn cap (--S)"))?;
            Ok(Protocol::Sf(SfConfig::new(profile, s)?))
        }
        ProtocolKind::Aloha => {
            let tau = spec
                .tau
                .clone()
                .ok_or_else(|| CliError::validation("random access needs attempt probabilities (--tau)"))?;
            Ok(Protocol::Aloha(AlohaConfig::new(profile, tau)?))
        }
    }
}

fn trace_document(spec: &SimulateSpec, result: &SimResult) -> String {
    // one record per update, globally ordered by slot; a node's first update
    // has no gap yet, so its z cell is empty
    let mut records: Vec<(u64, usize, Option<u64>)> = Vec::new();
    for (node, stats) in result.nodes.iter().enumerate() {
        for (k, &slot) in stats.timestamps.iter().enumerate() {
            let z = if k == 0 { None } else { Some(stats.z_samples[k - 1]) };
            records.push((slot, node, z));
        }
    }
    records.sort_unstable();
    let mut csv = Csv::new(&spec_json(spec), Some(spec.seed));
    csv.row(["node", "slot", "z"]);
    for (slot, node, z) in records {
        csv.row([
            (node + 1).to_string(),
            slot.to_string(),
            z.map(|v| v.to_string()).unwrap_or_default(),
        ]);
    }
    csv.finish()
}

pub fn simulate_cmd(spec: &SimulateSpec) -> Result<SimulateOutput, CliError> {
    let profile = ChannelProfile::new(spec.p.clone())?;
    let protocol = build_protocol(spec, profile)?;
    let cfg = SimConfig::new(protocol, spec.horizon, spec.seed)?;

    if spec.replications <= 1 {
        let result = simulate(&cfg);
        let mut csv = Csv::new(&spec_json(spec), Some(spec.seed));
        csv.row([
            "node",
            "updates",
            "z_mean",
            "z_mean_se",
            "z_second",
            "z_second_se",
            "age",
            "age_se",
        ]);
        for (i, stats) in result.nodes.iter().enumerate() {
            csv.row([
                (i + 1).to_string(),
                stats.update_count().to_string(),
                fmt_opt(stats.z_mean),
                fmt_opt(stats.z_mean_se),
                fmt_opt(stats.z_second),
                fmt_opt(stats.z_second_se),
                fmt_opt(stats.age),
                fmt_opt(stats.age_se),
            ]);
        }
        let trace = spec.trace.as_ref().map(|_| trace_document(spec, &result));
        Ok(SimulateOutput { csv: csv.finish(), trace })
    } else {
        if spec.trace.is_some() {
            return Err(CliError::validation("trace export works on single runs only"));
        }
        let agg = replicate(&cfg, spec.replications, spec.seed)?;
        let mut csv = Csv::new(&spec_json(spec), Some(spec.seed));
        csv.row([
            "node",
            "replications",
            "age",
            "age_se",
            "z_mean",
            "z_mean_se",
            "z_second",
            "z_second_se",
            "total_updates",
        ]);
        for (i, node) in agg.nodes.iter().enumerate() {
            csv.row([
                (i + 1).to_string(),
                node.contributing.to_string(),
                fmt_opt(node.age_mean),
                fmt_opt(node.age_se),
                fmt_opt(node.z_mean),
                fmt_opt(node.z_mean_se),
                fmt_opt(node.z_second),
                fmt_opt(node.z_second_se),
                node.total_updates.to_string(),
            ]);
        }
        Ok(SimulateOutput { csv: csv.finish(), trace: None })
    }
}
