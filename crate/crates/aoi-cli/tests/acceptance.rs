//! Acceptance suite: one test per release criterion, each printing a PASS
//! line with the measured values (visible under `--nocapture`). Run with
//! `cargo test -p aoi-cli --test acceptance`.

use aoi_cli::experiments::{approx_cdf_stats, run_approx_cdf, run_s_sweep, run_scatter, scatter_stats};
use aoi_cli::spec::{ApproxCdfSpec, ScatterSpec, SweepSpec};
use aoi_core::aloha::aloha_age;
use aoi_core::model::{AlohaConfig, ChannelProfile, SfConfig};
use aoi_core::optimize::{sf_sweep, tau_exact_two, tau_numeric};
use aoi_core::rng::SplitMix64;
use aoi_core::sf::{sf_age, sf_moments, sf_moments_oracle};
use aoi_core::sim::{empirical_age, simulate, Protocol, SimConfig};
use aoi_core::symmetric::{beta_star, symmetric_aloha, symmetric_sf_age};

fn profile(p: &[f64]) -> ChannelProfile {
    ChannelProfile::new(p.to_vec()).unwrap()
}

/// Criterion 1: the closed-form moments agree with the PMF-composition
/// oracle to 1e-9 relative over the full small-network grid.
#[test]
fn acceptance_01_closed_form_vs_oracle() {
    let grid = [0.1, 0.3, 0.5, 0.7, 0.9, 1.0];
    let mut worst: f64 = 0.0;
    let mut checked = 0u64;
    for m in 1..=4usize {
        let mut combo = vec![0usize; m];
        loop {
            let probs: Vec<f64> = combo.iter().map(|&k| grid[k]).collect();
            let prof = profile(&probs);
            for s in 1..=8u32 {
                let cfg = SfConfig::new(prof.clone(), s).unwrap();
                for node in 0..m {
                    let exact = sf_moments(&cfg, node).unwrap();
                    let oracle = sf_moments_oracle(&cfg, node, 1e-14).unwrap();
                    let rel_mean =
                        (exact.mean - oracle.moments.mean).abs() / exact.mean;
                    let rel_second = (exact.second_moment - oracle.moments.second_moment).abs()
                        / exact.second_moment;
                    worst = worst.max(rel_mean).max(rel_second);
                    checked += 1;
                    assert!(
                        rel_mean <= 1e-9 && rel_second <= 1e-9,
                        "p={probs:?} S={s} node={node}: rel errors {rel_mean:e}, {rel_second:e}"
                    );
                }
            }
            // next combination with repetition
            let mut idx = 0;
            loop {
                if idx == m {
                    break;
                }
                combo[idx] += 1;
                if combo[idx] < grid.len() {
                    break;
                }
                combo[idx] = 0;
                idx += 1;
            }
            if combo.iter().all(|&k| k == 0) {
                break;
            }
        }
    }
    println!("acceptance 1: PASS — {checked} node-configs, worst relative gap {worst:.3e}");
}

/// Criterion 2: the heterogeneous three-node sweep bottoms out at cap 7.
#[test]
fn acceptance_02_sweep_optimum() {
    let sweep = sf_sweep(&profile(&[0.1, 0.5, 0.9]), 30).unwrap();
    assert_eq!(sweep.best_s, 7, "best_s = {}", sweep.best_s);
    println!(
        "acceptance 2: PASS — best_s = {} with network age {:.6}",
        sweep.best_s,
        sweep.ages[6]
    );
}

/// Criterion 3: homogeneous networks never gain from a tighter cap, and the
/// mean gap stays M/p at every cap.
#[test]
fn acceptance_03_homogeneous_monotonicity() {
    for &p in &[0.1, 0.3, 0.5] {
        for m in [2usize, 5, 10] {
            let prof = profile(&vec![p; m]);
            let sweep = sf_sweep(&prof, 50).unwrap();
            for w in sweep.ages.windows(2) {
                assert!(w[1] <= w[0], "p={p} M={m}: age increased {} -> {}", w[0], w[1]);
            }
            let expected = m as f64 / p;
            for s in 1..=50u32 {
                let cfg = SfConfig::new(prof.clone(), s).unwrap();
                for node in 0..m {
                    let mean = sf_moments(&cfg, node).unwrap().mean;
                    assert!(
                        (mean - expected).abs() <= 1e-14 * expected,
                        "p={p} M={m} S={s}: mean {mean} vs {expected}"
                    );
                }
            }
        }
    }
    println!("acceptance 3: PASS — non-increasing ages and cap-independent means (9 profiles)");
}

/// Criterion 4: the fixed-point solver lands on the exact two-node optimum
/// across the probability grid.
#[test]
fn acceptance_04_two_node_optimum() {
    let mut worst: f64 = 0.0;
    for a in 1..=10 {
        for b in 1..=10 {
            let (p1, p2) = (a as f64 / 10.0, b as f64 / 10.0);
            let numeric = tau_numeric(&profile(&[p1, p2]), 1e-10, 10_000).unwrap();
            let exact = tau_exact_two(p1, p2).unwrap();
            for (n, e) in numeric.taus.iter().zip(&exact.taus) {
                let gap = (n - e).abs();
                worst = worst.max(gap);
                assert!(gap <= 1e-8, "p=({p1},{p2}): |{n} - {e}| = {gap:e}");
            }
        }
    }
    println!("acceptance 4: PASS — 10x10 grid, worst component gap {worst:.3e}");
}

/// Criterion 5: the closed-form attempt probabilities stay within 5% of the
/// optimized age in at least 93% of five-node networks and 99% of
/// twenty-node networks.
#[test]
fn acceptance_05_approximation_quality() {
    let spec = ApproxCdfSpec {
        m_values: vec![5, 20],
        samples: 1000,
        p_low: 0.0,
        p_high: 1.0,
        min_p: 1e-6,
        tol: 1e-10,
        max_iter: 10_000,
        seed: 2024,
        output: None,
    };
    let stats = approx_cdf_stats(&spec).unwrap();
    let m5 = &stats.per_m[0];
    let m20 = &stats.per_m[1];
    assert!(
        m5.fraction_below_5pct >= 0.93,
        "M=5 fraction {} < 0.93 (excluded {})",
        m5.fraction_below_5pct,
        m5.excluded
    );
    assert!(
        m20.fraction_below_5pct >= 0.99,
        "M=20 fraction {} < 0.99 (excluded {})",
        m20.fraction_below_5pct,
        m20.excluded
    );
    println!(
        "acceptance 5: PASS — fraction below 5%: M=5 {:.3} (excl {}), M=20 {:.3} (excl {})",
        m5.fraction_below_5pct, m5.excluded, m20.fraction_below_5pct, m20.excluded
    );
}

/// Criterion 6: the symmetric-rate root is accurate and inside its bracket
/// for a thousand random profiles across network sizes.
#[test]
fn acceptance_06_beta_star_correctness() {
    let mut rng = SplitMix64::new(0xBE7A57A8);
    let mut worst_f: f64 = 0.0;
    for &m in &[2usize, 5, 50, 1000] {
        for _ in 0..250 {
            let probs: Vec<f64> = (0..m).map(|_| 1.0 - rng.next_f64() * 0.95).collect();
            let prof = profile(&probs);
            let beta = beta_star(&prof, 1e-12).unwrap();
            let lo = prof.p_min() / (m - 1) as f64;
            let hi = prof.p_max() / (m - 1) as f64;
            assert!(beta >= lo && beta <= hi, "M={m}: {beta} outside [{lo}, {hi}]");
            let f: f64 = probs.iter().map(|&p| beta / (beta + p)).sum::<f64>() - 1.0;
            worst_f = worst_f.max(f.abs());
            assert!(f.abs() <= 1e-10, "M={m}: |f(beta*)| = {:e}", f.abs());
        }
    }
    println!("acceptance 6: PASS — 1000 profiles, worst |root residual| {worst_f:.3e}");
}

/// Criterion 7: five hundred thousand-node networks all satisfy the log
/// ratio bounds, and the fitted ratio lands in (4.6, 6.4).
#[test]
fn acceptance_07_scatter_reproduction() {
    let spec = ScatterSpec {
        networks: 500,
        nodes: 1000,
        p_low: 0.1,
        p_high: 0.9,
        seed: 1,
        output: None,
    };
    // scatter_stats fails outright if any network violates its bounds
    let stats = scatter_stats(&spec).unwrap();
    assert_eq!(stats.rows.len(), 500);
    assert!(
        stats.origin_slope > 4.6 && stats.origin_slope < 6.4,
        "fitted slope {}",
        stats.origin_slope
    );
    println!(
        "acceptance 7: PASS — 500 networks in bounds; slope {:.4} (affine {:.4} + {:.3})",
        stats.origin_slope, stats.affine_slope, stats.affine_intercept
    );
}

/// Criterion 8: empirical ages from the simulator track every closed form
/// within four standard errors; degenerate configurations match exactly.
#[test]
fn acceptance_08_simulation_vs_analytic() {
    let horizon = 1_000_000u64;
    let mut rng = SplitMix64::new(0xACCE97);
    let mut checks = 0u32;

    for round in 0..50u64 {
        let m = 1 + (rng.next_u64() % 5) as usize;
        let probs: Vec<f64> = (0..m).map(|_| 1.0 - rng.next_f64() * 0.9).collect();
        let s = 1 + (rng.next_u64() % 10) as u32;
        let sf_cfg = SfConfig::new(profile(&probs), s).unwrap();
        let sim_cfg =
            SimConfig::new(Protocol::Sf(sf_cfg.clone()), horizon, 0x5F00 + round).unwrap();
        let result = simulate(&sim_cfg);
        let analytic = sf_age(&sf_cfg).unwrap();
        for node in 0..m {
            assert!(result.nodes[node].z_samples.len() >= 100, "undersampled SF config");
            let emp = empirical_age(&result, node).unwrap();
            let se = result.nodes[node].age_se.unwrap();
            let target = analytic.ages.per_node[node];
            assert!(
                (emp - target).abs() <= 4.0 * se,
                "sf round {round} node {node}: {emp} vs {target} (se {se})"
            );
            checks += 1;
        }
    }

    for round in 0..50u64 {
        let m = 1 + (rng.next_u64() % 5) as usize;
        let probs: Vec<f64> = (0..m).map(|_| 1.0 - rng.next_f64() * 0.9).collect();
        let taus: Vec<f64> =
            (0..m).map(|_| ((0.5 + rng.next_f64()) / m as f64).min(0.95)).collect();
        let al_cfg = AlohaConfig::new(profile(&probs), taus).unwrap();
        let sim_cfg =
            SimConfig::new(Protocol::Aloha(al_cfg.clone()), horizon, 0xA10A + round).unwrap();
        let result = simulate(&sim_cfg);
        let analytic = aloha_age(&al_cfg);
        for node in 0..m {
            assert!(result.nodes[node].z_samples.len() >= 100, "undersampled ALOHA config");
            let emp = empirical_age(&result, node).unwrap();
            let se = result.nodes[node].age_se.unwrap();
            let target = analytic.per_node[node];
            assert!(
                (emp - target).abs() <= 4.0 * se,
                "aloha round {round} node {node}: {emp} vs {target} (se {se})"
            );
            checks += 1;
        }
    }

    // degenerate cases must match exactly
    let sf_cfg = SfConfig::new(profile(&[1.0, 1.0, 1.0]), 4).unwrap();
    let sim_cfg = SimConfig::new(Protocol::Sf(sf_cfg.clone()), 10_000, 3).unwrap();
    let result = simulate(&sim_cfg);
    let analytic = sf_age(&sf_cfg).unwrap();
    for node in 0..3 {
        assert_eq!(empirical_age(&result, node).unwrap(), analytic.ages.per_node[node]);
        assert_eq!(result.nodes[node].age_se, Some(0.0));
    }
    let al_cfg = AlohaConfig::new(profile(&[1.0, 0.3]), vec![1.0, 0.0]).unwrap();
    let sim_cfg = SimConfig::new(Protocol::Aloha(al_cfg.clone()), 10_000, 4).unwrap();
    let result = simulate(&sim_cfg);
    assert_eq!(empirical_age(&result, 0).unwrap(), 1.5);
    assert_eq!(aloha_age(&al_cfg).per_node[0], 1.5);
    assert!(result.nodes[1].timestamps.is_empty());

    println!("acceptance 8: PASS — {checks} node ages within 4 SE; degenerate cases exact");
}

/// Criterion 9: the symmetric closed forms give exactly 3.5 and 8.5 slots
/// for the two-node half-probability network, and long simulations agree.
#[test]
fn acceptance_09_symmetric_consistency() {
    let prof = profile(&[0.5, 0.5]);
    let (age_sf, _) = symmetric_sf_age(&prof);
    assert_eq!(age_sf, 3.5);
    let sym = symmetric_aloha(&prof).unwrap();
    assert_eq!(sym.age, 8.5);

    let horizon = 10_000_000u64;
    // unbounded-cap scheduled access: a turn runs until it succeeds
    let sf_cfg = SfConfig::new(prof.clone(), u32::MAX).unwrap();
    let result = simulate(&SimConfig::new(Protocol::Sf(sf_cfg), horizon, 84).unwrap());
    for node in 0..2 {
        let emp = empirical_age(&result, node).unwrap();
        let se = result.nodes[node].age_se.unwrap();
        assert!((emp - 3.5).abs() <= 3.0 * se, "sf node {node}: {emp} (se {se})");
    }

    let al_cfg = AlohaConfig::new(prof, sym.taus.clone()).unwrap();
    let result = simulate(&SimConfig::new(Protocol::Aloha(al_cfg), horizon, 84).unwrap());
    for node in 0..2 {
        let emp = empirical_age(&result, node).unwrap();
        let se = result.nodes[node].age_se.unwrap();
        assert!((emp - 8.5).abs() <= 3.0 * se, "aloha node {node}: {emp} (se {se})");
    }
    println!("acceptance 9: PASS — 3.5 and 8.5 exact, simulations within 3 SE at 1e7 slots");
}

/// Criterion 10: rerunning any experiment with the same seed produces
/// byte-identical CSV output.
#[test]
fn acceptance_10_deterministic_output() {
    let sweep = SweepSpec { p: vec![0.1, 0.5, 0.9], s_max: 10, output: None };
    assert_eq!(run_s_sweep(&sweep).unwrap(), run_s_sweep(&sweep).unwrap());

    let scatter = ScatterSpec {
        networks: 4,
        nodes: 60,
        p_low: 0.1,
        p_high: 0.9,
        seed: 9,
        output: None,
    };
    assert_eq!(run_scatter(&scatter).unwrap(), run_scatter(&scatter).unwrap());

    let cdf = ApproxCdfSpec {
        m_values: vec![2, 3],
        samples: 12,
        p_low: 0.0,
        p_high: 1.0,
        min_p: 1e-6,
        tol: 1e-10,
        max_iter: 10_000,
        seed: 5,
        output: None,
    };
    assert_eq!(run_approx_cdf(&cdf).unwrap(), run_approx_cdf(&cdf).unwrap());

    println!("acceptance 10: PASS — byte-identical reruns for all three experiments");
}
