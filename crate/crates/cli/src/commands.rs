//! The experiment subcommands. Each one reads its parameters from the flat
//! config (already merged with CLI overrides), runs seeded and
//! thread-count-invariant computations, and returns the full output text:
//! a config-echo comment, a header row, then data rows.

use std::fmt::Write as _;

use ssrw_core::branching::{
    analytic_curve, extinction_prob, f_limit, limiting_occupation, r_lambda,
    subcritical_moment_bound, survival_prob, RMethod,
};
use ssrw_core::exec::{derive_seed, map_reps};
use ssrw_core::graph::{components, origin_stats, sample_er};
use ssrw_core::oracle::{ExactEnumerator, OracleReport};
use ssrw_core::process::{
    clt_experiment, occupation_limit, run_state_process, AtomMoments, Prior, PriorMode,
};
use ssrw_core::walk::{estimate_tau_moments, mc_expected_return, DEFAULT_STEPS_CAP};

use crate::config::{Config, DEFAULT_SEED, DEFAULT_THREADS};
use crate::CliError;

const COMMON_KEYS: [&str; 3] = ["seed", "threads", "steps_cap"];

fn common(cfg: &Config) -> Result<(u64, usize, u64), CliError> {
    Ok((
        cfg.get_u64("seed", DEFAULT_SEED)?,
        cfg.get_usize("threads", DEFAULT_THREADS)?,
        cfg.get_u64("steps_cap", DEFAULT_STEPS_CAP)?,
    ))
}

fn allowed(extra: &[&'static str]) -> Vec<&'static str> {
    let mut keys: Vec<&'static str> = COMMON_KEYS.to_vec();
    keys.extend_from_slice(extra);
    keys
}

fn core_err(e: ssrw_core::Error) -> CliError {
    CliError::Config(e.to_string())
}

fn prior_from_config(
    cfg: &Config,
    default_mode: &str,
    default_atoms: &str,
) -> Result<Prior, CliError> {
    let mode = match cfg.get_str("prior_mode").unwrap_or(default_mode) {
        "dense" => PriorMode::Dense,
        "sparse" => PriorMode::Sparse,
        other => {
            return Err(CliError::Config(format!(
                "prior_mode must be `dense` or `sparse`, got `{other}`"
            )))
        }
    };
    let atoms = cfg.get_atoms("prior_atoms", default_atoms)?;
    Prior::from_atoms(mode, &atoms).map_err(core_err)
}

/// Per-atom return-time moments: exact enumeration for tiny n, nested Monte
/// Carlo otherwise.
fn atom_moments(
    prior: &Prior,
    n: usize,
    seed: u64,
    threads: usize,
    steps_cap: u64,
    mc_graphs: usize,
    mc_walks: usize,
) -> Result<Vec<AtomMoments>, CliError> {
    let mut moments = Vec::with_capacity(prior.len());
    if n <= ssrw_core::oracle::MAX_EXACT_N {
        let enumerator = ExactEnumerator::new(n).map_err(core_err)?;
        for atom in 0..prior.len() {
            let p = prior.edge_probability(atom, n).map_err(core_err)?;
            let report = enumerator.report(p).map_err(core_err)?;
            moments.push(AtomMoments {
                e_tau: report.exact_e_tau,
                e_tau_sq: report.e_tau_sq,
            });
        }
    } else {
        for atom in 0..prior.len() {
            let p = prior.edge_probability(atom, n).map_err(core_err)?;
            let est = estimate_tau_moments(
                n,
                p,
                mc_graphs,
                mc_walks,
                derive_seed(seed, 0x0A70_0000 + atom as u64),
                threads,
                steps_cap,
            )
            .map_err(core_err)?;
            moments.push(AtomMoments {
                e_tau: est.e_tau,
                e_tau_sq: est.e_tau_sq,
            });
        }
    }
    Ok(moments)
}

/// Tabulate the analytic limit objects over a lambda grid.
pub fn cmd_analytic(cfg: &Config) -> Result<String, CliError> {
    cfg.check_keys(&allowed(&["grid"]))?;
    let grid = cfg.get_grid("grid", "0.1:5:50")?;
    let rows = analytic_curve(&grid).map_err(core_err)?;
    let mut out = cfg.echo_line("analytic");
    out.push_str("lambda,eta,zeta,r_lambda,f\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.lambda, r.eta, r.zeta, r.r_lambda, r.f
        );
    }
    Ok(out)
}

/// Scaled expected return times E[tau]/(n-1) in the fixed-p regime.
pub fn cmd_dense(cfg: &Config) -> Result<String, CliError> {
    cfg.check_keys(&allowed(&["grid", "n", "reps"]))?;
    let (seed, threads, _) = common(cfg)?;
    let n_list = cfg.get_usize_list("n", "500")?;
    let p_grid = cfg.get_grid("grid", "0.3,0.7")?;
    let reps = cfg.get_usize("reps", 10_000)?;
    let mut out = cfg.echo_line("dense");
    out.push_str("n,p,reps,mean_return,ratio,std_error_ratio\n");
    for (cell, (&n, &p)) in n_list
        .iter()
        .flat_map(|n| p_grid.iter().map(move |p| (n, p)))
        .enumerate()
    {
        let est = mc_expected_return(n, p, reps, derive_seed(seed, cell as u64), threads)
            .map_err(core_err)?;
        let scale = (n as f64 - 1.0).max(1.0);
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            n,
            p,
            reps,
            est.mean,
            est.mean / scale,
            est.std_error / scale
        );
    }
    Ok(out)
}

/// Scaled expected return times E[tau]/n against the analytic limit density
/// in the lambda/n regime.
pub fn cmd_sparse(cfg: &Config) -> Result<String, CliError> {
    cfg.check_keys(&allowed(&["grid", "n", "reps"]))?;
    let (seed, threads, _) = common(cfg)?;
    let n_list = cfg.get_usize_list("n", "500,2000,8000")?;
    let lambda_grid = cfg.get_grid("grid", "0.5,2")?;
    let reps = cfg.get_usize("reps", 2_000)?;
    let mut out = cfg.echo_line("sparse");
    out.push_str("n,lambda,reps,scaled_mean,std_error_scaled,f_lambda,abs_gap\n");
    for (cell, (&n, &lambda)) in n_list
        .iter()
        .flat_map(|n| lambda_grid.iter().map(move |l| (n, l)))
        .enumerate()
    {
        let p = lambda / n as f64;
        if p > 1.0 {
            return Err(CliError::Config(format!(
                "lambda {lambda} with n {n} exceeds edge probability 1"
            )));
        }
        let est = mc_expected_return(n, p, reps, derive_seed(seed, cell as u64), threads)
            .map_err(core_err)?;
        let f = f_limit(lambda).map_err(core_err)?;
        let scaled = est.mean / n as f64;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            n,
            lambda,
            reps,
            scaled,
            est.std_error / n as f64,
            f,
            (scaled - f).abs()
        );
    }
    Ok(out)
}

/// One state-process run: empirical occupation masses next to the plug-in
/// limit, and in sparse mode the analytic limit-density masses.
pub fn cmd_occupation(cfg: &Config) -> Result<String, CliError> {
    cfg.check_keys(&allowed(&[
        "n",
        "t",
        "prior_mode",
        "prior_atoms",
        "plugin_reps",
    ]))?;
    let (seed, threads, steps_cap) = common(cfg)?;
    let n = cfg.get_usize("n", 4000)?;
    let horizon = cfg.get_u64("t", 10_000_000)?;
    let plugin_reps = cfg.get_usize("plugin_reps", 400)?;
    let prior = prior_from_config(cfg, "sparse", "0.5:0.5,2:0.5")?;
    prior.validate_for(n).map_err(core_err)?;

    let mut rng = ssrw_core::exec::rng_from_seed(seed);
    let (trace, hist) =
        run_state_process(n, &prior, horizon, &mut rng, steps_cap).map_err(core_err)?;

    // Plug-in limit masses from per-atom mean return times.
    let tau_means: Vec<f64> = if n <= ssrw_core::oracle::MAX_EXACT_N {
        let enumerator = ExactEnumerator::new(n).map_err(core_err)?;
        prior
            .atoms()
            .iter()
            .enumerate()
            .map(|(atom, _)| {
                let p = prior.edge_probability(atom, n).map_err(core_err)?;
                Ok(enumerator.report(p).map_err(core_err)?.exact_e_tau)
            })
            .collect::<Result<_, CliError>>()?
    } else {
        prior
            .atoms()
            .iter()
            .enumerate()
            .map(|(atom, _)| {
                let p = prior.edge_probability(atom, n).map_err(core_err)?;
                Ok(mc_expected_return(
                    n,
                    p,
                    plugin_reps,
                    derive_seed(seed, 0x0CC0_0000 + atom as u64),
                    threads,
                )
                .map_err(core_err)?
                .mean)
            })
            .collect::<Result<_, CliError>>()?
    };
    let plugin = occupation_limit(&prior, &tau_means).map_err(core_err)?;

    let density = if prior.mode() == PriorMode::Sparse {
        let atoms: Vec<(f64, f64)> = prior.atoms().iter().map(|a| (a.theta, a.weight)).collect();
        Some(limiting_occupation(&atoms).map_err(core_err)?)
    } else {
        None
    };

    let mut out = cfg.echo_line("occupation");
    let _ = writeln!(
        out,
        "# switches={} partial_steps={} censored={}",
        trace.switch_count, trace.partial_steps, trace.censored_count
    );
    if density.is_some() {
        out.push_str("theta,empirical_mass,plugin_mass,density_mass\n");
    } else {
        out.push_str("theta,empirical_mass,plugin_mass\n");
    }
    for (atom, prior_atom) in prior.atoms().iter().enumerate() {
        match &density {
            Some(d) => {
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    prior_atom.theta, hist.masses[atom], plugin[atom], d[atom]
                );
            }
            None => {
                let _ = writeln!(
                    out,
                    "{},{},{}",
                    prior_atom.theta, hist.masses[atom], plugin[atom]
                );
            }
        }
    }
    Ok(out)
}

/// Fluctuation experiment: standardized occupation errors across independent
/// replications, with a normality summary.
pub fn cmd_clt(cfg: &Config) -> Result<String, CliError> {
    cfg.check_keys(&allowed(&[
        "n",
        "t",
        "replications",
        "prior_mode",
        "prior_atoms",
        "target",
        "moment_graphs",
        "moment_walks",
    ]))?;
    let (seed, threads, steps_cap) = common(cfg)?;
    let n = cfg.get_usize("n", 2)?;
    let horizon = cfg.get_u64("t", 100_000)?;
    let replications = cfg.get_usize("replications", 500)?;
    let prior = prior_from_config(cfg, "dense", "1:0.5,0:0.5")?;
    let target_thetas = cfg.get_grid("target", "1")?;
    let target: Vec<usize> = target_thetas
        .iter()
        .map(|t| {
            prior
                .atoms()
                .iter()
                .position(|a| a.theta == *t)
                .ok_or_else(|| CliError::Config(format!("target theta {t} is not a prior atom")))
        })
        .collect::<Result<_, _>>()?;
    let mc_graphs = cfg.get_usize("moment_graphs", 2000)?;
    let mc_walks = cfg.get_usize("moment_walks", 20)?;
    let moments = atom_moments(&prior, n, seed, threads, steps_cap, mc_graphs, mc_walks)?;
    let summary = clt_experiment(
        n,
        &prior,
        &target,
        horizon,
        replications,
        &moments,
        derive_seed(seed, 0xC17),
        threads,
        steps_cap,
    )
    .map_err(core_err)?;
    let mut out = cfg.echo_line("clt");
    let _ = writeln!(
        out,
        "# mu_limit={} sigma_sq={} ks_distance={} sample_mean={} sample_variance={} censored={}",
        summary.mu_limit,
        summary.sigma_sq,
        summary.ks_distance,
        summary.sample_mean,
        summary.sample_variance,
        summary.censored
    );
    out.push_str("replication,statistic\n");
    for (i, s) in summary.statistics.iter().enumerate() {
        let _ = writeln!(out, "{},{}", i + 1, s);
    }
    Ok(out)
}

/// Largest-component concentration (supercritical) or the critical tail
/// bound on the origin's component (lambda = 1).
pub fn cmd_concentration(cfg: &Config) -> Result<String, CliError> {
    cfg.check_keys(&allowed(&["n", "lambda", "reps", "window_exponent", "a"]))?;
    let (seed, threads, _) = common(cfg)?;
    let n = cfg.get_usize("n", 5000)?;
    let lambda = cfg.get_f64("lambda", 2.0)?;
    let reps = cfg.get_usize("reps", 500)?;
    let p = lambda / n as f64;
    if p > 1.0 {
        return Err(CliError::Config(format!(
            "lambda {lambda} with n {n} exceeds edge probability 1"
        )));
    }
    let mut out = cfg.echo_line("concentration");
    if lambda == 1.0 {
        // Critical tail: fraction of |C(origin)| >= A n^(2/3) against the
        // analytic bound 4 exp(-A^2 (A-4)/32) n^(-1/3).
        let a = cfg.get_f64("a", 9.0)?;
        if a <= 8.0 {
            return Err(CliError::Config(format!(
                "critical tail requires a > 8, got {a}"
            )));
        }
        let threshold = a * (n as f64).powf(2.0 / 3.0);
        let hits: u64 = map_reps(seed, reps, threads, |_, rng| {
            let g = sample_er(n, p, rng).expect("validated");
            let cs = components(&g);
            (origin_stats(&g, &cs).component_size as f64 >= threshold) as u64
        })
        .iter()
        .sum();
        let tail = hits as f64 / reps as f64;
        let bound = 4.0 * (-a * a * (a - 4.0) / 32.0).exp() * (n as f64).powf(-1.0 / 3.0);
        out.push_str("n,lambda,reps,a,threshold,empirical_tail,bound\n");
        let _ = writeln!(out, "{n},{lambda},{reps},{a},{threshold},{tail},{bound}");
        return Ok(out);
    }
    if lambda <= 1.0 {
        return Err(CliError::Config(format!(
            "concentration window requires lambda > 1 (or exactly 1 for the tail bound), got {lambda}"
        )));
    }
    let nu = cfg.get_f64("window_exponent", 0.75)?;
    let zeta = survival_prob(lambda).map_err(core_err)?;
    let window = (n as f64).powf(nu);
    let center = zeta * n as f64;
    let samples = map_reps(seed, reps, threads, |_, rng| {
        let g = sample_er(n, p, rng).expect("validated");
        components(&g).max_component_size() as f64
    });
    let within = samples
        .iter()
        .filter(|&&s| (s - center).abs() < window)
        .count() as f64
        / reps as f64;
    let mean_scaled = samples.iter().sum::<f64>() / reps as f64 / n as f64;
    out.push_str("n,lambda,reps,window_exponent,within_fraction,mean_cmax_over_n,zeta\n");
    let _ = writeln!(
        out,
        "{n},{lambda},{reps},{nu},{within},{mean_scaled},{zeta}"
    );
    Ok(out)
}

/// Conditional probability that the origin misses the giant component given
/// its degree, against the analytic limit eta^m.
pub fn cmd_conditional_giant(cfg: &Config) -> Result<String, CliError> {
    cfg.check_keys(&allowed(&["n", "lambda", "m", "reps", "min_hits"]))?;
    let (seed, threads, _) = common(cfg)?;
    let n = cfg.get_usize("n", 5000)?;
    let lambda = cfg.get_f64("lambda", 2.0)?;
    let m_list = cfg.get_usize_list("m", "1,2")?;
    let reps = cfg.get_usize("reps", 3000)?;
    let min_hits = cfg.get_usize("min_hits", 200)?;
    if lambda <= 1.0 {
        return Err(CliError::Config(format!(
            "conditional-giant requires lambda > 1, got {lambda}"
        )));
    }
    let p = lambda / n as f64;
    if p > 1.0 {
        return Err(CliError::Config(format!(
            "lambda {lambda} with n {n} exceeds edge probability 1"
        )));
    }
    let eta = extinction_prob(lambda).map_err(core_err)?;
    let samples = map_reps(seed, reps, threads, |_, rng| {
        let g = sample_er(n, p, rng).expect("validated");
        let cs = components(&g);
        let stats = origin_stats(&g, &cs);
        (stats.degree, stats.in_largest)
    });
    let mut out = cfg.echo_line("conditional-giant");
    out.push_str("n,lambda,m,hits,p_not_in_giant,eta_pow_m,std_error\n");
    for &m in &m_list {
        let hits = samples.iter().filter(|s| s.0 == m).count();
        if hits < min_hits {
            return Err(CliError::Config(format!(
                "degree {m} hit only {hits} of the required {min_hits} samples; raise reps"
            )));
        }
        let misses = samples.iter().filter(|s| s.0 == m && !s.1).count();
        let p_hat = misses as f64 / hits as f64;
        let se = (p_hat * (1.0 - p_hat) / hits as f64).sqrt();
        let reference = eta.powi(m as i32);
        let _ = writeln!(out, "{n},{lambda},{m},{hits},{p_hat},{reference},{se}");
    }
    Ok(out)
}

/// Moments of the origin's component size (raw, scaled, and degree-weighted)
/// against their analytic references, plus the two-vertex connection rate.
pub fn cmd_moments(cfg: &Config) -> Result<String, CliError> {
    cfg.check_keys(&allowed(&["n", "lambda", "k", "reps"]))?;
    let (seed, threads, _) = common(cfg)?;
    let n = cfg.get_usize("n", 8000)?;
    let lambda = cfg.get_f64("lambda", 2.0)?;
    let k_list = cfg.get_usize_list("k", "1")?;
    let reps = cfg.get_usize("reps", 2000)?;
    let p = lambda / n as f64;
    if p > 1.0 {
        return Err(CliError::Config(format!(
            "lambda {lambda} with n {n} exceeds edge probability 1"
        )));
    }
    let max_k = *k_list.iter().max().unwrap();
    if max_k == 0 || max_k > 6 {
        return Err(CliError::Config("k values must be in 1..=6".into()));
    }
    // One pass per replication: |C(1)|^k, the degree-weighted variant, and
    // whether vertex 2 shares the origin's component.
    let samples = map_reps(seed, reps, threads, |_, rng| {
        let g = sample_er(n, p, rng).expect("validated");
        let cs = components(&g);
        let stats = origin_stats(&g, &cs);
        let two_linked = cs.component_of(0) == cs.component_of(1);
        let mut powers = vec![0.0f64; max_k + 1];
        let mut value = 1.0f64;
        for slot in powers.iter_mut() {
            *slot = value;
            value *= stats.component_size as f64;
        }
        let inv_d = if stats.degree == 0 {
            0.0
        } else {
            1.0 / stats.degree as f64
        };
        (powers, inv_d, two_linked)
    });
    let reps_f = reps as f64;
    let p2_in = samples.iter().filter(|s| s.2).count() as f64 / reps_f;
    let regime = if lambda > 1.0 {
        "supercritical"
    } else if lambda == 1.0 {
        "critical"
    } else {
        "subcritical"
    };
    let mut out = cfg.echo_line("moments");
    out.push_str(
        "n,lambda,regime,k,e_c1_pow_k,e_c1_pow_k_scaled,component_reference,weighted_scaled,weighted_reference,p2_in_c1,n_times_p2\n",
    );
    for &k in &k_list {
        let raw = samples.iter().map(|s| s.0[k]).sum::<f64>() / reps_f;
        let weighted_raw = samples.iter().map(|s| s.1 * s.0[k]).sum::<f64>() / reps_f;
        let scale = (n as f64).powi(k as i32);
        let scaled = raw / scale;
        let weighted_scaled = weighted_raw / scale;
        let (component_reference, weighted_reference) = if lambda > 1.0 {
            let zeta = survival_prob(lambda).map_err(core_err)?;
            let eta = 1.0 - zeta;
            let r = r_lambda(lambda, RMethod::Series).map_err(core_err)?;
            let r_sub = r_lambda(lambda * eta, RMethod::Series).map_err(core_err)?;
            (
                zeta.powi(k as i32 + 1),
                zeta.powi(k as i32) * lambda * (r - eta * eta * r_sub),
            )
        } else if lambda < 1.0 {
            // Subcritical: the reference is an upper bound on the raw moment.
            (
                subcritical_moment_bound(lambda, k as u32).map_err(core_err)?,
                0.0,
            )
        } else {
            (f64::NAN, 0.0)
        };
        let _ = writeln!(
            out,
            "{n},{lambda},{regime},{k},{raw},{scaled},{component_reference},{weighted_scaled},{weighted_reference},{p2_in},{}",
            n as f64 * p2_in
        );
    }
    Ok(out)
}

/// Exact small-graph expectations over an (n, p) grid.
pub fn cmd_oracle(cfg: &Config) -> Result<String, CliError> {
    cfg.check_keys(&allowed(&["grid", "n", "slow"]))?;
    let n_list = cfg.get_usize_list("n", "4,5,6")?;
    let p_grid = cfg.get_grid("grid", "0.05:0.95:19")?;
    let slow = cfg.get_bool("slow", false)?;
    let mut out = cfg.echo_line("oracle");
    out.push_str(OracleReport::csv_header());
    out.push('\n');
    for &n in &n_list {
        let enumerator = if slow {
            ExactEnumerator::new_slow(n)
        } else {
            ExactEnumerator::new(n)
        }
        .map_err(core_err)?;
        for &p in &p_grid {
            let report = enumerator.report(p).map_err(core_err)?;
            out.push_str(&report.csv_row());
            out.push('\n');
        }
    }
    Ok(out)
}
