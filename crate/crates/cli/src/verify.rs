//! The `verify` subcommand: one entry point that exercises every module's
//! identities and cross-checks and emits a machine-readable JSON report.
//! All checks are seeded, so the report bytes are a pure function of the
//! configuration.

use serde::Serialize;

use ssrw_core::branching::{
    binomial_reciprocal_identity, disconnect_prob_bounds, extinction_prob, f_limit,
    inv_one_plus_binomial, inv_sq_one_plus_binomial, r_lambda, survival_prob, RMethod,
};
use ssrw_core::exec::{derive_seed, rng_from_seed};
use ssrw_core::oracle::ExactEnumerator;
use ssrw_core::process::{
    occupation_limit, run_state_process, sigma_sq, AtomMoments, Prior, PriorMode,
};
use ssrw_core::walk::{mc_expected_return, DEFAULT_STEPS_CAP};

use crate::config::{Config, DEFAULT_SEED, DEFAULT_THREADS};
use crate::CliError;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Tolerances {
    /// Exact identities (enumeration and closed forms).
    pub identity: f64,
    /// Fixed-point residual of the extinction probability.
    pub fixed_point: f64,
    /// Agreement between the series and quadrature routes.
    pub series_integral: f64,
    /// Standard-error multiplier for Monte Carlo against the oracle.
    pub se_multiplier: f64,
    /// Conservative cap on E[tau]/(n-1).
    pub uniform_bound: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckFailure {
    pub check: String,
    pub observed: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteResult {
    pub name: &'static str,
    pub checks: usize,
    pub passed: bool,
    pub failures: Vec<CheckFailure>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub threads: usize,
    pub mc_reps: usize,
    pub tolerances: Tolerances,
    pub suites: Vec<SuiteResult>,
    pub passed: bool,
}

struct Suite {
    name: &'static str,
    checks: usize,
    failures: Vec<CheckFailure>,
}

impl Suite {
    fn new(name: &'static str) -> Suite {
        Suite {
            name,
            checks: 0,
            failures: Vec::new(),
        }
    }

    /// Record a residual-style check: passes when observed <= bound
    /// (a NaN observation fails).
    fn le(&mut self, check: String, observed: f64, bound: f64) {
        self.checks += 1;
        if observed.is_nan() || observed > bound {
            self.failures.push(CheckFailure {
                check,
                observed,
                bound,
            });
        }
    }

    /// Record a predicate check with a descriptive observed value.
    fn is_true(&mut self, check: String, ok: bool, observed: f64) {
        self.checks += 1;
        if !ok {
            self.failures.push(CheckFailure {
                check,
                observed,
                bound: f64::NAN,
            });
        }
    }

    fn finish(self) -> SuiteResult {
        SuiteResult {
            name: self.name,
            checks: self.checks,
            passed: self.failures.is_empty(),
            failures: self.failures,
        }
    }
}

fn p_grid() -> Vec<f64> {
    (0..19).map(|i| 0.05 + 0.05 * i as f64).collect()
}

fn core_err(e: ssrw_core::Error) -> CliError {
    CliError::Config(e.to_string())
}

pub fn run_verify(cfg: &Config) -> Result<VerifyReport, CliError> {
    cfg.check_keys(&[
        "seed",
        "threads",
        "mc_reps",
        "tol_identity",
        "tol_fixed_point",
        "tol_series_integral",
        "se_multiplier",
        "uniform_bound",
    ])?;
    let seed = cfg.get_u64("seed", DEFAULT_SEED)?;
    let threads = cfg.get_usize("threads", DEFAULT_THREADS)?;
    let mc_reps = cfg.get_usize("mc_reps", 20_000)?;
    let tolerances = Tolerances {
        identity: cfg.get_f64("tol_identity", 1e-12)?,
        fixed_point: cfg.get_f64("tol_fixed_point", 1e-12)?,
        series_integral: cfg.get_f64("tol_series_integral", 1e-10)?,
        se_multiplier: cfg.get_f64("se_multiplier", 4.0)?,
        uniform_bound: cfg.get_f64("uniform_bound", 10.0)?,
    };
    for (name, value) in [
        ("tol_identity", tolerances.identity),
        ("tol_fixed_point", tolerances.fixed_point),
        ("tol_series_integral", tolerances.series_integral),
        ("se_multiplier", tolerances.se_multiplier),
        ("uniform_bound", tolerances.uniform_bound),
    ] {
        if value.is_nan() || value <= 0.0 {
            return Err(CliError::Config(format!(
                "{name} must be positive, got {value}"
            )));
        }
    }

    let suites = vec![
        small_graph_identities(&tolerances)?,
        binomial_inverse_moments(&tolerances)?,
        fixed_point(&tolerances)?,
        poisson_moment_routes(&tolerances)?,
        density_limit()?,
        oracle_vs_monte_carlo(&tolerances, seed, threads, mc_reps)?,
        occupation_exact_cases(&tolerances)?,
        state_process_accounting(seed)?,
    ];
    let passed = suites.iter().all(|s| s.passed);
    Ok(VerifyReport {
        seed,
        threads,
        mc_reps,
        tolerances,
        suites,
        passed,
    })
}

/// Return-time decomposition, closed-form term, and the component form of
/// the disconnected term, all against exhaustive enumeration.
fn small_graph_identities(tol: &Tolerances) -> Result<SuiteResult, CliError> {
    let mut suite = Suite::new("small_graph_identities");
    for n in [4usize, 5, 6] {
        let enumerator = ExactEnumerator::new(n).map_err(core_err)?;
        for p in p_grid() {
            let residual = enumerator.decomposition_residual(p).map_err(core_err)?;
            suite.le(format!("decomposition n={n} p={p}"), residual, tol.identity);
            let report = enumerator.report(p).map_err(core_err)?;
            let component_form = enumerator
                .disconnected_term_component_form(p)
                .map_err(core_err)?;
            suite.le(
                format!("disconnected_term_component_form n={n} p={p}"),
                (report.term_b - component_form).abs(),
                tol.identity,
            );
            let (lo, hi) = disconnect_prob_bounds(n as u64, p).map_err(core_err)?;
            suite.is_true(
                format!("disconnect_bounds n={n} p={p}"),
                lo <= report.p_2_notin_c1 + tol.identity
                    && report.p_2_notin_c1 <= hi + tol.identity,
                report.p_2_notin_c1,
            );
        }
    }
    Ok(suite.finish())
}

/// The reciprocal identity and both closed forms against direct summation.
fn binomial_inverse_moments(tol: &Tolerances) -> Result<SuiteResult, CliError> {
    let mut suite = Suite::new("binomial_inverse_moments");
    // Direct pmf summation from k = 0; exact at these sizes.
    let direct = |m: u64, p: f64, g: &dyn Fn(u64) -> f64| -> f64 {
        let q = 1.0 - p;
        let mut pmf = q.powi(m as i32);
        let mut sum = pmf * g(0);
        for k in 0..m {
            pmf *= ((m - k) as f64 * p) / ((k + 1) as f64 * q);
            sum += pmf * g(k + 1);
        }
        sum
    };
    for m in 2..=20u64 {
        for p in p_grid() {
            let (lhs, rhs) = binomial_reciprocal_identity(m, p).map_err(core_err)?;
            suite.le(
                format!("reciprocal_identity m={m} p={p}"),
                (lhs - rhs).abs(),
                tol.identity,
            );
            let closed = inv_one_plus_binomial(m, p).map_err(core_err)?;
            suite.le(
                format!("inv_one_plus_closed_form m={m} p={p}"),
                (closed - direct(m, p, &|k| 1.0 / (1 + k) as f64)).abs(),
                tol.identity,
            );
            let summed = inv_sq_one_plus_binomial(m, p).map_err(core_err)?;
            suite.le(
                format!("inv_sq_summation m={m} p={p}"),
                (summed - direct(m, p, &|k| 1.0 / ((1 + k) * (1 + k)) as f64)).abs(),
                tol.identity,
            );
        }
    }
    Ok(suite.finish())
}

/// Extinction-probability residuals and monotonicity of the survival curve.
fn fixed_point(tol: &Tolerances) -> Result<SuiteResult, CliError> {
    let mut suite = Suite::new("fixed_point");
    let mut prev_zeta = -1.0;
    for i in 0..100 {
        let lambda = 1.01 + 8.99 * i as f64 / 99.0;
        let eta = extinction_prob(lambda).map_err(core_err)?;
        let residual = (eta - (-lambda * (1.0 - eta)).exp()).abs();
        suite.le(
            format!("fixed_point_residual lambda={lambda}"),
            residual,
            tol.fixed_point,
        );
        let zeta = 1.0 - eta;
        suite.is_true(
            format!("survival_monotone lambda={lambda}"),
            zeta > prev_zeta,
            zeta,
        );
        prev_zeta = zeta;
    }
    Ok(suite.finish())
}

/// Series vs quadrature for the inverse-square Poisson moment.
fn poisson_moment_routes(tol: &Tolerances) -> Result<SuiteResult, CliError> {
    let mut suite = Suite::new("poisson_moment_routes");
    let mut prev = f64::INFINITY;
    for i in 0..100 {
        let lambda = 0.1 + 9.9 * i as f64 / 99.0;
        let series = r_lambda(lambda, RMethod::Series).map_err(core_err)?;
        let integral = r_lambda(lambda, RMethod::Integral).map_err(core_err)?;
        suite.le(
            format!("series_vs_integral lambda={lambda}"),
            (series - integral).abs(),
            tol.series_integral,
        );
        suite.is_true(format!("r_monotone lambda={lambda}"), series < prev, series);
        prev = series;
    }
    Ok(suite.finish())
}

/// The return-time limit density: zero through criticality, strictly
/// positive and above its analytic floor beyond it.
fn density_limit() -> Result<SuiteResult, CliError> {
    let mut suite = Suite::new("density_limit");
    for lambda in [0.3, 0.7, 1.0] {
        let f = f_limit(lambda).map_err(core_err)?;
        suite.is_true(format!("f_zero lambda={lambda}"), f == 0.0, f);
    }
    for i in 0..60 {
        let lambda = 1.05 + i as f64 * 0.15;
        let f = f_limit(lambda).map_err(core_err)?;
        let zeta = survival_prob(lambda).map_err(core_err)?;
        let eta = 1.0 - zeta;
        let r = r_lambda(lambda, RMethod::Series).map_err(core_err)?;
        let r_sub = r_lambda(lambda * eta, RMethod::Series).map_err(core_err)?;
        let floor = zeta * lambda * lambda * r;
        suite.is_true(
            format!("f_above_floor lambda={lambda}"),
            f >= floor && floor > 0.0,
            f - floor,
        );
        suite.is_true(
            format!("shifted_r_nonnegative lambda={lambda}"),
            lambda * (r - eta * eta * r_sub) >= 0.0,
            lambda * (r - eta * eta * r_sub),
        );
    }
    Ok(suite.finish())
}

/// Graph-level Monte Carlo against exhaustive enumeration, plus the uniform
/// bound on the scaled return time.
fn oracle_vs_monte_carlo(
    tol: &Tolerances,
    seed: u64,
    threads: usize,
    mc_reps: usize,
) -> Result<SuiteResult, CliError> {
    let mut suite = Suite::new("oracle_vs_monte_carlo");
    for n in 2..=6usize {
        let enumerator = ExactEnumerator::new(n).map_err(core_err)?;
        for (j, &p) in [0.1, 0.5, 0.9].iter().enumerate() {
            let exact = enumerator.report(p).map_err(core_err)?.exact_e_tau;
            let cell = derive_seed(seed, (n * 10 + j) as u64);
            let est = mc_expected_return(n, p, mc_reps, cell, threads).map_err(core_err)?;
            suite.le(
                format!("oracle_vs_mc n={n} p={p}"),
                (est.mean - exact).abs(),
                tol.se_multiplier * est.std_error,
            );
            suite.le(
                format!("uniform_bound n={n} p={p}"),
                est.mean / (n as f64 - 1.0).max(1.0),
                tol.uniform_bound,
            );
        }
    }
    Ok(suite.finish())
}

/// Closed-form two-vertex cases: E_{2,p}[tau] = 1 + p, the 2/3 : 1/3
/// occupation split, and sigma^2 = 8/27.
fn occupation_exact_cases(tol: &Tolerances) -> Result<SuiteResult, CliError> {
    let mut suite = Suite::new("occupation_exact_cases");
    let enumerator = ExactEnumerator::new(2).map_err(core_err)?;
    for p in p_grid() {
        let report = enumerator.report(p).map_err(core_err)?;
        suite.le(
            format!("two_vertex_mean p={p}"),
            (report.exact_e_tau - (1.0 + p)).abs(),
            tol.identity,
        );
        suite.le(
            format!("two_vertex_second_moment p={p}"),
            (report.e_tau_sq - (1.0 + 3.0 * p)).abs(),
            tol.identity,
        );
    }
    let prior = Prior::from_atoms(PriorMode::Dense, &[(1.0, 0.5), (0.0, 0.5)]).map_err(core_err)?;
    let masses = occupation_limit(&prior, &[2.0, 1.0]).map_err(core_err)?;
    suite.le(
        "occupation_limit_two_thirds".into(),
        (masses[0] - 2.0 / 3.0).abs(),
        1e-15,
    );
    let moments = [
        AtomMoments {
            e_tau: 2.0,
            e_tau_sq: 4.0,
        },
        AtomMoments {
            e_tau: 1.0,
            e_tau_sq: 1.0,
        },
    ];
    let variance = sigma_sq(&prior, &moments, &[0]).map_err(core_err)?;
    suite.le(
        "sigma_sq_eight_twenty_sevenths".into(),
        (variance - 8.0 / 27.0).abs(),
        1e-15,
    );
    Ok(suite.finish())
}

/// Seeded state-process runs: exact time accounting, unit mass, and
/// same-seed reproducibility.
fn state_process_accounting(seed: u64) -> Result<SuiteResult, CliError> {
    let mut suite = Suite::new("state_process_accounting");
    let prior = Prior::from_atoms(PriorMode::Dense, &[(0.9, 0.5), (0.2, 0.3), (0.0, 0.2)])
        .map_err(core_err)?;
    for i in 0..5u64 {
        let run_seed = derive_seed(seed, 0x57A7E + i);
        let mut rng = rng_from_seed(run_seed);
        let horizon = 1000 + 173 * i;
        let (trace, hist) =
            run_state_process(6, &prior, horizon, &mut rng, DEFAULT_STEPS_CAP).map_err(core_err)?;
        let completed: u64 = trace
            .excursions
            .iter()
            .take(trace.switch_count)
            .map(|e| e.tau)
            .sum();
        suite.is_true(
            format!("time_accounting run={i}"),
            completed + trace.partial_steps == horizon,
            (completed + trace.partial_steps) as f64,
        );
        let mass_sum: f64 = hist.masses.iter().sum();
        suite.le(format!("unit_mass run={i}"), (mass_sum - 1.0).abs(), 1e-12);
        let mut rng2 = rng_from_seed(run_seed);
        let (_, hist2) = run_state_process(6, &prior, horizon, &mut rng2, DEFAULT_STEPS_CAP)
            .map_err(core_err)?;
        suite.is_true(
            format!("same_seed_reproducible run={i}"),
            hist.masses == hist2.masses,
            0.0,
        );
    }
    Ok(suite.finish())
}

/// Render the report as pretty JSON with a trailing newline.
pub fn report_json(report: &VerifyReport) -> String {
    let mut text = serde_json::to_string_pretty(report).expect("report serializes");
    text.push('\n');
    text
}
