//! Experiment-level checks driven through the command layer: trends and
//! reference values that go beyond single-call unit tests.

use ssrw_cli::commands::{cmd_concentration, cmd_conditional_giant, cmd_dense};
use ssrw_cli::config::Config;

use ssrw_core::branching::extinction_prob;
use ssrw_core::process::{occupation_limit, Prior, PriorMode};
use ssrw_core::walk::mc_expected_return;

fn data_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

#[test]
fn dense_ratio_error_shrinks_with_n() {
    let mut cfg = Config::empty();
    cfg.set("n", "50,200,800".into());
    cfg.set("grid", "0.3".into());
    cfg.set("reps", "10000".into());
    cfg.set("seed", "1401".into());
    cfg.set("threads", "4".into());
    let rows = data_rows(&cmd_dense(&cfg).unwrap());
    let errors: Vec<f64> = rows
        .iter()
        .map(|r| (r[4].parse::<f64>().unwrap() - 1.0).abs())
        .collect();
    assert_eq!(errors.len(), 3);
    assert!(
        errors[0] > errors[1] && errors[1] > errors[2],
        "|ratio - 1| not decreasing: {errors:?}"
    );
}

#[test]
fn giant_component_concentration_fraction_is_high() {
    let mut cfg = Config::empty();
    cfg.set("n", "5000".into());
    cfg.set("lambda", "2".into());
    cfg.set("reps", "500".into());
    cfg.set("seed", "1402".into());
    cfg.set("threads", "4".into());
    let rows = data_rows(&cmd_concentration(&cfg).unwrap());
    let within: f64 = rows[0][4].parse().unwrap();
    assert!(within >= 0.95, "within-window fraction {within}");
    let mean_scaled: f64 = rows[0][5].parse().unwrap();
    let zeta: f64 = rows[0][6].parse().unwrap();
    assert!((mean_scaled - zeta).abs() <= 0.02);
}

#[test]
fn concentration_failure_fraction_is_monotone_in_n() {
    // The window |Cmax - zeta n| < n^0.75 widens faster than the
    // fluctuations grow, so the fraction of runs escaping it cannot
    // increase with n.
    let mut failures = Vec::new();
    for n in ["2000", "5000", "10000"] {
        let mut cfg = Config::empty();
        cfg.set("n", n.into());
        cfg.set("lambda", "2".into());
        cfg.set("reps", "500".into());
        cfg.set("seed", "1405".into());
        cfg.set("threads", "4".into());
        let rows = data_rows(&cmd_concentration(&cfg).unwrap());
        failures.push(1.0 - rows[0][4].parse::<f64>().unwrap());
    }
    assert!(
        failures[0] >= failures[1] && failures[1] >= failures[2],
        "failure fractions increased with n: {failures:?}"
    );
}

#[test]
fn conditional_giant_matches_eta_powers_including_cubed() {
    let mut cfg = Config::empty();
    cfg.set("n", "5000".into());
    cfg.set("lambda", "2".into());
    cfg.set("m", "1,3".into());
    cfg.set("reps", "12000".into());
    cfg.set("seed", "1403".into());
    cfg.set("threads", "4".into());
    let rows = data_rows(&cmd_conditional_giant(&cfg).unwrap());
    let eta = extinction_prob(2.0).unwrap();
    for row in rows {
        let m: i32 = row[2].parse().unwrap();
        let p_hat: f64 = row[4].parse().unwrap();
        let se: f64 = row[6].parse().unwrap();
        let reference = eta.powi(m);
        assert!(
            (p_hat - reference).abs() <= 0.03,
            "m={m}: {p_hat} vs {reference} (se {se})"
        );
    }
}

#[test]
fn plug_in_occupation_limit_is_flat_in_the_dense_regime() {
    // Two dense atoms at n = 500: expected return times are nearly equal,
    // so the limit masses sit within 0.02 of one half each.
    let prior = Prior::from_atoms(PriorMode::Dense, &[(0.3, 0.5), (0.7, 0.5)]).unwrap();
    let means: Vec<f64> = [0.3, 0.7]
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            mc_expected_return(500, p, 2000, 1404 + i as u64, 4)
                .unwrap()
                .mean
        })
        .collect();
    let masses = occupation_limit(&prior, &means).unwrap();
    assert!((masses[0] - 0.5).abs() <= 0.02, "masses {masses:?}");
    assert!((masses[1] - 0.5).abs() <= 0.02);
}
