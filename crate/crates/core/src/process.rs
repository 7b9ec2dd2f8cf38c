//! The self-switching state process: at every return of the walk to the
//! origin a fresh parameter is drawn from the prior, a fresh graph is
//! sampled, and the next excursion begins. The state process carries the
//! current parameter at every time step; its empirical occupation measure is
//! the fraction of steps spent on each atom.

use rand::Rng;

use crate::error::{Error, Result};
use crate::exec::map_reps;
use crate::graph::sample_er;
use crate::stats::{ks_distance_to_standard_normal, sample_mean_variance};
use crate::walk::simulate_return;

/// Maximum number of bins a continuous prior may be discretized into.
pub const MAX_PRIOR_BINS: usize = 10_000;

/// How atom parameters map to edge probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PriorMode {
    /// theta is the edge probability itself.
    Dense,
    /// theta is a branching parameter lambda; the edge probability is
    /// lambda / n.
    Sparse,
}

/// One weighted parameter value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub theta: f64,
    pub weight: f64,
}

/// A finitely supported prior over parameters. Continuous densities are
/// discretized to midpoint atoms at construction; weights are normalized to
/// sum to one.
#[derive(Debug, Clone)]
pub struct Prior {
    mode: PriorMode,
    atoms: Vec<Atom>,
    cumulative: Vec<f64>,
}

impl Prior {
    pub fn from_atoms(mode: PriorMode, atoms: &[(f64, f64)]) -> Result<Prior> {
        if atoms.is_empty() {
            return Err(Error::InvalidPrior("no atoms".into()));
        }
        let mut total = 0.0;
        for &(theta, weight) in atoms {
            if !weight.is_finite() || weight < 0.0 {
                return Err(Error::InvalidPrior(format!("bad weight {weight}")));
            }
            match mode {
                // Dense atoms may include p = 0; the walk then returns in one
                // step by the isolated-origin convention.
                PriorMode::Dense if !(0.0..=1.0).contains(&theta) => {
                    return Err(Error::InvalidPrior(format!(
                        "dense atom {theta} outside [0, 1]"
                    )));
                }
                PriorMode::Sparse if theta.is_nan() || theta <= 0.0 => {
                    return Err(Error::InvalidPrior(format!(
                        "sparse atom {theta} must be positive"
                    )));
                }
                _ => {}
            }
            total += weight;
        }
        if total.is_nan() || total <= 0.0 {
            return Err(Error::InvalidPrior("weights sum to zero".into()));
        }
        let atoms: Vec<Atom> = atoms
            .iter()
            .map(|&(theta, weight)| Atom {
                theta,
                weight: weight / total,
            })
            .collect();
        let mut cumulative = Vec::with_capacity(atoms.len());
        let mut acc = 0.0;
        for a in &atoms {
            acc += a.weight;
            cumulative.push(acc);
        }
        *cumulative.last_mut().unwrap() = 1.0;
        Ok(Prior {
            mode,
            atoms,
            cumulative,
        })
    }

    /// Discretize a binned density on [lo, hi] into midpoint atoms, one per
    /// bin weight.
    pub fn from_binned_density(
        mode: PriorMode,
        lo: f64,
        hi: f64,
        bin_weights: &[f64],
    ) -> Result<Prior> {
        if bin_weights.is_empty() || bin_weights.len() > MAX_PRIOR_BINS {
            return Err(Error::InvalidPrior(format!(
                "bin count must be in 1..={MAX_PRIOR_BINS}"
            )));
        }
        if hi.is_nan() || lo.is_nan() || hi <= lo {
            return Err(Error::InvalidPrior(format!("bad interval [{lo}, {hi}]")));
        }
        let width = (hi - lo) / bin_weights.len() as f64;
        let atoms: Vec<(f64, f64)> = bin_weights
            .iter()
            .enumerate()
            .map(|(i, &w)| (lo + (i as f64 + 0.5) * width, w))
            .collect();
        Prior::from_atoms(mode, &atoms)
    }

    pub fn mode(&self) -> PriorMode {
        self.mode
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Edge probability of an atom for graph size n (the mode's g_n map).
    pub fn edge_probability(&self, atom: usize, n: usize) -> Result<f64> {
        let theta = self.atoms[atom].theta;
        match self.mode {
            PriorMode::Dense => Ok(theta),
            PriorMode::Sparse => {
                let p = theta / n as f64;
                if p > 1.0 {
                    Err(Error::SparseParameterTooLarge { lambda: theta, n })
                } else {
                    Ok(p)
                }
            }
        }
    }

    /// Check every atom maps to a valid edge probability for this n.
    pub fn validate_for(&self, n: usize) -> Result<()> {
        for atom in 0..self.len() {
            self.edge_probability(atom, n)?;
        }
        Ok(())
    }

    /// Inverse-CDF draw of an atom index.
    pub fn sample_atom<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        self.cumulative
            .partition_point(|&c| c < u)
            .min(self.len() - 1)
    }
}

/// One excursion of the state process.
#[derive(Debug, Clone, Copy)]
pub struct Excursion {
    pub atom: usize,
    pub theta: f64,
    pub tau: u64,
    pub censored: bool,
}

/// The excursion record of one state-process run up to the horizon.
#[derive(Debug, Clone)]
pub struct StateTrace {
    /// Every excursion started, including the one cut by the horizon.
    pub excursions: Vec<Excursion>,
    /// Equals the requested horizon: completed excursion time plus the
    /// partial contribution of the final excursion.
    pub total_time: u64,
    /// Number of excursions that finished at or before the horizon.
    pub switch_count: usize,
    /// Steps the final excursion contributed when it straddles the horizon.
    pub partial_steps: u64,
    pub censored_count: usize,
}

impl StateTrace {
    /// CSV export: `excursion_index,theta,tau` with 1-based indices.
    pub fn csv(&self) -> String {
        let mut out = String::from("excursion_index,theta,tau\n");
        for (i, e) in self.excursions.iter().enumerate() {
            out.push_str(&format!("{},{},{}\n", i + 1, e.theta, e.tau));
        }
        out
    }
}

/// Per-atom fraction of time steps in `1..=total_time`.
#[derive(Debug, Clone)]
pub struct OccupationHistogram {
    pub masses: Vec<f64>,
    pub total_time: u64,
}

impl OccupationHistogram {
    /// CSV export: `theta_or_bin,mass`.
    pub fn csv(&self, prior: &Prior) -> String {
        let mut out = String::from("theta_or_bin,mass\n");
        for (atom, mass) in self.masses.iter().enumerate() {
            out.push_str(&format!("{},{}\n", prior.atoms()[atom].theta, mass));
        }
        out
    }
}

/// Run the state process for `horizon` time steps.
///
/// The final excursion contributes only its overlap with `[1, horizon]`,
/// exactly as the time-indexed occupation measure is defined; a censored
/// walk is flagged in the trace and its capped length used as the excursion
/// length.
pub fn run_state_process<R: Rng + ?Sized>(
    n: usize,
    prior: &Prior,
    horizon: u64,
    rng: &mut R,
    steps_cap: u64,
) -> Result<(StateTrace, OccupationHistogram)> {
    if horizon < 1 {
        return Err(Error::InvalidArgument("horizon must be at least 1".into()));
    }
    prior.validate_for(n)?;
    let mut counts = vec![0u64; prior.len()];
    let mut excursions = Vec::new();
    let mut elapsed = 0u64;
    let mut switch_count = 0usize;
    let mut partial_steps = 0u64;
    let mut censored_count = 0usize;
    while elapsed < horizon {
        let atom = prior.sample_atom(rng);
        let p = prior.edge_probability(atom, n)?;
        let g = sample_er(n, p, rng)?;
        let sample = simulate_return(&g, rng, steps_cap);
        censored_count += sample.censored as usize;
        excursions.push(Excursion {
            atom,
            theta: prior.atoms()[atom].theta,
            tau: sample.tau,
            censored: sample.censored,
        });
        let remaining = horizon - elapsed;
        if sample.tau <= remaining {
            switch_count += 1;
            counts[atom] += sample.tau;
            elapsed += sample.tau;
        } else {
            partial_steps = remaining;
            counts[atom] += remaining;
            elapsed = horizon;
        }
    }
    let masses = counts.iter().map(|&c| c as f64 / horizon as f64).collect();
    Ok((
        StateTrace {
            excursions,
            total_time: horizon,
            switch_count,
            partial_steps,
            censored_count,
        },
        OccupationHistogram {
            masses,
            total_time: horizon,
        },
    ))
}

/// Per-atom moments of the return time, exact or estimated.
#[derive(Debug, Clone, Copy)]
pub struct AtomMoments {
    pub e_tau: f64,
    pub e_tau_sq: f64,
}

/// The long-run occupation masses: prior weights reweighted by the expected
/// return time of each atom. `tau_means[i]` supplies E[tau] for atom i.
pub fn occupation_limit(prior: &Prior, tau_means: &[f64]) -> Result<Vec<f64>> {
    if tau_means.len() != prior.len() {
        return Err(Error::InvalidArgument(
            "tau_means length does not match prior".into(),
        ));
    }
    let weighted: Vec<f64> = prior
        .atoms()
        .iter()
        .zip(tau_means)
        .map(|(a, &m)| a.weight * m)
        .collect();
    let total: f64 = weighted.iter().sum();
    // tau >= 1 always, so any valid estimator keeps the denominator positive.
    if total.is_nan() || total <= 0.0 {
        return Err(Error::InvalidArgument(
            "nonpositive mean return times".into(),
        ));
    }
    Ok(weighted.into_iter().map(|w| w / total).collect())
}

/// Asymptotic variance of the occupation fluctuation for a target set of
/// atom indices:
/// sigma^2 = sum_i w_i (1_A(i) - mu_A)^2 E_i[tau^2] / sum_i w_i E_i[tau].
pub fn sigma_sq(prior: &Prior, moments: &[AtomMoments], target: &[usize]) -> Result<f64> {
    if moments.len() != prior.len() {
        return Err(Error::InvalidArgument(
            "moments length does not match prior".into(),
        ));
    }
    for &t in target {
        if t >= prior.len() {
            return Err(Error::InvalidArgument(format!(
                "target atom {t} out of range"
            )));
        }
    }
    let means: Vec<f64> = moments.iter().map(|m| m.e_tau).collect();
    let limit = occupation_limit(prior, &means)?;
    let mu_a: f64 = target.iter().map(|&i| limit[i]).sum();
    let denominator: f64 = prior
        .atoms()
        .iter()
        .zip(&means)
        .map(|(a, &m)| a.weight * m)
        .sum();
    let numerator: f64 = prior
        .atoms()
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let indicator = if target.contains(&i) { 1.0 } else { 0.0 };
            a.weight * (indicator - mu_a) * (indicator - mu_a) * moments[i].e_tau_sq
        })
        .sum();
    Ok(numerator / denominator)
}

/// Result of the fluctuation experiment.
#[derive(Debug, Clone)]
pub struct CltSummary {
    /// One standardized statistic per replication:
    /// sqrt(T) (mu_T(A) - mu_inf(A)) / sigma.
    pub statistics: Vec<f64>,
    pub ks_distance: f64,
    pub sample_mean: f64,
    pub sample_variance: f64,
    pub mu_limit: f64,
    pub sigma_sq: f64,
    pub censored: u64,
}

/// Run independent state processes, standardize the target-set occupation
/// error by the asymptotic sigma, and summarize normality by the KS distance
/// to the standard normal.
#[allow(clippy::too_many_arguments)]
pub fn clt_experiment(
    n: usize,
    prior: &Prior,
    target: &[usize],
    horizon: u64,
    replications: usize,
    moments: &[AtomMoments],
    seed: u64,
    threads: usize,
    steps_cap: u64,
) -> Result<CltSummary> {
    if replications < 100 {
        return Err(Error::InvalidArgument(format!(
            "need at least 100 replications, got {replications}"
        )));
    }
    prior.validate_for(n)?;
    let variance = sigma_sq(prior, moments, target)?;
    if variance.is_nan() || variance <= 0.0 {
        return Err(Error::DegenerateVariance);
    }
    let means: Vec<f64> = moments.iter().map(|m| m.e_tau).collect();
    let limit = occupation_limit(prior, &means)?;
    let mu_a: f64 = target.iter().map(|&i| limit[i]).sum();
    let sigma = variance.sqrt();
    let sqrt_t = (horizon as f64).sqrt();
    let runs = map_reps(seed, replications, threads, |_, rng| {
        let (trace, hist) =
            run_state_process(n, prior, horizon, rng, steps_cap).expect("validated parameters");
        let mass_a: f64 = target.iter().map(|&i| hist.masses[i]).sum();
        (
            sqrt_t * (mass_a - mu_a) / sigma,
            trace.censored_count as u64,
        )
    });
    let statistics: Vec<f64> = runs.iter().map(|r| r.0).collect();
    let censored = runs.iter().map(|r| r.1).sum();
    let (sample_mean, sample_variance) = sample_mean_variance(&statistics);
    let ks_distance = ks_distance_to_standard_normal(&statistics);
    Ok(CltSummary {
        statistics,
        ks_distance,
        sample_mean,
        sample_variance,
        mu_limit: mu_a,
        sigma_sq: variance,
        censored,
    })
}
