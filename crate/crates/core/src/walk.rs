//! First return times of the simple symmetric random walk started at the
//! origin vertex, plus Monte Carlo estimators over fresh G(n, p) graphs.

use rand::Rng;

use crate::error::Result;
use crate::exec::map_reps;
use crate::graph::{sample_er, Graph};

/// Default per-excursion step cap. Return-time tails on finite connected
/// graphs decay exponentially, so this never binds at desk scale; censoring
/// is reported, not silently dropped.
pub const DEFAULT_STEPS_CAP: u64 = 10_000_000;

/// One simulated excursion from the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReturnSample {
    /// Steps until the walk is back at the origin (1 if the origin is
    /// isolated, by convention).
    pub tau: u64,
    /// True when the cap was hit before returning; then `tau == steps_cap`.
    pub censored: bool,
    pub steps_cap: u64,
}

/// Walk from the origin until the first return, or until `steps_cap` steps.
pub fn simulate_return<R: Rng + ?Sized>(g: &Graph, rng: &mut R, steps_cap: u64) -> ReturnSample {
    debug_assert!(steps_cap >= 1);
    if g.degree(0) == 0 {
        return ReturnSample {
            tau: 1,
            censored: false,
            steps_cap,
        };
    }
    let mut current = 0usize;
    for step in 1..=steps_cap {
        let nbrs = g.neighbors(current);
        current = nbrs[rng.random_range(0..nbrs.len())] as usize;
        if current == 0 {
            return ReturnSample {
                tau: step,
                censored: false,
                steps_cap,
            };
        }
    }
    ReturnSample {
        tau: steps_cap,
        censored: true,
        steps_cap,
    }
}

/// Expected return time to the origin on a fixed graph:
/// `2 |E(C(origin))| / d(origin)` when the origin has a neighbor, else 1.
///
/// Only the origin's component is traversed, so this is O(|C| + edges in C).
pub fn exact_expected_return(g: &Graph) -> f64 {
    let d0 = g.degree(0);
    if d0 == 0 {
        return 1.0;
    }
    let mut seen = vec![false; g.vertex_count()];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut degree_sum = 0usize;
    while let Some(v) = stack.pop() {
        degree_sum += g.degree(v);
        for &w in g.neighbors(v) {
            if !seen[w as usize] {
                seen[w as usize] = true;
                stack.push(w as usize);
            }
        }
    }
    // degree_sum equals twice the component's internal edge count.
    degree_sum as f64 / d0 as f64
}

/// Graph-level Monte Carlo estimate of the expected return time.
#[derive(Debug, Clone, Copy)]
pub struct McReturnEstimate {
    /// Mean of the per-graph expected return times.
    pub mean: f64,
    /// Second moment of the per-graph expected return times (not the second
    /// moment of tau itself; see `estimate_tau_moments` for that).
    pub second_moment: f64,
    /// Sample standard deviation divided by sqrt(reps).
    pub std_error: f64,
    pub reps: usize,
}

/// Average the exact per-graph formula over `reps` fresh G(n, p) samples.
/// Using the exact formula removes all walk-level variance from the outer
/// expectation.
pub fn mc_expected_return(
    n: usize,
    p: f64,
    reps: usize,
    seed: u64,
    threads: usize,
) -> Result<McReturnEstimate> {
    // Fail fast on bad parameters before fanning out.
    sample_er(n, p, &mut crate::exec::rng_from_seed(seed))?;
    let values = map_reps(seed, reps, threads, |_, rng| {
        let g = sample_er(n, p, rng).expect("parameters validated");
        exact_expected_return(&g)
    });
    let reps_f = reps as f64;
    let mean = values.iter().sum::<f64>() / reps_f;
    let second_moment = values.iter().map(|v| v * v).sum::<f64>() / reps_f;
    let std_error = if reps > 1 {
        let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
        (ss / (reps_f - 1.0)).sqrt() / reps_f.sqrt()
    } else {
        0.0
    };
    Ok(McReturnEstimate {
        mean,
        second_moment,
        std_error,
        reps,
    })
}

/// Moments of tau under the joint (graph, walk) law, by nested simulation.
#[derive(Debug, Clone, Copy)]
pub struct TauMomentEstimate {
    pub e_tau: f64,
    pub e_tau_sq: f64,
    /// Standard errors across graph-level cluster means.
    pub se_tau: f64,
    pub se_tau_sq: f64,
    pub censored: u64,
}

/// Simulate `walks_per_graph` excursions on each of `reps_graphs` fresh
/// graphs. With an equal number of walks per graph the grand means are
/// unbiased for E[tau] and E[tau^2]; standard errors come from the
/// per-graph cluster means since walks sharing a graph are correlated.
pub fn estimate_tau_moments(
    n: usize,
    p: f64,
    reps_graphs: usize,
    walks_per_graph: usize,
    seed: u64,
    threads: usize,
    steps_cap: u64,
) -> Result<TauMomentEstimate> {
    sample_er(n, p, &mut crate::exec::rng_from_seed(seed))?;
    let per_graph = map_reps(seed, reps_graphs, threads, |_, rng| {
        let g = sample_er(n, p, rng).expect("parameters validated");
        let mut sum = 0.0f64;
        let mut sum_sq = 0.0f64;
        let mut censored = 0u64;
        for _ in 0..walks_per_graph {
            let s = simulate_return(&g, rng, steps_cap);
            let t = s.tau as f64;
            sum += t;
            sum_sq += t * t;
            censored += s.censored as u64;
        }
        let w = walks_per_graph as f64;
        (sum / w, sum_sq / w, censored)
    });
    let g = reps_graphs as f64;
    let e_tau = per_graph.iter().map(|r| r.0).sum::<f64>() / g;
    let e_tau_sq = per_graph.iter().map(|r| r.1).sum::<f64>() / g;
    let censored = per_graph.iter().map(|r| r.2).sum();
    let cluster_se = |pick: fn(&(f64, f64, u64)) -> f64, center: f64| {
        if reps_graphs > 1 {
            let ss: f64 = per_graph
                .iter()
                .map(|r| (pick(r) - center) * (pick(r) - center))
                .sum();
            (ss / (g - 1.0)).sqrt() / g.sqrt()
        } else {
            0.0
        }
    };
    Ok(TauMomentEstimate {
        e_tau,
        e_tau_sq,
        se_tau: cluster_se(|r| r.0, e_tau),
        se_tau_sq: cluster_se(|r| r.1, e_tau_sq),
        censored,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::rng_from_seed;
    use crate::graph::Graph;

    fn complete(n: usize) -> Graph {
        let mut edges = Vec::new();
        for u in 0..n as u32 {
            for v in (u + 1)..n as u32 {
                edges.push((u, v));
            }
        }
        Graph::from_edges(n, &edges).unwrap()
    }

    #[test]
    fn single_edge_returns_in_two_steps() {
        let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let mut rng = rng_from_seed(5);
        for _ in 0..100 {
            let s = simulate_return(&g, &mut rng, DEFAULT_STEPS_CAP);
            assert_eq!(s.tau, 2);
            assert!(!s.censored);
        }
        assert_eq!(exact_expected_return(&g), 2.0);
    }

    #[test]
    fn isolated_origin_returns_immediately() {
        let g = Graph::from_edges(3, &[(1, 2)]).unwrap();
        let s = simulate_return(&g, &mut rng_from_seed(0), DEFAULT_STEPS_CAP);
        assert_eq!((s.tau, s.censored), (1, false));
        assert_eq!(exact_expected_return(&g), 1.0);
    }

    #[test]
    fn censoring_reports_cap() {
        // Path 0-1-2 with cap 1: the first step always leaves the origin.
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let s = simulate_return(&g, &mut rng_from_seed(0), 1);
        assert!(s.censored);
        assert_eq!(s.tau, 1);
    }

    #[test]
    fn triangle_mean_matches_formula() {
        let g = complete(3);
        assert_eq!(exact_expected_return(&g), 3.0);
        let mut rng = rng_from_seed(2);
        let reps = 100_000usize;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..reps {
            let t = simulate_return(&g, &mut rng, DEFAULT_STEPS_CAP).tau as f64;
            sum += t;
            sum_sq += t * t;
        }
        let mean = sum / reps as f64;
        let sd = ((sum_sq / reps as f64 - mean * mean).max(0.0)).sqrt();
        let se = sd / (reps as f64).sqrt();
        assert!((mean - 3.0).abs() <= 4.0 * se, "mean {mean} se {se}");
    }

    #[test]
    fn exact_expected_return_examples() {
        for n in [2usize, 5, 9] {
            assert_eq!(exact_expected_return(&complete(n)), n as f64);
        }
        let path = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(exact_expected_return(&path), 4.0);
    }

    #[test]
    fn relabeling_tail_vertices_preserves_expected_return() {
        // Swap labels 1 and 3 in a 4-vertex graph; the formula only sees the
        // origin's component structure.
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let h = Graph::from_edges(4, &[(0, 3), (3, 2), (2, 1)]).unwrap();
        assert_eq!(exact_expected_return(&g), exact_expected_return(&h));
    }

    #[test]
    fn mc_expected_return_small_cases() {
        // E_{2,p}[tau] = 1 + p by enumeration over the two graphs.
        let est = mc_expected_return(2, 0.5, 100_000, 7, 1).unwrap();
        assert!(
            (est.mean - 1.5).abs() <= 4.0 * est.std_error,
            "mean {} se {}",
            est.mean,
            est.std_error
        );

        // p = 1: every realization is complete, so the estimate is exact.
        let est = mc_expected_return(5, 1.0, 128, 7, 1).unwrap();
        assert_eq!(est.mean, 5.0);
        assert_eq!(est.std_error, 0.0);

        // E_{3,1/2}[tau] = 19/8 by enumeration over the eight graphs.
        let est = mc_expected_return(3, 0.5, 100_000, 8, 1).unwrap();
        assert!((est.mean - 2.375).abs() <= 4.0 * est.std_error);
    }

    #[test]
    fn mc_expected_return_is_thread_count_invariant() {
        let a = mc_expected_return(30, 0.2, 512, 13, 1).unwrap();
        let b = mc_expected_return(30, 0.2, 512, 13, 4).unwrap();
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
    }

    #[test]
    fn tau_moments_deterministic_cases() {
        let m = estimate_tau_moments(2, 1.0, 200, 5, 3, 1, DEFAULT_STEPS_CAP).unwrap();
        assert_eq!((m.e_tau, m.e_tau_sq, m.censored), (2.0, 4.0, 0));
        let m = estimate_tau_moments(2, 0.0, 200, 5, 3, 1, DEFAULT_STEPS_CAP).unwrap();
        assert_eq!((m.e_tau, m.e_tau_sq), (1.0, 1.0));
    }

    #[test]
    fn tau_moments_match_two_point_law() {
        // For n = 2: tau is 2 with probability p, else 1, so
        // E[tau] = 1 + p and E[tau^2] = 1 + 3p.
        let m = estimate_tau_moments(2, 0.5, 20_000, 5, 11, 1, DEFAULT_STEPS_CAP).unwrap();
        assert!((m.e_tau - 1.5).abs() <= 4.0 * m.se_tau);
        assert!((m.e_tau_sq - 2.5).abs() <= 4.0 * m.se_tau_sq);
        assert_eq!(m.censored, 0);
    }

    #[test]
    fn sampled_graphs_agree_with_formula_within_five_se() {
        for seed in [21u64, 22, 23] {
            let g = sample_er(12, 0.3, &mut rng_from_seed(seed)).unwrap();
            let exact = exact_expected_return(&g);
            let mut rng = rng_from_seed(seed ^ 0xabcd);
            let reps = 10_000usize;
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            for _ in 0..reps {
                let t = simulate_return(&g, &mut rng, DEFAULT_STEPS_CAP).tau as f64;
                sum += t;
                sum_sq += t * t;
            }
            let mean = sum / reps as f64;
            let sd = ((sum_sq / reps as f64 - mean * mean).max(0.0)).sqrt();
            let se = sd / (reps as f64).sqrt();
            assert!(
                (mean - exact).abs() <= 5.0 * se,
                "seed {seed}: mean {mean}, exact {exact}, se {se}"
            );
        }
    }
}
