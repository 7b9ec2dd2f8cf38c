//! Exhaustive ground truth for tiny graphs: iterate every edge configuration
//! on n vertices, weight each by p^e (1-p)^(E-e), and accumulate exact
//! expectations of everything the larger experiments estimate.
//!
//! Per-configuration quantities are p-independent and computed once, so one
//! enumerator serves a whole grid of p values. The return-time mean comes
//! from the stationary formula; its second moment from the first-step
//! hitting-time systems, an independent route that doubles as a consistency
//! check on the formula.

use crate::branching::expected_degree_ratio;
use crate::error::{Error, Result};

/// Largest n the default constructor accepts (2^15 configurations).
pub const MAX_EXACT_N: usize = 6;
/// Ceiling for the explicit slow path (2^21 configurations).
pub const MAX_SLOW_N: usize = 7;

/// Exact expectations for one (n, p).
#[derive(Debug, Clone, Copy)]
pub struct OracleReport {
    pub n: usize,
    pub p: f64,
    pub exact_e_tau: f64,
    pub e_tau_sq: f64,
    /// E[d(2) 1_{d(1) >= 1} / d(1)].
    pub term_a: f64,
    /// E[1_{2 not in C(1)} d(2) 1_{d(1) >= 1} / d(1)].
    pub term_b: f64,
    pub p_2_notin_c1: f64,
    pub e_c1: f64,
    pub e_c1_sq: f64,
    pub e_c1_cube: f64,
}

impl OracleReport {
    pub fn csv_header() -> &'static str {
        "n,p,exact_e_tau,e_tau_sq,term_a,term_b,p_2_notin_c1,e_c1,e_c1_sq,e_c1_cube"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.n,
            self.p,
            self.exact_e_tau,
            self.e_tau_sq,
            self.term_a,
            self.term_b,
            self.p_2_notin_c1,
            self.e_c1,
            self.e_c1_sq,
            self.e_c1_cube
        )
    }
}

#[derive(Debug, Clone, Copy)]
struct ConfigStats {
    present_edges: u32,
    e_tau: f64,
    e_tau_sq: f64,
    d2: u32,
    /// 1/d(1) with the zero-degree convention.
    inv_d1: f64,
    c1_size: u32,
    two_in_c1: bool,
}

/// Precomputed per-configuration statistics for all graphs on n vertices.
#[derive(Debug, Clone)]
pub struct ExactEnumerator {
    n: usize,
    pair_count: usize,
    configs: Vec<ConfigStats>,
}

impl ExactEnumerator {
    pub fn new(n: usize) -> Result<ExactEnumerator> {
        Self::with_limit(n, MAX_EXACT_N)
    }

    /// Accepts n = 7 as well; two million configurations, noticeably slower.
    pub fn new_slow(n: usize) -> Result<ExactEnumerator> {
        Self::with_limit(n, MAX_SLOW_N)
    }

    fn with_limit(n: usize, max: usize) -> Result<ExactEnumerator> {
        if n < 2 {
            return Err(Error::VertexCount { min: 2, got: n });
        }
        if n > max {
            return Err(Error::EnumerationTooLarge { n, max });
        }
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| ((u + 1)..n).map(move |v| (u, v)))
            .collect();
        let configs = (0u32..1 << pairs.len())
            .map(|mask| config_stats(n, mask, &pairs))
            .collect();
        Ok(ExactEnumerator {
            n,
            pair_count: pairs.len(),
            configs,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Weighted sums over every configuration, exact to double precision.
    pub fn report(&self, p: f64) -> Result<OracleReport> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::ProbabilityOutOfRange(p));
        }
        let q = 1.0 - p;
        let mut e_tau = 0.0;
        let mut e_tau_sq = 0.0;
        let mut term_a = 0.0;
        let mut term_b = 0.0;
        let mut p_out = 0.0;
        let mut c1 = 0.0;
        let mut c1_sq = 0.0;
        let mut c1_cube = 0.0;
        for cfg in &self.configs {
            let w = p.powi(cfg.present_edges as i32)
                * q.powi((self.pair_count as u32 - cfg.present_edges) as i32);
            if w == 0.0 {
                continue;
            }
            e_tau += w * cfg.e_tau;
            e_tau_sq += w * cfg.e_tau_sq;
            let ratio = cfg.d2 as f64 * cfg.inv_d1;
            term_a += w * ratio;
            if !cfg.two_in_c1 {
                term_b += w * ratio;
                p_out += w;
            }
            let s = cfg.c1_size as f64;
            c1 += w * s;
            c1_sq += w * s * s;
            c1_cube += w * s * s * s;
        }
        Ok(OracleReport {
            n: self.n,
            p,
            exact_e_tau: e_tau,
            e_tau_sq,
            term_a,
            term_b,
            p_2_notin_c1: p_out,
            e_c1: c1,
            e_c1_sq: c1_sq,
            e_c1_cube: c1_cube,
        })
    }

    /// The disconnected term rewritten through the origin's component size:
    /// p E[1_{d(1) >= 1}/d(1) (n-1-|C(1)|)(n-|C(1)|)] / (n-1).
    /// Equals `term_b` exactly; enumerated independently here.
    pub fn disconnected_term_component_form(&self, p: f64) -> Result<f64> {
        if self.n < 4 {
            return Err(Error::VertexCount {
                min: 4,
                got: self.n,
            });
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::ProbabilityOutOfRange(p));
        }
        let q = 1.0 - p;
        let nf = self.n as f64;
        let mut acc = 0.0;
        for cfg in &self.configs {
            let w = p.powi(cfg.present_edges as i32)
                * q.powi((self.pair_count as u32 - cfg.present_edges) as i32);
            let s = cfg.c1_size as f64;
            acc += w * cfg.inv_d1 * (nf - 1.0 - s) * (nf - s);
        }
        Ok(p * acc / (nf - 1.0))
    }

    /// Worst residual of the return-time decomposition at this p:
    /// max of |(E[tau]-1)/(n-1) - (term_a - term_b)| and
    /// |term_a - closed form|.
    pub fn decomposition_residual(&self, p: f64) -> Result<f64> {
        if self.n < 4 {
            return Err(Error::VertexCount {
                min: 4,
                got: self.n,
            });
        }
        let report = self.report(p)?;
        let lhs = (report.exact_e_tau - 1.0) / (self.n as f64 - 1.0);
        let identity = (lhs - (report.term_a - report.term_b)).abs();
        let closed = (report.term_a - expected_degree_ratio(self.n as u64, p)?).abs();
        Ok(identity.max(closed))
    }
}

/// One-shot report for a single (n, p).
pub fn enumerate(n: usize, p: f64) -> Result<OracleReport> {
    ExactEnumerator::new(n)?.report(p)
}

fn config_stats(n: usize, mask: u32, pairs: &[(usize, usize)]) -> ConfigStats {
    let mut adj = [0u8; MAX_SLOW_N];
    let mut deg = [0u32; MAX_SLOW_N];
    let mut present_edges = 0u32;
    for (i, &(u, v)) in pairs.iter().enumerate() {
        if mask >> i & 1 == 1 {
            adj[u] |= 1 << v;
            adj[v] |= 1 << u;
            deg[u] += 1;
            deg[v] += 1;
            present_edges += 1;
        }
    }
    // Bitset flood fill from the origin.
    let mut comp: u8 = 1;
    let mut frontier: u8 = 1;
    while frontier != 0 {
        let mut next: u8 = 0;
        let mut f = frontier;
        while f != 0 {
            let v = f.trailing_zeros() as usize;
            f &= f - 1;
            next |= adj[v] & !comp;
        }
        comp |= next;
        frontier = next;
    }
    let c1_size = comp.count_ones();
    let degree_sum: u32 = (0..n).filter(|&v| comp >> v & 1 == 1).map(|v| deg[v]).sum();
    let e_tau = if deg[0] == 0 {
        1.0
    } else {
        degree_sum as f64 / deg[0] as f64
    };
    let (mean_check, e_tau_sq) = tau_moments_by_hitting_times(n, &adj, &deg, comp);
    debug_assert!(
        (mean_check - e_tau).abs() <= 1e-10,
        "stationary formula {e_tau} vs hitting-time mean {mean_check}"
    );
    ConfigStats {
        present_edges,
        e_tau,
        e_tau_sq,
        d2: deg[1],
        inv_d1: if deg[0] == 0 {
            0.0
        } else {
            1.0 / deg[0] as f64
        },
        c1_size,
        two_in_c1: comp >> 1 & 1 == 1,
    }
}

/// First and second moments of the return time via the hitting-time systems
/// on the origin's component: with h(v) = E_v[steps to reach the origin],
/// s(v) = E_v[steps^2], both satisfy linear first-step equations, and
/// tau = 1 + (hitting time from a uniform neighbor of the origin).
fn tau_moments_by_hitting_times(
    n: usize,
    adj: &[u8; MAX_SLOW_N],
    deg: &[u32; MAX_SLOW_N],
    comp: u8,
) -> (f64, f64) {
    if deg[0] == 0 {
        return (1.0, 1.0);
    }
    let others: Vec<usize> = (1..n).filter(|&v| comp >> v & 1 == 1).collect();
    let m = others.len();
    let mut index = [usize::MAX; MAX_SLOW_N];
    for (i, &v) in others.iter().enumerate() {
        index[v] = i;
    }
    let mut matrix = vec![vec![0.0f64; m]; m];
    for (i, &v) in others.iter().enumerate() {
        matrix[i][i] = 1.0;
        let inv_d = 1.0 / deg[v] as f64;
        let mut nb = adj[v] & !1; // neighbors other than the origin
        while nb != 0 {
            let u = nb.trailing_zeros() as usize;
            nb &= nb - 1;
            matrix[i][index[u]] -= inv_d;
        }
    }
    let h = solve_dense(&matrix, &vec![1.0; m]);
    let rhs_sq: Vec<f64> = others
        .iter()
        .map(|&v| {
            let inv_d = 1.0 / deg[v] as f64;
            let mut acc = 1.0;
            let mut nb = adj[v] & !1;
            while nb != 0 {
                let u = nb.trailing_zeros() as usize;
                nb &= nb - 1;
                acc += 2.0 * inv_d * h[index[u]];
            }
            acc
        })
        .collect();
    let s = solve_dense(&matrix, &rhs_sq);
    let inv_d0 = 1.0 / deg[0] as f64;
    let mut sum_h = 0.0;
    let mut sum_s = 0.0;
    let mut nb = adj[0];
    while nb != 0 {
        let u = nb.trailing_zeros() as usize;
        nb &= nb - 1;
        sum_h += h[index[u]];
        sum_s += s[index[u]];
    }
    let mean = 1.0 + inv_d0 * sum_h;
    let second = 1.0 + 2.0 * inv_d0 * sum_h + inv_d0 * sum_s;
    (mean, second)
}

/// Gaussian elimination with partial pivoting; fine for these tiny systems.
#[allow(clippy::needless_range_loop)]
fn solve_dense(matrix: &[Vec<f64>], rhs: &[f64]) -> Vec<f64> {
    let m = rhs.len();
    let mut a: Vec<Vec<f64>> = matrix.to_vec();
    let mut b = rhs.to_vec();
    for col in 0..m {
        let pivot = (col..m)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        let pv = a[col][col];
        debug_assert!(pv.abs() > 1e-12, "singular hitting-time system");
        for row in 0..m {
            if row != col && a[row][col] != 0.0 {
                let factor = a[row][col] / pv;
                for k in col..m {
                    let v = a[col][k];
                    a[row][k] -= factor * v;
                }
                b[row] -= factor * b[col];
            }
        }
    }
    (0..m).map(|i| b[i] / a[i][i]).collect()
}
