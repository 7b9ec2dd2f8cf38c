//! Closed forms and limit objects for the Poisson branching process tied to
//! sparse G(n, lambda/n): extinction/survival probabilities, the inverse
//! square moment of 1 + Poisson, the scaled return-time limit, binomial
//! inverse moments, and the disconnection-probability bounds.

use crate::error::{Error, Result};

const FIXED_POINT_MAX_ITERS: usize = 200;
const SERIES_RELATIVE_CUTOFF: f64 = 1e-16;
const QUADRATURE_TOL: f64 = 1e-12;
/// Series evaluation needs exp(-lambda) > 0; beyond this the caller is far
/// outside the regime anything here is meant for.
const MAX_SERIES_LAMBDA: f64 = 700.0;

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda.is_nan() || lambda <= 0.0 {
        return Err(Error::NonPositiveLambda(lambda));
    }
    if lambda > MAX_SERIES_LAMBDA {
        return Err(Error::LambdaTooLarge(lambda));
    }
    Ok(())
}

/// Extinction probability of a Poisson(lambda) branching process: 1 for
/// lambda <= 1, otherwise the unique root in [0, 1) of x = exp(-lambda(1-x)).
///
/// Bisection on [0, 1 - 1e-9]: the map x -> exp(-lambda(1-x)) - x is positive
/// at 0 and negative at the right endpoint for every supercritical lambda the
/// bracket can resolve, and convexity makes the interior root unique.
pub fn extinction_prob(lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    if lambda <= 1.0 {
        return Ok(1.0);
    }
    let residual = |x: f64| (-lambda * (1.0 - x)).exp() - x;
    let mut lo = 0.0f64;
    let mut hi = 1.0 - 1e-9;
    if residual(hi) >= 0.0 {
        // lambda is so close to 1 that the root is not separable from 1.
        return Ok(1.0);
    }
    for _ in 0..FIXED_POINT_MAX_ITERS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let r = residual(mid);
        if r == 0.0 {
            return Ok(mid);
        } else if r > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(if residual(lo).abs() <= residual(hi).abs() {
        lo
    } else {
        hi
    })
}

/// Survival probability: 1 - extinction_prob.
pub fn survival_prob(lambda: f64) -> Result<f64> {
    Ok(1.0 - extinction_prob(lambda)?)
}

/// Evaluation route for `r_lambda`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RMethod {
    /// Termwise Poisson expectation sum_{k>=0} e^-L L^k / (k! (k+1)^2).
    Series,
    /// (e^-L / L) * integral_0^L (e^s - 1)/s ds by adaptive quadrature.
    Integral,
}

/// E[(1 + Poi(lambda))^-2], the second inverse moment driving the sparse
/// return-time limit. The two methods agree to 1e-10 on desk-scale lambda.
pub fn r_lambda(lambda: f64, method: RMethod) -> Result<f64> {
    check_lambda(lambda)?;
    Ok(match method {
        RMethod::Series => r_lambda_series(lambda),
        RMethod::Integral => r_lambda_integral(lambda),
    })
}

fn r_lambda_series(lambda: f64) -> f64 {
    let mut pois_term = (-lambda).exp();
    let mut sum = pois_term; // k = 0 contributes e^-L / 1
    let mut k = 0u64;
    loop {
        k += 1;
        pois_term *= lambda / k as f64;
        let contrib = pois_term / ((k + 1) * (k + 1)) as f64;
        sum += contrib;
        // Stop only past the Poisson mode, so a small leading term for large
        // lambda cannot truncate the sum before its bulk.
        if k as f64 > lambda && contrib < SERIES_RELATIVE_CUTOFF * sum {
            return sum;
        }
    }
}

fn r_lambda_integral(lambda: f64) -> f64 {
    // Removable singularity at 0: (e^s - 1)/s -> 1.
    let f = |s: f64| if s == 0.0 { 1.0 } else { s.exp_m1() / s };
    let integral = adaptive_simpson(&f, 0.0, lambda, QUADRATURE_TOL);
    (-lambda).exp() / lambda * integral
}

/// Adaptive Simpson with Richardson acceptance; the tolerance is absolute,
/// widened to a relative one when the whole-interval estimate is large.
fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: &impl Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &impl Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (left, lm, flm) = simpson(f, a, fa, m, fm);
        let (right, rm, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, fa, m, fm, left, lm, flm, 0.5 * tol, depth - 1)
            + recurse(f, m, fm, b, fb, right, rm, frm, 0.5 * tol, depth - 1)
    }
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let (whole, m, fm) = simpson(f, a, fa, b, fb);
    let tol = tol * whole.abs().max(1.0);
    recurse(f, a, fa, b, fb, whole, m, fm, tol, 60)
}

/// Limit of the expected return time over n in the sparse regime:
/// lambda^2 zeta (R_L + eta (1 + eta) (R_L - eta^2 R_{L eta})).
/// Zero for lambda <= 1, strictly positive above.
pub fn f_limit(lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    if lambda <= 1.0 {
        return Ok(0.0);
    }
    let eta = extinction_prob(lambda)?;
    let zeta = 1.0 - eta;
    let r = r_lambda_series(lambda);
    let r_sub = r_lambda_series(lambda * eta);
    Ok(lambda * lambda * zeta * (r + eta * (1.0 + eta) * (r - eta * eta * r_sub)))
}

/// Normalized limit-density masses for weighted atoms `(lambda, weight)`:
/// mass_i proportional to weight_i * f(lambda_i). Errors when the density
/// vanishes on every atom (all-subcritical prior).
pub fn limiting_occupation(atoms: &[(f64, f64)]) -> Result<Vec<f64>> {
    let mut masses = Vec::with_capacity(atoms.len());
    let mut total = 0.0;
    for &(lambda, weight) in atoms {
        if weight.is_nan() || weight < 0.0 {
            return Err(Error::InvalidPrior(format!("negative weight {weight}")));
        }
        let m = weight * f_limit(lambda)?;
        masses.push(m);
        total += m;
    }
    if total <= 0.0 {
        return Err(Error::DegeneratePrior);
    }
    for m in &mut masses {
        *m /= total;
    }
    Ok(masses)
}

/// E[1/(1 + Bin(m, p))] in closed form: (1 - (1-p)^(m+1)) / (p (m+1)).
/// The p = 0 limit is 1.
pub fn inv_one_plus_binomial(m: u64, p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::ProbabilityOutOfRange(p));
    }
    if p == 0.0 || m == 0 {
        // B is 0 surely (p = 0), or the closed form reduces to
        // (1 - (1-p))/p = 1 exactly.
        return Ok(1.0);
    }
    let m1 = (m + 1) as f64;
    Ok((1.0 - (1.0 - p).powf(m1)) / (p * m1))
}

/// E[1/(1 + Bin(m, p))^2] by exact pmf summation over k = 0..m.
///
/// The pmf is anchored at the mode via ln-gamma and extended outward by the
/// multiplicative recursion, which stays scaled for m up to 1e5 and beyond
/// (a recursion from k = 0 underflows once (1-p)^m does).
pub fn inv_sq_one_plus_binomial(m: u64, p: f64) -> Result<f64> {
    binomial_expectation(m, p, |k| {
        let k1 = (k + 1) as f64;
        1.0 / (k1 * k1)
    })
}

/// E[g(B)] for B ~ Bin(m, p), exact summation with mode-anchored pmf.
fn binomial_expectation(m: u64, p: f64, g: impl Fn(u64) -> f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::ProbabilityOutOfRange(p));
    }
    if m == 0 || p == 0.0 {
        return Ok(g(0));
    }
    if p == 1.0 {
        return Ok(g(m));
    }
    let q = 1.0 - p;
    let mf = m as f64;
    let mode = (((m + 1) as f64) * p).floor().min(mf) as u64;
    let ln_pmf_mode = ln_binomial(m, mode) + mode as f64 * p.ln() + (m - mode) as f64 * q.ln();
    let pmf_mode = ln_pmf_mode.exp();
    let mut sum = pmf_mode * g(mode);
    // Downward from the mode: pmf(k) = pmf(k+1) (k+1) q / ((m-k) p).
    let mut t = pmf_mode;
    for k in (0..mode).rev() {
        t *= ((k + 1) as f64 * q) / ((m - k) as f64 * p);
        sum += t * g(k);
    }
    // Upward: pmf(k+1) = pmf(k) (m-k) p / ((k+1) q).
    t = pmf_mode;
    for k in mode..m {
        t *= ((m - k) as f64 * p) / ((k + 1) as f64 * q);
        sum += t * g(k + 1);
    }
    Ok(sum)
}

fn ln_binomial(m: u64, k: u64) -> f64 {
    use statrs::function::gamma::ln_gamma;
    ln_gamma(m as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((m - k) as f64 + 1.0)
}

/// Both sides of the binomial reciprocal identity
/// E[1_{B_m >= 1} / B_m] = m p E[1/(1 + B_{m-1})^2], returned as (lhs, rhs).
pub fn binomial_reciprocal_identity(m: u64, p: f64) -> Result<(f64, f64)> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!(
            "identity requires m >= 2, got {m}"
        )));
    }
    if !(0.0 < p && p < 1.0) {
        return Err(Error::ProbabilityOutOfRange(p));
    }
    let lhs = binomial_expectation(m, p, |k| if k >= 1 { 1.0 / k as f64 } else { 0.0 })?;
    let rhs = m as f64 * p * inv_sq_one_plus_binomial(m - 1, p)?;
    Ok((lhs, rhs))
}

/// Closed form for E[d(2) 1_{d(1) >= 1} / d(1)] on G(n, p):
/// (n-2)^2 p^2 (1-p) E[(1 + Bin(n-3, p))^-2]
///   + (1 + (n-2) p)(1 - (1-p)^(n-1)) / (n-1).
pub fn expected_degree_ratio(n: u64, p: f64) -> Result<f64> {
    if n < 4 {
        return Err(Error::VertexCount {
            min: 4,
            got: n as usize,
        });
    }
    if !(0.0 < p && p < 1.0) {
        return Err(Error::ProbabilityOutOfRange(p));
    }
    let nf = n as f64;
    let inv_sq = inv_sq_one_plus_binomial(n - 3, p)?;
    let disconnected = (nf - 2.0) * (nf - 2.0) * p * p * (1.0 - p) * inv_sq;
    let connected = (1.0 + (nf - 2.0) * p) * (1.0 - (1.0 - p).powf(nf - 1.0)) / (nf - 1.0);
    Ok(disconnected + connected)
}

/// Upper bound on the k-th moment of the origin's component size in the
/// subcritical regime: sum_{m >= 0} (m+1)^k exp(-m I_lambda) with the rate
/// I_lambda = lambda - 1 - ln lambda.
pub fn subcritical_moment_bound(lambda: f64, k: u32) -> Result<f64> {
    check_lambda(lambda)?;
    if lambda >= 1.0 {
        return Err(Error::InvalidArgument(format!(
            "subcritical bound requires lambda < 1, got {lambda}"
        )));
    }
    let rate = lambda - 1.0 - lambda.ln();
    let x = (-rate).exp();
    let mut sum = 0.0;
    let mut pow = 1.0; // x^m
    for m in 0..10_000_000u64 {
        let term = ((m + 1) as f64).powi(k as i32) * pow;
        sum += term;
        if m as f64 > 1.0 / rate && term < SERIES_RELATIVE_CUTOFF * sum {
            return Ok(sum);
        }
        pow *= x;
    }
    Ok(sum)
}

/// Lower and upper bounds on P(2 not in C(1)) for G(n, p), q = 1 - p:
/// lower (2 - q^(n-2)) q^(n-1), upper 2 q^(n-1) (1 + q^((n-2)/2))^(n-2).
pub fn disconnect_prob_bounds(n: u64, p: f64) -> Result<(f64, f64)> {
    if n < 3 {
        return Err(Error::VertexCount {
            min: 3,
            got: n as usize,
        });
    }
    if !(0.0 < p && p < 1.0) {
        return Err(Error::ProbabilityOutOfRange(p));
    }
    let q = 1.0 - p;
    let nf = n as f64;
    let lower = (2.0 - q.powf(nf - 2.0)) * q.powf(nf - 1.0);
    let upper = 2.0 * q.powf(nf - 1.0) * (1.0 + q.powf(0.5 * (nf - 2.0))).powf(nf - 2.0);
    Ok((lower, upper))
}

/// One tabulated row of the analytic limit objects.
#[derive(Debug, Clone, Copy)]
pub struct AnalyticRow {
    pub lambda: f64,
    pub eta: f64,
    pub zeta: f64,
    pub r_lambda: f64,
    pub f: f64,
}

/// Tabulate (lambda, eta, zeta, R, f) over a grid of branching parameters.
pub fn analytic_curve(grid: &[f64]) -> Result<Vec<AnalyticRow>> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty lambda grid".into()));
    }
    grid.iter()
        .map(|&lambda| {
            let eta = extinction_prob(lambda)?;
            Ok(AnalyticRow {
                lambda,
                eta,
                zeta: 1.0 - eta,
                r_lambda: r_lambda(lambda, RMethod::Series)?,
                f: f_limit(lambda)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values computed independently with 50-digit arithmetic.
    const ETA_2: f64 = 0.20318786997997995;
    const R_1: f64 = 0.48482910699568765;
    const R_2: f64 = 0.24927889714313745;
    const F_2: f64 = 0.9649349611001541;
    const F_1_5: f64 = 0.6344426554693613;

    #[test]
    fn extinction_is_one_at_or_below_criticality() {
        assert_eq!(extinction_prob(1.0).unwrap(), 1.0);
        assert_eq!(extinction_prob(0.5).unwrap(), 1.0);
        assert_eq!(survival_prob(0.7).unwrap(), 0.0);
    }

    #[test]
    fn extinction_matches_reference_above_criticality() {
        assert!((extinction_prob(2.0).unwrap() - ETA_2).abs() < 1e-13);
        assert!((survival_prob(2.0).unwrap() - (1.0 - ETA_2)).abs() < 1e-13);
        assert!((extinction_prob(1.5).unwrap() - 0.417_188_356_134_188_6).abs() < 1e-13);
        assert!((extinction_prob(3.0).unwrap() - 0.059_520_209_292_640_37).abs() < 1e-13);
    }

    #[test]
    fn fixed_point_residual_small_on_grid() {
        for i in 0..100 {
            let lambda = 1.01 + 8.99 * i as f64 / 99.0;
            let eta = extinction_prob(lambda).unwrap();
            let residual = (eta - (-lambda * (1.0 - eta)).exp()).abs();
            assert!(residual <= 1e-12, "lambda {lambda}: residual {residual}");
        }
    }

    #[test]
    fn survival_self_consistent_for_large_lambda() {
        let zeta = survival_prob(50.0).unwrap();
        assert!((zeta - (1.0 - (-50.0 * zeta).exp())).abs() <= 1e-10);
    }

    #[test]
    fn rejects_bad_lambda() {
        assert!(extinction_prob(0.0).is_err());
        assert!(extinction_prob(-1.0).is_err());
        assert!(r_lambda(0.0, RMethod::Series).is_err());
        assert!(f_limit(f64::NAN).is_err());
        assert!(r_lambda(1e4, RMethod::Series).is_err());
    }

    #[test]
    fn r_matches_reference_values() {
        assert!((r_lambda(2.0, RMethod::Series).unwrap() - R_2).abs() < 1e-14);
        assert!((r_lambda(1.0, RMethod::Series).unwrap() - R_1).abs() < 1e-14);
        assert!((r_lambda(1e-8, RMethod::Series).unwrap() - 1.0).abs() < 1e-6);
        assert!((r_lambda(0.5, RMethod::Series).unwrap() - 0.691_628_634_450_105_4).abs() < 1e-14);
        assert!((r_lambda(10.0, RMethod::Series).unwrap() - 0.011301627772127237).abs() < 1e-14);
    }

    #[test]
    fn r_series_and_integral_agree() {
        for i in 0..=99 {
            let lambda = 0.1 + 9.9 * i as f64 / 99.0;
            let s = r_lambda(lambda, RMethod::Series).unwrap();
            let q = r_lambda(lambda, RMethod::Integral).unwrap();
            assert!((s - q).abs() <= 1e-10, "lambda {lambda}: {s} vs {q}");
        }
    }

    #[test]
    fn r_is_strictly_decreasing() {
        let mut prev = r_lambda(0.05, RMethod::Series).unwrap();
        for i in 1..=100 {
            let lambda = 0.05 + i as f64 * 0.1;
            let r = r_lambda(lambda, RMethod::Series).unwrap();
            assert!(r < prev, "not decreasing at lambda {lambda}");
            prev = r;
        }
    }

    #[test]
    fn zeta_is_strictly_increasing_above_one() {
        let mut prev = survival_prob(1.01).unwrap();
        for i in 1..100 {
            let lambda = 1.01 + 8.99 * i as f64 / 99.0;
            let z = survival_prob(lambda).unwrap();
            assert!(z > prev, "not increasing at lambda {lambda}");
            prev = z;
        }
    }

    #[test]
    fn f_vanishes_at_or_below_criticality() {
        assert_eq!(f_limit(0.7).unwrap(), 0.0);
        assert_eq!(f_limit(1.0).unwrap(), 0.0);
    }

    #[test]
    fn f_matches_reference_and_lower_bound() {
        assert!((f_limit(2.0).unwrap() - F_2).abs() < 1e-12);
        assert!((f_limit(1.5).unwrap() - F_1_5).abs() < 1e-12);
        assert!((f_limit(3.0).unwrap() - 1.2315101501773504).abs() < 1e-12);
        for i in 0..50 {
            let lambda = 1.02 + i as f64 * 0.18;
            let f = f_limit(lambda).unwrap();
            let zeta = survival_prob(lambda).unwrap();
            let r = r_lambda(lambda, RMethod::Series).unwrap();
            let floor = zeta * lambda * lambda * r;
            assert!(
                f >= floor && floor > 0.0,
                "lambda {lambda}: f {f} < {floor}"
            );
        }
    }

    #[test]
    fn shifted_r_difference_is_nonnegative() {
        for i in 0..50 {
            let lambda = 1.02 + i as f64 * 0.18;
            let eta = extinction_prob(lambda).unwrap();
            let r = r_lambda(lambda, RMethod::Series).unwrap();
            let r_sub = r_lambda(lambda * eta, RMethod::Series).unwrap();
            assert!(lambda * (r - eta * eta * r_sub) >= 0.0);
        }
    }

    #[test]
    fn limiting_occupation_examples() {
        let masses = limiting_occupation(&[(0.5, 0.5), (2.0, 0.5)]).unwrap();
        assert_eq!(masses, vec![0.0, 1.0]);
        let masses = limiting_occupation(&[(2.0, 1.0)]).unwrap();
        assert_eq!(masses, vec![1.0]);
        let masses = limiting_occupation(&[(1.5, 0.5), (2.0, 0.5)]).unwrap();
        assert!((masses[0] - 0.396_680_964_455_516_9).abs() < 1e-12);
        assert!((masses[1] - 0.603_319_035_544_483_1).abs() < 1e-12);
        assert!(matches!(
            limiting_occupation(&[(0.5, 0.5), (0.9, 0.5)]),
            Err(Error::DegeneratePrior)
        ));
    }

    #[test]
    fn inv_one_plus_binomial_examples() {
        assert_eq!(inv_one_plus_binomial(1, 1.0).unwrap(), 0.5);
        assert!((inv_one_plus_binomial(1, 0.5).unwrap() - 0.75).abs() < 1e-15);
        assert_eq!(inv_one_plus_binomial(0, 0.3).unwrap(), 1.0);
        assert_eq!(inv_one_plus_binomial(5, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn inv_moments_match_direct_summation() {
        // Independent route: naive pmf recursion from k = 0 (fine for small m).
        fn direct(m: u64, p: f64, g: impl Fn(u64) -> f64) -> f64 {
            let q = 1.0 - p;
            let mut pmf = q.powi(m as i32);
            let mut sum = pmf * g(0);
            for k in 0..m {
                pmf *= ((m - k) as f64 * p) / ((k + 1) as f64 * q);
                sum += pmf * g(k + 1);
            }
            sum
        }
        for m in [1u64, 2, 5, 17, 40] {
            for p in [0.05, 0.3, 0.5, 0.77, 0.95] {
                let d1 = direct(m, p, |k| 1.0 / (1 + k) as f64);
                assert!((inv_one_plus_binomial(m, p).unwrap() - d1).abs() <= 1e-12);
                let d2 = direct(m, p, |k| 1.0 / ((1 + k) * (1 + k)) as f64);
                assert!((inv_sq_one_plus_binomial(m, p).unwrap() - d2).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn inv_sq_examples() {
        assert_eq!(inv_sq_one_plus_binomial(0, 0.4).unwrap(), 1.0);
        let v = inv_sq_one_plus_binomial(2, 0.5).unwrap();
        assert!((v - 29.0 / 72.0).abs() < 1e-14); // 0.25 + 0.5/4 + 0.25/9
                                                  // Poisson-limit cross-check against the series route. The exact gap
                                                  // at m = 200 is 3.553e-3 (fraction arithmetic) and shrinks like 1/m.
        let v = inv_sq_one_plus_binomial(200, 2.0 / 203.0).unwrap();
        assert!((v - R_2).abs() <= 4e-3);
        let v = inv_sq_one_plus_binomial(500, 2.0 / 503.0).unwrap();
        assert!((v - R_2).abs() <= 2e-3);
    }

    #[test]
    fn inv_sq_stays_stable_for_large_m() {
        // (1-p)^m underflows here; the mode-anchored sum must not.
        let m = 100_000u64;
        let p = 0.3;
        let v = inv_sq_one_plus_binomial(m, p).unwrap();
        let approx = 1.0 / ((1.0 + m as f64 * p) * (1.0 + m as f64 * p));
        assert!(v > 0.0);
        assert!((v / approx - 1.0).abs() < 1e-3, "v {v} approx {approx}");
    }

    #[test]
    fn reciprocal_identity_holds_on_grid() {
        for m in 2..=20u64 {
            for i in 0..19 {
                let p = 0.05 + 0.05 * i as f64;
                let (lhs, rhs) = binomial_reciprocal_identity(m, p).unwrap();
                assert!((lhs - rhs).abs() <= 1e-12, "m {m} p {p}: {lhs} vs {rhs}");
            }
        }
        let (lhs, rhs) = binomial_reciprocal_identity(2, 0.5).unwrap();
        assert!((lhs - 0.625).abs() < 1e-14);
        assert!((rhs - 0.625).abs() < 1e-14);
        // Continuity toward p = 1.
        let (lhs, rhs) = binomial_reciprocal_identity(2, 1.0 - 1e-9).unwrap();
        assert!((lhs - rhs).abs() <= 1e-9);
        assert!(binomial_reciprocal_identity(1, 0.5).is_err());
        assert!(binomial_reciprocal_identity(3, 1.0).is_err());
    }

    #[test]
    fn degree_ratio_closed_form_limits() {
        // Dense limit: -> 1 for fixed p.
        let v = expected_degree_ratio(10_000, 0.3).unwrap();
        assert!((v - 1.0).abs() <= 1e-2, "dense limit {v}");
        // Sparse limit: -> lambda^2 R_lambda at lambda = 2.
        let v = expected_degree_ratio(10_000, 2.0 / 10_000.0).unwrap();
        assert!((v - 4.0 * R_2).abs() <= 5e-3, "sparse limit {v}");
        assert!(expected_degree_ratio(3, 0.5).is_err());
        assert!(expected_degree_ratio(10, 0.0).is_err());
    }

    #[test]
    fn inverse_square_dense_asymptotics() {
        let n = 10_000u64;
        let p = 0.3;
        let v = inv_sq_one_plus_binomial(n, p).unwrap();
        let scale = (1.0 + n as f64 * p) * (1.0 + n as f64 * p);
        assert!((v * scale - 1.0).abs() <= 1e-2);
    }

    #[test]
    fn subcritical_bound_series() {
        // Closed form for k = 1: 1/(1 - e^-I)^2 with I = 0.5 - 1 - ln 0.5.
        let v = subcritical_moment_bound(0.5, 1).unwrap();
        assert!((v - 32.415765737201252).abs() < 1e-9, "bound {v}");
        assert!(subcritical_moment_bound(1.2, 1).is_err());
        // Bound must dominate the subcritical mean component size ~ 1/(1-l).
        assert!(v > 2.0);
    }

    #[test]
    fn disconnect_bounds_examples() {
        let (lo, hi) = disconnect_prob_bounds(4, 0.5).unwrap();
        assert!((lo - 0.21875).abs() < 1e-15);
        assert!((hi - 0.5625).abs() < 1e-15);
        let (_, hi) = disconnect_prob_bounds(200, 0.3).unwrap();
        assert!(hi <= 1e-20, "upper bound {hi}");
    }

    #[test]
    fn analytic_curve_rows() {
        let rows = analytic_curve(&[1.0, 2.0, 0.5]).unwrap();
        assert_eq!(rows[0].zeta, 0.0);
        assert_eq!(rows[0].f, 0.0);
        assert!((rows[1].zeta - (1.0 - ETA_2)).abs() < 1e-13);
        assert!((rows[1].f - F_2).abs() < 1e-12);
        assert_eq!(rows[2].f, 0.0);
        assert!(analytic_curve(&[]).is_err());
        assert!(analytic_curve(&[-1.0]).is_err());
    }
}
