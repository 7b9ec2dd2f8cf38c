//! Small statistical helpers shared by the experiments.

use statrs::distribution::{ContinuousCDF, Normal};

pub fn standard_normal_cdf(x: f64) -> f64 {
    Normal::standard().cdf(x)
}

/// Kolmogorov–Smirnov distance between the empirical distribution of
/// `samples` and the standard normal.
pub fn ks_distance_to_standard_normal(samples: &[f64]) -> f64 {
    assert!(!samples.is_empty(), "KS distance needs samples");
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("non-finite KS sample"));
    let n = sorted.len() as f64;
    let mut sup = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let cdf = standard_normal_cdf(x);
        sup = sup
            .max((cdf - i as f64 / n).abs())
            .max(((i + 1) as f64 / n - cdf).abs());
    }
    sup
}

/// Mean and Bessel-corrected sample variance.
pub fn sample_mean_variance(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = xs.iter().map(|x| (x - mean) * (x - mean)).sum();
    (mean, ss / (n - 1.0))
}

/// Two-sample chi-square homogeneity statistic over pre-binned counts.
/// Returns (statistic, degrees of freedom). Bins with a pooled count below
/// `min_pooled` are merged into their left neighbor before testing.
pub fn chi_square_homogeneity(a: &[u64], b: &[u64], min_pooled: u64) -> (f64, usize) {
    assert_eq!(a.len(), b.len());
    let mut merged: Vec<(u64, u64)> = Vec::new();
    for (&ca, &cb) in a.iter().zip(b) {
        match merged.last_mut() {
            Some(last) if last.0 + last.1 < min_pooled => {
                last.0 += ca;
                last.1 += cb;
            }
            _ => merged.push((ca, cb)),
        }
    }
    // The final bin may still be under-filled; fold it backwards.
    while merged.len() > 1 {
        let last = *merged.last().unwrap();
        if last.0 + last.1 >= min_pooled {
            break;
        }
        merged.pop();
        let prev = merged.last_mut().unwrap();
        prev.0 += last.0;
        prev.1 += last.1;
    }
    let total_a: u64 = merged.iter().map(|m| m.0).sum();
    let total_b: u64 = merged.iter().map(|m| m.1).sum();
    let total = (total_a + total_b) as f64;
    let mut stat = 0.0;
    for &(ca, cb) in &merged {
        let pooled = (ca + cb) as f64;
        let ea = pooled * total_a as f64 / total;
        let eb = pooled * total_b as f64 / total;
        if ea > 0.0 {
            stat += (ca as f64 - ea).powi(2) / ea;
        }
        if eb > 0.0 {
            stat += (cb as f64 - eb).powi(2) / eb;
        }
    }
    (stat, merged.len().saturating_sub(1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_cdf_midpoint() {
        assert!((standard_normal_cdf(0.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn ks_distance_of_normal_quantiles_is_small() {
        // Plug in exact normal quantile midpoints: the KS distance is then
        // the discretization gap 1/(2n).
        let n = 1000;
        let samples: Vec<f64> = (0..n)
            .map(|i| {
                let u = (i as f64 + 0.5) / n as f64;
                statrs::distribution::Normal::standard().inverse_cdf(u)
            })
            .collect();
        let d = ks_distance_to_standard_normal(&samples);
        assert!(d <= 0.5 / n as f64 + 1e-9, "distance {d}");
    }

    #[test]
    fn ks_distance_detects_shift() {
        let shifted: Vec<f64> = (0..500).map(|i| 3.0 + i as f64 * 1e-3).collect();
        assert!(ks_distance_to_standard_normal(&shifted) > 0.9);
    }

    #[test]
    fn chi_square_identical_histograms_is_zero() {
        let a = [100u64, 200, 300];
        let (stat, df) = chi_square_homogeneity(&a, &a, 10);
        assert_eq!(stat, 0.0);
        assert_eq!(df, 2);
    }
}
