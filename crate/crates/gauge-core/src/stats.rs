//! Statistical verification utilities: two-sample Kolmogorov-Smirnov
//! test with asymptotic p-value, effective-sample-size estimation for
//! MCMC streams, histograms, and a 1D inverse-CDF sampler for class
//! densities.

use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Two-sample KS statistic D = sup |F1 - F2| and asymptotic p-value.
///
/// p = Q((sqrt(n_e) + 0.12 + 0.11/sqrt(n_e)) D), n_e = n m/(n+m),
/// Q(l) = 2 sum_{k>=1} (-1)^{k-1} e^{-2 k^2 l^2}.
pub fn ks_two_sample(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    assert!(!xs.is_empty() && !ys.is_empty(), "empty sample");
    let mut a: Vec<f64> = xs.to_vec();
    let mut b: Vec<f64> = ys.to_vec();
    a.sort_by(|p, q| p.partial_cmp(q).unwrap());
    b.sort_by(|p, q| p.partial_cmp(q).unwrap());
    let (n, m) = (a.len(), b.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < n && j < m {
        let x = a[i].min(b[j]);
        while i < n && a[i] <= x {
            i += 1;
        }
        while j < m && b[j] <= x {
            j += 1;
        }
        let f1 = i as f64 / n as f64;
        let f2 = j as f64 / m as f64;
        d = d.max((f1 - f2).abs());
    }
    let ne = (n as f64 * m as f64) / (n as f64 + m as f64);
    let sq = ne.sqrt();
    let lambda = (sq + 0.12 + 0.11 / sq) * d;
    (d, kolmogorov_q(lambda))
}

/// Kolmogorov survival function Q(lambda), clamped to [0, 1].
pub fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0f64;
    let mut sign = 1.0;
    for k in 1..=100 {
        let t = (-2.0 * (k as f64) * (k as f64) * lambda * lambda).exp();
        sum += sign * t;
        sign = -sign;
        if t < 1e-18 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Effective sample size via the integrated autocorrelation time
/// (initial positive sequence estimator, lag cap 1000).
pub fn effective_sample_size(series: &[f64]) -> f64 {
    let n = series.len();
    if n < 8 {
        return n as f64;
    }
    let mean = series.iter().sum::<f64>() / n as f64;
    let var: f64 = series.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
    if var <= 0.0 {
        return n as f64;
    }
    let max_lag = (n / 4).min(1000);
    let mut tau = 1.0f64;
    let mut lag = 1usize;
    while lag + 1 < max_lag {
        // pair consecutive lags (Geyer initial positive sequence)
        let mut pair = 0.0;
        for l in [lag, lag + 1] {
            let mut acc = 0.0;
            for t in 0..(n - l) {
                acc += (series[t] - mean) * (series[t + l] - mean);
            }
            pair += acc / ((n - l) as f64 * var);
        }
        if pair <= 0.0 {
            break;
        }
        tau += 2.0 * pair;
        lag += 2;
    }
    (n as f64 / tau).max(1.0)
}

/// Histogram row: [bin_left, bin_right, count, density].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct HistogramBin {
    pub left: f64,
    pub right: f64,
    pub count: u64,
    pub density: f64,
}

pub fn histogram(data: &[f64], bins: usize, lo: f64, hi: f64) -> Vec<HistogramBin> {
    assert!(bins > 0 && hi > lo);
    let mut counts = alloc::vec![0u64; bins];
    let w = (hi - lo) / bins as f64;
    let mut total = 0u64;
    for &x in data {
        if x < lo || x >= hi {
            continue;
        }
        let i = (((x - lo) / w) as usize).min(bins - 1);
        counts[i] += 1;
        total += 1;
    }
    counts
        .iter()
        .enumerate()
        .map(|(i, &c)| HistogramBin {
            left: lo + i as f64 * w,
            right: lo + (i + 1) as f64 * w,
            count: c,
            density: if total > 0 {
                c as f64 / (total as f64 * w)
            } else {
                0.0
            },
        })
        .collect()
}

/// Inverse-CDF sampler for a 1D density on [lo, hi], tabulated on a
/// uniform grid with piecewise-linear CDF interpolation.
pub struct DensitySampler1D {
    lo: f64,
    hi: f64,
    cdf: Vec<f64>,
}

impl DensitySampler1D {
    pub fn new<F: Fn(f64) -> Result<f64>>(
        density: F,
        lo: f64,
        hi: f64,
        grid: usize,
    ) -> Result<Self> {
        if !(hi > lo) || grid < 16 {
            return Err(Error::Domain("bad sampler domain or grid".into()));
        }
        let h = (hi - lo) / grid as f64;
        let mut vals = Vec::with_capacity(grid + 1);
        for i in 0..=grid {
            let v = density(lo + i as f64 * h)?;
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::Domain(alloc::format!(
                    "density not finite nonnegative at {}",
                    lo + i as f64 * h
                )));
            }
            vals.push(v);
        }
        let mut cdf = Vec::with_capacity(grid + 1);
        cdf.push(0.0);
        for i in 0..grid {
            let inc = 0.5 * (vals[i] + vals[i + 1]) * h;
            cdf.push(cdf[i] + inc);
        }
        let total = *cdf.last().unwrap();
        if !(total > 0.0) {
            return Err(Error::Domain("density integrates to zero".into()));
        }
        for c in cdf.iter_mut() {
            *c /= total;
        }
        Ok(DensitySampler1D { lo, hi, cdf })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.gen();
        self.quantile(u)
    }

    pub fn quantile(&self, u: f64) -> f64 {
        let n = self.cdf.len() - 1;
        // binary search for the bracketing cell
        let mut lo = 0usize;
        let mut hi = n;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.cdf[mid] <= u {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let c0 = self.cdf[lo];
        let c1 = self.cdf[hi];
        let frac = if c1 > c0 { (u - c0) / (c1 - c0) } else { 0.0 };
        let h = (self.hi - self.lo) / n as f64;
        self.lo + (lo as f64 + frac) * h
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ks_same_distribution_passes() {
        let mut r = ChaCha8Rng::seed_from_u64(1);
        let xs: Vec<f64> = (0..20_000).map(|_| r.gen::<f64>()).collect();
        let ys: Vec<f64> = (0..20_000).map(|_| r.gen::<f64>()).collect();
        let (_, p) = ks_two_sample(&xs, &ys);
        assert!(p > 0.01, "p = {p}");
    }

    #[test]
    fn ks_different_distribution_fails() {
        let mut r = ChaCha8Rng::seed_from_u64(2);
        let xs: Vec<f64> = (0..20_000).map(|_| r.gen::<f64>()).collect();
        let ys: Vec<f64> = (0..20_000).map(|_| r.gen::<f64>().powi(2)).collect();
        let (_, p) = ks_two_sample(&xs, &ys);
        assert!(p < 1e-10, "p = {p}");
    }

    #[test]
    fn ks_identical_samples_give_p_one() {
        let xs = [0.0f64; 100];
        let (d, p) = ks_two_sample(&xs, &xs);
        assert_eq!(d, 0.0);
        assert_eq!(p, 1.0);
    }

    #[test]
    fn kolmogorov_q_reference_values() {
        // Q(0.828...) ~ 0.5 region monotone checks
        assert!(kolmogorov_q(0.5) > 0.95);
        assert!((kolmogorov_q(1.36) - 0.05).abs() < 0.003);
        assert!((kolmogorov_q(1.63) - 0.01).abs() < 0.001);
        assert!(kolmogorov_q(3.0) < 1e-6);
    }

    #[test]
    fn ess_iid_close_to_n() {
        let mut r = ChaCha8Rng::seed_from_u64(3);
        let xs: Vec<f64> = (0..5000).map(|_| r.gen::<f64>()).collect();
        let ess = effective_sample_size(&xs);
        assert!(ess > 2500.0, "ess = {ess}");
    }

    #[test]
    fn ess_correlated_much_smaller() {
        let mut r = ChaCha8Rng::seed_from_u64(4);
        let mut xs = Vec::with_capacity(5000);
        let mut x = 0.0f64;
        for _ in 0..5000 {
            x = 0.98 * x + 0.02 * (r.gen::<f64>() - 0.5);
            xs.push(x);
        }
        let ess = effective_sample_size(&xs);
        assert!(ess < 500.0, "ess = {ess}");
    }

    #[test]
    fn sampler_reproduces_density() {
        // triangular density on [0,1]
        let s = DensitySampler1D::new(|x| Ok(2.0 * x), 0.0, 1.0, 4096).unwrap();
        let mut r = ChaCha8Rng::seed_from_u64(5);
        let xs: Vec<f64> = (0..50_000).map(|_| s.sample(&mut r)).collect();
        // compare against exact quantile transform sqrt(u)
        let ys: Vec<f64> = (0..50_000).map(|_| r.gen::<f64>().sqrt()).collect();
        let (_, p) = ks_two_sample(&xs, &ys);
        assert!(p > 0.01, "p = {p}");
    }

    #[test]
    fn histogram_counts_and_density() {
        let data = [0.1, 0.2, 0.6, 0.9];
        let h = histogram(&data, 2, 0.0, 1.0);
        assert_eq!(h[0].count, 2);
        assert_eq!(h[1].count, 2);
        assert!((h[0].density - 1.0).abs() < 1e-12);
    }
}
