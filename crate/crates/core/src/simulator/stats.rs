//! Sample statistics with deterministic, order-fixed accumulation.

use serde::{Deserialize, Serialize};

/// Two-sided 99% normal quantile.
pub const Z99: f64 = 2.575_829_303_548_901;

/// Sample mean with standard error and 99% confidence interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_err: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n: u64,
}

impl Estimate {
    pub fn from_mean_se(mean: f64, std_err: f64, n: u64) -> Self {
        Self { mean, std_err, ci_low: mean - Z99 * std_err, ci_high: mean + Z99 * std_err, n }
    }

    pub fn half_width(&self) -> f64 {
        Z99 * self.std_err
    }

    pub fn ci_width(&self) -> f64 {
        self.ci_high - self.ci_low
    }

    pub fn contains(&self, x: f64) -> bool {
        self.ci_low <= x && x <= self.ci_high
    }

    pub fn from_samples(xs: &[f64]) -> Self {
        let mut w = Welford::default();
        xs.iter().for_each(|&x| w.push(x));
        w.estimate()
    }
}

/// Streaming mean/variance. Pushing values in a fixed order gives
/// bit-identical results.
#[derive(Clone, Copy, Debug, Default)]
pub struct Welford {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    pub fn estimate(&self) -> Estimate {
        let se = if self.n < 2 { 0.0 } else { (self.variance() / self.n as f64).sqrt() };
        Estimate::from_mean_se(self.mean, se, self.n)
    }
}

/// Compensated (Neumaier) sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Jackknife estimate of a smooth function of column means.
///
/// `rows[i]` holds the per-unit observations; `f` maps a vector of means to
/// the statistic. Leave-one-out means come from the column totals, so the
/// cost is linear in the number of rows.
pub fn jackknife<F>(rows: &[Vec<f64>], f: F) -> Estimate
where
    F: Fn(&[f64]) -> f64,
{
    let n = rows.len();
    if n == 0 {
        return Estimate::from_mean_se(f64::NAN, f64::NAN, 0);
    }
    let width = rows[0].len();
    let mut totals = vec![KahanSum::default(); width];
    for row in rows {
        for (t, &x) in totals.iter_mut().zip(row) {
            t.add(x);
        }
    }
    let totals: Vec<f64> = totals.iter().map(KahanSum::total).collect();
    let full_means: Vec<f64> = totals.iter().map(|t| t / n as f64).collect();
    let full = f(&full_means);
    if n < 2 {
        return Estimate::from_mean_se(full, 0.0, 1);
    }
    let mut loo = Welford::default();
    let mut buf = vec![0.0; width];
    for row in rows {
        for ((b, t), x) in buf.iter_mut().zip(&totals).zip(row) {
            *b = (t - x) / (n - 1) as f64;
        }
        loo.push(f(&buf));
    }
    let nf = n as f64;
    let var = (nf - 1.0) / nf * loo.variance() * (nf - 1.0);
    Estimate::from_mean_se(full, var.max(0.0).sqrt(), n as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn welford_matches_two_pass() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 * 0.5 + 1e6).collect();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
        let e = Estimate::from_samples(&xs);
        assert!((e.mean - mean).abs() < 1e-8);
        assert!((e.std_err - (var / 1000.0).sqrt()).abs() < 1e-9);
        assert!(e.contains(mean));
    }

    #[test]
    fn jackknife_of_mean_is_standard_error() {
        let xs: Vec<f64> = (0..200).map(|i| (i as f64).sin()).collect();
        let rows: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x]).collect();
        let jk = jackknife(&rows, |m| m[0]);
        let direct = Estimate::from_samples(&xs);
        assert!((jk.mean - direct.mean).abs() < 1e-12);
        assert!((jk.std_err - direct.std_err).abs() < 1e-12);
    }

    #[test]
    fn kahan_recovers_small_terms() {
        let mut s = KahanSum::default();
        s.add(1e16);
        for _ in 0..1000 {
            s.add(1.0);
        }
        s.add(-1e16);
        assert_eq!(s.total(), 1000.0);
    }
}
