//! The closed-form interference moments against a direct double integral.
//!
//! For a Palm typical BS at the origin, an interfering UE at distance `D`
//! from it is served at a Rayleigh distance `d < D`, so
//! `μ_κ = ∫ f(d) β(d)^{−κ} 2πλ ∫_d^∞ β(D)^κ D dD dd` with
//! `f(d) = 2πλ d e^{−πλd²}`.

mod common;

use std::f64::consts::PI;

use common::simpson_split;
use densemimo::analytics::{mu_coefficient, single_slope_mu};
use densemimo::PathLossModel;

struct Slopes {
    breaks: Vec<f64>,
    alphas: Vec<f64>,
    ups: Vec<f64>,
}

impl Slopes {
    fn new(breaks: &[f64], alphas: &[f64], u1: f64) -> Self {
        let mut ups = vec![u1];
        for (n, r) in breaks.iter().enumerate() {
            ups.push(ups[n] * r.powf(alphas[n + 1] - alphas[n]));
        }
        Self { breaks: breaks.to_vec(), alphas: alphas.to_vec(), ups }
    }

    fn beta(&self, d: f64) -> f64 {
        let n = self.breaks.iter().take_while(|&&r| d >= r).count();
        self.ups[n] * d.powf(-self.alphas[n])
    }
}

fn oracle(m: &Slopes, lambda_km2: f64, kappa: f64) -> f64 {
    let lam = lambda_km2 * 1e-6;
    let inner = |d: f64| -> f64 {
        if d <= 0.0 {
            return 0.0;
        }
        let t_max = (1e10 / d).ln();
        let mut knots = vec![0.0];
        knots.extend(m.breaks.iter().filter(|&&r| r > d).map(|r| (r / d).ln()));
        let last = *knots.last().unwrap();
        for i in 1..=8 {
            knots.push(last + (t_max - last) * i as f64 / 8.0);
        }
        let f = |t: f64| {
            let dd = d * t.exp();
            m.beta(dd).powf(kappa) * dd * dd
        };
        let crude = simpson_split(&f, &knots, 1e-3 * f(0.0));
        let d_max = d * t_max.exp();
        let ka = kappa * m.alphas[m.alphas.len() - 1];
        let tail = m.ups[m.ups.len() - 1].powf(kappa) * d_max.powf(2.0 - ka) / (ka - 2.0);
        let integral = simpson_split(&f, &knots, 1e-13 * crude) + tail;
        2.0 * PI * lam * integral / m.beta(d).powf(kappa)
    };
    // s = πλd², so s ~ Exp(1).
    let mut knots = vec![0.0];
    for &r in &m.breaks {
        let s = PI * lam * r * r;
        if s < 60.0 {
            knots.push(s);
        }
    }
    knots.extend([1.0, 4.0, 12.0, 60.0]);
    knots.sort_by(f64::total_cmp);
    knots.dedup();
    let g = |s: f64| (-s).exp() * inner((s / (PI * lam)).sqrt());
    let crude = simpson_split(&g, &knots, 1e-4);
    simpson_split(&g, &knots, 1e-11 * crude)
}

fn check(model: &PathLossModel, slopes: &Slopes, lambdas: &[f64]) {
    for &lambda in lambdas {
        for kappa in [1u32, 2] {
            let closed = mu_coefficient(model, lambda, kappa).unwrap();
            let quad = oracle(slopes, lambda, f64::from(kappa));
            let rel = (closed / quad - 1.0).abs();
            println!("lambda={lambda} kappa={kappa} closed={closed:.8} quad={quad:.8}");
            assert!(rel < 1e-6, "lambda={lambda} kappa={kappa}: {closed} vs {quad}");
        }
    }
}

#[test]
fn default_dual_slope_matches_double_integral() {
    let slopes = Slopes::new(&[100.0], &[2.1, 4.0], 8.3e-4);
    check(&PathLossModel::dual_slope_default(), &slopes, &[0.01, 1.0, 10.0, 30.0, 100.0, 300.0, 1e4]);
}

#[test]
fn three_slope_model_matches_double_integral() {
    let slopes = Slopes::new(&[50.0, 300.0], &[2.2, 3.0, 4.5], 1e-3);
    let model = PathLossModel::new(vec![50.0, 300.0], vec![2.2, 3.0, 4.5], 1e-3).unwrap();
    check(&model, &slopes, &[0.5, 20.0, 200.0, 3000.0]);
}

#[test]
fn single_slope_matches_double_integral() {
    for alpha in [2.5, 3.0, 4.0, 5.0] {
        let slopes = Slopes::new(&[], &[alpha], 1.0);
        let quad1 = oracle(&slopes, 10.0, 1.0);
        let quad2 = oracle(&slopes, 10.0, 2.0);
        let mu = single_slope_mu(alpha);
        assert!((quad1 / mu.mu1 - 1.0).abs() < 1e-6, "alpha={alpha}");
        assert!((quad2 / mu.mu2 - 1.0).abs() < 1e-6, "alpha={alpha}");
    }
}
