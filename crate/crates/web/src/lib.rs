//! Browser bindings: density sweeps of the interference moments, the NMSE
//! bound and the spectral efficiency, returned as plain number arrays.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use densemimo::analytics::{
    mu_coefficients, nmse_bound_with_mu, optimal_zeta_asymptotic_with_mu, optimal_zeta_exhaustive_with_mu,
    pilot_reuse_grid, rate_asymptotic_with_mu, se_with_mu,
};
use densemimo::{Error, NetworkParams, PathLossModel, Scheme};
use wasm_bindgen::prelude::*;

/// Curves sharing one λ axis.
#[wasm_bindgen]
#[derive(Clone, Debug, PartialEq)]
pub struct Curves {
    lambda: Vec<f64>,
    labels: Vec<String>,
    series: Vec<Vec<f64>>,
}

#[wasm_bindgen]
impl Curves {
    #[wasm_bindgen(getter)]
    pub fn lambda(&self) -> Vec<f64> {
        self.lambda.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn count(&self) -> usize {
        self.series.len()
    }

    pub fn label(&self, i: usize) -> String {
        self.labels.get(i).cloned().unwrap_or_default()
    }

    pub fn series(&self, i: usize) -> Vec<f64> {
        self.series.get(i).cloned().unwrap_or_default()
    }
}

fn log_axis(min: f64, max: f64, points: usize) -> Result<Vec<f64>, Error> {
    if !(min > 0.0 && max > min && max.is_finite()) || !(2..=2000).contains(&points) {
        return Err(Error::InvalidParams(format!("need 0 < min < max and 2..=2000 points, got {min}, {max}, {points}")));
    }
    let (a, b) = (min.ln(), max.ln());
    Ok((0..points).map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp()).collect())
}

fn model(alpha_near: f64) -> Result<PathLossModel, Error> {
    PathLossModel::new(vec![100.0], vec![alpha_near, 4.0], 8.3e-4)
}

pub fn mu_sweep(min: f64, max: f64, points: usize, alpha_near: f64) -> Result<Curves, Error> {
    let lambda = log_axis(min, max, points)?;
    let model = model(alpha_near)?;
    let mus = lambda.iter().map(|&l| mu_coefficients(&model, l)).collect::<Result<Vec<_>, _>>()?;
    Ok(Curves {
        series: vec![mus.iter().map(|m| m.mu1).collect(), mus.iter().map(|m| m.mu2).collect()],
        labels: vec!["μ₁".into(), "μ₂".into()],
        lambda,
    })
}

pub fn nmse_sweep(min: f64, max: f64, points: usize, k: usize, snr_db: f64, zetas: &[f64]) -> Result<Curves, Error> {
    let lambda = log_axis(min, max, points)?;
    let model = PathLossModel::dual_slope_default();
    let tau_c = zetas.iter().map(|z| (z * k as f64).ceil() as usize).max().unwrap_or(k).max(200);
    let mut series: Vec<Vec<f64>> = zetas.iter().map(|_| Vec::with_capacity(points)).collect();
    for &l in &lambda {
        let mu1 = mu_coefficients(&model, l)?.mu1;
        for (s, &zeta) in series.iter_mut().zip(zetas) {
            let p = NetworkParams { lambda: l, m: k + 1, k, zeta, tau_c, snr0_db: snr_db };
            s.push(nmse_bound_with_mu(mu1, &p)?);
        }
    }
    Ok(Curves { labels: zetas.iter().map(|z| format!("ζ = {z}")).collect(), series, lambda })
}

/// MR and ZF SE at their best pilot reuse factor, plus the `M → ∞` rate.
pub fn se_sweep(min: f64, max: f64, points: usize, m_over_k: usize, k: usize, tau_c: usize, snr_db: f64) -> Result<Curves, Error> {
    let lambda = log_axis(min, max, points)?;
    let model = PathLossModel::dual_slope_default();
    let grid = pilot_reuse_grid(k, tau_c);
    let mut series: Vec<Vec<f64>> = (0..3).map(|_| Vec::with_capacity(points)).collect();
    for &l in &lambda {
        let mu = mu_coefficients(&model, l)?;
        let p = NetworkParams { lambda: l, m: m_over_k * k, k, zeta: 1.0, tau_c, snr0_db: snr_db };
        p.validate()?;
        for (s, scheme) in series.iter_mut().zip(Scheme::ALL) {
            let z = optimal_zeta_exhaustive_with_mu(&mu, &p, scheme, &grid)?;
            s.push(se_with_mu(&mu, &p.with_zeta(z), scheme)?);
        }
        let z_inf = optimal_zeta_asymptotic_with_mu(mu.mu2, k, tau_c)?.clamped;
        series[2].push(rate_asymptotic_with_mu(mu.mu2, &p.with_zeta(z_inf)));
    }
    Ok(Curves { labels: vec!["MR".into(), "ZF".into(), "M → ∞".into()], series, lambda })
}

fn js(e: Error) -> JsError {
    JsError::new(&e.to_string())
}

/// μ₁ and μ₂ versus λ (BS/km²) for a dual-slope model with the given
/// near-field exponent.
#[wasm_bindgen(js_name = muCurves)]
pub fn mu_curves(min: f64, max: f64, points: usize, alpha_near: f64) -> Result<Curves, JsError> {
    mu_sweep(min, max, points, alpha_near).map_err(js)
}

#[wasm_bindgen(js_name = nmseCurves)]
pub fn nmse_curves(min: f64, max: f64, points: usize, k: usize, snr_db: f64, zetas: Vec<f64>) -> Result<Curves, JsError> {
    nmse_sweep(min, max, points, k, snr_db, &zetas).map_err(js)
}

#[wasm_bindgen(js_name = seCurves)]
pub fn se_curves(
    min: f64,
    max: f64,
    points: usize,
    m_over_k: usize,
    k: usize,
    tau_c: usize,
    snr_db: f64,
) -> Result<Curves, JsError> {
    se_sweep(min, max, points, m_over_k, k, tau_c, snr_db).map_err(js)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mu_curves_span_the_axis() {
        let c = mu_sweep(0.01, 1e4, 40, 2.1).unwrap();
        assert_eq!(c.count(), 2);
        assert_eq!(c.lambda().len(), 40);
        assert!((c.series(0)[0] - 1.0).abs() < 1e-3);
        assert!(c.series(1).windows(2).all(|w| w[1] >= w[0]));
        assert!(mu_sweep(1.0, 0.5, 10, 2.1).is_err());
        assert!(mu_sweep(1.0, 10.0, 10, 2.0).is_err());
    }

    #[test]
    fn nmse_curves_order_by_zeta() {
        let c = nmse_sweep(0.1, 300.0, 20, 10, 5.0, &[1.0, 2.0, 4.0]).unwrap();
        for i in 0..20 {
            assert!(c.series(2)[i] <= c.series(1)[i] && c.series(1)[i] <= c.series(0)[i]);
        }
        assert_eq!(c.label(0), "ζ = 1");
    }

    #[test]
    fn se_stays_below_its_limit() {
        let c = se_sweep(1.0, 300.0, 15, 10, 10, 200, 5.0).unwrap();
        for i in 0..15 {
            assert!(c.series(0)[i] < c.series(2)[i] && c.series(1)[i] < c.series(2)[i]);
        }
        assert!(se_sweep(1.0, 300.0, 15, 1, 10, 200, 5.0).is_err());
    }
}
