//! Closed-form sweeps. Every command maps a λ grid to rows; rows come back in
//! grid order whatever the evaluation order.

use densemimo::analytics::{
    area_se_with_mu, crossover_with_mu, mu_coefficients, nmse_bound_with_mu, optimal_zeta_asymptotic_with_mu,
    optimal_zeta_exhaustive_with_mu, pilot_reuse_grid, rate_asymptotic_with_mu, se_with_mu,
};
use densemimo::{MuCoefficients, NetworkParams, PathLossModel, Scheme};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{usage, Result};

/// Inputs shared by every sweep.
#[derive(Clone, Debug)]
pub struct Setup {
    pub model: PathLossModel,
    pub lambdas: Vec<f64>,
    pub k: usize,
    pub tau_c: usize,
    pub snr_db: f64,
}

impl Setup {
    fn params(&self, lambda: f64, m: usize, zeta: f64) -> NetworkParams {
        NetworkParams { lambda, m, k: self.k, zeta, tau_c: self.tau_c, snr0_db: self.snr_db }
    }

    fn sweep<R: Send>(&self, f: impl Fn(f64, &MuCoefficients) -> Result<Vec<R>> + Sync) -> Result<Vec<R>> {
        let per_point: Vec<Vec<R>> = self
            .lambdas
            .par_iter()
            .map(|&lambda| f(lambda, &mu_coefficients(&self.model, lambda)?))
            .collect::<Result<_>>()?;
        Ok(per_point.into_iter().flatten().collect())
    }
}

/// Antenna count for an antenna-UE ratio; `M/K · K` must be a whole number.
pub fn antennas(m_over_k: f64, k: usize) -> Result<usize> {
    let m = m_over_k * k as f64;
    let rounded = m.round();
    if !(rounded >= 1.0) || (m - rounded).abs() > 1e-9 * rounded.max(1.0) {
        return usage(format!("M/K = {m_over_k} with K = {k} does not give a whole antenna count"));
    }
    Ok(rounded as usize)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MuRow {
    pub lambda: f64,
    pub mu1: f64,
    pub mu2: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NmseRow {
    pub lambda: f64,
    pub zeta: f64,
    pub nmse_bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrossoverRow {
    pub lambda: f64,
    pub scheme: Scheme,
    pub zeta: f64,
    pub m_over_k_crossover: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeRow {
    pub lambda: f64,
    pub scheme: Scheme,
    pub m_over_k: f64,
    pub zeta_used: f64,
    pub se: f64,
    pub r_inf: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AseRow {
    pub lambda: f64,
    pub scheme: Scheme,
    pub ase: f64,
}

pub fn mu(setup: &Setup) -> Result<Vec<MuRow>> {
    setup.sweep(|lambda, mu| Ok(vec![MuRow { lambda, mu1: mu.mu1, mu2: mu.mu2 }]))
}

pub fn nmse(setup: &Setup, zetas: &[f64]) -> Result<Vec<NmseRow>> {
    if zetas.is_empty() {
        return usage("nmse needs at least one --zeta value");
    }
    setup.sweep(|lambda, mu| {
        zetas
            .iter()
            .map(|&zeta| {
                let p = setup.params(lambda, setup.k, zeta);
                Ok(NmseRow { lambda, zeta, nmse_bound: nmse_bound_with_mu(mu.mu1, &p)? })
            })
            .collect()
    })
}

pub fn crossover(setup: &Setup, schemes: &[Scheme], zetas: &[f64]) -> Result<Vec<CrossoverRow>> {
    if zetas.is_empty() || schemes.is_empty() {
        return usage("crossover needs at least one --zeta and one --scheme");
    }
    setup.sweep(|lambda, mu| {
        let mut rows = Vec::new();
        for &scheme in schemes {
            for &zeta in zetas {
                let p = setup.params(lambda, setup.k + 1, zeta);
                rows.push(CrossoverRow { lambda, scheme, zeta, m_over_k_crossover: crossover_with_mu(mu, &p, scheme)? });
            }
        }
        Ok(rows)
    })
}

/// How `se` picks the pilot reuse factor.
#[derive(Clone, Debug, PartialEq)]
pub enum ZetaChoice {
    Fixed(Vec<f64>),
    /// Grid argmax over `τ_p = K, …, τ_c`.
    Optimize,
}

/// SE per (λ, scheme, M/K). `r_inf` is the `M → ∞` rate at the
/// asymptotically optimal reuse factor, clamped to the feasible range.
pub fn se(setup: &Setup, schemes: &[Scheme], mks: &[f64], zeta: &ZetaChoice) -> Result<Vec<SeRow>> {
    if mks.is_empty() || schemes.is_empty() {
        return usage("se needs at least one --mk and one --scheme");
    }
    if let ZetaChoice::Fixed(z) = zeta {
        if z.is_empty() {
            return usage("se needs --zeta values or --optimize-zeta");
        }
    }
    let ms = mks.iter().map(|&mk| antennas(mk, setup.k)).collect::<Result<Vec<_>>>()?;
    let grid = pilot_reuse_grid(setup.k, setup.tau_c);
    setup.sweep(|lambda, mu| {
        let z_inf = optimal_zeta_asymptotic_with_mu(mu.mu2, setup.k, setup.tau_c)?.clamped;
        let r_inf = rate_asymptotic_with_mu(mu.mu2, &setup.params(lambda, 1, z_inf));
        let mut rows = Vec::new();
        for &scheme in schemes {
            for (&m_over_k, &m) in mks.iter().zip(&ms) {
                let base = setup.params(lambda, m, 1.0);
                let zetas = match zeta {
                    ZetaChoice::Fixed(z) => z.clone(),
                    ZetaChoice::Optimize => vec![optimal_zeta_exhaustive_with_mu(mu, &base, scheme, &grid)?],
                };
                for zeta_used in zetas {
                    let se = se_with_mu(mu, &base.with_zeta(zeta_used), scheme)?;
                    rows.push(SeRow { lambda, scheme, m_over_k, zeta_used, se, r_inf });
                }
            }
        }
        Ok(rows)
    })
}

pub fn ase(setup: &Setup, schemes: &[Scheme], m_over_k: f64, zeta: f64) -> Result<Vec<AseRow>> {
    if schemes.is_empty() {
        return usage("ase needs at least one --scheme");
    }
    let m = antennas(m_over_k, setup.k)?;
    setup.sweep(|lambda, mu| {
        let p = setup.params(lambda, m, zeta);
        schemes.iter().map(|&scheme| Ok(AseRow { lambda, scheme, ase: area_se_with_mu(mu, &p, scheme)? })).collect()
    })
}
