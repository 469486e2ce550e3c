//! Closed-form channel-estimation and spectral-efficiency quantities.
//!
//! Every model-level function (`nmse_bound`, `sinr_mr`, ...) evaluates the
//! interference moments first and then delegates to a `*_with_mu` variant, so
//! sweeps can compute `μ₁, μ₂` once per density and reuse them.

use std::f64::consts::{E, LN_2, PI};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::pathloss::PathLossModel;
use crate::specfun::{gamma_interval, lambert_w0};
use crate::{db_to_linear, per_km2_to_per_m2, Error, Result};

const SINGULAR_TOL: f64 = 1e-9;

/// Scenario descriptor shared by the closed forms and the simulator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetworkParams {
    /// BS density in BS/km².
    pub lambda: f64,
    /// Antennas per BS.
    pub m: usize,
    /// UEs per cell.
    pub k: usize,
    /// Pilot reuse factor `τ_p / K`; real-valued here.
    pub zeta: f64,
    /// Coherence block length in samples.
    pub tau_c: usize,
    /// Uniform received SNR `ρ/σ²` in dB.
    pub snr0_db: f64,
}

impl Default for NetworkParams {
    fn default() -> Self {
        Self { lambda: 10.0, m: 100, k: 10, zeta: 1.0, tau_c: 200, snr0_db: 5.0 }
    }
}

impl NetworkParams {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidParams(msg));
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return fail(format!("lambda must be positive and finite, got {}", self.lambda));
        }
        if self.m == 0 {
            return fail("M must be >= 1".into());
        }
        if self.k == 0 {
            return fail("K must be >= 1".into());
        }
        if !(self.zeta >= 1.0 && self.zeta.is_finite()) {
            return fail(format!("zeta must be >= 1, got {}", self.zeta));
        }
        if self.zeta * self.k as f64 > self.tau_c as f64 * (1.0 + 1e-12) {
            return fail(format!(
                "pilot length zeta*K = {} exceeds tau_c = {}",
                self.zeta * self.k as f64,
                self.tau_c
            ));
        }
        if self.snr0_db.is_nan() || self.snr0_db == f64::NEG_INFINITY {
            return fail(format!("SNR0 must be a finite dB value or +inf, got {}", self.snr0_db));
        }
        Ok(())
    }

    pub fn snr0(&self) -> f64 {
        db_to_linear(self.snr0_db)
    }

    /// Pilot length `τ_p = ζK`.
    pub fn tau_p(&self) -> f64 {
        self.zeta * self.k as f64
    }

    /// Fraction of the coherence block left for data, `1 - ζK/τ_c`.
    pub fn prelog(&self) -> f64 {
        (1.0 - self.tau_p() / self.tau_c as f64).max(0.0)
    }

    pub fn with_lambda(self, lambda: f64) -> Self {
        Self { lambda, ..self }
    }

    pub fn with_zeta(self, zeta: f64) -> Self {
        Self { zeta, ..self }
    }

    pub fn with_m(self, m: usize) -> Self {
        Self { m, ..self }
    }
}

/// Interference moments `(μ₁, μ₂)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MuCoefficients {
    pub mu1: f64,
    pub mu2: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scheme {
    #[serde(rename = "MR")]
    Mr,
    #[serde(rename = "ZF")]
    Zf,
}

impl Scheme {
    pub const ALL: [Scheme; 2] = [Scheme::Mr, Scheme::Zf];
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Mr => "MR",
            Scheme::Zf => "ZF",
        })
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mr" => Ok(Scheme::Mr),
            "zf" => Ok(Scheme::Zf),
            other => Err(Error::InvalidParams(format!("unknown combining scheme '{other}'"))),
        }
    }
}

/// Denominator terms of the effective SINR: `sinr = 1 / (noise + intra + inter + pc)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SinrBreakdown {
    pub scheme: Scheme,
    pub noise: f64,
    pub intra_cell: f64,
    pub inter_cell: f64,
    pub pilot_contamination: f64,
    pub sinr: f64,
}

impl SinrBreakdown {
    fn from_terms(scheme: Scheme, noise: f64, intra_cell: f64, inter_cell: f64, pilot_contamination: f64) -> Self {
        let sinr = 1.0 / (noise + intra_cell + inter_cell + pilot_contamination);
        Self { scheme, noise, intra_cell, inter_cell, pilot_contamination, sinr }
    }

    /// Non-coherent interference: intra-cell plus inter-cell.
    pub fn interference(&self) -> f64 {
        self.intra_cell + self.inter_cell
    }

    pub fn denominator(&self) -> f64 {
        self.noise + self.intra_cell + self.inter_cell + self.pilot_contamination
    }

    /// The same breakdown with the coherent term removed.
    pub fn without_pilot_contamination(&self) -> Self {
        Self::from_terms(self.scheme, self.noise, self.intra_cell, self.inter_cell, 0.0)
    }
}

/// Raw and feasible optimal pilot reuse factor.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimalZeta {
    /// Unconstrained stationary point of the asymptotic rate.
    pub raw: f64,
    /// `raw` clamped to `[1, τ_c/K]`.
    pub clamped: f64,
}

/// Interference moment `μ_κ` of the model at density `lambda` (BS/km²), `κ ∈ {1, 2}`.
///
/// Sums, over slopes, the near part `2/(κα_n − 2) · [Γ(2; πλR²_{n−1}) − Γ(2; πλR²_n)]`
/// and the far-field correction `2 c_n(κ) (πλ)^{1−κα_n/2} [Γ(1+κα_n/2; ·)]` on the
/// same interval, with unregularized upper incomplete gammas. The last slope
/// has `c_N = 0`.
pub fn mu_coefficient(model: &PathLossModel, lambda: f64, kappa: u32) -> Result<f64> {
    if kappa != 1 && kappa != 2 {
        return Err(Error::Domain(format!("kappa must be 1 or 2, got {kappa}")));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParams(format!("lambda must be positive and finite, got {lambda}")));
    }
    let kf = f64::from(kappa);
    let n_slopes = model.num_slopes();
    let alphas = model.alphas();

    let last = kf * alphas[n_slopes - 1];
    if last <= 2.0 {
        return Err(Error::Divergent { kappa, product: last });
    }
    for (n, &a) in alphas.iter().enumerate() {
        if (kf * a - 2.0).abs() <= SINGULAR_TOL {
            return Err(Error::Singular { slope: n + 1, alpha: a, kappa });
        }
    }

    let pi_lambda = PI * per_km2_to_per_m2(lambda);
    let ln_pi_lambda = pi_lambda.ln();
    let ln_upsilon: Vec<f64> = model.upsilons().iter().map(|u| u.ln()).collect();

    let mut mu = 0.0;
    for (n, &alpha) in alphas.iter().enumerate().take(n_slopes) {
        let ka = kf * alpha;
        let lo = pi_lambda * model.breakpoint(n).powi(2);
        let hi = pi_lambda * model.breakpoint(n + 1).powi(2);
        // Γ(2) = 1, so the regularized and plain forms coincide here.
        mu += 2.0 * gamma_interval(2.0, lo, hi)? / (ka - 2.0);

        if n + 1 < n_slopes {
            let c = scaled_far_field_constant(model, n, kf, ln_pi_lambda, &ln_upsilon);
            mu += 2.0 * c * gamma_interval(1.0 + ka / 2.0, lo, hi)?;
        }
    }
    Ok(mu)
}

/// `c_n(κ) · (πλ)^{1 − κα_n/2}` for a slope `n` (zero-based) below the last.
fn scaled_far_field_constant(model: &PathLossModel, n: usize, kf: f64, ln_pi_lambda: f64, ln_upsilon: &[f64]) -> f64 {
    let alphas = model.alphas();
    let ka = kf * alphas[n];
    let density_exp = 1.0 - ka / 2.0;

    // Truncation of slope n at its upper breakpoint.
    let upper = model.breakpoint(n + 1);
    let mut c = -((2.0 - ka) * upper.ln() + density_exp * ln_pi_lambda).exp() / (ka - 2.0);

    // Contributions of every farther slope, rescaled to slope n.
    for i in (n + 1)..model.num_slopes() {
        let kai = kf * alphas[i];
        let base = kf * (ln_upsilon[i] - ln_upsilon[n]) + density_exp * ln_pi_lambda;
        let inner = ((2.0 - kai) * model.breakpoint(i).ln() + base).exp();
        let outer_r = model.breakpoint(i + 1);
        let outer = if outer_r.is_finite() { ((2.0 - kai) * outer_r.ln() + base).exp() } else { 0.0 };
        c += (inner - outer) / (kai - 2.0);
    }
    c
}

pub fn mu_coefficients(model: &PathLossModel, lambda: f64) -> Result<MuCoefficients> {
    Ok(MuCoefficients { mu1: mu_coefficient(model, lambda, 1)?, mu2: mu_coefficient(model, lambda, 2)? })
}

/// Single-slope values `(2/(α−2), 1/(α−1))`; also the interval ends of the
/// multi-slope moments.
pub fn single_slope_mu(alpha: f64) -> MuCoefficients {
    MuCoefficients { mu1: 2.0 / (alpha - 2.0), mu2: 1.0 / (alpha - 1.0) }
}

/// `A(μ₁) = 1 + μ₁/ζ + 1/(ζ K SNR₀)`.
pub fn big_a(mu1: f64, params: &NetworkParams) -> f64 {
    1.0 + mu1 / params.zeta + 1.0 / (params.tau_p() * params.snr0())
}

pub fn nmse_bound_with_mu(mu1: f64, params: &NetworkParams) -> Result<f64> {
    params.validate()?;
    Ok(1.0 - 1.0 / big_a(mu1, params))
}

/// Upper bound `1 − 1/A(μ₁)` on the average channel-estimation NMSE.
pub fn nmse_bound(model: &PathLossModel, params: &NetworkParams) -> Result<f64> {
    params.validate()?;
    nmse_bound_with_mu(mu_coefficient(model, params.lambda, 1)?, params)
}

pub fn sinr_with_mu(mu: &MuCoefficients, params: &NetworkParams, scheme: Scheme) -> Result<SinrBreakdown> {
    params.validate()?;
    let a = big_a(mu.mu1, params);
    let snr = params.snr0();
    let k = params.k as f64;
    let pc = mu.mu2 / params.zeta;
    match scheme {
        Scheme::Mr => {
            let m = params.m as f64;
            Ok(SinrBreakdown::from_terms(
                scheme,
                a / (m * snr),
                k / m * a,
                k / m * (a * mu.mu1 + pc),
                pc,
            ))
        }
        Scheme::Zf => {
            if params.m <= params.k {
                return Err(Error::DegreesOfFreedom { m: params.m, k: params.k });
            }
            let dof = (params.m - params.k) as f64;
            Ok(SinrBreakdown::from_terms(
                scheme,
                a / (dof * snr),
                k / dof * (a - 1.0),
                k / dof * a * mu.mu1,
                pc,
            ))
        }
    }
}

pub fn sinr(model: &PathLossModel, params: &NetworkParams, scheme: Scheme) -> Result<SinrBreakdown> {
    params.validate()?;
    sinr_with_mu(&mu_coefficients(model, params.lambda)?, params, scheme)
}

pub fn sinr_mr(model: &PathLossModel, params: &NetworkParams) -> Result<SinrBreakdown> {
    sinr(model, params, Scheme::Mr)
}

pub fn sinr_zf(model: &PathLossModel, params: &NetworkParams) -> Result<SinrBreakdown> {
    sinr(model, params, Scheme::Zf)
}

/// `(1 − ζK/τ_c) log₂(1 + γ)`.
pub fn se_from_sinr(sinr: f64, params: &NetworkParams) -> f64 {
    params.prelog() * (1.0 + sinr).log2()
}

pub fn se_with_mu(mu: &MuCoefficients, params: &NetworkParams, scheme: Scheme) -> Result<f64> {
    let b = sinr_with_mu(mu, params, scheme)?;
    Ok(se_from_sinr(b.sinr, params))
}

/// Lower bound on the average ergodic uplink SE (bit/s/Hz) per UE.
pub fn se_lower_bound(model: &PathLossModel, params: &NetworkParams, scheme: Scheme) -> Result<f64> {
    params.validate()?;
    se_with_mu(&mu_coefficients(model, params.lambda)?, params, scheme)
}

/// `R_∞ = (1 − ζK/τ_c) log₂(1 + ζ/μ₂)`; `params.m` is ignored.
pub fn rate_asymptotic_with_mu(mu2: f64, params: &NetworkParams) -> f64 {
    params.prelog() * (1.0 + params.zeta / mu2).log2()
}

pub fn rate_asymptotic(model: &PathLossModel, params: &NetworkParams) -> Result<f64> {
    params.validate()?;
    Ok(rate_asymptotic_with_mu(mu_coefficient(model, params.lambda, 2)?, params))
}

/// `∂R_∞/∂ζ`, treating ζ as continuous.
pub fn rate_asymptotic_slope(mu2: f64, zeta: f64, k: usize, tau_c: usize) -> f64 {
    let load = k as f64 / tau_c as f64;
    -load * (1.0 + zeta / mu2).log2() + (1.0 - zeta * load) / (mu2 * LN_2 * (1.0 + zeta / mu2))
}

/// Stationary point `ζ* = μ₂ (ν / W₀(νe) − 1)`, `ν = 1 + τ_c/(μ₂K)`, of the
/// asymptotic rate.
pub fn optimal_zeta_asymptotic_with_mu(mu2: f64, k: usize, tau_c: usize) -> Result<OptimalZeta> {
    if !(mu2 > 0.0 && mu2.is_finite()) {
        return Err(Error::Domain(format!("mu2 must be positive and finite, got {mu2}")));
    }
    if k == 0 || tau_c < k {
        return Err(Error::InvalidParams(format!("need 1 <= K <= tau_c, got K = {k}, tau_c = {tau_c}")));
    }
    let nu = 1.0 + tau_c as f64 / (mu2 * k as f64);
    let raw = mu2 * (nu / lambert_w0(nu * E)? - 1.0);
    let clamped = raw.clamp(1.0, tau_c as f64 / k as f64);
    Ok(OptimalZeta { raw, clamped })
}

pub fn optimal_zeta_asymptotic(model: &PathLossModel, lambda: f64, k: usize, tau_c: usize) -> Result<OptimalZeta> {
    optimal_zeta_asymptotic_with_mu(mu_coefficient(model, lambda, 2)?, k, tau_c)
}

/// Pilot reuse factors realizable with integer pilot lengths: `τ_p/K` for
/// `τ_p = K, K+1, …, τ_c`.
pub fn pilot_reuse_grid(k: usize, tau_c: usize) -> Vec<f64> {
    (k..=tau_c).map(|tp| tp as f64 / k as f64).collect()
}

pub fn optimal_zeta_exhaustive_with_mu(
    mu: &MuCoefficients,
    params: &NetworkParams,
    scheme: Scheme,
    grid: &[f64],
) -> Result<f64> {
    let upper = params.tau_c as f64 / params.k as f64;
    let mut feasible: Vec<f64> =
        grid.iter().copied().filter(|z| z.is_finite() && *z >= 1.0 && *z <= upper * (1.0 + 1e-12)).collect();
    if feasible.is_empty() {
        return Err(Error::EmptyGrid(format!("no zeta in [1, {upper}] among {} candidates", grid.len())));
    }
    feasible.sort_by(f64::total_cmp);
    let mut best = (feasible[0], f64::NEG_INFINITY);
    for z in feasible {
        let se = se_with_mu(mu, &params.with_zeta(z), scheme)?;
        // Strict comparison keeps the smallest ζ among ties.
        if se > best.1 {
            best = (z, se);
        }
    }
    Ok(best.0)
}

/// Grid argmax of the SE lower bound over ζ; `params.zeta` is ignored.
pub fn optimal_zeta_exhaustive(
    model: &PathLossModel,
    params: &NetworkParams,
    scheme: Scheme,
    grid: &[f64],
) -> Result<f64> {
    let mu = mu_coefficients(model, params.lambda)?;
    optimal_zeta_exhaustive_with_mu(&mu, params, scheme, grid)
}

/// Antenna-UE ratio `M/K` at which intra- plus inter-cell interference equals
/// pilot contamination. Above it, contamination dominates. `params.m` is ignored.
pub fn crossover_with_mu(mu: &MuCoefficients, params: &NetworkParams, scheme: Scheme) -> Result<f64> {
    params.validate()?;
    if !(mu.mu2 > 0.0) {
        return Err(Error::Domain(format!("crossover needs mu2 > 0, got {}", mu.mu2)));
    }
    let a = big_a(mu.mu1, params);
    let pc = mu.mu2 / params.zeta;
    Ok(match scheme {
        Scheme::Mr => (a * (1.0 + mu.mu1) + pc) / pc,
        Scheme::Zf => 1.0 + ((a - 1.0) + a * mu.mu1) / pc,
    })
}

pub fn crossover_antenna_ratio(model: &PathLossModel, params: &NetworkParams, scheme: Scheme) -> Result<f64> {
    params.validate()?;
    crossover_with_mu(&mu_coefficients(model, params.lambda)?, params, scheme)
}

/// Area spectral efficiency `λ K SE` in bit/s/Hz/km².
pub fn area_se(model: &PathLossModel, params: &NetworkParams, scheme: Scheme) -> Result<f64> {
    Ok(params.lambda * params.k as f64 * se_lower_bound(model, params, scheme)?)
}

pub fn area_se_with_mu(mu: &MuCoefficients, params: &NetworkParams, scheme: Scheme) -> Result<f64> {
    Ok(params.lambda * params.k as f64 * se_with_mu(mu, params, scheme)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn single4() -> PathLossModel {
        PathLossModel::single_slope(4.0, 1.0).unwrap()
    }

    fn base() -> NetworkParams {
        NetworkParams { lambda: 10.0, m: 100, k: 10, zeta: 1.0, tau_c: 200, snr0_db: 5.0 }
    }

    #[test]
    fn single_slope_moments() {
        for &lambda in &[1e-3, 1.0, 50.0, 1e5] {
            assert!(close(mu_coefficient(&single4(), lambda, 1).unwrap(), 1.0, 1e-12));
            assert!(close(mu_coefficient(&single4(), lambda, 2).unwrap(), 1.0 / 3.0, 1e-12));
        }
    }

    #[test]
    fn moment_errors() {
        let m = PathLossModel::single_slope(4.0, 1.0).unwrap();
        assert!(matches!(mu_coefficient(&m, 1.0, 3), Err(Error::Domain(_))));
        assert!(mu_coefficient(&m, 0.0, 1).is_err());
        // κα₁ = 2 on an inner slope.
        let singular = PathLossModel::new(vec![50.0], vec![2.0, 4.0], 1.0).unwrap();
        assert!(matches!(mu_coefficient(&singular, 1.0, 1), Err(Error::Singular { slope: 1, .. })));
        // α_N barely above 2: rejected as singular before it can diverge.
        let m2 = PathLossModel::new(vec![50.0], vec![0.5, 2.0 + 1e-12], 1.0).unwrap();
        assert!(matches!(mu_coefficient(&m2, 1.0, 1), Err(Error::Singular { slope: 2, .. })));
    }

    #[test]
    fn big_a_examples() {
        let p = base();
        assert!(close(big_a(1.0, &p), 2.0316, 1e-4));
        let p4 = NetworkParams { zeta: 4.0, ..p };
        assert!(close(big_a(20.0, &p4), 6.0079, 1e-4));
        let ideal = NetworkParams { snr0_db: f64::INFINITY, ..p };
        assert_eq!(big_a(0.0, &ideal), 1.0);
    }

    #[test]
    fn nmse_examples() {
        assert!(close(nmse_bound(&single4(), &base()).unwrap(), 0.5078, 1e-4));
        let ideal = NetworkParams { snr0_db: f64::INFINITY, ..base() };
        assert_eq!(nmse_bound_with_mu(0.0, &ideal).unwrap(), 0.0);
    }

    #[test]
    fn mr_breakdown_example() {
        let b = sinr_mr(&single4(), &base()).unwrap();
        assert!(close(b.noise, 0.00642, 1e-5));
        assert!(close(b.intra_cell, 0.20316, 1e-5));
        assert!(close(b.inter_cell, 0.23650, 1e-5));
        assert!(close(b.pilot_contamination, 1.0 / 3.0, 1e-12));
        assert!(close(b.sinr, 1.283, 1e-3));
        assert!(close(b.sinr, 1.0 / b.denominator(), 1e-15));
    }

    #[test]
    fn mr_without_interference_moments() {
        let p = base();
        let b = sinr_with_mu(&MuCoefficients { mu1: 0.0, mu2: 0.0 }, &p, Scheme::Mr).unwrap();
        let a = 1.0 + 1.0 / (p.tau_p() * p.snr0());
        let expected = a / (p.m as f64 * p.snr0()) + p.k as f64 / p.m as f64 * a;
        assert!(close(b.denominator(), expected, 1e-15));
    }

    #[test]
    fn zf_breakdown() {
        let p = base();
        let b = sinr_zf(&single4(), &p).unwrap();
        let a = 1.0 + 1.0 + 1.0 / (10.0 * p.snr0());
        assert!(close(b.noise, a / (90.0 * p.snr0()), 1e-15));
        assert!(close(b.intra_cell, 10.0 / 90.0 * (a - 1.0), 1e-15));
        assert!(close(b.inter_cell, 10.0 / 90.0 * a, 1e-15));
        assert!(close(b.pilot_contamination, 1.0 / 3.0, 1e-15));

        let perfect = NetworkParams { snr0_db: f64::INFINITY, ..p };
        let b = sinr_with_mu(&MuCoefficients { mu1: 0.0, mu2: 0.1 }, &perfect, Scheme::Zf).unwrap();
        assert_eq!(b.intra_cell, 0.0);

        let err = sinr_zf(&single4(), &NetworkParams { m: 10, ..p });
        assert!(matches!(err, Err(Error::DegreesOfFreedom { m: 10, k: 10 })));
    }

    #[test]
    fn se_examples() {
        let p = base();
        let se = se_lower_bound(&single4(), &p, Scheme::Mr).unwrap();
        assert!(close(se, 0.95 * (2.283f64).log2(), 2e-3));
        assert!(close(se, 1.131, 1e-3));
        let full = NetworkParams { zeta: 20.0, ..p };
        assert_eq!(se_lower_bound(&single4(), &full, Scheme::Mr).unwrap(), 0.0);
    }

    #[test]
    fn asymptotic_rate_examples() {
        let p = base();
        assert!(close(rate_asymptotic_with_mu(1.0 / 3.0, &p), 1.9, 1e-12));
        assert!(close(rate_asymptotic(&single4(), &p).unwrap(), 1.9, 1e-12));
        assert_eq!(rate_asymptotic_with_mu(1.0 / 3.0, &NetworkParams { zeta: 20.0, ..p }), 0.0);
        let huge = NetworkParams { m: 10 * 1_000_000, ..p };
        let se = se_lower_bound(&single4(), &huge, Scheme::Mr).unwrap();
        assert!(((se - 1.9) / 1.9).abs() < 1e-3);
    }

    #[test]
    fn optimal_zeta_worked_value() {
        let z = optimal_zeta_asymptotic_with_mu(1.0 / 3.0, 10, 200).unwrap();
        assert!(close(z.raw, 5.04, 1e-2), "{z:?}");
        assert_eq!(z.raw, z.clamped);
        assert!(rate_asymptotic_slope(1.0 / 3.0, z.raw, 10, 200).abs() < 1e-12);
        // No SNR dependence.
        let a = optimal_zeta_asymptotic(&single4(), 5.0, 10, 200).unwrap();
        assert!(close(a.raw, z.raw, 1e-12));
    }

    #[test]
    fn optimal_zeta_clamps() {
        // Tiny coherence block: stationary point lies below 1.
        let z = optimal_zeta_asymptotic_with_mu(0.9, 10, 12).unwrap();
        assert!(z.raw < 1.0);
        assert_eq!(z.clamped, 1.0);
        assert!(optimal_zeta_asymptotic_with_mu(0.0, 10, 200).is_err());
    }

    #[test]
    fn exhaustive_search() {
        let model = single4();
        let p = base();
        assert_eq!(optimal_zeta_exhaustive(&model, &p, Scheme::Mr, &[3.0]).unwrap(), 3.0);
        assert!(matches!(optimal_zeta_exhaustive(&model, &p, Scheme::Mr, &[0.5, 25.0]), Err(Error::EmptyGrid(_))));
        assert!(optimal_zeta_exhaustive(&model, &p, Scheme::Mr, &[]).is_err());
        assert_eq!(optimal_zeta_exhaustive(&model, &p, Scheme::Mr, &[2.0, 2.0, 2.0]).unwrap(), 2.0);
    }

    #[test]
    fn crossover_example_and_ordering() {
        let p = base();
        let mr = crossover_antenna_ratio(&single4(), &p, Scheme::Mr).unwrap();
        assert!(close(mr, 13.19, 5e-3), "{mr}");
        let zf = crossover_antenna_ratio(&single4(), &p, Scheme::Zf).unwrap();
        // MR spends more interference budget, so contamination takes over later.
        assert!(close(mr - zf, p.zeta / (1.0 / 3.0), 1e-9));
    }

    #[test]
    fn crossover_equalizes_terms() {
        let model = PathLossModel::dual_slope_default();
        let p = NetworkParams { lambda: 40.0, zeta: 2.0, ..base() };
        for scheme in Scheme::ALL {
            let ratio = crossover_antenna_ratio(&model, &p, scheme).unwrap();
            // Evaluate the breakdown at the (real-valued) crossover through the mu path.
            let mu = mu_coefficients(&model, p.lambda).unwrap();
            let a = big_a(mu.mu1, &p);
            let k = p.k as f64;
            let m = ratio * k;
            let interference = match scheme {
                Scheme::Mr => k / m * (a + a * mu.mu1 + mu.mu2 / p.zeta),
                Scheme::Zf => k / (m - k) * ((a - 1.0) + a * mu.mu1),
            };
            assert!(close(interference, mu.mu2 / p.zeta, 1e-12), "{scheme}");
        }
    }

    #[test]
    fn area_se_linear() {
        let model = PathLossModel::dual_slope_default();
        let p = base();
        let mu = mu_coefficients(&model, p.lambda).unwrap();
        let a1 = area_se_with_mu(&mu, &p, Scheme::Zf).unwrap();
        let a2 = area_se_with_mu(&mu, &p.with_lambda(2.0 * p.lambda), Scheme::Zf).unwrap();
        assert!(close(a2, 2.0 * a1, 1e-12));
        let doubled_k = NetworkParams { k: 20, m: 200, ..p };
        let se_k = se_with_mu(&mu, &doubled_k, Scheme::Zf).unwrap();
        assert!(close(area_se_with_mu(&mu, &doubled_k, Scheme::Zf).unwrap(), p.lambda * 20.0 * se_k, 1e-12));
        let full = NetworkParams { zeta: 20.0, ..p };
        assert_eq!(area_se(&model, &full, Scheme::Mr).unwrap(), 0.0);
    }

    #[test]
    fn params_validation() {
        assert!(NetworkParams { zeta: 0.5, ..base() }.validate().is_err());
        assert!(NetworkParams { zeta: 21.0, ..base() }.validate().is_err());
        assert!(NetworkParams { lambda: 0.0, ..base() }.validate().is_err());
        assert!(NetworkParams { k: 0, ..base() }.validate().is_err());
        assert!(NetworkParams { m: 0, ..base() }.validate().is_err());
        assert!(NetworkParams { snr0_db: f64::NAN, ..base() }.validate().is_err());
        assert!(base().validate().is_ok());
        assert_eq!("zf".parse::<Scheme>().unwrap(), Scheme::Zf);
        assert!("mmse".parse::<Scheme>().is_err());
    }
}
