//! Monte Carlo realization of the network model.
//!
//! Each trial draws an independent deployment from its own RNG substreams,
//! so results depend only on `(master_seed, trial index)`. Trials run in
//! parallel and are folded in index order, which keeps every estimate
//! bit-identical across thread counts.

pub mod geometry;
mod rng;
pub mod stats;
mod uatf;

use std::f64::consts::PI;

use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytics::{NetworkParams, Scheme};
use crate::pathloss::PathLossModel;
use crate::{per_km2_to_per_m2, Error, Result};

pub use geometry::{drop_ues, generate_network, polygon_area, voronoi_cell, NetworkRealization, Point};
use rng::{stream_rng, Stream};
pub use stats::{jackknife, Estimate, Welford};
pub use uatf::MAX_GRAM_CONDITION;

/// How other cells share the typical UE's pilot.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PilotMode {
    /// Every other cell reuses each typical pilot independently with
    /// probability `1/ζ`.
    #[default]
    Bernoulli,
    /// `τ_p = ζK` orthogonal pilots; each cell picks a random ordered
    /// `K`-subset. Needs integer `ζK`.
    ExplicitBook,
}

/// Which BS plays the role of the typical cell.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TypicalBs {
    /// A BS added at the window center on top of the PPP (Palm distribution).
    #[default]
    Palm,
    /// The PPP point nearest the center; its cell is size-biased.
    NearestToCenter,
}

/// How interfering cells are weighted in the moment estimator.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MuWeighting {
    /// Each cell's term is scaled by `λ·|cell|`, so the one UE per cell
    /// stands in for a spatially uniform UE population.
    #[default]
    CellArea,
    /// Plain sum over cells: one uniformly placed UE per cell, every cell
    /// counted once regardless of size.
    Uniform,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CsiMode {
    /// MMSE estimates from contaminated pilots.
    #[default]
    Estimated,
    /// The combiner sees the true channels of the typical cell.
    Perfect,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    pub window_radius_m: f64,
    /// Trials whose typical BS lies farther from the center are discarded.
    pub guard_radius_m: f64,
    pub trials: u64,
    pub master_seed: u64,
    /// UEs per cell for [`generate_network`] + [`drop_ues`] callers; estimators
    /// that take [`NetworkParams`] use `params.k` instead.
    pub ue_per_cell: usize,
    pub pilot_mode: PilotMode,
    pub typical_bs: TypicalBs,
    /// Fading draws per geometry in the UatF estimator.
    pub fading_samples: usize,
    pub csi: CsiMode,
    pub mu_weighting: MuWeighting,
    /// Adds the expected contribution of cells beyond the window to the
    /// moment estimator, using the path-loss tail and the serving-distance
    /// moments observed inside the window.
    pub tail_correction: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            window_radius_m: 2000.0,
            guard_radius_m: 500.0,
            trials: 1000,
            master_seed: 0,
            ue_per_cell: 10,
            pilot_mode: PilotMode::Bernoulli,
            typical_bs: TypicalBs::Palm,
            fading_samples: 16,
            csi: CsiMode::Estimated,
            mu_weighting: MuWeighting::CellArea,
            tail_correction: true,
        }
    }
}

impl SimConfig {
    /// Window holding `expected_bs` BSs on average at density `lambda`
    /// (BS/km²), guard radius a quarter of it.
    pub fn for_density(lambda: f64, expected_bs: f64) -> Self {
        let w = (expected_bs / (PI * per_km2_to_per_m2(lambda))).sqrt();
        Self { window_radius_m: w, guard_radius_m: w / 4.0, ..Self::default() }
    }

    pub fn with_trials(self, trials: u64) -> Self {
        Self { trials, ..self }
    }

    pub fn with_seed(self, master_seed: u64) -> Self {
        Self { master_seed, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if !(self.window_radius_m > 0.0 && self.window_radius_m.is_finite()) {
            return fail(format!("window radius must be positive, got {}", self.window_radius_m));
        }
        if !(self.guard_radius_m >= 0.0 && self.guard_radius_m <= self.window_radius_m / 2.0) {
            return fail(format!(
                "guard radius {} must lie in [0, window/2 = {}]",
                self.guard_radius_m,
                self.window_radius_m / 2.0
            ));
        }
        if self.trials == 0 {
            return fail("trials must be >= 1".into());
        }
        if self.fading_samples < 2 {
            return fail("fading_samples must be >= 2".into());
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(text)?;
        c.validate()?;
        Ok(c)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MuEstimate {
    pub mu1: Estimate,
    pub mu2: Estimate,
    pub n_effective: u64,
    /// Trials whose typical BS fell outside the guard radius.
    pub discarded: u64,
    pub count_redraws: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NmseEstimate {
    pub nmse: Estimate,
    pub n_effective: u64,
    pub discarded: u64,
    pub count_redraws: u64,
}

/// Empirical UatF SINR and its denominator terms, each normalized by the
/// signal power so they compare directly with the closed-form breakdown.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UatfEstimate {
    pub scheme: Scheme,
    pub sinr: Estimate,
    pub noise: Estimate,
    pub intra_cell: Estimate,
    pub inter_cell: Estimate,
    pub pilot_contamination: Estimate,
    /// Raw signal power `|E{vᴴh}|²` (`M` for MR, `1` for ZF in expectation).
    pub signal: Estimate,
    pub n_effective: u64,
    pub discarded: u64,
    /// Geometries dropped because the ZF Gram matrix was ill-conditioned.
    pub singular: u64,
    pub fading_samples: u64,
}

/// Everything one validation run estimates at a single density.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialStats {
    pub lambda: f64,
    pub trials: u64,
    pub master_seed: u64,
    pub mu1_hat: Estimate,
    pub mu2_hat: Estimate,
    pub nmse_hat: Estimate,
    pub sinr_terms_hat: Vec<UatfEstimate>,
    pub n_effective: u64,
}

/// `(β(|u − x_j|)/β(|u − x_l|))` for a UE at `u` served by `x_l`, seen from `x_j`.
#[inline]
pub fn interferer_ratio(model: &PathLossModel, ue: Point, serving: Point, typical: Point) -> f64 {
    const MIN_D: f64 = 1e-9;
    model.gain(ue.dist(typical).max(MIN_D)) / model.gain(ue.dist(serving).max(MIN_D))
}

/// Fills `net.pilot_share` for `k` UEs per cell at reuse factor `zeta`.
pub fn assign_pilots(
    net: &mut NetworkRealization,
    k: usize,
    zeta: f64,
    config: &SimConfig,
    trial: u64,
) -> Result<()> {
    if !(zeta >= 1.0 && zeta.is_finite()) {
        return Err(Error::InvalidParams(format!("zeta must be >= 1, got {zeta}")));
    }
    let mut rng = stream_rng(config.master_seed, trial, Stream::Pilots);
    let n = net.num_bs();
    let j = net.typical;
    net.pilot_share = vec![vec![None; k]; n];
    net.pilot_share[j] = (0..k).map(Some).collect();
    match config.pilot_mode {
        PilotMode::Bernoulli => {
            let p = 1.0 / zeta;
            for (l, row) in net.pilot_share.iter_mut().enumerate() {
                if l == j {
                    continue;
                }
                for (i, slot) in row.iter_mut().enumerate() {
                    if rng.random::<f64>() < p {
                        *slot = Some(i);
                    }
                }
            }
        }
        PilotMode::ExplicitBook => {
            let tau_p = zeta * k as f64;
            let rounded = tau_p.round();
            if (tau_p - rounded).abs() > 1e-9 {
                return Err(Error::Config(format!("explicit pilot book needs integer zeta*K, got {tau_p}")));
            }
            let tau_p = rounded as usize;
            let typical_pilots = sample(&mut rng, tau_p, k).into_vec();
            let mut owner = vec![None; tau_p];
            for (t, &p) in typical_pilots.iter().enumerate() {
                owner[p] = Some(t);
            }
            for (l, row) in net.pilot_share.iter_mut().enumerate() {
                if l == j {
                    continue;
                }
                for (slot, p) in row.iter_mut().zip(sample(&mut rng, tau_p, k)) {
                    *slot = owner[p];
                }
            }
        }
    }
    Ok(())
}

/// Runs `f` over every trial index in parallel and returns results in index
/// order.
fn run_trials<T, F>(trials: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    (0..trials).into_par_iter().map(f).collect()
}

enum Trial<T> {
    Kept(T, u32),
    Discarded(u32),
}

/// Deployment for one trial, or `None` when the typical BS misses the guard.
fn deploy(lambda: f64, k: usize, config: &SimConfig, trial: u64) -> Result<Trial<NetworkRealization>> {
    let mut net = generate_network(lambda, config, trial)?;
    let redraws = net.count_redraws;
    if net.bs_positions[net.typical].norm() > config.guard_radius_m {
        return Ok(Trial::Discarded(redraws));
    }
    drop_ues(&mut net, k, config, trial)?;
    Ok(Trial::Kept(net, redraws))
}

fn check_inputs(lambda: f64, config: &SimConfig) -> Result<()> {
    config.validate()?;
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParams(format!("lambda must be positive and finite, got {lambda}")));
    }
    Ok(())
}

/// Empirical `μ₁, μ₂`: per trial, `Σ_{l≠j} r_l^κ` over one UE per other cell.
pub fn estimate_mu(model: &PathLossModel, lambda: f64, config: &SimConfig) -> Result<MuEstimate> {
    check_inputs(lambda, config)?;
    let per_trial = run_trials(config.trials, |t| {
        Ok(match deploy(lambda, 1, config, t)? {
            Trial::Discarded(r) => Trial::Discarded(r),
            Trial::Kept(net, r) => Trial::Kept(mu_sums(model, &net, lambda, config)?, r),
        })
    })?;
    let (mut w1, mut w2) = (Welford::default(), Welford::default());
    let (mut discarded, mut redraws) = (0, 0);
    for t in per_trial {
        match t {
            Trial::Kept((s1, s2), r) => {
                w1.push(s1);
                w2.push(s2);
                redraws += u64::from(r);
            }
            Trial::Discarded(r) => {
                discarded += 1;
                redraws += u64::from(r);
            }
        }
    }
    if w1.count() == 0 {
        return Err(Error::Config("every trial was discarded by the guard radius".into()));
    }
    Ok(MuEstimate {
        mu1: w1.estimate(),
        mu2: w2.estimate(),
        n_effective: w1.count(),
        discarded,
        count_redraws: redraws,
    })
}

/// Per-trial `(μ₁, μ₂)` sample from UE 0 of every non-typical cell, weighted
/// and tail-corrected as configured.
pub fn mu_sums(model: &PathLossModel, net: &NetworkRealization, lambda: f64, config: &SimConfig) -> Result<(f64, f64)> {
    let lambda_m2 = per_km2_to_per_m2(lambda);
    let w = net.window_radius_m;
    let area_weighted = config.mu_weighting == MuWeighting::CellArea;
    if area_weighted && net.cell_areas.len() != net.num_bs() {
        return Err(Error::Config("cell areas missing; drop UEs first".into()));
    }
    let x_j = net.bs_positions[net.typical];
    let (mut s1, mut s2) = (0.0, 0.0);
    // Serving-gain moments E[β(d)^-κ] from cells well inside the window.
    let (mut g1, mut g2, mut gw) = (0.0, 0.0, 0.0);
    for (l, ues) in net.ue_positions.iter().enumerate() {
        if l == net.typical {
            continue;
        }
        let (u, x_l) = (ues[0], net.bs_positions[l]);
        let serving = model.gain(u.dist(x_l).max(1e-9));
        let r = model.gain(u.dist(x_j).max(1e-9)) / serving;
        let weight = if area_weighted {
            if u.norm() > w {
                0.0
            } else {
                lambda_m2 * net.cell_areas[l]
            }
        } else {
            1.0
        };
        s1 += weight * r;
        s2 += weight * r * r;
        if config.tail_correction && x_l.norm() < 0.5 * w {
            let a = if area_weighted { net.cell_areas[l] } else { 1.0 };
            let inv = 1.0 / serving;
            g1 += a * inv;
            g2 += a * inv * inv;
            gw += a;
        }
    }
    if config.tail_correction && gw > 0.0 {
        let mass = 2.0 * PI * lambda_m2;
        s1 += mass * model.tail_moment(w, 1.0)? * g1 / gw;
        s2 += mass * model.tail_moment(w, 2.0)? * g2 / gw;
    }
    Ok((s1, s2))
}

/// Estimation NMSE `1 − 1/X` of the typical UE in one realization with
/// assigned pilots, `X = 1 + Σ a r + 1/(τ_p SNR₀)`.
pub fn realization_nmse(model: &PathLossModel, net: &NetworkRealization, params: &NetworkParams) -> f64 {
    let x_j = net.bs_positions[net.typical];
    let snr = params.snr0();
    let mut x = 1.0 + if snr.is_infinite() { 0.0 } else { 1.0 / (params.tau_p() * snr) };
    for (l, ues) in net.ue_positions.iter().enumerate() {
        if l == net.typical {
            continue;
        }
        for (i, &u) in ues.iter().enumerate() {
            if net.pilot_share[l][i] == Some(0) {
                x += interferer_ratio(model, u, net.bs_positions[l], x_j);
            }
        }
    }
    1.0 - 1.0 / x
}

pub fn estimate_nmse(
    model: &PathLossModel,
    lambda: f64,
    params: &NetworkParams,
    config: &SimConfig,
) -> Result<NmseEstimate> {
    check_inputs(lambda, config)?;
    let params = params.with_lambda(lambda);
    params.validate()?;
    let per_trial = run_trials(config.trials, |t| {
        Ok(match deploy(lambda, params.k, config, t)? {
            Trial::Discarded(r) => Trial::Discarded(r),
            Trial::Kept(mut net, r) => {
                assign_pilots(&mut net, params.k, params.zeta, config, t)?;
                Trial::Kept(realization_nmse(model, &net, &params), r)
            }
        })
    })?;
    let mut w = Welford::default();
    let (mut discarded, mut redraws) = (0, 0);
    for t in per_trial {
        match t {
            Trial::Kept(x, r) => {
                w.push(x);
                redraws += u64::from(r);
            }
            Trial::Discarded(r) => {
                discarded += 1;
                redraws += u64::from(r);
            }
        }
    }
    if w.count() == 0 {
        return Err(Error::Config("every trial was discarded by the guard radius".into()));
    }
    Ok(NmseEstimate { nmse: w.estimate(), n_effective: w.count(), discarded, count_redraws: redraws })
}

enum UatfTrial {
    Terms(Vec<f64>),
    Discarded,
    Singular,
}

/// Empirical UatF SINR over `config.trials` geometries with
/// `config.fading_samples` fading draws each.
pub fn estimate_uatf_sinr(
    model: &PathLossModel,
    lambda: f64,
    params: &NetworkParams,
    config: &SimConfig,
    scheme: Scheme,
) -> Result<UatfEstimate> {
    check_inputs(lambda, config)?;
    let params = params.with_lambda(lambda);
    params.validate()?;
    if scheme == Scheme::Zf && params.m <= params.k {
        return Err(Error::DegreesOfFreedom { m: params.m, k: params.k });
    }
    let per_trial = run_trials(config.trials, |t| {
        Ok(match deploy(lambda, params.k, config, t)? {
            Trial::Discarded(_) => UatfTrial::Discarded,
            Trial::Kept(mut net, _) => {
                assign_pilots(&mut net, params.k, params.zeta, config, t)?;
                match uatf::geometry_terms(&net, model, &params, config, scheme, t) {
                    uatf::GeometryOutcome::Terms(g) => UatfTrial::Terms(g.to_row()),
                    uatf::GeometryOutcome::Singular => UatfTrial::Singular,
                }
            }
        })
    })?;
    let (mut discarded, mut singular) = (0, 0);
    let mut rows = Vec::with_capacity(per_trial.len());
    for t in per_trial {
        match t {
            UatfTrial::Terms(row) => rows.push(row),
            UatfTrial::Discarded => discarded += 1,
            UatfTrial::Singular => singular += 1,
        }
    }
    uatf_from_rows(scheme, &rows, discarded, singular, config.fading_samples as u64)
}

/// UatF on a fixed realization (pilots assigned), for controlled scenarios.
/// Returns `None` when ZF meets an ill-conditioned Gram matrix.
pub fn realization_uatf(
    model: &PathLossModel,
    net: &NetworkRealization,
    params: &NetworkParams,
    config: &SimConfig,
    scheme: Scheme,
    trial: u64,
) -> Result<Option<UatfEstimate>> {
    config.validate()?;
    params.validate()?;
    if net.pilot_share.len() != net.num_bs() {
        return Err(Error::Config("pilots must be assigned before running UatF".into()));
    }
    if scheme == Scheme::Zf && params.m <= params.k {
        return Err(Error::DegreesOfFreedom { m: params.m, k: params.k });
    }
    Ok(match uatf::geometry_terms(net, model, params, config, scheme, trial) {
        uatf::GeometryOutcome::Terms(g) => {
            Some(uatf_from_rows(scheme, &[g.to_row()], 0, 0, config.fading_samples as u64)?)
        }
        uatf::GeometryOutcome::Singular => None,
    })
}

fn uatf_from_rows(scheme: Scheme, rows: &[Vec<f64>], discarded: u64, singular: u64, fading: u64) -> Result<UatfEstimate> {
    if rows.is_empty() {
        return Err(Error::Config(format!(
            "no usable geometry ({discarded} outside guard, {singular} singular)"
        )));
    }
    let term = |idx: usize| jackknife(rows, move |m| m[idx] / m[0]);
    Ok(UatfEstimate {
        scheme,
        sinr: jackknife(rows, |m| m[0] / (m[1] + m[2] + m[3] + m[4])),
        intra_cell: term(1),
        inter_cell: term(2),
        pilot_contamination: term(3),
        noise: term(4),
        signal: jackknife(rows, |m| m[0]),
        n_effective: rows.len() as u64,
        discarded,
        singular,
        fading_samples: fading,
    })
}

/// μ, NMSE and UatF estimates at one density, sharing `config`.
pub fn trial_stats(
    model: &PathLossModel,
    params: &NetworkParams,
    config: &SimConfig,
    schemes: &[Scheme],
) -> Result<TrialStats> {
    let lambda = params.lambda;
    let mu = estimate_mu(model, lambda, config)?;
    let nmse = estimate_nmse(model, lambda, params, config)?;
    let sinr_terms_hat = schemes
        .iter()
        .map(|&s| estimate_uatf_sinr(model, lambda, params, config, s))
        .collect::<Result<Vec<_>>>()?;
    let n_effective =
        sinr_terms_hat.iter().map(|u| u.n_effective).chain([mu.n_effective, nmse.n_effective]).min().unwrap_or(0);
    Ok(TrialStats {
        lambda,
        trials: config.trials,
        master_seed: config.master_seed,
        mu1_hat: mu.mu1,
        mu2_hat: mu.mu2,
        nmse_hat: nmse.nmse,
        sinr_terms_hat,
        n_effective,
    })
}
