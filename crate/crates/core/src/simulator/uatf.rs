//! Use-and-then-forget statistics of MR and ZF combining for the typical UE,
//! from explicit Rayleigh fading and MMSE channel estimation.
//!
//! Channels are normalized by channel-inversion power control: the effective
//! channel from UE `i` of cell `l` to the typical BS is `CN(0, r I_M)` with
//! `r = β(|u − x_j|)/β(|u − x_l|)`, so every UE is received at unit gain by its
//! own BS and noise has variance `1/SNR₀`.
//!
//! MR uses the raw pilot observation of the typical pilot as combiner, and ZF
//! uses `Ĝ(ĜᴴĜ)⁻¹e₀`. With those scalings the signal term is `M` for MR and `1`
//! for ZF in every geometry.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::rng::{stream_rng, Stream};
use super::{interferer_ratio, CsiMode, SimConfig};
use crate::analytics::{NetworkParams, Scheme};
use crate::pathloss::PathLossModel;
use crate::simulator::geometry::NetworkRealization;

/// Gram matrices with a larger eigenvalue spread are treated as singular.
pub const MAX_GRAM_CONDITION: f64 = 1e12;

/// Per-geometry averages over fading, before normalization by the signal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct GeometryTerms {
    pub signal: f64,
    pub intra_cell: f64,
    pub inter_cell: f64,
    pub pilot_contamination: f64,
    pub noise: f64,
}

impl GeometryTerms {
    pub fn to_row(self) -> Vec<f64> {
        vec![self.signal, self.intra_cell, self.inter_cell, self.pilot_contamination, self.noise]
    }
}

pub(crate) enum GeometryOutcome {
    Terms(GeometryTerms),
    Singular,
}

struct Sharer {
    pilot: usize,
    r: f64,
}

#[inline]
fn cn<R: Rng>(rng: &mut R, std: f64) -> Complex64 {
    let s = std * std::f64::consts::FRAC_1_SQRT_2;
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * s, im * s)
}

#[inline]
fn inner(v: &[Complex64], x: &[Complex64]) -> Complex64 {
    v.iter().zip(x).fold(Complex64::new(0.0, 0.0), |acc, (a, b)| acc + a.conj() * b)
}

#[inline]
fn norm2(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum()
}

/// Unbiased estimate of `|E z|²` from `F` samples, given their sum and the
/// sum of their squared magnitudes.
fn coherent_power(sum: Complex64, abs2_sum: f64, f: f64) -> f64 {
    let mean = sum / f;
    let var = ((abs2_sum / f - mean.norm_sqr()) * f / (f - 1.0)).max(0.0);
    mean.norm_sqr() - var / f
}

/// Runs the fading loop for one realization whose pilots are already assigned.
pub(crate) fn geometry_terms(
    net: &NetworkRealization,
    model: &PathLossModel,
    params: &NetworkParams,
    config: &SimConfig,
    scheme: Scheme,
    trial: u64,
) -> GeometryOutcome {
    let m = params.m;
    let k = params.k;
    let snr = params.snr0();
    let pilot_noise_var = if snr.is_infinite() { 0.0 } else { 1.0 / (params.tau_p() * snr) };
    let perfect = config.csi == CsiMode::Perfect;
    // ZF built on estimates couples the combiner to every pilot; otherwise only
    // the typical pilot matters and the remaining UEs can be averaged exactly.
    let all_explicit = scheme == Scheme::Zf && !perfect;

    let j = net.typical;
    let x_j = net.bs_positions[j];
    let mut sharers: Vec<Sharer> = Vec::new();
    let mut rest_r = 0.0;
    let mut big_x = vec![1.0 + pilot_noise_var; k];
    for (l, ues) in net.ue_positions.iter().enumerate() {
        if l == j {
            continue;
        }
        for (i, &u) in ues.iter().enumerate() {
            let r = interferer_ratio(model, u, net.bs_positions[l], x_j);
            match net.pilot_share[l][i] {
                Some(t) => {
                    big_x[t] += r;
                    if t == 0 || all_explicit {
                        sharers.push(Sharer { pilot: t, r });
                    } else {
                        rest_r += r;
                    }
                }
                None => rest_r += r,
            }
        }
    }
    // Coherent tracking only for typical-pilot sharers, which come first.
    sharers.sort_by_key(|s| s.pilot != 0);
    let n_coherent = sharers.iter().take_while(|s| s.pilot == 0).count();

    let mut rng = stream_rng(config.master_seed, trial, Stream::Fading);
    let fsamples = config.fading_samples;
    let f = fsamples as f64;

    let mut own = vec![Complex64::default(); k * m];
    let mut obs = vec![Complex64::default(); k * m];
    let mut foreign = vec![Complex64::default(); sharers.len() * m];
    let mut v = vec![Complex64::default(); m];

    let mut s_sum = Complex64::default();
    let mut s_abs2 = 0.0;
    let mut intra_sum = 0.0;
    let mut b_sum = vec![Complex64::default(); n_coherent];
    let mut b_abs2 = vec![0.0; n_coherent];
    let mut other_explicit = 0.0;
    let mut vnorm2_sum = 0.0;

    let noise_std = pilot_noise_var.sqrt();
    for _ in 0..fsamples {
        for c in own.iter_mut() {
            *c = cn(&mut rng, 1.0);
        }
        for (o, g) in obs.iter_mut().zip(&own) {
            *o = g + cn(&mut rng, noise_std);
        }
        for (s, h) in sharers.iter().zip(foreign.chunks_exact_mut(m)) {
            let std = s.r.sqrt();
            let y = &mut obs[s.pilot * m..(s.pilot + 1) * m];
            for (hm, ym) in h.iter_mut().zip(y.iter_mut()) {
                *hm = cn(&mut rng, std);
                *ym += *hm;
            }
        }

        match scheme {
            Scheme::Mr => {
                let src = if perfect { &own[..m] } else { &obs[..m] };
                v.copy_from_slice(src);
            }
            Scheme::Zf => {
                let est = DMatrix::from_fn(m, k, |row, col| {
                    if perfect {
                        own[col * m + row]
                    } else {
                        obs[col * m + row] / big_x[col]
                    }
                });
                let gram = est.ad_mul(&est);
                let eig = gram.clone().symmetric_eigenvalues();
                let (lo, hi) = eig.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &e| (lo.min(e), hi.max(e)));
                if !(lo > 0.0) || hi / lo > MAX_GRAM_CONDITION {
                    return GeometryOutcome::Singular;
                }
                let Some(chol) = gram.cholesky() else {
                    return GeometryOutcome::Singular;
                };
                let mut e0 = DVector::from_element(k, Complex64::default());
                e0[0] = Complex64::new(1.0, 0.0);
                let w = chol.solve(&e0);
                let comb = est * w;
                v.copy_from_slice(comb.as_slice());
            }
        }

        let s = inner(&v, &own[..m]);
        s_sum += s;
        s_abs2 += s.norm_sqr();
        for i in 1..k {
            intra_sum += inner(&v, &own[i * m..(i + 1) * m]).norm_sqr();
        }
        for (idx, h) in foreign.chunks_exact(m).enumerate() {
            let b = inner(&v, h);
            if idx < n_coherent {
                b_sum[idx] += b;
                b_abs2[idx] += b.norm_sqr();
            } else {
                other_explicit += b.norm_sqr();
            }
        }
        vnorm2_sum += norm2(&v);
    }

    let signal = coherent_power(s_sum, s_abs2, f);
    let mut inter = other_explicit / f + rest_r * vnorm2_sum / f;
    let mut pc = 0.0;
    for (sum, abs2) in b_sum.iter().zip(&b_abs2) {
        let coh = coherent_power(*sum, *abs2, f);
        pc += coh;
        inter += abs2 / f - coh;
    }
    let noise = if snr.is_infinite() { 0.0 } else { vnorm2_sum / f / snr };
    GeometryOutcome::Terms(GeometryTerms {
        signal,
        intra_cell: s_abs2 / f - signal + intra_sum / f,
        inter_cell: inter,
        pilot_contamination: pc,
        noise,
    })
}
