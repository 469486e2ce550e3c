//! N-slope distance-dependent path loss.
//!
//! The gain on the annulus `[R_{n-1}, R_n)` is `Υ_n · d^(-α_n)` with
//! `R_0 = 0`, `R_N = ∞`. Only `Υ_1` is free: the remaining constants follow
//! from continuity at every interior breakpoint.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Interior breakpoint of the default dual-slope model, in meters.
pub const DEFAULT_BREAKPOINT_M: f64 = 100.0;
/// Near-field and far-field exponents of the default dual-slope model.
pub const DEFAULT_ALPHAS: [f64; 2] = [2.1, 4.0];
/// Reference gain of the first slope of the default model (linear).
pub const DEFAULT_UPSILON1: f64 = 8.3e-4;
/// Second-slope constant as printed in the source table. It is rounded and is
/// not used; `Υ_2` is always recomputed from continuity.
pub const TABULATED_UPSILON2: f64 = 5.2481;

const CONTINUITY_RTOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct PathLossModel {
    /// Interior breakpoints `R_1 .. R_{N-1}` (meters).
    breakpoints: Vec<f64>,
    alphas: Vec<f64>,
    upsilons: Vec<f64>,
}

/// On-disk form of a model. `breakpoints_m` excludes the implicit 0 and ∞.
///
/// `upsilons` is optional; when present it must agree with the continuity rule.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub breakpoints_m: Vec<f64>,
    pub alphas: Vec<f64>,
    pub upsilon1: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upsilons: Option<Vec<f64>>,
}

impl PathLossModel {
    /// Builds a model from interior breakpoints, exponents and `Υ_1`.
    ///
    /// `alphas.len()` must be `breakpoints.len() + 1`.
    pub fn new(breakpoints: Vec<f64>, alphas: Vec<f64>, upsilon1: f64) -> Result<Self> {
        validate_shape(&breakpoints, &alphas, upsilon1)?;
        let mut upsilons = Vec::with_capacity(alphas.len());
        upsilons.push(upsilon1);
        for (n, &r) in breakpoints.iter().enumerate() {
            let next = upsilons[n] * r.powf(alphas[n + 1] - alphas[n]);
            upsilons.push(next);
        }
        Ok(Self { breakpoints, alphas, upsilons })
    }

    /// Builds a model with every `Υ_n` given explicitly and checks continuity.
    pub fn with_upsilons(breakpoints: Vec<f64>, alphas: Vec<f64>, upsilons: Vec<f64>) -> Result<Self> {
        if upsilons.len() != alphas.len() {
            return Err(Error::InvalidModel(format!(
                "{} upsilons for {} slopes",
                upsilons.len(),
                alphas.len()
            )));
        }
        let model = Self::new(breakpoints, alphas, upsilons[0])?;
        for (n, (&given, &derived)) in upsilons.iter().zip(&model.upsilons).enumerate().skip(1) {
            if !given.is_finite() || ((given - derived) / derived).abs() > CONTINUITY_RTOL {
                return Err(Error::InvalidModel(format!(
                    "upsilon_{} = {given} breaks continuity at R_{} (expected {derived})",
                    n + 1,
                    n
                )));
            }
        }
        Ok(model)
    }

    pub fn single_slope(alpha: f64, upsilon1: f64) -> Result<Self> {
        Self::new(Vec::new(), vec![alpha], upsilon1)
    }

    /// Dual-slope model with `R_1 = 100 m`, `α = (2.1, 4)`, `Υ_1 = 8.3e-4`.
    pub fn dual_slope_default() -> Self {
        Self::new(vec![DEFAULT_BREAKPOINT_M], DEFAULT_ALPHAS.to_vec(), DEFAULT_UPSILON1)
            .expect("default model is valid")
    }

    pub fn from_file(file: &ModelFile) -> Result<Self> {
        match &file.upsilons {
            Some(u) => Self::with_upsilons(file.breakpoints_m.clone(), file.alphas.clone(), u.clone()),
            None => Self::new(file.breakpoints_m.clone(), file.alphas.clone(), file.upsilon1),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(text)?;
        if let Some(u) = &file.upsilons {
            if u.first().copied() != Some(file.upsilon1) {
                return Err(Error::InvalidModel("upsilons[0] must equal upsilon1".into()));
            }
        }
        Self::from_file(&file)
    }

    pub fn to_file(&self) -> ModelFile {
        ModelFile {
            breakpoints_m: self.breakpoints.clone(),
            alphas: self.alphas.clone(),
            upsilon1: self.upsilons[0],
            upsilons: None,
        }
    }

    /// Number of slopes `N`.
    pub fn num_slopes(&self) -> usize {
        self.alphas.len()
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn upsilons(&self) -> &[f64] {
        &self.upsilons
    }

    pub fn interior_breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// `R_n` for `n` in `0..=N`, with `R_0 = 0` and `R_N = ∞`.
    pub fn breakpoint(&self, n: usize) -> f64 {
        match n {
            0 => 0.0,
            n if n >= self.num_slopes() => f64::INFINITY,
            n => self.breakpoints[n - 1],
        }
    }

    /// Zero-based index of the slope whose annulus contains `d`.
    pub fn slope_index(&self, d: f64) -> usize {
        self.breakpoints.partition_point(|&r| r <= d)
    }

    /// Large-scale fading coefficient at distance `d > 0` (meters).
    pub fn beta(&self, d: f64) -> Result<f64> {
        if !(d > 0.0) {
            return Err(Error::Domain(format!("path loss distance must be > 0, got {d}")));
        }
        Ok(self.gain(d))
    }

    /// `∫_from^∞ β(D)^κ D dD`, the far-field mass of the `κ`-th power of the
    /// gain beyond a radius `from > 0`.
    pub fn tail_moment(&self, from: f64, kappa: f64) -> Result<f64> {
        if !(from > 0.0) {
            return Err(Error::Domain(format!("tail radius must be > 0, got {from}")));
        }
        let last = kappa * self.alphas[self.num_slopes() - 1];
        if last <= 2.0 {
            return Err(Error::Domain(format!("tail diverges: kappa * alpha_N = {last} <= 2")));
        }
        let mut total = 0.0;
        for n in self.slope_index(from)..self.num_slopes() {
            let lo = from.max(self.breakpoint(n));
            let hi = self.breakpoint(n + 1);
            let e = 2.0 - kappa * self.alphas[n];
            let scale = self.upsilons[n].powf(kappa);
            total += scale
                * if hi.is_infinite() {
                    -lo.powf(e) / e
                } else if e.abs() < 1e-12 {
                    (hi / lo).ln()
                } else {
                    (hi.powf(e) - lo.powf(e)) / e
                };
        }
        Ok(total)
    }

    /// `beta` without the domain check, for hot loops whose distances are
    /// known to be positive.
    #[inline]
    pub fn gain(&self, d: f64) -> f64 {
        let n = self.slope_index(d);
        self.upsilons[n] * d.powf(-self.alphas[n])
    }
}

fn validate_shape(breakpoints: &[f64], alphas: &[f64], upsilon1: f64) -> Result<()> {
    if alphas.len() != breakpoints.len() + 1 {
        return Err(Error::InvalidModel(format!(
            "{} exponents for {} interior breakpoints (need one more exponent than breakpoints)",
            alphas.len(),
            breakpoints.len()
        )));
    }
    if !(upsilon1 > 0.0 && upsilon1.is_finite()) {
        return Err(Error::InvalidModel(format!("upsilon1 must be positive and finite, got {upsilon1}")));
    }
    let mut prev = 0.0;
    for &r in breakpoints {
        if !(r > prev && r.is_finite()) {
            return Err(Error::InvalidModel(format!(
                "breakpoints must be finite and strictly increasing from 0, got {breakpoints:?}"
            )));
        }
        prev = r;
    }
    let mut prev = 0.0;
    for &a in alphas {
        if !(a >= prev && a.is_finite()) {
            return Err(Error::InvalidModel(format!(
                "exponents must be finite, non-negative and non-decreasing, got {alphas:?}"
            )));
        }
        prev = a;
    }
    let last = alphas[alphas.len() - 1];
    if last <= 2.0 {
        return Err(Error::InvalidModel(format!("last exponent must exceed 2, got {last}")));
    }
    Ok(())
}
