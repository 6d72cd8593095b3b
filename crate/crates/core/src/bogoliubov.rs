//! Closed-form Bogoliubov spectrum of the tanh expansion.
//!
//! The in-vacuum mixes mode `k` only with `-k`, and the ratio
//! `γ = |β/α|² = sinh²(πω₋/σ) / sinh²(πω₊/σ)` fixes everything else:
//! bosonic normalization `|α|² - |β|² = 1` gives `|α|² = 1/(1-γ)` and
//! `|β|² = γ/(1-γ)`. Phases are convention-dependent and not represented here.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::{frequencies, CosmologyParams, FrequencySet, ModeSpec};
use crate::special::{ln_sinh, sinh_pos, x_coth_x, LOG_SPACE_THRESHOLD};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BogoliubovCoefficients {
    /// `|α_k|²`
    pub alpha_sq: f64,
    /// `|β_k|²`
    pub beta_sq: f64,
    pub gamma: f64,
}

impl BogoliubovCoefficients {
    pub fn from_gamma(gamma: f64) -> Self {
        let alpha_sq = 1.0 / (1.0 - gamma);
        Self {
            alpha_sq,
            beta_sq: gamma * alpha_sq,
            gamma,
        }
    }
}

pub(crate) fn gamma_from_frequencies(f: &FrequencySet, sigma: f64) -> f64 {
    if f.omega_minus == 0.0 {
        return 0.0;
    }
    let xm = PI * f.omega_minus / sigma;
    let xp = PI * f.omega_plus / sigma;
    if xp > LOG_SPACE_THRESHOLD {
        (2.0 * (ln_sinh(xm) - ln_sinh(xp))).exp()
    } else {
        let r = sinh_pos(xm) / sinh_pos(xp);
        r * r
    }
}

/// `|β_k/α_k|²`. Exactly zero for massless fields and for `ε = 0`.
pub fn gamma(params: &CosmologyParams, mode: &ModeSpec) -> Result<f64> {
    let f = frequencies(params, mode)?;
    Ok(gamma_from_frequencies(&f, params.sigma()))
}

pub fn alpha_beta_sq(params: &CosmologyParams, mode: &ModeSpec) -> Result<BogoliubovCoefficients> {
    gamma(params, mode).map(BogoliubovCoefficients::from_gamma)
}

/// Expected out-region excitation number `n̄ = |β_k|²` per mode.
pub fn mean_particle_number(params: &CosmologyParams, mode: &ModeSpec) -> Result<f64> {
    alpha_beta_sq(params, mode).map(|c| c.beta_sq)
}

/// `ln γ` with its partial derivatives with respect to `ln ε` and `ln σ`.
///
/// Requires `ε > 0` and `m > 0` (otherwise `γ = 0` and the logarithm is not
/// finite); callers check this.
pub(crate) fn log_gamma_with_gradient(params: &CosmologyParams, mode: &ModeSpec) -> Result<(f64, [f64; 2])> {
    let f = frequencies(params, mode)?;
    let sigma = params.sigma();
    let m2 = params.mass() * params.mass();
    let xm = PI * f.omega_minus / sigma;
    let xp = PI * f.omega_plus / sigma;
    if !(xm > 0.0) {
        return Err(Error::InvalidParameter {
            name: "epsilon",
            value: params.epsilon(),
            reason: "ln gamma needs epsilon > 0 and mass > 0",
        });
    }
    let log_gamma = 2.0 * (ln_sinh(xm) - ln_sinh(xp));
    // ∂x±/∂ε = (π/σ) m²/(2ω_out) for both branches.
    let dx_deps = PI / sigma * m2 / (2.0 * f.omega_out);
    let d_ln_eps = 2.0 * params.epsilon() * dx_deps * (x_coth_x(xm) / xm - x_coth_x(xp) / xp);
    let d_ln_sigma = -2.0 * (x_coth_x(xm) - x_coth_x(xp));
    Ok((log_gamma, [d_ln_eps, d_ln_sigma]))
}
