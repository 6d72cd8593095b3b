//! Cosmological model: parameters, conformal scale factor, and the asymptotic
//! in/out mode frequencies.
//!
//! Natural units throughout (ħ = c = 1). `τ` is conformal time.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Toy-universe parameters plus the field mass.
///
/// `epsilon` sets the total expansion (`C` grows from 1 to `1 + 2ε`), `sigma`
/// its rapidity. `epsilon = 0` is accepted and describes a static spacetime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CosmologyParams {
    epsilon: f64,
    sigma: f64,
    mass: f64,
}

impl CosmologyParams {
    pub fn new(epsilon: f64, sigma: f64, mass: f64) -> Result<Self> {
        if !epsilon.is_finite() || epsilon < 0.0 {
            return Err(Error::InvalidParameter {
                name: "epsilon",
                value: epsilon,
                reason: "must be finite and non-negative",
            });
        }
        if !sigma.is_finite() || sigma <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "sigma",
                value: sigma,
                reason: "must be finite and positive",
            });
        }
        if !mass.is_finite() || mass < 0.0 {
            return Err(Error::InvalidParameter {
                name: "mass",
                value: mass,
                reason: "must be finite and non-negative",
            });
        }
        Ok(Self {
            epsilon,
            sigma,
            mass,
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }
}

/// Mode momentum `k`. Modes `k` and `-k` are paired by the Bogoliubov map;
/// every spectral quantity depends on `k²` only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSpec(f64);

impl ModeSpec {
    pub fn new(k: f64) -> Result<Self> {
        if !k.is_finite() {
            return Err(Error::InvalidParameter {
                name: "k",
                value: k,
                reason: "must be finite",
            });
        }
        Ok(Self(k))
    }

    pub fn k(&self) -> f64 {
        self.0
    }
}

/// Asymptotic angular frequencies of a mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencySet {
    pub omega_in: f64,
    pub omega_out: f64,
    pub omega_plus: f64,
    pub omega_minus: f64,
}

/// `C(τ) = 1 + ε(1 + tanh στ)`, evaluated as `1 + 2ε / (1 + e^{-2στ})` so
/// both tails saturate cleanly.
pub fn scale_factor(params: &CosmologyParams, tau: f64) -> f64 {
    let e = (-2.0 * params.sigma * tau).exp();
    1.0 + 2.0 * params.epsilon / (1.0 + e)
}

/// Scale factor continued to complex conformal time. Poles sit at
/// `στ = iπ(n + 1/2)`; callers stay inside the strip `|Im στ| < π/2`.
pub(crate) fn scale_factor_complex(params: &CosmologyParams, tau: Complex64) -> Complex64 {
    let e = (-2.0 * params.sigma * tau).exp();
    Complex64::new(1.0, 0.0) + 2.0 * params.epsilon / (1.0 + e)
}

pub fn frequencies(params: &CosmologyParams, mode: &ModeSpec) -> Result<FrequencySet> {
    let k2 = mode.k() * mode.k();
    let m2 = params.mass * params.mass;
    if k2 == 0.0 && m2 == 0.0 {
        return Err(Error::DegenerateMode);
    }
    let omega_in = (k2 + m2).sqrt();
    let omega_out = (k2 + m2 * (1.0 + 2.0 * params.epsilon)).sqrt();
    // (ω_out - ω_in)/2 rewritten without the subtraction.
    let omega_minus = params.epsilon * m2 / (omega_out + omega_in);
    Ok(FrequencySet {
        omega_in,
        omega_out,
        omega_plus: 0.5 * (omega_out + omega_in),
        omega_minus,
    })
}
