//! Independent route to the Bogoliubov coefficients: integrate the separated
//! mode equation
//!
//! ```text
//! χ''(τ) + [k² + m² C(τ)] χ(τ) = 0
//! ```
//!
//! from deep in the in-region, starting on the unit-Wronskian in-mode
//! `e^{-iω_in τ}/√(2ω_in)`, and decompose the result onto the out-modes
//! `e^{∓iω_out τ}/√(2ω_out)` at the far end. Nothing here evaluates the
//! closed form.
//!
//! Two passes are made. The real-axis pass gives `α` and the Wronskian
//! diagnostic. In the adiabatic regime `|β|` can sit twenty orders of
//! magnitude below `|α|`, under the round-off floor of any real-axis
//! integration, so `β` comes from a second pass along `Im τ = -θ/σ`,
//! inside the strip where `C(τ)` is analytic (its nearest poles are at
//! `στ = ±iπ/2`). The coefficients of an analytic solution are the same on
//! any such line, while the negative-frequency out-mode grows by `e^{2ω_out θ/σ}`
//! relative to the positive-frequency one, lifting `β` out of the noise.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;

use crate::bogoliubov::gamma_from_frequencies;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::model::{frequencies, scale_factor, scale_factor_complex, CosmologyParams, FrequencySet, ModeSpec};
use crate::ode::{integrate, OdeSystem, StepControl};

/// Smallest supported expansion rate.
pub const MIN_SIGMA: f64 = 0.05;

/// Upper bound on `ω_out · tau_span_factor / σ` (oscillations in the window).
pub const MAX_PHASE: f64 = 1e6;

const MAX_MATCHING_CONDITION: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationConfig {
    pub rel_tol: f64,
    /// Half-width of the integration window in units of `1/σ`.
    pub tau_span_factor: f64,
    pub max_steps: usize,
}

impl Default for IntegrationConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            tau_span_factor: 20.0,
            max_steps: 5_000_000,
        }
    }
}

impl IntegrationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(1e-14..=1e-6).contains(&self.rel_tol) {
            return Err(Error::InvalidConfig(format!("rel_tol {} outside [1e-14, 1e-6]", self.rel_tol)));
        }
        if !(self.tau_span_factor >= 15.0) || !self.tau_span_factor.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "tau_span_factor {} must be finite and >= 15",
                self.tau_span_factor
            )));
        }
        if self.max_steps < 10_000 {
            return Err(Error::InvalidConfig(format!("max_steps {} must be >= 1e4", self.max_steps)));
        }
        Ok(())
    }
}

/// Out-basis expansion coefficients of the in-mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexBogoliubov {
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl ComplexBogoliubov {
    pub fn gamma(&self) -> f64 {
        self.beta.norm_sqr() / self.alpha.norm_sqr()
    }

    /// `||α|² - |β|² - 1|`
    pub fn normalization_defect(&self) -> f64 {
        (self.alpha.norm_sqr() - self.beta.norm_sqr() - 1.0).abs()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationTrace {
    /// Accepted steps over both passes.
    pub steps_taken: usize,
    /// Largest relative deviation of `W = χχ'* - χ*χ'` from its initial value
    /// along the real-axis pass.
    pub wronskian_drift: f64,
    pub final_tau: f64,
    /// Imaginary offset of the contour used for `β`.
    pub contour_offset: f64,
}

/// State layout: `[Re χ, Im χ, Re χ', Im χ']`, parametrized by `Re τ`.
struct ModeEquation {
    params: CosmologyParams,
    k2: f64,
    m2: f64,
    im_tau: f64,
}

impl OdeSystem<4> for ModeEquation {
    fn rhs(&self, s: f64, y: &[f64; 4], dy: &mut [f64; 4]) {
        let omega2 = if self.im_tau == 0.0 {
            Complex64::new(self.k2 + self.m2 * scale_factor(&self.params, s), 0.0)
        } else {
            let c = scale_factor_complex(&self.params, Complex64::new(s, self.im_tau));
            self.k2 + self.m2 * c
        };
        let chi = Complex64::new(y[0], y[1]);
        let acc = -omega2 * chi;
        dy[0] = y[2];
        dy[1] = y[3];
        dy[2] = acc.re;
        dy[3] = acc.im;
    }
}

fn pack(chi: Complex64, dchi: Complex64) -> [f64; 4] {
    [chi.re, chi.im, dchi.re, dchi.im]
}

fn unpack(y: &[f64; 4]) -> (Complex64, Complex64) {
    (Complex64::new(y[0], y[1]), Complex64::new(y[2], y[3]))
}

fn plane_wave(omega: f64, tau: Complex64, sign: f64) -> Complex64 {
    (Complex64::i() * sign * omega * tau).exp() / (2.0 * omega).sqrt()
}

/// Decompose `(χ, χ')` at `τ` as `α e₊ + β e₋` with `e∓ = e^{∓iωτ}/√(2ω)`.
fn match_out_modes(chi: Complex64, dchi: Complex64, omega: f64, tau: Complex64) -> (Complex64, Complex64) {
    let i = Complex64::i();
    let e_pos = plane_wave(omega, tau, -1.0);
    let e_neg = plane_wave(omega, tau, 1.0);
    let alpha = (i * omega * chi - dchi) / (2.0 * i * omega * e_pos);
    let beta = (i * omega * chi + dchi) / (2.0 * i * omega * e_neg);
    (alpha, beta)
}

/// 2-norm condition number of `[[e₊, e₋], [-iω e₊, iω e₋]]`.
fn matching_condition(omega: f64, tau: Complex64) -> f64 {
    let e_pos = plane_wave(omega, tau, -1.0);
    let e_neg = plane_wave(omega, tau, 1.0);
    let frob2 = (1.0 + omega * omega) * (e_pos.norm_sqr() + e_neg.norm_sqr());
    let det = 2.0 * omega * e_pos.norm() * e_neg.norm();
    let disc = (frob2 * frob2 - 4.0 * det * det).max(0.0).sqrt();
    0.5 * (frob2 + disc) / det
}

fn contour_angle(sigma: f64, f: &FrequencySet) -> f64 {
    (FRAC_PI_2 - sigma / (2.0 * f.omega_in)).clamp(FRAC_PI_4, 0.49 * PI)
}

struct PassResult {
    alpha: Complex64,
    beta: Complex64,
    steps: usize,
    wronskian_drift: f64,
}

fn run_pass(
    params: &CosmologyParams,
    mode: &ModeSpec,
    f: &FrequencySet,
    config: &IntegrationConfig,
    im_tau: f64,
    track_wronskian: bool,
) -> Result<PassResult> {
    let half_width = config.tau_span_factor / params.sigma();
    let system = ModeEquation {
        params: *params,
        k2: mode.k() * mode.k(),
        m2: params.mass() * params.mass(),
        im_tau,
    };
    let tau0 = Complex64::new(-half_width, im_tau);
    let tau1 = Complex64::new(half_width, im_tau);
    let chi0 = plane_wave(f.omega_in, tau0, -1.0);
    let dchi0 = -Complex64::i() * f.omega_in * chi0;

    let wronskian = |y: &[f64; 4]| {
        let (chi, dchi) = unpack(y);
        chi * dchi.conj() - chi.conj() * dchi
    };
    let y0 = pack(chi0, dchi0);
    let w0 = wronskian(&y0);
    let mut drift = 0.0f64;

    let control = StepControl {
        rel_tol: config.rel_tol,
        abs_tol: 0.0,
        max_steps: config.max_steps,
        initial_step: None,
    };
    let (y1, stats) = integrate(&system, -half_width, half_width, y0, &control, |_, y| {
        if track_wronskian {
            drift = drift.max((wronskian(y) - w0).norm() / w0.norm());
        }
    })?;

    let (chi, dchi) = unpack(&y1);
    let (alpha, beta) = match_out_modes(chi, dchi, f.omega_out, tau1);
    Ok(PassResult {
        alpha,
        beta,
        steps: stats.accepted,
        wronskian_drift: drift,
    })
}

/// Checks the oracle's supported regime and returns the mode frequencies.
fn check_regime(params: &CosmologyParams, mode: &ModeSpec, config: &IntegrationConfig) -> Result<FrequencySet> {
    config.validate()?;
    if params.sigma() < MIN_SIGMA {
        return Err(Error::RegimeUnsupported(format!(
            "sigma = {} is below the supported bound sigma >= {MIN_SIGMA}",
            params.sigma()
        )));
    }
    let f = frequencies(params, mode)?;
    let phase = f.omega_out * config.tau_span_factor / params.sigma();
    if phase > MAX_PHASE {
        return Err(Error::RegimeUnsupported(format!(
            "omega_out * tau_span_factor / sigma = {phase:e} exceeds {MAX_PHASE:e}"
        )));
    }
    Ok(f)
}

/// Integrate the in-mode through the expansion and extract `(α, β)`.
pub fn evolve_mode(
    params: &CosmologyParams,
    mode: &ModeSpec,
    config: &IntegrationConfig,
) -> Result<(ComplexBogoliubov, IntegrationTrace)> {
    let f = check_regime(params, mode, config)?;
    let half_width = config.tau_span_factor / params.sigma();

    let cond = matching_condition(f.omega_out, Complex64::new(half_width, 0.0));
    if cond > MAX_MATCHING_CONDITION {
        return Err(Error::MatchingIllConditioned(cond));
    }

    let real = run_pass(params, mode, &f, config, 0.0, true)?;
    let offset = -contour_angle(params.sigma(), &f) / params.sigma();
    let shifted = run_pass(params, mode, &f, config, offset, false)?;

    Ok((
        ComplexBogoliubov {
            alpha: real.alpha,
            beta: shifted.beta,
        },
        IntegrationTrace {
            steps_taken: real.steps + shifted.steps,
            wronskian_drift: real.wronskian_drift,
            final_tau: half_width,
            contour_offset: offset,
        },
    ))
}

/// Oracle-versus-closed-form comparison for one mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Discrepancy {
    pub k: f64,
    pub gamma_closed: f64,
    pub gamma_oracle: f64,
    /// `|γ_oracle - γ_closed| / γ_closed`, or the absolute difference when
    /// the closed form vanishes (massless or static).
    pub rel_error: f64,
    pub normalization_defect: f64,
    pub trace: IntegrationTrace,
}

pub fn check_against_closed_form(
    params: &CosmologyParams,
    mode: &ModeSpec,
    config: &IntegrationConfig,
) -> Result<Discrepancy> {
    let (coeffs, trace) = evolve_mode(params, mode, config)?;
    let f = frequencies(params, mode)?;
    let gamma_closed = gamma_from_frequencies(&f, params.sigma());
    let gamma_oracle = coeffs.gamma();
    Ok(Discrepancy {
        k: mode.k(),
        gamma_closed,
        gamma_oracle,
        rel_error: (gamma_oracle - gamma_closed).abs() / if gamma_closed > 0.0 { gamma_closed } else { 1.0 },
        normalization_defect: coeffs.normalization_defect(),
        trace,
    })
}

/// Batch version of [`check_against_closed_form`]; results keep input order.
pub fn check_grid(
    cases: &[(CosmologyParams, ModeSpec)],
    config: &IntegrationConfig,
    execution: Execution,
) -> Vec<Result<Discrepancy>> {
    execution.map(cases, |(p, m)| check_against_closed_form(p, m, config))
}
