//! Reading the cosmology back out of the entanglement.
//!
//! [`gamma_from_entropy`] inverts the (strictly increasing) entropy. For light
//! particles, `m√ε ≪ E ≪ 2σ`, the leading-order estimators
//!
//! ```text
//! ε ≈ (2E²/m²) √γ
//! σ ≈ (π/2) [ (1+γ) / (-(E/4) d ln γ/dE - 1) ]^{1/2} E
//! ```
//! recover the parameters approximately; [`fit_parameters`] recovers them to
//! full precision by least squares against the exact forward model.

use std::f64::consts::PI;

use crate::bogoliubov::log_gamma_with_gradient;
use crate::entanglement::{entropy_closed_unchecked, entropy_log_slope, GAMMA_MAX};
use crate::error::{Error, Result};
use crate::model::{CosmologyParams, ModeSpec};

/// Largest entropy accepted by [`gamma_from_entropy`], in bits.
pub const ENTROPY_MAX: f64 = 41.0;

/// Largest tolerated `m√ε̂/E` before the ε estimator is rejected.
pub const MAX_REGIME_RATIO: f64 = 0.5;

pub const MIN_RELATIVE_STEP: f64 = 1e-4;
pub const MAX_RELATIVE_STEP: f64 = 1e-2;

/// Unique `γ ∈ [0, 1-1e-12]` with `entropy_closed(γ) = entropy_bits`.
///
/// Bisects over the ordered bit patterns of non-negative doubles, so it
/// terminates in at most 64 halvings with the result resolved to the last
/// representable `γ` regardless of magnitude.
pub fn gamma_from_entropy(entropy_bits: f64) -> Result<f64> {
    if !(0.0..=ENTROPY_MAX).contains(&entropy_bits) {
        return Err(Error::EntropyOutOfRange(entropy_bits));
    }
    if entropy_bits == 0.0 {
        return Ok(0.0);
    }
    // Invariant: S(lo) < target <= S(hi).
    let mut lo = 0u64;
    let mut hi = GAMMA_MAX.to_bits();
    for _ in 0..200 {
        if hi - lo <= 1 {
            break;
        }
        let mid = lo + (hi - lo) / 2;
        if entropy_closed_unchecked(f64::from_bits(mid)) < entropy_bits {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (g_lo, g_hi) = (f64::from_bits(lo), f64::from_bits(hi));
    let err_lo = (entropy_closed_unchecked(g_lo) - entropy_bits).abs();
    let err_hi = (entropy_closed_unchecked(g_hi) - entropy_bits).abs();
    Ok(if err_lo < err_hi { g_lo } else { g_hi })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntanglementSample {
    /// Particle energy `E = √(k² + m²)`.
    pub energy: f64,
    pub entropy_bits: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonEstimate {
    pub epsilon_hat: f64,
    pub gamma: f64,
    /// `m√ε̂ / E`; the estimator assumes this is small.
    pub regime_ratio: f64,
}

fn check_mass(mass: f64) -> Result<()> {
    if mass == 0.0 {
        return Err(Error::MasslessUnidentifiable);
    }
    if !mass.is_finite() || mass < 0.0 {
        return Err(Error::InvalidParameter {
            name: "mass",
            value: mass,
            reason: "must be finite and positive",
        });
    }
    Ok(())
}

fn check_sample(sample: &EntanglementSample, mass: f64) -> Result<()> {
    if !sample.energy.is_finite() || sample.energy <= mass {
        return Err(Error::InvalidParameter {
            name: "energy",
            value: sample.energy,
            reason: "must be finite and exceed the mass",
        });
    }
    Ok(())
}

pub fn estimate_epsilon(sample: &EntanglementSample, mass: f64) -> Result<EpsilonEstimate> {
    check_mass(mass)?;
    check_sample(sample, mass)?;
    let gamma = gamma_from_entropy(sample.entropy_bits)?;
    let epsilon_hat = epsilon_formula(sample.energy, mass, gamma);
    let regime_ratio = mass * epsilon_hat.sqrt() / sample.energy;
    if regime_ratio > MAX_REGIME_RATIO {
        return Err(Error::RegimeViolation(regime_ratio));
    }
    Ok(EpsilonEstimate {
        epsilon_hat,
        gamma,
        regime_ratio,
    })
}

fn epsilon_formula(energy: f64, mass: f64, gamma: f64) -> f64 {
    2.0 * energy * energy / (mass * mass) * gamma.sqrt()
}

/// Central finite difference of `ln γ(S)` between two nearby samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogGammaSlope {
    /// Midpoint energy.
    pub energy: f64,
    /// `γ` at the midpoint, as the geometric mean of the two samples.
    pub gamma: f64,
    /// `d ln γ / dE`
    pub slope: f64,
    pub relative_step: f64,
}

pub fn log_gamma_slope(a: &EntanglementSample, b: &EntanglementSample, mass: f64) -> Result<LogGammaSlope> {
    check_mass(mass)?;
    check_sample(a, mass)?;
    check_sample(b, mass)?;
    let (lower, upper) = if a.energy <= b.energy { (a, b) } else { (b, a) };
    let energy = 0.5 * (lower.energy + upper.energy);
    let relative_step = (upper.energy - lower.energy) / energy;
    if !(MIN_RELATIVE_STEP..=MAX_RELATIVE_STEP).contains(&relative_step) {
        return Err(Error::StepTooSmall(relative_step));
    }
    let g_lo = gamma_from_entropy(lower.entropy_bits)?;
    let g_hi = gamma_from_entropy(upper.entropy_bits)?;
    if g_lo == 0.0 || g_hi == 0.0 {
        return Err(Error::InvalidParameter {
            name: "entropy_bits",
            value: if g_lo == 0.0 { lower.entropy_bits } else { upper.entropy_bits },
            reason: "sigma estimation needs positive entropies",
        });
    }
    let (l_lo, l_hi) = (g_lo.ln(), g_hi.ln());
    Ok(LogGammaSlope {
        energy,
        gamma: (0.5 * (l_lo + l_hi)).exp(),
        slope: (l_hi - l_lo) / (upper.energy - lower.energy),
        relative_step,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaEstimate {
    pub sigma_hat: f64,
    pub slope: LogGammaSlope,
    /// `-(E/4) d ln γ/dE - 1`
    pub denominator: f64,
}

/// Leading-order `σ` from two samples at nearby energies (relative spacing
/// in `[1e-4, 1e-2]`). Known to be biased by an O(1) factor.
pub fn estimate_sigma(a: &EntanglementSample, b: &EntanglementSample, mass: f64) -> Result<SigmaEstimate> {
    let slope = log_gamma_slope(a, b, mass)?;
    let denominator = -0.25 * slope.energy * slope.slope - 1.0;
    if !(denominator > 0.0) {
        return Err(Error::DenominatorNonpositive(denominator));
    }
    let sigma_hat = 0.5 * PI * ((1.0 + slope.gamma) / denominator).sqrt() * slope.energy;
    Ok(SigmaEstimate {
        sigma_hat,
        slope,
        denominator,
    })
}

/// One `(k, S)` observation for [`fit_parameters`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumSample {
    pub k: f64,
    pub entropy_bits: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    pub max_iterations: usize,
    /// Stop when every Jacobian column is this close to orthogonal to the
    /// residual (cosine of the angle).
    pub gradient_tol: f64,
    /// Stop when the log-parameter step falls below this (relative).
    pub step_tol: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            gradient_tol: 1e-12,
            step_tol: 1e-14,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub epsilon_hat: f64,
    pub sigma_hat: f64,
    /// `‖r‖₂` at the returned iterate.
    pub residual_norm: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

struct Evaluation {
    residuals: Vec<f64>,
    jacobian: Vec<[f64; 2]>,
    cost: f64,
}

fn evaluate(samples: &[SpectrumSample], mass: f64, theta: [f64; 2], with_jacobian: bool) -> Result<Evaluation> {
    let (eps, sigma) = (theta[0].exp(), theta[1].exp());
    if !(eps > 0.0 && sigma > 0.0) {
        return Err(Error::InvalidParameter { name: "theta", value: theta[0].min(theta[1]), reason: "log-parameter underflow" });
    }
    let params = CosmologyParams::new(eps, sigma, mass)?;
    let mut residuals = Vec::with_capacity(samples.len());
    let mut jacobian = Vec::with_capacity(if with_jacobian { samples.len() } else { 0 });
    for s in samples {
        let (log_gamma, grad) = log_gamma_with_gradient(&params, &ModeSpec::new(s.k)?)?;
        let gamma = log_gamma.exp().min(GAMMA_MAX);
        residuals.push(entropy_closed_unchecked(gamma) - s.entropy_bits);
        if with_jacobian {
            let slope = entropy_log_slope(gamma);
            jacobian.push([slope * grad[0], slope * grad[1]]);
        }
    }
    let cost = 0.5 * residuals.iter().map(|r| r * r).sum::<f64>();
    Ok(Evaluation {
        residuals,
        jacobian,
        cost,
    })
}

fn validate_fit_input(samples: &[SpectrumSample], mass: f64) -> Result<()> {
    check_mass(mass)?;
    if samples.len() < 3 {
        return Err(Error::InsufficientData(format!("need at least 3 samples, got {}", samples.len())));
    }
    for s in samples {
        if !s.k.is_finite() {
            return Err(Error::InvalidParameter { name: "k", value: s.k, reason: "must be finite" });
        }
        if !(0.0..=ENTROPY_MAX).contains(&s.entropy_bits) {
            return Err(Error::EntropyOutOfRange(s.entropy_bits));
        }
    }
    if samples.iter().all(|s| s.entropy_bits == 0.0) {
        return Err(Error::Unidentifiable);
    }
    let mut nonzero: Vec<f64> = samples.iter().map(|s| s.entropy_bits).filter(|&v| v > 0.0).collect();
    nonzero.sort_by(f64::total_cmp);
    nonzero.dedup();
    if nonzero.len() < 2 {
        return Err(Error::InsufficientData("need at least 2 distinct nonzero entropies".into()));
    }
    Ok(())
}

fn initial_guess(samples: &[SpectrumSample], mass: f64) -> [f64; 2] {
    let energy = |s: &SpectrumSample| (s.k * s.k + mass * mass).sqrt();
    let mut energies: Vec<f64> = samples.iter().map(energy).collect();
    energies.sort_by(f64::total_cmp);
    let n = energies.len();
    let median = if n % 2 == 1 {
        energies[n / 2]
    } else {
        0.5 * (energies[n / 2 - 1] + energies[n / 2])
    };
    let lowest = samples
        .iter()
        .filter(|s| s.entropy_bits > 0.0)
        .min_by(|a, b| energy(a).total_cmp(&energy(b)))
        .expect("validated: some entropy is nonzero");
    let epsilon = gamma_from_entropy(lowest.entropy_bits)
        .map(|g| epsilon_formula(energy(lowest), mass, g))
        .unwrap_or(1.0);
    let epsilon = if epsilon.is_finite() && epsilon > 0.0 { epsilon } else { 1.0 };
    [epsilon.ln(), median.ln()]
}

/// Largest cosine between the residual vector and a Jacobian column,
/// `|J_jᵀ r| / (‖J_j‖ ‖r‖)`. Invariant under rescaling of the data, unlike the
/// raw gradient.
fn scaled_gradient(g: &[f64; 2], jtj: &[[f64; 2]; 2], cost: f64) -> f64 {
    let r_norm = (2.0 * cost).sqrt();
    (0..2)
        .map(|p| {
            let col = jtj[p][p].sqrt();
            if col == 0.0 || r_norm == 0.0 {
                0.0
            } else {
                g[p].abs() / (col * r_norm)
            }
        })
        .fold(0.0, f64::max)
}

/// Least-squares fit of `(ε, σ)` to `(k, S)` data at known mass.
///
/// Levenberg-Marquardt on `(ln ε, ln σ)` with the analytic Jacobian of the
/// forward model. Without `init`, starts from the ε estimator on the
/// lowest-energy sample and `σ₀` = median sample energy, then restarts from
/// `σ₀/2`, `σ₀/4` and `σ₀/8` and keeps the smallest residual. Hitting the
/// iteration cap returns the best iterate with `converged = false`.
pub fn fit_parameters(samples: &[SpectrumSample], mass: f64, init: Option<(f64, f64)>) -> Result<FitResult> {
    fit_parameters_with(samples, mass, init, &FitOptions::default())
}

pub fn fit_parameters_with(
    samples: &[SpectrumSample],
    mass: f64,
    init: Option<(f64, f64)>,
    options: &FitOptions,
) -> Result<FitResult> {
    validate_fit_input(samples, mass)?;
    match init {
        Some((eps, sigma)) => {
            CosmologyParams::new(eps, sigma, mass)?;
            if eps == 0.0 {
                return Err(Error::InvalidParameter {
                    name: "epsilon",
                    value: eps,
                    reason: "initial epsilon must be positive",
                });
            }
            levenberg_marquardt(samples, mass, [eps.ln(), sigma.ln()], options)
        }
        None => {
            // The cost surface has spurious shallow minima at large σ, so the
            // derived start is refined by restarts at smaller σ.
            let [ln_eps, ln_sigma] = initial_guess(samples, mass);
            let mut best: Option<FitResult> = None;
            for shrink in SIGMA_RESTARTS {
                let fit = levenberg_marquardt(samples, mass, [ln_eps, ln_sigma - shrink.ln()], options)?;
                if best.as_ref().is_none_or(|b| fit.residual_norm < b.residual_norm) {
                    best = Some(fit);
                }
            }
            Ok(best.expect("at least one start"))
        }
    }
}

const SIGMA_RESTARTS: [f64; 4] = [1.0, 2.0, 4.0, 8.0];

fn levenberg_marquardt(samples: &[SpectrumSample], mass: f64, mut theta: [f64; 2], options: &FitOptions) -> Result<FitResult> {
    // Residuals this small are rounding noise and carry no gradient direction.
    let data_norm = samples.iter().map(|s| s.entropy_bits * s.entropy_bits).sum::<f64>().sqrt();
    let noise_cost = 0.5 * (1e3 * f64::EPSILON * data_norm).powi(2);
    let mut lambda = 1e-3;
    let mut eval = evaluate(samples, mass, theta, true)?;
    let mut iterations = 0;
    let mut converged = false;
    let mut gradient_norm;

    loop {
        let mut g = [0.0; 2];
        let mut a = [[0.0; 2]; 2];
        for (r, j) in eval.residuals.iter().zip(&eval.jacobian) {
            for p in 0..2 {
                g[p] += j[p] * r;
                for q in 0..2 {
                    a[p][q] += j[p] * j[q];
                }
            }
        }
        gradient_norm = g[0].abs().max(g[1].abs());
        if scaled_gradient(&g, &a, eval.cost) < options.gradient_tol || eval.cost <= noise_cost {
            converged = true;
            break;
        }
        if iterations >= options.max_iterations {
            break;
        }
        iterations += 1;

        // Inner loop: raise damping until the step reduces the cost.
        let mut accepted = None;
        while lambda < 1e16 {
            let d0 = a[0][0].max(f64::MIN_POSITIVE);
            let d1 = a[1][1].max(f64::MIN_POSITIVE);
            let m00 = a[0][0] + lambda * d0;
            let m11 = a[1][1] + lambda * d1;
            let det = m00 * m11 - a[0][1] * a[1][0];
            let step = [(-g[0] * m11 + g[1] * a[0][1]) / det, (-g[1] * m00 + g[0] * a[1][0]) / det];
            let trial = [theta[0] + step[0], theta[1] + step[1]];
            let trial_eval = if step.iter().all(|s| s.is_finite()) {
                evaluate(samples, mass, trial, false).ok()
            } else {
                None
            };
            match trial_eval {
                Some(t) if t.cost < eval.cost => {
                    lambda = (lambda / 10.0).max(1e-15);
                    accepted = Some((trial, step));
                    break;
                }
                _ => lambda *= 10.0,
            }
        }

        let Some((trial, step)) = accepted else {
            // No downhill step at any damping: stationary to working precision.
            converged = scaled_gradient(&g, &a, eval.cost) < options.gradient_tol.sqrt();
            break;
        };
        theta = trial;
        eval = evaluate(samples, mass, theta, true)?;
        let rel_step = step[0].abs().max(step[1].abs()) / (1.0 + theta[0].abs().max(theta[1].abs()));
        if rel_step < options.step_tol {
            converged = true;
            break;
        }
    }

    Ok(FitResult {
        epsilon_hat: theta[0].exp(),
        sigma_hat: theta[1].exp(),
        residual_norm: (2.0 * eval.cost).sqrt(),
        gradient_norm,
        iterations,
        converged,
    })
}
