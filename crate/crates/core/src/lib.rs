//! Entanglement between opposite-momentum modes of a massive scalar field on a
//! two-dimensional, asymptotically flat Robertson-Walker spacetime with
//! conformal factor `C(τ) = 1 + ε(1 + tanh στ)`.
//!
//! The crate is split along the computation:
//!
//! - [`model`]: parameters, scale factor, and asymptotic mode frequencies.
//! - [`bogoliubov`]: the closed-form Bogoliubov spectrum (`γ = |β/α|²`).
//! - [`oracle`]: an independent route to the same coefficients by integrating
//!   the mode equation through the expansion and matching onto out-modes.
//! - [`entanglement`]: Schmidt spectrum and von Neumann entropy of the
//!   out-region two-mode state.
//! - [`inversion`]: recovering `γ`, `ε` and `σ` from entanglement data.
//!
//! Batch entry points take an [`Execution`] strategy; with the `parallel`
//! feature (on by default) the parallel strategy fans out over rayon,
//! otherwise it falls back to a sequential loop. Output order never depends
//! on the strategy.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` deliberately rejects NaN

pub mod bogoliubov;
pub mod entanglement;
mod error;
mod exec;
pub mod inversion;
pub mod model;
pub mod ode;
pub mod oracle;
pub mod special;

pub use bogoliubov::{alpha_beta_sq, gamma, mean_particle_number, BogoliubovCoefficients};
pub use entanglement::{
    entanglement_spectrum, entanglement_spectrum_with, entropy_closed, entropy_from_occupation,
    entropy_series,
    schmidt_spectrum, EntanglementRecord, RecordStatus, SchmidtSpectrum,
};
pub use error::{Error, Result};
pub use exec::Execution;
pub use inversion::{
    estimate_epsilon, estimate_sigma, fit_parameters, fit_parameters_with, gamma_from_entropy,
    log_gamma_slope, EntanglementSample, EpsilonEstimate, FitOptions, FitResult, LogGammaSlope,
    SigmaEstimate, SpectrumSample,
};
pub use model::{frequencies, scale_factor, CosmologyParams, FrequencySet, ModeSpec};
pub use oracle::{
    check_against_closed_form, check_grid, evolve_mode, ComplexBogoliubov, Discrepancy,
    IntegrationConfig, IntegrationTrace,
};
