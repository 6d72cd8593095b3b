//! Out-region state of a `(k, -k)` pair: a two-mode squeezed vacuum
//! `Σ c_n |n⟩_k |n⟩_{-k}` with `c_n² = (1-γ)γⁿ`.
//!
//! The reduced density matrix of either mode is diagonal in the number basis
//! with that geometric distribution, so it is represented by its
//! probabilities only.

use std::f64::consts::LN_2;

use crate::bogoliubov::{gamma_from_frequencies, BogoliubovCoefficients};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::model::{frequencies, CosmologyParams, ModeSpec};

/// Largest `γ` accepted by the entropy functions.
pub const GAMMA_MAX: f64 = 1.0 - 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtSpectrum {
    pub gamma: f64,
    /// `p_n = c_n²` for `n = 0..=N`.
    pub probs: Vec<f64>,
    /// Exact mass beyond the truncation, `γ^{N+1}`.
    pub tail_mass: f64,
}

fn check_gamma(gamma: f64, upper: f64) -> Result<()> {
    if !(0.0..=upper).contains(&gamma) {
        return Err(Error::GammaOutOfRange(gamma));
    }
    Ok(())
}

pub fn schmidt_spectrum(gamma: f64, truncation: usize) -> Result<SchmidtSpectrum> {
    if !(0.0..1.0).contains(&gamma) {
        return Err(Error::GammaOutOfRange(gamma));
    }
    let mut probs = Vec::with_capacity(truncation + 1);
    let mut p = 1.0 - gamma;
    for _ in 0..=truncation {
        probs.push(p);
        p *= gamma;
    }
    let exp = i32::try_from(truncation + 1).unwrap_or(i32::MAX);
    Ok(SchmidtSpectrum {
        gamma,
        probs,
        tail_mass: gamma.powi(exp),
    })
}

/// Entropy in bits carried by the terms `n > N` of the geometric distribution:
/// `γ^{N+1} [ -log₂(1-γ) + |log₂ γ| (N + 1 + γ/(1-γ)) ]`.
fn discarded_entropy(gamma: f64, n: usize) -> f64 {
    let lg = -gamma.log2();
    let l1 = -(-gamma).ln_1p() / LN_2;
    let tail = gamma.powf(n as f64 + 1.0);
    tail * (l1 + lg * (n as f64 + 1.0 + gamma / (1.0 - gamma)))
}

/// `-Σ p_n log₂ p_n`, truncated where the discarded tail drops below `tail_tol`.
pub fn entropy_series(gamma: f64, tail_tol: f64) -> Result<f64> {
    check_gamma(gamma, GAMMA_MAX)?;
    if !(1e-14..=1e-6).contains(&tail_tol) {
        return Err(Error::InvalidParameter {
            name: "tail_tol",
            value: tail_tol,
            reason: "must lie in [1e-14, 1e-6]",
        });
    }
    if gamma == 0.0 {
        return Ok(0.0);
    }
    let log_gamma = gamma.log2();
    let log_head = (-gamma).ln_1p() / LN_2;
    let mut sum = 0.0;
    let mut compensation = 0.0;
    let mut p = 1.0 - gamma;
    let mut n = 0usize;
    loop {
        if p > 0.0 {
            // log₂ p_n = log₂(1-γ) + n log₂ γ
            let term = -p * (log_head + n as f64 * log_gamma);
            let y = term - compensation;
            let t = sum + y;
            compensation = (t - sum) - y;
            sum = t;
        }
        if discarded_entropy(gamma, n) < tail_tol {
            return Ok(sum);
        }
        p *= gamma;
        n += 1;
    }
}

/// `log₂(γ^{γ/(γ-1)} / (1-γ))`, zero at `γ = 0`.
pub fn entropy_closed(gamma: f64) -> Result<f64> {
    check_gamma(gamma, GAMMA_MAX)?;
    Ok(entropy_closed_unchecked(gamma))
}

pub(crate) fn entropy_closed_unchecked(gamma: f64) -> f64 {
    if gamma == 0.0 {
        return 0.0;
    }
    (-gamma * gamma.ln() / (1.0 - gamma) - (-gamma).ln_1p()) / LN_2
}

/// Same entropy written through the mean occupation `n̄ = γ/(1-γ)`:
/// `(n̄+1)log₂(n̄+1) - n̄ log₂ n̄`, regrouped as
/// `log₂(n̄+1) + n̄ log₂(1 + 1/n̄)` to avoid cancellation at large `n̄`.
pub fn entropy_from_occupation(mean_n: f64) -> f64 {
    if mean_n == 0.0 {
        return 0.0;
    }
    (mean_n.ln_1p() + mean_n * mean_n.recip().ln_1p()) / LN_2
}

/// `dS/d ln γ` in bits, finite for `γ ∈ [0, 1)`.
pub(crate) fn entropy_log_slope(gamma: f64) -> f64 {
    if gamma == 0.0 {
        return 0.0;
    }
    let q = 1.0 - gamma;
    -gamma * gamma.ln() / (q * q * LN_2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecordStatus {
    Ok,
    /// Massless zero mode; numeric fields are NaN.
    DegenerateMode,
}

impl RecordStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            RecordStatus::Ok => "ok",
            RecordStatus::DegenerateMode => "degenerate_mode",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntanglementRecord {
    pub k: f64,
    pub omega_in: f64,
    pub omega_out: f64,
    pub gamma: f64,
    pub mean_n: f64,
    pub entropy_bits: f64,
    pub status: RecordStatus,
}

fn record(params: &CosmologyParams, k: f64) -> Result<EntanglementRecord> {
    let mode = ModeSpec::new(k)?;
    match frequencies(params, &mode) {
        Ok(f) => {
            let gamma = gamma_from_frequencies(&f, params.sigma());
            let coeffs = BogoliubovCoefficients::from_gamma(gamma);
            Ok(EntanglementRecord {
                k,
                omega_in: f.omega_in,
                omega_out: f.omega_out,
                gamma,
                mean_n: coeffs.beta_sq,
                entropy_bits: entropy_closed(gamma)?,
                status: RecordStatus::Ok,
            })
        }
        Err(Error::DegenerateMode) => Ok(EntanglementRecord {
            k,
            omega_in: f64::NAN,
            omega_out: f64::NAN,
            gamma: f64::NAN,
            mean_n: f64::NAN,
            entropy_bits: f64::NAN,
            status: RecordStatus::DegenerateMode,
        }),
        Err(e) => Err(e),
    }
}

/// One record per momentum, in input order. Degenerate modes are flagged in
/// [`EntanglementRecord::status`] rather than failing the batch; only a
/// non-finite `k` is an error.
pub fn entanglement_spectrum(params: &CosmologyParams, k_values: &[f64]) -> Result<Vec<EntanglementRecord>> {
    entanglement_spectrum_with(params, k_values, Execution::default())
}

pub fn entanglement_spectrum_with(
    params: &CosmologyParams,
    k_values: &[f64],
    execution: Execution,
) -> Result<Vec<EntanglementRecord>> {
    execution.map(k_values, |&k| record(params, k)).into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const GAMMA_REF: f64 = 6.784_514_847_727_461e-2;
    const ENTROPY_REF: f64 = 0.383_874_223_878_565_97;

    #[test]
    fn spectrum_examples() {
        let s = schmidt_spectrum(0.5, 2).unwrap();
        assert_eq!(s.probs, vec![0.5, 0.25, 0.125]);
        assert_eq!(s.tail_mass, 0.125);

        let s = schmidt_spectrum(0.0, 5).unwrap();
        assert_eq!(s.probs, vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(s.tail_mass, 0.0);

        let s = schmidt_spectrum(0.06784, 0).unwrap();
        assert_relative_eq!(s.probs[0], 0.93216, max_relative = 1e-15);
        assert_eq!(s.tail_mass, 0.06784);
    }

    #[test]
    fn spectrum_rejects_out_of_range() {
        assert_eq!(schmidt_spectrum(-0.1, 3), Err(Error::GammaOutOfRange(-0.1)));
        assert_eq!(schmidt_spectrum(1.0, 3), Err(Error::GammaOutOfRange(1.0)));
        assert!(entropy_closed(1.0 - 1e-13).is_err());
        assert!(entropy_series(f64::NAN, 1e-12).is_err());
        assert!(entropy_series(0.5, 1e-3).is_err());
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(entropy_closed(0.0).unwrap(), 0.0);
        assert!((entropy_closed(0.5).unwrap() - 2.0).abs() < 1e-15);
        assert_relative_eq!(entropy_closed(GAMMA_REF).unwrap(), ENTROPY_REF, max_relative = 1e-14);
        assert_relative_eq!(entropy_closed(0.06784).unwrap(), 0.383_851_224_380_639_7, max_relative = 1e-14);
    }

    #[test]
    fn series_examples() {
        assert_eq!(entropy_series(0.0, 1e-12).unwrap(), 0.0);
        assert!((entropy_series(0.5, 1e-14).unwrap() - 2.0).abs() < 1e-13);
        assert!((entropy_series(GAMMA_REF, 1e-12).unwrap() - ENTROPY_REF).abs() < 1e-12);
    }

    #[test]
    fn tail_bound_controls_series_error() {
        for &g in &[1e-6, 0.01, 0.2, 0.6, 0.95, 0.999] {
            for &tol in &[1e-6, 1e-9, 1e-12] {
                let series = entropy_series(g, tol).unwrap();
                let closed = entropy_closed(g).unwrap();
                assert!(closed - series >= -1e-13, "g={g} tol={tol}");
                assert!(closed - series < tol + 1e-12, "g={g} tol={tol}");
            }
        }
    }

    #[test]
    fn occupation_form_agrees() {
        for &g in &[1e-9, 1e-4, 0.3, 0.5, 0.9, 1.0 - 1e-9] {
            let n = g / (1.0 - g);
            assert_relative_eq!(entropy_from_occupation(n), entropy_closed(g).unwrap(), max_relative = 1e-12);
        }
        assert_eq!(entropy_from_occupation(1.0), 2.0);
    }

    #[test]
    fn log_slope_matches_finite_difference() {
        for &g in &[1e-8, 0.01, 0.4, 0.9] {
            let h = 1e-6;
            let up = entropy_closed(g * (1.0 + h)).unwrap();
            let dn = entropy_closed(g * (1.0 - h)).unwrap();
            let fd = (up - dn) / ((1.0 + h).ln() - (1.0 - h).ln());
            assert_relative_eq!(entropy_log_slope(g), fd, max_relative = 1e-7);
        }
    }

    #[test]
    fn spectrum_massless_static_and_reference() {
        let ks = [0.0, 0.5, 1.0, 2.0];
        let massless = CosmologyParams::new(1.0, 1.0, 0.0).unwrap();
        let recs = entanglement_spectrum(&massless, &ks).unwrap();
        assert_eq!(recs[0].status, RecordStatus::DegenerateMode);
        for r in &recs[1..] {
            assert_eq!((r.gamma, r.entropy_bits, r.status), (0.0, 0.0, RecordStatus::Ok));
        }

        let static_ = CosmologyParams::new(0.0, 1.0, 1.0).unwrap();
        let recs = entanglement_spectrum(&static_, &ks).unwrap();
        assert!(recs.iter().all(|r| r.entropy_bits == 0.0));

        let p = CosmologyParams::new(1.0, 1.0, 1.0).unwrap();
        let r = entanglement_spectrum(&p, &[1.0]).unwrap()[0];
        assert_relative_eq!(r.entropy_bits, 1.445_321_397_117_031_2e-3, max_relative = 1e-13);
        assert_relative_eq!(r.entropy_bits, entropy_series(r.gamma, 1e-14).unwrap(), max_relative = 1e-10);
        assert!(entanglement_spectrum(&p, &[f64::NAN]).is_err());
    }

    #[test]
    fn spectrum_order_independent_of_execution() {
        let p = CosmologyParams::new(0.8, 0.6, 1.2).unwrap();
        let ks: Vec<f64> = (0..500).map(|i| 5.0 - i as f64 * 0.01).collect();
        let a = entanglement_spectrum_with(&p, &ks, Execution::Sequential).unwrap();
        let b = entanglement_spectrum_with(&p, &ks, Execution::Parallel).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().zip(&ks).all(|(r, &k)| r.k == k));
    }
}
