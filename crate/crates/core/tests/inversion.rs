use std::f64::consts::PI;

use expansion_entanglement::{
    entropy_closed, estimate_epsilon, estimate_sigma, fit_parameters, frequencies, gamma, log_gamma_slope,
    CosmologyParams, EntanglementSample, ModeSpec, SpectrumSample,
};

/// Entropy a detector of energy `e` sees, from the forward model.
fn sample(p: &CosmologyParams, e: f64) -> EntanglementSample {
    let k = (e * e - p.mass() * p.mass()).max(0.0).sqrt();
    let g = gamma(p, &ModeSpec::new(k).unwrap()).unwrap();
    EntanglementSample { energy: e, entropy_bits: entropy_closed(g).unwrap() }
}

fn pair(p: &CosmologyParams, e: f64, h: f64) -> (EntanglementSample, EntanglementSample) {
    (sample(p, e * (1.0 - 0.5 * h)), sample(p, e * (1.0 + 0.5 * h)))
}

/// `d ln γ / dE` of the closed form, at fixed mass.
fn analytic_slope(p: &CosmologyParams, e: f64) -> f64 {
    let k = (e * e - p.mass() * p.mass()).sqrt();
    let f = frequencies(p, &ModeSpec::new(k).unwrap()).unwrap();
    let (xm, xp) = (PI * f.omega_minus / p.sigma(), PI * f.omega_plus / p.sigma());
    let d_minus = -f.omega_minus / f.omega_out;
    let d_plus = 0.5 * (e / f.omega_out + 1.0);
    2.0 * PI / p.sigma() * (d_minus / xm.tanh() - d_plus / xp.tanh())
}

fn light() -> CosmologyParams {
    CosmologyParams::new(1.0, 1.0, 1e-3).unwrap()
}

#[test]
fn light_particle_recovers_epsilon() {
    let est = estimate_epsilon(&sample(&light(), 0.05), 1e-3).unwrap();
    assert!((est.epsilon_hat - 1.0).abs() < 0.02, "{est:?}");
}

#[test]
fn epsilon_error_shrinks_with_energy_in_light_regime() {
    let errs: Vec<f64> = [0.2, 0.1, 0.05, 0.02]
        .iter()
        .map(|&e| (estimate_epsilon(&sample(&light(), e), 1e-3).unwrap().epsilon_hat - 1.0).abs())
        .collect();
    assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
}

#[test]
fn analytic_slope_reference_values() {
    // 50-digit differentiation of ln γ(E).
    assert!((analytic_slope(&light(), 0.05) / -80.296_465_918_357_63 - 1.0).abs() < 1e-12);
    let heavy = CosmologyParams::new(1.0, 1.0, 1.0).unwrap();
    assert!((analytic_slope(&heavy, 1.5) / -6.637_189_657_359_748 - 1.0).abs() < 1e-12);
}

#[test]
fn finite_difference_slope_matches_derivative() {
    let p = light();
    let (a, b) = pair(&p, 0.05, 1e-4);
    let fd = log_gamma_slope(&a, &b, 1e-3).unwrap();
    let exact = analytic_slope(&p, fd.energy);
    assert!((fd.slope / exact - 1.0).abs() < 1e-5, "{} vs {exact}", fd.slope);
}

#[test]
fn finite_difference_is_second_order() {
    let p = CosmologyParams::new(1.0, 1.0, 1.0).unwrap();
    let exact = analytic_slope(&p, 1.5);
    let err = |h: f64| {
        let (a, b) = pair(&p, 1.5, h);
        (log_gamma_slope(&a, &b, 1.0).unwrap().slope - exact).abs()
    };
    let order = (err(1e-2) / err(5e-3)).log2();
    assert!((order - 2.0).abs() < 0.1, "order {order}");
}

#[test]
fn sigma_estimate_within_known_bias() {
    let (a, b) = pair(&light(), 0.05, 1e-3);
    let est = estimate_sigma(&a, &b, 1e-3).unwrap();
    assert!(est.sigma_hat > 1.0 / 1.5 && est.sigma_hat < 1.5, "{est:?}");
    // Frozen: 50-digit evaluation of the same pipeline.
    assert!((est.sigma_hat / 1.290_157_184_574_896 - 1.0).abs() < 1e-6, "{est:?}");
}

#[test]
fn fit_recovers_fifty_point_spectrum() {
    let p = CosmologyParams::new(1.0, 1.0, 1.0).unwrap();
    let data: Vec<SpectrumSample> = (0..50)
        .map(|i| {
            let k = 0.1 + 4.9 * i as f64 / 49.0;
            let g = gamma(&p, &ModeSpec::new(k).unwrap()).unwrap();
            SpectrumSample { k, entropy_bits: entropy_closed(g).unwrap() }
        })
        .collect();
    let fit = fit_parameters(&data, 1.0, None).unwrap();
    assert!(fit.converged, "{fit:?}");
    assert!((fit.epsilon_hat - 1.0).abs() < 1e-6 && (fit.sigma_hat - 1.0).abs() < 1e-6, "{fit:?}");
}
