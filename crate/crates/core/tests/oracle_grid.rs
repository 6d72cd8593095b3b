use expansion_entanglement::{
    check_against_closed_form, check_grid, evolve_mode, CosmologyParams, Execution, IntegrationConfig, ModeSpec,
};

fn grid() -> Vec<(CosmologyParams, ModeSpec)> {
    let mut cases = Vec::new();
    for &eps in &[0.1, 1.0, 3.0] {
        for &sigma in &[0.3, 1.0, 10.0] {
            for &k in &[0.0, 0.5, 2.0] {
                cases.push((CosmologyParams::new(eps, sigma, 1.0).unwrap(), ModeSpec::new(k).unwrap()));
            }
        }
    }
    cases
}

#[test]
fn oracle_matches_closed_form_on_grid() {
    let cases = grid();
    let results = check_grid(&cases, &IntegrationConfig::default(), Execution::Parallel);
    assert_eq!(results.len(), 27);
    for ((p, mode), r) in cases.iter().zip(results) {
        let d = r.unwrap_or_else(|e| panic!("{p:?} k={}: {e}", mode.k()));
        assert!(d.rel_error < 1e-6, "{p:?} {d:?}");
        assert!(d.normalization_defect < 1e-8, "{p:?} {d:?}");
        assert!(d.trace.wronskian_drift < 1e-8, "{p:?} {d:?}");
    }
}

#[test]
fn execution_strategies_agree() {
    let cases = &grid()[..9];
    let config = IntegrationConfig::default();
    let seq = check_grid(cases, &config, Execution::Sequential);
    let par = check_grid(cases, &config, Execution::Parallel);
    assert_eq!(seq, par);
}

#[test]
fn tighter_tolerance_does_not_move_the_answer() {
    let p = CosmologyParams::new(1.0, 1.0, 1.0).unwrap();
    let mode = ModeSpec::new(0.5).unwrap();
    let loose = IntegrationConfig { rel_tol: 1e-10, ..IntegrationConfig::default() };
    let tight = IntegrationConfig { rel_tol: 5e-11, ..IntegrationConfig::default() };
    let a = check_against_closed_form(&p, &mode, &loose).unwrap();
    let b = check_against_closed_form(&p, &mode, &tight).unwrap();
    assert!((a.gamma_oracle / b.gamma_oracle - 1.0).abs() < 1e-7);
    assert!(b.trace.steps_taken >= a.trace.steps_taken);
}

#[test]
fn oracle_is_even_in_k() {
    let p = CosmologyParams::new(3.0, 1.0, 1.0).unwrap();
    let config = IntegrationConfig::default();
    let (plus, _) = evolve_mode(&p, &ModeSpec::new(2.0).unwrap(), &config).unwrap();
    let (minus, _) = evolve_mode(&p, &ModeSpec::new(-2.0).unwrap(), &config).unwrap();
    assert_eq!(plus, minus);
}

#[test]
fn massless_oracle_creates_nothing() {
    let config = IntegrationConfig::default();
    for &(eps, sigma) in &[(0.1, 0.3), (1.0, 1.0), (3.0, 10.0)] {
        let p = CosmologyParams::new(eps, sigma, 0.0).unwrap();
        for &k in &[0.5, 2.0] {
            let (c, _) = evolve_mode(&p, &ModeSpec::new(k).unwrap(), &config).unwrap();
            assert!(c.beta.norm() < 1e-8, "{p:?} k={k}: {c:?}");
        }
    }
}
