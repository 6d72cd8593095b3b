use std::path::{Path, PathBuf};

use expansion_entanglement::{
    check_grid, entanglement_spectrum, entropy_closed, estimate_epsilon, estimate_sigma, fit_parameters_with,
    gamma_from_entropy, CosmologyParams, EntanglementSample, Execution, FitOptions, IntegrationConfig, ModeSpec, SpectrumSample,
};

use crate::args::{EntropyArgs, FitArgs, GridArgs, InvertArgs, ModelArgs, OracleArgs, Scale, SpectrumArgs};
use crate::config::ConfigFile;
use crate::error::{CliError, EXIT_NOT_CONVERGED, EXIT_ORACLE_THRESHOLD};
use crate::table::{format_number, Cell, Table};

/// A finished command: the table to emit, the exit code, and an optional
/// diagnostic for standard error.
pub struct Outcome {
    pub table: Table,
    pub code: i32,
    pub note: Option<String>,
}

impl Outcome {
    fn ok(table: Table) -> Self {
        Self { table, code: 0, note: None }
    }
}

fn pick_f64(flag: Option<f64>, cfg: &ConfigFile, key: &str) -> Result<Option<f64>, CliError> {
    match flag {
        Some(v) => Ok(Some(v)),
        None => cfg.f64(key),
    }
}

fn pick_list(flag: &[f64], cfg: &ConfigFile, key: &str) -> Result<Vec<f64>, CliError> {
    if flag.is_empty() {
        cfg.list(key)
    } else {
        Ok(flag.to_vec())
    }
}

fn pick_path(flag: &Option<PathBuf>, cfg: &ConfigFile, key: &str) -> Option<PathBuf> {
    flag.clone().or_else(|| cfg.get(key).map(PathBuf::from))
}

fn mass(flag: Option<f64>, cfg: &ConfigFile) -> Result<f64, CliError> {
    Ok(pick_f64(flag, cfg, "mass")?.unwrap_or(1.0))
}

fn model(m: &ModelArgs, cfg: &ConfigFile) -> Result<CosmologyParams, CliError> {
    let eps = pick_f64(m.epsilon, cfg, "epsilon")?.unwrap_or(1.0);
    let sigma = pick_f64(m.sigma, cfg, "sigma")?.unwrap_or(1.0);
    Ok(CosmologyParams::new(eps, sigma, mass(m.mass, cfg)?)?)
}

/// Momenta to evaluate, ascending.
pub fn momenta(g: &GridArgs, cfg: &ConfigFile) -> Result<Vec<f64>, CliError> {
    let mut ks = pick_list(&g.k, cfg, "k")?;
    if ks.is_empty() {
        let lo = pick_f64(g.k_min, cfg, "k-min")?.unwrap_or(0.0);
        let hi = pick_f64(g.k_max, cfg, "k-max")?.unwrap_or(3.0);
        let n = match g.k_count {
            Some(n) => n,
            None => cfg.usize("k-count")?.unwrap_or(31),
        };
        let scale = match g.k_scale {
            Some(s) => s,
            None => match cfg.get("k-scale") {
                None => Scale::Linear,
                Some(s) => Scale::parse(s).ok_or_else(|| CliError::usage(format!("k-scale must be linear or log, got '{s}'")))?,
            },
        };
        ks = grid(lo, hi, n, scale)?;
    }
    if let Some(bad) = ks.iter().find(|k| !k.is_finite()) {
        return Err(CliError::usage(format!("momentum {bad} is not finite")));
    }
    ks.sort_by(f64::total_cmp);
    Ok(ks)
}

fn grid(lo: f64, hi: f64, n: usize, scale: Scale) -> Result<Vec<f64>, CliError> {
    if n == 0 {
        return Err(CliError::usage("k-count must be at least 1"));
    }
    if !(lo.is_finite() && hi.is_finite()) || lo > hi {
        return Err(CliError::usage(format!("need finite k-min <= k-max, got [{lo}, {hi}]")));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    let steps = (n - 1) as f64;
    let t = |i: usize| i as f64 / steps;
    let mut ks: Vec<f64> = match scale {
        Scale::Linear => (0..n).map(|i| lo + (hi - lo) * i as f64 / steps).collect(),
        Scale::Log => {
            if !(lo > 0.0) {
                return Err(CliError::usage(format!("log grid needs k-min > 0, got {lo}")));
            }
            let (a, b) = (lo.ln(), hi.ln());
            (0..n).map(|i| (a + (b - a) * t(i)).exp()).collect()
        }
    };
    ks[0] = lo;
    ks[n - 1] = hi;
    Ok(ks)
}

pub fn spectrum(a: &SpectrumArgs, cfg: &ConfigFile) -> Result<Outcome, CliError> {
    let params = model(&a.model, cfg)?;
    let ks = momenta(&a.grid, cfg)?;
    let mut table = Table::new(&["k", "omega_in", "omega_out", "gamma", "n_mean", "entropy_bits", "status"]);
    for r in entanglement_spectrum(&params, &ks)? {
        table.push(vec![
            Cell::Num(r.k),
            Cell::Num(r.omega_in),
            Cell::Num(r.omega_out),
            Cell::Num(r.gamma),
            Cell::Num(r.mean_n),
            Cell::Num(r.entropy_bits),
            Cell::Text(r.status.as_str()),
        ]);
    }
    Ok(Outcome::ok(table))
}

pub fn oracle(a: &OracleArgs, cfg: &ConfigFile) -> Result<Outcome, CliError> {
    let params = model(&a.model, cfg)?;
    let ks = momenta(&a.grid, cfg)?;
    let config = IntegrationConfig {
        rel_tol: pick_f64(a.rel_tol, cfg, "rel-tol")?.unwrap_or(IntegrationConfig::default().rel_tol),
        ..IntegrationConfig::default()
    };
    let threshold = pick_f64(a.max_rel_err, cfg, "max-rel-err")?.unwrap_or(1e-6);
    if !(threshold > 0.0 && threshold.is_finite()) {
        return Err(CliError::usage(format!("max-rel-err must be positive, got {threshold}")));
    }
    let cases = ks
        .iter()
        .map(|&k| Ok((params, ModeSpec::new(k)?)))
        .collect::<Result<Vec<_>, CliError>>()?;

    let mut table = Table::new(&[
        "k",
        "gamma_closed",
        "gamma_oracle",
        "rel_error",
        "normalization_defect",
        "wronskian_drift",
        "steps",
    ]);
    let mut failing = 0;
    let mut worst = (0.0, f64::NAN);
    for result in check_grid(&cases, &config, Execution::Parallel) {
        let d = result?;
        let err = d.rel_error.max(d.normalization_defect).max(d.trace.wronskian_drift);
        if !(err <= threshold) {
            failing += 1;
        }
        if !(err <= worst.0) {
            worst = (err, d.k);
        }
        table.push(vec![
            Cell::Num(d.k),
            Cell::Num(d.gamma_closed),
            Cell::Num(d.gamma_oracle),
            Cell::Num(d.rel_error),
            Cell::Num(d.normalization_defect),
            Cell::Num(d.trace.wronskian_drift),
            Cell::Int(d.trace.steps_taken),
        ]);
    }
    if failing == 0 {
        Ok(Outcome::ok(table))
    } else {
        Ok(Outcome {
            table,
            code: EXIT_ORACLE_THRESHOLD,
            note: Some(format!(
                "{failing} of {} modes exceed {} (worst {} at k = {})",
                cases.len(),
                format_number(threshold),
                format_number(worst.0),
                format_number(worst.1)
            )),
        })
    }
}

/// Two-column numeric CSV with a fixed header; `#` starts a comment line.
pub fn read_pairs(path: &Path, header: [&str; 2]) -> Result<Vec<(f64, f64)>, CliError> {
    let fail = |msg: String| CliError::usage(format!("{}: {msg}", path.display()));
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| fail(e.to_string()))?;
    let found = reader.headers().map_err(|e| fail(e.to_string()))?.clone();
    if found.iter().collect::<Vec<_>>() != header {
        return Err(fail(format!("expected header '{}'", header.join(","))));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| fail(e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |i: usize| {
            record[i]
                .parse::<f64>()
                .map_err(|_| fail(format!("line {line}: cannot parse '{}'", &record[i])))
        };
        rows.push((field(0)?, field(1)?));
    }
    Ok(rows)
}

pub fn invert(a: &InvertArgs, cfg: &ConfigFile) -> Result<Outcome, CliError> {
    let m = mass(a.mass, cfg)?;
    let (entropies, energies): (Vec<f64>, Vec<f64>) = match pick_path(&a.input, cfg, "input") {
        Some(path) => {
            if !a.entropy.is_empty() || !a.energy.is_empty() {
                return Err(CliError::usage("give samples either by --input or by flags, not both"));
            }
            let rows = read_pairs(&path, ["energy", "entropy_bits"])?;
            (rows.iter().map(|r| r.1).collect(), rows.iter().map(|r| r.0).collect())
        }
        None => (pick_list(&a.entropy, cfg, "entropy")?, pick_list(&a.energy, cfg, "energy")?),
    };
    if entropies.is_empty() {
        return Err(CliError::usage("no entropy given"));
    }
    if !energies.is_empty() && energies.len() != entropies.len() {
        return Err(CliError::usage(format!(
            "{} energies for {} entropies; give one per entropy or none",
            energies.len(),
            entropies.len()
        )));
    }

    let samples: Vec<EntanglementSample> = energies
        .iter()
        .zip(&entropies)
        .map(|(&energy, &entropy_bits)| EntanglementSample { energy, entropy_bits })
        .collect();
    let sigma_hat = match samples.as_slice() {
        [a, b] => estimate_sigma(a, b, m)?.sigma_hat,
        _ => f64::NAN,
    };

    let mut table = Table::new(&["energy", "entropy_bits", "gamma", "epsilon_hat", "regime_ratio", "sigma_hat"]);
    for (i, &s) in entropies.iter().enumerate() {
        let row = match samples.get(i) {
            Some(sample) => {
                let est = estimate_epsilon(sample, m)?;
                [sample.energy, s, est.gamma, est.epsilon_hat, est.regime_ratio, sigma_hat]
            }
            None => [f64::NAN, s, gamma_from_entropy(s)?, f64::NAN, f64::NAN, f64::NAN],
        };
        table.push(row.iter().map(|&x| Cell::Num(x)).collect());
    }
    Ok(Outcome::ok(table))
}

pub fn fit(a: &FitArgs, cfg: &ConfigFile) -> Result<Outcome, CliError> {
    let m = mass(a.mass, cfg)?;
    let path = pick_path(&a.input, cfg, "input").ok_or_else(|| CliError::usage("fit needs --input"))?;
    let samples: Vec<SpectrumSample> = read_pairs(&path, ["k", "entropy_bits"])?
        .into_iter()
        .map(|(k, entropy_bits)| SpectrumSample { k, entropy_bits })
        .collect();
    let init = match (pick_f64(a.init_epsilon, cfg, "init-epsilon")?, pick_f64(a.init_sigma, cfg, "init-sigma")?) {
        (Some(e), Some(s)) => Some((e, s)),
        (None, None) => None,
        _ => return Err(CliError::usage("give both init-epsilon and init-sigma or neither")),
    };
    let options = FitOptions {
        max_iterations: match a.max_iterations {
            Some(n) => n,
            None => cfg.usize("max-iterations")?.unwrap_or(FitOptions::default().max_iterations),
        },
        ..FitOptions::default()
    };
    let fit = fit_parameters_with(&samples, m, init, &options)?;
    let mut table = Table::new(&[
        "epsilon_hat",
        "sigma_hat",
        "residual_norm",
        "gradient_norm",
        "iterations",
        "converged",
    ]);
    table.push(vec![
        Cell::Num(fit.epsilon_hat),
        Cell::Num(fit.sigma_hat),
        Cell::Num(fit.residual_norm),
        Cell::Num(fit.gradient_norm),
        Cell::Int(fit.iterations),
        Cell::Bool(fit.converged),
    ]);
    if fit.converged {
        Ok(Outcome::ok(table))
    } else {
        Ok(Outcome {
            table,
            code: EXIT_NOT_CONVERGED,
            note: Some(format!("fit did not converge after {} iterations", fit.iterations)),
        })
    }
}

pub fn entropy(a: &EntropyArgs, cfg: &ConfigFile) -> Result<Outcome, CliError> {
    let gammas = pick_list(&a.gamma, cfg, "gamma")?;
    let entropies = pick_list(&a.entropy, cfg, "entropy")?;
    if gammas.is_empty() && entropies.is_empty() {
        return Err(CliError::usage("give --gamma or --entropy"));
    }
    let mut table = Table::new(&["gamma", "entropy_bits"]);
    for g in gammas {
        table.push(vec![Cell::Num(g), Cell::Num(entropy_closed(g)?)]);
    }
    for s in entropies {
        table.push(vec![Cell::Num(gamma_from_entropy(s)?), Cell::Num(s)]);
    }
    Ok(Outcome::ok(table))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(grid(0.0, 3.0, 4, Scale::Linear).unwrap(), vec![0.0, 1.0, 2.0, 3.0]);
        let g = grid(0.01, 100.0, 5, Scale::Log).unwrap();
        assert_eq!((g[0], g[4]), (0.01, 100.0));
        assert!((g[2] - 1.0).abs() < 1e-14);
        assert_eq!(grid(2.0, 2.0, 1, Scale::Log).unwrap(), vec![2.0]);
        assert!(grid(0.0, 1.0, 3, Scale::Log).is_err());
        assert!(grid(1.0, 0.0, 3, Scale::Linear).is_err());
        assert!(grid(0.0, 1.0, 0, Scale::Linear).is_err());
    }
}
