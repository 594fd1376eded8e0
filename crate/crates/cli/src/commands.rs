//! One function per subcommand, each producing a [`Table`].

use cdma_core::capacity::{
    capacity_constrained, capacity_sync_closed_form, load_sweep, sinc_bandwidth_sweep, snr_for_ebn0, AsyncSetup,
    CapacityOptions, CapacityResult,
};
use cdma_core::large_system::{
    efficiency_of_user, mean_efficiency, sinr_user, solve_efficiency_scalar, solve_efficiency_sync, solve_upsilon,
    LawAtom, PowerDelayLaw, SystemLaw,
};
use cdma_core::montecarlo::{run_trials, theorem3_harness, FiniteConfig, Theorem3Config};
use cdma_core::numerics::{FixedPointOptions, FrequencyGrid};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{ExperimentConfig, Resolved, CHIP_INTERVAL};
use crate::error::CliError;
use crate::output::{cell, num, Table};

fn capacity_options(cfg: &ExperimentConfig) -> CapacityOptions {
    CapacityOptions { frequency_points: cfg.grid, ..Default::default() }
}

fn system(cfg: &ExperimentConfig, res: &Resolved, beta: f64, n0: f64) -> cdma_core::Result<SystemLaw> {
    SystemLaw::new(beta, n0, cfg.r, res.waveform.clone(), res.law.clone())
}

fn single_beta(res: &Resolved, command: &str) -> Result<f64, CliError> {
    match res.betas.as_slice() {
        [b] => Ok(*b),
        _ => Err(CliError::Config(format!("{command} takes a single beta value"))),
    }
}

/// Multiuser efficiency per load; scalar density samples, or per-atom
/// efficiencies when the matrix solver is selected.
pub fn efficiency(cfg: &ExperimentConfig, res: &Resolved) -> Result<Table, CliError> {
    let mut table = Table::new(&["kind", "beta", "power", "x", "value"]);
    let grid = FrequencyGrid::new(cfg.grid)?;
    for &beta in &res.betas {
        let sys = system(cfg, res, beta, cfg.n0)?;
        let b = num(beta);
        let mut matrix_eta = None;
        let mut scalar_eta = None;
        if res.matrix_solver || cfg.cross_check {
            let (field, report) = solve_upsilon(&sys, &grid, FixedPointOptions::default())?;
            if !report.converged {
                return Err(cdma_core::Error::NonConvergence {
                    context: " (Upsilon field)".into(),
                    iterations: report.iterations,
                    residual: report.final_residual,
                }
                .into());
            }
            let eta = mean_efficiency(&field, &sys)?;
            matrix_eta = Some(eta);
            if res.matrix_solver {
                table.push(vec!["eta".into(), b.clone(), String::new(), String::new(), num(eta)]);
                for (atom, sinr) in sys.law().atoms().iter().zip(field.atom_sinrs()) {
                    if atom.power > 0.0 {
                        let user = efficiency_of_user(*sinr, atom.power, &sys)?;
                        table.push(vec!["user_efficiency".into(), b.clone(), num(atom.power), num(atom.delay), num(user)]);
                    }
                }
            }
        }
        if !res.matrix_solver || cfg.cross_check {
            let spec = solve_efficiency_scalar(&sys, cfg.grid)?;
            scalar_eta = Some(spec.eta);
            if !res.matrix_solver {
                table.push(vec!["eta".into(), b.clone(), String::new(), String::new(), num(spec.eta)]);
                for (w, d) in spec.frequencies.iter().zip(&spec.density) {
                    table.push(vec!["density".into(), b.clone(), String::new(), num(*w), num(*d)]);
                }
            }
        }
        if let (Some(m), Some(s)) = (matrix_eta, scalar_eta) {
            let other = if res.matrix_solver { s } else { m };
            table.push(vec!["eta_cross_check".into(), b.clone(), String::new(), String::new(), num(other)]);
            let rel = (m - s).abs() / s.max(f64::MIN_POSITIVE);
            table.notes.push(format!("beta {beta}: matrix {m} vs scalar {s}, relative difference {rel:.2e}"));
            if rel > 1e-3 {
                table.warnings.push(format!("beta {beta}: solvers differ by {rel:.2e}"));
            }
        }
        if cfg.sync {
            let eta = solve_efficiency_sync(beta, &res.powers, cfg.n0)?;
            table.push(vec!["eta_sync".into(), b, String::new(), String::new(), num(eta)]);
        }
    }
    Ok(table)
}

/// Constrained capacity of the configured system and of the chip-synchronous
/// system at the configured Eb/N0.
pub fn capacity(cfg: &ExperimentConfig, res: &Resolved) -> Result<Table, CliError> {
    let mut table = Table::new(&[
        "beta",
        "snr_async",
        "capacity_async",
        "gamma_async",
        "snr_sync",
        "capacity_sync",
        "gamma_sync",
    ]);
    let opts = capacity_options(cfg);
    let energy = res.waveform.energy();
    for &beta in &res.betas {
        let capacity_at = |snr: f64| -> cdma_core::Result<f64> {
            if snr == 0.0 {
                return Ok(0.0);
            }
            capacity_constrained(&system(cfg, res, beta, energy / snr)?, opts)
        };
        let async_point = snr_for_ebn0(res.ebn0, beta, capacity_at)
            .and_then(|snr| CapacityResult::new(capacity_at(snr)?, snr, beta, &res.waveform));
        let sync_point = snr_for_ebn0(res.ebn0, beta, |s| capacity_sync_closed_form(beta, s))
            .and_then(|snr| CapacityResult::new(capacity_sync_closed_form(beta, snr)?, snr, beta, &res.waveform));
        let mut row = vec![num(beta)];
        for (point, label) in [(async_point, "async"), (sync_point, "sync")] {
            let what = format!("beta {beta} {label}");
            row.push(cell(&point.as_ref().map(|p| p.snr).map_err(Clone::clone), &what, &mut table.warnings));
            match point {
                Ok(p) => {
                    row.push(num(p.capacity_per_chip));
                    row.push(num(p.spectral_efficiency));
                }
                Err(_) => row.extend([String::new(), String::new()]),
            }
        }
        table.push(row);
    }
    Ok(table)
}

pub fn figure2(cfg: &ExperimentConfig, res: &Resolved) -> Result<Table, CliError> {
    let beta = single_beta(res, "figure2")?;
    let mut table = Table::new(&["alpha", "gamma_async_sinc", "gamma_sync"]);
    for row in sinc_bandwidth_sweep(&res.alphas, beta, res.ebn0, capacity_options(cfg))? {
        let what = format!("alpha {}", row.alpha);
        let a = cell(&row.gamma_async, &format!("{what} async"), &mut table.warnings);
        let s = cell(&row.gamma_sync, &format!("{what} sync"), &mut table.warnings);
        table.push(vec![num(row.alpha), a, s]);
    }
    Ok(table)
}

pub fn figure3(cfg: &ExperimentConfig, res: &Resolved) -> Result<Table, CliError> {
    let mut setup = AsyncSetup::new(res.waveform.clone());
    setup.r = cfg.r;
    setup.delay_atoms = cfg.delay_atoms;
    setup.opts = capacity_options(cfg);
    let mut table = Table::new(&["beta", "gamma_async", "gamma_sync", "relative_gap"]);
    let mut max_gap: Option<f64> = None;
    for row in load_sweep(&setup, &res.betas, res.ebn0) {
        let what = format!("beta {}", row.beta);
        let a = cell(&row.gamma_async, &format!("{what} async"), &mut table.warnings);
        let s = cell(&row.gamma_sync, &format!("{what} sync"), &mut table.warnings);
        let gap = row.relative_gap();
        if let Some(g) = gap {
            max_gap = Some(max_gap.map_or(g, |m: f64| m.max(g)));
        }
        table.push(vec![num(row.beta), a, s, gap.map(num).unwrap_or_default()]);
    }
    if let Some(g) = max_gap {
        table.notes.push(format!("maximum relative gap {g:.4}"));
    }
    Ok(table)
}

fn user_powers(res: &Resolved, k: usize) -> Vec<f64> {
    let atoms = res.powers.atoms();
    (0..k).map(|i| atoms[i % atoms.len()].power).collect()
}

pub fn montecarlo(cfg: &ExperimentConfig, res: &Resolved) -> Result<Table, CliError> {
    let powers = user_powers(res, cfg.k);
    let delays: Vec<f64> = match cfg.delays.as_str() {
        "zero" => vec![0.0; cfg.k],
        _ => (0..cfg.k).map(|i| (i % cfg.delay_atoms) as f64 * CHIP_INTERVAL / cfg.delay_atoms as f64).collect(),
    };
    let finite = FiniteConfig {
        n: cfg.n,
        r: cfg.r,
        waveform: res.waveform.clone(),
        amplitudes: powers.iter().map(|p| Complex64::new(p.sqrt(), 0.0)).collect(),
        delays: delays.clone(),
        n0: cfg.n0,
        kind: res.matrix,
    };
    let report = run_trials(&finite, cfg.trials, cfg.seed)?;

    // large-system prediction for the empirical law of the simulated users
    let atoms = powers
        .iter()
        .zip(&delays)
        .map(|(&power, &delay)| LawAtom { power, delay, weight: 1.0 / cfg.k as f64 })
        .collect();
    let law = PowerDelayLaw::new(atoms, CHIP_INTERVAL)?;
    let sys = SystemLaw::new(cfg.k as f64 / cfg.n as f64, cfg.n0, cfg.r, res.waveform.clone(), law)?;
    let (field, _) = solve_upsilon(&sys, &FrequencyGrid::new(cfg.grid)?, FixedPointOptions::default())?;
    let predicted = powers
        .iter()
        .zip(&delays)
        .map(|(&p, &d)| efficiency_of_user(sinr_user(&field, &sys, p, d)?, p, &sys))
        .collect::<cdma_core::Result<Vec<f64>>>()?;

    let mut table = Table::new(&["trial", "user", "delay_over_tc", "power", "sinr", "efficiency", "predicted_efficiency"]);
    for s in &report.samples {
        table.push(vec![
            s.trial.to_string(),
            s.user.to_string(),
            num(delays[s.user] / CHIP_INTERVAL),
            num(powers[s.user]),
            num(s.sinr),
            num(s.efficiency),
            num(predicted[s.user]),
        ]);
    }
    let mean_pred = predicted.iter().sum::<f64>() / predicted.len() as f64;
    let sum = &report.summary;
    table.notes.push(format!(
        "mean efficiency {:.6} (standard error {:.2e}) over {} trials; predicted {:.6}; relative difference {:.4}",
        sum.mean_efficiency,
        sum.standard_error,
        sum.trials,
        mean_pred,
        (sum.mean_efficiency - mean_pred).abs() / mean_pred
    ));
    Ok(table)
}

pub fn theorem3(cfg: &ExperimentConfig, res: &Resolved) -> Result<Table, CliError> {
    let symbol = cfg.n as f64 * CHIP_INTERVAL;
    let delays: Vec<f64> = match cfg.delays.as_str() {
        "zero" => vec![0.0; cfg.k],
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0xD1B5_4A32_D192_ED03);
            (0..cfg.k).map(|_| rng.random::<f64>() * symbol).collect()
        }
    };
    let t3 = Theorem3Config {
        n: cfg.n,
        r: cfg.r,
        waveform: res.waveform.clone(),
        amplitudes: user_powers(res, cfg.k).iter().map(|p| Complex64::new(p.sqrt(), 0.0)).collect(),
        delays,
        n0: cfg.n0,
        window: cfg.window,
    };
    let report = theorem3_harness(&t3, cfg.trials, cfg.seed)?;
    let mut table = Table::new(&["quantity", "value"]);
    let rows = [
        ("windowed_mean_efficiency", report.general.mean_efficiency),
        ("windowed_standard_error", report.general.standard_error),
        ("reduced_mean_efficiency", report.reduced.mean_efficiency),
        ("reduced_standard_error", report.reduced.standard_error),
        ("difference", report.difference()),
        ("combined_standard_error", report.combined_standard_error()),
    ];
    for (q, v) in rows {
        table.push(vec![q.into(), num(v)]);
    }
    table.push(vec!["within_two_standard_errors".into(), report.consistent(2.0).to_string()]);
    Ok(table)
}
