//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Runs as a plain binary so the report is always printed.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use cdma_core::capacity::{
    capacity_single_user_sinc, capacity_sync_closed_form, db_to_linear, load_sweep, sinc_bandwidth_sweep,
    snr_for_ebn0, AsyncSetup, CapacityOptions,
};
use cdma_core::large_system::{
    mean_efficiency, solve_efficiency_scalar, solve_efficiency_sinc, solve_efficiency_sync, solve_upsilon,
    PowerDelayLaw, PowerLaw, SystemLaw,
};
use cdma_core::montecarlo::{run_trials, theorem3_harness, FiniteConfig, MatrixKind, Theorem3Config};
use cdma_core::numerics::{wrap_angle, FixedPointOptions, FrequencyGrid};
use cdma_core::waveforms::{q_eigendecomposition, q_split, structured_matrix, ChipWaveform, SpectrumTable};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

type Check = fn() -> Result<Outcome, cdma_core::Error>;

fn alpha_one_equivalence() -> Result<Outcome, cdma_core::Error> {
    let unit = PowerLaw::point(1.0)?;
    let mut worst: f64 = 0.0;
    for beta in [0.25, 0.5, 1.0, 2.0, 4.0] {
        for n0 in [0.01, 0.1, 1.0] {
            let a = solve_efficiency_sinc(beta, 1.0, &unit, n0)?;
            let b = solve_efficiency_sync(beta, &unit, n0)?;
            worst = worst.max((a - b).abs());
        }
    }
    Ok(outcome(worst <= 1e-8, format!("max |eta_sinc - eta_sync| = {worst:.2e} (tol 1e-8)")))
}

fn sinc_scaling_identity() -> Result<Outcome, cdma_core::Error> {
    let snr = 10.0;
    let mut worst: f64 = 0.0;
    for alpha in [0.5, 1.0, 2.0] {
        let setup = AsyncSetup::new(ChipWaveform::sinc(alpha, 1.0)?);
        for beta in [0.5, 1.0, 2.0] {
            let c = setup.capacity(beta, snr)?;
            let expect = alpha * capacity_sync_closed_form(beta / alpha, snr)?;
            worst = worst.max((c - expect).abs() / expect);
        }
    }
    Ok(outcome(worst <= 1e-4, format!("max relative deviation = {worst:.2e} (tol 1e-4)")))
}

fn rrc_system(beta: f64, n0: f64, law: PowerDelayLaw) -> Result<SystemLaw, cdma_core::Error> {
    SystemLaw::new(beta, n0, 2, ChipWaveform::root_raised_cosine(0.22, 1.0)?, law)
}

fn matrix_scalar_consistency() -> Result<Outcome, cdma_core::Error> {
    let law = PowerDelayLaw::uniform_delays(&PowerLaw::point(1.0)?, 64, 1.0)?;
    let sys = rrc_system(1.0, 0.1, law)?;
    let grid = FrequencyGrid::new(512)?;
    let (field, report) = solve_upsilon(&sys, &grid, FixedPointOptions::default())?;
    let matrix = mean_efficiency(&field, &sys)?;
    let scalar = solve_efficiency_scalar(&sys, 512)?.eta;
    let rel = (matrix - scalar).abs() / scalar;
    Ok(outcome(
        report.converged && rel <= 1e-3,
        format!("matrix {matrix:.6} vs scalar {scalar:.6}, relative {rel:.2e} (tol 1e-3)"),
    ))
}

fn delay_independence() -> Result<Outcome, cdma_core::Error> {
    let rrc = ChipWaveform::root_raised_cosine(0.22, 1.0)?;
    let points = 801;
    let omega: Vec<f64> = (0..points).map(|i| -PI + 2.0 * PI * i as f64 / (points - 1) as f64).collect();
    let values = omega.iter().map(|&w| rrc.spectrum(w)).collect::<Result<Vec<_>, _>>()?;
    let clipped = ChipWaveform::tabulated(SpectrumTable::new(omega, values)?, 1.0)?;
    let powers = PowerLaw::point(1.0)?;
    let zero = PowerDelayLaw::fixed_delay(&powers, 0.0, 1.0)?;
    let uniform = PowerDelayLaw::uniform_delays(&powers, 64, 1.0)?;
    let grid = FrequencyGrid::new(128)?;
    let mut worst: f64 = 0.0;
    for w in [ChipWaveform::sinc(1.0, 1.0)?, clipped] {
        let a = SystemLaw::new(1.0, 0.1, 2, w.clone(), zero.clone())?;
        let b = SystemLaw::new(1.0, 0.1, 2, w, uniform.clone())?;
        let (fa, _) = solve_upsilon(&a, &grid, FixedPointOptions::default())?;
        let (fb, _) = solve_upsilon(&b, &grid, FixedPointOptions::default())?;
        for (x, y) in fa.matrices().iter().zip(fb.matrices()) {
            worst = worst.max((x - y).max_abs() / x.max_abs());
        }
    }
    Ok(outcome(worst <= 1e-6, format!("max relative matrix difference = {worst:.2e} (tol 1e-6)")))
}

fn monte_carlo_convergence() -> Result<Outcome, cdma_core::Error> {
    let w = ChipWaveform::root_raised_cosine(0.22, 1.0)?;
    let (n, k, n0) = (128, 64, 0.1);
    let law = PowerDelayLaw::uniform_delays(&PowerLaw::point(1.0)?, 64, 1.0)?;
    let sys = SystemLaw::new(k as f64 / n as f64, n0, 2, w.clone(), law)?;
    let (field, _) = solve_upsilon(&sys, &FrequencyGrid::new(256)?, FixedPointOptions::default())?;
    let predicted = mean_efficiency(&field, &sys)?;
    let cfg = FiniteConfig::equal_power_uniform_delays(n, k, 2, w, n0, MatrixKind::BlockToeplitz, 64);
    let report = run_trials(&cfg, 200, 20_240_601)?;
    let mean = report.summary.mean_efficiency;
    let rel = (mean - predicted).abs() / predicted;
    Ok(outcome(
        rel <= 0.03,
        format!(
            "simulated {mean:.5} (se {:.1e}) vs predicted {predicted:.5}, relative {rel:.4} (tol 0.03)",
            report.summary.standard_error
        ),
    ))
}

fn symbol_delay_reduction() -> Result<Outcome, cdma_core::Error> {
    let (n, k) = (64, 32);
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let delays = (0..k).map(|_| rng.random::<f64>() * n as f64).collect();
    let cfg = Theorem3Config {
        n,
        r: 2,
        waveform: ChipWaveform::root_raised_cosine(0.22, 1.0)?,
        amplitudes: vec![Complex64::new(1.0, 0.0); k],
        delays,
        n0: 0.1,
        window: 3,
    };
    let report = theorem3_harness(&cfg, 100, 606)?;
    let z = report.difference().abs() / report.combined_standard_error();
    Ok(outcome(
        report.consistent(2.0),
        format!(
            "windowed {:.5} vs reduced {:.5}, |difference| = {z:.2} combined standard errors (tol 2)",
            report.general.mean_efficiency, report.reduced.mean_efficiency
        ),
    ))
}

fn lemma_properties() -> Result<Outcome, cdma_core::Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst_trace: f64 = 0.0;
    let mut worst_reconstruction: f64 = 0.0;
    for _ in 0..1000 {
        let rho = rng.random_range(0.05..1.0);
        let w = ChipWaveform::root_raised_cosine(rho, 1.0)?;
        let r = w.min_oversampling() + rng.random_range(0..2usize);
        let omega = wrap_angle(rng.random_range(-PI..PI));
        let tau = rng.random::<f64>();
        let b: Vec<Complex64> =
            (0..r).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let bm = structured_matrix(omega, &b);
        let q = q_split(&w, r, omega, tau)?;
        let scale = bm.frobenius_norm() * q.oscillating.frobenius_norm();
        if scale > 0.0 {
            worst_trace = worst_trace.max(bm.matmul(&q.oscillating).trace().norm() / scale);
        }
        let (u, d) = q_eigendecomposition(&w, r, omega)?;
        let udu = u.matmul(&cdma_core::ComplexMatrix::from_diagonal(&d)).matmul(&u.adjoint());
        worst_reconstruction = worst_reconstruction.max((&udu - &q.delay_free).max_abs());
    }
    Ok(outcome(
        worst_trace <= 1e-10 && worst_reconstruction <= 1e-10,
        format!("max scaled |tr(B Qbar)| = {worst_trace:.2e}, max |UDU^H - Q| = {worst_reconstruction:.2e} (tol 1e-10)"),
    ))
}

fn equal_power_closed_form() -> Result<Outcome, cdma_core::Error> {
    let (beta, n0): (f64, f64) = (1.0, 0.1);
    let b = n0 + beta - 1.0;
    let root = (-b + (b * b + 4.0 * n0).sqrt()) / 2.0;
    let eta = solve_efficiency_sync(beta, &PowerLaw::point(1.0)?, n0)?;
    let err = (eta - root).abs();
    Ok(outcome(err <= 1e-10, format!("eta {eta:.12} vs root {root:.12}, |error| = {err:.1e} (tol 1e-10)")))
}

fn figure_shapes() -> Result<Outcome, cdma_core::Error> {
    let ebn0 = db_to_linear(10.0);
    let alphas: Vec<f64> = (0..15).map(|i| 0.25 + 0.125 * i as f64).collect();
    let rows = sinc_bandwidth_sweep(&alphas, 1.0, ebn0, CapacityOptions::default())?;
    let mut asyncs = Vec::new();
    let mut syncs = Vec::new();
    for row in &rows {
        asyncs.push(row.gamma_async.clone()?);
        syncs.push(row.gamma_sync.clone()?);
    }
    let decreasing = asyncs.windows(2).all(|p| p[1] < p[0]);
    let at_one = alphas.iter().position(|&a| a == 1.0).expect("grid contains alpha = 1");
    let coincide = (asyncs[at_one] - syncs[at_one]).abs() <= 1e-6 * syncs[at_one];
    let exceeds = alphas.iter().zip(asyncs.iter().zip(&syncs)).filter(|(a, _)| **a > 1.0).all(|(_, (x, y))| x > y);

    let betas: Vec<f64> = (1..=32).map(|i| 0.25 * i as f64).collect();
    let setup = AsyncSetup::new(ChipWaveform::root_raised_cosine(0.22, 1.0)?);
    let gaps = load_sweep(&setup, &betas, ebn0)
        .iter()
        .map(|row| row.relative_gap().ok_or_else(|| cdma_core::Error::InvalidParameter(format!("beta {}", row.beta))))
        .collect::<Result<Vec<_>, _>>()?;
    let nonnegative = gaps.iter().all(|&g| g >= 0.0);
    let nondecreasing = gaps.windows(2).all(|p| p[1] >= p[0] - 1e-9);
    let max_gap = gaps.iter().copied().fold(f64::MIN, f64::max);
    let in_band = (0.10..=0.14).contains(&max_gap);
    Ok(outcome(
        decreasing && coincide && exceeds && nonnegative && nondecreasing,
        format!(
            "bandwidth curve decreasing={decreasing}, equal at alpha=1={coincide}, async above sync for alpha>1={exceeds}; \
             load gap nonnegative={nonnegative}, nondecreasing={nondecreasing}; max relative gap {max_gap:.4} {} [0.10, 0.14] (soft)",
            if in_band { "inside" } else { "OUTSIDE" }
        ),
    ))
}

fn load_limit_trend() -> Result<Outcome, cdma_core::Error> {
    let ebn0 = db_to_linear(10.0);
    let mut monotone = true;
    let mut ratios = Vec::new();
    for alpha in [0.5, 2.0] {
        let setup = AsyncSetup::new(ChipWaveform::sinc(alpha, 1.0)?);
        let mut prev = f64::MIN;
        let mut last = 0.0;
        for beta in [1.0, 2.0, 4.0, 8.0, 16.0] {
            let gamma = setup.at_ebn0(beta, ebn0)?.spectral_efficiency;
            monotone &= gamma >= prev;
            prev = gamma;
            last = gamma;
        }
        // single-user reference at the same Eb/N0 and bandwidth
        let beta = 16.0;
        let snr = snr_for_ebn0(ebn0, beta, |s| capacity_single_user_sinc(beta, alpha, s))?;
        let reference = capacity_single_user_sinc(beta, alpha, snr)? * 2.0 / alpha;
        ratios.push(last / reference);
    }
    let pass = monotone && ratios.iter().all(|&x| x >= 0.9);
    Ok(outcome(
        pass,
        format!(
            "nondecreasing in beta={monotone}; beta=16 fraction of single-user efficiency: alpha=0.5 {:.4}, alpha=2 {:.4} (min 0.90)",
            ratios[0], ratios[1]
        ),
    ))
}

fn main() -> ExitCode {
    let checks: [(&str, Check, Option<Duration>); 10] = [
        ("alpha=1 sinc equals synchronous fixed point", alpha_one_equivalence, Some(Duration::from_secs(1))),
        ("sinc capacity scaling identity", sinc_scaling_identity, Some(Duration::from_secs(30))),
        ("matrix and scalar solvers agree", matrix_scalar_consistency, Some(Duration::from_secs(60))),
        ("delay independence at Nyquist bandwidth", delay_independence, None),
        ("Monte Carlo matches large-system prediction", monte_carlo_convergence, Some(Duration::from_secs(300))),
        ("symbol delays reduce modulo the chip interval", symbol_delay_reduction, Some(Duration::from_secs(300))),
        ("trace annihilation and Q reconstruction", lemma_properties, Some(Duration::from_secs(5))),
        ("equal-power closed form", equal_power_closed_form, None),
        ("spectral-efficiency curve shapes", figure_shapes, None),
        ("high-load trend toward single-user efficiency", load_limit_trend, None),
    ];
    let mut failures = 0;
    for (i, (name, check, budget)) in checks.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let (pass, detail) = match result {
            Ok(o) => {
                let on_time = budget.map_or(true, |b| elapsed <= b);
                let timing = match budget {
                    Some(b) => format!("{:.2}s of {}s budget", elapsed.as_secs_f64(), b.as_secs()),
                    None => format!("{:.2}s", elapsed.as_secs_f64()),
                };
                (o.pass && on_time, format!("{}; {timing}", o.detail))
            }
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failures += 1;
        }
        println!("{} criterion {:>2} ({name}): {detail}", if pass { "PASS" } else { "FAIL" }, i + 1);
    }
    println!("{} of {} criteria passed", checks.len() - failures, checks.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
