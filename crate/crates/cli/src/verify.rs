//! Self-check suite: structural properties of the sampled spectra, solver
//! cross-checks and identities, each reported with its measured residual.

use std::f64::consts::PI;

use cdma_core::capacity::{
    capacity_sync_closed_form, db_to_linear, linear_to_db, load_sweep, AsyncSetup,
};
use cdma_core::large_system::{
    mean_efficiency, solve_efficiency_scalar, solve_efficiency_sinc, solve_efficiency_sync, solve_upsilon,
    PowerDelayLaw, PowerLaw, SystemLaw,
};
use cdma_core::montecarlo::{theorem3_harness, Theorem3Config};
use cdma_core::numerics::{wrap_angle, ComplexMatrix, FixedPointOptions, FrequencyGrid};
use cdma_core::waveforms::{q_eigendecomposition, q_split, structure_defect, structured_matrix, ChipWaveform};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::output::{num, Table};

#[derive(Debug, Clone, PartialEq)]
pub struct Property {
    pub name: &'static str,
    pub measured: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Reported but never fails the suite.
    pub soft: bool,
}

impl Property {
    fn at_most(name: &'static str, measured: f64, tolerance: f64) -> Self {
        Self { name, measured, tolerance, pass: measured <= tolerance, soft: false }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct VerifyOptions {
    /// Adds a small perturbation to the oscillating part of `Q` before the
    /// trace check, as a negative control.
    pub inject_qbar_perturbation: bool,
}

type Outcome = cdma_core::Result<Property>;

fn failed(name: &'static str, e: cdma_core::Error) -> Property {
    eprintln!("verify {name}: {e}");
    Property { name, measured: f64::NAN, tolerance: f64::NAN, pass: false, soft: false }
}

fn random_instances(seed: u64, count: usize) -> Vec<(ChipWaveform, usize, f64, f64, Vec<Complex64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let w = ChipWaveform::root_raised_cosine(rng.random_range(0.05..1.0), 1.0).expect("valid roll-off");
            let r = w.min_oversampling() + rng.random_range(0..2usize);
            let omega = wrap_angle(rng.random_range(-PI..PI));
            let tau = rng.random::<f64>();
            let b = (0..r).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
            (w, r, omega, tau, b)
        })
        .collect()
}

fn trace_annihilation(opts: VerifyOptions) -> Outcome {
    let mut worst: f64 = 0.0;
    for (w, r, omega, tau, b) in random_instances(11, 1000) {
        let bm = structured_matrix(omega, &b);
        let mut qbar = q_split(&w, r, omega, tau)?.oscillating;
        if opts.inject_qbar_perturbation {
            qbar[(0, 0)] += Complex64::new(1e-3, 0.0);
        }
        let scale = bm.frobenius_norm() * qbar.frobenius_norm();
        if scale > 0.0 {
            worst = worst.max(bm.matmul(&qbar).trace().norm() / scale);
        }
    }
    Ok(Property::at_most("trace_of_structured_times_oscillating", worst, 1e-10))
}

fn structure_preserved() -> Outcome {
    let mut worst: f64 = 0.0;
    for (w, r, omega, _, b) in random_instances(12, 300) {
        let q = q_split(&w, r, omega, 0.0)?.delay_free;
        let prod = q.matmul(&structured_matrix(omega, &b));
        worst = worst.max(structure_defect(&prod, omega) / prod.max_abs().max(f64::MIN_POSITIVE));
    }
    Ok(Property::at_most("q_times_structured_keeps_structure", worst, 1e-10))
}

fn eigendecomposition() -> cdma_core::Result<(Property, Property)> {
    let mut recon: f64 = 0.0;
    let mut unitary: f64 = 0.0;
    for (w, r, omega, _, _) in random_instances(13, 300) {
        let (u, d) = q_eigendecomposition(&w, r, omega)?;
        let q = q_split(&w, r, omega, 0.0)?.delay_free;
        let udu = u.matmul(&ComplexMatrix::from_diagonal(&d)).matmul(&u.adjoint());
        recon = recon.max((&udu - &q).max_abs());
        unitary = unitary.max((&u.gram() - &ComplexMatrix::identity(r)).max_abs());
    }
    Ok((
        Property::at_most("eigendecomposition_reconstructs_q", recon, 1e-10),
        Property::at_most("eigenvectors_unitary", unitary, 1e-12),
    ))
}

fn uniform_delay_annihilation() -> Outcome {
    let w = ChipWaveform::root_raised_cosine(0.5, 1.0)?;
    let mut worst: f64 = 0.0;
    let mut trace: f64 = 0.0;
    for omega in [-0.9 * PI, -0.3 * PI, 0.1 * PI, 0.8 * PI] {
        let mut acc = ComplexMatrix::zeros(2, 2);
        for i in 0..256 {
            let q = q_split(&w, 2, omega, i as f64 / 256.0)?.oscillating;
            trace = trace.max(q.trace().norm());
            acc = &acc + &q;
        }
        worst = worst.max(acc.max_abs() / 256.0);
    }
    Ok(Property::at_most("uniform_delay_average_of_oscillating_part", worst.max(trace), 1e-8))
}

fn delay_independence() -> Outcome {
    let powers = PowerLaw::equiprobable(&[0.5, 1.0, 2.0])?;
    let w = ChipWaveform::sinc(1.0, 1.0)?;
    let grid = FrequencyGrid::new(64)?;
    let a = SystemLaw::new(1.0, 0.1, 2, w.clone(), PowerDelayLaw::fixed_delay(&powers, 0.0, 1.0)?)?;
    let b = SystemLaw::new(1.0, 0.1, 2, w, PowerDelayLaw::uniform_delays(&powers, 16, 1.0)?)?;
    let (fa, _) = solve_upsilon(&a, &grid, FixedPointOptions::default())?;
    let (fb, _) = solve_upsilon(&b, &grid, FixedPointOptions::default())?;
    let worst = fa
        .matrices()
        .iter()
        .zip(fb.matrices())
        .map(|(x, y)| (x - y).max_abs() / x.max_abs())
        .fold(0.0, f64::max);
    Ok(Property::at_most("nyquist_bandwidth_delay_independence", worst, 1e-6))
}

fn alpha_one() -> Outcome {
    let p = PowerLaw::point(1.0)?;
    let mut worst: f64 = 0.0;
    for beta in [0.25, 1.0, 4.0] {
        for n0 in [0.01, 1.0] {
            worst = worst.max((solve_efficiency_sinc(beta, 1.0, &p, n0)? - solve_efficiency_sync(beta, &p, n0)?).abs());
        }
    }
    Ok(Property::at_most("unit_bandwidth_sinc_equals_synchronous", worst, 1e-8))
}

fn scaling_identity() -> Outcome {
    let mut worst: f64 = 0.0;
    for alpha in [0.5, 2.0] {
        let setup = AsyncSetup::new(ChipWaveform::sinc(alpha, 1.0)?);
        let c = setup.capacity(1.0, 10.0)?;
        let expect = alpha * capacity_sync_closed_form(1.0 / alpha, 10.0)?;
        worst = worst.max((c - expect).abs() / expect);
    }
    Ok(Property::at_most("sinc_capacity_scaling_identity", worst, 1e-4))
}

fn solver_consistency() -> Outcome {
    let law = PowerDelayLaw::uniform_delays(&PowerLaw::point(1.0)?, 32, 1.0)?;
    let sys = SystemLaw::new(1.0, 0.1, 2, ChipWaveform::root_raised_cosine(0.22, 1.0)?, law)?;
    let (field, _) = solve_upsilon(&sys, &FrequencyGrid::new(256)?, FixedPointOptions::default())?;
    let m = mean_efficiency(&field, &sys)?;
    let s = solve_efficiency_scalar(&sys, 512)?.eta;
    Ok(Property::at_most("matrix_and_scalar_solvers_agree", (m - s).abs() / s, 1e-3))
}

fn symbol_reduction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let cfg = Theorem3Config {
        n: 16,
        r: 2,
        waveform: ChipWaveform::root_raised_cosine(0.22, 1.0)?,
        amplitudes: vec![Complex64::new(1.0, 0.0); 8],
        delays: (0..8).map(|_| rng.random::<f64>() * 16.0).collect(),
        n0: 0.1,
        window: 2,
    };
    let report = theorem3_harness(&cfg, 40, 14)?;
    let z = report.difference().abs() / report.combined_standard_error();
    Ok(Property::at_most("symbol_delays_reduce_modulo_chip_small_system", z, 3.0))
}

fn db_round_trip() -> Outcome {
    let worst = [1e-3, 0.5, 1.0, 10.0, 1234.5]
        .iter()
        .map(|&x| (db_to_linear(linear_to_db(x)) - x).abs() / x)
        .fold(0.0, f64::max);
    Ok(Property::at_most("decibel_round_trip", worst, 1e-12))
}

fn twelve_percent_band() -> Outcome {
    let setup = AsyncSetup::new(ChipWaveform::root_raised_cosine(0.22, 1.0)?);
    let betas: Vec<f64> = (1..=32).map(|i| 0.25 * i as f64).collect();
    let max_gap = load_sweep(&setup, &betas, db_to_linear(10.0))
        .iter()
        .filter_map(|r| r.relative_gap())
        .fold(f64::MIN, f64::max);
    Ok(Property {
        name: "max_async_sync_gap_in_0.10_0.14_band",
        measured: max_gap,
        tolerance: 0.14,
        pass: (0.10..=0.14).contains(&max_gap),
        soft: true,
    })
}

pub fn run_suite(opts: VerifyOptions) -> Vec<Property> {
    let mut out = Vec::new();
    let mut push = |name: &'static str, r: Outcome| out.push(r.unwrap_or_else(|e| failed(name, e)));
    push("trace_of_structured_times_oscillating", trace_annihilation(opts));
    push("q_times_structured_keeps_structure", structure_preserved());
    match eigendecomposition() {
        Ok((a, b)) => {
            push(a.name, Ok(a.clone()));
            push(b.name, Ok(b.clone()));
        }
        Err(e) => push("eigendecomposition_reconstructs_q", Err(e)),
    }
    push("uniform_delay_average_of_oscillating_part", uniform_delay_annihilation());
    push("nyquist_bandwidth_delay_independence", delay_independence());
    push("unit_bandwidth_sinc_equals_synchronous", alpha_one());
    push("sinc_capacity_scaling_identity", scaling_identity());
    push("matrix_and_scalar_solvers_agree", solver_consistency());
    push("symbol_delays_reduce_modulo_chip_small_system", symbol_reduction());
    push("decibel_round_trip", db_round_trip());
    push("max_async_sync_gap_in_0.10_0.14_band", twelve_percent_band());
    out
}

pub fn report(props: &[Property]) -> Table {
    let mut table = Table::new(&["property", "measured", "tolerance", "status"]);
    for p in props {
        let status = match (p.pass, p.soft) {
            (true, _) => "pass",
            (false, true) => "soft-fail",
            (false, false) => "FAIL",
        };
        table.push(vec![p.name.into(), num(p.measured), num(p.tolerance), status.into()]);
    }
    table
}

/// Hard failures; soft checks never count.
pub fn failures(props: &[Property]) -> usize {
    props.iter().filter(|p| !p.pass && !p.soft).count()
}
