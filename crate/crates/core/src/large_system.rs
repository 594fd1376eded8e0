//! Large-system (K, N -> infinity, K/N -> beta) performance of the linear MMSE
//! detector: the matrix fixed point for `Upsilon(Omega)`, the scalar
//! efficiency spectral density, the sinc and chip-synchronous closed
//! equations, and the effective interference spectral density.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numerics::{
    bisect, fixed_point, hermitian_inverse, quadratic_form, regula_falsi, ComplexMatrix, FixedPointOptions,
    FixedPointReport, FrequencyGrid,
};
use crate::waveforms::{AliasTerms, ChipWaveform};

const WEIGHT_TOL: f64 = 1e-12;

/// Received power atom of a discrete power law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerAtom {
    pub power: f64,
    pub weight: f64,
}

/// Discrete distribution of received powers.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerLaw {
    atoms: Vec<PowerAtom>,
}

fn check_weights(weights: impl Iterator<Item = f64>) -> Result<()> {
    let mut total = 0.0;
    for w in weights {
        if !(w > 0.0 && w <= 1.0 + WEIGHT_TOL) {
            return Err(Error::InvalidParameter(format!("atom weight must lie in (0, 1], got {w}")));
        }
        total += w;
    }
    if (total - 1.0).abs() > WEIGHT_TOL {
        return Err(Error::InvalidParameter(format!("atom weights sum to {total}, expected 1")));
    }
    Ok(())
}

fn check_power(p: f64) -> Result<()> {
    if !(p >= 0.0 && p.is_finite()) {
        return Err(Error::InvalidParameter(format!("received power must be finite and nonnegative, got {p}")));
    }
    Ok(())
}

impl PowerLaw {
    pub fn new(atoms: Vec<PowerAtom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidParameter("power law needs at least one atom".into()));
        }
        for a in &atoms {
            check_power(a.power)?;
        }
        check_weights(atoms.iter().map(|a| a.weight))?;
        Ok(Self { atoms })
    }

    /// All users received with the same power.
    pub fn point(power: f64) -> Result<Self> {
        Self::new(vec![PowerAtom { power, weight: 1.0 }])
    }

    /// Equally likely powers.
    pub fn equiprobable(powers: &[f64]) -> Result<Self> {
        let w = 1.0 / powers.len().max(1) as f64;
        Self::new(powers.iter().map(|&power| PowerAtom { power, weight: w }).collect())
    }

    pub fn atoms(&self) -> &[PowerAtom] {
        &self.atoms
    }

    pub fn mean_power(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight * a.power).sum()
    }

    /// `sum w * lambda / (n0 + lambda * eta)`.
    pub fn interference(&self, n0: f64, eta: f64) -> f64 {
        self.atoms
            .iter()
            .map(|a| a.weight * a.power / (n0 + a.power * eta))
            .sum()
    }
}

/// Atom of the joint received-power / delay law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LawAtom {
    pub power: f64,
    pub delay: f64,
    pub weight: f64,
}

/// Discrete joint law of received power and delay within a chip.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerDelayLaw {
    atoms: Vec<LawAtom>,
    chip_interval: f64,
    independent: bool,
    delay_grid: Option<usize>,
}

/// Groups nearly equal values; returns (value, total weight) sorted by value.
fn marginal(values: impl Iterator<Item = (f64, f64)>, tol: f64) -> Vec<(f64, f64)> {
    let mut v: Vec<(f64, f64)> = values.collect();
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (x, w) in v {
        match out.last_mut() {
            Some(last) if (x - last.0).abs() <= tol * last.0.abs().max(1.0) => last.1 += w,
            _ => out.push((x, w)),
        }
    }
    out
}

impl PowerDelayLaw {
    /// Builds a law from atoms; whether powers and delays are independent and
    /// whether the delay marginal is an equal-weight grid on `[0, Tc)` are
    /// detected from the atoms.
    pub fn new(atoms: Vec<LawAtom>, chip_interval: f64) -> Result<Self> {
        if !(chip_interval > 0.0) {
            return Err(Error::InvalidParameter(format!("chip interval must be positive, got {chip_interval}")));
        }
        if atoms.is_empty() {
            return Err(Error::InvalidParameter("power/delay law needs at least one atom".into()));
        }
        for a in &atoms {
            check_power(a.power)?;
            if !(a.delay >= 0.0 && a.delay < chip_interval) {
                return Err(Error::InvalidParameter(format!(
                    "atom delay {} outside [0, Tc) with Tc = {chip_interval}",
                    a.delay
                )));
            }
        }
        check_weights(atoms.iter().map(|a| a.weight))?;

        let tol = 1e-12;
        let powers = marginal(atoms.iter().map(|a| (a.power, a.weight)), tol);
        let delays = marginal(atoms.iter().map(|a| (a.delay / chip_interval, a.weight)), tol);

        let n = delays.len();
        let delay_grid = delays
            .iter()
            .enumerate()
            .all(|(i, &(d, w))| (d - i as f64 / n as f64).abs() <= 1e-9 && (w - 1.0 / n as f64).abs() <= 1e-9)
            .then_some(n);

        let joint = |p: f64, d: f64| -> f64 {
            atoms
                .iter()
                .filter(|a| {
                    (a.power - p).abs() <= tol * p.abs().max(1.0)
                        && (a.delay / chip_interval - d).abs() <= tol * d.abs().max(1.0)
                })
                .map(|a| a.weight)
                .sum()
        };
        let independent = powers
            .iter()
            .all(|&(p, wp)| delays.iter().all(|&(d, wd)| (joint(p, d) - wp * wd).abs() <= 1e-9));

        Ok(Self {
            atoms,
            chip_interval,
            independent,
            delay_grid,
        })
    }

    /// Independent powers and `n_delays` equally likely delays `i Tc / n_delays`.
    pub fn uniform_delays(powers: &PowerLaw, n_delays: usize, chip_interval: f64) -> Result<Self> {
        if n_delays == 0 {
            return Err(Error::InvalidParameter("need at least one delay atom".into()));
        }
        let mut atoms = Vec::with_capacity(powers.atoms().len() * n_delays);
        for p in powers.atoms() {
            for i in 0..n_delays {
                atoms.push(LawAtom {
                    power: p.power,
                    delay: i as f64 * chip_interval / n_delays as f64,
                    weight: p.weight / n_delays as f64,
                });
            }
        }
        Self::new(atoms, chip_interval)
    }

    /// Every user received with the same delay.
    pub fn fixed_delay(powers: &PowerLaw, delay: f64, chip_interval: f64) -> Result<Self> {
        let atoms = powers
            .atoms()
            .iter()
            .map(|p| LawAtom {
                power: p.power,
                delay,
                weight: p.weight,
            })
            .collect();
        Self::new(atoms, chip_interval)
    }

    pub fn atoms(&self) -> &[LawAtom] {
        &self.atoms
    }

    pub fn chip_interval(&self) -> f64 {
        self.chip_interval
    }

    pub fn powers_delays_independent(&self) -> bool {
        self.independent
    }

    /// Number of points when the delays are equally likely on an evenly
    /// spaced grid `{0, Tc/n, ..., (n-1)Tc/n}`.
    pub fn delay_grid(&self) -> Option<usize> {
        self.delay_grid
    }

    /// Whether the delay grid is fine enough to average out every alias of
    /// an `r`-fold oversampled spectrum (at least `r` points).
    pub fn delays_uniform(&self, r: usize) -> bool {
        self.delay_grid.is_some_and(|n| n >= r.max(2))
    }

    pub fn power_marginal(&self) -> PowerLaw {
        let atoms = marginal(self.atoms.iter().map(|a| (a.power, a.weight)), 1e-12)
            .into_iter()
            .map(|(power, weight)| PowerAtom { power, weight })
            .collect();
        PowerLaw { atoms }
    }
}

/// Load, noise level, oversampling, chip waveform and power/delay law.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemLaw {
    beta: f64,
    n0: f64,
    r: usize,
    waveform: ChipWaveform,
    law: PowerDelayLaw,
}

impl SystemLaw {
    pub fn new(beta: f64, n0: f64, r: usize, waveform: ChipWaveform, law: PowerDelayLaw) -> Result<Self> {
        if !(beta >= 0.0 && beta.is_finite()) {
            return Err(Error::InvalidParameter(format!("load must be finite and nonnegative, got {beta}")));
        }
        if !(n0 > 0.0 && n0.is_finite()) {
            return Err(Error::InvalidParameter(format!("noise density must be positive, got {n0}")));
        }
        if r == 0 {
            return Err(Error::InvalidParameter("oversampling factor must be at least 1".into()));
        }
        waveform.check_oversampling(r)?;
        if (law.chip_interval() - waveform.chip_interval()).abs() > 1e-12 * waveform.chip_interval() {
            return Err(Error::InvalidParameter(format!(
                "law uses Tc = {} but the waveform uses Tc = {}",
                law.chip_interval(),
                waveform.chip_interval()
            )));
        }
        Ok(Self {
            beta,
            n0,
            r,
            waveform,
            law,
        })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn n0(&self) -> f64 {
        self.n0
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn waveform(&self) -> &ChipWaveform {
        &self.waveform
    }

    pub fn law(&self) -> &PowerDelayLaw {
        &self.law
    }

    /// `sigma^2 = r N0 / Tc`.
    pub fn noise_variance(&self) -> f64 {
        self.r as f64 * self.n0 / self.waveform.chip_interval()
    }

    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        Self::new(beta, self.n0, self.r, self.waveform.clone(), self.law.clone())
    }

    pub fn with_n0(&self, n0: f64) -> Result<Self> {
        Self::new(self.beta, n0, self.r, self.waveform.clone(), self.law.clone())
    }
}

/// `Upsilon(Omega)` on a frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct UpsilonField {
    grid: FrequencyGrid,
    matrices: Vec<ComplexMatrix>,
    noise_variance: f64,
    atom_sinrs: Vec<f64>,
    converged: bool,
}

impl UpsilonField {
    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn matrices(&self) -> &[ComplexMatrix] {
        &self.matrices
    }

    pub fn noise_variance(&self) -> f64 {
        self.noise_variance
    }

    /// Limiting SINR of a user at each atom of the law, in atom order.
    pub fn atom_sinrs(&self) -> &[f64] {
        &self.atom_sinrs
    }

    pub fn converged(&self) -> bool {
        self.converged
    }

    /// `sum_a w_a lambda_a Delta Delta^H / (1 + SINR_a)` at grid point `m`.
    pub fn interference_matrix(&self, sys: &SystemLaw, m: usize) -> Result<ComplexMatrix> {
        let terms = AliasTerms::new(sys.waveform(), sys.r(), self.grid.points()[m])?;
        let r = sys.r();
        let mut acc = ComplexMatrix::zeros(r, r);
        for (a, sinr) in sys.law().atoms().iter().zip(&self.atom_sinrs) {
            let d = terms.delta(a.delay);
            let outer = ComplexMatrix::outer(&d, &d).scale(Complex64::new(a.weight * a.power / (1.0 + sinr), 0.0));
            acc = &acc + &outer;
        }
        Ok(acc)
    }
}

/// Per-atom, per-grid-point delay vectors.
struct DeltaTable {
    r: usize,
    m: usize,
    // [atom][grid point] -> r components
    values: Vec<Vec<Vec<Complex64>>>,
}

impl DeltaTable {
    fn new(sys: &SystemLaw, grid: &FrequencyGrid) -> Result<Self> {
        let terms: Vec<AliasTerms> = grid
            .points()
            .iter()
            .map(|&om| AliasTerms::new(sys.waveform(), sys.r(), om))
            .collect::<Result<_>>()?;
        let values = sys
            .law()
            .atoms()
            .iter()
            .map(|a| terms.iter().map(|t| t.delta(a.delay)).collect())
            .collect();
        Ok(Self {
            r: sys.r(),
            m: grid.count(),
            values,
        })
    }
}

fn unpack(state: &[f64], r: usize, m: usize) -> ComplexMatrix {
    let block = 2 * r * r;
    let s = &state[m * block..(m + 1) * block];
    let data = s.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect();
    ComplexMatrix::from_row_major(r, r, data).expect("block size")
}

fn pack(mats: &[ComplexMatrix]) -> Vec<f64> {
    mats.iter()
        .flat_map(|m| m.as_slice().iter().flat_map(|z| [z.re, z.im]))
        .collect()
}

/// `(lambda_a / 2pi) * integral Delta^H Upsilon Delta` per atom; `state` holds
/// `sigma^2 Upsilon`.
fn atom_sinrs(sys: &SystemLaw, grid: &FrequencyGrid, deltas: &DeltaTable, state: &[f64]) -> Vec<f64> {
    let sigma2 = sys.noise_variance();
    let mats: Vec<ComplexMatrix> = (0..deltas.m).map(|m| unpack(state, deltas.r, m)).collect();
    sys.law()
        .atoms()
        .iter()
        .zip(&deltas.values)
        .map(|(a, dv)| {
            let q: f64 = mats.iter().zip(dv).map(|(y, d)| quadratic_form(y, d)).sum();
            (a.power / (2.0 * PI * sigma2) * q * grid.spacing()).max(0.0)
        })
        .collect()
}

/// Solves the matrix fixed point
/// `Upsilon^{-1}(Omega) = sigma^2 I + beta * sum_a w_a lambda_a Delta_a Delta_a^H / (1 + SINR_a)`
/// with `SINR_a = (lambda_a / 2pi) * integral Delta_a^H Upsilon Delta_a dOmega`.
///
/// Iterates on `sigma^2 Upsilon` starting from the identity; the residual in
/// the report is measured on that normalized field. Running out of
/// iterations yields `converged = false` in both the report and the field.
pub fn solve_upsilon(
    sys: &SystemLaw,
    grid: &FrequencyGrid,
    opts: FixedPointOptions,
) -> Result<(UpsilonField, FixedPointReport)> {
    let r = sys.r();
    let sigma2 = sys.noise_variance();
    let deltas = DeltaTable::new(sys, grid)?;
    let atoms = sys.law().atoms();
    let scale = sys.beta() / sigma2;

    let map = |state: &Vec<f64>| -> Result<Vec<f64>> {
        let sinrs = atom_sinrs(sys, grid, &deltas, state);
        let coef: Vec<f64> = atoms
            .iter()
            .zip(&sinrs)
            .map(|(a, s)| scale * a.weight * a.power / (1.0 + s))
            .collect();
        let mats: Vec<ComplexMatrix> = (0..deltas.m)
            .into_par_iter()
            .map(|m| {
                let mut k = ComplexMatrix::identity(r);
                for (c, dv) in coef.iter().zip(&deltas.values) {
                    let d = &dv[m];
                    for i in 0..r {
                        for j in 0..r {
                            k[(i, j)] += d[i] * d[j].conj() * *c;
                        }
                    }
                }
                hermitian_inverse(&k)
            })
            .collect::<Result<_>>()?;
        Ok(pack(&mats))
    };

    let init = pack(&vec![ComplexMatrix::identity(r); deltas.m]);
    let (state, report) = fixed_point(map, init, opts)?;
    let sinrs = atom_sinrs(sys, grid, &deltas, &state);
    let matrices = (0..deltas.m)
        .map(|m| unpack(&state, r, m).scale(Complex64::new(1.0 / sigma2, 0.0)))
        .collect();
    Ok((
        UpsilonField {
            grid: grid.clone(),
            matrices,
            noise_variance: sigma2,
            atom_sinrs: sinrs,
            converged: report.converged,
        },
        report,
    ))
}

/// Limiting SINR `(lambda / 2pi) * integral Delta^H(Omega, tau) Upsilon(Omega) Delta(Omega, tau) dOmega`
/// of a user with power `lambda` and delay `tau` (reduced modulo `Tc`).
pub fn sinr_user(field: &UpsilonField, sys: &SystemLaw, power: f64, delay: f64) -> Result<f64> {
    if !field.converged {
        return Err(Error::NonConvergence {
            context: " (Upsilon field)".into(),
            iterations: 0,
            residual: f64::NAN,
        });
    }
    check_power(power)?;
    if !delay.is_finite() {
        return Err(Error::InvalidParameter(format!("delay must be finite, got {delay}")));
    }
    let tau = delay.rem_euclid(sys.waveform().chip_interval());
    let mut acc = 0.0;
    for (om, y) in field.grid.points().iter().zip(&field.matrices) {
        let d = AliasTerms::new(sys.waveform(), sys.r(), *om)?.delta(tau);
        acc += quadratic_form(y, &d);
    }
    Ok((power / (2.0 * PI) * acc * field.grid.spacing()).max(0.0))
}

/// Multiuser efficiency `SINR * N0 / (lambda * E)`.
pub fn efficiency_of_user(sinr: f64, power: f64, sys: &SystemLaw) -> Result<f64> {
    if power == 0.0 {
        return Err(Error::ZeroPower);
    }
    check_power(power)?;
    Ok(sinr * sys.n0() / (power * sys.waveform().energy()))
}

/// Weighted mean multiuser efficiency over the law's nonzero-power atoms.
pub fn mean_efficiency(field: &UpsilonField, sys: &SystemLaw) -> Result<f64> {
    let mut num = 0.0;
    let mut den = 0.0;
    for (a, s) in sys.law().atoms().iter().zip(field.atom_sinrs()) {
        if a.power > 0.0 {
            num += a.weight * efficiency_of_user(*s, a.power, sys)?;
            den += a.weight;
        }
    }
    if den == 0.0 {
        return Err(Error::ZeroPower);
    }
    Ok(num / den)
}

/// Multiuser efficiency spectral density `eta(w)` and its integral `eta`.
#[derive(Debug, Clone, PartialEq)]
pub struct EfficiencySpectrum {
    /// Midpoints of a uniform grid on `[-2 pi B, 2 pi B]`, rad/s.
    pub frequencies: Vec<f64>,
    pub density: Vec<f64>,
    pub spacing: f64,
    pub eta: f64,
}

/// Precomputed `|Phi|^2` on the midpoint grid used by the scalar solver.
struct ScalarProblem {
    frequencies: Vec<f64>,
    power: Vec<f64>,
    spacing: f64,
    energy: f64,
    coupling: f64,
    n0_rel: f64,
    powers: PowerLaw,
}

impl ScalarProblem {
    fn new(sys: &SystemLaw, points: usize) -> Result<Self> {
        let w = sys.waveform();
        let law = sys.law();
        let tc = w.chip_interval();
        let nyquist = w.bandwidth() * tc <= 0.5 + 1e-12;
        let uniform = law.delays_uniform(sys.r());
        if !(nyquist || (uniform && law.powers_delays_independent())) {
            return Err(Error::HypothesisViolated(format!(
                "bandwidth B*Tc = {:.6} exceeds 1/2, so delays must be uniform on [0, Tc) \
                 (on a grid of at least r = {} points) and independent of the powers \
                 (uniform: {}, independent: {})",
                w.bandwidth() * tc,
                sys.r(),
                uniform,
                law.powers_delays_independent()
            )));
        }
        if points < 2 {
            return Err(Error::EmptyGrid { needed: 2, got: points });
        }
        let edge = 2.0 * PI * w.bandwidth();
        let spacing = 2.0 * edge / points as f64;
        let frequencies: Vec<f64> = (0..points).map(|i| -edge + (i as f64 + 0.5) * spacing).collect();
        let power = frequencies.iter().map(|&x| w.power_spectrum(x)).collect();
        Ok(Self {
            frequencies,
            power,
            spacing,
            energy: w.energy(),
            coupling: sys.beta() / tc,
            n0_rel: sys.n0() / w.energy(),
            powers: law.power_marginal(),
        })
    }

    fn c(&self, eta: f64) -> f64 {
        self.coupling * self.powers.interference(self.n0_rel, eta)
    }

    fn density_at(&self, p: f64, c: f64) -> f64 {
        if p > 0.0 {
            p / (self.energy + c * p)
        } else {
            0.0
        }
    }

    /// `(1/2pi) * integral eta(w) dw` for the density induced by `eta`.
    fn integrated(&self, eta: f64) -> f64 {
        let c = self.c(eta);
        self.power.iter().map(|&p| self.density_at(p, c)).sum::<f64>() * self.spacing / (2.0 * PI)
    }

    fn spectrum(&self, eta: f64) -> EfficiencySpectrum {
        let c = self.c(eta);
        let density = self.power.iter().map(|&p| self.density_at(p, c)).collect();
        EfficiencySpectrum {
            frequencies: self.frequencies.clone(),
            density,
            spacing: self.spacing,
            eta,
        }
    }
}

/// Scalar efficiency with density
/// `1/eta(w) = E/|Phi(w)|^2 + (beta/Tc) * sum w lambda / (N0/E + lambda eta)`,
/// `eta = (1/2pi) * integral eta(w) dw`, on `points` midpoints of the support.
///
/// Valid when delays are uniform and independent of powers, or when
/// `B <= 1/(2 Tc)`; otherwise returns a hypothesis error.
pub fn solve_efficiency_scalar(sys: &SystemLaw, points: usize) -> Result<EfficiencySpectrum> {
    let prob = ScalarProblem::new(sys, points)?;
    let top = prob.integrated(f64::INFINITY).max(1.0);
    let eta = regula_falsi(|e| prob.integrated(e) - e, 0.0, top, 1e-15)?;
    Ok(prob.spectrum(eta))
}

/// As [`solve_efficiency_scalar`], iterating `eta <- (1/2pi) * integral eta(w)` from `init`.
pub fn solve_efficiency_scalar_from(
    sys: &SystemLaw,
    points: usize,
    init: f64,
    opts: FixedPointOptions,
) -> Result<(EfficiencySpectrum, FixedPointReport)> {
    let prob = ScalarProblem::new(sys, points)?;
    let (eta, report) = fixed_point(|e: &f64| Ok(prob.integrated(*e)), init, opts)?;
    if !report.converged {
        return Err(Error::NonConvergence {
            context: " (scalar efficiency)".into(),
            iterations: report.iterations,
            residual: report.final_residual,
        });
    }
    Ok((prob.spectrum(eta), report))
}

fn check_sync_inputs(beta: f64, n0: f64) -> Result<()> {
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(Error::InvalidParameter(format!("load must be finite and nonnegative, got {beta}")));
    }
    if !(n0 > 0.0 && n0.is_finite()) {
        return Err(Error::InvalidParameter(format!("noise density must be positive, got {n0}")));
    }
    Ok(())
}

/// Root of `1/eta = 1 + load * sum w lambda / (N0 + lambda eta)` on `(0, 1]`.
fn solve_tse_hanly(load: f64, powers: &PowerLaw, n0: f64) -> Result<f64> {
    if load == 0.0 {
        return Ok(1.0);
    }
    bisect(
        |eta| eta * (1.0 + load * powers.interference(n0, eta)) - 1.0,
        0.0,
        1.0,
        1e-16,
    )
}

/// Multiuser efficiency of a sinc pulse with relative bandwidth `alpha`:
/// the chip-synchronous equation with load `beta / alpha`.
pub fn solve_efficiency_sinc(beta: f64, alpha: f64, powers: &PowerLaw, n0: f64) -> Result<f64> {
    check_sync_inputs(beta, n0)?;
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!("alpha must be positive, got {alpha}")));
    }
    solve_tse_hanly(beta / alpha, powers, n0)
}

/// Multiuser efficiency of the linear MMSE detector in chip-synchronous CDMA,
/// from the interference form `eta = 1 / (1 + beta E[P / (N0 + P eta)])`.
/// Kept separate from [`solve_efficiency_sinc`] so the two can check each other.
pub fn solve_efficiency_sync(beta: f64, powers: &PowerLaw, n0: f64) -> Result<f64> {
    check_sync_inputs(beta, n0)?;
    if beta == 0.0 {
        return Ok(1.0);
    }
    let residual = |eta: f64| {
        let interference: f64 = powers.atoms().iter().map(|a| a.weight * a.power / (n0 + a.power * eta)).sum();
        1.0 / (1.0 + beta * interference) - eta
    };
    regula_falsi(residual, 0.0, 1.0, 1e-15)
}

/// `P_self * P_other / (P_self + P_other * sinr)`, zero when the denominator vanishes.
pub fn effective_interference_density(p_self: f64, p_other: f64, sinr: f64) -> f64 {
    let den = p_self + p_other * sinr;
    if den == 0.0 {
        0.0
    } else {
        p_self * p_other / den
    }
}
