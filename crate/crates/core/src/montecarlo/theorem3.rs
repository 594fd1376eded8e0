//! Symbol-asynchronous system observed over a window of `2M + 1` symbol
//! intervals, compared against the chip-asynchronous reduction that keeps
//! only the fractional part of each delay.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::numerics::{Cholesky, ComplexMatrix};
use crate::waveforms::ChipWaveform;

use super::phi::pulse_taps;
use super::{mmse_sinr, spreading_vector, trial_seed, FiniteConfig, MatrixKind, PreparedConfig, SinrSample, TrialSummary};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone)]
pub struct Theorem3Config {
    pub n: usize,
    pub r: usize,
    pub waveform: ChipWaveform,
    pub amplitudes: Vec<Complex64>,
    /// Delays in `[0, N Tc)`.
    pub delays: Vec<f64>,
    pub n0: f64,
    /// Half-width `M` of the observation window.
    pub window: usize,
}

impl Theorem3Config {
    pub fn k(&self) -> usize {
        self.amplitudes.len()
    }

    /// Symbols `-(M+2) ..= M+1` may reach into the window.
    pub fn symbols(&self) -> usize {
        2 * self.window + 4
    }

    pub fn prepare(&self) -> Result<PreparedTheorem3> {
        let tc = self.waveform.chip_interval();
        let ts = self.n as f64 * tc;
        if self.delays.len() != self.amplitudes.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes but {} delays",
                self.amplitudes.len(),
                self.delays.len()
            )));
        }
        if let Some(t) = self.delays.iter().find(|t| !(**t >= 0.0 && **t < ts)) {
            return Err(Error::InvalidParameter(format!("delay {t} outside [0, N Tc)")));
        }
        let whole: Vec<usize> = self.delays.iter().map(|t| ((t / tc).floor() as usize).min(self.n - 1)).collect();
        let frac: Vec<f64> = self.delays.iter().zip(&whole).map(|(t, &c)| (t - c as f64 * tc).clamp(0.0, tc * (1.0 - f64::EPSILON))).collect();
        let reduced = FiniteConfig {
            n: self.n,
            r: self.r,
            waveform: self.waveform.clone(),
            amplitudes: self.amplitudes.clone(),
            delays: frac.clone(),
            n0: self.n0,
            kind: MatrixKind::BlockCirculant,
        }
        .prepare()?;
        let taps = frac
            .iter()
            .map(|&tau| pulse_taps(&self.waveform, self.n, self.r, tau))
            .collect::<Result<Vec<_>>>()?;
        Ok(PreparedTheorem3 { config: self.clone(), whole, taps, reduced })
    }
}

#[derive(Debug, Clone)]
pub struct PreparedTheorem3 {
    config: Theorem3Config,
    whole: Vec<usize>,
    taps: Vec<Vec<Complex64>>,
    reduced: PreparedConfig,
}

struct SparseColumn {
    start: usize,
    values: Vec<Complex64>,
}

fn overlap_inner(a: &SparseColumn, b: &SparseColumn) -> Complex64 {
    let lo = a.start.max(b.start);
    let hi = (a.start + a.values.len()).min(b.start + b.values.len());
    let mut acc = ZERO;
    for row in lo..hi.max(lo) {
        acc += a.values[row - a.start].conj() * b.values[row - b.start];
    }
    acc
}

impl PreparedTheorem3 {
    pub fn draw_spreading(&self, seed: u64) -> Vec<Vec<Vec<Complex64>>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..self.config.symbols())
            .map(|_| (0..self.config.k()).map(|_| spreading_vector(&mut rng, self.config.n)).collect())
            .collect()
    }

    /// Center-symbol MMSE SINRs of the windowed system and of the reduced
    /// system, per user. `spreading[j][k]` is user k's sequence for symbol
    /// `j - (M + 2)`.
    pub fn trial_with_spreading(&self, spreading: &[Vec<Vec<Complex64>>]) -> Result<(Vec<f64>, Vec<f64>)> {
        let cfg = &self.config;
        let (n, r, m_half) = (cfg.n, cfg.r, cfg.window);
        if spreading.len() != cfg.symbols()
            || spreading.iter().any(|sym| sym.len() != cfg.k() || sym.iter().any(|s| s.len() != n))
        {
            return Err(Error::DimensionMismatch("spreading must be symbols x users x N".into()));
        }
        let width = (2 * m_half + 1) * n;
        let sigma2 = cfg.r as f64 * cfg.n0 / cfg.waveform.chip_interval();
        let mut columns = Vec::new();
        let mut center = vec![0; cfg.k()];
        for (j, symbol) in spreading.iter().enumerate() {
            let m = j as i64 - (m_half as i64 + 2);
            for (k, s) in symbol.iter().enumerate() {
                let base = (m + m_half as i64) * n as i64 + self.whole[k] as i64;
                let lo = (base - (n as i64 - 1)).max(0);
                let hi = (base + 2 * n as i64 - 1).min(width as i64);
                if lo >= hi {
                    continue;
                }
                let a = cfg.amplitudes[k];
                let taps = &self.taps[k];
                let mut values = Vec::with_capacity((hi - lo) as usize * r);
                for c in lo..hi {
                    for i in 0..r {
                        let mut acc = ZERO;
                        for (q, &sq) in s.iter().enumerate() {
                            let d = c - base - q as i64;
                            if d.abs() < n as i64 {
                                acc += taps[(d + n as i64 - 1) as usize * r + i] * sq;
                            }
                        }
                        values.push(acc * a);
                    }
                }
                if m == 0 {
                    center[k] = columns.len();
                }
                columns.push(SparseColumn { start: lo as usize * r, values });
            }
        }
        let dim = columns.len();
        let mut a = ComplexMatrix::zeros(dim, dim);
        for i in 0..dim {
            for j in i..dim {
                let g = overlap_inner(&columns[i], &columns[j]);
                a[(i, j)] = g;
                a[(j, i)] = g.conj();
            }
            a[(i, i)] = Complex64::new(a[(i, i)].re + sigma2, 0.0);
        }
        let chol = Cholesky::factor(&a)?;
        let mut general = Vec::with_capacity(cfg.k());
        for &idx in &center {
            let mut e = vec![ZERO; dim];
            e[idx] = Complex64::new(1.0, 0.0);
            let x = chol.solve(&e)?;
            general.push(1.0 / (sigma2 * x[idx].re) - 1.0);
        }
        let zero_symbol = &spreading[m_half + 2];
        let sys = self.reduced.with_spreading(0, zero_symbol)?;
        let reduced = (0..cfg.k()).map(|k| mmse_sinr(&sys, k).map(|s| s.sinr)).collect::<Result<Vec<_>>>()?;
        Ok((general, reduced))
    }

    pub fn trial(&self, seed: u64) -> Result<(Vec<f64>, Vec<f64>)> {
        self.trial_with_spreading(&self.draw_spreading(seed))
    }
}

#[derive(Debug, Clone)]
pub struct Theorem3Report {
    pub general: TrialSummary,
    pub reduced: TrialSummary,
}

impl Theorem3Report {
    pub fn difference(&self) -> f64 {
        self.general.mean_efficiency - self.reduced.mean_efficiency
    }

    pub fn combined_standard_error(&self) -> f64 {
        self.general.standard_error.hypot(self.reduced.standard_error)
    }

    /// Whether the two means agree within `z` combined standard errors.
    pub fn consistent(&self, z: f64) -> bool {
        self.difference().abs() <= z * self.combined_standard_error()
    }
}

/// Runs both systems on shared spreading draws and summarizes the
/// center-symbol efficiencies.
pub fn theorem3_harness(cfg: &Theorem3Config, trials: usize, master_seed: u64) -> Result<Theorem3Report> {
    use rayon::prelude::*;
    if trials == 0 {
        return Err(Error::InvalidParameter("need at least one trial".into()));
    }
    if !(cfg.n0 > 0.0) {
        return Err(Error::InvalidParameter(format!("noise density must be positive, got {}", cfg.n0)));
    }
    if cfg.amplitudes.iter().any(|a| a.norm_sqr() == 0.0) {
        return Err(Error::ZeroPower);
    }
    let prepared = cfg.prepare()?;
    let results: Vec<(Vec<f64>, Vec<f64>)> = (0..trials)
        .into_par_iter()
        .map(|t| prepared.trial(trial_seed(master_seed, t)))
        .collect::<Result<_>>()?;
    let energy = cfg.waveform.energy();
    let to_samples = |pick: fn(&(Vec<f64>, Vec<f64>)) -> &Vec<f64>| -> Vec<SinrSample> {
        results
            .iter()
            .enumerate()
            .flat_map(|(t, res)| {
                pick(res).iter().enumerate().map(move |(k, &sinr)| SinrSample {
                    trial: t,
                    user: k,
                    sinr,
                    efficiency: sinr * cfg.n0 / (cfg.amplitudes[k].norm_sqr() * energy),
                    seed: trial_seed(master_seed, t),
                })
            })
            .collect()
    };
    let general = TrialSummary::from_samples(&to_samples(|r| &r.0), trials, cfg.k())?;
    let reduced = TrialSummary::from_samples(&to_samples(|r| &r.1), trials, cfg.k())?;
    Ok(Theorem3Report { general, reduced })
}
