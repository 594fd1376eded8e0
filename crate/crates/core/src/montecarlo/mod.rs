//! Finite-N simulation of the chip-asynchronous CDMA channel with random
//! spreading, MMSE detection, and trial bookkeeping.

mod phi;
mod theorem3;

use std::collections::HashMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numerics::{hermitian_solve, inner, ComplexMatrix};
use crate::waveforms::ChipWaveform;

pub use phi::{
    build_phi_matrix, ks_distance, singular_values, spectral_equivalence_ks, MatrixKind, PhiKernel,
    MAX_DISCARDED_ENERGY, PULSE_CLIP, PULSE_INVERSION_POINTS,
};
pub use theorem3::{theorem3_harness, PreparedTheorem3, Theorem3Config, Theorem3Report};

/// Seed of trial `t` derived from the master seed.
pub fn trial_seed(master: u64, trial: usize) -> u64 {
    master ^ (trial as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// i.i.d. CN(0, 1/N) entries.
pub fn spreading_vector(rng: &mut impl Rng, n: usize) -> Vec<Complex64> {
    let sd = (0.5 / n as f64).sqrt();
    (0..n)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re * sd, im * sd)
        })
        .collect()
}

/// Everything about a finite system except the spreading draw.
#[derive(Debug, Clone)]
pub struct FiniteConfig {
    pub n: usize,
    pub r: usize,
    pub waveform: ChipWaveform,
    pub amplitudes: Vec<Complex64>,
    /// Chip delays in `[0, Tc)`.
    pub delays: Vec<f64>,
    pub n0: f64,
    pub kind: MatrixKind,
}

impl FiniteConfig {
    /// Unit-power users with delays taken round robin from `delay_atoms`
    /// equally spaced points of `[0, Tc)`.
    pub fn equal_power_uniform_delays(
        n: usize,
        k: usize,
        r: usize,
        waveform: ChipWaveform,
        n0: f64,
        kind: MatrixKind,
        delay_atoms: usize,
    ) -> Self {
        let tc = waveform.chip_interval();
        let delays = (0..k).map(|i| (i % delay_atoms.max(1)) as f64 * tc / delay_atoms.max(1) as f64).collect();
        Self { n, r, waveform, amplitudes: vec![Complex64::new(1.0, 0.0); k], delays, n0, kind }
    }

    pub fn k(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn noise_variance(&self) -> f64 {
        self.r as f64 * self.n0 / self.waveform.chip_interval()
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 || self.amplitudes.is_empty() {
            return Err(Error::InvalidParameter("need N >= 1 and at least one user".into()));
        }
        if self.delays.len() != self.amplitudes.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes but {} delays",
                self.amplitudes.len(),
                self.delays.len()
            )));
        }
        if !(self.n0 > 0.0 && self.n0.is_finite()) {
            return Err(Error::InvalidParameter(format!("noise density must be positive, got {}", self.n0)));
        }
        if self.amplitudes.iter().any(|a| a.norm_sqr() == 0.0 || !a.is_finite()) {
            return Err(Error::ZeroPower);
        }
        let tc = self.waveform.chip_interval();
        if let Some(t) = self.delays.iter().find(|t| !(**t >= 0.0 && **t < tc)) {
            return Err(Error::InvalidParameter(format!("delay {t} outside [0, Tc)")));
        }
        Ok(())
    }

    /// Validates and builds the per-delay kernels once.
    pub fn prepare(&self) -> Result<PreparedConfig> {
        self.validate()?;
        let mut cache: HashMap<u64, usize> = HashMap::new();
        let mut kernels = Vec::new();
        let mut user_kernel = Vec::with_capacity(self.k());
        for &tau in &self.delays {
            let idx = match cache.get(&tau.to_bits()) {
                Some(&i) => i,
                None => {
                    kernels.push(PhiKernel::new(&self.waveform, self.n, self.r, tau, self.kind)?);
                    cache.insert(tau.to_bits(), kernels.len() - 1);
                    kernels.len() - 1
                }
            };
            user_kernel.push(idx);
        }
        Ok(PreparedConfig { config: self.clone(), kernels, user_kernel })
    }
}

#[derive(Debug, Clone)]
pub struct PreparedConfig {
    config: FiniteConfig,
    kernels: Vec<PhiKernel>,
    user_kernel: Vec<usize>,
}

impl PreparedConfig {
    pub fn config(&self) -> &FiniteConfig {
        &self.config
    }

    pub fn kernel(&self, user: usize) -> &PhiKernel {
        &self.kernels[self.user_kernel[user]]
    }

    /// Draws spreading sequences from `seed` (user-major order).
    pub fn draw(&self, seed: u64) -> FiniteSystem {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = self.config.n;
        let spreading: Vec<Vec<Complex64>> = (0..self.config.k()).map(|_| spreading_vector(&mut rng, n)).collect();
        self.with_spreading(seed, &spreading).expect("drawn spreading has the right shape")
    }

    pub fn with_spreading(&self, seed: u64, spreading: &[Vec<Complex64>]) -> Result<FiniteSystem> {
        let cfg = &self.config;
        if spreading.len() != cfg.k() || spreading.iter().any(|s| s.len() != cfg.n) {
            return Err(Error::DimensionMismatch(format!("expected {} spreading vectors of length {}", cfg.k(), cfg.n)));
        }
        let mut h = ComplexMatrix::zeros(cfg.r * cfg.n, cfg.k());
        for (k, s) in spreading.iter().enumerate() {
            let a = cfg.amplitudes[k];
            let col: Vec<Complex64> = self.kernel(k).apply(s).into_iter().map(|z| z * a).collect();
            h.set_column(k, &col);
        }
        Ok(FiniteSystem::from_channel(h, cfg.amplitudes.clone(), cfg.delays.clone(), cfg, seed))
    }
}

/// One realization: the rN x K received-signal matrix `H` whose column k
/// is `a_k Phi_k s_k`, and its Gram matrix.
#[derive(Debug, Clone)]
pub struct FiniteSystem {
    h: ComplexMatrix,
    gram: ComplexMatrix,
    amplitudes: Vec<Complex64>,
    delays: Vec<f64>,
    noise_variance: f64,
    n0: f64,
    energy: f64,
    seed: u64,
}

impl FiniteSystem {
    fn from_channel(h: ComplexMatrix, amplitudes: Vec<Complex64>, delays: Vec<f64>, cfg: &FiniteConfig, seed: u64) -> Self {
        let gram = h.gram();
        Self {
            h,
            gram,
            amplitudes,
            delays,
            noise_variance: cfg.noise_variance(),
            n0: cfg.n0,
            energy: cfg.waveform.energy(),
            seed,
        }
    }

    pub fn k(&self) -> usize {
        self.h.cols()
    }

    pub fn channel(&self) -> &ComplexMatrix {
        &self.h
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn delays(&self) -> &[f64] {
        &self.delays
    }

    pub fn noise_variance(&self) -> f64 {
        self.noise_variance
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinrSample {
    pub trial: usize,
    pub user: usize,
    pub sinr: f64,
    pub efficiency: f64,
    pub seed: u64,
}

/// `h_k^H (H_k H_k^H + sigma^2 I)^{-1} h_k` for column `k` of `h`, given
/// the Gram matrix `H^H H`. Uses the (K-1)-dimensional Woodbury form when
/// it is the smaller system.
fn sinr_from_gram(h: &ComplexMatrix, gram: &ComplexMatrix, k: usize, sigma2: f64) -> Result<f64> {
    let kk = h.cols();
    let dim = h.rows();
    let hk = h.column(k);
    if kk - 1 <= dim {
        let mut g = gram.without_index(k);
        for i in 0..kk - 1 {
            g[(i, i)] += sigma2;
        }
        let v: Vec<Complex64> = (0..kk).filter(|&j| j != k).map(|j| gram[(j, k)]).collect();
        let x = hermitian_solve(&g, &v)?;
        let energy = gram[(k, k)].re;
        Ok((energy - inner(&v, &x).re) / sigma2)
    } else {
        let others = h.without_column(k);
        let mut a = others.matmul(&others.adjoint());
        for i in 0..dim {
            a[(i, i)] += sigma2;
        }
        let x = hermitian_solve(&a, &hk)?;
        Ok(inner(&hk, &x).re)
    }
}

/// MMSE output SINR of user `k` for an explicit channel matrix.
pub fn mmse_sinr_from_matrix(h: &ComplexMatrix, k: usize, sigma2: f64) -> Result<f64> {
    if k >= h.cols() {
        return Err(Error::DimensionMismatch(format!("user {k} of {}", h.cols())));
    }
    sinr_from_gram(h, &h.gram(), k, sigma2)
}

/// MMSE output SINR and spectral efficiency `SINR N0 / (|a_k|^2 E)` of user `k`.
pub fn mmse_sinr(sys: &FiniteSystem, k: usize) -> Result<SinrSample> {
    if k >= sys.k() {
        return Err(Error::DimensionMismatch(format!("user {k} of {}", sys.k())));
    }
    let sinr = sinr_from_gram(&sys.h, &sys.gram, k, sys.noise_variance)?;
    let power = sys.amplitudes[k].norm_sqr();
    Ok(SinrSample { trial: 0, user: k, sinr, efficiency: sinr * sys.n0 / (power * sys.energy), seed: sys.seed })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserSummary {
    pub user: usize,
    pub mean_sinr: f64,
    pub mean_efficiency: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialSummary {
    pub trials: usize,
    pub mean_efficiency: f64,
    /// Spread of individual user efficiencies.
    pub std_efficiency: f64,
    /// Standard error of the mean, from the per-trial averages.
    pub standard_error: f64,
    pub mean_sinr: f64,
    pub per_user: Vec<UserSummary>,
}

impl TrialSummary {
    pub fn from_samples(samples: &[SinrSample], trials: usize, users: usize) -> Result<Self> {
        if samples.is_empty() || trials == 0 || users == 0 {
            return Err(Error::InvalidParameter("no samples to summarize".into()));
        }
        let count = samples.len() as f64;
        let mean_efficiency = samples.iter().map(|s| s.efficiency).sum::<f64>() / count;
        let mean_sinr = samples.iter().map(|s| s.sinr).sum::<f64>() / count;
        let std_efficiency = if samples.len() > 1 {
            (samples.iter().map(|s| (s.efficiency - mean_efficiency).powi(2)).sum::<f64>() / (count - 1.0)).sqrt()
        } else {
            0.0
        };
        let mut per_trial = vec![(0.0, 0usize); trials];
        let mut per_user = vec![(0.0, 0.0, 0usize); users];
        for s in samples {
            per_trial[s.trial].0 += s.efficiency;
            per_trial[s.trial].1 += 1;
            per_user[s.user].0 += s.sinr;
            per_user[s.user].1 += s.efficiency;
            per_user[s.user].2 += 1;
        }
        let trial_means: Vec<f64> = per_trial.iter().filter(|t| t.1 > 0).map(|t| t.0 / t.1 as f64).collect();
        let standard_error = if trial_means.len() > 1 {
            let m = trial_means.iter().sum::<f64>() / trial_means.len() as f64;
            let var = trial_means.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (trial_means.len() - 1) as f64;
            (var / trial_means.len() as f64).sqrt()
        } else {
            0.0
        };
        let per_user = per_user
            .iter()
            .enumerate()
            .filter(|(_, u)| u.2 > 0)
            .map(|(user, u)| UserSummary { user, mean_sinr: u.0 / u.2 as f64, mean_efficiency: u.1 / u.2 as f64 })
            .collect();
        Ok(Self { trials, mean_efficiency, std_efficiency, standard_error, mean_sinr, per_user })
    }
}

#[derive(Debug, Clone)]
pub struct TrialReport {
    pub samples: Vec<SinrSample>,
    pub summary: TrialSummary,
}

/// Runs `trials` independent spreading draws (in parallel, deterministic in
/// the master seed) and evaluates every user's MMSE SINR.
pub fn run_trials(cfg: &FiniteConfig, trials: usize, master_seed: u64) -> Result<TrialReport> {
    if trials == 0 {
        return Err(Error::InvalidParameter("need at least one trial".into()));
    }
    let prepared = cfg.prepare()?;
    let per_trial: Vec<Vec<SinrSample>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let sys = prepared.draw(trial_seed(master_seed, t));
            (0..sys.k())
                .map(|k| mmse_sinr(&sys, k).map(|s| SinrSample { trial: t, ..s }))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let samples: Vec<SinrSample> = per_trial.into_iter().flatten().collect();
    let summary = TrialSummary::from_samples(&samples, trials, cfg.k())?;
    Ok(TrialReport { samples, summary })
}
