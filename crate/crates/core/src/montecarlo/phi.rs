//! Delay and pulse-shaping matrices `Phi` (rN x N): the block-Toeplitz matrix
//! of time-domain pulse samples and its block-circulant counterpart built
//! from the sampled spectrum.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::numerics::ComplexMatrix;
use crate::waveforms::{AliasTerms, ChipWaveform};

use super::spreading_vector;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Frequency samples used to invert `Phi(w)` for the block-Toeplitz kind.
pub const PULSE_INVERSION_POINTS: usize = 8193;
/// Pulse samples below this fraction of the peak magnitude are dropped.
pub const PULSE_CLIP: f64 = 1e-6;
/// Largest pulse energy fraction the truncation may discard.
pub const MAX_DISCARDED_ENERGY: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MatrixKind {
    BlockToeplitz,
    BlockCirculant,
}

impl std::fmt::Display for MatrixKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MatrixKind::BlockToeplitz => "block_toeplitz",
            MatrixKind::BlockCirculant => "block_circulant",
        })
    }
}

impl std::str::FromStr for MatrixKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "block_toeplitz" | "toeplitz" => Ok(MatrixKind::BlockToeplitz),
            "block_circulant" | "circulant" => Ok(MatrixKind::BlockCirculant),
            other => Err(Error::InvalidParameter(format!("unknown matrix kind '{other}'"))),
        }
    }
}

/// Block (p, q) of `Phi` depends on `p - q` only; the kernel stores those
/// `r`-vectors, cyclically indexed for the circulant kind.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiKernel {
    kind: MatrixKind,
    n: usize,
    r: usize,
    taps: Vec<Complex64>,
}

impl PhiKernel {
    pub fn new(w: &ChipWaveform, n: usize, r: usize, tau: f64, kind: MatrixKind) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("spreading factor N must be at least 1".into()));
        }
        if !tau.is_finite() {
            return Err(Error::InvalidParameter(format!("delay must be finite, got {tau}")));
        }
        w.check_oversampling(r)?;
        let taps = match kind {
            MatrixKind::BlockCirculant => circulant_taps(w, n, r, tau)?,
            MatrixKind::BlockToeplitz => pulse_taps(w, n, r, tau)?,
        };
        Ok(Self { kind, n, r, taps })
    }

    pub fn kind(&self) -> MatrixKind {
        self.kind
    }

    fn tap(&self, p: usize, q: usize, i: usize) -> Complex64 {
        let d = match self.kind {
            MatrixKind::BlockCirculant => (p + self.n - q) % self.n,
            MatrixKind::BlockToeplitz => p + self.n - 1 - q,
        };
        self.taps[d * self.r + i]
    }

    /// `Phi s` for a length-N vector `s`.
    pub fn apply(&self, s: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(s.len(), self.n);
        let (n, r) = (self.n, self.r);
        let mut out = vec![ZERO; n * r];
        for p in 0..n {
            for (q, &sq) in s.iter().enumerate() {
                for i in 0..r {
                    out[p * r + i] += self.tap(p, q, i) * sq;
                }
            }
        }
        out
    }

    pub fn matrix(&self) -> ComplexMatrix {
        let (n, r) = (self.n, self.r);
        ComplexMatrix::from_fn(n * r, n, |row, q| self.tap(row / r, q, row % r))
    }
}

/// Block `d` of the circulant: `(1/N) sum_l Delta(2 pi l / N, tau) e^{-j 2 pi l d / N}`.
fn circulant_taps(w: &ChipWaveform, n: usize, r: usize, tau: f64) -> Result<Vec<Complex64>> {
    let deltas: Vec<Vec<Complex64>> = (0..n)
        .map(|l| Ok(AliasTerms::new(w, r, 2.0 * PI * l as f64 / n as f64)?.delta(tau)))
        .collect::<Result<_>>()?;
    let mut taps = vec![ZERO; n * r];
    for d in 0..n {
        for (l, delta) in deltas.iter().enumerate() {
            let tw = Complex64::cis(-2.0 * PI * ((l * d) % n) as f64 / n as f64);
            for i in 0..r {
                taps[d * r + i] += delta[i] * tw;
            }
        }
        for i in 0..r {
            taps[d * r + i] /= n as f64;
        }
    }
    Ok(taps)
}

/// Pulse samples at `d Tc + i Tc / r - tau`, `d = -(N-1) ..= N-1`, conjugated so
/// that their transform matches the sampled spectrum. Tap `(d, i)` sits at
/// index `(d + N - 1) r + i`.
pub(crate) fn pulse_taps(w: &ChipWaveform, n: usize, r: usize, tau: f64) -> Result<Vec<Complex64>> {
    let tc = w.chip_interval();
    let span = 2 * n - 1;
    let times: Vec<f64> = (0..span * r)
        .map(|idx| {
            let d = (idx / r) as f64 - (n - 1) as f64;
            let i = (idx % r) as f64;
            d * tc + i * tc / r as f64 - tau
        })
        .collect();
    let mut taps: Vec<Complex64> =
        w.impulse_responses(&times, PULSE_INVERSION_POINTS).into_iter().map(|z| z.conj()).collect();
    let peak = taps.iter().map(|z| z.norm()).fold(0.0, f64::max);
    for z in taps.iter_mut() {
        if z.norm() < PULSE_CLIP * peak {
            *z = ZERO;
        }
    }
    // samples at rate r/Tc >= 2B carry the full energy: (Tc/r) sum |phi|^2 = E
    let kept = tc / r as f64 * taps.iter().map(|z| z.norm_sqr()).sum::<f64>();
    let discarded = 1.0 - kept / w.energy();
    if discarded > MAX_DISCARDED_ENERGY {
        return Err(Error::PulseTooLong { n, discarded });
    }
    Ok(taps)
}

/// The rN x N matrix `Phi` of a user with delay `tau`.
pub fn build_phi_matrix(w: &ChipWaveform, n: usize, r: usize, tau: f64, kind: MatrixKind) -> Result<ComplexMatrix> {
    Ok(PhiKernel::new(w, n, r, tau, kind)?.matrix())
}

/// Singular values, descending.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    let dm = DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice());
    let mut sv: Vec<f64> = dm.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Two-sample Kolmogorov–Smirnov distance `sup |F_a - F_b|`.
pub fn ks_distance(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// KS distance between the pooled singular values of `Phi_T S` and `Phi_C S`
/// over `trials` draws of an N x N random spreading matrix `S`, all users
/// with delay `tau`. The same `S` feeds both constructions.
pub fn spectral_equivalence_ks(w: &ChipWaveform, n: usize, r: usize, tau: f64, trials: usize, seed: u64) -> Result<f64> {
    let toeplitz = PhiKernel::new(w, n, r, tau, MatrixKind::BlockToeplitz)?;
    let circulant = PhiKernel::new(w, n, r, tau, MatrixKind::BlockCirculant)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sv_t = Vec::with_capacity(trials * n);
    let mut sv_c = Vec::with_capacity(trials * n);
    for _ in 0..trials {
        let cols: Vec<Vec<Complex64>> = (0..n).map(|_| spreading_vector(&mut rng, n)).collect();
        let mut mt = ComplexMatrix::zeros(n * r, n);
        let mut mc = ComplexMatrix::zeros(n * r, n);
        for (k, s) in cols.iter().enumerate() {
            mt.set_column(k, &toeplitz.apply(s));
            mc.set_column(k, &circulant.apply(s));
        }
        sv_t.extend(singular_values(&mt));
        sv_c.extend(singular_values(&mc));
    }
    Ok(ks_distance(&sv_t, &sv_c))
}
