//! Chip-pulse spectra and the frequency/delay objects built from them:
//! the sampled spectrum `phi(Omega, tau)`, the delay vector `Delta(Omega, tau)`,
//! the split `Q = Q(Omega) + Qbar(Omega, tau)` and the eigendecomposition of
//! `Q(Omega)`.
//!
//! Energy convention: `E = (1/2pi) * integral |Phi(w)|^2 dw`.

use std::f64::consts::PI;
use std::io::Read;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{wrap_angle, ComplexMatrix};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Linearly interpolated spectrum samples, zero outside the sampled range.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumTable {
    omega: Vec<f64>,
    values: Vec<Complex64>,
}

impl SpectrumTable {
    pub fn new(omega: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if omega.len() != values.len() {
            return Err(Error::Table(format!(
                "{} frequencies but {} values",
                omega.len(),
                values.len()
            )));
        }
        if omega.len() < 2 {
            return Err(Error::Table("at least two samples are required".into()));
        }
        if omega.iter().any(|w| !w.is_finite()) || values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Table("non-finite sample".into()));
        }
        if omega.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Table("frequencies must be strictly increasing".into()));
        }
        Ok(Self { omega, values })
    }

    /// Reads `omega,re[,im]` rows; the first row is a header.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(true)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let mut omega = Vec::new();
        let mut values = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::Table(e.to_string()))?;
            if rec.len() != 2 && rec.len() != 3 {
                return Err(Error::Table(format!(
                    "row {}: expected 2 or 3 columns, got {}",
                    line + 2,
                    rec.len()
                )));
            }
            let field = |i: usize| -> Result<f64> {
                rec[i]
                    .parse::<f64>()
                    .map_err(|e| Error::Table(format!("row {}: {e}", line + 2)))
            };
            omega.push(field(0)?);
            let im = if rec.len() == 3 { field(2)? } else { 0.0 };
            values.push(Complex64::new(field(1)?, im));
        }
        Self::new(omega, values)
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn range(&self) -> (f64, f64) {
        (self.omega[0], self.omega[self.omega.len() - 1])
    }

    fn interpolate(&self, w: f64) -> Complex64 {
        let (lo, hi) = self.range();
        if w < lo || w > hi {
            return ZERO;
        }
        let i = self.omega.partition_point(|&x| x <= w);
        if i == 0 {
            return self.values[0];
        }
        if i >= self.omega.len() {
            return self.values[self.omega.len() - 1];
        }
        let (w0, w1) = (self.omega[i - 1], self.omega[i]);
        let t = (w - w0) / (w1 - w0);
        self.values[i - 1] * (1.0 - t) + self.values[i] * t
    }

    /// `(1/2pi) * integral |Phi|^2` of the piecewise-linear interpolant, exact.
    fn energy(&self) -> f64 {
        let mut acc = 0.0;
        for i in 1..self.omega.len() {
            let (a, b) = (self.values[i - 1], self.values[i]);
            let h = self.omega[i] - self.omega[i - 1];
            acc += h * (a.norm_sqr() + b.norm_sqr() + (a * b.conj()).re) / 3.0;
        }
        acc / (2.0 * PI)
    }

    /// Smallest interval outside which the interpolant vanishes.
    fn support(&self) -> Option<(f64, f64)> {
        let n = self.omega.len();
        let first = self.values.iter().position(|v| v.norm() > 0.0)?;
        let last = self.values.iter().rposition(|v| v.norm() > 0.0)?;
        let lo = self.omega[first.saturating_sub(1)];
        let hi = self.omega[(last + 1).min(n - 1)];
        Some((lo, hi))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum WaveformKind {
    /// Flat spectrum over `|w| <= pi * alpha / Tc`.
    Sinc { alpha: f64 },
    /// Square-root raised cosine with roll-off `rho`.
    RootRaisedCosine { roll_off: f64 },
    Tabulated(SpectrumTable),
}

/// Spectrum `Phi(w)` of the received chip pulse.
#[derive(Debug, Clone, PartialEq)]
pub struct ChipWaveform {
    kind: WaveformKind,
    chip_interval: f64,
    energy: f64,
    bandwidth: f64,
    support: (f64, f64),
}

fn check_chip_interval(tc: f64) -> Result<()> {
    if !(tc > 0.0 && tc.is_finite()) {
        return Err(Error::InvalidParameter(format!("chip interval must be positive, got {tc}")));
    }
    Ok(())
}

impl ChipWaveform {
    /// Unit-energy sinc pulse with relative bandwidth `alpha`, `B = alpha / (2 Tc)`.
    pub fn sinc(alpha: f64, chip_interval: f64) -> Result<Self> {
        check_chip_interval(chip_interval)?;
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!("sinc bandwidth alpha must be positive, got {alpha}")));
        }
        let edge = PI * alpha / chip_interval;
        Ok(Self {
            kind: WaveformKind::Sinc { alpha },
            chip_interval,
            energy: 1.0,
            bandwidth: alpha / (2.0 * chip_interval),
            support: (-edge, edge),
        })
    }

    /// Unit-energy root-raised-cosine pulse, `B = (1 + rho) / (2 Tc)`.
    pub fn root_raised_cosine(roll_off: f64, chip_interval: f64) -> Result<Self> {
        check_chip_interval(chip_interval)?;
        if !(0.0..=1.0).contains(&roll_off) {
            return Err(Error::InvalidParameter(format!("roll-off must lie in [0, 1], got {roll_off}")));
        }
        let edge = PI * (1.0 + roll_off) / chip_interval;
        Ok(Self {
            kind: WaveformKind::RootRaisedCosine { roll_off },
            chip_interval,
            energy: 1.0,
            bandwidth: (1.0 + roll_off) / (2.0 * chip_interval),
            support: (-edge, edge),
        })
    }

    pub fn tabulated(table: SpectrumTable, chip_interval: f64) -> Result<Self> {
        check_chip_interval(chip_interval)?;
        let support = table
            .support()
            .ok_or_else(|| Error::Table("spectrum is identically zero".into()))?;
        let energy = table.energy();
        let bandwidth = support.0.abs().max(support.1.abs()) / (2.0 * PI);
        Ok(Self {
            kind: WaveformKind::Tabulated(table),
            chip_interval,
            energy,
            bandwidth,
            support,
        })
    }

    pub fn from_csv_path(path: impl AsRef<Path>, chip_interval: f64) -> Result<Self> {
        let file = std::fs::File::open(path.as_ref())
            .map_err(|e| Error::Table(format!("{}: {e}", path.as_ref().display())))?;
        Self::tabulated(SpectrumTable::from_csv(file)?, chip_interval)
    }

    pub fn kind(&self) -> &WaveformKind {
        &self.kind
    }

    pub fn chip_interval(&self) -> f64 {
        self.chip_interval
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    /// One-sided bandwidth in hertz.
    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    /// Interval in rad/s outside which `Phi` vanishes.
    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    /// Smallest oversampling factor with `r >= 2 B Tc`.
    pub fn min_oversampling(&self) -> usize {
        let x = 2.0 * self.bandwidth * self.chip_interval;
        ((x - 1e-12).ceil() as usize).max(1)
    }

    pub fn check_oversampling(&self, r: usize) -> Result<()> {
        let min_r = self.min_oversampling();
        if r < min_r {
            return Err(Error::Undersampled {
                r,
                required: 2.0 * self.bandwidth * self.chip_interval,
                min_r,
            });
        }
        Ok(())
    }

    /// `Phi(w)`. Tabulated waveforms reject frequencies outside the table.
    pub fn spectrum(&self, w: f64) -> Result<Complex64> {
        if let WaveformKind::Tabulated(t) = &self.kind {
            let (lo, hi) = t.range();
            if !(w >= lo && w <= hi) {
                return Err(Error::OutOfTabulatedRange { omega: w, lo, hi });
            }
        }
        Ok(self.spectrum_or_zero(w))
    }

    /// `Phi(w)`, zero anywhere outside the support.
    pub(crate) fn spectrum_or_zero(&self, w: f64) -> Complex64 {
        let tc = self.chip_interval;
        match &self.kind {
            WaveformKind::Sinc { alpha } => {
                if w.abs() <= PI * alpha / tc {
                    Complex64::new((tc / alpha).sqrt(), 0.0)
                } else {
                    ZERO
                }
            }
            WaveformKind::RootRaisedCosine { roll_off } => {
                Complex64::new(rrc_power(*roll_off, tc, w).sqrt(), 0.0)
            }
            WaveformKind::Tabulated(t) => t.interpolate(w),
        }
    }

    /// `|Phi(w)|^2`, zero outside the support.
    pub fn power_spectrum(&self, w: f64) -> f64 {
        match &self.kind {
            WaveformKind::RootRaisedCosine { roll_off } => rrc_power(*roll_off, self.chip_interval, w),
            _ => self.spectrum_or_zero(w).norm_sqr(),
        }
    }

    /// Time-domain pulse `phi(t) = (1/2pi) * integral Phi(w) e^{jwt} dw`,
    /// evaluated by trapezoidal quadrature on `points` samples of the support.
    pub fn impulse_response(&self, t: f64, points: usize) -> Complex64 {
        let (lo, hi) = self.support;
        let n = points.max(2);
        let h = (hi - lo) / (n - 1) as f64;
        let mut acc = ZERO;
        for i in 0..n {
            let w = lo + i as f64 * h;
            let weight = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
            acc += self.spectrum_or_zero(w) * Complex64::cis(w * t) * weight;
        }
        acc * h / (2.0 * PI)
    }

    /// [`Self::impulse_response`] at many times, sharing the spectrum samples.
    pub fn impulse_responses(&self, times: &[f64], points: usize) -> Vec<Complex64> {
        let (lo, hi) = self.support;
        let n = points.max(2);
        let h = (hi - lo) / (n - 1) as f64;
        let weighted: Vec<Complex64> = (0..n)
            .map(|i| {
                let weight = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
                self.spectrum_or_zero(lo + i as f64 * h) * weight
            })
            .collect();
        times
            .iter()
            .map(|&t| {
                let step = Complex64::cis(h * t);
                let mut phase = Complex64::cis(lo * t);
                let mut acc = ZERO;
                for (i, v) in weighted.iter().enumerate() {
                    // refresh the recurrence now and then to bound drift
                    if i % 256 == 0 {
                        phase = Complex64::cis((lo + i as f64 * h) * t);
                    }
                    acc += v * phase;
                    phase *= step;
                }
                acc * h / (2.0 * PI)
            })
            .collect()
    }
}

/// `|Phi(w)|^2` of the unit-energy root-raised-cosine pulse.
fn rrc_power(rho: f64, tc: f64, w: f64) -> f64 {
    let f = w.abs() / (2.0 * PI);
    let f1 = (1.0 - rho) / (2.0 * tc);
    let f2 = (1.0 + rho) / (2.0 * tc);
    if f <= f1 {
        tc
    } else if f <= f2 {
        0.5 * tc * (1.0 + (PI * tc / rho * (f - f1)).cos())
    } else {
        0.0
    }
}

/// `Phi(w)` of `w` at a frequency; see [`ChipWaveform::spectrum`].
pub fn spectrum(w: &ChipWaveform, omega: f64) -> Result<Complex64> {
    w.spectrum(omega)
}

/// Alias indices `s` with `-pi r < Omega + 2 pi s <= pi r`, ascending.
/// Exactly `r` integers; at `Omega = 0` the window is `-floor((r-1)/2) ..= floor(r/2)`.
pub fn alias_window(r: usize, omega: f64) -> Vec<i64> {
    let rf = r as f64;
    let mut s0 = ((-PI * rf - omega) / (2.0 * PI)).floor() as i64 + 1;
    while omega + 2.0 * PI * (s0 as f64) <= -PI * rf {
        s0 += 1;
    }
    while omega + 2.0 * PI * ((s0 - 1) as f64) > -PI * rf {
        s0 -= 1;
    }
    (s0..s0 + r as i64).collect()
}

/// The alias terms entering `phi(Omega, tau)` at one normalized frequency:
/// positions `x_s = Omega + 2 pi s` and coefficients `Phi*(x_s / Tc) / Tc`.
#[derive(Debug, Clone, PartialEq)]
pub struct AliasTerms {
    r: usize,
    chip_interval: f64,
    omega: f64,
    indices: Vec<i64>,
    positions: Vec<f64>,
    coefficients: Vec<Complex64>,
}

impl AliasTerms {
    pub fn new(w: &ChipWaveform, r: usize, omega: f64) -> Result<Self> {
        if r == 0 {
            return Err(Error::InvalidParameter("oversampling factor must be at least 1".into()));
        }
        if !omega.is_finite() {
            return Err(Error::InvalidParameter(format!("normalized frequency must be finite, got {omega}")));
        }
        w.check_oversampling(r)?;
        let omega = wrap_angle(omega);
        let tc = w.chip_interval();
        let indices = alias_window(r, omega);
        let positions: Vec<f64> = indices.iter().map(|&s| omega + 2.0 * PI * s as f64).collect();
        let coefficients = positions
            .iter()
            .map(|&x| w.spectrum_or_zero(x / tc).conj() / tc)
            .collect();
        Ok(Self {
            r,
            chip_interval: tc,
            omega,
            indices,
            positions,
            coefficients,
        })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn indices(&self) -> &[i64] {
        &self.indices
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    /// `phi(Omega, tau)`.
    pub fn sampled(&self, tau: f64) -> Complex64 {
        let a = tau / self.chip_interval;
        self.positions
            .iter()
            .zip(&self.coefficients)
            .map(|(&x, &c)| c * Complex64::cis(a * x))
            .sum()
    }

    /// Components `phi(Omega, tau - i Tc / r)`, `i = 0..r`.
    pub fn delta(&self, tau: f64) -> Vec<Complex64> {
        let step = self.chip_interval / self.r as f64;
        (0..self.r).map(|i| self.sampled(tau - i as f64 * step)).collect()
    }
}

/// `phi(Omega, tau)`: spectrum of the pulse delayed by `tau` and sampled at `1/Tc`.
pub fn sampled_spectrum(w: &ChipWaveform, r: usize, omega: f64, tau: f64) -> Result<Complex64> {
    Ok(AliasTerms::new(w, r, omega)?.sampled(tau))
}

/// The vector `Delta(Omega, tau)` of `r` sub-chip-shifted sampled spectra.
#[derive(Debug, Clone, PartialEq)]
pub struct DelayVector {
    pub r: usize,
    pub omega: f64,
    pub tau: f64,
    pub components: Vec<Complex64>,
}

pub fn delta_vector(w: &ChipWaveform, r: usize, omega: f64, tau: f64) -> Result<DelayVector> {
    let terms = AliasTerms::new(w, r, omega)?;
    Ok(DelayVector {
        r,
        omega: terms.omega(),
        tau,
        components: terms.delta(tau),
    })
}

/// `Q(Omega, tau) = Delta Delta^H` split into its delay-free and oscillating parts.
#[derive(Debug, Clone, PartialEq)]
pub struct QSplit {
    pub full: ComplexMatrix,
    pub delay_free: ComplexMatrix,
    pub oscillating: ComplexMatrix,
}

pub fn q_split(w: &ChipWaveform, r: usize, omega: f64, tau: f64) -> Result<QSplit> {
    let terms = AliasTerms::new(w, r, omega)?;
    let delta = terms.delta(tau);
    let full = ComplexMatrix::outer(&delta, &delta);
    let delay_free = delay_free_q(&terms);

    let x = &terms.positions;
    let c = &terms.coefficients;
    let a = tau / terms.chip_interval;
    let rf = r as f64;
    let oscillating = ComplexMatrix::from_fn(r, r, |k, l| {
        let mut acc = ZERO;
        for s in 0..r {
            for u in 0..r {
                if s == u {
                    continue;
                }
                let phase = a * (x[s] - x[u]) - (k as f64 * x[s] - l as f64 * x[u]) / rf;
                acc += c[s] * c[u].conj() * Complex64::cis(phase);
            }
        }
        acc
    });
    Ok(QSplit {
        full,
        delay_free,
        oscillating,
    })
}

fn delay_free_q(terms: &AliasTerms) -> ComplexMatrix {
    let r = terms.r;
    let rf = r as f64;
    ComplexMatrix::from_fn(r, r, |k, l| {
        terms
            .positions
            .iter()
            .zip(&terms.coefficients)
            .map(|(&x, c)| c.norm_sqr() * Complex64::cis(-((k as f64 - l as f64) * x) / rf))
            .sum()
    })
}

/// Unit vector `e(x) = (1, e^{-jx/r}, ..., e^{-j(r-1)x/r}) / sqrt(r)`.
pub fn fourier_vector(r: usize, x: f64) -> Vec<Complex64> {
    let norm = 1.0 / (r as f64).sqrt();
    (0..r)
        .map(|k| Complex64::from_polar(norm, -(k as f64) * x / r as f64))
        .collect()
}

/// `Q(Omega) = U D U^H` with columns of `U` the vectors `e(Omega + 2 pi s)` over
/// the alias window and `D_ss = (r / Tc^2) |Phi((Omega + 2 pi s) / Tc)|^2`.
pub fn q_eigendecomposition(w: &ChipWaveform, r: usize, omega: f64) -> Result<(ComplexMatrix, Vec<f64>)> {
    let terms = AliasTerms::new(w, r, omega)?;
    let mut u = ComplexMatrix::zeros(r, r);
    for (j, &x) in terms.positions.iter().enumerate() {
        u.set_column(j, &fourier_vector(r, x));
    }
    let d = terms
        .coefficients
        .iter()
        .map(|c| r as f64 * c.norm_sqr())
        .collect();
    Ok((u, d))
}

/// `Q(Omega)` from its entrywise definition.
pub fn q_delay_free(w: &ChipWaveform, r: usize, omega: f64) -> Result<ComplexMatrix> {
    Ok(delay_free_q(&AliasTerms::new(w, r, omega)?))
}

/// The r x r matrix with entry `(l, k) = e^{j (k - l) Omega / r} b[(k - l) mod r]`,
/// the family whose trace against the oscillating part of `Q` vanishes.
pub fn structured_matrix(omega: f64, b: &[Complex64]) -> ComplexMatrix {
    let r = b.len();
    ComplexMatrix::from_fn(r, r, |l, k| {
        let d = k as i64 - l as i64;
        Complex64::cis(d as f64 * omega / r as f64) * b[d.rem_euclid(r as i64) as usize]
    })
}

/// Largest deviation of `m` from the form of [`structured_matrix`] at `omega`.
pub fn structure_defect(m: &ComplexMatrix, omega: f64) -> f64 {
    let r = m.rows();
    let strip = |l: usize, k: usize| m[(l, k)] * Complex64::cis(-((k as f64 - l as f64) * omega) / r as f64);
    let mut worst: f64 = 0.0;
    for l in 0..r {
        for k in 0..r {
            let d = (k + r - l) % r;
            worst = worst.max((strip(l, k) - strip(0, d)).norm());
        }
    }
    worst
}
