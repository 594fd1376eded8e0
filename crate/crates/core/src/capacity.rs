//! Total capacity per chip and spectral efficiency: the chip-synchronous
//! closed form, the waveform-constrained capacity obtained by integrating
//! the MMSE multiuser efficiency over SNR, Eb/N0 accounting, and the
//! bandwidth/load sweeps behind the spectral-efficiency curves.

use std::cell::RefCell;
use std::f64::consts::LN_2;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::large_system::{solve_efficiency_scalar, PowerDelayLaw, PowerLaw, SystemLaw};
use crate::numerics::{gauss_legendre, regula_falsi};
use crate::waveforms::ChipWaveform;

/// `10 log10(x)`.
pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// `F(y, z) = (sqrt(y (1 + sqrt z)^2 + 1) - sqrt(y (1 - sqrt z)^2 + 1))^2`.
pub fn f_helper(y: f64, z: f64) -> f64 {
    let sz = z.sqrt();
    let a = (y * (1.0 + sz).powi(2) + 1.0).sqrt();
    let b = (y * (1.0 - sz).powi(2) + 1.0).sqrt();
    // a - b = 4 y sqrt(z) / (a + b), free of cancellation
    let d = 4.0 * y * sz / (a + b);
    d * d
}

/// Capacity per chip (bits) of large chip-synchronous random CDMA with
/// Nyquist chips, equal powers, load `beta` and SNR `snr`.
pub fn capacity_sync_closed_form(beta: f64, snr: f64) -> Result<f64> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::InvalidParameter(format!("load must be positive, got {beta}")));
    }
    if !(snr >= 0.0 && snr.is_finite()) {
        return Err(Error::InvalidParameter(format!("snr must be finite and nonnegative, got {snr}")));
    }
    if snr == 0.0 {
        return Ok(0.0);
    }
    let f4 = f_helper(snr, beta) / 4.0;
    let f_over_4snr = {
        let sb = beta.sqrt();
        let a = (snr * (1.0 + sb).powi(2) + 1.0).sqrt();
        let b = (snr * (1.0 - sb).powi(2) + 1.0).sqrt();
        4.0 * snr * beta / ((a + b) * (a + b))
    };
    let c = beta * (snr - f4).ln_1p() + (snr * beta - f4).ln_1p() - f_over_4snr;
    Ok((c / LN_2).max(0.0))
}

/// Single-user bound for a sinc pulse: `alpha * log2(1 + beta * snr / alpha)`
/// bits per chip, all users' energy pooled into one Gaussian channel.
pub fn capacity_single_user_sinc(beta: f64, alpha: f64, snr: f64) -> Result<f64> {
    if !(beta >= 0.0 && alpha > 0.0 && snr >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "single-user capacity needs beta >= 0, alpha > 0, snr >= 0 (got {beta}, {alpha}, {snr})"
        )));
    }
    Ok(alpha * (beta * snr / alpha).ln_1p() / LN_2)
}

/// Quadrature settings of [`capacity_constrained`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityOptions {
    /// Initial Gauss–Legendre node count.
    pub nodes: usize,
    /// Largest node count tried before giving up.
    pub max_nodes: usize,
    /// Relative change between successive node counts that ends the doubling.
    pub rel_tol: f64,
    /// Frequency points of the scalar efficiency solver.
    pub frequency_points: usize,
}

impl Default for CapacityOptions {
    fn default() -> Self {
        Self {
            nodes: 129,
            max_nodes: 2049,
            rel_tol: 1e-5,
            frequency_points: 512,
        }
    }
}

fn integrate_capacity(sys: &SystemLaw, snr: f64, nodes: usize, points: usize) -> Result<f64> {
    let (x, w) = gauss_legendre(nodes);
    let energy = sys.waveform().energy();
    let powers = sys.law().power_marginal();
    let terms: Vec<f64> = x
        .par_iter()
        .zip(&w)
        .map(|(&xi, &wi)| {
            // gamma = snr t^2 on t in [0, 1]
            let t = 0.5 * (xi + 1.0);
            let gamma = snr * t * t;
            let node_sys = sys.with_n0(energy / gamma)?;
            let eta = solve_efficiency_scalar(&node_sys, points)
                .map_err(|e| match e {
                    Error::NonConvergence { iterations, residual, .. } => Error::NonConvergence {
                        context: format!(" at SNR node {gamma:.6e}"),
                        iterations,
                        residual,
                    },
                    other => other,
                })?
                .eta;
            let f: f64 = powers
                .atoms()
                .iter()
                .map(|a| a.weight * a.power * eta / (1.0 + a.power * gamma * eta))
                .sum();
            Ok(0.5 * wi * f * 2.0 * snr * t)
        })
        .collect::<Result<_>>()?;
    Ok(sys.beta() / LN_2 * terms.iter().sum::<f64>())
}

/// Capacity per chip constrained to the chip waveform,
/// `(beta / ln 2) * integral_0^{E/N0} sum w lambda eta_g / (1 + lambda g eta_g) dg`,
/// with `eta_g` the scalar multiuser efficiency at `N0 = E / g`.
pub fn capacity_constrained(sys: &SystemLaw, opts: CapacityOptions) -> Result<f64> {
    let snr = sys.waveform().energy() / sys.n0();
    if sys.beta() == 0.0 {
        return Ok(0.0);
    }
    if opts.nodes < 2 || opts.max_nodes < opts.nodes {
        return Err(Error::InvalidParameter("capacity quadrature needs 2 <= nodes <= max_nodes".into()));
    }
    let mut n = opts.nodes;
    let mut prev = integrate_capacity(sys, snr, n, opts.frequency_points)?;
    loop {
        let next_n = 2 * n - 1;
        if next_n > opts.max_nodes {
            return Err(Error::NonConvergence {
                context: " (capacity quadrature)".into(),
                iterations: n,
                residual: f64::NAN,
            });
        }
        let next = integrate_capacity(sys, snr, next_n, opts.frequency_points)?;
        if (next - prev).abs() <= opts.rel_tol * next.abs() {
            return Ok(next);
        }
        prev = next;
        n = next_n;
    }
}

/// `Gamma = C / (Tc B)` with one-sided bandwidth `B`.
pub fn spectral_efficiency(capacity: f64, w: &ChipWaveform) -> Result<f64> {
    let tb = w.chip_interval() * w.bandwidth();
    if tb <= 0.0 {
        return Err(Error::ZeroBandwidth);
    }
    Ok(capacity / tb)
}

/// `beta * snr / C`.
pub fn eb_n0(beta: f64, snr: f64, capacity: f64) -> f64 {
    beta * snr / capacity
}

/// SNR at which `beta * snr / C(snr)` equals `target_ebn0` (linear scale).
pub fn snr_for_ebn0(target_ebn0: f64, beta: f64, mut capacity: impl FnMut(f64) -> Result<f64>) -> Result<f64> {
    let target_db = linear_to_db(target_ebn0);
    if !(target_ebn0 > 0.0 && target_ebn0.is_finite() && beta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "Eb/N0 target and load must be positive (got {target_ebn0}, {beta})"
        )));
    }
    let err = RefCell::new(None);
    let take_err = || err.borrow_mut().take().expect("error recorded");
    let mut h = |ls: f64| -> f64 {
        let snr = ls.exp();
        match capacity(snr) {
            Ok(c) if c > 0.0 => (beta * snr / c).ln() - target_ebn0.ln(),
            Ok(_) => f64::INFINITY,
            Err(e) => {
                err.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        }
    };
    let lo = 1e-9f64.ln();
    let h_lo = h(lo);
    if h_lo.is_nan() {
        return Err(take_err());
    }
    if h_lo > 0.0 {
        return Err(Error::UnreachableEbN0 {
            target_db,
            reason: format!(
                "below the minimum Eb/N0 of this channel (about {:.4} dB)",
                target_db + h_lo / std::f64::consts::LN_10 * 10.0
            ),
        });
    }
    let mut hi = 0.0f64;
    let max_hi = 1e9f64.ln();
    loop {
        let v = h(hi);
        if v.is_nan() {
            return Err(take_err());
        }
        if v >= 0.0 {
            break;
        }
        if hi >= max_hi {
            return Err(Error::UnreachableEbN0 {
                target_db,
                reason: "not reached for SNR up to 1e9".into(),
            });
        }
        hi = (hi + 4f64.ln()).min(max_hi);
    }
    let ls = regula_falsi(&mut h, lo, hi, 1e-11);
    if let Some(e) = err.borrow_mut().take() {
        return Err(e);
    }
    Ok(ls?.exp())
}

/// Capacity, spectral efficiency and energy accounting at one operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityResult {
    pub capacity_per_chip: f64,
    pub spectral_efficiency: f64,
    pub snr: f64,
    pub eb_n0: f64,
    pub beta: f64,
    pub bandwidth_chip_product: f64,
}

impl CapacityResult {
    pub fn new(capacity: f64, snr: f64, beta: f64, w: &ChipWaveform) -> Result<Self> {
        Ok(Self {
            capacity_per_chip: capacity,
            spectral_efficiency: spectral_efficiency(capacity, w)?,
            snr,
            eb_n0: eb_n0(beta, snr, capacity),
            beta,
            bandwidth_chip_product: w.chip_interval() * w.bandwidth(),
        })
    }
}

/// Asynchronous operating point with uniform delays and equal unit powers
/// at a fixed Eb/N0.
#[derive(Debug, Clone, PartialEq)]
pub struct AsyncSetup {
    pub waveform: ChipWaveform,
    pub r: usize,
    pub delay_atoms: usize,
    pub opts: CapacityOptions,
}

impl AsyncSetup {
    pub fn new(waveform: ChipWaveform) -> Self {
        let r = waveform.min_oversampling();
        Self {
            waveform,
            r,
            delay_atoms: 64,
            opts: CapacityOptions::default(),
        }
    }

    fn system(&self, beta: f64, snr: f64) -> Result<SystemLaw> {
        let law = PowerDelayLaw::uniform_delays(&PowerLaw::point(1.0)?, self.delay_atoms, self.waveform.chip_interval())?;
        SystemLaw::new(beta, self.waveform.energy() / snr, self.r, self.waveform.clone(), law)
    }

    /// Constrained capacity per chip at load `beta` and SNR `snr`.
    pub fn capacity(&self, beta: f64, snr: f64) -> Result<f64> {
        if snr == 0.0 {
            return Ok(0.0);
        }
        capacity_constrained(&self.system(beta, snr)?, self.opts)
    }

    pub fn at_ebn0(&self, beta: f64, ebn0: f64) -> Result<CapacityResult> {
        let snr = snr_for_ebn0(ebn0, beta, |s| self.capacity(beta, s))?;
        CapacityResult::new(self.capacity(beta, snr)?, snr, beta, &self.waveform)
    }
}

/// Chip-synchronous capacity at a fixed Eb/N0, with the spectral efficiency
/// taken over the bandwidth of `w`.
pub fn sync_at_ebn0(beta: f64, ebn0: f64, w: &ChipWaveform) -> Result<CapacityResult> {
    let snr = snr_for_ebn0(ebn0, beta, |s| capacity_sync_closed_form(beta, s))?;
    CapacityResult::new(capacity_sync_closed_form(beta, snr)?, snr, beta, w)
}

/// One point of the spectral-efficiency versus sinc bandwidth sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct BandwidthRow {
    pub alpha: f64,
    pub gamma_async: Result<f64>,
    pub gamma_sync: Result<f64>,
}

/// Spectral efficiency of asynchronous sinc-pulse CDMA against relative
/// bandwidth `alpha`, next to the synchronous system over the same bandwidth.
pub fn sinc_bandwidth_sweep(alphas: &[f64], beta: f64, ebn0: f64, opts: CapacityOptions) -> Result<Vec<BandwidthRow>> {
    alphas
        .par_iter()
        .map(|&alpha| {
            let w = ChipWaveform::sinc(alpha, 1.0)?;
            let mut setup = AsyncSetup::new(w.clone());
            setup.opts = opts;
            Ok(BandwidthRow {
                alpha,
                gamma_async: setup.at_ebn0(beta, ebn0).map(|c| c.spectral_efficiency),
                gamma_sync: sync_at_ebn0(beta, ebn0, &w).map(|c| c.spectral_efficiency),
            })
        })
        .collect()
}

/// One point of the spectral-efficiency versus load sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadRow {
    pub beta: f64,
    pub gamma_async: Result<f64>,
    pub gamma_sync: Result<f64>,
}

impl LoadRow {
    /// `(Gamma_async - Gamma_sync) / Gamma_async`.
    pub fn relative_gap(&self) -> Option<f64> {
        match (&self.gamma_async, &self.gamma_sync) {
            (Ok(a), Ok(s)) if *a > 0.0 => Some((a - s) / a),
            _ => None,
        }
    }
}

/// Spectral efficiency against load for asynchronous users with uniform
/// delays and for chip-synchronous users, both over the bandwidth of the
/// setup's waveform.
pub fn load_sweep(setup: &AsyncSetup, betas: &[f64], ebn0: f64) -> Vec<LoadRow> {
    betas
        .par_iter()
        .map(|&beta| LoadRow {
            beta,
            gamma_async: setup.at_ebn0(beta, ebn0).map(|c| c.spectral_efficiency),
            gamma_sync: sync_at_ebn0(beta, ebn0, &setup.waveform).map(|c| c.spectral_efficiency),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::large_system::solve_efficiency_sync;
    use proptest::prelude::*;

    #[test]
    fn db_round_trip() {
        for x in [1e-3, 0.5, 1.0, 10.0, 1234.5] {
            assert!((db_to_linear(linear_to_db(x)) - x).abs() <= 1e-12 * x);
        }
        assert!((linear_to_db(10.0) - 10.0).abs() < 1e-15);
    }

    #[test]
    fn f_helper_cases() {
        for y in [0.0, 0.3, 10.0, 1e6] {
            assert_eq!(f_helper(y, 0.0), 0.0);
        }
        let (y, z) = (2.0f64, 0.7f64);
        let direct = ((y * (1.0 + z.sqrt()).powi(2) + 1.0).sqrt() - (y * (1.0 - z.sqrt()).powi(2) + 1.0).sqrt()).powi(2);
        assert!((f_helper(y, z) - direct).abs() < 1e-14);
    }

    #[test]
    fn sync_closed_form_basics() {
        assert_eq!(capacity_sync_closed_form(1.0, 0.0).unwrap(), 0.0);
        assert!(capacity_sync_closed_form(0.0, 1.0).is_err());
        // tiny load: each user sees an interference-free channel
        let c = capacity_sync_closed_form(1e-6, 10.0).unwrap();
        assert!((c / 1e-6 - 11f64.log2()).abs() < 1e-4);
    }

    #[test]
    fn sync_closed_form_matches_mmse_integral() {
        // d C / d snr = beta * eta / (1 + snr eta) / ln 2
        let p = PowerLaw::point(1.0).unwrap();
        for beta in [0.5, 1.0, 2.0] {
            let snr = 10.0;
            let (x, w) = gauss_legendre(200);
            let mut acc = 0.0;
            for (xi, wi) in x.iter().zip(&w) {
                let t = 0.5 * (xi + 1.0);
                let g = snr * t * t;
                let eta = solve_efficiency_sync(beta, &p, 1.0 / g).unwrap();
                acc += 0.5 * wi * eta / (1.0 + g * eta) * 2.0 * snr * t;
            }
            let integral = beta * acc / LN_2;
            let closed = capacity_sync_closed_form(beta, snr).unwrap();
            assert!((integral - closed).abs() < 1e-8 * closed, "beta={beta}: {integral} vs {closed}");
        }
    }

    #[test]
    fn spectral_efficiency_literal_division() {
        let nyq = ChipWaveform::sinc(1.0, 1.0).unwrap();
        assert!((spectral_efficiency(1.0, &nyq).unwrap() - 2.0).abs() < 1e-15);
        let w = ChipWaveform::sinc(2.0, 1.0).unwrap();
        assert!((spectral_efficiency(1.0, &w).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(spectral_efficiency(0.0, &w).unwrap(), 0.0);
    }

    #[test]
    fn snr_for_ebn0_round_trip_and_bounds() {
        let beta = 1.0;
        let target = db_to_linear(10.0);
        let snr = snr_for_ebn0(target, beta, |s| capacity_sync_closed_form(beta, s)).unwrap();
        let c = capacity_sync_closed_form(beta, snr).unwrap();
        assert!((eb_n0(beta, snr, c) - target).abs() < 1e-8 * target);
        assert!(matches!(
            snr_for_ebn0(db_to_linear(-3.0), beta, |s| capacity_sync_closed_form(beta, s)),
            Err(Error::UnreachableEbN0 { .. })
        ));
    }

    #[test]
    fn constrained_capacity_zero_load_and_monotone() {
        let setup = AsyncSetup::new(ChipWaveform::root_raised_cosine(0.22, 1.0).unwrap());
        let sys0 = setup.system(1.0, 5.0).unwrap().with_beta(0.0).unwrap();
        assert_eq!(capacity_constrained(&sys0, setup.opts).unwrap(), 0.0);
        let c1 = setup.capacity(1.0, 1.0).unwrap();
        let c2 = setup.capacity(1.0, 3.0).unwrap();
        assert!(c1 > 0.0 && c1 <= c2);
    }

    #[test]
    fn constrained_capacity_sinc_identity() {
        let setup = AsyncSetup::new(ChipWaveform::sinc(1.5, 1.0).unwrap());
        let c = setup.capacity(1.0, 10.0).unwrap();
        let target = 1.5 * capacity_sync_closed_form(1.0 / 1.5, 10.0).unwrap();
        assert!((c - target).abs() < 1e-4 * target);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn sync_capacity_monotone_in_snr(beta in 0.05f64..8.0, s1 in 0.0f64..100.0, ds in 0.0f64..100.0) {
            let a = capacity_sync_closed_form(beta, s1).unwrap();
            let b = capacity_sync_closed_form(beta, s1 + ds).unwrap();
            prop_assert!(a <= b + 1e-12);
            prop_assert!(a >= 0.0);
        }

        #[test]
        fn sync_capacity_below_single_user_bound(beta in 0.05f64..8.0, snr in 0.0f64..100.0) {
            let c = capacity_sync_closed_form(beta, snr).unwrap();
            let su = capacity_single_user_sinc(beta, 1.0, snr).unwrap();
            prop_assert!(c <= su * (1.0 + 1e-12) + 1e-15);
        }
    }
}
