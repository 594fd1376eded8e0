//! Fixtures shared by the benchmarks in `benches/`.

use cdma_core::large_system::{PowerDelayLaw, PowerLaw, SystemLaw};
use cdma_core::montecarlo::FiniteConfig;
use cdma_core::{ChipWaveform, MatrixKind, Result};

/// Root-raised-cosine system at unit load with equal powers and `delay_atoms`
/// uniform delays.
pub fn rrc_system(roll_off: f64, beta: f64, n0: f64, delay_atoms: usize) -> Result<SystemLaw> {
    let w = ChipWaveform::root_raised_cosine(roll_off, 1.0)?;
    let r = w.min_oversampling();
    let law = PowerDelayLaw::uniform_delays(&PowerLaw::point(1.0)?, delay_atoms, 1.0)?;
    SystemLaw::new(beta, n0, r, w, law)
}

/// Finite system with `k = n/2` equal-power users on a uniform delay grid.
pub fn finite_rrc(n: usize, kind: MatrixKind) -> Result<FiniteConfig> {
    let w = ChipWaveform::root_raised_cosine(0.22, 1.0)?;
    let r = w.min_oversampling();
    Ok(FiniteConfig::equal_power_uniform_delays(n, n / 2, r, w, 0.1, kind, 64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_build() {
        assert_eq!(rrc_system(0.22, 1.0, 0.1, 16).unwrap().r(), 2);
        finite_rrc(16, MatrixKind::BlockCirculant).unwrap().prepare().unwrap();
    }
}
