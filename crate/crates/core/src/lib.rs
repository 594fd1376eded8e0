//! Large-system analysis of chip-asynchronous DS-CDMA with random spreading
//! and linear MMSE detection: sampled chip-waveform spectra, the fixed-point
//! equations for the per-frequency interference and spectral efficiency,
//! capacity under the linear MMSE constraint, and finite-N Monte Carlo.

pub mod capacity;
pub mod error;
pub mod large_system;
pub mod montecarlo;
pub mod numerics;
pub mod waveforms;

pub use error::{Error, Result};
pub use large_system::{PowerDelayLaw, PowerLaw, SystemLaw};
pub use montecarlo::{FiniteConfig, MatrixKind, SinrSample};
pub use numerics::{ComplexMatrix, FixedPointOptions, FrequencyGrid};
pub use waveforms::{ChipWaveform, SpectrumTable};
