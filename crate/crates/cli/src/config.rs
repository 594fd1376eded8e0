//! Experiment configuration: per-command defaults, overridden by a flat TOML
//! file, overridden by command-line flags.

use std::path::Path;

use cdma_core::capacity::db_to_linear;
use cdma_core::large_system::{PowerDelayLaw, PowerLaw};
use cdma_core::montecarlo::MatrixKind;
use cdma_core::waveforms::ChipWaveform;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Chip interval used throughout the command-line tool; times are in chips.
pub const CHIP_INTERVAL: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Efficiency,
    Capacity,
    Figure2,
    Figure3,
    MonteCarlo,
    Theorem3,
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Efficiency => "efficiency",
            Command::Capacity => "capacity",
            Command::Figure2 => "figure2",
            Command::Figure3 => "figure3",
            Command::MonteCarlo => "montecarlo",
            Command::Theorem3 => "theorem3",
            Command::Verify => "verify",
        }
    }
}

/// Fully resolved settings. Serializes to the same flat keys it is read
/// from, so a dumped config reproduces a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// `sinc:<alpha>`, `rrc:<rho>` or `table:<csv path>`.
    pub waveform: String,
    /// Oversampling factor; 0 selects the smallest admissible value.
    pub r: usize,
    /// Load: a value, a comma list, or `start:step:stop`.
    pub beta: String,
    /// Relative sinc bandwidth grid, same syntax as `beta`.
    pub alpha: String,
    pub ebn0_db: f64,
    pub n0: f64,
    /// Frequency grid size.
    pub grid: usize,
    /// `uniform` or `zero`.
    pub delays: String,
    pub delay_atoms: usize,
    /// Comma list of equally likely received powers.
    pub powers: String,
    /// `scalar` or `matrix`.
    pub solver: String,
    pub sync: bool,
    pub cross_check: bool,
    pub n: usize,
    pub k: usize,
    pub trials: usize,
    /// Half-width of the symbol window of the theorem3 harness.
    pub window: usize,
    /// `toeplitz` or `circulant`.
    pub matrix: String,
    pub seed: u64,
}

/// One override layer; every key optional.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigLayer {
    pub waveform: Option<String>,
    pub r: Option<usize>,
    pub beta: Option<String>,
    pub alpha: Option<String>,
    pub ebn0_db: Option<f64>,
    pub n0: Option<f64>,
    pub grid: Option<usize>,
    pub delays: Option<String>,
    pub delay_atoms: Option<usize>,
    pub powers: Option<String>,
    pub solver: Option<String>,
    pub sync: Option<bool>,
    pub cross_check: Option<bool>,
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub trials: Option<usize>,
    pub window: Option<usize>,
    pub matrix: Option<String>,
    pub seed: Option<u64>,
}

impl ConfigLayer {
    pub fn from_toml_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))
    }
}

macro_rules! apply_layer {
    ($cfg:expr, $layer:expr, $($field:ident),*) => {
        $(if let Some(v) = $layer.$field.clone() { $cfg.$field = v; })*
    };
}

impl ExperimentConfig {
    pub fn defaults(cmd: Command) -> Self {
        let mut cfg = Self {
            waveform: "rrc:0.22".into(),
            r: 0,
            beta: "1".into(),
            alpha: "0.25:0.125:2".into(),
            ebn0_db: 10.0,
            n0: 0.1,
            grid: 512,
            delays: "uniform".into(),
            delay_atoms: 64,
            powers: "1".into(),
            solver: "scalar".into(),
            sync: false,
            cross_check: false,
            n: 128,
            k: 64,
            trials: 200,
            window: 3,
            matrix: "toeplitz".into(),
            seed: 1,
        };
        match cmd {
            Command::Figure2 => cfg.waveform = "sinc:1".into(),
            Command::Figure3 => cfg.beta = "0.25:0.25:8".into(),
            Command::Theorem3 => {
                cfg.n = 64;
                cfg.k = 32;
                cfg.trials = 100;
                cfg.matrix = "circulant".into();
            }
            _ => {}
        }
        cfg
    }

    pub fn apply(&mut self, layer: &ConfigLayer) {
        apply_layer!(
            self, layer, waveform, r, beta, alpha, ebn0_db, n0, grid, delays, delay_atoms, powers, solver, sync,
            cross_check, n, k, trials, window, matrix, seed
        );
    }

    /// Defaults, then the file layer, then the flag layer; fills `r` and
    /// checks every field.
    pub fn resolve(cmd: Command, layers: &[ConfigLayer]) -> Result<(Self, Resolved), CliError> {
        let mut cfg = Self::defaults(cmd);
        for layer in layers {
            cfg.apply(layer);
        }
        let resolved = Resolved::from_config(&mut cfg)?;
        Ok((cfg, resolved))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("flat config serializes")
    }
}

/// Parsed, validated values derived from an [`ExperimentConfig`].
#[derive(Debug, Clone)]
pub struct Resolved {
    pub waveform: ChipWaveform,
    pub r: usize,
    pub betas: Vec<f64>,
    pub alphas: Vec<f64>,
    /// Linear Eb/N0.
    pub ebn0: f64,
    pub powers: PowerLaw,
    pub law: PowerDelayLaw,
    pub matrix: MatrixKind,
    pub matrix_solver: bool,
}

impl Resolved {
    fn from_config(cfg: &mut ExperimentConfig) -> Result<Self, CliError> {
        let waveform = parse_waveform(&cfg.waveform)?;
        if cfg.r == 0 {
            cfg.r = waveform.min_oversampling();
        }
        waveform.check_oversampling(cfg.r)?;
        let betas = parse_grid(&cfg.beta, "beta")?;
        if betas.iter().any(|b| !(*b >= 0.0)) {
            return Err(CliError::Config("beta values must be nonnegative".into()));
        }
        let alphas = parse_grid(&cfg.alpha, "alpha")?;
        if alphas.iter().any(|a| !(*a > 0.0)) {
            return Err(CliError::Config("alpha values must be positive".into()));
        }
        if !cfg.ebn0_db.is_finite() {
            return Err(CliError::Config("ebn0_db must be finite".into()));
        }
        if !(cfg.n0 > 0.0 && cfg.n0.is_finite()) {
            return Err(CliError::Config(format!("n0 must be positive, got {}", cfg.n0)));
        }
        for (name, v) in [("grid", cfg.grid), ("delay_atoms", cfg.delay_atoms), ("n", cfg.n), ("k", cfg.k), ("trials", cfg.trials)] {
            if v == 0 {
                return Err(CliError::Config(format!("{name} must be positive")));
            }
        }
        if cfg.grid % 2 == 1 {
            return Err(CliError::Config(format!("grid must be even, got {}", cfg.grid)));
        }
        let power_values = parse_list(&cfg.powers, "powers")?;
        let powers = PowerLaw::equiprobable(&power_values)?;
        let law = match cfg.delays.as_str() {
            "uniform" => PowerDelayLaw::uniform_delays(&powers, cfg.delay_atoms, CHIP_INTERVAL)?,
            "zero" => PowerDelayLaw::fixed_delay(&powers, 0.0, CHIP_INTERVAL)?,
            other => return Err(CliError::Config(format!("delays must be 'uniform' or 'zero', got '{other}'"))),
        };
        let matrix = cfg.matrix.parse::<MatrixKind>()?;
        let matrix_solver = match cfg.solver.as_str() {
            "scalar" => false,
            "matrix" => true,
            other => return Err(CliError::Config(format!("solver must be 'scalar' or 'matrix', got '{other}'"))),
        };
        Ok(Self {
            waveform,
            r: cfg.r,
            betas,
            alphas,
            ebn0: db_to_linear(cfg.ebn0_db),
            powers,
            law,
            matrix,
            matrix_solver,
        })
    }
}

pub fn parse_waveform(spec: &str) -> Result<ChipWaveform, CliError> {
    let (kind, arg) = spec
        .split_once(':')
        .ok_or_else(|| CliError::Config(format!("waveform '{spec}' should look like sinc:1, rrc:0.22 or table:file.csv")))?;
    let number = || {
        arg.trim()
            .parse::<f64>()
            .map_err(|_| CliError::Config(format!("waveform parameter '{arg}' is not a number")))
    };
    Ok(match kind {
        "sinc" => ChipWaveform::sinc(number()?, CHIP_INTERVAL)?,
        "rrc" => ChipWaveform::root_raised_cosine(number()?, CHIP_INTERVAL)?,
        "table" => ChipWaveform::from_csv_path(arg, CHIP_INTERVAL)?,
        other => return Err(CliError::Config(format!("unknown waveform kind '{other}'"))),
    })
}

fn parse_number(s: &str, what: &str) -> Result<f64, CliError> {
    let v = s
        .trim()
        .parse::<f64>()
        .map_err(|_| CliError::Config(format!("{what}: '{s}' is not a number")))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Config(format!("{what}: '{s}' is not finite")))
    }
}

fn parse_list(s: &str, what: &str) -> Result<Vec<f64>, CliError> {
    s.split(',').map(|x| parse_number(x, what)).collect()
}

/// `x`, `x,y,z`, or `start:step:stop` (stop included when hit up to rounding).
pub fn parse_grid(s: &str, what: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [_] => parse_list(s, what),
        [start, step, stop] => {
            let (start, step, stop) = (parse_number(start, what)?, parse_number(step, what)?, parse_number(stop, what)?);
            if !(step > 0.0) || stop < start {
                return Err(CliError::Config(format!("{what}: range needs step > 0 and stop >= start")));
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            if count > 100_000 {
                return Err(CliError::Config(format!("{what}: range has {count} points")));
            }
            Ok((0..count).map(|i| start + step * i as f64).collect())
        }
        _ => Err(CliError::Config(format!("{what}: expected a value, a comma list or start:step:stop, got '{s}'"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids_parse() {
        assert_eq!(parse_grid("2", "b").unwrap(), vec![2.0]);
        assert_eq!(parse_grid("1, 2,4", "b").unwrap(), vec![1.0, 2.0, 4.0]);
        let g = parse_grid("0.25:0.25:8", "b").unwrap();
        assert_eq!(g.len(), 32);
        assert_eq!(*g.last().unwrap(), 8.0);
        assert!(parse_grid("1:0:2", "b").is_err());
        assert!(parse_grid("a", "b").is_err());
        assert!(parse_grid("1:2", "b").is_err());
    }

    #[test]
    fn waveforms_parse() {
        assert_eq!(parse_waveform("sinc:1.5").unwrap().bandwidth(), 0.75);
        assert!(parse_waveform("rrc:0.22").is_ok());
        assert!(parse_waveform("rrc:x").is_err());
        assert!(parse_waveform("gauss:1").is_err());
        assert!(parse_waveform("sinc").is_err());
    }

    #[test]
    fn layers_apply_in_order() {
        let file = ConfigLayer { beta: Some("2".into()), n0: Some(0.5), ..Default::default() };
        let flags = ConfigLayer { beta: Some("3".into()), ..Default::default() };
        let (cfg, res) = ExperimentConfig::resolve(Command::Efficiency, &[file, flags]).unwrap();
        assert_eq!(cfg.beta, "3");
        assert_eq!(cfg.n0, 0.5);
        assert_eq!(cfg.r, 2);
        assert_eq!(res.betas, vec![3.0]);
    }

    #[test]
    fn dumped_config_reads_back() {
        let (cfg, _) = ExperimentConfig::resolve(Command::Figure3, &[]).unwrap();
        let layer: ConfigLayer = toml::from_str(&cfg.to_toml()).unwrap();
        let (again, _) = ExperimentConfig::resolve(Command::Efficiency, &[layer]).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn invalid_values_are_config_errors() {
        let bad = ConfigLayer { n0: Some(0.0), ..Default::default() };
        assert!(matches!(ExperimentConfig::resolve(Command::Efficiency, &[bad]), Err(CliError::Config(_))));
        let under = ConfigLayer { waveform: Some("sinc:2".into()), r: Some(1), ..Default::default() };
        assert_eq!(ExperimentConfig::resolve(Command::Efficiency, &[under]).unwrap_err().exit_code(), 2);
        assert!(toml::from_str::<ConfigLayer>("bogus = 1").is_err());
    }
}
