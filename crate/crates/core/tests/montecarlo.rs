use cdma_core::montecarlo::{
    run_trials, spectral_equivalence_ks, theorem3_harness, FiniteConfig, MatrixKind, Theorem3Config,
};
use cdma_core::waveforms::ChipWaveform;
use num_complex::Complex64;

fn rrc() -> ChipWaveform {
    ChipWaveform::root_raised_cosine(0.22, 1.0).unwrap()
}

#[test]
fn toeplitz_and_circulant_singular_values_match() {
    let ks8 = spectral_equivalence_ks(&rrc(), 8, 2, 0.3, 256, 1).unwrap();
    assert!(ks8 <= 0.05, "{ks8}");
    let ks16 = spectral_equivalence_ks(&rrc(), 16, 2, 0.3, 256, 2).unwrap();
    let ks64 = spectral_equivalence_ks(&rrc(), 64, 2, 0.3, 64, 3).unwrap();
    let ratio = ks64 / ks16;
    assert!(ratio < 0.75, "{ks16} -> {ks64}");
}

#[test]
fn toeplitz_and_circulant_efficiencies_agree() {
    let t = FiniteConfig::equal_power_uniform_delays(48, 24, 2, rrc(), 0.1, MatrixKind::BlockToeplitz, 24);
    let c = FiniteConfig { kind: MatrixKind::BlockCirculant, ..t.clone() };
    let a = run_trials(&t, 60, 5).unwrap().summary;
    let b = run_trials(&c, 60, 5).unwrap().summary;
    let se = a.standard_error.hypot(b.standard_error);
    assert!((a.mean_efficiency - b.mean_efficiency).abs() < 0.02 * b.mean_efficiency + 3.0 * se);
}

#[test]
fn whole_chip_delays_match_the_synchronous_window() {
    let base = Theorem3Config {
        n: 32,
        r: 2,
        waveform: rrc(),
        amplitudes: vec![Complex64::new(1.0, 0.0); 12],
        delays: vec![0.0; 12],
        n0: 0.1,
        window: 2,
    };
    let shifted = Theorem3Config { delays: (0..12).map(|k| (k * 5 % 32) as f64).collect(), ..base.clone() };
    let a = theorem3_harness(&base, 40, 9).unwrap();
    let b = theorem3_harness(&shifted, 40, 10).unwrap();
    // overlapping 95% intervals
    let (ma, sa) = (a.general.mean_efficiency, a.general.standard_error);
    let (mb, sb) = (b.general.mean_efficiency, b.general.standard_error);
    assert!((ma - mb).abs() <= 1.96 * (sa + sb), "{ma} ± {sa} vs {mb} ± {sb}");
}

#[test]
fn summary_reports_every_user() {
    let cfg = FiniteConfig::equal_power_uniform_delays(16, 5, 2, rrc(), 0.3, MatrixKind::BlockCirculant, 5);
    let rep = run_trials(&cfg, 3, 0).unwrap();
    assert_eq!(rep.samples.len(), 15);
    assert_eq!(rep.summary.per_user.len(), 5);
    assert!(rep.samples.iter().all(|s| s.sinr > 0.0 && s.efficiency > 0.0));
}
