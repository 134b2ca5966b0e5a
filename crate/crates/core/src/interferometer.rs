//! Two-arm delayed-choice Mach–Zehnder interferometer.
//!
//! A single photon is a pair of complex amplitudes, one per arm. The input
//! half-silvered mirror (H1) splits it, the full mirrors fold both arms
//! towards the output, each arm picks up an adjustable phase, and the output
//! half-silvered mirror (H2) is optionally in place when the photon arrives.
//! Upper amplitude feeds detector D1, lower amplitude feeds D2.
//!
//! Beam splitter convention: `(1/sqrt 2) [[1, i], [i, 1]]`. Any lossless
//! convention only relabels which detector is bright.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Amplitudes in the upper and lower arm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArmState {
    pub amp_upper: Complex64,
    pub amp_lower: Complex64,
}

impl ArmState {
    pub fn new(amp_upper: Complex64, amp_lower: Complex64) -> Self {
        ArmState { amp_upper, amp_lower }
    }

    /// Photon entering through the upper input port.
    pub fn input_upper() -> Self {
        ArmState::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amp_upper.norm_sqr() + self.amp_lower.norm_sqr()
    }

    /// `(|upper|^2, |lower|^2)`.
    pub fn probabilities(&self) -> (f64, f64) {
        (self.amp_upper.norm_sqr(), self.amp_lower.norm_sqr())
    }
}

/// Symmetric lossless 50/50 splitter.
pub fn beam_splitter(state: ArmState) -> ArmState {
    let i = Complex64::i();
    let s = FRAC_1_SQRT_2;
    ArmState {
        amp_upper: s * (state.amp_upper + i * state.amp_lower),
        amp_lower: s * (i * state.amp_upper + state.amp_lower),
    }
}

/// Multiply each arm by its own phase factor.
pub fn arm_phase(state: ArmState, phase_upper: f64, phase_lower: f64) -> ArmState {
    ArmState {
        amp_upper: state.amp_upper * Complex64::cis(phase_upper),
        amp_lower: state.amp_lower * Complex64::cis(phase_lower),
    }
}

/// Full mirrors M1 and M2. Each arm reflects exactly once, so both pick up
/// the same reflection phase `i`, and the fold sends each beam into the
/// opposite input port of H2. The common phase never shows up in a
/// probability; the port exchange fixes which detector is bright.
pub fn full_mirrors(state: ArmState) -> ArmState {
    let i = Complex64::i();
    ArmState { amp_upper: i * state.amp_lower, amp_lower: i * state.amp_upper }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub h2_present: bool,
    /// Only meaningful when `h2_present`.
    pub h2_insertion_time: f64,
    pub photon_arrival_time: f64,
    pub phase_upper: f64,
    pub phase_lower: f64,
    /// The arms are enclosed and never interact before H2. Always true here.
    pub arms_isolated: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            h2_present: false,
            h2_insertion_time: 0.0,
            photon_arrival_time: 1.0,
            phase_upper: 0.0,
            phase_lower: 0.0,
            arms_isolated: true,
        }
    }
}

impl ExperimentConfig {
    /// H2 inserted at time zero with the given relative phase (upper minus lower).
    pub fn with_h2(relative_phase: f64) -> Self {
        ExperimentConfig { h2_present: true, phase_upper: relative_phase, ..Default::default() }
    }

    pub fn relative_phase(&self) -> f64 {
        self.phase_upper - self.phase_lower
    }

    /// Whether H2 is physically in place when the photon reaches it.
    pub fn h2_in_place_at_arrival(&self) -> bool {
        self.h2_present && self.h2_insertion_time < self.photon_arrival_time
    }
}

/// Detector probabilities for one configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorProbabilities {
    pub p_d1: f64,
    pub p_d2: f64,
}

/// Probabilities plus a seeded Monte Carlo realization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorStats {
    pub p_d1: f64,
    pub p_d2: f64,
    pub clicks_d1: u64,
    pub clicks_d2: u64,
    pub samples: u64,
    pub seed: u64,
}

/// Propagate a photon through the apparatus described by `config`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<DetectorProbabilities> {
    if !(config.photon_arrival_time > 0.0) {
        return Err(Error::InvalidParameter {
            name: "photon_arrival_time",
            reason: format!("must be positive, got {}", config.photon_arrival_time),
        });
    }
    let mut state = beam_splitter(ArmState::input_upper());
    state = full_mirrors(state);
    state = arm_phase(state, config.phase_upper, config.phase_lower);
    // Only the boolean matters: the amplitude never "sees" the insertion time.
    if config.h2_in_place_at_arrival() {
        state = beam_splitter(state);
    }
    let (p_d1, p_d2) = state.probabilities();
    Ok(DetectorProbabilities { p_d1, p_d2 })
}

/// Draw `n` independent detections with P(D1) = `probs.p_d1`.
pub fn sample_clicks(probs: DetectorProbabilities, n: u64, seed: u64) -> Result<DetectorStats> {
    if n == 0 {
        return Err(Error::InvalidParameter { name: "samples", reason: "must be at least 1".into() });
    }
    let p = probs.p_d1.clamp(0.0, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let clicks_d1 = (0..n).filter(|_| rng.gen::<f64>() < p).count() as u64;
    Ok(DetectorStats {
        p_d1: probs.p_d1,
        p_d2: probs.p_d2,
        clicks_d1,
        clicks_d2: n - clicks_d1,
        samples: n,
        seed,
    })
}

/// One row of a relative-phase sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseSweepRow {
    pub phase_rad: f64,
    pub p_d1: f64,
    pub p_d2: f64,
}

/// Sweep the relative arm phase over `[0, 2 pi)` in `steps` equal steps.
pub fn phase_sweep(base: &ExperimentConfig, steps: usize) -> Result<Vec<PhaseSweepRow>> {
    if steps == 0 {
        return Err(Error::InvalidParameter { name: "sweep", reason: "must be at least 1".into() });
    }
    (0..steps)
        .map(|j| {
            let phase = std::f64::consts::TAU * j as f64 / steps as f64;
            let cfg = ExperimentConfig { phase_upper: phase, phase_lower: 0.0, ..*base };
            let p = run_experiment(&cfg)?;
            Ok(PhaseSweepRow { phase_rad: phase, p_d1: p.p_d1, p_d2: p.p_d2 })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use proptest::prelude::*;

    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn splitter_halves_input() {
        let out = beam_splitter(ArmState::input_upper());
        assert!(close(out.amp_upper, c(FRAC_1_SQRT_2, 0.0)));
        assert!(close(out.amp_lower, c(0.0, FRAC_1_SQRT_2)));
        let (a, b) = out.probabilities();
        assert!((a - 0.5).abs() < 1e-15 && (b - 0.5).abs() < 1e-15);
    }

    #[test]
    fn two_splitters_route_to_one_port() {
        let out = beam_splitter(beam_splitter(ArmState::input_upper()));
        assert!(close(out.amp_upper, c(0.0, 0.0)));
        assert!(close(out.amp_lower, c(0.0, 1.0)));
    }

    #[test]
    fn zero_phase_is_identity() {
        let s = ArmState::new(c(0.6, 0.0), c(0.0, 0.8));
        assert_eq!(arm_phase(s, 0.0, 0.0), s);
    }

    #[test]
    fn common_phase_changes_nothing_observable() {
        for rel in [0.0, 0.4, PI / 2.0, PI] {
            let a = run_experiment(&ExperimentConfig::with_h2(rel)).unwrap();
            let cfg = ExperimentConfig { phase_upper: rel + PI, phase_lower: PI, ..ExperimentConfig::with_h2(0.0) };
            let b = run_experiment(&cfg).unwrap();
            assert!((a.p_d1 - b.p_d1).abs() < 1e-12);
        }
    }

    #[test]
    fn experiment_outcomes() {
        let open = run_experiment(&ExperimentConfig::default()).unwrap();
        assert!((open.p_d1 - 0.5).abs() < 1e-12 && (open.p_d2 - 0.5).abs() < 1e-12);

        let closed = run_experiment(&ExperimentConfig::with_h2(0.0)).unwrap();
        assert!((closed.p_d1 - 1.0).abs() < 1e-12);
        assert!(closed.p_d2.abs() < 1e-12);

        let flipped = run_experiment(&ExperimentConfig::with_h2(PI)).unwrap();
        assert!(flipped.p_d1.abs() < 1e-12);
        assert!((flipped.p_d2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mirrors_swap_ports_with_common_phase() {
        let s = ArmState::new(c(0.6, 0.0), c(0.0, 0.8));
        let m = full_mirrors(s);
        assert!(close(m.amp_upper, c(-0.8, 0.0)));
        assert!(close(m.amp_lower, c(0.0, 0.6)));
        assert!((m.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fringe_matches_hand_products() {
        // H1 -> (1, i)/sqrt2; mirrors -> (-1, i)/sqrt2; phase phi on upper;
        // H2 upper = (-e^{i phi} - 1)/2, so p_d1 = cos^2(phi/2).
        for phi in [0.0, PI / 2.0, PI, 3.0 * PI / 2.0] {
            let p = run_experiment(&ExperimentConfig::with_h2(phi)).unwrap();
            let hand = ((-Complex64::cis(phi) - 1.0) / 2.0).norm_sqr();
            assert!((p.p_d1 - hand).abs() < 1e-12, "phi={phi}");
            assert!((p.p_d1 - (phi / 2.0).cos().powi(2)).abs() < 1e-12);
        }
    }

    #[test]
    fn late_insertion_matches_early() {
        let early = run_experiment(&ExperimentConfig::with_h2(0.3)).unwrap();
        let late = run_experiment(&ExperimentConfig {
            h2_insertion_time: 0.999,
            ..ExperimentConfig::with_h2(0.3)
        })
        .unwrap();
        assert_eq!(early, late);
        let too_late = run_experiment(&ExperimentConfig {
            h2_insertion_time: 1.0,
            ..ExperimentConfig::with_h2(0.3)
        })
        .unwrap();
        assert!((too_late.p_d1 - 0.5).abs() < 1e-12 && (too_late.p_d2 - 0.5).abs() < 1e-12);
    }

    #[test]
    fn arrival_time_must_be_positive() {
        let cfg = ExperimentConfig { photon_arrival_time: 0.0, ..Default::default() };
        assert!(run_experiment(&cfg).is_err());
    }

    #[test]
    fn degenerate_sampling() {
        let s = sample_clicks(DetectorProbabilities { p_d1: 1.0, p_d2: 0.0 }, 1000, 99).unwrap();
        assert_eq!((s.clicks_d1, s.clicks_d2), (1000, 0));
        let s = sample_clicks(DetectorProbabilities { p_d1: 0.0, p_d2: 1.0 }, 1000, 99).unwrap();
        assert_eq!((s.clicks_d1, s.clicks_d2), (0, 1000));
    }

    #[test]
    fn sampling_is_reproducible() {
        let p = DetectorProbabilities { p_d1: 0.5, p_d2: 0.5 };
        assert_eq!(sample_clicks(p, 5000, 7).unwrap(), sample_clicks(p, 5000, 7).unwrap());
        assert_ne!(sample_clicks(p, 5000, 7).unwrap(), sample_clicks(p, 5000, 8).unwrap());
        assert!(sample_clicks(p, 0, 7).is_err());
    }

    #[test]
    fn sweep_covers_full_turn() {
        let rows = phase_sweep(&ExperimentConfig::with_h2(0.0), 4).unwrap();
        let phases: Vec<f64> = rows.iter().map(|r| r.phase_rad).collect();
        assert_eq!(phases, vec![0.0, PI / 2.0, PI, 3.0 * PI / 2.0]);
        assert!(phase_sweep(&ExperimentConfig::default(), 0).is_err());
    }

    proptest! {
        #[test]
        fn elements_are_unitary(
            theta in 0.0..PI, chi in -PI..PI, g in -PI..PI, pu in -10.0..10.0f64, pl in -10.0..10.0f64,
        ) {
            let s = ArmState::new(
                Complex64::from_polar(theta.cos(), g),
                Complex64::from_polar(theta.sin(), g + chi),
            );
            prop_assert!((beam_splitter(s).norm_sqr() - 1.0).abs() < 1e-12);
            prop_assert!((arm_phase(s, pu, pl).norm_sqr() - 1.0).abs() < 1e-12);
            prop_assert!((full_mirrors(s).norm_sqr() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn without_h2_phase_is_irrelevant(pu in -10.0..10.0f64, pl in -10.0..10.0f64) {
            let p = run_experiment(&ExperimentConfig { phase_upper: pu, phase_lower: pl, ..Default::default() }).unwrap();
            prop_assert!((p.p_d1 - 0.5).abs() < 1e-12);
            prop_assert!((p.p_d2 - 0.5).abs() < 1e-12);
        }

        #[test]
        fn probabilities_sum_to_one(rel in -10.0..10.0f64, h2 in any::<bool>()) {
            let cfg = ExperimentConfig { h2_present: h2, ..ExperimentConfig::with_h2(rel) };
            let p = run_experiment(&cfg).unwrap();
            prop_assert!((p.p_d1 + p.p_d2 - 1.0).abs() < 1e-12);
        }
    }
}
