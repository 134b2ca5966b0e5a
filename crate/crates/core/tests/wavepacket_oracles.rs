//! Cross-checks between the three dispersion routes and a few calculus facts
//! about the closed-form width.

use std::f64::consts::SQRT_2;

use proptest::prelude::*;
use qwave::wavepacket::{
    analytic_width, evolve_kernel, evolve_spectral, measured_width, GaussianPacket, GridSpec,
};

/// Golden-section minimizer, used as an independent check of the optimal initial width.
fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    while (b - a).abs() > tol {
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - r * (b - a);
        d = a + r * (b - a);
    }
    0.5 * (a + b)
}

#[test]
fn optimal_initial_width() {
    for (m, t) in [(1.0, 1.0), (2.0, 3.0), (0.5, 0.1)] {
        let f = |w0: f64| analytic_width(&GaussianPacket::natural(m, w0).unwrap(), t).unwrap();
        let found = golden_section(f, 1e-3, 10.0, 1e-10);
        let expected = (t / m).sqrt();
        assert!((found - expected).abs() < 1e-6, "m={m} t={t}: {found} vs {expected}");
    }
}

#[test]
fn width_depends_only_on_spreading_parameter() {
    // hbar t / (m w0^2) = 2 in both cases
    let a = GaussianPacket::natural(1.0, 1.0).unwrap();
    let b = GaussianPacket::natural(0.5, 3.0).unwrap();
    let ra = analytic_width(&a, 2.0).unwrap() / a.width0;
    let rb = analytic_width(&b, 9.0).unwrap() / b.width0;
    assert!((ra - rb).abs() < 1e-12);
    assert!((ra - 5f64.sqrt()).abs() < 1e-12);
}

#[test]
fn evolved_density_stays_gaussian() {
    let p = GaussianPacket::natural(1.0, 1.0).unwrap();
    let grid = GridSpec::for_packet(&p, 3.0, 1 << 12).unwrap();
    for t in [0.5, 1.0, 3.0] {
        let wf = evolve_spectral(&p, t, &grid).unwrap();
        let w = measured_width(&wf).unwrap();
        let mu = wf.mean_position();
        let density = wf.density();
        let peak = density.iter().cloned().fold(0.0, f64::max);
        let norm = 1.0 / (std::f64::consts::PI.sqrt() * w);
        let worst = density
            .iter()
            .enumerate()
            .map(|(j, &d)| {
                let u = grid.x(j) - mu;
                (d - norm * (-u * u / (w * w)).exp()).abs()
            })
            .fold(0.0, f64::max);
        assert!(worst <= 1e-6 * peak, "t={t}: residual {worst:e} vs peak {peak:e}");
    }
}

#[test]
fn kernel_agrees_on_moving_packet() {
    let p = GaussianPacket::natural(1.0, 1.0).unwrap().with_center(-2.0, 1.5);
    let grid = GridSpec::for_packet(&p, 2.0, 1 << 12).unwrap();
    let s = evolve_spectral(&p, 2.0, &grid).unwrap();
    let k = evolve_kernel(&p, 2.0, &grid).unwrap();
    assert!(s.max_abs_diff(&k) < 1e-4);
    assert!((s.mean_position() - 1.0).abs() < 1e-6);
}

#[test]
fn nonzero_start_time() {
    let p = GaussianPacket::natural(1.0, 1.0).unwrap().with_t0(5.0);
    let grid = GridSpec::for_packet(&p, 6.0, 1 << 12).unwrap();
    let w = measured_width(&evolve_spectral(&p, 6.0, &grid).unwrap()).unwrap();
    assert!((w / SQRT_2 - 1.0).abs() < 1e-3);
    assert!(evolve_spectral(&p, 4.0, &grid).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn three_routes_agree(m in 0.3..3.0f64, w0 in 0.5..2.0f64, tau in 0.2..3.0f64) {
        let p = GaussianPacket::natural(m, w0).unwrap();
        let t = tau * m * w0 * w0;
        let grid = GridSpec::for_packet(&p, t, 1 << 12).unwrap();
        let exact = analytic_width(&p, t).unwrap();
        let s = evolve_spectral(&p, t, &grid).unwrap();
        let k = evolve_kernel(&p, t, &grid).unwrap();
        prop_assert!((measured_width(&s).unwrap() / exact - 1.0).abs() <= 1e-3);
        prop_assert!((measured_width(&k).unwrap() / exact - 1.0).abs() <= 5e-3);
        prop_assert!((s.norm() - 1.0).abs() <= 1e-9);
        prop_assert!((k.norm() - 1.0).abs() <= 1e-6);
    }

    #[test]
    fn scaling_law(m in 0.1..10.0f64, w0 in 0.1..10.0f64, tau in 0.0..20.0f64, s in 0.2..5.0f64) {
        // rescale w0 by s and t by s^2: the ratio w/w0 must not move
        let a = GaussianPacket::natural(m, w0).unwrap();
        let b = GaussianPacket::natural(m, w0 * s).unwrap();
        let t = tau * m * w0 * w0;
        let ra = analytic_width(&a, t).unwrap() / a.width0;
        let rb = analytic_width(&b, t * s * s).unwrap() / b.width0;
        prop_assert!((ra - rb).abs() <= 1e-12 * ra);
    }
}
