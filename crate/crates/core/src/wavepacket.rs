//! Free dispersion of a minimum-uncertainty Gaussian packet.
//!
//! Three independent routes give the width at time `t`:
//!
//! * the closed form `w(t) = w0 sqrt(1 + (hbar dt / (m w0^2))^2)`;
//! * spectral synthesis of `psi(x, t) = integral a(k) exp(i(k x - omega t)) dk`
//!   with `a(k) = exp(-(k - k0)^2 / (2 dk^2))` and `omega = hbar k^2 / 2m`;
//! * direct quadrature of the free propagator against the initial packet.
//!
//! # Width convention
//!
//! `width0` is the *amplitude* width parameter `a` in
//! `psi ~ exp(-x^2 / (2 a^2))`, and the momentum width is `dk = 1 / a`, so
//! `m * a * dv = hbar` holds exactly. The rms of `|psi|^2` is `a / sqrt 2`;
//! [`measured_width`] multiplies the sampled rms by `sqrt 2` so all three
//! routes report the same quantity.

use std::f64::consts::{FRAC_PI_4, PI, SQRT_2};

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::constants::{Particle, UnitSystem};
use crate::error::{Error, Result};

/// Default grid size for automatically sized grids.
pub const DEFAULT_GRID_POINTS: usize = 4096;

/// Tolerance used by [`measured_width`] to decide a sample set is normalized.
pub const NORM_TOLERANCE: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianPacket {
    pub particle: Particle,
    /// Amplitude width parameter at `t0`.
    pub width0: f64,
    pub center_x: f64,
    pub center_k: f64,
    pub t0: f64,
    pub units: UnitSystem,
}

impl GaussianPacket {
    /// A packet at rest at the origin, launched at `t0 = 0`.
    pub fn at_rest(particle: Particle, width0: f64, units: UnitSystem) -> Result<Self> {
        if !(width0 > 0.0 && width0.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "width0",
                reason: format!("must be positive and finite, got {width0}"),
            });
        }
        Particle::new(particle.name.clone(), particle.mass)?;
        Ok(GaussianPacket { particle, width0, center_x: 0.0, center_k: 0.0, t0: 0.0, units })
    }

    /// Natural-units packet with the given dimensionless mass.
    pub fn natural(mass: f64, width0: f64) -> Result<Self> {
        Self::at_rest(Particle::new("natural", mass)?, width0, UnitSystem::Natural)
    }

    pub fn with_center(mut self, center_x: f64, center_k: f64) -> Self {
        self.center_x = center_x;
        self.center_k = center_k;
        self
    }

    pub fn with_t0(mut self, t0: f64) -> Self {
        self.t0 = t0;
        self
    }

    pub fn hbar(&self) -> f64 {
        self.units.constants().hbar
    }

    pub fn mass(&self) -> f64 {
        self.particle.mass
    }

    /// Momentum-space width, `1 / width0`.
    pub fn delta_k(&self) -> f64 {
        1.0 / self.width0
    }

    /// Initial velocity uncertainty `hbar / (m width0)`.
    pub fn velocity_spread(&self) -> f64 {
        self.hbar() / (self.mass() * self.width0)
    }

    pub fn group_velocity(&self) -> f64 {
        self.hbar() * self.center_k / self.mass()
    }

    /// Expected packet center at time `t`.
    pub fn center_at(&self, t: f64) -> f64 {
        self.center_x + self.group_velocity() * (t - self.t0)
    }

    /// Dimensionless spreading parameter `hbar dt / (m width0^2)`.
    pub fn spreading_parameter(&self, dt: f64) -> f64 {
        self.hbar() * dt / (self.mass() * self.width0 * self.width0)
    }

    /// Normalized initial amplitude at `x`.
    pub fn initial_amplitude(&self, x: f64) -> Complex64 {
        let a = self.width0;
        let u = x - self.center_x;
        let envelope = (PI * a * a).powf(-0.25) * (-u * u / (2.0 * a * a)).exp();
        Complex64::from_polar(envelope, self.center_k * u)
    }

    fn elapsed(&self, t: f64) -> Result<f64> {
        if t < self.t0 || t.is_nan() {
            return Err(Error::BackwardEvolution { t, t0: self.t0 });
        }
        Ok(t - self.t0)
    }
}

/// Width spread caused by the velocity uncertainty alone: `hbar dt / (m w0)`.
pub fn velocity_spread_width(packet: &GaussianPacket, t: f64) -> Result<f64> {
    let dt = packet.elapsed(t)?;
    Ok(packet.velocity_spread() * dt)
}

/// Closed-form width `sqrt(w0^2 + dx_v^2)`.
pub fn analytic_width(packet: &GaussianPacket, t: f64) -> Result<f64> {
    let dt = packet.elapsed(t)?;
    Ok(packet.width0 * packet.spreading_parameter(dt).hypot(1.0))
}

/// `w(t) - w0`, evaluated without cancellation for tiny spreading parameters.
fn width_growth(packet: &GaussianPacket, dt: f64) -> f64 {
    let tau = packet.spreading_parameter(dt);
    packet.width0 * tau * tau / (tau.hypot(1.0) + 1.0)
}

/// Relative growth `w(t)/w0 - 1`, accurate even when it is far below machine epsilon.
pub fn relative_growth(packet: &GaussianPacket, t: f64) -> Result<f64> {
    let dt = packet.elapsed(t)?;
    Ok(width_growth(packet, dt) / packet.width0)
}

/// Mean dispersion speed `(w(t0 + dt) - w0) / dt`.
pub fn dispersion_speed(packet: &GaussianPacket, dt: f64) -> Result<f64> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "dt",
            reason: format!("must be positive, got {dt}"),
        });
    }
    Ok(width_growth(packet, dt) / dt)
}

/// Large-time limit of [`dispersion_speed`]: `hbar / (m w0)`.
pub fn asymptotic_dispersion_speed(packet: &GaussianPacket) -> f64 {
    packet.velocity_spread()
}

/// The unnormalized momentum-space profile `a(k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumAmplitude {
    pub center_k: f64,
    pub delta_k: f64,
}

impl MomentumAmplitude {
    pub fn eval(&self, k: f64) -> f64 {
        let q = (k - self.center_k) / self.delta_k;
        (-0.5 * q * q).exp()
    }

    /// Sampled on the grid's FFT wavenumbers (FFT ordering).
    pub fn sample(&self, grid: &GridSpec) -> Vec<f64> {
        grid.wavenumbers().into_iter().map(|k| self.eval(k)).collect()
    }
}

pub fn build_momentum_packet(packet: &GaussianPacket) -> MomentumAmplitude {
    MomentumAmplitude { center_k: packet.center_k, delta_k: packet.delta_k() }
}

/// Uniform periodic grid with `n_points` cells on `[x_min, x_max)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
}

impl GridSpec {
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if !(x_max > x_min) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::InvalidParameter {
                name: "grid",
                reason: format!("need x_max > x_min, got [{x_min}, {x_max}]"),
            });
        }
        if n_points < 16 || !n_points.is_power_of_two() {
            return Err(Error::InvalidParameter {
                name: "n_points",
                reason: format!("must be a power of two >= 16, got {n_points}"),
            });
        }
        Ok(GridSpec { x_min, x_max, n_points })
    }

    pub fn centered(center: f64, half_extent: f64, n_points: usize) -> Result<Self> {
        Self::new(center - half_extent, center + half_extent, n_points)
    }

    /// Grid sized for evolution up to `t_max`: half-extent of eight final
    /// widths around the midpoint of the packet's path.
    pub fn for_packet(packet: &GaussianPacket, t_max: f64, n_points: usize) -> Result<Self> {
        let w = analytic_width(packet, t_max)?;
        let start = packet.center_x;
        let end = packet.center_at(t_max);
        let half = 8.0 * w + 0.5 * (end - start).abs();
        Self::centered(0.5 * (start + end), half, n_points)
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.n_points as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x_min + j as f64 * self.dx()
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| self.x(j)).collect()
    }

    pub fn half_extent(&self) -> f64 {
        0.5 * (self.x_max - self.x_min)
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.x_max + self.x_min)
    }

    /// Conjugate wavenumbers in FFT order.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let n = self.n_points;
        let dk = 2.0 * PI / (n as f64 * self.dx());
        (0..n)
            .map(|j| {
                let m = if j < n / 2 { j as isize } else { j as isize - n as isize };
                m as f64 * dk
            })
            .collect()
    }

    /// Grid rule: the packet (eight widths on each side of its center)
    /// fits, `dx <= w0 / 16`, and the momentum profile sits well below Nyquist.
    fn check_packet(&self, packet: &GaussianPacket, t: f64) -> Result<()> {
        let w = analytic_width(packet, t)?;
        let offset = (packet.center_at(t) - self.center()).abs();
        let required = 8.0 * w + offset;
        // Slack absorbs rounding when the grid was built by `for_packet`.
        if required > self.half_extent() * (1.0 + 1e-12) {
            return Err(Error::GridTooSmall { required, available: self.half_extent() });
        }
        let dx = self.dx();
        if dx > packet.width0 / 16.0 * (1.0 + 1e-12) {
            return Err(Error::GridTooCoarse {
                reason: format!("dx = {dx:e} exceeds width0/16 = {:e}", packet.width0 / 16.0),
            });
        }
        let k_nyquist = PI / dx;
        let k_reach = packet.center_k.abs() + 8.0 * packet.delta_k();
        if k_reach > k_nyquist {
            return Err(Error::GridTooCoarse {
                reason: format!("momentum profile reaches {k_reach:e}, Nyquist is {k_nyquist:e}"),
            });
        }
        Ok(())
    }
}

/// Complex samples of a wave function on a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledWaveFunction {
    pub grid: GridSpec,
    pub amplitudes: Vec<Complex64>,
    pub time: f64,
}

impl SampledWaveFunction {
    /// Sample the initial packet directly.
    pub fn initial(packet: &GaussianPacket, grid: GridSpec) -> Self {
        let amplitudes = (0..grid.n_points).map(|j| packet.initial_amplitude(grid.x(j))).collect();
        SampledWaveFunction { grid, amplitudes, time: packet.t0 }
    }

    /// `sum |psi_j|^2 dx`, accumulated in index order.
    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.grid.dx()
    }

    pub fn density(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Mean position of `|psi|^2`.
    pub fn mean_position(&self) -> f64 {
        let dx = self.grid.dx();
        let norm = self.norm();
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(j, a)| self.grid.x(j) * a.norm_sqr())
            .sum::<f64>()
            * dx
            / norm
    }

    /// Largest pointwise amplitude difference against another sample set.
    pub fn max_abs_diff(&self, other: &SampledWaveFunction) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Amplitude width parameter of sampled data: `sqrt 2` times the rms of `|psi|^2`.
pub fn measured_width(wf: &SampledWaveFunction) -> Result<f64> {
    let norm = wf.norm();
    if !((norm - 1.0).abs() <= NORM_TOLERANCE) {
        return Err(Error::NotNormalized { norm });
    }
    let dx = wf.grid.dx();
    let mean = wf.mean_position();
    let var = wf
        .amplitudes
        .iter()
        .enumerate()
        .map(|(j, a)| {
            let u = wf.grid.x(j) - mean;
            u * u * a.norm_sqr()
        })
        .sum::<f64>()
        * dx
        / norm;
    Ok(SQRT_2 * var.sqrt())
}

/// Spectral synthesis of the evolved packet on `grid`.
///
/// The normalization constant is fixed from the momentum profile alone, so
/// the norm of the result is an honest check of the evolution rather than
/// something imposed after the fact.
pub fn evolve_spectral(packet: &GaussianPacket, t: f64, grid: &GridSpec) -> Result<SampledWaveFunction> {
    let dt = packet.elapsed(t)?;
    grid.check_packet(packet, t)?;

    let n = grid.n_points;
    let hbar = packet.hbar();
    let mass = packet.mass();
    let profile = build_momentum_packet(packet);
    let ks = grid.wavenumbers();
    let shift = grid.x_min - packet.center_x;

    let mut spectrum: Vec<Complex64> = ks
        .iter()
        .map(|&k| {
            let omega = hbar * k * k / (2.0 * mass);
            Complex64::from_polar(profile.eval(k), k * shift - omega * dt)
        })
        .collect();

    // Parseval: sum_j |psi_j|^2 = n * sum_k |c_k|^2 for an unscaled inverse FFT.
    let power: f64 = ks.iter().map(|&k| profile.eval(k).powi(2)).sum();
    let scale = 1.0 / (n as f64 * power * grid.dx()).sqrt();

    FftPlanner::new().plan_fft_inverse(n).process(&mut spectrum);
    spectrum.iter_mut().for_each(|a| *a *= scale);

    Ok(SampledWaveFunction { grid: *grid, amplitudes: spectrum, time: t })
}

/// Free propagator quadrature
/// `psi(x, t) = integral K(x - x', dt) psi(x', t0) dx'`, midpoint rule on the grid,
/// with `K(d) = sqrt(m / (2 pi i hbar dt)) exp(i m d^2 / (2 hbar dt))`.
///
/// On a uniform grid the kernel only depends on `j - k`, so it is tabulated
/// once. Each output point is an independent sequential sum, which keeps the
/// result bit-identical for any thread count.
pub fn evolve_kernel(packet: &GaussianPacket, t: f64, grid: &GridSpec) -> Result<SampledWaveFunction> {
    let dt = packet.elapsed(t)?;
    if dt <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "t",
            reason: "kernel evolution needs t > t0".into(),
        });
    }
    grid.check_packet(packet, t)?;
    let hbar = packet.hbar();
    let mass = packet.mass();
    let dx = grid.dx();
    let scale = (hbar * dt / mass).sqrt();
    if scale < 3.0 * dx {
        return Err(Error::KernelUnresolved { scale, min: 3.0 * dx });
    }

    let n = grid.n_points;
    let initial = SampledWaveFunction::initial(packet, *grid);
    let pref = Complex64::from_polar((mass / (2.0 * PI * hbar * dt)).sqrt() * dx, -FRAC_PI_4);
    let chirp = mass * dx * dx / (2.0 * hbar * dt);
    // table[d + n - 1] = dx * K(d dx), d in -(n-1)..=(n-1)
    let table: Vec<Complex64> = (0..2 * n - 1)
        .map(|i| {
            let d = i as f64 - (n - 1) as f64;
            pref * Complex64::cis(chirp * d * d)
        })
        .collect();

    let psi0 = &initial.amplitudes;
    let amplitudes: Vec<Complex64> = (0..n)
        .into_par_iter()
        .map(|j| {
            // row j uses table[j - k + n - 1] for k = 0..n, i.e. a reversed window
            let window = &table[j..j + n];
            window.iter().rev().zip(psi0).map(|(k, p)| k * p).sum()
        })
        .collect();

    Ok(SampledWaveFunction { grid: *grid, amplitudes, time: t })
}

/// Which numerical routes to evaluate alongside the closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Routes {
    pub spectral: bool,
    pub kernel: bool,
}

impl Default for Routes {
    fn default() -> Self {
        Routes { spectral: true, kernel: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WidthReport {
    pub t: f64,
    pub width_analytic: f64,
    pub width_spectral: Option<f64>,
    pub width_kernel: Option<f64>,
    /// Mean speed since `t0`; zero at `t0` itself.
    pub v_disp: f64,
    pub v_disp_asymptotic: f64,
}

pub fn width_report(packet: &GaussianPacket, t: f64, grid: &GridSpec, routes: Routes) -> Result<WidthReport> {
    let dt = packet.elapsed(t)?;
    let width_spectral = if routes.spectral {
        Some(measured_width(&evolve_spectral(packet, t, grid)?)?)
    } else {
        None
    };
    let width_kernel = if routes.kernel {
        let wf = if dt > 0.0 {
            evolve_kernel(packet, t, grid)?
        } else {
            SampledWaveFunction::initial(packet, *grid)
        };
        Some(measured_width(&wf)?)
    } else {
        None
    };
    Ok(WidthReport {
        t,
        width_analytic: analytic_width(packet, t)?,
        width_spectral,
        width_kernel,
        v_disp: if dt > 0.0 { dispersion_speed(packet, dt)? } else { 0.0 },
        v_disp_asymptotic: asymptotic_dispersion_speed(packet),
    })
}

fn check_samples(packet: &GaussianPacket, t_samples: &[f64]) -> Result<()> {
    let first = *t_samples.first().ok_or(Error::InvalidParameter {
        name: "t_samples",
        reason: "empty sample list".into(),
    })?;
    if first < packet.t0 {
        return Err(Error::BackwardEvolution { t: first, t0: packet.t0 });
    }
    if t_samples.windows(2).any(|w| !(w[1] >= w[0])) {
        return Err(Error::InvalidParameter { name: "t_samples", reason: "must be ascending".into() });
    }
    Ok(())
}

/// Width reports at every sample time on one shared grid.
pub fn dispersion_series(
    packet: &GaussianPacket,
    t_samples: &[f64],
    grid: &GridSpec,
    routes: Routes,
) -> Result<Vec<WidthReport>> {
    check_samples(packet, t_samples)?;
    t_samples.iter().map(|&t| width_report(packet, t, grid, routes)).collect()
}

/// One straight least-action ray `x0 + v t + j dx_v(t) / rays`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RayPoint {
    pub ray_index: i64,
    pub x: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpreadRow {
    pub t: f64,
    pub width_analytic: f64,
    pub width_spectral: f64,
    pub rays: Vec<RayPoint>,
}

/// Ray positions at time `t`, indices `-rays..=rays`.
pub fn ray_positions(packet: &GaussianPacket, t: f64, rays: usize) -> Result<Vec<RayPoint>> {
    let spread = velocity_spread_width(packet, t)?;
    let center = packet.center_at(t);
    let r = rays as i64;
    Ok((-r..=r)
        .map(|j| {
            let offset = if rays == 0 { 0.0 } else { j as f64 * spread / rays as f64 };
            RayPoint { ray_index: j, x: center + offset }
        })
        .collect())
}

/// Width and ray table for plotting a spreading packet with its fan of
/// straight classical paths.
pub fn emit_spread_series(packet: &GaussianPacket, t_samples: &[f64], rays: usize) -> Result<Vec<SpreadRow>> {
    check_samples(packet, t_samples)?;
    let t_max = *t_samples.last().expect("checked non-empty");
    let mut grid = GridSpec::for_packet(packet, t_max, DEFAULT_GRID_POINTS)?;
    // keep dx <= w0/16 when the packet spreads a lot
    while grid.dx() > packet.width0 / 16.0 {
        grid = GridSpec::centered(grid.center(), grid.half_extent(), grid.n_points * 2)?;
    }
    t_samples
        .iter()
        .map(|&t| {
            Ok(SpreadRow {
                t,
                width_analytic: analytic_width(packet, t)?,
                width_spectral: measured_width(&evolve_spectral(packet, t, &grid)?)?,
                rays: ray_positions(packet, t, rays)?,
            })
        })
        .collect()
}
