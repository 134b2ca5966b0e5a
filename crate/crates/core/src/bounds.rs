//! Relativistic localization floor and the hydrogen comparison.
//!
//! A packet of width `w` spreads asymptotically at `hbar / (m w)`. Requiring
//! that speed to stay below `c` gives `w > hbar / (m c)`, the reduced Compton
//! wavelength.

use serde::{Deserialize, Serialize};

use crate::constants::{Particle, PhysicalConstants};
use crate::error::{Error, Result};

/// `hbar / (m c)`.
pub fn compton_wavelength(particle: &Particle, k: &PhysicalConstants) -> f64 {
    k.hbar / (particle.mass * k.c)
}

/// Smallest size a body of mass `mass` can collapse to. Same formula as the
/// Compton wavelength; it only vanishes as the mass goes to infinity.
pub fn black_hole_floor(mass: f64, k: &PhysicalConstants) -> Result<f64> {
    if !(mass > 0.0) {
        return Err(Error::InvalidMass { name: "black hole".into(), mass });
    }
    Ok(k.hbar / (mass * k.c))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub particle: Particle,
    pub compton: f64,
    pub requested_width: f64,
    pub admissible: bool,
    pub implied_asymptotic_speed: f64,
    /// `implied_asymptotic_speed / c`.
    pub speed_over_c: f64,
}

/// Is a packet of this width compatible with the light-speed limit on its spreading?
pub fn check_localization(particle: &Particle, width: f64, k: &PhysicalConstants) -> Result<BoundReport> {
    if !(width > 0.0 && width.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "width",
            reason: format!("must be positive, got {width}"),
        });
    }
    let compton = compton_wavelength(particle, k);
    // hbar / (m w) written as c * compton / w so the boundary lands exactly on c
    let speed = k.c * (compton / width);
    Ok(BoundReport {
        particle: particle.clone(),
        compton,
        requested_width: width,
        admissible: width > compton,
        implied_asymptotic_speed: speed,
        speed_over_c: speed / k.c,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HydrogenReport {
    pub n: u32,
    pub bohr_radius_n: f64,
    pub compton_electron: f64,
    pub alpha: f64,
    pub forms: bool,
}

/// Compare the n-th Bohr radius of hydrogen with the electron's Compton
/// wavelength. The level can form only if `alpha / n^2 < 1`.
pub fn hydrogen_report(n: u32, electron: &Particle, k: &PhysicalConstants) -> Result<HydrogenReport> {
    if n < 1 {
        return Err(Error::InvalidParameter { name: "n", reason: "principal quantum number starts at 1".into() });
    }
    let n2 = f64::from(n) * f64::from(n);
    let coulomb = 4.0 * std::f64::consts::PI * k.epsilon0;
    let alpha = k.fine_structure();
    let bohr_radius_n = n2 * k.hbar * k.hbar * coulomb / (electron.mass * k.e_charge * k.e_charge);
    Ok(HydrogenReport {
        n,
        bohr_radius_n,
        compton_electron: compton_wavelength(electron, k),
        alpha,
        forms: alpha / n2 < 1.0,
    })
}
