//! Numerical companion to the delayed-choice interferometer and the
//! Compton-wavelength localization argument.
//!
//! * [`interferometer`]: two-arm Mach–Zehnder with a late-inserted output splitter.
//! * [`wavepacket`]: Gaussian packet spreading by closed form, spectral
//!   synthesis and propagator quadrature.
//! * [`bounds`]: the light-speed floor on packet width and the hydrogen check.
//! * [`boxstates`]: momentum levels and microstate counting in a box.
//! * [`cli`]: the `qwave` command-line front end.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod boxstates;
pub mod cli;
pub mod constants;
pub mod error;
pub mod interferometer;
pub mod wavepacket;

pub use constants::{lookup_particle, Particle, ParticleRegistry, PhysicalConstants, UnitSystem};
pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    pub mod intro {}
    #[doc = include_str!("../../../book/src/units.md")]
    pub mod units {}
    #[doc = include_str!("../../../book/src/interferometer.md")]
    pub mod interferometer {}
    #[doc = include_str!("../../../book/src/wavepacket.md")]
    pub mod wavepacket {}
    #[doc = include_str!("../../../book/src/bounds.md")]
    pub mod bounds {}
    #[doc = include_str!("../../../book/src/boxstates.md")]
    pub mod boxstates {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
}
