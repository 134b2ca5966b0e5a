//! Translational microstates of a particle in a cubical box.
//!
//! Standing waves give one momentum level per `h / L` on each axis,
//! `p_n = n h / L` for `n >= 1`. Counting lattice points in a momentum region
//! and dividing the region's phase-space volume by `h^3` must agree in the
//! continuum limit.

use serde::{Deserialize, Serialize};

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};

/// Default cap on lattice points visited by [`count_states_lattice`].
pub const DEFAULT_ENUMERATION_CAP: u64 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxSpec {
    pub side: f64,
}

impl BoxSpec {
    pub fn new(side: f64) -> Result<Self> {
        if !(side > 0.0 && side.is_finite()) {
            return Err(Error::InvalidParameter { name: "side", reason: format!("must be positive, got {side}") });
        }
        Ok(BoxSpec { side })
    }

    pub fn volume(&self) -> f64 {
        self.side.powi(3)
    }
}

/// Axis-aligned momentum box `[p_lo, p_hi]` per axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentumRegion {
    pub p_lo: [f64; 3],
    pub p_hi: [f64; 3],
}

impl MomentumRegion {
    pub fn new(p_lo: [f64; 3], p_hi: [f64; 3]) -> Result<Self> {
        for axis in 0..3 {
            if !(p_hi[axis] >= p_lo[axis]) {
                return Err(Error::InvalidParameter {
                    name: "region",
                    reason: format!("axis {axis}: p_hi {} < p_lo {}", p_hi[axis], p_lo[axis]),
                });
            }
        }
        Ok(MomentumRegion { p_lo, p_hi })
    }

    /// Region given in units of the level spacing `h / L`.
    pub fn in_cells(lo: [f64; 3], hi: [f64; 3], box_: &BoxSpec, k: &PhysicalConstants) -> Result<Self> {
        let cell = min_momentum_uncertainty(box_, k);
        Self::new(lo.map(|v| v * cell), hi.map(|v| v * cell))
    }

    pub fn volume(&self) -> f64 {
        (0..3).map(|a| self.p_hi[a] - self.p_lo[a]).product()
    }
}

/// `n h / L`.
pub fn momentum_level(n: u64, box_: &BoxSpec, k: &PhysicalConstants) -> Result<f64> {
    if n < 1 {
        return Err(Error::InvalidParameter { name: "n", reason: "levels start at n = 1".into() });
    }
    Ok(n as f64 * k.h / box_.side)
}

/// Level spacing `h / L`, the smallest resolvable momentum difference.
pub fn min_momentum_uncertainty(box_: &BoxSpec, k: &PhysicalConstants) -> f64 {
    k.h / box_.side
}

/// Phase-space volume `L^3 d^3p` in units of `h^3`.
pub fn count_states_continuum(box_: &BoxSpec, region: &MomentumRegion, k: &PhysicalConstants) -> f64 {
    // per-axis ratios keep L^3 and h^3 from underflowing in SI
    let cell = min_momentum_uncertainty(box_, k);
    (0..3).map(|a| (region.p_hi[a] - region.p_lo[a]) / cell).product()
}

/// Relative snap applied to level indices so that endpoints that sit on a
/// level (up to rounding) count as inside the closed interval.
const LEVEL_SNAP: f64 = 1e-9;

/// Levels `n >= 1` with `n h / L` inside `[lo, hi]`, as an inclusive index range.
fn axis_levels(lo: f64, hi: f64, cell: f64) -> Option<(u64, u64)> {
    let lo_idx = lo / cell;
    let hi_idx = hi / cell;
    let snap = |x: f64| {
        let r = x.round();
        if (x - r).abs() <= LEVEL_SNAP * r.abs().max(1.0) { r } else { x }
    };
    let first = snap(lo_idx).ceil().max(1.0);
    let last = snap(hi_idx).floor();
    if last < first {
        return None;
    }
    Some((first as u64, last as u64))
}

/// Count lattice states `(n1, n2, n3)`, `n_i >= 1`, with every `n_i h / L`
/// inside the region. The count factorizes over axes, so each axis range is
/// enumerated level by level and the totals multiplied.
pub fn count_states_lattice(
    box_: &BoxSpec,
    region: &MomentumRegion,
    k: &PhysicalConstants,
    cap: u64,
) -> Result<u64> {
    let cell = min_momentum_uncertainty(box_, k);
    let mut total: u128 = 1;
    for axis in 0..3 {
        let lo = region.p_lo[axis];
        let hi = region.p_hi[axis];
        let per_axis = match axis_levels(lo, hi, cell) {
            None => return Ok(0),
            Some((first, last)) => {
                let span = u128::from(last - first + 1);
                if span > u128::from(cap) {
                    return Err(Error::EnumerationCap { count: span, cap });
                }
                (first..=last).filter(|&n| level_inside(n, lo, hi, cell)).count() as u128
            }
        };
        total *= per_axis;
        if total > u128::from(cap) {
            return Err(Error::EnumerationCap { count: total, cap });
        }
    }
    Ok(total as u64)
}

fn level_inside(n: u64, lo: f64, hi: f64, cell: f64) -> bool {
    let idx = n as f64;
    let tol = LEVEL_SNAP * idx;
    idx >= lo / cell - tol && idx <= hi / cell + tol
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxCount {
    pub continuum: f64,
    pub lattice: u64,
    pub ratio: f64,
}

pub fn box_count(box_: &BoxSpec, region: &MomentumRegion, k: &PhysicalConstants) -> Result<BoxCount> {
    let continuum = count_states_continuum(box_, region, k);
    let lattice = count_states_lattice(box_, region, k, DEFAULT_ENUMERATION_CAP)?;
    Ok(BoxCount { continuum, lattice, ratio: lattice as f64 / continuum })
}
