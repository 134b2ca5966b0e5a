//! Physical constants and the particle registry.
//!
//! SI values are CODATA 2018. The natural set fixes `hbar = c = 1` so that
//! closed-form identities can be checked without unit noise.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which constant set a computation runs in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UnitSystem {
    #[default]
    Si,
    Natural,
}

impl UnitSystem {
    pub fn constants(self) -> PhysicalConstants {
        match self {
            UnitSystem::Si => PhysicalConstants::CODATA_2018,
            UnitSystem::Natural => PhysicalConstants::NATURAL,
        }
    }
}

impl std::str::FromStr for UnitSystem {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "si" => Ok(UnitSystem::Si),
            "natural" => Ok(UnitSystem::Natural),
            other => Err(format!("unknown unit system `{other}` (expected si|natural)")),
        }
    }
}

/// A complete, self-consistent set of constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhysicalConstants {
    /// Identifier embedded in every emitted document.
    pub id: &'static str,
    pub hbar: f64,
    pub h: f64,
    pub c: f64,
    pub e_charge: f64,
    pub epsilon0: f64,
    /// Newtonian gravitational constant.
    #[serde(rename = "G")]
    pub g: f64,
}

impl PhysicalConstants {
    pub const CODATA_2018: PhysicalConstants = PhysicalConstants {
        id: "CODATA-2018-SI",
        // exact SI h; hbar = h / 2pi (1.054_571_817...e-34)
        hbar: 6.626_070_15e-34 / (2.0 * PI),
        h: 6.626_070_15e-34,
        c: 299_792_458.0,
        e_charge: 1.602_176_634e-19,
        epsilon0: 8.854_187_812_8e-12,
        g: 6.674_30e-11,
    };

    /// `hbar = c = G = epsilon0 = 1`; the charge is chosen so that the
    /// fine-structure constant keeps its CODATA 2018 value, 7.2973525693e-3.
    pub const NATURAL: PhysicalConstants = PhysicalConstants {
        id: "natural-hbar-c-1",
        hbar: 1.0,
        h: 2.0 * PI,
        c: 1.0,
        // sqrt(4 pi alpha), written out because sqrt is not const.
        e_charge: 0.302_822_120_872_088_76,
        epsilon0: 1.0,
        g: 1.0,
    };

    /// e^2 / (4 pi epsilon0 hbar c).
    pub fn fine_structure(&self) -> f64 {
        self.e_charge * self.e_charge / (4.0 * PI * self.epsilon0 * self.hbar * self.c)
    }
}

/// A named massive object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Particle {
    pub name: String,
    /// Mass in kg (SI) or dimensionless (natural units).
    pub mass: f64,
}

impl Particle {
    pub fn new(name: impl Into<String>, mass: f64) -> Result<Self> {
        let name = name.into();
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::InvalidMass { name, mass });
        }
        Ok(Particle { name, mass })
    }

    pub fn electron() -> Self {
        Particle { name: "electron".into(), mass: 9.109_383_701_5e-31 }
    }

    pub fn proton() -> Self {
        Particle { name: "proton".into(), mass: 1.672_621_923_69e-27 }
    }

    /// A macroscopic reference body of 10 g.
    pub fn pen() -> Self {
        Particle { name: "pen".into(), mass: 1.0e-2 }
    }
}

/// Name-to-mass lookup table. Built once, then read-only.
#[derive(Debug, Clone)]
pub struct ParticleRegistry {
    entries: BTreeMap<String, Particle>,
}

impl Default for ParticleRegistry {
    fn default() -> Self {
        Self::builtin()
    }
}

impl ParticleRegistry {
    pub fn builtin() -> Self {
        let entries = [Particle::electron(), Particle::proton(), Particle::pen()]
            .into_iter()
            .map(|p| (p.name.clone(), p))
            .collect();
        ParticleRegistry { entries }
    }

    /// Builtins plus user entries; user entries shadow builtins of the same name.
    pub fn with_extra<I, S>(extra: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, f64)>,
        S: Into<String>,
    {
        let mut reg = Self::builtin();
        for (name, mass) in extra {
            let p = Particle::new(name, mass)?;
            reg.entries.insert(p.name.clone(), p);
        }
        Ok(reg)
    }

    pub fn lookup(&self, name: &str) -> Result<Particle> {
        self.entries.get(name).cloned().ok_or_else(|| Error::UnknownParticle {
            name: name.to_string(),
            available: self.names().map(str::to_string).collect(),
        })
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Particle> {
        self.entries.values()
    }
}

/// Look up a particle in the builtin registry.
pub fn lookup_particle(name: &str) -> Result<Particle> {
    ParticleRegistry::builtin().lookup(name)
}
