use serde::{Deserialize, Serialize};

/// Reduced Planck constant and probe mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Units {
    #[serde(default = "one")]
    pub hbar: f64,
    #[serde(default = "one")]
    pub mass: f64,
}

fn one() -> f64 {
    1.0
}

impl Units {
    /// ħ = M = 1.
    pub const NATURAL: Units = Units { hbar: 1.0, mass: 1.0 };

    pub fn new(hbar: f64, mass: f64) -> crate::Result<Self> {
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(crate::Error::InvalidArgument(format!(
                "hbar must be positive and finite, got {hbar}"
            )));
        }
        if !(mass.is_finite() && mass > 0.0) {
            return Err(crate::Error::InvalidArgument(format!(
                "mass must be positive and finite, got {mass}"
            )));
        }
        Ok(Units { hbar, mass })
    }

    /// ħ²/(2M), the kinetic prefactor.
    #[inline]
    pub fn kinetic(&self) -> f64 {
        self.hbar * self.hbar / (2.0 * self.mass)
    }
}

impl Default for Units {
    fn default() -> Self {
        Units::NATURAL
    }
}
