//! Eigenmodes and eigenvalues of the free Hamiltonians on the sphere and
//! the cylinder.
//!
//! Sphere modes are the spherical harmonics `Y_jm` with phase
//! `(−1)^{(|m|−m)/2}`; cylinder modes are `e^{ikz} e^{imθ} / (2π)` with the
//! axial wavenumber `k` treated as a discrete label.

pub mod legendre;
pub mod quadrature;

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result, Units};

pub use legendre::LegendreTable;
pub use quadrature::{gauss_legendre, sphere_quadrature, QuadratureGrid};

/// Spherical-harmonic label with `|m| ≤ j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "(u32, i32)", into = "(u32, i32)")]
pub struct SphereMode {
    j: u32,
    m: i32,
}

impl SphereMode {
    pub fn new(j: u32, m: i32) -> Result<Self> {
        if m.unsigned_abs() > j {
            return Err(Error::InvalidArgument(format!(
                "sphere mode needs |m| <= j, got j={j} m={m}"
            )));
        }
        Ok(SphereMode { j, m })
    }

    pub fn j(&self) -> u32 {
        self.j
    }

    pub fn m(&self) -> i32 {
        self.m
    }

    /// Eigenvalue of J²/ħ², j(j+1).
    pub fn casimir(&self) -> f64 {
        let j = self.j as f64;
        j * (j + 1.0)
    }
}

impl TryFrom<(u32, i32)> for SphereMode {
    type Error = Error;
    fn try_from((j, m): (u32, i32)) -> Result<Self> {
        SphereMode::new(j, m)
    }
}

impl From<SphereMode> for (u32, i32) {
    fn from(s: SphereMode) -> Self {
        (s.j, s.m)
    }
}

impl fmt::Display for SphereMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(j={}, m={})", self.j, self.m)
    }
}

/// Cylinder label: axial wavenumber `k` (1/length) and angular number `m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "(f64, i32)", into = "(f64, i32)")]
pub struct CylinderMode {
    k: f64,
    m: i32,
}

impl CylinderMode {
    pub fn new(k: f64, m: i32) -> Result<Self> {
        if !k.is_finite() {
            return Err(Error::InvalidArgument(format!("non-finite wavenumber k={k}")));
        }
        Ok(CylinderMode { k, m })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn m(&self) -> i32 {
        self.m
    }

    /// m² − 1/4, the quantity whose variance sets the cylinder QFI.
    pub fn shifted_m2(&self) -> f64 {
        let m = self.m as f64;
        m * m - 0.25
    }

    /// Labels compare equal when both k (bitwise) and m agree.
    pub fn same_label(&self, other: &CylinderMode) -> bool {
        self.k.to_bits() == other.k.to_bits() && self.m == other.m
    }
}

impl TryFrom<(f64, i32)> for CylinderMode {
    type Error = Error;
    fn try_from((k, m): (f64, i32)) -> Result<Self> {
        CylinderMode::new(k, m)
    }
}

impl From<CylinderMode> for (f64, i32) {
    fn from(c: CylinderMode) -> Self {
        (c.k, c.m)
    }
}

impl fmt::Display for CylinderMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(k={}, m={})", self.k, self.m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Sphere(SphereMode),
    Cylinder(CylinderMode),
}

impl Mode {
    pub fn same_label(&self, other: &Mode) -> bool {
        match (self, other) {
            (Mode::Sphere(a), Mode::Sphere(b)) => a == b,
            (Mode::Cylinder(a), Mode::Cylinder(b)) => a.same_label(b),
            _ => false,
        }
    }

    /// Energy at radius λ.
    pub fn energy(&self, lambda: f64, units: &Units) -> f64 {
        match self {
            Mode::Sphere(s) => sphere_energy(*s, lambda, units),
            Mode::Cylinder(c) => cylinder_energy(*c, lambda, units),
        }
    }

    /// ∂E/∂λ at fixed label.
    pub fn energy_derivative(&self, lambda: f64, units: &Units) -> f64 {
        match self {
            Mode::Sphere(s) => sphere_energy_derivative(*s, lambda, units),
            Mode::Cylinder(c) => cylinder_energy_derivative(*c, lambda, units),
        }
    }
}

impl From<SphereMode> for Mode {
    fn from(s: SphereMode) -> Self {
        Mode::Sphere(s)
    }
}

impl From<CylinderMode> for Mode {
    fn from(c: CylinderMode) -> Self {
        Mode::Cylinder(c)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Sphere(s) => s.fmt(f),
            Mode::Cylinder(c) => c.fmt(f),
        }
    }
}

#[inline]
fn phase(m: i32, phi: f64) -> Complex64 {
    Complex64::from_polar(1.0, m as f64 * phi)
}

/// `Y_jm(θ, φ)` for `θ ∈ [0, π]`.
pub fn sphere_harmonic(mode: SphereMode, theta: f64, phi: f64) -> Complex64 {
    let am = mode.m.unsigned_abs() as usize;
    let table = LegendreTable::at_theta(mode.j as usize, theta);
    let mut p = table.get(mode.j as usize, am);
    if mode.m < 0 && am % 2 == 1 {
        p = -p;
    }
    phase(mode.m, phi) * p
}

/// `E_jm = ħ² j(j+1) / (2Mλ²)`, independent of m.
pub fn sphere_energy(mode: SphereMode, lambda: f64, units: &Units) -> f64 {
    units.kinetic() * mode.casimir() / (lambda * lambda)
}

/// `∂_λ E_jm = −ħ² j(j+1) / (Mλ³)`.
pub fn sphere_energy_derivative(mode: SphereMode, lambda: f64, units: &Units) -> f64 {
    -2.0 * units.kinetic() * mode.casimir() / (lambda * lambda * lambda)
}

/// `e^{ikz} e^{imθ} / (2π)`.
pub fn cylinder_mode_amplitude(mode: CylinderMode, theta: f64, z: f64) -> Complex64 {
    Complex64::from_polar(1.0 / std::f64::consts::TAU, mode.k * z + mode.m as f64 * theta)
}

/// `E_km = ħ²/(2M) (k² + m²/λ² − 1/(4λ²))`.
pub fn cylinder_energy(mode: CylinderMode, lambda: f64, units: &Units) -> f64 {
    units.kinetic() * (mode.k * mode.k + mode.shifted_m2() / (lambda * lambda))
}

/// `∂_λ E_km = −ħ² (m² − 1/4) / (Mλ³)`.
pub fn cylinder_energy_derivative(mode: CylinderMode, lambda: f64, units: &Units) -> f64 {
    -2.0 * units.kinetic() * mode.shifted_m2() / (lambda * lambda * lambda)
}
