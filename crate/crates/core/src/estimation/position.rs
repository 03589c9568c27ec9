//! Fisher information of an ideal position measurement.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::geometry::SurfaceKind;
use crate::probe::EvolvedModel;
use crate::spectral::{legendre, LegendreTable, Mode, QuadratureGrid, SphereMode};
use crate::{Error, Result};

/// Nodes whose density is below this fraction of the maximum are skipped.
pub const DENSITY_FLOOR: f64 = 1e-14;

/// Skipped probability above which the result carries a warning.
pub const SKIPPED_MASS_WARNING: f64 = 1e-6;

/// Default number of Gauss nodes in θ for sphere position integrals. The
/// integrand `(∂p)²/p` is not polynomial, so the rule is much finer than
/// the exactness minimum.
pub const DEFAULT_THETA_NODES: usize = 2048;

/// Position-measurement Fisher information with quadrature diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositionFi {
    pub value: f64,
    /// Probability carried by the skipped low-density nodes.
    pub skipped_mass: f64,
    pub skipped_nodes: usize,
    /// ∫ p over the grid; 1 up to quadrature error.
    pub density_mass: f64,
    pub nodes: usize,
}

impl PositionFi {
    pub fn warning(&self) -> Option<String> {
        (self.skipped_mass > SKIPPED_MASS_WARNING).then(|| {
            format!(
                "skipped density mass {:.3e} exceeds {:.0e}",
                self.skipped_mass, SKIPPED_MASS_WARNING
            )
        })
    }
}

/// Accumulates `Σ w (∂p)²/p` from density samples `(p, ∂p, w)`.
fn accumulate(samples: &[(f64, f64, f64)]) -> PositionFi {
    let p_max = samples.iter().map(|s| s.0).fold(0.0, f64::max);
    let floor = DENSITY_FLOOR * p_max;
    let mut out = PositionFi {
        value: 0.0,
        skipped_mass: 0.0,
        skipped_nodes: 0,
        density_mass: 0.0,
        nodes: samples.len(),
    };
    for &(p, dp, w) in samples {
        out.density_mass += w * p;
        if p < floor || p <= 0.0 {
            out.skipped_mass += w * p.max(0.0);
            out.skipped_nodes += 1;
        } else {
            out.value += w * dp * dp / p;
        }
    }
    out
}

/// θ-row evaluation grid that resolves a sphere state: a fine Gauss rule
/// in cos θ and enough φ points for the azimuthal content.
pub fn sphere_position_grid(model: &EvolvedModel) -> QuadratureGrid {
    let j = model.evolved.max_j();
    let m = model.evolved.max_abs_m();
    QuadratureGrid::sphere(DEFAULT_THETA_NODES.max(4 * j + 4), 4 * m + 4)
}

fn sphere_modes(model: &EvolvedModel) -> Result<Vec<SphereMode>> {
    model
        .modes()
        .iter()
        .map(|m| match m {
            Mode::Sphere(s) => Ok(*s),
            Mode::Cylinder(c) => Err(Error::SurfaceMismatch {
                mode: c.to_string(),
                surface: "sphere",
            }),
        })
        .collect()
}

/// `F = ∫ (∂_λ p)² / p dΩ` for a sphere model, with `p = |ψ(θ,φ)|²`.
pub fn position_fi_sphere(model: &EvolvedModel, grid: &QuadratureGrid) -> Result<PositionFi> {
    let modes = sphere_modes(model)?;
    if grid.surface() != SurfaceKind::Sphere {
        return Err(Error::InvalidArgument("sphere position FI needs a sphere grid".into()));
    }
    let j_max = model.evolved.max_j();
    let m_max = model.evolved.max_abs_m();
    if grid.u_nodes().len() < j_max + 1 || grid.v_nodes().len() < 2 * m_max + 1 {
        return Err(Error::InvalidArgument(format!(
            "grid ({} x {}) too coarse for j_max = {j_max}, |m| = {m_max}",
            grid.u_nodes().len(),
            grid.v_nodes().len()
        )));
    }
    let psi = model.psi();
    let d = &model.derivative;
    let zonal = m_max == 0;
    let v_nodes: &[f64] = if zonal { &[0.0] } else { grid.v_nodes() };
    let v_weight = if zonal {
        grid.v_weight() * grid.v_nodes().len() as f64
    } else {
        grid.v_weight()
    };

    let mut samples = Vec::with_capacity(grid.u_nodes().len() * v_nodes.len());
    for (&u, &wu) in grid.u_nodes().iter().zip(grid.u_weights()) {
        let radial: Vec<f64> = if zonal {
            let col = legendre::zonal(j_max, u.cos());
            modes.iter().map(|m| col[m.j() as usize]).collect()
        } else {
            let table = LegendreTable::at_theta(j_max, u);
            modes
                .iter()
                .map(|m| {
                    let am = m.m().unsigned_abs() as usize;
                    let p = table.get(m.j() as usize, am);
                    if m.m() < 0 && am % 2 == 1 {
                        -p
                    } else {
                        p
                    }
                })
                .collect()
        };
        for &v in v_nodes {
            let mut amp = Complex64::new(0.0, 0.0);
            let mut damp = Complex64::new(0.0, 0.0);
            for (i, m) in modes.iter().enumerate() {
                let y = Complex64::from_polar(radial[i], m.m() as f64 * v);
                amp += psi[i] * y;
                damp += d[i] * y;
            }
            let p = amp.norm_sqr();
            let dp = 2.0 * (amp.conj() * damp).re;
            samples.push((p, dp, wu * v_weight));
        }
    }
    Ok(accumulate(&samples))
}

/// Default angular resolution for cylinder position integrals.
pub fn cylinder_theta_nodes(model: &EvolvedModel) -> usize {
    (4 * model.evolved.max_abs_m() + 2).max(256)
}

/// `F` for the angular marginal `q(θ)` on the cylinder.
///
/// Modes with different axial wavenumber are orthogonal along z, so the
/// marginal is `Σ_k |Σ_m ψ_{km} e^{imθ}|² / (2π)`.
pub fn position_fi_cylinder(model: &EvolvedModel, n_theta: usize) -> Result<PositionFi> {
    let m_max = model.evolved.max_abs_m();
    if n_theta < 4 * m_max + 2 {
        return Err(Error::InvalidArgument(format!(
            "n_theta = {n_theta} below 4*max|m|+2 = {}",
            4 * m_max + 2
        )));
    }
    let mut by_k: BTreeMap<u64, Vec<(i32, Complex64, Complex64)>> = BTreeMap::new();
    for ((mode, a), d) in model.modes().iter().zip(model.psi()).zip(&model.derivative) {
        match mode {
            Mode::Cylinder(c) => by_k.entry(c.k().to_bits()).or_default().push((c.m(), *a, *d)),
            Mode::Sphere(s) => {
                return Err(Error::SurfaceMismatch {
                    mode: s.to_string(),
                    surface: "cylinder",
                })
            }
        }
    }
    let grid = QuadratureGrid::circle(n_theta);
    let norm = 1.0 / std::f64::consts::TAU;
    let samples: Vec<(f64, f64, f64)> = grid
        .iter()
        .map(|(pt, w)| {
            let (mut p, mut dp) = (0.0, 0.0);
            for terms in by_k.values() {
                let mut amp = Complex64::new(0.0, 0.0);
                let mut damp = Complex64::new(0.0, 0.0);
                for &(m, a, d) in terms {
                    let e = Complex64::from_polar(1.0, m as f64 * pt.u);
                    amp += a * e;
                    damp += d * e;
                }
                p += amp.norm_sqr() * norm;
                dp += 2.0 * (amp.conj() * damp).re * norm;
            }
            (p, dp, w)
        })
        .collect();
    Ok(accumulate(&samples))
}
