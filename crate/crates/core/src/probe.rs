//! Probe states, free evolution and the radius derivative of the evolved
//! state.

use num_complex::Complex64;

use crate::geometry::SurfaceKind;
use crate::spectral::{gauss_legendre, legendre, Mode, SphereMode};
use crate::{Error, Result, Units};

/// Tail mass below which a von Mises expansion is considered complete.
pub const VON_MISES_TAIL: f64 = 1e-12;

/// How the mode list of a state was chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Truncation {
    /// Explicit list of modes.
    ModeList,
    /// All zonal sphere modes `j ≤ j_max`, with the probability left out.
    JMax { j_max: usize, tail_mass: f64 },
}

/// A finite superposition of eigenmodes of one surface.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralState {
    surface: SurfaceKind,
    modes: Vec<Mode>,
    amplitudes: Vec<Complex64>,
    truncation: Truncation,
    normalized: bool,
}

fn surface_of(mode: &Mode) -> SurfaceKind {
    match mode {
        Mode::Sphere(_) => SurfaceKind::Sphere,
        Mode::Cylinder(_) => SurfaceKind::Cylinder,
    }
}

/// Normalised superposition of the given modes. Repeated labels are merged.
pub fn superposition<M: Into<Mode> + Copy>(terms: &[(M, Complex64)]) -> Result<SpectralState> {
    let mut modes: Vec<Mode> = Vec::with_capacity(terms.len());
    let mut amplitudes: Vec<Complex64> = Vec::with_capacity(terms.len());
    let mut surface = None;
    for &(mode, amp) in terms {
        let mode: Mode = mode.into();
        let kind = surface_of(&mode);
        match surface {
            None => surface = Some(kind),
            Some(s) if s != kind => {
                return Err(Error::SurfaceMismatch {
                    mode: mode.to_string(),
                    surface: s.name(),
                })
            }
            _ => {}
        }
        if !(amp.re.is_finite() && amp.im.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite amplitude for {mode}")));
        }
        match modes.iter().position(|m| m.same_label(&mode)) {
            Some(i) => amplitudes[i] += amp,
            None => {
                modes.push(mode);
                amplitudes.push(amp);
            }
        }
    }
    let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
    if norm == 0.0 || surface.is_none() {
        return Err(Error::ZeroState);
    }
    let scale = norm.sqrt().recip();
    amplitudes.iter_mut().for_each(|a| *a *= scale);
    Ok(SpectralState {
        surface: surface.unwrap(),
        modes,
        amplitudes,
        truncation: Truncation::ModeList,
        normalized: true,
    })
}

/// `cos α |Ψ00⟩ + sin α e^{iβ} |Ψ_jm⟩` on the sphere.
pub fn sphere_two_level(j: u32, m: i32, alpha: f64, beta: f64) -> Result<SpectralState> {
    let ground = SphereMode::new(0, 0)?;
    let excited = SphereMode::new(j, m)?;
    superposition(&[
        (ground, Complex64::new(alpha.cos(), 0.0)),
        (excited, Complex64::from_polar(alpha.sin(), beta)),
    ])
}

/// Stable evaluation of the normalised packet
/// `ψ_κ(θ) = √(κ / (4π sinh κ)) e^{(κ/2) cos θ}` at `x = cos θ`.
fn von_mises_density_root(kappa: f64, x: f64) -> f64 {
    let base = 0.5 / std::f64::consts::PI.sqrt();
    if kappa == 0.0 {
        return base;
    }
    let ratio = 2.0 * kappa / -(-2.0 * kappa).exp_m1();
    base * ratio.sqrt() * (0.5 * kappa * (x - 1.0)).exp()
}

struct ZonalExpansion {
    coefficients: Vec<f64>,
    /// Quadrature estimate of ∫|ψ|².
    total: f64,
}

fn zonal_expansion(kappa: f64, j_max: usize) -> ZonalExpansion {
    let n = 2 * j_max + 4 + (2.0 * kappa).ceil() as usize;
    let (x, w) = gauss_legendre(n);
    let mut coefficients = vec![0.0; j_max + 1];
    let mut total = 0.0;
    let two_pi = std::f64::consts::TAU;
    for (&xi, &wi) in x.iter().zip(&w) {
        let psi = von_mises_density_root(kappa, xi);
        total += two_pi * wi * psi * psi;
        for (c, p) in coefficients.iter_mut().zip(legendre::zonal(j_max, xi)) {
            *c += two_pi * wi * p * psi;
        }
    }
    ZonalExpansion { coefficients, total }
}

fn first_meeting_tail(exp: &ZonalExpansion) -> Option<(usize, f64)> {
    let mut kept = 0.0;
    for (j, c) in exp.coefficients.iter().enumerate() {
        kept += c * c;
        let tail = exp.total - kept;
        if tail < VON_MISES_TAIL {
            return Some((j, tail.max(0.0)));
        }
    }
    None
}

/// Von Mises packet `∝ e^{(κ/2) cos θ}` expanded in zonal harmonics.
///
/// `j_max` is a cap: the expansion keeps the fewest modes whose omitted
/// probability is below [`VON_MISES_TAIL`]. If the cap is too small the
/// error names the required value.
pub fn von_mises_packet(kappa: f64, j_max: usize) -> Result<SpectralState> {
    if !(kappa.is_finite() && kappa >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "von Mises concentration must be finite and >= 0, got {kappa}"
        )));
    }
    let exp = zonal_expansion(kappa, j_max);
    let (j_cut, tail) = match first_meeting_tail(&exp) {
        Some(found) => found,
        None => {
            let mut cap = (2 * j_max).max(8);
            let required = loop {
                if let Some((j, _)) = first_meeting_tail(&zonal_expansion(kappa, cap)) {
                    break j;
                }
                if cap > 1 << 14 {
                    break cap;
                }
                cap *= 2;
            };
            return Err(Error::TailNotMet {
                kappa,
                cap: j_max,
                required,
            });
        }
    };
    let kept = &exp.coefficients[..=j_cut];
    let norm = kept.iter().map(|c| c * c).sum::<f64>().sqrt();
    let modes = (0..=j_cut as u32)
        .map(|j| Mode::Sphere(SphereMode::new(j, 0).unwrap()))
        .collect();
    let amplitudes = kept.iter().map(|c| Complex64::new(c / norm, 0.0)).collect();
    Ok(SpectralState {
        surface: SurfaceKind::Sphere,
        modes,
        amplitudes,
        truncation: Truncation::JMax {
            j_max: j_cut,
            tail_mass: tail,
        },
        normalized: true,
    })
}

impl SpectralState {
    pub fn surface(&self) -> SurfaceKind {
        self.surface
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Mode, &Complex64)> {
        self.modes.iter().zip(&self.amplitudes)
    }

    pub fn truncation(&self) -> Truncation {
        self.truncation
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Largest `j` among sphere modes (0 for cylinder states).
    pub fn max_j(&self) -> usize {
        self.modes
            .iter()
            .map(|m| match m {
                Mode::Sphere(s) => s.j() as usize,
                Mode::Cylinder(_) => 0,
            })
            .max()
            .unwrap_or(0)
    }

    /// Largest `|m|` among the modes.
    pub fn max_abs_m(&self) -> usize {
        self.modes
            .iter()
            .map(|m| match m {
                Mode::Sphere(s) => s.m().unsigned_abs() as usize,
                Mode::Cylinder(c) => c.m().unsigned_abs() as usize,
            })
            .max()
            .unwrap_or(0)
    }

    fn with_amplitudes(&self, amplitudes: Vec<Complex64>) -> SpectralState {
        SpectralState {
            amplitudes,
            ..self.clone()
        }
    }
}

fn check_radius(lambda: f64) -> Result<()> {
    if lambda.is_finite() && lambda > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "radius must be positive and finite, got {lambda}"
        )))
    }
}

fn check_time(t: f64) -> Result<()> {
    if t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("non-finite time {t}")))
    }
}

/// Free evolution for time `t` at radius `λ`: each amplitude picks up
/// `e^{−itE/ħ}`.
pub fn evolve(state: &SpectralState, t: f64, lambda: f64, units: &Units) -> Result<SpectralState> {
    check_radius(lambda)?;
    check_time(t)?;
    let amps = state
        .iter()
        .map(|(mode, c)| c * Complex64::from_polar(1.0, -t * mode.energy(lambda, units) / units.hbar))
        .collect();
    Ok(state.with_amplitudes(amps))
}

/// Evolved state together with its analytic derivative in λ.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolvedModel {
    pub initial: SpectralState,
    pub evolved: SpectralState,
    /// `∂_λ` of the evolved amplitudes, same mode order (1/length).
    pub derivative: Vec<Complex64>,
    pub t: f64,
    pub lambda: f64,
    pub units: Units,
}

impl EvolvedModel {
    pub fn psi(&self) -> &[Complex64] {
        self.evolved.amplitudes()
    }

    pub fn modes(&self) -> &[Mode] {
        self.evolved.modes()
    }

    pub fn surface(&self) -> SurfaceKind {
        self.evolved.surface()
    }

    /// `⟨ψ|∂_λψ⟩`, purely imaginary for these models.
    pub fn overlap(&self) -> Complex64 {
        self.psi().iter().zip(&self.derivative).map(|(p, d)| p.conj() * d).sum()
    }
}

/// Evolves `state` and differentiates the amplitudes with respect to λ,
/// `d = c e^{−itE/ħ} (−it/ħ) ∂_λE`. Valid for the free models, whose
/// eigenvectors do not depend on λ.
pub fn lambda_derivative(state: &SpectralState, t: f64, lambda: f64, units: &Units) -> Result<EvolvedModel> {
    let evolved = evolve(state, t, lambda, units)?;
    let factor = Complex64::new(0.0, -t / units.hbar);
    let derivative = evolved
        .iter()
        .map(|(mode, a)| a * factor * mode.energy_derivative(lambda, units))
        .collect();
    Ok(EvolvedModel {
        initial: state.clone(),
        evolved,
        derivative,
        t,
        lambda,
        units: *units,
    })
}
