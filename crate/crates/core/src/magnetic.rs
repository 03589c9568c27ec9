//! Charged probe in a magnetic field, to first order in the coupling.
//!
//! Sphere: uniform axial field B. The diamagnetic term
//! `λ²Q²B² sin²θ / (8M)` mixes `(j,m)` with `(j±2,m)`, which makes the
//! ground state depend on λ. Cylinder: radial field B₁, whose term
//! `i λħQB₁ sin θ ∂_z / M` mixes `(k,m)` with `(k,m±1)`.

use num_complex::Complex64;

use crate::estimation::qfi_from_vectors;
use crate::spectral::{gauss_legendre, legendre::LegendreTable, CylinderMode, Mode, SphereMode};
use crate::{Error, Result, Units};

/// Perturbation gauge above which first-order results are flagged.
pub const GAUGE_WARNING: f64 = 0.3;

/// Minimum unperturbed level spacing accepted by the sphere solver.
pub const DEGENERACY_GUARD: f64 = 1e-10;

/// Charge and field strength of the probe, with the units they live in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldConfig {
    pub charge: f64,
    /// B on the sphere, B₁ on the cylinder.
    pub field: f64,
    pub units: Units,
}

impl FieldConfig {
    pub fn new(charge: f64, field: f64, units: Units) -> Result<Self> {
        if !(charge.is_finite() && field.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "charge and field must be finite (Q={charge}, B={field})"
            )));
        }
        Ok(FieldConfig { charge, field, units })
    }

    /// `QB/ħ`, an inverse area.
    fn qb(&self) -> f64 {
        self.charge * self.field / self.units.hbar
    }

    /// `a = Q²B²/(36√5 ħ²)`.
    pub fn sphere_coupling(&self) -> f64 {
        self.qb().powi(2) / (36.0 * 5f64.sqrt())
    }

    /// `a = QB₁/ħ`.
    pub fn cylinder_coupling(&self) -> f64 {
        self.qb()
    }

    /// `|QB| λ² / ħ`.
    pub fn sphere_gauge(&self, lambda: f64) -> f64 {
        self.qb().abs() * lambda * lambda
    }

    /// `|QB₁| λ³ |k| / ħ`.
    pub fn cylinder_gauge(&self, k: f64, lambda: f64) -> f64 {
        self.qb().abs() * lambda.powi(3) * k.abs()
    }
}

fn gauge_warning(y: f64) -> Option<String> {
    (y > GAUGE_WARNING).then(|| format!("perturbation gauge y = {y:.3} exceeds {GAUGE_WARNING}"))
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

/// A first-order perturbed eigenstate written in the unperturbed basis.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbedState {
    pub base: Mode,
    pub modes: Vec<Mode>,
    /// Normalised amplitudes, `base` first.
    pub amplitudes: Vec<Complex64>,
    /// Squared norm of the unnormalised first-order vector.
    pub normalization: f64,
    pub lambda: f64,
    pub gauge: f64,
    pub warnings: Vec<String>,
}

impl PerturbedState {
    fn from_unnormalized(base: Mode, modes: Vec<Mode>, raw: Vec<Complex64>, lambda: f64, gauge: f64) -> Self {
        let normalization: f64 = raw.iter().map(|c| c.norm_sqr()).sum();
        let scale = normalization.sqrt().recip();
        PerturbedState {
            base,
            modes,
            amplitudes: raw.into_iter().map(|c| c * scale).collect(),
            normalization,
            lambda,
            gauge,
            warnings: gauge_warning(gauge).into_iter().collect(),
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Amplitude on `mode`, zero if absent.
    pub fn amplitude(&self, mode: &Mode) -> Complex64 {
        self.modes
            .iter()
            .position(|m| m.same_label(mode))
            .map_or(Complex64::new(0.0, 0.0), |i| self.amplitudes[i])
    }
}

/// `E⁽⁰⁾_jm = j(j+1)ħ²/(2Mλ²) − m QBħ/(2M)`.
pub fn sphere_unperturbed_energy(mode: SphereMode, field: &FieldConfig, lambda: f64) -> f64 {
    let u = &field.units;
    u.kinetic() * mode.casimir() / (lambda * lambda)
        - mode.m() as f64 * field.charge * field.field * u.hbar / (2.0 * u.mass)
}

/// `∫∫ Y*_{κm} sin²θ Y_{jm} sin θ dθ dφ` by Gauss–Legendre quadrature
/// (zero unless the azimuthal numbers agree).
pub fn sphere_sin2_element(bra: SphereMode, ket: SphereMode) -> f64 {
    if bra.m() != ket.m() {
        return 0.0;
    }
    let am = ket.m().unsigned_abs() as usize;
    let l_max = bra.j().max(ket.j()) as usize;
    let (x, w) = gauss_legendre(l_max + 4);
    let mut acc = 0.0;
    for (&xi, &wi) in x.iter().zip(&w) {
        let table = LegendreTable::new(l_max, xi, (1.0 - xi * xi).sqrt());
        acc += wi * (1.0 - xi * xi) * table.get(bra.j() as usize, am) * table.get(ket.j() as usize, am);
    }
    std::f64::consts::TAU * acc
}

/// Diagonal shift `E⁽¹⁾_jm = Q²B²λ²/(4M) (m²+j²+j−1)/((2j+3)(2j−1))`.
///
/// The matrix element of the positive operator sin²θ is positive for every
/// `(j, m)`, so no sign alternates with m.
pub fn sphere_energy_correction(mode: SphereMode, field: &FieldConfig, lambda: f64) -> f64 {
    let (j, m) = (mode.j() as f64, mode.m() as f64);
    let q2b2 = (field.charge * field.field).powi(2);
    q2b2 * lambda * lambda / (4.0 * field.units.mass) * (m * m + j * j + j - 1.0) / ((2.0 * j + 3.0) * (2.0 * j - 1.0))
}

/// The shift as usually quoted, carrying an extra `(−1)^m`. Kept for
/// comparison; it disagrees in sign with the matrix element for odd m.
pub fn sphere_energy_correction_printed(mode: SphereMode, field: &FieldConfig, lambda: f64) -> f64 {
    let sign = if mode.m() % 2 == 0 { 1.0 } else { -1.0 };
    sign * sphere_energy_correction(mode, field, lambda)
}

/// `⟨Ψ_κμ| λ²Q²B² sin²θ/(8M) |Ψ_jm⟩`.
pub fn sphere_coupling_element(bra: SphereMode, ket: SphereMode, field: &FieldConfig, lambda: f64) -> f64 {
    let q2b2 = (field.charge * field.field).powi(2);
    lambda * lambda * q2b2 / (8.0 * field.units.mass) * sphere_sin2_element(bra, ket)
}

/// First-order eigenvector of the sphere Hamiltonian from quadrature
/// matrix elements. Only `(j±2, m)` couple to `(j, m)`.
pub fn sphere_perturbed_state(mode: SphereMode, field: &FieldConfig, lambda: f64) -> Result<PerturbedState> {
    check_radius(lambda)?;
    let e0 = sphere_unperturbed_energy(mode, field, lambda);
    let mut modes = vec![Mode::Sphere(mode)];
    let mut raw = vec![Complex64::new(1.0, 0.0)];
    let (j, m) = (mode.j(), mode.m());
    let partners = [j.checked_sub(2), Some(j + 2)];
    for kappa in partners.into_iter().flatten() {
        let Ok(other) = SphereMode::new(kappa, m) else { continue };
        let gap = e0 - sphere_unperturbed_energy(other, field, lambda);
        if gap.abs() < DEGENERACY_GUARD {
            return Err(Error::DegenerateLevels {
                a: mode.to_string(),
                b: other.to_string(),
                gap,
            });
        }
        let coeff = sphere_coupling_element(other, mode, field, lambda) / gap;
        modes.push(Mode::Sphere(other));
        raw.push(Complex64::new(coeff, 0.0));
    }
    Ok(PerturbedState::from_unnormalized(
        Mode::Sphere(mode),
        modes,
        raw,
        lambda,
        field.sphere_gauge(lambda),
    ))
}

/// Ground-state mixing `g(λ) = a λ⁴`.
pub fn sphere_mixing(field: &FieldConfig, lambda: f64) -> f64 {
    field.sphere_coupling() * lambda.powi(4)
}

/// `|Ξ00⟩ = (|Ψ00⟩ + g(λ)|Ψ20⟩) / √(1+g²)`.
pub fn sphere_ground_state(field: &FieldConfig, lambda: f64) -> Result<PerturbedState> {
    check_radius(lambda)?;
    let g = sphere_mixing(field, lambda);
    let modes = vec![
        Mode::Sphere(SphereMode::new(0, 0)?),
        Mode::Sphere(SphereMode::new(2, 0)?),
    ];
    Ok(PerturbedState::from_unnormalized(
        modes[0],
        modes,
        vec![Complex64::new(1.0, 0.0), Complex64::new(g, 0.0)],
        lambda,
        field.sphere_gauge(lambda),
    ))
}

/// Ground-state QFI in two forms that share their λ-dependence.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereFieldQfi {
    /// `9a²λ⁶/(1+a²λ⁸)²`, the commonly quoted closed form.
    pub printed: f64,
    /// `4(∂_λg/(1+g²))² = 64a²λ⁶/(1+a²λ⁸)²`, from differentiating g = aλ⁴.
    pub derived: f64,
    pub coupling: f64,
    pub gauge: f64,
    pub warnings: Vec<String>,
}

impl SphereFieldQfi {
    /// `derived / printed`, the constant 64/9 whenever both are nonzero.
    pub fn prefactor_ratio(&self) -> f64 {
        self.derived / self.printed
    }
}

pub fn sphere_ground_qfi(field: &FieldConfig, lambda: f64) -> Result<SphereFieldQfi> {
    check_radius(lambda)?;
    let a = field.sphere_coupling();
    let g = a * lambda.powi(4);
    let dg = 4.0 * a * lambda.powi(3);
    let denom = (1.0 + g * g).powi(2);
    let gauge = field.sphere_gauge(lambda);
    Ok(SphereFieldQfi {
        printed: 9.0 * a * a * lambda.powi(6) / denom,
        derived: 4.0 * (dg / (1.0 + g * g)).powi(2),
        coupling: a,
        gauge,
        warnings: gauge_warning(gauge).into_iter().collect(),
    })
}

/// `λ* = (3/(5a²))^{1/8}`, where both sphere QFI forms peak.
pub fn sphere_qfi_argmax(a: f64) -> f64 {
    (3.0 / (5.0 * a * a)).powf(0.125)
}

/// `(45/64) 135^{1/4} √a`, the peak of the printed form.
pub fn sphere_qfi_printed_max(a: f64) -> f64 {
    45.0 / 64.0 * 135f64.powf(0.25) * a.sqrt()
}

/// `B_km = k/(1+2m)`.
pub fn cylinder_b(k: f64, m: i32) -> f64 {
    k / (1.0 + 2.0 * m as f64)
}

/// `|Υ_km⟩ ∝ |Φ_km⟩ − (2QB₁λ³/ħ)(B_km |Φ_{k,m+1}⟩ + B_{k,m−1} |Φ_{k,m−1}⟩)`.
///
/// For k = 0 the state is the unperturbed mode.
pub fn cylinder_perturbed_state(mode: CylinderMode, field: &FieldConfig, lambda: f64) -> Result<PerturbedState> {
    check_radius(lambda)?;
    let (k, m) = (mode.k(), mode.m());
    // 1 + 2m and 2m − 1 are odd, hence never zero for integer m.
    debug_assert!(1 + 2 * m != 0 && 2 * m - 1 != 0);
    let s = -2.0 * field.cylinder_coupling() * lambda.powi(3);
    let base = Mode::Cylinder(mode);
    let gauge = field.cylinder_gauge(k, lambda);
    if k == 0.0 {
        return Ok(PerturbedState::from_unnormalized(
            base,
            vec![base],
            vec![Complex64::new(1.0, 0.0)],
            lambda,
            gauge,
        ));
    }
    let up = Mode::Cylinder(CylinderMode::new(k, m + 1)?);
    let down = Mode::Cylinder(CylinderMode::new(k, m - 1)?);
    Ok(PerturbedState::from_unnormalized(
        base,
        vec![base, up, down],
        vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(s * cylinder_b(k, m), 0.0),
            Complex64::new(s * cylinder_b(k, m - 1), 0.0),
        ],
        lambda,
        gauge,
    ))
}

/// QFI of the perturbed cylinder state `|Υ_km⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct CylinderFieldQfi {
    /// `288a²k²(1+4m²)λ⁴ / [(1−4m²)² + 8a²k²(1+4m²)λ⁶]`, the quoted closed form.
    pub printed: f64,
    /// Exact QFI of the state, `printed / 𝒩`.
    pub derived: f64,
    /// `𝒩 = 1 + 8a²k²(4m²+1)λ⁶/(1−4m²)²`.
    pub normalization: f64,
    pub coupling: f64,
    pub gauge: f64,
    pub warnings: Vec<String>,
}

pub fn cylinder_field_qfi(mode: CylinderMode, field: &FieldConfig, lambda: f64) -> Result<CylinderFieldQfi> {
    check_radius(lambda)?;
    let a = field.cylinder_coupling();
    let (k, m) = (mode.k(), mode.m() as f64);
    let c = 1.0 + 4.0 * m * m;
    let d = (1.0 - 4.0 * m * m).powi(2);
    let printed = 288.0 * a * a * k * k * c * lambda.powi(4) / (d + 8.0 * a * a * k * k * c * lambda.powi(6));
    let normalization = 1.0 + 8.0 * a * a * k * k * c * lambda.powi(6) / d;
    // 4 ṡ² S / 𝒩² with s = −2aλ³ and S = B_km² + B_{k,m−1}².
    let sum_b2 = 2.0 * k * k * c / d;
    let ds = -6.0 * a * lambda * lambda;
    let derived = 4.0 * ds * ds * sum_b2 / (normalization * normalization);
    let gauge = field.cylinder_gauge(k, lambda);
    Ok(CylinderFieldQfi {
        printed,
        derived,
        normalization,
        coupling: a,
        gauge,
        warnings: gauge_warning(gauge).into_iter().collect(),
    })
}

/// Peak of the quoted cylinder form for (k=1, m=0): `λ = (2a)^{−1/3}`.
pub fn cylinder_printed_argmax(a: f64) -> f64 {
    (2.0 * a).powf(-1.0 / 3.0)
}

/// `24 (2a)^{2/3}`.
pub fn cylinder_printed_max(a: f64) -> f64 {
    24.0 * (2.0 * a).powf(2.0 / 3.0)
}

/// Peak of the exact (k=1, m=0) QFI: `λ = (4a)^{−1/3}`.
pub fn cylinder_derived_argmax(a: f64) -> f64 {
    (4.0 * a).powf(-1.0 / 3.0)
}

/// Central-difference QFI with a Richardson step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericQfi {
    /// Richardson-extrapolated value.
    pub value: f64,
    /// Estimate with step h.
    pub coarse: f64,
    /// Estimate with step h/2.
    pub fine: f64,
}

/// Relative disagreement between the h and h/2 estimates that is
/// reported as non-convergence.
pub const RICHARDSON_TOL: f64 = 1e-4;

fn amplitudes_at<F>(family: &F, lambda: f64, reference: &PerturbedState) -> Result<Vec<Complex64>>
where
    F: Fn(f64) -> Result<PerturbedState>,
{
    let s = family(lambda)?;
    reference
        .modes
        .iter()
        .map(|m| Ok(s.amplitude(m)))
        .chain(
            s.modes
                .iter()
                .filter(|m| !reference.modes.iter().any(|r| r.same_label(m)))
                .map(|m| {
                    Err(Error::InvalidArgument(format!(
                        "mode {m} appears away from the reference radius"
                    )))
                }),
        )
        .collect()
}

/// QFI of `λ ↦ family(λ)` with `∂_λψ` replaced by central differences of
/// step `h` and `h/2`, combined by Richardson extrapolation.
pub fn perturbed_qfi_numeric<F>(family: F, lambda: f64, h: f64) -> Result<NumericQfi>
where
    F: Fn(f64) -> Result<PerturbedState>,
{
    if !(h > 0.0 && h < lambda) {
        return Err(Error::InvalidArgument(format!("step h = {h} must lie in (0, lambda)")));
    }
    let center = family(lambda)?;
    let estimate = |step: f64| -> Result<f64> {
        let plus = amplitudes_at(&family, lambda + step, &center)?;
        let minus = amplitudes_at(&family, lambda - step, &center)?;
        let d: Vec<Complex64> = plus.iter().zip(&minus).map(|(p, m)| (p - m) / (2.0 * step)).collect();
        Ok(qfi_from_vectors(&center.amplitudes, &d))
    };
    let coarse = estimate(h)?;
    let fine = estimate(h / 2.0)?;
    let scale = coarse.abs().max(fine.abs());
    if (coarse - fine).abs() > RICHARDSON_TOL * scale {
        return Err(Error::NonConvergent { coarse, fine });
    }
    Ok(NumericQfi {
        value: (4.0 * fine - coarse) / 3.0,
        coarse,
        fine,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimize::golden_section_max;

    const N: Units = Units::NATURAL;

    fn field(q: f64, b: f64) -> FieldConfig {
        FieldConfig::new(q, b, N).unwrap()
    }

    /// Field strength giving sphere coupling `a` for unit charge.
    fn sphere_field_for(a: f64) -> FieldConfig {
        field(1.0, (a * 36.0 * 5f64.sqrt()).sqrt())
    }

    fn sm(j: u32, m: i32) -> SphereMode {
        SphereMode::new(j, m).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn ground_shift() {
        let f = field(1.3, 0.7);
        let l = 1.9;
        let e = sphere_energy_correction(sm(0, 0), &f, l);
        let expect = (1.3f64 * 0.7).powi(2) * l * l / 12.0;
        assert!(rel(e, expect) < 1e-14);
    }

    #[test]
    fn shift_matches_quadrature() {
        let f = field(0.8, 1.1);
        let l = 1.4;
        let q2b2 = (0.8f64 * 1.1).powi(2);
        for (j, m) in [(1, 0), (1, 1), (2, 1), (3, -2), (4, 3)] {
            let md = sm(j, m);
            let quad = l * l * q2b2 / 8.0 * sphere_sin2_element(md, md);
            let closed = sphere_energy_correction(md, &f, l);
            assert!(rel(quad, closed) < 1e-10, "({j},{m}): {quad} vs {closed}");
        }
        // the sign-alternating variant disagrees at odd m
        let md = sm(1, 1);
        let quad = l * l * q2b2 / 8.0 * sphere_sin2_element(md, md);
        assert!(rel(sphere_energy_correction_printed(md, &f, l), quad) > 1.0);
    }

    #[test]
    fn zeeman_splitting() {
        let f = field(1.5, 0.4);
        for j in 1..5 {
            let d = sphere_unperturbed_energy(sm(j, 1), &f, 1.2) - sphere_unperturbed_energy(sm(j, -1), &f, 1.2);
            assert!((d + 1.5 * 0.4).abs() < 1e-14);
        }
    }

    #[test]
    fn ground_state_properties() {
        let s = sphere_ground_state(&field(1.0, 0.0), 1.0).unwrap();
        assert_eq!(s.amplitudes[0], Complex64::new(1.0, 0.0));
        assert_eq!(s.amplitudes[1], Complex64::new(0.0, 0.0));

        let f = field(1.0, 2.0);
        assert!(rel(sphere_mixing(&f, 2.0), 16.0 * sphere_mixing(&f, 1.0)) < 1e-14);
        let s = sphere_ground_state(&f, 1.1).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
        // ⟨Ξ|∂Ξ⟩ = 0 for the real normalised family
        let h = 1e-6;
        let p = sphere_ground_state(&f, 1.1 + h).unwrap();
        let m = sphere_ground_state(&f, 1.1 - h).unwrap();
        let ov: f64 = (0..2)
            .map(|i| s.amplitudes[i].re * (p.amplitudes[i].re - m.amplitudes[i].re) / (2.0 * h))
            .sum();
        assert!(ov.abs() < 1e-9);
    }

    #[test]
    fn mixing_agrees_with_matrix_elements() {
        for (q, b, l) in [(1.0, 0.3, 1.0), (0.5, 1.2, 0.7), (2.0, 0.1, 2.5)] {
            let f = field(q, b);
            let general = sphere_perturbed_state(sm(0, 0), &f, l).unwrap();
            let g = general.amplitude(&Mode::Sphere(sm(2, 0))).re / general.amplitudes[0].re;
            assert!(rel(g, sphere_mixing(&f, l)) < 1e-10, "{g} vs {}", sphere_mixing(&f, l));
        }
    }

    #[test]
    fn excited_sphere_states_normalised() {
        let f = field(1.0, 0.5);
        for (j, m) in [(1, 0), (2, 1), (3, -1), (5, 5)] {
            let s = sphere_perturbed_state(sm(j, m), &f, 0.9).unwrap();
            assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sphere_qfi_forms() {
        for a in [0.1, 1.0, 10.0] {
            let f = sphere_field_for(a);
            assert!(rel(f.sphere_coupling(), a) < 1e-13);
            let star = sphere_qfi_argmax(a);
            let printed = |l: f64| sphere_ground_qfi(&f, l).unwrap().printed;
            let derived = |l: f64| sphere_ground_qfi(&f, l).unwrap().derived;
            let m = golden_section_max(printed, 0.2 * star, 3.0 * star, 1e-12 * star);
            assert!(rel(m.x, star) < 1e-6);
            let m = golden_section_max(derived, 0.2 * star, 3.0 * star, 1e-12 * star);
            assert!(rel(m.x, star) < 1e-6);
            assert!(rel(printed(star), sphere_qfi_printed_max(a)) < 1e-12);
            assert!(rel(sphere_qfi_printed_max(a), 2.4 * a.sqrt()) < 0.01);
            assert!(rel(sphere_ground_qfi(&f, star).unwrap().prefactor_ratio(), 64.0 / 9.0) < 1e-12);
        }
        // small-λ behaviour ∝ λ⁶
        let f = sphere_field_for(1.0);
        let h1 = sphere_ground_qfi(&f, 1e-3).unwrap().printed;
        let h2 = sphere_ground_qfi(&f, 2e-3).unwrap().printed;
        assert!(((h2 / h1).log2() - 6.0).abs() < 1e-6);
    }

    #[test]
    fn sphere_numeric_matches_derived() {
        for a in [0.1, 1.0] {
            let f = sphere_field_for(a);
            for l in [0.5, 1.0, 2.0] {
                let num = perturbed_qfi_numeric(|x| sphere_ground_state(&f, x), l, 1e-5).unwrap();
                let q = sphere_ground_qfi(&f, l).unwrap();
                assert!(
                    rel(num.value, q.derived) < 1e-6,
                    "a={a} l={l}: {} vs {}",
                    num.value,
                    q.derived
                );
            }
        }
        let zero = field(1.0, 0.0);
        let num = perturbed_qfi_numeric(|x| sphere_ground_state(&zero, x), 1.0, 1e-5).unwrap();
        assert_eq!(num.value, 0.0);
    }

    #[test]
    fn gauge_warning_raised() {
        let f = field(1.0, 1.0);
        assert!(sphere_ground_state(&f, 0.5).unwrap().warnings.is_empty());
        assert_eq!(sphere_ground_state(&f, 1.0).unwrap().warnings.len(), 1);
        assert!((f.sphere_gauge(2.0) - 4.0).abs() < 1e-15);
    }

    fn cm(k: f64, m: i32) -> CylinderMode {
        CylinderMode::new(k, m).unwrap()
    }

    #[test]
    fn cylinder_states() {
        let f = field(1.0, 0.5);
        let s = cylinder_perturbed_state(cm(0.0, 0), &f, 1.3).unwrap();
        assert_eq!(s.modes.len(), 1);
        assert_eq!(s.amplitudes[0], Complex64::new(1.0, 0.0));

        let l = 0.8;
        let s = cylinder_perturbed_state(cm(1.0, 0), &f, l).unwrap();
        let mix = 2.0 * 0.5 * l.powi(3);
        let raw_up = s.amplitude(&Mode::Cylinder(cm(1.0, 1))) * s.normalization.sqrt();
        let raw_down = s.amplitude(&Mode::Cylinder(cm(1.0, -1))) * s.normalization.sqrt();
        assert!((raw_up.norm() - mix).abs() < 1e-14);
        assert!((raw_down.norm() - mix).abs() < 1e-14);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);

        for (k, m) in [(0.5, 2), (2.0, -3), (-1.0, 7)] {
            let s = cylinder_perturbed_state(cm(k, m), &f, 1.1).unwrap();
            assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
            let q = cylinder_field_qfi(cm(k, m), &f, 1.1).unwrap();
            assert!(rel(s.normalization, q.normalization) < 1e-12);
        }
    }

    #[test]
    fn cylinder_qfi_forms() {
        let f = field(1.0, 0.5);
        assert_eq!(cylinder_field_qfi(cm(0.0, 3), &f, 1.0).unwrap().printed, 0.0);
        for a in [0.1, 0.5, 2.0] {
            let f = field(1.0, a);
            let l = cylinder_printed_argmax(a);
            let q = cylinder_field_qfi(cm(1.0, 0), &f, l).unwrap();
            assert!(rel(q.printed, cylinder_printed_max(a)) < 1e-9);
            assert!(rel(q.derived * q.normalization, q.printed) < 1e-12);
            let d = |x: f64| cylinder_field_qfi(cm(1.0, 0), &f, x).unwrap().derived;
            let m = golden_section_max(d, 0.1 * l, 5.0 * l, 1e-12 * l);
            assert!(rel(m.x, cylinder_derived_argmax(a)) < 1e-6);
        }
        let f = field(1.0, 0.5);
        let p = |x: f64| cylinder_field_qfi(cm(1.0, 0), &f, x).unwrap().printed;
        assert!(((p(1e3) / p(1e2)).log10() + 2.0).abs() < 1e-6);
        assert!(((p(2e-3) / p(1e-3)).log2() - 4.0).abs() < 1e-6);
    }

    #[test]
    fn cylinder_numeric_matches_derived() {
        for (a, l) in [(0.5, 1.0), (0.1, 2.0), (1.0, 0.5)] {
            let f = field(1.0, a);
            for (k, m) in [(1.0, 0), (0.7, 2)] {
                let num = perturbed_qfi_numeric(|x| cylinder_perturbed_state(cm(k, m), &f, x), l, 1e-5).unwrap();
                let q = cylinder_field_qfi(cm(k, m), &f, l).unwrap();
                assert!(rel(num.value, q.derived) < 1e-6, "{} vs {}", num.value, q.derived);
            }
        }
    }

    #[test]
    fn numeric_rejects_bad_step() {
        let f = field(1.0, 0.5);
        assert!(perturbed_qfi_numeric(|x| sphere_ground_state(&f, x), 1.0, 0.0).is_err());
        assert!(perturbed_qfi_numeric(|x| sphere_ground_state(&f, x), 1.0, 2.0).is_err());
    }
}
