//! Quantum Fisher information of pure free-evolution models.

use num_complex::Complex64;

use crate::geometry::SurfaceKind;
use crate::probe::{EvolvedModel, SpectralState};
use crate::spectral::Mode;
use crate::{Error, Result, Units};

/// `H = 4(⟨d|d⟩ − |⟨ψ|d⟩|²)` for a normalised `ψ` and its λ-derivative `d`.
///
/// Evaluated as `4‖d − ψ⟨ψ|d⟩‖²`, which is the same number for normalised
/// `ψ` but does not cancel catastrophically when `d` is nearly parallel to `ψ`.
pub fn qfi_from_vectors(psi: &[Complex64], d: &[Complex64]) -> f64 {
    debug_assert_eq!(psi.len(), d.len());
    let ov: Complex64 = psi.iter().zip(d).map(|(p, x)| p.conj() * x).sum();
    4.0 * psi.iter().zip(d).map(|(p, x)| (x - p * ov).norm_sqr()).sum::<f64>()
}

/// Pure-state QFI of an evolved model (1/length²).
pub fn qfi_pure(model: &EvolvedModel) -> f64 {
    qfi_from_vectors(model.psi(), &model.derivative)
}

fn weighted_variance(values: impl Iterator<Item = (f64, f64)>) -> f64 {
    let pairs: Vec<(f64, f64)> = values.collect();
    let total: f64 = pairs.iter().map(|(_, p)| p).sum();
    let mean = pairs.iter().map(|(v, p)| v * p).sum::<f64>() / total;
    pairs.iter().map(|(v, p)| (v - mean).powi(2) * p).sum::<f64>() / total
}

fn prefactor(t: f64, lambda: f64, units: &Units) -> f64 {
    4.0 * t * t * units.hbar * units.hbar / (units.mass * units.mass * lambda.powi(6))
}

/// `H = 4t²ħ²/(M²λ⁶) Var[j(j+1)]`.
pub fn qfi_sphere_closed(state: &SpectralState, t: f64, lambda: f64, units: &Units) -> Result<f64> {
    if state.surface() != SurfaceKind::Sphere {
        return Err(Error::InvalidArgument("sphere closed form needs a sphere state".into()));
    }
    let var = weighted_variance(state.iter().map(|(mode, c)| match mode {
        Mode::Sphere(s) => (s.casimir(), c.norm_sqr()),
        Mode::Cylinder(_) => unreachable!(),
    }));
    Ok(prefactor(t, lambda, units) * var)
}

/// `H = 4t²ħ²/(M²λ⁶) Var[m² − 1/4]` over the m-marginal of the state.
pub fn qfi_cylinder_closed(state: &SpectralState, t: f64, lambda: f64, units: &Units) -> Result<f64> {
    if state.surface() != SurfaceKind::Cylinder {
        return Err(Error::InvalidArgument(
            "cylinder closed form needs a cylinder state".into(),
        ));
    }
    let var = weighted_variance(state.iter().map(|(mode, c)| match mode {
        Mode::Cylinder(cm) => (cm.shifted_m2(), c.norm_sqr()),
        Mode::Sphere(_) => unreachable!(),
    }));
    Ok(prefactor(t, lambda, units) * var)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probe::{lambda_derivative, sphere_two_level, superposition, von_mises_packet};
    use crate::spectral::{CylinderMode, SphereMode};
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_4;

    const N: Units = Units::NATURAL;

    fn cyl(k: f64, m: i32) -> Mode {
        Mode::Cylinder(CylinderMode::new(k, m).unwrap())
    }

    fn one() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    #[test]
    fn eigenstate_has_zero_qfi() {
        let s = superposition(&[(SphereMode::new(3, 1).unwrap(), one())]).unwrap();
        let m = lambda_derivative(&s, 2.0, 1.0, &N).unwrap();
        assert!(qfi_pure(&m).abs() < 1e-12);
        assert_eq!(qfi_sphere_closed(&s, 2.0, 1.0, &N).unwrap(), 0.0);
    }

    #[test]
    fn balanced_two_level() {
        let s = sphere_two_level(1, 0, FRAC_PI_4, 0.0).unwrap();
        let m = lambda_derivative(&s, 1.0, 1.0, &N).unwrap();
        assert!((qfi_pure(&m) - 4.0).abs() < 1e-12);

        let s = sphere_two_level(2, 0, FRAC_PI_4, 0.0).unwrap();
        let (t, l) = (1.3f64, 0.8f64);
        let expect = 36.0 * t * t / l.powi(6);
        let h = qfi_sphere_closed(&s, t, l, &N).unwrap();
        assert!(((h - expect) / expect).abs() < 1e-12);
    }

    #[test]
    fn relative_phase_does_not_matter() {
        let base = {
            let s = sphere_two_level(2, 1, 0.6, 0.0).unwrap();
            qfi_pure(&lambda_derivative(&s, 1.0, 1.0, &N).unwrap())
        };
        for beta in [std::f64::consts::PI / 3.0, std::f64::consts::PI] {
            let s = sphere_two_level(2, 1, 0.6, beta).unwrap();
            let h = qfi_pure(&lambda_derivative(&s, 1.0, 1.0, &N).unwrap());
            assert!((h - base).abs() < 1e-12 * base);
        }
    }

    #[test]
    fn von_mises_closed_form() {
        let k = 2.0f64;
        let s = von_mises_packet(k, 60).unwrap();
        let h = qfi_pure(&lambda_derivative(&s, 1.0, 1.0, &N).unwrap());
        let coth = 1.0 / k.tanh();
        let exact = 1.0 + k * k * (2.0 - coth * coth);
        assert!(((h - exact) / exact).abs() < 1e-8, "{h} vs {exact}");
    }

    #[test]
    fn cylinder_examples() {
        let s = superposition(&[(cyl(0.0, 2), one()), (cyl(1.5, 2), one()), (cyl(-0.3, 2), one())]).unwrap();
        assert!(qfi_cylinder_closed(&s, 3.0, 1.0, &N).unwrap() < 1e-20);
        assert!(qfi_pure(&lambda_derivative(&s, 3.0, 1.0, &N).unwrap()) < 1e-12);

        let j = 7;
        let s = superposition(&[(cyl(0.0, 0), one()), (cyl(0.0, j), one())]).unwrap();
        let (t, l) = (0.7f64, 1.4f64);
        let expect = t * t * (j as f64).powi(4) / l.powi(6);
        let h = qfi_cylinder_closed(&s, t, l, &N).unwrap();
        assert!(((h - expect) / expect).abs() < 1e-12);
    }

    #[test]
    fn cylinder_uniform_asymptote() {
        let j = 50;
        let terms: Vec<(Mode, Complex64)> = (-j..j).map(|m| (cyl(0.0, m), one())).collect();
        let s = superposition(&terms).unwrap();
        let h = qfi_cylinder_closed(&s, 1.0, 1.0, &N).unwrap();
        let asym = 16.0 * (j as f64).powi(4) / 45.0;
        assert!((h / asym - 1.0).abs() < 0.02, "{}", h / asym);
    }

    #[test]
    fn cylinder_qfi_ignores_k_content() {
        let a = superposition(&[(cyl(0.0, 1), one()), (cyl(0.0, 4), one())]).unwrap();
        let b = superposition(&[
            (cyl(0.3, 1), Complex64::new(0.5f64.sqrt(), 0.0)),
            (cyl(-2.0, 1), Complex64::new(0.0, 0.5f64.sqrt())),
            (cyl(1.0, 4), one()),
        ])
        .unwrap();
        let ha = qfi_pure(&lambda_derivative(&a, 2.0, 1.1, &N).unwrap());
        let hb = qfi_pure(&lambda_derivative(&b, 2.0, 1.1, &N).unwrap());
        assert!((ha - hb).abs() < 1e-10 * ha);
    }

    fn arb_sphere() -> impl Strategy<Value = SpectralState> {
        prop::collection::vec((0u32..=8, -8i32..=8, -1.0f64..1.0, -1.0f64..1.0), 1..8).prop_filter_map(
            "nonzero",
            |terms| {
                let terms: Vec<(SphereMode, Complex64)> = terms
                    .into_iter()
                    .map(|(j, m, re, im)| {
                        (
                            SphereMode::new(j, m.clamp(-(j as i32), j as i32)).unwrap(),
                            Complex64::new(re, im),
                        )
                    })
                    .collect();
                superposition(&terms).ok()
            },
        )
    }

    fn arb_cylinder() -> impl Strategy<Value = SpectralState> {
        prop::collection::vec((-2.0f64..2.0, -8i32..=8, -1.0f64..1.0, -1.0f64..1.0), 1..8).prop_filter_map(
            "nonzero",
            |terms| {
                let terms: Vec<(Mode, Complex64)> = terms
                    .into_iter()
                    .map(|(k, m, re, im)| (cyl(k, m), Complex64::new(re, im)))
                    .collect();
                superposition(&terms).ok()
            },
        )
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    proptest! {
        #[test]
        fn sphere_closed_form_agrees(s in arb_sphere(), t in 0.1f64..5.0, l in 0.3f64..3.0) {
            let h = qfi_pure(&lambda_derivative(&s, t, l, &N).unwrap());
            let c = qfi_sphere_closed(&s, t, l, &N).unwrap();
            prop_assert!(h >= 0.0);
            prop_assert!(c < 1e-12 * (1.0 + h) || rel(h, c) < 1e-10, "{} vs {}", h, c);
        }

        #[test]
        fn cylinder_closed_form_agrees(s in arb_cylinder(), t in 0.1f64..5.0, l in 0.3f64..3.0) {
            let h = qfi_pure(&lambda_derivative(&s, t, l, &N).unwrap());
            let c = qfi_cylinder_closed(&s, t, l, &N).unwrap();
            prop_assert!(c < 1e-12 * (1.0 + h) || rel(h, c) < 1e-10, "{} vs {}", h, c);
        }

        #[test]
        fn time_scaling_is_quadratic(s in arb_sphere(), t in 0.1f64..5.0, c in 0.5f64..4.0) {
            let h1 = qfi_sphere_closed(&s, t, 1.0, &N).unwrap();
            let h2 = qfi_sphere_closed(&s, c * t, 1.0, &N).unwrap();
            prop_assert!((h2 - c * c * h1).abs() <= 1e-12 * h2.max(1e-300));
        }

        #[test]
        fn radius_scaling_is_inverse_sixth(s in arb_sphere(), t in 0.1f64..5.0) {
            let h1 = qfi_pure(&lambda_derivative(&s, t, 1.0, &N).unwrap());
            prop_assume!(h1 > 1e-6);
            for l in [0.5f64, 2.0, 4.0] {
                let h = qfi_pure(&lambda_derivative(&s, t, l, &N).unwrap());
                let slope = (h / h1).ln() / l.ln();
                prop_assert!((slope + 6.0).abs() < 1e-9, "slope {}", slope);
            }
        }

        #[test]
        fn global_phase_invariant(s in arb_sphere(), g in 0.0f64..6.3) {
            let terms: Vec<(Mode, Complex64)> = s.iter().map(|(m, c)| (*m, c * Complex64::from_polar(1.0, g))).collect();
            let r = superposition(&terms).unwrap();
            let a = qfi_pure(&lambda_derivative(&s, 1.0, 1.0, &N).unwrap());
            let b = qfi_pure(&lambda_derivative(&r, 1.0, 1.0, &N).unwrap());
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a));
        }
    }
}
