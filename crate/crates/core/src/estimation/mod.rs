//! Fisher information, position measurements and radius estimation.

mod mle;
mod position;
mod qfi;
mod sampling;

pub use mle::{mle_radius, FreeSphereFamily, MleEstimate, MLE_GRID, MLE_TOL};
pub use position::{
    cylinder_theta_nodes, position_fi_cylinder, position_fi_sphere, sphere_position_grid, PositionFi,
    DEFAULT_THETA_NODES, DENSITY_FLOOR, SKIPPED_MASS_WARNING,
};
pub use qfi::{qfi_cylinder_closed, qfi_from_vectors, qfi_pure, qfi_sphere_closed};
pub use sampling::{sample_positions, sample_positions_stream, SampleRecord, SphereDensity};

use crate::geometry::SurfaceKind;
use crate::probe::{EvolvedModel, Truncation};
use crate::spectral::QuadratureGrid;
use crate::{Error, Result};

/// QFI values below this make the FI/QFI ratio undefined.
pub const QFI_FLOOR: f64 = 1e-300;

/// Position FI on whichever surface the model lives on. Cylinder models
/// use the number of `u` nodes of `grid` as the angular resolution.
pub fn position_fi(model: &EvolvedModel, grid: &QuadratureGrid) -> Result<PositionFi> {
    match model.surface() {
        SurfaceKind::Sphere => position_fi_sphere(model, grid),
        SurfaceKind::Cylinder => {
            if grid.surface() != SurfaceKind::Cylinder {
                return Err(Error::InvalidArgument(
                    "cylinder position FI needs a circle grid".into(),
                ));
            }
            position_fi_cylinder(model, grid.u_nodes().len())
        }
        SurfaceKind::Torus => unreachable!("no torus states"),
    }
}

/// Default grid resolving the position density of `model`.
pub fn default_position_grid(model: &EvolvedModel) -> QuadratureGrid {
    match model.surface() {
        SurfaceKind::Cylinder => QuadratureGrid::circle(cylinder_theta_nodes(model)),
        _ => sphere_position_grid(model),
    }
}

/// FI, QFI and their ratio for one model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ratio {
    pub ratio: f64,
    pub fi: PositionFi,
    pub qfi: f64,
}

/// `R = F / H`. Undefined when the model carries no information.
pub fn fi_qfi_ratio(model: &EvolvedModel, grid: &QuadratureGrid) -> Result<Ratio> {
    let qfi = qfi_pure(model);
    if qfi < QFI_FLOOR {
        return Err(Error::UndefinedRatio { qfi });
    }
    let fi = position_fi(model, grid)?;
    Ok(Ratio {
        ratio: fi.value / qfi,
        fi,
        qfi,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Qfi,
    Fi,
    Ratio,
    Mle,
}

/// A computed quantity with the parameters and numerical controls needed
/// to reproduce it.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimationReport {
    pub quantity: Quantity,
    pub value: f64,
    pub t: f64,
    pub lambda: f64,
    pub surface: SurfaceKind,
    /// Largest j of the state (sphere) or largest |m| (cylinder).
    pub truncation: usize,
    pub tail_mass: Option<f64>,
    pub grid_nodes: Option<usize>,
    pub skipped_mass: Option<f64>,
    pub seed: Option<u64>,
    pub warnings: Vec<String>,
}

impl EstimationReport {
    fn base(quantity: Quantity, value: f64, model: &EvolvedModel) -> Self {
        let truncation = match model.surface() {
            SurfaceKind::Sphere => model.evolved.max_j(),
            _ => model.evolved.max_abs_m(),
        };
        let tail_mass = match model.initial.truncation() {
            Truncation::JMax { tail_mass, .. } => Some(tail_mass),
            Truncation::ModeList => None,
        };
        EstimationReport {
            quantity,
            value,
            t: model.t,
            lambda: model.lambda,
            surface: model.surface(),
            truncation,
            tail_mass,
            grid_nodes: None,
            skipped_mass: None,
            seed: None,
            warnings: Vec::new(),
        }
    }

    pub fn qfi(model: &EvolvedModel) -> Self {
        Self::base(Quantity::Qfi, qfi_pure(model), model)
    }

    pub fn fi(model: &EvolvedModel, grid: &QuadratureGrid) -> Result<Self> {
        let fi = position_fi(model, grid)?;
        let mut r = Self::base(Quantity::Fi, fi.value, model);
        r.grid_nodes = Some(fi.nodes);
        r.skipped_mass = Some(fi.skipped_mass);
        r.warnings.extend(fi.warning());
        Ok(r)
    }

    pub fn ratio(model: &EvolvedModel, grid: &QuadratureGrid) -> Result<Self> {
        let r = fi_qfi_ratio(model, grid)?;
        let mut out = Self::base(Quantity::Ratio, r.ratio, model);
        out.grid_nodes = Some(r.fi.nodes);
        out.skipped_mass = Some(r.fi.skipped_mass);
        out.warnings.extend(r.fi.warning());
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probe::{lambda_derivative, superposition};
    use crate::spectral::{Mode, SphereMode};
    use crate::{Complex64, Units};
    use proptest::prelude::*;

    const N: Units = Units::NATURAL;

    #[test]
    fn eigenstate_ratio_undefined() {
        let s = superposition(&[(SphereMode::new(1, 0).unwrap(), Complex64::new(1.0, 0.0))]).unwrap();
        let m = lambda_derivative(&s, 1.0, 1.0, &N).unwrap();
        assert!(matches!(
            fi_qfi_ratio(&m, &default_position_grid(&m)),
            Err(Error::UndefinedRatio { .. })
        ));
    }

    #[test]
    fn ratio_peaks_above_half() {
        let best = (1..50)
            .map(|i| {
                let g = std::f64::consts::FRAC_PI_2 * i as f64 / 50.0;
                let s = crate::probe::sphere_two_level(1, 0, g, 0.0).unwrap();
                let m = lambda_derivative(&s, 10.0, 1.0, &N).unwrap();
                fi_qfi_ratio(&m, &default_position_grid(&m)).unwrap().ratio
            })
            .fold(0.0, f64::max);
        assert!(best > 0.5, "{best}");
    }

    #[test]
    fn report_carries_metadata() {
        let s = crate::probe::von_mises_packet(2.0, 40).unwrap();
        let m = lambda_derivative(&s, 1.0, 1.0, &N).unwrap();
        let r = EstimationReport::fi(&m, &default_position_grid(&m)).unwrap();
        assert_eq!(r.quantity, Quantity::Fi);
        assert!(r.tail_mass.unwrap() < 1e-12);
        assert!(r.grid_nodes.unwrap() > 0);
        assert!(r.value >= 0.0 && r.warnings.is_empty());
    }

    fn arb_model() -> impl Strategy<Value = EvolvedModel> {
        (
            prop::collection::vec((0u32..=4, -4i32..=4, -1.0f64..1.0, -1.0f64..1.0), 2..5),
            0.1f64..20.0,
            0.3f64..3.0,
        )
            .prop_filter_map("nonzero", |(terms, t, l)| {
                let terms: Vec<(Mode, Complex64)> = terms
                    .into_iter()
                    .map(|(j, m, re, im)| {
                        (
                            Mode::Sphere(SphereMode::new(j, m.clamp(-(j as i32), j as i32)).unwrap()),
                            Complex64::new(re, im),
                        )
                    })
                    .collect();
                let s = superposition(&terms).ok()?;
                lambda_derivative(&s, t, l, &N).ok()
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn fi_never_exceeds_qfi(model in arb_model()) {
            let grid = QuadratureGrid::sphere(512, 4 * model.evolved.max_abs_m() + 4);
            let fi = position_fi_sphere(&model, &grid).unwrap();
            prop_assert!((fi.density_mass - 1.0).abs() < 1e-10);
            prop_assert!(fi.value >= 0.0);
            prop_assert!(fi.value <= qfi_pure(&model) + 1e-9, "{} > {}", fi.value, qfi_pure(&model));
        }
    }
}
