//! Execution of experiment configs into result tables.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::cli::config::{ConfigError, ExperimentConfig, FieldSurface, Kind, ProbeSpec};
use crate::estimation::{
    default_position_grid, fi_qfi_ratio, mle_radius, position_fi, qfi_cylinder_closed, qfi_pure, qfi_sphere_closed,
    sample_positions_stream, FreeSphereFamily, MLE_GRID, MLE_TOL, QFI_FLOOR,
};
use crate::geometry::{self, closed_form, Surface, SurfaceKind};
use crate::magnetic::{
    cylinder_field_qfi, cylinder_perturbed_state, perturbed_qfi_numeric, sphere_ground_qfi, sphere_ground_state,
    FieldConfig,
};
use crate::probe::{
    lambda_derivative, sphere_two_level, superposition, von_mises_packet, EvolvedModel, SpectralState, Truncation,
};
use crate::spectral::{CylinderMode, QuadratureGrid, SphereMode};
use crate::{Error, Units};

/// One CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    pub fn render(&self) -> String {
        match self {
            Cell::Float(x) => format!("{x:.15e}"),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Float(x) => Some(*x),
            Cell::Int(i) => Some(*i as f64),
            Cell::Text(_) => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<i64> for Cell {
    fn from(x: i64) -> Self {
        Cell::Int(x)
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

/// Ordered rows of one experiment plus a free-form summary.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub kind: Kind,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Numeric controls echoed into the metadata line.
    pub controls: Vec<(String, String)>,
    pub summary: Vec<(String, String)>,
}

impl ResultTable {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| *c == name)
    }

    /// Rows whose `warnings` cell is not empty.
    pub fn warning_count(&self) -> usize {
        let Some(i) = self.column("warnings") else { return 0 };
        self.rows
            .iter()
            .filter(|r| matches!(&r[i], Cell::Text(s) if !s.is_empty()))
            .count()
    }
}

/// Column layout of each experiment kind. Every table ends in `warnings`.
pub fn columns(kind: Kind) -> &'static [&'static str] {
    match kind {
        Kind::Geometry => &[
            "surface",
            "radius",
            "center",
            "u",
            "v",
            "xi",
            "g_uu",
            "g_uv",
            "g_vv",
            "alpha_uu",
            "alpha_uv",
            "alpha_vu",
            "alpha_vv",
            "mean_curvature",
            "gaussian_curvature",
            "v_s",
            "v_s_closed",
            "ricci",
            "ricci_closed",
            "ricci_fd",
            "quantization_gap",
            "warnings",
        ],
        Kind::QfiFree => &[
            "probe",
            "t",
            "lambda",
            "hbar",
            "mass",
            "qfi",
            "qfi_closed",
            "rel_diff",
            "truncation",
            "tail_mass",
            "warnings",
        ],
        Kind::QfiField => &[
            "surface",
            "mode",
            "charge",
            "field",
            "lambda",
            "hbar",
            "mass",
            "coupling",
            "gauge",
            "qfi_printed",
            "qfi_derived",
            "qfi_numeric",
            "normalization",
            "warnings",
        ],
        Kind::FiPosition => &[
            "probe",
            "t",
            "lambda",
            "hbar",
            "mass",
            "fi",
            "qfi",
            "ratio",
            "skipped_mass",
            "density_mass",
            "nodes",
            "warnings",
        ],
        Kind::RatioScan => &[
            "j",
            "m",
            "beta",
            "t",
            "lambda",
            "gamma",
            "fi",
            "qfi",
            "ratio",
            "skipped_mass",
            "warnings",
        ],
        Kind::Mle => &[
            "replica",
            "stream",
            "samples",
            "probe",
            "t",
            "lambda_true",
            "lo",
            "hi",
            "lambda_hat",
            "log_likelihood",
            "warnings",
        ],
    }
}

/// Builds the initial state described by a probe spec.
pub fn build_state(p: &ProbeSpec) -> crate::Result<SpectralState> {
    let one = Complex64::new(1.0, 0.0);
    match p {
        ProbeSpec::TwoLevel { j, m, alpha, beta } => sphere_two_level(*j, *m, *alpha, *beta),
        ProbeSpec::VonMises { kappa, j_max } => von_mises_packet(*kappa, *j_max),
        ProbeSpec::SphereModes { modes } => {
            let terms = modes
                .iter()
                .map(|t| Ok((SphereMode::new(t.j, t.m)?, Complex64::new(t.re, t.im))))
                .collect::<crate::Result<Vec<_>>>()?;
            superposition(&terms)
        }
        ProbeSpec::CylinderModes { modes } => {
            let terms = modes
                .iter()
                .map(|t| Ok((CylinderMode::new(t.k, t.m)?, Complex64::new(t.re, t.im))))
                .collect::<crate::Result<Vec<_>>>()?;
            superposition(&terms)
        }
        ProbeSpec::CylinderBalanced { j } => {
            superposition(&[(CylinderMode::new(0.0, 0)?, one), (CylinderMode::new(0.0, *j)?, one)])
        }
        ProbeSpec::CylinderUniform { j } => {
            if *j < 1 {
                return Err(Error::InvalidArgument(format!(
                    "uniform cylinder probe needs J >= 1, got {j}"
                )));
            }
            let terms = (-j..*j)
                .map(|m| Ok((CylinderMode::new(0.0, m)?, one)))
                .collect::<crate::Result<Vec<_>>>()?;
            superposition(&terms)
        }
    }
}

/// Short, stable text label for a probe spec.
pub fn describe_probe(p: &ProbeSpec) -> String {
    match p {
        ProbeSpec::TwoLevel { j, m, alpha, beta } => {
            format!("two-level j={j} m={m} alpha={alpha:.15e} beta={beta:.15e}")
        }
        ProbeSpec::VonMises { kappa, j_max } => format!("von-mises kappa={kappa:.15e} j_cap={j_max}"),
        ProbeSpec::SphereModes { modes } => {
            let terms: Vec<String> = modes
                .iter()
                .map(|t| format!("({},{}):{:.15e}{:+.15e}i", t.j, t.m, t.re, t.im))
                .collect();
            format!("sphere-modes {}", terms.join(" "))
        }
        ProbeSpec::CylinderModes { modes } => {
            let terms: Vec<String> = modes
                .iter()
                .map(|t| format!("({:.15e},{}):{:.15e}{:+.15e}i", t.k, t.m, t.re, t.im))
                .collect();
            format!("cylinder-modes {}", terms.join(" "))
        }
        ProbeSpec::CylinderBalanced { j } => format!("cylinder-balanced J={j}"),
        ProbeSpec::CylinderUniform { j } => format!("cylinder-uniform J={j}"),
    }
}

fn cfg_err(e: impl std::fmt::Display) -> ConfigError {
    ConfigError(e.to_string())
}

fn position_grid(model: &EvolvedModel, theta_nodes: Option<usize>) -> QuadratureGrid {
    match (model.surface(), theta_nodes) {
        (_, None) => default_position_grid(model),
        (SurfaceKind::Cylinder, Some(n)) => QuadratureGrid::circle(n),
        (_, Some(n)) => QuadratureGrid::sphere(n, 4 * model.evolved.max_abs_m() + 4),
    }
}

fn join(w: &[String]) -> Cell {
    Cell::Text(w.join("; "))
}

/// Runs an experiment. Rows come back in scan order whatever the
/// thread count.
pub fn run(cfg: &ExperimentConfig) -> Result<ResultTable, ConfigError> {
    cfg.validate()?;
    let units = cfg.units;
    let (rows, controls, summary) = match cfg.kind {
        Kind::Geometry => run_geometry(cfg, &units)?,
        Kind::QfiFree => run_qfi_free(cfg, &units)?,
        Kind::QfiField => run_qfi_field(cfg, &units)?,
        Kind::FiPosition => run_fi_position(cfg, &units)?,
        Kind::RatioScan => run_ratio_scan(cfg, &units)?,
        Kind::Mle => run_mle(cfg, &units)?,
    };
    let columns = columns(cfg.kind).to_vec();
    debug_assert!(rows.iter().all(|r| r.len() == columns.len()));
    Ok(ResultTable {
        kind: cfg.kind,
        columns,
        rows,
        controls,
        summary,
    })
}

type Output = (Vec<Vec<Cell>>, Vec<(String, String)>, Vec<(String, String)>);

fn kv(k: &str, v: impl ToString) -> (String, String) {
    (k.to_string(), v.to_string())
}

fn run_geometry(cfg: &ExperimentConfig, units: &Units) -> Result<Output, ConfigError> {
    let g = cfg.geometry.as_ref().unwrap();
    let surface = g.surface.validate().map_err(cfg_err)?;
    let (name, radius, center) = match surface {
        Surface::Sphere { radius } => ("sphere", radius, f64::NAN),
        Surface::Cylinder { radius } => ("cylinder", radius, f64::NAN),
        Surface::Torus { tube, center } => ("torus", tube, center),
    };
    let mut points = Vec::new();
    for &u in &g.u.values() {
        for &v in &g.v.values() {
            for &xi in &g.xi.values() {
                points.push((u, v, xi));
            }
        }
    }
    let rows = points
        .par_iter()
        .map(|&(u, v, xi)| -> Result<Vec<Cell>, ConfigError> {
            let p = surface.point(u, v).map_err(|e| cfg_err(format!("geometry: {e}")))?;
            let mut row: Vec<Cell> = vec![name.into(), radius.into(), center.into(), u.into(), v.into(), xi.into()];
            match geometry::geometry_report(&surface, &p, units) {
                Ok(r) => {
                    let fd = geometry::ricci_scalar_fd(&surface, &p, g.fd_step).unwrap_or(f64::NAN);
                    let gap = geometry::quantization_gap(&surface, &p, xi, units).unwrap_or(f64::NAN);
                    row.extend(
                        [
                            r.metric[0][0],
                            r.metric[0][1],
                            r.metric[1][1],
                            r.shape_operator[0][0],
                            r.shape_operator[0][1],
                            r.shape_operator[1][0],
                            r.shape_operator[1][1],
                            r.mean_curvature,
                            r.gaussian_curvature,
                            r.surface_potential,
                            closed_form::surface_potential(&surface, &p, units),
                            r.ricci,
                            closed_form::ricci(&surface, &p),
                            fd,
                            gap,
                        ]
                        .map(Cell::Float),
                    );
                    row.push("".into());
                }
                Err(d) => {
                    row.extend(std::iter::repeat_n(Cell::Float(f64::NAN), 15));
                    row.push(d.to_string().into());
                }
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok((rows, vec![kv("fd_step", format!("{:e}", g.fd_step))], vec![]))
}

fn truncation_cells(state: &SpectralState) -> (Cell, Cell) {
    match state.truncation() {
        Truncation::JMax { j_max, tail_mass } => (Cell::Int(j_max as i64), Cell::Float(tail_mass)),
        Truncation::ModeList => (Cell::Int(state.modes().len() as i64), Cell::Float(0.0)),
    }
}

fn run_qfi_free(cfg: &ExperimentConfig, units: &Units) -> Result<Output, ConfigError> {
    let c = cfg.qfi_free.as_ref().unwrap();
    let state = build_state(&c.probe).map_err(cfg_err)?;
    let label = describe_probe(&c.probe);
    let mut points = Vec::new();
    for &t in &c.t.values() {
        for &l in &c.lambda.values() {
            points.push((t, l));
        }
    }
    let (trunc, tail) = truncation_cells(&state);
    let rows = points
        .par_iter()
        .map(|&(t, l)| {
            let model = lambda_derivative(&state, t, l, units).expect("validated parameters");
            let h = qfi_pure(&model);
            let closed = match state.surface() {
                SurfaceKind::Cylinder => qfi_cylinder_closed(&state, t, l, units),
                _ => qfi_sphere_closed(&state, t, l, units),
            }
            .expect("surface matches");
            let rel = if closed == 0.0 {
                (h - closed).abs()
            } else {
                ((h - closed) / closed).abs()
            };
            vec![
                label.clone().into(),
                t.into(),
                l.into(),
                units.hbar.into(),
                units.mass.into(),
                h.into(),
                closed.into(),
                rel.into(),
                trunc.clone(),
                tail.clone(),
                "".into(),
            ]
        })
        .collect();
    Ok((rows, vec![kv("von_mises_tail", "1e-12")], vec![]))
}

fn run_qfi_field(cfg: &ExperimentConfig, units: &Units) -> Result<Output, ConfigError> {
    let c = cfg.qfi_field.as_ref().unwrap();
    let field = FieldConfig::new(c.charge, c.field, *units).map_err(cfg_err)?;
    let mode = CylinderMode::new(c.k, c.m).map_err(cfg_err)?;
    let rows = c
        .lambda
        .values()
        .par_iter()
        .map(|&l| {
            let mut warnings = Vec::new();
            let (label, coupling, gauge, printed, derived, norm, numeric) = match c.surface {
                FieldSurface::Sphere => {
                    let q = sphere_ground_qfi(&field, l).expect("validated radius");
                    let g = q.coupling * l.powi(4);
                    warnings.extend(q.warnings.iter().cloned());
                    let num = perturbed_qfi_numeric(|x| sphere_ground_state(&field, x), l, c.fd_step);
                    (
                        "(j=0, m=0)".to_string(),
                        q.coupling,
                        q.gauge,
                        q.printed,
                        q.derived,
                        1.0 + g * g,
                        num,
                    )
                }
                FieldSurface::Cylinder => {
                    let q = cylinder_field_qfi(mode, &field, l).expect("validated radius");
                    warnings.extend(q.warnings.iter().cloned());
                    let num = perturbed_qfi_numeric(|x| cylinder_perturbed_state(mode, &field, x), l, c.fd_step);
                    (
                        mode.to_string(),
                        q.coupling,
                        q.gauge,
                        q.printed,
                        q.derived,
                        q.normalization,
                        num,
                    )
                }
            };
            let numeric = match numeric {
                Ok(n) => n.value,
                Err(e) => {
                    warnings.push(e.to_string());
                    f64::NAN
                }
            };
            vec![
                match c.surface {
                    FieldSurface::Sphere => "sphere",
                    FieldSurface::Cylinder => "cylinder",
                }
                .into(),
                label.into(),
                c.charge.into(),
                c.field.into(),
                l.into(),
                units.hbar.into(),
                units.mass.into(),
                coupling.into(),
                gauge.into(),
                printed.into(),
                derived.into(),
                numeric.into(),
                norm.into(),
                join(&warnings),
            ]
        })
        .collect();
    Ok((rows, vec![kv("fd_step", format!("{:e}", c.fd_step))], vec![]))
}

fn nodes_control(n: Option<usize>) -> String {
    n.map_or("auto".to_string(), |n| n.to_string())
}

fn run_fi_position(cfg: &ExperimentConfig, units: &Units) -> Result<Output, ConfigError> {
    let c = cfg.fi_position.as_ref().unwrap();
    let state = build_state(&c.probe).map_err(cfg_err)?;
    let label = describe_probe(&c.probe);
    let mut points = Vec::new();
    for &t in &c.t.values() {
        for &l in &c.lambda.values() {
            points.push((t, l));
        }
    }
    let rows = points
        .par_iter()
        .map(|&(t, l)| {
            let model = lambda_derivative(&state, t, l, units).expect("validated parameters");
            let grid = position_grid(&model, c.theta_nodes);
            let h = qfi_pure(&model);
            let mut warnings = Vec::new();
            let (fi, skipped, mass, nodes) = match position_fi(&model, &grid) {
                Ok(f) => {
                    warnings.extend(f.warning());
                    (f.value, f.skipped_mass, f.density_mass, f.nodes as i64)
                }
                Err(e) => {
                    warnings.push(e.to_string());
                    (f64::NAN, f64::NAN, f64::NAN, grid.len() as i64)
                }
            };
            let ratio = if h < QFI_FLOOR {
                warnings.push(Error::UndefinedRatio { qfi: h }.to_string());
                f64::NAN
            } else {
                fi / h
            };
            vec![
                label.clone().into(),
                t.into(),
                l.into(),
                units.hbar.into(),
                units.mass.into(),
                fi.into(),
                h.into(),
                ratio.into(),
                skipped.into(),
                mass.into(),
                nodes.into(),
                join(&warnings),
            ]
        })
        .collect();
    Ok((
        rows,
        vec![
            kv("theta_nodes", nodes_control(c.theta_nodes)),
            kv("density_floor", "1e-14"),
        ],
        vec![],
    ))
}

fn run_ratio_scan(cfg: &ExperimentConfig, units: &Units) -> Result<Output, ConfigError> {
    let c = cfg.ratio_scan.as_ref().unwrap();
    let mut points = Vec::new();
    for &j in &c.j {
        for &t in &c.t.values() {
            for &l in &c.lambda.values() {
                for &g in &c.gamma.values() {
                    points.push((j, t, l, g));
                }
            }
        }
    }
    let rows = points
        .par_iter()
        .map(|&(j, t, l, g)| -> Result<Vec<Cell>, ConfigError> {
            let state = sphere_two_level(j, c.m, g, c.beta).map_err(cfg_err)?;
            let model = lambda_derivative(&state, t, l, units).map_err(cfg_err)?;
            let grid = position_grid(&model, c.theta_nodes);
            let mut warnings = Vec::new();
            let (fi, h, ratio, skipped) = match fi_qfi_ratio(&model, &grid) {
                Ok(r) => {
                    warnings.extend(r.fi.warning());
                    (r.fi.value, r.qfi, r.ratio, r.fi.skipped_mass)
                }
                Err(e) => {
                    warnings.push(e.to_string());
                    (f64::NAN, qfi_pure(&model), f64::NAN, f64::NAN)
                }
            };
            Ok(vec![
                Cell::Int(j as i64),
                Cell::Int(c.m as i64),
                c.beta.into(),
                t.into(),
                l.into(),
                g.into(),
                fi.into(),
                h.into(),
                ratio.into(),
                skipped.into(),
                join(&warnings),
            ])
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok((
        rows,
        vec![
            kv("theta_nodes", nodes_control(c.theta_nodes)),
            kv("density_floor", "1e-14"),
        ],
        vec![],
    ))
}

/// Summary statistics of a set of radius estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MleSummary {
    pub estimates: usize,
    /// Replicas without an estimate (boundary hits, sampling failures).
    pub failures: usize,
    pub mean: f64,
    pub variance: f64,
    pub fisher: f64,
    pub qfi: f64,
    /// `Var(λ̂)·N·F`; 1 for an efficient estimator.
    pub efficiency: f64,
    /// `Var(λ̂)·N·H`; at least 1 by the quantum Cramér–Rao bound.
    pub quantum_ratio: f64,
    /// `(mean − λ) / stderr`.
    pub bias_z: f64,
}

pub fn summarize_mle(estimates: &[f64], failures: usize, lambda: f64, n: usize, fisher: f64, qfi: f64) -> MleSummary {
    let k = estimates.len() as f64;
    let mean = estimates.iter().sum::<f64>() / k;
    let variance = estimates.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0);
    MleSummary {
        estimates: estimates.len(),
        failures,
        mean,
        variance,
        fisher,
        qfi,
        efficiency: variance * n as f64 * fisher,
        quantum_ratio: variance * n as f64 * qfi,
        bias_z: (mean - lambda) / (variance / k).sqrt(),
    }
}

fn run_mle(cfg: &ExperimentConfig, units: &Units) -> Result<Output, ConfigError> {
    let c = cfg.mle.as_ref().unwrap();
    let state = build_state(&c.probe).map_err(cfg_err)?;
    let label = describe_probe(&c.probe);
    let model = lambda_derivative(&state, c.t, c.lambda, units).map_err(cfg_err)?;
    let family = FreeSphereFamily::new(&state, c.t, units).map_err(cfg_err)?;
    let [lo, hi] = c.interval.unwrap_or([c.lambda / 2.0, 2.0 * c.lambda]);
    let results: Vec<(Option<f64>, Vec<Cell>)> = (0..c.replicas)
        .into_par_iter()
        .map(|r| {
            let mut warnings = Vec::new();
            let (hat, ll) = match sample_positions_stream(&model, c.samples, cfg.seed, r as u64).and_then(|rec| {
                if rec.envelope_violations > 0 {
                    warnings.push(format!("{} proposals above envelope", rec.envelope_violations));
                }
                mle_radius(&rec, &family, (lo, hi))
            }) {
                Ok(e) => (Some(e.lambda), e.log_likelihood),
                Err(e) => {
                    warnings.push(e.to_string());
                    (None, f64::NAN)
                }
            };
            let row = vec![
                Cell::Int(r as i64),
                Cell::Int(r as i64),
                Cell::Int(c.samples as i64),
                label.clone().into(),
                c.t.into(),
                c.lambda.into(),
                lo.into(),
                hi.into(),
                hat.unwrap_or(f64::NAN).into(),
                ll.into(),
                join(&warnings),
            ];
            (hat, row)
        })
        .collect();
    let estimates: Vec<f64> = results.iter().filter_map(|(h, _)| *h).collect();
    let failures = results.len() - estimates.len();
    let rows = results.into_iter().map(|(_, r)| r).collect();

    let grid = position_grid(&model, c.theta_nodes);
    let fisher = position_fi(&model, &grid).map_err(cfg_err)?.value;
    let qfi = qfi_pure(&model);
    let mut summary = vec![kv("fisher", format!("{fisher:.15e}")), kv("qfi", format!("{qfi:.15e}"))];
    if estimates.len() >= 2 {
        let s = summarize_mle(&estimates, failures, c.lambda, c.samples, fisher, qfi);
        summary.extend([
            kv("estimates", s.estimates),
            kv("failures", s.failures),
            kv("mean", format!("{:.15e}", s.mean)),
            kv("variance", format!("{:.15e}", s.variance)),
            kv("var_n_fisher", format!("{:.15e}", s.efficiency)),
            kv("var_n_qfi", format!("{:.15e}", s.quantum_ratio)),
            kv("bias_z", format!("{:.6}", s.bias_z)),
        ]);
    }
    let controls = vec![
        kv("samples", c.samples),
        kv("replicas", c.replicas),
        kv("interval", format!("{lo:e}..{hi:e}")),
        kv("grid", MLE_GRID),
        kv("tol", format!("{MLE_TOL:e}")),
        kv("theta_nodes", nodes_control(c.theta_nodes)),
        kv("rng", "chacha8 stream=replica"),
    ];
    Ok((rows, controls, summary))
}
