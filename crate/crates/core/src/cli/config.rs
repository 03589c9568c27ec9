//! Experiment configuration files.
//!
//! A config is a TOML document with a top-level `kind`, an optional `seed`,
//! an optional `[units]` table and one table named after the kind.

use std::f64::consts::FRAC_PI_2;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::geometry::Surface;
use crate::Units;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Geometry,
    QfiFree,
    QfiField,
    FiPosition,
    RatioScan,
    Mle,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Geometry => "geometry",
            Kind::QfiFree => "qfi-free",
            Kind::QfiField => "qfi-field",
            Kind::FiPosition => "fi-position",
            Kind::RatioScan => "ratio-scan",
            Kind::Mle => "mle",
        }
    }
}

impl std::fmt::Display for Kind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A scan axis: a single value, an explicit list, or evenly spaced points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    Scalar(f64),
    Values(Vec<f64>),
    Linspace { start: f64, stop: f64, count: usize },
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Grid::Scalar(x) => vec![*x],
            Grid::Values(v) => v.clone(),
            Grid::Linspace { start, stop, count } => match count {
                0 => vec![],
                1 => vec![*start],
                n => (0..*n)
                    .map(|i| start + (stop - start) * i as f64 / (*n - 1) as f64)
                    .collect(),
            },
        }
    }

    fn check(&self, field: &str) -> Result<Vec<f64>, String> {
        let v = self.values();
        if v.is_empty() {
            return Err(format!("{field}: grid is empty"));
        }
        if let Some(bad) = v.iter().find(|x| !x.is_finite()) {
            return Err(format!("{field}: non-finite value {bad}"));
        }
        if v.windows(2).any(|w| w[1] <= w[0]) {
            return Err(format!("{field}: grid must be strictly increasing"));
        }
        Ok(v)
    }

    fn positive(&self, field: &str) -> Result<Vec<f64>, String> {
        let v = self.check(field)?;
        if v[0] <= 0.0 {
            return Err(format!("{field}: values must be positive"));
        }
        Ok(v)
    }
}

/// One term of an explicit sphere superposition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SphereTerm {
    pub j: u32,
    pub m: i32,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

/// One term of an explicit cylinder superposition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CylinderTerm {
    #[serde(default)]
    pub k: f64,
    pub m: i32,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

fn quarter_pi() -> f64 {
    std::f64::consts::FRAC_PI_4
}

fn default_j_cap() -> usize {
    200
}

/// Initial state of a free probe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum ProbeSpec {
    /// `cos α |Ψ00⟩ + sin α e^{iβ} |Ψ_jm⟩`.
    TwoLevel {
        j: u32,
        #[serde(default)]
        m: i32,
        #[serde(default = "quarter_pi")]
        alpha: f64,
        #[serde(default)]
        beta: f64,
    },
    VonMises {
        kappa: f64,
        #[serde(default = "default_j_cap")]
        j_max: usize,
    },
    SphereModes {
        modes: Vec<SphereTerm>,
    },
    CylinderModes {
        modes: Vec<CylinderTerm>,
    },
    /// Balanced `(m=0) + (m=J)` at k = 0.
    CylinderBalanced {
        j: i32,
    },
    /// Equal weights on the 2J values `m ∈ [−J, J−1]` at k = 0.
    CylinderUniform {
        j: i32,
    },
}

impl Default for ProbeSpec {
    fn default() -> Self {
        ProbeSpec::TwoLevel {
            j: 1,
            m: 0,
            alpha: quarter_pi(),
            beta: 0.0,
        }
    }
}

fn zero_grid() -> Grid {
    Grid::Scalar(0.0)
}

fn fd_step() -> f64 {
    crate::geometry::FD_STEP
}

fn qfi_step() -> f64 {
    1e-5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub surface: Surface,
    pub u: Grid,
    #[serde(default = "zero_grid")]
    pub v: Grid,
    #[serde(default = "zero_grid")]
    pub xi: Grid,
    #[serde(default = "fd_step")]
    pub fd_step: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QfiFreeConfig {
    #[serde(default)]
    pub probe: ProbeSpec,
    pub t: Grid,
    pub lambda: Grid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldSurface {
    Sphere,
    Cylinder,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QfiFieldConfig {
    pub surface: FieldSurface,
    #[serde(default = "one")]
    pub charge: f64,
    pub field: f64,
    pub lambda: Grid,
    /// Axial wavenumber of the cylinder state.
    #[serde(default = "one")]
    pub k: f64,
    /// Angular number of the cylinder state.
    #[serde(default)]
    pub m: i32,
    #[serde(default = "qfi_step")]
    pub fd_step: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiPositionConfig {
    #[serde(default)]
    pub probe: ProbeSpec,
    pub t: Grid,
    pub lambda: Grid,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_nodes: Option<usize>,
}

fn fig_j() -> Vec<u32> {
    vec![1, 2]
}

fn fig_t() -> Grid {
    Grid::Values(vec![10.0, 100.0])
}

fn fig_lambda() -> Grid {
    Grid::Values(vec![0.1, 1.0, 10.0])
}

/// 25 mixing angles strictly inside (0, π/2).
pub fn fig_gamma() -> Grid {
    Grid::Values((0..25).map(|i| (i + 1) as f64 * FRAC_PI_2 / 26.0).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatioScanConfig {
    #[serde(default = "fig_j")]
    pub j: Vec<u32>,
    #[serde(default = "fig_t")]
    pub t: Grid,
    #[serde(default = "fig_lambda")]
    pub lambda: Grid,
    #[serde(default = "fig_gamma")]
    pub gamma: Grid,
    #[serde(default)]
    pub m: i32,
    #[serde(default)]
    pub beta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_nodes: Option<usize>,
}

impl Default for RatioScanConfig {
    fn default() -> Self {
        RatioScanConfig {
            j: fig_j(),
            t: fig_t(),
            lambda: fig_lambda(),
            gamma: fig_gamma(),
            m: 0,
            beta: 0.0,
            theta_nodes: None,
        }
    }
}

fn default_samples() -> usize {
    10_000
}

fn default_replicas() -> usize {
    200
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MleConfig {
    #[serde(default)]
    pub probe: ProbeSpec,
    #[serde(default = "one")]
    pub t: f64,
    #[serde(default = "one")]
    pub lambda: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_replicas")]
    pub replicas: usize,
    /// Search bracket; `[λ/2, 2λ]` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interval: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_nodes: Option<usize>,
}

impl Default for MleConfig {
    fn default() -> Self {
        MleConfig {
            probe: ProbeSpec::default(),
            t: 1.0,
            lambda: 1.0,
            samples: default_samples(),
            replicas: default_replicas(),
            interval: None,
            theta_nodes: None,
        }
    }
}

/// A complete experiment description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: Kind,
    #[serde(default)]
    pub seed: u64,
    /// Default output path; the command-line flag wins.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub units: Units,
    #[serde(default, rename = "geometry", skip_serializing_if = "Option::is_none")]
    pub geometry: Option<GeometryConfig>,
    #[serde(default, rename = "qfi-free", skip_serializing_if = "Option::is_none")]
    pub qfi_free: Option<QfiFreeConfig>,
    #[serde(default, rename = "qfi-field", skip_serializing_if = "Option::is_none")]
    pub qfi_field: Option<QfiFieldConfig>,
    #[serde(default, rename = "fi-position", skip_serializing_if = "Option::is_none")]
    pub fi_position: Option<FiPositionConfig>,
    #[serde(default, rename = "ratio-scan", skip_serializing_if = "Option::is_none")]
    pub ratio_scan: Option<RatioScanConfig>,
    #[serde(default, rename = "mle", skip_serializing_if = "Option::is_none")]
    pub mle: Option<MleConfig>,
}

/// Field-level validation failure.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("config error: {0}")]
pub struct ConfigError(pub String);

impl ExperimentConfig {
    /// A config of the given kind with every optional table defaulted.
    pub fn new(kind: Kind) -> Self {
        ExperimentConfig {
            kind,
            seed: 0,
            output: None,
            units: Units::default(),
            geometry: None,
            qfi_free: None,
            qfi_field: None,
            fi_position: None,
            ratio_scan: None,
            mle: None,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let mut cfg: ExperimentConfig = toml::from_str(text).map_err(|e| ConfigError(e.to_string()))?;
        cfg.fill_defaults();
        cfg.validate()?;
        Ok(cfg)
    }

    /// Canonical serialisation; hashing this gives the config digest.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    fn fill_defaults(&mut self) {
        match self.kind {
            Kind::RatioScan if self.ratio_scan.is_none() => self.ratio_scan = Some(RatioScanConfig::default()),
            Kind::Mle if self.mle.is_none() => self.mle = Some(MleConfig::default()),
            _ => {}
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let err = |s: String| ConfigError(s);
        Units::new(self.units.hbar, self.units.mass).map_err(|e| err(format!("units: {e}")))?;
        let present = [
            (Kind::Geometry, self.geometry.is_some()),
            (Kind::QfiFree, self.qfi_free.is_some()),
            (Kind::QfiField, self.qfi_field.is_some()),
            (Kind::FiPosition, self.fi_position.is_some()),
            (Kind::RatioScan, self.ratio_scan.is_some()),
            (Kind::Mle, self.mle.is_some()),
        ];
        for (k, has) in present {
            if has && k != self.kind {
                return Err(err(format!("table [{k}] given but kind = \"{}\"", self.kind)));
            }
            if !has && k == self.kind {
                return Err(err(format!("kind = \"{k}\" needs a [{k}] table")));
            }
        }
        match self.kind {
            Kind::Geometry => {
                let g = self.geometry.as_ref().unwrap();
                g.surface
                    .validate()
                    .map_err(|e| err(format!("geometry.surface: {e}")))?;
                g.u.check("geometry.u").map_err(err)?;
                g.v.check("geometry.v").map_err(err)?;
                g.xi.check("geometry.xi").map_err(err)?;
                if g.fd_step.is_nan() || g.fd_step <= 0.0 {
                    return Err(err("geometry.fd_step: must be positive".into()));
                }
            }
            Kind::QfiFree => {
                let c = self.qfi_free.as_ref().unwrap();
                check_probe(&c.probe, "qfi-free.probe").map_err(err)?;
                c.t.check("qfi-free.t").map_err(err)?;
                c.lambda.positive("qfi-free.lambda").map_err(err)?;
            }
            Kind::QfiField => {
                let c = self.qfi_field.as_ref().unwrap();
                c.lambda.positive("qfi-field.lambda").map_err(err)?;
                if !(c.charge.is_finite() && c.field.is_finite() && c.k.is_finite()) {
                    return Err(err("qfi-field: charge, field and k must be finite".into()));
                }
                if c.fd_step.is_nan() || c.fd_step <= 0.0 {
                    return Err(err("qfi-field.fd_step: must be positive".into()));
                }
                if c.surface == FieldSurface::Sphere && (c.m != 0 || c.k != 1.0) {
                    return Err(err("qfi-field: k and m apply to the cylinder only".into()));
                }
            }
            Kind::FiPosition => {
                let c = self.fi_position.as_ref().unwrap();
                check_probe(&c.probe, "fi-position.probe").map_err(err)?;
                c.t.check("fi-position.t").map_err(err)?;
                c.lambda.positive("fi-position.lambda").map_err(err)?;
                check_nodes(c.theta_nodes, "fi-position.theta_nodes").map_err(err)?;
            }
            Kind::RatioScan => {
                let c = self.ratio_scan.as_ref().unwrap();
                if c.j.is_empty() || c.j.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(err("ratio-scan.j: must be non-empty and strictly increasing".into()));
                }
                if let Some(j) = c.j.iter().find(|&&j| (c.m.unsigned_abs()) > j || j == 0) {
                    return Err(err(format!(
                        "ratio-scan: need 0 < j and |m| <= j (j = {j}, m = {})",
                        c.m
                    )));
                }
                c.t.check("ratio-scan.t").map_err(err)?;
                c.lambda.positive("ratio-scan.lambda").map_err(err)?;
                c.gamma.check("ratio-scan.gamma").map_err(err)?;
                check_nodes(c.theta_nodes, "ratio-scan.theta_nodes").map_err(err)?;
            }
            Kind::Mle => {
                let c = self.mle.as_ref().unwrap();
                check_probe(&c.probe, "mle.probe").map_err(err)?;
                if is_cylinder(&c.probe) {
                    return Err(err("mle.probe: sampling is implemented for sphere probes".into()));
                }
                if !(c.lambda > 0.0 && c.lambda.is_finite() && c.t.is_finite()) {
                    return Err(err("mle: lambda must be positive and t finite".into()));
                }
                if c.samples == 0 || c.replicas == 0 {
                    return Err(err("mle: samples and replicas must be at least 1".into()));
                }
                if let Some([lo, hi]) = c.interval {
                    if !(lo > 0.0 && lo < c.lambda && c.lambda < hi) {
                        return Err(err(format!(
                            "mle.interval: need 0 < lo < lambda < hi, got [{lo}, {hi}]"
                        )));
                    }
                }
                check_nodes(c.theta_nodes, "mle.theta_nodes").map_err(err)?;
            }
        }
        Ok(())
    }
}

fn check_nodes(n: Option<usize>, field: &str) -> Result<(), String> {
    match n {
        Some(0) => Err(format!("{field}: must be at least 1")),
        _ => Ok(()),
    }
}

pub(crate) fn is_cylinder(p: &ProbeSpec) -> bool {
    matches!(
        p,
        ProbeSpec::CylinderModes { .. } | ProbeSpec::CylinderBalanced { .. } | ProbeSpec::CylinderUniform { .. }
    )
}

fn check_probe(p: &ProbeSpec, field: &str) -> Result<(), String> {
    crate::cli::run::build_state(p)
        .map(|_| ())
        .map_err(|e| format!("{field}: {e}"))
}
