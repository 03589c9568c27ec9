//! Differential geometry of the example surfaces.
//!
//! Every quantity is computed along a general route (embedding derivatives,
//! Weingarten coefficients, Christoffel symbols) and the per-surface closed
//! forms live in [`closed_form`] so the two can be compared.
//!
//! Chart coordinates are `(u, v)`:
//!
//! | surface  | u        | v        |
//! |----------|----------|----------|
//! | sphere   | θ ∈ [0,π] | φ ∈ [0,2π) |
//! | cylinder | θ ∈ [0,2π) | z ∈ ℝ    |
//! | torus    | θ ∈ [0,2π) | φ ∈ [0,2π) |

#![allow(clippy::needless_range_loop)]

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::{Error, Result, Units};

/// Row-major 2×2 matrix indexed by chart coordinates.
pub type Mat2 = [[f64; 2]; 2];

type Vec3 = [f64; 3];

/// Relative determinant floor below which a chart point is degenerate.
pub const DEGENERACY_FLOOR: f64 = 1e-14;

/// Default relative step for the finite-difference Ricci path.
pub const FD_STEP: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SurfaceKind {
    Sphere,
    Cylinder,
    Torus,
}

impl SurfaceKind {
    pub fn name(self) -> &'static str {
        match self {
            SurfaceKind::Sphere => "sphere",
            SurfaceKind::Cylinder => "cylinder",
            SurfaceKind::Torus => "torus",
        }
    }
}

impl std::fmt::Display for SurfaceKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A surface embedded in ℝ³. Construct through [`Surface::sphere`],
/// [`Surface::cylinder`] or [`Surface::torus`] so the invariants hold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum Surface {
    Sphere {
        radius: f64,
    },
    Cylinder {
        radius: f64,
    },
    /// `tube` is the radius r of the generating circle, `center` the
    /// distance R from the circle centre to the symmetry axis.
    Torus {
        tube: f64,
        center: f64,
    },
}

/// A point of the coordinate chart, see the module docs for the ranges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePoint {
    pub u: f64,
    pub v: f64,
}

/// Marker for a chart point where the metric is singular (sphere poles).
/// This is a property of the coordinates, not a failure of the surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Degenerate {
    pub det_g: f64,
}

impl std::fmt::Display for Degenerate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "degenerate chart point (det g = {:e})", self.det_g)
    }
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidSurface(format!(
            "{name} must be positive and finite, got {x}"
        )))
    }
}

fn wrap_angle(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU
    if r >= TAU {
        0.0
    } else {
        r
    }
}

impl Surface {
    pub fn sphere(radius: f64) -> Result<Self> {
        positive("sphere radius", radius)?;
        Ok(Surface::Sphere { radius })
    }

    pub fn cylinder(radius: f64) -> Result<Self> {
        positive("cylinder radius", radius)?;
        Ok(Surface::Cylinder { radius })
    }

    pub fn torus(tube: f64, center: f64) -> Result<Self> {
        positive("torus tube radius", tube)?;
        positive("torus centre distance", center)?;
        if center <= tube {
            return Err(Error::InvalidSurface(format!(
                "torus needs R > r for an embedded surface (r = {tube}, R = {center})"
            )));
        }
        Ok(Surface::Torus { tube, center })
    }

    /// Re-checks the invariants; useful after deserialisation.
    pub fn validate(self) -> Result<Self> {
        match self {
            Surface::Sphere { radius } => Surface::sphere(radius),
            Surface::Cylinder { radius } => Surface::cylinder(radius),
            Surface::Torus { tube, center } => Surface::torus(tube, center),
        }
    }

    pub fn kind(&self) -> SurfaceKind {
        match self {
            Surface::Sphere { .. } => SurfaceKind::Sphere,
            Surface::Cylinder { .. } => SurfaceKind::Cylinder,
            Surface::Torus { .. } => SurfaceKind::Torus,
        }
    }

    pub fn coordinate_names(&self) -> [&'static str; 2] {
        match self {
            Surface::Sphere { .. } => ["theta", "phi"],
            Surface::Cylinder { .. } => ["theta", "z"],
            Surface::Torus { .. } => ["theta", "phi"],
        }
    }

    /// Characteristic length used to scale degeneracy and step thresholds.
    pub fn length_scale(&self) -> f64 {
        match *self {
            Surface::Sphere { radius } | Surface::Cylinder { radius } => radius,
            Surface::Torus { tube, .. } => tube,
        }
    }

    /// Builds a chart point, reducing periodic coordinates mod 2π.
    pub fn point(&self, u: f64, v: f64) -> Result<SurfacePoint> {
        if !(u.is_finite() && v.is_finite()) {
            return Err(Error::InvalidPoint(format!("non-finite coordinates ({u}, {v})")));
        }
        match self {
            Surface::Sphere { .. } => {
                if !(0.0..=PI).contains(&u) {
                    return Err(Error::InvalidPoint(format!(
                        "sphere latitude theta = {u} outside [0, pi]"
                    )));
                }
                Ok(SurfacePoint { u, v: wrap_angle(v) })
            }
            Surface::Cylinder { .. } => Ok(SurfacePoint { u: wrap_angle(u), v }),
            Surface::Torus { .. } => Ok(SurfacePoint {
                u: wrap_angle(u),
                v: wrap_angle(v),
            }),
        }
    }

    /// Embedding r(u,v) with its first and second partial derivatives:
    /// `[r, r_u, r_v, r_uu, r_uv, r_vv]`.
    fn embedding_jet(&self, p: &SurfacePoint) -> [Vec3; 6] {
        match *self {
            Surface::Sphere { radius: l } => {
                let (st, ct) = p.u.sin_cos();
                let (sp, cp) = p.v.sin_cos();
                [
                    [l * st * cp, l * st * sp, l * ct],
                    [l * ct * cp, l * ct * sp, -l * st],
                    [-l * st * sp, l * st * cp, 0.0],
                    [-l * st * cp, -l * st * sp, -l * ct],
                    [-l * ct * sp, l * ct * cp, 0.0],
                    [-l * st * cp, -l * st * sp, 0.0],
                ]
            }
            Surface::Cylinder { radius: l } => {
                let (st, ct) = p.u.sin_cos();
                [
                    [l * ct, l * st, p.v],
                    [-l * st, l * ct, 0.0],
                    [0.0, 0.0, 1.0],
                    [-l * ct, -l * st, 0.0],
                    [0.0; 3],
                    [0.0; 3],
                ]
            }
            Surface::Torus { tube: r, center } => {
                let (st, ct) = p.u.sin_cos();
                let (sp, cp) = p.v.sin_cos();
                let rho = center + r * ct;
                [
                    [rho * cp, rho * sp, r * st],
                    [-r * st * cp, -r * st * sp, r * ct],
                    [-rho * sp, rho * cp, 0.0],
                    [-r * ct * cp, -r * ct * sp, -r * st],
                    [r * st * sp, -r * st * cp, 0.0],
                    [-rho * cp, -rho * sp, 0.0],
                ]
            }
        }
    }

    /// Sign that turns r_u × r_v into the outward normal.
    fn orientation(&self) -> f64 {
        match self {
            Surface::Sphere { .. } | Surface::Cylinder { .. } => 1.0,
            Surface::Torus { .. } => -1.0,
        }
    }

    /// Analytic metric with first and second coordinate derivatives.
    fn metric_jet(&self, p: &SurfacePoint) -> MetricJet {
        let mut jet = MetricJet::default();
        match *self {
            Surface::Sphere { radius: l } => {
                let (s, c) = p.u.sin_cos();
                let l2 = l * l;
                jet.g = [[l2, 0.0], [0.0, l2 * s * s]];
                jet.dg[0][1][1] = 2.0 * l2 * s * c;
                jet.ddg[0][0][1][1] = 2.0 * l2 * (2.0 * p.u).cos();
            }
            Surface::Cylinder { radius: l } => {
                jet.g = [[l * l, 0.0], [0.0, 1.0]];
            }
            Surface::Torus { tube: r, center } => {
                let (s, c) = p.u.sin_cos();
                let rho = center + r * c;
                jet.g = [[r * r, 0.0], [0.0, rho * rho]];
                jet.dg[0][1][1] = -2.0 * r * s * rho;
                jet.ddg[0][0][1][1] = 2.0 * r * r * s * s - 2.0 * r * c * rho;
            }
        }
        jet
    }

    fn check_regular(&self, p: &SurfacePoint) -> std::result::Result<Mat2, Degenerate> {
        let g = first_fundamental_form(&self.embedding_jet(p));
        let det = det2(&g);
        let scale = self.length_scale().powi(4);
        let pole = matches!(self, Surface::Sphere { .. }) && (p.u == 0.0 || p.u == PI);
        if pole || det < DEGENERACY_FLOOR * scale {
            Err(Degenerate { det_g: det })
        } else {
            Ok(g)
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct MetricJet {
    g: Mat2,
    /// dg[k][i][j] = ∂_k g_ij
    dg: [Mat2; 2],
    /// ddg[k][l][i][j] = ∂_k ∂_l g_ij
    ddg: [[Mat2; 2]; 2],
}

#[inline]
fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
fn det2(m: &Mat2) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

fn inv2(m: &Mat2) -> Mat2 {
    let d = det2(m);
    [[m[1][1] / d, -m[0][1] / d], [-m[1][0] / d, m[0][0] / d]]
}

fn first_fundamental_form(jet: &[Vec3; 6]) -> Mat2 {
    let (ru, rv) = (&jet[1], &jet[2]);
    let guv = dot(ru, rv);
    [[dot(ru, ru), guv], [guv, dot(rv, rv)]]
}

/// Second fundamental form h_ij = r_ij · n with the outward normal.
fn second_fundamental_form(s: &Surface, jet: &[Vec3; 6]) -> Mat2 {
    let c = cross(&jet[1], &jet[2]);
    let norm = dot(&c, &c).sqrt();
    let sign = s.orientation() / norm;
    let n = [c[0] * sign, c[1] * sign, c[2] * sign];
    let huv = dot(&jet[4], &n);
    [[dot(&jet[3], &n), huv], [huv, dot(&jet[5], &n)]]
}

/// Weingarten coefficients from g and h: ∂_i n = Σ_j α_ij ∂_j r.
fn alpha_from_forms(g: &Mat2, h: &Mat2) -> Mat2 {
    let d = det2(g);
    [
        [
            (g[0][1] * h[1][0] - g[1][1] * h[0][0]) / d,
            (g[1][0] * h[0][0] - g[0][0] * h[1][0]) / d,
        ],
        [
            (g[0][1] * h[1][1] - g[1][1] * h[0][1]) / d,
            (g[0][1] * h[1][0] - g[0][0] * h[1][1]) / d,
        ],
    ]
}

/// Metric tensor g_ij at `p` (length²).
pub fn surface_metric(s: &Surface, p: &SurfacePoint) -> std::result::Result<Mat2, Degenerate> {
    s.check_regular(p)
}

/// Shape operator α (1/length).
pub fn shape_operator(s: &Surface, p: &SurfacePoint) -> std::result::Result<Mat2, Degenerate> {
    let g = s.check_regular(p)?;
    let h = second_fundamental_form(s, &s.embedding_jet(p));
    Ok(alpha_from_forms(&g, &h))
}

/// Mean curvature C = (g11 h22 + g22 h11 − 2 g12 h12) / (2 det g).
pub fn mean_curvature(s: &Surface, p: &SurfacePoint) -> std::result::Result<f64, Degenerate> {
    let g = s.check_regular(p)?;
    let h = second_fundamental_form(s, &s.embedding_jet(p));
    Ok((g[0][0] * h[1][1] + g[1][1] * h[0][0] - 2.0 * g[0][1] * h[0][1]) / (2.0 * det2(&g)))
}

/// Gaussian curvature K = det h / det g.
pub fn gaussian_curvature(s: &Surface, p: &SurfacePoint) -> std::result::Result<f64, Degenerate> {
    let g = s.check_regular(p)?;
    let h = second_fundamental_form(s, &s.embedding_jet(p));
    Ok(det2(&h) / det2(&g))
}

/// Confinement potential V_s = −ħ²/(2M) (C² − K).
pub fn surface_potential(s: &Surface, p: &SurfacePoint, units: &Units) -> std::result::Result<f64, Degenerate> {
    let c = mean_curvature(s, p)?;
    let k = gaussian_curvature(s, p)?;
    Ok(-units.kinetic() * (c * c - k))
}

/// The same potential written through the shape operator,
/// −ħ²/(2M) (Tr[α]²/4 − det α).
pub fn surface_potential_from_alpha(
    s: &Surface,
    p: &SurfacePoint,
    units: &Units,
) -> std::result::Result<f64, Degenerate> {
    let a = shape_operator(s, p)?;
    let tr = a[0][0] + a[1][1];
    Ok(-units.kinetic() * (tr * tr / 4.0 - det2(&a)))
}

fn christoffel(g_inv: &Mat2, dg: &[Mat2; 2]) -> [[[f64; 2]; 2]; 2] {
    // gamma[r][m][s] = Γ^r_{ms}
    let mut gamma = [[[0.0; 2]; 2]; 2];
    for r in 0..2 {
        for m in 0..2 {
            for s in 0..2 {
                let mut acc = 0.0;
                for l in 0..2 {
                    acc += g_inv[r][l] * (dg[m][s][l] + dg[s][m][l] - dg[l][m][s]);
                }
                gamma[r][m][s] = 0.5 * acc;
            }
        }
    }
    gamma
}

/// Ricci scalar from a metric jet via Christoffel symbols and the Riemann
/// tensor R^σ_{μρν} = ∂_ρ Γ^σ_{μν} − ∂_ν Γ^σ_{μρ} + Γ^λ_{μν} Γ^σ_{ρλ} − Γ^λ_{μρ} Γ^σ_{νλ}.
fn ricci_from_jet(jet: &MetricJet) -> f64 {
    let g_inv = inv2(&jet.g);
    let gamma = christoffel(&g_inv, &jet.dg);

    // ∂_k g^{-1} = −g^{-1} (∂_k g) g^{-1}
    let mut dg_inv = [[[0.0; 2]; 2]; 2];
    for k in 0..2 {
        for a in 0..2 {
            for b in 0..2 {
                let mut acc = 0.0;
                for c in 0..2 {
                    for d in 0..2 {
                        acc -= g_inv[a][c] * jet.dg[k][c][d] * g_inv[d][b];
                    }
                }
                dg_inv[k][a][b] = acc;
            }
        }
    }

    // dgamma[k][r][m][s] = ∂_k Γ^r_{ms}
    let mut dgamma = [[[[0.0; 2]; 2]; 2]; 2];
    for k in 0..2 {
        for r in 0..2 {
            for m in 0..2 {
                for s in 0..2 {
                    let mut acc = 0.0;
                    for l in 0..2 {
                        let sym = jet.dg[m][s][l] + jet.dg[s][m][l] - jet.dg[l][m][s];
                        let dsym = jet.ddg[k][m][s][l] + jet.ddg[k][s][m][l] - jet.ddg[k][l][m][s];
                        acc += dg_inv[k][r][l] * sym + g_inv[r][l] * dsym;
                    }
                    dgamma[k][r][m][s] = 0.5 * acc;
                }
            }
        }
    }

    let riemann = |sig: usize, mu: usize, rho: usize, nu: usize| -> f64 {
        let mut v = dgamma[rho][sig][mu][nu] - dgamma[nu][sig][mu][rho];
        for l in 0..2 {
            v += gamma[l][mu][nu] * gamma[sig][rho][l] - gamma[l][mu][rho] * gamma[sig][nu][l];
        }
        v
    };

    let mut scalar = 0.0;
    for mu in 0..2 {
        for nu in 0..2 {
            let ric: f64 = (0..2).map(|l| riemann(l, mu, l, nu)).sum();
            scalar += g_inv[mu][nu] * ric;
        }
    }
    scalar
}

/// Ricci scalar (1/length²) from Christoffel symbols of the analytic metric.
pub fn ricci_scalar(s: &Surface, p: &SurfacePoint) -> std::result::Result<f64, Degenerate> {
    s.check_regular(p)?;
    Ok(ricci_from_jet(&s.metric_jet(p)))
}

/// Ricci scalar with metric derivatives replaced by centred finite
/// differences of step `rel_step` times the coordinate scale (the period
/// 2π for angles, the radius for the cylinder's z).
pub fn ricci_scalar_fd(s: &Surface, p: &SurfacePoint, rel_step: f64) -> std::result::Result<f64, Degenerate> {
    s.check_regular(p)?;
    let scales = match s {
        Surface::Cylinder { radius } => [TAU, *radius],
        _ => [TAU, TAU],
    };
    let metric_at = |u: f64, v: f64| first_fundamental_form(&s.embedding_jet(&SurfacePoint { u, v }));
    let x = [p.u, p.v];
    // Exactly representable steps so the stencil spacing matches the divisor.
    let h: [f64; 2] = [0, 1].map(|k| {
        let step = rel_step * scales[k];
        (x[k] + step) - x[k]
    });
    let shifted = |k: usize, a: f64, l: usize, b: f64| {
        let mut y = x;
        y[k] += a * h[k];
        y[l] += b * h[l];
        metric_at(y[0], y[1])
    };

    let g0 = metric_at(x[0], x[1]);
    let mut jet = MetricJet {
        g: g0,
        ..MetricJet::default()
    };
    for k in 0..2 {
        let gp = shifted(k, 1.0, k, 0.0);
        let gm = shifted(k, -1.0, k, 0.0);
        for i in 0..2 {
            for j in 0..2 {
                jet.dg[k][i][j] = (gp[i][j] - gm[i][j]) / (2.0 * h[k]);
                jet.ddg[k][k][i][j] = (gp[i][j] - 2.0 * g0[i][j] + gm[i][j]) / (h[k] * h[k]);
            }
        }
    }
    let gpp = shifted(0, 1.0, 1, 1.0);
    let gpm = shifted(0, 1.0, 1, -1.0);
    let gmp = shifted(0, -1.0, 1, 1.0);
    let gmm = shifted(0, -1.0, 1, -1.0);
    for i in 0..2 {
        for j in 0..2 {
            let mixed = (gpp[i][j] - gpm[i][j] - gmp[i][j] + gmm[i][j]) / (4.0 * h[0] * h[1]);
            jet.ddg[0][1][i][j] = mixed;
            jet.ddg[1][0][i][j] = mixed;
        }
    }
    Ok(ricci_from_jet(&jet))
}

/// Pointwise difference between the curvature term of the intrinsic
/// (generalised-coordinate) Hamiltonian, ξ ħ² R / M, and the confinement
/// potential V_s. Zero everywhere means the two quantisations coincide.
pub fn quantization_gap(s: &Surface, p: &SurfacePoint, xi: f64, units: &Units) -> std::result::Result<f64, Degenerate> {
    let r = ricci_scalar(s, p)?;
    let vs = surface_potential(s, p, units)?;
    Ok(xi * units.hbar * units.hbar * r / units.mass - vs)
}

/// Everything the geometry module knows about one chart point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometryReport {
    pub metric: Mat2,
    pub shape_operator: Mat2,
    pub mean_curvature: f64,
    pub gaussian_curvature: f64,
    pub surface_potential: f64,
    pub ricci: f64,
}

pub fn geometry_report(
    s: &Surface,
    p: &SurfacePoint,
    units: &Units,
) -> std::result::Result<GeometryReport, Degenerate> {
    let metric = s.check_regular(p)?;
    let jet = s.embedding_jet(p);
    let h = second_fundamental_form(s, &jet);
    let det_g = det2(&metric);
    let c = (metric[0][0] * h[1][1] + metric[1][1] * h[0][0] - 2.0 * metric[0][1] * h[0][1]) / (2.0 * det_g);
    let k = det2(&h) / det_g;
    Ok(GeometryReport {
        metric,
        shape_operator: alpha_from_forms(&metric, &h),
        mean_curvature: c,
        gaussian_curvature: k,
        surface_potential: -units.kinetic() * (c * c - k),
        ricci: ricci_from_jet(&s.metric_jet(p)),
    })
}

/// Closed-form expressions for the three surfaces, in chart order (u, v).
pub mod closed_form {
    use super::{Mat2, Surface, SurfacePoint};
    use crate::Units;

    pub fn metric(s: &Surface, p: &SurfacePoint) -> Mat2 {
        match *s {
            Surface::Sphere { radius: l } => {
                let st = p.u.sin();
                [[l * l, 0.0], [0.0, l * l * st * st]]
            }
            Surface::Cylinder { radius: l } => [[l * l, 0.0], [0.0, 1.0]],
            Surface::Torus { tube: r, center } => {
                let rho = center + r * p.u.cos();
                [[r * r, 0.0], [0.0, rho * rho]]
            }
        }
    }

    pub fn shape_operator(s: &Surface, p: &SurfacePoint) -> Mat2 {
        match *s {
            Surface::Sphere { radius: l } => [[1.0 / l, 0.0], [0.0, 1.0 / l]],
            Surface::Cylinder { radius: l } => [[1.0 / l, 0.0], [0.0, 0.0]],
            Surface::Torus { tube: r, center } => {
                let c = p.u.cos();
                [[1.0 / r, 0.0], [0.0, c / (center + r * c)]]
            }
        }
    }

    pub fn surface_potential(s: &Surface, p: &SurfacePoint, units: &Units) -> f64 {
        let hm = units.hbar * units.hbar / units.mass;
        match *s {
            Surface::Sphere { .. } => 0.0,
            Surface::Cylinder { radius: l } => -hm / (8.0 * l * l),
            Surface::Torus { tube: r, center } => {
                let rho = center + r * p.u.cos();
                -hm / 8.0 * center * center / (r * r * rho * rho)
            }
        }
    }

    pub fn ricci(s: &Surface, p: &SurfacePoint) -> f64 {
        match *s {
            Surface::Sphere { radius: l } => 2.0 / (l * l),
            Surface::Cylinder { .. } => 0.0,
            Surface::Torus { tube: r, center } => {
                let c = p.u.cos();
                2.0 * c / (r * (center + r * c))
            }
        }
    }
}
