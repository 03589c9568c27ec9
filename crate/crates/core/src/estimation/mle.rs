//! Maximum-likelihood estimation of the sphere radius from position data.

use num_complex::Complex64;

use crate::estimation::sampling::SampleRecord;
use crate::optimize::grid_then_golden;
use crate::probe::SpectralState;
use crate::spectral::{LegendreTable, Mode};
use crate::{Error, Result, Units};

/// Grid points scanned before the golden-section refinement.
pub const MLE_GRID: usize = 64;

/// Relative tolerance of the radius search.
pub const MLE_TOL: f64 = 1e-8;

/// The free-sphere family `λ ↦ p_t(·|λ)` for a fixed initial state, with
/// the harmonics at every sample cached.
#[derive(Debug, Clone)]
pub struct FreeSphereFamily {
    state: SpectralState,
    t: f64,
    units: Units,
    casimir: Vec<f64>,
}

impl FreeSphereFamily {
    pub fn new(state: &SpectralState, t: f64, units: &Units) -> Result<Self> {
        let casimir = state
            .modes()
            .iter()
            .map(|m| match m {
                Mode::Sphere(s) => Ok(s.casimir()),
                Mode::Cylinder(c) => Err(Error::SurfaceMismatch {
                    mode: c.to_string(),
                    surface: "sphere",
                }),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FreeSphereFamily {
            state: state.clone(),
            t,
            units: *units,
            casimir,
        })
    }

    /// Mode values `c_n Y_n(x_i)` for every sample, row-major by sample.
    fn cache(&self, record: &SampleRecord) -> Vec<Complex64> {
        let j_max = self.state.max_j();
        let mut out = Vec::with_capacity(record.len() * self.casimir.len());
        for p in &record.points {
            let table = LegendreTable::at_theta(j_max, p.u);
            for (mode, c) in self.state.iter() {
                let Mode::Sphere(s) = mode else { unreachable!() };
                let am = s.m().unsigned_abs() as usize;
                let mut y = table.get(s.j() as usize, am);
                if s.m() < 0 && am % 2 == 1 {
                    y = -y;
                }
                out.push(c * Complex64::from_polar(y, s.m() as f64 * p.v));
            }
        }
        out
    }

    fn log_likelihood_cached(&self, cache: &[Complex64], lambda: f64) -> f64 {
        let k = self.units.kinetic() / (lambda * lambda);
        let phases: Vec<Complex64> = self
            .casimir
            .iter()
            .map(|c| Complex64::from_polar(1.0, -self.t * k * c / self.units.hbar))
            .collect();
        cache
            .chunks_exact(phases.len())
            .map(|row| {
                let amp: Complex64 = row.iter().zip(&phases).map(|(y, e)| y * e).sum();
                amp.norm_sqr().ln()
            })
            .sum()
    }

    /// `Σ_i log p_t(x_i | λ)`.
    pub fn log_likelihood(&self, record: &SampleRecord, lambda: f64) -> f64 {
        self.log_likelihood_cached(&self.cache(record), lambda)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MleEstimate {
    pub lambda: f64,
    pub log_likelihood: f64,
    pub evaluations: usize,
}

/// Maximises the log-likelihood over `[lo, hi]`: a coarse scan picks the
/// basin, golden section refines it to `1e-8·λ`. A maximiser at either end
/// of the interval is reported as [`Error::BoundaryHit`].
pub fn mle_radius(record: &SampleRecord, family: &FreeSphereFamily, interval: (f64, f64)) -> Result<MleEstimate> {
    let (lo, hi) = interval;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::InvalidArgument(format!("bad search interval [{lo}, {hi}]")));
    }
    if record.is_empty() {
        return Err(Error::InvalidArgument("empty sample record".into()));
    }
    let cache = family.cache(record);
    let tol = MLE_TOL * record.lambda.clamp(lo, hi);
    let best = grid_then_golden(|l| family.log_likelihood_cached(&cache, l), lo, hi, MLE_GRID, tol);
    if best.x - lo <= 2.0 * tol || hi - best.x <= 2.0 * tol {
        return Err(Error::BoundaryHit { lambda: best.x });
    }
    Ok(MleEstimate {
        lambda: best.x,
        log_likelihood: best.value,
        evaluations: best.evaluations,
    })
}
