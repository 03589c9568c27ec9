//! Product quadrature rules on the chart of a surface.

use std::collections::HashMap;
use std::f64::consts::{PI, TAU};
use std::sync::{Arc, Mutex, OnceLock};

use crate::geometry::{SurfaceKind, SurfacePoint};

type Rule = (Vec<f64>, Vec<f64>);

/// Gauss–Legendre nodes and weights on [−1, 1], nodes ascending.
///
/// Newton iteration on the three-term recurrence; exact for polynomials of
/// degree ≤ 2n − 1.
/// Rules are memoised per `n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Rule>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(r) = cache.lock().unwrap().get(&n) {
        return (r.0.clone(), r.1.clone());
    }
    let rule = Arc::new(compute_gauss_legendre(n));
    cache.lock().unwrap().insert(n, rule.clone());
    (rule.0.clone(), rule.1.clone())
}

fn compute_gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = nf * (z * pn - pn1) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 4.0 * f64::EPSILON {
                break;
            }
        }
        if n == 1 {
            dp = 1.0;
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

/// A tensor-product quadrature rule on a surface chart.
///
/// On the sphere the `u` weights absorb the sin θ Jacobian, so integrals
/// are `Σ w_u w_v f(u, v) ≈ ∫∫ f sin θ dθ dφ`. On the cylinder only the
/// angular direction is discretised and `v` holds the single value z = 0.
#[derive(Debug, Clone)]
pub struct QuadratureGrid {
    surface: SurfaceKind,
    u: Vec<f64>,
    u_weights: Vec<f64>,
    v: Vec<f64>,
    v_weight: f64,
    degree: usize,
}

impl QuadratureGrid {
    /// Gauss–Legendre in cos θ times a uniform φ rule.
    pub fn sphere(n_theta: usize, n_phi: usize) -> Self {
        assert!(n_theta >= 1 && n_phi >= 1, "empty quadrature grid");
        let (x, w) = gauss_legendre(n_theta);
        // Descending x gives ascending θ.
        let u = x.iter().rev().map(|c| c.clamp(-1.0, 1.0).acos()).collect();
        let u_weights = w.into_iter().rev().collect();
        QuadratureGrid {
            surface: SurfaceKind::Sphere,
            u,
            u_weights,
            v: (0..n_phi).map(|k| TAU * k as f64 / n_phi as f64).collect(),
            v_weight: TAU / n_phi as f64,
            degree: (2 * n_theta - 1).min(n_phi - 1),
        }
    }

    /// Uniform trapezoidal rule on the cylinder angle θ ∈ [0, 2π).
    pub fn circle(n_theta: usize) -> Self {
        assert!(n_theta >= 1, "empty quadrature grid");
        let h = TAU / n_theta as f64;
        QuadratureGrid {
            surface: SurfaceKind::Cylinder,
            u: (0..n_theta).map(|k| h * k as f64).collect(),
            u_weights: vec![h; n_theta],
            v: vec![0.0],
            v_weight: 1.0,
            degree: n_theta - 1,
        }
    }

    pub fn surface(&self) -> SurfaceKind {
        self.surface
    }

    /// Highest harmonic degree integrated exactly.
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.u.len() * self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn u_nodes(&self) -> &[f64] {
        &self.u
    }

    pub fn u_weights(&self) -> &[f64] {
        &self.u_weights
    }

    pub fn v_nodes(&self) -> &[f64] {
        &self.v
    }

    pub fn v_weight(&self) -> f64 {
        self.v_weight
    }

    /// All nodes with their weights, `u` outermost.
    pub fn iter(&self) -> impl Iterator<Item = (SurfacePoint, f64)> + '_ {
        self.u
            .iter()
            .zip(&self.u_weights)
            .flat_map(move |(&u, &wu)| self.v.iter().map(move |&v| (SurfacePoint { u, v }, wu * self.v_weight)))
    }

    pub fn total_weight(&self) -> f64 {
        self.u_weights.iter().sum::<f64>() * self.v_weight * self.v.len() as f64
    }
}

/// Grid exact for all products `Y*_{j'm'} Y_{jm}` with `j, j' ≤ j_max`,
/// with two guard nodes in each direction.
pub fn sphere_quadrature(j_max: usize) -> QuadratureGrid {
    QuadratureGrid::sphere(2 * j_max + 4, 4 * j_max + 4)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_integrates_polynomials() {
        for n in [1, 2, 3, 5, 8, 33] {
            let (x, w) = gauss_legendre(n);
            for deg in 0..(2 * n) {
                let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((got - exact).abs() < 1e-13, "n={n} deg={deg}: {got}");
            }
        }
    }

    #[test]
    fn nodes_sorted_and_interior() {
        let (x, w) = gauss_legendre(2048);
        assert!(x.windows(2).all(|p| p[0] < p[1]));
        assert!(x[0] > -1.0 && x[2047] < 1.0);
        assert!(w.iter().all(|&w| w > 0.0));
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn total_weights() {
        for j in [0, 1, 7, 30] {
            let g = sphere_quadrature(j);
            assert!((g.total_weight() - 4.0 * PI).abs() < 1e-12);
            assert!(g.degree() >= 2 * j);
        }
        let c = QuadratureGrid::circle(42);
        assert!((c.total_weight() - TAU).abs() < 1e-12);
        assert_eq!(c.iter().count(), 42);
    }
}
