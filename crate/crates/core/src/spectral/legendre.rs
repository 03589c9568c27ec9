//! Fully normalised associated Legendre functions.
//!
//! `P̄_l^m(x)` here carries the 1/√(4π) sphere normalisation and the
//! Condon–Shortley phase, so that `Y_lm(θ, φ) = P̄_l^m(cos θ) e^{imφ}` for
//! `m ≥ 0`. The upward recurrence in `l` at fixed `m` never forms
//! factorials and stays finite well past l = 200.

use std::f64::consts::PI;

/// Table of `P̄_l^m(x)` for `0 ≤ m ≤ l ≤ l_max`.
#[derive(Debug, Clone)]
pub struct LegendreTable {
    l_max: usize,
    values: Vec<f64>,
}

#[inline]
fn index(l: usize, m: usize) -> usize {
    l * (l + 1) / 2 + m
}

impl LegendreTable {
    /// Evaluates the table at `x = cos θ`, with `s = sin θ ≥ 0` passed in
    /// separately to avoid losing digits near the poles.
    pub fn new(l_max: usize, x: f64, s: f64) -> Self {
        let mut values = vec![0.0; index(l_max, l_max) + 1];
        let mut pmm = 0.5 / PI.sqrt();
        for m in 0..=l_max {
            if m > 0 {
                let mf = m as f64;
                pmm *= -((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * s;
            }
            values[index(m, m)] = pmm;
            if m == l_max {
                break;
            }
            let mf = m as f64;
            let mut prev2 = pmm;
            let mut prev1 = (2.0 * mf + 3.0).sqrt() * x * pmm;
            values[index(m + 1, m)] = prev1;
            for l in (m + 2)..=l_max {
                let lf = l as f64;
                let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
                let b = (((lf - 1.0).powi(2) - mf * mf) / (4.0 * (lf - 1.0).powi(2) - 1.0)).sqrt();
                let next = a * (x * prev1 - b * prev2);
                values[index(l, m)] = next;
                prev2 = prev1;
                prev1 = next;
            }
        }
        LegendreTable { l_max, values }
    }

    /// Convenience constructor from the polar angle.
    pub fn at_theta(l_max: usize, theta: f64) -> Self {
        let (s, x) = theta.sin_cos();
        Self::new(l_max, x, s.abs())
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    /// `P̄_l^m` for `0 ≤ m ≤ l ≤ l_max`.
    #[inline]
    pub fn get(&self, l: usize, m: usize) -> f64 {
        debug_assert!(m <= l && l <= self.l_max);
        self.values[index(l, m)]
    }
}

/// Zonal column `P̄_l^0(x)` for `l = 0..=l_max`, the only part the
/// axially symmetric states need.
pub fn zonal(l_max: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(l_max + 1);
    let p0 = 0.5 / PI.sqrt();
    out.push(p0);
    if l_max == 0 {
        return out;
    }
    out.push(3f64.sqrt() * x * p0);
    for l in 2..=l_max {
        let lf = l as f64;
        let a = ((4.0 * lf * lf - 1.0) / (lf * lf)).sqrt();
        let b = ((lf - 1.0).powi(2) / (4.0 * (lf - 1.0).powi(2) - 1.0)).sqrt();
        let next = a * (x * out[l - 1] - b * out[l - 2]);
        out.push(next);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    // Closed forms of the first few normalised functions.
    fn reference(l: usize, m: usize, t: f64) -> f64 {
        let (s, c) = t.sin_cos();
        let k = 1.0 / (4.0 * PI);
        match (l, m) {
            (0, 0) => k.sqrt(),
            (1, 0) => (3.0 * k).sqrt() * c,
            (1, 1) => -(3.0 * k / 2.0).sqrt() * s,
            (2, 0) => (5.0 * k).sqrt() * 0.5 * (3.0 * c * c - 1.0),
            (2, 1) => -(15.0 * k / 2.0).sqrt() * s * c,
            (2, 2) => (15.0 * k / 8.0).sqrt() * s * s,
            (3, 3) => -(35.0 * k / 16.0).sqrt() * s * s * s,
            _ => unreachable!(),
        }
    }

    #[test]
    fn low_orders_match_closed_forms() {
        for &t in &[0.0, 0.3, 1.0, 2.2, PI] {
            let table = LegendreTable::at_theta(3, t);
            for &(l, m) in &[(0, 0), (1, 0), (1, 1), (2, 0), (2, 1), (2, 2), (3, 3)] {
                let got = table.get(l, m);
                assert!((got - reference(l, m, t)).abs() < 1e-14, "l={l} m={m} t={t}");
            }
        }
    }

    #[test]
    fn zonal_matches_table() {
        let t = 0.77;
        let table = LegendreTable::at_theta(40, t);
        let z = zonal(40, t.cos());
        for (l, v) in z.iter().enumerate() {
            assert!((v - table.get(l, 0)).abs() < 1e-13);
        }
    }

    #[test]
    fn high_degree_stays_bounded() {
        for i in 0..=400 {
            let t = PI * i as f64 / 400.0;
            let z = zonal(200, t.cos());
            for (l, v) in z.iter().enumerate() {
                let bound = ((2 * l + 1) as f64 / (4.0 * PI)).sqrt();
                assert!(v.is_finite() && v.abs() <= bound + 1e-12, "l={l} t={t} v={v}");
            }
        }
        let table = LegendreTable::at_theta(200, 0.01);
        assert!(table.get(200, 200).is_finite());
    }
}
