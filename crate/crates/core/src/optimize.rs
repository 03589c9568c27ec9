//! One-dimensional maximisation.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Result of a bracketed maximisation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum {
    pub x: f64,
    pub value: f64,
    pub evaluations: usize,
}

/// Golden-section search for the maximum of a unimodal `f` on `[lo, hi]`.
///
/// Stops once the bracket is narrower than `tol`.
pub fn golden_section_max<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Maximum
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut evaluations = 2;
    while (b - a).abs() > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        evaluations += 1;
        if evaluations > 10_000 {
            break;
        }
    }
    let (x, value) = if fc >= fd { (c, fc) } else { (d, fd) };
    Maximum { x, value, evaluations }
}

/// Coarse grid scan followed by golden-section refinement around the best
/// grid point. Guards against picking a secondary local maximum.
pub fn grid_then_golden<F>(mut f: F, lo: f64, hi: f64, grid: usize, tol: f64) -> Maximum
where
    F: FnMut(f64) -> f64,
{
    let n = grid.max(3);
    let step = (hi - lo) / (n - 1) as f64;
    let mut best = 0;
    let mut best_val = f64::NEG_INFINITY;
    for i in 0..n {
        let v = f(lo + step * i as f64);
        if v > best_val {
            best_val = v;
            best = i;
        }
    }
    let a = lo + step * best.saturating_sub(1) as f64;
    let b = (lo + step * (best + 1) as f64).min(hi);
    let mut m = golden_section_max(&mut f, a, b, tol);
    if best_val > m.value {
        m.x = lo + step * best as f64;
        m.value = best_val;
    }
    m.evaluations += n;
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parabola() {
        let m = golden_section_max(|x| -(x - 0.3).powi(2), -1.0, 2.0, 1e-12);
        assert!((m.x - 0.3).abs() < 1e-6);
    }

    #[test]
    fn grid_avoids_secondary_peak() {
        // Secondary peak at the left edge, main peak at 2.
        let f = |x: f64| if x < 0.5 { -10.0 * x } else { 1.0 - (x - 2.0).powi(2) };
        let m = grid_then_golden(f, 0.0, 3.0, 31, 1e-10);
        assert!((m.x - 2.0).abs() < 1e-5, "{m:?}");
    }
}
