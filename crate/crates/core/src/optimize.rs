//! One-dimensional search routines shared by the conjugates, norms and bounds.
//!
//! Objectives may take the value `+∞` (as `f64::INFINITY`). All minimizers
//! assume quasiconvexity and break ties toward the left endpoint, which is
//! correct for the objectives here: wherever they become infinite, they stay
//! infinite to the right.

use crate::error::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Default bracket for searches over `(0, ∞)`.
pub const RAY_START_LOW: f64 = 1e-8;
pub const RAY_START_HIGH: f64 = 1.0;
/// The expansion cap on the upper end of a ray search.
pub const RAY_CAP_HIGH: f64 = 1e12;
pub const RAY_CAP_LOW: f64 = 1e-15;

/// Result of a scalar minimization.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalarMinimum {
    pub arg: f64,
    pub value: f64,
    /// The bracket was still descending when it reached `RAY_CAP_HIGH`.
    pub hit_upper_cap: bool,
    pub hit_lower_cap: bool,
}

struct Best {
    arg: f64,
    value: f64,
}

impl Best {
    fn new() -> Self {
        Best {
            arg: f64::NAN,
            value: f64::INFINITY,
        }
    }

    fn offer(&mut self, arg: f64, value: f64) {
        // `<` on the first finite value also replaces the NaN placeholder arg.
        if value < self.value || (self.arg.is_nan() && value == self.value) {
            self.arg = arg;
            self.value = value;
        }
    }
}

/// Golden-section minimization of a quasiconvex `f` on `[lo, hi]` down to an
/// interval of width `tol`. Both endpoints are evaluated, so a minimizer sitting
/// on the boundary is returned exactly.
pub fn golden_section<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64) -> ScalarMinimum {
    let mut best = Best::new();
    let (mut a, mut b) = (lo.min(hi), lo.max(hi));
    best.offer(a, f(a));
    if b > a {
        best.offer(b, f(b));
    }
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    best.offer(x1, f1);
    best.offer(x2, f2);
    while b - a > tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
            best.offer(x1, f1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
            best.offer(x2, f2);
        }
        if x1 >= x2 {
            break;
        }
    }
    ScalarMinimum {
        arg: best.arg,
        value: best.value,
        hit_upper_cap: false,
        hit_lower_cap: false,
    }
}

/// Minimizes a quasiconvex `f` over `(0, upper]`.
///
/// The bracket starts at `[1e-8, 1]`, is widened by doubling (upwards) and
/// halving (downwards) until the objective stops decreasing at both ends,
/// then golden-section search runs in `ln t` to an interval width of 1e-12.
/// When `upper` is finite the upper end is evaluated exactly.
pub fn minimize_on_ray<F: FnMut(f64) -> f64>(mut f: F, upper: f64) -> ScalarMinimum {
    let cap_hi = upper.min(RAY_CAP_HIGH);
    let mut best = Best::new();
    let mut eval = |t: f64, best: &mut Best| {
        let v = f(t);
        best.offer(t, v);
        v
    };

    let mut hi = RAY_START_HIGH.min(cap_hi);
    let mut lo = RAY_START_LOW.min(hi * RAY_START_LOW);
    let cap_lo = RAY_CAP_LOW.min(lo);

    let mut f_hi = eval(hi, &mut best);
    let right;
    let mut hit_upper_cap = false;
    loop {
        if hi >= cap_hi {
            right = cap_hi;
            hit_upper_cap = cap_hi == RAY_CAP_HIGH && upper > RAY_CAP_HIGH;
            break;
        }
        let next = (2.0 * hi).min(cap_hi);
        let f_next = eval(next, &mut best);
        if f_next < f_hi {
            hi = next;
            f_hi = f_next;
        } else {
            right = next;
            break;
        }
    }

    let mut f_lo = eval(lo, &mut best);
    let left;
    let mut hit_lower_cap = false;
    loop {
        if lo <= cap_lo {
            left = cap_lo;
            hit_lower_cap = true;
            break;
        }
        let next = (0.5 * lo).max(cap_lo);
        let f_next = eval(next, &mut best);
        if f_next < f_lo {
            lo = next;
            f_lo = f_next;
        } else {
            left = next;
            break;
        }
    }

    // Every evaluation is recorded in `best`, in t rather than ln t.
    golden_section(|u| eval(u.exp(), &mut best), left.ln(), right.ln(), 1e-12);
    ScalarMinimum {
        arg: best.arg,
        value: best.value,
        hit_upper_cap: hit_upper_cap && best.arg >= 0.5 * RAY_CAP_HIGH,
        hit_lower_cap: hit_lower_cap && best.arg <= 2.0 * cap_lo,
    }
}

/// `sup_{t ∈ (0, upper]} f(t)` for a quasiconcave `f`, returned as a minimum
/// of `-f` with the sign restored on `value`.
pub fn maximize_on_ray<F: FnMut(f64) -> f64>(mut f: F, upper: f64) -> ScalarMinimum {
    let m = minimize_on_ray(|t| -f(t), upper);
    ScalarMinimum { value: -m.value, ..m }
}

/// `inf{t ≥ 0 : f(t) > level}` for a nondecreasing `f` with `f(0) ≤ level`.
///
/// The upper end of the bracket doubles from 1 until `f` exceeds the level;
/// bisection then runs to the resolution of `f64` (well below an absolute
/// 1e-10). The strict super-level set is used, so on a plateau at `level` the
/// right end of the plateau is returned.
pub fn generalized_inverse_by_bisection<F: Fn(f64) -> f64>(f: F, level: f64) -> Result<f64> {
    if f(0.0) > level {
        return Ok(0.0);
    }
    let mut hi = 1.0_f64;
    let mut lo = 0.0_f64;
    while !(f(hi) > level) {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::UnboundedInverse { level });
        }
    }
    for _ in 0..2200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > level {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_interior_and_boundary_minima() {
        let m = golden_section(|x| (x - 0.3).powi(2), 0.0, 1.0, 1e-12);
        assert!((m.arg - 0.3).abs() < 1e-6);
        let m = golden_section(|x| x, 0.0, 1.0, 1e-12);
        assert_eq!(m.arg, 0.0);
        assert_eq!(m.value, 0.0);
        let m = golden_section(|x| 1.0 - x, 0.0, 1.0, 1e-12);
        assert_eq!(m.arg, 1.0);
    }

    #[test]
    fn ray_minimum_of_chord_slope() {
        // (1 + t^2)/t is minimized at t = 1 with value 2.
        let m = minimize_on_ray(|t| (1.0 + t * t) / t, f64::INFINITY);
        assert!((m.value - 2.0).abs() < 1e-12);
        assert!((m.arg - 1.0).abs() < 1e-5);
        assert!(!m.hit_upper_cap);
    }

    #[test]
    fn ray_minimum_at_infinite_wall() {
        // 3/t on (0, 2], +inf beyond: infimum 1.5 attained at the wall.
        let m = minimize_on_ray(|t| if t <= 2.0 { 3.0 / t } else { f64::INFINITY }, f64::INFINITY);
        assert!((m.value - 1.5).abs() < 1e-10);
    }

    #[test]
    fn ray_reports_upper_cap() {
        let m = minimize_on_ray(|t| 1.0 / t, f64::INFINITY);
        assert!(m.hit_upper_cap);
        assert!(m.value <= 1.0 / RAY_CAP_HIGH * 1.000001);
    }

    #[test]
    fn ray_respects_finite_upper_end() {
        let m = minimize_on_ray(|t| 1.0 / t, 5.0);
        assert_eq!(m.arg, 5.0);
        assert!(!m.hit_upper_cap);
    }

    #[test]
    fn bisection_inverse_of_square() {
        let x = generalized_inverse_by_bisection(|t| t * t, 4.0).unwrap();
        assert!((x - 2.0).abs() < 1e-12);
    }

    #[test]
    fn bisection_picks_right_end_of_plateau() {
        // f = 0 on [0, 1], then t - 1: {f > 0} has infimum 1.
        let x = generalized_inverse_by_bisection(|t| (t - 1.0).max(0.0), 0.0).unwrap();
        assert!((x - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bounded_function_has_no_inverse() {
        let r = generalized_inverse_by_bisection(|t| t.min(1.0), 2.0);
        assert!(matches!(r, Err(Error::UnboundedInverse { .. })));
    }
}
