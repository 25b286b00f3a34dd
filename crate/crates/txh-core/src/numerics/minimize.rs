//! Scalar minimisation for strictly convex objectives.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum MinimizeError {
    #[error("interval [{lo}, {hi}] does not bracket a minimum")]
    NonBracketing { lo: f64, hi: f64 },
    #[error("no convergence after {0} iterations")]
    NoConvergence(usize),
}

const MAX_ITERATIONS: usize = 200;

/// Golden-section search for the minimiser of a strictly convex `g` on
/// `[lo, hi]`, to absolute tolerance `tol` in the argument.
pub fn minimize_scalar<G: Fn(f64) -> f64>(
    g: G,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<f64, MinimizeError> {
    // NaN bounds must land here too, hence no plain `lo >= hi`.
    if lo.partial_cmp(&hi) != Some(std::cmp::Ordering::Less) {
        return Err(MinimizeError::NonBracketing { lo, hi });
    }
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut gc = g(c);
    let mut gd = g(d);
    for _ in 0..MAX_ITERATIONS {
        if b - a <= tol {
            let x = 0.5 * (a + b);
            // A minimum pinned to the boundary means the interval never
            // bracketed an interior stationary point.
            if x - lo <= 2.0 * tol && g(lo) < g(x) || hi - x <= 2.0 * tol && g(hi) < g(x) {
                return Err(MinimizeError::NonBracketing { lo, hi });
            }
            return Ok(x);
        }
        if gc < gd {
            b = d;
            d = c;
            gd = gc;
            c = b - INV_PHI * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + INV_PHI * (b - a);
            gd = g(d);
        }
    }
    Err(MinimizeError::NoConvergence(MAX_ITERATIONS))
}

/// Bisection on the sign of the derivative of a strictly convex objective.
///
/// Requires `dg(lo) <= 0 <= dg(hi)`. Sign tests stay robust arbitrarily
/// close to the stationary point, so this is the path of choice when the
/// tolerance is tighter than golden-section can resolve from values alone.
pub fn bisect_derivative<D: Fn(f64) -> f64>(
    dg: D,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<f64, MinimizeError> {
    let (mut a, mut b) = (lo, hi);
    let (da, db) = (dg(a), dg(b));
    if a.partial_cmp(&b) != Some(std::cmp::Ordering::Less) || da > 0.0 || db < 0.0 {
        return Err(MinimizeError::NonBracketing { lo, hi });
    }
    for _ in 0..MAX_ITERATIONS {
        let mid = 0.5 * (a + b);
        if b - a <= tol || mid <= a || mid >= b {
            return Ok(mid);
        }
        if dg(mid) <= 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    Err(MinimizeError::NoConvergence(MAX_ITERATIONS))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn symmetric_exponentials_minimise_at_zero() {
        // Value comparisons flatten below sqrt(eps) around the minimum, so
        // golden section localises to ~1e-8 here, not to the interval tol.
        let x = minimize_scalar(|f| (2.0 * f).exp() + (-2.0 * f).exp(), -5.0, 5.0, 1e-10).unwrap();
        assert_abs_diff_eq!(x, 0.0, epsilon = 1e-6);
    }

    #[test]
    fn skewed_exponentials_minimise_at_quarter_log_ratio() {
        // a e^{2f} + b e^{-2f} is stationary at f = log(b/a)/4; here b = e^4.
        let b = 4.0_f64.exp();
        let x =
            minimize_scalar(|f| (2.0 * f).exp() + b * (-2.0 * f).exp(), -5.0, 5.0, 1e-10).unwrap();
        assert_abs_diff_eq!(x, 1.0, epsilon = 1e-8);
    }

    #[test]
    fn parabola_minimises_at_vertex() {
        let x = minimize_scalar(|f| (f - 3.0) * (f - 3.0), -10.0, 10.0, 1e-10).unwrap();
        assert_abs_diff_eq!(x, 3.0, epsilon = 1e-8);
    }

    #[test]
    fn monotone_objective_is_rejected() {
        assert!(matches!(
            minimize_scalar(|f| f, 0.0, 1.0, 1e-10),
            Err(MinimizeError::NonBracketing { .. })
        ));
    }

    #[test]
    fn derivative_bisection_hits_tight_tolerance() {
        let b = 4.0_f64.exp();
        let x = bisect_derivative(
            |f| 2.0 * (2.0 * f).exp() - 2.0 * b * (-2.0 * f).exp(),
            -30.0,
            30.0,
            1e-12,
        )
        .unwrap();
        assert_abs_diff_eq!(x, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn derivative_bisection_requires_sign_change() {
        assert!(matches!(
            bisect_derivative(|_| 1.0, 0.0, 1.0, 1e-10),
            Err(MinimizeError::NonBracketing { .. })
        ));
    }
}
