//! Shared numerical kernels.
//!
//! One audited code path backs every quantitative claim elsewhere in the
//! crate: [`quadrature`] for finite and semi-infinite integrals,
//! [`minimize`] for strictly convex scalar objectives, and [`jet`] for
//! forward-mode first/second derivatives of closed-form expressions.

pub mod jet;
pub mod minimize;
pub mod quadrature;

pub use jet::Jet2;
pub use minimize::{bisect_derivative, minimize_scalar, MinimizeError};
pub use quadrature::{integrate, Quadrature, QuadratureError, QuadratureSpec, Transform};

/// Central-difference derivative of `f` at `x`.
///
/// `order` selects the first or second derivative; the step is
/// `h = max(1e-6, 1e-6 * |x|)`. For closed forms prefer the exact
/// [`Jet2`] path; finite differences are the test-side cross-check.
pub fn derivative<F: Fn(f64) -> f64>(f: F, x: f64, order: u32) -> f64 {
    let h = 1e-6_f64.max(1e-6 * x.abs());
    match order {
        1 => (f(x + h) - f(x - h)) / (2.0 * h),
        2 => (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h),
        _ => panic!("derivative order must be 1 or 2, got {order}"),
    }
}
