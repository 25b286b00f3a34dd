//! The emergent radial geometry read off the renormalisation flow.
//!
//! The flow's metric component fixes a conformally flat family on
//! `(z, x, t)` with signature `(+, +, -)`:
//!
//! ```text
//! ds^2 = w(z) (dz^2 + dx^2 - dt^2),    w(z) = (1/4) z^-2 (1 + beta eps^2/z^2)^-2
//! ```
//!
//! At `beta = 0` this is a constant-curvature space of radius 1/2
//! (`R = -24`). Curvature comes from first principles: hand-coded
//! derivatives of the single scalar weight `w`, cross-checked against
//! forward-mode jets, feed the conformal-factor Ricci formulas. The
//! cosmological constant is fixed by requiring the radial stress to vanish
//! (`T_zz = 0`), which reproduces the constant `-4` of the beta = 0 family
//! and generalises it continuously.
//!
//! The scale dictionary `z = eps e^{-u}` maps the flow weight
//! `1/(1 + beta e^{2u})` onto the metric form above; the opposite sign
//! `z = eps e^{+u}` lands on the `z^2`-form weight `1/(1 + beta_hat z^2)`
//! that the radial bulk propagator solves against. Both dictionaries are
//! published because both appear in use; geometry itself takes `z` as
//! primitive, so nothing downstream depends on the choice.

use thiserror::Error;

use crate::exec;
use crate::numerics::jet::Jet2;
use crate::numerics::quadrature::{integrate, QuadratureError, QuadratureSpec};

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("{name} must be positive and finite, got {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("radial coordinate must be positive, got {0}")]
    NonPositiveRadial(f64),
    #[error("curvature grid needs at least 16 positive samples, got {0}")]
    GridTooSmall(usize),
    #[error("UV cutoff {a} must lie strictly below the IR scale {xi}")]
    CutoffOrder { a: f64, xi: f64 },
    #[error("boundary grid spacing is not uniform along {axis}")]
    NonUniformBoundaryGrid { axis: &'static str },
    #[error("boundary grid incomplete: expected {expected} samples, got {got}")]
    IncompleteBoundaryGrid { expected: usize, got: usize },
    #[error("boundary CSV line {line}: {reason}")]
    MalformedCsv { line: usize, reason: String },
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

/// Scale dictionary between the flow parameter `u` and the radial `z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScaleConvention {
    /// `z = eps e^{-u}`: the deep IR (`u -> -inf`) sits at large `z`.
    IrAtLargeZ,
    /// `z = eps e^{+u}`: the deep IR sits at the boundary `z -> 0`.
    IrAtSmallZ,
}

/// Conformally flat metric family `w(z) (dz^2 + dx^2 - dt^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricFamily {
    beta: f64,
    epsilon: f64,
}

impl MetricFamily {
    /// `beta` is the dimensionless coefficient multiplying `eps^2/z^2` in
    /// the metric weight; `epsilon` the UV length.
    pub fn new(beta: f64, epsilon: f64) -> Result<Self, GeometryError> {
        if !(beta >= 0.0 && beta.is_finite()) {
            return Err(GeometryError::InvalidParameter { name: "beta", value: beta });
        }
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(GeometryError::InvalidParameter { name: "epsilon", value: epsilon });
        }
        Ok(Self { beta, epsilon })
    }

    /// Constant-curvature member of the family (`beta = 0`).
    pub fn pure_ads(epsilon: f64) -> Result<Self, GeometryError> {
        Self::new(0.0, epsilon)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Coefficient of the `z^2`-form weight `1/(1 + beta_hat z^2)` reached
    /// through the opposite scale dictionary: `beta_hat = beta / eps^2`.
    pub fn beta_hat(&self) -> f64 {
        self.beta / (self.epsilon * self.epsilon)
    }

    /// Radial coordinate of flow scale `u` under the chosen dictionary.
    pub fn z_of_scale(&self, u: f64, convention: ScaleConvention) -> f64 {
        match convention {
            ScaleConvention::IrAtLargeZ => self.epsilon * (-u).exp(),
            ScaleConvention::IrAtSmallZ => self.epsilon * u.exp(),
        }
    }

    /// Metric weight `w(z)` and its first two radial derivatives,
    /// hand-coded from the closed form.
    pub fn weight_derivatives(&self, z: f64) -> (f64, f64, f64) {
        let b = self.beta * self.epsilon * self.epsilon;
        let s = 1.0 + b / (z * z);
        let iz = 1.0 / z;
        let (iz3, iz4, iz5) = (iz * iz * iz, iz.powi(4), iz.powi(5));
        let (is2, is3, is4) = (s.powi(-2), s.powi(-3), s.powi(-4));
        let w = 0.25 * iz * iz * is2;
        let w1 = -0.5 * iz3 * is2 + b * iz5 * is3;
        let w2 = 1.5 * iz4 * is2 - 7.0 * b * iz4 * iz * iz * is3 + 6.0 * b * b * iz4 * iz4 * is4;
        (w, w1, w2)
    }

    /// Metric weight evaluated as an order-two jet in `z`; the independent
    /// cross-check for [`Self::weight_derivatives`].
    pub fn weight_jet(&self, z: f64) -> Jet2 {
        let b = self.beta * self.epsilon * self.epsilon;
        let zj = Jet2::variable(z);
        let s = zj.powi(-2) * Jet2::constant(b) + 1.0;
        Jet2::constant(0.25) * zj.powi(-2) * s.powi(-2)
    }

    /// Diagonal metric components `(g_zz, g_xx, g_tt)` at `z`.
    pub fn metric_at(&self, z: f64) -> Result<(f64, f64, f64), GeometryError> {
        if !(z > 0.0 && z.is_finite()) {
            return Err(GeometryError::NonPositiveRadial(z));
        }
        let (w, _, _) = self.weight_derivatives(z);
        Ok((w, w, -w))
    }
}

/// Curvature data at one radial sample. Index order is `(z, x, t)`;
/// the stress tensor uses coupling `kappa = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureSample {
    pub z: f64,
    pub metric: [f64; 3],
    pub ricci: [f64; 3],
    pub scalar: f64,
    pub einstein: [f64; 3],
    pub lambda: f64,
    pub stress: [f64; 3],
}

/// Curvature, cosmological term and stress tensor over a radial grid.
#[derive(Debug, Clone)]
pub struct CurvatureReport {
    pub family: MetricFamily,
    pub samples: Vec<CurvatureSample>,
}

/// Evaluate curvature at a single radial point.
pub fn curvature_at(family: &MetricFamily, z: f64) -> Result<CurvatureSample, GeometryError> {
    if !(z > 0.0 && z.is_finite()) {
        return Err(GeometryError::NonPositiveRadial(z));
    }
    let (w, w1, w2) = family.weight_derivatives(z);
    // Conformal factor phi = ln(w)/2 drives every curvature formula below.
    let phi1 = w1 / (2.0 * w);
    let phi2 = (w2 * w - w1 * w1) / (2.0 * w * w);

    let ricci = [-2.0 * phi2, -(phi2 + phi1 * phi1), phi2 + phi1 * phi1];
    let scalar = (-4.0 * phi2 - 2.0 * phi1 * phi1) / w;
    let einstein = [phi1 * phi1, phi2, -phi2];
    // Radial-vacuum convention: lambda makes T_zz vanish identically,
    // which reproduces the constant -4 of the beta = 0 family.
    let lambda = -phi1 * phi1 / w;
    let metric = [w, w, -w];
    let stress = [
        einstein[0] + lambda * metric[0],
        einstein[1] + lambda * metric[1],
        einstein[2] + lambda * metric[2],
    ];
    Ok(CurvatureSample { z, metric, ricci, scalar, einstein, lambda, stress })
}

/// Curvature analysis over a radial grid of at least 16 positive samples.
pub fn curvature_report(
    family: &MetricFamily,
    z_grid: &[f64],
) -> Result<CurvatureReport, GeometryError> {
    if z_grid.len() < 16 {
        return Err(GeometryError::GridTooSmall(z_grid.len()));
    }
    if let Some(&z) = z_grid.iter().find(|&&z| !(z > 0.0 && z.is_finite())) {
        return Err(GeometryError::NonPositiveRadial(z));
    }
    let samples = exec::map_slice(z_grid, |&z| {
        curvature_at(family, z).expect("grid was validated positive")
    });
    Ok(CurvatureReport { family: *family, samples })
}

/// Radial bulk solution `K(z) = c (1 + beta_hat z^2 / 2) z^2` of the
/// massless wave operator in the `z^2`-form weight.
pub fn bulk_propagator(z: f64, family: &MetricFamily, c: f64) -> Result<f64, GeometryError> {
    if !(z > 0.0 && z.is_finite()) {
        return Err(GeometryError::NonPositiveRadial(z));
    }
    let bh = family.beta_hat();
    Ok(c * (1.0 + 0.5 * bh * z * z) * z * z)
}

/// The conserved radial flux `K'(z) / (2 z (1 + beta_hat z^2))`; equal to
/// the constant `c` for the solution above.
pub fn propagator_flux(z: f64, family: &MetricFamily, c: f64) -> Result<f64, GeometryError> {
    let (k, d) = propagator_jets(z, family, c)?;
    Ok(k.d1 / d.v)
}

/// Residual of the radial equation, `d/dz` of the flux. Vanishes to
/// rounding for the closed-form solution; evaluated with jets rather than
/// simplified away so the cancellation is actually exercised.
pub fn flux_residual(z: f64, family: &MetricFamily, c: f64) -> Result<f64, GeometryError> {
    let (k, d) = propagator_jets(z, family, c)?;
    Ok((k.d2 * d.v - k.d1 * d.d1) / (d.v * d.v))
}

fn propagator_jets(z: f64, family: &MetricFamily, c: f64) -> Result<(Jet2, Jet2), GeometryError> {
    if !(z > 0.0 && z.is_finite()) {
        return Err(GeometryError::NonPositiveRadial(z));
    }
    let bh = family.beta_hat();
    let zj = Jet2::variable(z);
    let k = Jet2::constant(c) * (Jet2::constant(0.5 * bh) * zj * zj + 1.0) * zj * zj;
    let d = Jet2::constant(2.0) * zj * (Jet2::constant(bh) * zj * zj + 1.0);
    Ok((k, d))
}

/// Boundary data `phi0(x, t)` sampled on a uniform rectangular grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryField {
    xs: Vec<f64>,
    ts: Vec<f64>,
    /// Row-major over `xs`, i.e. `values[ix * ts.len() + it]`.
    values: Vec<f64>,
}

const GRID_UNIFORMITY_TOL: f64 = 1e-9;

impl BoundaryField {
    /// Field from explicit axes and row-major samples; axes must be
    /// strictly increasing and uniformly spaced.
    pub fn new(xs: Vec<f64>, ts: Vec<f64>, values: Vec<f64>) -> Result<Self, GeometryError> {
        validate_uniform_axis("x", &xs)?;
        validate_uniform_axis("t", &ts)?;
        let expected = xs.len() * ts.len();
        if values.len() != expected {
            return Err(GeometryError::IncompleteBoundaryGrid { expected, got: values.len() });
        }
        Ok(Self { xs, ts, values })
    }

    /// Sample a closed-form boundary function on a uniform grid.
    pub fn from_fn(
        xs: Vec<f64>,
        ts: Vec<f64>,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<Self, GeometryError> {
        let mut values = Vec::with_capacity(xs.len() * ts.len());
        for &x in &xs {
            for &t in &ts {
                values.push(f(x, t));
            }
        }
        Self::new(xs, ts, values)
    }

    /// Parse `x,t,phi0` CSV text (optional header, `#` comments allowed)
    /// into a validated uniform-grid field.
    pub fn from_csv_str(text: &str) -> Result<Self, GeometryError> {
        let mut triples = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(GeometryError::MalformedCsv {
                    line: idx + 1,
                    reason: format!("expected 3 fields, got {}", fields.len()),
                });
            }
            let parsed: Result<Vec<f64>, _> = fields.iter().map(|f| f.parse::<f64>()).collect();
            match parsed {
                Ok(v) => triples.push((v[0], v[1], v[2])),
                Err(_) if idx == 0 => continue, // header row
                Err(e) => {
                    return Err(GeometryError::MalformedCsv {
                        line: idx + 1,
                        reason: e.to_string(),
                    })
                }
            }
        }
        let mut xs: Vec<f64> = triples.iter().map(|t| t.0).collect();
        let mut ts: Vec<f64> = triples.iter().map(|t| t.1).collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        ts.sort_by(f64::total_cmp);
        ts.dedup();
        let expected = xs.len() * ts.len();
        if triples.len() != expected {
            return Err(GeometryError::IncompleteBoundaryGrid { expected, got: triples.len() });
        }
        let nt = ts.len();
        let mut values = vec![f64::NAN; expected];
        for &(x, t, v) in &triples {
            let ix = xs.partition_point(|&a| a < x);
            let it = ts.partition_point(|&a| a < t);
            values[ix * nt + it] = v;
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(GeometryError::IncompleteBoundaryGrid {
                expected,
                got: triples.len(),
            });
        }
        Self::new(xs, ts, values)
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ts(&self) -> &[f64] {
        &self.ts
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn spacing(&self) -> (f64, f64) {
        (
            (self.xs[self.xs.len() - 1] - self.xs[0]) / (self.xs.len() - 1) as f64,
            (self.ts[self.ts.len() - 1] - self.ts[0]) / (self.ts.len() - 1) as f64,
        )
    }
}

fn validate_uniform_axis(axis: &'static str, v: &[f64]) -> Result<(), GeometryError> {
    if v.len() < 2 || v.windows(2).any(|w| w[0] >= w[1]) {
        return Err(GeometryError::NonUniformBoundaryGrid { axis });
    }
    let step = (v[v.len() - 1] - v[0]) / (v.len() - 1) as f64;
    for w in v.windows(2) {
        if ((w[1] - w[0]) - step).abs() > GRID_UNIFORMITY_TOL * step.abs() {
            return Err(GeometryError::NonUniformBoundaryGrid { axis });
        }
    }
    Ok(())
}

/// Result of one boundary-to-bulk convolution.
#[derive(Debug, Clone, Copy)]
pub struct BulkValue {
    /// The convolved field value at the bulk point.
    pub value: f64,
    /// Kernel mass captured by the sampled window.
    pub kernel_mass: f64,
    /// Estimated fraction of kernel mass falling outside the window.
    pub lost_mass_fraction: f64,
    /// Set when more than 1% of the kernel mass was truncated.
    pub truncation_warning: bool,
}

/// Euclidean-form boundary-to-bulk kernel
/// `c [1 + (beta_hat/2) z^2/(z^2+d^2)^2] z^2/(z^2+d^2)^2` where
/// `d^2 = |x - x'|^2 + |t - t'|^2` with the two-vector `(x, t)` taken
/// literally. Over the infinite plane its mass is
/// `c pi (1 + beta_hat/(6 z^2))`, independent of the bulk position.
pub fn propagator_kernel(z: f64, dist_sq: f64, family: &MetricFamily, c: f64) -> f64 {
    let bh = family.beta_hat();
    let z2 = z * z;
    let denom = z2 + dist_sq;
    let base = z2 / (denom * denom);
    c * (1.0 + 0.5 * bh * z2 / (denom * denom)) * base
}

/// Convolve sampled boundary data against the bulk kernel by trapezoid
/// quadrature. Reports the captured kernel mass; if more than 1% of it
/// falls outside the sampled window the `truncation_warning` flag is set
/// and the estimated lost fraction is returned alongside the value.
pub fn boundary_to_bulk(
    field: &BoundaryField,
    z: f64,
    x: f64,
    t: f64,
    family: &MetricFamily,
    c: f64,
) -> Result<BulkValue, GeometryError> {
    if !(z > 0.0 && z.is_finite()) {
        return Err(GeometryError::NonPositiveRadial(z));
    }
    let (dx, dt) = field.spacing();
    let nx = field.xs.len();
    let nt = field.ts.len();

    // Per-x-row partial sums evaluated independently, then reduced in
    // order: deterministic under any thread count.
    let rows = exec::map_range(nx, |ix| {
        let xw = if ix == 0 || ix == nx - 1 { 0.5 } else { 1.0 };
        let xd = field.xs[ix] - x;
        let mut row_value = 0.0;
        let mut row_mass = 0.0;
        for it in 0..nt {
            let tw = if it == 0 || it == nt - 1 { 0.5 } else { 1.0 };
            let td = field.ts[it] - t;
            let kernel = propagator_kernel(z, xd * xd + td * td, family, c);
            let weight = xw * tw;
            row_mass += weight * kernel;
            row_value += weight * kernel * field.values[ix * nt + it];
        }
        (row_value, row_mass)
    });
    let (mut value, mut kernel_mass) = (0.0, 0.0);
    for (rv, rm) in rows {
        value += rv;
        kernel_mass += rm;
    }
    value *= dx * dt;
    kernel_mass *= dx * dt;

    let total_mass = c * std::f64::consts::PI * (1.0 + family.beta_hat() / (6.0 * z * z));
    let lost_mass_fraction = (1.0 - kernel_mass / total_mass).max(0.0);
    Ok(BulkValue {
        value,
        kernel_mass,
        lost_mass_fraction,
        truncation_warning: lost_mass_fraction > 0.01,
    })
}

/// Radial geodesic length `Int_a^xi dz/z = log(xi) - log(a)`.
///
/// Computed as a difference of logs so concatenated segments cancel
/// exactly: `len(a, m) + len(m, xi) == len(a, xi)` in floating point.
pub fn geodesic_log_length(a: f64, xi: f64) -> Result<f64, GeometryError> {
    check_geodesic_bounds(a, xi)?;
    Ok(xi.ln() - a.ln())
}

/// The same length by adaptive quadrature of `ds = dz/z`.
pub fn geodesic_log_length_quadrature(a: f64, xi: f64) -> Result<f64, GeometryError> {
    check_geodesic_bounds(a, xi)?;
    let spec = QuadratureSpec::default();
    Ok(integrate(|z| 1.0 / z, a, xi, &spec)?.value)
}

fn check_geodesic_bounds(a: f64, xi: f64) -> Result<(), GeometryError> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(GeometryError::InvalidParameter { name: "uv cutoff", value: a });
    }
    if !(xi > a && xi.is_finite()) {
        return Err(GeometryError::CutoffOrder { a, xi });
    }
    Ok(())
}

/// Log-spaced grid helper used by sweeps and the CLI.
pub fn log_spaced(min: f64, max: f64, n: usize) -> Vec<f64> {
    assert!(min > 0.0 && max > min && n >= 2, "log grid needs 0 < min < max, n >= 2");
    let (lmin, lmax) = (min.ln(), max.ln());
    (0..n)
        .map(|i| (lmin + (lmax - lmin) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Linearly spaced grid helper.
pub fn lin_spaced(min: f64, max: f64, n: usize) -> Vec<f64> {
    assert!(max > min && n >= 2, "linear grid needs min < max, n >= 2");
    (0..n)
        .map(|i| min + (max - min) * i as f64 / (n - 1) as f64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use std::f64::consts::PI;

    #[test]
    fn metric_reference_points() {
        let ads = MetricFamily::pure_ads(1.0).unwrap();
        assert_eq!(ads.metric_at(1.0).unwrap(), (0.25, 0.25, -0.25));
        let fam = MetricFamily::new(1.0, 1.0).unwrap();
        let (gzz, gxx, gtt) = fam.metric_at(1.0).unwrap();
        assert_abs_diff_eq!(gzz, 1.0 / 16.0, epsilon = 1e-15);
        assert_abs_diff_eq!(gxx, 1.0 / 16.0, epsilon = 1e-15);
        assert_abs_diff_eq!(gtt, -1.0 / 16.0, epsilon = 1e-15);
    }

    #[test]
    fn tiny_coupling_is_a_small_perturbation() {
        let ads = MetricFamily::pure_ads(1.0).unwrap();
        let fam = MetricFamily::new(1e-8, 1.0).unwrap();
        let (g0, ..) = ads.metric_at(1.0).unwrap();
        let (g1, ..) = fam.metric_at(1.0).unwrap();
        assert_relative_eq!(g1, g0, max_relative = 2.1e-8);
    }

    #[test]
    fn weight_derivatives_match_jets() {
        for beta in [0.0, 0.1, 1.0, 10.0] {
            let fam = MetricFamily::new(beta, 0.7).unwrap();
            for &z in &log_spaced(0.01, 100.0, 40) {
                let (w, w1, w2) = fam.weight_derivatives(z);
                let jet = fam.weight_jet(z);
                assert_relative_eq!(w, jet.v, max_relative = 1e-12);
                assert_relative_eq!(w1, jet.d1, max_relative = 1e-12);
                assert_relative_eq!(w2, jet.d2, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn constant_curvature_at_zero_coupling() {
        let fam = MetricFamily::pure_ads(1.0).unwrap();
        let report = curvature_report(&fam, &log_spaced(0.1, 10.0, 64)).unwrap();
        for s in &report.samples {
            assert_relative_eq!(s.scalar, -24.0, max_relative = 1e-10);
            assert_abs_diff_eq!(s.lambda, -4.0, epsilon = 1e-12);
            for mu in 0..3 {
                // Einstein member: G + lambda g = 0 exactly.
                assert_abs_diff_eq!(
                    s.einstein[mu] + s.lambda * s.metric[mu],
                    0.0,
                    epsilon = 1e-12 * s.einstein[mu].abs().max(1.0)
                );
            }
        }
    }

    #[test]
    fn stress_tensor_closed_forms() {
        // T_zz = 0, T_xx = -T_tt = -2 b / (z^2 (z^2 + b)) with b = beta eps^2.
        let fam = MetricFamily::new(0.6, 1.3).unwrap();
        let b = 0.6 * 1.3 * 1.3;
        for &z in &log_spaced(0.2, 20.0, 24) {
            let s = curvature_at(&fam, z).unwrap();
            let expected = -2.0 * b / (z * z * (z * z + b));
            assert_abs_diff_eq!(s.stress[0], 0.0, epsilon = 1e-14);
            assert_relative_eq!(s.stress[1], expected, max_relative = 1e-10);
            assert_relative_eq!(s.stress[2], -expected, max_relative = 1e-10);
            // Scalar closed form: -24 + 80 b/z^2 + 8 b^2/z^4.
            let r = -24.0 + 80.0 * b / (z * z) + 8.0 * b * b / z.powi(4);
            assert_relative_eq!(s.scalar, r, max_relative = 1e-9);
        }
    }

    #[test]
    fn lambda_closed_form() {
        let fam = MetricFamily::new(2.0, 0.5).unwrap();
        let b = 2.0 * 0.25;
        for &z in &log_spaced(0.05, 50.0, 32) {
            let s = curvature_at(&fam, z).unwrap();
            let expected = -4.0 * (1.0 - b / (z * z)).powi(2);
            assert_relative_eq!(s.lambda, expected, max_relative = 1e-9, epsilon = 1e-12);
        }
    }

    #[test]
    fn curvature_grid_validation() {
        let fam = MetricFamily::pure_ads(1.0).unwrap();
        assert!(matches!(
            curvature_report(&fam, &log_spaced(0.1, 1.0, 8)),
            Err(GeometryError::GridTooSmall(8))
        ));
        let mut grid = log_spaced(0.1, 1.0, 16);
        grid[3] = -1.0;
        assert!(matches!(
            curvature_report(&fam, &grid),
            Err(GeometryError::NonPositiveRadial(_))
        ));
    }

    #[test]
    fn propagator_and_flux() {
        // beta_hat = 0: K = c z^2 and the flux is exactly c.
        let ads = MetricFamily::pure_ads(1.0).unwrap();
        assert_abs_diff_eq!(bulk_propagator(3.0, &ads, 2.0).unwrap(), 18.0, epsilon = 1e-12);
        assert_abs_diff_eq!(propagator_flux(0.37, &ads, 2.0).unwrap(), 2.0, epsilon = 1e-13);
        // beta_hat = 1, c = 1: K' = 2z(1 + z^2) cancels the weight exactly.
        let fam = MetricFamily::new(1.0, 1.0).unwrap();
        for &z in &log_spaced(1e-3, 1e3, 30) {
            assert_relative_eq!(propagator_flux(z, &fam, 1.0).unwrap(), 1.0, max_relative = 1e-13);
        }
    }

    #[test]
    fn flux_residual_vanishes() {
        for beta in [0.0, 0.1, 1.0, 10.0] {
            let fam = MetricFamily::new(beta, 1.0).unwrap();
            for &z in &log_spaced(1e-3, 1e3, 61) {
                let r = flux_residual(z, &fam, 1.0).unwrap();
                assert!(r.abs() <= 1e-12, "residual {r:e} at z = {z}, beta = {beta}");
            }
        }
    }

    #[test]
    fn uniform_boundary_norm_is_pi() {
        // phi0 = 1, beta_hat = 0: with the tail mass below 0.1% the raw
        // quadrature itself must land on c*pi.
        let fam = MetricFamily::pure_ads(1.0).unwrap();
        let z = 1.0;
        let extent = 40.0;
        let n = 801;
        let field = BoundaryField::from_fn(
            lin_spaced(-extent, extent, n),
            lin_spaced(-extent, extent, n),
            |_, _| 1.0,
        )
        .unwrap();
        let c = 2.0;
        let out = boundary_to_bulk(&field, z, 0.0, 0.0, &fam, c).unwrap();
        assert!(out.lost_mass_fraction < 1e-3);
        assert_relative_eq!(out.value, c * PI, max_relative = 5e-3);
        assert!(!out.truncation_warning);
    }

    #[test]
    fn kernel_mass_formula_holds_with_coupling() {
        // Infinite-plane mass c*pi*(1 + beta_hat/(6 z^2)), checked by
        // quadrature at beta_hat = 0.6.
        let fam = MetricFamily::new(0.6, 1.0).unwrap();
        let z = 1.0;
        let field = BoundaryField::from_fn(
            lin_spaced(-40.0, 40.0, 801),
            lin_spaced(-40.0, 40.0, 801),
            |_, _| 1.0,
        )
        .unwrap();
        let out = boundary_to_bulk(&field, z, 0.0, 0.0, &fam, 1.0).unwrap();
        let expected = PI * (1.0 + 0.6 / 6.0);
        assert_relative_eq!(out.kernel_mass, expected, max_relative = 5e-3);
    }

    #[test]
    fn narrow_bump_approaches_kernel_value() {
        let fam = MetricFamily::new(0.5, 1.0).unwrap();
        let z = 1.0;
        // Narrow normalized bump at the bulk point's footprint: the
        // convolution tends to kernel(0) * mass.
        let sigma = 0.02;
        let field = BoundaryField::from_fn(
            lin_spaced(-0.5, 0.5, 501),
            lin_spaced(-0.5, 0.5, 501),
            |x, t| (-(x * x + t * t) / (2.0 * sigma * sigma)).exp(),
        )
        .unwrap();
        let out = boundary_to_bulk(&field, z, 0.0, 0.0, &fam, 1.0).unwrap();
        let bump_mass = 2.0 * PI * sigma * sigma;
        let expected = propagator_kernel(z, 0.0, &fam, 1.0) * bump_mass;
        // Residual error is the kernel's curvature over the bump, O(sigma^2).
        assert_relative_eq!(out.value, expected, max_relative = 5e-3);
    }

    #[test]
    fn refinement_halving_is_converged() {
        // Smooth compact-ish data on a window where the integrand has
        // decayed to rounding: halving the step must not move the result
        // by more than 1e-6 relative.
        let fam = MetricFamily::new(0.3, 1.0).unwrap();
        let bump = |x: f64, t: f64| (-(x * x + t * t) / 2.0).exp();
        let (z, x0, t0) = (1.0, 0.4, -0.1);
        let coarse = {
            let field =
                BoundaryField::from_fn(lin_spaced(-8.0, 8.0, 161), lin_spaced(-8.0, 8.0, 161), bump)
                    .unwrap();
            boundary_to_bulk(&field, z, x0, t0, &fam, 1.0).unwrap().value
        };
        let fine = {
            let field =
                BoundaryField::from_fn(lin_spaced(-8.0, 8.0, 321), lin_spaced(-8.0, 8.0, 321), bump)
                    .unwrap();
            boundary_to_bulk(&field, z, x0, t0, &fam, 1.0).unwrap().value
        };
        assert_relative_eq!(fine, coarse, max_relative = 1e-6);
    }

    #[test]
    fn convolution_is_linear() {
        let fam = MetricFamily::pure_ads(1.0).unwrap();
        let xs = lin_spaced(-6.0, 6.0, 121);
        let ts = lin_spaced(-6.0, 6.0, 121);
        let f1 = BoundaryField::from_fn(xs.clone(), ts.clone(), |x, t| (x - t).sin()).unwrap();
        let f2 = BoundaryField::from_fn(xs.clone(), ts.clone(), |x, t| (-(x * x) - t * t).exp())
            .unwrap();
        let alpha = 1.7;
        let combined = BoundaryField::from_fn(xs, ts, |x, t| {
            alpha * (x - t).sin() + (-(x * x) - t * t).exp()
        })
        .unwrap();
        let (z, x0, t0) = (0.8, 0.3, -0.2);
        let v1 = boundary_to_bulk(&f1, z, x0, t0, &fam, 1.0).unwrap().value;
        let v2 = boundary_to_bulk(&f2, z, x0, t0, &fam, 1.0).unwrap().value;
        let vc = boundary_to_bulk(&combined, z, x0, t0, &fam, 1.0).unwrap().value;
        assert_relative_eq!(vc, alpha * v1 + v2, max_relative = 1e-12, epsilon = 1e-12);
    }

    #[test]
    fn truncation_is_flagged() {
        let fam = MetricFamily::pure_ads(1.0).unwrap();
        // Tiny window at large z: most of the kernel mass is outside.
        let field = BoundaryField::from_fn(
            lin_spaced(-1.0, 1.0, 41),
            lin_spaced(-1.0, 1.0, 41),
            |_, _| 1.0,
        )
        .unwrap();
        let out = boundary_to_bulk(&field, 5.0, 0.0, 0.0, &fam, 1.0).unwrap();
        assert!(out.truncation_warning);
        assert!(out.lost_mass_fraction > 0.5);
    }

    #[test]
    fn boundary_csv_round_trip() {
        let mut text = String::from("x,t,phi0\n");
        for i in 0..3 {
            for j in 0..4 {
                text.push_str(&format!(
                    "{},{},{}\n",
                    i as f64 * 0.5,
                    j as f64 * 0.25 - 0.5,
                    (i * 4 + j) as f64
                ));
            }
        }
        let field = BoundaryField::from_csv_str(&text).unwrap();
        assert_eq!(field.xs().len(), 3);
        assert_eq!(field.ts().len(), 4);
        assert_eq!(field.values()[2 * 4 + 3], 11.0);
    }

    #[test]
    fn boundary_csv_validation() {
        assert!(matches!(
            BoundaryField::from_csv_str("0,0,1\n0,1,2\n1,0,3\n"),
            Err(GeometryError::IncompleteBoundaryGrid { .. })
        ));
        assert!(matches!(
            BoundaryField::from_csv_str("x,t\n0,0\n"),
            Err(GeometryError::MalformedCsv { .. })
        ));
        // Non-uniform spacing along x.
        let text = "0,0,1\n0,1,2\n1,0,3\n1,1,4\n3,0,5\n3,1,6\n";
        assert!(matches!(
            BoundaryField::from_csv_str(text),
            Err(GeometryError::NonUniformBoundaryGrid { axis: "x" })
        ));
    }

    #[test]
    fn geodesic_lengths() {
        assert_abs_diff_eq!(
            geodesic_log_length(1.0, std::f64::consts::E).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            geodesic_log_length(1.0, (3.0_f64).exp()).unwrap(),
            3.0,
            epsilon = 1e-14
        );
        let quad = geodesic_log_length_quadrature(0.01, 10.0).unwrap();
        assert_abs_diff_eq!(quad, 1000.0_f64.ln(), epsilon = 1e-10);
        assert!(matches!(
            geodesic_log_length(2.0, 1.0),
            Err(GeometryError::CutoffOrder { .. })
        ));
        assert!(matches!(
            geodesic_log_length(-1.0, 1.0),
            Err(GeometryError::InvalidParameter { .. })
        ));
    }

    #[test]
    fn geodesic_additivity_is_exact() {
        for (a, m, xi) in [(1.0, 4.0, 16.0), (0.25, 2.0, 32.0), (1.0, 7.0, 49.0)] {
            let whole = geodesic_log_length(a, xi).unwrap();
            let split =
                geodesic_log_length(a, m).unwrap() + geodesic_log_length(m, xi).unwrap();
            assert_eq!(whole, split, "additivity broke for ({a}, {m}, {xi})");
        }
    }

    #[test]
    fn scale_dictionaries() {
        let fam = MetricFamily::new(0.3, 2.0).unwrap();
        assert_relative_eq!(
            fam.z_of_scale(-1.0, ScaleConvention::IrAtLargeZ),
            2.0 * 1.0_f64.exp(),
            max_relative = 1e-15
        );
        assert_relative_eq!(
            fam.z_of_scale(-1.0, ScaleConvention::IrAtSmallZ),
            2.0 * (-1.0_f64).exp(),
            max_relative = 1e-15
        );
        assert_relative_eq!(fam.beta_hat(), 0.3 / 4.0, max_relative = 1e-15);
    }
}
