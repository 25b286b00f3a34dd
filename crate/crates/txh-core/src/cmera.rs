//! Variational entanglement-renormalisation flow on the mode grid.
//!
//! The flow disentangles the line scale by scale, accumulating a per-mode
//! squeeze exponent `f(k)`. The exponent is fixed variationally: each mode
//! contributes `(a e^{2f} + b e^{-2f})/4` to the energy, a strictly convex
//! objective whose exact stationary point is `f* = log(b/a)/4`. Recovering
//! the entangler strength `chi(u)` from `f*` and feeding it back through
//! the state's quadratic-operator variance yields the information-geometry
//! metric component `g_uu = chi(u)^2`.
//!
//! Two closed forms for the endpoint-coupled strength circulate: the exact
//! one implied by stationarity of the energy (weight decaying like
//! `e^{-2u}` toward the IR) and the quoted one with the opposite exponent
//! sign, which is the form the emergent z-metric adopts. Both are exposed;
//! nothing here silently picks one where they disagree.

use thiserror::Error;

use crate::circuits::{EndpointLcSpec, PhysicalConstants, TransmissionLineSpec};
use crate::exec;
use crate::gaussian::{
    apply_squeeze, entangler_variance, ir_vacuum, GaussianModeState, ModeGrid, SqueezeProfile,
    StateError,
};
use crate::numerics::minimize::{bisect_derivative, MinimizeError};

/// Default finite truncation of the IR end of the flow.
pub const DEFAULT_U_MIN: f64 = -12.0;
/// Minimum grid resolution for strength recovery by differentiation.
pub const MIN_MODES_FOR_RECOVERY: usize = 64;

#[derive(Debug, Error)]
pub enum CmeraError {
    #[error("flow truncation u_min must be negative and finite, got {0}")]
    InvalidTruncation(f64),
    #[error("grid cutoff {grid} does not match flow cutoff {flow}")]
    CutoffMismatch { grid: f64, flow: f64 },
    #[error("flow scale u must be non-positive and finite, got {0}")]
    InvalidScale(f64),
    #[error("the endpoint functional requires an endpoint in the flow config")]
    MissingEndpoint,
    #[error("per-mode minimisation failed at mode {index}: {source}")]
    Minimisation { index: usize, source: MinimizeError },
    #[error("grid too coarse to recover the entangler strength: {0} modes < 64")]
    ResolutionWarning(usize),
    #[error(transparent)]
    State(#[from] StateError),
}

/// Which energy functional drives the flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Functional {
    /// Free line.
    Free,
    /// Line terminated by an LC endpoint at the origin.
    Endpoint,
}

/// Everything one flow needs: cutoff, IR truncation, grid, line, and an
/// optional endpoint.
#[derive(Debug, Clone)]
pub struct FlowConfig {
    cutoff: f64,
    u_min: f64,
    grid: ModeGrid,
    line: TransmissionLineSpec,
    endpoint: Option<EndpointLcSpec>,
    consts: PhysicalConstants,
}

impl FlowConfig {
    pub fn new(
        cutoff: f64,
        u_min: f64,
        grid: ModeGrid,
        line: TransmissionLineSpec,
        endpoint: Option<EndpointLcSpec>,
        consts: PhysicalConstants,
    ) -> Result<Self, CmeraError> {
        if !(u_min < 0.0 && u_min.is_finite()) {
            return Err(CmeraError::InvalidTruncation(u_min));
        }
        if grid.cutoff() != cutoff {
            return Err(CmeraError::CutoffMismatch { grid: grid.cutoff(), flow: cutoff });
        }
        Ok(Self { cutoff, u_min, grid, line, endpoint, consts })
    }

    /// Log-uniform grid with `n` modes down to the default IR truncation.
    pub fn log_uniform(
        cutoff: f64,
        n: usize,
        line: TransmissionLineSpec,
        endpoint: Option<EndpointLcSpec>,
        consts: PhysicalConstants,
    ) -> Result<Self, CmeraError> {
        let grid = ModeGrid::log_uniform(cutoff, DEFAULT_U_MIN, n)?;
        Self::new(cutoff, DEFAULT_U_MIN, grid, line, endpoint, consts)
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn u_min(&self) -> f64 {
        self.u_min
    }

    pub fn grid(&self) -> &ModeGrid {
        &self.grid
    }

    pub fn line(&self) -> &TransmissionLineSpec {
        &self.line
    }

    pub fn endpoint(&self) -> Option<&EndpointLcSpec> {
        self.endpoint.as_ref()
    }

    pub fn consts(&self) -> &PhysicalConstants {
        &self.consts
    }

    fn cutoff_frequency(&self) -> f64 {
        self.line.cutoff_frequency(self.cutoff)
    }
}

/// Per-mode objective coefficients `(a, b)` of `(a e^{2f} + b e^{-2f})/4`.
fn mode_coefficients(cfg: &FlowConfig, functional: Functional, k: f64) -> Result<(f64, f64), CmeraError> {
    let omega_cut = cfg.cutoff_frequency();
    let omega_k = cfg.line.signal_speed() * k;
    match functional {
        Functional::Free => Ok((omega_cut, omega_k * omega_k / omega_cut)),
        Functional::Endpoint => {
            let ep = cfg.endpoint.ok_or(CmeraError::MissingEndpoint)?;
            let l_t = cfg.line.inductance_per_length();
            let omega0 = ep.resonance_frequency();
            let a = (1.0 + l_t * cfg.cutoff / ep.inductance()) * omega_cut;
            let loading = ep.inductance() / l_t * omega0 * omega0 * cfg.cutoff;
            let b = (omega_k * omega_k + loading) / omega_cut;
            Ok((a, b))
        }
    }
}

/// Energy density contributed by one mode at squeeze exponent `f`.
pub fn mode_energy_density(
    cfg: &FlowConfig,
    functional: Functional,
    k: f64,
    f: f64,
) -> Result<f64, CmeraError> {
    let (a, b) = mode_coefficients(cfg, functional, k)?;
    Ok(0.25 * (a * (2.0 * f).exp() + b * (-2.0 * f).exp()))
}

fn energy_of(cfg: &FlowConfig, functional: Functional, profile: &SqueezeProfile) -> Result<f64, CmeraError> {
    if profile.exponents().len() != cfg.grid.len() {
        return Err(CmeraError::State(StateError::MismatchedGrids));
    }
    let weights = cfg.grid.trapezoid_weights();
    let mut total = 0.0;
    for ((&k, &w), &f) in cfg
        .grid
        .samples()
        .iter()
        .zip(&weights)
        .zip(profile.exponents())
    {
        total += w * mode_energy_density(cfg, functional, k, f)?;
    }
    Ok(total)
}

/// Grid quadrature of the free-line energy functional (per unit hbar).
pub fn energy_free(profile: &SqueezeProfile, cfg: &FlowConfig) -> Result<f64, CmeraError> {
    energy_of(cfg, Functional::Free, profile)
}

/// Grid quadrature of the endpoint-coupled energy functional.
pub fn energy_endpoint(profile: &SqueezeProfile, cfg: &FlowConfig) -> Result<f64, CmeraError> {
    energy_of(cfg, Functional::Endpoint, profile)
}

/// Exact stationary point of the per-mode objective, `f* = log(b/a)/4`.
///
/// For the free line this is `log(omega_k/omega_cutoff)/2`. For the
/// endpoint functional it keeps the `(1 + L_line cutoff / L)` flux-side
/// factor that [`quoted_stationary_exponent`] drops.
pub fn stationary_exponent(
    cfg: &FlowConfig,
    functional: Functional,
    k: f64,
) -> Result<f64, CmeraError> {
    let (a, b) = mode_coefficients(cfg, functional, k)?;
    Ok(0.25 * (b / a).ln())
}

/// Closed form quoted for the endpoint optimum,
/// `log((omega_k/omega_cutoff) sqrt(1 + (L/L_line)(omega0^2/omega_k^2) cutoff))/2`.
///
/// It omits the `(1 + L_line cutoff / L)` factor that exact stationarity
/// of the same functional produces, so it differs from
/// [`stationary_exponent`] by the constant `-log(1 + L_line cutoff / L)/4`.
/// Both are reported; neither is silently adopted for the other.
pub fn quoted_stationary_exponent(cfg: &FlowConfig, k: f64) -> Result<f64, CmeraError> {
    let ep = cfg.endpoint.ok_or(CmeraError::MissingEndpoint)?;
    let omega_cut = cfg.cutoff_frequency();
    let omega_k = cfg.line.signal_speed() * k;
    let loading = ep.inductance() / cfg.line.inductance_per_length()
        * ep.resonance_frequency().powi(2)
        * cfg.cutoff;
    Ok(0.25 * ((omega_k * omega_k + loading) / (omega_cut * omega_cut)).ln())
}

/// Outcome of the per-mode variational minimisation.
#[derive(Debug, Clone)]
pub struct VariationalResult {
    /// Optimal squeeze exponent per grid mode.
    pub f_star: Vec<f64>,
    /// Entangler strength recovered by differentiating `f_star` along the
    /// grid scales; empty when the grid is too coarse to differentiate
    /// reliably (< 64 modes).
    pub chi: Vec<f64>,
    /// Minimised energy (grid quadrature, per unit hbar).
    pub energy: f64,
}

/// Numerically minimise one mode's objective: bisection on the sign of
/// the derivative over `f in [-30, 30]` to tolerance 1e-12. The objective
/// is strictly convex, so this converges unconditionally.
pub fn minimize_mode(cfg: &FlowConfig, functional: Functional, k: f64) -> Result<f64, CmeraError> {
    let (a, b) = mode_coefficients(cfg, functional, k)?;
    bisect_derivative(
        |f| 2.0 * a * (2.0 * f).exp() - 2.0 * b * (-2.0 * f).exp(),
        -30.0,
        30.0,
        1e-12,
    )
    .map_err(|source| CmeraError::Minimisation { index: 0, source })
}

/// Minimise the energy mode by mode (parallel across modes under the
/// default feature).
pub fn minimize_per_mode(
    cfg: &FlowConfig,
    functional: Functional,
) -> Result<VariationalResult, CmeraError> {
    let samples = cfg.grid.samples().to_vec();
    let found = exec::map_slice(&samples, |&k| minimize_mode(cfg, functional, k));
    let mut f_star = Vec::with_capacity(found.len());
    for (index, r) in found.into_iter().enumerate() {
        match r {
            Ok(f) => f_star.push(f),
            Err(CmeraError::Minimisation { source, .. }) => {
                return Err(CmeraError::Minimisation { index, source })
            }
            Err(e) => return Err(e),
        }
    }

    let profile = SqueezeProfile::new(f_star.clone(), cfg.u_min)?;
    let energy = energy_of(cfg, functional, &profile)?;
    let chi = match recover_strength(&f_star, cfg) {
        Ok(chi) => chi,
        Err(CmeraError::ResolutionWarning(_)) => Vec::new(),
        Err(e) => return Err(e),
    };
    Ok(VariationalResult { f_star, chi, energy })
}

/// Recover `chi(u)` from the optimal exponents by numerical
/// differentiation along the mode scales `u_k = log(k/cutoff)`.
///
/// The free line gives `chi = 1/2` at every scale. For the endpoint the
/// result matches [`endpoint_strength_exact`] to the grid's discretization
/// error (1e-4 on the default 512-mode grid).
pub fn chi_from_f(result: &VariationalResult, cfg: &FlowConfig) -> Result<Vec<f64>, CmeraError> {
    recover_strength(&result.f_star, cfg)
}

fn recover_strength(f_star: &[f64], cfg: &FlowConfig) -> Result<Vec<f64>, CmeraError> {
    let n = cfg.grid.len();
    if n < MIN_MODES_FOR_RECOVERY {
        return Err(CmeraError::ResolutionWarning(n));
    }
    if f_star.len() != n {
        return Err(CmeraError::State(StateError::MismatchedGrids));
    }
    let u = cfg.grid.scales();
    let mut chi = vec![0.0; n];
    for i in 0..n {
        chi[i] = if i == 0 {
            three_point_edge(u[0], u[1], u[2], f_star[0], f_star[1], f_star[2])
        } else if i == n - 1 {
            three_point_edge(
                u[n - 1],
                u[n - 2],
                u[n - 3],
                f_star[n - 1],
                f_star[n - 2],
                f_star[n - 3],
            )
        } else {
            (f_star[i + 1] - f_star[i - 1]) / (u[i + 1] - u[i - 1])
        };
    }
    Ok(chi)
}

/// Second-order one-sided derivative at `x0` from three samples.
fn three_point_edge(x0: f64, x1: f64, x2: f64, f0: f64, f1: f64, f2: f64) -> f64 {
    f0 * (2.0 * x0 - x1 - x2) / ((x0 - x1) * (x0 - x2))
        + f1 * (x0 - x2) / ((x1 - x0) * (x1 - x2))
        + f2 * (x0 - x1) / ((x2 - x0) * (x2 - x1))
}

/// Exact endpoint entangler strength implied by stationarity:
/// `chi(u) = 1/2 / (1 + W e^{-2u})` with `W = C_line / (C * cutoff)`.
///
/// The weight grows toward the IR (`u -> -inf`), so the strength decays
/// there and reaches its free-line ceiling of 1/2 at the UV edge.
pub fn endpoint_strength_exact(cfg: &FlowConfig, u: f64) -> Result<f64, CmeraError> {
    let ep = cfg.endpoint.ok_or(CmeraError::MissingEndpoint)?;
    if u.is_nan() || u > 0.0 {
        return Err(CmeraError::InvalidScale(u));
    }
    let w = cfg.line.capacitance_per_length() / (ep.capacitance() * cfg.cutoff);
    Ok(0.5 / (1.0 + w * (-2.0 * u).exp()))
}

/// Quoted endpoint strength with the opposite exponent sign,
/// `chi(u) = 1/2 / (1 + (L_line/(L * cutoff)) e^{2u})`: the form the
/// emergent z-metric weight adopts (under `z = eps e^{-u}` the weight
/// becomes `1/(1 + beta eps^2/z^2)` with `beta = L_line/(L * cutoff)`).
/// Recovers the free line in the deep IR.
pub fn endpoint_strength_quoted(cfg: &FlowConfig, u: f64) -> Result<f64, CmeraError> {
    let ep = cfg.endpoint.ok_or(CmeraError::MissingEndpoint)?;
    if u.is_nan() || u > 0.0 {
        return Err(CmeraError::InvalidScale(u));
    }
    let c = cfg.line.inductance_per_length() / (ep.inductance() * cfg.cutoff);
    Ok(0.5 / (1.0 + c * (2.0 * u).exp()))
}

/// Entangler strength at scale `u` for the configured functional: 1/2 for
/// the free line, the quoted endpoint form otherwise.
pub fn flow_strength(cfg: &FlowConfig, u: f64) -> Result<f64, CmeraError> {
    match cfg.endpoint {
        None => Ok(0.5),
        Some(_) => endpoint_strength_quoted(cfg, u),
    }
}

/// Accumulated squeeze exponent `F(w) = Int_0^w chi(s) ds` of the flow.
fn accumulated_exponent(cfg: &FlowConfig, w: f64) -> Result<f64, CmeraError> {
    match cfg.endpoint {
        None => Ok(0.5 * w),
        Some(ep) => {
            let c = cfg.line.inductance_per_length() / (ep.inductance() * cfg.cutoff);
            // Int_0^w ds / (2 (1 + c e^{2s})) in closed form.
            Ok(0.5 * (w - 0.5 * ((1.0 + c * (2.0 * w).exp()) / (1.0 + c)).ln()))
        }
    }
}

/// The Gaussian state the flow has built by scale `u`.
///
/// Modes the running cutoff has already passed (`k > cutoff * e^u`) carry
/// their frozen exponent `F(u_k)`; modes still inside carry the running
/// value `F(u)`. Every mode stays minimal-uncertainty.
pub fn flowed_state(cfg: &FlowConfig, u: f64) -> Result<GaussianModeState, CmeraError> {
    if u.is_nan() || u > 0.0 {
        return Err(CmeraError::InvalidScale(u));
    }
    let scales = cfg.grid.scales();
    let mut exponents = Vec::with_capacity(scales.len());
    for u_k in scales {
        exponents.push(accumulated_exponent(cfg, u.max(u_k))?);
    }
    let profile = SqueezeProfile::new(exponents, u)?;
    let vacuum = ir_vacuum(&cfg.line, &cfg.grid, &cfg.consts);
    Ok(apply_squeeze(&vacuum, &profile)?)
}

/// Information-geometry metric component `g_uu(u)`.
///
/// Computed as the entangler variance of the flowed state at strength
/// `chi(u)`; since the flow preserves minimal uncertainty this equals
/// `chi(u)^2`: exactly 1/4 for the free line, and `(weight/2)^2` with the
/// quoted endpoint weight otherwise.
pub fn metric_uu(cfg: &FlowConfig, u: f64) -> Result<f64, CmeraError> {
    let chi = flow_strength(cfg, u)?;
    let state = flowed_state(cfg, u)?;
    let per_mode = entangler_variance(&state, chi);
    Ok(per_mode.iter().sum::<f64>() / per_mode.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn unit_line() -> TransmissionLineSpec {
        TransmissionLineSpec::new(1.0, 1.0).unwrap()
    }

    fn free_config(n: usize) -> FlowConfig {
        FlowConfig::log_uniform(1.0, n, unit_line(), None, PhysicalConstants::natural()).unwrap()
    }

    fn endpoint_config(n: usize, l: f64, c: f64) -> FlowConfig {
        FlowConfig::log_uniform(
            1.0,
            n,
            unit_line(),
            Some(EndpointLcSpec::new(l, c).unwrap()),
            PhysicalConstants::natural(),
        )
        .unwrap()
    }

    #[test]
    fn free_energy_density_at_cutoff_mode() {
        let cfg = free_config(128);
        // f = 0 at the cutoff mode: density (omega + omega)/4 = omega/2.
        let d = mode_energy_density(&cfg, Functional::Free, 1.0, 0.0).unwrap();
        assert_abs_diff_eq!(d, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn ground_state_exponent_gives_half_omega_density() {
        let cfg = free_config(128);
        for &k in cfg.grid().samples().iter().step_by(17) {
            let f = stationary_exponent(&cfg, Functional::Free, k).unwrap();
            let d = mode_energy_density(&cfg, Functional::Free, k, f).unwrap();
            assert_relative_eq!(d, 0.5 * k, max_relative = 1e-13);
        }
    }

    #[test]
    fn endpoint_energy_density_at_zero_exponent() {
        // (a + b)/4 with a = (1 + L_line cutoff/L) w_cut and
        // b = (w_k^2 + (L/L_line) w0^2 cutoff)/w_cut.
        let cfg = endpoint_config(64, 2.0, 0.5);
        let k = 0.3;
        let d = mode_energy_density(&cfg, Functional::Endpoint, k, 0.0).unwrap();
        let a = (1.0 + 1.0 / 2.0) * 1.0;
        let b = 0.3 * 0.3 + 2.0 * 1.0 * 1.0; // w0^2 = 1/(2 * 0.5) = 1
        assert_relative_eq!(d, 0.25 * (a + b), max_relative = 1e-14);
    }

    #[test]
    fn optimal_profile_energy_is_a_minimum() {
        let cfg = endpoint_config(128, 1.5, 0.7);
        let result = minimize_per_mode(&cfg, Functional::Endpoint).unwrap();
        let best = SqueezeProfile::new(result.f_star.clone(), cfg.u_min()).unwrap();
        let e_best = energy_endpoint(&best, &cfg).unwrap();
        for delta in [1e-3, -1e-3] {
            let probe = SqueezeProfile::new(
                result.f_star.iter().map(|f| f + delta).collect(),
                cfg.u_min(),
            )
            .unwrap();
            let e_probe = energy_endpoint(&probe, &cfg).unwrap();
            assert!(e_probe > e_best, "probe {delta} did not raise the energy");
        }
    }

    #[test]
    fn free_stationary_point_is_half_log_ratio() {
        let cfg = free_config(64);
        let f = stationary_exponent(&cfg, Functional::Free, (-2.0_f64).exp()).unwrap();
        assert_relative_eq!(f, -1.0, max_relative = 1e-14);
        let f0 = stationary_exponent(&cfg, Functional::Free, 1.0).unwrap();
        assert_abs_diff_eq!(f0, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn minimizer_recovers_the_analytic_optimum() {
        let cfg = free_config(512);
        let result = minimize_per_mode(&cfg, Functional::Free).unwrap();
        for (i, &k) in cfg.grid().samples().iter().enumerate() {
            let exact = stationary_exponent(&cfg, Functional::Free, k).unwrap();
            assert_abs_diff_eq!(result.f_star[i], exact, epsilon = 1e-8);
        }
    }

    #[test]
    fn minimizer_recovers_endpoint_optimum() {
        let cfg = endpoint_config(512, 2.0, 0.5);
        let result = minimize_per_mode(&cfg, Functional::Endpoint).unwrap();
        for (i, &k) in cfg.grid().samples().iter().enumerate() {
            let exact = stationary_exponent(&cfg, Functional::Endpoint, k).unwrap();
            assert_abs_diff_eq!(result.f_star[i], exact, epsilon = 1e-8);
        }
    }

    #[test]
    fn objective_is_convex_around_the_optimum() {
        let cfg = endpoint_config(64, 1.0, 1.0);
        for &k in cfg.grid().samples().iter().step_by(7) {
            let f = stationary_exponent(&cfg, Functional::Endpoint, k).unwrap();
            let at = mode_energy_density(&cfg, Functional::Endpoint, k, f).unwrap();
            let up = mode_energy_density(&cfg, Functional::Endpoint, k, f + 1e-3).unwrap();
            let dn = mode_energy_density(&cfg, Functional::Endpoint, k, f - 1e-3).unwrap();
            assert!(up > at && dn > at, "not convex at k = {k}");
        }
    }

    #[test]
    fn stationary_gradient_vanishes() {
        let cfg = endpoint_config(64, 1.0, 1.0);
        for functional in [Functional::Free, Functional::Endpoint] {
            for &k in cfg.grid().samples().iter().step_by(11) {
                let f = stationary_exponent(&cfg, functional, k).unwrap();
                let h = 1e-6;
                let grad = (mode_energy_density(&cfg, functional, k, f + h).unwrap()
                    - mode_energy_density(&cfg, functional, k, f - h).unwrap())
                    / (2.0 * h);
                assert!(grad.abs() <= 1e-9, "gradient {grad} at k = {k}");
            }
        }
    }

    #[test]
    fn quoted_form_is_the_small_loading_limit() {
        // With L_line*cutoff/L tiny the dropped factor is negligible.
        let cfg = endpoint_config(64, 1e6, 1.0);
        for &k in cfg.grid().samples().iter().step_by(9) {
            let exact = stationary_exponent(&cfg, Functional::Endpoint, k).unwrap();
            let quoted = quoted_stationary_exponent(&cfg, k).unwrap();
            assert_abs_diff_eq!(exact, quoted, epsilon = 1e-5);
        }
        // The gap is exactly log(1 + L_line*cutoff/L)/4.
        let cfg = endpoint_config(64, 2.0, 0.5);
        let gap = 0.25 * (1.0 + 0.5_f64).ln();
        for &k in cfg.grid().samples().iter().step_by(9) {
            let exact = stationary_exponent(&cfg, Functional::Endpoint, k).unwrap();
            let quoted = quoted_stationary_exponent(&cfg, k).unwrap();
            assert_relative_eq!(quoted - exact, gap, max_relative = 1e-10);
        }
    }

    #[test]
    fn free_line_strength_is_one_half() {
        let cfg = free_config(512);
        let result = minimize_per_mode(&cfg, Functional::Free).unwrap();
        assert_eq!(result.chi.len(), 512);
        for &chi in &result.chi {
            assert_abs_diff_eq!(chi, 0.5, epsilon = 1e-3);
        }
    }

    #[test]
    fn endpoint_strength_matches_exact_closed_form() {
        let cfg = endpoint_config(512, 2.0, 0.5);
        let result = minimize_per_mode(&cfg, Functional::Endpoint).unwrap();
        let scales = cfg.grid().scales();
        for (i, &u) in scales.iter().enumerate() {
            let expected = endpoint_strength_exact(&cfg, u).unwrap();
            assert_abs_diff_eq!(result.chi[i], expected, epsilon = 1e-4);
        }
    }

    #[test]
    fn strength_stays_in_the_physical_band() {
        let cfg = endpoint_config(128, 1.0, 1.0);
        let mut prev_weight = f64::NEG_INFINITY;
        for i in 0..40 {
            let u = -10.0 + 0.25 * i as f64;
            let exact = endpoint_strength_exact(&cfg, u).unwrap();
            let quoted = endpoint_strength_quoted(&cfg, u).unwrap();
            assert!(exact > 0.0 && exact <= 0.5);
            assert!(quoted > 0.0 && quoted <= 0.5);
            // The quoted weight grows monotonically with e^{2u}.
            let weight = 0.5 / quoted - 1.0;
            assert!(weight >= prev_weight);
            prev_weight = weight;
        }
    }

    #[test]
    fn strength_limits() {
        let cfg = endpoint_config(128, 1.0, 1.0);
        // Quoted form recovers the free line deep in the IR.
        assert_abs_diff_eq!(endpoint_strength_quoted(&cfg, -30.0).unwrap(), 0.5, epsilon = 1e-15);
        // Exact form reaches its ceiling at the UV edge instead.
        assert_abs_diff_eq!(
            endpoint_strength_exact(&cfg, 0.0).unwrap(),
            0.5 / (1.0 + 1.0),
            epsilon = 1e-15
        );
        // Strength 1/4 where the weight term passes unity.
        let u_mid = 0.5 * (1.0_f64 / 1.0).ln();
        assert_abs_diff_eq!(endpoint_strength_quoted(&cfg, u_mid).unwrap(), 0.25, epsilon = 1e-15);
    }

    #[test]
    fn metric_component_free_line() {
        let cfg = free_config(128);
        for u in [-9.0, -4.0, -1.0, 0.0] {
            assert_abs_diff_eq!(metric_uu(&cfg, u).unwrap(), 0.25, epsilon = 1e-12);
        }
    }

    #[test]
    fn metric_component_endpoint() {
        let cfg = endpoint_config(128, 1.0, 1.0);
        // Where the quoted weight denominator reaches 2 the component is 1/16.
        let u_mid = 0.0;
        assert_abs_diff_eq!(metric_uu(&cfg, u_mid).unwrap(), 1.0 / 16.0, epsilon = 1e-12);
        // Deep IR recovers the free value.
        assert_abs_diff_eq!(metric_uu(&cfg, -30.0).unwrap(), 0.25, epsilon = 1e-12);
        // Two-path identity: variance route equals chi^2.
        for u in [-6.0, -3.0, -1.0, 0.0] {
            let chi = flow_strength(&cfg, u).unwrap();
            assert_relative_eq!(metric_uu(&cfg, u).unwrap(), chi * chi, max_relative = 1e-10);
        }
    }

    #[test]
    fn truncation_insensitivity_for_the_free_line() {
        let line = unit_line();
        let consts = PhysicalConstants::natural();
        for u_min in [-12.0, -16.0] {
            let grid = ModeGrid::log_uniform(1.0, u_min, 512).unwrap();
            let cfg = FlowConfig::new(1.0, u_min, grid, line, None, consts).unwrap();
            let result = minimize_per_mode(&cfg, Functional::Free).unwrap();
            for &chi in &result.chi {
                assert_abs_diff_eq!(chi, 0.5, epsilon = 1e-9);
            }
            assert_abs_diff_eq!(metric_uu(&cfg, -3.0).unwrap(), 0.25, epsilon = 1e-12);
        }
    }

    #[test]
    fn energy_quadrature_free_ground_state() {
        // At the optimum the density is omega_k/2; the grid quadrature of it.
        let cfg = free_config(512);
        let result = minimize_per_mode(&cfg, Functional::Free).unwrap();
        let profile = SqueezeProfile::new(result.f_star.clone(), cfg.u_min()).unwrap();
        let energy = energy_free(&profile, &cfg).unwrap();
        let weights = cfg.grid().trapezoid_weights();
        let expected: f64 = cfg
            .grid()
            .samples()
            .iter()
            .zip(&weights)
            .map(|(&k, &w)| 0.5 * k * w)
            .sum();
        assert_relative_eq!(energy, expected, max_relative = 1e-12);
        assert_relative_eq!(result.energy, energy, max_relative = 1e-15);
    }

    #[test]
    fn endpoint_functional_requires_an_endpoint() {
        let cfg = free_config(64);
        let profile = SqueezeProfile::identity(64);
        assert!(matches!(
            energy_endpoint(&profile, &cfg),
            Err(CmeraError::MissingEndpoint)
        ));
    }

    #[test]
    fn coarse_grids_raise_the_resolution_warning() {
        let cfg = free_config(32);
        let result = minimize_per_mode(&cfg, Functional::Free).unwrap();
        assert!(result.chi.is_empty());
        assert!(matches!(
            chi_from_f(&result, &cfg),
            Err(CmeraError::ResolutionWarning(32))
        ));
    }

    #[test]
    fn config_validation() {
        let line = unit_line();
        let consts = PhysicalConstants::natural();
        let grid = ModeGrid::log_uniform(1.0, -8.0, 64).unwrap();
        assert!(matches!(
            FlowConfig::new(1.0, 0.5, grid.clone(), line, None, consts),
            Err(CmeraError::InvalidTruncation(_))
        ));
        assert!(matches!(
            FlowConfig::new(2.0, -8.0, grid, line, None, consts),
            Err(CmeraError::CutoffMismatch { .. })
        ));
    }
}
