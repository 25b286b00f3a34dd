//! Gaussian (second-moment) field states on a discretized mode grid.
//!
//! A state stores, per mode `k`, the densities `<QQ>`, `<PP>` and the
//! symmetrized cross moment `<QP>` of the charge field and its conjugate
//! flux. That is all the information needed for the renormalisation flow:
//! the flow acts by per-mode squeezing, and every quantity extracted from
//! it (uncertainty products, entangler variance) is quadratic.
//!
//! Continuum delta-function factors are divided out throughout: moments are
//! densities per mode, and the quadratic-operator variance is normalized so
//! the unsqueezed product state returns exactly `chi^2` (the free-line
//! information-metric value). This one convention is applied uniformly.

use thiserror::Error;

use crate::circuits::{PhysicalConstants, TransmissionLineSpec};

/// Default mode-grid resolution.
pub const DEFAULT_MODE_COUNT: usize = 512;

#[derive(Debug, Error)]
pub enum StateError {
    #[error("mode grid needs at least 2 samples, got {0}")]
    TooFewModes(usize),
    #[error("mode samples must be strictly increasing and inside (0, cutoff]")]
    MalformedGrid,
    #[error("operands live on different mode grids")]
    MismatchedGrids,
    #[error("squeeze profile must vanish at the UV scale u = 0")]
    NonTrivialUvProfile,
    #[error("non-finite squeeze exponent at mode index {0}")]
    NonFiniteExponent(usize),
    #[error("moment data violates positivity at mode index {0}")]
    NonPositiveMoment(usize),
    #[error("Heisenberg bound violated at mode index {index}: det {det}, bound {bound}")]
    HeisenbergViolation { index: usize, det: f64, bound: f64 },
}

/// Wavenumber samples below a sharp UV cutoff.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeGrid {
    cutoff: f64,
    samples: Vec<f64>,
}

impl ModeGrid {
    /// Grid from explicit samples; strictly increasing, in `(0, cutoff]`.
    pub fn new(cutoff: f64, samples: Vec<f64>) -> Result<Self, StateError> {
        if samples.len() < 2 {
            return Err(StateError::TooFewModes(samples.len()));
        }
        let ordered = samples.windows(2).all(|w| w[0] < w[1]);
        let bounded = samples.iter().all(|&k| k > 0.0 && k <= cutoff);
        if !(cutoff > 0.0 && ordered && bounded) {
            return Err(StateError::MalformedGrid);
        }
        Ok(Self { cutoff, samples })
    }

    /// Log-uniform sampling of `(0, cutoff]`: `k_i = cutoff * exp(u_i)` with
    /// `u_i` uniform on `[u_min, 0]`. The flow acts on `log k`, so this is
    /// the default.
    pub fn log_uniform(cutoff: f64, u_min: f64, n: usize) -> Result<Self, StateError> {
        if n < 2 {
            return Err(StateError::TooFewModes(n));
        }
        if !(cutoff > 0.0 && u_min < 0.0 && u_min.is_finite()) {
            return Err(StateError::MalformedGrid);
        }
        let samples = (0..n)
            .map(|i| cutoff * (u_min * (1.0 - i as f64 / (n - 1) as f64)).exp())
            .collect();
        Ok(Self { cutoff, samples })
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Flow scale of each mode, `u_k = log(k / cutoff) <= 0`.
    pub fn scales(&self) -> Vec<f64> {
        self.samples.iter().map(|&k| (k / self.cutoff).ln()).collect()
    }

    /// Trapezoid weights for quadrature against the (non-uniform) samples.
    pub fn trapezoid_weights(&self) -> Vec<f64> {
        let n = self.samples.len();
        (0..n)
            .map(|i| {
                let lo = if i == 0 { self.samples[0] } else { self.samples[i - 1] };
                let hi = if i == n - 1 { self.samples[n - 1] } else { self.samples[i + 1] };
                0.5 * (hi - lo)
            })
            .collect()
    }
}

/// Accumulated per-mode squeeze exponents at flow scale `u`.
///
/// The flow rescales `Q -> e^{-f} Q` and the conjugate flux by `e^{+f}`;
/// the overall `e^{+/- u/2}` scale factors and the `k`-relabeling of the
/// full transformation cancel in the density quantities computed here and
/// are absorbed into the interaction picture.
#[derive(Debug, Clone, PartialEq)]
pub struct SqueezeProfile {
    exponents: Vec<f64>,
    scale: f64,
}

impl SqueezeProfile {
    /// Profile with explicit exponents at flow scale `u`. At the UV scale
    /// `u = 0` no squeezing can have accumulated yet, so all exponents
    /// must vanish there.
    pub fn new(exponents: Vec<f64>, u: f64) -> Result<Self, StateError> {
        if let Some(i) = exponents.iter().position(|f| !f.is_finite()) {
            return Err(StateError::NonFiniteExponent(i));
        }
        if u == 0.0 && exponents.iter().any(|&f| f != 0.0) {
            return Err(StateError::NonTrivialUvProfile);
        }
        Ok(Self { exponents, scale: u })
    }

    /// Identity profile at the UV scale.
    pub fn identity(n: usize) -> Self {
        Self { exponents: vec![0.0; n], scale: 0.0 }
    }

    /// The profile `f(k) = log(omega_k / omega_cutoff) / 2` that turns the
    /// unentangled product state into the true line ground state.
    pub fn ground_state(line: &TransmissionLineSpec, grid: &ModeGrid) -> Self {
        let omega_cut = line.cutoff_frequency(grid.cutoff());
        let exponents = grid
            .samples()
            .iter()
            .map(|&k| 0.5 * (line.signal_speed() * k / omega_cut).ln())
            .collect();
        Self { exponents, scale: f64::NEG_INFINITY }
    }

    pub fn exponents(&self) -> &[f64] {
        &self.exponents
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Pointwise sum of two profiles (the squeeze group law).
    pub fn compose(&self, other: &SqueezeProfile) -> Result<SqueezeProfile, StateError> {
        if self.exponents.len() != other.exponents.len() {
            return Err(StateError::MismatchedGrids);
        }
        let exponents = self
            .exponents
            .iter()
            .zip(&other.exponents)
            .map(|(a, b)| a + b)
            .collect();
        Ok(SqueezeProfile { exponents, scale: self.scale.min(other.scale) })
    }
}

/// Per-mode second moments of a Gaussian field state.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianModeState {
    grid: ModeGrid,
    hbar: f64,
    qq: Vec<f64>,
    pp: Vec<f64>,
    qp_sym: Vec<f64>,
}

impl GaussianModeState {
    /// State from raw per-mode moments. Positivity and the Heisenberg
    /// bound `qq*pp - qp^2 >= (hbar/2)^2` (to 1e-12 relative) are enforced.
    pub fn from_moments(
        grid: ModeGrid,
        consts: &PhysicalConstants,
        qq: Vec<f64>,
        pp: Vec<f64>,
        qp_sym: Vec<f64>,
    ) -> Result<Self, StateError> {
        if qq.len() != grid.len() || pp.len() != grid.len() || qp_sym.len() != grid.len() {
            return Err(StateError::MismatchedGrids);
        }
        let hbar = consts.hbar();
        let bound = 0.25 * hbar * hbar;
        for i in 0..qq.len() {
            if !(qq[i] > 0.0 && pp[i] > 0.0 && qp_sym[i].is_finite()) {
                return Err(StateError::NonPositiveMoment(i));
            }
            let det = qq[i] * pp[i] - qp_sym[i] * qp_sym[i];
            if det < bound * (1.0 - 1e-12) {
                return Err(StateError::HeisenbergViolation { index: i, det, bound });
            }
        }
        Ok(Self { grid, hbar, qq, pp, qp_sym })
    }

    pub fn grid(&self) -> &ModeGrid {
        &self.grid
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn qq(&self) -> &[f64] {
        &self.qq
    }

    pub fn pp(&self) -> &[f64] {
        &self.pp
    }

    pub fn qp_sym(&self) -> &[f64] {
        &self.qp_sym
    }
}

/// The unentangled IR product state: `qq = hbar/(2 L omega_cutoff)`,
/// `pp = L hbar omega_cutoff / 2` and no cross correlation, identically in
/// `k`. Its uncertainty product is exactly `hbar^2/4` per mode.
pub fn ir_vacuum(
    line: &TransmissionLineSpec,
    grid: &ModeGrid,
    consts: &PhysicalConstants,
) -> GaussianModeState {
    let hbar = consts.hbar();
    let l_t = line.inductance_per_length();
    let omega_cut = line.cutoff_frequency(grid.cutoff());
    let n = grid.len();
    GaussianModeState {
        grid: grid.clone(),
        hbar,
        qq: vec![hbar / (2.0 * l_t * omega_cut); n],
        pp: vec![l_t * hbar * omega_cut / 2.0; n],
        qp_sym: vec![0.0; n],
    }
}

/// Squeeze every mode: `qq -> e^{-2f} qq`, `pp -> e^{+2f} pp`, cross moment
/// unchanged. The per-mode uncertainty product is preserved.
pub fn apply_squeeze(
    state: &GaussianModeState,
    profile: &SqueezeProfile,
) -> Result<GaussianModeState, StateError> {
    if profile.exponents.len() != state.grid.len() {
        return Err(StateError::MismatchedGrids);
    }
    let mut out = state.clone();
    for (i, &f) in profile.exponents.iter().enumerate() {
        let shrink = (-2.0 * f).exp();
        out.qq[i] *= shrink;
        out.pp[i] /= shrink;
    }
    Ok(out)
}

/// Per-mode uncertainty products `qq*pp - qp^2`.
///
/// Validates the canonical commutation contract at the Gaussian level:
/// minimal-uncertainty states give `hbar^2/4` and squeezing preserves it.
pub fn uncertainty_products(state: &GaussianModeState) -> Vec<f64> {
    state
        .qq
        .iter()
        .zip(&state.pp)
        .zip(&state.qp_sym)
        .map(|((&a, &b), &s)| a * b - s * s)
        .collect()
}

/// Per-mode variance density of the quadratic entangler with strength
/// `chi`, evaluated by Wick's theorem on the second moments.
///
/// For the generator `(chi/2 hbar) (Q P + P Q)` the raw single-mode
/// variance is `chi^2 (qq*pp + qp^2)/hbar^2 + chi^2/4`; the per-mode
/// density convention doubles it so the IR product state yields exactly
/// `chi^2`. The result is quadratically homogeneous in `chi`.
pub fn entangler_variance(state: &GaussianModeState, chi: f64) -> Vec<f64> {
    let h2 = state.hbar * state.hbar;
    state
        .qq
        .iter()
        .zip(&state.pp)
        .zip(&state.qp_sym)
        .map(|((&a, &b), &s)| chi * chi * (2.0 * (a * b + s * s) / h2 + 0.5))
        .collect()
}
