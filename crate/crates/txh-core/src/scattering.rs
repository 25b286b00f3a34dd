//! Frequency-domain input-output theory for lines joined at the origin.
//!
//! At the junction the endpoint equation of motion is a Langevin equation:
//! the lines act as resistances plus incoming-noise drives. Solving it in
//! frequency space gives the transfer function of a single terminated line,
//! the multiport scattering matrix, and the vacuum charge variance whose
//! behaviour is classified by the endpoint Q-factor.
//!
//! S-matrices are reported in the flux-normalized basis
//! `a~_i = sqrt(R_i) a_i`, in which a lossless junction is exactly unitary
//! even when the line impedances differ, and which reduces to the usual
//! convention when all `R_i` are equal.

use nalgebra::{Complex, DMatrix};
use thiserror::Error;

use crate::circuits::{EndpointLcSpec, PhysicalConstants, TransmissionLineSpec};
use crate::exec;
use crate::numerics::quadrature::{integrate, QuadratureError, QuadratureSpec, Transform};

pub type C64 = Complex<f64>;

/// Relative tolerance for matrix symmetry checks.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Unitarity defect allowed for a lossless junction S-matrix.
pub const UNITARITY_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum ScatteringError {
    #[error("{name} must be positive and finite, got {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("{which} matrix must be {n}x{n} to match {n} lines, got {rows}x{cols}")]
    DimensionMismatch { which: &'static str, n: usize, rows: usize, cols: usize },
    #[error("{which} matrix asymmetric at ({i}, {j}): {a} vs {b}")]
    AsymmetricMatrix { which: &'static str, i: usize, j: usize, a: f64, b: f64 },
    #[error("{which} matrix is not positive semi-definite (min eigenvalue {min_eigenvalue})")]
    NotPositiveSemiDefinite { which: &'static str, min_eigenvalue: f64 },
    #[error("junction matrix is singular at omega = {omega}")]
    SingularAtFrequency { omega: f64 },
    #[error("undamped resonance: transfer function has a pole at omega = {omega}")]
    PoleAtResonance { omega: f64 },
    #[error("branch evaluation left an imaginary residue {residue} at q = {q}")]
    BranchResidue { q: f64, residue: f64 },
    #[error("lossless junction failed unitarity: defect {defect}")]
    UnitarityViolation { defect: f64 },
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

/// N parallel lines meeting at the origin through mutual inductance and
/// elastance (inverse capacitance) matrices.
///
/// Elastance rather than capacitance is stored: the junction equations only
/// ever use `1/C_ij`, and the inverse stays finite for uncoupled pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct JunctionSpec {
    lines: Vec<TransmissionLineSpec>,
    mutual_inductance: DMatrix<f64>,
    elastance: DMatrix<f64>,
    hbar: f64,
}

impl JunctionSpec {
    pub fn new(
        lines: Vec<TransmissionLineSpec>,
        mutual_inductance: DMatrix<f64>,
        elastance: DMatrix<f64>,
        consts: &PhysicalConstants,
    ) -> Result<Self, ScatteringError> {
        let n = lines.len();
        if n == 0 {
            return Err(ScatteringError::InvalidParameter { name: "line count", value: 0.0 });
        }
        validate_symmetric_psd("mutual inductance", &mutual_inductance, n)?;
        validate_symmetric_psd("elastance", &elastance, n)?;
        Ok(Self { lines, mutual_inductance, elastance, hbar: consts.hbar() })
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    pub fn lines(&self) -> &[TransmissionLineSpec] {
        &self.lines
    }

    pub fn mutual_inductance(&self) -> &DMatrix<f64> {
        &self.mutual_inductance
    }

    pub fn elastance(&self) -> &DMatrix<f64> {
        &self.elastance
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// Per-line endpoint resistances `R_i = sqrt(L_i/C_i)`.
    pub fn line_resistances(&self) -> Vec<f64> {
        self.lines.iter().map(|l| l.endpoint_resistance()).collect()
    }
}

fn validate_symmetric_psd(
    which: &'static str,
    m: &DMatrix<f64>,
    n: usize,
) -> Result<(), ScatteringError> {
    if m.nrows() != n || m.ncols() != n {
        return Err(ScatteringError::DimensionMismatch {
            which,
            n,
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    let scale = m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs())).max(1e-300);
    for i in 0..n {
        for j in (i + 1)..n {
            if (m[(i, j)] - m[(j, i)]).abs() > SYMMETRY_TOL * scale {
                return Err(ScatteringError::AsymmetricMatrix {
                    which,
                    i: i + 1,
                    j: j + 1,
                    a: m[(i, j)],
                    b: m[(j, i)],
                });
            }
        }
    }
    let min_eig = m
        .clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .fold(f64::INFINITY, |acc, &v| acc.min(v));
    if min_eig < -SYMMETRY_TOL * scale {
        return Err(ScatteringError::NotPositiveSemiDefinite { which, min_eigenvalue: min_eig });
    }
    Ok(())
}

/// One S-matrix sample in the flux-normalized basis.
///
/// The reported sign follows the single-line closed form
/// `S = (w^2 L - 1/C + i w R)/(w^2 L - 1/C - i w R)`; the raw solution of
/// the junction Langevin equation carries the opposite overall sign (a
/// mode-expansion phase convention), exposed via [`ScatterSample::raw_matrix`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScatterSample {
    omega: f64,
    s_matrix: DMatrix<C64>,
}

/// Overall sign relating the raw Langevin-solve S-matrix to the reported
/// convention: `S_raw = RAW_SIGN * S_reported`.
pub const RAW_SIGN: f64 = -1.0;

impl ScatterSample {
    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Flux-normalized S-matrix in the reported sign convention.
    pub fn s_matrix(&self) -> &DMatrix<C64> {
        &self.s_matrix
    }

    /// The matrix as it comes out of the frequency-domain junction solve.
    pub fn raw_matrix(&self) -> DMatrix<C64> {
        self.s_matrix.map(|v| v * RAW_SIGN)
    }

    /// Max-entry magnitude of `S^dagger S - I`.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.s_matrix.nrows();
        let product = self.s_matrix.adjoint() * &self.s_matrix;
        let mut defect = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                let expected = if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
                defect = defect.max((product[(i, j)] - expected).norm());
            }
        }
        defect
    }
}

/// Endpoint charge response `H(w) = -1 / (w^2 L - 1/C - i w R)`.
pub fn transfer_function(
    omega: f64,
    endpoint: &EndpointLcSpec,
    resistance: f64,
) -> Result<C64, ScatteringError> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(ScatteringError::InvalidParameter { name: "omega", value: omega });
    }
    let denom = response_denominator(omega, endpoint, resistance);
    if denom.norm() == 0.0 {
        return Err(ScatteringError::PoleAtResonance { omega });
    }
    Ok(-C64::new(1.0, 0.0) / denom)
}

/// Reflection coefficient of a single terminated line:
/// `S(w) = (w^2 L - 1/C + i w R)/(w^2 L - 1/C - i w R)`, unimodular for
/// every real frequency.
pub fn single_line_s(
    omega: f64,
    endpoint: &EndpointLcSpec,
    resistance: f64,
) -> Result<C64, ScatteringError> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(ScatteringError::InvalidParameter { name: "omega", value: omega });
    }
    let denom = response_denominator(omega, endpoint, resistance);
    if denom.norm() == 0.0 {
        return Err(ScatteringError::PoleAtResonance { omega });
    }
    Ok(denom.conj() / denom)
}

fn response_denominator(omega: f64, endpoint: &EndpointLcSpec, resistance: f64) -> C64 {
    C64::new(
        omega * omega * endpoint.inductance() - 1.0 / endpoint.capacitance(),
        -omega * resistance,
    )
}

/// Solve the junction equation at `omega` and return the flux-normalized
/// scattering matrix.
///
/// The frequency-domain Langevin system is
/// `sum_j (-w^2 L_ij + E_ij) Q_j + i w R_i Q_i = 2 i w R_i Q_i^in`; the
/// outgoing charge is `Q^out = Q - Q^in`, and conjugating the resulting map
/// by `diag(sqrt(R_i))` yields a matrix that is unitary and symmetric for
/// every lossless junction.
pub fn network_s_matrix(
    omega: f64,
    junction: &JunctionSpec,
) -> Result<ScatterSample, ScatteringError> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(ScatteringError::InvalidParameter { name: "omega", value: omega });
    }
    let n = junction.len();
    let resistances = junction.line_resistances();

    let mut a = DMatrix::<C64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] = C64::new(
                -omega * omega * junction.mutual_inductance[(i, j)] + junction.elastance[(i, j)],
                0.0,
            );
        }
        a[(i, i)] += C64::new(0.0, omega * resistances[i]);
    }

    // rhs = 2 i w diag(R); columns of the solve give Q per unit Q^in.
    let mut rhs = DMatrix::<C64>::zeros(n, n);
    for i in 0..n {
        rhs[(i, i)] = C64::new(0.0, 2.0 * omega * resistances[i]);
    }

    let solved = a
        .lu()
        .solve(&rhs)
        .ok_or(ScatteringError::SingularAtFrequency { omega })?;
    if solved.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(ScatteringError::SingularAtFrequency { omega });
    }

    // Q^out = Q - Q^in, flux-normalize, then flip to the reported sign.
    let mut s = DMatrix::<C64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let m = solved[(i, j)] - if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
            let weight = (resistances[i] / resistances[j]).sqrt();
            s[(i, j)] = RAW_SIGN * weight * m;
        }
    }

    let sample = ScatterSample { omega, s_matrix: s };
    let defect = sample.unitarity_defect();
    if defect > UNITARITY_TOL {
        return Err(ScatteringError::UnitarityViolation { defect });
    }
    Ok(sample)
}

/// S-matrix samples over a frequency sweep (parallel under the default
/// feature; output order always matches `omegas`).
pub fn s_matrix_sweep(
    junction: &JunctionSpec,
    omegas: &[f64],
) -> Vec<Result<ScatterSample, ScatteringError>> {
    exec::map_slice(omegas, |&omega| network_s_matrix(omega, junction))
}

/// Damping classification of an endpoint by its Q-factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DampingRegime {
    Underdamped,
    Critical,
    Overdamped,
}

impl DampingRegime {
    pub fn label(&self) -> &'static str {
        match self {
            DampingRegime::Underdamped => "underdamped",
            DampingRegime::Critical => "critical",
            DampingRegime::Overdamped => "overdamped",
        }
    }
}

/// A positive Q-factor with its damping label (`q > 1/2` underdamped,
/// `q = 1/2` critical, `q < 1/2` overdamped).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QFactorRegime {
    q: f64,
    regime: DampingRegime,
}

impl QFactorRegime {
    pub fn new(q: f64) -> Result<Self, ScatteringError> {
        if !(q > 0.0 && q.is_finite()) {
            return Err(ScatteringError::InvalidParameter { name: "q", value: q });
        }
        let regime = if q > 0.5 {
            DampingRegime::Underdamped
        } else if q == 0.5 {
            DampingRegime::Critical
        } else {
            DampingRegime::Overdamped
        };
        Ok(Self { q, regime })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn regime(&self) -> DampingRegime {
        self.regime
    }
}

/// Spectral density of the endpoint charge in Q-factor variables.
fn variance_kernel(q: f64, qk: f64) -> f64 {
    let detune = qk * qk - q * q;
    qk / (detune * detune + qk * qk)
}

fn variance_quadrature_spec() -> QuadratureSpec {
    QuadratureSpec {
        abs_tol: 1e-12,
        rel_tol: 1e-12,
        max_subdivisions: 2000,
        transform: Transform::SemiInfiniteRational,
    }
}

/// Vacuum charge variance by adaptive quadrature of the spectral density:
/// `(hbar / 2R) * Int_0^inf q_k / ((q_k^2 - q^2)^2 + q_k^2) dq_k`.
pub fn charge_variance_quadrature(
    regime: QFactorRegime,
    resistance: f64,
    hbar: f64,
) -> Result<f64, ScatteringError> {
    let q = regime.q();
    let integral = integrate(
        |qk| variance_kernel(q, qk),
        0.0,
        f64::INFINITY,
        &variance_quadrature_spec(),
    )?;
    Ok(hbar / (2.0 * resistance) * integral.value)
}

/// Vacuum charge variance from the closed-form branch expression
/// `(hbar/2R) (pi + 2 atan((2q^2-1)/sqrt(4q^2-1))) / (2 sqrt(4q^2-1))`.
///
/// For `q < 1/2` the square root turns imaginary; the expression is
/// evaluated verbatim in complex arithmetic on the principal branch, the
/// imaginary part is checked to cancel (to 1e-9 relative) and the real
/// part returned. At exactly `q = 1/2` the continuity limit `hbar/R` of the
/// underdamped branch is used; see [`literature_critical_variance`] for the
/// commonly quoted (and inconsistent) value at that point.
pub fn charge_variance_closed(
    regime: QFactorRegime,
    resistance: f64,
    hbar: f64,
) -> Result<f64, ScatteringError> {
    let q = regime.q();
    if regime.regime() == DampingRegime::Critical {
        return Ok(hbar / resistance);
    }
    let disc = 4.0 * q * q - 1.0;
    let root = C64::new(disc, 0.0).sqrt();
    let arg = if disc > 0.0 {
        C64::new((2.0 * q * q - 1.0) / root.re, 0.0)
    } else {
        // (2q^2-1)/(i r) sits on the arctan branch cut along the imaginary
        // axis. The continuation of the underdamped branch approaches the
        // cut from Re < 0; an i-epsilon displacement onto that side keeps
        // the principal-branch evaluation on the continued sheet while
        // shifting the value by O(1e-30), far below the residue tolerance.
        let y = (1.0 - 2.0 * q * q) / root.im;
        C64::new(-1e-30 * y, y)
    };
    let value = (C64::new(std::f64::consts::PI, 0.0) + 2.0 * arg.atan()) / (2.0 * root);
    if value.im.abs() > 1e-9 * value.norm() {
        return Err(ScatteringError::BranchResidue { q, residue: value.im });
    }
    Ok(hbar / (2.0 * resistance) * value.re)
}

/// Charge variance of the flow-renormalized state: the spectral density is
/// damped by the cutoff weight `1 / sqrt(1 + (L_line/L)(q_k^2/q^2)/cutoff)`
/// and scaled by `gamma`. As `cutoff -> inf` at fixed `gamma` this
/// converges to `gamma` times the closed-form variance.
pub fn cmera_weighted_variance(
    regime: QFactorRegime,
    gamma: f64,
    cutoff: f64,
    lt_over_l: f64,
    resistance: f64,
    hbar: f64,
) -> Result<f64, ScatteringError> {
    for (name, value) in [("gamma", gamma), ("cutoff", cutoff), ("lt_over_l", lt_over_l)] {
        if !(value > 0.0 && value.is_finite()) {
            return Err(ScatteringError::InvalidParameter { name, value });
        }
    }
    let q = regime.q();
    let integral = integrate(
        |qk| {
            let weight = 1.0 / (1.0 + lt_over_l * (qk * qk) / (q * q) / cutoff).sqrt();
            variance_kernel(q, qk) * weight
        },
        0.0,
        f64::INFINITY,
        &variance_quadrature_spec(),
    )?;
    Ok(gamma * hbar / (2.0 * resistance) * integral.value)
}

/// Literature value quoted for the critically damped variance,
/// `pi hbar / 2R`. Direct integration of the spectral density gives
/// `hbar / R` instead; the CLI reports both and flags the discrepancy.
pub fn literature_critical_variance(resistance: f64, hbar: f64) -> f64 {
    std::f64::consts::PI * hbar / (2.0 * resistance)
}

/// Literature value quoted for the variance in the infinite-Q limit,
/// `pi hbar / 4R`. Direct integration gives `pi hbar / (4 R q)`, which
/// decays with the Q-factor; the CLI reports the ratio and flags it.
pub fn literature_large_q_variance(resistance: f64, hbar: f64) -> f64 {
    std::f64::consts::PI * hbar / (4.0 * resistance)
}
