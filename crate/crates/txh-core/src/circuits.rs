//! Lumped LC elements and distributed transmission-line parameters.
//!
//! Value types are validated once at construction; every derived quantity
//! (impedance, signal speed, dispersion, Q-factor) is recomputed on demand
//! so nothing can go stale. All types are immutable and all operations are
//! pure, so unrestricted concurrent use is safe.

use thiserror::Error;

/// Reduced Planck constant in SI units (J s).
pub const HBAR_SI: f64 = 1.054_571_817e-34;

#[derive(Debug, Error, PartialEq)]
pub enum CircuitError {
    #[error("{name} must be positive and finite, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("wavenumber must be non-negative, got {0}")]
    NegativeWavenumber(f64),
}

/// Distributed line: inductance and capacitance per unit length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmissionLineSpec {
    inductance_per_length: f64,
    capacitance_per_length: f64,
}

impl TransmissionLineSpec {
    /// A lossless line with per-length inductance `l_t` (H/m) and
    /// capacitance `c_t` (F/m); both must be positive.
    pub fn new(l_t: f64, c_t: f64) -> Result<Self, CircuitError> {
        ensure_positive("inductance per length", l_t)?;
        ensure_positive("capacitance per length", c_t)?;
        Ok(Self { inductance_per_length: l_t, capacitance_per_length: c_t })
    }

    pub fn inductance_per_length(&self) -> f64 {
        self.inductance_per_length
    }

    pub fn capacitance_per_length(&self) -> f64 {
        self.capacitance_per_length
    }

    /// Characteristic impedance `Z = sqrt(L/C)` (ohm).
    pub fn characteristic_impedance(&self) -> f64 {
        (self.inductance_per_length / self.capacitance_per_length).sqrt()
    }

    /// Signal speed `v = 1/sqrt(L C)` (m/s).
    pub fn signal_speed(&self) -> f64 {
        1.0 / (self.inductance_per_length * self.capacitance_per_length).sqrt()
    }

    /// Resistance the semi-infinite line presents to its endpoint; equals
    /// the characteristic impedance for a lossless line.
    pub fn endpoint_resistance(&self) -> f64 {
        self.characteristic_impedance()
    }

    /// Linear dispersion `omega = v k`; rejects negative wavenumbers.
    pub fn dispersion(&self, k: f64) -> Result<f64, CircuitError> {
        if k < 0.0 {
            return Err(CircuitError::NegativeWavenumber(k));
        }
        Ok(self.signal_speed() * k)
    }

    /// Mode frequency at the UV cutoff, `omega_cutoff = v * cutoff`.
    pub fn cutoff_frequency(&self, cutoff: f64) -> f64 {
        self.signal_speed() * cutoff
    }
}

/// Derived scalar triple (impedance, speed, endpoint resistance).
pub fn line_quantities(line: &TransmissionLineSpec) -> (f64, f64, f64) {
    (
        line.characteristic_impedance(),
        line.signal_speed(),
        line.endpoint_resistance(),
    )
}

/// Lumped LC circuit terminating a line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EndpointLcSpec {
    inductance: f64,
    capacitance: f64,
}

impl EndpointLcSpec {
    pub fn new(inductance: f64, capacitance: f64) -> Result<Self, CircuitError> {
        ensure_positive("endpoint inductance", inductance)?;
        ensure_positive("endpoint capacitance", capacitance)?;
        Ok(Self { inductance, capacitance })
    }

    pub fn inductance(&self) -> f64 {
        self.inductance
    }

    pub fn capacitance(&self) -> f64 {
        self.capacitance
    }

    /// Resonance frequency `1/sqrt(L C)`.
    pub fn resonance_frequency(&self) -> f64 {
        1.0 / (self.inductance * self.capacitance).sqrt()
    }
}

/// Q-factor of an LC endpoint loaded by a line:
/// `(L/R) omega_0 = sqrt(L/C) sqrt(C_line/L_line)`.
pub fn q_factor(endpoint: &EndpointLcSpec, line: &TransmissionLineSpec) -> f64 {
    (endpoint.inductance / endpoint.capacitance).sqrt() / line.characteristic_impedance()
}

/// Unit system: only hbar matters for the quantities computed here.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    hbar: f64,
}

impl PhysicalConstants {
    /// Natural units (`hbar = 1`), the default for analysis and tests.
    pub fn natural() -> Self {
        Self { hbar: 1.0 }
    }

    /// SI value of hbar.
    pub fn si() -> Self {
        Self { hbar: HBAR_SI }
    }

    pub fn with_hbar(hbar: f64) -> Result<Self, CircuitError> {
        ensure_positive("hbar", hbar)?;
        Ok(Self { hbar })
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::natural()
    }
}

fn ensure_positive(name: &'static str, value: f64) -> Result<(), CircuitError> {
    if !(value > 0.0 && value.is_finite()) {
        return Err(CircuitError::NonPositive { name, value });
    }
    Ok(())
}
