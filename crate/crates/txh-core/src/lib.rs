//! Quantum theory of transmission lines and its coarse-grained (cMERA) description.
//!
//! The crate is organised around the pipeline the physics follows:
//!
//! - [`circuits`]: lumped LC(R) elements and distributed line parameters
//!   (impedance, signal speed, dispersion, Q-factors).
//! - [`gaussian`]: second-moment (Gaussian) states of the line on a mode
//!   grid, squeezing flows and quadratic-operator variances.
//! - [`scattering`]: frequency-domain input-output theory at a junction:
//!   transfer functions, multiport S-matrices, charge-variance regimes.
//! - [`cmera`]: the variational entanglement-renormalisation flow: per-mode
//!   energy minimisation, the recovered entangler strength and the
//!   information-geometry metric component.
//! - [`holography`]: the emergent radial geometry: metric family,
//!   curvature/Einstein analysis, bulk propagator and boundary convolution.
//! - [`numerics`]: shared kernels (adaptive quadrature, convex scalar
//!   minimisation, forward-mode second derivatives).
//!
//! Everything is a pure function of immutable value types, so concurrent use
//! needs no coordination. Grid-shaped work (mode sweeps, z-grids, frequency
//! sweeps) runs data-parallel under the default `parallel` feature and falls
//! back to plain iterators without it; results are identical either way.

pub mod circuits;
pub mod cmera;
pub mod exec;
pub mod gaussian;
pub mod holography;
pub mod numerics;
pub mod scattering;

pub use circuits::{EndpointLcSpec, PhysicalConstants, TransmissionLineSpec};
pub use gaussian::{GaussianModeState, ModeGrid, SqueezeProfile};
pub use scattering::{JunctionSpec, QFactorRegime, ScatterSample};
