//! Command-line surface of the tool.

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "txh",
    version,
    about = "Quantum transmission-line networks: scattering, charge variance, \
             renormalisation flows and the emergent bulk geometry",
    after_help = "The TXH_THREADS environment variable caps worker threads for \
                  parallel sweeps."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output file (stdout when omitted); written atomically.
    #[arg(long, global = true)]
    pub out: Option<std::path::PathBuf>,

    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Work in natural units (hbar = 1); this is also the default.
    #[arg(long, global = true, conflicts_with = "hbar")]
    pub natural_units: bool,

    /// Explicit value of hbar.
    #[arg(long, global = true)]
    pub hbar: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Spacing {
    Log,
    Linear,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Derived quantities of a lossless line (impedance, speed, resistance).
    Line(LineArgs),
    /// Scattering matrix of a junction over a frequency or sweep.
    Scatter(ScatterArgs),
    /// Endpoint charge variance across Q-factor regimes.
    Variance(VarianceArgs),
    /// Variational flow: optimal squeeze profile, strength and g_uu.
    Cmera(CmeraArgs),
    /// Emergent metric, curvature, cosmological term and stress tensor.
    Geometry(GeometryArgs),
    /// Radial bulk propagator and boundary-to-bulk convolution.
    Propagator(PropagatorArgs),
    /// Radial log-length (the 1-D entanglement-scaling proxy).
    Entropy(EntropyArgs),
}

#[derive(Debug, Args)]
pub struct LineArgs {
    /// Inductance per unit length (H/m).
    #[arg(long, default_value_t = 1.0)]
    pub lt: f64,
    /// Capacitance per unit length (F/m).
    #[arg(long, default_value_t = 1.0)]
    pub ct: f64,
}

#[derive(Debug, Args)]
pub struct ScatterArgs {
    /// Network description file.
    #[arg(long)]
    pub network: std::path::PathBuf,
    /// Single frequency (rad/s).
    #[arg(long, conflicts_with_all = ["omega_min", "omega_max"])]
    pub omega: Option<f64>,
    /// Sweep start (rad/s).
    #[arg(long, requires = "omega_max")]
    pub omega_min: Option<f64>,
    /// Sweep end (rad/s).
    #[arg(long, requires = "omega_min")]
    pub omega_max: Option<f64>,
    /// Sweep sample count.
    #[arg(long, default_value_t = 64)]
    pub steps: usize,
    /// Sweep spacing.
    #[arg(long, value_enum, default_value_t = Spacing::Log)]
    pub spacing: Spacing,
}

#[derive(Debug, Args)]
pub struct VarianceArgs {
    /// Single Q-factor.
    #[arg(long, conflicts_with_all = ["q_min", "q_max"])]
    pub q: Option<f64>,
    /// Q-factor sweep start.
    #[arg(long, requires = "q_max")]
    pub q_min: Option<f64>,
    /// Q-factor sweep end.
    #[arg(long, requires = "q_min")]
    pub q_max: Option<f64>,
    /// Sweep sample count.
    #[arg(long, default_value_t = 32)]
    pub steps: usize,
    /// Sweep spacing.
    #[arg(long, value_enum, default_value_t = Spacing::Log)]
    pub spacing: Spacing,
    /// Line resistance R (ohm).
    #[arg(long = "R", alias = "r", default_value_t = 1.0)]
    pub r: f64,
    /// Also compute the flow-weighted variance with this prefactor.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// UV cutoff for the flow-weighted variance.
    #[arg(long, default_value_t = 1e9)]
    pub lambda_cutoff: f64,
    /// Line-to-endpoint inductance ratio for the flow weight.
    #[arg(long, default_value_t = 1.0)]
    pub lt_over_l: f64,
}

#[derive(Debug, Args)]
pub struct CmeraArgs {
    /// UV cutoff wavenumber.
    #[arg(long, default_value_t = 1.0)]
    pub lambda_cutoff: f64,
    /// Mode count of the log-uniform grid.
    #[arg(long, default_value_t = 512)]
    pub steps: usize,
    /// IR truncation of the flow scale.
    #[arg(long, default_value_t = -12.0, allow_hyphen_values = true)]
    pub u_min: f64,
    /// Inductance per unit length of the line.
    #[arg(long, default_value_t = 1.0)]
    pub lt: f64,
    /// Capacitance per unit length of the line.
    #[arg(long, default_value_t = 1.0)]
    pub ct: f64,
    /// Endpoint inductance (with --ep-c switches to the endpoint flow).
    #[arg(long, requires = "ep_c")]
    pub ep_l: Option<f64>,
    /// Endpoint capacitance.
    #[arg(long, requires = "ep_l")]
    pub ep_c: Option<f64>,
    /// Read the line (and optional endpoint) from a network file instead.
    #[arg(long, conflicts_with_all = ["ep_l", "ep_c", "lt", "ct"])]
    pub network: Option<std::path::PathBuf>,
}

#[derive(Debug, Args)]
pub struct GeometryArgs {
    /// Metric-form coupling coefficient (multiplies eps^2/z^2).
    #[arg(long, default_value_t = 0.0)]
    pub beta: f64,
    /// UV length scale.
    #[arg(long, default_value_t = 1.0)]
    pub epsilon: f64,
    /// Radial grid start.
    #[arg(long, default_value_t = 0.1)]
    pub z_min: f64,
    /// Radial grid end.
    #[arg(long, default_value_t = 10.0)]
    pub z_max: f64,
    /// Radial sample count.
    #[arg(long, default_value_t = 64)]
    pub steps: usize,
}

#[derive(Debug, Args)]
pub struct PropagatorArgs {
    /// z^2-form coupling coefficient beta_hat of the radial weight.
    #[arg(long, default_value_t = 0.0)]
    pub beta: f64,
    /// UV length scale (beta_hat = beta/epsilon^2 in the metric form).
    #[arg(long, default_value_t = 1.0)]
    pub epsilon: f64,
    /// Propagator normalisation constant.
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    /// Radial grid start.
    #[arg(long, default_value_t = 1e-3)]
    pub z_min: f64,
    /// Radial grid end.
    #[arg(long, default_value_t = 1e3)]
    pub z_max: f64,
    /// Radial sample count.
    #[arg(long, default_value_t = 64)]
    pub steps: usize,
    /// Boundary data CSV (x,t,phi0); switches to the bulk convolution.
    #[arg(long)]
    pub boundary: Option<std::path::PathBuf>,
    /// Bulk x at which to evaluate the convolution.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub x: f64,
    /// Bulk t at which to evaluate the convolution.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub t: f64,
}

#[derive(Debug, Args)]
pub struct EntropyArgs {
    /// UV cutoff length a.
    #[arg(long, default_value_t = 0.01)]
    pub z_min: f64,
    /// IR scale xi.
    #[arg(long, default_value_t = 10.0)]
    pub z_max: f64,
}
