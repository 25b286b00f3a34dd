//! One report builder per subcommand.

use std::f64::consts::PI;
use std::path::Path;

use txh_core::circuits::{
    line_quantities, EndpointLcSpec, PhysicalConstants, TransmissionLineSpec,
};
use txh_core::cmera::{
    endpoint_strength_exact, endpoint_strength_quoted, metric_uu, minimize_per_mode,
    quoted_stationary_exponent, stationary_exponent, CmeraError, FlowConfig, Functional,
};
use txh_core::holography::{
    boundary_to_bulk, bulk_propagator, curvature_report, flux_residual, lin_spaced, log_spaced,
    propagator_flux, BoundaryField, GeometryError, MetricFamily,
};
use txh_core::scattering::{
    charge_variance_closed, charge_variance_quadrature, cmera_weighted_variance,
    literature_critical_variance, literature_large_q_variance, s_matrix_sweep, QFactorRegime,
    ScatteringError,
};

use crate::cli::{
    Cli, CmeraArgs, Command, EntropyArgs, GeometryArgs, LineArgs, PropagatorArgs, ScatterArgs,
    Spacing, VarianceArgs,
};
use crate::network::{parse_network, NetworkConfig};
use crate::report::{Report, Value};
use crate::CliError;

pub fn run(cli: &Cli) -> Result<Report, CliError> {
    let consts = match cli.hbar {
        Some(h) => PhysicalConstants::with_hbar(h)
            .map_err(|e| CliError::Invalid(e.to_string()))?,
        None => PhysicalConstants::natural(),
    };
    match &cli.command {
        Command::Line(args) => line_report(args, &consts),
        Command::Scatter(args) => scatter_report(args, &consts),
        Command::Variance(args) => variance_report(args, &consts),
        Command::Cmera(args) => cmera_report(args, &consts),
        Command::Geometry(args) => geometry_report(args),
        Command::Propagator(args) => propagator_report(args),
        Command::Entropy(args) => entropy_report(args),
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn sweep(min: f64, max: f64, steps: usize, spacing: Spacing) -> Result<Vec<f64>, CliError> {
    if steps < 2 {
        return Err(CliError::Invalid(format!("sweeps need at least 2 steps, got {steps}")));
    }
    if !(min.is_finite() && max.is_finite() && min < max) {
        return Err(CliError::Invalid(format!("sweep range [{min}, {max}] is not increasing")));
    }
    match spacing {
        Spacing::Log => {
            if min <= 0.0 {
                return Err(CliError::Invalid(format!(
                    "log sweeps need a positive start, got {min}"
                )));
            }
            Ok(log_spaced(min, max, steps))
        }
        Spacing::Linear => Ok(lin_spaced(min, max, steps)),
    }
}

fn scattering_failure(operation: &'static str, e: ScatteringError) -> CliError {
    use ScatteringError::*;
    match e {
        InvalidParameter { .. } | DimensionMismatch { .. } | AsymmetricMatrix { .. }
        | NotPositiveSemiDefinite { .. } => CliError::Invalid(e.to_string()),
        _ => CliError::numerical(operation, e),
    }
}

fn cmera_failure(operation: &'static str, e: CmeraError) -> CliError {
    use CmeraError::*;
    match e {
        Minimisation { .. } | State(_) => CliError::numerical(operation, e),
        _ => CliError::Invalid(e.to_string()),
    }
}

fn geometry_failure(operation: &'static str, e: GeometryError) -> CliError {
    match e {
        GeometryError::Quadrature(_) => CliError::numerical(operation, e),
        _ => CliError::Invalid(e.to_string()),
    }
}

fn line_report(args: &LineArgs, consts: &PhysicalConstants) -> Result<Report, CliError> {
    let line = TransmissionLineSpec::new(args.lt, args.ct)
        .map_err(|e| CliError::Invalid(e.to_string()))?;
    let (z, v, r) = line_quantities(&line);
    let mut report = Report::new("line");
    report
        .param_num("inductance_per_length", args.lt)
        .param_num("capacitance_per_length", args.ct)
        .param_num("hbar", consts.hbar())
        .columns(&["l_t", "c_t", "z_t", "v", "r"])
        .row(vec![args.lt.into(), args.ct.into(), z.into(), v.into(), r.into()]);
    Ok(report)
}

fn scatter_report(args: &ScatterArgs, consts: &PhysicalConstants) -> Result<Report, CliError> {
    let network = parse_network(&read_file(&args.network)?, consts)?;
    let omegas = match (args.omega, args.omega_min, args.omega_max) {
        (Some(w), None, None) => vec![w],
        (None, Some(lo), Some(hi)) => sweep(lo, hi, args.steps, args.spacing)?,
        _ => {
            return Err(CliError::Invalid(
                "scatter needs --omega or --omega-min/--omega-max".into(),
            ))
        }
    };

    let mut report = Report::new("scatter");
    report
        .param("network", args.network.display())
        .param("ports", network.junction.len())
        .param_num("hbar", consts.hbar())
        .columns(&["omega", "i", "j", "re_s", "im_s", "abs_s"]);
    for (i, line) in network.junction.lines().iter().enumerate() {
        report.param_num(&format!("line_{}_resistance", i + 1), line.endpoint_resistance());
    }

    let n = network.junction.len();
    for sample in s_matrix_sweep(&network.junction, &omegas) {
        let sample = sample.map_err(|e| scattering_failure("network_s_matrix", e))?;
        for i in 0..n {
            for j in 0..n {
                let s = sample.s_matrix()[(i, j)];
                report.row(vec![
                    sample.omega().into(),
                    ((i + 1) as i64).into(),
                    ((j + 1) as i64).into(),
                    s.re.into(),
                    s.im.into(),
                    s.norm().into(),
                ]);
            }
        }
    }
    Ok(report)
}

fn variance_report(args: &VarianceArgs, consts: &PhysicalConstants) -> Result<Report, CliError> {
    let hbar = consts.hbar();
    let qs = match (args.q, args.q_min, args.q_max) {
        (Some(q), None, None) => vec![q],
        (None, Some(lo), Some(hi)) => sweep(lo, hi, args.steps, args.spacing)?,
        (None, None, None) => sweep(0.1, 20.0, args.steps, args.spacing)?,
        _ => return Err(CliError::Invalid("give either --q or --q-min/--q-max".into())),
    };

    let mut report = Report::new("variance");
    report.param_num("resistance", args.r).param_num("hbar", hbar);
    let weighted = args.gamma.is_some();
    if let Some(gamma) = args.gamma {
        report
            .param_num("gamma", gamma)
            .param_num("lambda_cutoff", args.lambda_cutoff)
            .param_num("lt_over_l", args.lt_over_l);
    }
    let mut columns = vec!["q", "variance_quadrature", "variance_closed", "regime"];
    if weighted {
        columns.push("variance_weighted");
    }
    columns.push("flag");
    report.columns(&columns);

    let mut critical_flagged = false;
    let mut large_q: Option<(f64, f64)> = None;
    for &q in &qs {
        let regime = QFactorRegime::new(q).map_err(|e| CliError::Invalid(e.to_string()))?;
        let quad = charge_variance_quadrature(regime, args.r, hbar)
            .map_err(|e| scattering_failure("charge_variance_quadrature", e))?;
        let closed = charge_variance_closed(regime, args.r, hbar)
            .map_err(|e| scattering_failure("charge_variance_closed", e))?;

        let mut row_flags: Vec<&str> = Vec::new();
        if (q - 0.5).abs() <= 1e-12 {
            row_flags.push("critical-damping-quoted-value");
            if !critical_flagged {
                report.flag(
                    "critical-damping-quoted-value",
                    format!(
                        "at q = 1/2 direct integration gives {} (hbar/R), not the quoted \
                         pi/2 * hbar/R = {}; the closed form uses the continuity limit",
                        crate::report::format_number(quad),
                        crate::report::format_number(literature_critical_variance(args.r, hbar)),
                    ),
                    literature_critical_variance(args.r, hbar),
                    quad,
                );
                critical_flagged = true;
            }
        }
        if q >= 10.0 {
            row_flags.push("large-q-quoted-value");
            if large_q.map(|(prev, _)| q > prev).unwrap_or(true) {
                large_q = Some((q, quad));
            }
        }

        let mut row: Vec<Value> = vec![
            q.into(),
            quad.into(),
            closed.into(),
            regime.regime().label().into(),
        ];
        if weighted {
            let value = cmera_weighted_variance(
                regime,
                args.gamma.unwrap(),
                args.lambda_cutoff,
                args.lt_over_l,
                args.r,
                hbar,
            )
            .map_err(|e| scattering_failure("cmera_weighted_variance", e))?;
            row.push(value.into());
        }
        row.push(row_flags.join(";").into());
        report.row(row);
    }

    if let Some((q, quad)) = large_q {
        let ratio = quad * 4.0 * args.r * q / (PI * hbar);
        report.flag(
            "large-q-quoted-value",
            format!(
                "variance falls off as pi*hbar/(4 R q): normalized ratio 4Rq/(pi hbar) x \
                 variance = {} at q = {}; the quoted limit pi*hbar/(4R) omits the 1/q factor",
                crate::report::format_number(ratio),
                crate::report::format_number(q),
            ),
            literature_large_q_variance(args.r, hbar),
            quad,
        );
    }
    Ok(report)
}

fn cmera_report(args: &CmeraArgs, consts: &PhysicalConstants) -> Result<Report, CliError> {
    if args.steps < 64 {
        return Err(CliError::Invalid(format!(
            "strength recovery needs at least 64 modes, got {}",
            args.steps
        )));
    }
    let (line, endpoint) = match &args.network {
        Some(path) => {
            let network: NetworkConfig = parse_network(&read_file(path)?, consts)?;
            if network.junction.len() != 1 {
                return Err(CliError::Invalid(format!(
                    "flow analysis takes a single line; network has {}",
                    network.junction.len()
                )));
            }
            (network.junction.lines()[0], network.endpoint)
        }
        None => {
            let line = TransmissionLineSpec::new(args.lt, args.ct)
                .map_err(|e| CliError::Invalid(e.to_string()))?;
            let endpoint = match (args.ep_l, args.ep_c) {
                (Some(l), Some(c)) => Some(
                    EndpointLcSpec::new(l, c).map_err(|e| CliError::Invalid(e.to_string()))?,
                ),
                _ => None,
            };
            (line, endpoint)
        }
    };

    let grid = txh_core::gaussian::ModeGrid::log_uniform(args.lambda_cutoff, args.u_min, args.steps)
        .map_err(|e| CliError::Invalid(e.to_string()))?;
    let cfg = FlowConfig::new(args.lambda_cutoff, args.u_min, grid, line, endpoint, *consts)
        .map_err(|e| CliError::Invalid(e.to_string()))?;
    let functional = if endpoint.is_some() { Functional::Endpoint } else { Functional::Free };
    let result =
        minimize_per_mode(&cfg, functional).map_err(|e| cmera_failure("minimize_per_mode", e))?;

    let mut report = Report::new("cmera");
    report
        .param_num("lambda_cutoff", args.lambda_cutoff)
        .param_num("u_min", args.u_min)
        .param("modes", args.steps)
        .param_num("inductance_per_length", line.inductance_per_length())
        .param_num("capacitance_per_length", line.capacitance_per_length())
        .param_num("hbar", consts.hbar())
        .param("functional", if endpoint.is_some() { "endpoint" } else { "free" })
        .param_num("energy", result.energy);
    if let Some(ep) = &endpoint {
        report
            .param_num("endpoint_inductance", ep.inductance())
            .param_num("endpoint_capacitance", ep.capacitance());
    }
    report.columns(&["k", "u", "f_star", "f_quoted", "chi", "g_uu"]);

    let scales = cfg.grid().scales();
    for (i, (&k, &u)) in cfg.grid().samples().iter().zip(&scales).enumerate() {
        let f_quoted = match functional {
            Functional::Free => result.f_star[i],
            Functional::Endpoint => quoted_stationary_exponent(&cfg, k)
                .map_err(|e| cmera_failure("quoted_stationary_exponent", e))?,
        };
        let g = metric_uu(&cfg, u).map_err(|e| cmera_failure("metric_uu", e))?;
        report.row(vec![
            k.into(),
            u.into(),
            result.f_star[i].into(),
            f_quoted.into(),
            result.chi[i].into(),
            g.into(),
        ]);
    }

    if endpoint.is_some() {
        let k_edge = cfg.cutoff();
        let exact = stationary_exponent(&cfg, Functional::Endpoint, k_edge)
            .map_err(|e| cmera_failure("stationary_exponent", e))?;
        let quoted = quoted_stationary_exponent(&cfg, k_edge)
            .map_err(|e| cmera_failure("quoted_stationary_exponent", e))?;
        report.flag(
            "endpoint-stationarity-gap",
            format!(
                "the quoted optimum drops the flux-side loading factor; exact stationarity \
                 differs by the constant {} at every mode",
                crate::report::format_number(exact - quoted),
            ),
            quoted,
            exact,
        );
        let probe_u = -1.0;
        let chi_exact = endpoint_strength_exact(&cfg, probe_u)
            .map_err(|e| cmera_failure("endpoint_strength_exact", e))?;
        let chi_quoted = endpoint_strength_quoted(&cfg, probe_u)
            .map_err(|e| cmera_failure("endpoint_strength_quoted", e))?;
        report.flag(
            "strength-exponent-sign",
            format!(
                "two circulating closed forms for chi(u) disagree in the exponent sign of \
                 the weight (values at u = -1: exact {}, quoted {}); the metric adopts the \
                 quoted form, the chi column reports the exact recovery",
                crate::report::format_number(chi_exact),
                crate::report::format_number(chi_quoted),
            ),
            chi_quoted,
            chi_exact,
        );
    }
    Ok(report)
}

fn geometry_report(args: &GeometryArgs) -> Result<Report, CliError> {
    let family = MetricFamily::new(args.beta, args.epsilon)
        .map_err(|e| CliError::Invalid(e.to_string()))?;
    let grid = sweep(args.z_min, args.z_max, args.steps, Spacing::Log)?;
    let result =
        curvature_report(&family, &grid).map_err(|e| geometry_failure("curvature_report", e))?;

    let mut report = Report::new("geometry");
    report
        .param_num("beta", args.beta)
        .param_num("epsilon", args.epsilon)
        .param_num("z_min", args.z_min)
        .param_num("z_max", args.z_max)
        .param("steps", args.steps)
        .columns(&["z", "g_zz", "ricci_scalar", "lambda", "t_zz", "t_xx", "t_tt"]);
    for s in &result.samples {
        report.row(vec![
            s.z.into(),
            s.metric[0].into(),
            s.scalar.into(),
            s.lambda.into(),
            s.stress[0].into(),
            s.stress[1].into(),
            s.stress[2].into(),
        ]);
    }
    Ok(report)
}

fn propagator_report(args: &PropagatorArgs) -> Result<Report, CliError> {
    // --beta is the z^2-form coefficient here; fold epsilon back in so the
    // family's beta_hat equals it.
    let family = MetricFamily::new(args.beta * args.epsilon * args.epsilon, args.epsilon)
        .map_err(|e| CliError::Invalid(e.to_string()))?;
    let grid = sweep(args.z_min, args.z_max, args.steps, Spacing::Log)?;

    let mut report = Report::new("propagator");
    report
        .param_num("beta_hat", family.beta_hat())
        .param_num("epsilon", args.epsilon)
        .param_num("c", args.c)
        .param_num("z_min", args.z_min)
        .param_num("z_max", args.z_max)
        .param("steps", args.steps);

    match &args.boundary {
        None => {
            report.columns(&["z", "propagator", "flux", "flux_residual"]);
            for &z in &grid {
                let k = bulk_propagator(z, &family, args.c)
                    .map_err(|e| geometry_failure("bulk_propagator", e))?;
                let flux = propagator_flux(z, &family, args.c)
                    .map_err(|e| geometry_failure("propagator_flux", e))?;
                let residual = flux_residual(z, &family, args.c)
                    .map_err(|e| geometry_failure("flux_residual", e))?;
                report.row(vec![z.into(), k.into(), flux.into(), residual.into()]);
            }
        }
        Some(path) => {
            let field = BoundaryField::from_csv_str(&read_file(path)?)
                .map_err(|e| CliError::Invalid(e.to_string()))?;
            report
                .param("boundary", path.display())
                .param_num("x", args.x)
                .param_num("t", args.t);
            report.columns(&["z", "phi", "kernel_mass", "lost_mass_fraction", "flag"]);
            let mut worst: Option<(f64, f64)> = None;
            for &z in &grid {
                let out = boundary_to_bulk(&field, z, args.x, args.t, &family, args.c)
                    .map_err(|e| geometry_failure("boundary_to_bulk", e))?;
                let flag = if out.truncation_warning { "kernel-truncation" } else { "" };
                if out.truncation_warning
                    && worst.map(|(f, _)| out.lost_mass_fraction > f).unwrap_or(true)
                {
                    worst = Some((out.lost_mass_fraction, z));
                }
                report.row(vec![
                    z.into(),
                    out.value.into(),
                    out.kernel_mass.into(),
                    out.lost_mass_fraction.into(),
                    flag.into(),
                ]);
            }
            if let Some((fraction, z)) = worst {
                report.flag(
                    "kernel-truncation",
                    format!(
                        "sampled window captures too little kernel mass (worst loss {} at \
                         z = {}); widen the boundary extent",
                        crate::report::format_number(fraction),
                        crate::report::format_number(z),
                    ),
                    0.01,
                    fraction,
                );
            }
        }
    }
    Ok(report)
}

fn entropy_report(args: &EntropyArgs) -> Result<Report, CliError> {
    let closed = txh_core::holography::geodesic_log_length(args.z_min, args.z_max)
        .map_err(|e| geometry_failure("geodesic_log_length", e))?;
    let quadrature = txh_core::holography::geodesic_log_length_quadrature(args.z_min, args.z_max)
        .map_err(|e| geometry_failure("geodesic_log_length_quadrature", e))?;
    let mut report = Report::new("entropy");
    report
        .param_num("uv_cutoff", args.z_min)
        .param_num("ir_scale", args.z_max)
        .columns(&["a", "xi", "length_closed", "length_quadrature"])
        .row(vec![args.z_min.into(), args.z_max.into(), closed.into(), quadrature.into()]);
    Ok(report)
}
