//! Plain-text network description format.
//!
//! Sectioned key-value text, diff-friendly, no nesting:
//!
//! ```text
//! [lines]
//! 1 1.0 1.0            # index, inductance/length, capacitance/length
//! 2 4.0 1.0
//! [mutual_inductance]
//! 1 1 1.0              # i j value; either triangle, symmetrised on read
//! 2 1 0.1
//! 2 2 1.0
//! [elastance]
//! 1 1 1.0
//! 2 2 2.0
//! [endpoint]
//! 1.0 1.0              # optional: endpoint L and C
//! ```
//!
//! Unlisted matrix entries are zero. Values round-trip exactly: `emit`
//! prints 17 significant digits and `parse(emit(n)) == n` field for field.

use nalgebra::DMatrix;
use thiserror::Error;

use txh_core::circuits::{CircuitError, EndpointLcSpec, PhysicalConstants, TransmissionLineSpec};
use txh_core::scattering::{JunctionSpec, ScatteringError};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: value for ({i},{j}) conflicts with an earlier entry: {a} vs {b}")]
    ConflictingEntry { line: usize, i: usize, j: usize, a: f64, b: f64 },
    #[error("line {line}: index {index} outside 1..={n}")]
    IndexOutOfRange { line: usize, index: usize, n: usize },
    #[error("[lines] section missing or empty")]
    MissingLines,
    #[error("line indices must cover 1..={n} exactly; {index} is missing")]
    MissingLineIndex { n: usize, index: usize },
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Junction(#[from] ScatteringError),
}

/// A parsed network: the junction plus an optional endpoint used by the
/// flow analyses.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkConfig {
    pub junction: JunctionSpec,
    pub endpoint: Option<EndpointLcSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    None,
    Lines,
    MutualInductance,
    Elastance,
    Endpoint,
}

/// Parse the sectioned text format into a validated network.
pub fn parse_network(text: &str, consts: &PhysicalConstants) -> Result<NetworkConfig, ConfigError> {
    let mut section = Section::None;
    let mut lines: Vec<(usize, f64, f64, usize)> = Vec::new();
    let mut mutual: Vec<(usize, usize, f64, usize)> = Vec::new();
    let mut elastance: Vec<(usize, usize, f64, usize)> = Vec::new();
    let mut endpoint: Option<(f64, f64)> = None;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            section = match name {
                "lines" => Section::Lines,
                "mutual_inductance" => Section::MutualInductance,
                "elastance" => Section::Elastance,
                "endpoint" => Section::Endpoint,
                other => {
                    return Err(ConfigError::Parse {
                        line: lineno,
                        message: format!("unknown section [{other}]"),
                    })
                }
            };
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        match section {
            Section::None => {
                return Err(ConfigError::Parse {
                    line: lineno,
                    message: "data before any [section] header".into(),
                })
            }
            Section::Lines => {
                let (i, lt, ct) = parse_indexed_pair(&fields, lineno)?;
                lines.push((i, lt, ct, lineno));
            }
            Section::MutualInductance => {
                mutual.push(parse_matrix_entry(&fields, lineno)?);
            }
            Section::Elastance => {
                elastance.push(parse_matrix_entry(&fields, lineno)?);
            }
            Section::Endpoint => {
                if fields.len() != 2 {
                    return Err(ConfigError::Parse {
                        line: lineno,
                        message: format!("[endpoint] needs `L C`, got {} fields", fields.len()),
                    });
                }
                let l = parse_value(fields[0], lineno)?;
                let c = parse_value(fields[1], lineno)?;
                endpoint = Some((l, c));
            }
        }
    }

    if lines.is_empty() {
        return Err(ConfigError::MissingLines);
    }
    let n = lines.len();
    let mut specs: Vec<Option<TransmissionLineSpec>> = vec![None; n];
    for &(i, lt, ct, lineno) in &lines {
        if i == 0 || i > n {
            return Err(ConfigError::IndexOutOfRange { line: lineno, index: i, n });
        }
        specs[i - 1] = Some(TransmissionLineSpec::new(lt, ct)?);
    }
    let specs: Vec<TransmissionLineSpec> = specs
        .into_iter()
        .enumerate()
        .map(|(i, s)| s.ok_or(ConfigError::MissingLineIndex { n, index: i + 1 }))
        .collect::<Result<_, _>>()?;

    let mutual = assemble_matrix(n, &mutual)?;
    let elastance = assemble_matrix(n, &elastance)?;
    let junction = JunctionSpec::new(specs, mutual, elastance, consts)?;
    let endpoint = match endpoint {
        Some((l, c)) => Some(EndpointLcSpec::new(l, c)?),
        None => None,
    };
    Ok(NetworkConfig { junction, endpoint })
}

fn parse_indexed_pair(fields: &[&str], lineno: usize) -> Result<(usize, f64, f64), ConfigError> {
    if fields.len() != 3 {
        return Err(ConfigError::Parse {
            line: lineno,
            message: format!("[lines] needs `i L_T C_T`, got {} fields", fields.len()),
        });
    }
    let i = fields[0].parse::<usize>().map_err(|e| ConfigError::Parse {
        line: lineno,
        message: format!("bad line index `{}`: {e}", fields[0]),
    })?;
    Ok((i, parse_value(fields[1], lineno)?, parse_value(fields[2], lineno)?))
}

fn parse_matrix_entry(
    fields: &[&str],
    lineno: usize,
) -> Result<(usize, usize, f64, usize), ConfigError> {
    if fields.len() != 3 {
        return Err(ConfigError::Parse {
            line: lineno,
            message: format!("matrix entry needs `i j value`, got {} fields", fields.len()),
        });
    }
    let parse_index = |s: &str| {
        s.parse::<usize>().map_err(|e| ConfigError::Parse {
            line: lineno,
            message: format!("bad matrix index `{s}`: {e}"),
        })
    };
    Ok((
        parse_index(fields[0])?,
        parse_index(fields[1])?,
        parse_value(fields[2], lineno)?,
        lineno,
    ))
}

fn parse_value(s: &str, lineno: usize) -> Result<f64, ConfigError> {
    s.parse::<f64>().map_err(|e| ConfigError::Parse {
        line: lineno,
        message: format!("bad numeric value `{s}`: {e}"),
    })
}

fn assemble_matrix(
    n: usize,
    entries: &[(usize, usize, f64, usize)],
) -> Result<DMatrix<f64>, ConfigError> {
    let mut m = DMatrix::<f64>::zeros(n, n);
    let mut set = vec![false; n * n];
    for &(i, j, value, lineno) in entries {
        if i == 0 || i > n {
            return Err(ConfigError::IndexOutOfRange { line: lineno, index: i, n });
        }
        if j == 0 || j > n {
            return Err(ConfigError::IndexOutOfRange { line: lineno, index: j, n });
        }
        let (a, b) = (i - 1, j - 1);
        // Entries may name either triangle; a repeated pair must agree to
        // the 1e-12 symmetry tolerance.
        let prior = m[(a, b)];
        if set[a * n + b] && (prior - value).abs() > 1e-12 * prior.abs().max(value.abs()) {
            return Err(ConfigError::ConflictingEntry { line: lineno, i, j, a: prior, b: value });
        }
        m[(a, b)] = value;
        m[(b, a)] = value;
        set[a * n + b] = true;
        set[b * n + a] = true;
    }
    Ok(m)
}

/// Emit the text form of a network; inverse of [`parse_network`] up to
/// comment and ordering normalisation, exact in every field value.
pub fn emit_network(config: &NetworkConfig) -> String {
    let mut out = String::from("[lines]\n");
    for (i, line) in config.junction.lines().iter().enumerate() {
        out.push_str(&format!(
            "{} {:.16e} {:.16e}\n",
            i + 1,
            line.inductance_per_length(),
            line.capacitance_per_length()
        ));
    }
    let n = config.junction.len();
    let lower = |m: &DMatrix<f64>, out: &mut String| {
        for i in 0..n {
            for j in 0..=i {
                if m[(i, j)] != 0.0 {
                    out.push_str(&format!("{} {} {:.16e}\n", i + 1, j + 1, m[(i, j)]));
                }
            }
        }
    };
    out.push_str("[mutual_inductance]\n");
    lower(config.junction.mutual_inductance(), &mut out);
    out.push_str("[elastance]\n");
    lower(config.junction.elastance(), &mut out);
    if let Some(ep) = &config.endpoint {
        out.push_str(&format!(
            "[endpoint]\n{:.16e} {:.16e}\n",
            ep.inductance(),
            ep.capacitance()
        ));
    }
    out
}
