//! Support code for the `cpt-eq` binary: the game file format, run
//! configuration, input parsers, presets and the subcommand drivers.
//!
//! Players and strategies are numbered from 1 on the command line and in
//! reports; the library itself counts from 0.

mod commands;
mod example;
mod gamefile;

use std::path::PathBuf;

use serde_json::Value;
use thiserror::Error;

use crate::cpt::Prospect;
use crate::fmt::g12;

pub use commands::{
    check, classify, regions, value, CheckMode, CheckOutcome, RegionsOutcome, RegionsRequest,
    MAX_GRID_POINTS,
};
pub use example::{
    disconnected_game, run_disconnected_example, top_bottom_threshold, ExampleCheck, ExampleConfig, ExampleReport,
    MU_BAR, MU_TILDE, THRESHOLD_WINDOW,
};
pub use gamefile::{GameFile, PreferenceSpec};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "CPT_EQ_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("JSON error at line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{field}: {message}")]
    Field { field: String, message: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] crate::Error),
}

impl CliError {
    pub(crate) fn field(field: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Field {
            field: field.into(),
            message: message.into(),
        }
    }
}

/// Process exit codes shared by every subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    /// Success, or the checked object is a member.
    Success = 0,
    /// The analysis completed with a negative answer.
    Negative = 1,
    /// Bad input, I/O failure or any other error.
    Error = 2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OutputFormat {
    Csv,
    Json,
    Svg,
}

impl std::str::FromStr for OutputFormat {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            "svg" => Ok(OutputFormat::Svg),
            other => Err(CliError::field("format", format!("unknown format '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub tolerance: f64,
    pub resolution: usize,
    pub output_dir: PathBuf,
    pub formats: Vec<OutputFormat>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            tolerance: crate::game::DEFAULT_TOLERANCE,
            resolution: crate::region::DEFAULT_RESOLUTION,
            output_dir: PathBuf::from("."),
            formats: vec![OutputFormat::Csv, OutputFormat::Json, OutputFormat::Svg],
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.resolution < 10 {
            return Err(CliError::field("resolution", "must be at least 10"));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(CliError::field("tolerance", "must be positive and finite"));
        }
        Ok(())
    }

    pub fn wants(&self, format: OutputFormat) -> bool {
        self.formats.contains(&format)
    }
}

/// Reads [`THREADS_ENV`]; `None` when unset.
pub fn thread_limit() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::field(THREADS_ENV, format!("expected a positive integer, got '{v}'"))),
        },
    }
}

fn parse_number(token: &str, what: &str) -> Result<f64, CliError> {
    token
        .trim()
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| CliError::field(what, format!("'{token}' is not a finite number")))
}

fn flatten_numbers(v: &Value, path: String, out: &mut Vec<f64>) -> Result<(), CliError> {
    match v {
        Value::Array(items) => {
            for (k, item) in items.iter().enumerate() {
                flatten_numbers(item, format!("{path}[{k}]"), out)?;
            }
            Ok(())
        }
        Value::Number(n) => {
            out.push(n.as_f64().expect("JSON numbers are finite"));
            Ok(())
        }
        other => Err(CliError::field(path, format!("expected a number, found {other}"))),
    }
}

/// Parses a joint distribution given either as a (possibly nested) JSON
/// array or as numbers separated by commas, whitespace or newlines.
pub fn parse_mu(text: &str) -> Result<Vec<f64>, CliError> {
    let trimmed = text.trim();
    if trimmed.starts_with('[') {
        let v: Value = serde_json::from_str(trimmed).map_err(|e| CliError::Json {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        let mut out = Vec::new();
        flatten_numbers(&v, "mu".into(), &mut out)?;
        return Ok(out);
    }
    let mut out = Vec::new();
    for (line_no, line) in trimmed.lines().enumerate() {
        for token in line.split(|c: char| c == ',' || c.is_whitespace()) {
            if token.is_empty() {
                continue;
            }
            out.push(parse_number(token, &format!("mu (line {})", line_no + 1))?);
        }
    }
    Ok(out)
}

/// Parses `p:z` pairs; each argument may hold several pairs separated by
/// commas.
pub fn parse_prospect(args: &[String]) -> Result<Prospect, CliError> {
    let mut probs = Vec::new();
    let mut outcomes = Vec::new();
    for (k, pair) in args
        .iter()
        .flat_map(|a| a.split(','))
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .enumerate()
    {
        let (p, z) = pair.split_once(':').ok_or_else(|| {
            CliError::field(format!("prospect[{k}]"), format!("'{pair}' is not of the form p:z"))
        })?;
        probs.push(parse_number(p, &format!("prospect[{k}].p"))?);
        outcomes.push(parse_number(z, &format!("prospect[{k}].z"))?);
    }
    Ok(Prospect::new(probs, outcomes)?)
}

/// Parses a comma-separated list of numbers.
pub fn parse_list(text: &str, what: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|t| parse_number(t, what))
        .collect()
}

/// Rounds every float in a JSON tree to 12 significant digits.
pub fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("checked");
            let r: f64 = g12(x).parse().expect("formatted float parses");
            *v = Value::from(r);
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

/// Pretty JSON with floats rounded to 12 significant digits and a trailing
/// newline.
pub fn to_report_json(value: &impl serde::Serialize) -> String {
    let mut v = serde_json::to_value(value).expect("report serializes");
    round_floats(&mut v);
    let mut s = serde_json::to_string_pretty(&v).expect("value serializes");
    s.push('\n');
    s
}

/// Named games shipped with the binary.
pub fn preset(name: &str) -> Option<GameFile> {
    match name {
        "disconnected" => Some(disconnected_game(0.5, 1.0)),
        _ => None,
    }
}

pub const PRESET_NAMES: [&str; 1] = ["disconnected"];
