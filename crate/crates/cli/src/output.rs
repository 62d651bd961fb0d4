use std::fmt;
use std::path::PathBuf;

use serde::Serialize;
use serde_json::{Map, Value};

/// Errors surfaced to the shell. Exit codes: usage 2, numeric/budget 3,
/// internal construction faults 4, plain I/O 1.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Lib(codedc::Error),
    Io(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Lib(err) => write!(f, "{err}"),
            CliError::Io(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<codedc::Error> for CliError {
    fn from(err: codedc::Error) -> Self {
        CliError::Lib(err)
    }
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Lib(codedc::Error::Input(_)) | CliError::Lib(codedc::Error::Capacity(_)) => {
                2
            }
            CliError::Lib(codedc::Error::Numeric(_))
            | CliError::Lib(codedc::Error::Sampling(_))
            | CliError::Lib(codedc::Error::BudgetExhausted { .. }) => 3,
            CliError::Lib(codedc::Error::Construction(_)) => 4,
            CliError::Io(_) => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Everything that determines a run, echoed verbatim into the output header
/// so any result file is reproducible from its own first lines.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scheme: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schemes: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub study: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sub_k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decoder: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mds_kind: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dist: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_grid: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_design: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub patterns: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exhaustive: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub payload: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub enum_limit: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mc_trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_pattern_evals: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mc_budget: Option<u64>,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
    pub format: String,
}

impl ExperimentConfig {
    pub fn new(command: &str, seed: u64, format: &str) -> Self {
        ExperimentConfig {
            command: command.to_string(),
            scheme: None,
            schemes: None,
            study: None,
            n: None,
            k: None,
            m: None,
            r: None,
            sub_k: None,
            decoder: None,
            mds_kind: None,
            dist: None,
            mu: None,
            alpha: None,
            eps_grid: None,
            eps_design: None,
            trials: None,
            jobs: None,
            patterns: None,
            exhaustive: None,
            payload: None,
            enum_limit: None,
            mc_trials: None,
            max_pattern_evals: None,
            mc_budget: None,
            seed,
            out: None,
            format: format.to_string(),
        }
    }

    /// Single-line canonical echo; field order is fixed by the struct.
    pub fn canonical(&self) -> String {
        serde_json::to_string(self).expect("config serialization cannot fail")
    }
}

/// One tabular result: a schema tag, named scalar extras, and typed rows.
/// The same table renders as commented CSV or as a JSON document.
pub struct Table {
    pub schema: &'static str,
    pub extras: Vec<(&'static str, Value)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(schema: &'static str, columns: Vec<&'static str>) -> Self {
        Table { schema, extras: Vec::new(), columns, rows: Vec::new() }
    }

    pub fn extra(&mut self, key: &'static str, value: impl Into<Value>) {
        self.extras.push((key, value.into()));
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        // Quote only when the cell would otherwise break the row shape.
        Value::String(s) if s.contains([',', '"', '\n']) => {
            format!("\"{}\"", s.replace('"', "\"\""))
        }
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn render_csv(cfg: &ExperimentConfig, table: &Table) -> String {
    let mut out = String::new();
    out.push_str(&format!("# schema: {}\n", table.schema));
    out.push_str(&format!("# config: {}\n", cfg.canonical()));
    for (key, value) in &table.extras {
        out.push_str(&format!("# {key}: {}\n", csv_cell(value)));
    }
    out.push_str(&table.columns.join(","));
    out.push('\n');
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(csv_cell).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn render_json(cfg: &ExperimentConfig, table: &Table) -> String {
    let mut doc = Map::new();
    doc.insert("schema".into(), Value::String(table.schema.to_string()));
    doc.insert("config".into(), serde_json::to_value(cfg).expect("config value"));
    for (key, value) in &table.extras {
        doc.insert((*key).to_string(), value.clone());
    }
    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|row| {
            let mut obj = Map::new();
            for (col, cell) in table.columns.iter().zip(row) {
                obj.insert((*col).to_string(), cell.clone());
            }
            Value::Object(obj)
        })
        .collect();
    doc.insert("rows".into(), Value::Array(rows));
    let mut text = serde_json::to_string_pretty(&Value::Object(doc)).expect("document value");
    text.push('\n');
    text
}

/// Renders per the config's format and writes to its output path or stdout.
pub fn emit(cfg: &ExperimentConfig, table: &Table) -> CliResult<()> {
    let text = match cfg.format.as_str() {
        "csv" => render_csv(cfg, table),
        "json" => render_json(cfg, table),
        other => return Err(CliError::usage(format!("unknown format {other:?}"))),
    };
    match &cfg.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Io(format!("writing {path}: {e}"))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// "start:stop:count" with inclusive endpoints and linear spacing.
pub fn parse_grid(spec: &str) -> CliResult<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || CliError::usage(format!("grid {spec:?} is not start:stop:count"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let start: f64 = parts[0].parse().map_err(|_| bad())?;
    let stop: f64 = parts[1].parse().map_err(|_| bad())?;
    let count: usize = parts[2].parse().map_err(|_| bad())?;
    if !(start.is_finite() && stop.is_finite()) || count == 0 {
        return Err(bad());
    }
    if count == 1 {
        if start != stop {
            return Err(CliError::usage(format!(
                "grid {spec:?} has one point but distinct endpoints"
            )));
        }
        return Ok(vec![start]);
    }
    let step = (stop - start) / (count - 1) as f64;
    Ok((0..count).map(|i| if i + 1 == count { stop } else { start + i as f64 * step }).collect())
}

/// "PxQxS" matrix-product shape.
pub fn parse_payload(spec: &str) -> CliResult<(usize, usize, usize)> {
    let dims: Vec<&str> = spec.split('x').collect();
    let bad = || CliError::usage(format!("payload {spec:?} is not PxQxS"));
    if dims.len() != 3 {
        return Err(bad());
    }
    let p: usize = dims[0].parse().map_err(|_| bad())?;
    let q: usize = dims[1].parse().map_err(|_| bad())?;
    let s: usize = dims[2].parse().map_err(|_| bad())?;
    if p == 0 || q == 0 || s == 0 {
        return Err(bad());
    }
    Ok((p, q, s))
}

/// --seed flag, then the CODEDC_SEED environment variable, then 0.
pub fn resolve_seed(flag: Option<u64>) -> CliResult<u64> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var("CODEDC_SEED") {
        Ok(text) => text
            .parse()
            .map_err(|_| CliError::usage(format!("CODEDC_SEED {text:?} is not a u64"))),
        Err(_) => Ok(0),
    }
}

pub fn out_string(path: &Option<PathBuf>) -> Option<String> {
    path.as_ref().map(|p| p.display().to_string())
}

/// Lossless f64 cell; NaN and infinities become null.
pub fn num(v: f64) -> Value {
    serde_json::Number::from_f64(v).map(Value::Number).unwrap_or(Value::Null)
}

pub fn opt_num(v: Option<f64>) -> Value {
    v.map(num).unwrap_or(Value::Null)
}
