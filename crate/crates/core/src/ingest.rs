//! Reading trial records and scoring configuration.
//!
//! Trial files are CSV with the header
//! `function,dimension,algorithm,trial,status,fe_used,ev_final`, or a JSON
//! array of objects with the same field names. `status` is `success` or
//! `exhausted`. The config is TOML (or JSON for a `.json` path):
//!
//! ```toml
//! [[function]]
//! id = "F1"
//! dimension = 10
//! ev_min = 1e-8
//! fe_max = 200000
//! group = "10-D"            # optional
//! ev_tie_tolerance = 1e-8   # optional
//!
//! [dimension_groups]        # optional, used when a function has no group
//! 20 = "20-D"
//!
//! [weights]                 # optional, group -> weight
//! "20-D" = 1.0
//! ```

use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::legacy::HistoryPoint;
use crate::trial::{FunctionContext, TrialOutcome, TrialTable, DEFAULT_EV_TIE_TOLERANCE};

pub const CSV_HEADER: [&str; 7] = ["function", "dimension", "algorithm", "trial", "status", "fe_used", "ev_final"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrialStatus {
    Success,
    Exhausted,
}

/// One line of a trial file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecordRow {
    pub function: String,
    pub dimension: u32,
    pub algorithm: String,
    pub trial: u32,
    pub status: TrialStatus,
    pub fe_used: u64,
    pub ev_final: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionSpec {
    pub id: String,
    pub dimension: u32,
    pub ev_min: f64,
    pub fe_max: u64,
    #[serde(default)]
    pub group: Option<String>,
    #[serde(default)]
    pub ev_tie_tolerance: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ScoringConfig {
    #[serde(rename = "function", default)]
    pub functions: Vec<FunctionSpec>,
    #[serde(default)]
    pub default_tie_tolerance: Option<f64>,
    #[serde(default)]
    pub dimension_groups: BTreeMap<String, String>,
    #[serde(default)]
    pub weights: BTreeMap<String, f64>,
}

impl ScoringConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: ScoringConfig = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let cfg: ScoringConfig = serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| with_path(e, path))?;
        if path.extension().is_some_and(|e| e == "json") {
            Self::from_json_str(&text)
        } else {
            Self::from_toml_str(&text)
        }
    }

    fn validate(&self) -> Result<()> {
        let mut seen = HashSet::new();
        for f in &self.functions {
            if !seen.insert((f.id.as_str(), f.dimension)) {
                return Err(Error::Config(format!("function {} (dimension {}) listed twice", f.id, f.dimension)));
            }
            self.context(f)?;
        }
        Ok(())
    }

    pub fn context(&self, f: &FunctionSpec) -> Result<FunctionContext> {
        let tol = f
            .ev_tie_tolerance
            .or(self.default_tie_tolerance)
            .unwrap_or(DEFAULT_EV_TIE_TOLERANCE);
        FunctionContext::new(f.id.clone(), f.dimension, f.ev_min, f.fe_max)
            .and_then(|c| c.with_tie_tolerance(tol))
            .map_err(|e| Error::Config(e.to_string()))
    }

    pub fn group_of(&self, f: &FunctionSpec) -> String {
        f.group
            .clone()
            .or_else(|| self.dimension_groups.get(&f.dimension.to_string()).cloned())
            .unwrap_or_else(|| format!("{}-D", f.dimension))
    }

    pub fn weight_list(&self) -> Vec<(String, f64)> {
        self.weights.iter().map(|(g, w)| (g.clone(), *w)).collect()
    }
}

/// Validated tables, each tagged with its group, in config order.
pub type GroupedTables = Vec<(String, TrialTable)>;

pub fn read_csv_rows<R: Read>(reader: R) -> Result<Vec<TrialRecordRow>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header = rdr.headers().map_err(|e| Error::Schema { row: 1, message: e.to_string() })?;
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::Schema {
            row: 1,
            message: format!("expected header `{}`, got `{}`", CSV_HEADER.join(","), header.iter().collect::<Vec<_>>().join(",")),
        });
    }
    let mut rows = Vec::new();
    for (i, rec) in rdr.deserialize::<TrialRecordRow>().enumerate() {
        // header is row 1
        let row = i + 2;
        rows.push(rec.map_err(|e| Error::Schema { row, message: csv_message(&e) })?);
    }
    Ok(rows)
}

fn csv_message(e: &csv::Error) -> String {
    match e.kind() {
        csv::ErrorKind::Deserialize { err, .. } => match err.field() {
            Some(f) => format!("column {}: {}", CSV_HEADER.get(f as usize).unwrap_or(&"?"), err.kind()),
            None => err.kind().to_string(),
        },
        _ => e.to_string(),
    }
}

pub fn read_json_rows(text: &str) -> Result<Vec<TrialRecordRow>> {
    let values: Vec<serde_json::Value> =
        serde_json::from_str(text).map_err(|e| Error::Schema { row: 0, message: e.to_string() })?;
    values
        .into_iter()
        .enumerate()
        .map(|(i, v)| serde_json::from_value(v).map_err(|e| Error::Schema { row: i + 1, message: e.to_string() }))
        .collect()
}

/// Reads a trial file, JSON when the path ends in `.json`, CSV otherwise.
pub fn read_rows(path: &Path) -> Result<Vec<TrialRecordRow>> {
    if path.extension().is_some_and(|e| e == "json") {
        read_json_rows(&std::fs::read_to_string(path).map_err(|e| with_path(e, path))?)
    } else {
        read_csv_rows(std::fs::File::open(path).map_err(|e| with_path(e, path))?)
    }
}

pub(crate) fn with_path(e: std::io::Error, path: &Path) -> Error {
    Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

pub fn ingest(path: &Path, config: &ScoringConfig) -> Result<GroupedTables> {
    let rows = read_rows(path)?;
    build_tables(&rows, config)
}

/// Converts a row into a trial, checked against its context. An exhausted
/// trial that also reached the target counts as a success at the budget.
pub fn row_to_outcome(row: &TrialRecordRow, ctx: &FunctionContext) -> Result<TrialOutcome> {
    let outcome = match row.status {
        TrialStatus::Success => TrialOutcome::success(row.fe_used, row.ev_final),
        TrialStatus::Exhausted if row.fe_used == ctx.fe_max && row.ev_final <= ctx.ev_min => {
            TrialOutcome::success(row.fe_used, row.ev_final)
        }
        TrialStatus::Exhausted => TrialOutcome::failure(row.fe_used, row.ev_final),
    };
    outcome.validate(ctx)?;
    Ok(outcome)
}

/// Groups rows (row numbers 2.. as in a CSV with header) into tables.
pub fn build_tables(rows: &[TrialRecordRow], config: &ScoringConfig) -> Result<GroupedTables> {
    let specs: HashMap<(&str, u32), &FunctionSpec> =
        config.functions.iter().map(|f| ((f.id.as_str(), f.dimension), f)).collect();
    let mut contexts: HashMap<(&str, u32), FunctionContext> = HashMap::new();
    let mut algorithms: Vec<&str> = Vec::new();
    // (function, dimension) -> algorithm -> [(trial index, outcome)]
    let mut buckets: HashMap<(&str, u32), HashMap<&str, Vec<(u32, TrialOutcome)>>> = HashMap::new();
    let mut seen = HashSet::new();

    for (i, row) in rows.iter().enumerate() {
        let rownum = i + 2;
        let key = (row.function.as_str(), row.dimension);
        let Some(spec) = specs.get(&key) else {
            return Err(Error::UnknownFunction { function: row.function.clone(), dimension: row.dimension });
        };
        let ctx = match contexts.entry(key) {
            std::collections::hash_map::Entry::Occupied(e) => e.into_mut(),
            std::collections::hash_map::Entry::Vacant(e) => e.insert(config.context(spec)?),
        };
        if !seen.insert((key, row.algorithm.as_str(), row.trial)) {
            return Err(Error::Schema {
                row: rownum,
                message: format!(
                    "duplicate trial {} of {} on {} (dimension {})",
                    row.trial, row.algorithm, row.function, row.dimension
                ),
            });
        }
        let outcome =
            row_to_outcome(row, ctx).map_err(|e| Error::InvalidTrial { row: rownum, message: e.to_string() })?;
        if !algorithms.contains(&row.algorithm.as_str()) {
            algorithms.push(&row.algorithm);
        }
        buckets.entry(key).or_default().entry(&row.algorithm).or_default().push((row.trial, outcome));
    }

    let mut tables = Vec::new();
    for spec in &config.functions {
        let key = (spec.id.as_str(), spec.dimension);
        let Some(mut per_alg) = buckets.remove(&key) else { continue };
        let names: Vec<&str> = algorithms.iter().copied().filter(|a| per_alg.contains_key(a)).collect();
        let mut trials = Vec::with_capacity(names.len());
        for a in &names {
            let mut list = per_alg.remove(a).unwrap_or_default();
            list.sort_by_key(|(idx, _)| *idx);
            trials.push(list.into_iter().map(|(_, t)| t).collect::<Vec<_>>());
        }
        let counts: Vec<usize> = trials.iter().map(Vec::len).collect();
        if counts.iter().any(|&c| c != counts[0]) {
            let detail: Vec<String> = names.iter().zip(&counts).map(|(a, c)| format!("{a}={c}")).collect();
            return Err(Error::InconsistentTrialCount(format!(
                "{} (dimension {}): {}",
                spec.id,
                spec.dimension,
                detail.join(", ")
            )));
        }
        let table = TrialTable::new(
            contexts.remove(&key).expect("context built with bucket"),
            names.iter().map(|s| s.to_string()).collect(),
            trials,
        )?;
        tables.push((config.group_of(spec), table));
    }
    Ok(tables)
}

/// Convergence histories keyed by `(function, dimension, algorithm)`, one
/// list per trial ordered by trial index. CSV header:
/// `function,dimension,algorithm,trial,fe,ev`.
pub type Histories = BTreeMap<(String, u32, String), Vec<Vec<HistoryPoint>>>;

#[derive(Deserialize)]
struct HistoryRow {
    function: String,
    dimension: u32,
    algorithm: String,
    trial: u32,
    fe: u64,
    ev: f64,
}

pub fn read_histories<R: Read>(reader: R) -> Result<Histories> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let mut raw: BTreeMap<(String, u32, String), BTreeMap<u32, Vec<HistoryPoint>>> = BTreeMap::new();
    for (i, rec) in rdr.deserialize::<HistoryRow>().enumerate() {
        let r = rec.map_err(|e| Error::Schema { row: i + 2, message: csv_message(&e) })?;
        raw.entry((r.function, r.dimension, r.algorithm))
            .or_default()
            .entry(r.trial)
            .or_default()
            .push(HistoryPoint { fe: r.fe, ev: r.ev });
    }
    Ok(raw.into_iter().map(|(k, v)| (k, v.into_values().collect())).collect())
}
