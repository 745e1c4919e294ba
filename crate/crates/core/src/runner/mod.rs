//! Experiment runner: configuration, per-criterion verdicts and the report
//! files written for each run.
//!
//! # Files
//!
//! A run of experiment `E` writes into the output directory:
//!
//! * `E.json`: a [`Report`] with `"schema": "szlab-report/1"`, the full
//!   configuration, its sha256 and one entry per owned criterion (status,
//!   detail, metrics). No timestamps or paths, so equal configurations give
//!   equal bytes.
//! * `E.csv`: header row then one row per record. `nonconc` writes
//!   `group,q,pair_seed,target,n,mass,half_width`; `girth` one row per pair;
//!   the rest `criterion,metric,q,value,shape,bound`.
//! * `E.manifest.json`: a [`ReportManifest`] listing the files above with
//!   their sha256.
//!
//! [`summarize`] merges manifests into `summary.json` / `summary.csv` with
//! rows keyed by `(q, criterion, metric)`.

pub mod config;
pub mod criteria;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
pub use config::{Experiment, ExperimentConfig, Params, DEFAULT_SEED};

pub const SCHEMA: &str = "szlab-report/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    ReportOnly,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metric {
    pub name: String,
    pub q: Option<u64>,
    pub value: f64,
    /// Bound shape this value is read against, e.g. `q^-1/2 ln q`.
    pub shape: Option<String>,
    /// The shape evaluated at `q`.
    pub bound: Option<f64>,
}

impl Metric {
    pub fn new(name: &str, value: f64) -> Metric {
        Metric {
            name: name.to_string(),
            q: None,
            value,
            shape: None,
            bound: None,
        }
    }

    pub fn q(mut self, q: u64) -> Metric {
        self.q = Some(q);
        self
    }

    pub fn shape(mut self, shape: &str, bound: f64) -> Metric {
        self.shape = Some(shape.to_string());
        self.bound = Some(bound);
        self
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CriterionOutcome {
    pub id: u8,
    pub title: String,
    pub status: Status,
    pub detail: String,
    pub metrics: Vec<Metric>,
    /// Wall time; never serialized.
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Table {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(&self.columns).map_err(csv_err)?;
        for r in &self.rows {
            w.write_record(r).map_err(csv_err)?;
        }
        w.into_inner().map_err(|e| Error::Io(e.to_string()))
    }

    fn of_metrics(outcomes: &[CriterionOutcome]) -> Table {
        let mut t = Table::new(&["criterion", "metric", "q", "value", "shape", "bound"]);
        for o in outcomes {
            for m in &o.metrics {
                t.push(vec![
                    o.id.to_string(),
                    m.name.clone(),
                    opt(m.q),
                    m.value.to_string(),
                    m.shape.clone().unwrap_or_default(),
                    opt(m.bound),
                ]);
            }
        }
        t
    }
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub struct ExperimentOutput {
    pub outcomes: Vec<CriterionOutcome>,
    /// CSV rows; `None` means the metric listing.
    pub table: Option<Table>,
}

impl ExperimentOutput {
    fn metrics(outcomes: Vec<CriterionOutcome>) -> ExperimentOutput {
        ExperimentOutput {
            outcomes,
            table: None,
        }
    }

    pub fn table(&self) -> Table {
        self.table
            .clone()
            .unwrap_or_else(|| Table::of_metrics(&self.outcomes))
    }
}

/// Runs the experiment in memory.
pub fn execute(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let seed = config.seed;
    match &config.params {
        Params::FieldCheck(p) => criteria::field_check(p),
        Params::Enumerate(p) => criteria::enumerate(p, seed),
        Params::Girth(p) => criteria::girth(p, seed),
        Params::Walk(p) => criteria::walk(p, seed),
        Params::Nonconc(p) => criteria::nonconc(p, seed),
        Params::Spectral(p) => criteria::spectral(p, seed),
        Params::Polycount(p) => criteria::polycount(p, seed),
        Params::Wordlaw(p) => criteria::wordlaw(p, seed),
        Params::Sl2Trace(p) => criteria::sl2_trace(p, seed),
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub experiment: Experiment,
    pub config_hash: String,
    pub config: serde_json::Value,
    pub criteria: Vec<CriterionOutcome>,
}

impl Report {
    pub fn new(config: &ExperimentConfig, outcomes: Vec<CriterionOutcome>) -> Report {
        Report {
            schema: SCHEMA.to_string(),
            experiment: config.experiment(),
            config_hash: config_hash(config),
            config: config.to_value(),
            criteria: outcomes,
        }
    }

    pub fn to_json(&self) -> Vec<u8> {
        let mut v = serde_json::to_vec_pretty(self).expect("report serializes");
        v.push(b'\n');
        v
    }
}

pub fn config_hash(config: &ExperimentConfig) -> String {
    sha256_hex(&serde_json::to_vec(config).expect("config serializes"))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestFile {
    /// Relative to the manifest's directory.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionStatus {
    pub id: u8,
    pub status: Status,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportManifest {
    pub schema: String,
    /// `<experiment>-<first 16 hex digits of the config hash>`.
    pub run_id: String,
    pub experiment: Experiment,
    pub config_hash: String,
    pub files: Vec<ManifestFile>,
    pub criteria: Vec<CriterionStatus>,
}

impl ReportManifest {
    pub fn file_name(e: Experiment) -> String {
        format!("{}.manifest.json", e.name())
    }

    pub fn passed(&self) -> bool {
        self.criteria.iter().all(|c| c.status != Status::Fail)
    }

    pub fn load(path: &Path) -> Result<ReportManifest> {
        let m: ReportManifest = serde_json::from_slice(&fs::read(path)?)
            .map_err(|e| Error::Schema(format!("{}: {e}", path.display())))?;
        if m.schema != SCHEMA {
            return Err(Error::Schema(format!(
                "{} has schema {:?}, expected {SCHEMA:?}",
                path.display(),
                m.schema
            )));
        }
        Ok(m)
    }

    /// Recomputes every listed hash relative to `dir`.
    pub fn verify(&self, dir: &Path) -> Result<()> {
        for f in &self.files {
            let bytes = fs::read(dir.join(&f.path))?;
            if sha256_hex(&bytes) != f.sha256 || bytes.len() as u64 != f.bytes {
                return Err(Error::Inconsistent(format!(
                    "{} does not match its manifest hash",
                    f.path
                )));
            }
        }
        Ok(())
    }

    fn to_json(&self) -> Vec<u8> {
        let mut v = serde_json::to_vec_pretty(self).expect("manifest serializes");
        v.push(b'\n');
        v
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Formats {
    pub json: bool,
    pub csv: bool,
}

impl Default for Formats {
    fn default() -> Self {
        Formats {
            json: true,
            csv: true,
        }
    }
}

/// A finished run: the manifest as written plus the in-memory outcomes.
pub struct RunResult {
    pub manifest: ReportManifest,
    pub manifest_path: PathBuf,
    pub outcomes: Vec<CriterionOutcome>,
}

/// Executes one experiment and writes its report files and manifest into
/// `out_dir`.
pub fn run(config: &ExperimentConfig, out_dir: &Path, formats: Formats) -> Result<RunResult> {
    let out = execute(config)?;
    let e = config.experiment();
    fs::create_dir_all(out_dir)?;
    let mut files = Vec::new();
    let mut write = |name: String, bytes: Vec<u8>| -> Result<()> {
        fs::write(out_dir.join(&name), &bytes)?;
        files.push(ManifestFile {
            path: name,
            sha256: sha256_hex(&bytes),
            bytes: bytes.len() as u64,
        });
        Ok(())
    };
    if formats.json {
        write(
            format!("{}.json", e.name()),
            Report::new(config, out.outcomes.clone()).to_json(),
        )?;
    }
    if formats.csv {
        write(format!("{}.csv", e.name()), out.table().to_csv()?)?;
    }
    let hash = config_hash(config);
    let manifest = ReportManifest {
        schema: SCHEMA.to_string(),
        run_id: format!("{}-{}", e.name(), &hash[..16]),
        experiment: e,
        config_hash: hash,
        files,
        criteria: out
            .outcomes
            .iter()
            .map(|o| CriterionStatus {
                id: o.id,
                status: o.status,
            })
            .collect(),
    };
    let manifest_path = out_dir.join(ReportManifest::file_name(e));
    fs::write(&manifest_path, manifest.to_json())?;
    Ok(RunResult {
        manifest,
        manifest_path,
        outcomes: out.outcomes,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub q: Option<u64>,
    pub criterion: u8,
    pub experiment: Experiment,
    pub run_id: String,
    pub status: Status,
    pub metric: String,
    pub value: f64,
    pub shape: Option<String>,
    pub bound: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub schema: String,
    pub runs: Vec<String>,
    pub rows: Vec<SummaryRow>,
}

impl Summary {
    pub fn to_json(&self) -> Vec<u8> {
        let mut v = serde_json::to_vec_pretty(self).expect("summary serializes");
        v.push(b'\n');
        v
    }

    pub fn table(&self) -> Table {
        let mut t = Table::new(&[
            "q",
            "criterion",
            "experiment",
            "run_id",
            "status",
            "metric",
            "value",
            "shape",
            "bound",
        ]);
        for r in &self.rows {
            t.push(vec![
                opt(r.q),
                r.criterion.to_string(),
                r.experiment.name().to_string(),
                r.run_id.clone(),
                serde_json::to_value(r.status)
                    .expect("status")
                    .as_str()
                    .expect("string")
                    .to_string(),
                r.metric.clone(),
                r.value.to_string(),
                r.shape.clone().unwrap_or_default(),
                opt(r.bound),
            ]);
        }
        t
    }

    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let json = dir.join("summary.json");
        let csv = dir.join("summary.csv");
        fs::write(&json, self.to_json())?;
        fs::write(&csv, self.table().to_csv()?)?;
        Ok(vec![json, csv])
    }
}

/// Verifies each manifest, loads its JSON report and flattens every metric
/// into rows sorted by `(q, criterion)`; rows with no `q` sort first.
pub fn summarize(manifests: &[PathBuf]) -> Result<Summary> {
    if manifests.is_empty() {
        return Err(Error::InvalidParameter(
            "summarize needs at least one manifest".into(),
        ));
    }
    let mut runs = Vec::new();
    let mut rows = Vec::new();
    for path in manifests {
        let m = ReportManifest::load(path)?;
        let dir = path.parent().unwrap_or(Path::new("."));
        m.verify(dir)?;
        let json = m
            .files
            .iter()
            .find(|f| f.path.ends_with(".json"))
            .ok_or_else(|| {
                Error::InvalidParameter(format!("{} lists no JSON report", path.display()))
            })?;
        let report: Report = serde_json::from_slice(&fs::read(dir.join(&json.path))?)
            .map_err(|e| Error::Schema(format!("{}: {e}", json.path)))?;
        if report.schema != m.schema {
            return Err(Error::Schema(format!(
                "report schema {:?} differs from manifest schema {:?}",
                report.schema, m.schema
            )));
        }
        for c in &report.criteria {
            for metric in &c.metrics {
                rows.push(SummaryRow {
                    q: metric.q,
                    criterion: c.id,
                    experiment: m.experiment,
                    run_id: m.run_id.clone(),
                    status: c.status,
                    metric: metric.name.clone(),
                    value: metric.value,
                    shape: metric.shape.clone(),
                    bound: metric.bound,
                });
            }
        }
        runs.push(m.run_id);
    }
    rows.sort_by_key(|r| (r.q, r.criterion));
    Ok(Summary {
        schema: SCHEMA.to_string(),
        runs,
        rows,
    })
}
