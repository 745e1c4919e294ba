use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    FieldCheck,
    Enumerate,
    Girth,
    Walk,
    Nonconc,
    Spectral,
    Polycount,
    Wordlaw,
    Sl2Trace,
}

impl Experiment {
    pub const ALL: [Experiment; 9] = [
        Experiment::FieldCheck,
        Experiment::Enumerate,
        Experiment::Girth,
        Experiment::Walk,
        Experiment::Nonconc,
        Experiment::Spectral,
        Experiment::Polycount,
        Experiment::Wordlaw,
        Experiment::Sl2Trace,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::FieldCheck => "field-check",
            Experiment::Enumerate => "enumerate",
            Experiment::Girth => "girth",
            Experiment::Walk => "walk",
            Experiment::Nonconc => "nonconc",
            Experiment::Spectral => "spectral",
            Experiment::Polycount => "polycount",
            Experiment::Wordlaw => "wordlaw",
            Experiment::Sl2Trace => "sl2-trace",
        }
    }

    /// Acceptance criteria decided by this experiment.
    pub fn criteria(self) -> &'static [u8] {
        match self {
            Experiment::FieldCheck => &[1],
            Experiment::Enumerate => &[2, 3, 4],
            Experiment::Girth => &[5, 6],
            Experiment::Walk => &[7, 10],
            Experiment::Nonconc => &[8, 9],
            Experiment::Spectral => &[15],
            Experiment::Polycount => &[11, 12],
            Experiment::Wordlaw => &[13, 14],
            Experiment::Sl2Trace => &[16],
        }
    }

    /// The experiment owning criterion `id`. Criterion 17 (determinism) is a
    /// property of every run and has no experiment of its own.
    pub fn for_criterion(id: u8) -> Option<Experiment> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.criteria().contains(&id))
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Experiment> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::UnknownExperiment(s.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldCheckParams {
    /// Field degrees `m`, each odd.
    pub degrees: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnumerateParams {
    pub m: u32,
    pub sub_degree: u32,
    pub products: u64,
    pub closure_pairs: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GirthParams {
    pub m: u32,
    pub pairs: u64,
    pub max_len: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WalkParams {
    pub m: u32,
    /// Longest closed-walk length counted against the Kesten bound.
    pub kesten_max_len: usize,
    pub word_length: usize,
    pub word_samples: usize,
    pub pair_samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonconcParams {
    pub m: u32,
    pub sub_degree: u32,
    pub pairs: u64,
    pub steps: usize,
    pub tolerance: f64,
    pub delta0: f64,
    pub cs_pairs: u64,
    pub cs_n: Vec<usize>,
    pub cs_m: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralParams {
    pub m: u32,
    pub pairs: u64,
    pub gap: f64,
    pub toy_tolerance: f64,
    pub lanczos_tol: f64,
    pub max_iter: usize,
    pub multiplicity_tol: f64,
    pub multiplicity_budget: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolycountParams {
    pub twisted_degrees: Vec<u32>,
    pub twisted_ks: Vec<usize>,
    pub twisted_ds: Vec<usize>,
    pub twisted_samples: usize,
    pub degrees: Vec<u32>,
    pub ds: Vec<usize>,
    pub samples: usize,
    pub cross_validate_max_q: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WordlawParams {
    pub m: u32,
    pub max_len: usize,
    pub attempts: usize,
    pub tuples: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sl2TraceParams {
    pub m: u32,
    pub samples: u64,
    pub sigmas: f64,
    pub report_degree: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "experiment", rename_all = "kebab-case")]
pub enum Params {
    FieldCheck(FieldCheckParams),
    Enumerate(EnumerateParams),
    Girth(GirthParams),
    Walk(WalkParams),
    Nonconc(NonconcParams),
    Spectral(SpectralParams),
    Polycount(PolycountParams),
    Wordlaw(WordlawParams),
    Sl2Trace(Sl2TraceParams),
}

impl Params {
    pub fn defaults(e: Experiment) -> Params {
        match e {
            Experiment::FieldCheck => Params::FieldCheck(FieldCheckParams {
                degrees: vec![3, 5, 7, 9],
            }),
            Experiment::Enumerate => Params::Enumerate(EnumerateParams {
                m: 3,
                sub_degree: 1,
                products: 100_000,
                closure_pairs: 1000,
            }),
            Experiment::Girth => Params::Girth(GirthParams {
                m: 3,
                pairs: 100,
                max_len: 6,
            }),
            Experiment::Walk => Params::Walk(WalkParams {
                m: 3,
                kesten_max_len: 12,
                word_length: 20,
                word_samples: 1000,
                pair_samples: 20,
            }),
            Experiment::Nonconc => Params::Nonconc(NonconcParams {
                m: 3,
                sub_degree: 1,
                pairs: 100,
                steps: 100,
                tolerance: 1e-2,
                delta0: 0.25,
                cs_pairs: 20,
                cs_n: vec![5, 10, 20],
                cs_m: vec![0, 5],
            }),
            Experiment::Spectral => Params::Spectral(SpectralParams {
                m: 3,
                pairs: 50,
                gap: 1e-3,
                toy_tolerance: 1e-8,
                lanczos_tol: 1e-9,
                max_iter: 400,
                multiplicity_tol: 1e-6,
                multiplicity_budget: 20,
            }),
            Experiment::Polycount => Params::Polycount(PolycountParams {
                twisted_degrees: vec![3, 5],
                twisted_ks: vec![1, 2],
                twisted_ds: vec![1, 2, 3],
                twisted_samples: 1000,
                degrees: vec![3, 5, 7, 9],
                ds: vec![1, 2, 3, 4],
                samples: 10_000,
                cross_validate_max_q: 512,
            }),
            Experiment::Wordlaw => Params::Wordlaw(WordlawParams {
                m: 3,
                max_len: 8,
                attempts: 50,
                tuples: 1000,
            }),
            Experiment::Sl2Trace => Params::Sl2Trace(Sl2TraceParams {
                m: 3,
                samples: 100_000,
                sigmas: 5.0,
                report_degree: 6,
            }),
        }
    }

    pub fn experiment(&self) -> Experiment {
        match self {
            Params::FieldCheck(_) => Experiment::FieldCheck,
            Params::Enumerate(_) => Experiment::Enumerate,
            Params::Girth(_) => Experiment::Girth,
            Params::Walk(_) => Experiment::Walk,
            Params::Nonconc(_) => Experiment::Nonconc,
            Params::Spectral(_) => Experiment::Spectral,
            Params::Polycount(_) => Experiment::Polycount,
            Params::Wordlaw(_) => Experiment::Wordlaw,
            Params::Sl2Trace(_) => Experiment::Sl2Trace,
        }
    }
}

pub const DEFAULT_SEED: u64 = 42;

/// Everything a run depends on. The output directory and format toggles are
/// not part of it, so they never change report bytes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub seed: u64,
    #[serde(flatten)]
    pub params: Params,
}

impl ExperimentConfig {
    pub fn new(e: Experiment, seed: u64) -> ExperimentConfig {
        ExperimentConfig {
            seed,
            params: Params::defaults(e),
        }
    }

    pub fn experiment(&self) -> Experiment {
        self.params.experiment()
    }

    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("config serializes")
    }

    /// Replaces the listed keys. Unknown keys, a different experiment name
    /// and ill-typed values are errors.
    pub fn apply(&mut self, overrides: &Map<String, Value>) -> Result<()> {
        let mut obj = match self.to_value() {
            Value::Object(o) => o,
            _ => unreachable!("config is a map"),
        };
        for (k, v) in overrides {
            if k == "experiment" {
                if v.as_str() != Some(self.experiment().name()) {
                    return Err(Error::InvalidParameter(format!(
                        "config is for experiment {v}, not {}",
                        self.experiment()
                    )));
                }
                continue;
            }
            if !obj.contains_key(k) {
                return Err(Error::InvalidParameter(format!(
                    "unknown key {k:?} for experiment {}",
                    self.experiment()
                )));
            }
            obj.insert(k.clone(), v.clone());
        }
        *self = serde_json::from_value(Value::Object(obj))
            .map_err(|e| Error::InvalidParameter(format!("bad config value: {e}")))?;
        Ok(())
    }

    /// Applies a TOML key-value file. Top-level scalars and arrays apply to
    /// every experiment; a table named after the experiment applies on top.
    /// Tables for other experiments are ignored.
    pub fn apply_toml(&mut self, text: &str) -> Result<()> {
        let table: toml::Table = toml::from_str(text)
            .map_err(|e| Error::InvalidParameter(format!("config file: {e}")))?;
        let mut global = Map::new();
        let mut own = Map::new();
        for (k, v) in table {
            match v {
                toml::Value::Table(t) => {
                    let e: Experiment = k.parse()?;
                    if e == self.experiment() {
                        for (k2, v2) in t {
                            own.insert(k2, toml_to_json(v2)?);
                        }
                    }
                }
                v => {
                    global.insert(k, toml_to_json(v)?);
                }
            }
        }
        self.apply(&global)?;
        self.apply(&own)
    }

    /// `key=value` with the value in TOML syntax; bare words are strings.
    pub fn apply_assignment(&mut self, assignment: &str) -> Result<()> {
        let (k, v) = assignment.split_once('=').ok_or_else(|| {
            Error::InvalidParameter(format!("expected key=value, got {assignment:?}"))
        })?;
        let value = match toml::from_str::<toml::Table>(&format!("v = {v}")) {
            Ok(mut t) => toml_to_json(t.remove("v").expect("parsed"))?,
            Err(_) => Value::String(v.trim().to_string()),
        };
        let mut m = Map::new();
        m.insert(k.trim().to_string(), value);
        self.apply(&m)
    }

    /// Sets the field size: `m` where the experiment has one, otherwise every
    /// degree list.
    pub fn set_q(&mut self, q: u64) -> Result<()> {
        if q < 2 || !q.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "q = {q} is not a power of 2"
            )));
        }
        let m = q.trailing_zeros();
        let mut o = Map::new();
        match &self.params {
            Params::FieldCheck(_) => {
                o.insert("degrees".into(), Value::from(vec![m]));
            }
            Params::Polycount(_) => {
                o.insert("degrees".into(), Value::from(vec![m]));
                o.insert("twisted_degrees".into(), Value::from(vec![m]));
            }
            _ => {
                o.insert("m".into(), Value::from(m));
            }
        }
        self.apply(&o)
    }
}

fn toml_to_json(v: toml::Value) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| Error::InvalidParameter(format!("config value: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for e in Experiment::ALL {
            assert_eq!(e.name().parse::<Experiment>().unwrap(), e);
            assert_eq!(ExperimentConfig::new(e, 1).experiment(), e);
        }
        assert!(matches!(
            "nope".parse::<Experiment>(),
            Err(Error::UnknownExperiment(_))
        ));
    }

    #[test]
    fn every_criterion_has_one_owner() {
        for id in 1..=16u8 {
            let owners = Experiment::ALL
                .iter()
                .filter(|e| e.criteria().contains(&id))
                .count();
            assert_eq!(owners, 1, "criterion {id}");
        }
        assert_eq!(Experiment::for_criterion(17), None);
    }

    #[test]
    fn config_serde_round_trip() {
        for e in Experiment::ALL {
            let c = ExperimentConfig::new(e, 7);
            let back: ExperimentConfig = serde_json::from_value(c.to_value()).unwrap();
            assert_eq!(back, c);
            assert_eq!(c.to_value()["experiment"], e.name());
        }
    }

    #[test]
    fn toml_overrides() {
        let mut c = ExperimentConfig::new(Experiment::Girth, 42);
        c.apply_toml("seed = 3\n[girth]\npairs = 10\nmax_len = 4\n[walk]\nword_length = 9\n")
            .unwrap();
        assert_eq!(c.seed, 3);
        match &c.params {
            Params::Girth(p) => assert_eq!((p.pairs, p.max_len), (10, 4)),
            _ => unreachable!(),
        }
        assert!(c.apply_toml("bogus = 1").is_err());
        assert!(c.apply_toml("[nosuch]\nx = 1").is_err());
        assert!(c.apply_toml("pairs = \"many\"").is_err());
    }

    #[test]
    fn assignments_and_q() {
        let mut c = ExperimentConfig::new(Experiment::Nonconc, 42);
        c.apply_assignment("delta0=0.5").unwrap();
        c.apply_assignment("cs_n = [1, 2]").unwrap();
        c.set_q(32).unwrap();
        match &c.params {
            Params::Nonconc(p) => {
                assert_eq!(p.delta0, 0.5);
                assert_eq!(p.cs_n, vec![1, 2]);
                assert_eq!(p.m, 5);
            }
            _ => unreachable!(),
        }
        assert!(c.set_q(12).is_err());
        assert!(c.apply_assignment("novalue").is_err());
        let mut f = ExperimentConfig::new(Experiment::FieldCheck, 0);
        f.set_q(32).unwrap();
        assert_eq!(f.to_value()["degrees"], serde_json::json!([5]));
    }
}
