//! Run configuration: flat `section.key = value` text, or the `config` object
//! of a previous run record.

use std::collections::BTreeMap;
use std::path::Path;

use gamow_core::friedrichs::{FormFactor, FriedrichsError, FriedrichsModel, ResonancePole};
use gamow_core::numerics::{QuadratureSpec, RootSearchConfig};
use serde_json::Value;

use crate::CliError;

/// Keys with a default value; every one of them is echoed in the run record.
const DEFAULTS: &[(&str, &str)] = &[
    ("evolve.branch", "time"),
    ("evolve.mode", "in"),
    ("evolve.value.im", "0"),
    ("evolve.value.re", "1"),
    ("model.cutoff", "10"),
    ("model.form_factor", "flat"),
    ("model.lambda", "0.1"),
    ("model.omega0", "1"),
    ("model.scale", "1"),
    ("numerics.abs_tol", "1e-13"),
    ("numerics.max_subdivisions", "4000"),
    ("numerics.oscillation_split", "20"),
    ("numerics.rel_tol", "1e-12"),
    ("oracle.bins", "2000"),
    ("oracle.omega_max", "auto"),
    ("output.format", "csv"),
    ("output.precision", "12"),
    ("root.max_iter", "60"),
    ("root.residual_tol", "1e-12"),
    ("root.step_tol", "1e-12"),
    ("survival.regimes", "true"),
    ("survival.zeno", "true"),
    ("thermo.beta", "1"),
    ("thermo.k", "1"),
];

/// Keys accepted without a default.
const OPTIONAL: &[&str] = &["model.table", "pole.e_r", "pole.gamma", "scan.axis"];

const GRIDS: &[&str] = &["beta", "scan", "tau", "temperature", "time"];
const GRID_FIELDS: &[&str] = &["points", "spacing", "start", "stop", "values"];

fn is_known(key: &str) -> bool {
    if DEFAULTS.iter().any(|(k, _)| *k == key) || OPTIONAL.contains(&key) {
        return true;
    }
    let mut parts = key.split('.');
    matches!(
        (parts.next(), parts.next(), parts.next(), parts.next()),
        (Some("grid"), Some(g), Some(f), None) if GRIDS.contains(&g) && GRID_FIELDS.contains(&f)
    )
}

/// Resolved configuration: user values over defaults, as raw strings.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    /// Parses config text. Input starting with `{` is read as a run record.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let given = if text.trim_start().starts_with('{') {
            parse_record(text)?
        } else {
            parse_flat(text)?
        };
        Self::from_map(given)
    }

    pub fn from_map(given: BTreeMap<String, String>) -> Result<Self, CliError> {
        if let Some(key) = given.keys().find(|k| !is_known(k)) {
            return Err(CliError::Config(format!("unknown key '{key}'")));
        }
        let mut values: BTreeMap<String, String> = DEFAULTS
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect();
        values.extend(given);
        Ok(Self { values })
    }

    pub fn set(&mut self, key: &str, value: &str) {
        debug_assert!(is_known(key));
        self.values.insert(key.into(), value.into());
    }

    pub fn echo(&self) -> Value {
        Value::Object(
            self.values
                .iter()
                .map(|(k, v)| (k.clone(), Value::String(v.clone())))
                .collect(),
        )
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn require(&self, key: &str) -> Result<&str, CliError> {
        self.get(key)
            .ok_or_else(|| CliError::Config(format!("{key}: missing")))
    }

    pub fn number(&self, key: &str) -> Result<f64, CliError> {
        parse_number(key, self.require(key)?)
    }

    pub fn count(&self, key: &str) -> Result<usize, CliError> {
        let raw = self.require(key)?;
        raw.trim()
            .parse()
            .map_err(|_| CliError::Config(format!("{key}: expected a non-negative integer, got '{raw}'")))
    }

    pub fn flag(&self, key: &str) -> Result<bool, CliError> {
        match self.require(key)?.trim() {
            "true" | "yes" | "1" => Ok(true),
            "false" | "no" | "0" => Ok(false),
            other => Err(CliError::Config(format!("{key}: expected true or false, got '{other}'"))),
        }
    }

    pub fn choice<'a>(&self, key: &str, options: &[&'a str]) -> Result<&'a str, CliError> {
        let raw = self.require(key)?.trim();
        options
            .iter()
            .find(|o| **o == raw)
            .copied()
            .ok_or_else(|| {
                CliError::Config(format!("{key}: expected one of {}, got '{raw}'", options.join(", ")))
            })
    }

    /// `grid.<name>.values` as a list, or `start`/`stop`/`points`/`spacing`.
    pub fn grid(&self, name: &str) -> Result<Option<Vec<f64>>, CliError> {
        let key = |f: &str| format!("grid.{name}.{f}");
        let ranged = ["start", "stop", "points", "spacing"]
            .iter()
            .any(|f| self.get(&key(f)).is_some());
        if let Some(list) = self.get(&key("values")) {
            if ranged {
                return Err(CliError::Config(format!(
                    "{}: give either a value list or start/stop/points, not both",
                    key("values")
                )));
            }
            let values = list
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| parse_number(&key("values"), s))
                .collect::<Result<Vec<_>, _>>()?;
            if values.is_empty() {
                return Err(CliError::Config(format!("{}: empty grid", key("values"))));
            }
            return Ok(Some(values));
        }
        if !ranged {
            return Ok(None);
        }
        let start = self.number(&key("start"))?;
        let stop = self.number(&key("stop"))?;
        let points = self.count(&key("points"))?;
        if points < 2 {
            return Err(CliError::Config(format!("{}: need at least 2 points", key("points"))));
        }
        let spacing = match self.get(&key("spacing")) {
            None => "linear",
            Some(_) => self.choice(&key("spacing"), &["linear", "log"])?,
        };
        let last = (points - 1) as f64;
        let values = match spacing {
            "log" => {
                if !(start > 0.0 && stop > 0.0) {
                    return Err(CliError::Config(format!(
                        "grid.{name}: log spacing needs positive start and stop"
                    )));
                }
                let (a, b) = (start.ln(), stop.ln());
                (0..points)
                    .map(|i| match i {
                        0 => start,
                        i if i == points - 1 => stop,
                        i => (a + (b - a) * i as f64 / last).exp(),
                    })
                    .collect()
            }
            _ => (0..points)
                .map(|i| match i {
                    i if i == points - 1 => stop,
                    i => start + (stop - start) * i as f64 / last,
                })
                .collect(),
        };
        Ok(Some(values))
    }

    pub fn quadrature(&self) -> Result<QuadratureSpec<f64>, CliError> {
        let spec = QuadratureSpec {
            abs_tol: self.number("numerics.abs_tol")?,
            rel_tol: self.number("numerics.rel_tol")?,
            max_subdivisions: self.count("numerics.max_subdivisions")?,
            oscillation_split: self.number("numerics.oscillation_split")?,
        };
        spec.validate()
            .map_err(|e| CliError::Config(format!("numerics: {e}")))?;
        Ok(spec)
    }

    pub fn root_search(&self) -> Result<RootSearchConfig<f64>, CliError> {
        let cfg = RootSearchConfig {
            initial_guess: None,
            step_tol: self.number("root.step_tol")?,
            residual_tol: self.number("root.residual_tol")?,
            max_iter: self.count("root.max_iter")?,
        };
        cfg.validate().map_err(|e| CliError::Config(format!("root: {e}")))?;
        Ok(cfg)
    }

    pub fn precision(&self) -> Result<usize, CliError> {
        let p = self.count("output.precision")?;
        if !(6..=17).contains(&p) {
            return Err(CliError::Config(format!("output.precision: must be in [6, 17], got {p}")));
        }
        Ok(p)
    }

    pub fn model(&self) -> Result<FriedrichsModel<f64>, CliError> {
        let ff = match self.choice("model.form_factor", &["flat", "rational", "tabulated"])? {
            "flat" => FormFactor::flat_cutoff(self.number("model.cutoff")?),
            "rational" => FormFactor::rational(self.number("model.scale")?),
            _ => {
                let path = self.require("model.table")?;
                let text = std::fs::read_to_string(Path::new(path))
                    .map_err(|e| CliError::Config(format!("model.table: cannot read '{path}': {e}")))?;
                FormFactor::from_table_text(&text)
            }
        }
        .map_err(|e| model_error(e, "model"))?;
        FriedrichsModel::new(self.number("model.omega0")?, self.number("model.lambda")?, ff)
            .map_err(|e| model_error(e, "model"))
    }

    /// The pole given directly as `pole.e_r` and `pole.gamma`, if any.
    pub fn explicit_pole(&self) -> Result<Option<ResonancePole<f64>>, CliError> {
        match (self.get("pole.e_r"), self.get("pole.gamma")) {
            (None, None) => Ok(None),
            (Some(_), Some(_)) => {
                ResonancePole::new(self.number("pole.e_r")?, self.number("pole.gamma")?)
                    .map(Some)
                    .map_err(|e| model_error(e, "pole"))
            }
            _ => Err(CliError::Config(
                "pole: give both pole.e_r and pole.gamma, or neither".into(),
            )),
        }
    }
}

fn model_error(e: FriedrichsError, section: &str) -> CliError {
    match e {
        FriedrichsError::InvalidParameter { field, reason } => {
            CliError::Config(format!("{section}.{field}: {reason}"))
        }
        other => CliError::Config(format!("{section}: {other}")),
    }
}

fn parse_number(key: &str, raw: &str) -> Result<f64, CliError> {
    raw.trim()
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| CliError::Config(format!("{key}: expected a finite number, got '{}'", raw.trim())))
}

fn parse_flat(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("line {}: expected 'key = value'", n + 1)))?;
        let key = key.trim();
        if key.is_empty() || key.contains(char::is_whitespace) {
            return Err(CliError::Config(format!("line {}: malformed key '{key}'", n + 1)));
        }
        if map.insert(key.to_string(), value.trim().to_string()).is_some() {
            return Err(CliError::Config(format!("line {}: duplicate key '{key}'", n + 1)));
        }
    }
    Ok(map)
}

fn parse_record(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let record: Value = serde_json::from_str(text)
        .map_err(|e| CliError::Config(format!("run record: {e}")))?;
    let config = record
        .get("config")
        .and_then(Value::as_object)
        .ok_or_else(|| CliError::Config("run record: no 'config' object".into()))?;
    config
        .iter()
        .map(|(k, v)| match v {
            Value::String(s) => Ok((k.clone(), s.clone())),
            _ => Err(CliError::Config(format!("run record: config value of '{k}' is not a string"))),
        })
        .collect()
}
