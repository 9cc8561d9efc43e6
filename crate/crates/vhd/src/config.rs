//! Scenario files: flat `key = value` lines, `#` starts a comment.
//!
//! ```text
//! preset = fig1b          # optional base scenario
//! a_v = 0.3
//! initial.G = 50
//! horizon_days = 365
//! outputs = timeseries, r0, equilibria
//! ```
//!
//! Parameter keys are the ASCII symbol names (`lambda_h`, `d_h`, ..., `K_x`).
//! Unknown or repeated keys are errors.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use vhd_core::integrator::IntegratorOptions;
use vhd_core::state::COMPONENTS;
use vhd_core::{ModelParams, ParamName, ParamSet, StateVector};

use crate::presets;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Output {
    Timeseries,
    R0,
    Thresholds,
    Equilibria,
    Stability,
    Sensitivity,
}

impl Output {
    pub const ALL: [Output; 6] = [
        Output::Timeseries,
        Output::R0,
        Output::Thresholds,
        Output::Equilibria,
        Output::Stability,
        Output::Sensitivity,
    ];

    pub const fn key(self) -> &'static str {
        match self {
            Output::Timeseries => "timeseries",
            Output::R0 => "r0",
            Output::Thresholds => "thresholds",
            Output::Equilibria => "equilibria",
            Output::Stability => "stability",
            Output::Sensitivity => "sensitivity",
        }
    }
}

impl FromStr for Output {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Output::ALL
            .into_iter()
            .find(|o| o.key() == s)
            .ok_or_else(|| {
                let known: Vec<_> = Output::ALL.iter().map(|o| o.key()).collect();
                format!("unknown output '{s}' (expected one of {})", known.join(", "))
            })
    }
}

impl fmt::Display for Output {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    /// Used to name output files.
    pub name: String,
    pub params: ModelParams,
    pub initial: StateVector,
    pub horizon_days: f64,
    pub sample_dt: f64,
    pub tol: f64,
    /// Step budget; running out is a numerical failure.
    pub max_steps: u64,
    pub outputs: Vec<Output>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        let opts = IntegratorOptions::default();
        ScenarioConfig {
            name: "scenario".into(),
            params: ModelParams::table1(),
            initial: StateVector::reference_initial(0.0),
            horizon_days: opts.t1 - opts.t0,
            sample_dt: opts.sample_dt,
            tol: opts.tol,
            max_steps: opts.max_steps,
            outputs: Output::ALL.to_vec(),
        }
    }
}

impl ScenarioConfig {
    pub fn wants(&self, output: Output) -> bool {
        self.outputs.contains(&output)
    }

    pub fn integrator_options(&self) -> IntegratorOptions {
        IntegratorOptions {
            t0: 0.0,
            t1: self.horizon_days,
            sample_dt: self.sample_dt,
            tol: self.tol,
            max_steps: self.max_steps,
        }
    }

    /// Canonical text form: every key, in a fixed order, with values written
    /// so that they parse back exactly.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for name in ParamName::ALL {
            let _ = writeln!(out, "{} = {:?}", name.key(), self.params.get(name));
        }
        for (key, value) in COMPONENTS.iter().zip(self.initial.to_array()) {
            let _ = writeln!(out, "initial.{key} = {value:?}");
        }
        let _ = writeln!(out, "horizon_days = {:?}", self.horizon_days);
        let _ = writeln!(out, "sample_dt = {:?}", self.sample_dt);
        let _ = writeln!(out, "tol = {:?}", self.tol);
        let _ = writeln!(out, "max_steps = {}", self.max_steps);
        let outputs: Vec<_> = self.outputs.iter().map(|o| o.key()).collect();
        let _ = writeln!(out, "outputs = {}", outputs.join(", "));
        out
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("line {line}: unknown key '{key}'")]
    UnknownKey { line: usize, key: String },

    #[error("line {line}: key '{key}' already set on line {first}")]
    DuplicateKey { line: usize, key: String, first: usize },

    #[error("line {line}: bad value '{value}' for '{key}': {reason}")]
    BadValue {
        line: usize,
        key: String,
        value: String,
        reason: String,
    },

    #[error("unknown preset '{0}'")]
    UnknownPreset(String),

    #[error("{key}: {message}")]
    Invalid { key: String, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Key {
    Preset,
    Param(ParamName),
    Initial(usize),
    Horizon,
    SampleDt,
    Tol,
    MaxSteps,
    Outputs,
}

impl Key {
    fn parse(key: &str) -> Option<Key> {
        if let Some(component) = key.strip_prefix("initial.") {
            return COMPONENTS.iter().position(|c| *c == component).map(Key::Initial);
        }
        Some(match key {
            "preset" => Key::Preset,
            "horizon_days" => Key::Horizon,
            "sample_dt" => Key::SampleDt,
            "tol" => Key::Tol,
            "max_steps" => Key::MaxSteps,
            "outputs" => Key::Outputs,
            _ => Key::Param(ParamName::from_key(key)?),
        })
    }
}

struct Entry<'a> {
    line: usize,
    key: &'a str,
    value: &'a str,
}

fn number(entry: &Entry) -> Result<f64, ConfigError> {
    entry.value.parse::<f64>().map_err(|e| ConfigError::BadValue {
        line: entry.line,
        key: entry.key.into(),
        value: entry.value.into(),
        reason: e.to_string(),
    })
}

/// Parse scenario text. `name` becomes the scenario name unless a preset
/// supplies one and `name` is `None`.
pub fn parse_config(text: &str, name: Option<&str>) -> Result<ScenarioConfig, ConfigError> {
    let mut entries: Vec<(Key, Entry)> = Vec::new();
    let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line,
            message: format!("expected 'key = value', found '{content}'"),
        })?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() {
            return Err(ConfigError::Syntax {
                line,
                message: "missing key before '='".into(),
            });
        }
        let parsed = Key::parse(key).ok_or_else(|| ConfigError::UnknownKey {
            line,
            key: key.into(),
        })?;
        if let Some(first) = seen.insert(key, line) {
            return Err(ConfigError::DuplicateKey {
                line,
                key: key.into(),
                first,
            });
        }
        entries.push((parsed, Entry { line, key, value }));
    }

    // the preset is the base, whatever its position in the file
    let mut config = match entries.iter().find(|(k, _)| *k == Key::Preset) {
        Some((_, e)) => presets::preset(e.value).ok_or_else(|| ConfigError::UnknownPreset(e.value.into()))?,
        None => ScenarioConfig::default(),
    };
    if let Some(name) = name {
        config.name = name.into();
    }

    let mut values: ParamSet = *config.params.values();
    let mut initial = config.initial.to_array();
    for (key, entry) in &entries {
        match key {
            Key::Preset => {}
            Key::Param(p) => values.set(*p, number(entry)?),
            Key::Initial(i) => initial[*i] = number(entry)?,
            Key::Horizon => config.horizon_days = number(entry)?,
            Key::SampleDt => config.sample_dt = number(entry)?,
            Key::Tol => config.tol = number(entry)?,
            Key::MaxSteps => {
                config.max_steps = entry.value.parse().map_err(|e: std::num::ParseIntError| ConfigError::BadValue {
                    line: entry.line,
                    key: entry.key.into(),
                    value: entry.value.into(),
                    reason: e.to_string(),
                })?
            }
            Key::Outputs => {
                config.outputs = entry
                    .value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| {
                        s.parse().map_err(|reason| ConfigError::BadValue {
                            line: entry.line,
                            key: entry.key.into(),
                            value: s.into(),
                            reason,
                        })
                    })
                    .collect::<Result<_, _>>()?;
                config.outputs.sort();
                config.outputs.dedup();
            }
        }
    }

    config.params = ModelParams::new(values).map_err(|e| ConfigError::Invalid {
        key: "parameters".into(),
        message: e.to_string(),
    })?;
    config.initial = StateVector::from_array(initial);
    validate_run(&config)?;
    Ok(config)
}

fn validate_run(config: &ScenarioConfig) -> Result<(), ConfigError> {
    let invalid = |key: &str, message: String| ConfigError::Invalid {
        key: key.into(),
        message,
    };
    config
        .initial
        .check_finite()
        .and_then(|_| config.initial.check_nonnegative())
        .map_err(|e| invalid("initial", e.to_string()))?;
    if !(config.initial.n_h() > 0.0) {
        return Err(invalid("initial", "the human population must be positive".into()));
    }
    if !(config.horizon_days > 0.0 && config.horizon_days.is_finite()) {
        return Err(invalid("horizon_days", format!("must be positive, got {}", config.horizon_days)));
    }
    if !(config.sample_dt > 0.0 && config.sample_dt.is_finite()) {
        return Err(invalid("sample_dt", format!("must be positive, got {}", config.sample_dt)));
    }
    if !(config.tol > 1e-12 && config.tol < 1e-2) {
        return Err(invalid("tol", format!("must lie in (1e-12, 1e-2), got {}", config.tol)));
    }
    if config.max_steps == 0 {
        return Err(invalid("max_steps", "must be at least 1".into()));
    }
    Ok(())
}

/// Read and parse a scenario file; the file stem names the scenario.
pub fn load_config(path: &Path) -> Result<ScenarioConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("scenario");
    parse_config(&text, Some(stem))
}

/// A path to an existing file is loaded; otherwise the argument must name a
/// preset.
pub fn resolve(arg: &str) -> Result<ScenarioConfig, ConfigError> {
    let path = Path::new(arg);
    if path.is_file() {
        load_config(path)
    } else {
        presets::preset(arg).ok_or_else(|| ConfigError::Io {
            path: path.to_path_buf(),
            source: std::io::Error::new(
                std::io::ErrorKind::NotFound,
                "no such file, and not a preset name",
            ),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_text_gives_defaults() {
        let c = parse_config("", None).unwrap();
        assert_eq!(c, ScenarioConfig::default());
        assert_eq!(*c.params.values(), ParamSet::TABLE1);
        assert_eq!(c.initial.g, 0.0);
        assert_eq!(c.initial.s_h, 6000.0);
    }

    #[test]
    fn overrides_and_comments() {
        let text = "# low contact\na_v = 0.25   # bites\nc_vh=0.2\ninitial.G = 20\n\noutputs = r0, timeseries, r0\n";
        let c = parse_config(text, Some("x")).unwrap();
        assert_eq!(c.params.a_v, 0.25);
        assert_eq!(c.params.c_vh, 0.2);
        assert_eq!(c.initial.g, 20.0);
        assert_eq!(c.outputs, vec![Output::Timeseries, Output::R0]);
        assert_eq!(c.name, "x");
    }

    #[test]
    fn preset_is_base_wherever_it_appears() {
        let c = parse_config("a_v = 0.3\npreset = fig1b\n", None).unwrap();
        assert_eq!(c.params.a_v, 0.3);
        assert_eq!(c.params.c_hv, 0.25);
        assert_eq!(c.initial.g, 20.0);
        assert_eq!(c.name, "fig1b");
    }

    #[test]
    fn fraction_bound_reported() {
        let err = parse_config("p = 1.5\n", None).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("p = 1.5") && msg.contains("[0, 1]"), "{msg}");
    }

    #[test]
    fn diagnostics_carry_line_and_key() {
        match parse_config("a_v = 1\n\nbogus = 3\n", None).unwrap_err() {
            ConfigError::UnknownKey { line, key } => assert_eq!((line, key.as_str()), (3, "bogus")),
            e => panic!("{e}"),
        }
        match parse_config("a_v = 1\na_v = 2\n", None).unwrap_err() {
            ConfigError::DuplicateKey { line, first, .. } => assert_eq!((line, first), (2, 1)),
            e => panic!("{e}"),
        }
        match parse_config("theta = fast\n", None).unwrap_err() {
            ConfigError::BadValue { line, key, .. } => assert_eq!((line, key.as_str()), (1, "theta")),
            e => panic!("{e}"),
        }
        assert!(matches!(
            parse_config("just words\n", None),
            Err(ConfigError::Syntax { line: 1, .. })
        ));
        assert!(matches!(
            parse_config("initial.X = 1\n", None),
            Err(ConfigError::UnknownKey { .. })
        ));
        assert!(matches!(
            parse_config("preset = fig9\n", None),
            Err(ConfigError::UnknownPreset(_))
        ));
        assert!(matches!(
            parse_config("outputs = plots\n", None),
            Err(ConfigError::BadValue { .. })
        ));
    }

    #[test]
    fn run_settings_checked() {
        for text in ["horizon_days = 0", "sample_dt = -1", "tol = 0.5", "initial.I_h = -3", "max_steps = 0"] {
            assert!(matches!(parse_config(text, None), Err(ConfigError::Invalid { .. })), "{text}");
        }
    }

    #[test]
    fn render_parses_back() {
        for name in presets::NAMES {
            let c = presets::preset(name).unwrap();
            let back = parse_config(&c.render(), Some(name)).unwrap();
            assert_eq!(back, c);
        }
    }
}
