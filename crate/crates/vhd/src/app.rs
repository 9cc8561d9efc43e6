//! Subcommand implementations. Each returns the text to print; files go to
//! the output directory.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use vhd_core::integrator::integrate_with;
use vhd_core::{Error as CoreError, Target};

use crate::config::{ConfigError, Output, ScenarioConfig};
use crate::presets::{self, PRESETS};
use crate::report::{analysis_report, parse_free, report_formulas, sensitivity_report};
use crate::timeseries::{write_csv, CsvError};

pub const OUT_DIR_VAR: &str = "VHD_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "out";

#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Numerical(CoreError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Csv { path: PathBuf, source: CsvError },
}

impl From<CoreError> for AppError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidParameter { .. } | CoreError::Infeasible { .. } => AppError::Usage(e.to_string()),
            other => AppError::Numerical(other),
        }
    }
}

impl AppError {
    /// 2 for configuration problems, 3 for numerical failures, 1 for I/O.
    pub fn exit_code(&self) -> u8 {
        match self {
            AppError::Config(ConfigError::Io { .. }) | AppError::Config(_) | AppError::Usage(_) => 2,
            AppError::Numerical(_) => 3,
            AppError::Io { .. } | AppError::Csv { .. } => 1,
        }
    }
}

pub fn out_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_VAR)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> AppError + '_ {
    move |source| AppError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn write_text(path: &Path, text: &str) -> Result<(), AppError> {
    fs::write(path, text).map_err(io_err(path))
}

fn write_trajectory(path: &Path, times: &[f64], states: &[vhd_core::StateVector]) -> Result<(), AppError> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    write_csv(&mut w, times, states).map_err(|source| AppError::Csv {
        path: path.to_path_buf(),
        source,
    })?;
    w.flush().map_err(io_err(path))
}

fn remove_stale(path: &Path) -> Result<(), AppError> {
    match fs::remove_file(path) {
        Err(e) if e.kind() != std::io::ErrorKind::NotFound => Err(io_err(path)(e)),
        _ => Ok(()),
    }
}

pub fn csv_path(dir: &Path, config: &ScenarioConfig) -> PathBuf {
    dir.join(format!("{}.csv", config.name))
}

pub fn partial_path(dir: &Path, config: &ScenarioConfig) -> PathBuf {
    dir.join(format!("{}.csv.partial", config.name))
}

pub fn report_path(dir: &Path, config: &ScenarioConfig) -> PathBuf {
    dir.join(format!("{}.report.txt", config.name))
}

/// Integrate the scenario and write its CSV, plus an analysis report when
/// other outputs are selected. A failed integration leaves the samples
/// computed so far in `<name>.csv.partial`.
pub fn simulate(config: &ScenarioConfig, dir: &Path) -> Result<String, AppError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut summary = String::new();
    if config.wants(Output::Timeseries) {
        let csv = csv_path(dir, config);
        let partial = partial_path(dir, config);
        remove_stale(&csv)?;
        remove_stale(&partial)?;
        match integrate_with(&config.initial, &config.params, &config.integrator_options()) {
            Ok(tr) => {
                write_trajectory(&csv, &tr.times, &tr.states)?;
                summary.push_str(&format!(
                    "wrote {} ({} rows, {} steps)\n",
                    csv.display(),
                    tr.len(),
                    tr.meta.stats.accepted
                ));
            }
            Err(CoreError::IntegrationFailure { t, reason, partial: tr }) => {
                write_trajectory(&partial, &tr.times, &tr.states)?;
                return Err(AppError::Numerical(CoreError::IntegrationFailure {
                    t,
                    reason: format!("{reason}; {} rows kept in {}", tr.len(), partial.display()),
                    partial: tr,
                }));
            }
            Err(e) => return Err(e.into()),
        }
    }
    if config.outputs.iter().any(|o| *o != Output::Timeseries) {
        let path = report_path(dir, config);
        write_text(&path, &analysis_report(config)?)?;
        summary.push_str(&format!("wrote {}\n", path.display()));
    }
    Ok(summary)
}

/// Analysis report for the selected outputs, or all of them when the
/// scenario asks only for a time series.
pub fn analyze(config: &ScenarioConfig, dir: &Path) -> Result<String, AppError> {
    let mut config = config.clone();
    config.outputs.retain(|o| *o != Output::Timeseries);
    if config.outputs.is_empty() {
        config.outputs = Output::ALL[1..].to_vec();
    }
    let text = analysis_report(&config)?;
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    write_text(&report_path(dir, &config), &text)?;
    Ok(text)
}

pub fn sensitivity(config: &ScenarioConfig, target: Target, dir: &Path) -> Result<String, AppError> {
    let text = sensitivity_report(target, &config.params).map_err(|e| match e {
        CoreError::ZeroTarget => AppError::Usage(format!("{target} is zero for this scenario: {e}")),
        other => other.into(),
    })?;
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let path = dir.join(format!("{}.sensitivity-{}.txt", config.name, target.key()));
    write_text(&path, &text)?;
    Ok(text)
}

pub fn formulas(config: &ScenarioConfig, free: &str) -> Result<String, AppError> {
    let free = parse_free(free).map_err(AppError::Usage)?;
    let formula = report_formulas(&config.params, &free).map_err(AppError::Usage)?;
    Ok(format!("{}\ncoefficient = {}\n", formula.text(), formula.coefficient))
}

pub fn presets_list() -> String {
    let mut out = String::new();
    for info in &PRESETS {
        let config = presets::preset(info.name).expect("listed preset exists");
        out.push_str(&format!(
            "{:<6}  R0 = {:<8.4} G0 = {:<3}  {}\n",
            info.name,
            vhd_core::r0(&config.params),
            config.initial.g,
            info.description
        ));
    }
    out
}

pub fn preset_show(name: &str) -> Result<String, AppError> {
    presets::preset(name)
        .map(|c| c.render())
        .ok_or_else(|| AppError::Config(ConfigError::UnknownPreset(name.into())))
}
