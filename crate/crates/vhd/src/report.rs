//! Plain-text analysis reports, `key = value` lines under `[section]`
//! headers.

use std::fmt::Write as _;

use vhd_core::equilibria::{all_equilibria, EquilibriumPoint};
use vhd_core::model::r0_split;
use vhd_core::sensitivity::{sensitivity_with, Method};
use vhd_core::stability::{RouthHurwitz, StabilityReport};
use vhd_core::state::COMPONENTS;
use vhd_core::{classify, ngm_r0, r0, threshold_o, threshold_o0, ModelParams, ParamName, Target};

use crate::config::{Output, ScenarioConfig};

/// Writes into a `String` cannot fail.
macro_rules! line {
    ($out:expr, $($arg:tt)*) => {
        let _ = writeln!($out, $($arg)*);
    };
}

pub fn analysis_report(config: &ScenarioConfig) -> vhd_core::Result<String> {
    let p = &config.params;
    let mut out = String::new();
    line!(out, "# analysis: {}", config.name);

    if config.wants(Output::R0) {
        let split = r0_split(p);
        line!(out, "\n[reproduction]");
        line!(out, "R0 = {}", split.r0);
        line!(out, "R0h = {}", split.host);
        line!(out, "R0v = {}", split.vector);
        line!(out, "R0_ngm = {}", ngm_r0(p)?.r0);
    }
    if config.wants(Output::Thresholds) {
        line!(out, "\n[thresholds]");
        line!(out, "O_0 = {}", threshold_o0(p));
        line!(out, "O = {}", threshold_o(p));
    }
    if config.wants(Output::Equilibria) || config.wants(Output::Stability) {
        for eq in all_equilibria(p)? {
            line!(out, "\n[equilibrium {}]", eq.kind);
            if config.wants(Output::Equilibria) {
                equilibrium_section(&mut out, &eq);
            } else {
                line!(out, "exists = {}", eq.exists);
            }
            if config.wants(Output::Stability) && eq.exists {
                stability_section(&mut out, &classify(&eq, p)?);
            }
        }
    }
    if config.wants(Output::Sensitivity) {
        for target in Target::ALL {
            out.push('\n');
            out.push_str(&sensitivity_report(target, p)?);
        }
    }
    Ok(out)
}

fn equilibrium_section(out: &mut String, eq: &EquilibriumPoint) {
    line!(out, "exists = {}", eq.exists);
    for r in &eq.existence_reasons {
        line!(
            out,
            "condition = {} = {} > {}: {}",
            r.condition,
            r.value,
            r.threshold,
            if r.holds { "holds" } else { "fails" }
        );
    }
    if let Some(s) = eq.state {
        let parts: Vec<String> = COMPONENTS
            .iter()
            .zip(s.to_array())
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        line!(out, "state = {}", parts.join(", "));
    }
    if let Some(r) = eq.relative_residual() {
        line!(out, "relative_residual = {r:e}");
    }
}

fn stability_section(out: &mut String, report: &StabilityReport) {
    line!(out, "stability = {}", report.classification.name());
    line!(out, "max_real_part = {}", report.max_real_part);
    let eig: Vec<String> = report
        .eigenvalues
        .iter()
        .map(|z| {
            if z.im == 0.0 {
                format!("{}", z.re)
            } else {
                format!("{}{:+}i", z.re, z.im)
            }
        })
        .collect();
    line!(out, "eigenvalues = {}", eig.join(", "));
    if let Some(rh) = &report.rh {
        routh_hurwitz_lines(out, rh);
    }
    if let Some(check) = report.theorem {
        let verdict = match check.agrees {
            Some(true) => "agrees",
            Some(false) => "disagrees",
            None => "undecided (marginal)",
        };
        line!(out, "predicted = {} ({verdict})", check.predicted.name());
    }
    for note in &report.notes {
        line!(out, "note = {note}");
    }
}

fn routh_hurwitz_lines(out: &mut String, rh: &RouthHurwitz) {
    let a: Vec<String> = rh.a.iter().map(|v| v.to_string()).collect();
    line!(out, "rh.a = {}", a.join(", "));
    line!(out, "rh.b1 = {}", rh.b1);
    line!(out, "rh.b2 = {}", rh.b2);
    line!(out, "rh.c1 = {}", rh.c1);
    let q: Vec<String> = rh.quadratic_abc.iter().map(|v| v.to_string()).collect();
    line!(out, "rh.quadratic = {}", q.join(", "));
    line!(
        out,
        "rh.gates = R0^2 < 1: {}, c1 > 0: {}, mosquito: {}",
        rh.gates.r0_squared_below_one,
        rh.gates.c1_positive,
        rh.gates.mosquito_gate
    );
}

/// Analytic and finite-difference indices side by side.
pub fn sensitivity_report(target: Target, params: &ModelParams) -> vhd_core::Result<String> {
    let exact = sensitivity_with(target, params, Method::Analytic)?;
    let fd = sensitivity_with(target, params, Method::FiniteDifference)?;
    let mut out = String::new();
    line!(out, "[sensitivity {target}]");
    line!(out, "value = {}", exact.value);
    line!(out, "# parameter = analytic, finite-difference");
    for (a, b) in exact.entries.iter().zip(&fd.entries) {
        if a.structural_zero {
            line!(out, "{} = 0, 0  # structurally absent", a.param.key());
        } else {
            line!(out, "{} = {:.6}, {:.6}", a.param.key(), a.index, b.index);
        }
    }
    Ok(out)
}

/// R0 with the chosen contact parameters factored out of the closed form.
#[derive(Debug, Clone, PartialEq)]
pub struct Formula {
    pub coefficient: f64,
    pub free: Vec<ParamName>,
}

impl Formula {
    pub fn text(&self) -> String {
        let mut s = format!("R0 = {:.4}", self.coefficient);
        if self.free.contains(&ParamName::AV) {
            s.push_str(" a_v");
        }
        let roots: Vec<&str> = [ParamName::CVh, ParamName::CHv]
            .into_iter()
            .filter(|n| self.free.contains(n))
            .map(ParamName::key)
            .collect();
        if !roots.is_empty() {
            let _ = write!(s, " sqrt({})", roots.join(" "));
        }
        s
    }
}

pub const FACTORABLE: [ParamName; 3] = [ParamName::AV, ParamName::CVh, ParamName::CHv];

/// R0 is linear in `a_v` and in `sqrt(c_vh)`, `sqrt(c_hv)`, so setting the
/// free parameters to 1 leaves the coefficient.
pub fn report_formulas(params: &ModelParams, free: &[ParamName]) -> Result<Formula, String> {
    let mut values = *params.values();
    let mut names = Vec::new();
    for &name in free {
        if !FACTORABLE.contains(&name) {
            return Err(format!("cannot factor {name} out of R0 (supported: a_v, c_vh, c_hv)"));
        }
        if !names.contains(&name) {
            names.push(name);
        }
        values.set(name, 1.0);
    }
    names.sort();
    Ok(Formula {
        coefficient: r0(&values),
        free: names,
    })
}

pub fn parse_free(list: &str) -> Result<Vec<ParamName>, String> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| ParamName::from_key(s).ok_or_else(|| format!("unknown parameter '{s}'")))
        .collect()
}
