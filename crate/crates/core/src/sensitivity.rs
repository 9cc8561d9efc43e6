//! Normalized forward sensitivity indices `(dx/dp) (p/x)` of R0^2 and the
//! two mosquito survival thresholds.

use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::model::{r0_squared, threshold_o, threshold_o0};
use crate::params::{ParamName, ParamSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Target {
    R0Squared,
    O0,
    O,
}

impl Target {
    pub const ALL: [Target; 3] = [Target::R0Squared, Target::O0, Target::O];

    pub const fn key(self) -> &'static str {
        match self {
            Target::R0Squared => "r0sq",
            Target::O0 => "o0",
            Target::O => "o",
        }
    }

    pub fn from_key(key: &str) -> Option<Target> {
        Target::ALL.iter().copied().find(|t| t.key() == key)
    }

    pub fn value(self, p: &ParamSet) -> f64 {
        match self {
            Target::R0Squared => r0_squared(p),
            Target::O0 => threshold_o0(p),
            Target::O => threshold_o(p),
        }
    }

    /// Whether `name` appears in the closed form of the target.
    pub fn depends_on(self, name: ParamName) -> bool {
        use ParamName::*;
        match self {
            Target::R0Squared => matches!(
                name,
                AV | CVh | CHv | NuH | NuV | Theta | Q | BH | P | DH | DI | DIv | DV
            ),
            Target::O0 => matches!(name, Epsilon | K | F | DV | Alpha | DQ),
            Target::O => matches!(name, Epsilon | K | F | DV | Alpha | DQ | Phi | KX),
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Analytic,
    FiniteDifference,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensitivityEntry {
    pub param: ParamName,
    pub index: f64,
    /// The parameter does not enter the target; `index` is exactly zero.
    pub structural_zero: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityTable {
    pub target: Target,
    pub method: Method,
    pub value: f64,
    /// One entry per parameter, in [`ParamName::ALL`] order.
    pub entries: Vec<SensitivityEntry>,
}

impl SensitivityTable {
    pub fn get(&self, name: ParamName) -> f64 {
        self.entries
            .iter()
            .find(|e| e.param == name)
            .map_or(0.0, |e| e.index)
    }
}

/// Analytic sensitivity indices.
pub fn sensitivity(target: Target, params: &ParamSet) -> Result<SensitivityTable> {
    sensitivity_with(target, params, Method::Analytic)
}

pub fn sensitivity_with(target: Target, params: &ParamSet, method: Method) -> Result<SensitivityTable> {
    let value = target.value(params);
    if !(value > 0.0 && value.is_finite()) {
        return Err(Error::ZeroTarget);
    }
    let entries = ParamName::ALL
        .iter()
        .map(|&param| {
            let structural_zero = !target.depends_on(param);
            let index = if structural_zero {
                0.0
            } else {
                match method {
                    Method::Analytic => analytic_index(target, param, params),
                    Method::FiniteDifference => fd_index(target, param, params, value),
                }
            };
            SensitivityEntry {
                param,
                index,
                structural_zero,
            }
        })
        .collect();
    Ok(SensitivityTable {
        target,
        method,
        value,
        entries,
    })
}

fn analytic_index(target: Target, name: ParamName, p: &ParamSet) -> f64 {
    use ParamName::*;
    match target {
        Target::R0Squared => {
            let a = p.a_factor();
            let b = p.b_factor();
            let w = p.d_iv + p.d_v;
            let z = p.d_v + p.nu_v;
            match name {
                AV => 2.0,
                CVh | CHv => 1.0,
                NuH => 1.0 - p.nu_h / b,
                NuV => p.d_v / z,
                Theta => -p.theta / a,
                Q => p.q * p.b_h / a,
                BH => p.q * p.b_h / a + p.p * p.b_h / b,
                P => p.p * p.b_h / b,
                DH => -p.d_h / a - p.d_h / b,
                DI => -p.d_i / a,
                DIv => -p.d_iv / w,
                DV => -p.d_v / w - p.d_v / z,
                _ => 0.0,
            }
        }
        Target::O0 | Target::O => {
            let predation = if target == Target::O { p.phi * p.k_x } else { 0.0 };
            let loss = p.alpha + p.d_q + predation;
            match name {
                Epsilon | K | F => 1.0,
                DV => -1.0,
                Alpha => (p.d_q + predation) / loss,
                DQ => -p.d_q / loss,
                Phi | KX => -predation / loss,
                _ => 0.0,
            }
        }
    }
}

/// Central difference with relative step `1e-6`.
fn fd_index(target: Target, name: ParamName, p: &ParamSet, value: f64) -> f64 {
    let x = p.get(name);
    if x == 0.0 {
        return 0.0;
    }
    let h = 1e-6 * x.abs();
    let up = target.value(&p.with(name, x + h));
    let down = target.value(&p.with(name, x - h));
    (up - down) / (2.0 * h) * x / value
}
