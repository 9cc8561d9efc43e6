//! The four reference scenarios: low and high contact, each without and
//! with 20 predators released at day 0.

use vhd_core::{ModelParams, ParamName, StateVector};

use crate::config::ScenarioConfig;

pub const NAMES: [&str; 4] = ["fig1a", "fig1b", "fig1c", "fig1d"];

pub struct PresetInfo {
    pub name: &'static str,
    pub description: &'static str,
    pub a_v: f64,
    pub c_vh: f64,
    pub c_hv: f64,
    pub g0: f64,
}

pub const PRESETS: [PresetInfo; 4] = [
    PresetInfo {
        name: "fig1a",
        description: "low contact, no predator",
        a_v: 0.25,
        c_vh: 0.2,
        c_hv: 0.25,
        g0: 0.0,
    },
    PresetInfo {
        name: "fig1b",
        description: "low contact, 20 predators released",
        a_v: 0.25,
        c_vh: 0.2,
        c_hv: 0.25,
        g0: 20.0,
    },
    PresetInfo {
        name: "fig1c",
        description: "high contact, no predator",
        a_v: 3.0425,
        c_vh: 1.0,
        c_hv: 1.0,
        g0: 0.0,
    },
    PresetInfo {
        name: "fig1d",
        description: "high contact, 20 predators released",
        a_v: 3.0425,
        c_vh: 1.0,
        c_hv: 1.0,
        g0: 20.0,
    },
];

pub fn info(name: &str) -> Option<&'static PresetInfo> {
    PRESETS.iter().find(|p| p.name == name)
}

pub fn preset(name: &str) -> Option<ScenarioConfig> {
    let info = info(name)?;
    let params = ModelParams::table1()
        .with(ParamName::AV, info.a_v)
        .and_then(|p| p.with(ParamName::CVh, info.c_vh))
        .and_then(|p| p.with(ParamName::CHv, info.c_hv))
        .expect("preset parameters are valid");
    Some(ScenarioConfig {
        name: info.name.into(),
        params,
        initial: StateVector::reference_initial(info.g0),
        ..ScenarioConfig::default()
    })
}
