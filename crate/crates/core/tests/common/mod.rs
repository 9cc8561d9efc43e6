#![allow(dead_code)]

use proptest::prelude::*;
use vhd_core::{ModelParams, ParamName, ParamSet};

/// Every parameter scaled by a factor in `[1 - spread, 1 + spread]`,
/// fractions capped at 1. Draws violating the residence-time guards are
/// discarded by the caller.
pub fn perturbed(spread: f64) -> impl Strategy<Value = ParamSet> {
    prop::collection::vec(1.0 - spread..1.0 + spread, ParamName::ALL.len()).prop_map(|factors| {
        let mut p = ParamSet::TABLE1;
        for (name, factor) in ParamName::ALL.iter().zip(factors) {
            let mut v = p.get(*name) * factor;
            if name.is_fraction() {
                v = v.min(1.0);
            }
            p.set(*name, v);
        }
        p
    })
}

/// `perturbed(0.5)` with the contact and predation parameters widened so
/// that R0 and O fall on both sides of 1.
pub fn straddling() -> impl Strategy<Value = ParamSet> {
    (perturbed(0.5), -3.0f64..0.5, 0.0f64..1.0, 0.0f64..1.0, -7.0f64..0.0).prop_map(
        |(mut p, log_a, c_vh, c_hv, log_phi)| {
            p.a_v = 10f64.powf(log_a);
            p.c_vh = c_vh;
            p.c_hv = c_hv;
            p.phi = 10f64.powf(log_phi);
            p
        },
    )
}

pub fn valid(p: ParamSet) -> Option<ModelParams> {
    ModelParams::new(p).ok()
}

pub fn low_contact() -> ModelParams {
    ModelParams::table1()
        .with(ParamName::AV, 0.25)
        .and_then(|p| p.with(ParamName::CVh, 0.2))
        .and_then(|p| p.with(ParamName::CHv, 0.25))
        .unwrap()
}
