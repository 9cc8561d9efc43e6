//! Right-hand side of the nine ODEs and the closed-form quantities derived
//! from it (forces of infection, reproduction number, survival thresholds).

use crate::error::{Error, Result};
use crate::params::{ModelParams, ParamSet};
use crate::state::{StateVector, DIM};

/// Forces of infection and population totals at one state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedRates {
    /// Per-capita infection rate of susceptible humans (1/day).
    pub lam_h: f64,
    /// Per-capita infection rate of susceptible vectors (1/day).
    pub lam_v: f64,
    pub n_h: f64,
    pub n_v: f64,
}

/// `lam_h = c_vh a_v I_v / N_h`, `lam_v = c_hv a_v I_h / N_v`, with
/// `lam_v = 0` when there are no adult vectors.
pub fn forces_of_infection(state: &StateVector, params: &ParamSet) -> Result<DerivedRates> {
    let n_h = state.n_h();
    let n_v = state.n_v();
    if !(n_h > 0.0) {
        return Err(Error::Domain("force of infection needs N_h > 0"));
    }
    let lam_h = params.c_vh * params.a_v * state.i_v / n_h;
    let lam_v = if n_v > 0.0 {
        params.c_hv * params.a_v * state.i_h / n_v
    } else {
        0.0
    };
    Ok(DerivedRates {
        lam_h,
        lam_v,
        n_h,
        n_v,
    })
}

/// Time derivative of every compartment.
///
/// Rejects non-finite input and a vanishing human population while
/// infectious vectors are present.
pub fn rhs(state: &StateVector, params: &ModelParams) -> Result<[f64; DIM]> {
    state.check_finite()?;
    if !(state.n_h() > 0.0) && state.i_v != 0.0 {
        return Err(Error::Domain("N_h = 0 with infectious vectors present"));
    }
    Ok(derivative(&state.to_array(), params))
}

/// Unchecked right-hand side used by the integrator.
///
/// Infection terms are zero whenever the population carrying them is empty
/// (`I_v S_h / N_h` and `I_h S_v / N_v` extended continuously by 0).
#[inline]
pub(crate) fn derivative(y: &[f64; DIM], p: &ParamSet) -> [f64; DIM] {
    let [s_h, e_h, i_h, r_h, m_q, s_v, e_v, i_v, g] = *y;
    let n_h = s_h + e_h + i_h + r_h;
    let n_v = s_v + e_v + i_v;

    let human_infection = if n_h > 0.0 {
        p.c_vh * p.a_v * i_v * s_h / n_h
    } else {
        0.0
    };
    let vector_infection = if n_v > 0.0 {
        p.c_hv * p.a_v * i_h * s_v / n_v
    } else {
        0.0
    };
    let pbh = p.p * p.b_h;
    let qbh = p.q * p.b_h;

    [
        p.lambda_h - pbh * e_h - qbh * i_h - human_infection - p.d_h * s_h,
        pbh * e_h + human_infection - (p.d_h + p.nu_h) * e_h,
        qbh * i_h + p.nu_h * e_h - (p.theta + p.d_h + p.d_i) * i_h,
        p.theta * i_h - p.d_h * r_h,
        p.epsilon * p.k * n_v * (1.0 - m_q / p.k_q) - (p.alpha + p.d_q + p.phi * g) * m_q,
        p.f * p.alpha * m_q - vector_infection - p.d_v * s_v,
        vector_infection - (p.d_v + p.nu_v) * e_v,
        p.nu_v * e_v - (p.d_v + p.d_iv) * i_v,
        (p.rho + p.psi * m_q) * g * (1.0 - g / p.k_x),
    ]
}

/// Host and vector halves of the reproduction number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct R0Split {
    pub r0: f64,
    /// `a_v c_vh nu_h / (A B)`
    pub host: f64,
    /// `a_v c_hv nu_v / ((d_iv + d_v)(d_v + nu_v))`
    pub vector: f64,
}

pub fn r0_split(p: &ParamSet) -> R0Split {
    let host = p.a_v * p.c_vh * p.nu_h / (p.a_factor() * p.b_factor());
    let vector = p.a_v * p.c_hv * p.nu_v / ((p.d_iv + p.d_v) * (p.d_v + p.nu_v));
    R0Split {
        r0: libm::sqrt(host * vector),
        host,
        vector,
    }
}

/// Closed-form basic reproduction number.
pub fn r0(p: &ParamSet) -> f64 {
    libm::sqrt(r0_squared(p))
}

pub fn r0_squared(p: &ParamSet) -> f64 {
    p.a_v * p.a_v * p.c_vh * p.c_hv * p.nu_h * p.nu_v
        / (p.a_factor() * p.b_factor() * (p.d_iv + p.d_v) * (p.d_v + p.nu_v))
}

/// Mosquito survival threshold without predation,
/// `epsilon k f alpha / (d_v (alpha + d_q))`.
pub fn threshold_o0(p: &ParamSet) -> f64 {
    p.epsilon * p.k * p.f * p.alpha / (p.d_v * (p.alpha + p.d_q))
}

/// Mosquito survival threshold with the predator at carrying capacity,
/// `epsilon k f alpha / (d_v (alpha + d_q + phi K_x))`.
pub fn threshold_o(p: &ParamSet) -> f64 {
    p.epsilon * p.k * p.f * p.alpha / (p.d_v * (p.alpha + p.d_q + p.phi * p.k_x))
}
