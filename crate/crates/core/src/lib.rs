//! Nine-compartment Zika vector-host model with a larvivorous predator
//! (*Gambusia affinis*) preying on the immature mosquito stages.
//!
//! The crate is `no_std` (with `alloc`) and contains only the numerical
//! core: model right-hand side, adaptive time integration, equilibria,
//! local stability and parameter sensitivity. File formats and the command
//! line live in the `vhd` crate.
//!
//! Compartment order everywhere is
//! `S_h, E_h, I_h, R_h, m_q, S_v, E_v, I_v, G`.

#![cfg_attr(not(feature = "std"), no_std)]
// `!(x > 0.0)` is deliberate: it rejects NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod equilibria;
mod error;
pub mod integrator;
pub mod linalg;
pub mod model;
pub mod params;
pub mod sensitivity;
pub mod stability;
pub mod state;

pub use equilibria::{EquilibriumKind, EquilibriumPoint};
pub use error::{Error, Result};
pub use integrator::{integrate, IntegratorOptions, Trajectory};
pub use model::{forces_of_infection, r0, rhs, threshold_o, threshold_o0, DerivedRates};
pub use params::{ModelParams, ParamName, ParamSet};
pub use sensitivity::{sensitivity, SensitivityTable, Target};
pub use stability::{classify, jacobian, ngm_r0, routh_hurwitz_e2, Classification, StabilityReport};
pub use state::StateVector;
