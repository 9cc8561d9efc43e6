//! Model parameters.
//!
//! [`ParamSet`] is plain data and may hold anything; [`ModelParams`] is a
//! `ParamSet` that passed validation and is what the model operations take.

use core::fmt;
use core::ops::Deref;

use crate::error::{Error, Result};

/// Every model parameter, in the order of the default parameter table
/// (with the two per-bite transmission probabilities after the biting rate).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ParamName {
    LambdaH,
    DH,
    DI,
    BH,
    DV,
    DIv,
    P,
    Q,
    AV,
    CVh,
    CHv,
    NuH,
    NuV,
    Theta,
    Epsilon,
    K,
    KQ,
    Alpha,
    DQ,
    Phi,
    F,
    Rho,
    Psi,
    KX,
}

impl ParamName {
    pub const ALL: [ParamName; 24] = [
        ParamName::LambdaH,
        ParamName::DH,
        ParamName::DI,
        ParamName::BH,
        ParamName::DV,
        ParamName::DIv,
        ParamName::P,
        ParamName::Q,
        ParamName::AV,
        ParamName::CVh,
        ParamName::CHv,
        ParamName::NuH,
        ParamName::NuV,
        ParamName::Theta,
        ParamName::Epsilon,
        ParamName::K,
        ParamName::KQ,
        ParamName::Alpha,
        ParamName::DQ,
        ParamName::Phi,
        ParamName::F,
        ParamName::Rho,
        ParamName::Psi,
        ParamName::KX,
    ];

    /// ASCII key used in configuration files and reports.
    pub const fn key(self) -> &'static str {
        match self {
            ParamName::LambdaH => "lambda_h",
            ParamName::DH => "d_h",
            ParamName::DI => "d_i",
            ParamName::BH => "B_h",
            ParamName::DV => "d_v",
            ParamName::DIv => "d_iv",
            ParamName::P => "p",
            ParamName::Q => "q",
            ParamName::AV => "a_v",
            ParamName::CVh => "c_vh",
            ParamName::CHv => "c_hv",
            ParamName::NuH => "nu_h",
            ParamName::NuV => "nu_v",
            ParamName::Theta => "theta",
            ParamName::Epsilon => "epsilon",
            ParamName::K => "k",
            ParamName::KQ => "K_q",
            ParamName::Alpha => "alpha",
            ParamName::DQ => "d_q",
            ParamName::Phi => "phi",
            ParamName::F => "f",
            ParamName::Rho => "rho",
            ParamName::Psi => "psi",
            ParamName::KX => "K_x",
        }
    }

    pub fn from_key(key: &str) -> Option<ParamName> {
        ParamName::ALL.iter().copied().find(|p| p.key() == key)
    }

    /// Parameters constrained to the unit interval.
    pub const fn is_fraction(self) -> bool {
        matches!(
            self,
            ParamName::P
                | ParamName::Q
                | ParamName::K
                | ParamName::F
                | ParamName::CVh
                | ParamName::CHv
        )
    }
}

impl fmt::Display for ParamName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

/// Raw parameter values. Units are individuals and days.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamSet {
    /// Human recruitment (humans/day).
    pub lambda_h: f64,
    /// Natural human mortality (1/day).
    pub d_h: f64,
    /// Disease-induced human mortality (1/day).
    pub d_i: f64,
    /// Human birth rate (1/day).
    pub b_h: f64,
    /// Natural adult vector mortality (1/day).
    pub d_v: f64,
    /// Disease-induced vector mortality (1/day).
    pub d_iv: f64,
    /// Fraction of newborns entering the exposed class.
    pub p: f64,
    /// Fraction of newborns entering the infectious class.
    pub q: f64,
    /// Bites per mosquito per day.
    pub a_v: f64,
    /// Vector-to-human transmission probability per bite.
    pub c_vh: f64,
    /// Human-to-vector transmission probability per bite.
    pub c_hv: f64,
    /// Human incubation rate (1/day).
    pub nu_h: f64,
    /// Vector incubation rate (1/day).
    pub nu_v: f64,
    /// Human recovery rate (1/day).
    pub theta: f64,
    /// Oviposition rate (eggs/female/day).
    pub epsilon: f64,
    /// Fraction of eggs that hatch.
    pub k: f64,
    /// Carrying capacity of the immature stages.
    pub k_q: f64,
    /// Maturation rate of immature stages (1/day).
    pub alpha: f64,
    /// Mortality of immature stages (1/day).
    pub d_q: f64,
    /// Predation rate (1/(predator day)).
    pub phi: f64,
    /// Female fraction of emerging adults.
    pub f: f64,
    /// Intrinsic predator growth rate (1/day).
    pub rho: f64,
    /// Predator growth per unit of immature prey (1/(immature day)).
    pub psi: f64,
    /// Predator carrying capacity.
    pub k_x: f64,
}

impl ParamSet {
    /// The baseline values. Incubation entries are read as rates
    /// (7 and 4 day periods); both transmission probabilities are 1.
    pub const TABLE1: ParamSet = ParamSet {
        lambda_h: 19.0,
        d_h: 0.000039,
        d_i: 0.001,
        b_h: 0.019,
        d_v: 0.042,
        d_iv: 0.00001,
        p: 0.07,
        q: 0.07,
        a_v: 3.0425,
        c_vh: 1.0,
        c_hv: 1.0,
        nu_h: 0.1429,
        nu_v: 0.25,
        theta: 0.02,
        epsilon: 16.25,
        k: 0.9,
        k_q: 5000.0,
        alpha: 0.083,
        d_q: 0.048,
        phi: 0.35,
        f: 0.5,
        rho: 0.37,
        psi: 0.05,
        k_x: 1000.0,
    };

    pub fn get(&self, name: ParamName) -> f64 {
        match name {
            ParamName::LambdaH => self.lambda_h,
            ParamName::DH => self.d_h,
            ParamName::DI => self.d_i,
            ParamName::BH => self.b_h,
            ParamName::DV => self.d_v,
            ParamName::DIv => self.d_iv,
            ParamName::P => self.p,
            ParamName::Q => self.q,
            ParamName::AV => self.a_v,
            ParamName::CVh => self.c_vh,
            ParamName::CHv => self.c_hv,
            ParamName::NuH => self.nu_h,
            ParamName::NuV => self.nu_v,
            ParamName::Theta => self.theta,
            ParamName::Epsilon => self.epsilon,
            ParamName::K => self.k,
            ParamName::KQ => self.k_q,
            ParamName::Alpha => self.alpha,
            ParamName::DQ => self.d_q,
            ParamName::Phi => self.phi,
            ParamName::F => self.f,
            ParamName::Rho => self.rho,
            ParamName::Psi => self.psi,
            ParamName::KX => self.k_x,
        }
    }

    pub fn set(&mut self, name: ParamName, value: f64) {
        let slot = match name {
            ParamName::LambdaH => &mut self.lambda_h,
            ParamName::DH => &mut self.d_h,
            ParamName::DI => &mut self.d_i,
            ParamName::BH => &mut self.b_h,
            ParamName::DV => &mut self.d_v,
            ParamName::DIv => &mut self.d_iv,
            ParamName::P => &mut self.p,
            ParamName::Q => &mut self.q,
            ParamName::AV => &mut self.a_v,
            ParamName::CVh => &mut self.c_vh,
            ParamName::CHv => &mut self.c_hv,
            ParamName::NuH => &mut self.nu_h,
            ParamName::NuV => &mut self.nu_v,
            ParamName::Theta => &mut self.theta,
            ParamName::Epsilon => &mut self.epsilon,
            ParamName::K => &mut self.k,
            ParamName::KQ => &mut self.k_q,
            ParamName::Alpha => &mut self.alpha,
            ParamName::DQ => &mut self.d_q,
            ParamName::Phi => &mut self.phi,
            ParamName::F => &mut self.f,
            ParamName::Rho => &mut self.rho,
            ParamName::Psi => &mut self.psi,
            ParamName::KX => &mut self.k_x,
        };
        *slot = value;
    }

    pub fn with(mut self, name: ParamName, value: f64) -> ParamSet {
        self.set(name, value);
        self
    }

    /// Residence-time factor of the infectious human class,
    /// `theta - q B_h + d_h + d_i`.
    pub fn a_factor(&self) -> f64 {
        self.theta - self.q * self.b_h + self.d_h + self.d_i
    }

    /// Residence-time factor of the exposed human class,
    /// `d_h + nu_h - p B_h`.
    pub fn b_factor(&self) -> f64 {
        self.d_h + self.nu_h - self.p * self.b_h
    }

    pub fn validate(&self) -> Result<()> {
        for name in ParamName::ALL {
            let value = self.get(name);
            if !value.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    bound: "must be finite",
                });
            }
            if value < 0.0 {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    bound: "must be nonnegative",
                });
            }
            if name.is_fraction() && value > 1.0 {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    bound: "a fraction must lie in [0, 1]",
                });
            }
        }
        // Closed forms divide by these.
        for name in [
            ParamName::LambdaH,
            ParamName::KQ,
            ParamName::KX,
            ParamName::DH,
            ParamName::DV,
        ] {
            let value = self.get(name);
            if value <= 0.0 {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    bound: "must be strictly positive",
                });
            }
        }
        if self.alpha + self.d_q <= 0.0 {
            return Err(Error::Infeasible {
                guard: "alpha + d_q",
                value: self.alpha + self.d_q,
            });
        }
        let a = self.a_factor();
        if a <= 0.0 {
            return Err(Error::Infeasible {
                guard: "theta - q*B_h + d_h + d_i",
                value: a,
            });
        }
        let b = self.b_factor();
        if b <= 0.0 {
            return Err(Error::Infeasible {
                guard: "d_h + nu_h - p*B_h",
                value: b,
            });
        }
        Ok(())
    }
}

/// A validated parameter set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams(ParamSet);

impl ModelParams {
    pub fn new(values: ParamSet) -> Result<ModelParams> {
        values.validate()?;
        Ok(ModelParams(values))
    }

    /// Baseline values, see [`ParamSet::TABLE1`].
    pub fn table1() -> ModelParams {
        ModelParams(ParamSet::TABLE1)
    }

    /// Copy with one value replaced, revalidated.
    pub fn with(&self, name: ParamName, value: f64) -> Result<ModelParams> {
        ModelParams::new(self.0.with(name, value))
    }

    pub fn values(&self) -> &ParamSet {
        &self.0
    }
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams::table1()
    }
}

impl Deref for ModelParams {
    type Target = ParamSet;

    fn deref(&self) -> &ParamSet {
        &self.0
    }
}
