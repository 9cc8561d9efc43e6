use core::ops::{Index, IndexMut};

use crate::error::{Error, Result};

pub const DIM: usize = 9;

/// Compartment names in storage order.
pub const COMPONENTS: [&str; DIM] = ["S_h", "E_h", "I_h", "R_h", "m_q", "S_v", "E_v", "I_v", "G"];

pub const S_H: usize = 0;
pub const E_H: usize = 1;
pub const I_H: usize = 2;
pub const R_H: usize = 3;
pub const M_Q: usize = 4;
pub const S_V: usize = 5;
pub const E_V: usize = 6;
pub const I_V: usize = 7;
pub const G: usize = 8;

/// Compartment sizes (individuals).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StateVector {
    pub s_h: f64,
    pub e_h: f64,
    pub i_h: f64,
    pub r_h: f64,
    /// Immature vectors (eggs, larvae, pupae).
    pub m_q: f64,
    pub s_v: f64,
    pub e_v: f64,
    pub i_v: f64,
    /// Predator fish.
    pub g: f64,
}

impl StateVector {
    pub const fn from_array(a: [f64; DIM]) -> StateVector {
        StateVector {
            s_h: a[0],
            e_h: a[1],
            i_h: a[2],
            r_h: a[3],
            m_q: a[4],
            s_v: a[5],
            e_v: a[6],
            i_v: a[7],
            g: a[8],
        }
    }

    pub const fn to_array(&self) -> [f64; DIM] {
        [
            self.s_h, self.e_h, self.i_h, self.r_h, self.m_q, self.s_v, self.e_v, self.i_v, self.g,
        ]
    }

    /// Initial state of the reference scenarios with `g0` predators.
    pub const fn reference_initial(g0: f64) -> StateVector {
        StateVector::from_array([6000.0, 2000.0, 1000.0, 1000.0, 1100.0, 300.0, 100.0, 100.0, g0])
    }

    pub fn n_h(&self) -> f64 {
        self.s_h + self.e_h + self.i_h + self.r_h
    }

    pub fn n_v(&self) -> f64 {
        self.s_v + self.e_v + self.i_v
    }

    pub fn max_norm(&self) -> f64 {
        self.to_array().iter().fold(0.0, |m, v| f64::max(m, v.abs()))
    }

    pub fn check_finite(&self) -> Result<()> {
        for (value, component) in self.to_array().iter().zip(COMPONENTS) {
            if !value.is_finite() {
                return Err(Error::NonFiniteState {
                    component,
                    value: *value,
                });
            }
        }
        Ok(())
    }

    pub fn check_nonnegative(&self) -> Result<()> {
        self.check_finite()?;
        for (value, component) in self.to_array().iter().zip(COMPONENTS) {
            if *value < 0.0 {
                return Err(Error::NegativeState {
                    component,
                    value: *value,
                });
            }
        }
        Ok(())
    }
}

impl Index<usize> for StateVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        match i {
            S_H => &self.s_h,
            E_H => &self.e_h,
            I_H => &self.i_h,
            R_H => &self.r_h,
            M_Q => &self.m_q,
            S_V => &self.s_v,
            E_V => &self.e_v,
            I_V => &self.i_v,
            G => &self.g,
            _ => panic!("state index {i} out of range"),
        }
    }
}

impl IndexMut<usize> for StateVector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        match i {
            S_H => &mut self.s_h,
            E_H => &mut self.e_h,
            I_H => &mut self.i_h,
            R_H => &mut self.r_h,
            M_Q => &mut self.m_q,
            S_V => &mut self.s_v,
            E_V => &mut self.e_v,
            I_V => &mut self.i_v,
            G => &mut self.g,
            _ => panic!("state index {i} out of range"),
        }
    }
}

impl From<[f64; DIM]> for StateVector {
    fn from(a: [f64; DIM]) -> Self {
        StateVector::from_array(a)
    }
}

impl From<StateVector> for [f64; DIM] {
    fn from(s: StateVector) -> Self {
        s.to_array()
    }
}
