//! Adaptive Dormand-Prince 5(4) integration with dense output.
//!
//! The model is autonomous, so stage times never enter the right-hand side.
//!
//! Steps are controlled by a PI controller on the mixed error scale
//! `tol * (1e-3 + |y_i|)`: every compartment is held to `tol` relative
//! accuracy, and to `tol / 1000` individuals once it is nearly empty.
//! The small absolute floor matters in the predator scenarios, where the
//! adult vector population collapses towards zero while the vector force of
//! infection `c_hv a_v I_h / N_v` grows without bound; a coarser floor lets
//! round-off in `S_v` leak into the infection flux.
//! Output is sampled on a uniform grid through the fourth-order continuous
//! extension of the method.
//!
//! Floating point cannot guarantee positivity, so after every accepted step
//! a negative component is clamped to zero when its magnitude is below
//! `10 * tol * (1e-3 + |y_i|)`; larger negatives abort the run.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::derivative;
use crate::params::ModelParams;
use crate::state::{StateVector, COMPONENTS, DIM};

type Vector = [f64; DIM];

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// fifth minus fourth order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

// continuous extension
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const EXPO: f64 = 0.2 - BETA * 0.75;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const CLAMP_FACTOR: f64 = 10.0;
/// Absolute part of the error scale, in individuals.
const ABS_FLOOR: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorOptions {
    pub t0: f64,
    pub t1: f64,
    /// Spacing of the output grid (days).
    pub sample_dt: f64,
    /// Relative tolerance.
    pub tol: f64,
    pub max_steps: u64,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        IntegratorOptions {
            t0: 0.0,
            t1: 500.0,
            sample_dt: 0.5,
            tol: 1e-8,
            max_steps: 50_000_000,
        }
    }
}

impl IntegratorOptions {
    fn check(&self) -> Result<()> {
        if !(self.t0.is_finite() && self.t1.is_finite() && self.t1 > self.t0) {
            return Err(Error::InvalidRequest(format!(
                "need finite t1 > t0, got t0 = {}, t1 = {}",
                self.t0, self.t1
            )));
        }
        if !(self.sample_dt > 0.0 && self.sample_dt.is_finite()) {
            return Err(Error::InvalidRequest(format!(
                "sample_dt must be positive, got {}",
                self.sample_dt
            )));
        }
        if !(self.tol > 1e-12 && self.tol < 1e-2) {
            return Err(Error::InvalidRequest(format!(
                "tol must lie in (1e-12, 1e-2), got {}",
                self.tol
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StepStats {
    pub accepted: u64,
    pub rejected: u64,
    pub rhs_evals: u64,
    /// Accepted steps in which at least one component was clamped to zero.
    pub clamped: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryMeta {
    pub tol: f64,
    pub sample_dt: f64,
    pub stats: StepStats,
}

/// Uniformly sampled solution.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<StateVector>,
    pub params: ModelParams,
    pub meta: TrajectoryMeta,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<(f64, &StateVector)> {
        self.times.last().copied().zip(self.states.last())
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &StateVector)> + '_ {
        self.times.iter().copied().zip(self.states.iter())
    }
}

/// Integrate from `t0` to `t1` and sample every `sample_dt` days.
pub fn integrate(
    initial: &StateVector,
    params: &ModelParams,
    t0: f64,
    t1: f64,
    sample_dt: f64,
    tol: f64,
) -> Result<Trajectory> {
    integrate_with(
        initial,
        params,
        &IntegratorOptions {
            t0,
            t1,
            sample_dt,
            tol,
            ..Default::default()
        },
    )
}

pub fn integrate_with(
    initial: &StateVector,
    params: &ModelParams,
    opts: &IntegratorOptions,
) -> Result<Trajectory> {
    opts.check()?;
    initial.check_nonnegative()?;

    let grid = SampleGrid::new(opts.t0, opts.t1, opts.sample_dt);
    let mut out = Trajectory {
        times: Vec::with_capacity(grid.len()),
        states: Vec::with_capacity(grid.len()),
        params: *params,
        meta: TrajectoryMeta {
            tol: opts.tol,
            sample_dt: opts.sample_dt,
            stats: StepStats::default(),
        },
    };

    let tol = opts.tol;
    let p: &crate::params::ParamSet = params;
    let f = |y: &Vector| derivative(y, p);

    let mut t = opts.t0;
    let mut y = initial.to_array();
    let mut k1 = f(&y);
    let mut stats = StepStats {
        rhs_evals: 1,
        ..Default::default()
    };

    out.times.push(t);
    out.states.push(*initial);
    let mut next_sample = 1;

    let span = opts.t1 - opts.t0;
    let mut h = initial_step(&f, &y, &k1, tol, span);
    stats.rhs_evals += 1;
    // err_old^BETA of the last accepted step
    let mut err_old_beta: f64 = libm::exp(BETA * libm::log(1e-4));
    let mut last_rejected = false;

    let fail = |t: f64, reason: alloc::string::String, mut out: Trajectory, stats: StepStats| {
        out.meta.stats = stats;
        Err(Error::IntegrationFailure {
            t,
            reason,
            partial: Box::new(out),
        })
    };

    while next_sample < grid.len() {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return fail(t, format!("step budget of {} exhausted", opts.max_steps), out, stats);
        }
        let remaining = opts.t1 - t;
        let mut last = false;
        if h >= remaining {
            h = remaining;
            last = true;
        }
        if h <= 16.0 * f64::EPSILON * t.abs().max(1.0) {
            return fail(t, format!("step size underflow (h = {h:e})"), out, stats);
        }

        let stage = Stages::compute(&f, &y, &k1, h);
        stats.rhs_evals += 6;

        let mut err_sq = 0.0;
        for i in 0..DIM {
            let sc = tol * (ABS_FLOOR + y[i].abs().max(stage.y_new[i].abs()));
            let e = h * (E1 * k1[i]
                + E3 * stage.k3[i]
                + E4 * stage.k4[i]
                + E5 * stage.k5[i]
                + E6 * stage.k6[i]
                + E7 * stage.k7[i]);
            let r = e / sc;
            err_sq += r * r;
        }
        let err = libm::sqrt(err_sq / DIM as f64);
        if !err.is_finite() {
            stats.rejected += 1;
            h *= FAC_MIN;
            last_rejected = true;
            continue;
        }

        let log_err = libm::log(err);
        let fac11 = libm::exp(EXPO * log_err);
        if err <= 1.0 {
            let mut fac = fac11 / err_old_beta;
            fac = (fac / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
            let mut h_new = h / fac;
            if last_rejected {
                h_new = h_new.min(h);
            }
            err_old_beta = libm::exp(BETA * log_err.max(libm::log(1e-4)));

            let mut y_new = stage.y_new;
            let mut k7 = stage.k7;
            let mut clamped = false;
            for i in 0..DIM {
                if y_new[i] < 0.0 {
                    let limit = CLAMP_FACTOR * tol * (ABS_FLOOR + y[i].abs());
                    if -y_new[i] <= limit {
                        y_new[i] = 0.0;
                        clamped = true;
                    } else {
                        return fail(
                            t + h,
                            format!(
                                "negative overshoot in {} ({:e} beyond clamp limit {:e})",
                                COMPONENTS[i], y_new[i], limit
                            ),
                            out,
                            stats,
                        );
                    }
                }
            }
            if clamped {
                k7 = f(&y_new);
                stats.rhs_evals += 1;
                stats.clamped += 1;
            }

            let t_new = if last { opts.t1 } else { t + h };
            let mut dense = None;
            while next_sample < grid.len() {
                let ts = grid.at(next_sample);
                if ts > t_new {
                    break;
                }
                let ys = if ts == t_new {
                    y_new
                } else {
                    dense
                        .get_or_insert_with(|| Dense::new(&y, &y_new, &k1, &stage, &k7, h))
                        .eval((ts - t) / h)
                };
                match clamp_sample(ys, &y, &y_new, tol) {
                    Some(s) => {
                        out.times.push(ts);
                        out.states.push(StateVector::from_array(s));
                    }
                    None => {
                        return fail(ts, format!("dense output went negative at t = {ts}"), out, stats)
                    }
                }
                next_sample += 1;
            }

            stats.accepted += 1;
            t = t_new;
            y = y_new;
            k1 = k7;
            h = h_new;
            last_rejected = false;
        } else {
            stats.rejected += 1;
            h /= (fac11 / SAFETY).min(1.0 / FAC_MIN);
            last_rejected = true;
        }
    }

    out.meta.stats = stats;
    Ok(out)
}

struct SampleGrid {
    t0: f64,
    t1: f64,
    dt: f64,
    n_regular: usize,
    has_tail: bool,
}

impl SampleGrid {
    fn new(t0: f64, t1: f64, dt: f64) -> SampleGrid {
        let ratio = (t1 - t0) / dt;
        let mut n_regular = libm::floor(ratio + 1e-9) as usize;
        // keep the grid inside [t0, t1]
        while n_regular > 0 && t0 + n_regular as f64 * dt > t1 {
            n_regular -= 1;
        }
        let last = t0 + n_regular as f64 * dt;
        let has_tail = t1 - last > 1e-9 * dt;
        SampleGrid {
            t0,
            t1,
            dt,
            n_regular,
            has_tail,
        }
    }

    fn len(&self) -> usize {
        self.n_regular + 1 + usize::from(self.has_tail)
    }

    fn at(&self, i: usize) -> f64 {
        // the last point is t1 exactly, never a rounded multiple of dt
        if i > self.n_regular || (i == self.n_regular && !self.has_tail) {
            self.t1
        } else {
            self.t0 + i as f64 * self.dt
        }
    }
}

struct Stages {
    k3: Vector,
    k4: Vector,
    k5: Vector,
    k6: Vector,
    k7: Vector,
    y_new: Vector,
}

impl Stages {
    fn compute(f: &impl Fn(&Vector) -> Vector, y: &Vector, k1: &Vector, h: f64) -> Stages {
        let mut yt = [0.0; DIM];
        for i in 0..DIM {
            yt[i] = y[i] + h * A21 * k1[i];
        }
        let k2 = f(&yt);
        for i in 0..DIM {
            yt[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
        }
        let k3 = f(&yt);
        for i in 0..DIM {
            yt[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        let k4 = f(&yt);
        for i in 0..DIM {
            yt[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        let k5 = f(&yt);
        for i in 0..DIM {
            yt[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        let k6 = f(&yt);
        let mut y_new = [0.0; DIM];
        for i in 0..DIM {
            y_new[i] = y[i] + h * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
        }
        let k7 = f(&y_new);
        Stages {
            k3,
            k4,
            k5,
            k6,
            k7,
            y_new,
        }
    }
}

struct Dense {
    r: [Vector; 5],
}

impl Dense {
    fn new(y: &Vector, y_new: &Vector, k1: &Vector, s: &Stages, k7: &Vector, h: f64) -> Dense {
        let mut r = [[0.0; DIM]; 5];
        for i in 0..DIM {
            let dy = y_new[i] - y[i];
            let bspl = h * k1[i] - dy;
            r[0][i] = y[i];
            r[1][i] = dy;
            r[2][i] = bspl;
            r[3][i] = dy - h * k7[i] - bspl;
            r[4][i] = h
                * (D1 * k1[i] + D3 * s.k3[i] + D4 * s.k4[i] + D5 * s.k5[i] + D6 * s.k6[i]
                    + D7 * k7[i]);
        }
        Dense { r }
    }

    fn eval(&self, theta: f64) -> Vector {
        let theta1 = 1.0 - theta;
        let mut out = [0.0; DIM];
        for (i, o) in out.iter_mut().enumerate() {
            let r = &self.r;
            *o = r[0][i]
                + theta * (r[1][i] + theta1 * (r[2][i] + theta * (r[3][i] + theta1 * r[4][i])));
        }
        out
    }
}

fn clamp_sample(mut ys: Vector, y0: &Vector, y1: &Vector, tol: f64) -> Option<Vector> {
    for i in 0..DIM {
        if ys[i] < 0.0 {
            let limit = CLAMP_FACTOR * tol * (ABS_FLOOR + y0[i].abs().max(y1[i].abs()));
            if -ys[i] <= limit {
                ys[i] = 0.0;
            } else {
                return None;
            }
        }
    }
    Some(ys)
}

fn sq(x: f64) -> f64 {
    x * x
}

/// Starting step from the second-derivative estimate of Hairer & Wanner.
fn initial_step(f: &impl Fn(&Vector) -> Vector, y: &Vector, k1: &Vector, tol: f64, span: f64) -> f64 {
    let sc = |v: f64| tol * (ABS_FLOOR + v.abs());
    let mut dnf = 0.0;
    let mut dny = 0.0;
    for i in 0..DIM {
        dnf += sq(k1[i] / sc(y[i]));
        dny += sq(y[i] / sc(y[i]));
    }
    let mut h = if dnf <= 1e-10 || dny <= 1e-10 {
        1e-6
    } else {
        0.01 * libm::sqrt(dny / dnf)
    };
    h = h.min(span);
    let mut y1 = *y;
    for i in 0..DIM {
        y1[i] += h * k1[i];
    }
    let k2 = f(&y1);
    let mut der2 = 0.0;
    for i in 0..DIM {
        der2 += sq((k2[i] - k1[i]) / sc(y[i]));
    }
    let der2 = libm::sqrt(der2) / h;
    let der12 = der2.max(libm::sqrt(dnf));
    let h1 = if der12 <= 1e-15 {
        (1e-6f64).max(h * 1e-3)
    } else {
        libm::pow(0.01 / der12, 0.2)
    };
    (100.0 * h).min(h1).min(span)
}
