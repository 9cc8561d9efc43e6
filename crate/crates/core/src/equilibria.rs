//! The eight equilibria of the model and their existence conditions.
//!
//! E1-E4 are disease free and have closed forms. E5/E6 (human infection
//! without infected vectors) require a negative force of infection and never
//! exist. E7/E8 are endemic: given the two forces of infection the human and
//! vector blocks are linear, so the equilibrium reduces to a 2-D fixed point
//! in `(lam_h, lam_v)`, solved here by damped Newton in log coordinates with
//! a bisection fallback on a 1-D reduction.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::model::{derivative, r0, threshold_o, threshold_o0};
use crate::params::{ModelParams, ParamSet};
use crate::state::StateVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EquilibriumKind {
    E1,
    E2,
    E3,
    E4,
    E5,
    E6,
    E7,
    E8,
}

impl EquilibriumKind {
    pub const ALL: [EquilibriumKind; 8] = [
        EquilibriumKind::E1,
        EquilibriumKind::E2,
        EquilibriumKind::E3,
        EquilibriumKind::E4,
        EquilibriumKind::E5,
        EquilibriumKind::E6,
        EquilibriumKind::E7,
        EquilibriumKind::E8,
    ];

    pub const fn name(self) -> &'static str {
        match self {
            EquilibriumKind::E1 => "E1",
            EquilibriumKind::E2 => "E2",
            EquilibriumKind::E3 => "E3",
            EquilibriumKind::E4 => "E4",
            EquilibriumKind::E5 => "E5",
            EquilibriumKind::E6 => "E6",
            EquilibriumKind::E7 => "E7",
            EquilibriumKind::E8 => "E8",
        }
    }

    /// Whether the predator sits at its carrying capacity (otherwise absent).
    pub const fn with_predator(self) -> bool {
        matches!(
            self,
            EquilibriumKind::E2 | EquilibriumKind::E4 | EquilibriumKind::E6 | EquilibriumKind::E8
        )
    }

    pub const fn is_disease_free(self) -> bool {
        matches!(
            self,
            EquilibriumKind::E1 | EquilibriumKind::E2 | EquilibriumKind::E3 | EquilibriumKind::E4
        )
    }
}

impl fmt::Display for EquilibriumKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One checked existence condition: `value` compared against `threshold`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExistenceReason {
    pub condition: String,
    pub value: f64,
    pub threshold: f64,
    pub holds: bool,
}

impl ExistenceReason {
    fn greater(condition: &str, value: f64, threshold: f64) -> ExistenceReason {
        ExistenceReason {
            condition: condition.into(),
            value,
            threshold,
            holds: value > threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumPoint {
    pub kind: EquilibriumKind,
    /// `None` when the closed form or fixed point has no nonnegative state.
    pub state: Option<StateVector>,
    pub exists: bool,
    pub existence_reasons: Vec<ExistenceReason>,
    /// Max-norm of the right-hand side at `state`.
    pub residual: Option<f64>,
}

impl EquilibriumPoint {
    fn build(kind: EquilibriumKind, state: Option<StateVector>, reasons: Vec<ExistenceReason>, p: &ParamSet) -> Self {
        let residual = state.map(|s| residual(&s, p));
        let exists = state.is_some() && reasons.iter().all(|r| r.holds);
        EquilibriumPoint {
            kind,
            state,
            exists,
            existence_reasons: reasons,
            residual,
        }
    }

    /// Residual relative to the size of the state.
    pub fn relative_residual(&self) -> Option<f64> {
        Some(self.residual? / (1.0 + self.state?.max_norm()))
    }
}

pub fn residual(state: &StateVector, p: &ParamSet) -> f64 {
    derivative(&state.to_array(), p)
        .iter()
        .fold(0.0, |m, v| f64::max(m, v.abs()))
}

fn predator_level(kind: EquilibriumKind, p: &ParamSet) -> f64 {
    if kind.with_predator() {
        p.k_x
    } else {
        0.0
    }
}

/// Closed-form disease-free equilibria E1-E4.
pub fn boundary_equilibrium(kind: EquilibriumKind, params: &ModelParams) -> Result<EquilibriumPoint> {
    let p: &ParamSet = params;
    let s_h = p.lambda_h / p.d_h;
    let g = predator_level(kind, p);
    let (state, reasons) = match kind {
        EquilibriumKind::E1 | EquilibriumKind::E2 => (
            Some(StateVector {
                s_h,
                g,
                ..Default::default()
            }),
            Vec::new(),
        ),
        EquilibriumKind::E3 | EquilibriumKind::E4 => {
            let (name, threshold) = if kind == EquilibriumKind::E3 {
                ("O_0", threshold_o0(p))
            } else {
                ("O", threshold_o(p))
            };
            let reason = ExistenceReason::greater(name, threshold, 1.0);
            let state = reason.holds.then(|| {
                let fill = 1.0 - 1.0 / threshold;
                StateVector {
                    s_h,
                    m_q: p.k_q * fill,
                    s_v: p.f * p.alpha * p.k_q / p.d_v * fill,
                    g,
                    ..Default::default()
                }
            });
            (state, alloc::vec![reason])
        }
        _ => return Err(Error::Domain("boundary_equilibrium takes E1, E2, E3 or E4")),
    };
    Ok(EquilibriumPoint::build(kind, state, reasons, p))
}

/// Human compartments `(S_h, E_h, I_h, R_h)` at equilibrium under a fixed
/// force of infection `lam_h`.
pub fn human_endemic_components(lam_h: f64, params: &ParamSet) -> Result<[f64; 4]> {
    if !(lam_h >= 0.0 && lam_h.is_finite()) {
        return Err(Error::Domain("force of infection must be finite and nonnegative"));
    }
    let p = params;
    let a = p.a_factor();
    let b = p.b_factor();
    let denom = a * b * (lam_h + p.d_h) + p.p * p.b_h * lam_h * a + p.q * p.b_h * p.nu_h * lam_h;
    if !(denom > 0.0) {
        return Err(Error::NonExistent {
            kind: "human block",
            reason: format!("shared denominator {denom} is not positive"),
        });
    }
    let s_h = p.lambda_h * a * b / denom;
    let e_h = lam_h * s_h / b;
    let i_h = p.nu_h * e_h / a;
    let r_h = p.theta * i_h / p.d_h;
    Ok([s_h, e_h, i_h, r_h])
}

/// Vector compartments `(m_q, S_v, E_v, I_v)` at equilibrium under a fixed
/// force of infection `lam_v` and predator level `g`. Obtained by solving
/// the four vector equations directly; `m_q` is negative when the vectors
/// cannot persist.
pub fn vector_endemic_components(lam_v: f64, g: f64, p: &ParamSet) -> [f64; 4] {
    let z = p.d_v + p.nu_v;
    let w = p.d_v + p.d_iv;
    // N_v = f alpha m_q * kappa
    let kappa = (1.0 + lam_v * (w + p.nu_v) / (z * w)) / (lam_v + p.d_v);
    let loss = p.alpha + p.d_q + p.phi * g;
    let m_q = p.k_q * (1.0 - loss / (p.epsilon * p.k * p.f * p.alpha * kappa));
    let s_v = p.f * p.alpha * m_q / (lam_v + p.d_v);
    let e_v = lam_v * s_v / z;
    let i_v = p.nu_v * e_v / w;
    [m_q, s_v, e_v, i_v]
}

/// The force of infection that E5/E6 would need. Always negative for
/// valid parameters, which rules those equilibria out.
pub fn e5_force_of_infection(p: &ParamSet) -> f64 {
    let a = p.a_factor();
    let b = p.b_factor();
    -p.d_h * a * b / (p.d_h * a + (p.theta + p.d_h) * p.nu_h)
}

fn infeasible_equilibrium(kind: EquilibriumKind, p: &ParamSet) -> EquilibriumPoint {
    let lam = e5_force_of_infection(p);
    EquilibriumPoint::build(
        kind,
        None,
        alloc::vec![ExistenceReason {
            condition: "lambda_h".into(),
            value: lam,
            threshold: 0.0,
            // even lambda_h >= 0 would not help: with I_v = 0 the force of
            // infection is identically zero and the human block is disease free
            holds: false,
        }],
        p,
    )
}

/// Ratio from the human-block existence condition; must exceed 1.
pub fn human_existence_ratio(lam_h: f64, p: &ParamSet) -> f64 {
    let num = p.p * p.q * p.b_h * p.b_h * p.d_h
        + (p.theta + p.d_h + p.d_i) * (p.d_h + lam_h) * (p.d_h + p.nu_h);
    let den = p.b_h * p.d_h * (p.p * p.theta + (p.p + p.q) * p.d_h + p.p * p.d_i + p.q * (lam_h + p.nu_h));
    num / den
}

const NEWTON_BUDGET: usize = 200;
const DEFAULT_SEED: (f64, f64) = (1e-3, 1e-3);
const LOG_LAMBDA_MIN: f64 = -70.0;
const LOG_LAMBDA_MAX: f64 = 30.0;
const LOG_VECTOR_FORCE_MIN: f64 = -200.0;

struct FixedPoint<'a> {
    p: &'a ParamSet,
    g: f64,
}

impl FixedPoint<'_> {
    fn state(&self, lam_h: f64, lam_v: f64) -> Option<StateVector> {
        let [s_h, e_h, i_h, r_h] = human_endemic_components(lam_h, self.p).ok()?;
        let [m_q, s_v, e_v, i_v] = vector_endemic_components(lam_v, self.g, self.p);
        Some(StateVector {
            s_h,
            e_h,
            i_h,
            r_h,
            m_q,
            s_v,
            e_v,
            i_v,
            g: self.g,
        })
    }

    /// Consistency residuals in log form; the trivial root `lam = 0` sits at
    /// minus infinity in these coordinates.
    fn residual(&self, x: [f64; 2]) -> Option<[f64; 2]> {
        let (lam_h, lam_v) = (libm::exp(x[0]), libm::exp(x[1]));
        let s = self.state(lam_h, lam_v)?;
        if !(s.i_v > 0.0 && s.i_h > 0.0 && s.m_q > 0.0) {
            return None;
        }
        let p = self.p;
        let r1 = libm::log(lam_h * s.n_h()) - libm::log(p.c_vh * p.a_v * s.i_v);
        let r2 = libm::log(lam_v * s.n_v()) - libm::log(p.c_hv * p.a_v * s.i_h);
        (r1.is_finite() && r2.is_finite()).then_some([r1, r2])
    }

    fn newton(&self, seed: (f64, f64)) -> Option<[f64; 2]> {
        let mut x = [libm::log(seed.0), libm::log(seed.1)];
        let mut f = self.residual(x)?;
        for _ in 0..NEWTON_BUDGET {
            let norm = f[0].abs().max(f[1].abs());
            if norm < 1e-14 {
                return Some(x);
            }
            let mut jac = [[0.0; 2]; 2];
            for j in 0..2 {
                let step = 1e-6;
                let mut xp = x;
                let mut xm = x;
                xp[j] += step;
                xm[j] -= step;
                let fp = self.residual(xp)?;
                let fm = self.residual(xm)?;
                for i in 0..2 {
                    jac[i][j] = (fp[i] - fm[i]) / (2.0 * step);
                }
            }
            let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
            if !(det.abs() > 1e-300) {
                return None;
            }
            let dx = [
                (jac[1][1] * f[0] - jac[0][1] * f[1]) / det,
                (-jac[1][0] * f[0] + jac[0][0] * f[1]) / det,
            ];
            let mut t = 1.0;
            let mut accepted = false;
            while t > 1e-6 {
                let cand = [x[0] - t * dx[0], x[1] - t * dx[1]];
                if cand.iter().any(|v| !(LOG_LAMBDA_MIN..=LOG_LAMBDA_MAX).contains(v)) {
                    t *= 0.5;
                    continue;
                }
                if let Some(fc) = self.residual(cand) {
                    if fc[0].abs().max(fc[1].abs()) < norm || norm < 1e-12 {
                        x = cand;
                        f = fc;
                        accepted = true;
                        break;
                    }
                }
                t *= 0.5;
            }
            if !accepted {
                return None;
            }
        }
        None
    }

    /// `lam_v` matching a given infectious-human level, by bisection on
    /// `lam_v N_v(lam_v) = c_hv a_v I_h`.
    fn vector_force_for(&self, i_h: f64) -> Option<f64> {
        let target = self.p.c_hv * self.p.a_v * i_h;
        let excess = |y: f64| {
            let lam = libm::exp(y);
            let [_, s_v, e_v, i_v] = vector_endemic_components(lam, self.g, self.p);
            libm::log(lam * (s_v + e_v + i_v)) - libm::log(target)
        };
        bisect(excess, LOG_VECTOR_FORCE_MIN, LOG_LAMBDA_MAX).map(libm::exp)
    }

    /// 1-D reduction in `lam_h`: positive near zero when R0 > 1, negative for
    /// large forces of infection.
    fn reduced(&self, y: f64) -> f64 {
        let lam_h = libm::exp(y);
        let Ok([s_h, e_h, i_h, r_h]) = human_endemic_components(lam_h, self.p) else {
            return f64::NAN;
        };
        let Some(lam_v) = self.vector_force_for(i_h) else {
            return f64::NAN;
        };
        let [_, _, _, i_v] = vector_endemic_components(lam_v, self.g, self.p);
        libm::log(self.p.c_vh * self.p.a_v * i_v) - libm::log(lam_h * (s_h + e_h + i_h + r_h))
    }

    fn bisection(&self) -> Option<[f64; 2]> {
        let y = bisect(|y| -self.reduced(y), LOG_LAMBDA_MIN, LOG_LAMBDA_MAX)?;
        let [_, _, i_h, _] = human_endemic_components(libm::exp(y), self.p).ok()?;
        let lam_v = self.vector_force_for(i_h)?;
        Some([y, libm::log(lam_v)])
    }
}

/// Root of an increasing-through-zero function on `[lo, hi]`.
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> Option<f64> {
    let (flo, fhi) = (f(lo), f(hi));
    if !(flo < 0.0 && fhi > 0.0) {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if !fm.is_finite() {
            return None;
        }
        if fm < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 * (1.0 + mid.abs()) {
            break;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Endemic equilibrium E7 (no predator) or E8 (predator at capacity).
pub fn solve_endemic(kind: EquilibriumKind, params: &ModelParams) -> Result<EquilibriumPoint> {
    solve_endemic_from(kind, params, DEFAULT_SEED)
}

/// [`solve_endemic`] with an explicit Newton seed `(lam_h, lam_v)`.
pub fn solve_endemic_from(
    kind: EquilibriumKind,
    params: &ModelParams,
    seed: (f64, f64),
) -> Result<EquilibriumPoint> {
    let p: &ParamSet = params;
    let (name, threshold) = match kind {
        EquilibriumKind::E7 => ("O_0", threshold_o0(p)),
        EquilibriumKind::E8 => ("O", threshold_o(p)),
        _ => return Err(Error::Domain("solve_endemic takes E7 or E8")),
    };
    if !(seed.0 > 0.0 && seed.1 > 0.0) {
        return Err(Error::Domain("Newton seed must be positive"));
    }
    let mut reasons = alloc::vec![ExistenceReason::greater(name, threshold, 1.0)];
    if !reasons[0].holds {
        return Ok(EquilibriumPoint::build(kind, None, reasons, p));
    }
    let transmission = p.a_v * p.a_v * p.c_vh * p.c_hv;
    reasons.push(ExistenceReason::greater("a_v^2 c_vh c_hv", transmission, 0.0));
    if !reasons[1].holds {
        return Ok(EquilibriumPoint::build(kind, None, reasons, p));
    }

    let fp = FixedPoint {
        p,
        g: predator_level(kind, p),
    };
    let solution = match fp.newton(seed) {
        Some(x) => Some(x),
        None => {
            // no sign change on the reduction means no positive fixed point
            let lo = fp.reduced(LOG_LAMBDA_MIN);
            if lo.is_finite() && lo <= 0.0 {
                reasons.push(ExistenceReason::greater("R0", r0(p), 1.0));
                return Ok(EquilibriumPoint::build(kind, None, reasons, p));
            }
            fp.bisection()
        }
    };
    let Some(x) = solution else {
        return Err(Error::NoConvergence {
            iterations: NEWTON_BUDGET,
            lambda_h: seed.0,
            lambda_v: seed.1,
        });
    };
    let (lam_h, lam_v) = (libm::exp(x[0]), libm::exp(x[1]));
    let state = fp.state(lam_h, lam_v);
    reasons.push(ExistenceReason::greater("R0", r0(p), 1.0));
    reasons.push(ExistenceReason::greater(
        "human existence ratio",
        human_existence_ratio(lam_h, p),
        1.0,
    ));
    let nonnegative = state.is_some_and(|s| s.check_nonnegative().is_ok());
    reasons.push(ExistenceReason {
        condition: "nonnegative state".into(),
        value: f64::from(u8::from(nonnegative)),
        threshold: 1.0,
        holds: nonnegative,
    });
    let mut point = EquilibriumPoint::build(kind, state.filter(|_| nonnegative), reasons, p);
    // The R0 and human-ratio entries are reported, not used as gates: the
    // fixed point itself decides existence.
    point.exists = point.state.is_some()
        && point
            .existence_reasons
            .iter()
            .filter(|r| r.condition == name || r.condition == "nonnegative state")
            .all(|r| r.holds);
    Ok(point)
}

/// Every equilibrium E1-E8 in order.
pub fn all_equilibria(params: &ModelParams) -> Result<Vec<EquilibriumPoint>> {
    EquilibriumKind::ALL
        .iter()
        .map(|&kind| equilibrium(kind, params))
        .collect()
}

/// Any equilibrium by kind.
pub fn equilibrium(kind: EquilibriumKind, params: &ModelParams) -> Result<EquilibriumPoint> {
    match kind {
        EquilibriumKind::E5 | EquilibriumKind::E6 => Ok(infeasible_equilibrium(kind, params)),
        EquilibriumKind::E7 | EquilibriumKind::E8 => solve_endemic(kind, params),
        _ => boundary_equilibrium(kind, params),
    }
}
