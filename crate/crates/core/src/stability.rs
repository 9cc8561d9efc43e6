//! Local stability: Jacobian, next-generation matrix, Routh-Hurwitz
//! coefficients and eigenvalue classification of equilibria.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::equilibria::{EquilibriumKind, EquilibriumPoint};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix4, Matrix9, C64};
use crate::model::{r0, r0_squared, threshold_o, threshold_o0};
use crate::params::{ModelParams, ParamSet};
use crate::state::{StateVector, E_H, E_V, G, I_H, I_V, M_Q, R_H, S_H, S_V};

/// Real parts closer to zero than this fraction of the spectral radius are
/// reported as marginal.
pub const MARGINAL_TOLERANCE: f64 = 1e-9;

/// Analytic Jacobian of [`crate::model::rhs`].
///
/// With no adult vectors the vector infection term `I_h S_v / N_v` is not
/// differentiable; its `I_h` partial is taken along an all-susceptible vector
/// population (`S_v / N_v = 1`), which is the disease-free limit. That case
/// requires `I_h = 0`.
pub fn jacobian(state: &StateVector, params: &ModelParams) -> Result<Matrix9> {
    state.check_finite()?;
    let p: &ParamSet = params;
    let n_h = state.n_h();
    let n_v = state.n_v();
    if !(n_h > 0.0) {
        return Err(Error::Domain("Jacobian needs N_h > 0"));
    }
    let hc = p.c_vh * p.a_v;
    let vc = p.c_hv * p.a_v;

    // human infection term H = hc I_v S_h / N_h
    let dh_ds = hc * state.i_v * (n_h - state.s_h) / (n_h * n_h);
    let dh_dother = -hc * state.i_v * state.s_h / (n_h * n_h);
    let dh_div = hc * state.s_h / n_h;

    // vector infection term V = vc I_h S_v / N_v
    let (dv_dih, dv_dsv, dv_dother) = if n_v > 0.0 {
        (
            vc * state.s_v / n_v,
            vc * state.i_h * (n_v - state.s_v) / (n_v * n_v),
            -vc * state.i_h * state.s_v / (n_v * n_v),
        )
    } else if state.i_h == 0.0 {
        (vc, 0.0, 0.0)
    } else {
        return Err(Error::Domain("Jacobian undefined for N_v = 0 with I_h > 0"));
    };

    let pbh = p.p * p.b_h;
    let qbh = p.q * p.b_h;
    let mut j = Matrix9::zeros();

    j[(S_H, S_H)] = -dh_ds - p.d_h;
    j[(S_H, E_H)] = -pbh - dh_dother;
    j[(S_H, I_H)] = -qbh - dh_dother;
    j[(S_H, R_H)] = -dh_dother;
    j[(S_H, I_V)] = -dh_div;

    j[(E_H, S_H)] = dh_ds;
    j[(E_H, E_H)] = pbh + dh_dother - p.d_h - p.nu_h;
    j[(E_H, I_H)] = dh_dother;
    j[(E_H, R_H)] = dh_dother;
    j[(E_H, I_V)] = dh_div;

    j[(I_H, E_H)] = p.nu_h;
    j[(I_H, I_H)] = qbh - (p.theta + p.d_h + p.d_i);

    j[(R_H, I_H)] = p.theta;
    j[(R_H, R_H)] = -p.d_h;

    let fill = 1.0 - state.m_q / p.k_q;
    j[(M_Q, M_Q)] = -p.epsilon * p.k * n_v / p.k_q - (p.alpha + p.d_q + p.phi * state.g);
    j[(M_Q, S_V)] = p.epsilon * p.k * fill;
    j[(M_Q, E_V)] = p.epsilon * p.k * fill;
    j[(M_Q, I_V)] = p.epsilon * p.k * fill;
    j[(M_Q, G)] = -p.phi * state.m_q;

    j[(S_V, I_H)] = -dv_dih;
    j[(S_V, M_Q)] = p.f * p.alpha;
    j[(S_V, S_V)] = -dv_dsv - p.d_v;
    j[(S_V, E_V)] = -dv_dother;
    j[(S_V, I_V)] = -dv_dother;

    j[(E_V, I_H)] = dv_dih;
    j[(E_V, S_V)] = dv_dsv;
    j[(E_V, E_V)] = dv_dother - p.d_v - p.nu_v;
    j[(E_V, I_V)] = dv_dother;

    j[(I_V, E_V)] = p.nu_v;
    j[(I_V, I_V)] = -(p.d_v + p.d_iv);

    let growth = p.rho + p.psi * state.m_q;
    j[(G, M_Q)] = p.psi * state.g * (1.0 - state.g / p.k_x);
    j[(G, G)] = growth * (1.0 - 2.0 * state.g / p.k_x);

    if j.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("Jacobian has non-finite entries"));
    }
    Ok(j)
}

/// Next-generation construction of R0 over the infected classes
/// `(E_h, I_h, E_v, I_v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NextGeneration {
    /// Spectral radius of `T (-Sigma^-1)`.
    pub r0: f64,
    /// New infections.
    pub t: Matrix4,
    /// Transitions between infected classes.
    pub sigma: Matrix4,
    pub minus_sigma_inv: Matrix4,
}

pub fn ngm_r0(params: &ModelParams) -> Result<NextGeneration> {
    let p: &ParamSet = params;
    #[rustfmt::skip]
    let t = Matrix4::new(
        0.0, 0.0,            0.0, p.a_v * p.c_vh,
        0.0, 0.0,            0.0, 0.0,
        0.0, p.a_v * p.c_hv, 0.0, 0.0,
        0.0, 0.0,            0.0, 0.0,
    );
    #[rustfmt::skip]
    let sigma = Matrix4::new(
        p.p * p.b_h - p.d_h - p.nu_h, 0.0,                                    0.0,              0.0,
        p.nu_h,                       p.q * p.b_h - p.theta - p.d_h - p.d_i, 0.0,              0.0,
        0.0,                          0.0,                                    -p.d_v - p.nu_v,  0.0,
        0.0,                          0.0,                                    p.nu_v,           -(p.d_v + p.d_iv),
    );
    let inv = sigma
        .try_inverse()
        .ok_or(Error::Singular("transition matrix"))?;
    let minus_sigma_inv = -inv;
    let next_gen = t * minus_sigma_inv;
    Ok(NextGeneration {
        r0: linalg::spectral_radius(&next_gen)?,
        t,
        sigma,
        minus_sigma_inv,
    })
}

/// Routh-Hurwitz data for the disease-free equilibria with vectors
/// extinct (E2) or established under predation (E4).
///
/// The infection block contributes the quartic
/// `x^4 + a1 x^3 + a2 x^2 + a3 x + a4`; the mosquito life-cycle block the
/// quadratic `a x^2 + b x + c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RouthHurwitz {
    pub a: [f64; 5],
    pub b1: f64,
    pub b2: f64,
    pub c1: f64,
    pub quadratic_abc: [f64; 3],
    pub gates: StabilityGates,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StabilityGates {
    pub r0_squared_below_one: bool,
    pub c1_positive: bool,
    /// E2: `O < 1`. E4: `O > 2 f k alpha eps / (f k alpha eps + (alpha + d_q + phi K_x) d_v)`.
    pub mosquito_gate: bool,
}

impl StabilityGates {
    pub fn all(&self) -> bool {
        self.r0_squared_below_one && self.c1_positive && self.mosquito_gate
    }
}

impl RouthHurwitz {
    pub fn quartic(&self) -> [f64; 5] {
        self.a
    }

    /// First-column test of the Routh array for the quartic.
    pub fn quartic_hurwitz_stable(&self) -> bool {
        let [_, a1, a2, a3, a4] = self.a;
        a1 > 0.0 && a2 > 0.0 && a3 > 0.0 && a4 > 0.0 && self.b1 > 0.0 && self.c1 > 0.0
    }
}

fn infection_quartic(p: &ParamSet) -> ([f64; 5], f64, f64) {
    let a = p.a_factor();
    let b = p.b_factor();
    let (dv, div, nuv) = (p.d_v, p.d_iv, p.nu_v);
    let a1 = a + b + 2.0 * dv + div + nuv;
    let a2 = a * b + 2.0 * a * dv + 2.0 * b * dv + dv * dv + a * div + b * div + dv * div
        + (a + b + dv + div) * nuv;
    let a3 = 2.0 * a * b * dv
        + (a + b) * (dv * dv + dv * div + dv * nuv + div * nuv)
        + a * b * (div + nuv);
    let a4 = a * b * (dv + div) * (dv + nuv) - p.a_v * p.a_v * p.c_vh * p.c_hv * p.nu_h * p.nu_v;
    let b1 = (a * b * (a + b) + (a + b + dv + div) * (a + b + dv + nuv) * (2.0 * dv + div + nuv)) / a1;
    let c1 = (b1 * a3 - a1 * a4) / b1;
    ([1.0, a1, a2, a3, a4], b1, c1)
}

/// Quadratic factor of the mosquito life-cycle block at a disease-free
/// equilibrium with predator level `g` and immature fill `1 - 1/threshold`
/// (`fill = 0` when vectors are absent).
fn mosquito_quadratic(p: &ParamSet, g: f64, fill: f64) -> [f64; 3] {
    let loss = p.alpha + p.d_q + p.phi * g;
    let eggs = p.f * p.k * p.alpha * p.epsilon;
    if fill == 0.0 {
        [1.0, loss + p.d_v, loss * p.d_v - eggs]
    } else {
        let threshold = 1.0 / (1.0 - fill);
        [
            1.0,
            eggs * fill / p.d_v + loss + p.d_v,
            eggs * (1.0 - 2.0 / threshold) + p.d_v * loss,
        ]
    }
}

pub fn routh_hurwitz_e2(params: &ModelParams) -> RouthHurwitz {
    let p: &ParamSet = params;
    let (a, b1, c1) = infection_quartic(p);
    RouthHurwitz {
        a,
        b1,
        b2: a[4],
        c1,
        quadratic_abc: mosquito_quadratic(p, p.k_x, 0.0),
        gates: StabilityGates {
            r0_squared_below_one: r0_squared(p) < 1.0,
            c1_positive: c1 > 0.0,
            mosquito_gate: threshold_o(p) < 1.0,
        },
    }
}

pub fn routh_hurwitz_e4(params: &ModelParams) -> RouthHurwitz {
    let p: &ParamSet = params;
    let (a, b1, c1) = infection_quartic(p);
    let o = threshold_o(p);
    let eggs = p.f * p.k * p.alpha * p.epsilon;
    let bound = 2.0 * eggs / (eggs + (p.alpha + p.d_q + p.phi * p.k_x) * p.d_v);
    RouthHurwitz {
        a,
        b1,
        b2: a[4],
        c1,
        quadratic_abc: mosquito_quadratic(p, p.k_x, 1.0 - 1.0 / o),
        gates: StabilityGates {
            r0_squared_below_one: r0_squared(p) < 1.0,
            c1_positive: c1 > 0.0,
            mosquito_gate: o > bound,
        },
    }
}

/// Factors of the characteristic polynomial at a disease-free equilibrium,
/// each highest degree first. Their roots are the Jacobian eigenvalues.
pub fn disease_free_characteristic_factors(
    kind: EquilibriumKind,
    params: &ModelParams,
) -> Result<Vec<Vec<f64>>> {
    let p: &ParamSet = params;
    let (quartic, _, _) = infection_quartic(p);
    let (predator, quadratic) = match kind {
        EquilibriumKind::E1 => (vec![1.0, -p.rho], mosquito_quadratic(p, 0.0, 0.0)),
        EquilibriumKind::E2 => (vec![1.0, p.rho], mosquito_quadratic(p, p.k_x, 0.0)),
        EquilibriumKind::E3 => {
            let fill = 1.0 - 1.0 / threshold_o0(p);
            (
                vec![1.0, -(p.rho + fill * p.psi * p.k_q)],
                mosquito_quadratic(p, 0.0, fill),
            )
        }
        EquilibriumKind::E4 => {
            let fill = 1.0 - 1.0 / threshold_o(p);
            (
                vec![1.0, p.rho + fill * p.psi * p.k_q],
                mosquito_quadratic(p, p.k_x, fill),
            )
        }
        _ => return Err(Error::Domain("characteristic factors exist for E1-E4 only")),
    };
    Ok(vec![
        predator,
        vec![1.0, p.d_h],
        vec![1.0, p.d_h],
        quadratic.to_vec(),
        quartic.to_vec(),
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Stable,
    Unstable,
    Marginal,
}

impl Classification {
    pub const fn name(self) -> &'static str {
        match self {
            Classification::Stable => "stable",
            Classification::Unstable => "unstable",
            Classification::Marginal => "marginal",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub r0: f64,
    pub o0: f64,
    pub o: f64,
}

impl Thresholds {
    pub fn of(p: &ParamSet) -> Thresholds {
        Thresholds {
            r0: r0(p),
            o0: threshold_o0(p),
            o: threshold_o(p),
        }
    }
}

/// Outcome of comparing the eigenvalue verdict with the analytic stability
/// result for the equilibrium.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TheoremCheck {
    pub predicted: Classification,
    /// `None` when the eigenvalue verdict is marginal.
    pub agrees: Option<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub kind: EquilibriumKind,
    /// Descending by real part.
    pub eigenvalues: Vec<C64>,
    pub max_real_part: f64,
    pub classification: Classification,
    pub rh: Option<RouthHurwitz>,
    pub thresholds: Thresholds,
    pub theorem: Option<TheoremCheck>,
    pub notes: Vec<String>,
}

pub fn classify_spectrum(eigenvalues: &[C64]) -> (f64, Classification) {
    let max_re = eigenvalues.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    let radius = eigenvalues.iter().map(|z| linalg::abs(*z)).fold(0.0, f64::max);
    let class = if max_re.abs() <= MARGINAL_TOLERANCE * radius {
        Classification::Marginal
    } else if max_re < 0.0 {
        Classification::Stable
    } else {
        Classification::Unstable
    };
    (max_re, class)
}

/// Eigenvalue classification of an existing equilibrium, cross-checked
/// against the analytic conditions for E1-E4.
pub fn classify(eq: &EquilibriumPoint, params: &ModelParams) -> Result<StabilityReport> {
    let state = match (eq.exists, eq.state) {
        (true, Some(s)) => s,
        _ => {
            return Err(Error::NonExistent {
                kind: eq.kind.name(),
                reason: "cannot classify an equilibrium that does not exist".into(),
            })
        }
    };
    let j = jacobian(&state, params)?;
    let eigenvalues = linalg::eigenvalues(&j)?;
    let (max_real_part, classification) = classify_spectrum(&eigenvalues);

    let p: &ParamSet = params;
    let mut notes = Vec::new();
    let (rh, predicted) = match eq.kind {
        EquilibriumKind::E1 | EquilibriumKind::E3 => (None, Some(Classification::Unstable)),
        EquilibriumKind::E2 => {
            let rh = routh_hurwitz_e2(params);
            let pred = if rh.gates.all() {
                Classification::Stable
            } else {
                Classification::Unstable
            };
            (Some(rh), Some(pred))
        }
        EquilibriumKind::E4 => {
            let rh = routh_hurwitz_e4(params);
            let pred = if rh.gates.all() {
                Classification::Stable
            } else {
                Classification::Unstable
            };
            (Some(rh), Some(pred))
        }
        _ => (None, None),
    };
    if eq.kind == EquilibriumKind::E3 {
        let fill = 1.0 - 1.0 / threshold_o0(p);
        notes.push(format!(
            "predator invasion eigenvalue rho + (1 - 1/O_0) psi K_q = {:.6}; dropping psi K_q would give {:.6}",
            p.rho + fill * p.psi * p.k_q,
            p.rho + fill
        ));
    }
    let theorem = predicted.map(|predicted| TheoremCheck {
        predicted,
        agrees: (classification != Classification::Marginal).then_some(classification == predicted),
    });
    if let Some(TheoremCheck {
        agrees: Some(false),
        predicted,
    }) = theorem
    {
        notes.push(format!(
            "eigenvalues give {} but the analytic conditions predict {}",
            classification.name(),
            predicted.name()
        ));
    }

    Ok(StabilityReport {
        kind: eq.kind,
        eigenvalues,
        max_real_part,
        classification,
        rh,
        thresholds: Thresholds::of(p),
        theorem,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibria::{boundary_equilibrium, EquilibriumKind};
    use crate::model::rhs;
    use crate::params::ParamName;

    fn fd_jacobian(s: &StateVector, p: &ModelParams) -> Matrix9 {
        let mut j = Matrix9::zeros();
        let x = s.to_array();
        for c in 0..9 {
            let h = f64::max(1e-6, 1e-6 * x[c].abs());
            let mut xp = x;
            let mut xm = x;
            xp[c] += h;
            xm[c] -= h;
            let fp = rhs(&StateVector::from_array(xp), p).unwrap();
            let fm = rhs(&StateVector::from_array(xm), p).unwrap();
            for r in 0..9 {
                j[(r, c)] = (fp[r] - fm[r]) / (2.0 * h);
            }
        }
        j
    }

    #[test]
    fn jacobian_matches_finite_differences_at_interior_state() {
        let p = ModelParams::table1();
        for g0 in [0.0, 20.0, 600.0] {
            let s = StateVector::reference_initial(g0);
            let j = jacobian(&s, &p).unwrap();
            let fd = fd_jacobian(&s, &p);
            for r in 0..9 {
                for c in 0..9 {
                    let (a, b) = (j[(r, c)], fd[(r, c)]);
                    assert!(
                        (a - b).abs() <= 1e-6 * (1.0 + a.abs()),
                        "({r},{c}) analytic {a} fd {b}"
                    );
                }
            }
            // R_h column: only the diagonal and the N_h coupling of the force
            // of infection
            assert_eq!(j[(R_H, R_H)], -p.d_h);
            assert_eq!(j[(R_H, I_H)], p.theta);
        }
    }

    #[test]
    fn predator_entry_at_boundary_equilibria() {
        let p = ModelParams::table1();
        let e1 = boundary_equilibrium(EquilibriumKind::E1, &p).unwrap();
        let e2 = boundary_equilibrium(EquilibriumKind::E2, &p).unwrap();
        assert_eq!(jacobian(&e1.state.unwrap(), &p).unwrap()[(8, 8)], 0.37);
        assert_eq!(jacobian(&e2.state.unwrap(), &p).unwrap()[(8, 8)], -0.37);
    }

    #[test]
    fn jacobian_rejects_undefined_points() {
        let p = ModelParams::table1();
        let s = StateVector {
            s_h: 10.0,
            i_h: 3.0,
            ..Default::default()
        };
        assert!(jacobian(&s, &p).is_err());
        assert!(jacobian(&StateVector::default(), &p).is_err());
    }

    #[test]
    fn minus_sigma_inverse_closed_form() {
        let p = ModelParams::table1();
        let ngm = ngm_r0(&p).unwrap();
        let a = p.a_factor();
        let b = p.b_factor();
        let w = p.d_iv + p.d_v;
        let z = p.d_v + p.nu_v;
        #[rustfmt::skip]
        let expected = Matrix4::new(
            1.0 / b,               0.0,     0.0,                0.0,
            p.nu_h / (a * b),      1.0 / a, 0.0,                0.0,
            0.0,                   0.0,     1.0 / z,            0.0,
            0.0,                   0.0,     p.nu_v / (w * z),   1.0 / w,
        );
        for (x, y) in ngm.minus_sigma_inv.iter().zip(expected.iter()) {
            assert!((x - y).abs() <= 1e-12 * (1.0 + y.abs()));
        }
        assert!((ngm.minus_sigma_inv[(0, 0)] - 1.0 / (p.d_h + p.nu_h - p.p * p.b_h)).abs() < 1e-12);
        assert!((ngm.r0 - r0(&p)).abs() <= 1e-10 * r0(&p));
        let silent = p.with(ParamName::AV, 0.0).unwrap();
        assert_eq!(ngm_r0(&silent).unwrap().r0, 0.0);
    }

    #[test]
    fn routh_hurwitz_constants() {
        let p = ModelParams::table1();
        let rh = routh_hurwitz_e2(&p);
        let [a0, a1, a2, a3, a4] = rh.a;
        assert_eq!(a0, 1.0);
        assert_eq!(rh.b2, a4);
        // b1 is the standard (a1 a2 - a3) / a1
        assert!((rh.b1 - (a1 * a2 - a3) / a1).abs() <= 1e-12 * rh.b1.abs());
        // a4 carries the sign of 1 - R0^2
        let low = ModelParams::table1()
            .with(ParamName::AV, 0.25)
            .and_then(|p| p.with(ParamName::CVh, 0.2))
            .and_then(|p| p.with(ParamName::CHv, 0.25))
            .unwrap();
        assert!(routh_hurwitz_e2(&low).a[4] < 0.0);
        let tiny = p.with(ParamName::AV, 0.01).unwrap();
        assert!(routh_hurwitz_e2(&tiny).a[4] > 0.0);
        assert!(r0(&tiny) < 1.0);
        // quadratic constant is positive exactly when O < 1
        assert!(rh.quadratic_abc[2] > 0.0 && threshold_o(&p) < 1.0);
        let weak = p.with(ParamName::Phi, 1e-5).unwrap();
        assert!(routh_hurwitz_e2(&weak).quadratic_abc[2] < 0.0 && threshold_o(&weak) > 1.0);
    }

    #[test]
    fn e3_predator_eigenvalue() {
        let p = ModelParams::table1();
        let e3 = boundary_equilibrium(EquilibriumKind::E3, &p).unwrap();
        let report = classify(&e3, &p).unwrap();
        assert_eq!(report.classification, Classification::Unstable);
        let expected = 0.37 + (1.0 - 1.0 / threshold_o0(&p)) * 0.05 * 5000.0;
        assert!((report.max_real_part - expected).abs() < 1e-8 * expected);
        assert!((report.max_real_part - 248.1).abs() < 0.05);
        assert_eq!(report.theorem.unwrap().agrees, Some(true));
    }

    #[test]
    fn classify_refuses_missing_equilibrium() {
        let p = ModelParams::table1();
        let e4 = boundary_equilibrium(EquilibriumKind::E4, &p).unwrap();
        assert!(!e4.exists);
        assert!(classify(&e4, &p).is_err());
    }

    #[test]
    fn marginal_band() {
        let ev = [C64::new(1e-12, 0.0), C64::new(-2.0, 0.0)];
        assert_eq!(classify_spectrum(&ev).1, Classification::Marginal);
        let ev = [C64::new(-1e-3, 1.0), C64::new(-1e-3, -1.0)];
        assert_eq!(classify_spectrum(&ev).1, Classification::Stable);
    }
}
