//! Linear response of the cavity to the weak probe.
//!
//! The fluctuations are expanded to first order in the probe,
//! `da = A_- e^{-i delta t} + A_+ e^{i delta t}` (and likewise for the relative
//! and centre-of-mass coordinates `q`, `Q`), which gives four linear equations in
//! `(A_-, A_+^*, q, Q)`:
//!
//! ```text
//! (Theta + i delta) A_-  + Gamma A_+^*              + i g a_s q            = -eps_p
//!  Gamma^* A_-           + (Theta^* + i delta) A_+^* - i g a_s q            = 0
//!  hbar g a_s (A_- + A_+^*)                          + mu chi_r q + Lambda Q = 0
//!                                                      Lambda q + M chi_cm Q = 0
//! ```
//!
//! [`solve_probe_response`] solves this system directly and is the reference
//! result. [`output_field_closed_form`] is the eliminated form of the same system
//! and must agree with it to rounding error.

mod approx;

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{collective_coords, drive_amplitudes, CollectiveParams, SystemParams, HBAR};
use crate::steady_state::SteadyState;

pub use approx::{output_field_rwa, response_equal_freq_approx, response_omia_approx};

/// Largest acceptable 1-norm condition number of the equilibrated 4x4 system.
pub const CONDITION_LIMIT: f64 = 1e12;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ResponseError {
    #[error("response system singular at delta = {delta:.9e} rad/s (condition number {condition:.3e})")]
    SingularSystem { delta: f64, condition: f64 },
    #[error("closed form has a pole at delta = {delta:.9e} rad/s ({which} vanishes)")]
    PoleEncountered { delta: f64, which: &'static str },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResponseCoefficients {
    /// `Theta = -(kappa + i Delta1)`
    pub theta_coef: Complex64,
    /// `Gamma = 2 G e^{i theta} - 2 i eta a_s^2`
    pub gamma_coef: Complex64,
    /// `Lambda = mu (W1^2 - W2^2 + i delta (gamma2 - gamma1))`
    pub lambda_coef: Complex64,
    /// `chi_r = delta^2 - W_r^2 + i delta gamma_r`
    pub chi_r: Complex64,
    /// `chi_cm = delta^2 - W_cm^2 + i delta gamma_cm`
    pub chi_cm: Complex64,
    pub delta: f64,
}

pub fn response_coefficients(params: &SystemParams, state: &SteadyState, delta: f64) -> ResponseCoefficients {
    coefficients_with(params, &collective_coords(params), state, delta)
}

fn coefficients_with(
    params: &SystemParams,
    coll: &CollectiveParams,
    state: &SteadyState,
    delta: f64,
) -> ResponseCoefficients {
    let nl = &params.nonlinear;
    let (w1, w2) = (params.mirror1.omega, params.mirror2.omega);
    let (g1, g2) = (params.mirror1.gamma, params.mirror2.gamma);
    ResponseCoefficients {
        theta_coef: -Complex64::new(params.cavity.kappa, state.delta1),
        gamma_coef: Complex64::from_polar(2.0 * nl.gain_opa, nl.theta) - I * (2.0 * nl.eta * state.intensity),
        // differences of squares are factored so equal frequencies give an exact zero
        lambda_coef: coll.reduced_mass * Complex64::new((w1 - w2) * (w1 + w2), delta * (g2 - g1)),
        chi_r: susceptibility(delta, coll.omega_r, coll.gamma_r),
        chi_cm: susceptibility(delta, coll.omega_cm, coll.gamma_cm),
        delta,
    }
}

fn susceptibility(delta: f64, omega: f64, gamma: f64) -> Complex64 {
    Complex64::new((delta - omega) * (delta + omega), delta * gamma)
}

/// Sideband amplitudes and mirror response at one probe offset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeResponse {
    /// Anti-Stokes amplitude at `omega_p`.
    pub a_minus: Complex64,
    /// Stokes amplitude at `2 omega_c - omega_p` (the conjugate of the solved unknown).
    pub a_plus: Complex64,
    /// Relative-mode amplitude (m).
    pub q_amp: Complex64,
    /// Centre-of-mass amplitude (m).
    pub q_cm_amp: Complex64,
    /// `2 kappa A_- / eps_p`
    pub eps_t: Complex64,
    /// `2 kappa |A_+| / eps_p`
    pub sideband_mag: f64,
    /// `g_m a_s q / eps_p`
    pub q_norm: Complex64,
    /// `g_m a_s Q / eps_p`
    pub q_cm_norm: Complex64,
}

/// Coefficient matrix and right-hand side of the response system for unit probe drive.
pub fn response_system(params: &SystemParams, state: &SteadyState, delta: f64) -> (Matrix4<Complex64>, Vector4<Complex64>) {
    let coll = collective_coords(params);
    response_system_with(params, &coll, state, delta)
}

fn response_system_with(
    params: &SystemParams,
    coll: &CollectiveParams,
    state: &SteadyState,
    delta: f64,
) -> (Matrix4<Complex64>, Vector4<Complex64>) {
    let c = coefficients_with(params, coll, state, delta);
    let ga = params.g_m() * state.a_s;
    let force = Complex64::from(HBAR * ga);
    let zero = Complex64::new(0.0, 0.0);
    let id = I * delta;
    #[rustfmt::skip]
    let a = Matrix4::new(
        c.theta_coef + id,    c.gamma_coef,               I * ga,                     zero,
        c.gamma_coef.conj(),  c.theta_coef.conj() + id,   -I * ga,                    zero,
        force,                force,                      coll.reduced_mass * c.chi_r, c.lambda_coef,
        zero,                 zero,                       c.lambda_coef,              coll.total_mass * c.chi_cm,
    );
    let b = Vector4::new(Complex64::new(-1.0, 0.0), zero, zero, zero);
    (a, b)
}

/// Solve the four response equations directly.
///
/// The unknowns differ by some 20 orders of magnitude (photon amplitudes
/// versus metres), so rows and columns are equilibrated before the LU
/// factorisation and the condition number is judged on the equilibrated
/// matrix.
pub fn solve_probe_response(params: &SystemParams, state: &SteadyState, delta: f64) -> Result<ProbeResponse, ResponseError> {
    let coll = collective_coords(params);
    solve_with(params, &coll, state, delta)
}

pub(crate) fn solve_with(
    params: &SystemParams,
    coll: &CollectiveParams,
    state: &SteadyState,
    delta: f64,
) -> Result<ProbeResponse, ResponseError> {
    let eps_p = drive_amplitudes(params, delta).probe;
    // A zero probe still has a well-defined normalized response.
    let drive = if eps_p > 0.0 { eps_p } else { 1.0 };
    let (a, b) = response_system_with(params, coll, state, delta);
    let b = b * Complex64::from(drive);

    let mut row_scale = [0.0; 4];
    for (i, s) in row_scale.iter_mut().enumerate() {
        let m = (0..4).map(|j| a[(i, j)].norm()).fold(0.0, f64::max);
        *s = if m > 0.0 { 1.0 / m } else { 1.0 };
    }
    let mut col_scale = [0.0; 4];
    for (j, s) in col_scale.iter_mut().enumerate() {
        let m = (0..4).map(|i| a[(i, j)].norm() * row_scale[i]).fold(0.0, f64::max);
        *s = if m > 0.0 { 1.0 / m } else { 1.0 };
    }
    let scaled = Matrix4::from_fn(|i, j| a[(i, j)] * (row_scale[i] * col_scale[j]));
    let rhs = Vector4::from_fn(|i, _| b[i] * row_scale[i]);

    let lu = scaled.lu();
    let singular = |condition| ResponseError::SingularSystem { delta, condition };
    let inverse = lu.try_inverse().ok_or(singular(f64::INFINITY))?;
    let condition = one_norm(&scaled) * one_norm(&inverse);
    if !(condition <= CONDITION_LIMIT) {
        return Err(singular(condition));
    }
    let y = lu.solve(&rhs).ok_or(singular(condition))?;
    let x = Vector4::from_fn(|j, _| y[j] * col_scale[j]);

    let kappa = params.cavity.kappa;
    let ga = params.g_m() * state.a_s;
    let amp = eps_p / drive;
    let (a_minus, a_plus_conj, q, q_cm) = (x[0], x[1], x[2], x[3]);
    Ok(ProbeResponse {
        a_minus: a_minus * amp,
        a_plus: a_plus_conj.conj() * amp,
        q_amp: q * amp,
        q_cm_amp: q_cm * amp,
        eps_t: a_minus * (2.0 * kappa / drive),
        sideband_mag: 2.0 * kappa * a_plus_conj.norm() / drive,
        q_norm: q * (ga / drive),
        q_cm_norm: q_cm * (ga / drive),
    })
}

fn one_norm(m: &Matrix4<Complex64>) -> f64 {
    (0..4)
        .map(|j| (0..4).map(|i| m[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Mechanical susceptibility seen by the field, `chi = mu chi_r - Lambda^2 / (M chi_cm)`.
pub fn effective_susceptibility(coll: &CollectiveParams, c: &ResponseCoefficients) -> Option<Complex64> {
    let relative = coll.reduced_mass * c.chi_r;
    if c.lambda_coef == Complex64::new(0.0, 0.0) {
        return Some(relative);
    }
    let cm = coll.total_mass * c.chi_cm;
    if cm.norm() <= f64::EPSILON * coll.total_mass * c.delta * c.delta {
        return None;
    }
    Some(relative - c.lambda_coef * c.lambda_coef / cm)
}

/// Transmitted field from the eliminated response system:
///
/// ```text
/// eps_t = 2 kappa / d * (kappa - i (Delta1 + delta) - i f)
/// f     = hbar g^2 a_s^2 / chi
/// d     = (kappa - i delta)^2 + Delta1^2 - |Gamma|^2 + 2 (Delta1 + Im Gamma) f
/// ```
pub fn output_field_closed_form(params: &SystemParams, state: &SteadyState, delta: f64) -> Result<Complex64, ResponseError> {
    let coll = collective_coords(params);
    closed_form_with(params, &coll, state, delta)
}

pub(crate) fn closed_form_with(
    params: &SystemParams,
    coll: &CollectiveParams,
    state: &SteadyState,
    delta: f64,
) -> Result<Complex64, ResponseError> {
    let c = coefficients_with(params, coll, state, delta);
    let kappa = params.cavity.kappa;
    let d1 = state.delta1;
    let g = params.g_m();
    let pole = |which| ResponseError::PoleEncountered { delta, which };

    let coupling = HBAR * g * g * state.intensity;
    let f = if coupling == 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        let chi = effective_susceptibility(coll, &c).ok_or(pole("chi_cm"))?;
        let scale = coll.reduced_mass * (delta * delta + coll.omega_r * coll.omega_r);
        if chi.norm() <= 1e-14 * scale {
            return Err(pole("chi"));
        }
        coupling / chi
    };
    let k = Complex64::new(kappa, -delta);
    // (kappa - i delta)^2 + Delta1^2, factored to avoid cancellation near resonance
    let cavity = (k + I * d1) * (k - I * d1);
    let d = cavity - c.gamma_coef.norm_sqr() + 2.0 * (d1 + c.gamma_coef.im) * f;
    let scale = kappa * kappa + delta * delta + d1 * d1 + c.gamma_coef.norm_sqr();
    if d.norm() <= 1e-14 * scale {
        return Err(pole("d"));
    }
    Ok(2.0 * kappa / d * (Complex64::new(kappa, -(d1 + delta)) - I * f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::steady_state::solve_steady_state;
    use crate::sweep_io::presets;
    use std::f64::consts::PI;

    fn state(p: &SystemParams) -> SteadyState {
        solve_steady_state(p, p.delta0()).unwrap()[0]
    }

    #[test]
    fn bare_cavity_has_no_parametric_coupling() {
        let p = presets::set_a();
        let c = response_coefficients(&p, &state(&p), 6e7);
        assert_eq!(c.gamma_coef, Complex64::new(0.0, 0.0));
        assert_eq!(c.lambda_coef, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn quarter_turn_pump_gives_imaginary_gamma() {
        let p = presets::set_b().with_nonlinear(4e6, 0.04, PI / 2.0);
        let s = state(&p);
        let c = response_coefficients(&p, &s, 6e7);
        let expected = 2.0 * 4e6 - 2.0 * 0.04 * s.intensity;
        assert!(c.gamma_coef.re.abs() < 1e-9 * expected.abs());
        assert!((c.gamma_coef.im - expected).abs() < 1e-12 * expected.abs());
    }

    #[test]
    fn coefficients_conjugate_under_sign_flip() {
        let p = presets::set_a_unequal(1.03);
        let mut p = p;
        p.mirror2.gamma *= 1.7;
        let s = state(&p);
        for delta in [1.0e3, 6.1e7, 6.4e7, 2.3e8] {
            let c = response_coefficients(&p, &s, delta);
            let m = response_coefficients(&p, &s, -delta);
            assert_eq!(m.chi_r, c.chi_r.conj());
            assert_eq!(m.chi_cm, c.chi_cm.conj());
            assert_eq!(m.lambda_coef, c.lambda_coef.conj());
        }
    }

    #[test]
    fn empty_cavity_peak_is_two() {
        let p = presets::set_a().with_g_m(0.0);
        let s = state(&p);
        let r = solve_probe_response(&p, &s, s.delta1).unwrap();
        assert!((r.eps_t - Complex64::new(2.0, 0.0)).norm() < 1e-12);
        assert_eq!(r.a_plus, Complex64::new(0.0, 0.0));
        assert_eq!(r.q_amp, Complex64::new(0.0, 0.0));
        assert_eq!(r.q_cm_amp, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn centre_of_mass_decouples_for_identical_mirrors() {
        let p = presets::set_a();
        let s = state(&p);
        for delta in [5.9e7, 6.2832e7, 6.3e7] {
            let r = solve_probe_response(&p, &s, delta).unwrap();
            assert_eq!(r.q_cm_amp, Complex64::new(0.0, 0.0));
            assert!(r.q_amp.norm() > 0.0);
        }
    }

    #[test]
    fn centre_of_mass_follows_relative_mode() {
        let p = presets::set_b_unequal(1.06);
        let s = state(&p);
        let coll = collective_coords(&p);
        for delta in [6.0e7, 6.3e7, 6.5e7] {
            let r = solve_probe_response(&p, &s, delta).unwrap();
            let c = response_coefficients(&p, &s, delta);
            let expected = -c.lambda_coef * r.q_amp / (coll.total_mass * c.chi_cm);
            assert!((r.q_cm_amp - expected).norm() <= 1e-12 * expected.norm());
        }
    }

    #[test]
    fn closed_form_without_coupling() {
        let p = presets::set_b().with_g_m(0.0).with_nonlinear(4e6, 0.03, 1.5 * PI);
        let s = state(&p);
        let kappa = p.cavity.kappa;
        let gamma = response_coefficients(&p, &s, 0.0).gamma_coef;
        for delta in [5.0e7, 6.3e7, 7.0e7] {
            let k = Complex64::new(kappa, -delta);
            let expected = 2.0 * kappa * Complex64::new(kappa, -(s.delta1 + delta))
                / (k * k + s.delta1 * s.delta1 - gamma.norm_sqr());
            let got = output_field_closed_form(&p, &s, delta).unwrap();
            assert!((got - expected).norm() < 1e-12 * expected.norm());
        }
    }

    #[test]
    fn transparency_at_line_centre() {
        let p = presets::set_a();
        let s = state(&p);
        let e = output_field_closed_form(&p, &s, p.mean_mechanical_frequency()).unwrap();
        assert!(e.re.abs() < 0.01, "{e}");
    }

    #[test]
    fn probe_power_does_not_change_normalized_outputs() {
        let p = presets::set_a_unequal(1.03);
        let s = state(&p);
        let mut p2 = p;
        p2.drive.power_probe *= 2.0;
        let r1 = solve_probe_response(&p, &s, 6.25e7).unwrap();
        let r2 = solve_probe_response(&p2, &s, 6.25e7).unwrap();
        assert!((r1.eps_t - r2.eps_t).norm() < 1e-12 * r1.eps_t.norm());
        assert!((r1.q_norm - r2.q_norm).norm() < 1e-12 * r1.q_norm.norm());
        assert!((r2.a_minus / r1.a_minus - 2f64.sqrt()).norm() < 1e-12);
    }

    #[test]
    fn zero_probe_keeps_normalized_response() {
        let mut p = presets::set_a();
        let s = state(&p);
        let with_probe = solve_probe_response(&p, &s, 6.3e7).unwrap();
        p.drive.power_probe = 0.0;
        let r = solve_probe_response(&p, &s, 6.3e7).unwrap();
        assert_eq!(r.a_minus, Complex64::new(0.0, 0.0));
        assert!((r.eps_t - with_probe.eps_t).norm() < 1e-12);
    }

    #[test]
    fn degenerate_system_is_reported() {
        // g_m = 0 and undamped mirrors (not a valid parameter set, built by hand):
        // the relative-mode row vanishes identically at delta = W_r.
        let mut p = presets::set_a().with_g_m(0.0);
        p.mirror1.gamma = 0.0;
        p.mirror2.gamma = 0.0;
        let s = state(&p);
        let w = collective_coords(&p).omega_r;
        let err = solve_probe_response(&p, &s, w).unwrap_err();
        assert!(matches!(err, ResponseError::SingularSystem { .. }), "{err:?}");
    }
}
