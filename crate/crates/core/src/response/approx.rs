//! Rotating-wave and limiting-case forms of the transmitted field.
//!
//! These drop the Stokes sideband and are only meaningful for a bare cavity in
//! the resolved-sideband regime driven near the red sideband. None of them
//! checks its preconditions; callers compare them against the full solution.

use num_complex::Complex64;

use super::{coefficients_with, effective_susceptibility, I};
use crate::model::{collective_coords, SystemParams, HBAR};
use crate::steady_state::SteadyState;

/// `eps_t ~ 2 kappa / (kappa + i (Delta0 - delta) + i hbar g^2 a_s^2 / chi(delta))`
pub fn output_field_rwa(params: &SystemParams, state: &SteadyState, delta: f64) -> Complex64 {
    let kappa = params.cavity.kappa;
    let g = params.g_m();
    let coupling = HBAR * g * g * state.intensity;
    let mut denom = Complex64::new(kappa, state.delta0 - delta);
    if coupling != 0.0 {
        let coll = collective_coords(params);
        let c = coefficients_with(params, &coll, state, delta);
        if let Some(chi) = effective_susceptibility(&coll, &c) {
            denom += I * coupling / chi;
        }
    }
    2.0 * kappa / denom
}

/// Identical mirrors, `Delta0 = omega_m`, `x = delta - omega_m`:
///
/// ```text
/// eps_t ~ 2 kappa / (kappa - i x + beta / (gamma_m / 2 - i x)),   beta = hbar g^2 a_s^2 / (2 mu omega_m)
/// ```
///
/// `beta` is the squared effective optomechanical coupling (rad^2/s^2); the
/// single-mirror result with mass `2 mu`.
pub fn response_equal_freq_approx(params: &SystemParams, state: &SteadyState, x: f64) -> Complex64 {
    let kappa = params.cavity.kappa;
    let coll = collective_coords(params);
    let omega_m = params.mean_mechanical_frequency();
    let gamma_m = 0.5 * (params.mirror1.gamma + params.mirror2.gamma);
    let g = params.g_m();
    let beta = HBAR * g * g * state.intensity / (2.0 * coll.reduced_mass * omega_m);
    let mech = Complex64::new(0.5 * gamma_m, -x);
    2.0 * kappa / (Complex64::new(kappa, -x) + beta / mech)
}

/// Unequal frequencies, equal dampings, `Delta0 = omega_m = (W1 + W2) / 2`:
///
/// ```text
/// eps_t ~ 2 kappa / (kappa - i x + 2 i beta / (d1 x + b1 - (Lambda^2 / mu M) / (d2 x + b2)))
/// ```
///
/// with `beta = hbar g^2 a_s^2 / 2 mu`, `d1 = omega_m + W_r`,
/// `b1 = omega_m^2 - W_r^2 + i omega_m gamma_m` and the same for the centre-of-mass
/// mode. The denominator is cubic in `x`; for `W1 = W2` it reduces exactly to
/// [`response_equal_freq_approx`].
pub fn response_omia_approx(params: &SystemParams, state: &SteadyState, x: f64) -> Complex64 {
    let kappa = params.cavity.kappa;
    let coll = collective_coords(params);
    let (w1, w2) = (params.mirror1.omega, params.mirror2.omega);
    let omega_m = params.mean_mechanical_frequency();
    let gamma_m = 0.5 * (params.mirror1.gamma + params.mirror2.gamma);
    let g = params.g_m();
    let beta = HBAR * g * g * state.intensity / (2.0 * coll.reduced_mass);
    let lambda = coll.reduced_mass * (w1 - w2) * (w1 + w2);

    let linear = |omega: f64| {
        Complex64::new(
            (omega_m + omega) * x + (omega_m - omega) * (omega_m + omega),
            omega_m * gamma_m,
        )
    };
    let cm = linear(coll.omega_cm);
    let mut mech = linear(coll.omega_r);
    if lambda != 0.0 {
        mech -= lambda * lambda / (coll.reduced_mass * coll.total_mass) / cm;
    }
    2.0 * kappa / (Complex64::new(kappa, -x) + 2.0 * I * beta / mech)
}
