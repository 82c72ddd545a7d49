use nalgebra::Matrix6;
use num_complex::Complex64;

use super::{SteadyState, SteadyStateError};
use crate::model::{SystemParams, HBAR};

/// Real drift matrix of the linearized mean-value equations around `state`.
///
/// State vector `[x, y, q1', p1', q2', p2']` with `delta a = x + i y` and mirror
/// coordinates in units of their zero-point scales, `q_k = sqrt(hbar/(m_k W_k)) q_k'`,
/// `p_k = sqrt(hbar m_k W_k) p_k'`. The rescaling is a similarity transform, so the
/// spectrum is that of the physical system, but the entries stay within a few
/// decades of each other.
pub fn drift_matrix(params: &SystemParams, state: &SteadyState) -> Matrix6<f64> {
    let kappa = params.cavity.kappa;
    let nl = &params.nonlinear;
    let gamma_coef = Complex64::from_polar(2.0 * nl.gain_opa, nl.theta)
        - Complex64::new(0.0, 2.0 * nl.eta * state.intensity);
    let (gr, gi) = (gamma_coef.re, gamma_coef.im);
    let d1 = state.delta1;
    let g = params.g_m();

    let mut a = Matrix6::zeros();
    a[(0, 0)] = -kappa + gr;
    a[(0, 1)] = d1 + gi;
    a[(1, 0)] = -d1 + gi;
    a[(1, 1)] = -kappa - gr;
    for (k, m) in [(0usize, &params.mirror1), (1usize, &params.mirror2)] {
        let (iq, ip) = (2 + 2 * k, 3 + 2 * k);
        let zpf = (HBAR / (m.mass * m.omega)).sqrt();
        let coupling = g * state.a_s * zpf;
        // mirror 1 is pushed towards negative q, mirror 2 towards positive q
        let sign = if k == 0 { -1.0 } else { 1.0 };
        a[(1, iq)] = sign * coupling;
        a[(iq, ip)] = m.omega;
        a[(ip, iq)] = -m.omega;
        a[(ip, ip)] = -m.gamma;
        a[(ip, 0)] = sign * 2.0 * coupling;
    }
    a
}

pub fn drift_eigenvalues(params: &SystemParams, state: &SteadyState) -> Result<Vec<Complex64>, SteadyStateError> {
    let schur = nalgebra::linalg::Schur::try_new(drift_matrix(params, state), f64::EPSILON, 100_000)
        .ok_or(SteadyStateError::EigenSolverFailure)?;
    Ok(schur.complex_eigenvalues().iter().copied().collect())
}

/// True iff every drift eigenvalue has a negative real part.
pub fn linear_stability(params: &SystemParams, state: &SteadyState) -> Result<bool, SteadyStateError> {
    Ok(drift_eigenvalues(params, state)?.iter().all(|z| z.re < 0.0))
}
