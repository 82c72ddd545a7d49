//! Classical steady state of the driven cavity.
//!
//! With the intracavity amplitude taken real and positive, the mean-field
//! equations reduce to a fixed point for the intensity `I = a_s^2`:
//!
//! ```text
//! I [ (Delta0 + 2 eta I - 2 G sin(theta))^2 + (kappa - 2 G cos(theta))^2 ] = eps_c^2
//! ```
//!
//! a cubic in `I` (linear when `eta = 0`). The radiation-pressure shift of the
//! mirrors is part of `Delta0` by definition and is not added again; the
//! displacements are still reported for diagnostics.
//!
//! Expanding in the effective detuning instead of `I` is sometimes described
//! as a fifth-order problem; the substitution above is exact and gives a cubic.
//! [`Polynomial::roots`] handles any degree, so a different expansion would
//! slot in unchanged.

mod polynomial;
mod stability;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{coupling_amplitude, ModelError, SystemParams, HBAR};
use crate::Warning;

pub use polynomial::Polynomial;
pub use stability::{drift_matrix, drift_eigenvalues, linear_stability};

/// Relative residual required of every accepted root.
pub const RESIDUAL_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SteadyStateError {
    #[error("no physical (real, non-negative) steady-state intensity; check drive and detuning")]
    NoPhysicalRoot,
    #[error("root polishing failed: relative residual {residual:.3e} at I = {intensity:.6e}")]
    ToleranceNotMet { intensity: f64, residual: f64 },
    #[error("eigenvalue solver did not converge")]
    EigenSolverFailure,
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteadyState {
    /// Real, non-negative intracavity amplitude.
    pub a_s: f64,
    /// Mean photon number `a_s^2`.
    pub intensity: f64,
    /// Mirror equilibrium displacements (m); `q1_s <= 0 <= q2_s`.
    pub q1_s: f64,
    pub q2_s: f64,
    pub delta0: f64,
    /// `Delta = Delta0 + 2 eta I`
    pub delta_eff: f64,
    /// `Delta1 = Delta0 + 4 eta I`, the detuning seen by fluctuations.
    pub delta1: f64,
    /// Number of admissible roots found at this drive.
    pub n_real_roots: usize,
    pub stable: Option<bool>,
}

impl SteadyState {
    pub fn is_multistable(&self) -> bool {
        self.n_real_roots > 1
    }

    fn from_intensity(params: &SystemParams, delta0: f64, intensity: f64, n_real_roots: usize) -> Self {
        let g = params.g_m();
        let eta = params.nonlinear.eta;
        let force = HBAR * g * intensity;
        let m1 = &params.mirror1;
        let m2 = &params.mirror2;
        SteadyState {
            a_s: intensity.sqrt(),
            intensity,
            q1_s: -force / (m1.mass * m1.omega * m1.omega),
            q2_s: force / (m2.mass * m2.omega * m2.omega),
            delta0,
            delta_eff: delta0 + 2.0 * eta * intensity,
            delta1: delta0 + 4.0 * eta * intensity,
            n_real_roots,
            stable: None,
        }
    }
}

/// Detuning and loss of the OPA-dressed cavity, `(Delta0 - 2G sin, kappa - 2G cos)`.
fn dressed_terms(params: &SystemParams, delta0: f64) -> (f64, f64) {
    let nl = &params.nonlinear;
    let (s, c) = nl.theta.sin_cos();
    (delta0 - 2.0 * nl.gain_opa * s, params.cavity.kappa - 2.0 * nl.gain_opa * c)
}

/// `4 eta^2 I^3 + 4 eta u I^2 + (u^2 + v^2) I - eps_c^2`, trimmed to the true degree.
pub fn intensity_polynomial(params: &SystemParams, delta0: f64) -> Polynomial {
    let eps = coupling_amplitude(params);
    let eta = params.nonlinear.eta;
    let (u, v) = dressed_terms(params, delta0);
    Polynomial::new(vec![-eps * eps, u * u + v * v, 4.0 * eta * u, 4.0 * eta * eta])
}

/// Left side minus right side of the fixed-point equation, written out directly.
pub fn fixed_point_residual(params: &SystemParams, delta0: f64, intensity: f64) -> f64 {
    let eps = coupling_amplitude(params);
    let (u, v) = dressed_terms(params, delta0);
    let shifted = u + 2.0 * params.nonlinear.eta * intensity;
    intensity * (shifted * shifted + v * v) - eps * eps
}

fn is_real(z: num_complex::Complex64) -> bool {
    z.im.abs() < 1e-8 * z.re.abs() + 1e-20
}

/// Every admissible steady state at this detuning, sorted by intensity.
pub fn solve_steady_state(params: &SystemParams, delta0: f64) -> Result<Vec<SteadyState>, SteadyStateError> {
    let eps = coupling_amplitude(params);
    if eps == 0.0 {
        return Ok(vec![SteadyState::from_intensity(params, delta0, 0.0, 1)]);
    }
    let poly = intensity_polynomial(params, delta0);
    let roots = poly.roots().ok_or(SteadyStateError::EigenSolverFailure)?;
    let target = eps * eps;

    let mut intensities = Vec::new();
    for z in roots.into_iter().filter(|z| is_real(*z)) {
        let polished = poly.polish(z.re, 4);
        if polished < 0.0 {
            continue;
        }
        let residual = fixed_point_residual(params, delta0, polished).abs() / target;
        if residual >= RESIDUAL_TOL {
            return Err(SteadyStateError::ToleranceNotMet { intensity: polished, residual });
        }
        intensities.push(polished);
    }
    if intensities.is_empty() {
        return Err(SteadyStateError::NoPhysicalRoot);
    }
    intensities.sort_by(f64::total_cmp);
    let n = intensities.len();
    Ok(intensities
        .into_iter()
        .map(|i| SteadyState::from_intensity(params, delta0, i, n))
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub state: SteadyState,
    pub warning: Option<Warning>,
}

/// Branch policy: the lowest-intensity root, i.e. the branch continuously
/// connected to low drive power, with a warning when other roots exist.
pub fn select_operating_state(states: &[SteadyState]) -> Option<Selection> {
    let lowest = states.iter().min_by(|a, b| a.intensity.total_cmp(&b.intensity))?;
    let warning = (states.len() > 1).then_some(Warning::Multistable { roots: states.len() });
    Some(Selection { state: *lowest, warning })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SteadyOptions {
    /// Run the drift-matrix eigenvalue check. Off by default.
    pub stability_check: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperatingPoint {
    pub state: SteadyState,
    pub warnings: Vec<Warning>,
}

/// Validate, solve at the configured detuning, select a branch and
/// optionally check stability. Instability is reported as a warning.
pub fn operating_point(params: &SystemParams, opts: &SteadyOptions) -> Result<OperatingPoint, SteadyStateError> {
    let mut warnings = params.validate()?;
    let states = solve_steady_state(params, params.delta0())?;
    let Selection { mut state, warning } =
        select_operating_state(&states).ok_or(SteadyStateError::NoPhysicalRoot)?;
    warnings.extend(warning);
    if opts.stability_check {
        match drift_eigenvalues(params, &state) {
            Ok(eigs) => {
                let max_re = eigs.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
                let stable = max_re < 0.0;
                state.stable = Some(stable);
                if !stable {
                    warnings.push(Warning::Unstable { max_real_part: max_re });
                }
            }
            Err(e) => warnings.push(Warning::StabilityUnknown { reason: e.to_string() }),
        }
    }
    Ok(OperatingPoint { state, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweep_io::presets;
    use std::f64::consts::PI;

    #[test]
    fn zero_drive_gives_empty_cavity() {
        let mut p = presets::set_a();
        p.drive.power_coupling = 0.0;
        let states = solve_steady_state(&p, p.delta0()).unwrap();
        assert_eq!(states.len(), 1);
        assert_eq!(states[0].a_s, 0.0);
        assert_eq!(states[0].q1_s, 0.0);
        assert_eq!(states[0].q2_s, 0.0);
    }

    #[test]
    fn bare_cavity_is_lorentzian() {
        let p = presets::set_a();
        let d0 = p.delta0();
        let poly = intensity_polynomial(&p, d0);
        assert_eq!(poly.degree(), 1);
        let states = solve_steady_state(&p, d0).unwrap();
        assert_eq!(states.len(), 1);
        let eps = coupling_amplitude(&p);
        let kappa = p.cavity.kappa;
        let expected = eps / (d0 * d0 + kappa * kappa).sqrt();
        assert!((states[0].a_s - expected).abs() < 1e-14 * expected);
        assert!(states[0].q1_s < 0.0 && states[0].q2_s > 0.0);
    }

    #[test]
    fn leading_coefficient_is_four_eta_squared() {
        let p = presets::set_b().with_nonlinear(4e6, 0.03, 1.5 * PI);
        let poly = intensity_polynomial(&p, p.delta0());
        assert_eq!(poly.degree(), 3);
        assert_eq!(poly.leading(), 4.0 * 0.03 * 0.03);
    }

    #[test]
    fn opa_at_half_kappa_cancels_loss() {
        let mut p = presets::set_a();
        let kappa = p.cavity.kappa;
        p.nonlinear.gain_opa = kappa / 2.0;
        let d0 = p.delta0();
        let states = solve_steady_state(&p, d0).unwrap();
        let eps = coupling_amplitude(&p);
        let expected = eps * eps / (d0 * d0 + (kappa - 2.0 * p.nonlinear.gain_opa).powi(2));
        assert!((states[0].intensity - expected).abs() < 1e-13 * expected);
        let bare = eps * eps / (d0 * d0 + kappa * kappa);
        assert!(states[0].intensity > bare);
    }

    #[test]
    fn kerr_bistability_is_flagged() {
        // blue-detuned drive on a strong Kerr medium folds the response
        let mut p = presets::set_a();
        p.nonlinear.eta = 5e-4;
        let kappa = p.cavity.kappa;
        let d0 = -10.0 * kappa;
        let states = solve_steady_state(&p, d0).unwrap();
        assert_eq!(states.len(), 3, "{states:?}");
        assert!(states.windows(2).all(|w| w[0].intensity < w[1].intensity));
        let sel = select_operating_state(&states).unwrap();
        assert_eq!(sel.state.intensity, states[0].intensity);
        assert_eq!(sel.warning, Some(Warning::Multistable { roots: 3 }));
    }

    #[test]
    fn single_state_selection_has_no_warning() {
        let p = presets::set_a();
        let states = solve_steady_state(&p, p.delta0()).unwrap();
        let sel = select_operating_state(&states).unwrap();
        assert_eq!(sel.state, states[0]);
        assert!(sel.warning.is_none());
        assert!(select_operating_state(&[]).is_none());
    }

    #[test]
    fn operating_point_stability_is_optional() {
        let p = presets::set_a();
        let op = operating_point(&p, &SteadyOptions::default()).unwrap();
        assert_eq!(op.state.stable, None);
        let op = operating_point(&p, &SteadyOptions { stability_check: true }).unwrap();
        assert_eq!(op.state.stable, Some(true));
        assert!(op.warnings.is_empty());
    }
}
