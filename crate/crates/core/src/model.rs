//! Physical parameters of the two-mirror cavity.
//!
//! Everything is SI and every frequency is an angular frequency in rad/s.
//! Unit conversion happens once, when a config file is loaded
//! (see [`crate::sweep_io::config`]).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::Warning;

/// Reduced Planck constant (CODATA 2018), J s.
pub const HBAR: f64 = 1.054571817e-34;
/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("{field} must be finite and strictly positive, got {value}")]
    NotPositive { field: &'static str, value: f64 },
    #[error("{field} must be finite and non-negative, got {value}")]
    Negative { field: &'static str, value: f64 },
    #[error("mirror {mirror} is not underdamped (gamma = {gamma}, omega = {omega})")]
    Overdamped { mirror: u8, gamma: f64, omega: f64 },
    #[error("cavity decay rate {kappa} must be below the optical frequency {omega0}")]
    KappaTooLarge { kappa: f64, omega0: f64 },
    #[error("OPA phase {0} outside [0, 2pi)")]
    ThetaOutOfRange(f64),
    #[error("{field} must be finite, got {value}")]
    NotFinite { field: &'static str, value: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavityParams {
    /// Bare optical resonance (rad/s). Informational only: the operating point is
    /// set through the detuning, never through the absolute resonance.
    pub omega0: Option<f64>,
    /// Amplitude decay rate (rad/s).
    pub kappa: f64,
    /// Cavity length without intracavity field (m).
    pub length: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MirrorParams {
    /// Effective mass (kg).
    pub mass: f64,
    /// Mechanical frequency (rad/s).
    pub omega: f64,
    /// Energy decay rate (rad/s).
    pub gamma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveParams {
    /// Coupling laser power (W).
    pub power_coupling: f64,
    /// Probe laser power (W).
    pub power_probe: f64,
    /// Coupling laser frequency (rad/s).
    pub omega_c: f64,
    /// Detuning of the coupling laser from the shifted cavity resonance (rad/s).
    /// `None` means "drive the red sideband", i.e. the mean mechanical frequency.
    pub delta0: Option<f64>,
}

impl DriveParams {
    /// Drive parameters with the coupling frequency taken from a vacuum wavelength.
    pub fn from_wavelength(power_coupling: f64, power_probe: f64, wavelength: f64) -> Self {
        DriveParams {
            power_coupling,
            power_probe,
            omega_c: 2.0 * PI * SPEED_OF_LIGHT / wavelength,
            delta0: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NonlinearParams {
    /// OPA gain G (rad/s).
    pub gain_opa: f64,
    /// Phase of the OPA pump (rad), in [0, 2pi).
    pub theta: f64,
    /// Kerr anharmonicity (rad/s).
    pub eta: f64,
}

impl NonlinearParams {
    pub fn is_bare(&self) -> bool {
        self.gain_opa == 0.0 && self.eta == 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub cavity: CavityParams,
    pub mirror1: MirrorParams,
    pub mirror2: MirrorParams,
    pub drive: DriveParams,
    #[serde(default)]
    pub nonlinear: NonlinearParams,
    /// Optomechanical coupling (rad/(s m)). `None` selects `omega_c / L`.
    pub g_m: Option<f64>,
}

impl SystemParams {
    /// Radiation-pressure coupling, defaulting to `omega_c / L`.
    pub fn g_m(&self) -> f64 {
        self.g_m.unwrap_or(self.drive.omega_c / self.cavity.length)
    }

    /// The reference coupling `omega_c / L`, independent of any override.
    pub fn g_reference(&self) -> f64 {
        self.drive.omega_c / self.cavity.length
    }

    /// `(Omega_1 + Omega_2) / 2`.
    pub fn mean_mechanical_frequency(&self) -> f64 {
        0.5 * (self.mirror1.omega + self.mirror2.omega)
    }

    /// Operating detuning: the explicit value if given, else the red sideband.
    pub fn delta0(&self) -> f64 {
        self.drive.delta0.unwrap_or_else(|| self.mean_mechanical_frequency())
    }

    /// `kappa / min(Omega_1, Omega_2)`; small values mean resolved sidebands.
    pub fn resolved_sideband_ratio(&self) -> f64 {
        self.cavity.kappa / self.mirror1.omega.min(self.mirror2.omega)
    }

    pub fn with_g_m(mut self, g_m: f64) -> Self {
        self.g_m = Some(g_m);
        self
    }

    pub fn with_delta0(mut self, delta0: f64) -> Self {
        self.drive.delta0 = Some(delta0);
        self
    }

    pub fn with_nonlinear(mut self, gain_opa: f64, eta: f64, theta: f64) -> Self {
        self.nonlinear = NonlinearParams { gain_opa, theta, eta };
        self
    }

    /// Check every invariant. Returns the non-fatal warnings on success.
    pub fn validate(&self) -> Result<Vec<Warning>, ModelError> {
        positive("cavity.kappa", self.cavity.kappa)?;
        positive("cavity.length", self.cavity.length)?;
        if let Some(omega0) = self.cavity.omega0 {
            positive("cavity.omega0", omega0)?;
            if self.cavity.kappa >= omega0 {
                return Err(ModelError::KappaTooLarge { kappa: self.cavity.kappa, omega0 });
            }
        }
        for (k, m) in [(1u8, &self.mirror1), (2u8, &self.mirror2)] {
            let (mass, omega, gamma) = if k == 1 {
                ("mirror1.mass", "mirror1.omega", "mirror1.gamma")
            } else {
                ("mirror2.mass", "mirror2.omega", "mirror2.gamma")
            };
            positive(mass, m.mass)?;
            positive(omega, m.omega)?;
            positive(gamma, m.gamma)?;
            if m.gamma >= m.omega {
                return Err(ModelError::Overdamped { mirror: k, gamma: m.gamma, omega: m.omega });
            }
        }
        non_negative("drive.power_coupling", self.drive.power_coupling)?;
        non_negative("drive.power_probe", self.drive.power_probe)?;
        positive("drive.omega_c", self.drive.omega_c)?;
        if let Some(d) = self.drive.delta0 {
            finite("drive.delta0", d)?;
        }
        non_negative("nonlinear.gain_opa", self.nonlinear.gain_opa)?;
        non_negative("nonlinear.eta", self.nonlinear.eta)?;
        let theta = self.nonlinear.theta;
        if !(theta.is_finite() && (0.0..2.0 * PI).contains(&theta)) {
            return Err(ModelError::ThetaOutOfRange(theta));
        }
        if let Some(g) = self.g_m {
            non_negative("g_m", g)?;
        }

        let mut warnings = Vec::new();
        if self.drive.power_coupling > 0.0 {
            let ratio = self.drive.power_probe / self.drive.power_coupling;
            if ratio > 0.1 {
                warnings.push(Warning::ProbeNotWeak { ratio });
            }
        } else if self.drive.power_probe > 0.0 {
            warnings.push(Warning::ProbeNotWeak { ratio: f64::INFINITY });
        }
        Ok(warnings)
    }
}

fn finite(field: &'static str, value: f64) -> Result<(), ModelError> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(ModelError::NotFinite { field, value })
    }
}

fn positive(field: &'static str, value: f64) -> Result<(), ModelError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(ModelError::NotPositive { field, value })
    }
}

fn non_negative(field: &'static str, value: f64) -> Result<(), ModelError> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(ModelError::Negative { field, value })
    }
}

/// Relative and centre-of-mass description of the two mirrors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollectiveParams {
    /// `M = m1 + m2`
    pub total_mass: f64,
    /// `mu = m1 m2 / M`
    pub reduced_mass: f64,
    pub omega_r: f64,
    pub omega_cm: f64,
    pub gamma_r: f64,
    pub gamma_cm: f64,
}

/// Collective coordinates `q = q2 - q1`, `Q = (m1 q1 + m2 q2) / M`.
///
/// Only the relative mode couples to the field; the two modes talk to each
/// other whenever the mirror frequencies or dampings differ.
pub fn collective_coords(params: &SystemParams) -> CollectiveParams {
    let (m1, m2) = (params.mirror1.mass, params.mirror2.mass);
    let (w1, w2) = (params.mirror1.omega, params.mirror2.omega);
    let (g1, g2) = (params.mirror1.gamma, params.mirror2.gamma);
    let total = m1 + m2;
    CollectiveParams {
        total_mass: total,
        reduced_mass: m1 * m2 / total,
        omega_r: ((m2 * w1 * w1 + m1 * w2 * w2) / total).sqrt(),
        omega_cm: ((m1 * w1 * w1 + m2 * w2 * w2) / total).sqrt(),
        gamma_r: (m2 * g1 + m1 * g2) / total,
        gamma_cm: (m1 * g1 + m2 * g2) / total,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveAmplitudes {
    /// `eps_c = sqrt(2 kappa P_c / (hbar omega_c))`, in s^-1.
    pub coupling: f64,
    /// `eps_p = sqrt(2 kappa P_p / (hbar omega_p))` with `omega_p = omega_c + delta`.
    pub probe: f64,
}

/// Input field amplitudes for a probe offset `delta = omega_p - omega_c`.
pub fn drive_amplitudes(params: &SystemParams, delta: f64) -> DriveAmplitudes {
    DriveAmplitudes {
        coupling: coupling_amplitude(params),
        probe: field_amplitude(params.cavity.kappa, params.drive.power_probe, params.drive.omega_c + delta),
    }
}

pub fn coupling_amplitude(params: &SystemParams) -> f64 {
    field_amplitude(params.cavity.kappa, params.drive.power_coupling, params.drive.omega_c)
}

fn field_amplitude(kappa: f64, power: f64, omega: f64) -> f64 {
    (2.0 * kappa * power / (HBAR * omega)).sqrt()
}
