//! Built-in parameter sets and the figure configurations derived from them.

use std::f64::consts::PI;

use crate::model::{CavityParams, DriveParams, MirrorParams, NonlinearParams, SystemParams};

/// Mechanical frequency of mirror 1 in both sets (rad/s).
pub const OMEGA_1: f64 = 2.0 * PI * 1e7;
/// Mechanical damping of both mirrors in both sets (rad/s).
pub const GAMMA_M: f64 = 2.0 * PI * 200.0;
/// Probe power used by the presets (W); far below the coupling power.
pub const PROBE_POWER: f64 = 1e-9;

fn build(power: f64, wavelength: f64, mass: f64, kappa: f64, length: f64) -> SystemParams {
    let mirror = MirrorParams { mass, omega: OMEGA_1, gamma: GAMMA_M };
    SystemParams {
        cavity: CavityParams { omega0: None, kappa, length },
        mirror1: mirror,
        mirror2: mirror,
        drive: DriveParams::from_wavelength(power, PROBE_POWER, wavelength),
        nonlinear: NonlinearParams::default(),
        g_m: None,
    }
}

/// 6 mW at 1064 nm, 12 ng mirrors, `kappa = 0.02 Omega_1`, L = 6 mm; identical mirrors.
pub fn set_a() -> SystemParams {
    build(6e-3, 1064e-9, 12e-12, 0.02 * OMEGA_1, 6e-3)
}

/// 8 mW at 512 nm, 15 ng mirrors, `kappa = 0.01 Omega_1`, L = 2 mm; identical mirrors.
pub fn set_b() -> SystemParams {
    build(8e-3, 512e-9, 15e-12, 0.01 * OMEGA_1, 2e-3)
}

/// Set A with `Omega_2 = ratio * Omega_1`.
pub fn set_a_unequal(ratio: f64) -> SystemParams {
    let mut p = set_a();
    p.mirror2.omega = ratio * OMEGA_1;
    p
}

/// Set B with `Omega_2 = ratio * Omega_1`.
pub fn set_b_unequal(ratio: f64) -> SystemParams {
    let mut p = set_b();
    p.mirror2.omega = ratio * OMEGA_1;
    p
}

/// A labelled configuration within a figure.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub params: SystemParams,
}

fn series(label: &str, params: SystemParams) -> Series {
    Series { label: label.to_string(), params }
}

/// Equal mirrors (single dip) and `Omega_2 = 1.03 Omega_1` (split window), set A.
pub fn fig2() -> Vec<Series> {
    vec![series("equal", set_a()), series("omega2_1.03", set_a_unequal(1.03))]
}

/// Base configuration and coupling ratios `g_m / g_1` for the splitting sweep.
pub fn fig4() -> (SystemParams, Vec<f64>) {
    let ratios = (0..11).map(|i| 0.5 + 0.1 * i as f64).collect();
    (set_a_unequal(1.05), ratios)
}

/// Set B: bare, OPA at `theta = 3pi/2` and at `theta = pi/2`.
pub fn fig5() -> Vec<Series> {
    let b = set_b();
    vec![
        series("bare", b),
        series("theta_3pi_2", b.with_nonlinear(4e6, 0.03, 1.5 * PI)),
        series("theta_pi_2", b.with_nonlinear(4e6, 0.04, 0.5 * PI)),
    ]
}

/// Set A: bare and nonlinear (`G = 1.5 kappa`, `eta = 0.03`, `theta = pi/2`).
pub fn fig6() -> Vec<Series> {
    let a = set_a();
    let kappa = a.cavity.kappa;
    vec![series("bare", a), series("nonlinear", a.with_nonlinear(1.5 * kappa, 0.03, 0.5 * PI))]
}

/// Set B with `Omega_2 = 1.06 Omega_1`: bare and nonlinear (`G = 1e7`, `eta = 0.09`, `theta = pi/2`).
pub fn fig7() -> Vec<Series> {
    let b = set_b_unequal(1.06);
    vec![series("bare", b), series("nonlinear", b.with_nonlinear(1e7, 0.09, 0.5 * PI))]
}
