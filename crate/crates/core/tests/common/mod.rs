#![allow(dead_code)]

use std::f64::consts::PI;

use rand::rngs::StdRng;
use rand::Rng;
use twomirror::model::SystemParams;
use twomirror::sweep_io::presets;

/// A valid configuration around the presets: unequal masses, frequencies and
/// dampings, arbitrary OPA phase, Kerr medium and drive detuning.
pub fn random_params(rng: &mut StdRng) -> SystemParams {
    let mut p = if rng.random_bool(0.5) { presets::set_a() } else { presets::set_b() };
    let w1 = presets::OMEGA_1;
    p.mirror1.mass = rng.random_range(5e-12..30e-12);
    p.mirror2.mass = rng.random_range(5e-12..30e-12);
    p.mirror2.omega = w1 * rng.random_range(0.9..1.1);
    p.mirror1.gamma = 2.0 * PI * rng.random_range(50.0..1000.0);
    p.mirror2.gamma = 2.0 * PI * rng.random_range(50.0..1000.0);
    p.cavity.kappa = w1 * rng.random_range(0.005..0.05);
    p.drive.power_coupling = rng.random_range(1e-3..1e-2);
    let kappa = p.cavity.kappa;
    p = p.with_nonlinear(
        rng.random_range(0.0..0.4) * kappa,
        rng.random_range(0.0..0.1),
        rng.random_range(0.0..2.0 * PI),
    );
    p = p.with_g_m(p.g_reference() * rng.random_range(0.3..2.0));
    let wm = p.mean_mechanical_frequency();
    p.with_delta0(wm * rng.random_range(0.8..1.2))
}

/// Probe offsets spread over both sidebands and the window region.
pub fn random_deltas(rng: &mut StdRng, p: &SystemParams, n: usize) -> Vec<f64> {
    let wm = p.mean_mechanical_frequency();
    (0..n)
        .map(|k| {
            let x = if k % 4 == 0 { rng.random_range(-1.5..1.5) } else { rng.random_range(0.85..1.15) };
            wm * x
        })
        .collect()
}

pub const HBAR: f64 = 1.054571817e-34;

/// `I [(D0 + 2 eta I - 2 G sin)^2 + (kappa - 2 G cos)^2] - eps^2`, spelled out
/// from the raw parameters.
pub fn oracle_residual(p: &SystemParams, d0: f64, i: f64) -> f64 {
    let eps2 = 2.0 * p.cavity.kappa * p.drive.power_coupling / (HBAR * p.drive.omega_c);
    let nl = &p.nonlinear;
    let det = d0 + 2.0 * nl.eta * i - 2.0 * nl.gain_opa * nl.theta.sin();
    let loss = p.cavity.kappa - 2.0 * nl.gain_opa * nl.theta.cos();
    i * (det * det + loss * loss) - eps2
}

pub fn oracle_roots(p: &SystemParams, d0: f64) -> Vec<f64> {
    let eps2 = 2.0 * p.cavity.kappa * p.drive.power_coupling / (HBAR * p.drive.omega_c);
    let nl = &p.nonlinear;
    let loss = p.cavity.kappa - 2.0 * nl.gain_opa * nl.theta.cos();
    // every root satisfies I loss^2 <= eps^2
    let hi = 1.01 * eps2 / (loss * loss);
    let n = 100_000;
    let f = |i: f64| oracle_residual(p, d0, i);
    let mut roots = Vec::new();
    let mut prev = (0.0, f(0.0));
    for k in 1..=n {
        let x = hi * k as f64 / n as f64;
        let fx = f(x);
        if fx == 0.0 || fx.signum() != prev.1.signum() {
            let (mut a, mut b) = (prev.0, x);
            let fa = prev.1;
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if (f(m) > 0.0) == (fa > 0.0) {
                    a = m;
                } else {
                    b = m;
                }
            }
            roots.push(0.5 * (a + b));
        }
        prev = (x, fx);
    }
    roots
}

pub fn random_steady_draw(rng: &mut StdRng) -> SystemParams {
    let mut p = if rng.random_bool(0.5) { presets::set_a() } else { presets::set_b() };
    let kappa = p.cavity.kappa;
    p.drive.power_coupling = rng.random_range(1e-3..1e-2);
    let theta = rng.random_range(0.0..2.0 * PI);
    let gain = rng.random_range(0.0..0.45) * kappa;
    // log-uniform Kerr strength covering both the single-root and folded regimes
    let eta = 10f64.powf(rng.random_range(-6.0..-2.0));
    p = p.with_nonlinear(gain, eta, theta);
    p.with_delta0(rng.random_range(-20.0..20.0) * kappa)
}
