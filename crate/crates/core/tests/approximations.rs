//! Limiting-case formulas against the full response.
//!
//! Pointwise relative error is not a usable metric inside the transparency
//! dip: there `|eps_t|` is of order `2 / C`, and the full solution carries an
//! optical-spring shift of the dip (about 2000 rad/s for set A, larger than
//! `gamma_m`) that none of the approximations contain. The strict pointwise
//! checks are kept below as ignored tests; the active checks measure the error
//! against the empty-cavity peak value 2, or away from the resonances.

use num_complex::Complex64;
use twomirror::analysis::{find_extrema_in, window_extrema, Extremum, ExtremumKind, Quantity};
use twomirror::model::SystemParams;
use twomirror::response::{output_field_rwa, response_equal_freq_approx, response_omia_approx, solve_probe_response};
use twomirror::steady_state::{operating_point, SteadyOptions, SteadyState};
use twomirror::sweep_io::{frequency_sweep, presets, DeltaGrid, SweepOptions};

fn state(p: &SystemParams) -> SteadyState {
    operating_point(p, &SteadyOptions::default()).unwrap().state
}

struct Comparison {
    x: Vec<f64>,
    abs: Vec<f64>,
    rel: Vec<f64>,
}

fn compare(p: &SystemParams, half_width: f64, approx: impl Fn(&SteadyState, f64) -> Complex64) -> Comparison {
    let s = state(p);
    let wm = p.mean_mechanical_frequency();
    let n = 4001;
    let x: Vec<f64> = (0..n).map(|k| -half_width + 2.0 * half_width * k as f64 / (n - 1) as f64).collect();
    let (mut abs, mut rel) = (Vec::new(), Vec::new());
    for &x in &x {
        let full = solve_probe_response(p, &s, wm + x).unwrap().eps_t;
        let e = (approx(&s, x) - full).norm();
        abs.push(e);
        rel.push(e / full.norm());
    }
    Comparison { x, abs, rel }
}

fn max(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, f64::max)
}

fn rwa(p: &SystemParams) -> impl Fn(&SteadyState, f64) -> Complex64 + '_ {
    move |s, x| output_field_rwa(p, s, p.mean_mechanical_frequency() + x)
}

#[test]
fn rwa_within_five_linewidths() {
    for p in [presets::set_a(), presets::set_a_unequal(1.03)] {
        let c = compare(&p, 5.0 * p.cavity.kappa, rwa(&p));
        let e = max(c.abs.iter().map(|a| a / 2.0));
        assert!(e < 0.05, "{e}");
    }
}

#[test]
fn rwa_places_the_dip_within_one_step() {
    let p = presets::set_a();
    let s = state(&p);
    let spec = frequency_sweep(&p, &DeltaGrid::default(), &SweepOptions::default()).unwrap();
    let full = window_extrema(&spec, Quantity::ReEpsT).unwrap();
    let rwa: Vec<f64> = spec.delta_grid.iter().map(|&d| output_field_rwa(&p, &s, d).re).collect();
    let approx = find_extrema_in(&spec.delta_grid, &rwa).unwrap();
    let dip = |e: &[Extremum]| {
        e.iter().filter(|x| x.kind == ExtremumKind::Minimum).min_by(|a, b| a.value.total_cmp(&b.value)).unwrap().index
    };
    assert!(dip(&full).abs_diff(dip(&approx)) <= 1);
}

#[test]
fn equal_frequency_form_near_line_centre() {
    let p = presets::set_a();
    let c = compare(&p, 0.5 * p.cavity.kappa, |s, x| response_equal_freq_approx(&p, s, x));
    let e = max(c.abs.iter().map(|a| a / 2.0));
    assert!(e < 0.1, "{e}");
}

#[test]
fn cubic_form_away_from_the_resonances() {
    let p = presets::set_a_unequal(1.03);
    let kappa = p.cavity.kappa;
    let wm = p.mean_mechanical_frequency();
    let res = [p.mirror1.omega - wm, p.mirror2.omega - wm];
    let c = compare(&p, 3.0 * kappa, |s, x| response_omia_approx(&p, s, x));
    let e = max(c.x.iter().zip(&c.rel).filter(|(x, _)| res.iter().all(|r| (**x - r).abs() > 0.2 * kappa)).map(|(_, e)| *e));
    assert!(e < 0.1, "{e}");
}

#[test]
fn cubic_form_has_dips_near_both_mirror_frequencies() {
    let p = presets::set_a_unequal(1.03);
    let s = state(&p);
    let kappa = p.cavity.kappa;
    let wm = p.mean_mechanical_frequency();
    let x: Vec<f64> = (0..4001).map(|k| (-3.0 + 6.0 * k as f64 / 4000.0) * kappa).collect();
    let re: Vec<f64> = x.iter().map(|&x| response_omia_approx(&p, &s, x).re).collect();
    let minima: Vec<f64> =
        find_extrema_in(&x, &re).unwrap().into_iter().filter(|e| e.kind == ExtremumKind::Minimum).map(|e| e.position).collect();
    assert_eq!(minima.len(), 2);
    assert!((minima[0] - (p.mirror1.omega - wm)).abs() < 0.1 * kappa);
    assert!((minima[1] - (p.mirror2.omega - wm)).abs() < 0.1 * kappa);
}

#[test]
#[ignore = "pointwise relative error diverges inside the dip; see module docs"]
fn rwa_pointwise_relative_error() {
    let p = presets::set_a();
    let e = max(compare(&p, 5.0 * p.cavity.kappa, rwa(&p)).rel);
    assert!(e < 0.05, "{e}");
}

#[test]
#[ignore = "pointwise relative error diverges inside the dip; see module docs"]
fn equal_frequency_pointwise_relative_error() {
    let p = presets::set_a();
    let e = max(compare(&p, 0.5 * p.cavity.kappa, |s, x| response_equal_freq_approx(&p, s, x)).rel);
    assert!(e < 0.1, "{e}");
}

#[test]
#[ignore = "the cubic form shifts the coupled normal modes by about (W2 - W1)^2 / omega_m"]
fn cubic_form_pointwise_relative_error() {
    let p = presets::set_a_unequal(1.03);
    let e = max(compare(&p, 3.0 * p.cavity.kappa, |s, x| response_omia_approx(&p, s, x)).rel);
    assert!(e < 0.1, "{e}");
}

#[test]
fn dips_sit_on_the_two_photon_resonances() {
    for ratio in [1.02, 1.03, 1.04, 1.05, 1.06] {
        let p = presets::set_a_unequal(ratio);
        let spec = frequency_sweep(&p, &DeltaGrid::default(), &SweepOptions::default()).unwrap();
        let minima: Vec<_> = window_extrema(&spec, Quantity::ReEpsT)
            .unwrap()
            .into_iter()
            .filter(|e| e.kind == ExtremumKind::Minimum)
            .collect();
        assert_eq!(minima.len(), 2, "ratio {ratio}");
        let step = spec.grid_step();
        assert!((minima[0].position - p.mirror1.omega).abs() <= 2.0 * step, "ratio {ratio}");
        assert!((minima[1].position - p.mirror2.omega).abs() <= 2.0 * step, "ratio {ratio}");
    }
}
