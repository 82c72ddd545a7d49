//! Steady-state roots against an independent dense scan with bisection.

mod common;

use common::{oracle_residual, oracle_roots, random_steady_draw, HBAR};
use rand::rngs::StdRng;
use rand::SeedableRng;
use twomirror::steady_state::{operating_point, solve_steady_state, SteadyOptions};
use twomirror::sweep_io::presets;

#[test]
fn roots_match_dense_scan_oracle() {
    let mut rng = StdRng::seed_from_u64(0x5eed_0001);
    let mut multistable = 0;
    for draw in 0..20 {
        let p = random_steady_draw(&mut rng);
        let d0 = p.delta0();
        let expected = oracle_roots(&p, d0);
        let got = solve_steady_state(&p, d0).unwrap();
        assert_eq!(got.len(), expected.len(), "draw {draw}: {got:?} vs {expected:?}");
        let eps2 = 2.0 * p.cavity.kappa * p.drive.power_coupling / (HBAR * p.drive.omega_c);
        for (s, e) in got.iter().zip(&expected) {
            assert!((s.intensity - e).abs() <= 1e-8 * e, "draw {draw}: {} vs {e}", s.intensity);
            let r = oracle_residual(&p, d0, s.intensity).abs() / eps2;
            assert!(r < 1e-10, "draw {draw}: residual {r:e}");
        }
        if got.len() > 1 {
            multistable += 1;
        }
    }
    // the draw distribution is meant to exercise folded branches too
    assert!(multistable > 0);
}

#[test]
fn presets_have_a_single_root() {
    let mut all = vec![presets::set_a(), presets::set_b(), presets::fig4().0];
    for s in presets::fig2().into_iter().chain(presets::fig5()).chain(presets::fig6()).chain(presets::fig7()) {
        all.push(s.params);
    }
    for p in all {
        let states = solve_steady_state(&p, p.delta0()).unwrap();
        assert_eq!(states.len(), 1, "{p:?}");
        assert_eq!(oracle_roots(&p, p.delta0()).len(), 1);
    }
}

#[test]
fn power_ramp_follows_lower_branch() {
    // blue-detuned Kerr cavity: the lower branch ends at a fold, after which
    // the selected intensity jumps up and never comes back down
    let base = presets::set_a().with_nonlinear(0.0, 5e-4, 0.0).with_delta0(-10.0 * presets::set_a().cavity.kappa);
    let mut last = 0.0;
    let mut saw_multistable = false;
    for k in 1..=200 {
        let mut p = base;
        p.drive.power_coupling = 1e-4 * k as f64;
        let op = operating_point(&p, &SteadyOptions::default()).unwrap();
        assert!(op.state.intensity >= last, "power step {k}");
        saw_multistable |= op.state.is_multistable();
        last = op.state.intensity;
    }
    assert!(saw_multistable);
}
