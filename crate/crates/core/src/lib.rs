//! # twomirror
//!
//! Steady state and linearized probe response of a Fabry-Perot cavity bounded by
//! two movable mirrors and filled with a Kerr / degenerate-OPA crystal.
//!
//! The crate is organised bottom-up:
//!
//! - [`model`]: physical parameters, collective mirror coordinates, drive amplitudes.
//! - [`steady_state`]: intracavity intensity polynomial, root enumeration,
//!   branch selection and an optional linear stability check.
//! - [`response`]: the 4x4 sideband response system, its closed-form reduction
//!   and the rotating-wave / limiting-case approximations.
//! - [`analysis`]: extrema, transparency-window features, cooperativity.
//! - [`sweep_io`]: frequency and parameter sweeps, config files, CSV/JSON/SVG
//!   export and the command line front end.
//!
//! The transmitted probe field follows the convention `eps_t = 2 kappa A_- / eps_p`,
//! so an empty cavity probed on resonance gives `eps_t = 2`, not 1.
//!
//! ```
//! use twomirror::sweep_io::presets;
//! use twomirror::steady_state::{operating_point, SteadyOptions};
//! use twomirror::response::solve_probe_response;
//!
//! let params = presets::set_a();
//! let op = operating_point(&params, &SteadyOptions::default()).unwrap();
//! let omega_m = params.mean_mechanical_frequency();
//! let resp = solve_probe_response(&params, &op.state, omega_m).unwrap();
//! // deep transparency dip at the two-photon resonance
//! assert!(resp.eps_t.re < 0.05);
//! ```

pub mod analysis;
pub mod model;
pub mod response;
pub mod steady_state;
pub mod sweep_io;
mod warning;

pub use warning::Warning;
