//! TOML run configuration.
//!
//! Every physical quantity is either a bare number in SI units (angular
//! frequencies in rad/s) or a table `{ value = .., unit = ".." }`:
//!
//! | dimension | units |
//! |-----------|-------|
//! | frequency | `rad_per_s`, `hz` (multiplied by 2pi) |
//! | mass      | `kg`, `g`, `ng` |
//! | length    | `m`, `mm`, `um`, `nm` |
//! | power     | `w`, `mw`, `uw`, `nw` |
//! | angle     | `rad`, `deg`, `pi` (multiples of pi) |
//! | coupling  | `rad_per_s_m`, `g_ref` (multiples of `omega_c / L`) |
//!
//! ```toml
//! g_m = { value = 1.0, unit = "g_ref" }       # optional, default omega_c / L
//!
//! [cavity]
//! kappa = { value = 2e5, unit = "hz" }
//! length = { value = 6, unit = "mm" }
//!
//! [mirror1]
//! mass = { value = 12, unit = "ng" }
//! omega = { value = 1e7, unit = "hz" }
//! gamma = { value = 200, unit = "hz" }
//!
//! [mirror2]                                   # same keys as mirror1
//!
//! [drive]
//! power_coupling = { value = 6, unit = "mw" }
//! power_probe = { value = 1, unit = "nw" }
//! wavelength = { value = 1064, unit = "nm" }  # or omega_c
//! delta0 = { value = 1e7, unit = "hz" }       # optional, default (W1 + W2) / 2
//!
//! [nonlinear]                                 # optional, default bare cavity
//! gain_opa = 0.0
//! theta = { value = 0.5, unit = "pi" }
//! eta = 0.0
//!
//! [grid]                                      # optional probe-offset grid
//! start = -0.1
//! stop = 0.1
//! count = 4001
//! reference = "mean"                          # mean | mirror1 | mirror2
//!
//! [sweep]                                     # optional, used by `sweep`
//! axis = "g_m_rel"
//! values = [0.5, 1.0, 1.5]                    # or start/stop/count and scale = "linear" | "log"
//! ```
//!
//! Sweep values are taken in the SI unit of the chosen axis.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::sweep::{Axis, DeltaGrid, SweepSpec, SweepValues};
use crate::model::{CavityParams, DriveParams, MirrorParams, NonlinearParams, SystemParams, SPEED_OF_LIGHT};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {message}")]
    Io { path: String, message: String },
    #[error("invalid config: {0}")]
    Parse(String),
    #[error("{field}: unit '{unit}' is not a {dimension} unit")]
    Unit { field: String, unit: String, dimension: &'static str },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Quantity {
    Si(f64),
    Tagged { value: f64, unit: Unit },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Unit {
    RadPerS,
    Hz,
    Kg,
    G,
    Ng,
    M,
    Mm,
    Um,
    Nm,
    W,
    Mw,
    Uw,
    Nw,
    Rad,
    Deg,
    Pi,
    RadPerSM,
    GRef,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Frequency,
    Mass,
    Length,
    Power,
    Angle,
    Coupling,
}

impl Dimension {
    fn name(self) -> &'static str {
        match self {
            Dimension::Frequency => "frequency",
            Dimension::Mass => "mass",
            Dimension::Length => "length",
            Dimension::Power => "power",
            Dimension::Angle => "angle",
            Dimension::Coupling => "coupling",
        }
    }
}

impl Unit {
    /// Dimension and SI factor. `GRef` is resolved by the caller.
    fn factor(self) -> (Dimension, f64) {
        use Dimension::*;
        match self {
            Unit::RadPerS => (Frequency, 1.0),
            Unit::Hz => (Frequency, 2.0 * PI),
            Unit::Kg => (Mass, 1.0),
            Unit::G => (Mass, 1e-3),
            Unit::Ng => (Mass, 1e-12),
            Unit::M => (Length, 1.0),
            Unit::Mm => (Length, 1e-3),
            Unit::Um => (Length, 1e-6),
            Unit::Nm => (Length, 1e-9),
            Unit::W => (Power, 1.0),
            Unit::Mw => (Power, 1e-3),
            Unit::Uw => (Power, 1e-6),
            Unit::Nw => (Power, 1e-9),
            Unit::Rad => (Angle, 1.0),
            Unit::Deg => (Angle, PI / 180.0),
            Unit::Pi => (Angle, PI),
            Unit::RadPerSM => (Coupling, 1.0),
            Unit::GRef => (Coupling, f64::NAN),
        }
    }
}

impl Quantity {
    fn si(self, field: &str, dim: Dimension) -> Result<f64, ConfigError> {
        match self {
            Quantity::Si(v) => Ok(v),
            Quantity::Tagged { value, unit } => {
                let (d, f) = unit.factor();
                if d != dim || unit == Unit::GRef {
                    return Err(unit_error(field, unit, dim));
                }
                Ok(value * f)
            }
        }
    }
}

fn unit_error(field: &str, unit: Unit, dim: Dimension) -> ConfigError {
    let unit = serde_json::to_value(unit).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
    ConfigError::Unit { field: field.to_string(), unit, dimension: dim.name() }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct CavityFile {
    kappa: Quantity,
    length: Quantity,
    omega0: Option<Quantity>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct MirrorFile {
    mass: Quantity,
    omega: Quantity,
    gamma: Quantity,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct DriveFile {
    power_coupling: Quantity,
    power_probe: Quantity,
    wavelength: Option<Quantity>,
    omega_c: Option<Quantity>,
    delta0: Option<Quantity>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct NonlinearFile {
    gain_opa: Option<Quantity>,
    theta: Option<Quantity>,
    eta: Option<Quantity>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
enum Scale {
    Linear,
    Log,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepFile {
    axis: String,
    values: Option<Vec<f64>>,
    start: Option<f64>,
    stop: Option<f64>,
    count: Option<usize>,
    scale: Option<Scale>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    g_m: Option<Quantity>,
    cavity: CavityFile,
    mirror1: MirrorFile,
    mirror2: MirrorFile,
    drive: DriveFile,
    #[serde(default)]
    nonlinear: NonlinearFile,
    grid: Option<DeltaGrid>,
    sweep: Option<SweepFile>,
}

/// A loaded configuration, converted to SI.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: SystemParams,
    pub grid: Option<DeltaGrid>,
    pub sweep: Option<SweepSpec>,
}

pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::Io { path: path.display().to_string(), message: e.to_string() })?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let file: ConfigFile = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
    use Dimension::*;

    let mirror = |name: &str, m: &MirrorFile| -> Result<MirrorParams, ConfigError> {
        Ok(MirrorParams {
            mass: m.mass.si(&format!("{name}.mass"), Mass)?,
            omega: m.omega.si(&format!("{name}.omega"), Frequency)?,
            gamma: m.gamma.si(&format!("{name}.gamma"), Frequency)?,
        })
    };
    let cavity = CavityParams {
        kappa: file.cavity.kappa.si("cavity.kappa", Frequency)?,
        length: file.cavity.length.si("cavity.length", Length)?,
        omega0: file.cavity.omega0.map(|q| q.si("cavity.omega0", Frequency)).transpose()?,
    };
    let d = &file.drive;
    let omega_c = match (d.wavelength, d.omega_c) {
        (Some(w), None) => 2.0 * PI * SPEED_OF_LIGHT / w.si("drive.wavelength", Length)?,
        (None, Some(o)) => o.si("drive.omega_c", Frequency)?,
        _ => return Err(ConfigError::Invalid("drive: give exactly one of wavelength and omega_c".into())),
    };
    let drive = DriveParams {
        power_coupling: d.power_coupling.si("drive.power_coupling", Power)?,
        power_probe: d.power_probe.si("drive.power_probe", Power)?,
        omega_c,
        delta0: d.delta0.map(|q| q.si("drive.delta0", Frequency)).transpose()?,
    };
    let nl = &file.nonlinear;
    let opt = |q: Option<Quantity>, field: &str, dim| q.map(|q| q.si(field, dim)).transpose().map(|v| v.unwrap_or(0.0));
    let nonlinear = NonlinearParams {
        gain_opa: opt(nl.gain_opa, "nonlinear.gain_opa", Frequency)?,
        theta: opt(nl.theta, "nonlinear.theta", Angle)?,
        eta: opt(nl.eta, "nonlinear.eta", Frequency)?,
    };
    let g_ref = omega_c / cavity.length;
    let g_m = match file.g_m {
        None => None,
        Some(Quantity::Si(v)) => Some(v),
        Some(Quantity::Tagged { value, unit: Unit::GRef }) => Some(value * g_ref),
        Some(q) => Some(q.si("g_m", Coupling)?),
    };
    let params = SystemParams {
        cavity,
        mirror1: mirror("mirror1", &file.mirror1)?,
        mirror2: mirror("mirror2", &file.mirror2)?,
        drive,
        nonlinear,
        g_m,
    };
    params.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
    if let Some(g) = &file.grid {
        g.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
    }
    let grid = file.grid;

    let sweep = match file.sweep {
        None => None,
        Some(s) => {
            s.axis.parse::<Axis>().map_err(|e| ConfigError::Invalid(e.to_string()))?;
            let values = match (s.values, s.start, s.stop, s.count) {
                (Some(values), None, None, None) => SweepValues::List { values },
                (None, Some(start), Some(stop), Some(count)) => match s.scale.unwrap_or(Scale::Linear) {
                    Scale::Linear => SweepValues::Linear { start, stop, count },
                    Scale::Log => SweepValues::Log { start, stop, count },
                },
                _ => return Err(ConfigError::Invalid("sweep: give either values or start/stop/count".into())),
            };
            values.values().map_err(|e| ConfigError::Invalid(format!("sweep: {e}")))?;
            Some(SweepSpec { axis: s.axis, values, delta_grid: grid.unwrap_or_default() })
        }
    };
    Ok(RunConfig { params, grid, sweep })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweep_io::presets;

    pub(crate) const SET_A: &str = r#"
[cavity]
kappa = { value = 2e5, unit = "hz" }
length = { value = 6, unit = "mm" }

[mirror1]
mass = { value = 12, unit = "ng" }
omega = { value = 1e7, unit = "hz" }
gamma = { value = 200, unit = "hz" }

[mirror2]
mass = { value = 12, unit = "ng" }
omega = { value = 1e7, unit = "hz" }
gamma = { value = 200, unit = "hz" }

[drive]
power_coupling = { value = 6, unit = "mw" }
power_probe = { value = 1, unit = "nw" }
wavelength = { value = 1064, unit = "nm" }
"#;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-15 * b.abs()
    }

    #[test]
    fn set_a_round_trip() {
        let c = parse_config(SET_A).unwrap();
        let p = presets::set_a();
        assert!(close(c.params.cavity.kappa, p.cavity.kappa));
        assert!(close(c.params.mirror1.mass, p.mirror1.mass));
        assert!(close(c.params.mirror2.omega, p.mirror2.omega));
        assert!(close(c.params.drive.omega_c, p.drive.omega_c));
        assert!(close(c.params.drive.power_coupling, p.drive.power_coupling));
        assert!(c.grid.is_none() && c.sweep.is_none());
    }

    #[test]
    fn angles_and_relative_coupling() {
        let text = format!(
            "g_m = {{ value = 0.5, unit = \"g_ref\" }}\n{SET_A}\n[nonlinear]\ngain_opa = 4e6\ntheta = {{ value = 1.5, unit = \"pi\" }}\neta = 0.03\n"
        );
        let c = parse_config(&text).unwrap();
        assert!(close(c.params.nonlinear.theta, 1.5 * PI));
        assert!(close(c.params.g_m(), 0.5 * c.params.g_reference()));
    }

    #[test]
    fn wrong_dimension_is_rejected() {
        let text = SET_A.replace("{ value = 6, unit = \"mm\" }", "{ value = 6, unit = \"mw\" }");
        let e = parse_config(&text).unwrap_err();
        assert!(matches!(e, ConfigError::Unit { ref field, .. } if field == "cavity.length"), "{e}");
    }

    #[test]
    fn sweep_and_grid_sections() {
        let text = format!("{SET_A}\n[grid]\nstart = -0.05\nstop = 0.05\ncount = 1001\n\n[sweep]\naxis = \"g_m_rel\"\nstart = 0.5\nstop = 1.5\ncount = 3\n");
        let c = parse_config(&text).unwrap();
        let s = c.sweep.unwrap();
        assert_eq!(s.values.values().unwrap(), vec![0.5, 1.0, 1.5]);
        assert_eq!(s.delta_grid.count, 1001);
    }

    #[test]
    fn bad_inputs() {
        assert!(matches!(parse_config("nonsense = ["), Err(ConfigError::Parse(_))));
        let text = format!("{SET_A}\n[sweep]\naxis = \"bogus\"\nvalues = [1.0]\n");
        assert!(matches!(parse_config(&text), Err(ConfigError::Invalid(_))));
        let text = SET_A.replace("power_coupling = { value = 6, unit = \"mw\" }", "power_coupling = -1.0");
        assert!(matches!(parse_config(&text), Err(ConfigError::Invalid(_))));
    }
}
