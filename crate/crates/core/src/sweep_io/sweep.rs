use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::{transparency_window, Spectrum, WindowFeatures};
use crate::model::{collective_coords, SystemParams};
use crate::response::{solve_with, ProbeResponse, ResponseError};
use crate::steady_state::{operating_point, SteadyOptions, SteadyStateError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SweepError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("unknown sweep axis '{0}'")]
    UnknownAxis(String),
    #[error("steady state: {0}")]
    Steady(#[from] SteadyStateError),
    #[error("grid point {index} (delta = {delta:.9e} rad/s): {source}")]
    Point { index: usize, delta: f64, source: ResponseError },
    #[error("worker pool: {0}")]
    Pool(String),
}

/// Which frequency normalizes the offset axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reference {
    /// `(Omega_1 + Omega_2) / 2`
    #[default]
    Mean,
    Mirror1,
    Mirror2,
}

impl Reference {
    pub fn frequency(self, params: &SystemParams) -> f64 {
        match self {
            Reference::Mean => params.mean_mechanical_frequency(),
            Reference::Mirror1 => params.mirror1.omega,
            Reference::Mirror2 => params.mirror2.omega,
        }
    }
}

impl FromStr for Reference {
    type Err = SweepError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mean" => Ok(Reference::Mean),
            "mirror1" => Ok(Reference::Mirror1),
            "mirror2" => Ok(Reference::Mirror2),
            _ => Err(SweepError::InvalidGrid(format!("unknown reference '{s}'"))),
        }
    }
}

/// Uniform probe-offset grid in normalized units: `delta = ref * (1 + x)`
/// for `x` from `start` to `stop` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaGrid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    #[serde(default)]
    pub reference: Reference,
}

impl Default for DeltaGrid {
    fn default() -> Self {
        DeltaGrid { start: -0.1, stop: 0.1, count: 4001, reference: Reference::Mean }
    }
}

impl DeltaGrid {
    pub fn new(start: f64, stop: f64, count: usize) -> Self {
        DeltaGrid { start, stop, count, reference: Reference::Mean }
    }

    pub fn validate(&self) -> Result<(), SweepError> {
        if self.count < 2 {
            return Err(SweepError::InvalidGrid(format!("count must be at least 2, got {}", self.count)));
        }
        if !(self.start.is_finite() && self.stop.is_finite() && self.start < self.stop) {
            return Err(SweepError::InvalidGrid(format!("need start < stop, got {}:{}", self.start, self.stop)));
        }
        if self.start <= -1.0 {
            return Err(SweepError::InvalidGrid("grid must stay at positive probe offsets (start > -1)".into()));
        }
        Ok(())
    }

    pub fn x_values(&self) -> Vec<f64> {
        let n = self.count;
        let step = (self.stop - self.start) / (n - 1) as f64;
        (0..n)
            .map(|i| if i == n - 1 { self.stop } else { self.start + step * i as f64 })
            .collect()
    }

    pub fn deltas(&self, params: &SystemParams) -> Vec<f64> {
        let r = self.reference.frequency(params);
        self.x_values().into_iter().map(|x| r * (1.0 + x)).collect()
    }
}

impl FromStr for DeltaGrid {
    type Err = SweepError;
    /// `start:stop:count`, for example `-0.1:0.1:4001`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || SweepError::InvalidGrid(format!("expected start:stop:count, got '{s}'"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let start = parts[0].trim().parse().map_err(|_| bad())?;
        let stop = parts[1].trim().parse().map_err(|_| bad())?;
        let count = parts[2].trim().parse().map_err(|_| bad())?;
        let g = DeltaGrid::new(start, stop, count);
        g.validate()?;
        Ok(g)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SweepOptions {
    /// Worker threads; `None` uses every available core.
    pub workers: Option<usize>,
    pub stability_check: bool,
}

/// Seconds spent per grid point and in total.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTiming {
    pub per_point: Vec<f64>,
    pub total: f64,
}

pub fn frequency_sweep(params: &SystemParams, grid: &DeltaGrid, opts: &SweepOptions) -> Result<Spectrum, SweepError> {
    frequency_sweep_timed(params, grid, opts).map(|(s, _)| s)
}

/// One response solve per grid point. Points may run in parallel; results are
/// gathered in grid order, so the output does not depend on `workers`.
pub fn frequency_sweep_timed(
    params: &SystemParams,
    grid: &DeltaGrid,
    opts: &SweepOptions,
) -> Result<(Spectrum, SweepTiming), SweepError> {
    grid.validate()?;
    let started = Instant::now();
    let op = operating_point(params, &SteadyOptions { stability_check: opts.stability_check })?;
    let deltas = grid.deltas(params);
    let coll = collective_coords(params);
    let state = op.state;

    let eval = |(index, &delta): (usize, &f64)| -> Result<(ProbeResponse, f64), SweepError> {
        let t = Instant::now();
        let r = solve_with(params, &coll, &state, delta).map_err(|source| SweepError::Point { index, delta, source })?;
        Ok((r, t.elapsed().as_secs_f64()))
    };
    let results: Vec<Result<(ProbeResponse, f64), SweepError>> = match opts.workers {
        Some(1) => deltas.iter().enumerate().map(eval).collect(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| SweepError::Pool(e.to_string()))?
            .install(|| deltas.par_iter().enumerate().map(eval).collect()),
        None => deltas.par_iter().enumerate().map(eval).collect(),
    };

    let mut responses = Vec::with_capacity(deltas.len());
    let mut per_point = Vec::with_capacity(deltas.len());
    for r in results {
        let (resp, secs) = r?;
        responses.push(resp);
        per_point.push(secs);
    }
    let spectrum = Spectrum {
        delta_grid: deltas,
        responses,
        steady: state,
        params_snapshot: *params,
        reference: grid.reference.frequency(params),
        warnings: op.warnings,
    };
    Ok((spectrum, SweepTiming { per_point, total: started.elapsed().as_secs_f64() }))
}

/// A numeric field of [`SystemParams`] addressed by its dotted path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    GM,
    /// `g_m` in units of `omega_c / L`.
    GMRelative,
    PowerCoupling,
    PowerProbe,
    Delta0,
    GainOpa,
    Theta,
    Eta,
    Kappa,
    Length,
    Mass1,
    Mass2,
    Omega1,
    Omega2,
    Gamma1,
    Gamma2,
}

const AXES: [(&str, Axis); 16] = [
    ("g_m", Axis::GM),
    ("g_m_rel", Axis::GMRelative),
    ("drive.power_coupling", Axis::PowerCoupling),
    ("drive.power_probe", Axis::PowerProbe),
    ("drive.delta0", Axis::Delta0),
    ("nonlinear.gain_opa", Axis::GainOpa),
    ("nonlinear.theta", Axis::Theta),
    ("nonlinear.eta", Axis::Eta),
    ("cavity.kappa", Axis::Kappa),
    ("cavity.length", Axis::Length),
    ("mirror1.mass", Axis::Mass1),
    ("mirror2.mass", Axis::Mass2),
    ("mirror1.omega", Axis::Omega1),
    ("mirror2.omega", Axis::Omega2),
    ("mirror1.gamma", Axis::Gamma1),
    ("mirror2.gamma", Axis::Gamma2),
];

impl Axis {
    pub fn path(self) -> &'static str {
        AXES.iter().find(|(_, a)| *a == self).map(|(p, _)| *p).unwrap_or("?")
    }

    pub fn apply(self, params: &SystemParams, value: f64) -> SystemParams {
        let mut p = *params;
        match self {
            Axis::GM => p.g_m = Some(value),
            Axis::GMRelative => p.g_m = Some(value * p.g_reference()),
            Axis::PowerCoupling => p.drive.power_coupling = value,
            Axis::PowerProbe => p.drive.power_probe = value,
            Axis::Delta0 => p.drive.delta0 = Some(value),
            Axis::GainOpa => p.nonlinear.gain_opa = value,
            Axis::Theta => p.nonlinear.theta = value,
            Axis::Eta => p.nonlinear.eta = value,
            Axis::Kappa => p.cavity.kappa = value,
            Axis::Length => p.cavity.length = value,
            Axis::Mass1 => p.mirror1.mass = value,
            Axis::Mass2 => p.mirror2.mass = value,
            Axis::Omega1 => p.mirror1.omega = value,
            Axis::Omega2 => p.mirror2.omega = value,
            Axis::Gamma1 => p.mirror1.gamma = value,
            Axis::Gamma2 => p.mirror2.gamma = value,
        }
        p
    }
}

impl FromStr for Axis {
    type Err = SweepError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AXES.iter()
            .find(|(p, _)| *p == s)
            .map(|(_, a)| *a)
            .ok_or_else(|| SweepError::UnknownAxis(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SweepValues {
    List { values: Vec<f64> },
    Linear { start: f64, stop: f64, count: usize },
    Log { start: f64, stop: f64, count: usize },
}

impl SweepValues {
    pub fn values(&self) -> Result<Vec<f64>, SweepError> {
        match *self {
            SweepValues::List { ref values } => Ok(values.clone()),
            SweepValues::Linear { start, stop, count } => {
                check_range(start, stop, count)?;
                Ok(DeltaGrid::new(start, stop, count).x_values())
            }
            SweepValues::Log { start, stop, count } => {
                check_range(start, stop, count)?;
                if start <= 0.0 {
                    return Err(SweepError::InvalidGrid("log grid needs start > 0".into()));
                }
                let (a, b) = (start.ln(), stop.ln());
                Ok((0..count).map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp()).collect())
            }
        }
    }
}

fn check_range(start: f64, stop: f64, count: usize) -> Result<(), SweepError> {
    if count < 2 || !(start < stop) {
        return Err(SweepError::InvalidGrid(format!("need count >= 2 and start < stop, got {start}:{stop}:{count}")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub axis: String,
    pub values: SweepValues,
    #[serde(default)]
    pub delta_grid: DeltaGrid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub spectrum: Spectrum,
    /// `None` when the spectrum has no transparency window.
    pub window: Option<WindowFeatures>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub value: f64,
    /// Failure message for this value; the sweep itself continues.
    pub outcome: Result<SweepResult, String>,
}

/// Evaluate a spectrum (and its window features) for every value on the axis.
pub fn parameter_sweep(base: &SystemParams, spec: &SweepSpec, opts: &SweepOptions) -> Result<Vec<SweepPoint>, SweepError> {
    let axis: Axis = spec.axis.parse()?;
    spec.delta_grid.validate()?;
    let values = spec.values.values()?;
    Ok(values
        .into_iter()
        .map(|value| {
            let params = axis.apply(base, value);
            let outcome = frequency_sweep(&params, &spec.delta_grid, opts)
                .map(|spectrum| {
                    let window = transparency_window(&spectrum).ok();
                    SweepResult { spectrum, window }
                })
                .map_err(|e| e.to_string());
            SweepPoint { value, outcome }
        })
        .collect())
}
