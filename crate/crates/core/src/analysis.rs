//! Spectral features of computed probe spectra.
//!
//! Window width is not uniquely defined for an asymmetric dip; here the full
//! width is taken at half depth between the dip value and the *lower* of the
//! two flanking maxima, with crossings found by linear interpolation.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{collective_coords, SystemParams, HBAR};
use crate::response::ProbeResponse;
use crate::steady_state::{operating_point, SteadyOptions, SteadyState};
use crate::sweep_io::{frequency_sweep, DeltaGrid, SweepError, SweepOptions};
use crate::Warning;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("need at least 5 grid points, got {0}")]
    TooFewPoints(usize),
    #[error("grid too coarse: extrema at samples {left} and {right} are fewer than 3 points apart")]
    GridTooCoarse { left: usize, right: usize },
    #[error("no transparency window: {0}")]
    NoWindow(&'static str),
    #[error("no central absorption peak inside the window")]
    NoCentralPeak,
    #[error("sweep failed at g_m = {g_m:.6e}: {source}")]
    Sweep { g_m: f64, source: Box<SweepError> },
}

/// Probe spectrum over an ordered grid of offsets `delta = omega_p - omega_c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub delta_grid: Vec<f64>,
    pub responses: Vec<ProbeResponse>,
    pub steady: SteadyState,
    pub params_snapshot: SystemParams,
    /// Frequency used to normalise the offset axis, `x = (delta - ref) / ref`.
    pub reference: f64,
    #[serde(default)]
    pub warnings: Vec<Warning>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.delta_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.delta_grid.is_empty()
    }

    pub fn x_over_ref(&self) -> Vec<f64> {
        self.delta_grid.iter().map(|d| (d - self.reference) / self.reference).collect()
    }

    pub fn values(&self, quantity: Quantity) -> Vec<f64> {
        self.responses.iter().map(|r| quantity.of(r)).collect()
    }

    /// Grid spacing in rad/s (assumes a uniform grid).
    pub fn grid_step(&self) -> f64 {
        let n = self.delta_grid.len();
        if n < 2 {
            return 0.0;
        }
        (self.delta_grid[n - 1] - self.delta_grid[0]) / (n - 1) as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Quantity {
    ReEpsT,
    ImEpsT,
    SidebandMag,
    ReQNorm,
    ReQcmNorm,
}

impl Quantity {
    pub fn of(self, r: &ProbeResponse) -> f64 {
        match self {
            Quantity::ReEpsT => r.eps_t.re,
            Quantity::ImEpsT => r.eps_t.im,
            Quantity::SidebandMag => r.sideband_mag,
            Quantity::ReQNorm => r.q_norm.re,
            Quantity::ReQcmNorm => r.q_cm_norm.re,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Quantity::ReEpsT => "Re eps_t",
            Quantity::ImEpsT => "Im eps_t",
            Quantity::SidebandMag => "2 kappa |A+| / eps_p",
            Quantity::ReQNorm => "Re g_m a_s q / eps_p",
            Quantity::ReQcmNorm => "Re g_m a_s Q / eps_p",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExtremumKind {
    Minimum,
    Maximum,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extremum {
    /// Refined position (same units as the grid).
    pub position: f64,
    /// Refined value at `position`.
    pub value: f64,
    pub kind: ExtremumKind,
    /// Index of the grid sample that triggered the detection.
    pub index: usize,
}

pub fn find_extrema(spectrum: &Spectrum, quantity: Quantity) -> Result<Vec<Extremum>, AnalysisError> {
    find_extrema_in(&spectrum.delta_grid, &spectrum.values(quantity))
}

/// Interior extrema by a strict three-point test, refined by the vertex of the
/// parabola through the three samples.
pub fn find_extrema_in(grid: &[f64], values: &[f64]) -> Result<Vec<Extremum>, AnalysisError> {
    let n = grid.len().min(values.len());
    if n < 5 {
        return Err(AnalysisError::TooFewPoints(n));
    }
    let mut out: Vec<Extremum> = Vec::new();
    for i in 1..n - 1 {
        let (l, c, r) = (values[i - 1], values[i], values[i + 1]);
        let kind = if c > l && c > r {
            ExtremumKind::Maximum
        } else if c < l && c < r {
            ExtremumKind::Minimum
        } else {
            continue;
        };
        if let Some(prev) = out.last() {
            if i - prev.index < 4 {
                return Err(AnalysisError::GridTooCoarse { left: prev.index, right: i });
            }
        }
        let (position, value) = parabola_vertex([grid[i - 1], grid[i], grid[i + 1]], [l, c, r]);
        out.push(Extremum { position, value, kind, index: i });
    }
    Ok(out)
}

fn parabola_vertex(x: [f64; 3], y: [f64; 3]) -> (f64, f64) {
    // Work relative to the centre sample to keep the arithmetic well conditioned.
    let (h0, h2) = (x[0] - x[1], x[2] - x[1]);
    let (d0, d2) = (y[0] - y[1], y[2] - y[1]);
    // y - y1 = a t^2 + b t through (h0, d0), (h2, d2)
    let det = h0 * h2 * (h0 - h2);
    let a = (d0 * h2 - d2 * h0) / det;
    let b = (d2 * h0 * h0 - d0 * h2 * h2) / det;
    if a == 0.0 || !a.is_finite() {
        return (x[1], y[1]);
    }
    let t = -b / (2.0 * a);
    // never move past the bracketing samples
    let t = t.clamp(h0, h2);
    (x[1] + t, y[1] + a * t * t + b * t)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowFeatures {
    pub dip_position: f64,
    /// Re eps_t at the deepest minimum.
    pub dip_depth: f64,
    pub fwhm: f64,
    pub outer_peak_positions: (f64, f64),
    pub outer_peak_values: (f64, f64),
    /// Distance between the two flanking maxima.
    pub splitting: f64,
    /// Number of minima inside the window (1 for OMIT, 2 for a split window).
    pub n_minima: usize,
    pub central_peak_position: Option<f64>,
    pub central_peak_height: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CooperativityReport {
    pub cooperativity: f64,
    pub gamma_eff: f64,
}

/// `C = 2 hbar (g_m a_s)^2 / (m omega_m kappa gamma_m)` with the relative mode
/// standing in for the single mirror: `m = 2 mu`, `omega_m = W_r`, `gamma_m = gamma_r`.
pub fn cooperativity_report(params: &SystemParams, state: &SteadyState) -> CooperativityReport {
    let coll = collective_coords(params);
    let ga = params.g_m() * state.a_s;
    let gamma_m = coll.gamma_r;
    let cooperativity =
        2.0 * HBAR * ga * ga / (2.0 * coll.reduced_mass * coll.omega_r * params.cavity.kappa * gamma_m);
    CooperativityReport { cooperativity, gamma_eff: gamma_m * (1.0 + cooperativity) }
}

/// Offsets kept for window analysis: `Delta0 +- (10 gamma_eff + |W2 - W1| / 2)`.
pub fn window_region(params: &SystemParams, state: &SteadyState) -> (f64, f64) {
    let gamma_eff = cooperativity_report(params, state).gamma_eff;
    let half = 10.0 * gamma_eff + 0.5 * (params.mirror2.omega - params.mirror1.omega).abs();
    (state.delta0 - half, state.delta0 + half)
}

fn region_indices(grid: &[f64], (lo, hi): (f64, f64)) -> (usize, usize) {
    let start = grid.partition_point(|&d| d < lo);
    let end = grid.partition_point(|&d| d <= hi);
    (start, end)
}

/// Extrema of `quantity` restricted to the analysis window of the spectrum.
pub fn window_extrema(spectrum: &Spectrum, quantity: Quantity) -> Result<Vec<Extremum>, AnalysisError> {
    let region = window_region(&spectrum.params_snapshot, &spectrum.steady);
    let (s, e) = region_indices(&spectrum.delta_grid, region);
    let values = spectrum.values(quantity);
    let mut ext = find_extrema_in(&spectrum.delta_grid[s..e], &values[s..e])?;
    for x in &mut ext {
        x.index += s;
    }
    Ok(ext)
}

pub fn transparency_window(spectrum: &Spectrum) -> Result<WindowFeatures, AnalysisError> {
    let region = window_region(&spectrum.params_snapshot, &spectrum.steady);
    window_features_in(&spectrum.delta_grid, &spectrum.values(Quantity::ReEpsT), region)
}

/// Window features from raw samples of Re eps_t, restricted to `region`.
pub fn window_features_in(grid: &[f64], re_eps: &[f64], region: (f64, f64)) -> Result<WindowFeatures, AnalysisError> {
    let (s, e) = region_indices(grid, region);
    let (grid, values) = (&grid[s..e], &re_eps[s..e]);
    let ext = find_extrema_in(grid, values)?;
    let minima: Vec<&Extremum> = ext.iter().filter(|x| x.kind == ExtremumKind::Minimum).collect();
    let (first, last) = match (minima.first(), minima.last()) {
        (Some(f), Some(l)) => (**f, **l),
        _ => return Err(AnalysisError::NoWindow("no minimum inside the window region")),
    };
    let left = ext
        .iter()
        .rev()
        .find(|x| x.kind == ExtremumKind::Maximum && x.index < first.index)
        .ok_or(AnalysisError::NoWindow("no maximum left of the dip"))?;
    let right = ext
        .iter()
        .find(|x| x.kind == ExtremumKind::Maximum && x.index > last.index)
        .ok_or(AnalysisError::NoWindow("no maximum right of the dip"))?;
    let dip = minima
        .iter()
        .min_by(|a, b| a.value.total_cmp(&b.value))
        .copied()
        .copied()
        .unwrap_or(first);

    let half = 0.5 * (dip.value + left.value.min(right.value));
    let mut k = first.index;
    while k > left.index && values[k] < half {
        k -= 1;
    }
    let x_left = crossing(grid, values, k, half);
    let mut k = last.index;
    while k < right.index && values[k] < half {
        k += 1;
    }
    let x_right = crossing(grid, values, k - 1, half);

    let central = ext
        .iter()
        .filter(|x| x.kind == ExtremumKind::Maximum && x.index > first.index && x.index < last.index)
        .max_by(|a, b| a.value.total_cmp(&b.value));

    Ok(WindowFeatures {
        dip_position: dip.position,
        dip_depth: dip.value,
        fwhm: x_right - x_left,
        outer_peak_positions: (left.position, right.position),
        outer_peak_values: (left.value, right.value),
        splitting: right.position - left.position,
        n_minima: minima.len(),
        central_peak_position: central.map(|c| c.position),
        central_peak_height: central.map(|c| c.value),
    })
}

/// Linear interpolation of the `level` crossing between samples `k` and `k + 1`.
fn crossing(grid: &[f64], values: &[f64], k: usize, level: f64) -> f64 {
    let (y0, y1) = (values[k], values[k + 1]);
    if y1 == y0 {
        return grid[k];
    }
    grid[k] + (level - y0) * (grid[k + 1] - grid[k]) / (y1 - y0)
}

/// Position and Re eps_t of the absorption peak between the two dips of a split window.
pub fn central_peak_metrics(spectrum: &Spectrum) -> Result<(f64, f64), AnalysisError> {
    match transparency_window(spectrum) {
        Ok(WindowFeatures { central_peak_position: Some(p), central_peak_height: Some(h), .. }) => Ok((p, h)),
        _ => Err(AnalysisError::NoCentralPeak),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Ordinary least squares; `None` for fewer than two points or a degenerate abscissa.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Option<LinearFit> {
    let n = x.len().min(y.len());
    if n < 2 {
        return None;
    }
    let nf = n as f64;
    let mx = x[..n].iter().sum::<f64>() / nf;
    let my = y[..n].iter().sum::<f64>() / nf;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxx += (a - mx) * (a - mx);
        sxy += (a - mx) * (b - my);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Some(LinearFit { slope, intercept: my - slope * mx, r_squared })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplittingRow {
    pub g_m: f64,
    pub splitting: f64,
    pub window: WindowFeatures,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplittingTable {
    pub rows: Vec<SplittingRow>,
    /// Fit of splitting against `g_m`; absent for a single row.
    pub fit: Option<LinearFit>,
}

/// Outer-peak splitting of the window for each coupling strength.
pub fn splitting_vs_coupling(
    base: &SystemParams,
    g_m_values: &[f64],
    grid: &DeltaGrid,
    opts: &SweepOptions,
) -> Result<SplittingTable, AnalysisError> {
    let mut rows = Vec::with_capacity(g_m_values.len());
    for &g_m in g_m_values {
        let params = base.with_g_m(g_m);
        let spectrum = frequency_sweep(&params, grid, opts)
            .map_err(|e| AnalysisError::Sweep { g_m, source: Box::new(e) })?;
        let window = transparency_window(&spectrum)?;
        rows.push(SplittingRow { g_m, splitting: window.splitting, window });
    }
    let fit = if rows.len() >= 2 {
        let x: Vec<f64> = rows.iter().map(|r| r.g_m).collect();
        let y: Vec<f64> = rows.iter().map(|r| r.splitting).collect();
        linear_fit(&x, &y)
    } else {
        None
    };
    Ok(SplittingTable { rows, fit })
}

/// Cooperativity at the configured operating point.
pub fn operating_cooperativity(params: &SystemParams) -> Result<CooperativityReport, crate::steady_state::SteadyStateError> {
    let op = operating_point(params, &SteadyOptions::default())?;
    Ok(cooperativity_report(params, &op.state))
}
