use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::sweep::DeltaGrid;
use crate::analysis::Spectrum;
use crate::model::SystemParams;
use crate::steady_state::SteadyState;
use crate::Warning;

pub const CSV_HEADER: [&str; 9] = [
    "delta_rad_s",
    "x_over_ref",
    "re_eps_t",
    "im_eps_t",
    "sideband_mag",
    "re_q_norm",
    "im_q_norm",
    "re_qcm_norm",
    "im_qcm_norm",
];

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{path}: {message}")]
    Format { path: String, message: String },
}

fn io_err(path: &Path, e: impl ToString) -> ExportError {
    ExportError::Io { path: path.display().to_string(), message: e.to_string() }
}

fn fmt_err(path: &Path, e: impl ToString) -> ExportError {
    ExportError::Format { path: path.display().to_string(), message: e.to_string() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown format '{s}' (expected csv or json)")),
        }
    }
}

/// Steady-state metadata for one evaluated configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointMeta {
    pub label: String,
    pub params: SystemParams,
    pub grid: Option<DeltaGrid>,
    pub steady: SteadyState,
    pub n_real_roots: usize,
    pub stable: Option<bool>,
    pub warnings: Vec<Warning>,
}

impl PointMeta {
    pub fn from_spectrum(label: &str, spectrum: &Spectrum, grid: Option<DeltaGrid>) -> Self {
        PointMeta {
            label: label.to_string(),
            params: spectrum.params_snapshot,
            grid,
            steady: spectrum.steady,
            n_real_roots: spectrum.steady.n_real_roots,
            stable: spectrum.steady.stable,
            warnings: spectrum.warnings.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub code_version: String,
    /// Seconds since the Unix epoch; `SOURCE_DATE_EPOCH` overrides the clock.
    pub created_unix: u64,
    /// SHA-256 of the serialized points, independent of the timestamp.
    pub run_id: String,
    /// Command that produced the run, e.g. `spectrum` or `reproduce fig2`.
    pub command: String,
    pub points: Vec<PointMeta>,
}

/// Timestamp for new manifests.
pub fn manifest_timestamp() -> u64 {
    if let Some(t) = std::env::var("SOURCE_DATE_EPOCH").ok().and_then(|s| s.trim().parse().ok()) {
        return t;
    }
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

impl RunManifest {
    pub fn new(command: &str, points: Vec<PointMeta>) -> Self {
        Self::with_timestamp(command, points, manifest_timestamp())
    }

    pub fn with_timestamp(command: &str, points: Vec<PointMeta>, created_unix: u64) -> Self {
        let mut hasher = Sha256::new();
        hasher.update(env!("CARGO_PKG_VERSION").as_bytes());
        hasher.update(command.as_bytes());
        hasher.update(serde_json::to_vec(&points).unwrap_or_default());
        let run_id = hasher.finalize().iter().fold(String::new(), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        });
        RunManifest {
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            created_unix,
            run_id,
            command: command.to_string(),
            points,
        }
    }
}

/// CSV body: header plus one row per grid point, each value as `{:.16e}`
/// (17 significant digits, which round-trips any `f64`).
pub fn spectrum_csv(spectrum: &Spectrum) -> String {
    let mut out = CSV_HEADER.join(",");
    out.push('\n');
    for ((d, x), r) in spectrum.delta_grid.iter().zip(spectrum.x_over_ref()).zip(&spectrum.responses) {
        let row = [*d, x, r.eps_t.re, r.eps_t.im, r.sideband_mag, r.q_norm.re, r.q_norm.im, r.q_cm_norm.re, r.q_cm_norm.im];
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Sidecar manifest path for a CSV file: `dir/stem.manifest.json`.
pub fn manifest_path_for(path: &Path) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.manifest.json"))
}

#[derive(Serialize, Deserialize)]
struct JsonDocument {
    manifest: RunManifest,
    spectrum: Spectrum,
}

/// Write `spectrum` to `path`. CSV gets a sidecar manifest; JSON embeds it.
/// Returns every file written.
pub fn export_spectrum(
    spectrum: &Spectrum,
    manifest: &RunManifest,
    format: Format,
    path: &Path,
) -> Result<Vec<PathBuf>, ExportError> {
    match format {
        Format::Csv => {
            fs::write(path, spectrum_csv(spectrum)).map_err(|e| io_err(path, e))?;
            let side = manifest_path_for(path);
            write_manifest(manifest, &side)?;
            Ok(vec![path.to_path_buf(), side])
        }
        Format::Json => {
            let doc = JsonDocument { manifest: manifest.clone(), spectrum: spectrum.clone() };
            let text = serde_json::to_string_pretty(&doc).map_err(|e| fmt_err(path, e))?;
            fs::write(path, text).map_err(|e| io_err(path, e))?;
            Ok(vec![path.to_path_buf()])
        }
    }
}

pub fn write_manifest(manifest: &RunManifest, path: &Path) -> Result<(), ExportError> {
    let text = serde_json::to_string_pretty(manifest).map_err(|e| fmt_err(path, e))?;
    fs::write(path, text).map_err(|e| io_err(path, e))
}

pub fn read_manifest(path: &Path) -> Result<RunManifest, ExportError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    if let Ok(doc) = serde_json::from_str::<JsonDocument>(&text) {
        return Ok(doc.manifest);
    }
    serde_json::from_str(&text).map_err(|e| fmt_err(path, e))
}

pub fn import_json(path: &Path) -> Result<(RunManifest, Spectrum), ExportError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let doc: JsonDocument = serde_json::from_str(&text).map_err(|e| fmt_err(path, e))?;
    Ok((doc.manifest, doc.spectrum))
}

/// Columns of an exported CSV, in header order.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub columns: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn column(&self, name: &str) -> Option<&[f64]> {
        CSV_HEADER.iter().position(|h| *h == name).map(|i| self.columns[i].as_slice())
    }

    pub fn len(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub fn import_csv(path: &Path) -> Result<CsvTable, ExportError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    parse_csv(&text).map_err(|m| fmt_err(path, m))
}

pub fn parse_csv(text: &str) -> Result<CsvTable, String> {
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().ok_or("empty file")?.split(',').map(str::trim).collect();
    if header != CSV_HEADER {
        return Err(format!("unexpected header {header:?}"));
    }
    let mut columns = vec![Vec::new(); CSV_HEADER.len()];
    for (n, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != CSV_HEADER.len() {
            return Err(format!("row {}: expected {} cells, got {}", n + 1, CSV_HEADER.len(), cells.len()));
        }
        for (col, cell) in columns.iter_mut().zip(cells) {
            col.push(cell.trim().parse::<f64>().map_err(|e| format!("row {}: {e}", n + 1))?);
        }
    }
    Ok(CsvTable { columns })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweep_io::{frequency_sweep, presets, SweepOptions};

    fn small() -> Spectrum {
        frequency_sweep(&presets::set_a(), &DeltaGrid::new(-0.01, 0.01, 3), &SweepOptions::default()).unwrap()
    }

    #[test]
    fn three_points_four_lines() {
        let csv = spectrum_csv(&small());
        assert_eq!(csv.lines().count(), 4);
        assert_eq!(csv.lines().next().unwrap(), CSV_HEADER.join(","));
    }

    #[test]
    fn csv_values_round_trip() {
        let s = small();
        let t = parse_csv(&spectrum_csv(&s)).unwrap();
        assert_eq!(t.column("delta_rad_s").unwrap(), s.delta_grid.as_slice());
        let re: Vec<f64> = s.responses.iter().map(|r| r.eps_t.re).collect();
        assert_eq!(t.column("re_eps_t").unwrap(), re.as_slice());
    }

    #[test]
    fn run_id_ignores_timestamp() {
        let s = small();
        let pts = vec![PointMeta::from_spectrum("a", &s, None)];
        let a = RunManifest::with_timestamp("spectrum", pts.clone(), 1);
        let b = RunManifest::with_timestamp("spectrum", pts, 2);
        assert_eq!(a.run_id, b.run_id);
        assert_eq!(a.run_id.len(), 64);
    }

    #[test]
    fn sidecar_name() {
        assert_eq!(manifest_path_for(Path::new("out/fig2_equal.csv")), PathBuf::from("out/fig2_equal.manifest.json"));
    }
}
