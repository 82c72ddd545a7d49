use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use super::config::{load_config, ConfigError, RunConfig};
use super::export::{
    export_spectrum, import_csv, import_json, manifest_path_for, read_manifest, write_manifest, ExportError, Format,
    PointMeta, RunManifest,
};
use super::presets::{self, Series};
use super::svg::{render_svg, PlotSeries, PlotStyle};
use super::sweep::{frequency_sweep, parameter_sweep, DeltaGrid, SweepError, SweepOptions};
use crate::analysis::{
    cooperativity_report, find_extrema_in, splitting_vs_coupling, window_features_in, window_region, AnalysisError,
    Extremum, Quantity, Spectrum,
};
use crate::model::SystemParams;
use crate::steady_state::{linear_stability, select_operating_state, solve_steady_state, SteadyState, SteadyStateError};

#[derive(Debug)]
enum CliError {
    /// Bad arguments, unreadable or invalid input files. Exit code 1.
    Input(String),
    /// Solver or analysis failure on valid input. Exit code 2.
    Numerical(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<ExportError> for CliError {
    fn from(e: ExportError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<SteadyStateError> for CliError {
    fn from(e: SteadyStateError) -> Self {
        match e {
            SteadyStateError::Model(_) => CliError::Input(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<SweepError> for CliError {
    fn from(e: SweepError) -> Self {
        match e {
            SweepError::Steady(s) => s.into(),
            SweepError::InvalidGrid(_) | SweepError::UnknownAxis(_) => CliError::Input(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

#[derive(Parser, Debug)]
#[command(name = "twomirror", version, about = "Probe response of a two-mirror optomechanical cavity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug, Clone)]
struct Common {
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Also write an SVG plot.
    #[arg(long)]
    svg: bool,
    /// Worker threads (default: all cores).
    #[arg(long)]
    workers: Option<usize>,
    /// Probe grid `start:stop:count` in units of the reference frequency.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<DeltaGrid>,
    /// Run the linear stability check on the operating point.
    #[arg(long)]
    stability_check: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Figure {
    Fig2,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    All,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print every steady state of a configuration.
    Steady {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        stability_check: bool,
    },
    /// Compute and export a probe spectrum.
    Spectrum {
        /// TOML configuration.
        #[arg(long, required_unless_present = "manifest")]
        config: Option<PathBuf>,
        /// Re-run the configuration recorded in a manifest (or JSON export).
        #[arg(long, conflicts_with = "config")]
        manifest: Option<PathBuf>,
        /// File stem for the outputs.
        #[arg(long, default_value = "spectrum")]
        name: String,
        #[command(flatten)]
        common: Common,
    },
    /// Sweep one parameter as described by the `[sweep]` section of a config.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Extrema and window features of an exported spectrum.
    Features {
        /// A JSON export, or a CSV export with its manifest next to it.
        #[arg(long)]
        input: PathBuf,
    },
    /// Regenerate a figure from the built-in presets.
    Reproduce {
        #[arg(value_enum)]
        figure: Figure,
        #[command(flatten)]
        common: Common,
    },
}

/// Run the command line interface. Returns the process exit code:
/// 0 on success, 1 for input errors and 2 for numerical failures.
pub fn cli_main<S: AsRef<str>>(argv: &[S]) -> i32 {
    let args: Vec<&str> = argv.iter().map(AsRef::as_ref).collect();
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            match &e {
                CliError::Input(m) => eprintln!("error: {m}"),
                CliError::Numerical(m) => eprintln!("numerical failure: {m}"),
            }
            e.code()
        }
    }
}

fn run(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Steady { config, stability_check } => steady(&load_config(&config)?, stability_check),
        Command::Spectrum { config, manifest, name, common } => {
            let (params, grid) = match (config, manifest) {
                (Some(c), _) => {
                    let cfg = load_config(&c)?;
                    (cfg.params, common.grid.or(cfg.grid).unwrap_or_default())
                }
                (None, Some(m)) => {
                    let man = read_manifest(&m)?;
                    let [point] = man.points.as_slice() else {
                        return Err(CliError::Input(format!("{}: expected a single-spectrum manifest", m.display())));
                    };
                    (point.params, common.grid.or(point.grid).unwrap_or_default())
                }
                (None, None) => unreachable!("clap enforces --config or --manifest"),
            };
            spectrum(&params, &grid, &name, &common)
        }
        Command::Sweep { config, common } => sweep(&load_config(&config)?, &common),
        Command::Features { input } => features(&input),
        Command::Reproduce { figure, common } => reproduce(figure, &common),
    }
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Input(format!("cannot create {}: {e}", dir.display())))
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn report_warnings(label: &str, spectrum: &Spectrum) {
    for w in &spectrum.warnings {
        eprintln!("warning [{label}]: {w}");
    }
}

fn opts(common: &Common) -> SweepOptions {
    SweepOptions { workers: common.workers, stability_check: common.stability_check }
}

fn steady(cfg: &RunConfig, stability_check: bool) -> Result<(), CliError> {
    let params = &cfg.params;
    for w in params.validate().map_err(|e| CliError::Input(e.to_string()))? {
        eprintln!("warning: {w}");
    }
    let d0 = params.delta0();
    let states = solve_steady_state(params, d0)?;
    let selected = select_operating_state(&states).ok_or_else(|| CliError::Numerical("no steady state".into()))?;
    if let Some(w) = &selected.warning {
        eprintln!("warning: {w}");
    }
    println!("# delta0 = {d0:.9e} rad/s, {} admissible root(s)", states.len());
    println!("{:>3} {:>24} {:>24} {:>24} {:>24} {:>24} {:>8} {:>8}", "#", "intensity", "a_s", "q1_s_m", "q2_s_m", "delta1", "stable", "selected");
    for (i, s) in states.iter().enumerate() {
        let stable = if stability_check {
            match linear_stability(params, s) {
                Ok(true) => "yes",
                Ok(false) => {
                    if *s == selected.state {
                        eprintln!("warning: selected operating point is linearly unstable");
                    }
                    "no"
                }
                Err(_) => "unknown",
            }
        } else {
            "-"
        };
        let sel = if *s == selected.state { "*" } else { "" };
        println!(
            "{i:>3} {:>24.16e} {:>24.16e} {:>24.16e} {:>24.16e} {:>24.16e} {stable:>8} {sel:>8}",
            s.intensity, s.a_s, s.q1_s, s.q2_s, s.delta1
        );
    }
    Ok(())
}

fn output_path(dir: &Path, stem: &str, format: Format) -> PathBuf {
    dir.join(match format {
        Format::Csv => format!("{stem}.csv"),
        Format::Json => format!("{stem}.json"),
    })
}

fn save_spectrum(
    spectrum: &Spectrum,
    label: &str,
    grid: &DeltaGrid,
    command: &str,
    stem: &str,
    common: &Common,
) -> Result<RunManifest, CliError> {
    let manifest = RunManifest::new(command, vec![PointMeta::from_spectrum(label, spectrum, Some(*grid))]);
    let format = common.format.into();
    for p in export_spectrum(spectrum, &manifest, format, &output_path(&common.out, stem, format))? {
        println!("wrote {}", p.display());
    }
    Ok(manifest)
}

fn series_of(label: &str, spectrum: &Spectrum, q: Quantity) -> PlotSeries {
    PlotSeries { label: label.to_string(), x: spectrum.x_over_ref(), y: spectrum.values(q) }
}

fn plot(path: &Path, series: &[PlotSeries], title: &str, q: Quantity, run_ids: &[&str]) -> Result<(), CliError> {
    let style = PlotStyle {
        title: title.to_string(),
        y_label: q.label().to_string(),
        description: format!("run_id {}", run_ids.join(" ")),
        ..PlotStyle::default()
    };
    let svg = render_svg(series, &style).map_err(|e| CliError::Numerical(e.to_string()))?;
    write_text(path, &svg)
}

fn spectrum(params: &SystemParams, grid: &DeltaGrid, name: &str, common: &Common) -> Result<(), CliError> {
    ensure_dir(&common.out)?;
    let s = frequency_sweep(params, grid, &opts(common))?;
    report_warnings(name, &s);
    let manifest = save_spectrum(&s, name, grid, "spectrum", name, common)?;
    if common.svg {
        let path = common.out.join(format!("{name}.svg"));
        plot(&path, &[series_of(name, &s, Quantity::ReEpsT)], name, Quantity::ReEpsT, &[&manifest.run_id])?;
    }
    Ok(())
}

#[derive(Serialize)]
struct FeatureReport {
    cooperativity: f64,
    gamma_eff: f64,
    window_region: (f64, f64),
    extrema_re_eps_t: Vec<Extremum>,
    window: Option<crate::analysis::WindowFeatures>,
    window_error: Option<String>,
}

fn sweep(cfg: &RunConfig, common: &Common) -> Result<(), CliError> {
    let mut spec = cfg
        .sweep
        .clone()
        .ok_or_else(|| CliError::Input("config has no [sweep] section".into()))?;
    if let Some(g) = common.grid {
        spec.delta_grid = g;
    }
    ensure_dir(&common.out)?;
    let points = parameter_sweep(&cfg.params, &spec, &opts(common))?;

    let mut table = String::from("value,fwhm_rad_s,splitting_rad_s,dip_position_rad_s,dip_depth,central_peak_height,error\n");
    let mut metas = Vec::new();
    let mut series = Vec::new();
    for (i, p) in points.iter().enumerate() {
        match &p.outcome {
            Ok(r) => {
                let label = format!("{}={:.6e}", spec.axis, p.value);
                report_warnings(&label, &r.spectrum);
                metas.push(PointMeta::from_spectrum(&label, &r.spectrum, Some(spec.delta_grid)));
                let stem = format!("sweep_{i:03}");
                let manifest = RunManifest::new("sweep", vec![metas.last().cloned().unwrap_or_else(|| unreachable!())]);
                let format = common.format.into();
                for f in export_spectrum(&r.spectrum, &manifest, format, &output_path(&common.out, &stem, format))? {
                    println!("wrote {}", f.display());
                }
                series.push(series_of(&label, &r.spectrum, Quantity::ReEpsT));
                match &r.window {
                    Some(w) => table.push_str(&format!(
                        "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{},\n",
                        p.value,
                        w.fwhm,
                        w.splitting,
                        w.dip_position,
                        w.dip_depth,
                        w.central_peak_height.map(|h| format!("{h:.16e}")).unwrap_or_default()
                    )),
                    None => table.push_str(&format!("{:.16e},,,,,,no window\n", p.value)),
                }
            }
            Err(msg) => {
                eprintln!("warning: {} = {:.6e} failed: {msg}", spec.axis, p.value);
                table.push_str(&format!("{:.16e},,,,,,\"{}\"\n", p.value, msg.replace('"', "'")));
            }
        }
    }
    let table_path = common.out.join("sweep_features.csv");
    write_text(&table_path, &table)?;
    let manifest = RunManifest::new("sweep", metas);
    write_manifest(&manifest, &manifest_path_for(&table_path))?;
    if common.svg && !series.is_empty() {
        plot(&common.out.join("sweep.svg"), &series, &spec.axis, Quantity::ReEpsT, &[&manifest.run_id])?;
    }
    Ok(())
}

fn features(input: &Path) -> Result<(), CliError> {
    let is_json = input.extension().is_some_and(|e| e == "json");
    let (grid, re_eps, params, state): (Vec<f64>, Vec<f64>, SystemParams, SteadyState) = if is_json {
        let (_, s) = import_json(input)?;
        let re = s.values(Quantity::ReEpsT);
        (s.delta_grid, re, s.params_snapshot, s.steady)
    } else {
        let table = import_csv(input)?;
        let side = manifest_path_for(input);
        let manifest = read_manifest(&side)?;
        let [point] = manifest.points.as_slice() else {
            return Err(CliError::Input(format!("{}: expected a single-spectrum manifest", side.display())));
        };
        let col = |n: &str| table.column(n).map(<[f64]>::to_vec).unwrap_or_default();
        (col("delta_rad_s"), col("re_eps_t"), point.params, point.steady)
    };
    let coop = cooperativity_report(&params, &state);
    let region = window_region(&params, &state);
    let (lo, hi) = (grid.partition_point(|&d| d < region.0), grid.partition_point(|&d| d <= region.1));
    let extrema = find_extrema_in(&grid[lo..hi], &re_eps[lo..hi])?;
    let (window, window_error) = match window_features_in(&grid, &re_eps, region) {
        Ok(w) => (Some(w), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let report = FeatureReport {
        cooperativity: coop.cooperativity,
        gamma_eff: coop.gamma_eff,
        window_region: region,
        extrema_re_eps_t: extrema,
        window,
        window_error,
    };
    let text = serde_json::to_string_pretty(&report).map_err(|e| CliError::Numerical(e.to_string()))?;
    println!("{text}");
    Ok(())
}

fn reproduce(figure: Figure, common: &Common) -> Result<(), CliError> {
    ensure_dir(&common.out)?;
    let figs = match figure {
        Figure::All => vec![Figure::Fig2, Figure::Fig4, Figure::Fig5, Figure::Fig6, Figure::Fig7],
        f => vec![f],
    };
    let grid = common.grid.unwrap_or_default();
    for f in figs {
        match f {
            Figure::Fig2 => overlay("fig2", &presets::fig2(), &grid, common, &[Quantity::ReEpsT])?,
            Figure::Fig4 => fig4(&grid, common)?,
            Figure::Fig5 => overlay("fig5", &presets::fig5(), &grid, common, &[Quantity::ReEpsT])?,
            Figure::Fig6 => overlay("fig6", &presets::fig6(), &grid, common, &[Quantity::SidebandMag, Quantity::ReEpsT])?,
            Figure::Fig7 => overlay("fig7", &presets::fig7(), &grid, common, &[Quantity::ReEpsT, Quantity::ReQcmNorm])?,
            Figure::All => unreachable!(),
        }
    }
    Ok(())
}

/// Spectra for every series, one data file each, and one SVG per quantity
/// (the first quantity goes to `<fig>.svg`).
fn overlay(fig: &str, series: &[Series], grid: &DeltaGrid, common: &Common, quantities: &[Quantity]) -> Result<(), CliError> {
    let command = format!("reproduce {fig}");
    let mut spectra = Vec::new();
    let mut ids = Vec::new();
    for s in series {
        let sp = frequency_sweep(&s.params, grid, &opts(common))?;
        report_warnings(&s.label, &sp);
        let m = save_spectrum(&sp, &s.label, grid, &command, &format!("{fig}_{}", s.label), common)?;
        ids.push(m.run_id);
        spectra.push(sp);
    }
    let ids: Vec<&str> = ids.iter().map(String::as_str).collect();
    for (k, &q) in quantities.iter().enumerate() {
        let lines: Vec<PlotSeries> = series.iter().zip(&spectra).map(|(s, sp)| series_of(&s.label, sp, q)).collect();
        let name = if k == 0 { format!("{fig}.svg") } else { format!("{fig}_{k}.svg") };
        plot(&common.out.join(name), &lines, fig, q, &ids)?;
    }
    Ok(())
}

fn fig4(grid: &DeltaGrid, common: &Common) -> Result<(), CliError> {
    let (base, ratios) = presets::fig4();
    let g1 = base.g_reference();
    let gs: Vec<f64> = ratios.iter().map(|r| r * g1).collect();
    let table = splitting_vs_coupling(&base, &gs, grid, &opts(common))?;
    let omega_m = base.mean_mechanical_frequency();
    let mut csv = String::from("g_over_g1,g_m,splitting_rad_s,splitting_over_ref\n");
    let mut metas = Vec::new();
    for (r, row) in ratios.iter().zip(&table.rows) {
        csv.push_str(&format!("{r:.16e},{:.16e},{:.16e},{:.16e}\n", row.g_m, row.splitting, row.splitting / omega_m));
        let p = base.with_g_m(row.g_m);
        let state = crate::steady_state::operating_point(&p, &crate::steady_state::SteadyOptions::default())?.state;
        metas.push(PointMeta {
            label: format!("g/g1={r:.3}"),
            params: p,
            grid: Some(*grid),
            steady: state,
            n_real_roots: state.n_real_roots,
            stable: state.stable,
            warnings: Vec::new(),
        });
    }
    if let Some(fit) = table.fit {
        println!("fig4 splitting fit: slope {:.6e} (rad/s per g_m unit), R^2 {:.6}", fit.slope, fit.r_squared);
    }
    let path = common.out.join("fig4_splitting.csv");
    write_text(&path, &csv)?;
    let manifest = RunManifest::new("reproduce fig4", metas);
    write_manifest(&manifest, &manifest_path_for(&path))?;
    let series = PlotSeries {
        label: "splitting".into(),
        x: ratios.clone(),
        y: table.rows.iter().map(|r| r.splitting / omega_m).collect(),
    };
    let style = PlotStyle {
        title: "fig4".into(),
        x_label: "g_m / g_1".into(),
        y_label: "splitting / omega_m".into(),
        description: format!("run_id {}", manifest.run_id),
        ..PlotStyle::default()
    };
    let svg = render_svg(&[series], &style).map_err(|e| CliError::Numerical(e.to_string()))?;
    write_text(&common.out.join("fig4.svg"), &svg)
}
