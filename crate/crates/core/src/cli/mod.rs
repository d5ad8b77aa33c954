//! Command-line front end.
//!
//! Each subcommand computes its artifacts in memory first; files are written
//! only after every computation succeeded, followed by `manifest.json`.
//! Exit status: 0 success, 1 usage or config error, 2 computation or I/O
//! error.

pub mod config;
mod manifest;

use std::ffi::OsString;
use std::fmt;
use std::path::{Path, PathBuf};

use clap::{CommandFactory, Parser, ValueEnum};
use serde_json::{json, Value};

use crate::acoustics::{bessel_mode_area, effective_area_from_radii, fit_mode_radii, synthesize_mode_field, ModeField};
use crate::cavity::{antistokes_response, cavity_derived_params, coupling_budget, CalibrationBundle, CavityParams};
use crate::grid::Axis;
use crate::layout::{export_geometry, generate_focusing_circuit, GeometryFormat};
use crate::materials::resonance_frequency;
use crate::optoelastics::{
    argmax_along_z_axis, integrated_phase_map, polarization_selectivity, sideband_power_map, PhaseMap, Polarization,
};
use crate::render::{heatmap_svg, mode_field_csv, phase_map_csv, Scale};
use crate::spectra::{
    fit_resonance, linear_sweep, sideband_spectrum, synthetic_fano_trace, synthetic_power_trace, LineShape, RfTrace,
    TraceValues,
};
use crate::Error;

pub use config::{parse_config, ConfigErrors, RunConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl Format {
    pub fn parse(s: &str) -> Option<Format> {
        match s {
            "csv" => Some(Format::Csv),
            "json" => Some(Format::Json),
            "svg" => Some(Format::Svg),
            _ => None,
        }
    }

    fn of(file: &str) -> Option<Format> {
        Format::parse(file.rsplit('.').next()?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Material,
    Layout,
    Modemap,
    Phasemap,
    Selectivity,
    Spectrum,
    Cavity,
    Budget,
    All,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Material => "material",
            Command::Layout => "layout",
            Command::Modemap => "modemap",
            Command::Phasemap => "phasemap",
            Command::Selectivity => "selectivity",
            Command::Spectrum => "spectrum",
            Command::Cavity => "cavity",
            Command::Budget => "budget",
            Command::All => "all",
        }
    }

    /// Config sections a subcommand cannot run without.
    fn required_sections(self) -> &'static [&'static str] {
        match self {
            Command::Material => &["material"],
            Command::Layout => &["material", "layout"],
            Command::Modemap => &["mode"],
            Command::Phasemap | Command::Selectivity => &["material", "mode", "optics"],
            Command::Spectrum => &["spectrum"],
            Command::Cavity => &["cavity", "optics"],
            Command::Budget => &["material", "calibration", "cavity", "optics"],
            Command::All => &[],
        }
    }
}

const SINGLE: [Command; 8] = [
    Command::Material,
    Command::Layout,
    Command::Modemap,
    Command::Phasemap,
    Command::Selectivity,
    Command::Spectrum,
    Command::Cavity,
    Command::Budget,
];

/// SAW cavity optomechanics toolkit.
#[derive(Debug, Parser)]
#[command(name = "saw-optomech", version)]
pub struct Cli {
    /// What to compute.
    #[arg(value_enum)]
    pub command: Command,
    /// TOML run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory (default: the config's output.directory, else `out`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Restrict written artifacts to these formats; repeatable.
    #[arg(long = "format", value_enum)]
    pub formats: Vec<Format>,
    /// Noise seed for synthetic spectra.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads for gridded computations.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug)]
pub enum RunError {
    Usage(String),
    Config(ConfigErrors),
    Compute(Error),
    Io(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Usage(_) | RunError::Config(_) => 1,
            RunError::Compute(_) | RunError::Io(_) => 2,
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Usage(m) => write!(f, "error: {m}"),
            RunError::Config(e) => {
                writeln!(f, "error: invalid configuration")?;
                for line in &e.0 {
                    writeln!(f, "  {line}")?;
                }
                Ok(())
            }
            RunError::Compute(e) => write!(f, "error: computation failed: {e}"),
            RunError::Io(m) => write!(f, "error: {m}"),
        }
    }
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        RunError::Compute(e)
    }
}

/// One output file, held in memory until the whole run succeeded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub file: String,
    pub bytes: Vec<u8>,
}

fn json_artifact(file: &str, value: &Value) -> Artifact {
    let mut text = serde_json::to_string_pretty(value).expect("JSON values serialise");
    text.push('\n');
    Artifact {
        file: file.to_string(),
        bytes: text.into_bytes(),
    }
}

fn text_artifact(file: &str, text: String) -> Artifact {
    Artifact {
        file: file.to_string(),
        bytes: text.into_bytes(),
    }
}

/// Parses `args` (including the program name) and runs; returns the exit
/// status.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            if !e.use_stderr() {
                return 0;
            }
            eprintln!("\n{}", Cli::command().render_usage());
            return 1;
        }
    };
    match run(&cli) {
        Ok(written) => {
            for path in written {
                println!("{}", path.display());
            }
            0
        }
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

/// Executes a parsed command line; returns the paths written.
pub fn run(cli: &Cli) -> Result<Vec<PathBuf>, RunError> {
    let config_bytes = match &cli.config {
        Some(path) => {
            std::fs::read(path).map_err(|e| RunError::Usage(format!("cannot read {}: {e}", path.display())))?
        }
        None => Vec::new(),
    };
    let text = std::str::from_utf8(&config_bytes).map_err(|_| RunError::Usage("config is not UTF-8".into()))?;
    let cfg = parse_config(text).map_err(RunError::Config)?;
    let base_dir = cli.config.as_deref().and_then(Path::parent).unwrap_or(Path::new("."));

    let threads = match cli.threads {
        Some(0) => return Err(RunError::Usage("--threads must be at least 1".into())),
        Some(n) => n,
        None => rayon::current_num_threads(),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| RunError::Io(format!("thread pool: {e}")))?;
    let artifacts = pool.install(|| compute(cli.command, &cfg, cli.seed, base_dir))?;

    let formats: Vec<Format> = if !cli.formats.is_empty() {
        cli.formats.clone()
    } else {
        cfg.output
            .formats
            .clone()
            .unwrap_or_else(|| vec![Format::Csv, Format::Json, Format::Svg])
    };
    let selected: Vec<Artifact> = artifacts
        .into_iter()
        .filter(|a| Format::of(&a.file).is_some_and(|f| formats.contains(&f)))
        .collect();
    let out_dir = cli
        .out
        .clone()
        .or_else(|| cfg.output.directory.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    manifest::write_outputs(&out_dir, cli.command.name(), &config_bytes, cli.seed, &selected)
}

/// Computes the artifacts of one subcommand without touching the disk.
pub fn compute(
    command: Command,
    cfg: &RunConfig,
    seed: Option<u64>,
    base_dir: &Path,
) -> Result<Vec<Artifact>, RunError> {
    if command == Command::All {
        let runnable: Vec<Command> = SINGLE
            .into_iter()
            .filter(|c| missing_section(*c, cfg).is_none())
            .collect();
        if runnable.is_empty() {
            return Err(RunError::Usage(
                "`all` found no subcommand whose config sections are present".into(),
            ));
        }
        for c in SINGLE.iter().filter(|c| !runnable.contains(c)) {
            eprintln!(
                "skipping {}: missing [{}]",
                c.name(),
                missing_section(*c, cfg).unwrap_or_default()
            );
        }
        let mut out = Vec::new();
        for c in runnable {
            out.extend(compute(c, cfg, seed, base_dir)?);
        }
        return Ok(out);
    }
    if let Some(section) = missing_section(command, cfg) {
        return Err(RunError::Usage(format!(
            "`{}` needs a [{section}] section in the config",
            command.name()
        )));
    }
    match command {
        Command::Material => material(cfg),
        Command::Layout => layout(cfg),
        Command::Modemap => modemap(cfg),
        Command::Phasemap => phasemap(cfg),
        Command::Selectivity => selectivity(cfg),
        Command::Spectrum => spectrum(cfg, seed, base_dir),
        Command::Cavity => cavity(cfg),
        Command::Budget => budget(cfg),
        Command::All => unreachable!("handled above"),
    }
}

fn missing_section(command: Command, cfg: &RunConfig) -> Option<&'static str> {
    command.required_sections().iter().copied().find(|s| !match *s {
        "material" => cfg.material.is_some(),
        "layout" => cfg.layout.is_some(),
        "mode" => cfg.mode.is_some(),
        "optics" => cfg.optics.is_some(),
        "cavity" => cfg.cavity.is_some(),
        "calibration" => cfg.calibration.is_some(),
        "spectrum" => cfg.spectrum.is_some(),
        _ => true,
    })
}

fn material(cfg: &RunConfig) -> Result<Vec<Artifact>, RunError> {
    let m = cfg.material.as_ref().expect("checked");
    let lambda = cfg
        .material_lambda_saw
        .or(cfg.layout.map(|l| l.lambda_saw))
        .or(cfg.mode.map(|m| m.lambda_saw));
    let resonance = lambda.map(|l| resonance_frequency(m, l)).transpose()?;
    let report = json!({
        "cut": m.cut.to_string(),
        "v_saw_m_per_s": m.v_saw,
        "n_e": m.n_e,
        "n_o": m.n_o,
        "density_kg_per_m3": m.density,
        "optoelastic": m.tensor,
        "anisotropy": m.anisotropy.fourier_coeffs(),
        "lambda_saw_m": lambda,
        "resonance_frequency_hz": resonance,
    });
    Ok(vec![json_artifact("material.json", &report)])
}

fn layout(cfg: &RunConfig) -> Result<Vec<Artifact>, RunError> {
    let m = cfg.material.as_ref().expect("checked");
    let spec = cfg.layout.expect("checked");
    let geom = generate_focusing_circuit(m, &spec)?;
    let area = bessel_mode_area(geom.r_eff, spec.lambda_saw)?;
    let report = json!({
        "cut": m.cut.to_string(),
        "lambda_saw_m": geom.lambda_saw,
        "resonance_frequency_hz": resonance_frequency(m, spec.lambda_saw)?,
        "electrode_width_m": geom.electrode_width,
        "electrode_gap_m": geom.electrode_gap,
        "idt_pairs": geom.idt_pairs,
        "mirror_pairs": geom.mirror_pairs,
        "contours": geom.contours.len(),
        "r_eff_m": geom.r_eff,
        "mode_area_m2": area.a_exact,
        "mode_area_asymptotic_m2": area.a_asymptotic,
        "bessel_nodes": area.n_nodes,
        "eta": area.eta,
        "focusing_gain": area.focusing_gain(),
    });
    Ok(vec![
        Artifact {
            file: "layout.svg".into(),
            bytes: export_geometry(&geom, GeometryFormat::Svg),
        },
        Artifact {
            file: "layout.csv".into(),
            bytes: export_geometry(&geom, GeometryFormat::Csv),
        },
        json_artifact("layout.json", &report),
    ])
}

fn mode_report(mode: &ModeField) -> Result<Value, RunError> {
    let abs = mode.u_amplitude.map(f64::abs);
    let fit_x = fit_mode_radii(&abs, Axis::X)?;
    let fit_z = fit_mode_radii(&abs, Axis::Z)?;
    Ok(json!({
        "r_x_m": mode.r_x,
        "r_z_m": mode.r_z,
        "fitted_r_x_m": fit_x,
        "fitted_r_z_m": fit_z,
        "mode_area_m2": effective_area_from_radii(fit_x, fit_z),
        "envelope_x_m": mode.envelope_x,
        "envelope_z_m": mode.envelope_z,
        "first_node_x_m": mode.node_along(Axis::X, 1),
        "first_node_z_m": mode.node_along(Axis::Z, 1),
        "decay_depth_m": mode.decay_depth,
        "grid_extent_m": mode.grid().extent,
        "grid_points": mode.grid().points,
    }))
}

fn modemap(cfg: &RunConfig) -> Result<Vec<Artifact>, RunError> {
    let mode = synthesize_mode_field(cfg.mode.as_ref().expect("checked"))?;
    Ok(vec![
        text_artifact("modemap.csv", mode_field_csv(&mode)),
        text_artifact(
            "modemap.svg",
            heatmap_svg(
                &mode.u_amplitude,
                "SAW displacement amplitude U(x, z)",
                "m",
                Scale::Symmetric,
            ),
        ),
        json_artifact("modemap.json", &mode_report(&mode)?),
    ])
}

fn phase_summary(map: &PhaseMap) -> Value {
    let grid = map.phi.grid;
    let (ix, iz, peak) = map.phi.abs_argmax();
    json!({
        "peak_phi_rad": peak,
        "peak_x_m": grid.coord(ix),
        "peak_z_m": grid.coord(iz),
        "z_axis_peak_z_m": grid.coord(argmax_along_z_axis(map)),
        "centre_phi_rad": map.phi.get(grid.nearest_index(0.0), grid.nearest_index(0.0)),
    })
}

fn phasemap(cfg: &RunConfig) -> Result<Vec<Artifact>, RunError> {
    let m = cfg.material.as_ref().expect("checked");
    let optics = cfg.optics.as_ref().expect("checked");
    let mode = synthesize_mode_field(cfg.mode.as_ref().expect("checked"))?;
    let mut out = Vec::new();
    let mut summary = serde_json::Map::new();
    for pol in [Polarization::X, Polarization::Z] {
        let map = integrated_phase_map(&mode, pol, optics.lambda_opt, m)?;
        let tag = pol.label().to_ascii_lowercase();
        let power = sideband_power_map(&map);
        out.push(text_artifact(&format!("phasemap_{tag}.csv"), phase_map_csv(&map)));
        out.push(text_artifact(
            &format!("phasemap_{tag}.svg"),
            heatmap_svg(
                &power,
                &format!("{} polarization: normalised sideband power", pol.label()),
                "",
                Scale::Linear,
            ),
        ));
        summary.insert(tag, phase_summary(&map));
    }
    summary.insert("lambda_opt_m".into(), json!(optics.lambda_opt));
    out.push(json_artifact("phasemap.json", &Value::Object(summary)));
    Ok(out)
}

fn selectivity(cfg: &RunConfig) -> Result<Vec<Artifact>, RunError> {
    let m = cfg.material.as_ref().expect("checked");
    let optics = cfg.optics.as_ref().expect("checked");
    let mode = synthesize_mode_field(cfg.mode.as_ref().expect("checked"))?;
    let spot = optics.spot.unwrap_or((0.0, mode.node_along(Axis::Z, 1)));
    let at_spot = polarization_selectivity(&mode, m, spot, optics.lambda_opt, optics.beam_waist)?;
    let centre = polarization_selectivity(&mode, m, (0.0, 0.0), optics.lambda_opt, optics.beam_waist)?;
    let entry = |s: &crate::optoelastics::Selectivity, (x, z): (f64, f64)| {
        json!({
            "spot_x_m": x,
            "spot_z_m": z,
            "phi_x_rad": s.phi_x,
            "phi_z_rad": s.phi_z,
            "power_ratio_x_over_z": s.ratio.is_finite().then_some(s.ratio),
            "z_vanishes": s.z_vanishes,
        })
    };
    let report = json!({
        "beam_waist_m": optics.beam_waist,
        "lambda_opt_m": optics.lambda_opt,
        "spot": entry(&at_spot, spot),
        "centre": entry(&centre, (0.0, 0.0)),
    });
    Ok(vec![json_artifact("selectivity.json", &report)])
}

fn spectrum(cfg: &RunConfig, seed: Option<u64>, base_dir: &Path) -> Result<Vec<Artifact>, RunError> {
    use config::SpectrumSource;
    let sc = cfg.spectrum.as_ref().expect("checked");
    let mut out = Vec::new();
    let trace = match &sc.source {
        SpectrumSource::Csv(path) => {
            let path = if path.is_absolute() {
                path.clone()
            } else {
                base_dir.join(path)
            };
            let text = std::fs::read_to_string(&path)
                .map_err(|e| RunError::Usage(format!("cannot read trace {}: {e}", path.display())))?;
            RfTrace::from_csv(&text)?
        }
        SpectrumSource::Synthetic {
            f0_hz,
            linewidth_hz,
            span_hz,
            points,
            amplitude,
            fano_phase_rad,
            noise_sigma,
        } => {
            let freqs = linear_sweep(f0_hz - 0.5 * span_hz, f0_hz + 0.5 * span_hz, *points);
            let noise = (*noise_sigma > 0.0).then(|| (*noise_sigma, seed.unwrap_or(0)));
            let trace = match sc.model {
                LineShape::Fano => synthetic_fano_trace(
                    freqs,
                    *f0_hz,
                    *linewidth_hz,
                    num_complex::Complex64::new(1.0, 0.0),
                    *amplitude,
                    *fano_phase_rad,
                    noise,
                )?,
                shape => synthetic_power_trace(freqs, shape, *f0_hz, *linewidth_hz, *amplitude, 0.0, noise)?,
            };
            out.push(text_artifact("spectrum_trace.csv", trace.to_csv()));
            trace
        }
    };
    let fit = fit_resonance(&trace, sc.model)?;
    let mut report = json!({ "fit": fit, "points": trace.frequencies().len() });
    if let SpectrumSource::Synthetic { noise_sigma, .. } = sc.source {
        if noise_sigma > 0.0 {
            report["noise_seed"] = json!(seed.unwrap_or(0));
        }
    }
    if let Some(phi) = sc.sideband_phase_rad {
        let sb = sideband_spectrum(fit.f0_hz, fit.q, trace.frequencies(), phi)?;
        report["sideband_peak_fraction"] = json!(sb.peak_fraction);
        let mut csv = String::from("drive_frequency_hz,sideband_power\n");
        for (f, p) in sb.drive_frequencies.iter().zip(&sb.sideband_power) {
            csv.push_str(&format!("{f:e},{p:e}\n"));
        }
        out.push(text_artifact("sideband.csv", csv));
    }
    out.push(json_artifact("spectrum.json", &report));
    Ok(out)
}

fn cavity_params(cfg: &RunConfig) -> CavityParams {
    let c = cfg.cavity.as_ref().expect("checked");
    CavityParams {
        length: c.length,
        mirror_roc: c.mirror_roc,
        reflectivity: c.reflectivity,
        lambda_opt: cfg.optics.as_ref().expect("checked").lambda_opt,
        kappa_measured: c.kappa_measured,
    }
}

fn cavity(cfg: &RunConfig) -> Result<Vec<Artifact>, RunError> {
    let params = cavity_params(cfg);
    let derived = cavity_derived_params(&params)?;
    let kappa = derived.kappa_hz;
    let detunings = linear_sweep(-5.0 * kappa, 5.0 * kappa, 201);
    let response = antistokes_response(&detunings, kappa)?;
    let trace = RfTrace::new(detunings.clone(), TraceValues::Power(response.clone()))?;
    let fit = fit_resonance(&trace, LineShape::Lorentzian)?;
    let mut csv = String::from("detuning_hz,antistokes_power\n");
    for (d, r) in detunings.iter().zip(&response) {
        csv.push_str(&format!("{d:e},{r:e}\n"));
    }
    let report = json!({
        "cavity": params,
        "derived": derived,
        "antistokes_fitted_fwhm_hz": fit.linewidth_fwhm_hz,
    });
    Ok(vec![
        text_artifact("antistokes.csv", csv),
        json_artifact("cavity.json", &report),
    ])
}

fn budget(cfg: &RunConfig) -> Result<Vec<Artifact>, RunError> {
    let c = cfg.calibration.as_ref().expect("checked");
    let bundle = CalibrationBundle {
        material: cfg.material.clone().expect("checked"),
        lambda_saw_m: c.lambda_saw_m,
        decay_depth_m: c.decay_depth_m,
        saw_frequency_hz: c.saw_frequency_hz,
        saw_q: c.saw_q,
        rf_power_w: c.rf_power_w,
        s11_mag: c.s11_mag,
        sideband_power_w: c.sideband_power_w,
        reference_sideband_power_w: c.reference_sideband_power_w,
        reference_phase_rad: c.reference_phase_rad,
        mode_radius_x_m: c.mode_radius_x_m,
        mode_radius_z_m: c.mode_radius_z_m,
        cavity: cavity_params(cfg),
        prospect: cfg.prospect.unwrap_or_default(),
    };
    let b = coupling_budget(&bundle)?;
    let value = serde_json::to_value(&b).expect("budget serialises");
    Ok(vec![json_artifact("budget.json", &value)])
}
