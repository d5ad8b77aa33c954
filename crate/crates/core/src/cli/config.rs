//! Run configuration: TOML sections checked against a fixed schema.
//!
//! Quantities are SI and carry their unit in the key name (`_m`, `_hz`,
//! `_w`, `_rad`, ...). Unknown keys are rejected; a key that differs from a
//! known one only by its unit suffix is reported as a unit mismatch.

use std::fmt;
use std::path::PathBuf;

use toml::{Table, Value};

use crate::acoustics::{default_decay_depth, ModeSpec};
use crate::cavity::ProspectKnobs;
use crate::layout::LayoutSpec;
use crate::materials::{material_for_cut, MaterialProperties, OptoelasticTensor, LITHIUM_NIOBATE_DENSITY};
use crate::spectra::LineShape;

use super::Format;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldError {
    pub path: String,
    pub message: String,
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

/// Every problem found in one config, in file order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigErrors(pub Vec<FieldError>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigErrors {}

type Schema = &'static [&'static str];

const MATERIAL: Schema = &[
    "cut",
    "v_saw_m_per_s",
    "n_e",
    "n_o",
    "density_kg_per_m3",
    "p11",
    "p12",
    "p13",
    "p14",
    "p31",
    "p33",
    "p41",
    "p44",
    "anisotropy",
    "lambda_saw_m",
];
const LAYOUT: Schema = &[
    "lambda_saw_m",
    "idt_pairs",
    "mirror_pairs",
    "inner_clear_radius_m",
    "samples_per_contour",
];
const MODE: Schema = &[
    "r_x_m",
    "r_z_m",
    "lambda_saw_m",
    "u0_m",
    "decay_depth_m",
    "grid_extent_m",
    "grid_points",
];
const OPTICS: Schema = &["lambda_opt_m", "beam_waist_m", "spot_x_m", "spot_z_m"];
const CAVITY: Schema = &["length_m", "mirror_roc_m", "reflectivity", "kappa_measured_hz"];
const CALIBRATION: Schema = &[
    "saw_frequency_hz",
    "saw_q",
    "rf_power_w",
    "s11_mag",
    "sideband_power_w",
    "reference_sideband_power_w",
    "reference_phase_rad",
    "lambda_saw_m",
    "decay_depth_m",
    "mode_radius_x_m",
    "mode_radius_z_m",
];
const PROSPECT: Schema = &[
    "cavity_length_m",
    "optical_power_w",
    "mechanical_frequency_hz",
    "mechanical_q",
    "detuning_hz",
    "kappa_ext_hz",
];
const SPECTRUM: Schema = &[
    "trace_csv",
    "model",
    "f0_hz",
    "linewidth_hz",
    "span_hz",
    "points",
    "amplitude",
    "fano_phase_rad",
    "noise_sigma",
    "sideband_phase_rad",
];
const OUTPUT: Schema = &["directory", "formats"];

const SECTIONS: &[(&str, Schema)] = &[
    ("material", MATERIAL),
    ("layout", LAYOUT),
    ("mode", MODE),
    ("optics", OPTICS),
    ("cavity", CAVITY),
    ("calibration", CALIBRATION),
    ("prospect", PROSPECT),
    ("spectrum", SPECTRUM),
    ("output", OUTPUT),
];

/// Unit suffixes recognised when diagnosing a misnamed key; the SI ones are
/// first, the rest are common non-SI spellings.
const UNIT_SUFFIXES: &[&str] = &[
    "_m_per_s",
    "_kg_per_m3",
    "_m",
    "_hz",
    "_w",
    "_rad",
    "_um",
    "_nm",
    "_mm",
    "_cm",
    "_khz",
    "_mhz",
    "_ghz",
    "_mw",
    "_uw",
    "_dbm",
    "_deg",
    "_s",
    "_mps",
];

fn strip_unit(key: &str) -> &str {
    UNIT_SUFFIXES
        .iter()
        .find_map(|s| key.strip_suffix(s).filter(|stem| !stem.is_empty()))
        .unwrap_or(key)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OpticsConfig {
    pub lambda_opt: f64,
    pub beam_waist: f64,
    pub spot: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CavityConfig {
    pub length: f64,
    pub mirror_roc: f64,
    pub reflectivity: f64,
    pub kappa_measured: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationConfig {
    pub saw_frequency_hz: f64,
    pub saw_q: f64,
    pub rf_power_w: f64,
    pub s11_mag: f64,
    pub sideband_power_w: f64,
    pub reference_sideband_power_w: f64,
    pub reference_phase_rad: f64,
    pub lambda_saw_m: f64,
    pub decay_depth_m: f64,
    pub mode_radius_x_m: f64,
    pub mode_radius_z_m: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SpectrumSource {
    Csv(PathBuf),
    Synthetic {
        f0_hz: f64,
        linewidth_hz: f64,
        span_hz: f64,
        points: usize,
        amplitude: f64,
        fano_phase_rad: f64,
        noise_sigma: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumConfig {
    pub source: SpectrumSource,
    pub model: LineShape,
    pub sideband_phase_rad: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct OutputConfig {
    pub directory: Option<PathBuf>,
    pub formats: Option<Vec<Format>>,
}

/// Validated configuration; `None` marks an absent section.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunConfig {
    pub material: Option<MaterialProperties>,
    /// SAW wavelength given alongside the material, for the resonance report.
    pub material_lambda_saw: Option<f64>,
    pub layout: Option<LayoutSpec>,
    pub mode: Option<ModeSpec>,
    pub optics: Option<OpticsConfig>,
    pub cavity: Option<CavityConfig>,
    pub calibration: Option<CalibrationConfig>,
    pub prospect: Option<ProspectKnobs>,
    pub spectrum: Option<SpectrumConfig>,
    pub output: OutputConfig,
}

/// Reader over one section that records errors instead of stopping.
struct Section<'a> {
    name: &'static str,
    table: &'a Table,
    errors: &'a mut Vec<FieldError>,
}

impl Section<'_> {
    fn err(&mut self, key: &str, message: impl Into<String>) {
        self.errors.push(FieldError {
            path: format!("{}.{key}", self.name),
            message: message.into(),
        });
    }

    fn number(&mut self, key: &str) -> Option<f64> {
        match self.table.get(key)? {
            Value::Float(v) => Some(*v),
            Value::Integer(v) => Some(*v as f64),
            _ => {
                self.err(key, "expected a number");
                None
            }
        }
    }

    fn required(&mut self, key: &str) -> Option<f64> {
        let v = self.number(key);
        if v.is_none() && !self.table.contains_key(key) {
            self.err(key, "missing required field");
        }
        v
    }

    fn check(&mut self, key: &str, v: Option<f64>, ok: impl Fn(f64) -> bool, what: &str) -> Option<f64> {
        match v {
            Some(x) if !(x.is_finite() && ok(x)) => {
                self.err(key, format!("{what}: {x}"));
                None
            }
            other => other,
        }
    }

    fn positive(&mut self, key: &str, v: Option<f64>) -> Option<f64> {
        self.check(key, v, |x| x > 0.0, "must be positive")
    }

    fn wavelength(&mut self, key: &str, v: Option<f64>) -> Option<f64> {
        self.check(key, v, |x| x > 0.0, "invalid wavelength")
    }

    fn integer(&mut self, key: &str) -> Option<usize> {
        match self.table.get(key)? {
            Value::Integer(v) if *v >= 0 => Some(*v as usize),
            _ => {
                self.err(key, "expected a non-negative integer");
                None
            }
        }
    }

    fn text(&mut self, key: &str) -> Option<String> {
        match self.table.get(key)? {
            Value::String(s) => Some(s.clone()),
            _ => {
                self.err(key, "expected a string");
                None
            }
        }
    }

    fn texts(&mut self, key: &str) -> Option<Vec<String>> {
        let items = match self.table.get(key)? {
            Value::Array(a) => a,
            _ => {
                self.err(key, "expected an array of strings");
                return None;
            }
        };
        let out: Option<Vec<String>> = items.iter().map(|v| v.as_str().map(str::to_string)).collect();
        if out.is_none() {
            self.err(key, "expected an array of strings");
        }
        out
    }

    fn pairs(&mut self, key: &str) -> Option<Vec<(u32, f64)>> {
        let parsed = match self.table.get(key)? {
            Value::Array(a) => a
                .iter()
                .map(|p| match p.as_array().map(|v| v.as_slice()) {
                    Some([Value::Integer(k), a]) if *k >= 1 && *k <= u32::MAX as i64 => {
                        let a = a.as_float().or_else(|| a.as_integer().map(|i| i as f64))?;
                        Some((*k as u32, a))
                    }
                    _ => None,
                })
                .collect::<Option<Vec<_>>>(),
            _ => None,
        };
        if parsed.is_none() {
            self.err(key, "expected [[harmonic, coefficient], ...] with harmonic >= 1");
        }
        parsed
    }
}

fn check_keys(name: &str, table: &Table, schema: Schema, errors: &mut Vec<FieldError>) {
    for key in table.keys() {
        if schema.contains(&key.as_str()) {
            continue;
        }
        let stem = strip_unit(key);
        let message = match schema.iter().find(|k| strip_unit(k) == stem || **k == stem) {
            Some(expected) => format!("unit-suffix mismatch: expected `{expected}` (SI units)"),
            None => "unknown key".to_string(),
        };
        errors.push(FieldError {
            path: format!("{name}.{key}"),
            message,
        });
    }
}

/// Parses and validates a config, collecting every field-level error.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigErrors> {
    let root: Table = text.parse().map_err(|e: toml::de::Error| {
        ConfigErrors(vec![FieldError {
            path: "<config>".into(),
            message: e.message().to_string(),
        }])
    })?;
    let mut errors = Vec::new();
    let mut sections: Vec<(&'static str, &Table)> = Vec::new();
    for (name, value) in &root {
        match (SECTIONS.iter().find(|(s, _)| s == name), value) {
            (Some((s, schema)), Value::Table(t)) => {
                check_keys(s, t, schema, &mut errors);
                sections.push((s, t));
            }
            (Some(_), _) => errors.push(FieldError {
                path: name.clone(),
                message: "expected a section".into(),
            }),
            (None, _) => errors.push(FieldError {
                path: name.clone(),
                message: "unknown section".into(),
            }),
        }
    }

    let mut cfg = RunConfig::default();
    for (name, table) in sections {
        let mut s = Section {
            name,
            table,
            errors: &mut errors,
        };
        match name {
            "material" => {
                let (m, lambda) = read_material(&mut s);
                cfg.material = m;
                cfg.material_lambda_saw = lambda;
            }
            "layout" => cfg.layout = read_layout(&mut s),
            "mode" => cfg.mode = read_mode(&mut s),
            "optics" => cfg.optics = read_optics(&mut s),
            "cavity" => cfg.cavity = read_cavity(&mut s),
            "calibration" => cfg.calibration = read_calibration(&mut s),
            "prospect" => cfg.prospect = read_prospect(&mut s),
            "spectrum" => cfg.spectrum = read_spectrum(&mut s),
            "output" => cfg.output = read_output(&mut s),
            _ => unreachable!("section list and schema agree"),
        }
    }
    if errors.is_empty() {
        Ok(cfg)
    } else {
        Err(ConfigErrors(errors))
    }
}

fn read_material(s: &mut Section) -> (Option<MaterialProperties>, Option<f64>) {
    let lambda = s.number("lambda_saw_m");
    let lambda = s.wavelength("lambda_saw_m", lambda);
    let cut = s.text("cut");
    if cut.is_none() && !s.table.contains_key("cut") {
        s.err("cut", "missing required field");
    }
    let anisotropy = s.pairs("anisotropy");
    let cut = match cut {
        Some(c) => c,
        None => return (None, lambda),
    };
    let base = match material_for_cut(&cut, &[]) {
        Ok(m) => m,
        Err(_) => {
            // custom cut: the SAW speed and indices are mandatory
            let v = s.required("v_saw_m_per_s");
            let n_e = s.required("n_e");
            let n_o = s.required("n_o");
            let (Some(v), Some(n_e), Some(n_o)) = (v, n_e, n_o) else {
                return (None, lambda);
            };
            let mut m = MaterialProperties::y_cut();
            m.cut = crate::materials::CutName::Custom(cut.clone());
            m.v_saw = v;
            m.n_e = n_e;
            m.n_o = n_o;
            m
        }
    };
    let builtin = !matches!(base.cut, crate::materials::CutName::Custom(_));
    if builtin {
        for key in ["v_saw_m_per_s", "n_e", "n_o"] {
            if s.table.contains_key(key) {
                s.err(
                    key,
                    format!("fixed for the built-in cut `{cut}`; use a custom cut name to override"),
                );
            }
        }
    }
    let density = s.number("density_kg_per_m3").unwrap_or(LITHIUM_NIOBATE_DENSITY);
    let mut t: OptoelasticTensor = base.tensor;
    for (key, slot) in [
        ("p11", &mut t.p11),
        ("p12", &mut t.p12),
        ("p13", &mut t.p13),
        ("p14", &mut t.p14),
        ("p31", &mut t.p31),
        ("p33", &mut t.p33),
        ("p41", &mut t.p41),
        ("p44", &mut t.p44),
    ] {
        if let Some(v) = s.number(key) {
            *slot = v;
        }
    }
    let name = base.cut.to_string();
    let built = MaterialProperties::custom(
        &name,
        base.v_saw,
        base.n_e,
        base.n_o,
        t,
        density,
        anisotropy.unwrap_or_default(),
    );
    match built {
        Ok(mut m) => {
            m.cut = base.cut;
            (Some(m), lambda)
        }
        Err(e) => {
            s.err("cut", e.to_string());
            (None, lambda)
        }
    }
}

fn read_layout(s: &mut Section) -> Option<LayoutSpec> {
    let d = LayoutSpec::default();
    let lambda = s.required("lambda_saw_m");
    let lambda = s.wavelength("lambda_saw_m", lambda);
    let clear = s.number("inner_clear_radius_m");
    let clear = s.positive("inner_clear_radius_m", clear);
    let idt = s.integer("idt_pairs");
    let mirror = s.integer("mirror_pairs");
    let samples = s.integer("samples_per_contour");
    Some(LayoutSpec {
        lambda_saw: lambda?,
        idt_pairs: idt.unwrap_or(d.idt_pairs),
        mirror_pairs: mirror.unwrap_or(d.mirror_pairs),
        inner_clear_radius: clear.unwrap_or(d.inner_clear_radius),
        samples_per_contour: samples.unwrap_or(d.samples_per_contour),
    })
}

fn read_mode(s: &mut Section) -> Option<ModeSpec> {
    let d = ModeSpec::y_cut_focus();
    let r_x = s.required("r_x_m");
    let r_x = s.positive("r_x_m", r_x);
    let r_z = s.required("r_z_m");
    let r_z = s.positive("r_z_m", r_z);
    let lambda = s.required("lambda_saw_m");
    let lambda = s.wavelength("lambda_saw_m", lambda);
    let u0 = s.number("u0_m");
    let u0 = s.positive("u0_m", u0);
    let depth = s.number("decay_depth_m");
    let depth = s.positive("decay_depth_m", depth);
    let extent = s.number("grid_extent_m");
    let extent = s.positive("grid_extent_m", extent);
    let points = s.integer("grid_points");
    let lambda = lambda?;
    Some(ModeSpec {
        r_x: r_x?,
        r_z: r_z?,
        lambda_saw: lambda,
        u0: u0.unwrap_or(d.u0),
        decay_depth: depth.unwrap_or_else(|| default_decay_depth(lambda)),
        grid_extent: extent.unwrap_or(d.grid_extent),
        grid_points: points.unwrap_or(d.grid_points),
    })
}

fn read_optics(s: &mut Section) -> Option<OpticsConfig> {
    let lambda = s.required("lambda_opt_m");
    let lambda = s.wavelength("lambda_opt_m", lambda);
    let waist = s.number("beam_waist_m");
    let waist = s.positive("beam_waist_m", waist);
    let x = s.number("spot_x_m");
    let z = s.number("spot_z_m");
    let spot = match (x, z) {
        (Some(x), Some(z)) => Some((x, z)),
        (None, None) => None,
        _ => {
            s.err("spot_x_m", "spot_x_m and spot_z_m must be given together");
            None
        }
    };
    Some(OpticsConfig {
        lambda_opt: lambda?,
        beam_waist: waist.unwrap_or(3.5e-6),
        spot,
    })
}

fn read_cavity(s: &mut Section) -> Option<CavityConfig> {
    let length = s.required("length_m");
    let length = s.positive("length_m", length);
    let roc = s.required("mirror_roc_m");
    let roc = s.positive("mirror_roc_m", roc);
    let r = s.required("reflectivity");
    let r = s.check("reflectivity", r, |x| x > 0.0 && x < 1.0, "must lie in (0, 1)");
    let kappa = s.number("kappa_measured_hz");
    let kappa = s.positive("kappa_measured_hz", kappa);
    Some(CavityConfig {
        length: length?,
        mirror_roc: roc?,
        reflectivity: r?,
        kappa_measured: kappa,
    })
}

fn read_calibration(s: &mut Section) -> Option<CalibrationConfig> {
    let req = |s: &mut Section, key: &str| {
        let v = s.required(key);
        s.positive(key, v)
    };
    let f0 = req(s, "saw_frequency_hz");
    let q = req(s, "saw_q");
    let p_rf = req(s, "rf_power_w");
    let s11 = s.required("s11_mag");
    let s11 = s.check("s11_mag", s11, |x| (0.0..=1.0).contains(&x), "must lie in [0, 1]");
    let p_sb = req(s, "sideband_power_w");
    let p_ref = req(s, "reference_sideband_power_w");
    let phi_ref = req(s, "reference_phase_rad");
    let lambda = s.required("lambda_saw_m");
    let lambda = s.wavelength("lambda_saw_m", lambda);
    let depth = s.number("decay_depth_m");
    let depth = s.positive("decay_depth_m", depth);
    let r_x = req(s, "mode_radius_x_m");
    let r_z = req(s, "mode_radius_z_m");
    let lambda = lambda?;
    Some(CalibrationConfig {
        saw_frequency_hz: f0?,
        saw_q: q?,
        rf_power_w: p_rf?,
        s11_mag: s11?,
        sideband_power_w: p_sb?,
        reference_sideband_power_w: p_ref?,
        reference_phase_rad: phi_ref?,
        lambda_saw_m: lambda,
        decay_depth_m: depth.unwrap_or_else(|| default_decay_depth(lambda)),
        mode_radius_x_m: r_x?,
        mode_radius_z_m: r_z?,
    })
}

fn read_prospect(s: &mut Section) -> Option<ProspectKnobs> {
    let d = ProspectKnobs::default();
    let opt = |s: &mut Section, key: &str| {
        let v = s.number(key);
        s.positive(key, v)
    };
    let length = opt(s, "cavity_length_m");
    let power = opt(s, "optical_power_w");
    let f_m = opt(s, "mechanical_frequency_hz");
    let q = opt(s, "mechanical_q");
    let kappa_ext = opt(s, "kappa_ext_hz");
    let detuning = s.number("detuning_hz");
    let detuning = s.check("detuning_hz", detuning, |_| true, "must be finite");
    Some(ProspectKnobs {
        cavity_length_m: length.unwrap_or(d.cavity_length_m),
        optical_power_w: power.unwrap_or(d.optical_power_w),
        mechanical_frequency_hz: f_m.unwrap_or(d.mechanical_frequency_hz),
        mechanical_q: q.unwrap_or(d.mechanical_q),
        detuning_hz: detuning,
        kappa_ext_hz: kappa_ext,
    })
}

fn read_spectrum(s: &mut Section) -> Option<SpectrumConfig> {
    let model = match s.text("model").as_deref() {
        None | Some("fano") => Some(LineShape::Fano),
        Some("lorentzian") => Some(LineShape::Lorentzian),
        Some("gaussian") => Some(LineShape::Gaussian),
        Some(other) => {
            s.err("model", format!("expected fano, lorentzian or gaussian, got `{other}`"));
            None
        }
    };
    let sideband = s.number("sideband_phase_rad");
    let sideband = s.check(
        "sideband_phase_rad",
        sideband,
        |x| x.abs() < 1.0,
        "must satisfy |phi| < 1",
    );
    let source = match s.text("trace_csv") {
        Some(path) => {
            for key in [
                "f0_hz",
                "linewidth_hz",
                "span_hz",
                "points",
                "amplitude",
                "fano_phase_rad",
                "noise_sigma",
            ] {
                if s.table.contains_key(key) {
                    s.err(key, "synthetic trace parameters conflict with trace_csv");
                }
            }
            Some(SpectrumSource::Csv(PathBuf::from(path)))
        }
        None => {
            let f0 = s.required("f0_hz");
            let f0 = s.positive("f0_hz", f0);
            let lw = s.required("linewidth_hz");
            let lw = s.positive("linewidth_hz", lw);
            let span = s.number("span_hz");
            let span = s.positive("span_hz", span);
            let points = s.integer("points");
            if points.is_some_and(|p| p < crate::spectra::MIN_TRACE_POINTS) {
                s.err("points", format!("need at least {}", crate::spectra::MIN_TRACE_POINTS));
            }
            let amp = s.number("amplitude");
            let amp = s.positive("amplitude", amp);
            let phase = s.number("fano_phase_rad");
            let phase = s.check("fano_phase_rad", phase, |_| true, "must be finite");
            let noise = s.number("noise_sigma");
            let noise = s.check("noise_sigma", noise, |x| x >= 0.0, "must be non-negative");
            let (f0, lw) = (f0?, lw?);
            Some(SpectrumSource::Synthetic {
                f0_hz: f0,
                linewidth_hz: lw,
                span_hz: span.unwrap_or(10.0 * lw),
                points: points.unwrap_or(401),
                amplitude: amp.unwrap_or(0.5),
                fano_phase_rad: phase.unwrap_or(std::f64::consts::PI),
                noise_sigma: noise.unwrap_or(0.0),
            })
        }
    };
    Some(SpectrumConfig {
        source: source?,
        model: model?,
        sideband_phase_rad: sideband,
    })
}

fn read_output(s: &mut Section) -> OutputConfig {
    let directory = s.text("directory").map(PathBuf::from);
    let formats = s.texts("formats").and_then(|list| {
        let parsed: Option<Vec<Format>> = list.iter().map(|f| Format::parse(f)).collect();
        if parsed.is_none() {
            s.err("formats", "expected entries from csv, json, svg");
        }
        parsed
    });
    OutputConfig { directory, formats }
}
