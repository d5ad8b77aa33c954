//! Acceptance gate: one line per criterion, non-zero exit if any fails.

use std::f64::consts::{FRAC_1_PI, PI, TAU};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;

use num_complex::Complex64;
use saw_optomech::acoustics::{
    bessel_mode_area, default_decay_depth, synthesize_mode_field, zero_point_amplitude, ModeSpec,
};
use saw_optomech::cavity::{
    antistokes_response, cooperativity, coupling_budget, g0_from_modulation, CalibrationBundle,
};
use saw_optomech::grid::Axis;
use saw_optomech::materials::{resonance_frequency, MaterialProperties};
use saw_optomech::optoelastics::{argmax_along_z_axis, integrated_phase_map, polarization_selectivity, Polarization};
use saw_optomech::spectra::{
    fit_resonance, linear_sweep, synthetic_fano_trace, synthetic_power_trace, LineShape, RfTrace, TraceValues,
};

type Outcome = Result<String, String>;
type Check = fn() -> Outcome;

fn within(name: &str, value: f64, target: f64, tol: f64) -> Result<(), String> {
    if (value - target).abs() <= tol {
        Ok(())
    } else {
        Err(format!("{name} = {value} outside {target} ± {tol}"))
    }
}

fn within_rel(name: &str, value: f64, target: f64, rel: f64) -> Result<(), String> {
    within(name, value, target, rel * target.abs())
}

/// Tolerances below are the contract values; do not loosen them.
fn c1_resonance_design() -> Outcome {
    let fy = resonance_frequency(&MaterialProperties::y_cut(), 40e-6).map_err(|e| e.to_string())?;
    let f128 = resonance_frequency(&MaterialProperties::y128_cut(), 40e-6).map_err(|e| e.to_string())?;
    within_rel("f0(Y)", fy, 87.2e6, 1e-3)?;
    within_rel("f0(128Y)", f128, 99.9e6, 1e-3)?;
    Ok(format!("Y {:.3} MHz, 128Y {:.3} MHz", fy / 1e6, f128 / 1e6))
}

fn c2_bessel_asymptotics() -> Outcome {
    let lambda = 40e-6;
    let mut worst: f64 = 0.0;
    for n in 50..=400 {
        // r_eff chosen so that round(2R/λ) = n
        let a = bessel_mode_area(n as f64 * lambda / 2.0, lambda).map_err(|e| e.to_string())?;
        if a.n_nodes != n {
            return Err(format!("node count {} for n = {n}", a.n_nodes));
        }
        within_rel(&format!("eta({n})"), a.eta, FRAC_1_PI, 0.01)?;
        if format!("{:.2}", a.eta) != "0.32" {
            return Err(format!("eta({n}) prints as {:.2}", a.eta));
        }
        worst = worst.max((a.eta * PI - 1.0).abs());
    }
    Ok(format!("n = 50..400, max |eta·pi - 1| = {worst:.2e}, prints 0.32"))
}

fn c3_focusing_gain() -> Outcome {
    let a = bessel_mode_area(1e-3, 40e-6).map_err(|e| e.to_string())?;
    within("flat/focused", a.focusing_gain(), 245.0, 1.0)?;
    Ok(format!("gain {:.2}", a.focusing_gain()))
}

fn c4_measured_area_ratio() -> Outcome {
    let ratio = PI * 1e-3f64.powi(2) / (PI * 100e-6 * 110e-6);
    within("ratio", ratio, 90.9, 0.05)?;
    if !(50.0..200.0).contains(&ratio) {
        return Err(format!("ratio {ratio} is not of order 100"));
    }
    Ok(format!("ratio {ratio:.2}"))
}

fn c5_zero_point_theory() -> Outcome {
    let area = PI * 100e-6 * 110e-6;
    let u = zero_point_amplitude(&MaterialProperties::y_cut(), area, 86.4e6, default_decay_depth(40e-6))
        .map_err(|e| e.to_string())?;
    let oracle = (saw_optomech::constants::HBAR / (2.0 * 4650.0 * area * (40e-6 / TAU) * TAU * 86.4e6)).sqrt();
    within_rel("U_zpf vs closed form", u, oracle, 1e-12)?;
    within_rel("U_zpf", u, 1.0e-17, 0.20)?;
    Ok(format!("U_zpf {:.3e} fm", u * 1e15))
}

fn c6_g0_chain() -> Outcome {
    let long = g0_from_modulation(6.29e-11, 1064e-9, 50e-3).map_err(|e| e.to_string())?;
    let short = g0_from_modulation(6.29e-11, 1064e-9, 300e-6).map_err(|e| e.to_string())?;
    within("g0/2pi (50 mm)", long.g0_over_2pi_hz, 0.060, 1e-3)?;
    within("g0/2pi (300 um)", short.g0_over_2pi_hz, 10.0, 0.2)?;
    Ok(format!(
        "{:.2} mHz at 50 mm, {:.3} Hz at 300 um",
        long.g0_over_2pi_hz * 1e3,
        short.g0_over_2pi_hz
    ))
}

fn c7_q_extraction() -> Outcome {
    let freqs = linear_sweep(76.4e6, 96.4e6, 401);
    let trace = synthetic_fano_trace(freqs, 86.4e6, 1.7e6, Complex64::new(0.9, 0.1), 0.4, 2.0, None)
        .map_err(|e| e.to_string())?;
    let fit = fit_resonance(&trace, LineShape::Fano).map_err(|e| e.to_string())?;
    within("Q", fit.q, 50.8, 0.5)?;
    Ok(format!("Q {:.2}", fit.q))
}

fn c8_fit_engine() -> Outcome {
    let (f0, fwhm, amp) = (86.4e6, 1.7e6, 1.0);
    let freqs = || linear_sweep(f0 - 10e6, f0 + 10e6, 401);
    let mut worst = [0.0f64; 2];
    for (k, noise) in [None, Some((0.01 * amp, 20250801u64))].into_iter().enumerate() {
        let tol = if noise.is_none() { 1e-3 } else { 0.02 };
        for shape in [LineShape::Lorentzian, LineShape::Gaussian, LineShape::Fano] {
            let trace = match shape {
                LineShape::Fano => synthetic_fano_trace(freqs(), f0, fwhm, Complex64::new(0.2, -0.1), amp, 0.7, noise),
                s => synthetic_power_trace(freqs(), s, f0, fwhm, amp, 0.1, noise),
            }
            .map_err(|e| e.to_string())?;
            let fit = fit_resonance(&trace, shape).map_err(|e| format!("{shape:?}: {e}"))?;
            for (name, got, want) in [
                ("f0", fit.f0_hz, f0),
                ("fwhm", fit.linewidth_fwhm_hz, fwhm),
                ("amplitude", fit.amplitude, amp),
            ] {
                let rel = (got / want - 1.0).abs();
                worst[k] = worst[k].max(rel);
                if rel > tol {
                    return Err(format!(
                        "{shape:?} {name}: {got} vs {want} (rel {rel:.2e}, noise {noise:?})"
                    ));
                }
            }
        }
    }
    Ok(format!(
        "max rel error {:.1e} noiseless, {:.1e} with 1% noise",
        worst[0], worst[1]
    ))
}

fn c9_antistokes_linewidth() -> Outcome {
    let kappa = 3.6e6;
    let det = linear_sweep(-5.0 * kappa, 5.0 * kappa, 201);
    let resp = antistokes_response(&det, kappa).map_err(|e| e.to_string())?;
    let trace = RfTrace::new(det, TraceValues::Power(resp)).map_err(|e| e.to_string())?;
    let fit = fit_resonance(&trace, LineShape::Lorentzian).map_err(|e| e.to_string())?;
    within_rel("FWHM", fit.linewidth_fwhm_hz, kappa, 5e-3)?;
    Ok(format!("FWHM {:.4} MHz", fit.linewidth_fwhm_hz / 1e6))
}

fn c10_polarization_selectivity() -> Outcome {
    let mode = synthesize_mode_field(&ModeSpec::y_cut_focus()).map_err(|e| e.to_string())?;
    let material = MaterialProperties::y_cut();
    let node = mode.node_along(Axis::Z, 1);
    let s = polarization_selectivity(&mode, &material, (0.0, node), 1064e-9, 3.5e-6).map_err(|e| e.to_string())?;
    if !(s.z_vanishes || s.ratio >= 100.0) {
        return Err(format!("(phi_x/phi_z)^2 = {} at z = {node}", s.ratio));
    }
    let mut no_shear = material.clone();
    no_shear.tensor.p14 = 0.0;
    let map = integrated_phase_map(&mode, Polarization::X, 1064e-9, &no_shear).map_err(|e| e.to_string())?;
    let z_peak = mode.grid().coord(argmax_along_z_axis(&map));
    if z_peak != 0.0 {
        return Err(format!("p14 = 0 X-map argmax at z = {z_peak}"));
    }
    Ok(format!(
        "ratio {:.3e} at z = {:.2} um; p14 = 0 argmax z = 0",
        s.ratio,
        node * 1e6
    ))
}

fn c11_depth_independence() -> Outcome {
    let spec = ModeSpec::y_cut_focus();
    let deeper = ModeSpec {
        decay_depth: 2.0 * spec.decay_depth,
        ..spec
    };
    let material = MaterialProperties::y_cut();
    let a = integrated_phase_map(
        &synthesize_mode_field(&spec).map_err(|e| e.to_string())?,
        Polarization::Z,
        1064e-9,
        &material,
    )
    .map_err(|e| e.to_string())?;
    let b = integrated_phase_map(
        &synthesize_mode_field(&deeper).map_err(|e| e.to_string())?,
        Polarization::Z,
        1064e-9,
        &material,
    )
    .map_err(|e| e.to_string())?;
    let scale = a.phi.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let worst = a
        .phi
        .values
        .iter()
        .zip(&b.phi.values)
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs() / scale));
    if worst > 1e-12 {
        return Err(format!("max relative difference {worst:e}"));
    }
    Ok(format!("max relative difference {worst:.1e}"))
}

fn c12_cooperativity() -> Outcome {
    let c = cooperativity(1.59e6, 10.0, 983.0, 3.6e6).map_err(|e| e.to_string())?;
    within("C", c, 0.18, 0.01)?;
    let b = coupling_budget(&CalibrationBundle::y_cut_device()).map_err(|e| e.to_string())?;
    within("budget C", b.cooperativity, 0.18, 0.01)?;
    let gap = b.cooperativity_claim_over_model;
    if !(gap > 1.0 && gap < 10.0) {
        return Err(format!("claim/model factor {gap} outside one order of magnitude"));
    }
    let json = serde_json::to_string(&b).map_err(|e| e.to_string())?;
    if !(json.contains("\"cooperativity_claimed\":1.0")
        && json.contains("cooperativity_convention")
        && b.cooperativity_convention.contains("differs"))
    {
        return Err("budget output does not state the convention gap".into());
    }
    Ok(format!(
        "C {c:.4}; budget C {:.4}, claim/model {gap:.2}",
        b.cooperativity
    ))
}

fn run_cli(args: &[&str]) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_saw-optomech"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if status.status.success() {
        Ok(())
    } else {
        Err(format!("{args:?}: {}", String::from_utf8_lossy(&status.stderr)))
    }
}

fn dir_contents(dir: &Path) -> Result<Vec<(String, Vec<u8>)>, String> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(|e| e.to_string())? {
        let entry = entry.map_err(|e| e.to_string())?;
        let bytes = std::fs::read(entry.path()).map_err(|e| e.to_string())?;
        out.push((entry.file_name().to_string_lossy().into_owned(), bytes));
    }
    out.sort();
    Ok(out)
}

fn c13_determinism() -> Outcome {
    let config = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/y_cut.toml");
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut files = 0;
    for sub in ["budget", "phasemap"] {
        let mut runs = Vec::new();
        for (i, threads) in ["1", "1", "8", "8"].iter().enumerate() {
            let out = tmp.path().join(format!("{sub}-{i}"));
            run_cli(&[
                sub,
                "--config",
                config,
                "--out",
                out.to_str().unwrap(),
                "--threads",
                threads,
            ])?;
            runs.push(dir_contents(&out)?);
        }
        for (i, r) in runs.iter().enumerate().skip(1) {
            if r != &runs[0] {
                let names: Vec<&str> = r.iter().map(|(n, _)| n.as_str()).collect();
                return Err(format!("{sub}: run {i} differs from run 0 ({names:?})"));
            }
        }
        files += runs[0].len();
    }
    Ok(format!(
        "budget + phasemap: {files} files identical over 2 runs x threads 1/8"
    ))
}

fn main() {
    let criteria: [(&str, Check); 13] = [
        ("resonance design", c1_resonance_design),
        ("Bessel asymptotics", c2_bessel_asymptotics),
        ("focusing gain", c3_focusing_gain),
        ("measured-area ratio", c4_measured_area_ratio),
        ("zero-point theory", c5_zero_point_theory),
        ("g0 chain", c6_g0_chain),
        ("Q extraction", c7_q_extraction),
        ("fit engine", c8_fit_engine),
        ("anti-Stokes linewidth", c9_antistokes_linewidth),
        ("polarization selectivity", c10_polarization_selectivity),
        ("depth independence", c11_depth_independence),
        ("cooperativity prospect", c12_cooperativity),
        ("determinism", c13_determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
