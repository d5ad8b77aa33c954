//! RF and optical spectra: Fano-shaped S21, sideband spectra, resonance fits
//! and the phonon-number / phase calibrations.

use std::f64::consts::{LN_2, PI, TAU};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::bessel::j1;
use crate::constants::HBAR;
use crate::error::{ensure_positive, Error, Result};
use crate::fit::{levenberg_marquardt, LmOptions};

/// Sample values of a trace: complex S-parameters or linear power.
#[derive(Debug, Clone, PartialEq)]
pub enum TraceValues {
    Complex(Vec<Complex64>),
    Power(Vec<f64>),
}

impl TraceValues {
    pub fn len(&self) -> usize {
        match self {
            TraceValues::Complex(v) => v.len(),
            TraceValues::Power(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Frequency sweep with one value per point.
#[derive(Debug, Clone, PartialEq)]
pub struct RfTrace {
    frequencies: Vec<f64>,
    values: TraceValues,
}

pub const MIN_TRACE_POINTS: usize = 16;

impl RfTrace {
    pub fn new(frequencies: Vec<f64>, values: TraceValues) -> Result<Self> {
        if frequencies.len() != values.len() {
            return Err(Error::InvalidParameter(format!(
                "trace has {} frequencies but {} values",
                frequencies.len(),
                values.len()
            )));
        }
        if frequencies.len() < MIN_TRACE_POINTS {
            return Err(Error::InvalidParameter(format!(
                "trace needs at least {MIN_TRACE_POINTS} points, got {}",
                frequencies.len()
            )));
        }
        if frequencies.windows(2).any(|w| !(w[1] > w[0])) || frequencies.iter().any(|f| !f.is_finite()) {
            return Err(Error::InvalidParameter(
                "frequencies must be finite and strictly increasing".into(),
            ));
        }
        Ok(RfTrace { frequencies, values })
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn values(&self) -> &TraceValues {
        &self.values
    }

    /// Linear power: |S|² for complex traces.
    pub fn power(&self) -> Vec<f64> {
        match &self.values {
            TraceValues::Complex(v) => v.iter().map(|c| c.norm_sqr()).collect(),
            TraceValues::Power(p) => p.clone(),
        }
    }

    /// Reads `frequency_hz,value_re,value_im` or `frequency_hz,power` CSV.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let headers: Vec<String> = reader
            .headers()
            .map_err(|e| Error::InvalidParameter(format!("trace csv: {e}")))?
            .iter()
            .map(str::to_string)
            .collect();
        let complex = match headers.iter().map(String::as_str).collect::<Vec<_>>().as_slice() {
            ["frequency_hz", "value_re", "value_im"] => true,
            ["frequency_hz", "power"] => false,
            other => {
                return Err(Error::InvalidParameter(format!(
                    "trace csv: unexpected header {other:?}"
                )));
            }
        };
        let mut freqs = Vec::new();
        let mut cvals = Vec::new();
        let mut pvals = Vec::new();
        for (line, record) in reader.records().enumerate() {
            let record = record.map_err(|e| Error::InvalidParameter(format!("trace csv: {e}")))?;
            let num = |i: usize| -> Result<f64> {
                record
                    .get(i)
                    .and_then(|s| s.parse::<f64>().ok())
                    .ok_or_else(|| Error::InvalidParameter(format!("trace csv row {}: bad number", line + 2)))
            };
            freqs.push(num(0)?);
            if complex {
                cvals.push(Complex64::new(num(1)?, num(2)?));
            } else {
                pvals.push(num(1)?);
            }
        }
        let values = if complex {
            TraceValues::Complex(cvals)
        } else {
            TraceValues::Power(pvals)
        };
        RfTrace::new(freqs, values)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        match &self.values {
            TraceValues::Complex(v) => {
                out.push_str("frequency_hz,value_re,value_im\n");
                for (f, c) in self.frequencies.iter().zip(v) {
                    out.push_str(&format!("{f},{:e},{:e}\n", c.re, c.im));
                }
            }
            TraceValues::Power(v) => {
                out.push_str("frequency_hz,power\n");
                for (f, p) in self.frequencies.iter().zip(v) {
                    out.push_str(&format!("{f},{p:e}\n"));
                }
            }
        }
        out
    }
}

/// Uniform sweep of `points` frequencies over `[start, stop]`.
pub fn linear_sweep(start: f64, stop: f64, points: usize) -> Vec<f64> {
    let n = (points - 1) as f64;
    (0..points).map(|i| start + (stop - start) * i as f64 / n).collect()
}

/// Line shapes understood by [`fit_resonance`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LineShape {
    Lorentzian,
    Fano,
    Gaussian,
}

/// Parameters of a fitted resonance. For the real line shapes `amplitude`
/// and `background_re` are in linear power units and the imaginary
/// background and phase are zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonanceFit {
    pub model: LineShape,
    pub f0_hz: f64,
    pub linewidth_fwhm_hz: f64,
    pub q: f64,
    pub amplitude: f64,
    pub background_re: f64,
    pub background_im: f64,
    pub fano_phase_rad: f64,
    pub residual_rms: f64,
    pub iterations: usize,
}

/// `direct + amp·e^{iφ}·(w/2)/(i(f − f0) + w/2)`.
pub fn s21_fano_model(
    f: f64,
    f0: f64,
    linewidth: f64,
    direct: Complex64,
    resonant_amp: f64,
    fano_phase: f64,
) -> Complex64 {
    let half = 0.5 * linewidth;
    direct + Complex64::from_polar(resonant_amp, fano_phase) * half / Complex64::new(half, f - f0)
}

/// `1 / (1 + (2(f − f0)/w)²)`.
pub fn lorentzian(f: f64, f0: f64, fwhm: f64) -> f64 {
    let u = 2.0 * (f - f0) / fwhm;
    1.0 / (1.0 + u * u)
}

/// Unit-height Gaussian with full width at half maximum `fwhm`.
pub fn gaussian(f: f64, f0: f64, fwhm: f64) -> f64 {
    let u = (f - f0) / fwhm;
    (-4.0 * LN_2 * u * u).exp()
}

/// Synthetic Fano trace, optionally with complex white noise of standard
/// deviation `noise.0` per quadrature drawn from seed `noise.1`.
pub fn synthetic_fano_trace(
    freqs: Vec<f64>,
    f0: f64,
    linewidth: f64,
    direct: Complex64,
    resonant_amp: f64,
    fano_phase: f64,
    noise: Option<(f64, u64)>,
) -> Result<RfTrace> {
    let mut values: Vec<Complex64> = freqs
        .iter()
        .map(|&f| s21_fano_model(f, f0, linewidth, direct, resonant_amp, fano_phase))
        .collect();
    if let Some((sigma, seed)) = noise {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, sigma).map_err(|e| Error::InvalidParameter(e.to_string()))?;
        for v in &mut values {
            *v += Complex64::new(normal.sample(&mut rng), normal.sample(&mut rng));
        }
    }
    RfTrace::new(freqs, TraceValues::Complex(values))
}

/// Synthetic power trace `amp·shape(f) + background` with optional additive
/// white noise.
pub fn synthetic_power_trace(
    freqs: Vec<f64>,
    shape: LineShape,
    f0: f64,
    fwhm: f64,
    amplitude: f64,
    background: f64,
    noise: Option<(f64, u64)>,
) -> Result<RfTrace> {
    let line = match shape {
        LineShape::Lorentzian => lorentzian,
        LineShape::Gaussian => gaussian,
        LineShape::Fano => {
            return Err(Error::InvalidParameter(
                "Fano traces are complex; use synthetic_fano_trace".into(),
            ))
        }
    };
    let mut values: Vec<f64> = freqs
        .iter()
        .map(|&f| amplitude * line(f, f0, fwhm) + background)
        .collect();
    if let Some((sigma, seed)) = noise {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, sigma).map_err(|e| Error::InvalidParameter(e.to_string()))?;
        for v in &mut values {
            *v += normal.sample(&mut rng);
        }
    }
    RfTrace::new(freqs, TraceValues::Power(values))
}

struct Feature {
    peak: usize,
    /// Detrended signed deviation at the peak.
    height: f64,
    left_half: f64,
    right_half: f64,
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Locates the dominant feature of `series` over a linear trend through the
/// tails and checks that it stands out of the tail noise.
fn locate_feature(freqs: &[f64], series: &[f64]) -> Result<Feature> {
    let n = series.len();
    let tail = (n / 10).max(2);
    let idx: Vec<usize> = (0..tail).chain(n - tail..n).collect();
    let fx: Vec<f64> = idx.iter().map(|&i| freqs[i]).collect();
    let fy: Vec<f64> = idx.iter().map(|&i| series[i]).collect();
    let (mx, my) = (mean(&fx), mean(&fy));
    let sxx: f64 = fx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = fx.iter().zip(&fy).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let trend = |i: usize| my + slope * (freqs[i] - mx);
    let tail_rms = (idx.iter().map(|&i| (series[i] - trend(i)).powi(2)).sum::<f64>() / idx.len() as f64).sqrt();

    let detrended: Vec<f64> = (0..n).map(|i| series[i] - trend(i)).collect();
    let (peak, height) =
        detrended.iter().enumerate().fold(
            (0, 0.0_f64),
            |best, (i, &d)| if d.abs() > best.1.abs() { (i, d) } else { best },
        );
    if height == 0.0 || !height.is_finite() || height.abs() < 3.0 * tail_rms {
        return Err(Error::NoResonanceFound);
    }
    let half = 0.5 * height;
    let above = |i: usize| detrended[i] * height.signum() >= half.abs();
    let mut lo = peak;
    while lo > 0 && above(lo - 1) {
        lo -= 1;
    }
    let mut hi = peak;
    while hi + 1 < n && above(hi + 1) {
        hi += 1;
    }
    if hi - lo + 1 < 3 {
        return Err(Error::NoResonanceFound);
    }
    let crossing = |inside: usize, outside: usize| {
        let (a, b) = (detrended[inside].abs(), detrended[outside].abs());
        let t = if a != b { (a - half.abs()) / (a - b) } else { 0.5 };
        freqs[inside] + t * (freqs[outside] - freqs[inside])
    };
    let left_half = if lo > 0 { crossing(lo, lo - 1) } else { freqs[0] };
    let right_half = if hi + 1 < n { crossing(hi, hi + 1) } else { freqs[n - 1] };
    Ok(Feature {
        peak,
        height,
        left_half,
        right_half,
    })
}

/// Fits a Lorentzian, Gaussian (both on linear power) or complex Fano model.
pub fn fit_resonance(trace: &RfTrace, model: LineShape) -> Result<ResonanceFit> {
    fit_resonance_with(trace, model, &LmOptions::default())
}

pub fn fit_resonance_with(trace: &RfTrace, model: LineShape, opts: &LmOptions) -> Result<ResonanceFit> {
    let freqs = trace.frequencies();
    match model {
        LineShape::Lorentzian | LineShape::Gaussian => {
            let power = trace.power();
            let feat = locate_feature(freqs, &power)?;
            let fc = freqs[feat.peak];
            let scale = (feat.right_half - feat.left_half).max(freqs[1] - freqs[0]);
            let amp_scale = feat.height.abs();
            let u: Vec<f64> = freqs.iter().map(|f| (f - fc) / scale).collect();
            let y: Vec<f64> = power.iter().map(|p| p / amp_scale).collect();
            let b0 = (y[0] + y[y.len() - 1]) / 2.0;
            let p0 = [feat.height / amp_scale, 0.0, 1.0, b0];
            let line = if model == LineShape::Lorentzian {
                lorentzian
            } else {
                gaussian
            };
            let res = |p: &[f64], out: &mut [f64]| {
                for (o, (&ui, &yi)) in out.iter_mut().zip(u.iter().zip(&y)) {
                    *o = p[0] * line(ui, p[1], p[2]) + p[3] - yi;
                }
            };
            let rep = levenberg_marquardt(res, u.len(), &p0, &[1.0, 1.0, 1.0, 1.0], opts)?;
            let f0 = fc + rep.params[1] * scale;
            let fwhm = rep.params[2].abs() * scale;
            Ok(ResonanceFit {
                model,
                f0_hz: f0,
                linewidth_fwhm_hz: fwhm,
                q: f0 / fwhm,
                amplitude: rep.params[0] * amp_scale,
                background_re: rep.params[3] * amp_scale,
                background_im: 0.0,
                fano_phase_rad: 0.0,
                residual_rms: rep.residual_rms * amp_scale,
                iterations: rep.iterations,
            })
        }
        LineShape::Fano => {
            let TraceValues::Complex(values) = trace.values() else {
                return Err(Error::InvalidParameter("Fano fit needs a complex trace".into()));
            };
            let n = values.len();
            let tail = (n / 10).max(2);
            let bg = (values[..tail].iter().chain(&values[n - tail..]).sum::<Complex64>()) / (2 * tail) as f64;
            let dev2: Vec<f64> = values.iter().map(|v| (v - bg).norm_sqr()).collect();
            let feat = locate_feature(freqs, &dev2)?;
            let fc = freqs[feat.peak];
            let scale = (feat.right_half - feat.left_half).max(freqs[1] - freqs[0]);
            let peak_dev = values[feat.peak] - bg;
            let amp_scale = peak_dev.norm();
            let u: Vec<f64> = freqs.iter().map(|f| (f - fc) / scale).collect();
            let y: Vec<Complex64> = values.iter().map(|v| v / amp_scale).collect();
            let bgn = bg / amp_scale;
            let p0 = [bgn.re, bgn.im, 1.0, peak_dev.arg(), 0.0, 1.0];
            let res = |p: &[f64], out: &mut [f64]| {
                let direct = Complex64::new(p[0], p[1]);
                for (i, (&ui, yi)) in u.iter().zip(&y).enumerate() {
                    let m = s21_fano_model(ui, p[4], p[5], direct, p[2], p[3]) - yi;
                    out[2 * i] = m.re;
                    out[2 * i + 1] = m.im;
                }
            };
            let rep = levenberg_marquardt(res, 2 * n, &p0, &[1.0; 6], opts)?;
            let p = &rep.params;
            let (mut amp, mut phase) = (p[2], p[3]);
            let mut width = p[5];
            if width < 0.0 {
                // (w/2)/(i δ + w/2) with w → −w equals the conjugate-pole form; fold it back
                width = -width;
                amp = -amp;
            }
            if amp < 0.0 {
                amp = -amp;
                phase += PI;
            }
            phase = (phase + PI).rem_euclid(TAU) - PI;
            let f0 = fc + p[4] * scale;
            let fwhm = width * scale;
            Ok(ResonanceFit {
                model,
                f0_hz: f0,
                linewidth_fwhm_hz: fwhm,
                q: f0 / fwhm,
                amplitude: amp * amp_scale,
                background_re: p[0] * amp_scale,
                background_im: p[1] * amp_scale,
                fano_phase_rad: phase,
                residual_rms: rep.residual_rms * amp_scale,
                iterations: rep.iterations,
            })
        }
    }
}

/// Single-sideband power fraction `J1(φ)²` of a phase-modulated carrier.
pub fn sideband_power_fraction(phi: f64) -> Result<f64> {
    if !(phi.abs() < 1.0) {
        return Err(Error::ModulationTooDeep(phi));
    }
    Ok(j1(phi).powi(2))
}

/// Sideband power versus drive frequency, normalised to its largest value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SidebandSpectrum {
    pub drive_frequencies: Vec<f64>,
    pub sideband_power: Vec<f64>,
    /// Unnormalised single-sideband fraction at the spectrum maximum.
    pub peak_fraction: f64,
}

/// `J1(φ·|χ(f)|)²` with `|χ| = 1/√(1 + (2q(f − f0)/f0)²)`.
pub fn sideband_spectrum(f0: f64, q: f64, sweep: &[f64], phi_on_resonance: f64) -> Result<SidebandSpectrum> {
    ensure_positive("f0", f0)?;
    ensure_positive("q", q)?;
    if sweep.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter("drive sweep must be increasing".into()));
    }
    let raw = sweep
        .iter()
        .map(|&f| {
            let u = 2.0 * q * (f - f0) / f0;
            sideband_power_fraction(phi_on_resonance / (1.0 + u * u).sqrt())
        })
        .collect::<Result<Vec<f64>>>()?;
    let peak = raw.iter().cloned().fold(0.0, f64::max);
    let sideband_power = if peak > 0.0 {
        raw.iter().map(|p| p / peak).collect()
    } else {
        raw
    };
    Ok(SidebandSpectrum {
        drive_frequencies: sweep.to_vec(),
        sideband_power,
        peak_fraction: peak,
    })
}

/// Stored phonon number from an S11 measurement, assuming all absorbed RF
/// power feeds the resonant mode: `E = P_abs·Q/ω`, `N = E/(ħω)`.
pub fn phonon_number_from_reflection(p_in: f64, s11_mag: f64, f0: f64, q: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&s11_mag) {
        return Err(Error::NonphysicalReflection(s11_mag));
    }
    ensure_positive("p_in", p_in)?;
    ensure_positive("f0", f0)?;
    ensure_positive("q", q)?;
    let omega = TAU * f0;
    let p_abs = p_in * (1.0 - s11_mag * s11_mag);
    let energy = p_abs * q / omega;
    Ok(energy / (HBAR * omega))
}

/// Absorbed power that sustains `n_saw` phonons; inverse of the stored
/// energy relation above.
pub fn absorbed_power_for_phonons(n_saw: f64, f0: f64, q: f64) -> f64 {
    let omega = TAU * f0;
    n_saw * HBAR * omega * omega / q
}

/// Phase modulation from a sideband power ratio against a calibrated
/// reference modulator: `φ_ref·√(P_sb/P_ref)`.
pub fn phase_from_sideband_calibration(p_sb: f64, p_sb_ref: f64, phi_ref: f64) -> Result<f64> {
    ensure_positive("p_sb", p_sb)?;
    ensure_positive("p_sb_ref", p_sb_ref)?;
    ensure_positive("phi_ref", phi_ref)?;
    Ok(phi_ref * (p_sb / p_sb_ref).sqrt())
}
