//! Fabry–Pérot cavity figures and the optomechanical estimation chain from
//! RF/optical calibrations to g0 and cooperativity.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::acoustics::{default_decay_depth, effective_area_from_radii, strain_to_amplitude, zero_point_amplitude};
use crate::constants::{PLANCK, SPEED_OF_LIGHT};
use crate::error::{ensure_positive, Error, Result};
use crate::materials::MaterialProperties;
use crate::spectra::{phase_from_sideband_calibration, phonon_number_from_reflection};

/// Symmetric two-mirror cavity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavityParams {
    pub length: f64,
    pub mirror_roc: f64,
    /// Power reflectivity of each mirror.
    pub reflectivity: f64,
    pub lambda_opt: f64,
    /// Measured FWHM linewidth, Hz; overrides the finesse estimate.
    pub kappa_measured: Option<f64>,
}

impl CavityParams {
    /// 50 mm near-concentric cavity, R = 25 mm, ~99.5 % mirrors, 3.6 MHz measured.
    pub fn near_concentric() -> Self {
        CavityParams {
            length: 50e-3,
            mirror_roc: 25e-3,
            reflectivity: 0.995,
            lambda_opt: 1064e-9,
            kappa_measured: Some(3.6e6),
        }
    }

    fn validate(&self) -> Result<()> {
        ensure_positive("cavity length", self.length)?;
        ensure_positive("mirror_roc", self.mirror_roc)?;
        if !(self.reflectivity > 0.0 && self.reflectivity < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "reflectivity must lie in (0, 1), got {}",
                self.reflectivity
            )));
        }
        if !(self.lambda_opt.is_finite() && self.lambda_opt > 0.0) {
            return Err(Error::InvalidWavelength(self.lambda_opt));
        }
        if let Some(k) = self.kappa_measured {
            ensure_positive("kappa_measured", k)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavityDerived {
    pub fsr_hz: f64,
    pub finesse: f64,
    /// FSR / finesse.
    pub kappa_derived_hz: f64,
    /// Measured linewidth when supplied, else the derived one.
    pub kappa_hz: f64,
    /// `g = 1 − L/R`.
    pub stability_g: f64,
    pub stable: bool,
    /// Waist radius (1/e² intensity), `None` outside the stable range.
    pub waist_m: Option<f64>,
}

pub fn cavity_derived_params(p: &CavityParams) -> Result<CavityDerived> {
    p.validate()?;
    let fsr = SPEED_OF_LIGHT / (2.0 * p.length);
    let r = p.reflectivity;
    let finesse = PI * r.sqrt() / (1.0 - r);
    let kappa_derived = fsr / finesse;
    let g = 1.0 - p.length / p.mirror_roc;
    let stable = (0.0..1.0).contains(&(g * g));
    let waist = stable.then(|| {
        let l = p.length;
        (p.lambda_opt / PI * (l * (2.0 * p.mirror_roc - l)).sqrt() / 2.0).sqrt()
    });
    Ok(CavityDerived {
        fsr_hz: fsr,
        finesse,
        kappa_derived_hz: kappa_derived,
        kappa_hz: p.kappa_measured.unwrap_or(kappa_derived),
        stability_g: g,
        stable,
        waist_m: waist,
    })
}

/// `φ_SAW/√N_SAW`.
pub fn zero_point_phase(phi_saw: f64, n_saw: f64) -> Result<f64> {
    if !(n_saw >= 1.0) {
        return Err(Error::EmptyResonatorCalibration);
    }
    Ok(phi_saw / n_saw.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SinglePhononShift {
    pub g0_over_2pi_hz: f64,
    pub delta_x_m: f64,
}

/// `δx = (φ_zpf/2π)·λ_opt`, `g0/2π = (c/λ_opt)·δx/L`.
pub fn g0_from_modulation(phi_zpf: f64, lambda_opt: f64, cavity_length: f64) -> Result<SinglePhononShift> {
    ensure_positive("phi_zpf", phi_zpf)?;
    ensure_positive("lambda_opt", lambda_opt)?;
    ensure_positive("cavity_length", cavity_length)?;
    let delta_x = phi_zpf / TAU * lambda_opt;
    let optical_frequency = SPEED_OF_LIGHT / lambda_opt;
    Ok(SinglePhononShift {
        g0_over_2pi_hz: optical_frequency * delta_x / cavity_length,
        delta_x_m: delta_x,
    })
}

/// Cavity-filtered anti-Stokes power versus detuning, peak 1, FWHM `kappa`.
pub fn antistokes_response(deltas: &[f64], kappa: f64) -> Result<Vec<f64>> {
    ensure_positive("kappa", kappa)?;
    Ok(deltas
        .iter()
        .map(|d| {
            let u = 2.0 * d / kappa;
            1.0 / (1.0 + u * u)
        })
        .collect())
}

/// Steady-state photon number for a one-sided drive:
/// `n = (P/ħω)·κ_ext / ((κ/2)² + Δ²)` with angular rates.
pub fn intracavity_photon_number(p_in: f64, detuning: f64, kappa: f64, kappa_ext: f64, lambda_opt: f64) -> Result<f64> {
    ensure_positive("p_in", p_in)?;
    ensure_positive("kappa", kappa)?;
    ensure_positive("kappa_ext", kappa_ext)?;
    ensure_positive("lambda_opt", lambda_opt)?;
    if !detuning.is_finite() {
        return Err(Error::InvalidParameter("detuning must be finite".into()));
    }
    if kappa_ext > kappa {
        return Err(Error::Overcoupled { kappa_ext, kappa });
    }
    let (k, k_ext, delta) = (TAU * kappa, TAU * kappa_ext, TAU * detuning);
    Ok(p_in / photon_energy(lambda_opt) * k_ext / (0.25 * k * k + delta * delta))
}

/// `C = 4·n·g0²/(γ·κ)`; all rates in the same ordinary-frequency units.
pub fn cooperativity(n: f64, g0: f64, gamma_m: f64, kappa: f64) -> Result<f64> {
    ensure_positive("n", n)?;
    ensure_positive("g0", g0)?;
    ensure_positive("gamma_m", gamma_m)?;
    ensure_positive("kappa", kappa)?;
    Ok(4.0 * n * g0 * g0 / (gamma_m * kappa))
}

/// Knobs for the improved-device projection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProspectKnobs {
    pub cavity_length_m: f64,
    pub optical_power_w: f64,
    pub mechanical_frequency_hz: f64,
    pub mechanical_q: f64,
    /// Pump detuning from the cavity; defaults to the mechanical frequency.
    pub detuning_hz: Option<f64>,
    /// External coupling rate; defaults to κ/2.
    pub kappa_ext_hz: Option<f64>,
}

impl Default for ProspectKnobs {
    fn default() -> Self {
        ProspectKnobs {
            cavity_length_m: 300e-6,
            optical_power_w: 10e-3,
            mechanical_frequency_hz: 98.3e6,
            mechanical_q: 1e5,
            detuning_hz: None,
            kappa_ext_hz: None,
        }
    }
}

/// Every measured input the coupling budget consumes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationBundle {
    pub material: MaterialProperties,
    pub lambda_saw_m: f64,
    pub decay_depth_m: f64,
    pub saw_frequency_hz: f64,
    pub saw_q: f64,
    pub rf_power_w: f64,
    pub s11_mag: f64,
    pub sideband_power_w: f64,
    pub reference_sideband_power_w: f64,
    pub reference_phase_rad: f64,
    /// Mode radii for the theoretical zero-point amplitude.
    pub mode_radius_x_m: f64,
    pub mode_radius_z_m: f64,
    pub cavity: CavityParams,
    pub prospect: ProspectKnobs,
}

/// Zero-point phase the Y-cut bundle is built to reproduce (60 mHz at 50 mm).
pub const Y_CUT_PHI_ZPF: f64 = 6.29e-11;

impl CalibrationBundle {
    /// Y-cut device: 86.4 MHz, Q = 50, 0 dBm drive with |S11| = 0.9. The
    /// sideband power is set so that φ_zpf equals [`Y_CUT_PHI_ZPF`].
    pub fn y_cut_device() -> Self {
        let (f0, q, p_rf, s11) = (86.4e6, 50.0, 1e-3, 0.9);
        let (p_ref, phi_ref) = (1e-6, 0.01);
        let n = phonon_number_from_reflection(p_rf, s11, f0, q).expect("valid constants");
        let phi_saw = Y_CUT_PHI_ZPF * n.sqrt();
        CalibrationBundle {
            material: MaterialProperties::y_cut(),
            lambda_saw_m: 40e-6,
            decay_depth_m: default_decay_depth(40e-6),
            saw_frequency_hz: f0,
            saw_q: q,
            rf_power_w: p_rf,
            s11_mag: s11,
            sideband_power_w: p_ref * (phi_saw / phi_ref).powi(2),
            reference_sideband_power_w: p_ref,
            reference_phase_rad: phi_ref,
            mode_radius_x_m: 100e-6,
            mode_radius_z_m: 110e-6,
            cavity: CavityParams::near_concentric(),
            prospect: ProspectKnobs::default(),
        }
    }
}

/// Cooperativity quoted as the target for the short-cavity device; carried
/// for comparison with the modelled value.
pub const PROSPECT_COOPERATIVITY_CLAIM: f64 = 1.0;

/// All intermediates of the estimation chain, units in the field names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingBudget {
    pub n_saw: f64,
    pub phi_saw_rad: f64,
    pub phi_zpf_rad: f64,
    pub delta_x_m: f64,
    pub g0_over_2pi_hz: f64,
    pub zpf_shear_strain: f64,
    pub u_zpf_experiment_m: f64,
    pub mode_area_m2: f64,
    pub u_zpf_theory_m: f64,
    pub u_zpf_experiment_over_theory: f64,
    pub cavity_fsr_hz: f64,
    pub cavity_finesse: f64,
    pub kappa_derived_hz: f64,
    pub kappa_hz: f64,
    pub prospect_cavity_length_m: f64,
    pub g0_prospect_over_2pi_hz: f64,
    pub prospect_detuning_hz: f64,
    pub prospect_kappa_ext_hz: f64,
    pub n_cav: f64,
    pub gamma_m_hz: f64,
    pub cooperativity: f64,
    pub cooperativity_claimed: f64,
    pub cooperativity_claim_over_model: f64,
    pub cooperativity_convention: String,
}

pub fn coupling_budget(b: &CalibrationBundle) -> Result<CouplingBudget> {
    let n_saw = phonon_number_from_reflection(b.rf_power_w, b.s11_mag, b.saw_frequency_hz, b.saw_q)
        .map_err(|e| e.in_stage("phonon number"))?;
    let phi_saw =
        phase_from_sideband_calibration(b.sideband_power_w, b.reference_sideband_power_w, b.reference_phase_rad)
            .map_err(|e| e.in_stage("sideband calibration"))?;
    let phi_zpf = zero_point_phase(phi_saw, n_saw).map_err(|e| e.in_stage("zero-point phase"))?;
    let lambda_opt = b.cavity.lambda_opt;
    let shift = g0_from_modulation(phi_zpf, lambda_opt, b.cavity.length).map_err(|e| e.in_stage("g0"))?;

    // shear strain from the depth-integrated X-polarization shear term:
    // φ = (2π/λ_opt)·½·n_o³·|p14|·d·∂U/∂z
    let m = &b.material;
    let shear_coeff = 0.5 * m.n_o.powi(3) * m.tensor.p14.abs();
    if shear_coeff == 0.0 {
        return Err(
            Error::InvalidParameter("p14 = 0: shear strain is unobservable".into()).in_stage("zero-point strain")
        );
    }
    ensure_positive("decay_depth", b.decay_depth_m).map_err(|e| e.in_stage("zero-point strain"))?;
    let strain = phi_zpf * lambda_opt / (TAU * shear_coeff * b.decay_depth_m);
    let k_m = TAU / b.lambda_saw_m;
    let u_exp = strain_to_amplitude(strain, k_m).map_err(|e| e.in_stage("zero-point strain"))?;
    let area = effective_area_from_radii(b.mode_radius_x_m, b.mode_radius_z_m);
    let u_theory = zero_point_amplitude(m, area, b.saw_frequency_hz, b.decay_depth_m)
        .map_err(|e| e.in_stage("zero-point amplitude"))?;

    let cav = cavity_derived_params(&b.cavity).map_err(|e| e.in_stage("cavity"))?;
    let pk = &b.prospect;
    let g0_prospect = g0_from_modulation(phi_zpf, lambda_opt, pk.cavity_length_m)
        .map_err(|e| e.in_stage("prospect g0"))?
        .g0_over_2pi_hz;
    let detuning = pk.detuning_hz.unwrap_or(pk.mechanical_frequency_hz);
    let kappa_ext = pk.kappa_ext_hz.unwrap_or(0.5 * cav.kappa_hz);
    let n_cav = intracavity_photon_number(pk.optical_power_w, detuning, cav.kappa_hz, kappa_ext, lambda_opt)
        .map_err(|e| e.in_stage("intracavity photons"))?;
    ensure_positive("mechanical_q", pk.mechanical_q).map_err(|e| e.in_stage("mechanical linewidth"))?;
    let gamma_m = pk.mechanical_frequency_hz / pk.mechanical_q;
    let c = cooperativity(n_cav, g0_prospect, gamma_m, cav.kappa_hz).map_err(|e| e.in_stage("cooperativity"))?;

    Ok(CouplingBudget {
        n_saw,
        phi_saw_rad: phi_saw,
        phi_zpf_rad: phi_zpf,
        delta_x_m: shift.delta_x_m,
        g0_over_2pi_hz: shift.g0_over_2pi_hz,
        zpf_shear_strain: strain,
        u_zpf_experiment_m: u_exp,
        mode_area_m2: area,
        u_zpf_theory_m: u_theory,
        u_zpf_experiment_over_theory: u_exp / u_theory,
        cavity_fsr_hz: cav.fsr_hz,
        cavity_finesse: cav.finesse,
        kappa_derived_hz: cav.kappa_derived_hz,
        kappa_hz: cav.kappa_hz,
        prospect_cavity_length_m: pk.cavity_length_m,
        g0_prospect_over_2pi_hz: g0_prospect,
        prospect_detuning_hz: detuning,
        prospect_kappa_ext_hz: kappa_ext,
        n_cav,
        gamma_m_hz: gamma_m,
        cooperativity: c,
        cooperativity_claimed: PROSPECT_COOPERATIVITY_CLAIM,
        cooperativity_claim_over_model: PROSPECT_COOPERATIVITY_CLAIM / c,
        cooperativity_convention: format!(
            "one-sided drive, kappa_ext = {kappa_ext:.6e} Hz, detuning = {detuning:.6e} Hz; \
             the claimed C ~ 1 does not state these and differs from this model by a factor {:.2}",
            PROSPECT_COOPERATIVITY_CLAIM / c
        ),
    })
}

/// Photon energy `hc/λ`, J.
pub fn photon_energy(lambda_opt: f64) -> f64 {
    PLANCK * SPEED_OF_LIGHT / lambda_opt
}
