//! Focused standing-wave SAW modes: effective areas, synthetic mode fields,
//! Gaussian radius fits and zero-point motion.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::bessel::{j0, j0_zero, j1};
use crate::constants::HBAR;
use crate::error::{ensure_positive, Error, Result};
use crate::fit::{levenberg_marquardt, LmOptions};
use crate::grid::{Axis, Grid, GridField};
use crate::materials::MaterialProperties;

/// Effective area of a concentric (Bessel) resonator mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeArea {
    /// `π·r_eff²·J1²(α0n)`, m².
    pub a_exact: f64,
    /// Large-radius limit `λ·r_eff/π`, m².
    pub a_asymptotic: f64,
    /// `a_exact / (λ·r_eff)`; tends to 1/π.
    pub eta: f64,
    pub n_nodes: usize,
    pub r_eff: f64,
}

impl ModeArea {
    /// Area of the unfocused mode spread over the whole disc, `π·r_eff²`.
    pub fn flat_area(&self) -> f64 {
        PI * self.r_eff * self.r_eff
    }

    /// Flat-to-focused area ratio using the exact Bessel area.
    pub fn focusing_gain(&self) -> f64 {
        self.flat_area() / self.a_exact
    }
}

pub fn bessel_mode_area(r_eff: f64, lambda_saw: f64) -> Result<ModeArea> {
    if !(lambda_saw.is_finite() && lambda_saw > 0.0) {
        return Err(Error::InvalidWavelength(lambda_saw));
    }
    if !(r_eff.is_finite() && r_eff > 0.5 * lambda_saw) {
        return Err(Error::SubWavelengthResonator {
            r_eff,
            lambda: lambda_saw,
        });
    }
    let n_nodes = (2.0 * r_eff / lambda_saw).round() as usize;
    let a_exact = PI * r_eff * r_eff * j1(j0_zero(n_nodes)).powi(2);
    Ok(ModeArea {
        a_exact,
        a_asymptotic: lambda_saw * r_eff / PI,
        eta: a_exact / (lambda_saw * r_eff),
        n_nodes,
        r_eff,
    })
}

/// `π·r_x·r_z`.
pub fn effective_area_from_radii(r_x: f64, r_z: f64) -> f64 {
    PI * r_x * r_z
}

/// Default effective decay depth of u_y into the substrate, `λ/2π`.
pub fn default_decay_depth(lambda_saw: f64) -> f64 {
    lambda_saw / TAU
}

/// Inputs for [`synthesize_mode_field`]. `grid_extent` is the half-width of
/// the square lattice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeSpec {
    pub r_x: f64,
    pub r_z: f64,
    pub lambda_saw: f64,
    pub u0: f64,
    pub decay_depth: f64,
    pub grid_extent: f64,
    pub grid_points: usize,
}

impl ModeSpec {
    /// Y-cut focus: fitted radii 100 µm × 110 µm at λ = 40 µm on a 1 µm grid.
    pub fn y_cut_focus() -> Self {
        let lambda_saw = 40e-6;
        ModeSpec {
            r_x: 100e-6,
            r_z: 110e-6,
            lambda_saw,
            u0: 1e-12,
            decay_depth: default_decay_depth(lambda_saw),
            grid_extent: 256e-6,
            grid_points: 513,
        }
    }
}

/// Gridded out-of-plane displacement amplitude U(x, z).
///
/// `U = u0·J0(k·ρ̃)·exp(−(x/e_x)² − (z/e_z)²)` with
/// `ρ̃ = √((x·R̄/r_x)² + (z·R̄/r_z)²)` and `R̄ = √(r_x·r_z)`. The envelope radii
/// `e_x`, `e_z` are solved for so that Gaussian fits to the summed |U|
/// profiles return `r_x` and `r_z`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeField {
    pub u_amplitude: GridField,
    pub u0: f64,
    pub lambda_saw: f64,
    pub k_m: f64,
    pub decay_depth: f64,
    pub r_x: f64,
    pub r_z: f64,
    pub envelope_x: f64,
    pub envelope_z: f64,
}

pub const MIN_GRID_POINTS: usize = 64;
const CALIBRATION_TOLERANCE: f64 = 1e-7;
const CALIBRATION_ITERATIONS: usize = 100;

impl ModeField {
    pub fn grid(&self) -> Grid {
        self.u_amplitude.grid
    }

    fn axis_scale(&self, axis: Axis) -> f64 {
        let rbar = (self.r_x * self.r_z).sqrt();
        match axis {
            Axis::X => self.r_x / rbar,
            Axis::Z => self.r_z / rbar,
        }
    }

    /// Analytic position of the `n`-th displacement node along `axis`
    /// (through the origin), positive side.
    pub fn node_along(&self, axis: Axis, n: usize) -> f64 {
        j0_zero(n) / self.k_m * self.axis_scale(axis)
    }

    /// Closed-form U at an arbitrary point.
    pub fn evaluate(&self, x: f64, z: f64) -> f64 {
        let (sx, sz) = (self.axis_scale(Axis::X), self.axis_scale(Axis::Z));
        let rho = ((x / sx).powi(2) + (z / sz).powi(2)).sqrt();
        let env = (-(x / self.envelope_x).powi(2) - (z / self.envelope_z).powi(2)).exp();
        self.u0 * j0(self.k_m * rho) * env
    }
}

pub fn synthesize_mode_field(spec: &ModeSpec) -> Result<ModeField> {
    for (name, v) in [
        ("r_x", spec.r_x),
        ("r_z", spec.r_z),
        ("u0", spec.u0),
        ("decay_depth", spec.decay_depth),
        ("grid_extent", spec.grid_extent),
    ] {
        ensure_positive(name, v)?;
    }
    if !(spec.lambda_saw.is_finite() && spec.lambda_saw > 0.0) {
        return Err(Error::InvalidWavelength(spec.lambda_saw));
    }
    if spec.grid_points < MIN_GRID_POINTS || spec.grid_points.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "grid_points must be odd and >= {MIN_GRID_POINTS}, got {}",
            spec.grid_points
        )));
    }
    if spec.grid_extent < spec.lambda_saw {
        return Err(Error::GridTooSmall {
            extent: spec.grid_extent,
            lambda: spec.lambda_saw,
        });
    }
    let grid = Grid::new(spec.grid_extent, spec.grid_points);
    let k_m = TAU / spec.lambda_saw;
    let rbar = (spec.r_x * spec.r_z).sqrt();
    let (sx, sz) = (spec.r_x / rbar, spec.r_z / rbar);
    let carrier = GridField::from_fn(grid, |x, z| {
        let rho = ((x / sx).powi(2) + (z / sz).powi(2)).sqrt();
        j0(k_m * rho)
    });
    let (envelope_x, envelope_z) = calibrate_envelope(&carrier, spec.r_x, spec.r_z)?;
    let coords = grid.coords();
    let gx: Vec<f64> = coords.iter().map(|x| (-(x / envelope_x).powi(2)).exp()).collect();
    let gz: Vec<f64> = coords.iter().map(|z| (-(z / envelope_z).powi(2)).exp()).collect();
    let n = grid.points;
    let values = carrier
        .values
        .iter()
        .enumerate()
        .map(|(i, c)| spec.u0 * c * gx[i / n] * gz[i % n])
        .collect();
    Ok(ModeField {
        u_amplitude: GridField { grid, values },
        u0: spec.u0,
        lambda_saw: spec.lambda_saw,
        k_m,
        decay_depth: spec.decay_depth,
        r_x: spec.r_x,
        r_z: spec.r_z,
        envelope_x,
        envelope_z,
    })
}

/// Solves for envelope radii whose summed-|U| Gaussian fits hit the targets.
fn calibrate_envelope(carrier: &GridField, r_x: f64, r_z: f64) -> Result<(f64, f64)> {
    let grid = carrier.grid;
    let n = grid.points;
    let coords = grid.coords();
    let abs_c: Vec<f64> = carrier.values.iter().map(|v| v.abs()).collect();
    let (mut ex, mut ez) = (1.5 * r_x, 1.5 * r_z);
    for _ in 0..CALIBRATION_ITERATIONS {
        let gx: Vec<f64> = coords.iter().map(|x| (-(x / ex).powi(2)).exp()).collect();
        let gz: Vec<f64> = coords.iter().map(|z| (-(z / ez).powi(2)).exp()).collect();
        let mut prof_x = vec![0.0; n];
        let mut prof_z = vec![0.0; n];
        for ix in 0..n {
            for iz in 0..n {
                let v = abs_c[ix * n + iz] * gx[ix] * gz[iz];
                prof_x[ix] += v;
                prof_z[iz] += v;
            }
        }
        let fx = fit_gaussian_radius(&coords, &prof_x)?;
        let fz = fit_gaussian_radius(&coords, &prof_z)?;
        let (dx, dz) = (r_x / fx, r_z / fz);
        if (dx - 1.0).abs() < CALIBRATION_TOLERANCE && (dz - 1.0).abs() < CALIBRATION_TOLERANCE {
            return Ok((ex, ez));
        }
        // the fitted radius grows roughly as envelope^(2/3) here
        ex *= dx.powf(1.5).clamp(0.5, 2.0);
        ez *= dz.powf(1.5).clamp(0.5, 2.0);
        if ex > 1e3 * grid.extent || ez > 1e3 * grid.extent {
            break;
        }
    }
    Err(Error::InvalidParameter(format!(
        "mode radii ({r_x:e}, {r_z:e}) m are not reachable on a grid of half-width {:e} m",
        grid.extent
    )))
}

/// Fits `a·exp(−(t − t0)²/R²) + b` to a profile and returns |R|.
pub(crate) fn fit_gaussian_radius(coords: &[f64], profile: &[f64]) -> Result<f64> {
    let scale_t = coords[coords.len() - 1].abs().max(coords[0].abs());
    let (imax, ymax) = profile
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |b, (i, &y)| if y > b.1 { (i, y) } else { b });
    let ymin = profile.iter().cloned().fold(f64::INFINITY, f64::min);
    let amp_scale = if ymax.abs() > 0.0 { ymax.abs() } else { 1.0 };
    let t: Vec<f64> = coords.iter().map(|c| c / scale_t).collect();
    let y: Vec<f64> = profile.iter().map(|v| v / amp_scale).collect();
    // second-moment width of the baseline-subtracted profile
    let w: Vec<f64> = profile.iter().map(|v| (v - ymin).max(0.0)).collect();
    let wsum: f64 = w.iter().sum();
    let t0 = t[imax];
    let var = if wsum > 0.0 {
        w.iter().zip(&t).map(|(wi, ti)| wi * (ti - t0).powi(2)).sum::<f64>() / wsum
    } else {
        0.1
    };
    let r0 = (2.0 * var).sqrt().max(2.0 * (t[1] - t[0]).abs());
    let p0 = [(ymax - ymin) / amp_scale, t0, r0, ymin / amp_scale];
    let res = |p: &[f64], out: &mut [f64]| {
        for (o, (&ti, &yi)) in out.iter_mut().zip(t.iter().zip(&y)) {
            *o = p[0] * (-((ti - p[1]) / p[2]).powi(2)).exp() + p[3] - yi;
        }
    };
    let rep = levenberg_marquardt(res, t.len(), &p0, &[1.0, 1.0, r0, 1.0], &LmOptions::default())?;
    Ok(rep.params[2].abs() * scale_t)
}

/// 1/e radius along `axis` of a 2D map, from a Gaussian fit to the map summed
/// over the orthogonal axis.
pub fn fit_mode_radii(map: &GridField, axis: Axis) -> Result<f64> {
    if map.grid.points < 8 {
        return Err(Error::InvalidParameter(format!(
            "need at least 8 samples along the axis, got {}",
            map.grid.points
        )));
    }
    if map.values.iter().all(|v| *v == 0.0) {
        return Err(Error::InvalidParameter("map is identically zero".into()));
    }
    if map.values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("map has non-finite samples".into()));
    }
    fit_gaussian_radius(&map.grid.coords(), &map.profile(axis))
}

/// Harmonic-oscillator zero-point amplitude with effective mass `ρ·A·d`:
/// `√(ħ / (2·m·ω))`.
pub fn zero_point_amplitude(material: &MaterialProperties, area: f64, f_m: f64, decay_depth: f64) -> Result<f64> {
    ensure_positive("area", area)?;
    ensure_positive("f_m", f_m)?;
    ensure_positive("decay_depth", decay_depth)?;
    let mass = material.density * area * decay_depth;
    Ok((HBAR / (2.0 * mass * TAU * f_m)).sqrt())
}

/// Displacement amplitude from a shear strain, `U = strain / k_m`.
pub fn strain_to_amplitude(shear_strain: f64, k_m: f64) -> Result<f64> {
    ensure_positive("k_m", k_m)?;
    Ok(shear_strain / k_m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_node_area() {
        let a = bessel_mode_area(21e-6, 40e-6).unwrap();
        assert_eq!(a.n_nodes, 1);
        assert!((a.a_exact / (PI * 21e-6 * 21e-6) - 0.269_514_123_94).abs() < 1e-10);
    }

    #[test]
    fn sub_wavelength_rejected() {
        assert!(matches!(
            bessel_mode_area(19e-6, 40e-6),
            Err(Error::SubWavelengthResonator { .. })
        ));
        assert!(matches!(bessel_mode_area(1e-3, 0.0), Err(Error::InvalidWavelength(_))));
    }

    #[test]
    fn eta_converges_to_one_over_pi() {
        // J1²(α0n) ≈ 2/(π·α0n) with α0n ≈ (n − 1/4)π gives η ≈ n/(π(n − 1/4))
        let lambda = 40e-6;
        let mut prev = f64::INFINITY;
        for n in 10..=200 {
            let a = bessel_mode_area(n as f64 * lambda / 2.0, lambda).unwrap();
            assert_eq!(a.n_nodes, n);
            let dev = (a.eta * PI - 1.0).abs();
            assert!(dev < prev, "not monotone at n = {n}");
            prev = dev;
            let ratio = a.a_exact / a.a_asymptotic;
            assert!((0.9..=1.1).contains(&ratio));
            let oracle = n as f64 / (PI * (n as f64 - 0.25));
            assert!((a.eta / oracle - 1.0).abs() < 1e-3);
        }
        let a = bessel_mode_area(1e-3, lambda).unwrap();
        assert!((a.eta * PI - 1.0).abs() < 0.01);
        assert_eq!(format!("{:.2}", a.eta), "0.32");
    }

    #[test]
    fn area_from_radii() {
        let a = effective_area_from_radii(100e-6, 110e-6);
        assert!((a - 3.456e-8).abs() < 1e-11);
        assert!((PI * 1e-6 / a - 90.909).abs() < 1e-3);
        assert_eq!(effective_area_from_radii(2.0, 2.0), PI * 4.0);
        assert!((effective_area_from_radii(200e-6, 220e-6) / a - 4.0).abs() < 1e-14);
    }

    #[test]
    fn zero_point_examples() {
        let m = MaterialProperties::y_cut();
        let area = effective_area_from_radii(100e-6, 110e-6);
        let d = default_decay_depth(40e-6);
        let u = zero_point_amplitude(&m, area, 86.4e6, d).unwrap();
        assert!((u / 0.97e-17 - 1.0).abs() < 0.01, "{u}");
        let u4 = zero_point_amplitude(&m, 4.0 * area, 86.4e6, d).unwrap();
        assert!((u / u4 - 2.0).abs() < 1e-12);
        let identity = u * u * 2.0 * m.density * area * d * TAU * 86.4e6;
        assert!((identity / HBAR - 1.0).abs() < 1e-12);
    }

    #[test]
    fn strain_examples() {
        let k = TAU / 40e-6;
        let u = strain_to_amplitude(7.85e-13, k).unwrap();
        assert!((u / 0.5e-17 - 1.0).abs() < 1e-3);
        assert_eq!(strain_to_amplitude(0.0, k).unwrap(), 0.0);
        assert_eq!(
            strain_to_amplitude(2e-13, k).unwrap(),
            2.0 * strain_to_amplitude(1e-13, k).unwrap()
        );
        assert!(strain_to_amplitude(1.0, 0.0).is_err());
    }

    fn small_spec() -> ModeSpec {
        ModeSpec {
            grid_extent: 160e-6,
            grid_points: 161,
            r_x: 60e-6,
            r_z: 70e-6,
            ..ModeSpec::y_cut_focus()
        }
    }

    #[test]
    fn mode_field_invariants() {
        let mode = synthesize_mode_field(&small_spec()).unwrap();
        let g = mode.grid();
        let c = g.points / 2;
        assert_eq!(mode.u_amplitude.get(c, c), mode.u0);
        let (ix, iz, max) = mode.u_amplitude.abs_argmax();
        assert_eq!((ix, iz, max), (c, c, mode.u0));
        let n = g.points;
        for ix in 0..n {
            for iz in 0..n {
                let v = mode.u_amplitude.get(ix, iz);
                assert_eq!(v, mode.u_amplitude.get(n - 1 - ix, iz));
                assert_eq!(v, mode.u_amplitude.get(ix, n - 1 - iz));
            }
        }
        assert!((mode.evaluate(g.coord(3), g.coord(70)) - mode.u_amplitude.get(3, 70)).abs() < 1e-12 * mode.u0);
    }

    #[test]
    fn first_node_positions() {
        let mode = synthesize_mode_field(&small_spec()).unwrap();
        let rbar = (mode.r_x * mode.r_z).sqrt();
        let xn = mode.node_along(Axis::X, 1);
        assert!((xn - 2.404_825_557_695_773 / mode.k_m * mode.r_x / rbar).abs() < 1e-18);
        assert!(mode.evaluate(xn, 0.0).abs() < 1e-14 * mode.u0);
        assert!(mode.evaluate(0.0, mode.node_along(Axis::Z, 1)).abs() < 1e-14 * mode.u0);
    }

    #[test]
    fn isotropic_node_spacing_tends_to_half_wavelength() {
        let mut spec = small_spec();
        spec.r_z = spec.r_x;
        let mode = synthesize_mode_field(&spec).unwrap();
        let spacing = mode.node_along(Axis::X, 41) - mode.node_along(Axis::X, 40);
        assert!((spacing / (spec.lambda_saw / 2.0) - 1.0).abs() < 1e-4);
    }

    #[test]
    fn fitted_radii_match_targets() {
        let mode = synthesize_mode_field(&small_spec()).unwrap();
        let abs = mode.u_amplitude.map(f64::abs);
        let rx = fit_mode_radii(&abs, Axis::X).unwrap();
        let rz = fit_mode_radii(&abs, Axis::Z).unwrap();
        assert!((rx / 60e-6 - 1.0).abs() < 1e-5, "{rx}");
        assert!((rz / 70e-6 - 1.0).abs() < 1e-5, "{rz}");
    }

    #[test]
    fn spec_validation() {
        let mut s = small_spec();
        s.grid_extent = 30e-6;
        assert!(matches!(synthesize_mode_field(&s), Err(Error::GridTooSmall { .. })));
        let mut s = small_spec();
        s.grid_points = 160;
        assert!(synthesize_mode_field(&s).is_err());
        let mut s = small_spec();
        s.grid_points = 33;
        assert!(synthesize_mode_field(&s).is_err());
    }

    #[test]
    fn pure_gaussian_fit() {
        let g = Grid::new(400e-6, 201);
        let map = GridField::from_fn(g, |x, z| (-(x / 100e-6).powi(2) - (z / 130e-6).powi(2)).exp());
        assert!((fit_mode_radii(&map, Axis::X).unwrap() / 100e-6 - 1.0).abs() < 1e-3);
        assert!((fit_mode_radii(&map, Axis::Z).unwrap() / 130e-6 - 1.0).abs() < 1e-3);
        let zero = GridField::from_fn(g, |_, _| 0.0);
        assert!(fit_mode_radii(&zero, Axis::X).is_err());
    }
}
