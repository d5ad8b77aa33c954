//! Strain-induced refractive-index shifts and the optical phase maps they
//! imprint on a probe beam crossing the substrate.
//!
//! The displacement is taken as `u_y(x, y, z) = U(x, z)·e^(−y/d)`. Integrated
//! over depth, `∫ ∂u_y/∂y dy = −U` independently of `d`, while the shear term
//! contributes `d·∂U/∂z`.

use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::acoustics::ModeField;
use crate::bessel::j1;
use crate::error::{ensure_positive, Error, Result};
use crate::grid::{Grid, GridField};
use crate::materials::MaterialProperties;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Polarization {
    X,
    Z,
}

impl Polarization {
    pub fn label(self) -> &'static str {
        match self {
            Polarization::X => "x",
            Polarization::Z => "z",
        }
    }
}

/// Index change for one polarization.
///
/// Z: `−½·n_e³·p31·∂u_y/∂y`; X: `−½·n_o³·(p12·∂u_y/∂y + p14·∂u_y/∂z)`.
pub fn refractive_index_shift(
    elong_yy: f64,
    shear_yz: f64,
    polarization: Polarization,
    material: &MaterialProperties,
) -> f64 {
    let t = &material.tensor;
    match polarization {
        Polarization::Z => -0.5 * material.n_e.powi(3) * t.p31 * elong_yy,
        Polarization::X => -0.5 * material.n_o.powi(3) * (t.p12 * elong_yy + t.p14 * shear_yz),
    }
}

/// Signed, depth-integrated phase modulation amplitude per grid node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseMap {
    pub phi: GridField,
    pub polarization: Polarization,
    pub lambda_opt: f64,
}

/// Minimum grid nodes per SAW wavelength for the shear finite differences.
pub const MIN_POINTS_PER_WAVELENGTH: f64 = 8.0;

pub fn integrated_phase_map(
    mode: &ModeField,
    polarization: Polarization,
    lambda_opt: f64,
    material: &MaterialProperties,
) -> Result<PhaseMap> {
    if !(lambda_opt.is_finite() && lambda_opt > 0.0) {
        return Err(Error::InvalidWavelength(lambda_opt));
    }
    let grid = mode.grid();
    let h = grid.spacing();
    let per_wavelength = mode.lambda_saw / h;
    if per_wavelength < MIN_POINTS_PER_WAVELENGTH {
        return Err(Error::UndersampledGrid {
            points_per_wavelength: per_wavelength,
        });
    }
    let k_opt = TAU / lambda_opt;
    let u = &mode.u_amplitude;
    let n = grid.points;
    let t = &material.tensor;
    let values: Vec<f64> = match polarization {
        Polarization::Z => {
            let c = k_opt * 0.5 * material.n_e.powi(3) * t.p31;
            u.values.iter().map(|v| c * v).collect()
        }
        Polarization::X => {
            let c = k_opt * 0.5 * material.n_o.powi(3);
            let d = mode.decay_depth;
            let mut out = vec![0.0; grid.len()];
            out.par_chunks_mut(n).enumerate().for_each(|(ix, row)| {
                for (iz, o) in row.iter_mut().enumerate() {
                    let dudz = d_dz(u, ix, iz, h);
                    *o = c * (t.p12 * u.get(ix, iz) - t.p14 * d * dudz);
                }
            });
            out
        }
    };
    Ok(PhaseMap {
        phi: GridField { grid, values },
        polarization,
        lambda_opt,
    })
}

/// Second-order finite difference along z: central inside, one-sided at the
/// edges.
fn d_dz(u: &GridField, ix: usize, iz: usize, h: f64) -> f64 {
    let n = u.grid.points;
    if iz == 0 {
        (-3.0 * u.get(ix, 0) + 4.0 * u.get(ix, 1) - u.get(ix, 2)) / (2.0 * h)
    } else if iz == n - 1 {
        (3.0 * u.get(ix, n - 1) - 4.0 * u.get(ix, n - 2) + u.get(ix, n - 3)) / (2.0 * h)
    } else {
        (u.get(ix, iz + 1) - u.get(ix, iz - 1)) / (2.0 * h)
    }
}

/// Gaussian probe spot; `waist` is the 1/e² intensity radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamSpot {
    pub x: f64,
    pub z: f64,
    pub waist: f64,
}

/// Intensity weights are dropped beyond this many waists from the centre.
const SPOT_CUTOFF_WAISTS: f64 = 4.0;

/// Magnitude of the intensity-weighted mean phase seen by a Gaussian spot.
pub fn beam_sampled_phase(map: &PhaseMap, spot: &BeamSpot) -> Result<f64> {
    let grid = map.phi.grid;
    if !grid.contains(spot.x, spot.z) {
        return Err(Error::SpotOutOfBounds { x: spot.x, z: spot.z });
    }
    ensure_positive("waist", spot.waist)?;
    if spot.waist < grid.spacing() * (1.0 - 1e-12) {
        return Err(Error::InvalidParameter(format!(
            "waist {} m is below the grid spacing {} m",
            spot.waist,
            grid.spacing()
        )));
    }
    let (ix_range, iz_range) = (
        index_window(&grid, spot.x, SPOT_CUTOFF_WAISTS * spot.waist),
        index_window(&grid, spot.z, SPOT_CUTOFF_WAISTS * spot.waist),
    );
    let two_over_w2 = 2.0 / (spot.waist * spot.waist);
    let mut num = 0.0;
    let mut den = 0.0;
    for ix in ix_range {
        let dx = grid.coord(ix) - spot.x;
        for iz in iz_range.clone() {
            let dz = grid.coord(iz) - spot.z;
            let w = (-(dx * dx + dz * dz) * two_over_w2).exp();
            num += w * map.phi.get(ix, iz);
            den += w;
        }
    }
    Ok((num / den).abs())
}

fn index_window(grid: &Grid, center: f64, half: f64) -> std::ops::RangeInclusive<usize> {
    let lo = grid.nearest_index(center - half);
    let hi = grid.nearest_index(center + half);
    lo..=hi
}

/// X-to-Z sideband power ratio at one spot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Selectivity {
    /// `(φ_X/φ_Z)²`; `f64::INFINITY` when `z_vanishes`.
    pub ratio: f64,
    pub phi_x: f64,
    pub phi_z: f64,
    pub z_vanishes: bool,
}

pub fn polarization_selectivity(
    mode: &ModeField,
    material: &MaterialProperties,
    position: (f64, f64),
    lambda_opt: f64,
    waist: f64,
) -> Result<Selectivity> {
    let spot = BeamSpot {
        x: position.0,
        z: position.1,
        waist,
    };
    let phi_x = beam_sampled_phase(
        &integrated_phase_map(mode, Polarization::X, lambda_opt, material)?,
        &spot,
    )?;
    let phi_z = beam_sampled_phase(
        &integrated_phase_map(mode, Polarization::Z, lambda_opt, material)?,
        &spot,
    )?;
    Ok(selectivity_from_phases(phi_x, phi_z))
}

pub fn selectivity_from_phases(phi_x: f64, phi_z: f64) -> Selectivity {
    if phi_z == 0.0 {
        Selectivity {
            ratio: f64::INFINITY,
            phi_x,
            phi_z,
            z_vanishes: true,
        }
    } else {
        Selectivity {
            ratio: (phi_x / phi_z).powi(2),
            phi_x,
            phi_z,
            z_vanishes: false,
        }
    }
}

/// Single-sideband power `J1(φ)²` per node, normalised to the map maximum.
pub fn sideband_power_map(map: &PhaseMap) -> GridField {
    let raw = map.phi.map(|p| j1(p).powi(2));
    let peak = raw.values.iter().cloned().fold(0.0, f64::max);
    if peak > 0.0 {
        raw.map(|p| p / peak)
    } else {
        raw
    }
}

/// Node index of the largest |φ| on the z axis (x = 0 column).
pub fn argmax_along_z_axis(map: &PhaseMap) -> usize {
    let grid = map.phi.grid;
    let ix = grid.nearest_index(0.0);
    (0..grid.points)
        .fold((0, -1.0), |best, iz| {
            let v = map.phi.get(ix, iz).abs();
            if v > best.1 {
                (iz, v)
            } else {
                best
            }
        })
        .0
}
