//! Phase maps for the two optical polarizations, the beam-averaged
//! X/Z sideband ratio at the centre and at the first node along z, and the
//! effect of removing the shear coefficient.

use saw_optomech::acoustics::{synthesize_mode_field, ModeSpec};
use saw_optomech::grid::Axis;
use saw_optomech::materials::MaterialProperties;
use saw_optomech::optoelastics::{argmax_along_z_axis, integrated_phase_map, polarization_selectivity, Polarization};

fn main() -> saw_optomech::Result<()> {
    let mode = synthesize_mode_field(&ModeSpec::y_cut_focus())?;
    let material = MaterialProperties::y_cut();
    let (lambda_opt, waist) = (1064e-9, 3.5e-6);

    let node = mode.node_along(Axis::Z, 1);
    for (label, spot) in [("centre", (0.0, 0.0)), ("z node", (0.0, node))] {
        let s = polarization_selectivity(&mode, &material, spot, lambda_opt, waist)?;
        println!(
            "{label:>7}: phi_x {:.3e} rad, phi_z {:.3e} rad, (phi_x/phi_z)^2 = {:.3e}",
            s.phi_x, s.phi_z, s.ratio
        );
    }

    let grid = mode.grid();
    let peak = |m: &MaterialProperties| -> saw_optomech::Result<f64> {
        let map = integrated_phase_map(&mode, Polarization::X, lambda_opt, m)?;
        Ok(grid.coord(argmax_along_z_axis(&map)))
    };
    let mut no_shear = material.clone();
    no_shear.tensor.p14 = 0.0;
    println!(
        "X-map peak on the z axis: {:.1} um (p14 = {}), {:.1} um (p14 = 0)",
        peak(&material)? * 1e6,
        material.tensor.p14,
        peak(&no_shear)? * 1e6
    );
    Ok(())
}
