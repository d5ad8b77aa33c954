//! Synthesises a focused mode map, recovers its radii with Gaussian fits and
//! evaluates the zero-point displacement of the fitted mode.

use saw_optomech::acoustics::{
    effective_area_from_radii, fit_mode_radii, synthesize_mode_field, zero_point_amplitude, ModeSpec,
};
use saw_optomech::grid::Axis;
use saw_optomech::materials::{resonance_frequency, MaterialProperties};

fn main() -> saw_optomech::Result<()> {
    let spec = ModeSpec::y_cut_focus();
    let mode = synthesize_mode_field(&spec)?;
    let abs = mode.u_amplitude.map(f64::abs);
    let r_x = fit_mode_radii(&abs, Axis::X)?;
    let r_z = fit_mode_radii(&abs, Axis::Z)?;
    println!("target radii:  {:.2} x {:.2} um", spec.r_x * 1e6, spec.r_z * 1e6);
    println!("fitted radii:  {:.2} x {:.2} um", r_x * 1e6, r_z * 1e6);
    println!(
        "first nodes:   x {:.2} um, z {:.2} um",
        mode.node_along(Axis::X, 1) * 1e6,
        mode.node_along(Axis::Z, 1) * 1e6
    );

    let material = MaterialProperties::y_cut();
    let area = effective_area_from_radii(r_x, r_z);
    let f_m = resonance_frequency(&material, spec.lambda_saw)?;
    let u_zpf = zero_point_amplitude(&material, area, f_m, spec.decay_depth)?;
    println!("mode area:     {area:.4e} m^2");
    println!("U_zpf:         {:.3e} m at {:.1} MHz", u_zpf, f_m / 1e6);
    Ok(())
}
