//! Full estimation chain from RF and optical calibrations to the
//! single-phonon coupling, then the cooperativity of a shorter cavity.

use saw_optomech::cavity::{cavity_derived_params, coupling_budget, CalibrationBundle};

fn main() -> saw_optomech::Result<()> {
    let bundle = CalibrationBundle::y_cut_device();
    let cav = cavity_derived_params(&bundle.cavity)?;
    println!(
        "cavity: FSR {:.4} GHz, finesse {:.0}, kappa {:.2} MHz (derived {:.2} MHz), stable {}",
        cav.fsr_hz / 1e9,
        cav.finesse,
        cav.kappa_hz / 1e6,
        cav.kappa_derived_hz / 1e6,
        cav.stable
    );

    let b = coupling_budget(&bundle)?;
    println!("stored phonons        {:.4e}", b.n_saw);
    println!(
        "phi_SAW / phi_zpf     {:.4e} / {:.4e} rad",
        b.phi_saw_rad, b.phi_zpf_rad
    );
    println!("delta_x               {:.4e} m", b.delta_x_m);
    println!("g0/2pi                {:.2} mHz", b.g0_over_2pi_hz * 1e3);
    println!(
        "U_zpf exp / theory    {:.3e} / {:.3e} m (ratio {:.2})",
        b.u_zpf_experiment_m, b.u_zpf_theory_m, b.u_zpf_experiment_over_theory
    );
    println!(
        "g0/2pi at {:.0} um     {:.2} Hz",
        b.prospect_cavity_length_m * 1e6,
        b.g0_prospect_over_2pi_hz
    );
    println!("intracavity photons   {:.4e}", b.n_cav);
    println!("cooperativity         {:.3}", b.cooperativity);
    println!("{}", b.cooperativity_convention);
    Ok(())
}
