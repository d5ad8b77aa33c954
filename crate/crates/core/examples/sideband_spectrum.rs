//! Optical sideband power while sweeping the RF drive across the SAW
//! resonance, and the phase inferred from a calibrated reference modulator.

use saw_optomech::spectra::{
    linear_sweep, phase_from_sideband_calibration, sideband_power_fraction, sideband_spectrum,
};

fn main() -> saw_optomech::Result<()> {
    let (f0, q, phi) = (86.4e6, 50.0, 0.05);
    let sweep = linear_sweep(80e6, 93e6, 27);
    let s = sideband_spectrum(f0, q, &sweep, phi)?;
    println!("peak single-sideband fraction: {:.4e}", s.peak_fraction);
    for (f, p) in s.drive_frequencies.iter().zip(&s.sideband_power) {
        let bar = "#".repeat((p * 50.0).round() as usize);
        println!("{:>8.2} MHz {:>6.3} {bar}", f / 1e6, p);
    }

    // 10 mrad reference gives 1 uW; the device sideband measures 12.1 nW
    let phi_ref = 0.01;
    let p_ref = 1e-6;
    let phi_dev = phase_from_sideband_calibration(12.1e-9, p_ref, phi_ref)?;
    println!(
        "device modulation: {phi_dev:.4e} rad, sideband fraction {:.4e}",
        sideband_power_fraction(phi_dev)?
    );
    Ok(())
}
