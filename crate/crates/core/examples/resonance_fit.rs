//! Quality factor from a complex S21 trace with a Fano line, then the same
//! fit engine on a noisy Lorentzian power trace.

use num_complex::Complex64;
use saw_optomech::spectra::{fit_resonance, linear_sweep, synthetic_fano_trace, synthetic_power_trace, LineShape};

fn main() -> saw_optomech::Result<()> {
    let freqs = linear_sweep(76.4e6, 96.4e6, 401);
    let trace = synthetic_fano_trace(
        freqs.clone(),
        86.4e6,
        1.7e6,
        Complex64::new(0.9, 0.1),
        0.4,
        2.5,
        Some((0.002, 7)),
    )?;
    let fit = fit_resonance(&trace, LineShape::Fano)?;
    println!(
        "fano:       f0 {:.4} MHz, FWHM {:.4} MHz, Q {:.2}, phase {:.3} rad, rms {:.2e}",
        fit.f0_hz / 1e6,
        fit.linewidth_fwhm_hz / 1e6,
        fit.q,
        fit.fano_phase_rad,
        fit.residual_rms
    );

    let trace = synthetic_power_trace(freqs, LineShape::Lorentzian, 86.4e6, 1.7e6, 1.0, 0.05, Some((0.01, 3)))?;
    let fit = fit_resonance(&trace, LineShape::Lorentzian)?;
    println!(
        "lorentzian: f0 {:.4} MHz, FWHM {:.4} MHz, Q {:.2} ({} iterations)",
        fit.f0_hz / 1e6,
        fit.linewidth_fwhm_hz / 1e6,
        fit.q,
        fit.iterations
    );
    Ok(())
}
