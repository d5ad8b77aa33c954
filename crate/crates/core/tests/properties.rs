//! Cross-module properties under noise.

use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use saw_optomech::acoustics::{fit_mode_radii, synthesize_mode_field, ModeSpec};
use saw_optomech::grid::Axis;
use saw_optomech::spectra::{fit_resonance, linear_sweep, synthetic_fano_trace, synthetic_power_trace, LineShape};

#[test]
fn mode_radii_survive_one_percent_noise() {
    let spec = ModeSpec {
        grid_points: 257,
        ..ModeSpec::y_cut_focus()
    };
    let mode = synthesize_mode_field(&spec).unwrap();
    let peak = mode.u_amplitude.abs_argmax().2;
    let normal = Normal::new(0.0, 0.01 * peak).unwrap();
    for seed in 0..4 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut noisy = mode.u_amplitude.map(f64::abs);
        for v in &mut noisy.values {
            *v += normal.sample(&mut rng);
        }
        let r_x = fit_mode_radii(&noisy, Axis::X).unwrap();
        let r_z = fit_mode_radii(&noisy, Axis::Z).unwrap();
        assert!((r_x / spec.r_x - 1.0).abs() < 0.02, "seed {seed}: r_x {r_x}");
        assert!((r_z / spec.r_z - 1.0).abs() < 0.02, "seed {seed}: r_z {r_z}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn noisy_lineshape_recovery(
        seed in any::<u64>(),
        f0 in 50e6f64..150e6,
        q in 20.0f64..200.0,
        shape in prop_oneof![Just(LineShape::Lorentzian), Just(LineShape::Gaussian), Just(LineShape::Fano)],
    ) {
        let fwhm = f0 / q;
        let freqs = linear_sweep(f0 - 6.0 * fwhm, f0 + 6.0 * fwhm, 401);
        let noise = Some((0.01, seed));
        let trace = match shape {
            LineShape::Fano => synthetic_fano_trace(freqs, f0, fwhm, Complex64::new(0.5, 0.2), 1.0, 1.1, noise),
            s => synthetic_power_trace(freqs, s, f0, fwhm, 1.0, 0.2, noise),
        }.unwrap();
        let fit = fit_resonance(&trace, shape).unwrap();
        prop_assert!((fit.f0_hz / f0 - 1.0).abs() < 0.02);
        prop_assert!((fit.linewidth_fwhm_hz / fwhm - 1.0).abs() < 0.02, "fwhm {} vs {}", fit.linewidth_fwhm_hz, fwhm);
        prop_assert!((fit.amplitude - 1.0).abs() < 0.02);
    }
}
