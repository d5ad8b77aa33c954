//! Mode area of a focused resonator versus its radius, and the gain over a
//! flat resonator of the same size.

use saw_optomech::acoustics::bessel_mode_area;

fn main() -> saw_optomech::Result<()> {
    let lambda = 40e-6;
    println!(
        "{:>10} {:>6} {:>10} {:>14} {:>14} {:>10}",
        "r_eff_um", "n", "eta", "A_exact_m2", "A_asym_m2", "gain"
    );
    for r_um in [50.0, 100.0, 250.0, 500.0, 1000.0, 2000.0] {
        let a = bessel_mode_area(r_um * 1e-6, lambda)?;
        println!(
            "{:>10.0} {:>6} {:>10.5} {:>14.4e} {:>14.4e} {:>10.1}",
            r_um,
            a.n_nodes,
            a.eta,
            a.a_exact,
            a.a_asymptotic,
            a.focusing_gain()
        );
    }
    println!("1/pi = {:.5}", std::f64::consts::FRAC_1_PI);
    Ok(())
}
