//! SAW resonance frequency for the built-in cuts across a few wavelengths.

use saw_optomech::materials::{material_for_cut, resonance_frequency};

fn main() -> saw_optomech::Result<()> {
    println!("{:>10} {:>12} {:>14}", "cut", "lambda_um", "f0_MHz");
    for cut in ["Y", "128Y"] {
        let m = material_for_cut(cut, &[])?;
        for lambda_um in [20.0, 40.0, 80.0] {
            let f = resonance_frequency(&m, lambda_um * 1e-6)?;
            println!("{:>10} {:>12.1} {:>14.3}", m.cut.to_string(), lambda_um, f / 1e6);
        }
    }
    Ok(())
}
