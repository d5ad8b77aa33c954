//! Focusing resonator contours on an anisotropic substrate, exported as SVG
//! and CSV.
//!
//! `cargo run --example focusing_layout -- [output-dir]`

use std::path::PathBuf;

use saw_optomech::layout::{export_geometry, generate_focusing_circuit, GeometryFormat, LayoutSpec};
use saw_optomech::materials::MaterialProperties;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("focusing_layout"));
    std::fs::create_dir_all(&out)?;

    // weak two-fold speed variation; contours stretch along the fast axis
    let material = MaterialProperties::y_cut().with_anisotropy(vec![(1, 0.03)])?;
    let spec = LayoutSpec::default();
    let geom = generate_focusing_circuit(&material, &spec)?;

    let outer = geom.contours.last().expect("non-empty layout");
    let r_fast = outer.samples[0].1;
    let r_slow = outer.samples[spec.samples_per_contour / 4].1;
    println!("contours: {}", geom.contours.len());
    println!(
        "electrode width / gap: {:.1} / {:.1} um",
        geom.electrode_width * 1e6,
        geom.electrode_gap * 1e6
    );
    println!("r_eff: {:.1} um", geom.r_eff * 1e6);
    println!(
        "outer contour: {:.1} um (theta=0), {:.1} um (theta=90deg)",
        r_fast * 1e6,
        r_slow * 1e6
    );

    std::fs::write(out.join("layout.svg"), export_geometry(&geom, GeometryFormat::Svg))?;
    std::fs::write(out.join("layout.csv"), export_geometry(&geom, GeometryFormat::Csv))?;
    println!("wrote {}", out.display());
    Ok(())
}
