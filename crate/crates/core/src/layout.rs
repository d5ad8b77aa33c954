//! Concentric anisotropic IDT and Bragg-mirror layout.
//!
//! Every electrode is bounded by two contours. Contour `n` follows
//! `r_n(θ) = (r_c + n·λ0/4)·v(θ)/v0`, so the radial pitch along any direction
//! is a quarter of the local wavelength `λ(θ) = v(θ)/f`.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::materials::{AnisotropyProfile, MaterialProperties};

pub const MIN_SAMPLES_PER_CONTOUR: usize = 64;
pub const DEFAULT_SAMPLES_PER_CONTOUR: usize = 720;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RingRole {
    IdtPortA,
    IdtPortB,
    Mirror,
}

impl RingRole {
    pub fn label(self) -> &'static str {
        match self {
            RingRole::IdtPortA => "idt_a",
            RingRole::IdtPortB => "idt_b",
            RingRole::Mirror => "mirror",
        }
    }
}

/// One closed polyline sampled at uniform angles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Contour {
    pub ring: usize,
    pub role: RingRole,
    /// `(θ, r)` pairs in radians and metres.
    pub samples: Vec<(f64, f64)>,
}

impl Contour {
    pub fn mean_radius(&self) -> f64 {
        self.samples.iter().map(|s| s.1).sum::<f64>() / self.samples.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonatorGeometry {
    pub lambda_saw: f64,
    pub electrode_width: f64,
    pub electrode_gap: f64,
    pub idt_pairs: usize,
    pub mirror_pairs: usize,
    pub inner_clear_radius: f64,
    pub contours: Vec<Contour>,
    pub r_eff: f64,
}

/// Layout knobs for [`generate_focusing_circuit`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LayoutSpec {
    pub lambda_saw: f64,
    pub idt_pairs: usize,
    pub mirror_pairs: usize,
    pub inner_clear_radius: f64,
    pub samples_per_contour: usize,
}

impl Default for LayoutSpec {
    /// λ = 40 µm, 200 µm clear centre, outer edge near 1 mm.
    fn default() -> Self {
        LayoutSpec {
            lambda_saw: 40e-6,
            idt_pairs: 8,
            mirror_pairs: 12,
            inner_clear_radius: 200e-6,
            samples_per_contour: DEFAULT_SAMPLES_PER_CONTOUR,
        }
    }
}

fn role_of(electrode: usize, idt_pairs: usize) -> RingRole {
    if electrode < 2 * idt_pairs {
        if electrode.is_multiple_of(2) {
            RingRole::IdtPortA
        } else {
            RingRole::IdtPortB
        }
    } else {
        RingRole::Mirror
    }
}

pub fn generate_focusing_circuit(material: &MaterialProperties, spec: &LayoutSpec) -> Result<ResonatorGeometry> {
    if !(spec.lambda_saw.is_finite() && spec.lambda_saw > 0.0) {
        return Err(Error::InvalidWavelength(spec.lambda_saw));
    }
    if spec.idt_pairs == 0 || spec.mirror_pairs == 0 {
        return Err(Error::InvalidParameter(
            "idt_pairs and mirror_pairs must be at least 1".into(),
        ));
    }
    if spec.samples_per_contour < MIN_SAMPLES_PER_CONTOUR {
        return Err(Error::InvalidParameter(format!(
            "samples_per_contour must be >= {MIN_SAMPLES_PER_CONTOUR}"
        )));
    }
    if !(spec.inner_clear_radius.is_finite() && spec.inner_clear_radius >= 0.0) {
        return Err(Error::InvalidParameter("inner_clear_radius must be >= 0".into()));
    }
    let profile = &material.anisotropy;
    let pitch = spec.lambda_saw / 4.0;
    let electrodes = 2 * (spec.idt_pairs + spec.mirror_pairs);
    let m = spec.samples_per_contour;
    let thetas: Vec<f64> = (0..m).map(|i| TAU * i as f64 / m as f64).collect();
    let shapes: Vec<f64> = thetas.iter().map(|&t| profile.shape(t)).collect();

    let contours: Vec<Contour> = (0..2 * electrodes)
        .into_par_iter()
        .map(|n| {
            let base = spec.inner_clear_radius + n as f64 * pitch;
            Contour {
                ring: n,
                role: role_of(n / 2, spec.idt_pairs),
                samples: thetas.iter().zip(&shapes).map(|(&t, &s)| (t, base * s)).collect(),
            }
        })
        .collect();

    check_nesting(&contours, profile, &thetas, pitch)?;
    let r_eff = contours.last().map(Contour::mean_radius).unwrap_or(0.0);
    Ok(ResonatorGeometry {
        lambda_saw: spec.lambda_saw,
        electrode_width: pitch,
        electrode_gap: pitch,
        idt_pairs: spec.idt_pairs,
        mirror_pairs: spec.mirror_pairs,
        inner_clear_radius: spec.inner_clear_radius,
        contours,
        r_eff,
    })
}

/// Adjacent contours must be radially ordered and, measured along the curve
/// normal, at least half a nominal gap apart.
fn check_nesting(contours: &[Contour], profile: &AnisotropyProfile, thetas: &[f64], pitch: f64) -> Result<()> {
    let min_gap = 0.5 * pitch;
    let slope: Vec<f64> = thetas
        .iter()
        .map(|&t| profile.shape_derivative(t) / profile.shape(t))
        .collect();
    for pair in contours.windows(2) {
        let (inner, outer) = (&pair[0], &pair[1]);
        for ((a, b), k) in inner.samples.iter().zip(&outer.samples).zip(&slope) {
            let dr = b.1 - a.1;
            let normal_gap = dr / (1.0 + k * k).sqrt();
            if !(dr > 0.0) || normal_gap < min_gap {
                return Err(Error::ContourCollision { ring: outer.ring });
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GeometryFormat {
    Svg,
    Csv,
}

/// Renders the layout. SVG uses 1 unit = 1 µm; CSV lists every sample.
pub fn export_geometry(geom: &ResonatorGeometry, format: GeometryFormat) -> Vec<u8> {
    match format {
        GeometryFormat::Csv => geometry_csv(geom).into_bytes(),
        GeometryFormat::Svg => geometry_svg(geom).into_bytes(),
    }
}

fn geometry_csv(geom: &ResonatorGeometry) -> String {
    let mut out = String::from("ring,role,theta_rad,r_m\n");
    for c in &geom.contours {
        for &(t, r) in &c.samples {
            let _ = writeln!(out, "{},{},{},{}", c.ring, c.role.label(), t, r);
        }
    }
    out
}

fn geometry_svg(geom: &ResonatorGeometry) -> String {
    let to_um = |t: f64, r: f64| (r * t.cos() * 1e6, -r * t.sin() * 1e6);
    let (mut min_x, mut max_x, mut min_y, mut max_y) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for c in &geom.contours {
        for &(t, r) in &c.samples {
            let (x, y) = to_um(t, r);
            min_x = min_x.min(x);
            max_x = max_x.max(x);
            min_y = min_y.min(y);
            max_y = max_y.max(y);
        }
    }
    let margin = geom.lambda_saw * 1e6;
    let (vx, vy) = (min_x - margin, min_y - margin);
    let (vw, vh) = (max_x - min_x + 2.0 * margin, max_y - min_y + 2.0 * margin);
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" viewBox="{vx:.4} {vy:.4} {vw:.4} {vh:.4}" width="{vw:.4}" height="{vh:.4}">"#
    );
    out.push_str(
        "<style>path{fill:none;stroke-width:0.5}.idt_a{stroke:#2a9d3f}.idt_b{stroke:#7ac74f}.mirror{stroke:#1f4e9c}</style>\n",
    );
    let _ = writeln!(
        out,
        "<!-- lambda_saw_m={} r_eff_m={} contours={} -->",
        geom.lambda_saw,
        geom.r_eff,
        geom.contours.len()
    );
    for c in &geom.contours {
        let _ = write!(out, r#"<path class="{}" data-ring="{}" d=""#, c.role.label(), c.ring);
        for (i, &(t, r)) in c.samples.iter().enumerate() {
            let (x, y) = to_um(t, r);
            let _ = write!(out, "{}{x:.4} {y:.4}", if i == 0 { "M" } else { " L" });
        }
        out.push_str(" Z\"/>\n");
    }
    out.push_str("</svg>\n");
    out
}

/// Parses the `viewBox` width and height back out of an exported SVG.
pub fn svg_view_box_size(svg: &str) -> Option<(f64, f64)> {
    let start = svg.find("viewBox=\"")? + 9;
    let end = start + svg[start..].find('"')?;
    let nums: Vec<f64> = svg[start..end]
        .split_whitespace()
        .filter_map(|s| s.parse().ok())
        .collect();
    (nums.len() == 4).then(|| (nums[2], nums[3]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn iso() -> MaterialProperties {
        MaterialProperties::y_cut()
    }

    #[test]
    fn isotropic_contours_are_circles() {
        let g = generate_focusing_circuit(&iso(), &LayoutSpec::default()).unwrap();
        assert_eq!(g.electrode_width, 10e-6);
        assert_eq!(g.electrode_gap, 10e-6);
        for c in &g.contours {
            let r0 = c.samples[0].1;
            for &(_, r) in &c.samples {
                assert!((r - r0).abs() <= 1e-12 * r0);
            }
        }
        for w in g.contours.windows(2) {
            assert!((w[1].samples[0].1 - w[0].samples[0].1 - 10e-6).abs() < 1e-15);
        }
        assert_eq!(g.contours.len(), 4 * (8 + 12));
        assert!((g.r_eff - 990e-6).abs() < 1e-12);
    }

    #[test]
    fn anisotropic_ratio_follows_shape() {
        let m = iso().with_anisotropy(vec![(1, 0.05)]).unwrap();
        let spec = LayoutSpec {
            samples_per_contour: 720,
            ..LayoutSpec::default()
        };
        let g = generate_focusing_circuit(&m, &spec).unwrap();
        let quarter = 720 / 4;
        for c in &g.contours {
            assert!((c.samples[quarter].0 - FRAC_PI_2).abs() < 1e-15);
            let ratio = c.samples[0].1 / c.samples[quarter].1;
            assert!((ratio - 1.05 / 0.95).abs() < 1e-9);
            // direct evaluation of the contour rule
            let base = 200e-6 + c.ring as f64 * 10e-6;
            assert!((c.samples[0].1 - base * 1.05).abs() < 1e-15);
        }
    }

    #[test]
    fn strong_anisotropy_collides() {
        // steep v(θ) compresses the normal spacing below half a gap
        let m = iso().with_anisotropy(vec![(8, 0.9)]).unwrap();
        let err = generate_focusing_circuit(&m, &LayoutSpec::default()).unwrap_err();
        assert_eq!(err, Error::ContourCollision { ring: 1 });
    }

    #[test]
    fn r_eff_grows_with_mirror_pairs() {
        let mut last = 0.0;
        for mirror_pairs in 1..8 {
            let g = generate_focusing_circuit(
                &iso(),
                &LayoutSpec {
                    mirror_pairs,
                    samples_per_contour: 64,
                    ..LayoutSpec::default()
                },
            )
            .unwrap();
            assert!(g.r_eff > last);
            last = g.r_eff;
        }
    }

    #[test]
    fn roles_alternate_then_mirror() {
        let g = generate_focusing_circuit(
            &iso(),
            &LayoutSpec {
                idt_pairs: 1,
                mirror_pairs: 1,
                ..LayoutSpec::default()
            },
        )
        .unwrap();
        let roles: Vec<RingRole> = g.contours.iter().map(|c| c.role).collect();
        use RingRole::*;
        assert_eq!(
            roles,
            vec![IdtPortA, IdtPortA, IdtPortB, IdtPortB, Mirror, Mirror, Mirror, Mirror]
        );
    }

    #[test]
    fn invalid_inputs() {
        let bad = |spec: LayoutSpec| generate_focusing_circuit(&iso(), &spec).is_err();
        assert!(bad(LayoutSpec {
            lambda_saw: 0.0,
            ..LayoutSpec::default()
        }));
        assert!(bad(LayoutSpec {
            idt_pairs: 0,
            ..LayoutSpec::default()
        }));
        assert!(bad(LayoutSpec {
            samples_per_contour: 63,
            ..LayoutSpec::default()
        }));
    }

    #[test]
    fn single_ring_csv() {
        let g = ResonatorGeometry {
            lambda_saw: 40e-6,
            electrode_width: 10e-6,
            electrode_gap: 10e-6,
            idt_pairs: 1,
            mirror_pairs: 0,
            inner_clear_radius: 0.0,
            contours: vec![Contour {
                ring: 0,
                role: RingRole::IdtPortA,
                samples: (0..64).map(|i| (TAU * i as f64 / 64.0, 5e-4)).collect(),
            }],
            r_eff: 5e-4,
        };
        let csv = String::from_utf8(export_geometry(&g, GeometryFormat::Csv)).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "ring,role,theta_rad,r_m");
        assert_eq!(lines.len(), 65);
        assert!(lines[1..].iter().all(|l| l.ends_with(",0.0005")));
    }

    #[test]
    fn svg_scale_and_determinism() {
        let g = generate_focusing_circuit(&iso(), &LayoutSpec::default()).unwrap();
        let a = export_geometry(&g, GeometryFormat::Svg);
        let b = export_geometry(&g, GeometryFormat::Svg);
        assert_eq!(a, b);
        let svg = String::from_utf8(a).unwrap();
        let (w, h) = svg_view_box_size(&svg).unwrap();
        assert!(
            (w / 2000.0 - 1.0).abs() < 0.05 && (h / 2000.0 - 1.0).abs() < 0.05,
            "{w} x {h}"
        );
        assert!(svg.contains("class=\"mirror\"") && svg.contains("class=\"idt_b\""));
    }
}
