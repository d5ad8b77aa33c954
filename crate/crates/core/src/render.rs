//! Textual renderings of sampled fields: SVG heatmaps and CSV tables.

use std::fmt::Write as _;

use crate::acoustics::ModeField;
use crate::grid::GridField;
use crate::optoelastics::{sideband_power_map, PhaseMap};

/// Colour ramp stops, position in [0, 1] to sRGB. Sequential, dark blue
/// (low) through magenta and orange to yellow (high).
pub const RAMP: [(f64, [u8; 3]); 5] = [
    (0.00, [13, 8, 135]),
    (0.25, [126, 3, 168]),
    (0.50, [204, 71, 120]),
    (0.75, [248, 149, 64]),
    (1.00, [240, 249, 33]),
];

/// Colour levels; neighbouring cells on the same level merge into one rect.
pub const RAMP_LEVELS: usize = 64;

/// Largest number of cells drawn per axis.
pub const MAX_CELLS: usize = 256;

const CELL: usize = 2;
const MARGIN: usize = 8;
const TITLE_H: usize = 20;
const LEGEND_W: usize = 16;
const LEGEND_GAP: usize = 12;
const LABEL_W: usize = 96;

/// How field values map onto the ramp.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    /// `[min, max]` of the data.
    Linear,
    /// `[-m, m]` with `m = max|v|`, so zero sits mid-ramp.
    Symmetric,
}

pub fn ramp_colour(t: f64) -> [u8; 3] {
    let t = if t.is_finite() { t.clamp(0.0, 1.0) } else { 0.0 };
    let k = RAMP.iter().position(|s| s.0 >= t).unwrap_or(RAMP.len() - 1).max(1);
    let (t0, c0) = RAMP[k - 1];
    let (t1, c1) = RAMP[k];
    let u = (t - t0) / (t1 - t0);
    let mut out = [0u8; 3];
    for i in 0..3 {
        out[i] = (c0[i] as f64 + u * (c1[i] as f64 - c0[i] as f64)).round() as u8;
    }
    out
}

fn level_colour(level: usize) -> String {
    let [r, g, b] = ramp_colour(level as f64 / (RAMP_LEVELS - 1) as f64);
    format!("#{r:02x}{g:02x}{b:02x}")
}

/// Node indices drawn along one axis. For odd counts the centre node is kept
/// so mirror symmetry about the origin survives decimation.
fn display_indices(points: usize) -> Vec<usize> {
    let stride = points.div_ceil(MAX_CELLS).max(1);
    if points % 2 == 1 {
        let c = points / 2;
        let k = c / stride;
        (0..=2 * k).map(|j| c + j * stride - k * stride).collect()
    } else {
        (0..points).step_by(stride).collect()
    }
}

/// Heatmap of `field` with x to the right and z upward, plus a vertical
/// legend carrying the numeric ends of the scale.
pub fn heatmap_svg(field: &GridField, title: &str, unit: &str, scale: Scale) -> String {
    let (lo, hi) = match scale {
        Scale::Linear => field
            .values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v))),
        Scale::Symmetric => {
            let m = field.values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            (-m, m)
        }
    };
    let span = hi - lo;
    let level = |v: f64| -> usize {
        if span > 0.0 {
            (((v - lo) / span) * (RAMP_LEVELS - 1) as f64).round() as usize
        } else {
            0
        }
    };

    let idx = display_indices(field.grid.points);
    let n = idx.len();
    let map_px = n * CELL;
    let width = MARGIN + map_px + LEGEND_GAP + LEGEND_W + LABEL_W;
    let height = TITLE_H + map_px + 2 * MARGIN;
    let (ox, oy) = (MARGIN, TITLE_H + MARGIN);

    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" viewBox="0 0 {width} {height}" width="{width}" height="{height}" shape-rendering="crispEdges">"#
    );
    out.push_str("<style>text{font-family:sans-serif;font-size:11px;fill:#222}</style>\n");
    let _ = writeln!(
        out,
        "<!-- extent_m={} points={} drawn={} min={:e} max={:e} -->",
        field.grid.extent, field.grid.points, n, lo, hi
    );
    let _ = writeln!(out, r#"<text x="{MARGIN}" y="14">{}</text>"#, escape(title));

    out.push_str("<g id=\"map\">\n");
    for (row, &iz) in idx.iter().rev().enumerate() {
        let y = oy + row * CELL;
        let mut col = 0;
        while col < n {
            let lv = level(field.get(idx[col], iz));
            let mut end = col + 1;
            while end < n && level(field.get(idx[end], iz)) == lv {
                end += 1;
            }
            let _ = writeln!(
                out,
                r#"<rect x="{}" y="{y}" width="{}" height="{CELL}" fill="{}"/>"#,
                ox + col * CELL,
                (end - col) * CELL,
                level_colour(lv)
            );
            col = end;
        }
    }
    out.push_str("</g>\n");

    let lx = ox + map_px + LEGEND_GAP;
    out.push_str("<g id=\"legend\">\n");
    let step = map_px as f64 / RAMP_LEVELS as f64;
    for lv in 0..RAMP_LEVELS {
        let top = oy as f64 + (RAMP_LEVELS - 1 - lv) as f64 * step;
        let _ = writeln!(
            out,
            r#"<rect x="{lx}" y="{top:.3}" width="{LEGEND_W}" height="{:.3}" fill="{}"/>"#,
            step + 0.01,
            level_colour(lv)
        );
    }
    let tx = lx + LEGEND_W + 4;
    let _ = writeln!(
        out,
        r#"<text x="{tx}" y="{}">max {hi:.4e} {}</text>"#,
        oy + 10,
        escape(unit)
    );
    let _ = writeln!(
        out,
        r#"<text x="{tx}" y="{}">min {lo:.4e} {}</text>"#,
        oy + map_px,
        escape(unit)
    );
    out.push_str("</g>\n</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// `x_m,z_m,u_m`, one row per node, x-major.
pub fn mode_field_csv(mode: &ModeField) -> String {
    let f = &mode.u_amplitude;
    let coords = f.grid.coords();
    let mut out = String::with_capacity(f.values.len() * 64);
    out.push_str("x_m,z_m,u_m\n");
    for (ix, x) in coords.iter().enumerate() {
        for (iz, z) in coords.iter().enumerate() {
            let _ = writeln!(out, "{x:e},{z:e},{:e}", f.get(ix, iz));
        }
    }
    out
}

/// `x_m,z_m,phi_rad,sideband_power`, power normalised to the map maximum.
pub fn phase_map_csv(map: &PhaseMap) -> String {
    let power = sideband_power_map(map);
    let coords = map.phi.grid.coords();
    let mut out = String::with_capacity(map.phi.values.len() * 80);
    out.push_str("x_m,z_m,phi_rad,sideband_power\n");
    for (ix, x) in coords.iter().enumerate() {
        for (iz, z) in coords.iter().enumerate() {
            let _ = writeln!(out, "{x:e},{z:e},{:e},{:e}", map.phi.get(ix, iz), power.get(ix, iz));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    #[test]
    fn ramp_endpoints_and_interior() {
        assert_eq!(ramp_colour(0.0), RAMP[0].1);
        assert_eq!(ramp_colour(1.0), RAMP[4].1);
        assert_eq!(ramp_colour(0.5), RAMP[2].1);
        assert_eq!(ramp_colour(-3.0), RAMP[0].1);
        assert_eq!(ramp_colour(f64::NAN), RAMP[0].1);
        assert_eq!(ramp_colour(0.125), [70, 6, 152]);
    }

    #[test]
    fn decimation_keeps_centre_and_cap() {
        let idx = display_indices(513);
        assert!(idx.len() <= MAX_CELLS);
        assert!(idx.contains(&256));
        assert_eq!(idx.first().unwrap() + idx.last().unwrap(), 512);
        assert_eq!(display_indices(65), (0..65).collect::<Vec<_>>());
        assert!(display_indices(1000).len() <= MAX_CELLS);
    }

    #[test]
    fn heatmap_is_deterministic_with_legend() {
        let g = GridField::from_fn(Grid::new(1.0, 65), |x, z| x * x - z);
        let a = heatmap_svg(&g, "test <map>", "rad", Scale::Symmetric);
        assert_eq!(a, heatmap_svg(&g, "test <map>", "rad", Scale::Symmetric));
        assert!(a.contains("test &lt;map&gt;"));
        assert!(a.contains("max 2.0000e0 rad"));
        assert!(a.contains("min -2.0000e0 rad"));
        assert_eq!(a.matches("<rect").count() - RAMP_LEVELS, count_runs(&g));
    }

    fn count_runs(g: &GridField) -> usize {
        // independent recount: a constant row collapses to one rect
        let n = g.grid.points;
        let level = |v: f64| ((v + 2.0) / 4.0 * 63.0).round() as usize;
        (0..n)
            .map(|iz| {
                1 + (1..n)
                    .filter(|&ix| level(g.get(ix, iz)) != level(g.get(ix - 1, iz)))
                    .count()
            })
            .sum()
    }

    #[test]
    fn constant_field_renders() {
        let g = GridField::from_fn(Grid::new(1.0, 65), |_, _| 3.0);
        let s = heatmap_svg(&g, "flat", "m", Scale::Linear);
        assert_eq!(s.matches("<rect").count(), 65 + RAMP_LEVELS);
    }
}
