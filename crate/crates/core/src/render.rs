//! SVG heatmaps of grid functions.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::error::{param, Result};
use crate::geometry::GridFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Linear,
    Log,
}

impl std::str::FromStr for Scale {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(Scale::Linear),
            "log" => Ok(Scale::Log),
            _ => param(format!("unknown color scale `{s}` (linear or log)")),
        }
    }
}

// viridis, sampled at five stops
const STOPS: [[f64; 3]; 5] = [
    [68.0, 1.0, 84.0],
    [59.0, 82.0, 139.0],
    [33.0, 145.0, 140.0],
    [94.0, 201.0, 98.0],
    [253.0, 231.0, 37.0],
];

fn color(t: f64) -> String {
    let t = t.clamp(0.0, 1.0) * (STOPS.len() - 1) as f64;
    let i = (t.floor() as usize).min(STOPS.len() - 2);
    let u = t - i as f64;
    let c: Vec<u8> = (0..3).map(|k| (STOPS[i][k] + u * (STOPS[i + 1][k] - STOPS[i][k])).round() as u8).collect();
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

/// Heatmap with one square per cell. In 1D the cells form a strip; in 3D the
/// slices along the last axis are laid out left to right. Zero cells are
/// white, infinite cells black. With the log scale, colors follow
/// `log(value)` between the smallest and largest positive finite values.
pub fn heatmap_svg(f: &GridFunction, scale: Scale, cell_px: u32) -> Result<String> {
    if cell_px == 0 {
        return param("cell size must be positive");
    }
    let g = f.grid();
    let side = g.side();
    let (cols, rows, slices) = match g.n() {
        1 => (side, 1, 1),
        2 => (side, side, 1),
        _ => (side, side, side),
    };
    let gap = if slices > 1 { cell_px } else { 0 };
    let width = slices * cols * cell_px + (slices - 1) * gap;
    let height = rows * cell_px;
    let finite: Vec<f64> = f.values().iter().copied().filter(|v| v.is_finite() && *v > 0.0).collect();
    let lo = finite.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = finite.iter().copied().fold(0.0, f64::max);
    let map = |v: f64| -> f64 {
        if !(hi > lo) {
            return 1.0;
        }
        match scale {
            Scale::Linear => v / hi,
            Scale::Log => (v.ln() - lo.ln()) / (hi.ln() - lo.ln()),
        }
    };
    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" shape-rendering="crispEdges">"#
    )
    .unwrap();
    writeln!(s, r#"<rect width="{width}" height="{height}" fill="white"/>"#).unwrap();
    for cell in 0..g.len() {
        let v = f.get(cell);
        if v == 0.0 {
            continue;
        }
        let c = g.coords(cell);
        let (col, row, slice) = match g.n() {
            1 => (c[0], 0, 0),
            2 => (c[0], c[1], 0),
            _ => (c[0], c[1], c[2]),
        };
        // first axis to the right, second axis up
        let x = slice * (cols * cell_px + gap) + col * cell_px;
        let y = (rows - 1 - row) * cell_px;
        let fill = if v.is_finite() { color(map(v)) } else { "#000000".to_string() };
        writeln!(s, r#"<rect x="{x}" y="{y}" width="{cell_px}" height="{cell_px}" fill="{fill}"><title>{v}</title></rect>"#).unwrap();
    }
    s.push_str("</svg>\n");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Grid;

    #[test]
    fn one_rect_per_nonzero_cell() {
        let g = Grid::new(2, 2).unwrap();
        let f = GridFunction::from_fn(g, |i| if i % 3 == 0 { 1.0 + i as f64 } else { 0.0 });
        for scale in [Scale::Linear, Scale::Log] {
            let svg = heatmap_svg(&f, scale, 4).unwrap();
            assert_eq!(svg.matches("<rect").count(), 1 + 6);
            assert!(svg.contains(r#"width="16""#));
        }
    }

    #[test]
    fn endpoints_of_the_color_map() {
        assert_eq!(color(0.0), "#440154");
        assert_eq!(color(1.0), "#fde725");
    }

    #[test]
    fn slices_side_by_side_in_3d() {
        let g = Grid::new(3, 1).unwrap();
        let svg = heatmap_svg(&GridFunction::constant(g, 1.0), Scale::Linear, 2).unwrap();
        assert!(svg.contains(r#"width="10" height="4""#));
    }
}
