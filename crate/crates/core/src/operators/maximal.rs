use super::{check_kappa, OperatorParams, OperatorResult};
use crate::choquet::Content;
use crate::error::{param, Result};
use crate::geometry::{Ball, Grid, GridFunction, MAX_DIM};
use crate::operators::ladder::{BallStencils, RadiusLadder};
use crate::par;

/// Ball centers for the uncentered operators: lattice points whose half-unit
/// coordinates are multiples of `stride`, together with every cell center.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Candidates {
    pub stride: u32,
}

impl Default for Candidates {
    /// Cell corners and cell centers.
    fn default() -> Self {
        Self { stride: 2 }
    }
}

impl Candidates {
    pub fn points(&self, grid: Grid) -> Vec<[i64; MAX_DIM]> {
        let mut pts = grid.lattice_points(self.stride);
        pts.extend((0..grid.len()).map(|c| grid.center_half(c)));
        pts.sort_unstable();
        pts.dedup();
        pts
    }
}

fn check_grids(f: &GridFunction, content: &Content, ladder: &RadiusLadder) -> Result<()> {
    if f.grid() != content.grid() || f.grid() != ladder.grid() {
        return param("function, content and ladder must share one grid");
    }
    Ok(())
}

/// `r^(kappa - delta) * int_{B(p, r)} f dH` for every ladder radius.
fn ball_averages(
    f: &GridFunction,
    content: &Content,
    ladder: &RadiusLadder,
    stencils: &BallStencils,
    p: &[i64; MAX_DIM],
    kappa: f64,
) -> Vec<f64> {
    let delta = content.delta();
    let mut cells = Vec::new();
    let mut entries: Vec<(u32, f64)> = Vec::new();
    let mut out = Vec::with_capacity(ladder.len());
    let mut last: Option<(usize, f64)> = None;
    for k in 0..ladder.len() {
        stencils.cells(p, k, &mut cells);
        entries.clear();
        entries.extend(cells.iter().filter(|&&c| f.get(c) > 0.0).map(|&c| (c as u32, f.get(c))));
        // Balls are nested, so an unchanged support count means an unchanged
        // restriction.
        let integral = match last {
            Some((len, v)) if len == entries.len() => v,
            _ => content.integral_of_entries(&entries),
        };
        last = Some((entries.len(), integral));
        out.push(ladder.radius(k).powf(kappa - delta) * integral);
    }
    out
}

fn max_of(values: &[f64]) -> f64 {
    values.iter().copied().fold(0.0, f64::max)
}

/// Centered fractional maximal function at each cell center.
pub fn maximal_centered(
    f: &GridFunction,
    content: &Content,
    kappa: f64,
    ladder: &RadiusLadder,
) -> Result<OperatorResult> {
    let grid = f.grid();
    check_kappa(grid.n(), content.delta(), kappa)?;
    check_grids(f, content, ladder)?;
    let stencils = BallStencils::new(ladder);
    let values = par::map_indices(grid.len(), |x| {
        max_of(&ball_averages(f, content, ladder, &stencils, &grid.center_half(x), kappa))
    });
    let mut params = OperatorParams::named("maximal-centered");
    params.delta = Some(content.delta());
    params.kappa = Some(kappa);
    params.backend = Some(content.backend());
    params.ladder = Some(ladder.radii());
    Ok(OperatorResult::new(GridFunction::from_values(grid, values)?, params, f))
}

/// Scatters per-candidate, per-radius values to the cells inside each ball,
/// keeping the maximum.
fn scatter(
    grid: Grid,
    points: &[[i64; MAX_DIM]],
    values: &[Vec<f64>],
    stencils: &BallStencils,
) -> Vec<f64> {
    let mut out = vec![0.0f64; grid.len()];
    let mut cells = Vec::new();
    for (p, vals) in points.iter().zip(values) {
        for (k, &v) in vals.iter().enumerate() {
            if v == 0.0 {
                continue;
            }
            stencils.cells(p, k, &mut cells);
            for &c in &cells {
                if v > out[c] {
                    out[c] = v;
                }
            }
        }
    }
    out
}

/// Uncentered fractional maximal function: the largest normalized ball
/// integral over candidate balls whose interior contains the cell center.
pub fn maximal_uncentered(
    f: &GridFunction,
    content: &Content,
    kappa: f64,
    ladder: &RadiusLadder,
    candidates: Candidates,
) -> Result<OperatorResult> {
    let grid = f.grid();
    check_kappa(grid.n(), content.delta(), kappa)?;
    check_grids(f, content, ladder)?;
    let stencils = BallStencils::new(ladder);
    let points = candidates.points(grid);
    let values = par::map_slice(&points, |p| ball_averages(f, content, ladder, &stencils, p, kappa));
    let out = scatter(grid, &points, &values, &stencils);
    let mut params = OperatorParams::named("maximal-uncentered");
    params.delta = Some(content.delta());
    params.kappa = Some(kappa);
    params.backend = Some(content.backend());
    params.ladder = Some(ladder.radii());
    params.stride = Some(candidates.stride);
    Ok(OperatorResult::new(GridFunction::from_values(grid, out)?, params, f))
}

/// Sharp maximal function: over candidate balls containing the cell center,
/// the largest `r^-delta int_B |f - f_B| dH` with `f_B = r^-delta int_B f dH`.
/// Cells of `B` where `f` vanishes contribute `f_B`.
pub fn maximal_sharp(
    f: &GridFunction,
    content: &Content,
    ladder: &RadiusLadder,
    candidates: Candidates,
) -> Result<OperatorResult> {
    let grid = f.grid();
    check_kappa(grid.n(), content.delta(), 0.0)?;
    check_grids(f, content, ladder)?;
    let delta = content.delta();
    let stencils = BallStencils::new(ladder);
    let points = candidates.points(grid);
    let values = par::map_slice(&points, |p| {
        let mut cells = Vec::new();
        let mut entries: Vec<(u32, f64)> = Vec::new();
        (0..ladder.len())
            .map(|k| {
                let scale = ladder.radius(k).powf(-delta);
                stencils.cells(p, k, &mut cells);
                entries.clear();
                entries.extend(
                    cells.iter().filter(|&&c| f.get(c) > 0.0).map(|&c| (c as u32, f.get(c))),
                );
                let avg = scale * content.integral_of_entries(&entries);
                if !avg.is_finite() {
                    return f64::INFINITY;
                }
                entries.clear();
                entries.extend(cells.iter().map(|&c| (c as u32, (f.get(c) - avg).abs())));
                scale * content.integral_of_entries(&entries)
            })
            .collect::<Vec<f64>>()
    });
    let out = scatter(grid, &points, &values, &stencils);
    let mut params = OperatorParams::named("maximal-sharp");
    params.delta = Some(delta);
    params.backend = Some(content.backend());
    params.ladder = Some(ladder.radii());
    params.stride = Some(candidates.stride);
    Ok(OperatorResult::new(GridFunction::from_values(grid, out)?, params, f))
}

/// Centered Lebesgue fractional maximal function by Riemann sums:
/// `max_r r^kappa / |B(x, r)| * sum_{cells in B} f * cell volume`.
pub fn classical_maximal(f: &GridFunction, kappa: f64, ladder: &RadiusLadder) -> Result<OperatorResult> {
    let grid = f.grid();
    let n = grid.n();
    if !(kappa >= 0.0 && kappa < n as f64) {
        return param(format!("kappa must satisfy 0 <= kappa < n = {n}, got {kappa}"));
    }
    if ladder.grid() != grid {
        return param("function and ladder must share one grid");
    }
    let stencils = BallStencils::new(ladder);
    let vol = grid.cell_volume();
    let values = par::map_indices(grid.len(), |x| {
        let mut cells = Vec::new();
        let p = grid.center_half(x);
        (0..ladder.len())
            .map(|k| {
                stencils.cells(&p, k, &mut cells);
                let r = ladder.radius(k);
                let sum: f64 = cells.iter().map(|&c| f.get(c)).sum::<f64>() * vol;
                if sum == 0.0 {
                    0.0
                } else {
                    r.powf(kappa) / Ball::volume(n, r) * sum
                }
            })
            .fold(0.0, f64::max)
    });
    let mut params = OperatorParams::named("classical-maximal");
    params.kappa = Some(kappa);
    params.ladder = Some(ladder.radii());
    Ok(OperatorResult::new(GridFunction::from_values(grid, values)?, params, f))
}
