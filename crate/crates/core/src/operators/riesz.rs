use super::{check_alpha, OperatorParams, OperatorResult};
use crate::choquet::Content;
use crate::error::{param, Result};
use crate::geometry::{cell_distance, Grid, GridFunction};
use crate::par;

fn resolve_floor(grid: Grid, floor: Option<f64>) -> Result<f64> {
    let floor = floor.unwrap_or(grid.cell_width() / 2.0);
    if !(floor > 0.0 && floor.is_finite()) {
        return param(format!("distance floor must be positive and finite, got {floor}"));
    }
    Ok(floor)
}

/// `int f(y) max(|x - y|, floor)^(alpha - delta) dH(y)` at every cell center.
pub fn riesz_potential(
    f: &GridFunction,
    content: &Content,
    alpha: f64,
    distance_floor: Option<f64>,
) -> Result<OperatorResult> {
    let grid = f.grid();
    let delta = content.delta();
    check_alpha(grid.n(), delta, alpha)?;
    if content.grid() != grid {
        return param("function and content must share one grid");
    }
    let floor = resolve_floor(grid, distance_floor)?;
    let support: Vec<(u32, f64)> = f.entries();
    let values = par::map_indices(grid.len(), |x| {
        let entries: Vec<(u32, f64)> = support
            .iter()
            .map(|&(c, v)| (c, v * cell_distance(grid, x, c as usize).max(floor).powf(alpha - delta)))
            .collect();
        content.integral_of_entries(&entries)
    });
    let mut params = OperatorParams::named("riesz");
    params.delta = Some(delta);
    params.alpha = Some(alpha);
    params.backend = Some(content.backend());
    params.distance_floor = Some(floor);
    Ok(OperatorResult::new(GridFunction::from_values(grid, values)?, params, f))
}

/// Riemann sum of `f(y) max(|x - y|, floor)^(alpha - n)`.
pub fn classical_riesz(f: &GridFunction, alpha: f64, distance_floor: Option<f64>) -> Result<OperatorResult> {
    let grid = f.grid();
    let n = grid.n() as f64;
    if !(alpha > 0.0 && alpha < n) {
        return param(format!("alpha must satisfy 0 < alpha < n = {n}, got {alpha}"));
    }
    let floor = resolve_floor(grid, distance_floor)?;
    let support = f.entries();
    let vol = grid.cell_volume();
    let values = par::map_indices(grid.len(), |x| {
        support
            .iter()
            .map(|&(c, v)| v * cell_distance(grid, x, c as usize).max(floor).powf(alpha - n))
            .sum::<f64>()
            * vol
    });
    let mut params = OperatorParams::named("classical-riesz");
    params.alpha = Some(alpha);
    params.distance_floor = Some(floor);
    Ok(OperatorResult::new(GridFunction::from_values(grid, values)?, params, f))
}
