//! Hausdorff content of grid sets.
//!
//! The dyadic content is computed exactly. The ball content is only
//! bracketed: a certified upper bound from an explicit ball cover and a lower
//! bound from the dyadic value and the comparability constants below.

pub mod ball;
pub mod dyadic;

pub use ball::{BallFamily, CenterPolicy, ContentParams};
pub use dyadic::{dyadic_value, optimal_dyadic_cover, DyadicTree};

use crate::error::{param, Result};
use crate::geometry::{Ball, DyadicCube, Grid, GridSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ContentBackend {
    DyadicExact,
    BallGreedy,
    BallExactSmall,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CoverElement {
    Cube(DyadicCube),
    Ball(Ball),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContentResult {
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub delta: f64,
    pub backend: ContentBackend,
    pub cover: Vec<CoverElement>,
}

impl ContentResult {
    /// `sum side^delta` or `sum r^delta` over the certificate.
    pub fn certificate_cost(&self) -> f64 {
        self.cover
            .iter()
            .map(|e| match e {
                CoverElement::Cube(q) => q.side().powf(self.delta),
                CoverElement::Ball(b) => b.radius.powf(self.delta),
            })
            .sum()
    }

    /// Whether every occupied cell lies in some certificate element.
    pub fn certificate_covers(&self, set: &GridSet) -> bool {
        let grid = set.grid();
        set.occupied().all(|cell| {
            self.cover.iter().any(|e| match e {
                CoverElement::Cube(q) => q.contains_cell(&grid, cell),
                CoverElement::Ball(b) => ball_contains_cell(b, grid, cell),
            })
        })
    }
}

fn ball_contains_cell(b: &Ball, grid: Grid, cell: usize) -> bool {
    let c = grid.center(cell);
    let hw = grid.cell_width() / 2.0;
    let far2: f64 = (0..grid.n())
        .map(|a| {
            let d = (b.center[a] - c[a]).abs() + hw;
            d * d
        })
        .sum();
    far2 <= b.radius * b.radius * (1.0 + 1e-12)
}

fn check_delta(n: usize, delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta <= n as f64) {
        return param(format!("delta must lie in (0, n] = (0, {n}], got {delta}"));
    }
    Ok(())
}

/// Exact dyadic content with its optimal cube cover.
pub fn dyadic_content(set: &GridSet, delta: f64) -> Result<ContentResult> {
    check_delta(set.grid().n(), delta)?;
    let cover = optimal_dyadic_cover(set, delta);
    Ok(ContentResult {
        value: cover.value,
        lower: cover.value,
        upper: cover.value,
        delta,
        backend: ContentBackend::DyadicExact,
        cover: cover.cubes.into_iter().map(CoverElement::Cube).collect(),
    })
}

/// Constants `(c_low, c_high)` with `c_low * dyadic <= ball <= c_high * dyadic`.
///
/// A dyadic cube of side `s` sits in a ball of radius `(sqrt n / 2) s`, so
/// `ball <= (sqrt n / 2)^delta * dyadic`. A ball of radius `r` sits in a cube
/// of side `2r`, which meets at most `2^n` dyadic cubes of one side length in
/// `[2r, 4r)`, so `dyadic <= 2^n 4^delta * ball`. These are derived bounds,
/// not tight values.
pub fn comparability_bracket(n: usize, delta: f64) -> Result<(f64, f64)> {
    check_delta(n, delta)?;
    let c_low = (-(n as f64)).exp2() * 4f64.powf(-delta);
    let c_high = ((n as f64).sqrt() / 2.0).powf(delta);
    Ok((c_low, c_high))
}

/// Greedy upper bound on the ball content, bracketed below by the dyadic
/// value.
pub fn ball_content_upper(set: &GridSet, params: &ContentParams) -> Result<ContentResult> {
    let family = BallFamily::new(set.grid(), params)?;
    ball_content_upper_with(&family, set, params.delta)
}

pub fn ball_content_upper_with(
    family: &BallFamily,
    set: &GridSet,
    delta: f64,
) -> Result<ContentResult> {
    let (c_low, _) = comparability_bracket(set.grid().n(), delta)?;
    let cover = family.greedy(set);
    let lower = c_low * dyadic_value(set, delta);
    Ok(ContentResult {
        value: cover.cost,
        lower,
        upper: cover.cost,
        delta,
        backend: ContentBackend::BallGreedy,
        cover: family.cover_balls(&cover).into_iter().map(CoverElement::Ball).collect(),
    })
}

/// Exact optimum over the candidate family for small instances.
pub fn ball_content_exact_small(set: &GridSet, params: &ContentParams) -> Result<ContentResult> {
    let family = BallFamily::new(set.grid(), params)?;
    let (c_low, _) = comparability_bracket(set.grid().n(), params.delta)?;
    let cover = family.exact(set, params, c_low)?;
    Ok(ContentResult {
        value: cover.cost,
        lower: cover.cost,
        upper: cover.cost,
        delta: params.delta,
        backend: ContentBackend::BallExactSmall,
        cover: family.cover_balls(&cover).into_iter().map(CoverElement::Ball).collect(),
    })
}
