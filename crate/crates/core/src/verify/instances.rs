//! Seeded instance generators.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{param, Result};
use crate::geometry::{discretize_ball, Ball, BallMode, DyadicCube, Grid, GridFunction, GridSet};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InstanceKind {
    RandomSimple,
    BallIndicator,
    CantorDust { dimension: f64 },
    Checkerboard,
    PowerKernel { beta: f64, floor: Option<f64> },
    UnionOfCubes,
    ThinAnnulus,
}

impl InstanceKind {
    pub fn name(&self) -> &'static str {
        match self {
            InstanceKind::RandomSimple => "random-simple",
            InstanceKind::BallIndicator => "ball-indicator",
            InstanceKind::CantorDust { .. } => "cantor-dust",
            InstanceKind::Checkerboard => "checkerboard",
            InstanceKind::PowerKernel { .. } => "power-kernel",
            InstanceKind::UnionOfCubes => "union-of-cubes",
            InstanceKind::ThinAnnulus => "thin-annulus",
        }
    }
}

impl std::str::FromStr for InstanceKind {
    type Err = crate::Error;

    /// `name` or `name:param[:param]`, e.g. `cantor-dust:1.0`, `power-kernel:0.5`.
    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split(':');
        let name = parts.next().unwrap_or("");
        let nums: Vec<f64> = parts
            .map(|p| p.parse::<f64>().or_else(|_| param(format!("bad number `{p}` in `{s}`"))))
            .collect::<Result<_>>()?;
        Ok(match (name, nums.as_slice()) {
            ("random-simple", []) => InstanceKind::RandomSimple,
            ("ball-indicator", []) => InstanceKind::BallIndicator,
            ("cantor-dust", [d]) => InstanceKind::CantorDust { dimension: *d },
            ("checkerboard", []) => InstanceKind::Checkerboard,
            ("power-kernel", [b]) => InstanceKind::PowerKernel { beta: *b, floor: None },
            ("power-kernel", [b, fl]) => InstanceKind::PowerKernel { beta: *b, floor: Some(*fl) },
            ("union-of-cubes", []) => InstanceKind::UnionOfCubes,
            ("thin-annulus", []) => InstanceKind::ThinAnnulus,
            _ => return param(format!("unknown instance kind `{s}`")),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceSpec {
    #[serde(flatten)]
    pub kind: InstanceKind,
    pub n: usize,
    #[serde(rename = "L")]
    pub level: u32,
    /// Level the instance is drawn at before upsampling to `level`; the
    /// same continuum function is then represented at every finer level.
    pub coarse_level: Option<u32>,
    pub value_range: (f64, f64),
    pub seed: u64,
}

impl InstanceSpec {
    pub fn new(kind: InstanceKind, n: usize, level: u32, seed: u64) -> Self {
        Self { kind, n, level, coarse_level: None, value_range: (0.5, 2.0), seed }
    }
}

/// Builds the instance. Set-valued kinds yield `value * indicator` with one
/// value drawn from the range.
pub fn generate(spec: &InstanceSpec) -> Result<GridFunction> {
    let grid = Grid::new(spec.n, spec.level)?;
    let base_level = spec.coarse_level.map_or(spec.level, |c| c.min(spec.level));
    let base = Grid::new(spec.n, base_level)?;
    let (lo, hi) = spec.value_range;
    if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
        return param(format!("value range must satisfy 0 < lo <= hi < inf, got ({lo}, {hi})"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let draw = |rng: &mut ChaCha8Rng| if lo == hi { lo } else { rng.gen_range(lo..=hi) };
    let f = match spec.kind {
        InstanceKind::RandomSimple => {
            GridFunction::from_fn(base, |_| if rng.gen_bool(0.5) { 0.0 } else { draw(&mut rng) })
        }
        InstanceKind::BallIndicator => {
            let center: Vec<f64> = (0..spec.n).map(|_| rng.gen_range(0.25..0.75)).collect();
            let radius = rng.gen_range(0.125..0.25);
            let set = discretize_ball(&Ball::new(center, radius)?, base, BallMode::Inner)?;
            set.indicator().scale(draw(&mut rng))
        }
        InstanceKind::CantorDust { dimension } => {
            cantor_dust(base, dimension, &mut rng)?.indicator().scale(draw(&mut rng))
        }
        InstanceKind::Checkerboard => {
            let v = draw(&mut rng);
            GridFunction::from_fn(base, |i| {
                let c = base.coords(i);
                if c[..spec.n].iter().sum::<u32>() % 2 == 0 {
                    v
                } else {
                    0.0
                }
            })
        }
        InstanceKind::PowerKernel { beta, floor } => {
            if !(beta > 0.0 && beta.is_finite()) {
                return param(format!("power-kernel exponent must be positive, got {beta}"));
            }
            let floor = floor.unwrap_or(base.cell_width());
            if !(floor > 0.0) {
                return param("power-kernel floor must be positive");
            }
            let x0 = rng.gen_range(0..base.len());
            let v = draw(&mut rng);
            GridFunction::from_fn(base, |i| {
                v * crate::geometry::cell_distance(base, x0, i).max(floor).powf(-beta)
            })
        }
        InstanceKind::UnionOfCubes => {
            let k = rng.gen_range(1..=4);
            let mut f = GridFunction::zeros(base);
            for _ in 0..k {
                let l = rng.gen_range(1..=base_level.max(1)).min(base_level);
                let idx: Vec<u32> = (0..spec.n).map(|_| rng.gen_range(0..1u32 << l)).collect();
                let q = DyadicCube::new(spec.n, l, &idx)?;
                let cube = GridSet::from_fn(base, |i| q.contains_cell(&base, i));
                f = f.add(&cube.indicator().scale(draw(&mut rng)))?;
            }
            f
        }
        InstanceKind::ThinAnnulus => {
            let x0 = rng.gen_range(0..base.len());
            let w = base.cell_width();
            let r = rng.gen_range(0.15..0.35);
            let v = draw(&mut rng);
            GridFunction::from_fn(base, |i| {
                let d = crate::geometry::cell_distance(base, x0, i);
                if d >= r && d < r + w {
                    v
                } else {
                    0.0
                }
            })
        }
    };
    if base_level == spec.level {
        Ok(f)
    } else {
        debug_assert_eq!(f.grid(), base);
        let up = f.upsample(spec.level - base_level)?;
        debug_assert_eq!(up.grid(), grid);
        Ok(up)
    }
}

/// Self-similar dust: each kept cube keeps `k = round(2^d)` of its `2^n`
/// children, so the similarity dimension is `log2 k`. Which children are kept
/// is drawn per cube.
pub fn cantor_dust(grid: Grid, dimension: f64, rng: &mut ChaCha8Rng) -> Result<GridSet> {
    let n = grid.n();
    if !(dimension >= 0.0 && dimension <= n as f64) {
        return param(format!("cantor-dust dimension must lie in [0, n] = [0, {n}], got {dimension}"));
    }
    let k = (dimension.exp2().round() as usize).clamp(1, 1 << n);
    let mut cubes = vec![DyadicCube::root(n)];
    for _ in 0..grid.level() {
        let mut next = Vec::with_capacity(cubes.len() * k);
        for q in &cubes {
            let mut ch = q.children();
            ch.shuffle(rng);
            next.extend(ch.into_iter().take(k));
        }
        cubes = next;
    }
    Ok(GridSet::from_indices(grid, cubes.iter().map(|q| grid.index(&q.index[..n]))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::function_digest;

    #[test]
    fn cantor_dust_counts() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for l in 1..=5 {
            let g = Grid::new(2, l).unwrap();
            assert_eq!(cantor_dust(g, 1.0, &mut rng).unwrap().count(), 1 << l);
        }
        let g = Grid::new(2, 3).unwrap();
        assert_eq!(cantor_dust(g, 1.58, &mut rng).unwrap().count(), 27);
        assert!(cantor_dust(g, 2.5, &mut rng).is_err());
    }

    #[test]
    fn deterministic_and_upsampled() {
        let kinds = [
            InstanceKind::RandomSimple,
            InstanceKind::BallIndicator,
            InstanceKind::CantorDust { dimension: 1.0 },
            InstanceKind::Checkerboard,
            InstanceKind::PowerKernel { beta: 0.5, floor: None },
            InstanceKind::UnionOfCubes,
            InstanceKind::ThinAnnulus,
        ];
        for kind in kinds {
            let mut spec = InstanceSpec::new(kind, 2, 5, 42);
            spec.coarse_level = Some(3);
            let a = generate(&spec).unwrap();
            let b = generate(&spec).unwrap();
            assert_eq!(function_digest(&a), function_digest(&b));
            assert_eq!(a.grid().level(), 5);
            assert!(!a.is_zero(), "{kind:?}");
            spec.level = 3;
            assert_eq!(generate(&spec).unwrap().upsample(2).unwrap(), a);
        }
    }

    #[test]
    fn checkerboard_pattern() {
        let mut spec = InstanceSpec::new(InstanceKind::Checkerboard, 2, 2, 1);
        spec.value_range = (1.0, 1.0);
        let f = generate(&spec).unwrap();
        assert_eq!(f.support().count(), 8);
        assert_eq!(f.get(0), 1.0);
    }

    #[test]
    fn parse_kinds() {
        assert_eq!("cantor-dust:1.5".parse::<InstanceKind>().unwrap(), InstanceKind::CantorDust { dimension: 1.5 });
        assert!("nope".parse::<InstanceKind>().is_err());
    }
}
