//! Choquet integrals of grid functions against a content, by layer cake.
//!
//! A grid function is a step function, so `t -> H({f > t})` is constant on
//! each interval between consecutive distinct values and the integral is a
//! finite sum. Superlevel contents are evaluated by inserting cells in
//! decreasing value order into an incremental dyadic tree (exact backend), or
//! by a greedy ball cover of each superlevel set (ball backend).

use std::collections::HashMap;
use std::sync::{Arc, Mutex, RwLock};

use crate::content::ball::{BallFamily, ContentParams};
use crate::content::dyadic::{DyadicTree, MortonTable};
use crate::content::{ball_content_upper_with, comparability_bracket};
use crate::error::{param, Result};
use crate::geometry::{Grid, GridFunction, GridSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Backend {
    DyadicExact,
    BallGreedyUpper,
}

impl std::str::FromStr for Backend {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dyadic-exact" | "dyadic" => Ok(Backend::DyadicExact),
            "ball-greedy-upper" | "ball-greedy" | "ball" => Ok(Backend::BallGreedyUpper),
            other => param(format!("unknown backend `{other}` (dyadic-exact, ball-greedy-upper)")),
        }
    }
}

impl std::fmt::Display for Backend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Backend::DyadicExact => "dyadic-exact",
            Backend::BallGreedyUpper => "ball-greedy-upper",
        })
    }
}

/// Step distribution function of a grid function.
///
/// `contents[k]` is the content of `{f >= thresholds[k]}`, which equals
/// `H({f > t})` for `t` in `[thresholds[k-1], thresholds[k])`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionFunction {
    pub thresholds: Vec<f64>,
    pub contents: Vec<f64>,
    pub infinity_content: f64,
}

impl DistributionFunction {
    pub fn integral(&self) -> f64 {
        if self.infinity_content > 0.0 {
            return f64::INFINITY;
        }
        let mut sum = 0.0;
        let mut prev = 0.0;
        for (&t, &c) in self.thresholds.iter().zip(&self.contents) {
            sum += (t - prev) * c;
            prev = t;
        }
        sum
    }

    /// `int p t^(p-1) H({f > t}) dt`, summed in closed form per step.
    pub fn integral_power(&self, p: f64) -> f64 {
        if self.infinity_content > 0.0 {
            return f64::INFINITY;
        }
        let mut sum = 0.0;
        let mut prev = 0.0;
        for (&t, &c) in self.thresholds.iter().zip(&self.contents) {
            let tp = t.powf(p);
            sum += (tp - prev) * c;
            prev = tp;
        }
        sum
    }
}

enum Engine {
    Dyadic {
        morton: Arc<MortonTable>,
        pool: Mutex<Vec<DyadicTree>>,
    },
    Ball {
        family: BallFamily,
        // Keyed by the superlevel set's bits, not by threshold index, so
        // restricted integrals of different functions share entries. Values
        // are deterministic, so concurrent writers store the same number.
        cache: RwLock<HashMap<Vec<u64>, f64>>,
    },
}

/// A content on one grid with fixed `delta`, reusable across many integrals.
pub struct Content {
    grid: Grid,
    delta: f64,
    backend: Backend,
    engine: Engine,
}

impl std::fmt::Debug for Content {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Content")
            .field("grid", &self.grid)
            .field("delta", &self.delta)
            .field("backend", &self.backend)
            .finish()
    }
}

impl Content {
    pub fn new(grid: Grid, delta: f64, backend: Backend) -> Result<Self> {
        match backend {
            Backend::DyadicExact => {
                comparability_bracket(grid.n(), delta)?;
                Ok(Self {
                    grid,
                    delta,
                    backend,
                    engine: Engine::Dyadic {
                        morton: Arc::new(MortonTable::new(grid)),
                        pool: Mutex::new(Vec::new()),
                    },
                })
            }
            Backend::BallGreedyUpper => Self::with_ball_params(grid, &ContentParams::new(delta)),
        }
    }

    pub fn with_ball_params(grid: Grid, params: &ContentParams) -> Result<Self> {
        Ok(Self {
            grid,
            delta: params.delta,
            backend: Backend::BallGreedyUpper,
            engine: Engine::Ball {
                family: BallFamily::new(grid, params)?,
                cache: RwLock::new(HashMap::new()),
            },
        })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    /// Content of a set under this backend.
    pub fn of_set(&self, set: &GridSet) -> f64 {
        let cells: Vec<usize> = set.occupied().collect();
        let mut out = 0.0;
        self.superlevels(&[&cells], |_, c| out = c);
        out
    }

    /// Calls `record(k, content)` with the content of the union of the first
    /// `k + 1` groups, for every group in order.
    fn superlevels(&self, groups: &[&[usize]], mut record: impl FnMut(usize, f64)) {
        match &self.engine {
            Engine::Dyadic { morton, pool } => {
                let mut tree = pool
                    .lock()
                    .unwrap()
                    .pop()
                    .unwrap_or_else(|| DyadicTree::with_table(self.grid, self.delta, morton.clone()));
                for (k, g) in groups.iter().enumerate() {
                    for &c in g.iter() {
                        tree.insert(c);
                    }
                    record(k, tree.value());
                }
                tree.clear_cells(groups.iter().flat_map(|g| g.iter().copied()));
                pool.lock().unwrap().push(tree);
            }
            Engine::Ball { family, cache } => {
                let words = self.grid.len().div_ceil(64);
                let mut key = vec![0u64; words];
                let mut set = GridSet::empty(self.grid);
                for (k, g) in groups.iter().enumerate() {
                    for &c in g.iter() {
                        key[c / 64] |= 1 << (c % 64);
                        set.insert(c);
                    }
                    let hit = cache.read().unwrap().get(&key).copied();
                    let v = match hit {
                        Some(v) => v,
                        None => {
                            let v = ball_content_upper_with(family, &set, self.delta)
                                .map(|r| r.upper)
                                .unwrap_or(f64::INFINITY);
                            cache.write().unwrap().insert(key.clone(), v);
                            v
                        }
                    };
                    record(k, v);
                }
            }
        }
    }

    /// Distribution function of the sparse function given by `(cell, value)`
    /// pairs; cells not listed are zero.
    pub fn distribution_of_entries(&self, entries: &[(u32, f64)]) -> DistributionFunction {
        let mut sorted: Vec<(u32, f64)> = entries.iter().copied().filter(|e| e.1 > 0.0).collect();
        sorted.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut values: Vec<f64> = Vec::new();
        let n_inf = sorted.iter().take_while(|e| e.1.is_infinite()).count();
        groups.push(sorted[..n_inf].iter().map(|e| e.0 as usize).collect());
        values.push(f64::INFINITY);
        for &(c, v) in &sorted[n_inf..] {
            if values.last() != Some(&v) {
                groups.push(Vec::new());
                values.push(v);
            }
            groups.last_mut().unwrap().push(c as usize);
        }
        let refs: Vec<&[usize]> = groups.iter().map(|g| g.as_slice()).collect();
        let mut contents = vec![0.0; groups.len()];
        self.superlevels(&refs, |k, c| contents[k] = c);
        let infinity_content = contents[0];
        values.remove(0);
        contents.remove(0);
        values.reverse();
        contents.reverse();
        DistributionFunction { thresholds: values, contents, infinity_content }
    }

    pub fn distribution(&self, f: &GridFunction) -> DistributionFunction {
        self.distribution_of_entries(&f.entries())
    }

    pub fn integral(&self, f: &GridFunction) -> f64 {
        self.distribution(f).integral()
    }

    pub fn integral_of_entries(&self, entries: &[(u32, f64)]) -> f64 {
        self.distribution_of_entries(entries).integral()
    }

    /// `int f^p dH` through the distribution of `f`.
    pub fn integral_power(&self, f: &GridFunction, p: f64) -> Result<f64> {
        check_power(p)?;
        Ok(self.distribution(f).integral_power(p))
    }

    pub fn integral_power_of_entries(&self, entries: &[(u32, f64)], p: f64) -> Result<f64> {
        check_power(p)?;
        Ok(self.distribution_of_entries(entries).integral_power(p))
    }

    /// `(int f^p dH)^(1/p)`, `p >= 1`.
    pub fn quasi_norm(&self, f: &GridFunction, p: f64) -> Result<f64> {
        if !(p >= 1.0 && p.is_finite()) {
            return param(format!("quasi-norm needs 1 <= p < inf, got {p}"));
        }
        Ok(self.integral_power(f, p)?.powf(1.0 / p))
    }
}

fn check_power(p: f64) -> Result<()> {
    if !(p > 0.0 && p.is_finite()) {
        return param(format!("p must be positive and finite, got {p}"));
    }
    Ok(())
}

pub fn distribution(f: &GridFunction, delta: f64, backend: Backend) -> Result<DistributionFunction> {
    Ok(Content::new(f.grid(), delta, backend)?.distribution(f))
}

pub fn choquet_integral(f: &GridFunction, delta: f64, backend: Backend) -> Result<f64> {
    Ok(Content::new(f.grid(), delta, backend)?.integral(f))
}

pub fn choquet_integral_power(f: &GridFunction, p: f64, delta: f64, backend: Backend) -> Result<f64> {
    Content::new(f.grid(), delta, backend)?.integral_power(f, p)
}

pub fn quasi_norm(f: &GridFunction, p: f64, delta: f64, backend: Backend) -> Result<f64> {
    Content::new(f.grid(), delta, backend)?.quasi_norm(f, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::content::dyadic_value;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_fn(rng: &mut ChaCha8Rng, g: Grid) -> GridFunction {
        GridFunction::from_fn(g, |_| if rng.gen_bool(0.4) { 0.0 } else { rng.gen_range(1..5) as f64 * 0.5 })
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
    }

    #[test]
    fn zero_function() {
        let g = Grid::new(2, 3).unwrap();
        let d = distribution(&GridFunction::zeros(g), 1.0, Backend::DyadicExact).unwrap();
        assert!(d.thresholds.is_empty() && d.contents.is_empty());
        assert_eq!(d.integral(), 0.0);
    }

    #[test]
    fn indicator_gives_content() {
        let g = Grid::new(2, 3).unwrap();
        let e = GridSet::from_indices(g, [1, 5, 9, 30, 31]);
        let d = distribution(&e.indicator(), 1.2, Backend::DyadicExact).unwrap();
        assert_eq!(d.thresholds, vec![1.0]);
        assert_eq!(d.contents, vec![dyadic_value(&e, 1.2)]);
        for p in [0.5, 1.0, 3.0] {
            let v = choquet_integral_power(&e.indicator(), p, 1.2, Backend::DyadicExact).unwrap();
            assert_eq!(v, dyadic_value(&e, 1.2));
        }
    }

    #[test]
    fn two_step_layer_cake() {
        let g = Grid::new(1, 4).unwrap();
        let a = GridSet::from_indices(g, [2, 3]);
        let b = GridSet::from_indices(g, [9, 12]);
        let f = a.indicator().scale(2.0).add(&b.indicator()).unwrap();
        let d = distribution(&f, 0.6, Backend::DyadicExact).unwrap();
        let ab = a.union(&b).unwrap();
        assert_eq!(d.thresholds, vec![1.0, 2.0]);
        assert_eq!(d.contents, vec![dyadic_value(&ab, 0.6), dyadic_value(&a, 0.6)]);
        let expect = dyadic_value(&ab, 0.6) + dyadic_value(&a, 0.6);
        assert!(rel(d.integral(), expect) <= 1e-12);
    }

    #[test]
    fn infinite_values() {
        let g = Grid::new(1, 3).unwrap();
        let mut v = vec![0.0; 8];
        v[2] = f64::INFINITY;
        v[3] = 1.0;
        let f = GridFunction::from_values(g, v).unwrap();
        let d = distribution(&f, 1.0, Backend::DyadicExact).unwrap();
        assert!(d.infinity_content > 0.0);
        assert_eq!(d.integral(), f64::INFINITY);
    }

    #[test]
    fn power_matches_pointwise_power() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = Grid::new(2, 3).unwrap();
        let c = Content::new(g, 1.5, Backend::DyadicExact).unwrap();
        for _ in 0..50 {
            let f = random_fn(&mut rng, g);
            for p in [1.0, 2.0, 0.7] {
                let direct = c.integral(&f.powf(p));
                assert!(rel(c.integral_power(&f, p).unwrap(), direct) <= 1e-12);
            }
            assert_eq!(c.integral_power(&f, 1.0).unwrap(), c.integral(&f));
            let a = rng.gen_range(0.1..10.0);
            assert!(rel(c.integral(&f.scale(a)), a * c.integral(&f)) <= 1e-12);
            assert!(rel(c.quasi_norm(&f.scale(a), 2.0).unwrap(), a * c.quasi_norm(&f, 2.0).unwrap()) <= 1e-12);
        }
        let f = random_fn(&mut rng, g);
        assert!(c.integral_power(&f, 0.0).is_err());
        assert!(c.quasi_norm(&f, 0.5).is_err());
    }

    #[test]
    fn pooled_trees_are_reset() {
        let g = Grid::new(2, 4).unwrap();
        let c = Content::new(g, 1.0, Backend::DyadicExact).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let f = random_fn(&mut rng, g);
            let fresh = Content::new(g, 1.0, Backend::DyadicExact).unwrap();
            assert_eq!(c.integral(&f).to_bits(), fresh.integral(&f).to_bits());
        }
    }

    #[test]
    fn ball_backend_brackets_dyadic() {
        let g = Grid::new(2, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let ball = Content::new(g, 1.0, Backend::BallGreedyUpper).unwrap();
        let dy = Content::new(g, 1.0, Backend::DyadicExact).unwrap();
        let (lo, hi) = comparability_bracket(2, 1.0).unwrap();
        for _ in 0..5 {
            let f = random_fn(&mut rng, g);
            let (b, d) = (ball.integral(&f), dy.integral(&f));
            assert!(lo * d <= b * (1.0 + 1e-12) && b <= hi * d * (1.0 + 1e-12));
        }
    }
}
