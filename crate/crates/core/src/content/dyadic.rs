//! Exact dyadic Hausdorff content by bottom-up recursion over the cube tree.
//!
//! Nodes are stored per level in Morton order, so the `2^n` children of node
//! `m` are the contiguous block `m << n ..` in the same lexicographic order as
//! [`DyadicCube::children`]. Every node value is
//! `min(side^delta, sum of children)` with the children summed left to right;
//! the batch pass and the incremental [`DyadicTree`] use that exact formula,
//! so they agree bit for bit.

use crate::geometry::{DyadicCube, Grid, GridSet, MAX_DIM};
use crate::par;

/// `side^delta` for the cubes of each level `0..=level`.
pub fn level_costs(level: u32, delta: f64) -> Vec<f64> {
    (0..=level).map(|l| (-(l as f64) * delta).exp2()).collect()
}

#[inline]
pub(crate) fn morton_of_coords(coords: &[u32; MAX_DIM], n: usize, level: u32) -> usize {
    let mut m = 0usize;
    for bit in (0..level).rev() {
        for c in coords.iter().take(n) {
            m = (m << 1) | ((c >> bit) & 1) as usize;
        }
    }
    m
}

#[inline]
pub(crate) fn coords_of_morton(m: usize, n: usize, level: u32) -> [u32; MAX_DIM] {
    let mut out = [0u32; MAX_DIM];
    for bit in 0..level {
        for axis in 0..n {
            let src = bit as usize * n + (n - 1 - axis);
            out[axis] |= (((m >> src) & 1) as u32) << bit;
        }
    }
    out
}

/// Maps row-major cell indices to Morton indices for one grid.
#[derive(Debug, Clone)]
pub struct MortonTable {
    to_morton: Vec<u32>,
}

impl MortonTable {
    pub fn new(grid: Grid) -> Self {
        let to_morton = (0..grid.len())
            .map(|i| morton_of_coords(&grid.coords(i), grid.n(), grid.level()) as u32)
            .collect();
        Self { to_morton }
    }

    #[inline]
    pub fn get(&self, cell: usize) -> usize {
        self.to_morton[cell] as usize
    }
}

#[inline]
fn node_value(cost: f64, children: &[f64]) -> f64 {
    let mut sum = 0.0;
    for &c in children {
        sum += c;
    }
    if cost <= sum {
        cost
    } else {
        sum
    }
}

/// Optimal dyadic cover of a grid set.
#[derive(Debug, Clone)]
pub struct DyadicCover {
    pub value: f64,
    pub cubes: Vec<DyadicCube>,
}

/// Bottom-up dynamic program; levels `0..=L` suffice because larger cubes
/// cost at least the root and sub-cell cubes cannot cover an occupied cell.
pub fn optimal_dyadic_cover(set: &GridSet, delta: f64) -> DyadicCover {
    let grid = set.grid();
    let (n, level) = (grid.n(), grid.level());
    let costs = level_costs(level, delta);
    let fan = 1usize << n;

    let mut leaves = vec![0.0; grid.len()];
    for cell in set.occupied() {
        leaves[morton_of_coords(&grid.coords(cell), n, level)] = costs[level as usize];
    }
    let mut values: Vec<Vec<f64>> = vec![Vec::new(); level as usize + 1];
    values[level as usize] = leaves;
    for l in (0..level as usize).rev() {
        let below = &values[l + 1];
        let cost = costs[l];
        let len = 1usize << (n * l);
        values[l] = par::map_indices(len, |m| node_value(cost, &below[m * fan..(m + 1) * fan]));
    }

    let mut cubes = Vec::new();
    let mut stack = vec![(0u32, 0usize)];
    while let Some((l, m)) = stack.pop() {
        let v = values[l as usize][m];
        if v == 0.0 {
            continue;
        }
        if l == level || costs[l as usize] <= sum_children(&values[l as usize + 1], m, fan) {
            cubes.push(DyadicCube { n, level: l, index: coords_of_morton(m, n, l) });
        } else {
            for child in (0..fan).rev() {
                stack.push((l + 1, (m << n) + child));
            }
        }
    }
    cubes.sort();
    DyadicCover { value: values[0][0], cubes }
}

fn sum_children(values: &[f64], m: usize, fan: usize) -> f64 {
    let mut s = 0.0;
    for &c in &values[m * fan..(m + 1) * fan] {
        s += c;
    }
    s
}

/// Dyadic content of a set.
pub fn dyadic_value(set: &GridSet, delta: f64) -> f64 {
    let mut tree = DyadicTree::new(set.grid(), delta);
    for c in set.occupied() {
        tree.insert(c);
    }
    tree.value()
}

/// Cost of a list of cubes, summed in tree order (children left to right).
pub fn tree_order_cost(cubes: &[DyadicCube], n: usize, delta: f64) -> f64 {
    use std::collections::HashSet;
    let chosen: HashSet<(u32, [u32; MAX_DIM])> = cubes.iter().map(|q| (q.level, q.index)).collect();
    let max_level = cubes.iter().map(|q| q.level).max().unwrap_or(0);
    fn rec(
        q: DyadicCube,
        chosen: &HashSet<(u32, [u32; MAX_DIM])>,
        max_level: u32,
        delta: f64,
    ) -> f64 {
        if chosen.contains(&(q.level, q.index)) {
            return (-(q.level as f64) * delta).exp2();
        }
        if q.level >= max_level {
            return 0.0;
        }
        let mut s = 0.0;
        for ch in q.children() {
            s += rec(ch, chosen, max_level, delta);
        }
        s
    }
    if cubes.is_empty() {
        return 0.0;
    }
    rec(DyadicCube::root(n), &chosen, max_level, delta)
}

/// Incremental dyadic content: cells are inserted one at a time and the
/// root value is available after every insertion.
#[derive(Debug, Clone)]
pub struct DyadicTree {
    n: usize,
    level: u32,
    costs: Vec<f64>,
    values: Vec<Vec<f64>>,
    morton: std::sync::Arc<MortonTable>,
}

impl DyadicTree {
    pub fn new(grid: Grid, delta: f64) -> Self {
        Self::with_table(grid, delta, std::sync::Arc::new(MortonTable::new(grid)))
    }

    pub fn with_table(grid: Grid, delta: f64, morton: std::sync::Arc<MortonTable>) -> Self {
        let (n, level) = (grid.n(), grid.level());
        Self {
            n,
            level,
            costs: level_costs(level, delta),
            values: (0..=level).map(|l| vec![0.0; 1usize << (n * l as usize)]).collect(),
            morton,
        }
    }

    pub fn insert(&mut self, cell: usize) {
        let level = self.level as usize;
        let mut m = self.morton.get(cell);
        if self.values[level][m] != 0.0 {
            return;
        }
        self.values[level][m] = self.costs[level];
        let fan = 1usize << self.n;
        for l in (0..level).rev() {
            let p = m >> self.n;
            let v = node_value(self.costs[l], &self.values[l + 1][p * fan..(p + 1) * fan]);
            if v == self.values[l][p] {
                break;
            }
            self.values[l][p] = v;
            m = p;
        }
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.values[0][0]
    }

    /// Resets the nodes above the given cells; cheaper than [`Self::clear`]
    /// when few cells were inserted.
    pub fn clear_cells(&mut self, cells: impl IntoIterator<Item = usize>) {
        let level = self.level as usize;
        for cell in cells {
            let mut m = self.morton.get(cell);
            for l in (0..=level).rev() {
                if self.values[l][m] == 0.0 {
                    break;
                }
                self.values[l][m] = 0.0;
                m >>= self.n;
            }
        }
    }

    pub fn clear(&mut self) {
        for v in &mut self.values {
            v.iter_mut().for_each(|x| *x = 0.0);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn morton_round_trip() {
        for n in 1..=3 {
            let grid = Grid::new(n, 3).unwrap();
            for i in 0..grid.len() {
                let c = grid.coords(i);
                let m = morton_of_coords(&c, n, 3);
                assert_eq!(coords_of_morton(m, n, 3), c);
            }
        }
    }

    #[test]
    fn morton_children_match_cube_children() {
        let q = DyadicCube::new(2, 1, &[1, 0]).unwrap();
        let m = morton_of_coords(&q.index, 2, 1);
        for (k, ch) in q.children().iter().enumerate() {
            assert_eq!(morton_of_coords(&ch.index, 2, 2), (m << 2) + k);
        }
    }

    #[test]
    fn incremental_matches_batch() {
        let grid = Grid::new(2, 3).unwrap();
        let set = GridSet::from_indices(grid, [0, 3, 9, 17, 40, 41, 63]);
        let batch = optimal_dyadic_cover(&set, 1.3);
        assert_eq!(dyadic_value(&set, 1.3).to_bits(), batch.value.to_bits());
        assert_eq!(tree_order_cost(&batch.cubes, 2, 1.3).to_bits(), batch.value.to_bits());
    }
}
