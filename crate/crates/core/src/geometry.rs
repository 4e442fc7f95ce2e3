//! Dyadic grids over the half-open unit cube `[0,1)^n`.
//!
//! A grid of level `L` splits the cube into `2^(nL)` half-open cells of side
//! `2^-L`. Cells are addressed by a coordinate vector or by their row-major
//! linear index (first coordinate most significant).
//!
//! Lattice arithmetic uses *half-cell units*: a point with integer half-unit
//! coordinates `h` sits at `h * 2^-(L+1)`. Cell centers have odd half-unit
//! coordinates and cell corners even ones, so squared distances between
//! lattice points are exact integers.

use crate::error::{param, Error, Result};

pub const MAX_DIM: usize = 3;

/// Default level caps: 2^(nL) stays at 4096, 65536 and 32768 cells.
pub fn default_max_level(n: usize) -> u32 {
    match n {
        1 => 12,
        2 => 8,
        _ => 5,
    }
}

/// Shape of a dyadic grid: dimension and resolution level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Grid {
    n: usize,
    level: u32,
}

impl Grid {
    pub fn new(n: usize, level: u32) -> Result<Self> {
        Self::with_max_level(n, level, default_max_level(n))
    }

    pub fn with_max_level(n: usize, level: u32, max: u32) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&n) {
            return Err(Error::Dimension(n));
        }
        if level > max {
            return Err(Error::LevelTooLarge { n, level, max });
        }
        Ok(Self { n, level })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn level(&self) -> u32 {
        self.level
    }

    /// Cells per axis.
    #[inline]
    pub fn side(&self) -> u32 {
        1 << self.level
    }

    #[inline]
    pub fn len(&self) -> usize {
        1usize << (self.n as u32 * self.level)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn cell_width(&self) -> f64 {
        (-(self.level as f64)).exp2()
    }

    /// Volume of one cell.
    pub fn cell_volume(&self) -> f64 {
        (-((self.n as u32 * self.level) as f64)).exp2()
    }

    #[inline]
    pub fn coords(&self, index: usize) -> [u32; MAX_DIM] {
        let mut out = [0u32; MAX_DIM];
        let mut rest = index;
        for axis in (0..self.n).rev() {
            out[axis] = (rest & (self.side() as usize - 1)) as u32;
            rest >>= self.level;
        }
        out
    }

    #[inline]
    pub fn index(&self, coords: &[u32]) -> usize {
        coords[..self.n]
            .iter()
            .fold(0usize, |acc, &c| (acc << self.level) | c as usize)
    }

    pub fn checked_index(&self, coords: &[u32]) -> Result<usize> {
        if coords.len() != self.n || coords.iter().any(|&c| c >= self.side()) {
            return Err(Error::Index(coords.to_vec()));
        }
        Ok(self.index(coords))
    }

    /// Center of a cell in cube coordinates.
    pub fn center(&self, index: usize) -> [f64; MAX_DIM] {
        let c = self.coords(index);
        let w = self.cell_width();
        let mut out = [0.0; MAX_DIM];
        for axis in 0..self.n {
            out[axis] = (c[axis] as f64 + 0.5) * w;
        }
        out
    }

    /// Center of a cell in half-cell units (odd integers).
    #[inline]
    pub fn center_half(&self, index: usize) -> [i64; MAX_DIM] {
        let c = self.coords(index);
        let mut out = [0i64; MAX_DIM];
        for axis in 0..self.n {
            out[axis] = 2 * c[axis] as i64 + 1;
        }
        out
    }

    /// Squared distance between two lattice points, in half-cell units.
    #[inline]
    pub fn dist2_half(&self, a: &[i64; MAX_DIM], b: &[i64; MAX_DIM]) -> i64 {
        (0..self.n).map(|i| (a[i] - b[i]) * (a[i] - b[i])).sum()
    }

    /// Length of one half-cell unit in cube coordinates.
    pub fn half_unit(&self) -> f64 {
        (-(self.level as f64) - 1.0).exp2()
    }

    /// Every lattice point (centers, corners, edge midpoints) whose half-unit
    /// coordinates are multiples of `stride`, within `[0, 2^(L+1)]^n`.
    pub fn lattice_points(&self, stride: u32) -> Vec<[i64; MAX_DIM]> {
        let stride = stride.max(1) as i64;
        let top = 2 * self.side() as i64;
        let per_axis: Vec<i64> = (0..=top).filter(|h| h % stride == 0).collect();
        let mut out = Vec::new();
        let mut idx = [0usize; MAX_DIM];
        loop {
            let mut p = [0i64; MAX_DIM];
            for axis in 0..self.n {
                p[axis] = per_axis[idx[axis]];
            }
            out.push(p);
            let mut axis = self.n;
            loop {
                if axis == 0 {
                    return out;
                }
                axis -= 1;
                idx[axis] += 1;
                if idx[axis] < per_axis.len() {
                    break;
                }
                idx[axis] = 0;
            }
        }
    }

    fn check_same(&self, other: &Grid) -> Result<()> {
        if self != other {
            return Err(Error::GridMismatch(self.n, self.level, other.n, other.level));
        }
        Ok(())
    }
}

/// A dyadic cube `prod [i_k 2^-l, (i_k+1) 2^-l)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyadicCube {
    pub n: usize,
    pub level: u32,
    pub index: [u32; MAX_DIM],
}

impl DyadicCube {
    pub fn new(n: usize, level: u32, index: &[u32]) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&n) {
            return Err(Error::Dimension(n));
        }
        if level >= 32 || index.len() != n || index.iter().any(|&i| i >= (1u32 << level)) {
            return Err(Error::Index(index.to_vec()));
        }
        let mut idx = [0u32; MAX_DIM];
        idx[..n].copy_from_slice(index);
        Ok(Self { n, level, index: idx })
    }

    pub fn root(n: usize) -> Self {
        Self { n, level: 0, index: [0; MAX_DIM] }
    }

    pub fn side(&self) -> f64 {
        (-(self.level as f64)).exp2()
    }

    /// The `2^n` children in lexicographic order of their offset bits.
    pub fn children(&self) -> Vec<DyadicCube> {
        (0..1usize << self.n)
            .map(|bits| {
                let mut index = [0u32; MAX_DIM];
                for axis in 0..self.n {
                    let b = (bits >> (self.n - 1 - axis)) & 1;
                    index[axis] = 2 * self.index[axis] + b as u32;
                }
                DyadicCube { n: self.n, level: self.level + 1, index }
            })
            .collect()
    }

    pub fn contains_cell(&self, grid: &Grid, cell: usize) -> bool {
        if grid.level < self.level {
            return false;
        }
        let shift = grid.level - self.level;
        let c = grid.coords(cell);
        (0..self.n).all(|a| c[a] >> shift == self.index[a])
    }

    /// Center in half-cell units of a grid at level `grid_level`.
    pub fn center_half(&self, grid_level: u32) -> [i64; MAX_DIM] {
        let scale = 1i64 << (grid_level - self.level + 1);
        let mut out = [0i64; MAX_DIM];
        for axis in 0..self.n {
            out[axis] = self.index[axis] as i64 * scale + scale / 2;
        }
        out
    }

    pub fn center(&self) -> Vec<f64> {
        let s = self.side();
        (0..self.n).map(|a| (self.index[a] as f64 + 0.5) * s).collect()
    }

    /// Radius of the circumscribing ball, `(sqrt n / 2) * side`.
    pub fn circumradius(&self) -> f64 {
        (self.n as f64).sqrt() / 2.0 * self.side()
    }
}

/// An open Euclidean ball in cube coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return param(format!("ball radius must be positive and finite, got {radius}"));
        }
        if center.iter().any(|c| !c.is_finite()) {
            return param("ball center must be finite");
        }
        Ok(Self { center, radius })
    }

    /// Volume of the ball in dimension `n`.
    pub fn volume(n: usize, radius: f64) -> f64 {
        use std::f64::consts::PI;
        match n {
            1 => 2.0 * radius,
            2 => PI * radius * radius,
            _ => 4.0 / 3.0 * PI * radius.powi(3),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BallMode {
    /// Cells contained in the closed ball.
    Inner,
    /// Cells whose center lies in the open ball.
    Center,
    /// Cells meeting the open ball.
    Outer,
}

/// Nonnegative cell set at a fixed grid.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GridSet {
    grid: Grid,
    cells: Vec<bool>,
}

impl GridSet {
    pub fn empty(grid: Grid) -> Self {
        Self { grid, cells: vec![false; grid.len()] }
    }

    pub fn full(grid: Grid) -> Self {
        Self { grid, cells: vec![true; grid.len()] }
    }

    pub fn from_cells(grid: Grid, cells: Vec<bool>) -> Result<Self> {
        if cells.len() != grid.len() {
            return Err(Error::Schema(format!(
                "expected {} cells, got {}",
                grid.len(),
                cells.len()
            )));
        }
        Ok(Self { grid, cells })
    }

    pub fn from_indices(grid: Grid, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::empty(grid);
        for i in indices {
            s.cells[i] = true;
        }
        s
    }

    pub fn from_fn(grid: Grid, f: impl FnMut(usize) -> bool) -> Self {
        Self { grid, cells: (0..grid.len()).map(f).collect() }
    }

    #[inline]
    pub fn grid(&self) -> Grid {
        self.grid
    }

    #[inline]
    pub fn cells(&self) -> &[bool] {
        &self.cells
    }

    #[inline]
    pub fn contains(&self, cell: usize) -> bool {
        self.cells[cell]
    }

    pub fn insert(&mut self, cell: usize) {
        self.cells[cell] = true;
    }

    pub fn count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.cells.iter().any(|&c| c)
    }

    pub fn occupied(&self) -> impl Iterator<Item = usize> + '_ {
        self.cells.iter().enumerate().filter(|(_, &c)| c).map(|(i, _)| i)
    }

    fn zip_with(&self, other: &GridSet, op: impl Fn(bool, bool) -> bool) -> Result<GridSet> {
        self.grid.check_same(&other.grid)?;
        Ok(GridSet {
            grid: self.grid,
            cells: self.cells.iter().zip(&other.cells).map(|(&a, &b)| op(a, b)).collect(),
        })
    }

    pub fn union(&self, other: &GridSet) -> Result<GridSet> {
        self.zip_with(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &GridSet) -> Result<GridSet> {
        self.zip_with(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &GridSet) -> Result<GridSet> {
        self.zip_with(other, |a, b| a && !b)
    }

    pub fn complement(&self) -> GridSet {
        GridSet { grid: self.grid, cells: self.cells.iter().map(|c| !c).collect() }
    }

    pub fn is_subset(&self, other: &GridSet) -> bool {
        self.grid == other.grid && self.cells.iter().zip(&other.cells).all(|(&a, &b)| !a || b)
    }

    /// Same point set on the grid refined by `k` levels.
    pub fn upsample(&self, k: u32) -> Result<GridSet> {
        let fine = Grid::new(self.grid.n, self.grid.level + k)?;
        Ok(GridSet::from_fn(fine, |i| {
            let mut c = fine.coords(i);
            for v in c.iter_mut() {
                *v >>= k;
            }
            self.cells[self.grid.index(&c)]
        }))
    }

    /// Image under `x -> 2^-k x`: the pattern shrunk into the corner cube of
    /// level `k` on a grid refined by `k` levels.
    pub fn shrink(&self, k: u32) -> Result<GridSet> {
        let fine = Grid::new(self.grid.n, self.grid.level + k)?;
        let mut out = GridSet::empty(fine);
        for i in self.occupied() {
            out.cells[fine.index(&self.grid.coords(i))] = true;
        }
        Ok(out)
    }

    pub fn indicator(&self) -> GridFunction {
        GridFunction {
            grid: self.grid,
            values: self.cells.iter().map(|&c| if c { 1.0 } else { 0.0 }).collect(),
        }
    }
}

/// Nonnegative extended-real function, constant on each cell.
/// `f64::INFINITY` is the infinity sentinel.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn zeros(grid: Grid) -> Self {
        Self { grid, values: vec![0.0; grid.len()] }
    }

    pub fn constant(grid: Grid, c: f64) -> Self {
        Self { grid, values: vec![c.abs(); grid.len()] }
    }

    /// Takes absolute values on ingestion. NaN is rejected.
    pub fn from_values(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Schema(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::Schema("NaN values are not allowed".into()));
        }
        Ok(Self { grid, values: values.into_iter().map(f64::abs).collect() })
    }

    pub fn from_fn(grid: Grid, mut f: impl FnMut(usize) -> f64) -> Self {
        Self { grid, values: (0..grid.len()).map(|i| f(i).abs()).collect() }
    }

    #[inline]
    pub fn grid(&self) -> Grid {
        self.grid
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, cell: usize) -> f64 {
        self.values[cell]
    }

    pub fn support(&self) -> GridSet {
        GridSet { grid: self.grid, cells: self.values.iter().map(|&v| v > 0.0).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> GridFunction {
        GridFunction::from_fn(self.grid, |i| f(self.values[i]))
    }

    pub fn scale(&self, a: f64) -> GridFunction {
        self.map(|v| if v == 0.0 { 0.0 } else { a.abs() * v })
    }

    pub fn powf(&self, p: f64) -> GridFunction {
        self.map(|v| if v == 0.0 { 0.0 } else { v.powf(p) })
    }

    fn zip_with(&self, other: &GridFunction, op: impl Fn(f64, f64) -> f64) -> Result<GridFunction> {
        self.grid.check_same(&other.grid)?;
        Ok(GridFunction::from_fn(self.grid, |i| op(self.values[i], other.values[i])))
    }

    pub fn add(&self, other: &GridFunction) -> Result<GridFunction> {
        self.zip_with(other, |a, b| a + b)
    }

    /// Pointwise product with the convention `0 * inf = 0`.
    pub fn mul(&self, other: &GridFunction) -> Result<GridFunction> {
        self.zip_with(other, |a, b| if a == 0.0 || b == 0.0 { 0.0 } else { a * b })
    }

    pub fn restrict(&self, set: &GridSet) -> Result<GridFunction> {
        self.grid.check_same(&set.grid())?;
        Ok(GridFunction::from_fn(self.grid, |i| if set.contains(i) { self.values[i] } else { 0.0 }))
    }

    pub fn upsample(&self, k: u32) -> Result<GridFunction> {
        let fine = Grid::new(self.grid.n, self.grid.level + k)?;
        Ok(GridFunction::from_fn(fine, |i| {
            let mut c = fine.coords(i);
            for v in c.iter_mut() {
                *v >>= k;
            }
            self.values[self.grid.index(&c)]
        }))
    }

    /// Nonzero `(cell, value)` pairs.
    pub fn entries(&self) -> Vec<(u32, f64)> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > 0.0)
            .map(|(i, &v)| (i as u32, v))
            .collect()
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }
}

/// Discretizes a ball onto the grid. `inner ⊆ center ⊆ outer` always holds.
pub fn discretize_ball(ball: &Ball, grid: Grid, mode: BallMode) -> Result<GridSet> {
    let n = grid.n();
    if ball.center.len() != n {
        return param(format!("ball center has {} coordinates, expected {n}", ball.center.len()));
    }
    if ball.center.iter().any(|c| !(0.0..=1.0).contains(c)) {
        return param("ball center must lie in [0,1]^n");
    }
    let w = grid.cell_width();
    let r2 = ball.radius * ball.radius;
    Ok(GridSet::from_fn(grid, |i| {
        let c = grid.coords(i);
        let (mut near, mut mid, mut far) = (0.0, 0.0, 0.0);
        for axis in 0..n {
            let lo = c[axis] as f64 * w;
            let hi = lo + w;
            let x = ball.center[axis];
            let dm = x - (lo + 0.5 * w);
            let dl = (x - lo).abs();
            let dh = (x - hi).abs();
            let dn = if x < lo { lo - x } else if x > hi { x - hi } else { 0.0 };
            near += dn * dn;
            mid += dm * dm;
            far += dl.max(dh) * dl.max(dh);
        }
        let center_in = mid < r2;
        match mode {
            BallMode::Inner => center_in && far <= r2,
            BallMode::Center => center_in,
            BallMode::Outer => center_in || near < r2,
        }
    }))
}

/// The cells of grid level `level` contained in `cube`.
pub fn cube_cells(cube: &DyadicCube, level: u32) -> Result<GridSet> {
    if cube.level > level {
        return Err(Error::LevelMismatch { cube: cube.level, grid: level });
    }
    let grid = Grid::new(cube.n, level)?;
    Ok(GridSet::from_fn(grid, |i| cube.contains_cell(&grid, i)))
}

/// Euclidean distance between the centers of two cells.
pub fn cell_center_distance(grid: Grid, a: usize, b: usize) -> Result<f64> {
    if a >= grid.len() || b >= grid.len() {
        return Err(Error::Index(vec![a as u32, b as u32]));
    }
    Ok(cell_distance(grid, a, b))
}

#[inline]
pub(crate) fn cell_distance(grid: Grid, a: usize, b: usize) -> f64 {
    let d2 = grid.dist2_half(&grid.center_half(a), &grid.center_half(b));
    (d2 as f64).sqrt() * grid.half_unit()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: usize, l: u32) -> Grid {
        Grid::new(n, l).unwrap()
    }

    #[test]
    fn index_round_trip() {
        let grid = g(3, 3);
        for i in 0..grid.len() {
            assert_eq!(grid.index(&grid.coords(i)), i);
        }
        assert_eq!(grid.index(&[1, 2, 3]), (1 << 6) | (2 << 3) | 3);
    }

    #[test]
    fn level_caps() {
        assert!(Grid::new(1, 12).is_ok());
        assert!(matches!(Grid::new(1, 13), Err(Error::LevelTooLarge { .. })));
        assert!(Grid::new(2, 9).is_err());
        assert!(Grid::new(3, 6).is_err());
        assert!(Grid::new(4, 1).is_err());
    }

    #[test]
    fn big_ball_center_mode_is_full() {
        for n in 1..=3 {
            let grid = g(n, 3);
            let b = Ball::new(vec![0.5; n], 1.0).unwrap();
            assert_eq!(discretize_ball(&b, grid, BallMode::Center).unwrap().count(), grid.len());
        }
    }

    #[test]
    fn tiny_ball_inner_is_empty() {
        let grid = g(2, 3);
        let b = Ball::new(vec![0.0625, 0.0625], 0.06).unwrap();
        assert!(discretize_ball(&b, grid, BallMode::Inner).unwrap().is_empty());
        assert_eq!(discretize_ball(&b, grid, BallMode::Center).unwrap().count(), 1);
    }

    #[test]
    fn quarter_disc_center_count_matches_scan() {
        let grid = g(2, 4);
        let b = Ball::new(vec![0.5, 0.5], 0.25).unwrap();
        let center = discretize_ball(&b, grid, BallMode::Center).unwrap();
        // Cell centers ((i+.5)/16, (j+.5)/16) with |. - (.5,.5)| < 1/4, i.e.
        // (2i-15)^2 + (2j-15)^2 < 64 in half-cell units.
        let mut expected = 0;
        for i in 0..16i64 {
            for j in 0..16i64 {
                if (2 * i + 1 - 16).pow(2) + (2 * j + 1 - 16).pow(2) < 64 {
                    expected += 1;
                }
            }
        }
        assert_eq!(center.count(), expected);
        assert_eq!(expected, 52);
        let inner = discretize_ball(&b, grid, BallMode::Inner).unwrap();
        let outer = discretize_ball(&b, grid, BallMode::Outer).unwrap();
        assert!(inner.is_subset(&center) && center.is_subset(&outer));
        assert_eq!(inner.count(), 32);
    }

    #[test]
    fn cube_cells_examples() {
        let root = DyadicCube::root(2);
        assert_eq!(cube_cells(&root, 3).unwrap().count(), 64);
        let leaf = DyadicCube::new(2, 3, &[5, 2]).unwrap();
        let s = cube_cells(&leaf, 3).unwrap();
        assert_eq!(s.occupied().collect::<Vec<_>>(), vec![s.grid().index(&[5, 2])]);
        let q = DyadicCube::new(2, 1, &[1, 0]).unwrap();
        let s = cube_cells(&q, 3).unwrap();
        assert_eq!(s.count(), 16);
        for i in s.occupied() {
            let c = s.grid().coords(i);
            assert!((4..8).contains(&c[0]) && (0..4).contains(&c[1]));
        }
        assert!(matches!(cube_cells(&leaf, 2), Err(Error::LevelMismatch { .. })));
    }

    #[test]
    fn children_partition_parent() {
        let q = DyadicCube::new(2, 1, &[0, 1]).unwrap();
        let parent = cube_cells(&q, 4).unwrap();
        let mut acc = GridSet::empty(parent.grid());
        let mut total = 0;
        for ch in q.children() {
            let cells = cube_cells(&ch, 4).unwrap();
            assert!(acc.intersection(&cells).unwrap().is_empty());
            total += cells.count();
            acc = acc.union(&cells).unwrap();
        }
        assert_eq!(acc, parent);
        assert_eq!(total, parent.count());
    }

    #[test]
    fn center_distances() {
        let grid = g(1, 3);
        assert_eq!(cell_center_distance(grid, 4, 4).unwrap(), 0.0);
        assert_eq!(cell_center_distance(grid, 2, 3).unwrap(), 0.125);
        let grid = g(2, 2);
        let d = cell_center_distance(grid, grid.index(&[1, 1]), grid.index(&[2, 2])).unwrap();
        assert!((d - 0.25 * 2f64.sqrt()).abs() < 1e-15);
        assert!(cell_center_distance(grid, 0, 99).is_err());
    }

    #[test]
    fn upsample_and_shrink() {
        let grid = g(2, 2);
        let s = GridSet::from_indices(grid, [0, 5, 15]);
        let up = s.upsample(1).unwrap();
        assert_eq!(up.count(), 12);
        let sh = s.shrink(2).unwrap();
        assert_eq!(sh.count(), 3);
        assert!(sh.contains(sh.grid().index(&[3, 3])));
    }

    #[test]
    fn lattice_points_stride() {
        let grid = g(2, 1);
        assert_eq!(grid.lattice_points(1).len(), 25);
        assert_eq!(grid.lattice_points(2).len(), 9);
    }

    #[test]
    fn function_ingestion() {
        let grid = g(1, 1);
        let f = GridFunction::from_values(grid, vec![-2.0, f64::INFINITY]).unwrap();
        assert_eq!(f.values(), &[2.0, f64::INFINITY]);
        assert!(GridFunction::from_values(grid, vec![f64::NAN, 0.0]).is_err());
        assert_eq!(f.support().count(), 2);
    }
}
