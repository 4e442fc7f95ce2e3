//! Finite radius ladders and lattice balls.
//!
//! Radii are kept as squared lengths in half-cell units, so membership of a
//! cell center in a ball around a lattice point is an exact comparison of an
//! integer against `r2`.

use crate::error::{param, Result};
use crate::geometry::{Grid, MAX_DIM};

#[derive(Debug, Clone, PartialEq)]
pub struct RadiusLadder {
    grid: Grid,
    r2: Vec<f64>,
}

impl RadiusLadder {
    /// `2^-L * sqrt(2)^k` for `k = 0, 1, ...` up to `sqrt n`, with `sqrt n`
    /// appended when the geometric sequence misses it.
    pub fn standard(grid: Grid) -> Self {
        let top = grid.n() as f64 * 4f64.powi(grid.level() as i32 + 1);
        let mut r2 = Vec::new();
        let mut v = 4.0;
        while v <= top {
            r2.push(v);
            v *= 2.0;
        }
        if *r2.last().unwrap() < top {
            r2.push(top);
        }
        Self { grid, r2 }
    }

    /// Ladder from explicit radii in cube units.
    pub fn from_radii(grid: Grid, radii: &[f64]) -> Result<Self> {
        if radii.is_empty() {
            return param("radius ladder must be nonempty");
        }
        if radii.windows(2).any(|w| !(w[0] < w[1])) {
            return param("radius ladder must be strictly increasing");
        }
        if !(radii[0] >= grid.cell_width()) || !radii.iter().all(|r| r.is_finite()) {
            return param(format!(
                "ladder radii must be finite and at least the cell width {}",
                grid.cell_width()
            ));
        }
        let h = grid.half_unit();
        Ok(Self { grid, r2: radii.iter().map(|r| (r / h) * (r / h)).collect() })
    }

    /// Adds the geometric midpoint between each pair of neighbouring radii.
    pub fn refine(&self) -> Self {
        let mut r2 = Vec::with_capacity(2 * self.r2.len());
        for w in self.r2.windows(2) {
            r2.push(w[0]);
            r2.push((w[0] * w[1]).sqrt());
        }
        r2.push(*self.r2.last().unwrap());
        Self { grid: self.grid, r2 }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn len(&self) -> usize {
        self.r2.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r2.is_empty()
    }

    /// Squared radii in half-cell units.
    pub fn r2_half(&self) -> &[f64] {
        &self.r2
    }

    pub fn radius(&self, k: usize) -> f64 {
        self.r2[k].sqrt() * self.grid.half_unit()
    }

    pub fn radii(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.radius(k)).collect()
    }
}

/// Cell offsets of lattice balls, grouped by the parity pattern of the center.
///
/// A center `p` (half units) and a cell `c` have difference `2(c - b) + e`,
/// where `e_a = 0` if `p_a` is odd, `1` if even, and `b = floor(p / 2)`.
#[derive(Debug, Clone)]
pub struct BallStencils {
    grid: Grid,
    // [parity pattern][radius] -> offsets
    offsets: Vec<Vec<Vec<[i32; MAX_DIM]>>>,
}

impl BallStencils {
    pub fn new(ladder: &RadiusLadder) -> Self {
        let grid = ladder.grid();
        let n = grid.n();
        let reach = grid.side() as i32;
        let mut offsets = Vec::with_capacity(1 << n);
        for pattern in 0..1usize << n {
            let e: Vec<i64> = (0..n).map(|a| ((pattern >> a) & 1) as i64).collect();
            let mut per_radius = vec![Vec::new(); ladder.len()];
            let mut o = [-reach; MAX_DIM];
            loop {
                let d2: i64 = (0..n)
                    .map(|a| {
                        let d = 2 * o[a] as i64 + e[a];
                        d * d
                    })
                    .sum();
                for (k, &r2) in ladder.r2_half().iter().enumerate() {
                    if (d2 as f64) < r2 {
                        per_radius[k].push(o);
                    }
                }
                let mut a = 0;
                loop {
                    if a == n {
                        break;
                    }
                    o[a] += 1;
                    if o[a] <= reach {
                        break;
                    }
                    o[a] = -reach;
                    a += 1;
                }
                if a == n {
                    break;
                }
            }
            offsets.push(per_radius);
        }
        Self { grid, offsets }
    }

    /// Cells whose centers lie in the open ball of ladder radius `k` around
    /// the lattice point `p`, in increasing index order.
    pub fn cells(&self, p: &[i64; MAX_DIM], k: usize, out: &mut Vec<usize>) {
        out.clear();
        let n = self.grid.n();
        let side = self.grid.side() as i64;
        let mut pattern = 0;
        let mut base = [0i64; MAX_DIM];
        for a in 0..n {
            if p[a] % 2 == 0 {
                pattern |= 1 << a;
            }
            base[a] = p[a].div_euclid(2);
        }
        'next: for o in &self.offsets[pattern][k] {
            let mut c = [0u32; MAX_DIM];
            for a in 0..n {
                let v = base[a] + o[a] as i64;
                if v < 0 || v >= side {
                    continue 'next;
                }
                c[a] = v as u32;
            }
            out.push(self.grid.index(&c));
        }
        out.sort_unstable();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_ladder_shape() {
        let g = Grid::new(2, 4).unwrap();
        let l = RadiusLadder::standard(g);
        assert_eq!(l.radius(0), 1.0 / 16.0);
        assert!((l.radius(l.len() - 1) - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(l.len(), 10);
        let g3 = Grid::new(3, 2).unwrap();
        let l3 = RadiusLadder::standard(g3);
        assert!((l3.radius(l3.len() - 1) - 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(l.refine().len(), 19);
    }

    #[test]
    fn bad_ladders() {
        let g = Grid::new(1, 3).unwrap();
        assert!(RadiusLadder::from_radii(g, &[]).is_err());
        assert!(RadiusLadder::from_radii(g, &[0.01]).is_err());
        assert!(RadiusLadder::from_radii(g, &[0.5, 0.25]).is_err());
        assert!(RadiusLadder::from_radii(g, &[0.125, 0.5]).is_ok());
    }

    #[test]
    fn stencils_match_direct_scan() {
        for n in 1..=3 {
            let g = Grid::new(n, 2).unwrap();
            let ladder = RadiusLadder::standard(g).refine();
            let st = BallStencils::new(&ladder);
            let mut got = Vec::new();
            for p in g.lattice_points(1) {
                for k in 0..ladder.len() {
                    st.cells(&p, k, &mut got);
                    let want: Vec<usize> = (0..g.len())
                        .filter(|&c| (g.dist2_half(&p, &g.center_half(c)) as f64) < ladder.r2_half()[k])
                        .collect();
                    assert_eq!(got, want);
                }
            }
        }
    }
}
