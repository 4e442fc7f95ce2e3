//! Ball-cover content over a finite candidate family.
//!
//! Candidates are balls centered at lattice points (cell centers and/or cell
//! corners) with radii from a `sqrt 2` geometric ladder plus the
//! circumradii of every dyadic level. A ball covers a cell when it contains
//! the closed cell, so every certificate is a genuine cover and its cost a
//! rigorous upper bound. All coverage tests run on squared distances in
//! half-cell units.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use super::dyadic::{optimal_dyadic_cover, DyadicTree};
use crate::error::{param, Error, Result};
use crate::geometry::{Ball, Grid, GridSet, MAX_DIM};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CenterPolicy {
    CellCenters,
    CellCorners,
    Both,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ContentParams {
    pub delta: f64,
    pub centers: CenterPolicy,
    /// Smallest ladder radius in cube units; defaults to half a cell width.
    pub r_min: Option<f64>,
    /// Drop ladder radii above this (the cell circumradius is always kept).
    pub max_radius: Option<f64>,
    pub greedy_cap: usize,
    pub max_cells: usize,
    pub max_candidates: usize,
    pub node_budget: u64,
}

impl ContentParams {
    pub fn new(delta: f64) -> Self {
        Self {
            delta,
            centers: CenterPolicy::Both,
            r_min: None,
            max_radius: None,
            greedy_cap: 100_000,
            max_cells: 64,
            max_candidates: 4096,
            node_budget: 5_000_000,
        }
    }

    pub(crate) fn validate(&self, grid: Grid) -> Result<()> {
        let n = grid.n() as f64;
        if !(self.delta > 0.0 && self.delta <= n) {
            return param(format!("delta must lie in (0, n] = (0, {n}], got {}", self.delta));
        }
        if let Some(r) = self.r_min {
            if !(r >= grid.half_unit()) {
                return param(format!(
                    "r_min must be at least half a cell width ({}), got {r}",
                    grid.half_unit()
                ));
            }
        }
        Ok(())
    }
}

/// Candidate centers and radii for one grid.
#[derive(Debug, Clone)]
pub struct BallFamily {
    grid: Grid,
    delta: f64,
    centers: Vec<[i64; MAX_DIM]>,
    /// Squared radii in half-cell units, ascending.
    radius_sq: Vec<f64>,
    radius: Vec<f64>,
    cost: Vec<f64>,
    greedy_cap: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Cand {
    center: u32,
    radius: u32,
    count: u32,
}

/// A chosen set of balls, by family indices.
#[derive(Debug, Clone)]
pub struct BallCover {
    pub cost: f64,
    balls: Vec<(u32, u32)>,
}

impl BallFamily {
    pub fn new(grid: Grid, params: &ContentParams) -> Result<Self> {
        params.validate(grid)?;
        let n = grid.n();
        let level = grid.level() as i32;
        let h = grid.half_unit();
        let top = n as f64 * 4f64.powi(level + 1);
        let cell_circ = n as f64;
        let cap = params.max_radius.map(|r| (r / h) * (r / h)).unwrap_or(f64::INFINITY);

        let mut sq: Vec<f64> = Vec::new();
        let base = params.r_min.map(|r| (r / h) * (r / h)).unwrap_or(1.0);
        let mut k = 0;
        loop {
            let s = base * (k as f64).exp2();
            if s > top {
                break;
            }
            sq.push(s);
            k += 1;
        }
        sq.push(top);
        for l in 0..=level {
            sq.push(n as f64 * 4f64.powi(level - l));
        }
        sq.retain(|&s| s <= cap || s == cell_circ);
        sq.retain(|&s| s >= cell_circ.min(base));
        sq.sort_by(f64::total_cmp);
        sq.dedup();
        if sq.is_empty() {
            return Err(Error::EmptyCandidates);
        }
        let radius: Vec<f64> = sq.iter().map(|s| s.sqrt() * h).collect();
        let cost = radius.iter().map(|r| r.powf(params.delta)).collect();

        let centers = grid
            .lattice_points(1)
            .into_iter()
            .filter(|p| {
                let odd = p[..n].iter().all(|c| c % 2 != 0);
                let even = p[..n].iter().all(|c| c % 2 == 0);
                match params.centers {
                    CenterPolicy::CellCenters => odd,
                    CenterPolicy::CellCorners => even,
                    CenterPolicy::Both => odd || even,
                }
            })
            .collect::<Vec<_>>();
        if centers.is_empty() {
            return Err(Error::EmptyCandidates);
        }
        Ok(Self {
            grid,
            delta: params.delta,
            centers,
            radius_sq: sq,
            radius,
            cost,
            greedy_cap: params.greedy_cap,
        })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn num_centers(&self) -> usize {
        self.centers.len()
    }

    pub fn radii(&self) -> &[f64] {
        &self.radius
    }

    pub fn ball(&self, center: u32, radius: u32) -> Ball {
        let h = self.grid.half_unit();
        let c = &self.centers[center as usize];
        Ball {
            center: (0..self.grid.n()).map(|a| c[a] as f64 * h).collect(),
            radius: self.radius[radius as usize],
        }
    }

    pub fn cover_balls(&self, cover: &BallCover) -> Vec<Ball> {
        cover.balls.iter().map(|&(c, r)| self.ball(c, r)).collect()
    }

    fn far2(&self, p: &[i64; MAX_DIM], cell_center: &[i64; MAX_DIM]) -> f64 {
        let mut s = 0i64;
        for a in 0..self.grid.n() {
            let d = (p[a] - cell_center[a]).abs() + 1;
            s += d * d;
        }
        s as f64
    }

    /// Per-center list of cell ordinals sorted by far-corner distance, and
    /// the candidate list (one per center and radius that covers something
    /// new at that center).
    fn candidates(&self, cells: &[usize]) -> (Vec<Vec<u32>>, Vec<Cand>) {
        let cc: Vec<[i64; MAX_DIM]> = cells.iter().map(|&c| self.grid.center_half(c)).collect();
        let mut lists = Vec::with_capacity(self.centers.len());
        let mut cands = Vec::new();
        let mut buf: Vec<(f64, u32)> = Vec::with_capacity(cells.len());
        for (ci, p) in self.centers.iter().enumerate() {
            buf.clear();
            buf.extend(cc.iter().enumerate().map(|(o, c)| (self.far2(p, c), o as u32)));
            buf.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let mut pos = 0usize;
            let mut last = 0usize;
            for (ri, &sq) in self.radius_sq.iter().enumerate() {
                while pos < buf.len() && buf[pos].0 <= sq {
                    pos += 1;
                }
                if pos > last {
                    cands.push(Cand { center: ci as u32, radius: ri as u32, count: pos as u32 });
                    last = pos;
                }
                if pos == buf.len() {
                    break;
                }
            }
            lists.push(buf.iter().map(|x| x.1).collect());
        }
        (lists, cands)
    }

    /// Dyadic certificate lifted to circumscribing balls, when every lifted
    /// ball belongs to the family.
    fn dyadic_lift(&self, set: &GridSet) -> Option<BallCover> {
        let cover = optimal_dyadic_cover(set, self.delta);
        let level = self.grid.level();
        let mut balls = Vec::with_capacity(cover.cubes.len());
        let mut cost = 0.0;
        for q in &cover.cubes {
            let sq = self.grid.n() as f64 * 4f64.powi((level - q.level) as i32);
            let ri = self.radius_sq.iter().position(|&s| s == sq)?;
            let c = q.center_half(level);
            let ci = self.centers.binary_search_by(|p| p[..].cmp(&c[..])).ok()?;
            balls.push((ci as u32, ri as u32));
            cost += self.cost[ri];
        }
        Some(BallCover { cost, balls })
    }

    /// Greedy weighted set cover, polished against the best single covering
    /// ball and the lifted dyadic certificate.
    pub fn greedy(&self, set: &GridSet) -> BallCover {
        let cells: Vec<usize> = set.occupied().collect();
        if cells.is_empty() {
            return BallCover { cost: 0.0, balls: Vec::new() };
        }
        let m = cells.len();
        let (lists, cands) = self.candidates(&cells);

        #[derive(PartialEq)]
        struct Key {
            ratio: f64,
            radius: u32,
            center: u32,
            idx: u32,
        }
        impl Eq for Key {}
        impl Ord for Key {
            fn cmp(&self, o: &Self) -> Ordering {
                self.ratio
                    .total_cmp(&o.ratio)
                    .then(o.radius.cmp(&self.radius))
                    .then(o.center.cmp(&self.center))
            }
        }
        impl PartialOrd for Key {
            fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
                Some(self.cmp(o))
            }
        }

        let mut heap: BinaryHeap<Key> = cands
            .iter()
            .enumerate()
            .map(|(i, c)| Key {
                ratio: c.count as f64 / self.cost[c.radius as usize],
                radius: c.radius,
                center: c.center,
                idx: i as u32,
            })
            .collect();
        let mut covered = vec![0u32; m];
        let mut remaining = m;
        let mut chosen: Vec<u32> = Vec::new();
        while remaining > 0 && chosen.len() < self.greedy_cap {
            let Some(top) = heap.pop() else { break };
            let c = cands[top.idx as usize];
            let list = &lists[c.center as usize][..c.count as usize];
            let gain = list.iter().filter(|&&o| covered[o as usize] == 0).count();
            if gain == 0 {
                continue;
            }
            let ratio = gain as f64 / self.cost[c.radius as usize];
            if ratio == top.ratio {
                for &o in list {
                    if covered[o as usize] == 0 {
                        remaining -= 1;
                    }
                    covered[o as usize] += 1;
                }
                chosen.push(top.idx);
            } else {
                heap.push(Key { ratio, ..top });
            }
        }
        // Cap reached: cover leftovers with their circumscribed cell balls.
        let mut extra = Vec::new();
        if remaining > 0 {
            let ri = self.radius_sq.iter().position(|&s| s == self.grid.n() as f64);
            for (o, &cell) in cells.iter().enumerate() {
                if covered[o] == 0 {
                    let c = self.grid.center_half(cell);
                    let ci = self.centers.binary_search_by(|p| p[..].cmp(&c[..]));
                    if let (Some(ri), Ok(ci)) = (ri, ci) {
                        extra.push((ci as u32, ri as u32));
                    }
                }
            }
        }

        // Reverse-delete redundant balls, most expensive first.
        let mut order: Vec<usize> = (0..chosen.len()).collect();
        order.sort_by(|&a, &b| {
            let ca = self.cost[cands[chosen[a] as usize].radius as usize];
            let cb = self.cost[cands[chosen[b] as usize].radius as usize];
            cb.total_cmp(&ca).then(b.cmp(&a))
        });
        let mut keep = vec![true; chosen.len()];
        for &k in &order {
            let c = cands[chosen[k] as usize];
            let list = &lists[c.center as usize][..c.count as usize];
            if list.iter().all(|&o| covered[o as usize] >= 2) {
                keep[k] = false;
                for &o in list {
                    covered[o as usize] -= 1;
                }
            }
        }
        let mut balls: Vec<(u32, u32)> = chosen
            .iter()
            .zip(&keep)
            .filter(|(_, &k)| k)
            .map(|(&i, _)| (cands[i as usize].center, cands[i as usize].radius))
            .collect();
        balls.extend(extra);
        let cost = balls.iter().map(|&(_, r)| self.cost[r as usize]).sum();
        let mut best = BallCover { cost, balls };

        let single = cands
            .iter()
            .filter(|c| c.count as usize == m)
            .min_by(|a, b| {
                self.cost[a.radius as usize]
                    .total_cmp(&self.cost[b.radius as usize])
                    .then(a.radius.cmp(&b.radius))
                    .then(a.center.cmp(&b.center))
            });
        if let Some(s) = single {
            let c = self.cost[s.radius as usize];
            if c < best.cost {
                best = BallCover { cost: c, balls: vec![(s.center, s.radius)] };
            }
        }
        if let Some(lift) = self.dyadic_lift(set) {
            if lift.cost < best.cost {
                best = lift;
            }
        }
        best
    }

    /// Exact optimum over the family by branch and bound.
    pub fn exact(&self, set: &GridSet, params: &ContentParams, c_low: f64) -> Result<BallCover> {
        let cells: Vec<usize> = set.occupied().collect();
        let m = cells.len();
        if m == 0 {
            return Ok(BallCover { cost: 0.0, balls: Vec::new() });
        }
        if m > params.max_cells.min(64) {
            return Err(Error::TooLarge(format!(
                "{m} occupied cells (cap {})",
                params.max_cells.min(64)
            )));
        }
        let (lists, cands) = self.candidates(&cells);
        let mask_of = |c: &Cand| -> u64 {
            lists[c.center as usize][..c.count as usize]
                .iter()
                .fold(0u64, |acc, &o| acc | (1u64 << o))
        };
        let better = |a: &Cand, b: &Cand| -> bool {
            let (ca, cb) = (self.cost[a.radius as usize], self.cost[b.radius as usize]);
            ca < cb || (ca == cb && (a.radius, a.center) < (b.radius, b.center))
        };
        let mut by_mask: HashMap<u64, Cand> = HashMap::new();
        for c in &cands {
            let mk = mask_of(c);
            match by_mask.get(&mk) {
                Some(old) if !better(c, old) => {}
                _ => {
                    by_mask.insert(mk, *c);
                }
            }
        }
        let mut uniq: Vec<(u64, Cand)> = by_mask.into_iter().collect();
        uniq.sort_by(|a, b| {
            self.cost[a.1.radius as usize]
                .total_cmp(&self.cost[b.1.radius as usize])
                .then((a.1.radius, a.1.center).cmp(&(b.1.radius, b.1.center)))
        });
        let mut kept: Vec<(u64, Cand)> = Vec::new();
        for (mk, c) in uniq {
            if !kept.iter().any(|(km, _)| mk & !km == 0) {
                kept.push((mk, c));
            }
        }
        if kept.len() > params.max_candidates {
            return Err(Error::TooLarge(format!(
                "{} undominated candidates (cap {})",
                kept.len(),
                params.max_candidates
            )));
        }
        let masks: Vec<u64> = kept.iter().map(|k| k.0).collect();
        let costs: Vec<f64> = kept.iter().map(|k| self.cost[k.1.radius as usize]).collect();
        let mut covering: Vec<Vec<u32>> = vec![Vec::new(); m];
        for (i, &mk) in masks.iter().enumerate() {
            for (o, list) in covering.iter_mut().enumerate() {
                if mk >> o & 1 == 1 {
                    list.push(i as u32);
                }
            }
        }

        let full: u64 = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
        let mut search = Search {
            masks: &masks,
            costs: &costs,
            covering: &covering,
            cells: &cells,
            tree: DyadicTree::new(self.grid, self.delta),
            c_low,
            best: f64::INFINITY,
            best_pick: Vec::new(),
            pick: Vec::new(),
            nodes: 0,
            budget: params.node_budget,
        };
        // Greedy incumbent on the reduced family.
        let mut u = full;
        let mut cost = 0.0;
        let mut pick = Vec::new();
        while u != 0 {
            let (i, _) = masks
                .iter()
                .enumerate()
                .filter(|(_, &mk)| mk & u != 0)
                .map(|(i, &mk)| (i, (mk & u).count_ones() as f64 / costs[i]))
                .fold((usize::MAX, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            cost += costs[i];
            pick.push(i as u32);
            u &= !masks[i];
        }
        search.best = cost;
        search.best_pick = pick;
        search.dfs(full, 0.0)?;

        let balls = search
            .best_pick
            .iter()
            .map(|&i| (kept[i as usize].1.center, kept[i as usize].1.radius))
            .collect::<Vec<_>>();
        let cost = balls.iter().map(|&(_, r)| self.cost[r as usize]).sum();
        Ok(BallCover { cost, balls })
    }
}

struct Search<'a> {
    masks: &'a [u64],
    costs: &'a [f64],
    covering: &'a [Vec<u32>],
    cells: &'a [usize],
    tree: DyadicTree,
    c_low: f64,
    best: f64,
    best_pick: Vec<u32>,
    pick: Vec<u32>,
    nodes: u64,
    budget: u64,
}

impl Search<'_> {
    fn lower_bound(&mut self, u: u64) -> f64 {
        // Each uncovered cell pays at least the cheapest per-cell price of a
        // ball covering it.
        let mut price = vec![f64::INFINITY; self.cells.len()];
        for (i, &mk) in self.masks.iter().enumerate() {
            let hit = mk & u;
            if hit == 0 {
                continue;
            }
            let p = self.costs[i] / hit.count_ones() as f64;
            let mut bits = hit;
            while bits != 0 {
                let o = bits.trailing_zeros() as usize;
                if p < price[o] {
                    price[o] = p;
                }
                bits &= bits - 1;
            }
        }
        let mut bits = u;
        let mut per_cell = 0.0;
        while bits != 0 {
            per_cell += price[bits.trailing_zeros() as usize];
            bits &= bits - 1;
        }
        self.tree.clear();
        let mut bits = u;
        while bits != 0 {
            self.tree.insert(self.cells[bits.trailing_zeros() as usize]);
            bits &= bits - 1;
        }
        per_cell.max(self.c_low * self.tree.value())
    }

    fn dfs(&mut self, u: u64, cost: f64) -> Result<()> {
        if u == 0 {
            if cost < self.best {
                self.best = cost;
                self.best_pick = self.pick.clone();
            }
            return Ok(());
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::TooLarge(format!(
                "branch-and-bound node budget {} exhausted",
                self.budget
            )));
        }
        if cost + self.lower_bound(u) * (1.0 - 1e-12) >= self.best {
            return Ok(());
        }
        // Branch on the uncovered cell with the fewest covering candidates.
        let mut bits = u;
        let mut target = usize::MAX;
        let mut fewest = usize::MAX;
        while bits != 0 {
            let o = bits.trailing_zeros() as usize;
            let k = self.covering[o].iter().filter(|&&i| self.masks[i as usize] & u != 0).count();
            if k < fewest {
                fewest = k;
                target = o;
            }
            bits &= bits - 1;
        }
        let options = self.covering[target].clone();
        for i in options {
            let c = self.costs[i as usize];
            if cost + c >= self.best {
                break;
            }
            self.pick.push(i);
            self.dfs(u & !self.masks[i as usize], cost + c)?;
            self.pick.pop();
        }
        Ok(())
    }
}
