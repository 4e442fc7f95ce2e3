//! Pointwise suites for the maximal and Riesz operators.
//!
//! Traced constants that vary per parameter point are folded into the
//! right-hand side, so these suites assert `lhs <= rhs` with cap 1.

use serde_json::json;

use super::{base_defaults, bound_record, collect, exact_record, rel_err, rng_for, Outcome, Suite, TOL};
use crate::choquet::{Backend, Content};
use crate::content::{dyadic_value, DyadicTree};
use crate::error::{param, Result};
use crate::geometry::{cell_distance, Grid, GridFunction, GridSet};
use crate::io::function_digest;
use crate::operators::{
    maximal_centered, maximal_sharp, maximal_uncentered, riesz_potential, BallStencils, Candidates,
    RadiusLadder,
};
use crate::verify::report::{CapKind, InstanceRecord};
use crate::verify::{InstanceKind, Resolved};

fn mixed() -> Vec<InstanceKind> {
    vec![
        InstanceKind::RandomSimple,
        InstanceKind::BallIndicator,
        InstanceKind::CantorDust { dimension: 1.0 },
        InstanceKind::PowerKernel { beta: 0.5, floor: None },
        InstanceKind::ThinAnnulus,
        InstanceKind::UnionOfCubes,
    ]
}

fn defaults() -> Resolved {
    Resolved { level: 4, samples: 100, families: mixed(), ..base_defaults() }
}

pub(super) fn suites() -> Vec<Suite> {
    vec![
        Suite {
            id: "maximal-sandwich",
            description: "centered <= uncentered <= 2^(delta - kappa) centered at every cell",
            defaults: || Resolved { samples: 50, kappa: 0.25, ..defaults() },
            run: sandwich,
        },
        Suite {
            id: "ladder-monotone",
            description: "refining the radius ladder never decreases the maximal functions",
            defaults: || Resolved { samples: 30, ..defaults() },
            run: ladder_monotone,
        },
        Suite {
            id: "sharp-bound",
            description: "sharp <= c_sub (1 + rho) uncentered; the ratio against the constant 4 is reported",
            defaults: || Resolved { samples: 30, delta: 2.0, ..defaults() },
            run: sharp_bound,
        },
        Suite {
            id: "prop-4.5",
            description: "M_kappa f <= C (int f^q)^(kappa/delta) (M f)^(1 - q kappa/delta) at every cell, over a parameter grid",
            defaults,
            run: maximal_interpolation,
        },
        Suite {
            id: "lemma-5.1",
            description: "Hedberg estimate: two-term split per ladder radius and product form at every cell, over a parameter grid",
            defaults,
            run: hedberg,
        },
        Suite {
            id: "hedberg-ball-part",
            description: "int_B(x,r) f |x-y|^(alpha-delta) <= 2^delta/(2^alpha - 2^kappa) r^(alpha-kappa) M_kappa f(x) off the support of indicators",
            defaults: || Resolved {
                samples: 60,
                families: vec![
                    InstanceKind::BallIndicator,
                    InstanceKind::CantorDust { dimension: 1.0 },
                    InstanceKind::UnionOfCubes,
                    InstanceKind::ThinAnnulus,
                ],
                ..defaults()
            },
            run: hedberg_ball_part,
        },
        Suite {
            id: "riesz-floor",
            description: "raising the distance floor never increases the Riesz potential",
            defaults: || Resolved { samples: 50, ..defaults() },
            run: riesz_floor,
        },
        Suite {
            id: "operator-oracles",
            description: "operators against brute-force oracles, and degree-one homogeneity",
            defaults: || Resolved { level: 3, samples: 20, delta: 2.0, alpha: 1.0, ..defaults() },
            run: operator_oracles,
        },
    ]
}

fn grid_and_content(r: &Resolved) -> Result<(Grid, Content)> {
    let g = Grid::new(r.n, r.level)?;
    Ok((g, Content::new(g, r.delta, r.backend)?))
}

fn max_cell_ratio(lhs: &GridFunction, rhs: &GridFunction) -> (usize, f64) {
    let mut best = (0, 0.0);
    for x in 0..lhs.grid().len() {
        let q = super::ratio(lhs.get(x), rhs.get(x));
        if q > best.1 {
            best = (x, q);
        }
    }
    best
}

/// Record for a pointwise bound `lhs(x) <= rhs(x)` at every cell, reporting
/// the worst cell.
fn cell_record(index: usize, f: &GridFunction, lhs: &GridFunction, rhs: &GridFunction, params: serde_json::Value) -> InstanceRecord {
    let (x, _) = max_cell_ratio(lhs, rhs);
    let mut p = params;
    p["cell"] = json!(x);
    bound_record(index, function_digest(f), lhs.get(x), rhs.get(x), 1.0, p)
}

fn sandwich(r: &Resolved) -> Result<Outcome> {
    let (g, c) = grid_and_content(r)?;
    let ladder = RadiusLadder::standard(g);
    let cand = Candidates { stride: r.stride };
    let fs = r.corpus(r.samples)?;
    let factor = (r.delta - r.kappa).exp2();
    let mut records = Vec::new();
    for (i, f) in fs.iter().enumerate() {
        let cen = maximal_centered(f, &c, r.kappa, &ladder)?.output;
        let unc = maximal_uncentered(f, &c, r.kappa, &ladder, cand)?.output;
        let mut left = cell_record(2 * i, f, &cen, &unc, json!({"side": "centered <= uncentered"}));
        left.ok = (0..g.len()).all(|x| cen.get(x) <= unc.get(x));
        records.push(left);
        records.push(cell_record(2 * i + 1, f, &unc, &cen.scale(factor), json!({"side": "uncentered <= 2^(delta-kappa) centered"})));
    }
    Ok(Outcome {
        records,
        cap: 1.0,
        cap_kind: CapKind::Explicit,
        environment: json!({"backend": r.backend, "n": r.n, "L": r.level, "ladder": "standard", "stride": r.stride}),
        notes: json!({"factor": factor, "left": "exact, no slack"}),
    })
}

fn ladder_monotone(r: &Resolved) -> Result<Outcome> {
    let (g, c) = grid_and_content(r)?;
    let coarse = RadiusLadder::standard(g);
    let fine = coarse.refine();
    let cand = Candidates { stride: r.stride };
    let fs = r.corpus(r.samples)?;
    let mut records = Vec::new();
    for (i, f) in fs.iter().enumerate() {
        let pairs = [
            (maximal_centered(f, &c, r.kappa, &coarse)?.output, maximal_centered(f, &c, r.kappa, &fine)?.output, "centered"),
            (
                maximal_uncentered(f, &c, r.kappa, &coarse, cand)?.output,
                maximal_uncentered(f, &c, r.kappa, &fine, cand)?.output,
                "uncentered",
            ),
        ];
        for (j, (a, b, name)) in pairs.into_iter().enumerate() {
            let mut rec = cell_record(2 * i + j, f, &a, &b, json!({"operator": name}));
            rec.ok = (0..g.len()).all(|x| a.get(x) <= b.get(x));
            records.push(rec);
        }
    }
    Ok(Outcome {
        records,
        cap: 1.0,
        cap_kind: CapKind::Exact,
        environment: json!({"backend": r.backend, "n": r.n, "L": r.level, "ladders": [coarse.radii(), fine.radii()]}),
        notes: json!({}),
    })
}

/// Largest `content(B) / r^delta` over the balls of `ladder` around `points`.
fn ball_ratio_max(c: &Content, ladder: &RadiusLadder, points: &[[i64; 3]]) -> f64 {
    let g = c.grid();
    let stencils = BallStencils::new(ladder);
    let per_point = crate::par::map_slice(points, |p| {
        let mut cells = Vec::new();
        let mut best = 0.0f64;
        for k in 0..ladder.len() {
            stencils.cells(p, k, &mut cells);
            let set = GridSet::from_indices(g, cells.iter().copied());
            best = best.max(c.of_set(&set) / ladder.radius(k).powf(c.delta()));
        }
        best
    });
    per_point.into_iter().fold(0.0, f64::max)
}

fn cell_centers(g: Grid) -> Vec<[i64; 3]> {
    (0..g.len()).map(|x| g.center_half(x)).collect()
}

fn sharp_bound(r: &Resolved) -> Result<Outcome> {
    let (g, c) = grid_and_content(r)?;
    let ladder = RadiusLadder::standard(g);
    let cand = Candidates { stride: r.stride };
    let rho = ball_ratio_max(&c, &ladder, &cand.points(g));
    let c_sub = match r.backend {
        Backend::DyadicExact => 1.0,
        Backend::BallGreedyUpper => 2.0,
    };
    let cap = c_sub * (1.0 + rho);
    let fs = r.corpus(r.samples)?;
    let mut records = Vec::new();
    let mut worst_vs_4 = 0.0f64;
    let mut over_4 = 0usize;
    for (i, f) in fs.iter().enumerate() {
        let sharp = maximal_sharp(f, &c, &ladder, cand)?.output;
        let unc = maximal_uncentered(f, &c, 0.0, &ladder, cand)?.output;
        let (_, q) = max_cell_ratio(&sharp, &unc);
        worst_vs_4 = worst_vs_4.max(q);
        if q > 4.0 * (1.0 + TOL) {
            over_4 += 1;
        }
        records.push(cell_record(i, f, &sharp, &unc.scale(cap), json!({"max_sharp_over_uncentered": q})));
    }
    Ok(Outcome {
        records,
        cap: 1.0,
        cap_kind: CapKind::ProofTraced,
        environment: json!({"backend": r.backend, "n": r.n, "L": r.level, "delta": r.delta, "stride": r.stride}),
        notes: json!({
            "traced_constant": cap,
            "rho": rho,
            "c_sub": c_sub,
            "derivation": "|f - f_B| <= f + f_B on B, so int_B |f - f_B| <= c_sub (1 + content(B)/r^delta) int_B f; rho is the largest content(B)/r^delta over candidate balls",
            "constant_4": {"max_ratio": worst_vs_4, "instances_above": over_4},
        }),
    })
}

/// Fixed admissible grid `(delta, kappa, q)` with `1 < q < delta/kappa`.
fn interpolation_grid() -> Vec<(f64, f64, f64)> {
    let mut v = Vec::new();
    for delta in [1.0, 1.5, 2.0] {
        for kappa in [0.25, 0.5] {
            for t in [0.25, 0.75] {
                v.push((delta, kappa, 1.0 + t * (delta / kappa - 1.0)));
            }
        }
    }
    v
}

fn maximal_interpolation(r: &Resolved) -> Result<Outcome> {
    let g = Grid::new(r.n, r.level)?;
    let ladder = RadiusLadder::standard(g);
    let fs = r.corpus(r.samples)?;
    let grid = interpolation_grid();
    let mut records = Vec::new();
    let mut constants = Vec::new();
    for (j, &(delta, kappa, q)) in grid.iter().enumerate() {
        if delta > r.n as f64 {
            continue;
        }
        let c = Content::new(g, delta, r.backend)?;
        let rho = ball_ratio_max(&c, &ladder, &cell_centers(g));
        let cst = (1.0 + q * kappa / delta).exp2() * rho.max(1.0).powf((q - 1.0) * kappa / delta);
        constants.push(json!({"delta": delta, "kappa": kappa, "q": q, "rho": rho, "C": cst}));
        let recs = collect(fs.len(), |i| {
            let f = &fs[i];
            let mk = maximal_centered(f, &c, kappa, &ladder)?.output;
            let m = maximal_centered(f, &c, 0.0, &ladder)?.output;
            let norm = c.integral_power(f, q)?.powf(kappa / delta);
            let rhs = m.map(|v| cst * norm * v.powf(1.0 - q * kappa / delta));
            let mut rec = cell_record(j * fs.len() + i, f, &mk, &rhs, json!({"delta": delta, "kappa": kappa, "q": q, "C": cst}));
            rec.index = j * fs.len() + i;
            Ok(rec)
        })?;
        records.extend(recs);
    }
    Ok(Outcome {
        records,
        cap: 1.0,
        cap_kind: CapKind::ProofTraced,
        environment: json!({"backend": r.backend, "n": r.n, "L": r.level, "ladder": "standard, both sides"}),
        notes: json!({
            "constants": constants,
            "derivation": "per ladder radius: r^(kappa-delta) int_B f <= min(r^kappa M f, 2 rho^(1/q') ||f||_q r^(kappa - delta/q)); the two-term split bounded by twice the balanced value gives C = 2^(1 + q kappa/delta) max(1, rho)^((q-1) kappa/delta), rho = max content(B)/r^delta over ladder balls",
        }),
    })
}

#[derive(Debug, Clone, Copy)]
struct HedbergPoint {
    delta: f64,
    alpha: f64,
    kappa: f64,
    p: f64,
}

fn hedberg_grid() -> Vec<HedbergPoint> {
    [
        (1.0, 0.5, 0.0, 1.0),
        (1.0, 0.5, 0.25, 1.5),
        (1.5, 0.5, 0.0, 1.0),
        (1.5, 0.5, 0.25, 2.0),
        (1.5, 1.0, 0.5, 1.2),
        (1.5, 0.75, 0.25, 1.5),
        (2.0, 0.5, 0.0, 1.0),
        (2.0, 0.5, 0.25, 2.0),
        (2.0, 1.0, 0.5, 1.5),
        (2.0, 1.5, 1.0, 1.2),
        (2.0, 1.0, 0.0, 1.8),
        (2.0, 0.5, 0.4, 3.0),
    ]
    .into_iter()
    .map(|(delta, alpha, kappa, p)| HedbergPoint { delta, alpha, kappa, p })
    .collect()
}

/// Largest `H({y : |x - y| <= s}) / s^delta` over cells `x` and realized
/// distances `s >= w`, from one incremental dyadic tree per cell.
fn distance_ball_ratio(g: Grid, delta: f64) -> f64 {
    let per_cell = crate::par::map_indices(g.len(), |x| {
        let mut by_dist: Vec<(i64, usize)> = (0..g.len())
            .map(|y| (g.dist2_half(&g.center_half(x), &g.center_half(y)), y))
            .collect();
        by_dist.sort_unstable();
        let mut tree = DyadicTree::new(g, delta);
        let mut best = 0.0f64;
        let mut i = 0;
        while i < by_dist.len() {
            let d2 = by_dist[i].0;
            while i < by_dist.len() && by_dist[i].0 == d2 {
                tree.insert(by_dist[i].1);
                i += 1;
            }
            if d2 > 0 {
                let s = (d2 as f64).sqrt() * g.half_unit();
                best = best.max(tree.value() / s.powf(delta));
            }
        }
        best
    });
    per_cell.into_iter().fold(0.0, f64::max)
}

struct HedbergConstants {
    a: f64,
    b: f64,
    c: f64,
    rho_ball: f64,
    rho_star: f64,
}

fn hedberg_constants(g: Grid, pt: HedbergPoint, floor: f64, c: &Content, ladder: &RadiusLadder) -> HedbergConstants {
    let HedbergPoint { delta, alpha, kappa, p } = pt;
    let w = g.cell_width();
    let a = delta.exp2() / (alpha.exp2() - kappa.exp2()) + (w / floor).powf(delta - alpha);
    let rho_ball = ball_ratio_max(c, ladder, &cell_centers(g));
    let rho_star = distance_ball_ratio(g, delta);
    let (b, f_low) = if p == 1.0 {
        (1.0, 1.0)
    } else {
        let pp = p / (p - 1.0);
        let beta = (delta - alpha) * pp;
        let b = 2.0 * (rho_star / (1.0 - delta / beta)).powf(1.0 / pp);
        let f_low = (2.0 * rho_ball.powf(1.0 / pp)).powf(p * (alpha - kappa) / (delta - kappa * p));
        (b, f_low)
    };
    let c_prod = (a * f_low + b).max(a + b * ((delta / p - alpha) / 2.0).exp2());
    HedbergConstants { a, b, c: c_prod, rho_ball, rho_star }
}

fn check_hedberg_setting(r: &Resolved) -> Result<()> {
    if r.backend != Backend::DyadicExact {
        return param("the traced Hedberg constants use sublinearity and need the dyadic backend");
    }
    if r.n > 2 {
        return param("the Hedberg suites need n <= 2, where the geometric ladder reaches the cube diameter");
    }
    Ok(())
}

fn hedberg(r: &Resolved) -> Result<Outcome> {
    check_hedberg_setting(r)?;
    let g = Grid::new(r.n, r.level)?;
    let ladder = RadiusLadder::standard(g);
    let floor = r.floor.unwrap_or(g.cell_width() / 2.0);
    let fs = r.corpus(r.samples)?;
    let mut records = Vec::new();
    let mut constants = Vec::new();
    for (j, pt) in hedberg_grid().into_iter().enumerate() {
        if pt.delta > r.n as f64 {
            continue;
        }
        let HedbergPoint { delta, alpha, kappa, p } = pt;
        let c = Content::new(g, delta, r.backend)?;
        let k = hedberg_constants(g, pt, floor, &c, &ladder);
        constants.push(json!({
            "delta": delta, "alpha": alpha, "kappa": kappa, "p": p,
            "A": k.a, "B": k.b, "C": k.c, "rho_ball": k.rho_ball, "rho_star": k.rho_star,
        }));
        let th_m = (delta - p * alpha) / (delta - kappa * p);
        let th_f = (alpha - kappa) / (delta - kappa * p);
        let recs = collect(fs.len(), |i| {
            let f = &fs[i];
            let riesz = riesz_potential(f, &c, alpha, Some(floor))?.output;
            let m = maximal_centered(f, &c, kappa, &ladder)?.output;
            let int_p = c.integral_power(f, p)?;
            let norm = int_p.powf(1.0 / p);
            let product = m.map(|v| k.c * v.powf(th_m) * int_p.powf(th_f));
            let params = json!({"delta": delta, "alpha": alpha, "kappa": kappa, "p": p, "form": "product", "C": k.c});
            let prod = cell_record(0, f, &riesz, &product, params);
            // two-term split at every ladder radius
            let mut split_worst = (0.0f64, 0.0, 1.0, 0usize);
            for x in 0..g.len() {
                for kk in 0..ladder.len() {
                    let rr = ladder.radius(kk);
                    let bound = k.a * rr.powf(alpha - kappa) * m.get(x) + k.b * norm * rr.powf(alpha - delta / p);
                    let q = super::ratio(riesz.get(x), bound);
                    if q > split_worst.0 {
                        split_worst = (q, riesz.get(x), bound, x);
                    }
                }
            }
            let (_, lhs, rhs, x) = split_worst;
            let split = bound_record(0, function_digest(f), lhs, rhs, 1.0, json!({"form": "split", "cell": x, "A": k.a, "B": k.b}));
            // one record per instance: the worse of the two checks
            let mut rec = if split.ratio > prod.ratio { split } else { prod.clone() };
            rec.ok = rec.ok && prod.ok;
            rec.index = j * fs.len() + i;
            rec.params["delta"] = json!(delta);
            rec.params["alpha"] = json!(alpha);
            rec.params["kappa"] = json!(kappa);
            rec.params["p"] = json!(p);
            Ok(rec)
        })?;
        records.extend(recs);
    }
    Ok(Outcome {
        records,
        cap: 1.0,
        cap_kind: CapKind::ProofTraced,
        environment: json!({"backend": r.backend, "n": r.n, "L": r.level, "distance_floor": floor, "ladder": "standard"}),
        notes: json!({
            "constants": constants,
            "A": "2^delta/(2^alpha - 2^kappa) from halving annuli along the ladder, plus (w/floor)^(delta-alpha) for the center cell",
            "B": "2 (rho*/(1 - delta/beta))^(1/p'), beta = (delta - alpha) p', rho* = max H({|x-y| <= s})/s^delta over realized s >= w; B = 1 for p = 1",
            "C": "max(A F_low + B, A + B 2^((delta/p - alpha)/2)): the ladder radius just below the balancing radius, or the smallest radius when the balancing radius is below it; F_low = (2 rho^(1/p'))^(p(alpha-kappa)/(delta-kappa p))",
        }),
    })
}

fn hedberg_ball_part(r: &Resolved) -> Result<Outcome> {
    check_hedberg_setting(r)?;
    let g = Grid::new(r.n, r.level)?;
    let ladder = RadiusLadder::standard(g);
    let stencils = BallStencils::new(&ladder);
    let floor = r.floor.unwrap_or(g.cell_width() / 2.0);
    let fs = r.corpus(r.samples)?;
    let mut records = Vec::new();
    for (j, pt) in hedberg_grid().into_iter().enumerate() {
        if pt.delta > r.n as f64 {
            continue;
        }
        let HedbergPoint { delta, alpha, kappa, .. } = pt;
        let c = Content::new(g, delta, r.backend)?;
        let a0 = delta.exp2() / (alpha.exp2() - kappa.exp2());
        let recs = collect(fs.len(), |i| {
            let f = fs[i].support().indicator();
            let m = maximal_centered(&f, &c, kappa, &ladder)?.output;
            let mut worst = (0.0f64, 0.0, 1.0, 0usize, 0.0);
            let mut cells = Vec::new();
            for x in (0..g.len()).filter(|&x| f.get(x) == 0.0) {
                for kk in 0..ladder.len() {
                    stencils.cells(&g.center_half(x), kk, &mut cells);
                    let entries: Vec<(u32, f64)> = cells
                        .iter()
                        .filter(|&&y| f.get(y) > 0.0)
                        .map(|&y| (y as u32, cell_distance(g, x, y).max(floor).powf(alpha - delta)))
                        .collect();
                    let near = c.integral_of_entries(&entries);
                    let rr = ladder.radius(kk);
                    let bound = a0 * rr.powf(alpha - kappa) * m.get(x);
                    let q = super::ratio(near, bound);
                    if q > worst.0 {
                        worst = (q, near, bound, x, rr);
                    }
                }
            }
            let (_, lhs, rhs, x, rr) = worst;
            let params = json!({"delta": delta, "alpha": alpha, "kappa": kappa, "constant": a0, "cell": x, "r": rr});
            let mut rec = bound_record(j * fs.len() + i, function_digest(&f), lhs, rhs, 1.0, params);
            rec.index = j * fs.len() + i;
            Ok(rec)
        })?;
        records.extend(recs);
    }
    Ok(Outcome {
        records,
        cap: 1.0,
        cap_kind: CapKind::Explicit,
        environment: json!({"backend": r.backend, "n": r.n, "L": r.level, "distance_floor": floor}),
        notes: json!({"inputs": "indicators of the corpus supports; cells outside the support only"}),
    })
}

fn riesz_floor(r: &Resolved) -> Result<Outcome> {
    let (g, c) = grid_and_content(r)?;
    let w = g.cell_width();
    let floors = [0.25 * w, 0.5 * w, w, 2.0 * w];
    let fs = r.corpus(r.samples)?;
    let records = collect(fs.len(), |i| {
        let f = &fs[i];
        let outs: Vec<GridFunction> = floors
            .iter()
            .map(|&fl| riesz_potential(f, &c, r.alpha, Some(fl)).map(|o| o.output))
            .collect::<Result<_>>()?;
        let mut worst: Option<InstanceRecord> = None;
        for k in 1..outs.len() {
            let rec = cell_record(i, f, &outs[k], &outs[k - 1], json!({"floors": [floors[k - 1], floors[k]]}));
            if worst.as_ref().is_none_or(|w| rec.ratio > w.ratio) {
                worst = Some(rec);
            }
        }
        Ok(worst.unwrap())
    })?;
    Ok(Outcome {
        records,
        cap: 1.0,
        cap_kind: CapKind::Exact,
        environment: json!({"backend": r.backend, "n": r.n, "L": r.level, "alpha": r.alpha, "floors": floors}),
        notes: json!({}),
    })
}

/// Per-cell brute force for the centered maximal function: full scan for
/// ball membership and a fresh content for every integral.
fn brute_centered(f: &GridFunction, delta: f64, kappa: f64, backend: Backend, ladder: &RadiusLadder) -> Result<Vec<f64>> {
    let g = f.grid();
    let mut out = Vec::with_capacity(g.len());
    for x in 0..g.len() {
        let mut best = 0.0f64;
        for k in 0..ladder.len() {
            let r2 = ladder.r2_half()[k];
            let ball = GridSet::from_fn(g, |y| (g.dist2_half(&g.center_half(x), &g.center_half(y)) as f64) < r2);
            let fresh = Content::new(g, delta, backend)?;
            best = best.max(ladder.radius(k).powf(kappa - delta) * fresh.integral(&f.restrict(&ball)?));
        }
        out.push(best);
    }
    Ok(out)
}

/// Layer cake of the kernel-weighted function at `x`, summing over its
/// thresholds with dyadic contents of freshly built level sets.
fn brute_riesz_at(f: &GridFunction, x: usize, delta: f64, alpha: f64, floor: f64) -> f64 {
    let g = f.grid();
    let gx = GridFunction::from_fn(g, |y| f.get(y) * cell_distance(g, x, y).max(floor).powf(alpha - delta));
    let mut ts: Vec<f64> = gx.values().iter().copied().filter(|&v| v > 0.0).collect();
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    let mut prev = 0.0;
    let mut sum = 0.0;
    for t in ts {
        sum += (t - prev) * dyadic_value(&GridSet::from_fn(g, |y| gx.get(y) >= t), delta);
        prev = t;
    }
    sum
}

fn operator_oracles(r: &Resolved) -> Result<Outcome> {
    let (g, c) = grid_and_content(r)?;
    if r.backend != Backend::DyadicExact {
        return param("operator-oracles compares against dyadic oracles");
    }
    let ladder = RadiusLadder::standard(g);
    let floor = r.floor.unwrap_or(g.cell_width() / 2.0);
    let fs = r.corpus(r.samples)?;
    let records = collect(fs.len(), |i| {
        let f = &fs[i];
        let mut rng = rng_for(r, i);
        let (which, got, want) = match i % 3 {
            0 => {
                let got = maximal_centered(f, &c, r.kappa.min(r.delta / 2.0), &ladder)?.output;
                let want = brute_centered(f, r.delta, r.kappa.min(r.delta / 2.0), r.backend, &ladder)?;
                let x = (0..g.len()).max_by(|&a, &b| rel_err(got.get(a), want[a]).total_cmp(&rel_err(got.get(b), want[b]))).unwrap();
                ("maximal-centered", got.get(x), want[x])
            }
            1 => {
                let got = riesz_potential(f, &c, r.alpha, Some(floor))?.output;
                let x = rand::Rng::gen_range(&mut rng, 0..g.len());
                ("riesz", got.get(x), brute_riesz_at(f, x, r.delta, r.alpha, floor))
            }
            _ => {
                let a = rand::Rng::gen_range(&mut rng, 0.1..10.0);
                let ops: [Box<dyn Fn(&GridFunction) -> Result<GridFunction>>; 3] = [
                    Box::new(|h| Ok(maximal_centered(h, &c, r.kappa, &ladder)?.output)),
                    Box::new(|h| Ok(maximal_sharp(h, &c, &ladder, Candidates { stride: r.stride })?.output)),
                    Box::new(|h| Ok(riesz_potential(h, &c, r.alpha, Some(floor))?.output)),
                ];
                let mut worst = ("homogeneity", 0.0, 0.0);
                let mut worst_err = -1.0;
                for op in &ops {
                    let lhs = op(&f.scale(a))?;
                    let rhs = op(f)?.scale(a);
                    for x in 0..g.len() {
                        let e = rel_err(lhs.get(x), rhs.get(x));
                        if e > worst_err {
                            worst_err = e;
                            worst = ("homogeneity", lhs.get(x), rhs.get(x));
                        }
                    }
                }
                worst
            }
        };
        Ok(exact_record(i, function_digest(f), got, want, json!({"check": which})))
    })?;
    Ok(Outcome {
        records,
        cap: 0.0,
        cap_kind: CapKind::Exact,
        environment: json!({"backend": r.backend, "n": r.n, "L": r.level, "distance_floor": floor}),
        notes: json!({"oracles": "full-scan ball membership with fresh contents; layer cake over freshly built level sets"}),
    })
}
