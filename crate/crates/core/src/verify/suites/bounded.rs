//! Boundedness suites: ratio of output to input quasi-norms at the exponents
//! of each inequality, and comparisons with the classical operators.

use serde_json::json;

use super::{base_defaults, bound_record, collect, exact_record, rng_for, random_simple, Outcome, Suite, TOL};
use crate::choquet::{Backend, Content};
use crate::content::comparability_bracket;
use crate::error::{param, Result};
use crate::geometry::{Ball, Grid, GridFunction};
use crate::io::function_digest;
use crate::operators::{
    classical_maximal, classical_riesz, maximal_centered, maximal_sharp, maximal_uncentered,
    riesz_potential, Candidates, RadiusLadder,
};
use crate::verify::report::CapKind;
use crate::verify::{InstanceKind, Resolved};

fn corpus_defaults() -> Resolved {
    Resolved {
        level: 4,
        coarse_level: Some(3),
        samples: 50,
        families: vec![
            InstanceKind::RandomSimple,
            InstanceKind::BallIndicator,
            InstanceKind::CantorDust { dimension: 1.5 },
            InstanceKind::Checkerboard,
            InstanceKind::PowerKernel { beta: 0.5, floor: None },
            InstanceKind::UnionOfCubes,
            InstanceKind::ThinAnnulus,
        ],
        ..base_defaults()
    }
}

pub(super) fn suites() -> Vec<Suite> {
    vec![
        Suite {
            id: "thm-4.3",
            description: "(int (M^n f)^p dH^delta)^(1/p) <= c (int f^p dH^delta)^(1/p), p in (delta/n, inf)",
            defaults: corpus_defaults,
            run: maximal_bounded,
        },
        Suite {
            id: "thm-4.6",
            description: "M^n_kappa from L^p to L^s, s = delta p/(delta - p kappa), p in (delta/n, delta/kappa)",
            defaults: corpus_defaults,
            run: fractional_maximal_bounded,
        },
        Suite {
            id: "thm-4.7",
            description: "M^delta_kappa from L^p to L^s, s = delta p/(delta - p kappa), delta < n, p in (1, delta/kappa)",
            defaults: || Resolved { p: 1.5, ..corpus_defaults() },
            run: fractional_maximal_own_dimension,
        },
        Suite {
            id: "cor-4.9",
            description: "uncentered M^n_kappa from L^p to L^s, s = delta p/(delta - p kappa), p in (delta/n, delta/kappa)",
            defaults: corpus_defaults,
            run: uncentered_bounded,
        },
        Suite {
            id: "prop-4.10",
            description: "sharp maximal function bounded on L^p(H^delta), p in (delta/n, inf)",
            defaults: corpus_defaults,
            run: sharp_bounded,
        },
        Suite {
            id: "thm-5.2",
            description: "R^n_alpha from L^p to L^s, s = delta p/(delta - p alpha), p in (delta/n, delta/alpha)",
            defaults: corpus_defaults,
            run: riesz_bounded,
        },
        Suite {
            id: "thm-5.4",
            description: "R^n_alpha from L^p(H^delta) to L^s(H^(delta - kappa p)), s = p(delta - kappa p)/(delta - p alpha)",
            defaults: || Resolved { kappa: 0.25, ..corpus_defaults() },
            run: riesz_into_lower_dimension,
        },
        Suite {
            id: "thm-5.5",
            description: "R^delta_alpha from L^p to L^s, s = delta p/(delta - p alpha), delta < n, p in (1, delta/alpha)",
            defaults: || Resolved { p: 1.5, ..corpus_defaults() },
            run: riesz_own_dimension,
        },
        Suite {
            id: "cross-backend",
            description: "greedy ball integral within [c_low, c_high] times the dyadic integral",
            defaults: || Resolved { samples: 100, ..base_defaults() },
            run: cross_backend,
        },
        Suite {
            id: "classical-maximal",
            description: "M^n against the Lebesgue maximal function; the ratio is the unit-ball volume",
            defaults: || Resolved { samples: 30, ..corpus_defaults() },
            run: classical_max,
        },
        Suite {
            id: "classical-riesz",
            description: "R^n_alpha against the Lebesgue Riesz potential",
            defaults: || Resolved { samples: 30, ..corpus_defaults() },
            run: classical_rz,
        },
    ]
}

fn fmt_bound(x: f64) -> String {
    if x.is_infinite() {
        "inf".to_string()
    } else {
        format!("{x}")
    }
}

/// Rejects `p` outside `(lo, hi)` with the range in the message.
fn check_p(id: &str, p: f64, lo: f64, hi: f64, range: &str) -> Result<()> {
    if !(p > lo && p < hi) {
        return param(format!(
            "{id}: p must lie in {range} = ({}, {}), got {p}",
            fmt_bound(lo),
            fmt_bound(hi)
        ));
    }
    Ok(())
}

fn check_delta(id: &str, r: &Resolved, strict: bool) -> Result<()> {
    let n = r.n as f64;
    let ok = r.delta > 0.0 && if strict { r.delta < n } else { r.delta <= n };
    if !ok {
        let range = if strict { "(0, n)" } else { "(0, n]" };
        return param(format!("{id}: delta must lie in {range} with n = {}, got {}", r.n, r.delta));
    }
    Ok(())
}

/// One record per corpus instance: `(int out^s dH^lhs_delta)^(1/s)` against
/// `(int f^p dH^delta)^(1/p)`; the verdict only asks for a finite ratio.
fn run_bounded<F>(r: &Resolved, lhs_delta: f64, s: f64, op: F, env: serde_json::Value) -> Result<Outcome>
where
    F: Fn(&GridFunction) -> Result<GridFunction> + Sync,
{
    let g = Grid::new(r.n, r.level)?;
    let c_in = Content::new(g, r.delta, r.backend)?;
    let c_out = Content::new(g, lhs_delta, r.backend)?;
    let specs = r.corpus_specs(r.samples);
    let fs = r.corpus(r.samples)?;
    // operators are parallel internally; instances run in order
    let mut records = Vec::with_capacity(fs.len());
    for (i, f) in fs.iter().enumerate() {
        let out = op(f)?;
        let lhs = c_out.integral_power(&out, s)?.powf(1.0 / s);
        let rhs = c_in.integral_power(f, r.p)?.powf(1.0 / r.p);
        let mut rec = bound_record(i, function_digest(f), lhs, rhs, f64::INFINITY, json!({"family": specs[i].kind.name()}));
        rec.ok = rec.ratio.is_finite();
        records.push(rec);
    }
    let mut environment = env;
    environment["backend"] = json!(r.backend);
    environment["L"] = json!(r.level);
    environment["n"] = json!(r.n);
    environment["s"] = json!(s);
    environment["lhs_content"] = json!(lhs_delta);
    Ok(Outcome {
        records,
        cap: f64::INFINITY,
        cap_kind: CapKind::Empirical,
        environment,
        notes: json!({
            "ratio": "(int (Tf)^s)^(1/s) / (int f^p)^(1/p)",
            "ladder": "operators use one refinement of the standard ladder",
        }),
    })
}

fn lhs_ladder(r: &Resolved) -> Result<RadiusLadder> {
    Ok(RadiusLadder::standard(Grid::new(r.n, r.level)?).refine())
}

fn maximal_bounded(r: &Resolved) -> Result<Outcome> {
    check_delta("thm-4.3", r, false)?;
    let n = r.n as f64;
    check_p("thm-4.3", r.p, r.delta / n, f64::INFINITY, "(delta/n, inf)")?;
    let c_n = Content::new(Grid::new(r.n, r.level)?, n, r.backend)?;
    let ladder = lhs_ladder(r)?;
    run_bounded(r, r.delta, r.p, |f| Ok(maximal_centered(f, &c_n, 0.0, &ladder)?.output), json!({"operator": "M^n"}))
}

fn kappa_range(id: &str, r: &Resolved) -> Result<()> {
    if !(r.kappa >= 0.0 && r.kappa < r.delta) {
        return param(format!("{id}: kappa must lie in [0, delta) = [0, {}), got {}", r.delta, r.kappa));
    }
    Ok(())
}

fn frac_exponent(r: &Resolved, order: f64) -> f64 {
    r.delta * r.p / (r.delta - r.p * order)
}

fn fractional_maximal_bounded(r: &Resolved) -> Result<Outcome> {
    check_delta("thm-4.6", r, false)?;
    kappa_range("thm-4.6", r)?;
    let hi = if r.kappa == 0.0 { f64::INFINITY } else { r.delta / r.kappa };
    check_p("thm-4.6", r.p, r.delta / r.n as f64, hi, "(delta/n, delta/kappa)")?;
    let c_n = Content::new(Grid::new(r.n, r.level)?, r.n as f64, r.backend)?;
    let ladder = lhs_ladder(r)?;
    run_bounded(r, r.delta, frac_exponent(r, r.kappa), |f| Ok(maximal_centered(f, &c_n, r.kappa, &ladder)?.output), json!({"operator": "M^n_kappa", "kappa": r.kappa}))
}

fn fractional_maximal_own_dimension(r: &Resolved) -> Result<Outcome> {
    check_delta("thm-4.7", r, true)?;
    kappa_range("thm-4.7", r)?;
    let hi = if r.kappa == 0.0 { f64::INFINITY } else { r.delta / r.kappa };
    check_p("thm-4.7", r.p, 1.0, hi, "(1, delta/kappa)")?;
    let c_d = Content::new(Grid::new(r.n, r.level)?, r.delta, r.backend)?;
    let ladder = lhs_ladder(r)?;
    run_bounded(r, r.delta, frac_exponent(r, r.kappa), |f| Ok(maximal_centered(f, &c_d, r.kappa, &ladder)?.output), json!({"operator": "M^delta_kappa", "kappa": r.kappa}))
}

fn uncentered_bounded(r: &Resolved) -> Result<Outcome> {
    check_delta("cor-4.9", r, false)?;
    kappa_range("cor-4.9", r)?;
    let hi = if r.kappa == 0.0 { f64::INFINITY } else { r.delta / r.kappa };
    check_p("cor-4.9", r.p, r.delta / r.n as f64, hi, "(delta/n, delta/kappa)")?;
    let c_n = Content::new(Grid::new(r.n, r.level)?, r.n as f64, r.backend)?;
    let ladder = lhs_ladder(r)?;
    let cand = Candidates { stride: r.stride };
    run_bounded(
        r,
        r.delta,
        frac_exponent(r, r.kappa),
        |f| Ok(maximal_uncentered(f, &c_n, r.kappa, &ladder, cand)?.output),
        json!({"operator": "uncentered M^n_kappa", "kappa": r.kappa, "stride": r.stride}),
    )
}

fn sharp_bounded(r: &Resolved) -> Result<Outcome> {
    check_delta("prop-4.10", r, false)?;
    check_p("prop-4.10", r.p, r.delta / r.n as f64, f64::INFINITY, "(delta/n, inf)")?;
    let c_n = Content::new(Grid::new(r.n, r.level)?, r.n as f64, r.backend)?;
    let ladder = lhs_ladder(r)?;
    let cand = Candidates { stride: r.stride };
    run_bounded(r, r.delta, r.p, |f| Ok(maximal_sharp(f, &c_n, &ladder, cand)?.output), json!({"operator": "sharp M^#", "stride": r.stride}))
}

fn alpha_range(id: &str, r: &Resolved) -> Result<()> {
    if !(r.alpha > 0.0 && r.alpha < r.delta) {
        return param(format!("{id}: alpha must lie in (0, delta) = (0, {}), got {}", r.delta, r.alpha));
    }
    Ok(())
}

fn riesz_bounded(r: &Resolved) -> Result<Outcome> {
    check_delta("thm-5.2", r, false)?;
    alpha_range("thm-5.2", r)?;
    check_p("thm-5.2", r.p, r.delta / r.n as f64, r.delta / r.alpha, "(delta/n, delta/alpha)")?;
    let c_n = Content::new(Grid::new(r.n, r.level)?, r.n as f64, r.backend)?;
    run_bounded(r, r.delta, frac_exponent(r, r.alpha), |f| Ok(riesz_potential(f, &c_n, r.alpha, r.floor)?.output), json!({"operator": "R^n_alpha", "alpha": r.alpha}))
}

fn riesz_into_lower_dimension(r: &Resolved) -> Result<Outcome> {
    check_delta("thm-5.4", r, false)?;
    alpha_range("thm-5.4", r)?;
    if !(r.kappa >= 0.0 && r.kappa < r.alpha) {
        return param(format!("thm-5.4: kappa must lie in [0, alpha) = [0, {}), got {}", r.alpha, r.kappa));
    }
    check_p("thm-5.4", r.p, r.delta / r.n as f64, r.delta / r.alpha, "(delta/n, delta/alpha)")?;
    let lhs_delta = r.delta - r.kappa * r.p;
    let s = r.p * lhs_delta / (r.delta - r.p * r.alpha);
    let c_n = Content::new(Grid::new(r.n, r.level)?, r.n as f64, r.backend)?;
    run_bounded(r, lhs_delta, s, |f| Ok(riesz_potential(f, &c_n, r.alpha, r.floor)?.output), json!({"operator": "R^n_alpha", "alpha": r.alpha, "kappa": r.kappa}))
}

fn riesz_own_dimension(r: &Resolved) -> Result<Outcome> {
    check_delta("thm-5.5", r, true)?;
    alpha_range("thm-5.5", r)?;
    check_p("thm-5.5", r.p, 1.0, r.delta / r.alpha, "(1, delta/alpha)")?;
    let c_d = Content::new(Grid::new(r.n, r.level)?, r.delta, r.backend)?;
    run_bounded(r, r.delta, frac_exponent(r, r.alpha), |f| Ok(riesz_potential(f, &c_d, r.alpha, r.floor)?.output), json!({"operator": "R^delta_alpha", "alpha": r.alpha}))
}

fn cross_backend(r: &Resolved) -> Result<Outcome> {
    let g = Grid::new(r.n, r.level)?;
    let dy = Content::new(g, r.delta, Backend::DyadicExact)?;
    let ball = Content::new(g, r.delta, Backend::BallGreedyUpper)?;
    let (c_low, c_high) = comparability_bracket(r.n, r.delta)?;
    let records = collect(r.samples, |i| {
        let mut rng = rng_for(r, i);
        let f = random_simple(&mut rng, g);
        let (b, d) = (ball.integral(&f), dy.integral(&f));
        let mut rec = bound_record(i, function_digest(&f), b, d, c_high, json!({}));
        rec.ok &= b >= c_low * d * (1.0 - TOL);
        Ok(rec)
    })?;
    let lo = records.iter().map(|x| x.ratio).fold(f64::INFINITY, f64::min);
    Ok(Outcome {
        records,
        cap: c_high,
        cap_kind: CapKind::ProofTraced,
        environment: json!({"n": r.n, "L": r.level, "delta": r.delta}),
        notes: json!({"c_low": c_low, "c_high": c_high, "min_ratio": lo}),
    })
}

fn classical_max(r: &Resolved) -> Result<Outcome> {
    let g = Grid::new(r.n, r.level)?;
    let c_n = Content::new(g, r.n as f64, Backend::DyadicExact)?;
    let ladder = RadiusLadder::standard(g);
    let omega = Ball::volume(r.n, 1.0);
    let fs = r.corpus(r.samples)?;
    let mut records = Vec::new();
    let (mut c1, mut c2) = (f64::INFINITY, 0.0f64);
    for (i, f) in fs.iter().enumerate() {
        let m = maximal_centered(f, &c_n, 0.0, &ladder)?.output;
        let cl = classical_maximal(f, 0.0, &ladder)?.output;
        let mut worst = (0.0f64, 0.0, 0.0);
        for x in 0..g.len() {
            if cl.get(x) > 0.0 {
                let q = m.get(x) / cl.get(x);
                c1 = c1.min(q);
                c2 = c2.max(q);
            }
            let e = super::rel_err(m.get(x), omega * cl.get(x));
            if e >= worst.0 {
                worst = (e, m.get(x), omega * cl.get(x));
            }
        }
        let mut rec = exact_record(i, function_digest(f), worst.1, worst.2, json!({}));
        rec.ok = rec.ratio <= 1e-10;
        records.push(rec);
    }
    Ok(Outcome {
        records,
        cap: 0.0,
        cap_kind: CapKind::Exact,
        environment: json!({"n": r.n, "L": r.level, "backend": "dyadic-exact", "content": r.n}),
        notes: json!({
            "c1": c1,
            "c2": c2,
            "unit_ball_volume": omega,
            "why": "the dyadic content of dimension n of a cell set is its volume, so the two averages differ only by |B| / r^n",
        }),
    })
}

fn classical_rz(r: &Resolved) -> Result<Outcome> {
    let g = Grid::new(r.n, r.level)?;
    let c_n = Content::new(g, r.n as f64, Backend::DyadicExact)?;
    let fs = r.corpus(r.samples)?;
    let mut records = Vec::new();
    let (mut c1, mut c2) = (f64::INFINITY, 0.0f64);
    for (i, f) in fs.iter().enumerate() {
        let a = riesz_potential(f, &c_n, r.alpha, r.floor)?.output;
        let b = classical_riesz(f, r.alpha, r.floor)?.output;
        let mut worst = (0.0f64, 0.0, 0.0);
        for x in 0..g.len() {
            if b.get(x) > 0.0 {
                c1 = c1.min(a.get(x) / b.get(x));
                c2 = c2.max(a.get(x) / b.get(x));
            }
            let e = super::rel_err(a.get(x), b.get(x));
            if e >= worst.0 {
                worst = (e, a.get(x), b.get(x));
            }
        }
        let mut rec = exact_record(i, function_digest(f), worst.1, worst.2, json!({}));
        // sums over many cells: allow summation-order rounding
        rec.ok = rec.ratio <= 1e-10;
        records.push(rec);
    }
    Ok(Outcome {
        records,
        cap: 0.0,
        cap_kind: CapKind::Exact,
        environment: json!({"n": r.n, "L": r.level, "alpha": r.alpha, "backend": "dyadic-exact"}),
        notes: json!({"c1": c1, "c2": c2, "why": "with content of dimension n the Choquet integral is the Riemann sum"}),
    })
}
