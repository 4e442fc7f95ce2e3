use super::*;
use crate::choquet::{Backend, Content};
use crate::content::dyadic_value;
use crate::geometry::{discretize_ball, BallMode, Grid, GridSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_fn(rng: &mut ChaCha8Rng, g: Grid) -> GridFunction {
    GridFunction::from_fn(g, |_| if rng.gen_bool(0.5) { 0.0 } else { rng.gen_range(1..6) as f64 * 0.25 })
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

/// Rebuilds every restricted integral from a full scan of the grid and a
/// fresh content.
fn brute_centered(f: &GridFunction, delta: f64, kappa: f64, ladder: &RadiusLadder) -> Vec<f64> {
    let g = f.grid();
    (0..g.len())
        .map(|x| {
            (0..ladder.len())
                .map(|k| {
                    let r2 = ladder.r2_half()[k];
                    let b = GridSet::from_fn(g, |y| {
                        (g.dist2_half(&g.center_half(x), &g.center_half(y)) as f64) < r2
                    });
                    let fr = f.restrict(&b).unwrap();
                    let fresh = Content::new(g, delta, Backend::DyadicExact).unwrap();
                    ladder.radius(k).powf(kappa - delta) * fresh.integral(&fr)
                })
                .fold(0.0, f64::max)
        })
        .collect()
}

#[test]
fn centered_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let g = Grid::new(2, 3).unwrap();
    let ladder = RadiusLadder::standard(g);
    for (delta, kappa) in [(2.0, 0.0), (1.5, 0.5)] {
        let c = Content::new(g, delta, Backend::DyadicExact).unwrap();
        let f = random_fn(&mut rng, g);
        let got = maximal_centered(&f, &c, kappa, &ladder).unwrap();
        for (a, b) in got.output.values().iter().zip(brute_centered(&f, delta, kappa, &ladder)) {
            assert!(rel(*a, b) <= 1e-12);
        }
    }
}

#[test]
fn uncentered_sandwich() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let g = Grid::new(2, 3).unwrap();
    let ladder = RadiusLadder::standard(g);
    let (delta, kappa) = (1.5, 0.25);
    let c = Content::new(g, delta, Backend::DyadicExact).unwrap();
    for _ in 0..3 {
        let f = random_fn(&mut rng, g);
        let cen = maximal_centered(&f, &c, kappa, &ladder).unwrap().output;
        let unc = maximal_uncentered(&f, &c, kappa, &ladder, Candidates::default()).unwrap().output;
        let factor = (delta - kappa).exp2();
        for x in 0..g.len() {
            assert!(cen.get(x) <= unc.get(x));
            assert!(unc.get(x) <= factor * cen.get(x) * (1.0 + 1e-12));
        }
    }
}

#[test]
fn uncentered_sees_nearby_mass() {
    let g = Grid::new(1, 4).unwrap();
    let f = GridSet::from_indices(g, [8]).indicator();
    let c = Content::new(g, 1.0, Backend::DyadicExact).unwrap();
    let ladder = RadiusLadder::standard(g);
    let unc = maximal_uncentered(&f, &c, 0.0, &ladder, Candidates::default()).unwrap().output;
    assert!(unc.get(7) > 0.0 && unc.get(0) > 0.0);
}

#[test]
fn ladder_refinement_is_monotone() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let g = Grid::new(2, 3).unwrap();
    let ladder = RadiusLadder::standard(g);
    let fine = ladder.refine();
    let c = Content::new(g, 1.0, Backend::DyadicExact).unwrap();
    let f = random_fn(&mut rng, g);
    let a = maximal_centered(&f, &c, 0.5, &ladder).unwrap().output;
    let b = maximal_centered(&f, &c, 0.5, &fine).unwrap().output;
    let ua = maximal_uncentered(&f, &c, 0.5, &ladder, Candidates::default()).unwrap().output;
    let ub = maximal_uncentered(&f, &c, 0.5, &fine, Candidates::default()).unwrap().output;
    for x in 0..g.len() {
        assert!(a.get(x) <= b.get(x) && ua.get(x) <= ub.get(x));
    }
}

#[test]
fn homogeneity() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let g = Grid::new(2, 3).unwrap();
    let ladder = RadiusLadder::standard(g);
    let c = Content::new(g, 1.5, Backend::DyadicExact).unwrap();
    let f = random_fn(&mut rng, g);
    let s = 3.7;
    let pairs = [
        (
            maximal_centered(&f, &c, 0.5, &ladder).unwrap().output,
            maximal_centered(&f.scale(s), &c, 0.5, &ladder).unwrap().output,
        ),
        (
            maximal_sharp(&f, &c, &ladder, Candidates::default()).unwrap().output,
            maximal_sharp(&f.scale(s), &c, &ladder, Candidates::default()).unwrap().output,
        ),
        (
            riesz_potential(&f, &c, 0.5, None).unwrap().output,
            riesz_potential(&f.scale(s), &c, 0.5, None).unwrap().output,
        ),
        (
            classical_maximal(&f, 0.5, &ladder).unwrap().output,
            classical_maximal(&f.scale(s), 0.5, &ladder).unwrap().output,
        ),
    ];
    for (a, b) in pairs {
        for x in 0..g.len() {
            assert!(rel(s * a.get(x), b.get(x)) <= 1e-12);
        }
    }
}

#[test]
fn constant_function_maximal_scales_with_constant() {
    let g = Grid::new(2, 3).unwrap();
    let ladder = RadiusLadder::standard(g);
    let c = Content::new(g, 2.0, Backend::DyadicExact).unwrap();
    let one = maximal_centered(&GridFunction::constant(g, 1.0), &c, 0.0, &ladder).unwrap().output;
    let five = maximal_centered(&GridFunction::constant(g, 5.0), &c, 0.0, &ladder).unwrap().output;
    for x in 0..g.len() {
        assert!(rel(5.0 * one.get(x), five.get(x)) <= 1e-12);
        // The radius sqrt 2 ball holds the whole cube, of dyadic content 1.
        assert!(one.get(x) >= 0.5 && one.get(x).is_finite());
    }
}

#[test]
fn sharp_is_zero_on_zero_function() {
    let g = Grid::new(1, 3).unwrap();
    let c = Content::new(g, 1.0, Backend::DyadicExact).unwrap();
    let ladder = RadiusLadder::standard(g);
    let s = maximal_sharp(&GridFunction::zeros(g), &c, &ladder, Candidates::default()).unwrap();
    assert!(s.output.is_zero());
}

#[test]
fn riesz_single_far_cell() {
    let g = Grid::new(2, 3).unwrap();
    let c0 = g.index(&[6, 6]);
    let f = GridSet::from_indices(g, [c0]).indicator();
    let (delta, alpha) = (1.5, 0.5);
    let c = Content::new(g, delta, Backend::DyadicExact).unwrap();
    let r = riesz_potential(&f, &c, alpha, None).unwrap().output;
    let x = g.index(&[1, 2]);
    let d = crate::geometry::cell_center_distance(g, x, c0).unwrap();
    let expect = (-3.0 * delta).exp2() * d.powf(alpha - delta);
    assert!(rel(r.get(x), expect) <= 1e-12);
    let cl = classical_riesz(&f, alpha, None).unwrap().output;
    assert!(rel(cl.get(x), g.cell_volume() * d.powf(alpha - 2.0)) <= 1e-12);
    let zero = riesz_potential(&GridFunction::zeros(g), &c, alpha, None).unwrap().output;
    assert!(zero.is_zero());
}

#[test]
fn riesz_layer_cake_oracle() {
    let g = Grid::new(2, 4).unwrap();
    let ball = crate::geometry::Ball::new(vec![0.5, 0.5], 0.25).unwrap();
    let e = discretize_ball(&ball, g, BallMode::Inner).unwrap();
    let (delta, alpha) = (2.0, 1.0);
    let c = Content::new(g, delta, Backend::DyadicExact).unwrap();
    let r = riesz_potential(&e.indicator(), &c, alpha, None).unwrap().output;
    let x = g.index(&[8, 8]);
    let floor = g.cell_width() / 2.0;
    let kernel: Vec<f64> = (0..g.len())
        .map(|y| {
            if e.contains(y) {
                crate::geometry::cell_center_distance(g, x, y).unwrap().max(floor).powf(alpha - delta)
            } else {
                0.0
            }
        })
        .collect();
    let mut ts: Vec<f64> = kernel.iter().copied().filter(|&v| v > 0.0).collect();
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    let mut expect = 0.0;
    let mut prev = 0.0;
    for &t in &ts {
        let sup = GridSet::from_fn(g, |y| kernel[y] >= t);
        expect += (t - prev) * dyadic_value(&sup, delta);
        prev = t;
    }
    assert!(rel(r.get(x), expect) <= 1e-12);
}

#[test]
fn riesz_floor_monotone() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let g = Grid::new(2, 3).unwrap();
    let c = Content::new(g, 1.0, Backend::DyadicExact).unwrap();
    let f = random_fn(&mut rng, g);
    let a = riesz_potential(&f, &c, 0.5, Some(1.0 / 16.0)).unwrap().output;
    let b = riesz_potential(&f, &c, 0.5, Some(1.0 / 4.0)).unwrap().output;
    for x in 0..g.len() {
        assert!(b.get(x) <= a.get(x));
    }
}

#[test]
fn classical_maximal_of_one() {
    let g = Grid::new(2, 4).unwrap();
    let ladder = RadiusLadder::from_radii(g, &[1.0 / 16.0, 1.0 / 8.0]).unwrap();
    let m = classical_maximal(&GridFunction::constant(g, 1.0), 0.0, &ladder).unwrap().output;
    let x = g.index(&[8, 8]);
    // Center-mode ball counts lie between the inner and outer counts.
    assert!((m.get(x) - 1.0).abs() < 0.5);
}

#[test]
fn parameter_ranges() {
    let g = Grid::new(2, 3).unwrap();
    let ladder = RadiusLadder::standard(g);
    let c = Content::new(g, 1.0, Backend::DyadicExact).unwrap();
    let f = GridFunction::zeros(g);
    assert!(maximal_centered(&f, &c, 1.0, &ladder).is_err());
    assert!(riesz_potential(&f, &c, 1.0, None).is_err());
    assert!(riesz_potential(&f, &c, 0.5, Some(0.0)).is_err());
    assert!(classical_riesz(&f, 2.0, None).is_err());
}
