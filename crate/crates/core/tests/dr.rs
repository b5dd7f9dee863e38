use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use drconic::dr::{dr_iterate, dr_step, dr_step_two_lines, step_displacement, twisted_dr_step, DrConfig, Termination};
use drconic::geometry::{ConstraintSet, Ellipse, Line, PSphere, Point2};

fn random_line(rng: &mut ChaCha8Rng) -> Line<f64> {
    let a: f64 = rng.gen_range(0.0..std::f64::consts::PI);
    Line::from_normal(a.cos(), a.sin(), 0.0).unwrap()
}

#[test]
fn two_line_formula_matches_generic_step() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..1000 {
        let (l1, l2) = (random_line(&mut rng), random_line(&mut rng));
        let x = Point2::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
        let generic = dr_step(&l2.into(), &l1.into(), x).unwrap();
        assert!(generic.dist(dr_step_two_lines(&l1, &l2, x)) < 1e-13);
    }
}

#[test]
fn twisted_operator_decouples() {
    // V^n x = u_n + v_n with u_{n+1} = P_M P_N u_n and v_{n+1} = P_{N^perp} P_{M^perp} v_n.
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let (m, n) = (random_line(&mut rng), random_line(&mut rng));
        let x = Point2::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let (mut u, mut v, mut w) = (x, x, x);
        for _ in 0..10 {
            u = m.project(n.project(u));
            v = n.perpendicular().project(m.perpendicular().project(v));
            w = twisted_dr_step(&m, &n, w);
            assert!(w.dist(u + v) < 1e-12);
        }
    }
}

#[test]
fn step_identity_holds_along_orbits() {
    let cases: Vec<(ConstraintSet<f64>, Line<f64>)> = vec![
        (Ellipse::new(2.0).unwrap().into(), Line::from_slope_intercept(2.0, 0.0)),
        (Ellipse::new(5.0).unwrap().into(), Line::from_slope_intercept(0.3, 1.0)),
        (PSphere::new(0.5).unwrap().into(), Line::from_slope_intercept(-1.5, 0.2)),
        (PSphere::new(3.0).unwrap().into(), Line::from_slope_intercept(0.0, 2.5)),
    ];
    for (a, l) in cases {
        let b: ConstraintSet<f64> = l.into();
        let mut x = Point2::new(0.37, -0.81);
        for _ in 0..300 {
            let next = dr_step(&a, &b, x).unwrap();
            let d = step_displacement(&a, &b, x).unwrap();
            assert!((next - x).dist(d) <= 1e-12 * (1.0 + x.norm()));
            x = next;
        }
    }
}

#[test]
fn feasible_points_attract_nearby_orbits() {
    let a: ConstraintSet<f64> = Ellipse::new(2.0).unwrap().into();
    let b = Line::from_slope_intercept(2.0, 0.0).into();
    let o = dr_iterate(&a, &b, Point2::new(0.5, 0.5), &DrConfig::with_max_iter(300)).unwrap();
    assert_eq!(o.terminated, Termination::Converged);
    let s = 0.5f64.sqrt();
    assert!(o.last().dist(Point2::new(s, 2.0 * s)) < 1e-9);
}

#[test]
fn f32_orbit_tracks_f64() {
    let a32: ConstraintSet<f32> = Ellipse::new(2.0f32).unwrap().into();
    let b32 = Line::from_slope_intercept(2.0f32, 0.0).into();
    let a64: ConstraintSet<f64> = Ellipse::new(2.0).unwrap().into();
    let b64 = Line::from_slope_intercept(2.0, 0.0).into();
    let o32 = dr_iterate(&a32, &b32, Point2::new(0.5f32, 0.5), &DrConfig::with_max_iter(200)).unwrap();
    let o64 = dr_iterate(&a64, &b64, Point2::new(0.5, 0.5), &DrConfig::with_max_iter(200)).unwrap();
    assert!(o32.last().to_f64().dist(o64.last()) < 1e-4);
}
