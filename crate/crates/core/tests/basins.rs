use drconic::basins::*;
use drconic::dr::dr_power;
use drconic::geometry::{ConstraintSet, Ellipse, Line, PSphere, Point2};

fn pair(b: f64, m: f64) -> (ConstraintSet<f64>, ConstraintSet<f64>) {
    (Ellipse::new(b).unwrap().into(), Line::from_slope_intercept(m, 0.0).into())
}

#[test]
fn ppm_examples() {
    let region = Region::square(1.0).unwrap();
    let g = BasinGrid { width: 1, height: 1, region, labels: vec![0], iterations_used: 1 };
    assert_eq!(encode_ppm(&g, &[[0, 0, 0]]).unwrap(), b"P6\n1 1\n255\n\x00\x00\x00".to_vec());
    let g = BasinGrid { width: 2, height: 1, region, labels: vec![1, 2], iterations_used: 1 };
    let bytes = encode_ppm(&g, &[[0, 0, 0], [255, 0, 0], [0, 255, 0]]).unwrap();
    assert_eq!(&bytes[bytes.len() - 6..], &[0xFF, 0, 0, 0, 0xFF, 0]);
    assert_eq!(
        encode_ppm(&g, &[[0, 0, 0], [255, 0, 0]]),
        Err(BasinError::PaletteTooSmall { need: 2, have: 2 })
    );
}

#[test]
fn table_examples() {
    let (a, b) = pair(2.0, 2.0);
    let t = build_attractor_table(&a, &b, &Region::square(4.0).unwrap(), 2).unwrap();
    let kinds: Vec<_> = t.entries.iter().map(|e| e.kind).collect();
    assert_eq!(
        kinds,
        vec![
            AttractorKind::Feasible,
            AttractorKind::Feasible,
            AttractorKind::Periodic { period: 2 },
            AttractorKind::Periodic { period: 2 }
        ]
    );
    assert_eq!(t.entries.iter().map(|e| e.label).collect::<Vec<_>>(), vec![1, 2, 3, 4]);

    let c: ConstraintSet<f64> = PSphere::new(2.0).unwrap().into();
    let x: ConstraintSet<f64> = Line::x_axis().into();
    let t = build_attractor_table(&c, &x, &Region::square(2.0).unwrap(), 3).unwrap();
    assert_eq!(t.entries.len(), 2);
    assert!(t.entries.iter().all(|e| e.kind == AttractorKind::Feasible));

    let far: ConstraintSet<f64> = Line::from_slope_intercept(0.0, 3.0).into();
    assert_eq!(
        build_attractor_table(&c, &far, &Region::square(2.0).unwrap(), 2),
        Err(BasinError::EmptyTable)
    );
}

#[test]
fn single_pixel_on_feasible_point() {
    let (a, b) = pair(2.0, 2.0);
    let s = 0.5f64.sqrt();
    let f = Point2::new(s, 2.0 * s);
    let t = build_attractor_table(&a, &b, &Region::square(4.0).unwrap(), 1).unwrap();
    let r = Region::new(f.x - 0.01, f.x + 0.01, f.y - 0.01, f.y + 0.01).unwrap();
    let g = render_basins(&a, &b, &t, &r, 1, 1, 1000, 1e-3).unwrap();
    let label = g.labels[0];
    assert!(t.entry(label).unwrap().point.dist(f) < 1e-12);
}

fn e2_l1() -> (ConstraintSet<f64>, ConstraintSet<f64>, AttractorTable<f64>, BasinGrid<f64>) {
    let (a, b) = pair(2.0, 1.0);
    let region = Region::square(3.0).unwrap();
    let t = build_attractor_table(&a, &b, &region, 3).unwrap();
    let g = render_basins(&a, &b, &t, &region, 64, 64, 1000, 1e-3).unwrap();
    (a, b, t, g)
}

#[test]
fn e2_l1_histogram_has_period_two() {
    let (_, _, t, g) = e2_l1();
    let h = g.histogram();
    for e in &t.entries {
        if e.kind == AttractorKind::Feasible {
            assert!(h[e.label as usize] > 0);
        }
    }
    assert!(t
        .entries
        .iter()
        .any(|e| e.kind == AttractorKind::Periodic { period: 2 } && h[e.label as usize] > 0));
}

#[test]
fn point_symmetric_labels() {
    let (_, _, t, g) = e2_l1();
    // The label of -x is the label of the entry at minus the point of x's entry.
    let flip = |l: u16| -> u16 {
        if l == 0 {
            return 0;
        }
        let p = t.entry(l).unwrap().point;
        t.entries.iter().find(|e| e.point.dist(-p) < 1e-6).unwrap().label
    };
    let n = g.width * g.height;
    let mismatches = (0..n).filter(|&k| g.labels[n - 1 - k] != flip(g.labels[k])).count();
    assert_eq!(mismatches, 0);
}

#[test]
fn labels_are_stable_under_more_iterations() {
    let (a, b, t, g) = e2_l1();
    let opts = RenderOptions::<f64>::default();
    let longer = RenderOptions { iters: 1200, ..opts };
    let mut sampled = 0;
    for k in (0..g.labels.len()).step_by(37) {
        let l = g.labels[k];
        if l == 0 {
            continue;
        }
        sampled += 1;
        let x0 = g.region.cell_midpoint(k % g.width, k / g.width, g.width, g.height);
        let e = t.entry(l).unwrap();
        // Same orbit after 200 more steps, possibly at another phase.
        let later = dr_power(&a, &b, x0, 1200).unwrap();
        assert!(e.orbit.iter().any(|p| p.dist(later) <= 2.0 * opts.match_tol));
        let l2 = classify_start(&a, &b, &t, x0, &longer);
        assert!(t.entry(l2).unwrap().orbit.iter().any(|p| p.dist(e.point) < 1e-6));
    }
    assert!(sampled >= 100);
}

#[test]
fn dump_round_trips_through_json() {
    let (a, b) = pair(2.0, 2.0);
    let region = Region::square(4.0).unwrap();
    let t = build_attractor_table(&a, &b, &region, 2).unwrap();
    let g = render_basins(&a, &b, &t, &region, 8, 8, 100, 1e-3).unwrap();
    let dump = BasinDump::new(&g, &t, 1e-3);
    let text = drconic::params::json::to_string(&dump).unwrap();
    assert!(text.contains("\"schema\":1"));
    assert!(text.contains("\"kind\":\"periodic\",\"period\":2"));
    let back: BasinDump<f64> = serde_json::from_str(&text).unwrap();
    assert_eq!(back, dump);
}

#[test]
fn rejects_bad_parameters() {
    let (a, b) = pair(2.0, 2.0);
    let region = Region::square(4.0).unwrap();
    let t = AttractorTable::default();
    assert!(render_basins(&a, &b, &t, &region, 0, 4, 10, 1e-3).is_err());
    assert!(render_basins(&a, &b, &t, &region, 4, 4, 0, 1e-3).is_err());
    assert!(render_basins(&a, &b, &t, &region, 4, 4, 10, 0.0).is_err());
    let g = render_basins(&a, &b, &t, &region, 4, 4, 10, 1e-3).unwrap();
    assert!(g.labels.iter().all(|&l| l == 0));
}
