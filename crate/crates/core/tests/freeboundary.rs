use cylobst::freeboundary::{density_ratio, free_boundary_nodes};
use cylobst::operators::effective_coefficient;
use cylobst::{
    analyze_coincidence, analyze_free_boundary, solve_obstacle, Classification, Error, Field,
    FreeBoundaryOptions, Grid, ObstacleOptions, ObstacleProblem, ReducedField,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ones(g: Grid) -> ReducedField<f64> {
    ReducedField::constant(g, 1.0)
}

#[test]
fn half_plane_is_regular_with_ratio_one_half() {
    let g = Grid::new(2, 128, 3).unwrap();
    let v = ReducedField::from_fn(g, |x| (x[0] - 0.5).max(0.0));
    let rep = analyze_coincidence(&v, &ones(g), 0.0, &FreeBoundaryOptions::for_grid(&g)).unwrap();
    assert!(!rep.nodes.is_empty());
    for n in &rep.nodes {
        // away from the lateral wall the ball is not truncated
        if n.x[1] < 0.1 || n.x[1] > 0.9 {
            continue;
        }
        for &(_, q) in &n.ratios {
            assert!((q - 0.5).abs() <= 0.05, "{q}");
        }
        assert_eq!(n.classification, Classification::Regular);
    }
    assert!(rep.ratios_in_unit_interval());
}

#[test]
fn isolated_node_is_a_singular_candidate() {
    let g = Grid::new(2, 33, 3).unwrap();
    let c = 16 * 33 + 16;
    let mut vals = vec![1.0; g.n_columns()];
    vals[c] = 0.0;
    let v = ReducedField::from_values(g, vals).unwrap();
    let rep = analyze_coincidence(&v, &ones(g), 1e-9, &FreeBoundaryOptions::for_grid(&g)).unwrap();
    assert_eq!(rep.nodes.len(), 1);
    assert_eq!(rep.nodes[0].node, c);
    assert_eq!(rep.nodes[0].classification, Classification::SingularCandidate);
    assert_eq!(rep.singular_candidates, 1);
}

#[test]
fn vanishing_coefficient_is_degenerate() {
    let g = Grid::new(1, 64, 3).unwrap();
    let v = ReducedField::from_fn(g, |x| (x[0] - 0.5).max(0.0));
    let h = ReducedField::constant(g, 0.0);
    let rep = analyze_coincidence(&v, &h, 0.0, &FreeBoundaryOptions::for_grid(&g)).unwrap();
    assert!(rep.nodes.iter().all(|n| n.classification == Classification::Degenerate));
}

#[test]
fn disk_ratio_tends_to_one_half() {
    let disk = |x: &[f64]| {
        let r = ((x[0] - 0.5).powi(2) + (x[1] - 0.5).powi(2)).sqrt();
        (r - 0.3).max(0.0)
    };
    let mut devs = Vec::new();
    for n in [33, 65, 129, 257] {
        let g = Grid::new(2, n, 3).unwrap();
        let v = ReducedField::from_fn(g, disk);
        let mask: Vec<bool> = v.values().iter().map(|&x| x <= 0.0).collect();
        let fb = free_boundary_nodes(&g, &mask);
        assert!(!fb.is_empty());
        let r = 2.0 * g.h_cross();
        let mean = fb.iter().map(|&c| density_ratio(&g, &mask, c, r)).sum::<f64>() / fb.len() as f64;
        devs.push((mean - 0.5).abs());
    }
    for w in devs.windows(2) {
        assert!(w[1] < w[0], "{devs:?}");
    }
    assert!(devs[3] < 0.01, "{devs:?}");
}

#[test]
fn coefficient_matches_quadratic_traces() {
    let g = Grid::new(1, 16, 9).unwrap();
    // u = a + b xn + c xn², so ∂_ν u(·,0) = -b and ∂_ν u(·,1) = b + 2c
    let (a, b, c) = (|x: f64| 0.1 * x, |x: f64| 0.3 * x * x, |x: f64| -0.2 + x);
    let u = Field::from_fn(g, |x, xn| a(x[0]) + b(x[0]) * xn + c(x[0]) * xn * xn);
    let h = effective_coefficient(&u);
    for col in 0..g.n_columns() {
        let x = g.col_coords(col)[0];
        let expect = 1.0 - 2.0 * c(x);
        assert!((h.values()[col] - expect).abs() <= 1e-12);
    }
    let v = ReducedField::from_fn(g, |x| (x[0] - 0.4).max(0.0));
    let rep = analyze_coincidence(&v, &h, 0.0, &FreeBoundaryOptions::for_grid(&g)).unwrap();
    for n in &rep.nodes {
        assert_eq!(n.h, h.values()[n.node]);
    }
}

#[test]
fn solver_output_has_valid_ratios_and_nonnegative_coefficient() {
    let g = Grid::new(1, 64, 33).unwrap();
    let s = solve_obstacle(&ObstacleProblem::constant(g, 0.02).unwrap(), &ObstacleOptions::default()).unwrap();
    let rep = analyze_free_boundary(&s, &FreeBoundaryOptions::for_grid(&g)).unwrap();
    assert!(!rep.nodes.is_empty());
    assert!(rep.ratios_in_unit_interval());
    assert!(rep.min_h >= -1e-6);
    let csv = rep.to_csv(&g);
    assert_eq!(csv.lines().count(), rep.nodes.len() + 1);
}

#[test]
fn rejects_bad_requests() {
    let g = Grid::new(1, 32, 3).unwrap();
    let v = ReducedField::from_fn(g, |x| (x[0] - 0.5).max(0.0));
    let small = FreeBoundaryOptions {
        radii: vec![g.h_cross()],
        ..FreeBoundaryOptions::for_grid(&g)
    };
    assert!(analyze_coincidence(&v, &ones(g), 0.0, &small).is_err());
    let positive = ReducedField::constant(g, 1.0);
    assert!(matches!(
        analyze_coincidence(&positive, &ones(g), 1e-9, &FreeBoundaryOptions::for_grid(&g)),
        Err(Error::NotApplicable(_))
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn ratio_grows_with_the_coincidence_threshold(seed in 0u64..10_000, t1 in 0.0f64..0.5, dt in 0.0f64..0.5) {
        let g = Grid::new(2, 12, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v: Vec<f64> = (0..g.n_columns()).map(|_| rng.gen_range(0.0..1.0)).collect();
        let m1: Vec<bool> = v.iter().map(|&x| x <= t1).collect();
        let m2: Vec<bool> = v.iter().map(|&x| x <= t1 + dt).collect();
        let r = 3.0 * g.h_cross();
        for c in 0..g.n_columns() {
            let (q1, q2) = (density_ratio(&g, &m1, c, r), density_ratio(&g, &m2, c, r));
            prop_assert!((0.0..=1.0).contains(&q1));
            prop_assert!(q2 >= q1 - 1e-15);
        }
    }
}
