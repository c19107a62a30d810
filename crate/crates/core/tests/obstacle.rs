use cylobst::obstacle::{counterexample_search, obstacle_functional, reduced_residual_in};
use cylobst::operators::{average_vertical, second_difference_seminorm};
use cylobst::poisson::solve_reduced;
use cylobst::{
    compare_v, comparison_counterexample, invariants, reduced_residual, second_difference_diagnostic,
    solve_obstacle, solve_obstacle_from, BoundaryData, Error, Field, Grid, ObstacleOptions,
    ObstacleProblem, ReducedField,
};

fn opts() -> ObstacleOptions {
    ObstacleOptions::default()
}

#[test]
fn large_data_reduces_to_the_linear_problem() {
    let g = Grid::new(1, 33, 17).unwrap();
    let (w, _) = solve_reduced(&ReducedField::constant(g, 1.0), 1e-13).unwrap();
    let alpha = 0.5;
    assert!(alpha > average_vertical(&w).max());
    let s = solve_obstacle(&ObstacleProblem::constant(g, alpha).unwrap(), &opts()).unwrap();
    assert!(s.certified);
    assert!(s.coincidence.iter().all(|&b| !b));
    let expect = w.map(|x| alpha - x);
    assert!(s.u.max_diff(&expect) <= 1e-8, "{}", s.u.max_diff(&expect));
    assert!(s.v.min() > 0.0);
}

#[test]
fn small_data_on_the_reference_grid_satisfies_every_invariant() {
    let g = Grid::new(2, 64, 33).unwrap();
    let alpha = 0.01;
    let s = solve_obstacle(&ObstacleProblem::constant(g, alpha).unwrap(), &opts()).unwrap();
    assert!(s.certified);
    assert!(s.coincidence_measure() > 0.0);
    let inv = invariants(&s);
    assert!(inv.holds(1e-6 * alpha, 1e-4), "{inv:?}");
    assert!(inv.min_laplacian < 1.0 - 1e-2, "contact columns have Δu < 1");
}

#[test]
fn two_initialisations_agree() {
    for (d, n, na, alpha) in [(1, 48, 25, 0.02), (2, 20, 11, 0.01)] {
        let g = Grid::new(d, n, na).unwrap();
        let p = ObstacleProblem::constant(g, alpha).unwrap();
        let o = opts();
        let a = solve_obstacle(&p, &o).unwrap();
        let b = solve_obstacle_from(&p, &o, Field::zeros(g)).unwrap();
        assert!(a.certified && b.certified);
        assert!(a.u.max_diff(&b.u) <= 10.0 * o.tol);
    }
}

#[test]
fn fista_alone_certifies_and_agrees_with_the_polished_solve() {
    let g = Grid::new(1, 32, 17).unwrap();
    let p = ObstacleProblem::constant(g, 0.02).unwrap();
    let plain = ObstacleOptions {
        polish_every: 0,
        ..opts()
    };
    let a = solve_obstacle(&p, &plain).unwrap();
    let b = solve_obstacle(&p, &opts()).unwrap();
    assert!(a.certified && !a.polished);
    assert!(a.u.max_diff(&b.u) <= 10.0 * plain.tol);
}

#[test]
fn symmetric_data_gives_midplane_symmetry() {
    let g = Grid::new(1, 40, 21).unwrap();
    let s = solve_obstacle(&ObstacleProblem::constant(g, 0.015).unwrap(), &opts()).unwrap();
    assert!(s.u.max_diff(&s.u.reflect_axial()) <= 10.0 * opts().tol);
}

#[test]
fn best_objective_never_increases() {
    let g = Grid::new(1, 30, 15).unwrap();
    let p = ObstacleProblem::constant(g, 0.02).unwrap();
    let s = solve_obstacle(
        &p,
        &ObstacleOptions {
            polish_every: 0,
            ..opts()
        },
    )
    .unwrap();
    assert!(s.j_history.len() > 2);
    for w in s.j_history.windows(2) {
        assert!(w[1] <= w[0]);
    }
    assert!(s.j_value <= obstacle_functional(&p.initial_guess()));
}

#[test]
fn general_admissible_data() {
    let g = Grid::new(1, 24, 13).unwrap();
    let (b, t) = (0.02, 0.04);
    let bd = BoundaryData::from_fn(g, b, t, |x, xn| ((1.0 - xn) * b + xn * t) * (0.5 + 0.5 * x[0]));
    let s = solve_obstacle(&ObstacleProblem::new(g, bd).unwrap(), &opts()).unwrap();
    assert!(s.certified);
    let inv = invariants(&s);
    assert!(inv.holds(s.tol_v, 1e-4), "{inv:?}");
}

#[test]
fn inadmissible_data_is_rejected() {
    let g = Grid::new(1, 10, 6).unwrap();
    let bd = BoundaryData::from_fn(g, 0.1, 0.1, |_, _| -0.01);
    assert!(matches!(ObstacleProblem::new(g, bd), Err(Error::Admissibility { .. })));
}

#[test]
fn reduced_equation_on_trivial_and_smooth_solutions() {
    let g = Grid::new(1, 12, 8).unwrap();
    let zero = solve_obstacle(&ObstacleProblem::constant(g, 0.0).unwrap(), &opts()).unwrap();
    assert_eq!(reduced_residual(&zero).unwrap(), 0.0);

    let tight = ObstacleOptions { tol: 1e-8, ..opts() };
    let mut res: Vec<(f64, f64)> = Vec::new();
    for n in [9, 17, 33, 65] {
        let g = Grid::new(1, n, n).unwrap();
        let s = solve_obstacle(&ObstacleProblem::constant(g, 1.0).unwrap(), &tight).unwrap();
        res.push((reduced_residual_in(&s, 0.25).unwrap(), reduced_residual(&s).unwrap()));
    }
    for w in res.windows(2) {
        let order = (w[0].0 / w[1].0).log2();
        assert!(order >= 1.8, "interior order {order}");
        // next to ∂D the edge singularities cap the order at one
        assert!(w[1].1 < w[0].1);
    }
}

#[test]
fn reduced_residual_needs_a_certified_solve() {
    let g = Grid::new(1, 20, 11).unwrap();
    let o = ObstacleOptions {
        max_iter: 1,
        polish_every: 0,
        ..opts()
    };
    let s = solve_obstacle(&ObstacleProblem::constant(g, 0.02).unwrap(), &o).unwrap();
    assert!(!s.certified);
    assert!(matches!(reduced_residual(&s), Err(Error::Uncertified(_))));
}

#[test]
fn comparison_for_three_regimes() {
    let g = Grid::new(1, 48, 25).unwrap();
    for (a1, a2) in [(0.25, 0.5), (0.01, 0.3), (0.005, 0.02)] {
        let r = compare_v(a1, a2, g, &opts()).unwrap();
        assert!(r.certified);
        assert!(r.holds(1e-6 * a2), "{r:?}");
    }
    // both linear: v2 - v1 ≡ α2 - α1
    let p1 = solve_obstacle(&ObstacleProblem::constant(g, 0.25f64).unwrap(), &opts()).unwrap();
    let p2 = solve_obstacle(&ObstacleProblem::constant(g, 0.5).unwrap(), &opts()).unwrap();
    for (a, b) in p1.v.values().iter().zip(p2.v.values()) {
        assert!((b - a - 0.25).abs() <= 1e-8);
    }
    let same = compare_v(0.02, 0.02, g, &opts()).unwrap();
    assert_eq!(same.max_v_diff, 0.0);
    assert!(compare_v(0.03, 0.02, g, &opts()).is_err());
}

#[test]
fn counterexample_to_pointwise_comparison() {
    let g = Grid::new(1, 48, 25).unwrap();
    let o = opts();
    let r = counterexample_search::<f64>(g, &o, 0.2, 0.5, 10, 0.5).unwrap();
    assert!(r.certified);
    assert!(r.coincidence_nodes > 0);
    assert!(r.excess > 1e3 * o.tol, "{r:?}");
    assert!(r.max_column_integral_1 <= 1e-6 * r.alpha2);
    assert!(r.max_column_integral_2 <= 1e-6 * r.alpha2);
    assert!(!r.ladder.is_empty());

    assert!(matches!(
        comparison_counterexample(0.4, 0.5, g, &o),
        Err(Error::NotApplicable(_))
    ));
    let same = comparison_counterexample(r.alpha2, r.alpha2, g, &o).unwrap();
    assert!(same.excess <= o.tol);
}

#[test]
fn second_difference_diagnostic_behaviour() {
    let g = Grid::new(1, 33, 17).unwrap();
    let flat = solve_obstacle(&ObstacleProblem::constant(g, 0.0).unwrap(), &opts()).unwrap();
    assert_eq!(second_difference_diagnostic(&flat, 0.25).unwrap(), 0.0);
    assert!(second_difference_diagnostic(&flat, g.h_cross()).is_err());

    // linear regime: same seminorm as the Poisson oracle w
    let (w, _) = solve_reduced(&ReducedField::constant(g, 1.0), 1e-13).unwrap();
    let s = solve_obstacle(&ObstacleProblem::constant(g, 0.5).unwrap(), &opts()).unwrap();
    let a: f64 = second_difference_diagnostic(&s, 0.25).unwrap();
    let b = second_difference_seminorm(&w, 0.25);
    assert!((a - b).abs() <= g.h_cross() * b);

    let mut seq = Vec::new();
    for n in [17, 33, 65] {
        let g = Grid::new(1, n, n.div_ceil(2)).unwrap();
        let s = solve_obstacle(&ObstacleProblem::constant(g, 0.02).unwrap(), &opts()).unwrap();
        seq.push(second_difference_diagnostic(&s, 0.25).unwrap());
    }
    for w in seq.windows(2) {
        assert!(w[1] <= 1.1 * w[0], "{seq:?}");
    }
}

#[test]
fn single_precision_solve() {
    let g = Grid::new(1, 16, 9).unwrap();
    let p = ObstacleProblem::constant(g, 0.02f32).unwrap();
    let s = solve_obstacle(
        &p,
        &ObstacleOptions {
            tol: 1e-3,
            ..opts()
        },
    )
    .unwrap();
    assert!(s.v.values().iter().all(|&x| x >= -1e-5));
}
