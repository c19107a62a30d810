use cylobst::operators::{average_vertical, inner_cross};
use cylobst::poisson::{energy_phi, solve_reduced};
use cylobst::{
    bathtub_lmo, exact_line_search, frank_wolfe, verify_structure, Density, Error, FwOptions, Grid,
    ReducedField,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Vertices of `{0 <= f <= 1, Σ ω f = m}`: a 0/1 pattern plus at most one fractional node.
fn vertices(w: &[f64], m: f64) -> Vec<Vec<f64>> {
    let n = w.len();
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        let ones: f64 = (0..n).filter(|&i| mask >> i & 1 == 1).map(|i| w[i]).sum();
        if (ones - m).abs() < 1e-13 {
            out.push((0..n).map(|i| f64::from(mask >> i & 1)).collect());
        }
        for k in (0..n).filter(|&i| mask >> i & 1 == 0) {
            let fk = (m - ones) / w[k];
            if fk > 0.0 && fk < 1.0 {
                let mut f: Vec<f64> = (0..n).map(|i| f64::from(mask >> i & 1)).collect();
                f[k] = fk;
                out.push(f);
            }
        }
    }
    out
}

fn dot_w(w: &[f64], a: &[f64], b: &[f64]) -> f64 {
    w.iter().zip(a).zip(b).map(|((w, a), b)| w * a * b).sum()
}

#[test]
fn bathtub_matches_vertex_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in [4usize, 5, 6] {
        let g = Grid::new(1, n, 3).unwrap();
        let w: Vec<f64> = (0..n).map(|c| g.cross_weight(c)).collect();
        for _ in 0..20 {
            let v = ReducedField::from_values(g, (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
            let m = 2.5 * g.h_cross();
            let f = bathtub_lmo(&v, m).unwrap();
            let got = dot_w(&w, f.values(), v.values());
            let verts = vertices(&w, m);
            assert!(!verts.is_empty());
            let best = verts.iter().map(|f| dot_w(&w, f, v.values())).fold(f64::INFINITY, f64::min);
            assert!((got - best).abs() < 1e-13, "{got} vs {best}");
            for vert in &verts {
                assert!(got <= dot_w(&w, vert, v.values()) + 1e-13);
            }
            assert!((f.mass() - m).abs() < 1e-12);
        }
    }
}

/// Φ(f) = fᵀ Q f with `Q_ij = ω_i v_{e_j}(x_i)` built column by column.
fn quadratic_form(g: Grid) -> Vec<Vec<f64>> {
    let n = g.n_columns();
    let mut q = vec![vec![0.0; n]; n];
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        let (u, _) = solve_reduced(&ReducedField::from_values(g, e).unwrap(), 1e-14).unwrap();
        let v = average_vertical(&u);
        for (i, row) in q.iter_mut().enumerate() {
            row[j] = g.cross_weight(i) * v.values()[i];
        }
    }
    q
}

#[test]
fn four_node_objective_matches_brute_force() {
    let g = Grid::new(1, 4, 17).unwrap();
    let w: Vec<f64> = (0..4).map(|c| g.cross_weight(c)).collect();
    let mass = 0.5 * g.cross_measure();
    let q = quadratic_form(g);
    let phi = |f: &[f64; 4]| -> f64 {
        (0..4).map(|i| (0..4).map(|j| f[i] * q[i][j] * f[j]).sum::<f64>()).sum()
    };
    // dense enumeration of f0, f3, f1 with f2 from the mass constraint
    let steps = 400;
    let mut best = f64::INFINITY;
    for a in 0..=steps {
        for b in 0..=steps {
            for c in 0..=steps {
                let (f0, f3, f1) = (a as f64 / steps as f64, b as f64 / steps as f64, c as f64 / steps as f64);
                let f2 = (mass - w[0] * f0 - w[3] * f3 - w[1] * f1) / w[2];
                if (0.0..=1.0).contains(&f2) {
                    best = best.min(phi(&[f0, f1, f2, f3]));
                }
            }
        }
    }
    let sol = frank_wolfe(mass, g, &FwOptions::default()).unwrap();
    assert!(sol.certified);
    assert!((sol.objective - best).abs() <= 1e-6, "{} vs {best}", sol.objective);
}

#[test]
fn half_mass_certifies_with_plateau_structure() {
    let g = Grid::new(1, 64, 33).unwrap();
    let sol = frank_wolfe(0.5, g, &FwOptions::default()).unwrap();
    assert!(sol.certified);
    assert!(sol.iterations <= 500);
    assert!(sol.relative_gap() <= 1e-4);
    assert!(sol.fw_gap >= -1e-12 * sol.objective);
    assert_eq!(sol.alpha, sol.v_hat.max());
    let rep = verify_structure(&sol, 1e-3 * sol.alpha, 1e-3).unwrap();
    assert!(rep.a_pass && rep.b_pass && rep.c_pass && rep.e_pass, "{rep:?}");
    assert!(rep.fractional_measure > 0.0);
    assert!(!rep.saturated);
    assert!(rep.min_f > 0.0);
    // optimality of f̂ against the oracle point
    let target = bathtub_lmo(&sol.v_hat, 0.5).unwrap();
    let diff = inner_cross(target.as_reduced(), &sol.v_hat) - inner_cross(sol.f_hat.as_reduced(), &sol.v_hat);
    assert!(diff >= -1e-4 * sol.objective);
}

#[test]
fn structure_holds_in_two_dimensions() {
    let g = Grid::new(2, 16, 9).unwrap();
    let sol = frank_wolfe(0.4, g, &FwOptions::default()).unwrap();
    assert!(sol.certified);
    let rep = verify_structure(&sol, 1e-3 * sol.alpha, 1e-3).unwrap();
    assert!(rep.all_pass(), "{rep:?}");
}

#[test]
fn perturbed_minimiser_fails_the_checks() {
    let g = Grid::new(1, 64, 33).unwrap();
    let mut sol = frank_wolfe(0.5, g, &FwOptions::default()).unwrap();
    let mut vals = sol.f_hat.values().to_vec();
    // a node next to ∂D sits where v̂ < α, so f̂ = 1 there
    assert_eq!(vals[2], 1.0);
    vals[2] = 0.0;
    sol.f_hat = Density::new(g, vals).unwrap();
    let rep = verify_structure(&sol, 1e-3 * sol.alpha, 1e-3).unwrap();
    assert!(!rep.b_pass || !rep.c_pass);
}

#[test]
fn vanilla_history_is_monotone_and_gaps_bound_suboptimality() {
    let g = Grid::new(1, 24, 13).unwrap();
    let opts = FwOptions {
        gap_tol: 1e-9,
        max_iter: 60,
        polish_every: 0,
        ..FwOptions::default()
    };
    let sol = frank_wolfe(0.45, g, &opts).unwrap();
    let h = &sol.history;
    assert!(h.len() > 2);
    let slack = 1e-9 * sol.objective;
    for pair in h.windows(2) {
        assert!(pair[1].objective <= pair[0].objective + slack);
    }
    let last = h.last().unwrap().objective;
    for e in h {
        assert!(e.gap >= -slack);
        assert!(e.objective - last <= e.gap + slack);
    }
}

#[test]
fn rejects_bad_inputs() {
    let g = Grid::new(1, 8, 5).unwrap();
    assert!(frank_wolfe(0.0, g, &FwOptions::default()).is_err());
    assert!(frank_wolfe(1.5, g, &FwOptions::default()).is_err());
    let opts = FwOptions {
        gap_tol: 0.0,
        ..FwOptions::default()
    };
    assert!(matches!(
        frank_wolfe(0.5, g, &opts),
        Err(Error::InvalidInput { name: "gap_tol", .. })
    ));
}

#[test]
fn single_precision_runs() {
    let g = Grid::new(1, 16, 9).unwrap();
    let opts = FwOptions {
        gap_tol: 1e-3,
        cg_tol: 1e-6,
        ..FwOptions::default()
    };
    let sol = frank_wolfe(0.5f32, g, &opts).unwrap();
    assert!(sol.objective > 0.0);
    assert!(sol.f_hat.values().iter().all(|&x| (0.0..=1.0).contains(&x)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn line_search_is_locally_exact(seed in 0u64..10_000, mass in 0.2f64..0.8) {
        let g = Grid::new(1, 10, 7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // random feasible f: bathtub fill of a random v
        let r = ReducedField::from_values(g, (0..10).map(|_| rng.gen_range(0.0..1.0)).collect()).unwrap();
        let f = bathtub_lmo(&r, mass).unwrap();
        let f = Density::from_reduced(f.as_reduced().combine(0.5, &ReducedField::constant(g, mass), 0.5)).unwrap();
        let (u, _) = solve_reduced(f.as_reduced(), 1e-13).unwrap();
        let target = bathtub_lmo(&average_vertical(&u), mass).unwrap();
        let t: f64 = exact_line_search(&f, &target, 1e-13).unwrap();
        let at = |s: f64| energy_phi(&f.as_reduced().combine(1.0 - s, target.as_reduced(), s)).unwrap();
        let base = at(t);
        for s in [t - 1e-3, t + 1e-3] {
            if (0.0..=1.0).contains(&s) {
                prop_assert!(at(s) >= base - 1e-14);
            }
        }
    }

    #[test]
    fn bathtub_output_is_feasible(seed in 0u64..10_000, frac in 0.01f64..1.0) {
        let g = Grid::new(2, 5, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = ReducedField::from_values(g, (0..25).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
        let m = frac * g.cross_measure();
        let f = bathtub_lmo(&v, m).unwrap();
        prop_assert!((f.mass() - m).abs() <= 1e-12);
        let fractional = f.values().iter().filter(|&&x| x > 0.0 && x < 1.0).count();
        prop_assert!(fractional <= 1);
    }
}
