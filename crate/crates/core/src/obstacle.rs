//! Obstacle problem for the vertical average:
//! minimise `J(u) = ∫_Ω |∇u|² + 2 ∫_D v⁺` with `v(x') = ∫_0^1 u(x', xn) dxn`
//! over `u = g` on `∂Ω`.
//!
//! The discrete functional is `J_h(u) = dirichlet_energy(u) + 2 Σ_c ω_c max(0, v_c)`.
//! It is minimised by FISTA with adaptive restart: the smooth part has
//! gradient `-2 |cell| Δ_h u`, and the nonsmooth part is separable over
//! columns after the affine map `u_col -> v_c`, so its prox is exact.
//! Every few hundred iterations a primal-dual active-set step solves the
//! optimality system with the column classification frozen; its output is
//! kept only if it lowers `J_h` and certifies.

use serde::{Deserialize, Serialize};

use crate::cg::conjugate_gradient;
use crate::error::{Error, Result};
use crate::grid::{BoundaryData, Field, Grid, ReducedField};
use crate::operators::{
    average_vertical, dirichlet_energy, effective_coefficient, lateral_laplacian, neg_laplacian,
    second_difference_seminorm,
};
use crate::poisson::SolveReport;
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct ObstacleProblem<T> {
    grid: Grid,
    boundary: BoundaryData<T>,
}

impl<T: Real> ObstacleProblem<T> {
    /// Rejects lateral data violating `0 <= g <= (1 - xn) g(x', 0) + xn g(x', 1)`.
    pub fn new(grid: Grid, boundary: BoundaryData<T>) -> Result<Self> {
        boundary.check_admissible(&grid)?;
        Ok(Self { grid, boundary })
    }

    /// `g ≡ alpha`, `alpha >= 0`.
    pub fn constant(grid: Grid, alpha: T) -> Result<Self> {
        if !(alpha >= T::zero()) || !alpha.is_finite() {
            return Err(Error::input("alpha", format!("must be finite and >= 0, got {alpha}")));
        }
        Self::new(grid, BoundaryData::constant(grid, alpha))
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn boundary(&self) -> &BoundaryData<T> {
        &self.boundary
    }

    /// `max |g|`; equals `α` for constant data.
    pub fn scale(&self) -> T {
        self.boundary.max_abs()
    }

    /// Default coincidence tolerance `1e-6 * max(scale, 1)`.
    pub fn default_tol_v(&self) -> f64 {
        1e-6 * self.scale().as_f64().max(1.0)
    }

    /// Affine-in-`xn` initial guess with the boundary data applied.
    pub fn initial_guess(&self) -> Field<T> {
        self.boundary.affine_lift(self.grid)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObstacleOptions {
    /// Bound on the optimality residual and on the relative change of `J_h`.
    pub tol: f64,
    pub max_iter: usize,
    /// Coincidence tolerance; `None` uses [`ObstacleProblem::default_tol_v`].
    pub tol_v: Option<f64>,
    /// Active-set polish period in FISTA iterations; 0 disables it.
    pub polish_every: usize,
}

impl Default for ObstacleOptions {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            max_iter: 20_000,
            tol_v: None,
            polish_every: 100,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct ObstacleSolution<T> {
    pub u: Field<T>,
    pub v: ReducedField<T>,
    /// Mean of `Δ_h u` over the interior nodes of each column; 0 on `∂D`.
    pub laplacian_u: ReducedField<T>,
    /// `v <= tol_v`, interior columns only.
    pub coincidence: Vec<bool>,
    pub tol_v: f64,
    pub j_value: T,
    /// `residual_rel` holds the optimality residual.
    pub report: SolveReport,
    /// Largest `max_j - min_j` of interior `Δ_h u` over interior columns.
    pub axial_variation: f64,
    pub polished: bool,
    pub certified: bool,
    /// Best-so-far `J_h`, starting at the initial guess and sampled at every check.
    pub j_history: Vec<f64>,
    /// `max |g|`.
    pub scale: f64,
}

/// JSON summary of a solve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObstacleSummary {
    pub alpha: f64,
    #[serde(rename = "J")]
    pub j: f64,
    pub iterations: usize,
    pub optimality_residual: f64,
    pub coincidence_measure: f64,
    pub max_lap_axial_variation: f64,
    pub certified: bool,
}

impl<T: Real> ObstacleSolution<T> {
    pub fn grid(&self) -> Grid {
        self.u.grid()
    }

    /// Quadrature measure of the coincidence set.
    pub fn coincidence_measure(&self) -> f64 {
        let g = self.grid();
        self.coincidence
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .fold(0.0, |acc, (c, _)| acc + g.cross_weight(c))
    }

    pub fn summary(&self) -> ObstacleSummary {
        ObstacleSummary {
            alpha: self.scale,
            j: self.j_value.as_f64(),
            iterations: self.report.iterations,
            optimality_residual: self.report.residual_rel,
            coincidence_measure: self.coincidence_measure(),
            max_lap_axial_variation: self.axial_variation,
            certified: self.certified,
        }
    }
}

/// `J_h(u)`, with the quadrature of `v⁺` taken over all of `D`.
pub fn obstacle_functional<T: Real>(u: &Field<T>) -> T {
    let g = u.grid();
    let v = average_vertical(u);
    let pen: T = v
        .values()
        .iter()
        .enumerate()
        .map(|(c, &x)| T::lit(g.cross_weight(c)) * x.max(T::zero()))
        .sum();
    dirichlet_energy(u) + T::lit(2.0) * pen
}

/// Column means and axial spread of `Δ_h u` over interior rows.
fn column_laplacian<T: Real>(u: &Field<T>) -> (ReducedField<T>, Vec<T>) {
    let g = u.grid();
    let n = g.n_axial();
    let mut lap = vec![T::zero(); g.n_nodes()];
    neg_laplacian(&g, u.values(), &mut lap);
    let inv = T::lit(1.0 / (n - 2) as f64);
    let mut mean = vec![T::zero(); g.n_columns()];
    let mut spread = vec![T::zero(); g.n_columns()];
    for c in g.interior_columns() {
        let col = &lap[c * n + 1..c * n + n - 1];
        let (mut lo, mut hi, mut s) = (T::infinity(), T::neg_infinity(), T::zero());
        for &x in col {
            let x = -x;
            lo = lo.min(x);
            hi = hi.max(x);
            s += x;
        }
        mean[c] = s * inv;
        spread[c] = hi - lo;
    }
    (
        ReducedField::from_values(g, mean).expect("finite"),
        spread,
    )
}

/// Distance of the column Laplacian to `[χ_{v > tol_v}, χ_{v >= -tol_v}]`,
/// maximised over interior columns, and the largest axial spread.
fn optimality_residual<T: Real>(u: &Field<T>, tol_v: f64) -> (f64, f64, ReducedField<T>, ReducedField<T>) {
    let g = u.grid();
    let v = average_vertical(u);
    let (lap, spread) = column_laplacian(u);
    let mut dist = 0.0f64;
    let mut var = 0.0f64;
    for c in g.interior_columns() {
        let vc = v.values()[c].as_f64();
        let lo = if vc > tol_v { 1.0 } else { 0.0 };
        let hi = if vc >= -tol_v { 1.0 } else { 0.0 };
        let l = lap.values()[c].as_f64();
        dist = dist.max((lo - l).max(l - hi).max(0.0));
        var = var.max(spread[c].as_f64());
    }
    (dist, var, v, lap)
}

struct Prox<T> {
    grid: Grid,
    /// `1 / λ_max(-Δ_h)`: gradient step in node units.
    inv_lmax: T,
    /// prox threshold on `s = v_c`.
    theta: T,
    /// `‖a‖²`, `a_j = h_axial` on interior rows.
    a_norm2: T,
    h_ax: T,
}

impl<T: Real> Prox<T> {
    fn new(grid: Grid) -> Self {
        let lmax_1d = |n: usize, h: f64| {
            let s = ((n - 2) as f64 * std::f64::consts::PI / (2.0 * (n - 1) as f64)).sin();
            4.0 / (h * h) * s * s
        };
        let lmax = grid.d_cross() as f64 * lmax_1d(grid.n_cross(), grid.h_cross())
            + lmax_1d(grid.n_axial(), grid.h_axial());
        let ha = grid.h_axial();
        let a_norm2 = (grid.n_axial() - 2) as f64 * ha * ha;
        // t = 1 / (2 |cell| λ_max), κ = 2 h^d, threshold t κ ‖a‖²
        let theta = (grid.n_axial() - 2) as f64 * ha / lmax;
        Self {
            grid,
            inv_lmax: T::lit(1.0 / lmax),
            theta: T::lit(theta),
            a_norm2: T::lit(a_norm2),
            h_ax: T::lit(ha),
        }
    }

    /// `x = prox(y - t ∇E(y))` on interior nodes; boundary copied from `y`.
    fn step(&self, y: &[T], x: &mut [T], scratch: &mut [T]) {
        let g = self.grid;
        let n = g.n_axial();
        neg_laplacian(&g, y, scratch);
        for k in 0..y.len() {
            x[k] = y[k] - self.inv_lmax * scratch[k];
        }
        let half = T::lit(0.5) * self.h_ax;
        for c in g.interior_columns() {
            let col = &mut x[c * n..(c + 1) * n];
            let s = half * (col[0] + col[n - 1])
                + self.h_ax * col[1..n - 1].iter().copied().sum::<T>();
            let s_new = if s > self.theta {
                s - self.theta
            } else if s >= T::zero() {
                T::zero()
            } else {
                s
            };
            if s_new != s {
                let shift = self.h_ax * (s_new - s) / self.a_norm2;
                col[1..n - 1].iter_mut().for_each(|z| *z += shift);
            }
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Class {
    /// `Δ_h u = 1`, `v` free.
    Plus,
    /// `v = 0`, `Δ_h u` a free constant along the column.
    Contact,
    /// `Δ_h u = 0`, `v` free.
    Zero,
}

/// Primal-dual active-set iteration from the classification of `u`.
///
/// With the classes frozen, minimises the quadratic model by CG projected onto
/// `{v_c = 0 : c ∈ Contact}`; the projection subtracts the column mean over
/// interior rows. Returns `None` if the classification does not settle.
fn polish<T: Real>(u: &Field<T>, tol_v: f64, cg_tol: T) -> Option<Field<T>> {
    let g = u.grid();
    let n = g.n_axial();
    let ha = T::lit(g.h_axial());
    let v0 = average_vertical(u);
    let mut class: Vec<Option<Class>> = (0..g.n_columns())
        .map(|c| {
            if g.is_lateral(c) {
                None
            } else if v0.values()[c].as_f64() > tol_v {
                Some(Class::Plus)
            } else {
                Some(Class::Contact)
            }
        })
        .collect();
    let interior_rows = T::lit((n - 2) as f64);
    let mut u = u.clone();
    let cap = 4000.min(10 * g.n_nodes());

    for _ in 0..50 {
        let vals = u.values_mut();
        let v = {
            let mut out = vec![T::zero(); g.n_columns()];
            for c in g.interior_columns() {
                let col = &vals[c * n..(c + 1) * n];
                out[c] = ha * (T::lit(0.5) * (col[0] + col[n - 1]) + col[1..n - 1].iter().copied().sum::<T>());
            }
            out
        };
        // move onto the constraint set
        for c in g.interior_columns() {
            if class[c] == Some(Class::Contact) {
                let shift = v[c] / (ha * interior_rows);
                vals[c * n + 1..c * n + n - 1].iter_mut().for_each(|z| *z -= shift);
            }
        }
        let project = |x: &mut [T]| {
            for c in g.interior_columns() {
                if class[c] == Some(Class::Contact) {
                    let col = &mut x[c * n + 1..c * n + n - 1];
                    let m = col.iter().copied().sum::<T>() / interior_rows;
                    col.iter_mut().for_each(|z| *z -= m);
                }
            }
        };
        let mut b = vec![T::zero(); g.n_nodes()];
        neg_laplacian(&g, vals, &mut b);
        for c in g.interior_columns() {
            let r = if class[c] == Some(Class::Plus) { -T::one() } else { T::zero() };
            for k in c * n + 1..c * n + n - 1 {
                b[k] = r - b[k];
            }
        }
        let mut e = vec![T::zero(); g.n_nodes()];
        let out = conjugate_gradient(|p, q| neg_laplacian(&g, p, q), project, &b, &mut e, cg_tol, cap);
        if !out.converged {
            return None;
        }
        for (x, d) in vals.iter_mut().zip(&e) {
            *x += *d;
        }

        let v = average_vertical(&u);
        let (lap, _) = column_laplacian(&u);
        let margin = 1e-13 * v.max_abs().as_f64().max(1e-300);
        let mut next = class.clone();
        for c in g.interior_columns() {
            let vc = v.values()[c].as_f64();
            let sc = lap.values()[c].as_f64();
            next[c] = Some(match class[c].expect("interior") {
                Class::Plus if vc < -margin => Class::Contact,
                Class::Zero if vc > margin => Class::Contact,
                Class::Contact if sc > 1.0 => Class::Plus,
                Class::Contact if sc < 0.0 => Class::Zero,
                other => other,
            });
        }
        if next == class {
            return Some(u);
        }
        class = next;
    }
    None
}

/// [`solve_obstacle_from`] starting at the affine initial guess.
pub fn solve_obstacle<T: Real>(p: &ObstacleProblem<T>, opts: &ObstacleOptions) -> Result<ObstacleSolution<T>> {
    solve_obstacle_from(p, opts, p.initial_guess())
}

/// Minimises `J_h` from `init` (its boundary values are overwritten).
///
/// Stops when the optimality residual (distance of the column Laplacian to
/// its admissible interval, together with the axial spread of `Δ_h u`) and the
/// relative change of `J_h` between checks are both at most `tol`. Hitting
/// `max_iter` returns the lowest-`J_h` iterate with `certified = false`.
pub fn solve_obstacle_from<T: Real>(
    p: &ObstacleProblem<T>,
    opts: &ObstacleOptions,
    init: Field<T>,
) -> Result<ObstacleSolution<T>> {
    if !(opts.tol > 0.0) {
        return Err(Error::input("tol", "must be positive"));
    }
    let g = p.grid;
    if init.grid() != g {
        return Err(Error::input("init", "grid differs from the problem grid"));
    }
    let tol_v = opts.tol_v.unwrap_or_else(|| p.default_tol_v());
    if !(tol_v > 0.0) {
        return Err(Error::input("tol_v", "must be positive"));
    }
    let tol = opts.tol;
    let cg_tol = T::lit(1e-11).max(T::epsilon() * T::lit(64.0));
    let prox = Prox::new(g);

    let mut x = init;
    p.boundary.apply(&mut x);
    let mut x_prev = x.clone();
    let mut y = x.clone();
    let mut next = x.clone();
    let mut scratch = vec![T::zero(); g.n_nodes()];
    let mut theta = T::one();

    let mut best = x.clone();
    let mut best_j = obstacle_functional(&x);
    let mut last_j = best_j;
    let mut j_history = vec![best_j.as_f64()];
    let mut polished = false;
    let mut iterations = 0;
    let check_every = 10;
    let mut done = false;

    let certify = |u: &Field<T>| -> f64 {
        let (d, var, _, _) = optimality_residual(u, tol_v);
        d.max(var)
    };
    if certify(&x) <= tol {
        done = true;
    }

    while !done && iterations < opts.max_iter {
        iterations += 1;
        prox.step(y.values(), next.values_mut(), &mut scratch);
        // gradient restart
        let mut restart_dot = T::zero();
        for k in 0..scratch.len() {
            restart_dot += (y.values()[k] - next.values()[k]) * (next.values()[k] - x.values()[k]);
        }
        std::mem::swap(&mut x_prev, &mut x);
        std::mem::swap(&mut x, &mut next);
        if restart_dot > T::zero() {
            theta = T::one();
            y.values_mut().copy_from_slice(x.values());
        } else {
            let theta_next = (T::one() + (T::one() + T::lit(4.0) * theta * theta).sqrt()) / T::lit(2.0);
            let beta = (theta - T::one()) / theta_next;
            theta = theta_next;
            let (xv, pv) = (x.values(), x_prev.values());
            for (k, yk) in y.values_mut().iter_mut().enumerate() {
                *yk = xv[k] + beta * (xv[k] - pv[k]);
            }
        }

        if iterations % check_every == 0 {
            let j = obstacle_functional(&x);
            if j < best_j {
                best_j = j;
                best = x.clone();
            }
            j_history.push(best_j.min(j).as_f64());
            let rel = ((last_j - j).abs() / j.abs().max(T::lit(1e-300))).as_f64();
            last_j = j;
            if rel <= tol && certify(&x) <= tol {
                best_j = j;
                best = x.clone();
                done = true;
                break;
            }
        }

        if opts.polish_every > 0 && iterations % opts.polish_every == 0 {
            if let Some(cand) = polish(&best, tol_v, cg_tol) {
                let j = obstacle_functional(&cand);
                let slack = T::lit(1e-12) * best_j.abs().max(T::one());
                if j <= best_j + slack && certify(&cand) <= tol {
                    best = cand;
                    best_j = j;
                    j_history.push(j.as_f64());
                    polished = true;
                    done = true;
                }
            }
        }
    }

    let u = if done || obstacle_functional(&x) > best_j { best } else { x };
    let j_value = obstacle_functional(&u);
    let (dist, var, v, laplacian_u) = optimality_residual(&u, tol_v);
    let residual = dist.max(var);
    let certified = residual <= tol;
    let coincidence = (0..g.n_columns())
        .map(|c| !g.is_lateral(c) && v.values()[c].as_f64() <= tol_v)
        .collect();
    Ok(ObstacleSolution {
        u,
        v,
        laplacian_u,
        coincidence,
        tol_v,
        j_value,
        report: SolveReport {
            iterations,
            residual_rel: residual,
            tolerance: tol,
            wall_notes: if polished {
                "accelerated proximal gradient with active-set polish".into()
            } else {
                "accelerated proximal gradient".into()
            },
        },
        axial_variation: var,
        polished,
        certified,
        j_history,
        scale: p.scale().as_f64(),
    })
}

/// Checked properties of a solve; all `f64` for reporting.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub min_v: f64,
    pub min_laplacian: f64,
    pub max_laplacian: f64,
    /// Smallest column Laplacian on `{v > tol_v}` (1 if the set is empty).
    pub min_laplacian_positive_set: f64,
    pub axial_variation: f64,
    /// `max |v - average_vertical(u)|`.
    pub averaging_defect: f64,
}

impl InvariantReport {
    /// `v >= -tol_v`, `Δ` in `[-tol_l, 1 + tol_l]`, `Δ >= 1 - tol_l` on `{v > tol_v}`,
    /// axial spread `<= tol_l`.
    pub fn holds(&self, tol_v: f64, tol_l: f64) -> bool {
        self.min_v >= -tol_v
            && self.min_laplacian >= -tol_l
            && self.max_laplacian <= 1.0 + tol_l
            && self.min_laplacian_positive_set >= 1.0 - tol_l
            && self.axial_variation <= tol_l
            && self.averaging_defect == 0.0
    }
}

/// Invariants over interior columns.
pub fn invariants<T: Real>(sol: &ObstacleSolution<T>) -> InvariantReport {
    let g = sol.grid();
    let avg = average_vertical(&sol.u);
    let mut r = InvariantReport {
        min_v: f64::INFINITY,
        min_laplacian: f64::INFINITY,
        max_laplacian: f64::NEG_INFINITY,
        min_laplacian_positive_set: 1.0,
        axial_variation: sol.axial_variation,
        averaging_defect: sol.v.max_diff(&avg).as_f64(),
    };
    for c in g.interior_columns() {
        let v = sol.v.values()[c].as_f64();
        let l = sol.laplacian_u.values()[c].as_f64();
        r.min_v = r.min_v.min(v);
        r.min_laplacian = r.min_laplacian.min(l);
        r.max_laplacian = r.max_laplacian.max(l);
        if v > sol.tol_v {
            r.min_laplacian_positive_set = r.min_laplacian_positive_set.min(l);
        }
    }
    r
}

/// `max |Δ'_h v - χ_{v > tol_v} h|` over interior columns whose cross-section
/// neighbours all lie on the same side of the free boundary.
pub fn reduced_residual<T: Real>(sol: &ObstacleSolution<T>) -> Result<T> {
    reduced_residual_in(sol, 0.0)
}

/// [`reduced_residual`] restricted to `{dist(x', ∂D) >= margin}`.
///
/// Next to `∂D` the residual is only first order: the solution has edge
/// singularities where the lateral wall meets the bottom and top faces.
pub fn reduced_residual_in<T: Real>(sol: &ObstacleSolution<T>, margin: f64) -> Result<T> {
    if !sol.certified {
        return Err(Error::Uncertified("obstacle solve did not certify".into()));
    }
    let g = sol.grid();
    let h = effective_coefficient(&sol.u);
    let lap_v = lateral_laplacian(&sol.v);
    let tol_v = T::lit(sol.tol_v);
    let positive = |c: usize| sol.v.values()[c] > tol_v;
    let mut res = T::zero();
    let d = g.d_cross();
    for c in g.interior_columns() {
        let x = g.col_coords(c);
        if x[..d].iter().any(|&xi| xi.min(1.0 - xi) < margin - 1e-12) {
            continue;
        }
        let side = positive(c);
        if g.col_neighbors(c).into_iter().any(|nb| positive(nb) != side) {
            continue;
        }
        let target = if side { h.values()[c] } else { T::zero() };
        res = res.max((lap_v.values()[c] - target).abs());
    }
    Ok(res)
}

/// Discrete `W^{2,2}` seminorm of `u` on `{dist(x', ∂D) >= margin} x [0, 1]`.
pub fn second_difference_diagnostic<T: Real>(sol: &ObstacleSolution<T>, margin: f64) -> Result<T> {
    let h = sol.grid().h_cross();
    if margin < 2.0 * h - 1e-12 {
        return Err(Error::input(
            "margin",
            format!("must be at least two cells ({}), got {margin}", 2.0 * h),
        ));
    }
    Ok(second_difference_seminorm(&sol.u, margin))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub alpha1: f64,
    pub alpha2: f64,
    /// `max_D (v1 - v2)`.
    pub max_v_diff: f64,
    /// Nodes of `{v2 <= tol_v} \ {v1 <= tol_v}`.
    pub nesting_defect: usize,
    /// Defect nodes with no cross-section neighbour in `{v1 <= tol_v}`.
    pub nesting_defect_outside_band: usize,
    pub coincidence1: usize,
    pub coincidence2: usize,
    pub tol_v: f64,
    pub certified: bool,
}

impl ComparisonReport {
    /// `max (v1 - v2) <= tol` and no defect beyond one band cell.
    pub fn holds(&self, tol: f64) -> bool {
        self.max_v_diff <= tol && self.nesting_defect_outside_band == 0
    }
}

/// Solves the two constant-data problems. Both use the coincidence
/// tolerance of `alpha2`.
pub fn solve_pair<T: Real>(
    alpha1: T,
    alpha2: T,
    grid: Grid,
    opts: &ObstacleOptions,
) -> Result<(ObstacleSolution<T>, ObstacleSolution<T>)> {
    if !(alpha1 > T::zero()) || !(alpha1 <= alpha2) {
        return Err(Error::input(
            "alpha1",
            format!("need 0 < alpha1 <= alpha2, got {alpha1} and {alpha2}"),
        ));
    }
    let p2 = ObstacleProblem::constant(grid, alpha2)?;
    let p1 = ObstacleProblem::constant(grid, alpha1)?;
    let opts = ObstacleOptions {
        tol_v: Some(opts.tol_v.unwrap_or_else(|| p2.default_tol_v())),
        ..*opts
    };
    let s1 = solve_obstacle(&p1, &opts)?;
    let s2 = solve_obstacle(&p2, &opts)?;
    Ok((s1, s2))
}

pub fn compare_v<T: Real>(alpha1: T, alpha2: T, grid: Grid, opts: &ObstacleOptions) -> Result<ComparisonReport> {
    let (s1, s2) = solve_pair(alpha1, alpha2, grid, opts)?;
    Ok(comparison_of(&s1, &s2, alpha1.as_f64(), alpha2.as_f64()))
}

pub fn comparison_of<T: Real>(s1: &ObstacleSolution<T>, s2: &ObstacleSolution<T>, alpha1: f64, alpha2: f64) -> ComparisonReport {
    let g = s1.grid();
    let max_v_diff = s1
        .v
        .values()
        .iter()
        .zip(s2.v.values())
        .fold(f64::NEG_INFINITY, |m, (&a, &b)| m.max((a - b).as_f64()));
    let mut defect = 0;
    let mut outside = 0;
    for c in g.interior_columns() {
        if s2.coincidence[c] && !s1.coincidence[c] {
            defect += 1;
            if !g.col_neighbors(c).into_iter().any(|nb| s1.coincidence[nb]) {
                outside += 1;
            }
        }
    }
    ComparisonReport {
        alpha1,
        alpha2,
        max_v_diff,
        nesting_defect: defect,
        nesting_defect_outside_band: outside,
        coincidence1: s1.coincidence.iter().filter(|&&b| b).count(),
        coincidence2: s2.coincidence.iter().filter(|&&b| b).count(),
        tol_v: s2.tol_v,
        certified: s1.certified && s2.certified,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleReport {
    pub alpha1: f64,
    pub alpha2: f64,
    /// `max (u1 - u2)` over `{v2 <= tol_v} x [0, 1]`.
    pub excess: f64,
    pub argmax_column: usize,
    pub argmax_row: usize,
    pub argmax_x: Vec<f64>,
    pub argmax_xn: f64,
    /// `max |v_i|` over the coincidence columns of `v2`.
    pub max_column_integral_1: f64,
    pub max_column_integral_2: f64,
    pub coincidence_nodes: usize,
    pub solver_tol: f64,
    pub certified: bool,
    /// `alpha2` values tried before this one (search only).
    pub ladder: Vec<f64>,
}

/// Evaluates `max (u1 - u2)` on the coincidence set of `v2`.
///
/// An empty coincidence set gives [`Error::NotApplicable`].
pub fn comparison_counterexample<T: Real>(
    alpha1: T,
    alpha2: T,
    grid: Grid,
    opts: &ObstacleOptions,
) -> Result<CounterexampleReport> {
    let (s1, s2) = solve_pair(alpha1, alpha2, grid, opts)?;
    counterexample_of(&s1, &s2, alpha1.as_f64(), alpha2.as_f64(), opts.tol)
}

fn counterexample_of<T: Real>(
    s1: &ObstacleSolution<T>,
    s2: &ObstacleSolution<T>,
    alpha1: f64,
    alpha2: f64,
    solver_tol: f64,
) -> Result<CounterexampleReport> {
    let g = s1.grid();
    let n = g.n_axial();
    let cols: Vec<usize> = g.interior_columns().filter(|&c| s2.coincidence[c]).collect();
    if cols.is_empty() {
        return Err(Error::NotApplicable(format!(
            "coincidence set of v2 is empty for alpha2 = {alpha2}"
        )));
    }
    let mut best = (f64::NEG_INFINITY, 0, 0);
    let (mut i1, mut i2) = (0.0f64, 0.0f64);
    for &c in &cols {
        for j in 0..n {
            let d = (s1.u.at(c, j) - s2.u.at(c, j)).as_f64();
            if d > best.0 {
                best = (d, c, j);
            }
        }
        i1 = i1.max(s1.v.values()[c].as_f64().abs());
        i2 = i2.max(s2.v.values()[c].as_f64().abs());
    }
    let x = g.col_coords(best.1);
    Ok(CounterexampleReport {
        alpha1,
        alpha2,
        excess: best.0,
        argmax_column: best.1,
        argmax_row: best.2,
        argmax_x: x[..g.d_cross()].to_vec(),
        argmax_xn: g.xn(best.2),
        max_column_integral_1: i1,
        max_column_integral_2: i2,
        coincidence_nodes: cols.len(),
        solver_tol,
        certified: s1.certified && s2.certified,
        ladder: Vec::new(),
    })
}

/// Walks `alpha2 = start * ratio^k`, `k = 0..steps`, with `alpha1 = fraction * alpha2`,
/// until the coincidence set of `v2` is nonempty.
pub fn counterexample_search<T: Real>(
    grid: Grid,
    opts: &ObstacleOptions,
    start: f64,
    ratio: f64,
    steps: usize,
    fraction: f64,
) -> Result<CounterexampleReport> {
    if !(ratio > 0.0 && ratio < 1.0) || !(fraction > 0.0 && fraction < 1.0) || !(start > 0.0) {
        return Err(Error::input("ladder", "need start > 0 and ratio, fraction in (0, 1)"));
    }
    let mut tried = Vec::new();
    let mut alpha2 = start;
    for _ in 0..steps {
        match comparison_counterexample(T::lit(fraction * alpha2), T::lit(alpha2), grid, opts) {
            Ok(mut rep) => {
                rep.ladder = tried;
                return Ok(rep);
            }
            Err(Error::NotApplicable(_)) => tried.push(alpha2),
            Err(e) => return Err(e),
        }
        alpha2 *= ratio;
    }
    Err(Error::NotApplicable(format!(
        "no coincidence set found on the ladder {tried:?}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_data_gives_zero() {
        let g = Grid::new(1, 9, 7).unwrap();
        let p = ObstacleProblem::constant(g, 0.0f64).unwrap();
        let s = solve_obstacle(&p, &ObstacleOptions::default()).unwrap();
        assert!(s.certified);
        assert_eq!(s.u.max_abs(), 0.0);
        assert_eq!(s.j_value, 0.0);
    }

    #[test]
    fn rejects_inadmissible_data() {
        let g = Grid::new(1, 5, 5).unwrap();
        let bd = BoundaryData::from_fn(g, 1.0f64, 1.0, |_, _| 2.0);
        assert!(matches!(
            ObstacleProblem::new(g, bd),
            Err(Error::Admissibility { .. })
        ));
        assert!(ObstacleProblem::constant(g, -1.0f64).is_err());
    }

    #[test]
    fn prox_is_exact_on_a_column() {
        let g = Grid::new(1, 3, 6).unwrap();
        let prox = Prox::<f64>::new(g);
        let n = g.n_axial();
        // only column 1 is interior
        let mut y = vec![0.0; g.n_nodes()];
        for j in 1..n - 1 {
            y[n + j] = 0.3;
        }
        let s_of = |u: &[f64]| {
            let h = g.h_axial();
            h * (0.5 * (u[n] + u[2 * n - 1]) + u[n + 1..2 * n - 1].iter().sum::<f64>())
        };
        // grad step first, then compare with a brute-force 1-parameter minimisation
        let mut z = vec![0.0; g.n_nodes()];
        neg_laplacian(&g, &y, &mut z);
        let w: Vec<f64> = y.iter().zip(&z).map(|(a, b)| a - prox.inv_lmax * b).collect();
        let mut x = vec![0.0; g.n_nodes()];
        let mut scratch = vec![0.0; g.n_nodes()];
        prox.step(&y, &mut x, &mut scratch);
        let obj = |u: &[f64]| {
            let d2: f64 = u.iter().zip(&w).map(|(a, b)| (a - b) * (a - b)).sum();
            0.5 * d2 + prox.theta / prox.a_norm2 * s_of(u).max(0.0)
        };
        let best = obj(&x);
        for k in -200..=200 {
            let lam = k as f64 * 1e-3;
            let mut t = w.clone();
            for j in 1..n - 1 {
                t[n + j] -= lam;
            }
            assert!(obj(&t) >= best - 1e-14);
        }
    }
}
