//! Minimisation of `Φ(f) = ∫_D f v_f` over the relaxed class
//! `{0 <= f <= 1, ∫_D f = mass}` of cross-section densities.
//!
//! The solver is Frank–Wolfe: the linear subproblem is solved exactly by the
//! bathtub fill ([`bathtub_lmo`]) and, because `Φ` is a quadratic form in `f`
//! (`u_f` is linear in `f`), the line search is exact. The Frank–Wolfe gap
//! `⟨f - f̃, 2 v_f⟩` bounds `Φ(f) - min Φ` and is the stopping certificate.

use serde::{Deserialize, Serialize};

use crate::cg::conjugate_gradient;
use crate::error::{Error, Result};
use crate::grid::{Field, Grid, ReducedField};
use crate::operators::{average_vertical, inner_cross, quadrature_cross};
use crate::poisson::{solve_reduced, DEFAULT_CG_TOL};
use crate::scalar::{dot, Real};

/// Relaxed rearrangement element: values in `[0, 1]`, mass = trapezoid integral over `D`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Density<T> {
    field: ReducedField<T>,
    mass: T,
}

impl<T: Real> Density<T> {
    pub fn new(grid: Grid, values: Vec<T>) -> Result<Self> {
        let field = ReducedField::from_values(grid, values)?;
        Self::from_reduced(field)
    }

    pub fn from_reduced(field: ReducedField<T>) -> Result<Self> {
        if let Some(i) = field
            .values()
            .iter()
            .position(|&x| x < T::zero() || x > T::one())
        {
            return Err(Error::input(
                "density",
                format!("value {} at node {i} outside [0, 1]", field.values()[i]),
            ));
        }
        let mass = quadrature_cross(&field);
        Ok(Self { field, mass })
    }

    /// `f ≡ c`.
    pub fn uniform(grid: Grid, c: T) -> Result<Self> {
        Self::from_reduced(ReducedField::constant(grid, c))
    }

    /// Characteristic function of `{x' : pred(x')}` (a generator `χ_{D0}`).
    pub fn indicator(grid: Grid, pred: impl Fn(&[f64]) -> bool) -> Self {
        let field = ReducedField::from_fn(grid, |x| if pred(x) { T::one() } else { T::zero() });
        Self::from_reduced(field).expect("0/1 values")
    }

    pub fn grid(&self) -> Grid {
        self.field.grid()
    }

    pub fn values(&self) -> &[T] {
        self.field.values()
    }

    pub fn mass(&self) -> T {
        self.mass
    }

    pub fn as_reduced(&self) -> &ReducedField<T> {
        &self.field
    }

    /// Convex combination `(1 - t) self + t other`.
    pub(crate) fn step_toward(&self, other: &Self, t: T) -> Self {
        let field = self.field.combine(T::one() - t, &other.field, t);
        // clamp round-off; the combination is feasible in exact arithmetic
        let field = field.map(|x| x.max(T::zero()).min(T::one()));
        let mass = quadrature_cross(&field);
        Self { field, mass }
    }
}

/// Minimiser of `⟨f, v⟩_D` over `{0 <= f <= 1, ∫_D f = mass}`.
///
/// Fills `f = 1` on nodes in increasing order of `v` (ties in node order);
/// the node where the mass runs out gets the fractional remainder, so at most
/// one node is fractional.
pub fn bathtub_lmo<T: Real>(v: &ReducedField<T>, mass: T) -> Result<Density<T>> {
    let g = v.grid();
    let total = T::lit(g.cross_measure());
    let slack = T::lit(1e-12);
    if !(mass > T::zero()) || mass > total + slack {
        return Err(Error::input(
            "mass",
            format!("must lie in (0, {total}], got {mass}"),
        ));
    }
    let vals = v.values();
    let mut order: Vec<usize> = (0..vals.len()).collect();
    // stable: equal values keep node order
    order.sort_by(|&a, &b| vals[a].partial_cmp(&vals[b]).expect("finite values"));

    let mut f = vec![T::zero(); vals.len()];
    let mut remaining = mass.min(total);
    for &i in &order {
        if remaining <= T::zero() {
            break;
        }
        let w = T::lit(g.cross_weight(i));
        if remaining >= w {
            f[i] = T::one();
            remaining -= w;
        } else {
            f[i] = remaining / w;
            remaining = T::zero();
        }
    }
    let field = ReducedField::from_values(g, f)?;
    Ok(Density { field, mass })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FwOptions {
    /// Stop when `gap <= gap_tol * |Φ|`.
    pub gap_tol: f64,
    pub max_iter: usize,
    /// Relative residual of the inner Poisson solves.
    pub cg_tol: f64,
    /// Try an active-set solve of the plateau system every `polish_every`
    /// iterations once the relative gap is below `1e-2`; 0 disables it.
    pub polish_every: usize,
}

impl Default for FwOptions {
    fn default() -> Self {
        Self {
            gap_tol: 1e-4,
            max_iter: 500,
            cg_tol: DEFAULT_CG_TOL,
            polish_every: 20,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub iteration: usize,
    pub objective: f64,
    pub gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct RearrangementSolution<T> {
    pub f_hat: Density<T>,
    pub u_hat: Field<T>,
    pub v_hat: ReducedField<T>,
    /// `max_D v̂`.
    pub alpha: T,
    pub fw_gap: T,
    pub objective: T,
    pub iterations: usize,
    /// The returned density came from the active-set polish.
    pub polished: bool,
    /// `gap <= gap_tol * |Φ|` reached within `max_iter`.
    pub certified: bool,
    pub gap_tol: f64,
    pub history: Vec<HistoryEntry>,
}

impl<T: Real> RearrangementSolution<T> {
    /// `gap / |Φ|`.
    pub fn relative_gap(&self) -> T {
        if self.objective == T::zero() {
            self.fw_gap
        } else {
            self.fw_gap / self.objective.abs()
        }
    }
}

struct Iterate<T> {
    f: Density<T>,
    u: Field<T>,
    v: ReducedField<T>,
}

impl<T: Real> Iterate<T> {
    fn solve(f: Density<T>, tol: T) -> Result<Self> {
        let (u, _) = solve_reduced(f.as_reduced(), tol)?;
        let v = average_vertical(&u);
        Ok(Self { f, u, v })
    }

    fn objective(&self) -> T {
        inner_cross(self.f.as_reduced(), &self.v)
    }
}

/// Frank–Wolfe with bathtub oracle and exact line search.
///
/// Starts from the bathtub vertex of `v_1` (the response to `f ≡ 1`), which
/// saturates the nodes next to `∂D`. Every 50 iterations `u_f` is re-solved
/// from scratch instead of being updated linearly. Hitting `max_iter` returns
/// the last iterate with `certified = false`.
pub fn frank_wolfe<T: Real>(mass: T, grid: Grid, opts: &FwOptions) -> Result<RearrangementSolution<T>> {
    if !(opts.gap_tol > 0.0) {
        return Err(Error::input("gap_tol", "must be positive"));
    }
    let total = T::lit(grid.cross_measure());
    if !(mass > T::zero()) || mass > total + T::lit(1e-12) {
        return Err(Error::input(
            "mass",
            format!("must lie in (0, {total}], got {mass}"),
        ));
    }
    let cg_tol = T::lit(opts.cg_tol);
    let gap_tol = T::lit(opts.gap_tol);

    let (u1, _) = solve_reduced(&ReducedField::constant(grid, T::one()), cg_tol)?;
    let f0 = bathtub_lmo(&average_vertical(&u1), mass)?;
    let mut it = Iterate::solve(f0, cg_tol)?;

    let mut history = Vec::new();
    let mut certified = false;
    let mut polished = false;
    let mut iterations = 0;
    for k in 0..=opts.max_iter {
        let phi = it.objective();
        let (target, gap) = fw_gap(&it.f, &it.v, mass)?;
        history.push(HistoryEntry {
            iteration: k,
            objective: phi.as_f64(),
            gap: gap.as_f64(),
        });
        iterations = k;
        if gap <= gap_tol * phi.abs() {
            certified = true;
            break;
        }
        if k == opts.max_iter {
            break;
        }
        if opts.polish_every > 0
            && k % opts.polish_every == 0
            && gap <= T::lit(1e-2) * phi.abs()
        {
            if let Some(cand) = kkt_polish(&it.f, mass, cg_tol)? {
                let (_, cand_gap) = fw_gap(&cand.f, &cand.v, mass)?;
                if cand.objective() <= phi && cand_gap < gap {
                    it = cand;
                    polished = true;
                    if cand_gap <= gap_tol * it.objective().abs() {
                        history.push(HistoryEntry {
                            iteration: k,
                            objective: it.objective().as_f64(),
                            gap: cand_gap.as_f64(),
                        });
                        certified = true;
                        break;
                    }
                    continue;
                }
            }
        }
        let diff = it.f.as_reduced().combine(T::one(), target.as_reduced(), -T::one());

        // d = f̃ - f, Φ(f + t d) = Φ(f) + 2 t ⟨d, v_f⟩ + t² ⟨d, v_d⟩
        let (u_t, _) = solve_reduced(target.as_reduced(), cg_tol)?;
        let u_d = u_t.combine(T::one(), &it.u, -T::one());
        let v_d = average_vertical(&u_d);
        let slope = -inner_cross(&diff, &it.v);
        let curv = -inner_cross(&diff, &v_d);
        let t = if curv > T::zero() {
            (-slope / curv).max(T::zero()).min(T::one())
        } else {
            T::one()
        };

        let f_next = it.f.step_toward(&target, t);
        it = if (k + 1) % 50 == 0 {
            Iterate::solve(f_next, cg_tol)?
        } else {
            let u = it.u.combine(T::one(), &u_d, t);
            let v = it.v.combine(T::one(), &v_d, t);
            Iterate { f: f_next, u, v }
        };
    }

    // final certificate with a fresh solve
    let fin = Iterate::solve(it.f, cg_tol)?;
    let objective = fin.objective();
    let (_, gap) = fw_gap(&fin.f, &fin.v, mass)?;
    certified = certified && gap <= gap_tol * objective.abs() * T::lit(1.0 + 1e-6);
    let alpha = fin.v.max();
    Ok(RearrangementSolution {
        f_hat: fin.f,
        u_hat: fin.u,
        v_hat: fin.v,
        alpha,
        fw_gap: gap,
        objective,
        iterations,
        polished,
        certified,
        gap_tol: opts.gap_tol,
        history,
    })
}

/// Minimiser over `t ∈ [0, 1]` of `Φ(f + t (target - f))`.
///
/// `Φ(f + t d) = Φ(f) + 2 t ⟨d, v_f⟩ + t² ⟨d, v_d⟩`, so
/// `t = clamp(-⟨d, v_f⟩ / ⟨d, v_d⟩, 0, 1)`.
pub fn exact_line_search<T: Real>(f: &Density<T>, target: &Density<T>, cg_tol: T) -> Result<T> {
    let d = target.as_reduced().combine(T::one(), f.as_reduced(), -T::one());
    let (u_f, _) = solve_reduced(f.as_reduced(), cg_tol)?;
    let (u_d, _) = solve_reduced(&d, cg_tol)?;
    let slope = inner_cross(&d, &average_vertical(&u_f));
    let curv = inner_cross(&d, &average_vertical(&u_d));
    Ok(if curv > T::zero() {
        (-slope / curv).max(T::zero()).min(T::one())
    } else {
        T::one()
    })
}

/// Bathtub target and Frank–Wolfe gap `⟨f - f̃, 2 v⟩`.
fn fw_gap<T: Real>(f: &Density<T>, v: &ReducedField<T>, mass: T) -> Result<(Density<T>, T)> {
    let target = bathtub_lmo(v, mass)?;
    let diff = f.as_reduced().combine(T::one(), target.as_reduced(), -T::one());
    // nonnegative in exact arithmetic since f̃ minimises ⟨·, v⟩
    let gap = (T::lit(2.0) * inner_cross(&diff, v)).max(T::zero());
    Ok((target, gap))
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Class {
    One,
    Free,
    Zero,
}

/// Primal-dual active-set solve of the optimality system
/// `f = 1` on `S1`, `f = 0` on `S0`, `v_f = α` on the free set, `∫ f = mass`.
///
/// On a fixed partition the free values minimise `Φ` under the mass
/// constraint; this is a projected CG on the free nodes whose operator costs
/// one Poisson solve per application. Returns `None` if the partition cycles
/// or the free set empties.
fn kkt_polish<T: Real>(f0: &Density<T>, mass: T, cg_tol: T) -> Result<Option<Iterate<T>>> {
    let g = f0.grid();
    let inner_tol = (cg_tol * T::lit(1e-2)).max(T::epsilon() * T::lit(16.0));
    let on = T::lit(1e-9);
    let mut class: Vec<Class> = (0..g.n_columns())
        .map(|c| {
            let fc = f0.values()[c];
            if g.is_lateral(c) || fc >= T::one() - on {
                Class::One
            } else if fc <= on {
                Class::Zero
            } else {
                Class::Free
            }
        })
        .collect();

    let solve_v = |f: &ReducedField<T>| -> Result<ReducedField<T>> {
        let (u, _) = solve_reduced(f, inner_tol)?;
        Ok(average_vertical(&u))
    };

    for _ in 0..30 {
        let free: Vec<usize> = (0..class.len()).filter(|&c| class[c] == Class::Free).collect();
        if free.is_empty() {
            return Ok(None);
        }
        let mut ones = ReducedField::zeros(g);
        for (c, x) in ones.values_mut().iter_mut().enumerate() {
            if class[c] == Class::One {
                *x = T::one();
            }
        }
        let free_mass = mass - quadrature_cross(&ones);
        let w: Vec<T> = free.iter().map(|&c| T::lit(g.cross_weight(c))).collect();
        let w_total: T = w.iter().copied().sum();
        if free_mass < T::zero() || free_mass > w_total {
            return Ok(None);
        }
        let v1 = solve_v(&ones)?;

        // K x = (ω ⊙ G x)|_free, symmetric positive definite
        let scatter = |x: &[T]| {
            let mut full = ReducedField::zeros(g);
            for (k, &c) in free.iter().enumerate() {
                full.values_mut()[c] = x[k];
            }
            full
        };
        let k_apply = |x: &[T], out: &mut [T]| {
            let v = solve_v(&scatter(x)).expect("inner Poisson solve");
            for (k, &c) in free.iter().enumerate() {
                out[k] = w[k] * v.values()[c];
            }
        };
        let ww = dot(&w, &w);
        let project = |x: &mut [T]| {
            let s = dot(&w, x) / ww;
            for (xi, &wi) in x.iter_mut().zip(&w) {
                *xi -= s * wi;
            }
        };
        let x0 = vec![free_mass / w_total; free.len()];
        let mut kx0 = vec![T::zero(); free.len()];
        k_apply(&x0, &mut kx0);
        let b: Vec<T> = free
            .iter()
            .enumerate()
            .map(|(k, &c)| -w[k] * v1.values()[c] - kx0[k])
            .collect();
        let mut delta = vec![T::zero(); free.len()];
        let out = conjugate_gradient(k_apply, project, &b, &mut delta, cg_tol, 20 * free.len() + 100);
        if !out.converged {
            return Ok(None);
        }

        let mut f = ones.clone();
        for (k, &c) in free.iter().enumerate() {
            f.values_mut()[c] = x0[k] + delta[k];
        }
        let v = solve_v(&f)?;
        let alpha = free
            .iter()
            .zip(&w)
            .map(|(&c, &wk)| wk * v.values()[c])
            .sum::<T>()
            / w_total;

        let margin = T::lit(1e-10) * alpha.abs();
        let mut next = class.clone();
        for c in g.interior_columns() {
            let (fc, vc) = (f.values()[c], v.values()[c]);
            next[c] = match class[c] {
                Class::Free if fc > T::one() => Class::One,
                Class::Free if fc < T::zero() => Class::Zero,
                Class::One if vc > alpha + margin => Class::Free,
                Class::Zero if vc < alpha - margin => Class::Free,
                other => other,
            };
        }
        if next == class {
            let f = Density::from_reduced(f.map(|x| x.max(T::zero()).min(T::one())))?;
            return Iterate::solve(f, cg_tol).map(Some);
        }
        class = next;
    }
    Ok(None)
}

/// Outcome of [`verify_structure`]; each `*_pass` flag is one check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructureReport {
    pub alpha: f64,
    pub eps: f64,
    pub delta: f64,
    /// (a) `max v̂ - α`.
    pub max_excess: f64,
    pub a_pass: bool,
    /// (b) smallest `f̂` on `{v̂ < α - eps}` (1 if the set is empty).
    pub min_f_below_plateau: f64,
    pub b_pass: bool,
    /// (c) largest `|v̂ - α|` on `{f̂ <= 1 - delta}` (0 if the set is empty).
    pub max_plateau_deviation: f64,
    pub c_pass: bool,
    /// (d) `min f̂` over `D`, reported only.
    pub min_f: f64,
    /// (e) measure of `{delta < f̂ < 1 - delta}`.
    pub fractional_measure: f64,
    pub e_pass: bool,
    /// `f̂ ≡ 1`: checks hold without a plateau.
    pub saturated: bool,
}

impl StructureReport {
    pub fn all_pass(&self) -> bool {
        self.a_pass && self.b_pass && self.c_pass && self.e_pass
    }
}

/// Checks the plateau structure of a certified minimiser:
/// `v̂ <= α`, `f̂ = 1` where `v̂ < α`, `v̂ = α` where `f̂ < 1`, and a
/// fractional (non bang-bang) set of positive measure.
pub fn verify_structure<T: Real>(
    sol: &RearrangementSolution<T>,
    eps: f64,
    delta: f64,
) -> Result<StructureReport> {
    if !sol.certified {
        return Err(Error::Uncertified(format!(
            "Frank-Wolfe gap {:e} above tolerance",
            sol.fw_gap.as_f64()
        )));
    }
    let g = sol.f_hat.grid();
    let alpha = sol.alpha.as_f64();
    let f: Vec<f64> = sol.f_hat.values().iter().map(|x| x.as_f64()).collect();
    let v: Vec<f64> = sol.v_hat.values().iter().map(|x| x.as_f64()).collect();

    let max_excess = v.iter().fold(f64::NEG_INFINITY, |m, &x| m.max(x)) - alpha;
    let min_f_below_plateau = f
        .iter()
        .zip(&v)
        .filter(|(_, &vi)| vi < alpha - eps)
        .fold(1.0f64, |m, (&fi, _)| m.min(fi));
    let max_plateau_deviation = f
        .iter()
        .zip(&v)
        .filter(|(&fi, _)| fi <= 1.0 - delta)
        .fold(0.0f64, |m, (_, &vi)| m.max((vi - alpha).abs()));
    let min_f = f.iter().fold(f64::INFINITY, |m, &x| m.min(x));
    let fractional_measure: f64 = f
        .iter()
        .enumerate()
        .filter(|(_, &fi)| fi > delta && fi < 1.0 - delta)
        .fold(0.0, |acc, (c, _)| acc + g.cross_weight(c));
    let saturated = f.iter().all(|&x| x >= 1.0 - delta);

    Ok(StructureReport {
        alpha,
        eps,
        delta,
        max_excess,
        a_pass: max_excess <= eps,
        min_f_below_plateau,
        b_pass: min_f_below_plateau >= 1.0 - delta,
        max_plateau_deviation,
        c_pass: max_plateau_deviation <= eps,
        min_f,
        fractional_measure,
        e_pass: saturated || fractional_measure > 0.0,
        saturated,
    })
}
