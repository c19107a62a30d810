//! Dirichlet problem `-Δu = f` on the cylinder and the rearrangement energy
//! `Φ(f) = ∫_D f v_f dx'`.

use serde::{Deserialize, Serialize};

use crate::cg::conjugate_gradient;
use crate::error::{Error, Result};
use crate::grid::{BoundaryData, Field, Grid, ReducedField};
use crate::operators::{average_vertical, inner_cross, neg_laplacian};
use crate::scalar::Real;

/// Default relative residual for inner Poisson solves.
pub const DEFAULT_CG_TOL: f64 = 1e-10;

/// Right-hand side of the Poisson problem.
#[derive(Clone, Debug, PartialEq)]
pub enum Rhs<T> {
    Full(Field<T>),
    /// `f(x) = f(x')`, replicated to every axial layer.
    Reduced(ReducedField<T>),
}

impl<T: Real> Rhs<T> {
    fn grid(&self) -> Grid {
        match self {
            Rhs::Full(f) => f.grid(),
            Rhs::Reduced(f) => f.grid(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PoissonProblem<T> {
    grid: Grid,
    rhs: Rhs<T>,
    boundary: BoundaryData<T>,
}

impl<T: Real> PoissonProblem<T> {
    pub fn new(rhs: Rhs<T>, boundary: BoundaryData<T>) -> Result<Self> {
        let grid = rhs.grid();
        boundary.validate(&grid)?;
        Ok(Self {
            grid,
            rhs,
            boundary,
        })
    }

    /// Zero boundary data.
    pub fn homogeneous(rhs: Rhs<T>) -> Self {
        let grid = rhs.grid();
        Self {
            grid,
            rhs,
            boundary: BoundaryData::constant(grid, T::zero()),
        }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn rhs(&self) -> &Rhs<T> {
        &self.rhs
    }

    pub fn boundary(&self) -> &BoundaryData<T> {
        &self.boundary
    }
}

/// Convergence certificate of an iterative solve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub iterations: usize,
    pub residual_rel: f64,
    pub tolerance: f64,
    #[serde(skip)]
    pub wall_notes: String,
}

impl SolveReport {
    pub fn converged(&self) -> bool {
        self.residual_rel <= self.tolerance
    }
}

/// Solves the 5/7-point discrete Dirichlet problem by conjugate gradients.
///
/// The iteration cap is `10 * (number of unknowns)`.
pub fn solve_dirichlet<T: Real>(p: &PoissonProblem<T>, tol: T) -> Result<(Field<T>, SolveReport)> {
    solve_dirichlet_capped(p, tol, None)
}

pub(crate) fn solve_dirichlet_capped<T: Real>(
    p: &PoissonProblem<T>,
    tol: T,
    cap: Option<usize>,
) -> Result<(Field<T>, SolveReport)> {
    if !(tol > T::zero()) {
        return Err(Error::input("tol", "must be positive"));
    }
    let g = p.grid;
    let mut u = Field::zeros(g);
    p.boundary.apply(&mut u);

    let mut b = vec![T::zero(); g.n_nodes()];
    neg_laplacian(&g, u.values(), &mut b);
    match &p.rhs {
        Rhs::Full(f) => {
            for (k, bk) in b.iter_mut().enumerate() {
                *bk = if g.is_boundary_node(k) {
                    T::zero()
                } else {
                    f.values()[k] - *bk
                };
            }
        }
        Rhs::Reduced(f) => {
            for (k, bk) in b.iter_mut().enumerate() {
                *bk = if g.is_boundary_node(k) {
                    T::zero()
                } else {
                    f.values()[k / g.n_axial()] - *bk
                };
            }
        }
    }

    let unknowns = (g.n_cross() - 2).pow(g.d_cross() as u32) * (g.n_axial() - 2);
    let cap = cap.unwrap_or(10 * unknowns.max(1));
    let mut e = vec![T::zero(); g.n_nodes()];
    let out = conjugate_gradient(
        |x, y| neg_laplacian(&g, x, y),
        |_| {},
        &b,
        &mut e,
        tol,
        cap,
    );
    let report = SolveReport {
        iterations: out.iterations,
        residual_rel: out.residual_rel.as_f64(),
        tolerance: tol.as_f64(),
        wall_notes: if out.converged {
            "conjugate gradients converged".into()
        } else {
            "conjugate gradients hit the iteration cap".into()
        },
    };
    if !out.converged {
        return Err(Error::NotConverged {
            solver: "conjugate gradients",
            iterations: out.iterations,
            residual: report.residual_rel,
        });
    }
    for (x, d) in u.values_mut().iter_mut().zip(&e) {
        *x += *d;
    }
    Ok((u, report))
}

/// `u_f` for a cross-section density with zero boundary data.
pub fn solve_reduced<T: Real>(f: &ReducedField<T>, tol: T) -> Result<(Field<T>, SolveReport)> {
    solve_dirichlet(&PoissonProblem::homogeneous(Rhs::Reduced(f.clone())), tol)
}

/// `Φ(f) = ⟨f, v_f⟩_D` with `v_f` the vertical average of `u_f`.
pub fn energy_phi<T: Real>(f: &ReducedField<T>) -> Result<T> {
    energy_phi_with(f, T::lit(DEFAULT_CG_TOL)).map(|(phi, _)| phi)
}

/// As [`energy_phi`], also returning `u_f`.
pub fn energy_phi_with<T: Real>(f: &ReducedField<T>, tol: T) -> Result<(T, Field<T>)> {
    let (u, _) = solve_reduced(f, tol)?;
    let v = average_vertical(&u);
    Ok((inner_cross(f, &v), u))
}
