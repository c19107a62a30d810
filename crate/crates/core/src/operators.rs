//! Second-order finite-difference operators shared by all solvers.
//!
//! The discrete Laplacian is the standard 5-point (`d_cross = 1`) or 7-point
//! (`d_cross = 2`) stencil. The Dirichlet energy is the edge sum whose
//! gradient with respect to interior node values is exactly
//! `-2 * cell_measure * Δ_h u`, so the two satisfy a discrete Green identity.

use serde::{Deserialize, Serialize};

use crate::grid::{Field, Grid, ReducedField};
use crate::scalar::Real;

/// Horizontal faces of the cylinder.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Face {
    /// `D x {0}`
    Bottom,
    /// `D x {1}`
    Top,
}

/// Trapezoid average of each column over `xn ∈ [0, 1]`.
pub fn average_vertical<T: Real>(u: &Field<T>) -> ReducedField<T> {
    let g = u.grid();
    let w: Vec<T> = (0..g.n_axial()).map(|j| T::lit(g.axial_weight(j))).collect();
    let values = (0..g.n_columns())
        .map(|c| u.column(c).iter().zip(&w).map(|(&x, &wj)| x * wj).sum())
        .collect();
    ReducedField::from_values(g, values).expect("finite input gives finite average")
}

/// `Δ_h u` at interior nodes; boundary nodes are 0.
pub fn apply_laplacian<T: Real>(u: &Field<T>) -> Field<T> {
    let g = u.grid();
    let mut out = vec![T::zero(); g.n_nodes()];
    neg_laplacian(&g, u.values(), &mut out);
    for x in out.iter_mut() {
        *x = -*x;
    }
    Field::from_values(g, out).expect("finite input gives finite Laplacian")
}

/// Writes `-Δ_h p` at interior nodes of `out` and 0 on the boundary.
///
/// Raw-slice kernel used by the iterative solvers.
pub(crate) fn neg_laplacian<T: Real>(g: &Grid, p: &[T], out: &mut [T]) {
    let n = g.n_axial();
    let ic = T::lit(1.0 / (g.h_cross() * g.h_cross()));
    let ia = T::lit(1.0 / (g.h_axial() * g.h_axial()));
    let two = T::lit(2.0);
    let diag = two * ia + two * T::lit(g.d_cross() as f64) * ic;
    let strides: Vec<usize> = (0..g.d_cross()).map(|a| g.col_stride(a) * n).collect();
    for col in 0..g.n_columns() {
        let base = col * n;
        if g.is_lateral(col) {
            out[base..base + n].iter_mut().for_each(|x| *x = T::zero());
            continue;
        }
        out[base] = T::zero();
        out[base + n - 1] = T::zero();
        for k in base + 1..base + n - 1 {
            let mut nb = ia * (p[k - 1] + p[k + 1]);
            for &s in &strides {
                nb += ic * (p[k - s] + p[k + s]);
            }
            out[k] = diag * p[k] - nb;
        }
    }
}

/// Cross-section Laplacian `Δ_{x'}` at interior cross-section nodes; 0 on `∂D`.
pub fn lateral_laplacian<T: Real>(v: &ReducedField<T>) -> ReducedField<T> {
    let g = v.grid();
    let ic = T::lit(1.0 / (g.h_cross() * g.h_cross()));
    let two = T::lit(2.0);
    let vals = v.values();
    let out = (0..g.n_columns())
        .map(|c| {
            if g.is_lateral(c) {
                return T::zero();
            }
            (0..g.d_cross())
                .map(|a| {
                    let s = g.col_stride(a);
                    ic * (vals[c - s] - two * vals[c] + vals[c + s])
                })
                .sum()
        })
        .collect();
    ReducedField::from_values(g, out).expect("finite input")
}

/// Outward normal derivative on a horizontal face, one-sided three-point stencil.
pub fn normal_trace<T: Real>(u: &Field<T>, face: Face) -> ReducedField<T> {
    let g = u.grid();
    let n = g.n_axial();
    let inv = T::lit(0.5 / g.h_axial());
    let (three, four) = (T::lit(3.0), T::lit(4.0));
    let values = (0..g.n_columns())
        .map(|c| {
            let col = u.column(c);
            match face {
                // outward normal is -e_n
                Face::Bottom => (three * col[0] - four * col[1] + col[2]) * inv,
                Face::Top => (three * col[n - 1] - four * col[n - 2] + col[n - 3]) * inv,
            }
        })
        .collect();
    ReducedField::from_values(g, values).expect("finite input")
}

/// `h(x') = 1 - ∂_ν u(x', 0) - ∂_ν u(x', 1)`.
pub fn effective_coefficient<T: Real>(u: &Field<T>) -> ReducedField<T> {
    let b = normal_trace(u, Face::Bottom);
    let t = normal_trace(u, Face::Top);
    let values = b
        .values()
        .iter()
        .zip(t.values())
        .map(|(&x, &y)| T::one() - x - y)
        .collect();
    ReducedField::from_values(u.grid(), values).expect("finite input")
}

/// Discrete `∫ ∇u · ∇φ`: edge sum of difference products with trapezoid
/// weights transverse to each edge.
pub fn edge_form<T: Real>(u: &Field<T>, phi: &Field<T>) -> T {
    let g = u.grid();
    let n = g.n_axial();
    let (a, b) = (u.values(), phi.values());
    let ax_w: Vec<T> = (0..n).map(|j| T::lit(g.axial_weight(j))).collect();
    let mut total = T::zero();

    // axial edges
    let ia = T::lit(1.0 / g.h_axial());
    for col in 0..g.n_columns() {
        let wc = T::lit(g.cross_weight(col));
        let base = col * n;
        let mut s = T::zero();
        for k in base..base + n - 1 {
            s += (a[k + 1] - a[k]) * (b[k + 1] - b[k]);
        }
        total += wc * ia * s;
    }

    // cross-section edges
    let ic = T::lit(1.0 / g.h_cross());
    for axis in 0..g.d_cross() {
        let cs = g.col_stride(axis);
        let other = 1 - axis;
        for col in 0..g.n_columns() {
            let idx = g.col_multi(col);
            if idx[axis] + 1 >= g.n_cross() {
                continue;
            }
            let w_other = if g.d_cross() == 2 {
                T::lit(Grid::trap(idx[other], g.n_cross()))
            } else {
                T::one()
            };
            let (p, q) = (col * n, (col + cs) * n);
            let mut s = T::zero();
            for j in 0..n {
                s += ax_w[j] * (a[q + j] - a[p + j]) * (b[q + j] - b[p + j]);
            }
            total += w_other * ic * s;
        }
    }
    total
}

/// Discrete `∫_Ω |∇u|^2`.
pub fn dirichlet_energy<T: Real>(u: &Field<T>) -> T {
    edge_form(u, u)
}

/// Trapezoid quadrature over `D`.
pub fn quadrature_cross<T: Real>(v: &ReducedField<T>) -> T {
    let g = v.grid();
    v.values()
        .iter()
        .enumerate()
        .map(|(c, &x)| T::lit(g.cross_weight(c)) * x)
        .sum()
}

/// Trapezoid pairing `∫_D a b dx'`.
pub fn inner_cross<T: Real>(a: &ReducedField<T>, b: &ReducedField<T>) -> T {
    let g = a.grid();
    a.values()
        .iter()
        .zip(b.values())
        .enumerate()
        .map(|(c, (&x, &y))| T::lit(g.cross_weight(c)) * x * y)
        .sum()
}

/// Trapezoid pairing `∫_Ω u φ dx`.
pub fn inner<T: Real>(u: &Field<T>, phi: &Field<T>) -> T {
    let g = u.grid();
    let n = g.n_axial();
    let ax_w: Vec<T> = (0..n).map(|j| T::lit(g.axial_weight(j))).collect();
    (0..g.n_columns())
        .map(|c| {
            let s: T = u
                .column(c)
                .iter()
                .zip(phi.column(c))
                .zip(&ax_w)
                .map(|((&x, &y), &w)| w * x * y)
                .sum();
            T::lit(g.cross_weight(c)) * s
        })
        .sum()
}

/// Discrete `W^{2,2}` seminorm on `D' x [0,1]`, `D' = {x' : dist(x', ∂D) >= margin}`.
///
/// Sums squared centred second differences `∂_aa` and `∂_ab` over every axis
/// pair (mixed ones counted twice, as in `|D^2 u|^2`) at nodes where the
/// stencil fits, weighted by the cell measure, and returns the square root.
pub fn second_difference_seminorm<T: Real>(u: &Field<T>, margin: f64) -> T {
    let g = u.grid();
    let n = g.n_axial();
    let d = g.d_cross();
    let hc = g.h_cross();
    let ha = g.h_axial();
    // axes 0..d are cross-section, axis d is axial
    let node_stride = |axis: usize| -> usize {
        if axis == d {
            1
        } else {
            g.col_stride(axis) * n
        }
    };
    let h_of = |axis: usize| if axis == d { ha } else { hc };
    let vals = u.values();
    let lim = 1.0 - margin;
    let mut total = T::zero();
    for col in 0..g.n_columns() {
        let x = g.col_coords(col);
        if x[..d].iter().any(|&xi| xi < margin - 1e-12 || xi > lim + 1e-12) {
            continue;
        }
        if g.is_lateral(col) {
            continue;
        }
        for j in 1..n - 1 {
            let k = g.node(col, j);
            let mut s = T::zero();
            for a in 0..=d {
                let sa = node_stride(a);
                let ha = T::lit(h_of(a));
                let daa = (vals[k + sa] - T::lit(2.0) * vals[k] + vals[k - sa]) / (ha * ha);
                s += daa * daa;
                for b in a + 1..=d {
                    let sb = node_stride(b);
                    let hb = T::lit(h_of(b));
                    let dab = (vals[k + sa + sb] - vals[k + sa - sb] - vals[k - sa + sb]
                        + vals[k - sa - sb])
                        / (T::lit(4.0) * ha * hb);
                    s += T::lit(2.0) * dab * dab;
                }
            }
            total += s;
        }
    }
    (total * T::lit(g.cell_measure())).sqrt()
}
