//! Uniform tensor grids on the cylinder `D x (0,1)` and the nodal fields living on them.
//!
//! `D` is the unit interval (`d_cross = 1`) or the unit square (`d_cross = 2`).
//! Nodes are stored column by column: a *column* is one cross-section node
//! `x'`, and the axial index `j` (coordinate `xn = j * h_axial`) runs fastest.
//! For `d_cross = 2` the cross-section multi-index `(i1, i2)` is row-major,
//! `col = i1 * n_cross + i2`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Grid {
    d_cross: usize,
    n_cross: usize,
    n_axial: usize,
}

impl Grid {
    pub fn new(d_cross: usize, n_cross: usize, n_axial: usize) -> Result<Self> {
        if d_cross != 1 && d_cross != 2 {
            return Err(Error::InvalidGrid(format!(
                "d_cross must be 1 or 2, got {d_cross}"
            )));
        }
        if n_cross < 3 || n_axial < 3 {
            return Err(Error::InvalidGrid(format!(
                "need at least 3 nodes per axis, got n_cross = {n_cross}, n_axial = {n_axial}"
            )));
        }
        Ok(Self {
            d_cross,
            n_cross,
            n_axial,
        })
    }

    pub fn d_cross(&self) -> usize {
        self.d_cross
    }

    pub fn n_cross(&self) -> usize {
        self.n_cross
    }

    pub fn n_axial(&self) -> usize {
        self.n_axial
    }

    pub fn h_cross(&self) -> f64 {
        1.0 / (self.n_cross - 1) as f64
    }

    pub fn h_axial(&self) -> f64 {
        1.0 / (self.n_axial - 1) as f64
    }

    /// Number of cross-section nodes.
    pub fn n_columns(&self) -> usize {
        self.n_cross.pow(self.d_cross as u32)
    }

    pub fn n_nodes(&self) -> usize {
        self.n_columns() * self.n_axial
    }

    #[inline]
    pub fn node(&self, col: usize, j: usize) -> usize {
        col * self.n_axial + j
    }

    #[inline]
    pub fn split_node(&self, node: usize) -> (usize, usize) {
        (node / self.n_axial, node % self.n_axial)
    }

    /// Cross-section multi-index; the second entry is 0 when `d_cross = 1`.
    #[inline]
    pub fn col_multi(&self, col: usize) -> [usize; 2] {
        if self.d_cross == 1 {
            [col, 0]
        } else {
            [col / self.n_cross, col % self.n_cross]
        }
    }

    #[inline]
    pub fn col_from_multi(&self, idx: [usize; 2]) -> usize {
        if self.d_cross == 1 {
            idx[0]
        } else {
            idx[0] * self.n_cross + idx[1]
        }
    }

    /// Cross-section coordinates `x'` (only the first `d_cross` entries are meaningful).
    pub fn col_coords(&self, col: usize) -> [f64; 2] {
        let h = self.h_cross();
        let [a, b] = self.col_multi(col);
        [a as f64 * h, b as f64 * h]
    }

    pub fn xn(&self, j: usize) -> f64 {
        j as f64 * self.h_axial()
    }

    /// Column stride of cross-section axis `axis`.
    #[inline]
    pub(crate) fn col_stride(&self, axis: usize) -> usize {
        if self.d_cross == 1 || axis == 1 {
            1
        } else {
            self.n_cross
        }
    }

    /// Whether `x'` lies on `∂D`.
    pub fn is_lateral(&self, col: usize) -> bool {
        let idx = self.col_multi(col);
        let last = self.n_cross - 1;
        idx[..self.d_cross].iter().any(|&i| i == 0 || i == last)
    }

    /// Cross-section nodes strictly inside `D`, in ascending order.
    pub fn interior_columns(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n_columns()).filter(move |&c| !self.is_lateral(c))
    }

    /// Cross-section nodes on `∂D`, in ascending order.
    pub fn lateral_columns(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n_columns()).filter(move |&c| self.is_lateral(c))
    }

    pub fn is_boundary_node(&self, node: usize) -> bool {
        let (col, j) = self.split_node(node);
        j == 0 || j + 1 == self.n_axial || self.is_lateral(col)
    }

    /// Grid neighbours of a cross-section node inside `D` (2 or 4 at most).
    pub fn col_neighbors(&self, col: usize) -> Vec<usize> {
        let idx = self.col_multi(col);
        let mut out = Vec::with_capacity(2 * self.d_cross);
        for axis in 0..self.d_cross {
            let s = self.col_stride(axis);
            if idx[axis] > 0 {
                out.push(col - s);
            }
            if idx[axis] + 1 < self.n_cross {
                out.push(col + s);
            }
        }
        out
    }

    /// 1D trapezoid weight of index `i` on a uniform grid with `n` nodes.
    pub(crate) fn trap(i: usize, n: usize) -> f64 {
        let h = 1.0 / (n - 1) as f64;
        if i == 0 || i + 1 == n {
            0.5 * h
        } else {
            h
        }
    }

    /// Trapezoid quadrature weight of a cross-section node (product rule).
    pub fn cross_weight(&self, col: usize) -> f64 {
        let idx = self.col_multi(col);
        idx[..self.d_cross]
            .iter()
            .map(|&i| Self::trap(i, self.n_cross))
            .product()
    }

    pub fn axial_weight(&self, j: usize) -> f64 {
        Self::trap(j, self.n_axial)
    }

    /// `h_cross^d_cross`: weight of an interior cross-section node.
    pub fn cross_cell(&self) -> f64 {
        self.h_cross().powi(self.d_cross as i32)
    }

    /// Weight of an interior node of the full grid.
    pub fn cell_measure(&self) -> f64 {
        self.cross_cell() * self.h_axial()
    }

    /// Quadrature measure of `D` (always 1 for the unit box).
    pub fn cross_measure(&self) -> f64 {
        (0..self.n_columns()).map(|c| self.cross_weight(c)).sum()
    }

    pub fn reflect_j(&self, j: usize) -> usize {
        self.n_axial - 1 - j
    }
}

/// Nodal values on the whole grid (`u`, `u_f`, test functions).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Field<T> {
    grid: Grid,
    values: Vec<T>,
}

impl<T: Real> Field<T> {
    pub fn zeros(grid: Grid) -> Self {
        Self::constant(grid, T::zero())
    }

    pub fn constant(grid: Grid, c: T) -> Self {
        Self {
            grid,
            values: vec![c; grid.n_nodes()],
        }
    }

    pub fn from_values(grid: Grid, values: Vec<T>) -> Result<Self> {
        check_values(grid.n_nodes(), &values)?;
        Ok(Self { grid, values })
    }

    /// Samples `g(x', xn)` at every node.
    pub fn from_fn(grid: Grid, g: impl Fn(&[f64], f64) -> T) -> Self {
        let d = grid.d_cross();
        let mut values = Vec::with_capacity(grid.n_nodes());
        for col in 0..grid.n_columns() {
            let x = grid.col_coords(col);
            for j in 0..grid.n_axial() {
                values.push(g(&x[..d], grid.xn(j)));
            }
        }
        Self { grid, values }
    }

    /// Replicates a cross-section field to every axial layer.
    pub fn extend_axially(r: &ReducedField<T>) -> Self {
        let grid = r.grid();
        let n = grid.n_axial();
        let values = r
            .values()
            .iter()
            .flat_map(|&v| std::iter::repeat_n(v, n))
            .collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn at(&self, col: usize, j: usize) -> T {
        self.values[self.grid.node(col, j)]
    }

    pub fn column(&self, col: usize) -> &[T] {
        let n = self.grid.n_axial();
        &self.values[col * n..(col + 1) * n]
    }

    pub fn max_abs(&self) -> T {
        crate::scalar::max_abs(&self.values)
    }

    /// `max |self - other|` over all nodes.
    pub fn max_diff(&self, other: &Self) -> T {
        self.values
            .iter()
            .zip(&other.values)
            .fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs()))
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: T, other: &Self, b: T) -> Self {
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&x, &y)| a * x + b * y)
            .collect();
        Self {
            grid: self.grid,
            values,
        }
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|&x| f(x)).collect(),
        }
    }

    /// The field composed with `xn -> 1 - xn`.
    pub fn reflect_axial(&self) -> Self {
        let g = self.grid;
        let mut values = self.values.clone();
        for col in 0..g.n_columns() {
            for j in 0..g.n_axial() {
                values[g.node(col, j)] = self.values[g.node(col, g.reflect_j(j))];
            }
        }
        Self { grid: g, values }
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

/// Values on the cross-section `D` (`v`, `v_f`, `h(x')`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct ReducedField<T> {
    grid: Grid,
    values: Vec<T>,
}

impl<T: Real> ReducedField<T> {
    pub fn zeros(grid: Grid) -> Self {
        Self::constant(grid, T::zero())
    }

    pub fn constant(grid: Grid, c: T) -> Self {
        Self {
            grid,
            values: vec![c; grid.n_columns()],
        }
    }

    pub fn from_values(grid: Grid, values: Vec<T>) -> Result<Self> {
        check_values(grid.n_columns(), &values)?;
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid, g: impl Fn(&[f64]) -> T) -> Self {
        let d = grid.d_cross();
        let values = (0..grid.n_columns())
            .map(|c| g(&grid.col_coords(c)[..d]))
            .collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn max(&self) -> T {
        self.values
            .iter()
            .fold(T::neg_infinity(), |m, &x| m.max(x))
    }

    pub fn min(&self) -> T {
        self.values.iter().fold(T::infinity(), |m, &x| m.min(x))
    }

    pub fn max_abs(&self) -> T {
        crate::scalar::max_abs(&self.values)
    }

    pub fn max_diff(&self, other: &Self) -> T {
        self.values
            .iter()
            .zip(&other.values)
            .fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs()))
    }

    pub fn combine(&self, a: T, other: &Self, b: T) -> Self {
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&x, &y)| a * x + b * y)
            .collect();
        Self {
            grid: self.grid,
            values,
        }
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|&x| f(x)).collect(),
        }
    }
}

fn check_values<T: Real>(expected: usize, values: &[T]) -> Result<()> {
    if values.len() != expected {
        return Err(Error::SizeMismatch {
            expected,
            got: values.len(),
        });
    }
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    Ok(())
}

/// Dirichlet data: arbitrary values on the lateral surface `∂D x [0,1]`,
/// constants on the bottom `D x {0}` and top `D x {1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct BoundaryData<T> {
    /// One entry per lateral node, ordered by lateral column then `j`.
    pub lateral: Vec<T>,
    pub bottom: T,
    pub top: T,
}

impl<T: Real> BoundaryData<T> {
    pub fn constant(grid: Grid, c: T) -> Self {
        let n_lat = grid.lateral_columns().count() * grid.n_axial();
        Self {
            lateral: vec![c; n_lat],
            bottom: c,
            top: c,
        }
    }

    /// Samples `g` on the lateral surface. The rows `j = 0` and `j = n_axial - 1`
    /// are forced to `bottom` and `top`.
    pub fn from_fn(grid: Grid, bottom: T, top: T, g: impl Fn(&[f64], f64) -> T) -> Self {
        let d = grid.d_cross();
        let n = grid.n_axial();
        let mut lateral = Vec::new();
        for col in grid.lateral_columns() {
            let x = grid.col_coords(col);
            for j in 0..n {
                lateral.push(if j == 0 {
                    bottom
                } else if j + 1 == n {
                    top
                } else {
                    g(&x[..d], grid.xn(j))
                });
            }
        }
        Self {
            lateral,
            bottom,
            top,
        }
    }

    /// Size, finiteness and corner compatibility.
    pub fn validate(&self, grid: &Grid) -> Result<()> {
        let n = grid.n_axial();
        check_values(grid.lateral_columns().count() * n, &self.lateral)?;
        if !self.bottom.is_finite() || !self.top.is_finite() {
            return Err(Error::input("boundary", "bottom/top must be finite"));
        }
        let scale = T::one().max(self.bottom.abs()).max(self.top.abs());
        let tol = T::lit(1e-12) * scale;
        for (k, chunk) in self.lateral.chunks(n).enumerate() {
            if (chunk[0] - self.bottom).abs() > tol || (chunk[n - 1] - self.top).abs() > tol {
                return Err(Error::input(
                    "boundary",
                    format!("lateral column {k} does not match bottom/top at its ends"),
                ));
            }
        }
        Ok(())
    }

    /// Checks `0 <= g(x', xn) <= (1 - xn) g(x', 0) + xn g(x', 1)` at every lateral node.
    pub fn check_admissible(&self, grid: &Grid) -> Result<()> {
        self.validate(grid)?;
        let n = grid.n_axial();
        let slack = T::lit(1e-12) * T::one().max(self.bottom.abs()).max(self.top.abs());
        for (k, &g) in self.lateral.iter().enumerate() {
            let xn = grid.xn(k % n);
            let upper = (T::one() - T::lit(xn)) * self.bottom + T::lit(xn) * self.top;
            if g < -slack || g > upper + slack {
                return Err(Error::Admissibility {
                    node: k,
                    xn,
                    value: g.as_f64(),
                    upper: upper.as_f64(),
                });
            }
        }
        Ok(())
    }

    /// Writes the boundary values into `u`, leaving interior nodes untouched.
    pub fn apply(&self, u: &mut Field<T>) {
        let g = u.grid();
        let n = g.n_axial();
        let vals = u.values_mut();
        let mut lat = self.lateral.chunks(n);
        for col in 0..g.n_columns() {
            if g.is_lateral(col) {
                let chunk = lat.next().expect("lateral data length checked");
                vals[col * n..(col + 1) * n].copy_from_slice(chunk);
            } else {
                vals[col * n] = self.bottom;
                vals[col * n + n - 1] = self.top;
            }
        }
    }

    /// Boundary values on the boundary and the affine profile
    /// `(1 - xn) * bottom + xn * top` inside.
    pub fn affine_lift(&self, grid: Grid) -> Field<T> {
        let (b, t) = (self.bottom, self.top);
        let mut u = Field::from_fn(grid, |_, xn| (T::one() - T::lit(xn)) * b + T::lit(xn) * t);
        self.apply(&mut u);
        u
    }

    /// Whether the data is invariant under `xn -> 1 - xn`.
    pub fn is_axially_symmetric(&self, grid: &Grid) -> bool {
        let n = grid.n_axial();
        self.bottom == self.top
            && self
                .lateral
                .chunks(n)
                .all(|c| (0..n).all(|j| c[j] == c[n - 1 - j]))
    }

    pub fn max_abs(&self) -> T {
        crate::scalar::max_abs(&self.lateral)
            .max(self.bottom.abs())
            .max(self.top.abs())
    }
}
