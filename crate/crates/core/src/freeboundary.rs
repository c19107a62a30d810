//! Post-processing of the coincidence set `{v = 0}`: free-boundary nodes,
//! the coefficient `h(x')`, coincidence densities in small balls and a
//! regular / singular heuristic.
//!
//! Discrete balls are node sets `{|x' - x'_0| <= r}` truncated to `D`. A
//! node counts 1 if it lies in the coincidence set, 1/2 if it is itself a
//! free-boundary node (its cell straddles the interface) and 0 otherwise, so
//! a flat interface through the centre gives ratio 1/2.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid, ReducedField};
use crate::obstacle::ObstacleSolution;
use crate::operators::effective_coefficient;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    Regular,
    SingularCandidate,
    /// `h(x') <= tol_h`.
    Degenerate,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::Regular => "regular",
            Classification::SingularCandidate => "singular-candidate",
            Classification::Degenerate => "degenerate",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FreeBoundaryOptions {
    /// Physical radii; each must be at least `2 h_cross`.
    pub radii: Vec<f64>,
    pub singular_threshold: f64,
    pub tol_h: f64,
}

impl FreeBoundaryOptions {
    /// Radii `{2, 4, 8} h_cross`, density threshold 0.1, `tol_h = 1e-3`.
    pub fn for_grid(grid: &Grid) -> Self {
        let h = grid.h_cross();
        Self {
            radii: vec![2.0 * h, 4.0 * h, 8.0 * h],
            singular_threshold: 0.1,
            tol_h: 1e-3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FreeBoundaryNode {
    pub node: usize,
    pub x: Vec<f64>,
    pub h: f64,
    /// `(r, ratio)` per radius.
    pub ratios: Vec<(f64, f64)>,
    /// `(r, width)`: smallest extent of the coincidence nodes in the ball
    /// over the coordinate and diagonal directions. Reported only.
    pub min_diameters: Vec<(f64, f64)>,
    pub classification: Classification,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FreeBoundaryReport {
    pub tol_v: f64,
    pub options: FreeBoundaryOptions,
    pub coincidence_nodes: usize,
    pub nodes: Vec<FreeBoundaryNode>,
    /// `min h` over free-boundary nodes (`+inf` if there are none).
    pub min_h: f64,
    pub regular: usize,
    pub singular_candidates: usize,
    pub degenerate: usize,
}

impl FreeBoundaryReport {
    pub fn ratios_in_unit_interval(&self) -> bool {
        self.nodes
            .iter()
            .flat_map(|n| n.ratios.iter())
            .all(|&(_, q)| (0.0..=1.0).contains(&q))
    }

    /// One row per free-boundary node, one `ratio_*` column per radius.
    pub fn to_csv(&self, grid: &Grid) -> String {
        let mut out = String::from("node,x1");
        if grid.d_cross() == 2 {
            out.push_str(",x2");
        }
        out.push_str(",h,classification");
        for k in 0..self.options.radii.len() {
            write!(out, ",ratio_{k}").expect("string write");
        }
        out.push('\n');
        for n in &self.nodes {
            write!(out, "{}", n.node).expect("string write");
            for xi in &n.x {
                write!(out, ",{xi:.16e}").expect("string write");
            }
            write!(out, ",{:.16e},{}", n.h, n.classification.as_str()).expect("string write");
            for (_, q) in &n.ratios {
                write!(out, ",{q:.16e}").expect("string write");
            }
            out.push('\n');
        }
        out
    }
}

/// Coincidence nodes with at least one neighbour outside the coincidence set.
pub fn free_boundary_nodes(grid: &Grid, coincident: &[bool]) -> Vec<usize> {
    (0..grid.n_columns())
        .filter(|&c| coincident[c] && grid.col_neighbors(c).into_iter().any(|nb| !coincident[nb]))
        .collect()
}

fn ball(grid: &Grid, center: usize, r: f64) -> Vec<usize> {
    let d = grid.d_cross();
    let h = grid.h_cross();
    let reach = (r / h + 1e-9).floor() as isize;
    let m = grid.col_multi(center);
    let n = grid.n_cross() as isize;
    let mut out = Vec::new();
    let range = |i: usize| {
        let i = i as isize;
        (i - reach).max(0)..=(i + reach).min(n - 1)
    };
    let r2 = (r / h) * (r / h) + 1e-9;
    if d == 1 {
        for i in range(m[0]) {
            out.push(grid.col_from_multi([i as usize, 0]));
        }
    } else {
        for i in range(m[0]) {
            for j in range(m[1]) {
                let di = (i - m[0] as isize) as f64;
                let dj = (j - m[1] as isize) as f64;
                if di * di + dj * dj <= r2 {
                    out.push(grid.col_from_multi([i as usize, j as usize]));
                }
            }
        }
    }
    out
}

/// `|{v = 0} ∩ B_r(x0)| / |B_r(x0)|` with the counting rule of this module.
pub fn density_ratio(grid: &Grid, coincident: &[bool], center: usize, r: f64) -> f64 {
    let nodes = ball(grid, center, r);
    let hit: f64 = nodes
        .iter()
        .map(|&c| {
            if !coincident[c] {
                0.0
            } else if grid.col_neighbors(c).into_iter().any(|nb| !coincident[nb]) {
                0.5
            } else {
                1.0
            }
        })
        .sum();
    hit / nodes.len() as f64
}

fn min_width(grid: &Grid, coincident: &[bool], center: usize, r: f64) -> f64 {
    let pts: Vec<[f64; 2]> = ball(grid, center, r)
        .into_iter()
        .filter(|&c| coincident[c])
        .map(|c| grid.col_coords(c))
        .collect();
    let dirs: &[[f64; 2]] = if grid.d_cross() == 1 {
        &[[1.0, 0.0]]
    } else {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        &[[1.0, 0.0], [0.0, 1.0], [s, s], [s, -s]]
    };
    dirs.iter()
        .map(|e| {
            let (lo, hi) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                let t = p[0] * e[0] + p[1] * e[1];
                (lo.min(t), hi.max(t))
            });
            hi - lo
        })
        .fold(f64::INFINITY, f64::min)
}

/// Free-boundary report for a nodal `v` with coefficient `h`.
///
/// Works on any field, so synthetic coincidence sets can be analysed directly.
pub fn analyze_coincidence<T: Real>(
    v: &ReducedField<T>,
    h: &ReducedField<T>,
    tol_v: f64,
    opts: &FreeBoundaryOptions,
) -> Result<FreeBoundaryReport> {
    let g = v.grid();
    if h.grid() != g {
        return Err(Error::input("h", "grid differs from v"));
    }
    if opts.radii.is_empty() {
        return Err(Error::input("radii", "at least one radius is required"));
    }
    let hc = g.h_cross();
    if let Some(r) = opts.radii.iter().find(|&&r| !(r >= 2.0 * hc - 1e-12)) {
        return Err(Error::input(
            "radii",
            format!("radius {r} is below two cells ({})", 2.0 * hc),
        ));
    }
    let coincident: Vec<bool> = v.values().iter().map(|x| x.as_f64() <= tol_v).collect();
    let count = coincident.iter().filter(|&&b| b).count();
    if count == 0 {
        return Err(Error::NotApplicable("coincidence set is empty".into()));
    }
    let mut radii = opts.radii.clone();
    radii.sort_by(|a, b| a.partial_cmp(b).expect("finite radii"));

    let d = g.d_cross();
    let nodes: Vec<FreeBoundaryNode> = free_boundary_nodes(&g, &coincident)
        .into_iter()
        .map(|c| {
            let hv = h.values()[c].as_f64();
            let ratios: Vec<(f64, f64)> = radii
                .iter()
                .map(|&r| (r, density_ratio(&g, &coincident, c, r)))
                .collect();
            let min_diameters = radii
                .iter()
                .map(|&r| (r, min_width(&g, &coincident, c, r)))
                .collect();
            let classification = if hv <= opts.tol_h {
                Classification::Degenerate
            } else if ratios[0].1 < opts.singular_threshold {
                Classification::SingularCandidate
            } else {
                Classification::Regular
            };
            FreeBoundaryNode {
                node: c,
                x: g.col_coords(c)[..d].to_vec(),
                h: hv,
                ratios,
                min_diameters,
                classification,
            }
        })
        .collect();
    let tally = |k: Classification| nodes.iter().filter(|n| n.classification == k).count();
    Ok(FreeBoundaryReport {
        tol_v,
        options: FreeBoundaryOptions {
            radii,
            ..opts.clone()
        },
        coincidence_nodes: count,
        min_h: nodes.iter().map(|n| n.h).fold(f64::INFINITY, f64::min),
        regular: tally(Classification::Regular),
        singular_candidates: tally(Classification::SingularCandidate),
        degenerate: tally(Classification::Degenerate),
        nodes,
    })
}

/// Free-boundary report of a certified obstacle solve, with
/// `h(x') = 1 - ∂_ν u(x', 0) - ∂_ν u(x', 1)`.
pub fn analyze_free_boundary<T: Real>(
    sol: &ObstacleSolution<T>,
    opts: &FreeBoundaryOptions,
) -> Result<FreeBoundaryReport> {
    if !sol.certified {
        return Err(Error::Uncertified("obstacle solve did not certify".into()));
    }
    let h = effective_coefficient(&sol.u);
    analyze_coincidence(&sol.v, &h, sol.tol_v, opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_line_in_one_dimension() {
        let g = Grid::new(1, 128, 3).unwrap();
        let v = ReducedField::from_fn(g, |x| (x[0] - 0.5).max(0.0));
        let h = ReducedField::constant(g, 1.0);
        let rep = analyze_coincidence(&v, &h, 1e-12, &FreeBoundaryOptions::for_grid(&g)).unwrap();
        assert_eq!(rep.nodes.len(), 1);
        for &(_, q) in &rep.nodes[0].ratios {
            assert!((q - 0.5).abs() < 1e-12);
        }
        assert_eq!(rep.nodes[0].classification, Classification::Regular);
    }

    #[test]
    fn degenerate_beats_density() {
        let g = Grid::new(1, 33, 3).unwrap();
        let v = ReducedField::from_fn(g, |x| (x[0] - 0.5).max(0.0));
        let h = ReducedField::constant(g, 0.0);
        let rep = analyze_coincidence(&v, &h, 1e-12, &FreeBoundaryOptions::for_grid(&g)).unwrap();
        assert_eq!(rep.degenerate, rep.nodes.len());
    }

    #[test]
    fn rejects_small_radius_and_empty_set() {
        let g = Grid::new(1, 17, 3).unwrap();
        let v = ReducedField::from_fn(g, |x| x[0] - 0.5);
        let h = ReducedField::constant(g, 1.0);
        let mut opts = FreeBoundaryOptions::for_grid(&g);
        opts.radii = vec![g.h_cross()];
        assert!(analyze_coincidence(&v, &h, 1e-12, &opts).is_err());
        let pos = ReducedField::constant(g, 1.0);
        assert!(matches!(
            analyze_coincidence(&pos, &h, 1e-12, &FreeBoundaryOptions::for_grid(&g)),
            Err(Error::NotApplicable(_))
        ));
    }

    #[test]
    fn ball_is_truncated_at_the_boundary() {
        let g = Grid::new(2, 9, 3).unwrap();
        let corner = g.col_from_multi([0, 0]);
        let b = ball(&g, corner, 2.0 * g.h_cross());
        // quarter disk of radius 2: (0,0),(1,0),(2,0),(0,1),(1,1),(0,2)
        assert_eq!(b.len(), 6);
    }
}
