//! Finite-difference solvers for the constrained optimal rearrangement problem
//! on a cylinder `Ω = D x (0,1)` and for the obstacle problem acting on the
//! vertical average `v(x') = ∫_0^1 u(x', xn) dxn`.
//!
//! Everything is generic over the scalar type ([`Real`], implemented for
//! `f32` and `f64`); the `*64` aliases below fix `f64`, which every default
//! tolerance assumes.

// `!(x > 0)` rejects NaN along with non-positive input
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod cg;
pub mod csv;
pub mod error;
pub mod freeboundary;
pub mod grid;
pub mod obstacle;
pub mod operators;
pub mod poisson;
pub mod rearrangement;
pub mod scalar;

pub use error::{Error, Result};
pub use freeboundary::{
    analyze_coincidence, analyze_free_boundary, Classification, FreeBoundaryOptions,
    FreeBoundaryReport,
};
pub use grid::{BoundaryData, Field, Grid, ReducedField};
pub use obstacle::{
    compare_v, comparison_counterexample, counterexample_search, invariants, reduced_residual,
    reduced_residual_in,
    second_difference_diagnostic, solve_obstacle, solve_obstacle_from, ComparisonReport,
    CounterexampleReport, InvariantReport, ObstacleOptions, ObstacleProblem, ObstacleSolution,
};
pub use operators::Face;
pub use poisson::{PoissonProblem, Rhs, SolveReport};
pub use rearrangement::{
    bathtub_lmo, exact_line_search, frank_wolfe, verify_structure, Density, FwOptions, RearrangementSolution,
    StructureReport,
};
pub use scalar::Real;

pub type Field64 = Field<f64>;
pub type ReducedField64 = ReducedField<f64>;
pub type BoundaryData64 = BoundaryData<f64>;
pub type PoissonProblem64 = PoissonProblem<f64>;
pub type Density64 = Density<f64>;
pub type RearrangementSolution64 = RearrangementSolution<f64>;
pub type ObstacleProblem64 = ObstacleProblem<f64>;
pub type ObstacleSolution64 = ObstacleSolution<f64>;
