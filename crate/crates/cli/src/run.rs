//! Pipelines behind each command and the artifact writer.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use cylobst::csv::{field_to_csv, reduced_to_csv};
use cylobst::freeboundary::analyze_coincidence;
use cylobst::obstacle::{comparison_of, solve_pair};
use cylobst::operators::{average_vertical, dirichlet_energy};
use cylobst::poisson::{energy_phi_with, solve_dirichlet, solve_reduced};
use cylobst::{
    analyze_free_boundary, counterexample_search, comparison_counterexample, frank_wolfe, invariants,
    solve_obstacle, solve_obstacle_from, verify_structure, BoundaryData64, Field64, FreeBoundaryOptions,
    FwOptions, Grid, ObstacleOptions, ObstacleProblem, ObstacleSolution64, PoissonProblem, ReducedField64,
    Rhs,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{ConfigError, Problem, RunConfig, CROSS_MEASURE};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NOT_CONVERGED: i32 = 3;
pub const EXIT_CHECK_FAILED: i32 = 4;

/// Relative bound on a column-mean Laplacian check.
const TOL_LAPLACIAN: f64 = 1e-4;
/// `v >= -TOL_V_REL * alpha` and `max (v1 - v2) <= TOL_V_REL * alpha2`.
const TOL_V_REL: f64 = 1e-6;
const TOL_SYMMETRY: f64 = 1e-8;
const TOL_ENERGY: f64 = 1e-2;
const TOL_EQUIVALENCE: f64 = 1e-3;
const STRUCTURE_DELTA: f64 = 1e-3;
const FB_TOL_H: f64 = 1e-6;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("stage `{stage}`: {source}")]
    Invalid {
        stage: &'static str,
        source: cylobst::Error,
    },
    #[error("stage `{stage}` did not converge: {reason}")]
    NotConverged { stage: &'static str, reason: String },
    #[error("writing {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::Invalid { .. } => EXIT_VALIDATION,
            RunError::NotConverged { .. } => EXIT_NOT_CONVERGED,
            RunError::Io { .. } => EXIT_IO,
        }
    }
}

fn core_err(stage: &'static str) -> impl Fn(cylobst::Error) -> RunError {
    move |e| match e {
        cylobst::Error::NotConverged { .. } | cylobst::Error::Uncertified(_) => RunError::NotConverged {
            stage,
            reason: e.to_string(),
        },
        source => RunError::Invalid { stage, source },
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    /// Human-readable bound, e.g. `<= 1e-4`.
    pub bound: String,
}

impl Check {
    fn at_most(name: &str, value: f64, limit: f64) -> Self {
        Check {
            name: name.into(),
            passed: value <= limit,
            value,
            bound: format!("<= {limit:e}"),
        }
    }

    fn at_least(name: &str, value: f64, limit: f64) -> Self {
        Check {
            name: name.into(),
            passed: value >= limit,
            value,
            bound: format!(">= {limit:e}"),
        }
    }

    fn within(name: &str, value: f64, lo: f64, hi: f64) -> Self {
        Check {
            name: name.into(),
            passed: (lo..=hi).contains(&value),
            value,
            bound: format!("in [{lo}, {hi}]"),
        }
    }

    fn flag(name: &str, ok: bool) -> Self {
        Check {
            name: name.into(),
            passed: ok,
            value: f64::from(u8::from(ok)),
            bound: "== 1".into(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Stage {
    pub name: &'static str,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub data: Value,
}

impl Stage {
    fn new(name: &'static str, checks: Vec<Check>, data: Value) -> Self {
        Stage {
            name,
            passed: checks.iter().all(|c| c.passed),
            checks,
            data,
        }
    }
}

/// Result of a completed pipeline; artifacts are already on disk.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub stages: Vec<Stage>,
    pub out_dir: PathBuf,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.stages.iter().all(|s| s.passed)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            EXIT_PASS
        } else {
            EXIT_CHECK_FAILED
        }
    }
}

#[derive(Default)]
struct Artifacts {
    u: Option<Field64>,
    v: Option<ReducedField64>,
    f: Option<ReducedField64>,
    extra: Vec<(&'static str, String)>,
}

fn grid_of(cfg: &RunConfig) -> Result<Grid, RunError> {
    let g = cfg.grid;
    Grid::new(g.d_cross, g.n_cross, g.n_axial).map_err(|e| RunError::Config(ConfigError::new("grid", e.to_string())))
}

fn fw_options(cfg: &RunConfig) -> FwOptions {
    FwOptions {
        gap_tol: cfg.tolerances.gap_tol,
        cg_tol: cfg.tolerances.cg_tol,
        ..FwOptions::default()
    }
}

fn obstacle_options(cfg: &RunConfig) -> ObstacleOptions {
    ObstacleOptions {
        tol: cfg.tolerances.obstacle_tol,
        tol_v: cfg.tolerances.tol_v,
        ..ObstacleOptions::default()
    }
}

fn boundary_data(cfg: &RunConfig, grid: Grid) -> BoundaryData64 {
    let bottom = cfg.alpha.unwrap_or(0.0);
    let top = cfg.alpha_top.unwrap_or(bottom);
    let bump = cfg.lateral_bump;
    BoundaryData64::from_fn(grid, bottom, top, |_, xn| {
        (1.0 - xn) * bottom + xn * top + bump * (PI * xn).sin()
    })
}

fn certified_obstacle(
    stage: &'static str,
    p: &ObstacleProblem<f64>,
    opts: &ObstacleOptions,
) -> Result<ObstacleSolution64, RunError> {
    let s = solve_obstacle(p, opts).map_err(core_err(stage))?;
    if !s.certified {
        return Err(RunError::NotConverged {
            stage,
            reason: format!(
                "optimality residual {:e} after {} iterations",
                s.report.residual_rel, s.report.iterations
            ),
        });
    }
    Ok(s)
}

/// Runs the configured pipeline and writes artifacts into `out_dir`.
pub fn run(cfg: &RunConfig, out_dir: &Path) -> Result<Outcome, RunError> {
    cfg.validate()?;
    let grid = grid_of(cfg)?;
    let mut art = Artifacts::default();
    let stages = match cfg.problem {
        Problem::Poisson => vec![poisson_stage(cfg, grid, &mut art)?],
        Problem::Rearrangement => vec![rearrangement_stage(cfg, grid, &mut art)?.0],
        Problem::Obstacle => vec![obstacle_stage(cfg, grid, &mut art)?],
        Problem::Compare => vec![compare_stage(cfg, grid, &mut art)?],
        Problem::Counterexample => vec![counterexample_stage(cfg, grid)?],
        Problem::Verify => verify(cfg, grid, &mut art)?,
    };
    let outcome = Outcome {
        stages,
        out_dir: out_dir.to_path_buf(),
    };
    write_artifacts(cfg, &outcome, &art)?;
    Ok(outcome)
}

fn poisson_stage(cfg: &RunConfig, grid: Grid, art: &mut Artifacts) -> Result<Stage, RunError> {
    const STAGE: &str = "poisson";
    let p = PoissonProblem::new(Rhs::Reduced(ReducedField64::constant(grid, 1.0)), boundary_data(cfg, grid))
        .map_err(core_err(STAGE))?;
    let (u, rep) = solve_dirichlet(&p, cfg.tolerances.cg_tol).map_err(core_err(STAGE))?;
    if !rep.converged() {
        return Err(RunError::NotConverged {
            stage: STAGE,
            reason: format!("CG residual {:e}", rep.residual_rel),
        });
    }
    let v = average_vertical(&u);
    let data = json!({
        "rhs": 1.0,
        "cg": rep,
        "max_u": u.max_abs(),
        "max_v": v.max(),
        "dirichlet_energy": dirichlet_energy(&u),
    });
    let checks = vec![Check::at_most("cg_relative_residual", rep.residual_rel, rep.tolerance)];
    art.u = Some(u);
    art.v = Some(v);
    Ok(Stage::new(STAGE, checks, data))
}

fn rearrangement_stage(cfg: &RunConfig, grid: Grid, art: &mut Artifacts) -> Result<(Stage, f64, Field64), RunError> {
    const STAGE: &str = "rearrangement";
    let mass = cfg.mass.unwrap_or(0.5 * CROSS_MEASURE);
    let sol = frank_wolfe(mass, grid, &fw_options(cfg)).map_err(core_err(STAGE))?;
    if !sol.certified {
        return Err(RunError::NotConverged {
            stage: STAGE,
            reason: format!(
                "relative Frank-Wolfe gap {:e} after {} iterations",
                sol.relative_gap(),
                sol.iterations
            ),
        });
    }
    let rep = verify_structure(&sol, STRUCTURE_DELTA * sol.alpha, STRUCTURE_DELTA).map_err(core_err(STAGE))?;
    let checks = vec![
        Check::at_most("relative_fw_gap", sol.relative_gap(), cfg.tolerances.gap_tol),
        Check::flag("plateau_bound", rep.a_pass),
        Check::flag("saturated_below_plateau", rep.b_pass),
        Check::flag("plateau_on_unsaturated_set", rep.c_pass),
        Check::flag("non_bang_bang_set_positive", rep.e_pass),
    ];
    let data = json!({
        "mass": mass,
        "alpha": sol.alpha,
        "objective": sol.objective,
        "fw_gap": sol.fw_gap,
        "iterations": sol.iterations,
        "polished": sol.polished,
        "structure": rep,
    });
    art.f = Some(sol.f_hat.as_reduced().clone());
    art.v = Some(sol.v_hat.clone());
    art.u = Some(sol.u_hat.clone());
    Ok((Stage::new(STAGE, checks, data), sol.alpha, sol.u_hat))
}

fn invariant_checks(s: &ObstacleSolution64, alpha: f64) -> (Vec<Check>, Value) {
    let inv = invariants(s);
    let checks = vec![
        Check::at_least("min_v", inv.min_v, -TOL_V_REL * alpha.max(f64::MIN_POSITIVE)),
        Check::at_least("min_column_laplacian", inv.min_laplacian, -TOL_LAPLACIAN),
        Check::at_most("max_column_laplacian", inv.max_laplacian, 1.0 + TOL_LAPLACIAN),
        Check::at_least(
            "min_column_laplacian_where_v_positive",
            inv.min_laplacian_positive_set,
            1.0 - TOL_LAPLACIAN,
        ),
        Check::at_most("laplacian_axial_variation", inv.axial_variation, TOL_LAPLACIAN),
    ];
    (checks, json!({ "summary": s.summary(), "invariants": inv, "tol_v": s.tol_v }))
}

fn obstacle_stage(cfg: &RunConfig, grid: Grid, art: &mut Artifacts) -> Result<Stage, RunError> {
    const STAGE: &str = "obstacle";
    let p = ObstacleProblem::new(grid, boundary_data(cfg, grid)).map_err(core_err(STAGE))?;
    let s = certified_obstacle(STAGE, &p, &obstacle_options(cfg))?;
    let (checks, data) = invariant_checks(&s, p.scale());
    art.f = Some(s.laplacian_u.clone());
    art.v = Some(s.v.clone());
    art.u = Some(s.u);
    Ok(Stage::new(STAGE, checks, data))
}

fn comparison_stage(
    stage: &'static str,
    pairs: &[(f64, f64)],
    grid: Grid,
    opts: &ObstacleOptions,
    art: Option<&mut Artifacts>,
) -> Result<Stage, RunError> {
    let mut checks = Vec::new();
    let mut reports = Vec::new();
    let mut last = None;
    for &(a1, a2) in pairs {
        let (s1, s2) = solve_pair(a1, a2, grid, opts).map_err(core_err(stage))?;
        if !(s1.certified && s2.certified) {
            return Err(RunError::NotConverged {
                stage,
                reason: format!("obstacle solve for ({a1}, {a2}) did not certify"),
            });
        }
        let rep = comparison_of(&s1, &s2, a1, a2);
        let tag = format!("({a1:.6}, {a2:.6})");
        checks.push(Check::at_most(
            &format!("max_v1_minus_v2 {tag}"),
            rep.max_v_diff,
            TOL_V_REL * a2,
        ));
        checks.push(Check::at_most(
            &format!("nesting_defect_outside_band {tag}"),
            rep.nesting_defect_outside_band as f64,
            0.0,
        ));
        reports.push(rep);
        last = Some(s2);
    }
    if let (Some(art), Some(s2)) = (art, last) {
        art.v = Some(s2.v.clone());
        art.u = Some(s2.u);
    }
    Ok(Stage::new(stage, checks, json!({ "pairs": reports })))
}

fn compare_stage(cfg: &RunConfig, grid: Grid, art: &mut Artifacts) -> Result<Stage, RunError> {
    let pair = (cfg.alpha1.expect("validated"), cfg.alpha2.expect("validated"));
    comparison_stage("compare", &[pair], grid, &obstacle_options(cfg), Some(art))
}

fn counterexample_checks(rep: &cylobst::CounterexampleReport) -> Vec<Check> {
    vec![
        Check::flag("certified", rep.certified),
        Check::at_least("excess", rep.excess, 1e3 * rep.solver_tol),
        Check::at_most("column_integral_1", rep.max_column_integral_1, TOL_V_REL * rep.alpha2),
        Check::at_most("column_integral_2", rep.max_column_integral_2, TOL_V_REL * rep.alpha2),
    ]
}

const LADDER_RATIO: f64 = 0.5;
const LADDER_STEPS: usize = 12;
const LADDER_FRACTION: f64 = 0.5;

fn counterexample_stage(cfg: &RunConfig, grid: Grid) -> Result<Stage, RunError> {
    const STAGE: &str = "counterexample";
    let opts = obstacle_options(cfg);
    let rep = match (cfg.alpha1, cfg.alpha2) {
        (Some(a1), Some(a2)) => comparison_counterexample(a1, a2, grid, &opts),
        _ => counterexample_search::<f64>(
            grid,
            &opts,
            cfg.alpha.unwrap_or(0.2),
            LADDER_RATIO,
            LADDER_STEPS,
            LADDER_FRACTION,
        ),
    }
    .map_err(core_err(STAGE))?;
    Ok(Stage::new(STAGE, counterexample_checks(&rep), json!(rep)))
}

/// Smooth density in `[0, 1]` used by the energy-identity stage.
fn smooth_density(grid: Grid) -> ReducedField64 {
    ReducedField64::from_fn(grid, |x| {
        let s: f64 = x.iter().map(|&xi| (3.0 * PI * xi).sin() + 0.5 * (5.0 * PI * xi).cos()).sum();
        (0.5 + 0.25 * s).clamp(0.0, 1.0)
    })
}

fn mms_error(d: usize, n: usize, tol: f64) -> Result<f64, cylobst::Error> {
    let g = Grid::new(d, n, n)?;
    let k = (d + 1) as f64;
    let exact = |x: &[f64], xn: f64| x.iter().map(|&xi| (PI * xi).sin()).product::<f64>() * (PI * xn).sin();
    let f = Field64::from_fn(g, |x, xn| k * PI * PI * exact(x, xn));
    let (u, _) = solve_dirichlet(&PoissonProblem::homogeneous(Rhs::Full(f)), tol)?;
    Ok(u.max_diff(&Field64::from_fn(g, exact)))
}

fn verify(cfg: &RunConfig, grid: Grid, art: &mut Artifacts) -> Result<Vec<Stage>, RunError> {
    let d = grid.d_cross();
    let cg_tol = cfg.tolerances.cg_tol.min(1e-12);
    let mut stages = Vec::new();

    // Poisson MMS convergence
    let n = if d == 1 { 17 } else { 9 };
    let (e1, e2) = (
        mms_error(d, n, cg_tol).map_err(core_err("poisson-mms"))?,
        mms_error(d, 2 * n - 1, cg_tol).map_err(core_err("poisson-mms"))?,
    );
    stages.push(Stage::new(
        "poisson-mms",
        vec![Check::within("error_ratio", e1 / e2, 3.5, 4.5)],
        json!({ "n": [n, 2 * n - 1], "max_errors": [e1, e2] }),
    ));

    // energy identity under refinement
    let mut defects = Vec::new();
    let mut sizes = Vec::new();
    for k in [4, 2, 1] {
        let nc = (grid.n_cross() / k).max(3);
        let na = (grid.n_axial() / k).max(3);
        let g = Grid::new(d, nc, na).map_err(core_err("energy-identity"))?;
        let (phi, u) = energy_phi_with(&smooth_density(g), cg_tol).map_err(core_err("energy-identity"))?;
        let e = dirichlet_energy(&u);
        defects.push((phi - e).abs() / e.abs().max(f64::MIN_POSITIVE));
        sizes.push(nc);
    }
    let floor = 1e-8;
    let monotone = defects.windows(2).all(|w| w[1] <= w[0].max(floor));
    stages.push(Stage::new(
        "energy-identity",
        vec![
            Check::at_most("relative_defect", *defects.last().expect("three grids"), TOL_ENERGY),
            Check::flag("defect_non_increasing", monotone),
        ],
        json!({ "n_cross": sizes, "relative_defects": defects, "floor": floor }),
    ));

    // axial symmetry
    let (u1, _) = solve_reduced(&ReducedField64::constant(grid, 1.0), cg_tol).map_err(core_err("symmetry"))?;
    let asym = u1.max_diff(&u1.reflect_axial()) / u1.max_abs();
    stages.push(Stage::new(
        "symmetry",
        vec![Check::at_most("relative_asymmetry", asym, TOL_SYMMETRY)],
        json!({ "max_u": u1.max_abs() }),
    ));
    let linear_threshold = average_vertical(&u1).max();

    // Frank-Wolfe certificate and plateau structure
    let (fw, alpha, u_hat) = rearrangement_stage(cfg, grid, art)?;
    stages.push(fw);

    // obstacle invariants at the plateau value
    let opts = obstacle_options(cfg);
    let p = ObstacleProblem::constant(grid, alpha).map_err(core_err("obstacle-invariants"))?;
    let s = certified_obstacle("obstacle-invariants", &p, &opts)?;
    let s0 = solve_obstacle_from(&p, &opts, Field64::zeros(grid)).map_err(core_err("obstacle-invariants"))?;
    let (mut checks, mut data) = invariant_checks(&s, alpha);
    let agreement = s.u.max_diff(&s0.u);
    checks.push(Check::flag("second_start_certified", s0.certified));
    checks.push(Check::at_most("initialisation_agreement", agreement, 10.0 * opts.tol));
    data["initialisation_agreement"] = json!(agreement);
    stages.push(Stage::new("obstacle-invariants", checks, data));

    // obstacle solution against the rearrangement optimum
    let gap = s.u.max_diff(&u_hat.map(|x| alpha - x));
    stages.push(Stage::new(
        "rearrangement-obstacle-equivalence",
        vec![Check::at_most("max_abs_difference", gap, TOL_EQUIVALENCE * alpha)],
        json!({ "alpha": alpha }),
    ));

    // comparison principle, empty and partial coincidence
    let a_lin = 1.25 * linear_threshold;
    let pairs = [(0.5 * alpha, alpha), (alpha, a_lin), (a_lin, 2.0 * a_lin)];
    stages.push(comparison_stage("comparison", &pairs, grid, &opts, None)?);

    // pointwise comparison fails for u
    let rep = counterexample_search::<f64>(grid, &opts, alpha, LADDER_RATIO, LADDER_STEPS, LADDER_FRACTION)
        .map_err(core_err("counterexample"))?;
    stages.push(Stage::new("counterexample", counterexample_checks(&rep), json!(rep)));

    // free boundary of the plateau solve and the half-plane reference
    let fb_opts = FreeBoundaryOptions::for_grid(&grid);
    let fb = analyze_free_boundary(&s, &fb_opts).map_err(core_err("free-boundary"))?;
    let hp = Grid::new(2, 128, 3).map_err(core_err("free-boundary"))?;
    let hv = ReducedField64::from_fn(hp, |x| (x[0] - 0.5).max(0.0));
    let href = analyze_coincidence(&hv, &ReducedField64::constant(hp, 1.0), 0.0, &FreeBoundaryOptions::for_grid(&hp))
        .map_err(core_err("free-boundary"))?;
    let half_plane = href
        .nodes
        .iter()
        .filter(|n| n.x[1] >= 0.25 && n.x[1] <= 0.75)
        .map(|n| (n.ratios[0].1 - 0.5).abs())
        .fold(0.0, f64::max);
    stages.push(Stage::new(
        "free-boundary",
        vec![
            Check::flag("ratios_in_unit_interval", fb.ratios_in_unit_interval()),
            Check::at_least("min_h", fb.min_h, -FB_TOL_H),
            Check::at_most("half_plane_ratio_deviation", half_plane, 0.05),
        ],
        json!({
            "fb_nodes": fb.nodes.len(),
            "coincidence_nodes": fb.coincidence_nodes,
            "regular": fb.regular,
            "singular_candidates": fb.singular_candidates,
            "degenerate": fb.degenerate,
        }),
    ));
    art.extra.push(("free_boundary.csv", fb.to_csv(&grid)));
    art.v = Some(s.v.clone());
    art.u = Some(s.u);
    Ok(stages)
}

fn summary_text(cfg: &RunConfig, outcome: &Outcome) -> String {
    let mut s = format!(
        "cylobst {} | problem {} | grid d={} n_cross={} n_axial={} | config {}\n",
        env!("CARGO_PKG_VERSION"),
        cfg.problem,
        cfg.grid.d_cross,
        cfg.grid.n_cross,
        cfg.grid.n_axial,
        &cfg.hash()[..12]
    );
    for st in &outcome.stages {
        s.push_str(&format!("{} {}\n", if st.passed { "PASS" } else { "FAIL" }, st.name));
        for c in &st.checks {
            s.push_str(&format!(
                "    {} {} = {:e} ({})\n",
                if c.passed { "ok  " } else { "FAIL" },
                c.name,
                c.value,
                c.bound
            ));
        }
    }
    s.push_str(if outcome.passed() { "overall PASS\n" } else { "overall FAIL\n" });
    s
}

fn write_artifacts(cfg: &RunConfig, outcome: &Outcome, art: &Artifacts) -> Result<(), RunError> {
    let dir = &outcome.out_dir;
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| RunError::Io { path, source }
    };
    fs::create_dir_all(dir).map_err(io(dir))?;
    let mut files: Vec<(&str, String)> = Vec::new();
    if let Some(u) = &art.u {
        files.push(("u.csv", field_to_csv(u)));
    }
    if let Some(v) = &art.v {
        files.push(("v.csv", reduced_to_csv(v)));
    }
    if let Some(f) = &art.f {
        files.push(("f.csv", reduced_to_csv(f)));
    }
    files.extend(art.extra.iter().cloned());
    let report = json!({
        "tool": "cylobst",
        "version": env!("CARGO_PKG_VERSION"),
        "problem": cfg.problem,
        "config_hash": cfg.hash(),
        "config": RunConfig { output_dir: None, ..cfg.clone() },
        "tolerances": {
            "cg_tol": cfg.tolerances.cg_tol,
            "gap_tol": cfg.tolerances.gap_tol,
            "obstacle_tol": cfg.tolerances.obstacle_tol,
            "tol_v": cfg.tolerances.tol_v,
            "laplacian": TOL_LAPLACIAN,
            "v_relative": TOL_V_REL,
            "symmetry": TOL_SYMMETRY,
            "energy": TOL_ENERGY,
            "equivalence": TOL_EQUIVALENCE,
            "structure_delta": STRUCTURE_DELTA,
            "free_boundary_h": FB_TOL_H,
        },
        "passed": outcome.passed(),
        "stages": outcome.stages,
    });
    files.push(("report.json", serde_json::to_string_pretty(&report).expect("report serialises") + "\n"));
    files.push(("summary.txt", summary_text(cfg, outcome)));
    for (name, body) in files {
        let path = dir.join(name);
        fs::write(&path, body).map_err(io(&path))?;
    }
    Ok(())
}
