//! Run configuration: a JSON object with flat keys plus the `grid` and
//! `tolerances` sub-objects.
//!
//! ```json
//! {
//!   "problem": "obstacle",
//!   "grid": { "d_cross": 1, "n_cross": 64, "n_axial": 33 },
//!   "alpha": 0.02,
//!   "tolerances": { "obstacle_tol": 1e-6 }
//! }
//! ```

use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

/// Measure of the cross-section `D = (0,1)^d`.
pub const CROSS_MEASURE: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Problem {
    Poisson,
    Rearrangement,
    Obstacle,
    Compare,
    Counterexample,
    Verify,
}

impl Problem {
    pub fn as_str(self) -> &'static str {
        match self {
            Problem::Poisson => "poisson",
            Problem::Rearrangement => "rearrangement",
            Problem::Obstacle => "obstacle",
            Problem::Compare => "compare",
            Problem::Counterexample => "counterexample",
            Problem::Verify => "verify",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            Problem::Poisson,
            Problem::Rearrangement,
            Problem::Obstacle,
            Problem::Compare,
            Problem::Counterexample,
            Problem::Verify,
        ]
        .into_iter()
        .find(|p| p.as_str() == s)
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub d_cross: usize,
    pub n_cross: usize,
    pub n_axial: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            d_cross: 1,
            n_cross: 64,
            n_axial: 33,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub cg_tol: f64,
    pub gap_tol: f64,
    pub obstacle_tol: f64,
    /// Coincidence threshold; `None` means `1e-6 * max(scale, 1)`.
    pub tol_v: Option<f64>,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            cg_tol: 1e-10,
            gap_tol: 1e-4,
            obstacle_tol: 1e-6,
            tol_v: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub problem: Problem,
    pub grid: GridSpec,
    /// Total mass of the density, `0 < mass <= |D|`.
    pub mass: Option<f64>,
    /// Obstacle data on the bottom face (and on the top face unless `alpha_top` is set).
    pub alpha: Option<f64>,
    pub alpha_top: Option<f64>,
    /// Lateral data `g = (1-xn) alpha + xn alpha_top + lateral_bump sin(pi xn)`.
    pub lateral_bump: f64,
    pub alpha1: Option<f64>,
    pub alpha2: Option<f64>,
    pub tolerances: Tolerances,
    pub output_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(problem: Problem) -> Self {
        RunConfig {
            problem,
            grid: GridSpec::default(),
            mass: None,
            alpha: None,
            alpha_top: None,
            lateral_bump: 0.0,
            alpha1: None,
            alpha2: None,
            tolerances: Tolerances::default(),
            output_dir: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }

    /// SHA-256 of the canonical JSON form, ignoring `output_dir`.
    pub fn hash(&self) -> String {
        let canonical = RunConfig {
            output_dir: None,
            ..self.clone()
        };
        let digest = Sha256::digest(serde_json::to_vec(&canonical).expect("config serialises"));
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let g = &self.grid;
        if !(1..=2).contains(&g.d_cross) {
            return Err(ConfigError::new("grid.d_cross", "must be 1 or 2"));
        }
        if g.n_cross < 3 {
            return Err(ConfigError::new("grid.n_cross", "must be at least 3"));
        }
        if g.n_axial < 3 {
            return Err(ConfigError::new("grid.n_axial", "must be at least 3"));
        }
        let t = &self.tolerances;
        for (key, val) in [
            ("tolerances.cg_tol", Some(t.cg_tol)),
            ("tolerances.gap_tol", Some(t.gap_tol)),
            ("tolerances.obstacle_tol", Some(t.obstacle_tol)),
            ("tolerances.tol_v", t.tol_v),
        ] {
            if let Some(x) = val {
                if !(x.is_finite() && x > 0.0) {
                    return Err(ConfigError::new(key, format!("must be positive, got {x}")));
                }
            }
        }
        for (key, val) in [
            ("alpha", self.alpha),
            ("alpha_top", self.alpha_top),
            ("alpha1", self.alpha1),
            ("alpha2", self.alpha2),
        ] {
            if let Some(x) = val {
                if !(x.is_finite() && x >= 0.0) {
                    return Err(ConfigError::new(key, format!("must be non-negative, got {x}")));
                }
            }
        }
        if !self.lateral_bump.is_finite() {
            return Err(ConfigError::new("lateral_bump", "must be finite"));
        }
        if let Some(m) = self.mass {
            if !(m > 0.0 && m <= CROSS_MEASURE) {
                return Err(ConfigError::new(
                    "mass",
                    format!("must lie in (0, |D|] = (0, {CROSS_MEASURE}], got {m}"),
                ));
            }
        }
        match self.problem {
            Problem::Rearrangement if self.mass.is_none() => Err(ConfigError::missing("mass")),
            Problem::Obstacle if self.alpha.is_none() => Err(ConfigError::missing("alpha")),
            Problem::Compare => {
                let a1 = self.alpha1.ok_or_else(|| ConfigError::missing("alpha1"))?;
                let a2 = self.alpha2.ok_or_else(|| ConfigError::missing("alpha2"))?;
                if a1 > a2 {
                    return Err(ConfigError::new(
                        "alpha1",
                        format!("requires alpha1 <= alpha2, got {a1} > {a2}"),
                    ));
                }
                if a1 <= 0.0 {
                    return Err(ConfigError::new("alpha1", "must be positive"));
                }
                Ok(())
            }
            Problem::Counterexample => match (self.alpha1, self.alpha2) {
                (Some(a1), Some(a2)) if a1 > a2 || a1 <= 0.0 => Err(ConfigError::new(
                    "alpha1",
                    format!("requires 0 < alpha1 <= alpha2, got {a1}, {a2}"),
                )),
                (Some(_), None) => Err(ConfigError::missing("alpha2")),
                (None, Some(_)) => Err(ConfigError::missing("alpha1")),
                _ => Ok(()),
            },
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("config key `{key}`: {message}")]
pub struct ConfigError {
    pub key: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(key: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError {
            key: key.into(),
            message: message.into(),
        }
    }

    fn missing(key: &str) -> Self {
        ConfigError::new(key, "required for this problem but missing")
    }
}

const TOP_KEYS: &[&str] = &[
    "problem",
    "grid",
    "mass",
    "alpha",
    "alpha_top",
    "lateral_bump",
    "alpha1",
    "alpha2",
    "tolerances",
    "output_dir",
];
const GRID_KEYS: &[&str] = &["d_cross", "n_cross", "n_axial"];
const TOL_KEYS: &[&str] = &["cg_tol", "gap_tol", "obstacle_tol", "tol_v"];

fn check_keys(obj: &Map<String, Value>, allowed: &[&str], prefix: &str) -> Result<(), ConfigError> {
    match obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(ConfigError::new(format!("{prefix}{k}"), "unknown key")),
        None => Ok(()),
    }
}

fn real(obj: &Map<String, Value>, key: &str, path: &str) -> Result<Option<f64>, ConfigError> {
    match obj.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(v) => v
            .as_f64()
            .map(Some)
            .ok_or_else(|| ConfigError::new(path, format!("expected a number, got {v}"))),
    }
}

fn count(obj: &Map<String, Value>, key: &str, path: &str) -> Result<Option<usize>, ConfigError> {
    match obj.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(v) => v
            .as_u64()
            .and_then(|n| usize::try_from(n).ok())
            .map(Some)
            .ok_or_else(|| ConfigError::new(path, format!("expected a non-negative integer, got {v}"))),
    }
}

fn section<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<Option<&'a Map<String, Value>>, ConfigError> {
    match obj.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(Value::Object(m)) => Ok(Some(m)),
        Some(v) => Err(ConfigError::new(key, format!("expected an object, got {v}"))),
    }
}

/// Parses and validates a config; errors name the first offending key.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let root: Value = serde_json::from_str(text).map_err(|e| ConfigError::new("<root>", e.to_string()))?;
    let obj = root
        .as_object()
        .ok_or_else(|| ConfigError::new("<root>", "expected a JSON object"))?;
    check_keys(obj, TOP_KEYS, "")?;

    let problem = match obj.get("problem") {
        None => return Err(ConfigError::missing("problem")),
        Some(Value::String(s)) => Problem::parse(s).ok_or_else(|| {
            ConfigError::new(
                "problem",
                format!("unknown problem `{s}` (poisson, rearrangement, obstacle, compare, counterexample, verify)"),
            )
        })?,
        Some(v) => return Err(ConfigError::new("problem", format!("expected a string, got {v}"))),
    };
    let mut cfg = RunConfig::new(problem);

    if let Some(g) = section(obj, "grid")? {
        check_keys(g, GRID_KEYS, "grid.")?;
        let d = GridSpec::default();
        cfg.grid = GridSpec {
            d_cross: count(g, "d_cross", "grid.d_cross")?.unwrap_or(d.d_cross),
            n_cross: count(g, "n_cross", "grid.n_cross")?.unwrap_or(d.n_cross),
            n_axial: count(g, "n_axial", "grid.n_axial")?.unwrap_or(d.n_axial),
        };
    }
    if let Some(t) = section(obj, "tolerances")? {
        check_keys(t, TOL_KEYS, "tolerances.")?;
        let d = Tolerances::default();
        cfg.tolerances = Tolerances {
            cg_tol: real(t, "cg_tol", "tolerances.cg_tol")?.unwrap_or(d.cg_tol),
            gap_tol: real(t, "gap_tol", "tolerances.gap_tol")?.unwrap_or(d.gap_tol),
            obstacle_tol: real(t, "obstacle_tol", "tolerances.obstacle_tol")?.unwrap_or(d.obstacle_tol),
            tol_v: real(t, "tol_v", "tolerances.tol_v")?,
        };
    }
    cfg.mass = real(obj, "mass", "mass")?;
    cfg.alpha = real(obj, "alpha", "alpha")?;
    cfg.alpha_top = real(obj, "alpha_top", "alpha_top")?;
    cfg.lateral_bump = real(obj, "lateral_bump", "lateral_bump")?.unwrap_or(0.0);
    cfg.alpha1 = real(obj, "alpha1", "alpha1")?;
    cfg.alpha2 = real(obj, "alpha2", "alpha2")?;
    cfg.output_dir = match obj.get("output_dir") {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => Some(PathBuf::from(s)),
        Some(v) => return Err(ConfigError::new("output_dir", format!("expected a string, got {v}"))),
    };
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_obstacle_config_gets_defaults() {
        let cfg = parse_config(r#"{"problem": "obstacle", "alpha": 0.02}"#).unwrap();
        assert_eq!(cfg.grid, GridSpec::default());
        assert_eq!(cfg.tolerances, Tolerances::default());
        assert_eq!(cfg.alpha, Some(0.02));
    }

    #[test]
    fn errors_name_the_key() {
        let e = parse_config(r#"{"problem": "rearrangement", "mass": 1.5}"#).unwrap_err();
        assert_eq!(e.key, "mass");
        let e = parse_config(r#"{"problem": "rearrangement"}"#).unwrap_err();
        assert_eq!(e.key, "mass");
        let e = parse_config(r#"{"problem": "verify", "grid": {"n_cross": 2}}"#).unwrap_err();
        assert_eq!(e.key, "grid.n_cross");
        let e = parse_config(r#"{"problem": "verify", "grid": {"n_cross": "x"}}"#).unwrap_err();
        assert_eq!(e.key, "grid.n_cross");
        let e = parse_config(r#"{"problem": "verify", "tolerances": {"gap_tol": 0}}"#).unwrap_err();
        assert_eq!(e.key, "tolerances.gap_tol");
        let e = parse_config(r#"{"problem": "verify", "colour": 1}"#).unwrap_err();
        assert_eq!(e.key, "colour");
        let e = parse_config(r#"{"problem": "compare", "alpha1": 0.5, "alpha2": 0.1}"#).unwrap_err();
        assert_eq!(e.key, "alpha1");
        assert!(parse_config("[1]").is_err());
    }

    #[test]
    fn round_trip() {
        let text = r#"{
            "problem": "verify",
            "grid": {"d_cross": 1, "n_cross": 32, "n_axial": 17},
            "mass": 0.5,
            "alpha1": 0.01, "alpha2": 0.02,
            "tolerances": {"cg_tol": 1e-10, "gap_tol": 1e-4, "obstacle_tol": 1e-6, "tol_v": 1e-7},
            "output_dir": "out"
        }"#;
        let cfg = parse_config(text).unwrap();
        let again = parse_config(&cfg.to_json()).unwrap();
        assert_eq!(cfg, again);
        assert_eq!(cfg.hash(), again.hash());
        let moved = RunConfig {
            output_dir: Some("elsewhere".into()),
            ..cfg.clone()
        };
        assert_eq!(cfg.hash(), moved.hash());
        let other = RunConfig { mass: Some(0.4), ..cfg };
        assert_ne!(other.hash(), moved.hash());
    }
}
