//! Run configuration, read from TOML.
//!
//! ```toml
//! [terrain]
//! path = "terrain.asc"          # relative to the config file
//!
//! [alignment]
//! start = [5.0, 500.0]          # x, y; optional third value fixes z, else ground
//! end = [495.0, 500.0]
//! n_ips = 6
//! m = 5                         # or one count per tangent: [5, 5, 5, 5, 5, 5, 5]
//!
//! [costs]                       # all optional
//! cut = 4.0
//!
//! [constraints]
//! r_min = 20.0
//! r_max = 200.0
//! max_grade = 0.15
//! z_bar = 10.0
//! box_half_width = 60.0         # or explicit `boxes = [{ x_lo = .., x_hi = .., y_lo = .., y_hi = .. }, ..]`
//!
//! [solver]
//! kind = "dms"                  # ws | dms | ea
//! budget = 51000
//! seed = 1
//!
//! [solver.ws]                   # optional blocks, one per kind
//! n_weights = 51
//!
//! [output]
//! dir = "out"
//! decameters = false
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::constraints::{ConstraintConfig, IpBox};
use crate::costing::CostParameters;
use crate::error::{Error, Result};
use crate::geom::{Point2, Point3};
use crate::moo::{DmsConfig, EaConfig, RoadProblem, WsConfig};
use crate::terrain::TerrainGrid;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TerrainSection {
    pub path: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Subdivisions {
    Uniform(usize),
    PerTangent(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlignmentSection {
    pub start: Vec<f64>,
    pub end: Vec<f64>,
    pub n_ips: usize,
    pub m: Subdivisions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintSection {
    pub r_min: f64,
    pub r_max: Option<f64>,
    pub max_grade: f64,
    pub z_bar: f64,
    #[serde(default)]
    pub boxes: Option<Vec<IpBox>>,
    #[serde(default)]
    pub box_half_width: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Ws,
    Dms,
    Ea,
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolverKind::Ws => "ws",
            SolverKind::Dms => "dms",
            SolverKind::Ea => "ea",
        })
    }
}

impl FromStr for SolverKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "ws" => Ok(SolverKind::Ws),
            "dms" => Ok(SolverKind::Dms),
            "ea" => Ok(SolverKind::Ea),
            other => Err(format!("unknown solver `{other}` (expected ws, dms or ea)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub kind: SolverKind,
    pub budget: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub ws: WsConfig,
    #[serde(default)]
    pub dms: DmsConfig,
    #[serde(default)]
    pub ea: EaConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_out")]
    pub dir: PathBuf,
    /// Write horizontal coordinates in decameters.
    #[serde(default)]
    pub decameters: bool,
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: default_out(),
            decameters: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub terrain: TerrainSection,
    pub alignment: AlignmentSection,
    #[serde(default)]
    pub costs: CostParameters,
    pub constraints: ConstraintSection,
    pub solver: SolverSection,
    #[serde(default)]
    pub output: OutputSection,
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

impl RunConfig {
    /// Parses and checks the config; relative paths are resolved against `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let mut cfg: RunConfig = toml::from_str(text).map_err(|e| config_err(e.to_string()))?;
        if cfg.terrain.path.is_relative() {
            cfg.terrain.path = base.join(&cfg.terrain.path);
        }
        if cfg.output.dir.is_relative() {
            cfg.output.dir = base.join(&cfg.output.dir);
        }
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base).map_err(|e| match e {
            Error::Config(msg) => config_err(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    fn check(&self) -> Result<()> {
        let a = &self.alignment;
        for (name, p) in [("alignment.start", &a.start), ("alignment.end", &a.end)] {
            if !(p.len() == 2 || p.len() == 3) || p.iter().any(|v| !v.is_finite()) {
                return Err(config_err(format!("`{name}` must be [x, y] or [x, y, z]")));
            }
        }
        if a.n_ips == 0 {
            return Err(config_err("`alignment.n_ips` must be at least 1"));
        }
        let m = self.subdivisions();
        if m.len() != a.n_ips + 1 || m.contains(&0) {
            return Err(config_err(format!(
                "`alignment.m` needs {} positive counts, got {:?}",
                a.n_ips + 1,
                m
            )));
        }
        let c = &self.constraints;
        match (&c.boxes, c.box_half_width) {
            (Some(b), None) if b.len() != a.n_ips => {
                return Err(config_err(format!(
                    "`constraints.boxes` has {} entries, expected {}",
                    b.len(),
                    a.n_ips
                )))
            }
            (Some(_), None) => {}
            (None, Some(h)) if h > 0.0 && h.is_finite() => {}
            (None, Some(h)) => {
                return Err(config_err(format!("`constraints.box_half_width` must be positive, got {h}")))
            }
            _ => {
                return Err(config_err(
                    "exactly one of `constraints.boxes` and `constraints.box_half_width` is required",
                ))
            }
        }
        self.costs.validate()?;
        self.constraint_config().validate()?;
        if let Some(r_max) = c.r_max {
            if !(r_max >= c.r_min) {
                return Err(config_err(format!("`constraints.r_max` {r_max} is below r_min")));
            }
        }
        let s = &self.solver;
        if s.kind == SolverKind::Ws && s.ws.n_weights == 0 {
            return Err(config_err("`solver.ws.n_weights` must be at least 1"));
        }
        if s.kind == SolverKind::Ea {
            self.ea_config().validate().map_err(|e| config_err(e.to_string()))?;
        }
        for (name, step) in [("ws", s.ws.initial_step), ("dms", s.dms.initial_step)] {
            if !(step > 0.0 && step.is_finite()) {
                return Err(config_err(format!("`solver.{name}.initial_step` must be positive")));
            }
        }
        Ok(())
    }

    pub fn subdivisions(&self) -> Vec<usize> {
        match &self.alignment.m {
            Subdivisions::Uniform(m) => vec![*m; self.alignment.n_ips + 1],
            Subdivisions::PerTangent(v) => v.clone(),
        }
    }

    fn plan_point(v: &[f64]) -> Point2 {
        Point2::new(v[0], v[1])
    }

    /// IP boxes: explicit, or squares around points evenly spaced on the start–end line.
    pub fn boxes(&self) -> Vec<IpBox> {
        if let Some(b) = &self.constraints.boxes {
            return b.clone();
        }
        let h = self.constraints.box_half_width.unwrap_or(0.0);
        let (s, e) = (Self::plan_point(&self.alignment.start), Self::plan_point(&self.alignment.end));
        let n = self.alignment.n_ips;
        (1..=n)
            .map(|k| {
                let p = s.lerp(e, k as f64 / (n + 1) as f64);
                IpBox { x_lo: p.x - h, x_hi: p.x + h, y_lo: p.y - h, y_hi: p.y + h }
            })
            .collect()
    }

    pub fn constraint_config(&self) -> ConstraintConfig {
        ConstraintConfig {
            boxes: self.boxes(),
            r_min: self.constraints.r_min,
            max_grade: self.constraints.max_grade,
            z_bar: self.constraints.z_bar,
        }
    }

    /// Radius upper bound; defaults to ten times `r_min`.
    pub fn r_max(&self) -> f64 {
        self.constraints.r_max.unwrap_or(10.0 * self.constraints.r_min)
    }

    pub fn ws_config(&self) -> WsConfig {
        WsConfig { budget: self.solver.budget, ..self.solver.ws.clone() }
    }

    pub fn dms_config(&self) -> DmsConfig {
        DmsConfig { budget: self.solver.budget, ..self.solver.dms.clone() }
    }

    pub fn ea_config(&self) -> EaConfig {
        EaConfig { budget: self.solver.budget, seed: self.solver.seed, ..self.solver.ea.clone() }
    }

    fn endpoint(terrain: &TerrainGrid, v: &[f64], name: &'static str) -> Result<Point3> {
        let z = match v.get(2) {
            Some(z) => *z,
            None => terrain.ground_elevation(v[0], v[1]).map_err(|_| Error::InvalidParameter {
                name,
                reason: format!("({}, {}) lies outside the terrain", v[0], v[1]),
            })?,
        };
        Ok(Point3::new(v[0], v[1], z))
    }

    /// Loads the terrain and assembles the optimization problem.
    pub fn build_problem(&self) -> Result<RoadProblem> {
        let terrain = TerrainGrid::load_ascii(&self.terrain.path)?;
        self.problem_on(terrain)
    }

    pub fn problem_on(&self, terrain: TerrainGrid) -> Result<RoadProblem> {
        let start = Self::endpoint(&terrain, &self.alignment.start, "start")?;
        let end = Self::endpoint(&terrain, &self.alignment.end, "end")?;
        RoadProblem::new(
            terrain,
            start,
            end,
            self.subdivisions(),
            self.costs.clone(),
            self.constraint_config(),
            self.r_max(),
        )
    }
}
