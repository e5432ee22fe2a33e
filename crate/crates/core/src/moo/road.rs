//! The road alignment as a bi-objective black box, and its feasible seed.

use crate::alignment::{stations, vertical_variable_count, AlignmentDesign, HorizontalGeometry};
use crate::constraints::{check_all, ConstraintConfig, ConstraintReport};
use crate::costing::{evaluate_costs, CostBreakdown, CostParameters};
use crate::error::{Error, Result};
use crate::geom::{Point2, Point3};
use crate::terrain::TerrainGrid;

use super::{BiObjectiveProblem, Evaluation};

/// Fraction of the grade limit used when seeding, leaving room for rounding.
const SEED_GRADE_MARGIN: f64 = 0.999;

/// Full evaluation of one design.
#[derive(Debug, Clone)]
pub struct DesignEvaluation {
    pub design: AlignmentDesign,
    pub geometry: HorizontalGeometry,
    pub costs: CostBreakdown,
    pub constraints: ConstraintReport,
}

/// Terrain, fixed endpoints, subdivision counts, costs and constraints.
#[derive(Debug, Clone)]
pub struct RoadProblem {
    terrain: TerrainGrid,
    start: Point3,
    end: Point3,
    m: Vec<usize>,
    costs: CostParameters,
    constraints: ConstraintConfig,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl RoadProblem {
    /// `m` has one entry per tangent (N + 1); `r_max` bounds the radius variables.
    pub fn new(
        terrain: TerrainGrid,
        start: Point3,
        end: Point3,
        m: Vec<usize>,
        costs: CostParameters,
        constraints: ConstraintConfig,
        r_max: f64,
    ) -> Result<Self> {
        costs.validate()?;
        constraints.validate()?;
        let n = constraints.boxes.len();
        if n == 0 {
            return Err(Error::InvalidParameter {
                name: "boxes",
                reason: "at least one IP is required".into(),
            });
        }
        if m.len() != n + 1 || m.iter().any(|&mk| mk == 0) {
            return Err(Error::InvalidParameter {
                name: "m",
                reason: format!("need {} positive subdivision counts, got {:?}", n + 1, m),
            });
        }
        if !(r_max >= constraints.r_min && r_max.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "r_max",
                reason: format!("must be finite and ≥ r_min = {}, got {r_max}", constraints.r_min),
            });
        }
        for (name, p) in [("start", start), ("end", end)] {
            if !terrain.contains(p.x, p.y) {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("({}, {}) lies outside the terrain", p.x, p.y),
                });
            }
        }
        let (z_lo, z_hi) = terrain.elevation_range();
        let n_z = vertical_variable_count(&m);
        let mut lower = Vec::with_capacity(3 * n + n_z);
        let mut upper = Vec::with_capacity(3 * n + n_z);
        for b in &constraints.boxes {
            lower.push(b.x_lo);
            upper.push(b.x_hi);
        }
        for b in &constraints.boxes {
            lower.push(b.y_lo);
            upper.push(b.y_hi);
        }
        lower.extend(std::iter::repeat(constraints.r_min).take(n));
        upper.extend(std::iter::repeat(r_max).take(n));
        lower.extend(std::iter::repeat(z_lo - constraints.z_bar).take(n_z));
        upper.extend(std::iter::repeat(z_hi + constraints.z_bar).take(n_z));
        Ok(Self {
            terrain,
            start,
            end,
            m,
            costs,
            constraints,
            lower,
            upper,
        })
    }

    pub fn terrain(&self) -> &TerrainGrid {
        &self.terrain
    }

    pub fn start(&self) -> Point3 {
        self.start
    }

    pub fn end(&self) -> Point3 {
        self.end
    }

    pub fn m(&self) -> &[usize] {
        &self.m
    }

    pub fn costs(&self) -> &CostParameters {
        &self.costs
    }

    pub fn constraints(&self) -> &ConstraintConfig {
        &self.constraints
    }

    pub fn design_from_flat(&self, x: &[f64]) -> Result<AlignmentDesign> {
        AlignmentDesign::from_flat(self.start, self.end, &self.m, x)
    }

    /// Geometry, costs and constraint report of `design`.
    pub fn evaluate_design(&self, design: &AlignmentDesign) -> Result<DesignEvaluation> {
        let geometry = design.build_horizontal()?;
        let constraints = check_all(design, &geometry, &self.terrain, &self.constraints)?;
        let costs = evaluate_costs(design, &geometry, &self.terrain, &self.costs)?;
        Ok(DesignEvaluation {
            design: design.clone(),
            geometry,
            costs,
            constraints,
        })
    }

    pub fn evaluate_flat(&self, x: &[f64]) -> Result<DesignEvaluation> {
        self.evaluate_design(&self.design_from_flat(x)?)
    }
}

/// `Σ v²` over violations above the feasibility tolerance.
pub fn infeasibility(report: &ConstraintReport) -> f64 {
    report.violated().map(|v| v.value * v.value).sum()
}

impl BiObjectiveProblem for RoadProblem {
    fn dimension(&self) -> usize {
        self.lower.len()
    }

    fn bounds(&self) -> (&[f64], &[f64]) {
        (&self.lower, &self.upper)
    }

    fn evaluate(&self, x: &[f64]) -> Evaluation {
        match self.evaluate_flat(x) {
            Ok(e) => Evaluation {
                objectives: e.costs.objectives(),
                infeasibility: infeasibility(&e.constraints),
            },
            Err(_) => Evaluation::failed(),
        }
    }
}

/// A feasible starting design: IPs spread evenly along the start–end line (or at
/// their box centres), small radii, and a grade-limited profile that stays as
/// close to the ground as the grade allows.
pub fn seed_alignment(problem: &RoadProblem) -> Result<AlignmentDesign> {
    let cfg = problem.constraints();
    let n = cfg.boxes.len();
    let (start, end) = (problem.start(), problem.end());

    let mut x = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for (i, b) in cfg.boxes.iter().enumerate() {
        let p = start.xy().lerp(end.xy(), (i + 1) as f64 / (n + 1) as f64);
        let (px, py) = if b.contains(p.x, p.y) { (p.x, p.y) } else { b.center() };
        x.push(px);
        y.push(py);
    }
    let pts: Vec<Point2> = std::iter::once(start.xy())
        .chain(x.iter().zip(&y).map(|(&a, &b)| Point2::new(a, b)))
        .chain(std::iter::once(end.xy()))
        .collect();
    let r_max = problem.bounds().1[2 * n];
    let r: Vec<f64> = (1..=n)
        .map(|k| {
            let chord = pts[k].distance(pts[k - 1]).min(pts[k].distance(pts[k + 1]));
            (0.1 * chord).max(cfg.r_min).min(r_max)
        })
        .collect();

    let m = problem.m().to_vec();
    let n_z = vertical_variable_count(&m);
    let mut design = AlignmentDesign::new(start, end, x, y, r, vec![0.0; n_z], m)
        .map_err(|e| Error::Seeding(format!("initial plan: {e}")))?;
    let geom = design
        .build_horizontal()
        .map_err(|e| Error::Seeding(format!("initial plan: {e}")))?;

    // Stations in travel order with the horizontal run from the previous one.
    let st = stations(&design, &geom);
    let mut run = Vec::with_capacity(st.len());
    let mut target = Vec::with_capacity(st.len());
    for (i, s) in st.iter().enumerate() {
        run.push(if i == 0 {
            0.0
        } else if s.j == 0 {
            geom.curve(s.k).plan_length()
        } else {
            s.spacing
        });
        target.push(match s.z_index {
            Some(_) => problem
                .terrain()
                .ground_elevation(s.point.x, s.point.y)
                .map_err(|e| Error::Seeding(format!("station ({}, {}): {e}", s.k, s.j)))?,
            None => s.point.z,
        });
    }
    let g = SEED_GRADE_MARGIN * cfg.max_grade;
    let total: f64 = run.iter().sum();
    if (end.z - start.z).abs() > g * total {
        return Err(Error::Seeding(format!(
            "endpoints differ by {} m over a {total} m run; the grade limit cannot be met",
            (end.z - start.z).abs()
        )));
    }

    // Keep every target reachable from both endpoints, then average the upper
    // and lower grade-limited envelopes: the closest grade-feasible profile in
    // the max norm.
    let mut from_start = 0.0;
    for i in 0..target.len() {
        from_start += run[i];
        let to_end = total - from_start;
        let lo = (start.z - g * from_start).max(end.z - g * to_end);
        let hi = (start.z + g * from_start).min(end.z + g * to_end);
        target[i] = target[i].clamp(lo, hi.max(lo));
    }
    let mut upper = target.clone();
    let mut lower = target.clone();
    for i in 1..target.len() {
        upper[i] = upper[i].min(upper[i - 1] + g * run[i]);
        lower[i] = lower[i].max(lower[i - 1] - g * run[i]);
    }
    for i in (0..target.len() - 1).rev() {
        upper[i] = upper[i].min(upper[i + 1] + g * run[i + 1]);
        lower[i] = lower[i].max(lower[i + 1] - g * run[i + 1]);
    }
    for (t, (u, l)) in target.iter_mut().zip(upper.iter().zip(&lower)) {
        *t = 0.5 * (u + l);
    }
    for (s, z) in st.iter().zip(&target) {
        if let Some(idx) = s.z_index {
            design.z[idx] = *z;
        }
    }

    let eval = problem
        .evaluate_design(&design)
        .map_err(|e| Error::Seeding(e.to_string()))?;
    if !eval.constraints.feasible {
        let worst = eval
            .constraints
            .violated()
            .max_by(|a, b| a.value.total_cmp(&b.value))
            .expect("infeasible report has a violation");
        return Err(Error::Seeding(format!(
            "seed violates {} by {}",
            worst.kind, worst.value
        )));
    }
    Ok(design)
}
