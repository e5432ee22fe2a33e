//! Feasibility checks. Every check reports a signed violation: `≤ 0` is
//! satisfied, `> 0` is the amount by which the limit is exceeded (metres, except
//! where noted).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::alignment::{stations, AlignmentDesign, HorizontalGeometry, SegmentId};
use crate::error::{Error, Result};
use crate::terrain::TerrainGrid;

/// Violations up to this magnitude still count as satisfied.
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// Admissible region for one IP.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IpBox {
    pub x_lo: f64,
    pub x_hi: f64,
    pub y_lo: f64,
    pub y_hi: f64,
}

impl IpBox {
    pub fn center(&self) -> (f64, f64) {
        (0.5 * (self.x_lo + self.x_hi), 0.5 * (self.y_lo + self.y_hi))
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.x_lo && x <= self.x_hi && y >= self.y_lo && y <= self.y_hi
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintConfig {
    pub boxes: Vec<IpBox>,
    pub r_min: f64,
    /// Maximum grade as a fraction (0.15 for 15 %).
    pub max_grade: f64,
    /// Allowed distance between road and ground elevation at each station.
    pub z_bar: f64,
}

impl ConstraintConfig {
    pub fn validate(&self) -> Result<()> {
        for (i, b) in self.boxes.iter().enumerate() {
            if !(b.x_lo <= b.x_hi && b.y_lo <= b.y_hi) {
                return Err(Error::InvalidParameter {
                    name: "boxes",
                    reason: format!("box {} has lower bound above upper bound", i + 1),
                });
            }
        }
        if !(self.r_min > 0.0) {
            return Err(Error::InvalidParameter {
                name: "r_min",
                reason: format!("must be positive, got {}", self.r_min),
            });
        }
        if !(self.max_grade > 0.0) {
            return Err(Error::InvalidParameter {
                name: "max_grade",
                reason: format!("must be positive, got {}", self.max_grade),
            });
        }
        if !(self.z_bar >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "z_bar",
                reason: format!("must be ≥ 0, got {}", self.z_bar),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// What a violation entry measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintKind {
    /// Box bound on coordinate `axis` of IP `ip` (1-based).
    Box { ip: usize, axis: Axis },
    /// Curves at both ends of chord `IP_k → IP_{k+1}` (`k ∈ 0..=N`) must not overlap.
    Overlap { chord: usize },
    /// Minimum radius at IP `ip`.
    Radius { ip: usize },
    /// Maximum grade over a segment.
    Grade(SegmentId),
    /// Elevation corridor at station `(k, j)`.
    Corridor { k: usize, j: usize },
}

impl fmt::Display for ConstraintKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstraintKind::Box { ip, axis } => write!(f, "box,ip{ip}.{axis:?}"),
            ConstraintKind::Overlap { chord } => write!(f, "overlap,chord{chord}"),
            ConstraintKind::Radius { ip } => write!(f, "radius,ip{ip}"),
            ConstraintKind::Grade(SegmentId::Tangent { k, j }) => write!(f, "grade,tangent{k}.{j}"),
            ConstraintKind::Grade(SegmentId::Arc { k }) => write!(f, "grade,arc{k}"),
            ConstraintKind::Corridor { k, j } => write!(f, "corridor,station{k}.{j}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    pub kind: ConstraintKind,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConstraintReport {
    pub violations: Vec<Violation>,
    pub worst: f64,
    pub feasible: bool,
}

impl ConstraintReport {
    pub fn violated(&self) -> impl Iterator<Item = &Violation> {
        self.violations.iter().filter(|v| v.value > FEASIBILITY_TOL)
    }

    /// One `family,item,violation` line per entry.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("family,item,violation\n");
        for v in &self.violations {
            out.push_str(&format!("{},{}\n", v.kind, v.value));
        }
        out
    }
}

/// `L_k + L_{k+1} − ‖IP_{k+1} − IP_k‖` per chord, start and end carrying `L = 0`.
pub fn check_overlap(geom: &HorizontalGeometry) -> Vec<f64> {
    (0..=geom.n_ips())
        .map(|k| {
            let chord = geom.ip(k).distance(geom.ip(k + 1));
            geom.tangent_length_at(k) + geom.tangent_length_at(k + 1) - chord
        })
        .collect()
}

pub fn check_radius(radii: &[f64], r_min: f64) -> Vec<f64> {
    radii.iter().map(|r| r_min - r).collect()
}

/// `|Δz| − d·G_max` per tangent sub-segment and per arc (horizontal arc length `r β`).
pub fn check_grade(
    design: &AlignmentDesign,
    geom: &HorizontalGeometry,
    max_grade: f64,
) -> Vec<(SegmentId, f64)> {
    let mut out = Vec::new();
    for k in 0..=design.n_ips() {
        if k > 0 {
            let dz = design.station_z(k, 0) - design.station_z(k - 1, design.m[k - 1]);
            let run = geom.curve(k).plan_length();
            out.push((SegmentId::Arc { k }, dz.abs() - run * max_grade));
        }
        let (from, to) = geom.chord(k);
        let run = from.distance(to) / design.m[k] as f64;
        for j in 1..=design.m[k] {
            let dz = design.station_z(k, j) - design.station_z(k, j - 1);
            out.push((SegmentId::Tangent { k, j }, dz.abs() - run * max_grade));
        }
    }
    out
}

/// `|z − z_g| − z̄` at every station carrying an elevation variable.
pub fn check_elevation_corridor(
    design: &AlignmentDesign,
    geom: &HorizontalGeometry,
    terrain: &TerrainGrid,
    z_bar: f64,
) -> Result<Vec<((usize, usize), f64)>> {
    stations(design, geom)
        .into_iter()
        .filter(|st| st.z_index.is_some())
        .map(|st| {
            let ground = terrain.ground_elevation(st.point.x, st.point.y)?;
            Ok(((st.k, st.j), (st.point.z - ground).abs() - z_bar))
        })
        .collect()
}

/// Per IP, `max(lo − v, v − hi)` for x then y.
pub fn check_boxes(design: &AlignmentDesign, boxes: &[IpBox]) -> Result<Vec<f64>> {
    if boxes.len() != design.n_ips() {
        return Err(Error::InvalidParameter {
            name: "boxes",
            reason: format!("need {} boxes, got {}", design.n_ips(), boxes.len()),
        });
    }
    let mut out = Vec::with_capacity(2 * boxes.len());
    for (i, b) in boxes.iter().enumerate() {
        out.push((b.x_lo - design.x[i]).max(design.x[i] - b.x_hi));
        out.push((b.y_lo - design.y[i]).max(design.y[i] - b.y_hi));
    }
    Ok(out)
}

/// Collects violation entries into a report.
pub fn aggregate(violations: Vec<Violation>) -> ConstraintReport {
    let worst = violations
        .iter()
        .map(|v| v.value)
        .fold(f64::NEG_INFINITY, f64::max);
    ConstraintReport {
        feasible: violations.iter().all(|v| v.value <= FEASIBILITY_TOL),
        worst,
        violations,
    }
}

/// Exterior quadratic penalty `weight · Σ max(0, v)²`.
pub fn penalty(report: &ConstraintReport, weight: f64) -> f64 {
    weight
        * report
            .violations
            .iter()
            .map(|v| v.value.max(0.0).powi(2))
            .sum::<f64>()
}

/// Runs every check on `design`.
pub fn check_all(
    design: &AlignmentDesign,
    geom: &HorizontalGeometry,
    terrain: &TerrainGrid,
    config: &ConstraintConfig,
) -> Result<ConstraintReport> {
    let mut v = Vec::new();
    for (i, value) in check_boxes(design, &config.boxes)?.into_iter().enumerate() {
        let axis = if i % 2 == 0 { Axis::X } else { Axis::Y };
        v.push(Violation {
            kind: ConstraintKind::Box { ip: i / 2 + 1, axis },
            value,
        });
    }
    for (chord, value) in check_overlap(geom).into_iter().enumerate() {
        v.push(Violation {
            kind: ConstraintKind::Overlap { chord },
            value,
        });
    }
    for (i, value) in check_radius(&design.r, config.r_min).into_iter().enumerate() {
        v.push(Violation {
            kind: ConstraintKind::Radius { ip: i + 1 },
            value,
        });
    }
    for (id, value) in check_grade(design, geom, config.max_grade) {
        v.push(Violation {
            kind: ConstraintKind::Grade(id),
            value,
        });
    }
    for ((k, j), value) in check_elevation_corridor(design, geom, terrain, config.z_bar)? {
        v.push(Violation {
            kind: ConstraintKind::Corridor { k, j },
            value,
        });
    }
    Ok(aggregate(v))
}
