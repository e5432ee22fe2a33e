//! Surrogate earthwork and utility costs.
//!
//! Every tangent sub-segment and arc is split at grid-cell boundaries and at
//! cut/fill transitions; on each resulting interval the ground is one plane and
//! the cross-section is a trapezoid `W h + ½ κ h²`, integrated exactly.

mod arc;
mod crossings;
mod tangent;

pub use arc::ArcSegment;
pub use crossings::{
    Crossing, CrossingInterval, CrossingKind, Earthwork, SegmentCrossings, DEDUP_TOL,
};
pub use tangent::{linear_section_integral, TangentSegment};

use serde::{Deserialize, Serialize};

use crate::alignment::{arc_elevations, segments, AlignmentDesign, HorizontalGeometry, SegmentId};
use crate::error::{Error, Result};
use crate::terrain::TerrainGrid;

/// Unit costs and cross-section shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostParameters {
    /// Cut cost per m³.
    pub cut: f64,
    /// Fill cost per m³.
    pub fill: f64,
    /// Cost per m³ of unbalanced material (waste, and borrow unless `borrow` is set).
    pub waste: f64,
    /// Utility cost per metre of road.
    pub utility: f64,
    /// Road width, metres.
    pub width: f64,
    /// Sum of the side-slope cotangents.
    pub kappa: f64,
    /// Separate borrow cost per m³; enables the waste/borrow split.
    #[serde(default)]
    pub borrow: Option<f64>,
    /// Multiplier applied to the total cut volume.
    #[serde(default = "one")]
    pub gamma_shrink: f64,
}

fn one() -> f64 {
    1.0
}

impl Default for CostParameters {
    /// `C_c = 4, C_f = 2, C_w = 8, C_u = 1.2, W = 5, κ = 1`.
    fn default() -> Self {
        Self {
            cut: 4.0,
            fill: 2.0,
            waste: 8.0,
            utility: 1.2,
            width: 5.0,
            kappa: 1.0,
            borrow: None,
            gamma_shrink: 1.0,
        }
    }
}

impl CostParameters {
    pub fn validate(&self) -> Result<()> {
        let nonneg = [
            ("cut", self.cut),
            ("fill", self.fill),
            ("waste", self.waste),
            ("utility", self.utility),
            ("kappa", self.kappa),
        ];
        for (name, v) in nonneg {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be finite and ≥ 0, got {v}"),
                });
            }
        }
        if let Some(b) = self.borrow {
            if !(b >= 0.0 && b.is_finite()) {
                return Err(Error::InvalidParameter {
                    name: "borrow",
                    reason: format!("must be finite and ≥ 0, got {b}"),
                });
            }
        }
        if !(self.width > 0.0 && self.width.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "width",
                reason: format!("must be positive, got {}", self.width),
            });
        }
        if !(self.gamma_shrink > 0.0 && self.gamma_shrink.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "gamma_shrink",
                reason: format!("must be positive, got {}", self.gamma_shrink),
            });
        }
        Ok(())
    }

    /// Earthwork cost from total cut and fill volumes (shrinkage already applied).
    pub fn earthwork_cost(&self, v_cut: f64, v_fill: f64) -> f64 {
        let base = self.cut * v_cut + self.fill * v_fill;
        match self.borrow {
            Some(borrow) => {
                base + borrow * (v_fill - v_cut).max(0.0) + self.waste * (v_cut - v_fill).max(0.0)
            }
            None => base + self.waste * (v_fill - v_cut).abs(),
        }
    }

    pub fn utility_cost(&self, length: f64) -> f64 {
        self.utility * length
    }
}

/// Cut and fill volumes, m³.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CutFill {
    pub cut: f64,
    pub fill: f64,
}

/// One segment of the centerline in costing form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Segment {
    Tangent(TangentSegment),
    Arc(ArcSegment),
}

impl Segment {
    pub fn length(&self) -> f64 {
        match self {
            Segment::Tangent(t) => t.length(),
            Segment::Arc(a) => a.length(),
        }
    }

    pub fn crossings(&self, terrain: &TerrainGrid) -> Result<SegmentCrossings> {
        match self {
            Segment::Tangent(t) => t.crossings(terrain),
            Segment::Arc(a) => a.crossings(terrain),
        }
    }

    pub fn cut_fill(&self, terrain: &TerrainGrid, params: &CostParameters) -> Result<CutFill> {
        match self {
            Segment::Tangent(t) => t.cut_fill(terrain, params),
            Segment::Arc(a) => a.cut_fill(terrain, params),
        }
    }
}

/// Sub-segment `j` of tangent `k` as a 3D line.
pub fn tangent_segment(
    design: &AlignmentDesign,
    geom: &HorizontalGeometry,
    k: usize,
    j: usize,
) -> TangentSegment {
    let (from, to) = geom.chord(k);
    let mk = design.m[k] as f64;
    let a = from.lerp(to, (j - 1) as f64 / mk);
    let b = from.lerp(to, j as f64 / mk);
    TangentSegment::new(
        a.with_z(design.station_z(k, j - 1)),
        b.with_z(design.station_z(k, j)),
    )
}

/// Arc at IP `k`; straight-through IPs become zero-radius arcs at the IP.
pub fn arc_segment(design: &AlignmentDesign, geom: &HorizontalGeometry, k: usize) -> ArcSegment {
    let curve = geom.curve(k);
    let (z_start, z_end) = arc_elevations(design, k);
    match curve.center {
        Some(center) => ArcSegment {
            center,
            radius: curve.radius,
            theta_start: curve.theta_tc,
            theta_end: curve.theta_ct,
            z_start,
            z_end,
        },
        None => ArcSegment {
            center: curve.ip,
            radius: 0.0,
            theta_start: 0.0,
            theta_end: 0.0,
            z_start,
            z_end,
        },
    }
}

pub fn segment(design: &AlignmentDesign, geom: &HorizontalGeometry, id: SegmentId) -> Segment {
    match id {
        SegmentId::Tangent { k, j } => Segment::Tangent(tangent_segment(design, geom, k, j)),
        SegmentId::Arc { k } => Segment::Arc(arc_segment(design, geom, k)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentCost {
    pub id: SegmentId,
    pub v_cut: f64,
    pub v_fill: f64,
    pub length: f64,
}

/// Volumes, length and the two objective values of one design.
#[derive(Debug, Clone, PartialEq)]
pub struct CostBreakdown {
    /// Total cut volume after shrinkage.
    pub v_cut: f64,
    pub v_fill: f64,
    pub length: f64,
    pub cost_earthwork: f64,
    pub cost_utility: f64,
    pub segments: Vec<SegmentCost>,
}

impl CostBreakdown {
    pub const CSV_HEADER: &'static str = "v_cut,v_fill,length,cost_e,cost_u";

    pub fn objectives(&self) -> [f64; 2] {
        [self.cost_earthwork, self.cost_utility]
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.v_cut, self.v_fill, self.length, self.cost_earthwork, self.cost_utility
        )
    }
}

/// Costs every segment of `design` and aggregates them.
pub fn evaluate_costs(
    design: &AlignmentDesign,
    geom: &HorizontalGeometry,
    terrain: &TerrainGrid,
    params: &CostParameters,
) -> Result<CostBreakdown> {
    let mut v_cut = 0.0;
    let mut v_fill = 0.0;
    let mut length = 0.0;
    let ids = segments(design);
    let mut per_segment = Vec::with_capacity(ids.len());
    for id in ids {
        let seg = segment(design, geom, id);
        let cf = seg.cut_fill(terrain, params)?;
        let len = seg.length();
        v_cut += cf.cut;
        v_fill += cf.fill;
        length += len;
        per_segment.push(SegmentCost {
            id,
            v_cut: cf.cut,
            v_fill: cf.fill,
            length: len,
        });
    }
    let v_cut = params.gamma_shrink * v_cut;
    Ok(CostBreakdown {
        v_cut,
        v_fill,
        length,
        cost_earthwork: params.earthwork_cost(v_cut, v_fill),
        cost_utility: params.utility_cost(length),
        segments: per_segment,
    })
}
