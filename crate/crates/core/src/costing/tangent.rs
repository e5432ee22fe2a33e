//! Straight 3D segments between consecutive vertical stations.

use super::crossings::{
    sort_dedup, x_lines, y_lines, Crossing, CrossingInterval, CrossingKind, Earthwork,
    SegmentCrossings, DEDUP_TOL,
};
use super::{CostParameters, CutFill};
use crate::error::Result;
use crate::geom::Point3;
use crate::terrain::TerrainGrid;

/// Line from `from` to `to`, parametrized by `s ∈ [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentSegment {
    pub from: Point3,
    pub to: Point3,
}

impl TangentSegment {
    pub fn new(from: Point3, to: Point3) -> Self {
        Self { from, to }
    }

    pub fn point(&self, s: f64) -> Point3 {
        self.from.lerp(self.to, s)
    }

    /// Euclidean 3D length.
    pub fn length(&self) -> f64 {
        self.from.distance(self.to)
    }

    /// Ground minus road elevation at `s`, using the plane of `cell`.
    fn height_in(&self, terrain: &TerrainGrid, cell: (usize, usize), s: f64) -> f64 {
        let p = self.point(s);
        terrain.plane(cell.0, cell.1).eval(p.x, p.y) - p.z
    }

    /// Grid-boundary and cut/fill transition parameters along the segment.
    pub fn crossings(&self, terrain: &TerrainGrid) -> Result<SegmentCrossings> {
        terrain.cell_of(self.from.x, self.from.y)?;
        terrain.cell_of(self.to.x, self.to.y)?;

        let mut pts = vec![
            Crossing { s: 0.0, kind: CrossingKind::Endpoint },
            Crossing { s: 1.0, kind: CrossingKind::Endpoint },
        ];
        let dx = self.to.x - self.from.x;
        let dy = self.to.y - self.from.y;
        if dx != 0.0 {
            let (lo, hi) = (self.from.x.min(self.to.x), self.from.x.max(self.to.x));
            for (_, gx) in x_lines(terrain, lo, hi) {
                pts.push(Crossing {
                    s: (gx - self.from.x) / dx,
                    kind: CrossingKind::XBoundary,
                });
            }
        }
        if dy != 0.0 {
            let (lo, hi) = (self.from.y.min(self.to.y), self.from.y.max(self.to.y));
            for (_, gy) in y_lines(terrain, lo, hi) {
                pts.push(Crossing {
                    s: (gy - self.from.y) / dy,
                    kind: CrossingKind::YBoundary,
                });
            }
        }
        let boundaries = sort_dedup(pts);

        let mut points = Vec::with_capacity(boundaries.len() + 2);
        let mut intervals = Vec::with_capacity(boundaries.len() + 1);
        points.push(boundaries[0]);
        for w in boundaries.windows(2) {
            let (a, b) = (w[0].s, w[1].s);
            let mid = self.point(0.5 * (a + b));
            let cell = terrain.cell_of(mid.x, mid.y)?;
            let ha = self.height_in(terrain, cell, a);
            let hb = self.height_in(terrain, cell, b);
            // h is linear on the interval: at most one root.
            let mut cuts = vec![a];
            if ha * hb < 0.0 {
                let root = a + (b - a) * ha / (ha - hb);
                if root - a > DEDUP_TOL && b - root > DEDUP_TOL {
                    points.push(Crossing { s: root, kind: CrossingKind::Transition });
                    cuts.push(root);
                }
            }
            cuts.push(b);
            for c in cuts.windows(2) {
                let hm = self.height_in(terrain, cell, 0.5 * (c[0] + c[1]));
                intervals.push(CrossingInterval {
                    s0: c[0],
                    s1: c[1],
                    cell,
                    state: Earthwork::from_height(hm),
                });
            }
            points.push(w[1]);
        }
        Ok(SegmentCrossings { points, intervals })
    }

    /// Cut and fill volumes from precomputed crossings.
    pub fn cut_fill_with(
        &self,
        crossings: &SegmentCrossings,
        terrain: &TerrainGrid,
        params: &CostParameters,
    ) -> CutFill {
        let jacobian = self.length();
        let mut out = CutFill::default();
        for iv in &crossings.intervals {
            let sign = match iv.state {
                Earthwork::Cut => 1.0,
                Earthwork::Fill => -1.0,
                Earthwork::Level => continue,
            };
            // h(s0 + τ) = Ω + Θ τ on this interval, sign-flipped for fill.
            let omega = sign * self.height_in(terrain, iv.cell, iv.s0);
            let theta = sign * (self.height_in(terrain, iv.cell, iv.s1) - self.height_in(terrain, iv.cell, iv.s0))
                / (iv.s1 - iv.s0);
            let v = linear_section_integral(omega, theta, 0.0, iv.s1 - iv.s0, params.width, params.kappa)
                * jacobian;
            match iv.state {
                Earthwork::Cut => out.cut += v,
                _ => out.fill += v,
            }
        }
        out
    }

    pub fn cut_fill(&self, terrain: &TerrainGrid, params: &CostParameters) -> Result<CutFill> {
        let crossings = self.crossings(terrain)?;
        Ok(self.cut_fill_with(&crossings, terrain, params))
    }
}

/// `∫_{s0}^{s1} W h + ½ κ h² ds` for `h(s) = Ω + Θ s`:
/// `(WΩ + ½κΩ²)(s1−s0) + ½(WΘ + κΩΘ)(s1²−s0²) + ⅙κΘ²(s1³−s0³)`.
pub fn linear_section_integral(omega: f64, theta: f64, s0: f64, s1: f64, w: f64, kappa: f64) -> f64 {
    (w * omega + 0.5 * kappa * omega * omega) * (s1 - s0)
        + 0.5 * (w * theta + kappa * omega * theta) * (s1 * s1 - s0 * s0)
        + kappa * theta * theta * (s1 * s1 * s1 - s0 * s0 * s0) / 6.0
}
