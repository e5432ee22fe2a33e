//! Circular road sections with linearly varying elevation.
//!
//! On an arc `θ(s) = θ_TC + ω s`, `ω = θ_CT − θ_TC`, and inside one grid cell the
//! ground-minus-road height is
//!
//! ```text
//! h(s) = (A x_c + B y_c + C − z_0) − Δz s + r A cos θ(s) + r B sin θ(s)
//! ```
//!
//! The cut/fill integral `∫ (W h + ½ κ h²) ‖r'(s)‖ ds` is evaluated in closed form
//! about each interval's midpoint so no term suffers cancellation when the
//! interval's swept angle is small.

use std::f64::consts::{PI, TAU};

use super::crossings::{
    sort_dedup, x_lines, y_lines, Crossing, CrossingInterval, CrossingKind, Earthwork,
    SegmentCrossings, DEDUP_TOL,
};
use super::{CostParameters, CutFill};
use crate::error::Result;
use crate::geom::{Point2, Point3};
use crate::terrain::TerrainGrid;

/// Sign-change scan resolution per interval.
const SCAN_POINTS: usize = 32;
/// Bisection stops once the bracket is narrower than this.
const ROOT_TOL: f64 = 1e-12;

/// Circular arc in plan with linear elevation, parametrized by `s ∈ [0, 1]`.
/// A zero radius describes the degenerate curve at a straight-through IP.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcSegment {
    pub center: Point2,
    pub radius: f64,
    pub theta_start: f64,
    pub theta_end: f64,
    pub z_start: f64,
    pub z_end: f64,
}

impl ArcSegment {
    pub fn sweep(&self) -> f64 {
        self.theta_end - self.theta_start
    }

    pub fn angle(&self, s: f64) -> f64 {
        self.theta_start + self.sweep() * s
    }

    pub fn point(&self, s: f64) -> Point3 {
        let th = self.angle(s);
        Point3::new(
            self.center.x + self.radius * th.cos(),
            self.center.y + self.radius * th.sin(),
            self.z_start + (self.z_end - self.z_start) * s,
        )
    }

    /// Constant speed `‖r'(s)‖ = sqrt(r²ω² + Δz²)`.
    pub fn jacobian(&self) -> f64 {
        let dz = self.z_end - self.z_start;
        (self.radius * self.sweep()).hypot(dz)
    }

    /// `sqrt((r |ω|)² + Δz²)`.
    pub fn length(&self) -> f64 {
        self.jacobian()
    }

    fn coefficients(&self, terrain: &TerrainGrid, cell: (usize, usize)) -> HeightCoefficients {
        let p = terrain.plane(cell.0, cell.1);
        HeightCoefficients {
            base: p.eval(self.center.x, self.center.y) - self.z_start,
            slope: -(self.z_end - self.z_start),
            cos: self.radius * p.a,
            sin: self.radius * p.b,
        }
    }

    /// Parameters where `x(s)` equals `value`, for `value` strictly inside the
    /// circle's x-range. `use_sin` switches to `y(s)`.
    fn line_hits(&self, offset: f64, use_sin: bool) -> Vec<f64> {
        let omega = self.sweep();
        let ratio = offset / self.radius;
        let bases = if use_sin {
            let b = ratio.asin();
            [b, PI - b]
        } else {
            let a = ratio.acos();
            [a, -a]
        };
        let (lo, hi) = if omega > 0.0 {
            (self.theta_start, self.theta_end)
        } else {
            (self.theta_end, self.theta_start)
        };
        let mut out = Vec::new();
        for base in bases {
            let n0 = ((lo - base) / TAU).ceil() as i64;
            let n1 = ((hi - base) / TAU).floor() as i64;
            for n in n0..=n1 {
                let s = (base + n as f64 * TAU - self.theta_start) / omega;
                if s > 0.0 && s < 1.0 {
                    out.push(s);
                }
            }
        }
        out
    }

    pub fn crossings(&self, terrain: &TerrainGrid) -> Result<SegmentCrossings> {
        let p0 = self.point(0.0);
        let p1 = self.point(1.0);
        terrain.cell_of(p0.x, p0.y)?;
        terrain.cell_of(p1.x, p1.y)?;

        let mut pts = vec![
            Crossing { s: 0.0, kind: CrossingKind::Endpoint },
            Crossing { s: 1.0, kind: CrossingKind::Endpoint },
        ];
        if self.radius > 0.0 && self.sweep() != 0.0 {
            let (cx, cy, r) = (self.center.x, self.center.y, self.radius);
            for (_, gx) in x_lines(terrain, cx - r, cx + r) {
                for s in self.line_hits(gx - cx, false) {
                    pts.push(Crossing { s, kind: CrossingKind::XBoundary });
                }
            }
            for (_, gy) in y_lines(terrain, cy - r, cy + r) {
                for s in self.line_hits(gy - cy, true) {
                    pts.push(Crossing { s, kind: CrossingKind::YBoundary });
                }
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
            let coef = self.coefficients(terrain, cell);
            let h = |s: f64| coef.eval(self.angle(s), s);

            let mut cuts = vec![a];
            let mut prev_s = a;
            let mut prev_h = h(a);
            for i in 1..=SCAN_POINTS {
                let s = if i == SCAN_POINTS {
                    b
                } else {
                    a + (b - a) * i as f64 / SCAN_POINTS as f64
                };
                let hs = h(s);
                if prev_h * hs < 0.0 {
                    let root = bisect(&h, prev_s, s, prev_h);
                    if root - cuts.last().unwrap() > DEDUP_TOL && b - root > DEDUP_TOL {
                        points.push(Crossing { s: root, kind: CrossingKind::Transition });
                        cuts.push(root);
                    }
                }
                if hs != 0.0 {
                    prev_h = hs;
                    prev_s = s;
                }
            }
            cuts.push(b);
            for c in cuts.windows(2) {
                intervals.push(CrossingInterval {
                    s0: c[0],
                    s1: c[1],
                    cell,
                    state: Earthwork::from_height(h(0.5 * (c[0] + c[1]))),
                });
            }
            points.push(w[1]);
        }
        Ok(SegmentCrossings { points, intervals })
    }

    pub fn cut_fill_with(
        &self,
        crossings: &SegmentCrossings,
        terrain: &TerrainGrid,
        params: &CostParameters,
    ) -> CutFill {
        let jacobian = self.jacobian();
        let omega = self.sweep();
        let mut out = CutFill::default();
        for iv in &crossings.intervals {
            let sign = match iv.state {
                Earthwork::Cut => 1.0,
                Earthwork::Fill => -1.0,
                Earthwork::Level => continue,
            };
            let coef = self.coefficients(terrain, iv.cell).scaled(sign);
            let v = coef.section_integral(self.theta_start, omega, iv.s0, iv.s1, params.width, params.kappa)
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

/// `h(θ, s) = base + slope·s + cos·cos θ + sin·sin θ`.
#[derive(Debug, Clone, Copy)]
struct HeightCoefficients {
    base: f64,
    slope: f64,
    cos: f64,
    sin: f64,
}

impl HeightCoefficients {
    fn eval(&self, theta: f64, s: f64) -> f64 {
        self.base + self.slope * s + self.cos * theta.cos() + self.sin * theta.sin()
    }

    fn scaled(self, k: f64) -> Self {
        Self {
            base: k * self.base,
            slope: k * self.slope,
            cos: k * self.cos,
            sin: k * self.sin,
        }
    }

    /// `∫_{s0}^{s1} W h + ½ κ h² ds` with `θ(s) = θ0 + ω s`.
    ///
    /// Substituting `s = s_m + u`, `u ∈ [−Δ/2, Δ/2]`, the odd moments vanish and
    /// every remaining moment reduces to `sinc` or `g(x) = (sin x − x cos x)/x³`.
    fn section_integral(&self, theta0: f64, omega: f64, s0: f64, s1: f64, w: f64, kappa: f64) -> f64 {
        let len = s1 - s0;
        let sm = 0.5 * (s0 + s1);
        let phi = theta0 + omega * sm;
        let half = 0.5 * omega * len;
        let (sin_phi, cos_phi) = phi.sin_cos();
        let (sin_2phi, cos_2phi) = (2.0 * phi).sin_cos();
        let sinc1 = sinc(half);
        let sinc2 = sinc(2.0 * half);
        let g = moment_kernel(half);

        let p = self.base + self.slope * sm;
        let q = self.slope;
        let (gc, ds) = (self.cos, self.sin);

        let int_c = len * cos_phi * sinc1;
        let int_s = len * sin_phi * sinc1;
        let int_uc = -sin_phi * omega * len.powi(3) * g / 4.0;
        let int_us = cos_phi * omega * len.powi(3) * g / 4.0;
        let int_cc = 0.5 * len * (1.0 + cos_2phi * sinc2);
        let int_ss = 0.5 * len * (1.0 - cos_2phi * sinc2);
        let int_sc = 0.5 * len * sin_2phi * sinc2;

        let first = p * len + gc * int_c + ds * int_s;
        let second = p * p * len
            + q * q * len.powi(3) / 12.0
            + 2.0 * p * gc * int_c
            + 2.0 * p * ds * int_s
            + 2.0 * q * gc * int_uc
            + 2.0 * q * ds * int_us
            + gc * gc * int_cc
            + ds * ds * int_ss
            + 2.0 * gc * ds * int_sc;
        w * first + 0.5 * kappa * second
    }
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// `(sin x − x cos x) / x³`, tending to 1/3 at the origin.
fn moment_kernel(x: f64) -> f64 {
    if x.abs() < 1e-2 {
        let x2 = x * x;
        1.0 / 3.0 - x2 / 30.0 + x2 * x2 / 840.0 - x2 * x2 * x2 / 45360.0
    } else {
        (x.sin() - x * x.cos()) / (x * x * x)
    }
}

fn bisect(h: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, mut h_lo: f64) -> f64 {
    while hi - lo > ROOT_TOL {
        let mid = 0.5 * (lo + hi);
        let hm = h(mid);
        if hm == 0.0 {
            return mid;
        }
        if (hm < 0.0) == (h_lo < 0.0) {
            lo = mid;
            h_lo = hm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
