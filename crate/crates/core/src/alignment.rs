//! Decision variables and the horizontal/vertical geometry derived from them.
//!
//! Indexing used throughout the crate:
//!
//! * IPs and their curves are numbered `k = 1..=N`.
//! * Horizontal tangent `k` (`0..=N`) runs from `CT_k` to `TC_{k+1}`, where
//!   `CT_0` is the start point and `TC_{N+1}` the end point.
//! * Tangent `k` is split into `m_k` equal sub-segments whose stations are
//!   `j = 0..=m_k`.
//! * Arc `k` joins the last station of tangent `k-1` to the first station of
//!   tangent `k`; its elevation is linear between those two stations.
//!
//! Elevation variables: every station except the fixed start (tangent 0,
//! station 0) and end (tangent N, station m_N) owns one entry of `Z`, giving
//! `M = m_0 + m_N + Σ_{k=1}^{N-1} (m_k + 1)` variables.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geom::{Point2, Point3};

/// Angles at or below this are rejected as near U-turns.
pub const THETA_MIN: f64 = 1e-3;

/// IP triples whose angle is within this of π are treated as straight.
pub const COLLINEAR_TOL: f64 = 1e-12;

/// Angle between `prev - ip` and `next - ip`.
pub fn deflection_angle(prev: Point2, ip: Point2, next: Point2) -> Result<f64> {
    let a = prev - ip;
    let b = next - ip;
    let (na, nb) = (a.norm(), b.norm());
    if na == 0.0 || nb == 0.0 {
        return Err(Error::DegenerateGeometry(format!(
            "IP ({}, {}) coincides with a neighbour",
            ip.x, ip.y
        )));
    }
    let cos = (a.dot(b) / (na * nb)).clamp(-1.0, 1.0);
    Ok(cos.acos())
}

/// Distance from the IP to its transition points, `r (1 + cos θ) / sin θ`.
pub fn tangent_length(theta: f64, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::InvalidDesign(format!("radius must be positive, got {r}")));
    }
    if theta <= THETA_MIN {
        return Err(Error::DegenerateGeometry(format!(
            "angle {theta} rad is a near U-turn (minimum {THETA_MIN})"
        )));
    }
    if PI - theta <= COLLINEAR_TOL {
        return Ok(0.0);
    }
    Ok(r * (1.0 + theta.cos()) / theta.sin())
}

fn unit(v: Point2) -> Point2 {
    v * (1.0 / v.norm())
}

/// `(TC, CT)` for the curve of radius `r` at `ip`.
pub fn transition_points(
    prev: Point2,
    ip: Point2,
    next: Point2,
    r: f64,
) -> Result<(Point2, Point2)> {
    let theta = deflection_angle(prev, ip, next)?;
    let l = tangent_length(theta, r)?;
    Ok((ip + unit(prev - ip) * l, ip + unit(next - ip) * l))
}

/// Centre of the curve: `IP + r csc(θ/2) · unit(M - IP)`, `M` the TC–CT midpoint.
pub fn curve_center(prev: Point2, ip: Point2, next: Point2, r: f64) -> Result<Point2> {
    let theta = deflection_angle(prev, ip, next)?;
    tangent_length(theta, r)?;
    if PI - theta <= COLLINEAR_TOL {
        return Err(Error::DegenerateGeometry(
            "collinear IPs have no curve centre".into(),
        ));
    }
    // M - IP = (L/2)(â + b̂); its direction does not depend on L.
    let bisector = unit(prev - ip) + unit(next - ip);
    Ok(ip + unit(bisector) * (r / (0.5 * theta).sin()))
}

/// Horizontal curve at one IP.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub ip: Point2,
    pub radius: f64,
    /// Angle between the two chords at the IP.
    pub theta: f64,
    /// Central angle of the arc, `π - θ`.
    pub beta: f64,
    pub tangent_length: f64,
    pub tc: Point2,
    pub ct: Point2,
    /// `None` for a straight-through IP (zero-length curve).
    pub center: Option<Point2>,
    pub theta_tc: f64,
    pub theta_ct: f64,
}

impl Curve {
    /// Signed swept angle; positive is counter-clockwise.
    pub fn sweep(&self) -> f64 {
        self.theta_ct - self.theta_tc
    }

    /// Horizontal arc length `r β`.
    pub fn plan_length(&self) -> f64 {
        self.radius * self.sweep().abs()
    }

    pub fn is_straight(&self) -> bool {
        self.center.is_none()
    }

    /// Plan position at arc parameter `s ∈ [0, 1]`.
    pub fn plan_point(&self, s: f64) -> Point2 {
        match self.center {
            Some(c) => {
                let th = self.theta_tc + self.sweep() * s;
                Point2::new(c.x + self.radius * th.cos(), c.y + self.radius * th.sin())
            }
            None => self.ip,
        }
    }
}

/// Builds the curve at `ip` between `prev` and `next`.
pub fn build_curve(prev: Point2, ip: Point2, next: Point2, r: f64) -> Result<Curve> {
    let theta = deflection_angle(prev, ip, next)?;
    let l = tangent_length(theta, r)?;
    if l == 0.0 {
        return Ok(Curve {
            ip,
            radius: r,
            theta,
            beta: 0.0,
            tangent_length: 0.0,
            tc: ip,
            ct: ip,
            center: None,
            theta_tc: 0.0,
            theta_ct: 0.0,
        });
    }
    let (tc, ct) = (ip + unit(prev - ip) * l, ip + unit(next - ip) * l);
    let center = curve_center(prev, ip, next, r)?;
    let beta = PI - theta;
    // Left turn (counter-clockwise) when the travel direction rotates positively.
    let turn = (ip - prev).cross(next - ip);
    let sweep = if turn > 0.0 { beta } else { -beta };
    let theta_tc = (tc.y - center.y).atan2(tc.x - center.x);
    Ok(Curve {
        ip,
        radius: r,
        theta,
        beta,
        tangent_length: l,
        tc,
        ct,
        center: Some(center),
        theta_tc,
        theta_ct: theta_tc + sweep,
    })
}

/// Derived plan geometry of a whole alignment.
#[derive(Debug, Clone, PartialEq)]
pub struct HorizontalGeometry {
    pub start: Point2,
    pub end: Point2,
    pub curves: Vec<Curve>,
}

impl HorizontalGeometry {
    pub fn n_ips(&self) -> usize {
        self.curves.len()
    }

    /// Curve at IP `k` (1-based).
    pub fn curve(&self, k: usize) -> &Curve {
        &self.curves[k - 1]
    }

    /// Endpoints `(CT_k, TC_{k+1})` of horizontal tangent `k ∈ 0..=N`.
    pub fn chord(&self, k: usize) -> (Point2, Point2) {
        let n = self.curves.len();
        let from = if k == 0 { self.start } else { self.curves[k - 1].ct };
        let to = if k == n { self.end } else { self.curves[k].tc };
        (from, to)
    }

    /// IP `k` with `IP_0 = start`, `IP_{N+1} = end`.
    pub fn ip(&self, k: usize) -> Point2 {
        let n = self.curves.len();
        if k == 0 {
            self.start
        } else if k == n + 1 {
            self.end
        } else {
            self.curves[k - 1].ip
        }
    }

    /// Tangent length at IP `k`, zero for the start and end points.
    pub fn tangent_length_at(&self, k: usize) -> f64 {
        if k == 0 || k == self.curves.len() + 1 {
            0.0
        } else {
            self.curves[k - 1].tangent_length
        }
    }
}

/// Number of elevation variables for subdivision counts `m` (length N+1).
pub fn vertical_variable_count(m: &[usize]) -> usize {
    let n = m.len() - 1;
    m[0] + m[n] + m[1..n].iter().map(|mk| mk + 1).sum::<usize>()
}

/// Decision vector `(X, Y, R, Z)` plus the fixed endpoints and subdivision counts.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentDesign {
    pub start: Point3,
    pub end: Point3,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub r: Vec<f64>,
    pub z: Vec<f64>,
    pub m: Vec<usize>,
}

impl AlignmentDesign {
    pub fn new(
        start: Point3,
        end: Point3,
        x: Vec<f64>,
        y: Vec<f64>,
        r: Vec<f64>,
        z: Vec<f64>,
        m: Vec<usize>,
    ) -> Result<Self> {
        let d = Self {
            start,
            end,
            x,
            y,
            r,
            z,
            m,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.x.len();
        if n == 0 {
            return Err(Error::InvalidDesign("at least one IP is required".into()));
        }
        if self.y.len() != n || self.r.len() != n {
            return Err(Error::InvalidDesign(format!(
                "X, Y, R must have equal length (got {}, {}, {})",
                n,
                self.y.len(),
                self.r.len()
            )));
        }
        if self.m.len() != n + 1 {
            return Err(Error::InvalidDesign(format!(
                "need {} subdivision counts, got {}",
                n + 1,
                self.m.len()
            )));
        }
        if self.m.iter().any(|&mk| mk == 0) {
            return Err(Error::InvalidDesign("subdivision counts must be ≥ 1".into()));
        }
        let expected = vertical_variable_count(&self.m);
        if self.z.len() != expected {
            return Err(Error::InvalidDesign(format!(
                "expected {expected} elevation variables, got {}",
                self.z.len()
            )));
        }
        if let Some(r) = self.r.iter().find(|r| !(**r > 0.0)) {
            return Err(Error::InvalidDesign(format!("radius must be positive, got {r}")));
        }
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        if !(finite(&self.x) && finite(&self.y) && finite(&self.r) && finite(&self.z)) {
            return Err(Error::InvalidDesign("non-finite decision variable".into()));
        }
        Ok(())
    }

    pub fn n_ips(&self) -> usize {
        self.x.len()
    }

    /// Length of the flat decision vector, `3N + M`.
    pub fn dimension(&self) -> usize {
        3 * self.n_ips() + self.z.len()
    }

    pub fn ip(&self, k: usize) -> Point2 {
        Point2::new(self.x[k - 1], self.y[k - 1])
    }

    /// `[X.., Y.., R.., Z..]`.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.dimension());
        v.extend_from_slice(&self.x);
        v.extend_from_slice(&self.y);
        v.extend_from_slice(&self.r);
        v.extend_from_slice(&self.z);
        v
    }

    /// Inverse of [`to_flat`](Self::to_flat) given the fixed parts of a design.
    pub fn from_flat(start: Point3, end: Point3, m: &[usize], flat: &[f64]) -> Result<Self> {
        if m.len() < 2 {
            return Err(Error::InvalidDesign("need at least two subdivision counts".into()));
        }
        let n = m.len() - 1;
        let expected = 3 * n + vertical_variable_count(m);
        if flat.len() != expected {
            return Err(Error::InvalidDesign(format!(
                "flat record has {} values, expected {expected}",
                flat.len()
            )));
        }
        Self::new(
            start,
            end,
            flat[..n].to_vec(),
            flat[n..2 * n].to_vec(),
            flat[2 * n..3 * n].to_vec(),
            flat[3 * n..].to_vec(),
            m.to_vec(),
        )
    }

    /// Index into `Z` for station `j` of tangent `k`, `None` for the fixed endpoints.
    pub fn z_index(&self, k: usize, j: usize) -> Option<usize> {
        let n = self.n_ips();
        if (k == 0 && j == 0) || (k == n && j == self.m[n]) {
            return None;
        }
        let offset = if k == 0 {
            0
        } else {
            self.m[0] + self.m[1..k].iter().map(|mk| mk + 1).sum::<usize>()
        };
        Some(if k == 0 { offset + j - 1 } else { offset + j })
    }

    /// Elevation of station `j` on tangent `k`.
    pub fn station_z(&self, k: usize, j: usize) -> f64 {
        match self.z_index(k, j) {
            Some(i) => self.z[i],
            None if k == 0 => self.start.z,
            None => self.end.z,
        }
    }

    pub fn build_horizontal(&self) -> Result<HorizontalGeometry> {
        self.validate()?;
        let n = self.n_ips();
        let start = self.start.xy();
        let end = self.end.xy();
        let pt = |k: usize| -> Point2 {
            if k == 0 {
                start
            } else if k == n + 1 {
                end
            } else {
                self.ip(k)
            }
        };
        let curves = (1..=n)
            .map(|k| build_curve(pt(k - 1), pt(k), pt(k + 1), self.r[k - 1]))
            .collect::<Result<Vec<_>>>()?;
        Ok(HorizontalGeometry { start, end, curves })
    }
}

/// Plan position of station `j` on tangent `k`.
pub fn station_coordinates(
    geom: &HorizontalGeometry,
    m: &[usize],
    k: usize,
    j: usize,
) -> Result<Point2> {
    if k >= m.len() || k > geom.n_ips() {
        return Err(Error::IndexOutOfRange(format!("tangent {k} does not exist")));
    }
    if j > m[k] {
        return Err(Error::IndexOutOfRange(format!(
            "station {j} exceeds m_{k} = {}",
            m[k]
        )));
    }
    let (from, to) = geom.chord(k);
    Ok(from.lerp(to, j as f64 / m[k] as f64))
}

/// A vertical point `VP_{k,j}` with its horizontal spacing from `VP_{k,j-1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerticalStation {
    pub k: usize,
    pub j: usize,
    pub point: Point3,
    /// Horizontal distance to the previous station on the same tangent (0 for `j = 0`).
    pub spacing: f64,
    /// Index into `Z`, `None` for the fixed endpoints.
    pub z_index: Option<usize>,
}

/// All stations in travel order.
pub fn stations(design: &AlignmentDesign, geom: &HorizontalGeometry) -> Vec<VerticalStation> {
    let mut out = Vec::new();
    for k in 0..=design.n_ips() {
        let mk = design.m[k];
        let (from, to) = geom.chord(k);
        let step = from.distance(to) / mk as f64;
        for j in 0..=mk {
            let xy = from.lerp(to, j as f64 / mk as f64);
            out.push(VerticalStation {
                k,
                j,
                point: xy.with_z(design.station_z(k, j)),
                spacing: if j == 0 { 0.0 } else { step },
                z_index: design.z_index(k, j),
            });
        }
    }
    out
}

/// A piece of the 3D centerline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SegmentId {
    /// Sub-segment `j ∈ 1..=m_k` of tangent `k`, between stations `j-1` and `j`.
    Tangent { k: usize, j: usize },
    /// Circular curve at IP `k ∈ 1..=N`.
    Arc { k: usize },
}

/// Every segment of the alignment in travel order.
pub fn segments(design: &AlignmentDesign) -> Vec<SegmentId> {
    let n = design.n_ips();
    let mut out = Vec::new();
    for k in 0..=n {
        if k > 0 {
            out.push(SegmentId::Arc { k });
        }
        for j in 1..=design.m[k] {
            out.push(SegmentId::Tangent { k, j });
        }
    }
    out
}

/// Parameter domain of a segment: `[(j-1)/m_k, j/m_k]` for tangents, `[0, 1]` for arcs.
pub fn parameter_domain(design: &AlignmentDesign, seg: SegmentId) -> (f64, f64) {
    match seg {
        SegmentId::Tangent { k, j } => {
            let mk = design.m[k] as f64;
            ((j as f64 - 1.0) / mk, j as f64 / mk)
        }
        SegmentId::Arc { .. } => (0.0, 1.0),
    }
}

/// End elevations of arc `k`.
pub fn arc_elevations(design: &AlignmentDesign, k: usize) -> (f64, f64) {
    (design.station_z(k - 1, design.m[k - 1]), design.station_z(k, 0))
}

/// 3D centerline position on `seg` at parameter `s`.
pub fn centerline_point(
    design: &AlignmentDesign,
    geom: &HorizontalGeometry,
    seg: SegmentId,
    s: f64,
) -> Result<Point3> {
    let (lo, hi) = parameter_domain(design, seg);
    let slack = 1e-12 * (hi - lo).abs().max(1.0);
    if !(s >= lo - slack && s <= hi + slack) {
        return Err(Error::ParameterOutOfDomain { value: s, lo, hi });
    }
    match seg {
        SegmentId::Tangent { k, j } => {
            if k > design.n_ips() || j == 0 || j > design.m[k] {
                return Err(Error::IndexOutOfRange(format!("no tangent segment ({k}, {j})")));
            }
            let (from, to) = geom.chord(k);
            let mk = design.m[k] as f64;
            let z0 = design.station_z(k, j - 1);
            let z1 = design.station_z(k, j);
            let xy = from.lerp(to, s);
            Ok(xy.with_z(z0 + (z1 - z0) * (mk * s + 1.0 - j as f64)))
        }
        SegmentId::Arc { k } => {
            if k == 0 || k > design.n_ips() {
                return Err(Error::IndexOutOfRange(format!("no arc {k}")));
            }
            let (z0, z1) = arc_elevations(design, k);
            Ok(geom.curve(k).plan_point(s).with_z(z0 + (z1 - z0) * s))
        }
    }
}
