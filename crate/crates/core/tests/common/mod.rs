//! Independent oracles and fixtures shared by the integration tests.
#![allow(dead_code)]

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use roadalign::constraints::{ConstraintConfig, IpBox};
use roadalign::costing::{ArcSegment, CostParameters, TangentSegment};
use roadalign::geom::{Point2, Point3};
use roadalign::moo::{BiObjectiveProblem, Evaluation, RoadProblem};
use roadalign::terrain::{ElevationRaster, TerrainGrid};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------------------
// Quadrature

/// Adaptive Simpson on `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// Parameters in `(0, 1)` where the cell under `plan(s)` changes, found by
/// dense sampling and bisection (no use of grid-line algebra).
pub fn cell_breaks(terrain: &TerrainGrid, plan: &dyn Fn(f64) -> Point2) -> Vec<f64> {
    let cell = |s: f64| {
        let p = plan(s);
        terrain.cell_of(p.x, p.y).expect("oracle path stays on the terrain")
    };
    fn split(
        cell: &dyn Fn(f64) -> (usize, usize),
        s0: f64,
        s1: f64,
        c0: (usize, usize),
        c1: (usize, usize),
        out: &mut Vec<f64>,
    ) {
        if c0 == c1 {
            return;
        }
        if s1 - s0 < 1e-15 {
            out.push(0.5 * (s0 + s1));
            return;
        }
        let m = 0.5 * (s0 + s1);
        let cm = cell(m);
        split(cell, s0, m, c0, cm, out);
        split(cell, m, s1, cm, c1, out);
    }
    let n = 4096;
    let mut out = Vec::new();
    let mut prev = cell(0.0);
    for i in 1..=n {
        let s = i as f64 / n as f64;
        let c = cell(s);
        split(&cell, (i - 1) as f64 / n as f64, s, prev, c, &mut out);
        prev = c;
    }
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() < 1e-13);
    out
}

/// `∫ a(h(s)) ‖r'(s)‖ ds` split by cut and fill, by quadrature.
pub fn volume_by_quadrature(
    terrain: &TerrainGrid,
    params: &CostParameters,
    point: &dyn Fn(f64) -> Point3,
    speed: &dyn Fn(f64) -> f64,
    tol: f64,
) -> (f64, f64) {
    let plan = |s: f64| point(s).xy();
    let mut knots = vec![0.0];
    knots.extend(cell_breaks(terrain, &plan));
    knots.push(1.0);
    let (w, k) = (params.width, params.kappa);
    let mut cut = 0.0;
    let mut fill = 0.0;
    for win in knots.windows(2) {
        let (a, b) = (win[0], win[1]);
        if b - a < 1e-15 {
            continue;
        }
        // Ground from the plane that owns the interval interior.
        let mid = plan(0.5 * (a + b));
        let plane = *terrain.plane_at(mid.x, mid.y).unwrap();
        let h = |s: f64| {
            let p = point(s);
            plane.eval(p.x, p.y) - p.z
        };
        let area_cut = |s: f64| {
            let v = h(s).max(0.0);
            (w * v + 0.5 * k * v * v) * speed(s)
        };
        let area_fill = |s: f64| {
            let v = (-h(s)).max(0.0);
            (w * v + 0.5 * k * v * v) * speed(s)
        };
        cut += adaptive_simpson(&area_cut, a, b, tol * (b - a));
        fill += adaptive_simpson(&area_fill, a, b, tol * (b - a));
    }
    (cut, fill)
}

pub fn tangent_oracle(t: &TangentSegment, terrain: &TerrainGrid, params: &CostParameters) -> (f64, f64) {
    let (a, b) = (t.from, t.to);
    let d = (b.x - a.x, b.y - a.y, b.z - a.z);
    let speed = (d.0 * d.0 + d.1 * d.1 + d.2 * d.2).sqrt();
    let point = move |s: f64| Point3::new(a.x + s * d.0, a.y + s * d.1, a.z + s * d.2);
    volume_by_quadrature(terrain, params, &point, &|_| speed, 1e-12)
}

pub fn arc_oracle(arc: &ArcSegment, terrain: &TerrainGrid, params: &CostParameters) -> (f64, f64) {
    let (c, r, t0, t1, z0, z1) = (arc.center, arc.radius, arc.theta_start, arc.theta_end, arc.z_start, arc.z_end);
    let w = t1 - t0;
    let point = move |s: f64| {
        let th = t0 + w * s;
        Point3::new(c.x + r * th.cos(), c.y + r * th.sin(), z0 + (z1 - z0) * s)
    };
    let speed = move |s: f64| {
        let th = t0 + w * s;
        let (dx, dy, dz) = (-r * w * th.sin(), r * w * th.cos(), z1 - z0);
        (dx * dx + dy * dy + dz * dz).sqrt()
    };
    volume_by_quadrature(terrain, params, &point, &speed, 1e-12)
}

pub fn rel_err(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / b.abs().max(floor)
}

// ---------------------------------------------------------------------------
// Plane fit and angles

/// Least-squares plane through `(x, y, z)` samples from the 3×3 normal equations.
pub fn plane_fit_normal_equations(pts: &[(f64, f64, f64)]) -> (f64, f64, f64) {
    let mut m = [[0.0f64; 4]; 3];
    for &(x, y, z) in pts {
        let row = [x, y, 1.0];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += row[i] * row[j];
            }
            m[i][3] += row[i] * z;
        }
    }
    // Gauss-Jordan with partial pivoting.
    for col in 0..3 {
        let piv = (col..3).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs())).unwrap();
        m.swap(col, piv);
        for r in 0..3 {
            if r != col {
                let f = m[r][col] / m[col][col];
                for c in col..4 {
                    m[r][c] -= f * m[col][c];
                }
            }
        }
    }
    (m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2])
}

/// Unsigned angle between two vectors via `atan2(|a×b|, a·b)`.
pub fn angle_atan2(a: Point2, b: Point2) -> f64 {
    let cross = a.x * b.y - a.y * b.x;
    let dot = a.x * b.x + a.y * b.y;
    cross.abs().atan2(dot)
}

// ---------------------------------------------------------------------------
// Pareto

pub fn dominates_oracle(a: [f64; 2], b: [f64; 2]) -> bool {
    (a[0] <= b[0] && a[1] <= b[1]) && (a[0] < b[0] || a[1] < b[1])
}

/// Indices of points no other point dominates; equal points keep the first occurrence.
pub fn brute_force_front(points: &[[f64; 2]]) -> Vec<usize> {
    (0..points.len())
        .filter(|&i| {
            !points.iter().enumerate().any(|(j, p)| {
                dominates_oracle(*p, points[i]) || (j < i && *p == points[i])
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Terrains and problems

pub fn random_raster(r: &mut ChaCha8Rng, n_cols: usize, n_rows: usize, cell: f64, relief: f64) -> ElevationRaster {
    let values = (0..n_cols * n_rows).map(|_| r.gen_range(0.0..relief)).collect();
    ElevationRaster { origin_x: 0.0, origin_y: 0.0, spacing: cell, n_cols, n_rows, values }
}

pub fn random_terrain(r: &mut ChaCha8Rng, n_cells: usize, cell: f64, relief: f64) -> TerrainGrid {
    TerrainGrid::from_raster(&random_raster(r, n_cells + 1, n_cells + 1, cell, relief)).unwrap()
}

/// Rolling synthetic terrain, `width × height` metres at `cell` spacing.
pub fn rolling_terrain(width: f64, height: f64, cell: f64, amplitude: f64, seed: u64) -> TerrainGrid {
    let mut r = rng(seed);
    let (p1, p2, p3): (f64, f64, f64) = (r.gen_range(0.0..6.28), r.gen_range(0.0..6.28), r.gen_range(0.0..6.28));
    let n_cols = (width / cell).round() as usize + 1;
    let n_rows = (height / cell).round() as usize + 1;
    let raster = ElevationRaster::from_fn(0.0, 0.0, cell, n_cols, n_rows, |x, y| {
        100.0
            + 0.02 * y
            + amplitude * ((x / 80.0 + p1).sin() * (y / 110.0 + p2).cos())
            + 0.3 * amplitude * ((x + y) / 45.0 + p3).sin()
    });
    TerrainGrid::from_raster(&raster).unwrap()
}

/// A road across `terrain` from `(x_mid, y0)` to `(x_mid, y1)` with `n` IP boxes.
pub fn road_problem(terrain: TerrainGrid, n: usize, m: usize, half_width: f64, z_bar: f64) -> RoadProblem {
    let x_mid = 0.5 * terrain.x_max() + 0.5 * terrain.origin().0;
    let (y0, y1) = (terrain.origin().1 + 5.0, terrain.y_max() - 5.0);
    let boxes = (1..=n)
        .map(|k| {
            let y = y0 + (y1 - y0) * k as f64 / (n + 1) as f64;
            IpBox { x_lo: x_mid - half_width, x_hi: x_mid + half_width, y_lo: y - half_width, y_hi: y + half_width }
        })
        .collect();
    let start = Point3::new(x_mid, y0, terrain.ground_elevation(x_mid, y0).unwrap());
    let end = Point3::new(x_mid, y1, terrain.ground_elevation(x_mid, y1).unwrap());
    RoadProblem::new(
        terrain,
        start,
        end,
        vec![m; n + 1],
        CostParameters::default(),
        ConstraintConfig { boxes, r_min: 20.0, max_grade: 0.15, z_bar },
        200.0,
    )
    .unwrap()
}

// ---------------------------------------------------------------------------
// Toy bi-objective problem

/// `f_e = (t − 2)² + Σ x_i²`, `f_u = t² + Σ x_i²` over `t = x_0`. The Pareto set is
/// `t ∈ [0, 2]` with the other coordinates at zero.
pub struct ShiftedQuadratics {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub scale: f64,
}

impl ShiftedQuadratics {
    pub fn new(dim: usize) -> Self {
        Self { lo: vec![-10.0; dim], hi: vec![10.0; dim], scale: 1.0 }
    }
}

impl BiObjectiveProblem for ShiftedQuadratics {
    fn dimension(&self) -> usize {
        self.lo.len()
    }
    fn bounds(&self) -> (&[f64], &[f64]) {
        (&self.lo, &self.hi)
    }
    fn evaluate(&self, x: &[f64]) -> Evaluation {
        let rest: f64 = x[1..].iter().map(|v| v * v).sum();
        Evaluation::feasible([
            self.scale * ((x[0] - 2.0).powi(2) + rest),
            self.scale * (x[0] * x[0] + rest),
        ])
    }
}

// ---------------------------------------------------------------------------
// Files

pub const CASE_CONFIG: &str = r#"
[terrain]
path = "terrain.asc"

[alignment]
start = [250.0, 5.0]
end = [250.0, 995.0]
n_ips = 6
m = 5

[costs]
cut = 4.0
fill = 2.0
waste = 8.0
utility = 1.2
width = 5.0
kappa = 1.0

[constraints]
r_min = 20.0
r_max = 200.0
max_grade = 0.15
z_bar = 10.0
box_half_width = 60.0

[solver]
kind = "dms"
budget = 51000
seed = 1
"#;

/// Writes the case-study terrain (500 × 1000 m, 10 m cells) and config into `dir`.
pub fn write_case_study(dir: &Path, budget: usize) -> std::path::PathBuf {
    use roadalign::cli::{generate_terrain, GenTerrainArgs, TerrainKind};
    let raster = generate_terrain(&GenTerrainArgs {
        kind: TerrainKind::Sinusoidal,
        width: 500.0,
        height: 1000.0,
        cell: 10.0,
        base: 100.0,
        amplitude: 15.0,
        wavelength: 400.0,
        slope_x: 0.0,
        slope_y: 0.02,
        seed: 7,
        out: dir.join("terrain.asc"),
    })
    .unwrap();
    std::fs::write(dir.join("terrain.asc"), raster.to_ascii()).unwrap();
    let cfg = dir.join("case.toml");
    std::fs::write(&cfg, CASE_CONFIG.replace("budget = 51000", &format!("budget = {budget}"))).unwrap();
    cfg
}

/// Number of non-dominated members with `x_0` in the Pareto interval, and the
/// distances from the front's extreme `x_0` values to the interval ends 0 and 2.
pub fn toy_front_coverage(front: &roadalign::moo::ParetoFront) -> (usize, f64, f64) {
    let members = front.members();
    let objs: Vec<[f64; 2]> = members.iter().map(|m| m.objectives).collect();
    let nd = brute_force_front(&objs);
    let inside = nd.iter().filter(|&&i| (-1e-2..=2.0 + 1e-2).contains(&members[i].x[0])).count();
    let t_min = members.iter().map(|m| m.x[0]).fold(f64::INFINITY, f64::min);
    let t_max = members.iter().map(|m| m.x[0]).fold(f64::NEG_INFINITY, f64::max);
    (inside.min(nd.len()), t_min.abs(), (t_max - 2.0).abs())
}
