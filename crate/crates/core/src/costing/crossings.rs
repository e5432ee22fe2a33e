use crate::terrain::TerrainGrid;

/// Parameters closer than this are merged.
pub const DEDUP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrossingKind {
    Endpoint,
    XBoundary,
    YBoundary,
    /// Cut/fill transition, `h(s) = 0`.
    Transition,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    pub s: f64,
    pub kind: CrossingKind,
}

/// Earthwork state of an interval between two crossings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Earthwork {
    Cut,
    Fill,
    /// Road exactly on the ground.
    Level,
}

impl Earthwork {
    pub fn from_height(h: f64) -> Self {
        if h > 0.0 {
            Earthwork::Cut
        } else if h < 0.0 {
            Earthwork::Fill
        } else {
            Earthwork::Level
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossingInterval {
    pub s0: f64,
    pub s1: f64,
    pub cell: (usize, usize),
    pub state: Earthwork,
}

/// Sorted crossing parameters of one segment (local parameter in `[0, 1]`)
/// together with the cell and cut/fill state active on each open interval.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SegmentCrossings {
    pub points: Vec<Crossing>,
    pub intervals: Vec<CrossingInterval>,
}

impl SegmentCrossings {
    pub fn params(&self) -> Vec<f64> {
        self.points.iter().map(|c| c.s).collect()
    }
}

/// Sorts and merges parameters closer than [`DEDUP_TOL`]; the earlier entry wins,
/// except that endpoints always keep their exact value.
pub(crate) fn sort_dedup(mut pts: Vec<Crossing>) -> Vec<Crossing> {
    pts.sort_by(|a, b| a.s.total_cmp(&b.s));
    let mut out: Vec<Crossing> = Vec::with_capacity(pts.len());
    for c in pts {
        match out.last_mut() {
            Some(last) if (c.s - last.s).abs() <= DEDUP_TOL => {
                if c.kind == CrossingKind::Endpoint {
                    *last = c;
                }
            }
            _ => out.push(c),
        }
    }
    out
}

/// Grid line indices strictly inside the open range `(lo, hi)`.
pub(crate) fn lines_between(origin: f64, cell: f64, n_lines: usize, lo: f64, hi: f64) -> Vec<usize> {
    if !(hi > lo) {
        return Vec::new();
    }
    let first = ((lo - origin) / cell).floor().max(0.0) as usize;
    let last = (((hi - origin) / cell).ceil().max(0.0) as usize).min(n_lines - 1);
    (first..=last)
        .filter(|&u| {
            let g = origin + u as f64 * cell;
            g > lo && g < hi
        })
        .collect()
}

pub(crate) fn x_lines(terrain: &TerrainGrid, lo: f64, hi: f64) -> Vec<(usize, f64)> {
    let (ox, _) = terrain.origin();
    lines_between(ox, terrain.cell_size(), terrain.n_cols() + 1, lo, hi)
        .into_iter()
        .map(|u| (u, terrain.grid_x(u)))
        .collect()
}

pub(crate) fn y_lines(terrain: &TerrainGrid, lo: f64, hi: f64) -> Vec<(usize, f64)> {
    let (_, oy) = terrain.origin();
    lines_between(oy, terrain.cell_size(), terrain.n_rows() + 1, lo, hi)
        .into_iter()
        .map(|v| (v, terrain.grid_y(v)))
        .collect()
}
