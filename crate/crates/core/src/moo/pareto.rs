//! Dominance, non-dominated filtering and front statistics for two minimized
//! objectives.

use std::cmp::Ordering;

/// True iff `a` is no worse than `b` in both objectives and differs from it.
pub fn dominates(a: [f64; 2], b: [f64; 2]) -> bool {
    a[0] <= b[0] && a[1] <= b[1] && a != b
}

/// A point of a front: its objectives, decision vector and global evaluation index.
#[derive(Debug, Clone, PartialEq)]
pub struct FrontMember {
    pub objectives: [f64; 2],
    pub x: Vec<f64>,
    pub eval_index: usize,
}

fn order(a: &FrontMember, b: &FrontMember) -> Ordering {
    a.objectives[0]
        .total_cmp(&b.objectives[0])
        .then(a.objectives[1].total_cmp(&b.objectives[1]))
        .then(a.eval_index.cmp(&b.eval_index))
}

/// Mutually non-dominated members sorted by the first objective ascending (so the
/// second is strictly descending).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ParetoFront {
    members: Vec<FrontMember>,
}

impl ParetoFront {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn members(&self) -> &[FrontMember] {
        &self.members
    }

    pub fn into_members(self) -> Vec<FrontMember> {
        self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn objectives(&self) -> Vec<[f64; 2]> {
        self.members.iter().map(|m| m.objectives).collect()
    }

    /// Adds `m` unless some member dominates or equals it; evicts members it dominates.
    /// Returns whether `m` was added. Non-finite objectives are rejected.
    pub fn insert(&mut self, m: FrontMember) -> bool {
        if !m.objectives.iter().all(|v| v.is_finite()) {
            return false;
        }
        if self
            .members
            .iter()
            .any(|o| o.objectives == m.objectives || dominates(o.objectives, m.objectives))
        {
            return false;
        }
        self.members.retain(|o| !dominates(m.objectives, o.objectives));
        let pos = self
            .members
            .partition_point(|o| order(o, &m) == Ordering::Less);
        self.members.insert(pos, m);
        true
    }

    /// Component-wise extremes of the front, `None` when empty.
    pub fn nadir_utopia(&self) -> Option<NadirUtopia> {
        let first = self.members.first()?;
        let last = self.members.last()?;
        // Sorted by the first objective ascending, second descending.
        Some(NadirUtopia {
            nadir: [last.objectives[0], first.objectives[1]],
            utopia: [first.objectives[0], last.objectives[1]],
        })
    }
}

/// Non-dominated subset of `points`. Equal objective pairs collapse to the one
/// with the smallest evaluation index; non-finite pairs are dropped.
pub fn pareto_filter(points: impl IntoIterator<Item = FrontMember>) -> ParetoFront {
    let mut pts: Vec<FrontMember> = points
        .into_iter()
        .filter(|m| m.objectives.iter().all(|v| v.is_finite()))
        .collect();
    pts.sort_by(order);
    let mut members: Vec<FrontMember> = Vec::with_capacity(pts.len());
    for p in pts {
        match members.last() {
            Some(last) if p.objectives[1] >= last.objectives[1] => {}
            _ => members.push(p),
        }
    }
    ParetoFront { members }
}

/// Nadir (component-wise worst) and Utopia (component-wise best) points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NadirUtopia {
    pub nadir: [f64; 2],
    pub utopia: [f64; 2],
}

impl NadirUtopia {
    pub fn from_points(points: &[[f64; 2]]) -> Option<Self> {
        if points.is_empty() {
            return None;
        }
        let mut nadir = [f64::NEG_INFINITY; 2];
        let mut utopia = [f64::INFINITY; 2];
        for p in points {
            for i in 0..2 {
                nadir[i] = nadir[i].max(p[i]);
                utopia[i] = utopia[i].min(p[i]);
            }
        }
        Some(Self { nadir, utopia })
    }

    /// `N_i = 1 / (C_i^N − C_i^I)`; a degenerate range falls back to `1 / max(|C_i^I|, 1)`.
    pub fn normalization(&self) -> [f64; 2] {
        let mut out = [1.0; 2];
        for (i, o) in out.iter_mut().enumerate() {
            let range = self.nadir[i] - self.utopia[i];
            *o = if range > 0.0 && range.is_finite() {
                1.0 / range
            } else {
                1.0 / self.utopia[i].abs().max(1.0)
            };
        }
        out
    }
}

/// Area dominated by `points` and bounded by `reference`.
pub fn hypervolume_2d(points: &[[f64; 2]], reference: [f64; 2]) -> f64 {
    let mut pts: Vec<[f64; 2]> = points
        .iter()
        .copied()
        .filter(|p| p[0] < reference[0] && p[1] < reference[1])
        .collect();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    let mut area = 0.0;
    let mut ceiling = reference[1];
    for p in pts {
        if p[1] < ceiling {
            area += (reference[0] - p[0]) * (ceiling - p[1]);
            ceiling = p[1];
        }
    }
    area
}
