//! Coordinate poll sets shared by the direct-search solvers.

use super::clip;

/// Poll direction: variable index and sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Direction {
    pub var: usize,
    pub positive: bool,
}

/// The `2n` directions `+e_0, −e_0, +e_1, …`, skipping variables with zero scale.
pub fn directions(scales: &[f64]) -> Vec<Direction> {
    scales
        .iter()
        .enumerate()
        .filter(|(_, s)| **s > 0.0)
        .flat_map(|(var, _)| {
            [
                Direction { var, positive: true },
                Direction { var, positive: false },
            ]
        })
        .collect()
}

/// `x ± step·scale_i·e_i`, clipped to the box.
pub fn poll_point(
    x: &[f64],
    d: Direction,
    step: f64,
    scales: &[f64],
    lo: &[f64],
    hi: &[f64],
) -> Vec<f64> {
    let mut y = x.to_vec();
    let delta = step * scales[d.var];
    y[d.var] += if d.positive { delta } else { -delta };
    clip(&mut y, lo, hi);
    y
}

/// Complete poll set around `x`. Points that clipping maps back onto `x` are dropped.
pub fn poll_set(x: &[f64], step: f64, scales: &[f64], lo: &[f64], hi: &[f64]) -> Vec<Vec<f64>> {
    directions(scales)
        .into_iter()
        .map(|d| poll_point(x, d, step, scales, lo, hi))
        .filter(|y| y.as_slice() != x)
        .collect()
}
