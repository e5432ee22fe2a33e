//! Weighted-sum scalarization solved by repeated opportunistic coordinate search.

use serde::{Deserialize, Serialize};

use super::pareto::{pareto_filter, FrontMember, NadirUtopia};
use super::poll::{directions, poll_point};
use super::{BiObjectiveProblem, Evaluation, Evaluator, SolverOutcome};
use crate::error::{Error, Result};

/// `v_e N_e C_e + (1 − v_e) N_u C_u`.
pub fn weighted_sum(objectives: [f64; 2], v_e: f64, normalization: [f64; 2]) -> f64 {
    v_e * normalization[0] * objectives[0] + (1.0 - v_e) * normalization[1] * objectives[1]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WsConfig {
    pub n_weights: usize,
    /// Evaluations per scalarized run; `None` splits `budget` evenly.
    pub per_run_budget: Option<usize>,
    /// Taken from the run-level budget, not the solver block.
    #[serde(skip)]
    pub budget: usize,
    /// Initial step as a fraction of each variable's scale.
    pub initial_step: f64,
    /// Weight of the quadratic penalty; infinite means infeasible points are rejected.
    pub penalty_weight: f64,
}

impl Default for WsConfig {
    fn default() -> Self {
        Self {
            n_weights: 51,
            per_run_budget: None,
            budget: 51_000,
            initial_step: 0.1,
            penalty_weight: f64::INFINITY,
        }
    }
}

impl WsConfig {
    pub fn run_budget(&self) -> usize {
        self.per_run_budget
            .unwrap_or(self.budget / self.n_weights.max(1))
            .max(1)
    }

    /// Energy weights `v_e = i / (n − 1)`; a single weight means `v_e = 1`.
    pub fn weights(&self) -> Vec<f64> {
        match self.n_weights {
            0 => vec![],
            1 => vec![1.0],
            n => (0..n).map(|i| i as f64 / (n - 1) as f64).collect(),
        }
    }
}

struct Visited {
    x: Vec<f64>,
    eval: Evaluation,
    index: usize,
}

/// Minimizes `scalar` (plus penalty) from `x0` by opportunistic coordinate polls.
/// Returns the best feasible point visited, if any.
fn coordinate_search<P: BiObjectiveProblem + ?Sized>(
    ev: &Evaluator<P>,
    start: &Visited,
    scalar: &dyn Fn([f64; 2]) -> f64,
    penalty_weight: f64,
    budget: usize,
    initial_step: f64,
) -> (Option<Visited>, usize) {
    let problem = ev.problem();
    let (lo, hi) = problem.bounds();
    let scales = problem.scales();
    let dirs = directions(&scales);
    let merit = |e: &Evaluation| -> f64 {
        let f = scalar(e.objectives);
        if !f.is_finite() {
            return f64::INFINITY;
        }
        if e.infeasibility == 0.0 {
            f
        } else if penalty_weight.is_infinite() {
            f64::INFINITY
        } else {
            f + penalty_weight * e.infeasibility
        }
    };
    let better_feasible = |cand: &Visited, best: &Option<Visited>| {
        cand.eval.is_feasible()
            && best
                .as_ref()
                .map_or(true, |b| scalar(cand.eval.objectives) < scalar(b.eval.objectives))
    };

    let mut x = start.x.clone();
    let mut fx = merit(&start.eval);
    let mut best = if start.eval.is_feasible() {
        Some(Visited { x: start.x.clone(), eval: start.eval, index: start.index })
    } else {
        None
    };
    let mut step = initial_step;
    let mut used = 0;
    let mut iterations = 0;
    // Directions are tried starting from the last successful one.
    let mut first = 0;
    while used < budget && !dirs.is_empty() {
        iterations += 1;
        let mut success = false;
        for t in 0..dirs.len() {
            let di = (first + t) % dirs.len();
            let y = poll_point(&x, dirs[di], step, &scales, lo, hi);
            if y == x {
                continue;
            }
            let (index, e) = ev.evaluate(&y);
            used += 1;
            let cand = Visited { x: y, eval: e, index };
            let fy = merit(&e);
            if better_feasible(&cand, &best) {
                best = Some(Visited { x: cand.x.clone(), eval: e, index });
            }
            if fy < fx {
                x = cand.x;
                fx = fy;
                first = di;
                success = true;
                break;
            }
            if used >= budget {
                break;
            }
        }
        if !success {
            step *= 0.5;
            if step == 0.0 {
                break;
            }
        }
    }
    (best, iterations)
}

/// Runs one coordinate search per weight, anchors `v_e = 1` and `v_e = 0` first,
/// and filters the per-run optima.
pub fn solve_weighted_sum<P: BiObjectiveProblem + ?Sized>(
    problem: &P,
    seed: &[f64],
    config: &WsConfig,
) -> Result<SolverOutcome> {
    let ev = Evaluator::new(problem);
    let run_budget = config.run_budget();
    let (seed_index, seed_eval) = ev.evaluate(seed);
    if !seed_eval.is_feasible() {
        return Err(Error::Seeding("weighted-sum seed is infeasible".into()));
    }
    let start = Visited { x: seed.to_vec(), eval: seed_eval, index: seed_index };

    let weights = config.weights();
    // Anchors are scaled by the seed magnitudes so finite penalties stay comparable.
    let seed_scale = seed_eval.objectives.map(|v| {
        if v.is_finite() {
            1.0 / v.abs().max(1.0)
        } else {
            1.0
        }
    });

    let mut order: Vec<usize> = Vec::with_capacity(weights.len());
    let n = weights.len();
    if n >= 1 {
        order.push(n - 1);
    }
    if n >= 2 {
        order.push(0);
        order.extend(1..n - 1);
    }

    let mut results: Vec<Option<Visited>> = (0..n).map(|_| None).collect();
    let mut normalization = seed_scale;
    let mut iterations = 0;
    for (pos, &wi) in order.iter().enumerate() {
        let v_e = weights[wi];
        let remaining = config.budget.saturating_sub(ev.count());
        if remaining == 0 {
            break;
        }
        let (best, it) = coordinate_search(
            &ev,
            &start,
            &|obj| weighted_sum(obj, v_e, normalization),
            config.penalty_weight,
            match config.per_run_budget {
                Some(_) => run_budget.min(remaining),
                // Spread what is left over the remaining weights.
                None => (remaining / (n - pos)).max(1),
            },
            config.initial_step,
        );
        iterations += it;
        log::debug!("weight v_e = {v_e}: {} evaluations so far", ev.count());
        results[wi] = best;
        if pos == 1 || (pos == 0 && n == 1) {
            let anchors: Vec<[f64; 2]> = results
                .iter()
                .flatten()
                .map(|v| v.eval.objectives)
                .collect();
            if let Some(nu) = NadirUtopia::from_points(&anchors) {
                if anchors.len() == 2 {
                    normalization = nu.normalization();
                }
            }
        }
    }

    let mut candidates: Vec<FrontMember> = results
        .into_iter()
        .flatten()
        .map(|v| FrontMember { objectives: v.eval.objectives, x: v.x, eval_index: v.index })
        .collect();
    if candidates.is_empty() {
        candidates.push(FrontMember { objectives: seed_eval.objectives, x: start.x, eval_index: seed_index });
    }
    Ok(SolverOutcome {
        front: pareto_filter(candidates.clone()),
        candidates,
        evaluations: ev.count(),
        iterations,
    })
}
