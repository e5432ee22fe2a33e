//! Direct multisearch: a list of non-dominated points, each with its own step,
//! polled one at a time in round-robin order.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::pareto::{FrontMember, ParetoFront};
use super::poll::poll_set;
use super::{BiObjectiveProblem, Evaluator, SolverOutcome};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DmsConfig {
    /// Taken from the run-level budget, not the solver block.
    #[serde(skip)]
    pub budget: usize,
    /// Initial step as a fraction of each variable's scale.
    pub initial_step: f64,
}

impl Default for DmsConfig {
    fn default() -> Self {
        Self {
            budget: 51_000,
            initial_step: 0.1,
        }
    }
}

/// Runs direct multisearch from `seeds`. Infeasible points never enter the list.
///
/// The budget is checked before each poll, so the final count can exceed it by
/// at most one complete poll.
pub fn solve_dms<P: BiObjectiveProblem + ?Sized>(
    problem: &P,
    seeds: &[Vec<f64>],
    config: &DmsConfig,
) -> Result<SolverOutcome> {
    let ev = Evaluator::new(problem);
    let (lo, hi) = problem.bounds();
    let scales = problem.scales();

    let mut list = ParetoFront::new();
    let mut steps: HashMap<usize, f64> = HashMap::new();
    for ((index, e), x) in ev.evaluate_batch(seeds).into_iter().zip(seeds.iter().cloned()) {
        if e.is_feasible() && list.insert(FrontMember { objectives: e.objectives, x, eval_index: index }) {
            steps.insert(index, config.initial_step);
        }
    }

    if list.is_empty() {
        return Err(Error::Seeding("no feasible point among the initial list".into()));
    }

    let mut cursor = 0usize;
    let mut iterations = 0;
    while ev.count() < config.budget && !list.is_empty() {
        let center = list.members()[cursor % list.len()].clone();
        cursor += 1;
        let step = steps[&center.eval_index];
        if step == 0.0 {
            if list.members().iter().all(|m| steps[&m.eval_index] == 0.0) {
                break;
            }
            continue;
        }
        iterations += 1;
        let polls = poll_set(&center.x, step, &scales, lo, hi);
        let results = ev.evaluate_batch(&polls);
        let mut success = false;
        for ((index, e), x) in results.into_iter().zip(polls) {
            if e.is_feasible()
                && list.insert(FrontMember { objectives: e.objectives, x, eval_index: index })
            {
                steps.insert(index, step);
                success = true;
            }
        }
        if !success {
            steps.insert(center.eval_index, 0.5 * step);
        }
    }
    log::debug!("dms: {iterations} polls, {} points", list.len());

    Ok(SolverOutcome {
        candidates: list.members().to_vec(),
        front: list,
        evaluations: ev.count(),
        iterations,
    })
}
