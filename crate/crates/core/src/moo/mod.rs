//! Bi-objective derivative-free solvers: weighted-sum coordinate search, direct
//! multisearch and a constraint-dominating genetic algorithm.
//!
//! Solvers see a black box through [`BiObjectiveProblem`] and count every call
//! through an [`Evaluator`].

pub mod dms;
pub mod ea;
pub mod pareto;
pub mod poll;
pub mod road;
pub mod ws;

use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;

pub use dms::{solve_dms, DmsConfig};
pub use ea::{solve_ea, EaConfig, GenerationStats};
pub use pareto::{dominates, hypervolume_2d, pareto_filter, FrontMember, NadirUtopia, ParetoFront};
pub use road::{seed_alignment, RoadProblem};
pub use ws::{solve_weighted_sum, weighted_sum, WsConfig};

/// Infeasibility recorded for designs that could not be evaluated at all.
pub const FAILED_INFEASIBILITY: f64 = 1e30;

/// Outcome of one black-box call.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    /// `[Cost_e, Cost_u]`, both minimized.
    pub objectives: [f64; 2],
    /// `Σ max(0, v)²` over violations above tolerance; zero iff feasible.
    pub infeasibility: f64,
}

impl Evaluation {
    pub fn feasible(objectives: [f64; 2]) -> Self {
        Self {
            objectives,
            infeasibility: 0.0,
        }
    }

    pub fn failed() -> Self {
        Self {
            objectives: [f64::INFINITY; 2],
            infeasibility: FAILED_INFEASIBILITY,
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.infeasibility == 0.0 && self.objectives.iter().all(|v| v.is_finite())
    }
}

/// A box-bounded problem with two minimized objectives.
pub trait BiObjectiveProblem: Sync {
    fn dimension(&self) -> usize;

    /// Lower and upper bounds, each of length [`Self::dimension`].
    fn bounds(&self) -> (&[f64], &[f64]);

    /// Per-variable poll scale; defaults to the bound width.
    fn scales(&self) -> Vec<f64> {
        let (lo, hi) = self.bounds();
        lo.iter().zip(hi).map(|(l, h)| h - l).collect()
    }

    fn evaluate(&self, x: &[f64]) -> Evaluation;
}

/// Counts evaluations and hands out global evaluation indices.
pub struct Evaluator<'a, P: ?Sized> {
    problem: &'a P,
    count: AtomicUsize,
}

impl<'a, P: BiObjectiveProblem + ?Sized> Evaluator<'a, P> {
    pub fn new(problem: &'a P) -> Self {
        Self {
            problem,
            count: AtomicUsize::new(0),
        }
    }

    pub fn problem(&self) -> &'a P {
        self.problem
    }

    pub fn count(&self) -> usize {
        self.count.load(Ordering::SeqCst)
    }

    /// Evaluates one point and returns its index with the result.
    pub fn evaluate(&self, x: &[f64]) -> (usize, Evaluation) {
        let idx = self.count.fetch_add(1, Ordering::SeqCst);
        (idx, self.problem.evaluate(x))
    }

    /// Evaluates a batch in parallel; indices follow the batch order.
    pub fn evaluate_batch(&self, xs: &[Vec<f64>]) -> Vec<(usize, Evaluation)> {
        let base = self.count.fetch_add(xs.len(), Ordering::SeqCst);
        let evals: Vec<Evaluation> = xs.par_iter().map(|x| self.problem.evaluate(x)).collect();
        evals
            .into_iter()
            .enumerate()
            .map(|(i, e)| (base + i, e))
            .collect()
    }
}

/// Result of a solver run.
#[derive(Debug, Clone)]
pub struct SolverOutcome {
    /// Feasible non-dominated points found.
    pub front: ParetoFront,
    /// Every point the solver reports before filtering (one per run for WS).
    pub candidates: Vec<FrontMember>,
    pub evaluations: usize,
    pub iterations: usize,
}

/// Clips `x` into the box in place.
pub fn clip(x: &mut [f64], lo: &[f64], hi: &[f64]) {
    for ((v, l), h) in x.iter_mut().zip(lo).zip(hi) {
        *v = v.clamp(*l, *h);
    }
}
