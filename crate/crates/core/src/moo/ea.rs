//! Elitist genetic algorithm with non-dominated sorting, crowding distance and
//! constraint domination.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::pareto::{dominates, FrontMember, ParetoFront};
use super::{clip, BiObjectiveProblem, Evaluation, Evaluator, SolverOutcome};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EaConfig {
    pub population: usize,
    /// Taken from the run-level budget, not the solver block.
    #[serde(skip)]
    pub budget: usize,
    pub crossover_rate: f64,
    /// SBX distribution index.
    pub eta_crossover: f64,
    /// Per-variable mutation probability; `None` means `1 / dimension`.
    pub mutation_rate: Option<f64>,
    /// Mutation standard deviation as a fraction of each variable's scale.
    pub mutation_sigma: f64,
    /// Spread of the perturbed seeds filling the initial population.
    pub init_sigma: f64,
    #[serde(skip)]
    pub seed: u64,
}

impl Default for EaConfig {
    fn default() -> Self {
        Self {
            population: 120,
            budget: 51_000,
            crossover_rate: 0.9,
            eta_crossover: 15.0,
            mutation_rate: None,
            mutation_sigma: 0.05,
            init_sigma: 0.05,
            seed: 0,
        }
    }
}

impl EaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population < 4 {
            return Err(Error::SolverConfig(format!(
                "population must be at least 4, got {}",
                self.population
            )));
        }
        if !(0.0..=1.0).contains(&self.crossover_rate) {
            return Err(Error::SolverConfig(format!(
                "crossover_rate must lie in [0, 1], got {}",
                self.crossover_rate
            )));
        }
        if let Some(p) = self.mutation_rate {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::SolverConfig(format!("mutation_rate must lie in [0, 1], got {p}")));
            }
        }
        if !(self.mutation_sigma >= 0.0 && self.init_sigma >= 0.0 && self.eta_crossover >= 0.0) {
            return Err(Error::SolverConfig("negative spread or distribution index".into()));
        }
        Ok(())
    }
}

/// Reported to the observer after each generation (generation 0 is the initial population).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenerationStats {
    pub generation: usize,
    pub evaluations: usize,
    pub archive_size: usize,
}

#[derive(Debug, Clone)]
struct Individual {
    x: Vec<f64>,
    eval: Evaluation,
}

/// Feasible beats infeasible, lower infeasibility beats higher, and among
/// feasible points ordinary dominance applies.
fn constraint_dominates(a: &Evaluation, b: &Evaluation) -> bool {
    match (a.is_feasible(), b.is_feasible()) {
        (true, false) => true,
        (false, true) => false,
        (false, false) => a.infeasibility < b.infeasibility,
        (true, true) => dominates(a.objectives, b.objectives),
    }
}

/// Fronts of indices into `pop`, best first.
fn non_dominated_sort(pop: &[Individual]) -> Vec<Vec<usize>> {
    let n = pop.len();
    let mut dominated_by = vec![0usize; n];
    let mut dominates_list: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            if constraint_dominates(&pop[i].eval, &pop[j].eval) {
                dominates_list[i].push(j);
                dominated_by[j] += 1;
            } else if constraint_dominates(&pop[j].eval, &pop[i].eval) {
                dominates_list[j].push(i);
                dominated_by[i] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| dominated_by[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominates_list[i] {
                dominated_by[j] -= 1;
                if dominated_by[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(current);
        current = next;
    }
    fronts
}

fn crowding_distance(pop: &[Individual], front: &[usize]) -> Vec<f64> {
    let mut dist = vec![0.0; front.len()];
    if front.len() <= 2 {
        return vec![f64::INFINITY; front.len()];
    }
    for obj in 0..2 {
        let mut order: Vec<usize> = (0..front.len()).collect();
        order.sort_by(|&a, &b| {
            pop[front[a]].eval.objectives[obj].total_cmp(&pop[front[b]].eval.objectives[obj])
        });
        let fmin = pop[front[order[0]]].eval.objectives[obj];
        let fmax = pop[front[*order.last().unwrap()]].eval.objectives[obj];
        let range = fmax - fmin;
        dist[order[0]] = f64::INFINITY;
        dist[*order.last().unwrap()] = f64::INFINITY;
        if !(range > 0.0 && range.is_finite()) {
            continue;
        }
        for w in 1..order.len() - 1 {
            let gap = pop[front[order[w + 1]]].eval.objectives[obj]
                - pop[front[order[w - 1]]].eval.objectives[obj];
            dist[order[w]] += gap / range;
        }
    }
    dist
}

/// Rank and crowding distance of every individual.
fn rank_and_crowd(pop: &[Individual]) -> (Vec<usize>, Vec<f64>) {
    let mut rank = vec![0; pop.len()];
    let mut crowd = vec![0.0; pop.len()];
    for (r, front) in non_dominated_sort(pop).iter().enumerate() {
        let d = crowding_distance(pop, front);
        for (k, &i) in front.iter().enumerate() {
            rank[i] = r;
            crowd[i] = d[k];
        }
    }
    (rank, crowd)
}

/// Keeps the best `size` individuals by rank, then crowding distance.
fn select_survivors(pop: Vec<Individual>, size: usize) -> Vec<Individual> {
    let mut keep: Vec<usize> = Vec::with_capacity(size);
    for front in non_dominated_sort(&pop) {
        if keep.len() + front.len() <= size {
            keep.extend(&front);
        } else {
            let d = crowding_distance(&pop, &front);
            let mut order: Vec<usize> = (0..front.len()).collect();
            order.sort_by(|&a, &b| d[b].total_cmp(&d[a]).then(front[a].cmp(&front[b])));
            keep.extend(order.into_iter().take(size - keep.len()).map(|k| front[k]));
        }
        if keep.len() == size {
            break;
        }
    }
    keep.sort_unstable();
    let mut slots: Vec<Option<Individual>> = pop.into_iter().map(Some).collect();
    keep.into_iter().map(|i| slots[i].take().unwrap()).collect()
}

fn tournament(rng: &mut ChaCha8Rng, rank: &[usize], crowd: &[f64]) -> usize {
    let a = rng.gen_range(0..rank.len());
    let b = rng.gen_range(0..rank.len());
    if rank[a] != rank[b] {
        if rank[a] < rank[b] {
            a
        } else {
            b
        }
    } else if crowd[b] > crowd[a] {
        b
    } else {
        a
    }
}

/// Simulated binary crossover, applied per variable with probability ½.
fn sbx(rng: &mut ChaCha8Rng, p1: &[f64], p2: &[f64], eta: f64) -> (Vec<f64>, Vec<f64>) {
    let mut c1 = p1.to_vec();
    let mut c2 = p2.to_vec();
    for i in 0..p1.len() {
        if rng.gen::<f64>() > 0.5 {
            continue;
        }
        let u: f64 = rng.gen();
        let beta = if u <= 0.5 {
            (2.0 * u).powf(1.0 / (eta + 1.0))
        } else {
            (1.0 / (2.0 * (1.0 - u))).powf(1.0 / (eta + 1.0))
        };
        c1[i] = 0.5 * ((1.0 + beta) * p1[i] + (1.0 - beta) * p2[i]);
        c2[i] = 0.5 * ((1.0 - beta) * p1[i] + (1.0 + beta) * p2[i]);
    }
    (c1, c2)
}

fn mutate(rng: &mut ChaCha8Rng, x: &mut [f64], rate: f64, sigma: f64, scales: &[f64]) {
    for (v, s) in x.iter_mut().zip(scales) {
        if rng.gen::<f64>() < rate {
            let z: f64 = StandardNormal.sample(rng);
            *v += sigma * s * z;
        }
    }
}

/// Runs the genetic algorithm. `observer` sees the feasible archive after every
/// generation. The budget is checked once per generation.
pub fn solve_ea<P: BiObjectiveProblem + ?Sized>(
    problem: &P,
    seeds: &[Vec<f64>],
    config: &EaConfig,
    observer: &mut dyn FnMut(&GenerationStats, &ParetoFront),
) -> Result<SolverOutcome> {
    config.validate()?;
    if seeds.is_empty() {
        return Err(Error::SolverConfig("at least one seed is required".into()));
    }
    let dim = problem.dimension();
    let (lo, hi) = problem.bounds();
    let scales = problem.scales();
    let mutation_rate = config.mutation_rate.unwrap_or(1.0 / dim.max(1) as f64);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let ev = Evaluator::new(problem);
    let mut archive = ParetoFront::new();

    let mut xs: Vec<Vec<f64>> = seeds.iter().take(config.population).cloned().collect();
    while xs.len() < config.population {
        let mut x = seeds[xs.len() % seeds.len()].clone();
        for (v, s) in x.iter_mut().zip(&scales) {
            let z: f64 = StandardNormal.sample(&mut rng);
            *v += config.init_sigma * s * z;
        }
        clip(&mut x, lo, hi);
        xs.push(x);
    }

    let evaluate = |xs: Vec<Vec<f64>>, archive: &mut ParetoFront| -> Vec<Individual> {
        let results = ev.evaluate_batch(&xs);
        xs.into_iter()
            .zip(results)
            .map(|(x, (index, eval))| {
                if eval.is_feasible() {
                    archive.insert(FrontMember { objectives: eval.objectives, x: x.clone(), eval_index: index });
                }
                Individual { x, eval }
            })
            .collect()
    };

    let mut pop = evaluate(xs, &mut archive);
    let mut generation = 0;
    observer(
        &GenerationStats { generation, evaluations: ev.count(), archive_size: archive.len() },
        &archive,
    );

    while ev.count() < config.budget {
        generation += 1;
        let (rank, crowd) = rank_and_crowd(&pop);
        let mut children = Vec::with_capacity(config.population);
        while children.len() < config.population {
            let a = tournament(&mut rng, &rank, &crowd);
            let b = tournament(&mut rng, &rank, &crowd);
            let (mut c1, mut c2) = if rng.gen::<f64>() < config.crossover_rate {
                sbx(&mut rng, &pop[a].x, &pop[b].x, config.eta_crossover)
            } else {
                (pop[a].x.clone(), pop[b].x.clone())
            };
            for c in [&mut c1, &mut c2] {
                mutate(&mut rng, c, mutation_rate, config.mutation_sigma, &scales);
                clip(c, lo, hi);
            }
            children.push(c1);
            if children.len() < config.population {
                children.push(c2);
            }
        }
        let offspring = evaluate(children, &mut archive);
        pop.extend(offspring);
        pop = select_survivors(pop, config.population);
        observer(
            &GenerationStats { generation, evaluations: ev.count(), archive_size: archive.len() },
            &archive,
        );
    }
    log::debug!("ea: {generation} generations, archive {}", archive.len());

    Ok(SolverOutcome {
        candidates: archive.members().to_vec(),
        front: archive,
        evaluations: ev.count(),
        iterations: generation,
    })
}
