//! Command-line driver: experiment runs, single-design evaluation and synthetic
//! terrain generation.

use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::alignment::{segments, SegmentId};
use crate::config::{RunConfig, SolverKind};
use crate::costing::{segment, CostBreakdown, Segment};
use crate::error::{Error, Result};
use crate::moo::road::DesignEvaluation;
use crate::moo::{
    pareto_filter, seed_alignment, solve_dms, solve_ea, solve_weighted_sum, BiObjectiveProblem,
    FrontMember, RoadProblem, SolverOutcome,
};
use crate::terrain::ElevationRaster;

#[derive(Debug, Parser)]
#[command(name = "roadalign", version, about = "Bi-objective 3D road alignment design")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a solver and write the front, designs and diagnostics.
    Run(RunArgs),
    /// Cost and check one design record.
    Eval(EvalArgs),
    /// Write a synthetic terrain in ASCII grid format.
    GenTerrain(GenTerrainArgs),
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory (overrides the config).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub solver: Option<SolverKind>,
    /// Evaluation budget (overrides the config).
    #[arg(long)]
    pub budget: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Flat design record: comma-separated X, Y, R, Z values.
    #[arg(long)]
    pub design: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TerrainKind {
    Plane,
    Ridge,
    Valley,
    Sinusoidal,
}

#[derive(Debug, Clone, Args)]
pub struct GenTerrainArgs {
    #[arg(long, value_enum, default_value = "sinusoidal")]
    pub kind: TerrainKind,
    /// Extent along x, metres.
    #[arg(long, default_value_t = 500.0)]
    pub width: f64,
    /// Extent along y, metres.
    #[arg(long, default_value_t = 1000.0)]
    pub height: f64,
    #[arg(long, default_value_t = 10.0)]
    pub cell: f64,
    #[arg(long, default_value_t = 100.0)]
    pub base: f64,
    #[arg(long, default_value_t = 15.0)]
    pub amplitude: f64,
    #[arg(long, default_value_t = 300.0)]
    pub wavelength: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub slope_x: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub slope_y: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

/// Runs the parsed command and returns the process exit code.
pub fn execute(cli: Cli) -> i32 {
    let result = match cli.command {
        Command::Run(args) => run_experiment(&args).map(|s| {
            println!(
                "{} solver: {} front points, {} evaluations, written to {}",
                s.solver,
                s.front_size,
                s.evaluations,
                s.out_dir.display()
            );
        }),
        Command::Eval(args) => evaluate_one(&args).map(|report| print!("{report}")),
        Command::GenTerrain(args) => write_terrain(&args),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// What a run produced.
#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub solver: SolverKind,
    pub seed: u64,
    pub budget: usize,
    pub evaluations: usize,
    pub iterations: usize,
    pub front_size: usize,
    pub dimension: usize,
    pub wall_time_s: f64,
    #[serde(skip)]
    pub out_dir: PathBuf,
}

/// Config after command-line overrides.
pub fn resolve_config(args: &RunArgs) -> Result<RunConfig> {
    let mut cfg = RunConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.solver.seed = seed;
    }
    if let Some(kind) = args.solver {
        cfg.solver.kind = kind;
    }
    if let Some(budget) = args.budget {
        cfg.solver.budget = budget;
    }
    if let Some(out) = &args.out {
        cfg.output.dir = out.clone();
    }
    Ok(cfg)
}

/// Runs the configured solver from the feasible seed.
pub fn solve(cfg: &RunConfig, problem: &RoadProblem) -> Result<SolverOutcome> {
    let seed = seed_alignment(problem)?.to_flat();
    if cfg.solver.budget == 0 {
        let (objectives, feasible) = {
            let e = problem.evaluate(&seed);
            (e.objectives, e.is_feasible())
        };
        let members = if feasible {
            vec![FrontMember { objectives, x: seed, eval_index: 0 }]
        } else {
            vec![]
        };
        return Ok(SolverOutcome {
            front: pareto_filter(members.clone()),
            candidates: members,
            evaluations: 1,
            iterations: 0,
        });
    }
    match cfg.solver.kind {
        SolverKind::Ws => solve_weighted_sum(problem, &seed, &cfg.ws_config()),
        SolverKind::Dms => solve_dms(problem, &[seed], &cfg.dms_config()),
        SolverKind::Ea => solve_ea(problem, &[seed], &cfg.ea_config(), &mut |stats, _| {
            log::debug!(
                "generation {}: {} evaluations, archive {}",
                stats.generation,
                stats.evaluations,
                stats.archive_size
            );
        }),
    }
}

/// Loads everything, solves, then writes all artifacts. Nothing is written
/// unless the run succeeds.
pub fn run_experiment(args: &RunArgs) -> Result<RunSummary> {
    let cfg = resolve_config(args)?;
    let problem = cfg.build_problem()?;
    let started = Instant::now();
    let outcome = solve(&cfg, &problem)?;
    let wall = started.elapsed().as_secs_f64();

    let evaluations: Vec<DesignEvaluation> = outcome
        .front
        .members()
        .iter()
        .map(|m| problem.evaluate_flat(&m.x))
        .collect::<Result<_>>()?;

    let summary = RunSummary {
        solver: cfg.solver.kind,
        seed: cfg.solver.seed,
        budget: cfg.solver.budget,
        evaluations: outcome.evaluations,
        iterations: outcome.iterations,
        front_size: outcome.front.len(),
        dimension: problem.dimension(),
        wall_time_s: wall,
        out_dir: cfg.output.dir.clone(),
    };
    write_outputs(&cfg, &outcome, &evaluations, &summary)?;
    Ok(summary)
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|source| Error::Output { path: path.to_path_buf(), source })
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|source| Error::Output { path: path.to_path_buf(), source })
}

/// `cost_e,cost_u,evaluation_index` rows in front order.
pub fn front_csv(members: &[FrontMember]) -> String {
    let mut out = String::from("cost_e,cost_u,evaluation_index\n");
    for m in members {
        let _ = writeln!(out, "{},{},{}", m.objectives[0], m.objectives[1], m.eval_index);
    }
    out
}

/// Comma-separated flat record, exact to the last bit.
pub fn design_record(x: &[f64]) -> String {
    let v: Vec<String> = x.iter().map(|v| v.to_string()).collect();
    v.join(",") + "\n"
}

pub fn parse_design_record(text: &str) -> Result<Vec<f64>> {
    text.lines()
        .filter(|l| !l.trim_start().starts_with('#'))
        .flat_map(|l| l.split(|c: char| c == ',' || c.is_whitespace()))
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| Error::Config(format!("design record: `{t}` is not a number")))
        })
        .collect()
}

/// Per-segment kind, endpoints and length. Horizontal coordinates are divided by
/// ten when `decameters` is set.
pub fn geometry_report(eval: &DesignEvaluation, decameters: bool) -> String {
    let h = if decameters { 0.1 } else { 1.0 };
    let mut out =
        String::from("segment,kind,x_start,y_start,z_start,x_end,y_end,z_end,radius,length\n");
    for id in segments(&eval.design) {
        let seg = segment(&eval.design, &eval.geometry, id);
        let (name, kind, a, b, radius) = match (id, seg) {
            (SegmentId::Tangent { k, j }, Segment::Tangent(t)) => {
                (format!("tangent{k}.{j}"), "tangent", t.from, t.to, String::new())
            }
            (SegmentId::Arc { k }, Segment::Arc(arc)) => (
                format!("arc{k}"),
                "arc",
                arc.point(0.0),
                arc.point(1.0),
                arc.radius.to_string(),
            ),
            _ => unreachable!("segment kind follows its id"),
        };
        let _ = writeln!(
            out,
            "{name},{kind},{},{},{},{},{},{},{radius},{}",
            a.x * h,
            a.y * h,
            a.z,
            b.x * h,
            b.y * h,
            b.z,
            seg.length()
        );
    }
    out
}

fn write_outputs(
    cfg: &RunConfig,
    outcome: &SolverOutcome,
    evaluations: &[DesignEvaluation],
    summary: &RunSummary,
) -> Result<()> {
    let dir = &cfg.output.dir;
    for sub in ["designs", "geometry", "constraints"] {
        create_dir(&dir.join(sub))?;
    }
    write_file(&dir.join("front.csv"), &front_csv(outcome.front.members()))?;
    write_file(&dir.join("candidates.csv"), &front_csv(&outcome.candidates))?;

    let mut breakdown = format!("member,{}\n", CostBreakdown::CSV_HEADER);
    for (i, (m, e)) in outcome.front.members().iter().zip(evaluations).enumerate() {
        let _ = writeln!(breakdown, "{i},{}", e.costs.csv_row());
        let name = format!("member_{i:03}");
        write_file(&dir.join("designs").join(format!("{name}.csv")), &design_record(&m.x))?;
        write_file(
            &dir.join("geometry").join(format!("{name}.csv")),
            &geometry_report(e, cfg.output.decameters),
        )?;
        write_file(&dir.join("constraints").join(format!("{name}.csv")), &e.constraints.to_csv())?;
    }
    write_file(&dir.join("front_breakdown.csv"), &breakdown)?;

    let manifest = serde_json::json!({
        "solver": summary.solver,
        "seed": summary.seed,
        "budget": summary.budget,
        "evaluations": summary.evaluations,
        "iterations": summary.iterations,
        "front_size": summary.front_size,
        "dimension": summary.dimension,
        "wall_time_s": summary.wall_time_s,
        "terrain": cfg.terrain.path,
    });
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
    write_file(&dir.join("manifest.json"), &text)
}

/// Costs and constraint report of one design record.
pub fn evaluate_one(args: &EvalArgs) -> Result<String> {
    let cfg = RunConfig::load(&args.config)?;
    let text = fs::read_to_string(&args.design).map_err(|e| {
        Error::Config(format!("cannot read design {}: {e}", args.design.display()))
    })?;
    let x = parse_design_record(&text)?;
    let problem = cfg.build_problem()?;
    let eval = problem.evaluate_flat(&x)?;
    let mut out = format!("{}\n{}\n", CostBreakdown::CSV_HEADER, eval.costs.csv_row());
    let _ = writeln!(out, "feasible,{}", eval.constraints.feasible);
    for v in eval.constraints.violated() {
        let _ = writeln!(out, "violated,{},{}", v.kind, v.value);
    }
    Ok(out)
}

/// Synthetic terrain; `seed` only affects the sinusoidal kind.
pub fn generate_terrain(args: &GenTerrainArgs) -> Result<ElevationRaster> {
    let counts = [("width", args.width), ("height", args.height)].map(|(name, extent)| {
        let n = extent / args.cell;
        if !(args.cell > 0.0 && n >= 1.0 && (n - n.round()).abs() < 1e-9) {
            Err(Error::InvalidParameter {
                name,
                reason: format!("{extent} is not a positive multiple of the cell size {}", args.cell),
            })
        } else {
            Ok(n.round() as usize + 1)
        }
    });
    let [n_cols, n_rows] = counts;
    let (n_cols, n_rows) = (n_cols?, n_rows?);
    if !(args.wavelength > 0.0) {
        return Err(Error::InvalidParameter {
            name: "wavelength",
            reason: format!("must be positive, got {}", args.wavelength),
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    // Three harmonics with random heading and phase, amplitude falling as 1/i².
    let waves: Vec<(f64, f64, f64, f64)> = (1..=3)
        .map(|i| {
            let heading = rng.gen_range(0.0..TAU);
            let phase = rng.gen_range(0.0..TAU);
            let k = TAU * i as f64 / args.wavelength;
            (k * heading.cos(), k * heading.sin(), phase, args.amplitude / (i * i) as f64)
        })
        .collect();
    let (cx, half) = (0.5 * args.width, 0.5 * args.wavelength);
    let a = args.clone();
    let f = move |x: f64, y: f64| -> f64 {
        let tilt = a.base + a.slope_x * x + a.slope_y * y;
        let bump = (-((x - cx) / half).powi(2)).exp();
        tilt + match a.kind {
            TerrainKind::Plane => 0.0,
            TerrainKind::Ridge => a.amplitude * bump,
            TerrainKind::Valley => -a.amplitude * bump,
            TerrainKind::Sinusoidal => waves
                .iter()
                .map(|(kx, ky, ph, amp)| amp * (kx * x + ky * y + ph).sin())
                .sum(),
        }
    };
    Ok(ElevationRaster::from_fn(0.0, 0.0, args.cell, n_cols, n_rows, f))
}

fn write_terrain(args: &GenTerrainArgs) -> Result<()> {
    let raster = generate_terrain(args)?;
    if let Some(parent) = args.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        create_dir(parent)?;
    }
    write_file(&args.out, &raster.to_ascii())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gen(kind: TerrainKind) -> GenTerrainArgs {
        GenTerrainArgs {
            kind,
            width: 500.0,
            height: 1000.0,
            cell: 10.0,
            base: 100.0,
            amplitude: 15.0,
            wavelength: 300.0,
            slope_x: 0.0,
            slope_y: 0.0,
            seed: 4,
            out: PathBuf::from("unused"),
        }
    }

    #[test]
    fn case_study_extent_gives_50_by_100_cells() {
        let r = generate_terrain(&gen(TerrainKind::Sinusoidal)).unwrap();
        assert_eq!((r.n_cols, r.n_rows), (51, 101));
        let again = generate_terrain(&gen(TerrainKind::Sinusoidal)).unwrap();
        assert_eq!(r.to_ascii(), again.to_ascii());
    }

    #[test]
    fn plane_terrain_is_flat_plus_tilt() {
        let mut a = gen(TerrainKind::Plane);
        a.slope_x = 0.05;
        let r = generate_terrain(&a).unwrap();
        assert_eq!(r.sample(0, 0), 100.0);
        assert!((r.sample(10, 7) - (100.0 + 0.05 * 100.0)).abs() < 1e-12);
    }

    #[test]
    fn bad_extent_is_rejected() {
        let mut a = gen(TerrainKind::Ridge);
        a.width = 505.0;
        assert!(generate_terrain(&a).is_err());
    }

    #[test]
    fn design_record_round_trips_exactly() {
        let x = vec![0.1 + 0.2, 1e-300, -123456.789, 1.0 / 3.0];
        assert_eq!(parse_design_record(&design_record(&x)).unwrap(), x);
        assert!(parse_design_record("1.0, abc").is_err());
    }

    #[test]
    fn cli_parses_run_flags() {
        let cli = Cli::try_parse_from([
            "roadalign", "run", "--config", "c.toml", "--solver", "ea", "--budget", "10", "--seed", "3",
        ])
        .unwrap();
        match cli.command {
            Command::Run(a) => {
                assert_eq!(a.solver, Some(SolverKind::Ea));
                assert_eq!((a.budget, a.seed), (Some(10), Some(3)));
            }
            _ => panic!(),
        }
    }
}
