//! Command-line front end: generate instances, run the search, price and
//! check solutions, export the exact model, and benchmark methods.
//!
//! Exit codes: 0 success, 2 usage or input errors, 3 when the search (or the
//! exhaustive solver) finds no tour at all, 4 when a given solution is
//! infeasible for its instance.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};

use tatsp::construction::ConstructionHeuristic;
use tatsp::error::Error;
use tatsp::eval::{evaluate_tour, gap};
use tatsp::fileio;
use tatsp::generator::{generate_rg, rg_suite, RgSpec, Scenario};
use tatsp::grasp::{self, GraspConfig};
use tatsp::instance::{Instance, Tour};
use tatsp::localsearch::MoveKind;
use tatsp::mip;
use tatsp::oracle::brute_force_optimum;

#[derive(Parser)]
#[command(name = "tatsp", version, about = "Solver toolkit for the trigger-arc TSP")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance, or the whole benchmark suite.
    Generate(GenerateArgs),
    /// Search for a good tour and optionally write it as a solution file.
    Solve(SolveArgs),
    /// Price a solution file and show which relations fire.
    Evaluate(EvaluateArgs),
    /// Exhaustively find the optimum of a small instance.
    Oracle(OracleArgs),
    /// Write the exact integer model in LP format.
    ExportMip(ExportMipArgs),
    /// Check a solution against the integer model row by row.
    CheckMip(CheckMipArgs),
    /// Run several methods over instance files and tabulate gaps.
    Bench(BenchArgs),
}

fn parse_scenario(s: &str) -> Result<Scenario, String> {
    Scenario::from_str(s).map_err(|e| e.to_string())
}

#[derive(Args)]
struct GenerateArgs {
    /// Output file, or output directory with --suite.
    #[arg(short, long)]
    out: PathBuf,
    /// Write the full 180-instance benchmark suite into the directory.
    #[arg(long)]
    suite: bool,
    /// Relation-cost scenario: balanced, increase or decrease.
    #[arg(long, default_value = "balanced", value_parser = parse_scenario)]
    scenario: Scenario,
    /// Number of nodes (single instance only).
    #[arg(short, long)]
    nodes: Option<usize>,
    /// Number of relations (single instance only).
    #[arg(short, long)]
    relations: Option<usize>,
    /// Generator seed; falls back to TATSP_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct SolveArgs {
    /// Instance file.
    instance: PathBuf,
    /// Write the best tour as a solution file.
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Construction method: src, rgc, mip-add, mip-mul or mip-bias.
    #[arg(long, default_value = "mip-bias")]
    method: String,
    /// Method parameter: RCL width (rgc), noise amplitude (mip-add) or
    /// penalty weight (mip-bias).
    #[arg(long)]
    alpha: Option<f64>,
    /// Method parameter: spread (mip-mul) or coupling decay (mip-bias).
    #[arg(long)]
    beta: Option<f64>,
    /// Wall-clock budget in seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    /// Iteration cap; used alone it makes the run fully deterministic.
    #[arg(long)]
    iterations: Option<u64>,
    /// Run seed; falls back to TATSP_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Comma-separated descent neighborhoods (twoopt, swap, relocate).
    #[arg(long, value_delimiter = ',')]
    neighborhoods: Option<Vec<String>>,
    /// Start from the long-run preset (3 h budget, 5 s per sub-solve).
    #[arg(long)]
    competition: bool,
    /// Print the result as one JSON object instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Instance file.
    instance: PathBuf,
    /// Solution file.
    solution: PathBuf,
}

#[derive(Args)]
struct OracleArgs {
    /// Instance file.
    instance: PathBuf,
    /// Write the optimal tour as a solution file.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExportMipArgs {
    /// Instance file.
    instance: PathBuf,
    /// Output LP file.
    #[arg(short, long)]
    out: PathBuf,
    /// Refuse models with more constraint rows than this.
    #[arg(long, default_value_t = mip::DEFAULT_CONSTRAINT_CAP)]
    max_rows: usize,
}

#[derive(Args)]
struct CheckMipArgs {
    /// Instance file.
    instance: PathBuf,
    /// Solution file.
    solution: PathBuf,
    /// Feasibility tolerance.
    #[arg(long, default_value_t = mip::CHECK_TOLERANCE)]
    tolerance: f64,
}

#[derive(Args)]
struct BenchArgs {
    /// Instance files, or directories scanned for *.tatsp.
    #[arg(required = true)]
    instances: Vec<PathBuf>,
    /// Comma-separated methods to compare.
    #[arg(long, value_delimiter = ',', default_value = "src,rgc,mip-add,mip-mul,mip-bias")]
    methods: Vec<String>,
    /// Independent runs per (instance, method), seeded 0..seeds.
    #[arg(long, default_value_t = 3)]
    seeds: u64,
    /// Wall-clock budget per run in seconds (default 5 when no cap given).
    #[arg(long)]
    time_limit: Option<f64>,
    /// Iteration cap per run; also zeroes the time column so repeated runs
    /// produce byte-identical tables.
    #[arg(long)]
    iteration_cap: Option<u64>,
    /// Worker threads per run.
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Write the CSV table here; without it the table goes to stdout.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::Oracle(args) => cmd_oracle(args),
        Command::ExportMip(args) => cmd_export_mip(args),
        Command::CheckMip(args) => cmd_check_mip(args),
        Command::Bench(args) => cmd_bench(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

/// Maps library errors to process exit codes.
fn exit_code(err: &Error) -> u8 {
    match err {
        Error::NoFeasibleTour | Error::NoSolution { .. } => 3,
        Error::MissingArc { .. } | Error::InvalidTour(_) => 4,
        _ => 2,
    }
}

/// Seed precedence: explicit flag, then the TATSP_SEED variable, then 0.
fn resolve_seed(flag: Option<u64>) -> tatsp::Result<u64> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var("TATSP_SEED") {
        Ok(text) => text
            .trim()
            .parse()
            .map_err(|_| Error::Domain(format!("TATSP_SEED must be an integer, got {text:?}"))),
        Err(_) => Ok(0),
    }
}

/// Resolves a method name plus optional parameter overrides to a heuristic
/// with its benchmark-default parameters.
fn resolve_method(
    name: &str,
    alpha: Option<f64>,
    beta: Option<f64>,
) -> tatsp::Result<ConstructionHeuristic> {
    let heuristic = match name {
        "src" => ConstructionHeuristic::SimpleRandomized,
        "rgc" => ConstructionHeuristic::RandomizedGreedy { alpha: alpha.unwrap_or(0.1) },
        "mip-add" => ConstructionHeuristic::MipAdditive { alpha: alpha.unwrap_or(0.1) },
        "mip-mul" => ConstructionHeuristic::MipMultiplicative { beta: beta.unwrap_or(1.5) },
        "mip-bias" => ConstructionHeuristic::MipBiased {
            alpha: alpha.unwrap_or(0.1),
            beta: beta.unwrap_or(3.0),
        },
        other => {
            return Err(Error::Domain(format!(
                "unknown method {other:?} (expected src, rgc, mip-add, mip-mul or mip-bias)"
            )))
        }
    };
    heuristic.validate()?;
    Ok(heuristic)
}

/// Names the offending file in I/O errors, which the library leaves bare.
fn with_path(err: Error, path: &Path) -> Error {
    match err {
        Error::Io(io) => Error::Domain(format!("{}: {}", path.display(), io)),
        other => other,
    }
}

fn load_instance(path: &Path) -> tatsp::Result<Instance> {
    fileio::read_instance(path).map_err(|e| with_path(e, path))
}

fn read_tour(inst: &Instance, path: &Path) -> tatsp::Result<(Tour, Option<f64>)> {
    let (nodes, stored) = fileio::read_solution(path).map_err(|e| with_path(e, path))?;
    let tour = Tour::new(inst.node_count(), nodes)?;
    Ok((tour, stored))
}

fn cmd_generate(args: GenerateArgs) -> tatsp::Result<u8> {
    let seed = resolve_seed(args.seed)?;
    if args.suite {
        std::fs::create_dir_all(&args.out)?;
        let entries = rg_suite(seed);
        for entry in &entries {
            let inst = generate_rg(&entry.spec)?;
            let mut w = BufWriter::new(File::create(args.out.join(entry.file_name()))?);
            fileio::write_instance(&inst, &mut w)?;
        }
        println!("wrote {} instances to {}", entries.len(), args.out.display());
        return Ok(0);
    }
    let (nodes, relations) = match (args.nodes, args.relations) {
        (Some(n), Some(r)) => (n, r),
        _ => {
            return Err(Error::Domain(
                "single-instance generation needs --nodes and --relations (or pass --suite)"
                    .into(),
            ))
        }
    };
    let spec = RgSpec { scenario: args.scenario, n: nodes, relation_count: relations, seed };
    let inst = generate_rg(&spec)?;
    let mut w = BufWriter::new(File::create(&args.out)?);
    fileio::write_instance(&inst, &mut w)?;
    println!(
        "wrote {} ({} nodes, {} arcs, {} relations)",
        args.out.display(),
        inst.node_count(),
        inst.arcs().len(),
        inst.relations().len()
    );
    Ok(0)
}

fn cmd_solve(args: SolveArgs) -> tatsp::Result<u8> {
    let inst = load_instance(&args.instance)?;
    let seed = resolve_seed(args.seed)?;
    let heuristic = resolve_method(&args.method, args.alpha, args.beta)?;

    let mut cfg = if args.competition { GraspConfig::competition() } else { GraspConfig::default() };
    cfg.construction = heuristic;
    cfg.seed = seed;
    cfg.workers = args.workers;
    if let Some(kinds) = &args.neighborhoods {
        cfg.neighborhoods = kinds
            .iter()
            .map(|k| MoveKind::from_str(k))
            .collect::<tatsp::Result<Vec<_>>>()?;
    }
    if let Some(cap) = args.iterations {
        cfg.max_iterations = Some(cap);
        // An explicit cap alone makes the run reproducible; only keep a
        // clock when one was asked for.
        cfg.time_limit = args.time_limit.map(Duration::from_secs_f64);
    } else if let Some(secs) = args.time_limit {
        cfg.time_limit = Some(Duration::from_secs_f64(secs));
    }

    let started = Instant::now();
    let result = grasp::run(&inst, &cfg)?;
    let elapsed = started.elapsed();

    if let Some(path) = &args.out {
        let mut w = BufWriter::new(File::create(path)?);
        fileio::write_solution(&mut w, &result.tour, result.cost)?;
    }

    if args.json {
        let payload = serde_json::json!({
            "instance": inst.name(),
            "nodes": inst.node_count(),
            "method": cfg.construction.label(),
            "seed": seed,
            "workers": cfg.workers,
            "cost": result.cost,
            "tour": result.tour.nodes(),
            "iterations": result.iterations,
            "construction_failures": result.construction_failures,
            "best_iteration": result.best_iteration,
        });
        println!("{payload}");
    } else {
        println!(
            "instance: {} ({} nodes, {} arcs, {} relations)",
            inst.name(),
            inst.node_count(),
            inst.arcs().len(),
            inst.relations().len()
        );
        println!("method: {} seed: {} workers: {}", cfg.construction.label(), seed, cfg.workers);
        println!("cost: {:.6}", result.cost);
        println!("tour: {}", result.tour);
        println!(
            "iterations: {} ({} failed constructions), best at iteration {}",
            result.iterations, result.construction_failures, result.best_iteration
        );
        println!("time: {:.3}s", elapsed.as_secs_f64());
    }
    Ok(0)
}

fn cmd_evaluate(args: EvaluateArgs) -> tatsp::Result<u8> {
    let inst = load_instance(&args.instance)?;
    let (tour, stored) = read_tour(&inst, &args.solution)?;
    let evaluation = evaluate_tour(&inst, &tour)?;
    let nodes = tour.nodes();
    let n = nodes.len();

    println!("tour: {tour}");
    for (pos, cost) in evaluation.arc_costs.iter().enumerate() {
        println!("arc ({},{}) costs {:.6}", nodes[pos], nodes[(pos + 1) % n], cost);
    }
    for (pos, active) in evaluation.active_relations.iter().enumerate() {
        if let Some(r) = active {
            println!("active: r{} on arc ({},{})", r, nodes[pos], nodes[(pos + 1) % n]);
        }
    }
    println!("cost: {:.6}", evaluation.total_cost);

    if let Some(stored) = stored {
        if (stored - evaluation.total_cost).abs() > 1e-6 {
            eprintln!(
                "note: solution file claims cost {:.6}, evaluation gives {:.6}",
                stored, evaluation.total_cost
            );
        }
    }
    Ok(0)
}

fn cmd_oracle(args: OracleArgs) -> tatsp::Result<u8> {
    let inst = load_instance(&args.instance)?;
    let result = brute_force_optimum(&inst)?;
    println!("instance: {} ({} nodes)", inst.name(), inst.node_count());
    println!("optimum: {:.6}", result.best_cost);
    println!("tour: {}", result.best_tour);
    println!("complete tours enumerated: {}", result.enumerated);
    if let Some(path) = &args.out {
        let mut w = BufWriter::new(File::create(path)?);
        fileio::write_solution(&mut w, &result.best_tour, result.best_cost)?;
    }
    Ok(0)
}

fn cmd_export_mip(args: ExportMipArgs) -> tatsp::Result<u8> {
    let inst = load_instance(&args.instance)?;
    let model = mip::build_model_capped(&inst, args.max_rows)?;
    mip::write_lp(&model, &args.out)?;
    let layout = model.layout();
    println!(
        "wrote {}: {} columns, {} rows",
        args.out.display(),
        layout.var_count(),
        model.rows().len()
    );
    println!(
        "columns: x {}, u {}, y {}, z {}",
        layout.x_count(),
        layout.u_count(),
        layout.y_count(),
        layout.z_count()
    );
    Ok(0)
}

fn cmd_check_mip(args: CheckMipArgs) -> tatsp::Result<u8> {
    let inst = load_instance(&args.instance)?;
    let (tour, _) = read_tour(&inst, &args.solution)?;
    let model = mip::build_model(&inst)?;
    let assignment = mip::tour_assignment(&inst, &tour)?;
    let report = mip::check_assignment(&model, &assignment, args.tolerance);

    println!("objective: {:.6}", report.objective);
    if report.feasible() {
        println!(
            "feasible within {} ({} rows, {} columns checked)",
            args.tolerance,
            model.rows().len(),
            model.layout().var_count()
        );
        Ok(0)
    } else {
        for v in &report.violations {
            match v.family {
                Some(family) => println!("violation: {} [{}] excess {:.6}", v.name, family, v.amount),
                None => println!("violation: {} excess {:.6}", v.name, v.amount),
            }
        }
        println!("infeasible: {} violation(s)", report.violations.len());
        Ok(4)
    }
}

/// One benchmark run, already formatted for the CSV table.
struct BenchRow {
    instance: String,
    method: String,
    seed: u64,
    cost: Option<f64>,
    time_ms: u128,
    success: bool,
}

fn collect_instance_files(inputs: &[PathBuf]) -> tatsp::Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for input in inputs {
        if input.is_dir() {
            let mut found: Vec<PathBuf> = std::fs::read_dir(input)?
                .filter_map(|e| e.ok())
                .map(|e| e.path())
                .filter(|p| p.extension().is_some_and(|ext| ext == "tatsp"))
                .collect();
            found.sort();
            files.extend(found);
        } else {
            files.push(input.clone());
        }
    }
    if files.is_empty() {
        return Err(Error::Domain("no instance files found".into()));
    }
    Ok(files)
}

fn cmd_bench(args: BenchArgs) -> tatsp::Result<u8> {
    let files = collect_instance_files(&args.instances)?;
    let methods: Vec<(String, ConstructionHeuristic)> = args
        .methods
        .iter()
        .map(|name| resolve_method(name, None, None).map(|h| (name.clone(), h)))
        .collect::<tatsp::Result<Vec<_>>>()?;
    if args.seeds == 0 {
        return Err(Error::Domain("--seeds must be at least 1".into()));
    }

    let deterministic = args.iteration_cap.is_some();
    let time_limit = match (args.time_limit, args.iteration_cap) {
        (Some(secs), _) => Some(Duration::from_secs_f64(secs)),
        (None, Some(_)) => None,
        (None, None) => Some(Duration::from_secs(5)),
    };

    let mut rows: Vec<BenchRow> = Vec::new();
    let mut best_known: Vec<Option<f64>> = Vec::with_capacity(files.len());

    for path in &files {
        let inst = load_instance(path)?;
        let exact = if inst.node_count() <= tatsp::oracle::BRUTE_FORCE_NODE_LIMIT {
            brute_force_optimum(&inst).ok().map(|r| r.best_cost)
        } else {
            None
        };
        let mut observed: Option<f64> = None;

        for (name, heuristic) in &methods {
            for seed in 0..args.seeds {
                let cfg = GraspConfig {
                    construction: *heuristic,
                    time_limit,
                    max_iterations: args.iteration_cap,
                    seed,
                    workers: args.workers,
                    ..GraspConfig::default()
                };
                let started = Instant::now();
                let outcome = grasp::run(&inst, &cfg);
                let time_ms = if deterministic { 0 } else { started.elapsed().as_millis() };
                let (cost, success) = match outcome {
                    Ok(r) => (Some(r.cost), true),
                    Err(_) => (None, false),
                };
                if let Some(c) = cost {
                    observed = Some(observed.map_or(c, |b: f64| b.min(c)));
                }
                rows.push(BenchRow {
                    instance: inst.name().to_string(),
                    method: name.clone(),
                    seed,
                    cost,
                    time_ms,
                    success,
                });
            }
        }
        best_known.push(exact.or(observed));
    }

    let mut table = String::from("instance,method,seed,cost,best_known,gap_pct,time_ms,success\n");
    let mut per_method_gaps: Vec<(String, Vec<f64>)> =
        methods.iter().map(|(name, _)| (name.clone(), Vec::new())).collect();
    let runs_per_instance = methods.len() * args.seeds as usize;
    for (idx, row) in rows.iter().enumerate() {
        let best = best_known[idx / runs_per_instance];
        let cost_field = row.cost.map_or(String::new(), |c| format!("{c:.6}"));
        let best_field = best.map_or(String::new(), |b| format!("{b:.6}"));
        let gap_field = match (row.cost, best) {
            (Some(c), Some(b)) => match gap(c, b) {
                Ok(g) => {
                    if let Some((_, gaps)) =
                        per_method_gaps.iter_mut().find(|(m, _)| *m == row.method)
                    {
                        gaps.push(g);
                    }
                    format!("{g:.3}")
                }
                Err(_) => String::new(),
            },
            _ => String::new(),
        };
        table.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            row.instance, row.method, row.seed, cost_field, best_field, gap_field, row.time_ms,
            row.success
        ));
    }

    let mut summary = String::new();
    for (method, gaps) in &per_method_gaps {
        if gaps.is_empty() {
            summary.push_str(&format!("{method}: no successful runs\n"));
            continue;
        }
        let mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
        let std = if gaps.len() > 1 {
            (gaps.iter().map(|g| (g - mean).powi(2)).sum::<f64>() / (gaps.len() - 1) as f64).sqrt()
        } else {
            0.0
        };
        summary.push_str(&format!(
            "{}: {} runs, gap {:.3} ± {:.3} %\n",
            method,
            gaps.len(),
            mean,
            std
        ));
    }

    match &args.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            w.write_all(table.as_bytes())?;
            w.flush()?;
            print!("{summary}");
        }
        None => {
            print!("{table}");
            eprint!("{summary}");
        }
    }
    Ok(0)
}
