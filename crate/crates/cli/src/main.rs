//! `tilequbo`: build, solve and check polyomino tiling QUBOs from the shell.
//!
//! Exit codes: 0 success / valid solution, 1 no valid solution (or an
//! incomplete enumeration), 2 usage or configuration error, 3 parse error.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tilequbo::experiment::experiment_seeds;
use tilequbo::format::{export_qubo, ising_to_json, parse_any, qubo_to_json, Model, Provenance};
use tilequbo::puzzle::scientific;
use tilequbo::{
    build_cover_problem, combination_count, decode, enumerate_exact, from_ising, parse_solution, render, run_experiment,
    symmetry_breakdown, to_ising, Board, DecomposeConfig, Method, PenaltyWeights, PuzzleInstance, SolverConfig, Subsolver,
    TilingProblem,
};

#[derive(Parser)]
#[command(name = "tilequbo", version, about = "Polyomino tiling puzzles as QUBO/Ising models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Placement counts per shape, the total and the combination count.
    Placements {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Also list every placement as `index shape cells`.
        #[arg(long)]
        dump: bool,
    },
    /// Build the penalty model and write it out.
    BuildQubo {
        #[command(flatten)]
        instance: InstanceArgs,
        #[command(flatten)]
        weights: WeightArgs,
        #[arg(long, value_enum, default_value_t = ModelFormat::Qubo)]
        format: ModelFormat,
        /// Output file (stdout when omitted).
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Solve once and report the tiling.
    Solve {
        #[command(flatten)]
        instance: InstanceArgs,
        #[command(flatten)]
        weights: WeightArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Print one line per decomposition round.
        #[arg(long)]
        trace: bool,
        /// Write the chosen placement indices to a file.
        #[arg(long)]
        save: Option<PathBuf>,
    },
    /// Count tilings with the exact-cover search.
    ExactCount {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Stop after this many tilings (exit status 1 if more exist).
        #[arg(long)]
        limit: Option<usize>,
        /// Print each tiling's placement indices.
        #[arg(long)]
        dump: bool,
    },
    /// Repeat seeded solves and summarize the outcomes.
    Experiment {
        #[command(flatten)]
        instance: InstanceArgs,
        #[command(flatten)]
        weights: WeightArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, default_value_t = 100)]
        runs: usize,
        /// Base seed; run k uses seed + k.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Use the base seed for every run.
        #[arg(long)]
        same_seed: bool,
        /// Worker threads (defaults to the available parallelism).
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        format: ReportFormat,
        /// Also print one line per run.
        #[arg(long)]
        per_run: bool,
    },
    /// Check a solution file against the instance.
    Validate {
        #[command(flatten)]
        instance: InstanceArgs,
        #[command(flatten)]
        weights: WeightArgs,
        /// Bit string or placement indices; `-` reads stdin.
        solution: PathBuf,
    },
    /// Draw a solution file on the board.
    Render {
        #[command(flatten)]
        instance: InstanceArgs,
        solution: PathBuf,
    },
    /// Convert between `.qubo` text, QUBO JSON and Ising JSON.
    Convert {
        /// Input model; `-` reads stdin. The format is detected.
        input: PathBuf,
        #[arg(long, value_enum)]
        format: ModelFormat,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct InstanceArgs {
    /// TOML instance file; overrides --board and --pieces.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Board as WIDTHxHEIGHT.
    #[arg(long, default_value = "5x8")]
    board: String,
    /// Piece counts such as `I=2,O=2,L=2,T=2,S=2`.
    #[arg(long, default_value = "I=2,O=2,L=2,T=2,S=2")]
    pieces: String,
}

#[derive(Args)]
struct WeightArgs {
    /// Penalty weights A,B.
    #[arg(long, default_value = "1,1")]
    weights: String,
}

#[derive(Args)]
struct SolverArgs {
    #[arg(long, default_value = "decompose")]
    method: String,
    #[arg(long, default_value_t = 50)]
    sub_size: usize,
    #[arg(long)]
    max_rounds: Option<usize>,
    #[arg(long)]
    stall_rounds: Option<usize>,
    /// tabu, sa or brute.
    #[arg(long, default_value = "tabu")]
    subsolver: String,
    /// Start decomposition from a random assignment.
    #[arg(long)]
    random_start: bool,
    #[arg(long)]
    sweeps: Option<usize>,
    #[arg(long)]
    tenure: Option<usize>,
    #[arg(long)]
    stall_limit: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelFormat {
    Qubo,
    Json,
    Ising,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

enum Failure {
    Usage(String),
    Parse(String),
}

impl From<tilequbo::Error> for Failure {
    fn from(e: tilequbo::Error) -> Self {
        match e {
            tilequbo::Error::Parse { .. } | tilequbo::Error::Format(_) => Failure::Parse(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

type CliResult<T> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Parse(m)) => {
            eprintln!("parse error: {m}");
            ExitCode::from(3)
        }
    }
}

fn run(command: Command) -> CliResult<bool> {
    match command {
        Command::Placements { instance, dump } => {
            let inst = load_instance(&instance)?;
            let catalog = inst.catalog();
            let mut out = String::new();
            let _ = writeln!(out, "instance={}", inst.canonical_description());
            for (id, range) in catalog.shape_ranges() {
                let _ = writeln!(out, "placements.{id}={}", range.len());
            }
            let _ = writeln!(out, "total={}", catalog.len());
            let combos = combination_count(&catalog, &inst.counts());
            let _ = writeln!(out, "combinations={}", combos.value);
            let _ = writeln!(out, "combinations_approx={}", scientific(&combos.value, 3));
            if dump {
                out.push_str(&catalog.export());
            }
            emit(&out);
            Ok(true)
        }
        Command::BuildQubo {
            instance,
            weights,
            format,
            output,
        } => {
            let problem = load_problem(&instance, &weights)?;
            let meta = provenance(&problem);
            let text = match format {
                ModelFormat::Qubo => export_qubo(&problem.qubo),
                ModelFormat::Json => qubo_to_json(&problem.qubo, Some(meta)),
                ModelFormat::Ising => ising_to_json(&to_ising(&problem.qubo), Some(meta)),
            };
            write_output(output.as_deref(), &text)?;
            Ok(true)
        }
        Command::Solve {
            instance,
            weights,
            solver,
            seed,
            trace,
            save,
        } => {
            let problem = load_problem(&instance, &weights)?;
            let (method, solver_cfg, decompose_cfg) = solver_setup(&solver)?;
            let started = Instant::now();
            let r = problem.solve(method, &solver_cfg, &decompose_cfg, seed)?;
            eprintln!("elapsed_s={:.3}", started.elapsed().as_secs_f64());
            let report = problem.report(&r.best_assignment);
            let mut out = String::new();
            if trace {
                for rec in &r.trace {
                    let _ = writeln!(
                        out,
                        "trace round={} subset_size={} energy_before={} energy_after={} accepted={} subproblem_solves={}",
                        rec.round, rec.subset_size, rec.energy_before, rec.energy_after, rec.accepted, rec.subproblem_solves
                    );
                }
            }
            let _ = writeln!(out, "method={method}");
            let _ = writeln!(out, "seed={seed}");
            let _ = writeln!(out, "n={}", problem.qubo.n());
            let _ = writeln!(out, "energy={}", r.best_energy);
            let _ = writeln!(out, "iterations={}", r.iterations);
            let _ = writeln!(out, "subproblem_solves={}", r.subproblem_solves);
            let _ = writeln!(out, "placements={}", join(&r.best_assignment.ones()));
            out.push_str(&report.to_key_values());
            out.push('\n');
            out.push_str(&render(&decode(&r.best_assignment, &problem.catalog), problem.instance.board()));
            emit(&out);
            if let Some(path) = save {
                write_output(Some(&path), &format!("{}\n", join(&r.best_assignment.ones())))?;
            }
            Ok(report.is_valid)
        }
        Command::ExactCount { instance, limit, dump } => {
            let inst = load_instance(&instance)?;
            let catalog = inst.catalog();
            let started = Instant::now();
            let found = enumerate_exact(&build_cover_problem(&catalog, &inst.counts()), limit);
            eprintln!("elapsed_s={:.3}", started.elapsed().as_secs_f64());
            let mut out = String::new();
            let _ = writeln!(out, "count={}", found.solutions.len());
            let _ = writeln!(out, "complete={}", found.complete);
            if found.complete {
                let b = symmetry_breakdown(&catalog, &found.solutions);
                let _ = writeln!(out, "symmetries={}", b.fixed.len());
                for (sym, fixed) in &b.fixed {
                    let _ = writeln!(out, "fixed.{}={fixed}", sym.name());
                }
                let _ = writeln!(out, "orbits={}", b.orbits);
            }
            if dump {
                for s in &found.solutions {
                    let _ = writeln!(out, "solution={}", join(&s.0));
                }
            }
            emit(&out);
            Ok(found.complete)
        }
        Command::Experiment {
            instance,
            weights,
            solver,
            runs,
            seed,
            same_seed,
            jobs,
            format,
            per_run,
        } => {
            if runs == 0 {
                return Err(Failure::Usage("--runs must be at least 1".into()));
            }
            let problem = load_problem(&instance, &weights)?;
            let (method, solver_cfg, decompose_cfg) = solver_setup(&solver)?;
            let jobs = jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            let seeds = experiment_seeds(seed, runs, same_seed);
            let started = Instant::now();
            let (stats, outcomes) = run_experiment(&problem, method, &solver_cfg, &decompose_cfg, &seeds, jobs)?;
            eprintln!("elapsed_s={:.3}", started.elapsed().as_secs_f64());
            match format {
                ReportFormat::Json => {
                    let doc = if per_run {
                        serde_json_pair(&stats, &outcomes)
                    } else {
                        to_json(&stats)
                    };
                    emit(&format!("{doc}\n"));
                }
                ReportFormat::Text => {
                    let mut out = String::new();
                    let _ = writeln!(out, "method={method}");
                    let _ = writeln!(out, "runs={}", stats.runs);
                    let _ = writeln!(out, "valid_count={}", stats.valid_count);
                    let _ = writeln!(out, "invalid_count={}", stats.invalid_count);
                    let _ = writeln!(out, "distinct_valid_solutions={}", stats.distinct_valid_solutions);
                    let _ = writeln!(out, "mean_subproblem_solves={:.2}", stats.mean_subproblem_solves);
                    let _ = writeln!(out, "mean_subproblem_solves_valid={:.2}", stats.mean_subproblem_solves_valid);
                    let energies: Vec<String> = stats.energy_histogram.iter().map(|(e, c)| format!("{e}:{c}")).collect();
                    let _ = writeln!(out, "energy_histogram={}", energies.join(","));
                    let defects: Vec<String> = stats.defect_histogram.iter().map(|(d, c)| format!("{d}:{c}")).collect();
                    let _ = writeln!(out, "defect_histogram={}", defects.join(","));
                    if per_run {
                        for o in &outcomes {
                            let _ = writeln!(
                                out,
                                "run seed={} energy={} valid={} defects={} subproblem_solves={}",
                                o.seed, o.energy, o.valid, o.defects, o.subproblem_solves
                            );
                        }
                    }
                    emit(&out);
                }
            }
            Ok(stats.valid_count > 0)
        }
        Command::Validate {
            instance,
            weights,
            solution,
        } => {
            let problem = load_problem(&instance, &weights)?;
            let x = parse_solution(&read_input(&solution)?, problem.catalog.len())?;
            let report = problem.report(&x);
            emit(&format!("energy={}\n{}", problem.qubo.energy(&x), report.to_key_values()));
            Ok(report.is_valid)
        }
        Command::Render { instance, solution } => {
            let inst = load_instance(&instance)?;
            let catalog = inst.catalog();
            let x = parse_solution(&read_input(&solution)?, catalog.len())?;
            emit(&render(&decode(&x, &catalog), inst.board()));
            Ok(true)
        }
        Command::Convert { input, format, output } => {
            let (model, meta) = parse_any(&read_input(&input)?)?;
            let text = match (format, model) {
                (ModelFormat::Qubo, Model::Qubo(q)) => export_qubo(&q),
                (ModelFormat::Qubo, Model::Ising(m)) => export_qubo(&from_ising(&m)),
                (ModelFormat::Json, Model::Qubo(q)) => qubo_to_json(&q, meta),
                (ModelFormat::Json, Model::Ising(m)) => qubo_to_json(&from_ising(&m), meta),
                (ModelFormat::Ising, Model::Qubo(q)) => ising_to_json(&to_ising(&q), meta),
                (ModelFormat::Ising, Model::Ising(m)) => ising_to_json(&m, meta),
            };
            write_output(output.as_deref(), &text)?;
            Ok(true)
        }
    }
}

fn parse_board(s: &str) -> CliResult<Board> {
    let bad = || Failure::Usage(format!("--board expects WIDTHxHEIGHT, got {s:?}"));
    let (w, h) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    let w = w.trim().parse().map_err(|_| bad())?;
    let h = h.trim().parse().map_err(|_| bad())?;
    Ok(Board::new(w, h)?)
}

fn load_instance(args: &InstanceArgs) -> CliResult<PuzzleInstance> {
    let inst = match &args.config {
        Some(path) => {
            let text = read_input(path)?;
            PuzzleInstance::from_toml(&text).map_err(|e| match e {
                // A TOML syntax or schema problem is a parse error; a bad but
                // well-formed instance is a configuration error.
                tilequbo::Error::Format(m) => Failure::Parse(format!("{}: {m}", path.display())),
                other => other.into(),
            })?
        }
        None => PuzzleInstance::from_piece_list(parse_board(&args.board)?, &args.pieces)?,
    };
    if let Some((pieces, board)) = inst.area_mismatch() {
        eprintln!("warning: pieces cover {pieces} cells but the board has {board}; no exact tiling exists");
    }
    Ok(inst)
}

fn load_problem(instance: &InstanceArgs, weights: &WeightArgs) -> CliResult<TilingProblem> {
    let inst = load_instance(instance)?;
    Ok(TilingProblem::new(inst, PenaltyWeights::parse(&weights.weights)?))
}

fn solver_setup(args: &SolverArgs) -> CliResult<(Method, SolverConfig, DecomposeConfig)> {
    let method: Method = args.method.parse()?;
    let solver_cfg = SolverConfig {
        sa_sweeps: args.sweeps,
        tabu_tenure: args.tenure,
        stall_limit: args.stall_limit,
        ..SolverConfig::default()
    };
    solver_cfg.validate()?;
    let defaults = DecomposeConfig::default();
    let decompose_cfg = DecomposeConfig {
        sub_size: args.sub_size,
        max_rounds: args.max_rounds.unwrap_or(defaults.max_rounds),
        stall_rounds: args.stall_rounds.unwrap_or(defaults.stall_rounds),
        subsolver: args.subsolver.parse::<Subsolver>()?,
        random_start: args.random_start,
    };
    decompose_cfg.validate()?;
    Ok((method, solver_cfg, decompose_cfg))
}

fn provenance(p: &TilingProblem) -> Provenance {
    Provenance {
        instance_hash: p.instance.instance_hash(),
        instance: p.instance.canonical_description(),
        weights: p.weights,
    }
}

fn read_input(path: &Path) -> CliResult<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::Usage(format!("reading stdin: {e}")))?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn write_output(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        None => {
            emit(text);
            Ok(())
        }
        Some(p) => fs::write(p, text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display()))),
    }
}

/// Writes to stdout; a closed pipe (e.g. `| head`) is not an error.
fn emit(text: &str) {
    let mut out = io::stdout().lock();
    if let Err(e) = out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        if e.kind() != io::ErrorKind::BrokenPipe {
            eprintln!("error: writing stdout: {e}");
        }
    }
}

fn join(xs: &[usize]) -> String {
    xs.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn serde_json_pair<A: serde::Serialize, B: serde::Serialize>(stats: &A, runs: &B) -> String {
    to_json(&serde_json::json!({ "stats": stats, "runs": runs }))
}
