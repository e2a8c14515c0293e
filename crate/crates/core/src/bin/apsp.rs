use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use bridging_apsp::approx::{approx_params, approx_short_path_with, ApproxResult};
use bridging_apsp::bridging::find_bridge_with_stats;
use bridging_apsp::dist_prod::{dist_prod_with, CostModel, Kernel, ProdOptions, WitnessMode, UNCAPPED};
use bridging_apsp::exact::{iteration_seed, solve, Algorithm, ApspResult, SolverConfig, DEFAULT_SEED};
use bridging_apsp::generate::{random_graph, GenParams};
use bridging_apsp::graph::{load_dimacs, load_dimacs_real, render_dimacs, Graph};
use bridging_apsp::io::{read_dump, read_tsv, write_binary, write_tsv};
use bridging_apsp::matrix::WeightMatrix;
use bridging_apsp::oracle::{check_bridging, check_strong_bridging, floyd_warshall};
use bridging_apsp::paths::{reconstruct_path, trace_simple_path};
use bridging_apsp::{ApspError, Weight};

#[derive(Parser, Debug)]
#[command(name = "apsp", version, about = "All-pairs shortest paths for small integer weights")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,

    /// Worker threads; defaults to one per core.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Use this product kernel instead of the cost model's choice.
    #[arg(long, global = true, value_enum)]
    force_kernel: Option<KernelArg>,

    /// Time the kernels on this machine before choosing between them.
    #[arg(long, global = true)]
    calibrate: bool,

    /// Output file; standard output when absent.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Tsv)]
    format: Format,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact distances.
    Exact(ExactArgs),
    /// (1 + eps)-approximate distances for nonnegative weights.
    Approx(ApproxArgs),
    /// Capped distance product of two TSV matrices.
    Prod(ProdArgs),
    /// A shortest path between two vertices.
    Path(PathArgs),
    /// Check a distance dump against the Floyd-Warshall oracle.
    Verify(VerifyArgs),
    /// Time the solver on random graphs, one JSON line per iteration.
    Bench(BenchArgs),
    /// Build a bridging set and check it against the oracle.
    Bridge(BridgeArgs),
    /// Write a random DIMACS graph.
    Gen(GenArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum KernelArg {
    Naive,
    Encoded,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Tsv,
    Binary,
    JsonSummary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum AlgorithmArg {
    Rand,
    Det,
    Unweighted,
    Naive,
    Approx,
}

impl AlgorithmArg {
    fn exact(self) -> Option<Algorithm> {
        match self {
            AlgorithmArg::Rand => Some(Algorithm::Rand),
            AlgorithmArg::Det => Some(Algorithm::Det),
            AlgorithmArg::Unweighted => Some(Algorithm::Unweighted),
            AlgorithmArg::Naive => Some(Algorithm::Naive),
            AlgorithmArg::Approx => None,
        }
    }
}

#[derive(Args, Debug)]
struct SolveArgs {
    /// DIMACS input, or "-" for standard input.
    #[arg(default_value = "-")]
    input: String,

    #[arg(long, value_enum, default_value_t = AlgorithmArg::Det)]
    algorithm: AlgorithmArg,

    /// Relative error; required with `--algorithm approx` and rejected otherwise.
    #[arg(long)]
    epsilon: Option<f64>,

    /// Bridging sets are rebuilt while s <= n^theta.
    #[arg(long, default_value_t = 0.5)]
    bridging_threshold: f64,

    /// Extra attempts with derived seeds when a randomized run is not certified.
    #[arg(long, default_value_t = 3)]
    retries: u32,
}

#[derive(Args, Debug)]
struct ExactArgs {
    #[command(flatten)]
    solve: SolveArgs,
}

#[derive(Args, Debug)]
struct ApproxArgs {
    #[arg(default_value = "-")]
    input: String,

    #[arg(long)]
    epsilon: f64,

    /// Read nonnegative real weights, scaled so the smallest becomes 1/eps.
    #[arg(long)]
    scale_reals: bool,
}

#[derive(Args, Debug)]
struct ProdArgs {
    /// Left factor as TSV.
    a: String,
    /// Right factor as TSV.
    b: String,

    /// Entries above the cap in absolute value count as +inf.
    #[arg(long)]
    cap: Option<i64>,

    /// Also write the 1-based witness matrix here.
    #[arg(long)]
    witnesses: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PathArgs {
    #[command(flatten)]
    solve: SolveArgs,

    /// 1-based source vertex.
    #[arg(long)]
    from: usize,

    /// 1-based target vertex.
    #[arg(long)]
    to: usize,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// The graph the dump was computed from.
    input: String,

    /// TSV or binary distance dump.
    dump: String,

    /// Accept estimates within a factor 1 + eps instead of exact equality.
    #[arg(long)]
    epsilon: Option<f64>,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [64usize, 128, 256, 512])]
    sizes: Vec<usize>,

    #[arg(long, default_value_t = 2, allow_negative_numbers = true)]
    max_weight: i64,

    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    min_weight: i64,

    /// Expected out-degree of the generated graphs.
    #[arg(long, default_value_t = 4.0, conflicts_with = "density")]
    avg_degree: f64,

    /// Arc probability; overrides `--avg-degree`.
    #[arg(long)]
    density: Option<f64>,

    #[arg(long, value_enum, default_value_t = AlgorithmArg::Det)]
    algorithm: AlgorithmArg,

    /// Used with `--algorithm approx`.
    #[arg(long)]
    epsilon: Option<f64>,
}

#[derive(Args, Debug)]
struct BridgeArgs {
    #[arg(default_value = "-")]
    input: String,

    /// Bridging parameter; every pair needing at least s edges must be covered.
    #[arg(long)]
    s: usize,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long)]
    n: usize,

    #[arg(long, default_value_t = 0.3)]
    density: f64,

    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    min_weight: i64,

    #[arg(long, default_value_t = 10, allow_negative_numbers = true)]
    max_weight: i64,

    /// Keep arcs that close negative cycles.
    #[arg(long)]
    allow_negative_cycles: bool,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Apsp(#[from] ApspError),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Verify(String),
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Command outcome that maps to a nonzero exit code without being an error.
#[derive(Debug, PartialEq, Eq)]
enum Outcome {
    Ok,
    NegativeCycle,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::NegativeCycle) => ExitCode::from(2),
        Err(e) => {
            eprintln!("apsp: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> CliResult<Outcome> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    }
    match &cli.command {
        Command::Exact(a) => cmd_exact(cli, &a.solve),
        Command::Approx(a) => cmd_approx(cli, a),
        Command::Prod(a) => cmd_prod(cli, a),
        Command::Path(a) => cmd_path(cli, a),
        Command::Verify(a) => cmd_verify(cli, a),
        Command::Bench(a) => cmd_bench(cli, a),
        Command::Bridge(a) => cmd_bridge(cli, a),
        Command::Gen(a) => cmd_gen(cli, a),
    }
}

fn open_input(path: &str) -> CliResult<Box<dyn BufRead>> {
    if path == "-" {
        return Ok(Box::new(BufReader::new(io::stdin())));
    }
    let f = File::open(path).map_err(|e| CliError::Usage(format!("{path}: {e}")))?;
    Ok(Box::new(BufReader::new(f)))
}

fn load_graph(path: &str) -> CliResult<Graph> {
    Ok(load_dimacs(open_input(path)?)?)
}

fn open_output(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn solver_config(cli: &Cli, args: &SolveArgs) -> SolverConfig {
    SolverConfig {
        seed: cli.seed,
        bridging_threshold: args.bridging_threshold,
        force_kernel: cli.force_kernel.map(kernel_of),
        cost: cost_model(cli),
        ..SolverConfig::default()
    }
}

fn kernel_of(k: KernelArg) -> Kernel {
    match k {
        KernelArg::Naive => Kernel::Naive,
        KernelArg::Encoded => Kernel::Encoded,
    }
}

fn cost_model(cli: &Cli) -> CostModel {
    if cli.calibrate {
        CostModel::measured()
    } else {
        CostModel::default()
    }
}

fn check_epsilon(args: &SolveArgs) -> CliResult<Option<f64>> {
    match (args.algorithm, args.epsilon) {
        (AlgorithmArg::Approx, Some(e)) => Ok(Some(e)),
        (AlgorithmArg::Approx, None) => Err(CliError::Usage("--algorithm approx needs --epsilon".into())),
        (_, Some(_)) => Err(CliError::Usage("--epsilon only applies to --algorithm approx".into())),
        (_, None) => Ok(None),
    }
}

/// Runs an exact solver, retrying randomized runs that fail certification.
fn solve_exact(alg: Algorithm, d: &WeightMatrix, cfg: &SolverConfig, retries: u32) -> CliResult<(ApspResult, u32)> {
    let mut attempt = 0;
    loop {
        let run_cfg = if attempt == 0 {
            cfg.clone()
        } else {
            SolverConfig { seed: iteration_seed(cfg.seed, 1_000 + attempt as u64), ..cfg.clone() }
        };
        let r = solve(alg, d, &run_cfg)?;
        let settled = r.diagnostics.certified || r.negative_cycle.is_some();
        if settled || alg != Algorithm::Rand || attempt >= retries {
            return Ok((r, attempt + 1));
        }
        attempt += 1;
    }
}

fn solve_approx(d: &WeightMatrix, epsilon: f64, seed: u64) -> CliResult<ApproxResult> {
    let params = approx_params(d.rows(), d.max_abs_finite(), epsilon)?;
    Ok(approx_short_path_with(d, params, epsilon, seed)?)
}

fn emit_matrix(cli: &Cli, m: &WeightMatrix) -> CliResult<()> {
    let mut out = open_output(cli.output.as_deref())?;
    match cli.format {
        Format::Tsv => write_tsv(&mut out, m)?,
        Format::Binary => write_binary(&mut out, m)?,
        Format::JsonSummary => unreachable!("summaries are emitted by the caller"),
    }
    out.flush().map_err(ApspError::from)?;
    Ok(())
}

fn emit_json(cli: &Cli, value: &serde_json::Value) -> CliResult<()> {
    let mut out = open_output(cli.output.as_deref())?;
    writeln!(out, "{value}").map_err(ApspError::from)?;
    out.flush().map_err(ApspError::from)?;
    Ok(())
}

fn exact_summary(r: &ApspResult, seed: u64, attempts: u32) -> serde_json::Value {
    let dg = &r.diagnostics;
    let iterations: Vec<_> = dg
        .iterations
        .iter()
        .map(|it| {
            json!({
                "iteration": it.iteration,
                "s": it.s,
                "bridge_size": it.bridge_size,
                "rebuilt_bridge": it.rebuilt_bridge,
                "kernels": it.products.iter().map(|p| p.kernel.to_string()).collect::<Vec<_>>(),
                "caps": it.products.iter().map(|p| p.cap).collect::<Vec<_>>(),
                "improved": it.products.iter().map(|p| p.improved).sum::<usize>() + it.relaxations,
                "elapsed_ms": it.elapsed_ms,
            })
        })
        .collect();
    json!({
        "algorithm": dg.algorithm.to_string(),
        "n": dg.n,
        "M": dg.max_abs_weight,
        "seed": seed,
        "attempts": attempts,
        "iteration_count": dg.iterations.len(),
        "iterations": iterations,
        "certified": dg.certified,
        "negative_cycle": r.negative_cycle.as_ref().map(|v| v.iter().map(|i| i + 1).collect::<Vec<_>>()),
        "elapsed_ms": dg.elapsed_ms,
    })
}

fn approx_summary(r: &ApproxResult, unit: Option<f64>) -> serde_json::Value {
    let st = &r.stats;
    json!({
        "algorithm": "approx",
        "n": st.n,
        "M": st.max_abs_weight,
        "epsilon": st.epsilon,
        "resolution": st.params.resolution,
        "m_bound": st.params.m_bound,
        "iteration_count": st.iterations,
        "improved": st.improved,
        "stretch_bound": st.stretch_bound,
        "unit": unit,
        "elapsed_ms": st.elapsed_ms,
    })
}

fn cmd_exact(cli: &Cli, args: &SolveArgs) -> CliResult<Outcome> {
    let epsilon = check_epsilon(args)?;
    let g = load_graph(&args.input)?;
    let d = g.to_weight_matrix();
    let Some(alg) = args.algorithm.exact() else {
        let r = solve_approx(&d, epsilon.expect("checked above"), cli.seed)?;
        return match cli.format {
            Format::JsonSummary => emit_json(cli, &approx_summary(&r, None)),
            _ => emit_matrix(cli, &r.distances),
        }
        .map(|_| Outcome::Ok);
    };
    let cfg = solver_config(cli, args);
    let (r, attempts) = solve_exact(alg, &d, &cfg, args.retries)?;
    match cli.format {
        Format::JsonSummary => emit_json(cli, &exact_summary(&r, cli.seed, attempts))?,
        _ => emit_matrix(cli, &r.distances)?,
    }
    if !r.diagnostics.certified && r.negative_cycle.is_none() {
        eprintln!("apsp: warning: result not certified after {attempts} attempt(s)");
    }
    Ok(match &r.negative_cycle {
        Some(v) => {
            let shown: Vec<String> = v.iter().map(|i| (i + 1).to_string()).collect();
            eprintln!("apsp: negative cycle through vertices {}", shown.join(" "));
            Outcome::NegativeCycle
        }
        None => Outcome::Ok,
    })
}

fn cmd_approx(cli: &Cli, args: &ApproxArgs) -> CliResult<Outcome> {
    if !args.scale_reals {
        let d = load_graph(&args.input)?.to_weight_matrix();
        let r = solve_approx(&d, args.epsilon, cli.seed)?;
        match cli.format {
            Format::JsonSummary => emit_json(cli, &approx_summary(&r, None))?,
            _ => emit_matrix(cli, &r.distances)?,
        }
        return Ok(Outcome::Ok);
    }
    let real = load_dimacs_real(open_input(&args.input)?)?;
    // rounding the weights up costs another factor 1 + eps, so each half gets sqrt
    let half = (1.0 + args.epsilon).sqrt() - 1.0;
    let (g, unit) = real.to_integer(half)?;
    let r = solve_approx(&g.to_weight_matrix(), half, cli.seed)?;
    match cli.format {
        Format::JsonSummary => emit_json(cli, &approx_summary(&r, Some(unit))),
        Format::Binary => Err(CliError::Usage("binary dumps hold integers; use tsv with --scale-reals".into())),
        Format::Tsv => {
            let mut out = open_output(cli.output.as_deref())?;
            for row in r.distances.iter_rows() {
                let cells: Vec<String> = row
                    .iter()
                    .map(|w| match w.value() {
                        Some(v) => format!("{}", v as f64 * unit),
                        None => w.to_string(),
                    })
                    .collect();
                writeln!(out, "{}", cells.join("\t")).map_err(ApspError::from)?;
            }
            out.flush().map_err(ApspError::from)?;
            Ok(())
        }
    }?;
    Ok(Outcome::Ok)
}

fn read_matrix(path: &str) -> CliResult<WeightMatrix> {
    Ok(read_tsv(open_input(path)?)?)
}

fn cmd_prod(cli: &Cli, args: &ProdArgs) -> CliResult<Outcome> {
    let a = read_matrix(&args.a)?;
    let b = read_matrix(&args.b)?;
    let opts = ProdOptions {
        kernel: cli.force_kernel.map(kernel_of),
        cost: cost_model(cli),
        ..ProdOptions::new(WitnessMode::ExactSmallest, cli.seed)
    };
    let report = dist_prod_with(&a, &b, args.cap.unwrap_or(UNCAPPED), &opts)?;
    if report.fell_back {
        eprintln!("apsp: no prime basis covers this cap; used the naive kernel");
    }
    if let Some(path) = &args.witnesses {
        let mut out = open_output(Some(path))?;
        let w = &report.output.witnesses;
        for r in 0..w.rows() {
            let cells: Vec<String> =
                (0..w.cols()).map(|c| w.get(r, c).map_or("-".to_string(), |k| (k + 1).to_string())).collect();
            writeln!(out, "{}", cells.join("\t")).map_err(ApspError::from)?;
        }
        out.flush().map_err(ApspError::from)?;
    }
    match cli.format {
        Format::JsonSummary => emit_json(
            cli,
            &json!({
                "rows": a.rows(),
                "inner": a.cols(),
                "cols": b.cols(),
                "cap": args.cap,
                "kernel": report.kernel.to_string(),
                "fell_back": report.fell_back,
            }),
        )?,
        _ => emit_matrix(cli, &report.output.product)?,
    }
    Ok(Outcome::Ok)
}

fn vertex(v: usize, n: usize) -> CliResult<usize> {
    if v == 0 || v > n {
        return Err(CliError::Usage(format!("vertex {v} is not in 1..={n}")));
    }
    Ok(v - 1)
}

fn cmd_path(cli: &Cli, args: &PathArgs) -> CliResult<Outcome> {
    let epsilon = check_epsilon(&args.solve)?;
    let g = load_graph(&args.solve.input)?;
    let d = g.to_weight_matrix();
    let n = g.n();
    let (from, to) = (vertex(args.from, n)?, vertex(args.to, n)?);
    let (vertices, weight) = match args.solve.algorithm.exact() {
        None => {
            let r = solve_approx(&d, epsilon.expect("checked above"), cli.seed)?;
            let p = reconstruct_path(&r.witnesses, &d, from, to)?;
            if p.weight.is_inf() {
                return Err(ApspError::NoPath { from: args.from, to: args.to }.into());
            }
            (p.vertices, p.weight)
        }
        Some(alg) => {
            let (r, _) = solve_exact(alg, &d, &solver_config(cli, &args.solve), args.solve.retries)?;
            if r.distances.get(from, to).is_neg_inf() {
                eprintln!("apsp: no shortest path from {} to {}: a negative cycle intervenes", args.from, args.to);
                return Ok(Outcome::NegativeCycle);
            }
            let succ = r.successors(&d);
            let p = trace_simple_path(&succ, &d, from, to).map_err(|e| match e {
                ApspError::NoPath { .. } => ApspError::NoPath { from: args.from, to: args.to },
                other => other,
            })?;
            (p.vertices, *r.distances.get(from, to))
        }
    };
    let shown: Vec<String> = vertices.iter().map(|v| (v + 1).to_string()).collect();
    let mut out = open_output(cli.output.as_deref())?;
    writeln!(out, "{}", shown.join(" ")).map_err(ApspError::from)?;
    writeln!(out, "weight {weight}").map_err(ApspError::from)?;
    out.flush().map_err(ApspError::from)?;
    Ok(Outcome::Ok)
}

fn read_dump_file(path: &str) -> CliResult<WeightMatrix> {
    let mut bytes = Vec::new();
    if path == "-" {
        io::stdin().read_to_end(&mut bytes).map_err(ApspError::from)?;
    } else {
        bytes = std::fs::read(path).map_err(|e| CliError::Usage(format!("{path}: {e}")))?;
    }
    Ok(read_dump(bytes.as_slice())?)
}

/// Why a dumped entry disagrees with the true distance, if it does.
fn divergence(truth: Weight, got: Weight, epsilon: Option<f64>) -> Option<&'static str> {
    match (truth.value(), got.value(), epsilon) {
        (Some(t), Some(g), Some(eps)) => {
            if g < t {
                Some("below the true distance")
            } else if (g as f64) > (1.0 + eps) * t as f64 + 1e-9 * t.abs() as f64 {
                Some("stretch exceeds 1 + eps")
            } else {
                None
            }
        }
        _ if truth == got => None,
        _ => Some("differs from the true distance"),
    }
}

fn cmd_verify(cli: &Cli, args: &VerifyArgs) -> CliResult<Outcome> {
    let g = load_graph(&args.input)?;
    let dump = read_dump_file(&args.dump)?;
    let n = g.n();
    if dump.rows() != n || dump.cols() != n {
        return Err(CliError::Verify(format!(
            "FAIL: dump is {}x{}, graph has {n} vertices",
            dump.rows(),
            dump.cols()
        )));
    }
    let truth = floyd_warshall(&g.to_weight_matrix())?.distances;
    let mut mismatches = 0usize;
    let mut first = None;
    let mut worst = 1.0f64;
    for i in 0..n {
        for j in 0..n {
            let (t, d) = (*truth.get(i, j), *dump.get(i, j));
            if let (Some(tv), Some(dv)) = (t.value(), d.value()) {
                if tv > 0 {
                    worst = worst.max(dv as f64 / tv as f64);
                }
            }
            if let Some(why) = divergence(t, d, args.epsilon) {
                mismatches += 1;
                first.get_or_insert((i, j, t, d, why));
            }
        }
    }
    let mut out = open_output(cli.output.as_deref())?;
    let mode = match args.epsilon {
        Some(e) => format!("stretch <= {}", 1.0 + e),
        None => "exact".to_string(),
    };
    writeln!(out, "checked {} pairs ({mode}), {mismatches} mismatches, worst ratio {worst:.6}", n * n)
        .map_err(ApspError::from)?;
    if let Some((i, j, t, d, why)) = first {
        writeln!(out, "first divergence at ({}, {}): expected {t}, got {d} ({why})", i + 1, j + 1)
            .map_err(ApspError::from)?;
    }
    let verdict = if mismatches == 0 { "PASS" } else { "FAIL" };
    writeln!(out, "{verdict}").map_err(ApspError::from)?;
    out.flush().map_err(ApspError::from)?;
    if mismatches > 0 {
        return Err(CliError::Verify(format!("verification failed with {mismatches} mismatches")));
    }
    Ok(Outcome::Ok)
}

/// Least-squares slope of log(time) against log(n).
fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points.iter().filter(|p| p.1 > 0.0).map(|&(x, y)| (x.ln(), y.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let (mx, my) = (sx / k, sy / k);
    let num: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let den: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (den > 0.0).then(|| num / den)
}

fn cmd_bench(cli: &Cli, args: &BenchArgs) -> CliResult<Outcome> {
    let mut out = open_output(cli.output.as_deref())?;
    let mut line = |v: serde_json::Value| -> CliResult<()> {
        writeln!(out, "{v}").map_err(ApspError::from)?;
        out.flush().map_err(ApspError::from)?;
        Ok(())
    };
    let mut timings = Vec::new();
    for &n in &args.sizes {
        let density = args.density.unwrap_or((args.avg_degree / n.max(2) as f64).min(1.0));
        let params = GenParams::new(n, density, args.min_weight, args.max_weight, iteration_seed(cli.seed, n as u64));
        let d = random_graph(&params)?.to_weight_matrix();
        let start = Instant::now();
        match args.algorithm.exact() {
            Some(alg) => {
                let cfg = SolverConfig {
                    seed: cli.seed,
                    force_kernel: cli.force_kernel.map(kernel_of),
                    cost: cost_model(cli),
                    ..SolverConfig::default()
                };
                let r = solve(alg, &d, &cfg)?;
                for it in &r.diagnostics.iterations {
                    let nlogn = n as f64 * (n as f64).ln();
                    line(json!({
                        "n": n,
                        "iteration": it.iteration,
                        "s": it.s,
                        "bridge_size": it.bridge_size,
                        "rebuilt_bridge": it.rebuilt_bridge,
                        "bridge_ratio": it.bridge_size as f64 / ((2.0f64 / 3.0).powi(it.iteration as i32) * nlogn),
                        "kernels": it.products.iter().map(|p| p.kernel.to_string()).collect::<Vec<_>>(),
                        "elapsed_ms": it.elapsed_ms,
                    }))?;
                }
                let ms = start.elapsed().as_secs_f64() * 1e3;
                line(json!({
                    "n": n,
                    "algorithm": alg.to_string(),
                    "M": r.diagnostics.max_abs_weight,
                    "certified": r.diagnostics.certified,
                    "total_ms": ms,
                }))?;
                timings.push((n as f64, ms));
            }
            None => {
                let eps = args.epsilon.ok_or_else(|| CliError::Usage("--algorithm approx needs --epsilon".into()))?;
                let r = solve_approx(&d, eps, cli.seed)?;
                let ms = start.elapsed().as_secs_f64() * 1e3;
                line(json!({ "n": n, "algorithm": "approx", "summary": approx_summary(&r, None), "total_ms": ms }))?;
                timings.push((n as f64, ms));
            }
        }
    }
    line(json!({ "fit_exponent": loglog_slope(&timings) }))?;
    Ok(Outcome::Ok)
}

fn cmd_bridge(cli: &Cli, args: &BridgeArgs) -> CliResult<Outcome> {
    let g = load_graph(&args.input)?;
    let d = g.to_weight_matrix();
    let cfg = SolverConfig { seed: cli.seed, ..SolverConfig::default() };
    let r = solve(Algorithm::Det, &d, &cfg)?;
    if r.negative_cycle.is_some() {
        return Err(CliError::Usage("bridging sets need a graph without negative cycles".into()));
    }
    let (bridge, stats) = find_bridge_with_stats(&r.witnesses, args.s);
    let oracle = floyd_warshall(&d)?;
    let s = u32::try_from(args.s).map_err(|_| CliError::Usage(format!("s = {} is too large", args.s)))?;
    let report = check_bridging(&bridge.vertices, &oracle, s);
    let unit = g.edges().iter().all(|e| e.weight == 1);
    let strong = unit.then(|| check_strong_bridging(&bridge.vertices, &oracle, s));
    emit_json(
        cli,
        &json!({
            "n": g.n(),
            "s": args.s,
            "bridge_size": bridge.len(),
            "size_bound": stats.size_bound,
            "vertices": bridge.vertices.iter().map(|v| v + 1).collect::<Vec<_>>(),
            "bridging_violations": report.violations.len(),
            "strong_violations": strong.as_ref().map(|s| s.violations.len()),
        }),
    )?;
    let failed = !report.passed() || strong.as_ref().is_some_and(|s| !s.passed());
    if failed {
        return Err(CliError::Verify("bridging set misses some pairs".into()));
    }
    Ok(Outcome::Ok)
}

fn cmd_gen(cli: &Cli, args: &GenArgs) -> CliResult<Outcome> {
    let params = GenParams {
        avoid_negative_cycles: !args.allow_negative_cycles,
        ..GenParams::new(args.n, args.density, args.min_weight, args.max_weight, cli.seed)
    };
    let g = random_graph(&params)?;
    let mut out = open_output(cli.output.as_deref())?;
    out.write_all(render_dimacs(&g).as_bytes()).map_err(ApspError::from)?;
    out.flush().map_err(ApspError::from)?;
    Ok(Outcome::Ok)
}
