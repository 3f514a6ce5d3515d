//! Command-line surface for the minimum ratio cycle solver.
//!
//! Exit codes: 0 success, 1 I/O or parse errors, 2 unsolvable instances
//! (no cycle, validation failure, algorithm precondition), 3 selftest
//! disagreement. Solutions go to stdout; stderr carries only diagnostics.

use std::fmt::Write as _;
use std::io::Read;
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ratio_cycle::baselines::{brute_force_min_ratio, karp_min_mean, lawler_binary_search};
use ratio_cycle::context::ConcreteCtx;
use ratio_cycle::graph::{
    gen_planted_ratio, gen_random_graph, parse_ratio_graph, substitute_lambda, validate, RatioGraph,
};
use ratio_cycle::parametric::solution_at_lambda;
use ratio_cycle::sssp::detect_negative_cycle_verdict;
use ratio_cycle::{
    compare_to_lambda_star, parametric_min_ratio, CenterMode, HopBound, RatioSolution, Rational,
    SolveError,
};

#[derive(Parser)]
#[command(
    name = "ratio-cycle",
    version,
    about = "Exact minimum cost-to-time ratio cycle solver"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Algorithm {
    ParametricRandomized,
    ParametricGreedy,
    ParametricFull,
    Lawler,
    Brute,
    Karp,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum DetectMode {
    Full,
    Greedy,
    Randomized,
}

#[derive(Args)]
struct SolveArgs {
    /// Input file in the `p ratio` format, or `-` for stdin.
    input: String,
    #[arg(long, value_enum, default_value_t = Algorithm::ParametricGreedy)]
    alg: Algorithm,
    /// Hop bound: `auto` or an integer.
    #[arg(long, default_value = "auto")]
    h: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Oversampling constant for randomized center sampling.
    #[arg(long = "c-constant", default_value_t = 1.0)]
    c_constant: f64,
    /// Emit machine-readable JSON instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct DetectArgs {
    input: String,
    /// λ as `p/q` or an integer; the check runs on G_λ.
    #[arg(long, allow_hyphen_values = true)]
    lambda: String,
    #[arg(long, value_enum, default_value_t = DetectMode::Full)]
    mode: DetectMode,
    #[arg(long, default_value = "auto")]
    h: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "c-constant", default_value_t = 1.0)]
    c_constant: f64,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    #[arg(long, default_value_t = -9, allow_hyphen_values = true)]
    cost_min: i64,
    #[arg(long, default_value_t = 9)]
    cost_max: i64,
    #[arg(long, default_value_t = 1)]
    time_min: i64,
    #[arg(long, default_value_t = 4)]
    time_max: i64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Plant a cycle of exactly this ratio and make it optimal.
    #[arg(long, allow_hyphen_values = true)]
    planted: Option<String>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value_t = 200)]
    n: usize,
    #[arg(long, default_value_t = 2000)]
    m: usize,
    /// Hop bounds to sweep, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = vec![2usize, 4, 8, 16])]
    h: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// λ at which the detection pipeline is benchmarked.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    lambda: String,
    #[arg(long, value_enum, default_value_t = DetectMode::Randomized)]
    mode: DetectMode,
    #[arg(long = "c-constant", default_value_t = 1.0)]
    c_constant: f64,
    /// Emit JSON records instead of CSV.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SelftestArgs {
    /// Instances per test family.
    #[arg(long, default_value_t = 40)]
    instances: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Test hook: flip one agreement comparison to exercise the
    /// counterexample path.
    #[arg(long, hide = true)]
    inject_fault: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the minimum ratio cycle.
    Solve(SolveArgs),
    /// Check G_λ for a negative cycle and print the certificate.
    Detect(DetectArgs),
    /// Compare λ against λ*: prints less, equal, or greater.
    Oracle {
        input: String,
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
    },
    /// Generate a random or planted instance on stdout.
    Generate(GenerateArgs),
    /// Sweep the hop bound and report instrumentation counters.
    Bench(BenchArgs),
    /// Cross-validate all solvers on generated instances.
    Selftest(SelftestArgs),
}

/// Failure with a process exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn io(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }
    fn instance(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
    fn disagreement(message: impl Into<String>) -> Self {
        Failure {
            code: 3,
            message: message.into(),
        }
    }
}

fn main() -> ExitCode {
    // Die quietly when the consumer of a pipe goes away (e.g. `| head`).
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Detect(args) => cmd_detect(args),
        Command::Oracle { input, lambda } => cmd_oracle(&input, &lambda),
        Command::Generate(args) => cmd_generate(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Selftest(args) => cmd_selftest(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn read_graph(input: &str) -> Result<RatioGraph, Failure> {
    let text = if input == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| Failure::io(format!("reading stdin: {e}")))?;
        buf
    } else {
        std::fs::read_to_string(input).map_err(|e| Failure::io(format!("reading {input}: {e}")))?
    };
    parse_ratio_graph(&text).map_err(|e| Failure::io(e.to_string()))
}

fn parse_lambda(text: &str) -> Result<Rational, Failure> {
    Rational::from_str(text).map_err(|e| Failure::io(e.to_string()))
}

fn parse_hop(text: &str) -> Result<HopBound, Failure> {
    if text.eq_ignore_ascii_case("auto") {
        return Ok(HopBound::Auto);
    }
    text.parse::<usize>().map(HopBound::Fixed).map_err(|_| {
        Failure::io(format!(
            "bad hop bound `{text}`; expected `auto` or an integer"
        ))
    })
}

fn solve_error(e: SolveError) -> Failure {
    match e {
        SolveError::NoCycle => Failure::instance("Acyclic: graph has no directed cycle"),
        SolveError::Invalid(_) => Failure::instance(e.to_string()),
        SolveError::Internal(_) => Failure::instance(e.to_string()),
    }
}

fn print_solution(sol: &RatioSolution, json: bool) {
    if json {
        println!(
            "{}",
            serde_json::to_string(sol).expect("solution serializes")
        );
        return;
    }
    let cycle = sol
        .cycle
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(" ");
    println!("lambda_star: {}", sol.lambda_star);
    println!("cycle: {}", cycle);
    println!("cost_sum: {}", sol.cost_sum);
    println!("time_sum: {}", sol.time_sum);
    println!("algorithm: {}", sol.algorithm);
    let c = &sol.counters;
    println!(
        "counters: comparisons={} rounds={} steps={} oracle_calls={} work={}",
        c.comparisons, c.comparison_rounds, c.parallel_steps, c.oracle_calls, c.work_units
    );
}

fn cmd_solve(args: SolveArgs) -> Result<(), Failure> {
    let g = read_graph(&args.input)?;
    let hop = parse_hop(&args.h)?;
    let sol = match args.alg {
        Algorithm::ParametricRandomized => parametric_min_ratio(
            &g,
            hop,
            &CenterMode::Randomized {
                seed: args.seed,
                c: args.c_constant.max(1.0),
            },
        )
        .map_err(solve_error)?,
        Algorithm::ParametricGreedy => {
            parametric_min_ratio(&g, hop, &CenterMode::Greedy).map_err(solve_error)?
        }
        Algorithm::ParametricFull => {
            parametric_min_ratio(&g, hop, &CenterMode::Full).map_err(solve_error)?
        }
        Algorithm::Lawler => lawler_binary_search(&g).map_err(solve_error)?,
        Algorithm::Brute => {
            brute_force_min_ratio(&g).map_err(|e| Failure::instance(e.to_string()))?
        }
        Algorithm::Karp => {
            let lambda = karp_min_mean(&g).map_err(|e| Failure::instance(e.to_string()))?;
            solution_at_lambda(&g, lambda, "karp").map_err(solve_error)?
        }
    };
    print_solution(&sol, args.json);
    Ok(())
}

fn detect_mode(mode: DetectMode, seed: u64, c: f64) -> CenterMode {
    match mode {
        DetectMode::Full => CenterMode::Full,
        DetectMode::Greedy => CenterMode::Greedy,
        DetectMode::Randomized => CenterMode::Randomized {
            seed,
            c: c.max(1.0),
        },
    }
}

fn cmd_detect(args: DetectArgs) -> Result<(), Failure> {
    let g = read_graph(&args.input)?;
    let report = validate(&g);
    if !report.ok {
        return Err(Failure::instance(format!(
            "invalid instance: {:?}",
            report.violations
        )));
    }
    let lambda = parse_lambda(&args.lambda)?;
    let reweighted = substitute_lambda(&g, &lambda);
    let h = match parse_hop(&args.h)? {
        HopBound::Auto => HopBound::Auto.resolve(g.n, g.m()),
        HopBound::Fixed(h) => h,
    };
    let mode = detect_mode(args.mode, args.seed, args.c_constant);
    let mut ctx = ConcreteCtx::concrete();
    let verdict = detect_negative_cycle_verdict(&mut ctx, &reweighted, h, &mode);
    if args.json {
        let mut value = serde_json::to_value(&verdict).expect("verdict serializes");
        value["lambda"] = serde_json::to_value(&lambda).unwrap();
        value["counters"] = serde_json::to_value(ctx.counters()).unwrap();
        println!("{}", serde_json::to_string(&value).unwrap());
        return Ok(());
    }
    println!("negative cycle: {}", verdict.has_negative_cycle);
    if let Some((u, v, ix)) = verdict.violated_edge {
        println!("violated edge: {} -> {} (index {})", u, v, ix);
    }
    if let Some(p) = &verdict.potential {
        let rendered = p
            .iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(" ");
        println!("potential: {}", rendered);
    }
    Ok(())
}

fn cmd_oracle(input: &str, lambda: &str) -> Result<(), Failure> {
    let g = read_graph(input)?;
    let report = validate(&g);
    if !report.ok {
        return Err(Failure::instance(format!(
            "invalid instance: {:?}",
            report.violations
        )));
    }
    let lambda = parse_lambda(lambda)?;
    let word = match compare_to_lambda_star(&g, &lambda) {
        std::cmp::Ordering::Less => "less",
        std::cmp::Ordering::Equal => "equal",
        std::cmp::Ordering::Greater => "greater",
    };
    println!("{word}");
    Ok(())
}

fn cmd_generate(args: GenerateArgs) -> Result<(), Failure> {
    let (graph, note) = match &args.planted {
        Some(text) => {
            let planted = parse_lambda(text)?;
            let (g, star) = gen_planted_ratio(args.n, args.m, &planted, args.seed)
                .map_err(|e| Failure::instance(e.to_string()))?;
            (g, format!("c planted lambda_star={star}"))
        }
        None => {
            let g = gen_random_graph(
                args.n,
                args.m,
                (args.cost_min, args.cost_max),
                (args.time_min, args.time_max),
                args.seed,
            )
            .map_err(|e| Failure::instance(e.to_string()))?;
            (g, String::new())
        }
    };
    println!(
        "c generated by ratio-cycle: n={} m={} seed={}",
        args.n, args.m, args.seed
    );
    if !note.is_empty() {
        println!("{note}");
    }
    print!("{}", graph.to_text());
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<(), Failure> {
    let g = gen_random_graph(args.n, args.m, (-9, 9), (1, 4), args.seed)
        .map_err(|e| Failure::instance(e.to_string()))?;
    let lambda = parse_lambda(&args.lambda)?;
    let reweighted = substitute_lambda(&g, &lambda);
    if !args.json {
        println!(
            "n,m,h,algorithm,wall_ms,comparisons,comparison_rounds,parallel_steps,oracle_calls,work_units"
        );
    }
    for &h in &args.h {
        let mode = detect_mode(args.mode, args.seed, args.c_constant);
        let mut ctx = ConcreteCtx::concrete();
        let started = Instant::now();
        let verdict = detect_negative_cycle_verdict(&mut ctx, &reweighted, h, &mode);
        let wall_ms = started.elapsed().as_millis();
        let c = ctx.counters();
        let algorithm = format!("detect-{:?}", args.mode).to_lowercase();
        if args.json {
            let row = serde_json::json!({
                "n": args.n,
                "m": args.m,
                "h": h,
                "algorithm": algorithm,
                "wall_ms": wall_ms,
                "negative_cycle": verdict.has_negative_cycle,
                "counters": c,
                "parallel_steps": c.parallel_steps,
            });
            println!("{row}");
        } else {
            println!(
                "{},{},{},{},{},{},{},{},{},{}",
                args.n,
                args.m,
                h,
                algorithm,
                wall_ms,
                c.comparisons,
                c.comparison_rounds,
                c.parallel_steps,
                c.oracle_calls,
                c.work_units
            );
        }
    }
    Ok(())
}

/// One selftest family: named answers that must all agree on λ*.
struct Disagreement {
    family: &'static str,
    graph: RatioGraph,
    answers: Vec<(String, Rational)>,
}

fn lambda_answers(g: &RatioGraph, seed: u64) -> Result<Vec<(String, Rational)>, Failure> {
    let mut answers = Vec::new();
    answers.push((
        "brute".to_string(),
        brute_force_min_ratio(g)
            .map_err(|e| Failure::instance(e.to_string()))?
            .lambda_star,
    ));
    answers.push((
        "lawler".to_string(),
        lawler_binary_search(g).map_err(solve_error)?.lambda_star,
    ));
    for (name, mode) in [
        ("parametric-full", CenterMode::Full),
        ("parametric-greedy", CenterMode::Greedy),
        (
            "parametric-randomized",
            CenterMode::Randomized { seed, c: 1.0 },
        ),
    ] {
        answers.push((
            name.to_string(),
            parametric_min_ratio(g, HopBound::Auto, &mode)
                .map_err(solve_error)?
                .lambda_star,
        ));
    }
    Ok(answers)
}

fn answers_disagree(answers: &[(String, Rational)]) -> bool {
    answers.windows(2).any(|w| w[0].1 != w[1].1)
}

/// Greedy single-edge removal while the instance stays valid and the
/// disagreement (or injected fault) persists.
fn minimize_counterexample(
    mut g: RatioGraph,
    still_bad: &dyn Fn(&RatioGraph) -> bool,
) -> RatioGraph {
    loop {
        let mut shrunk = false;
        for ix in (0..g.edges.len()).rev() {
            let mut candidate = g.clone();
            candidate.edges.remove(ix);
            if validate(&candidate).ok && still_bad(&candidate) {
                g = candidate;
                shrunk = true;
                break;
            }
        }
        if !shrunk {
            return g;
        }
    }
}

fn report_disagreement(d: Disagreement) -> Failure {
    println!("selftest counterexample in family `{}`:", d.family);
    print!("{}", d.graph.to_text());
    for (name, lambda) in &d.answers {
        println!("  {name}: {lambda}");
    }
    Failure::disagreement(format!("solvers disagree in family `{}`", d.family))
}

fn cmd_selftest(args: SelftestArgs) -> Result<(), Failure> {
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let started = Instant::now();

    // Family 1: all solvers agree on random instances.
    for i in 0..args.instances {
        let n = rng.gen_range(2usize..=8);
        let m = rng.gen_range(n..=20);
        let g = gen_random_graph(n, m, (-9, 9), (1, 4), rng.gen()).expect("valid parameters");
        let fault = args.inject_fault && i == 0;
        let answers = lambda_answers(&g, rng.gen())?;
        if answers_disagree(&answers) == fault {
            continue;
        }
        // Either a real disagreement, or the injected fault pretending one.
        let seed_for_min = rng.gen();
        let still_bad = |candidate: &RatioGraph| -> bool {
            fault
                || lambda_answers(candidate, seed_for_min)
                    .map(|a| answers_disagree(&a))
                    .unwrap_or(false)
        };
        let minimized = minimize_counterexample(g, &still_bad);
        let answers = lambda_answers(&minimized, seed_for_min)?;
        return Err(report_disagreement(Disagreement {
            family: "agreement",
            graph: minimized,
            answers,
        }));
    }

    // Family 2: Karp's minimum mean equals brute force on unit times.
    for _ in 0..args.instances {
        let n = rng.gen_range(2usize..=8);
        let m = rng.gen_range(n..=20);
        let g = gen_random_graph(n, m, (-9, 9), (1, 1), rng.gen()).expect("valid parameters");
        let karp = karp_min_mean(&g).map_err(|e| Failure::instance(e.to_string()))?;
        let brute = brute_force_min_ratio(&g).map_err(|e| Failure::instance(e.to_string()))?;
        if karp != brute.lambda_star {
            let answers = vec![
                ("karp".to_string(), karp),
                ("brute".to_string(), brute.lambda_star),
            ];
            return Err(report_disagreement(Disagreement {
                family: "karp-unit-time",
                graph: g,
                answers,
            }));
        }
    }

    // Family 3: planted instances come back exactly.
    for _ in 0..args.instances {
        let n = rng.gen_range(2usize..=8);
        let m = rng.gen_range(n..=16);
        let planted = Rational::new(rng.gen_range(-9i64..=9), rng.gen_range(1i64..=4));
        let (g, star) = gen_planted_ratio(n, m, &planted, rng.gen()).expect("valid parameters");
        let solved =
            parametric_min_ratio(&g, HopBound::Auto, &CenterMode::Greedy).map_err(solve_error)?;
        if solved.lambda_star != star {
            let answers = vec![
                ("planted".to_string(), star),
                ("parametric-greedy".to_string(), solved.lambda_star),
            ];
            return Err(report_disagreement(Disagreement {
                family: "planted",
                graph: g,
                answers,
            }));
        }
    }

    let mut summary = String::new();
    let _ = write!(
        summary,
        "selftest: {} instances per family, 3 families, all agree ({} ms)",
        args.instances,
        started.elapsed().as_millis()
    );
    println!("{summary}");
    Ok(())
}
