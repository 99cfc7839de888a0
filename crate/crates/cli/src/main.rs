//! `isoconst` command-line front end.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use isoconst::lambda::{oracle_small, star_exact, star_fptas, star_lower_bound};
use isoconst::mve::{gaussian_round, gaussian_trials, lift_solve, pca_round, tree_mve2_embed, tree_mve2_value, GramLift};
use isoconst::reductions::{
    lambda_gap_check, parse_beta, spread_gap_check, to_lambda_star, to_spread_star, to_vexp_star, vexp_gap_check,
    PartitionInstance,
};
use isoconst::report::json_number;
use isoconst::selftest::{run_selftest, SelftestOptions, SUITES};
use isoconst::spread::{abs_oracle, star_spread_exact, tree_spread_fptas};
use isoconst::vexp::{vexp_bruteforce, vexp_star_weighted, vexp_tree_uniform, DEFAULT_MAX_N};
use isoconst::{parse_graph, EmbeddingJson, Error, GraphOptions, SolveReport, StarGraph, TreeGraph, WeightedGraph};

#[derive(Parser, Debug)]
#[command(name = "isoconst", version, about = "Isoperimetric and embedding constants of weighted graphs")]
struct Cli {
    /// Worker threads for parallel solvers (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Print machine-readable JSON instead of text
    #[arg(long, global = true)]
    json: bool,

    /// Accept vertices with zero mass in graph files
    #[arg(long, global = true)]
    allow_zero_mass: bool,

    /// Arithmetic for masses read from graph files
    #[arg(long, global = true, value_enum, default_value_t = Numeric::Rational)]
    numeric: Numeric,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Numeric {
    /// Keep `p/q` and decimal masses exact when they sum to one
    Rational,
    /// Convert all masses to floating point
    Float,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Max-neighbor Poincaré constant lambda-infinity
    LambdaInf(LambdaArgs),
    /// Spread constant (maximum variance of a 1-Lipschitz valuation)
    Spread(SpreadArgs),
    /// Two-dimensional maximum variance embedding of a tree
    Mve2(Mve2Args),
    /// Gram-matrix lift of the maximum variance embedding
    Lift(LiftArgs),
    /// Round a lift to k dimensions
    Round(RoundArgs),
    /// Vertex expansion
    Vexp(VexpArgs),
    /// Build the star gadget of a Partition instance
    Reduce(ReduceArgs),
    /// Compare a gadget's value with its predicted gap
    Gapcheck(GapArgs),
    /// Run the built-in invariant suites
    Selftest(SelftestArgs),
}

#[derive(Args, Debug)]
struct LambdaArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, value_enum, default_value_t = LambdaMethod::Oracle)]
    method: LambdaMethod,
    #[arg(long, default_value_t = 0.01)]
    eps: f64,
    /// Vertex budget for the oracle
    #[arg(long, default_value_t = 10)]
    max_n: usize,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum LambdaMethod {
    #[value(alias = "star-exact")]
    StarClosed,
    StarFptas,
    Oracle,
}

#[derive(Args, Debug)]
struct SpreadArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, value_enum, default_value_t = SpreadMethod::AbsOracle)]
    method: SpreadMethod,
    #[arg(long, default_value_t = 0.01)]
    eps: f64,
    /// Vertex budget for the ABS oracle
    #[arg(long, default_value_t = 20)]
    max_n: usize,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum SpreadMethod {
    AbsOracle,
    StarExact,
    TreeFptas,
}

#[derive(Args, Debug)]
struct Mve2Args {
    #[arg(long)]
    graph: PathBuf,
    /// Write the optimal planar embedding here
    #[arg(long)]
    embed_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct LiftArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, default_value_t = 20_000)]
    max_iters: usize,
    /// Write the Gram factorization here
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RoundArgs {
    #[arg(long)]
    lift: PathBuf,
    /// Graph for the edge constraints; defaults to the one stored in the lift
    #[arg(long)]
    graph: Option<PathBuf>,
    #[arg(long)]
    k: usize,
    /// Base seed; trial t uses seed + t
    #[arg(long, env = "SPREAD_SEED")]
    seed: Option<u64>,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    #[arg(long, value_enum, default_value_t = RoundMethod::Gaussian)]
    method: RoundMethod,
    /// Write the rounded embedding (first trial) here
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum RoundMethod {
    Gaussian,
    Pca,
}

#[derive(Args, Debug)]
struct VexpArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, value_enum, default_value_t = VexpMethod::Brute)]
    method: VexpMethod,
    #[arg(long, default_value_t = DEFAULT_MAX_N)]
    max_n: usize,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum VexpMethod {
    Brute,
    TreeDp,
    Star,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Target {
    Lambda,
    Spread,
    Vexp,
}

impl Target {
    fn name(self) -> &'static str {
        match self {
            Target::Lambda => "lambda",
            Target::Spread => "spread",
            Target::Vexp => "vexp",
        }
    }
}

#[derive(Args, Debug)]
struct ReduceArgs {
    /// Partition instance, e.g. `1,1,2`
    #[arg(long)]
    p: String,
    /// Gadget parameter, integer or `p/q`
    #[arg(long)]
    beta: String,
    #[arg(long, value_enum)]
    target: Target,
    /// Write the gadget graph here instead of stdout
    #[arg(long)]
    emit: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GapArgs {
    #[arg(long)]
    p: String,
    #[arg(long)]
    beta: String,
    #[arg(long, value_enum)]
    target: Target,
}

#[derive(Args, Debug)]
struct SelftestArgs {
    /// Run only these suites
    #[arg(long, value_delimiter = ',', value_parser = clap::builder::PossibleValuesParser::new(SUITES))]
    only: Vec<String>,
    #[arg(long, env = "SPREAD_SEED", default_value_t = SelftestOptions::default().seed)]
    seed: u64,
    /// Mutation knob: multiplies the rounding scale
    #[arg(long, default_value_t = 1.0)]
    tau_scale: f64,
    /// Mutation knob: grid constant of the star FPTAS
    #[arg(long, default_value_t = SelftestOptions::default().fptas_grid)]
    fptas_grid: f64,
}

/// Failure carrying its process exit code.
#[derive(Debug)]
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    fn input(error: anyhow::Error) -> Self {
        Failure { code: 2, error }
    }
    fn solver(error: anyhow::Error) -> Self {
        Failure { code: 3, error }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        let code = match error.downcast_ref::<Error>() {
            Some(Error::InsufficientAccuracy(_) | Error::NoFeasibleBarycenter | Error::DegenerateValuation) => 3,
            _ => 2,
        };
        Failure { code, error }
    }
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        anyhow::Error::from(error).into()
    }
}

type Outcome = std::result::Result<Value, Failure>;

struct Ctx {
    json: bool,
    opts: GraphOptions,
    numeric: Numeric,
}

impl Ctx {
    fn graph(&self, path: &Path) -> std::result::Result<WeightedGraph, Failure> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))
            .map_err(Failure::input)?;
        let g = parse_graph(&text, self.opts)
            .with_context(|| format!("parsing {}", path.display()))
            .map_err(Failure::input)?;
        if self.numeric == Numeric::Float && g.is_exact() {
            return Ok(WeightedGraph::from_f64(g.n(), g.edges(), g.pi().to_vec(), self.opts)?);
        }
        Ok(g)
    }
}

fn star(g: WeightedGraph) -> std::result::Result<StarGraph, Failure> {
    Ok(StarGraph::new(g)?)
}

fn tree(g: WeightedGraph) -> std::result::Result<TreeGraph, Failure> {
    Ok(TreeGraph::new(g)?)
}

fn write_json(path: &Path, value: &EmbeddingJson) -> std::result::Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::input(e.into()))?;
    std::fs::write(path, text + "\n")
        .with_context(|| format!("writing {}", path.display()))
        .map_err(Failure::input)
}

fn with_fields(report: &SolveReport, extra: &[(&str, Value)]) -> Value {
    let mut v = report.to_json();
    if let Value::Object(obj) = &mut v {
        for (k, x) in extra {
            obj.insert((*k).to_string(), x.clone());
        }
    }
    v
}

fn lambda_inf(ctx: &Ctx, a: &LambdaArgs) -> Outcome {
    let g = ctx.graph(&a.graph)?;
    match a.method {
        LambdaMethod::Oracle => {
            let iv = oracle_small(&g, a.max_n)?;
            Ok(with_fields(&iv.to_report(), &[("method", json!("oracle")), ("lower_bound", json_number(iv.lo))]))
        }
        LambdaMethod::StarClosed => {
            let s = star(g)?;
            let lb: f64 = star_lower_bound(&s)?;
            let r = star_exact(&s)?;
            Ok(with_fields(&r, &[("method", json!("star-closed")), ("lower_bound", json_number(lb))]))
        }
        LambdaMethod::StarFptas => {
            let s = star(g)?;
            let lb: f64 = star_lower_bound(&s)?;
            let r = star_fptas(&s, a.eps)?;
            let lb = lb.max(r.value / (1.0 + a.eps));
            Ok(with_fields(&r, &[("method", json!("star-fptas")), ("lower_bound", json_number(lb))]))
        }
    }
}

fn spread(ctx: &Ctx, a: &SpreadArgs) -> Outcome {
    let g = ctx.graph(&a.graph)?;
    let (name, r) = match a.method {
        SpreadMethod::AbsOracle => ("abs-oracle", abs_oracle(&g, a.max_n)?),
        SpreadMethod::StarExact => ("star-exact", star_spread_exact(&star(g)?)?),
        SpreadMethod::TreeFptas => ("tree-fptas", tree_spread_fptas(&tree(g)?, a.eps)?),
    };
    Ok(with_fields(&r, &[("method", json!(name))]))
}

fn mve2(ctx: &Ctx, a: &Mve2Args) -> Outcome {
    let t = tree(ctx.graph(&a.graph)?)?;
    let r = tree_mve2_value(&t)?;
    if let Some(path) = &a.embed_out {
        write_json(path, &tree_mve2_embed(&t)?.to_json())?;
    }
    Ok(r.to_json())
}

fn lift(ctx: &Ctx, a: &LiftArgs) -> Outcome {
    let g = ctx.graph(&a.graph)?;
    let r = lift_solve(&g, a.tol, a.max_iters)?;
    if let Some(path) = &a.out {
        write_json(path, &r.lift.to_json())?;
    }
    let out = json!({
        "objective": json_number(r.objective),
        "iterations": r.iterations,
        "converged": r.converged,
        "rank": r.lift.rank(1e-6),
        "max_edge_len2": json_number(r.lift.max_edge_len2()),
        "min_eigenvalue": json_number(r.lift.min_eigenvalue()),
    });
    if !r.converged {
        emit(ctx.json, &out);
        return Err(Failure::solver(anyhow!("lift did not converge within {} iterations", a.max_iters)));
    }
    Ok(out)
}

fn round(ctx: &Ctx, a: &RoundArgs) -> Outcome {
    let text = std::fs::read_to_string(&a.lift)
        .with_context(|| format!("reading {}", a.lift.display()))
        .map_err(Failure::input)?;
    let j = EmbeddingJson::parse(&text).map_err(|e| Failure::input(anyhow::Error::from(e).context("parsing lift")))?;
    let g = a.graph.as_deref().map(|p| ctx.graph(p)).transpose()?;
    let lift = GramLift::from_json(j, g.as_ref())?;
    let base = lift.objective();
    match a.method {
        RoundMethod::Pca => {
            let (emb, var) = pca_round(&lift, a.k)?;
            if let Some(path) = &a.out {
                write_json(path, &emb.to_json())?;
            }
            Ok(json!({
                "method": "pca",
                "k": a.k,
                "variance": json_number(var),
                "lift_variance": json_number(base),
                "var_ratio": json_number(var / base),
            }))
        }
        RoundMethod::Gaussian => {
            let seed = a.seed.ok_or_else(|| Failure::input(anyhow!("gaussian rounding needs --seed or SPREAD_SEED")))?;
            let (emb, rep) = gaussian_round(&lift, a.k, seed)?;
            if let Some(path) = &a.out {
                write_json(path, &emb.to_json())?;
            }
            let mut out = json!({
                "method": "gaussian",
                "k": a.k,
                "seed": seed,
                "tau": json_number(rep.tau),
                "lift_variance": json_number(base),
                "var_ratio": json_number(rep.var_ratio),
                "violations": rep.violations,
                "worst_stretch": json_number(rep.worst_stretch),
                "lipschitz": rep.lipschitz,
                "retained": rep.retained,
            });
            if a.trials > 1 {
                let s = gaussian_trials(&lift, a.k, seed, a.trials, None)?;
                out["trials"] = json!({
                    "count": s.trials,
                    "mean_var_ratio": json_number(s.mean_var_ratio),
                    "var_ratio_std_err": json_number(s.var_ratio_std_err),
                    "predicted_var_ratio": json_number(a.k as f64 / s.tau),
                    "lipschitz_failure_rate": json_number(s.lipschitz_failure_rate),
                    "retention_rate": json_number(s.retention_rate),
                });
            }
            Ok(out)
        }
    }
}

fn vexp(ctx: &Ctx, a: &VexpArgs) -> Outcome {
    let g = ctx.graph(&a.graph)?;
    let (name, r) = match a.method {
        VexpMethod::Brute => ("brute", vexp_bruteforce(&g, a.max_n)?),
        VexpMethod::TreeDp => ("tree-dp", vexp_tree_uniform(&tree(g)?)?),
        VexpMethod::Star => ("star", vexp_star_weighted(&star(g)?)?),
    };
    Ok(with_fields(&r, &[("method", json!(name))]))
}

fn instance(p: &str, beta: &str) -> std::result::Result<(PartitionInstance, isoconst::Rational), Failure> {
    let inst = PartitionInstance::parse(p).map_err(|e| Failure::input(anyhow::Error::from(e).context("--p")))?;
    let beta = parse_beta(beta).map_err(|e| Failure::input(anyhow::Error::from(e).context("--beta")))?;
    Ok((inst, beta))
}

fn reduce(ctx: &Ctx, a: &ReduceArgs) -> Outcome {
    let (inst, beta) = instance(&a.p, &a.beta)?;
    let s = match a.target {
        Target::Lambda => to_lambda_star(&inst, &beta)?,
        Target::Spread => to_spread_star(&inst, &beta)?,
        Target::Vexp => to_vexp_star(&inst, &beta)?,
    };
    let text = s.graph().to_text();
    let mut out = json!({
        "target": a.target.name(),
        "p": inst.p,
        "beta": isoconst::scalar::format_rational(&beta),
        "n": s.graph().n(),
    });
    match &a.emit {
        Some(path) => {
            std::fs::write(path, &text)
                .with_context(|| format!("writing {}", path.display()))
                .map_err(Failure::input)?;
            out["emitted"] = json!(path.display().to_string());
        }
        None if ctx.json => out["graph"] = json!(text),
        None => {
            let _ = std::io::stdout().lock().write_all(text.as_bytes());
            return Ok(Value::Null);
        }
    }
    Ok(out)
}

fn gapcheck(a: &GapArgs) -> Outcome {
    let (inst, beta) = instance(&a.p, &a.beta)?;
    let c = match a.target {
        Target::Lambda => lambda_gap_check(&inst, &beta)?,
        Target::Spread => spread_gap_check(&inst, &beta)?,
        Target::Vexp => vexp_gap_check(&inst, &beta)?,
    };
    Ok(c.to_json())
}

fn selftest(ctx: &Ctx, a: &SelftestArgs) -> Outcome {
    let opts = SelftestOptions { tau_scale: a.tau_scale, fptas_grid: a.fptas_grid, seed: a.seed };
    let only = (!a.only.is_empty()).then_some(a.only.as_slice());
    let results = run_selftest(opts, only);
    if !ctx.json {
        for r in &results {
            let mark = if r.passed { "PASS" } else { "FAIL" };
            let line = format!("{mark} {:<14} {:>7} ms  {}\n", r.name, r.millis, r.detail);
            let _ = std::io::stdout().lock().write_all(line.as_bytes());
        }
    }
    let failed: Vec<&str> = results.iter().filter(|r| !r.passed).map(|r| r.name).collect();
    let out = json!({ "suites": results.iter().map(|r| r.to_json()).collect::<Vec<_>>(), "passed": failed.is_empty() });
    if !failed.is_empty() {
        if ctx.json {
            emit(true, &out);
        }
        return Err(Failure { code: 1, error: anyhow!("failing suites: {}", failed.join(", ")) });
    }
    Ok(if ctx.json { out } else { Value::Null })
}

fn human(value: &Value, out: &mut String) {
    match value {
        Value::Object(obj) => text_object(obj, "", out),
        Value::Null => {}
        other => out.push_str(&format!("{other}\n")),
    }
}

fn text_object(obj: &Map<String, Value>, prefix: &str, out: &mut String) {
    for (k, v) in obj {
        match v {
            Value::Object(inner) => text_object(inner, &format!("{prefix}{k}."), out),
            Value::String(s) => out.push_str(&format!("{prefix}{k}: {s}\n")),
            other => out.push_str(&format!("{prefix}{k}: {other}\n")),
        }
    }
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(json: bool, value: &Value) {
    let mut text = String::new();
    if json {
        text = serde_json::to_string_pretty(value).expect("serializable") + "\n";
    } else {
        human(value, &mut text);
    }
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn run(cli: &Cli) -> Outcome {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Failure::input(anyhow!("--threads: {e}")))?;
    }
    let ctx = Ctx {
        json: cli.json,
        opts: GraphOptions { allow_zero_mass: cli.allow_zero_mass },
        numeric: cli.numeric,
    };
    match &cli.command {
        Command::LambdaInf(a) => lambda_inf(&ctx, a),
        Command::Spread(a) => spread(&ctx, a),
        Command::Mve2(a) => mve2(&ctx, a),
        Command::Lift(a) => lift(&ctx, a),
        Command::Round(a) => round(&ctx, a),
        Command::Vexp(a) => vexp(&ctx, a),
        Command::Reduce(a) => reduce(&ctx, a),
        Command::Gapcheck(a) => gapcheck(a),
        Command::Selftest(a) => selftest(&ctx, a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(value) => {
            emit(cli.json, &value);
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
