//! smot: build knowledge state machines from solved instances, run
//! machine-guided searches against them, and reproduce the subsample /
//! noise sweeps.
//!
//! Exit status is 0 only when every episode completed without a backend
//! abort (and, for `selfcheck`, when every suite passed).

use std::fs::File;
use std::io::{BufReader, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use smot::client::AdapterConfig;
use smot::experiment::{
    build_machine, run_ablation, run_experiment, run_noise, selfcheck, BackendKind, DomainKind,
    ExperimentConfig, Mode, Resources,
};
use smot::game24;
use smot::sm::KnowledgeStateMachine;
use smot::taxi::{parse_scenarios, GridMap};
use smot::Strategy;

#[derive(Parser)]
#[command(name = "smot", version, about = "Experience-guided search over pluggable domains")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a knowledge state machine and write it to a file.
    BuildSm(BuildArgs),
    /// Run an experiment and report per-episode metrics.
    Run(RunArgs),
    /// Re-run an experiment against subsampled machines.
    Ablate(SweepArgs),
    /// Re-run an experiment against noise-injected machines.
    Noise(SweepArgs),
    /// Run the built-in oracle-consistency suites.
    Selfcheck(SelfcheckArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Benchmark domain: game24 or taxi.
    #[arg(long, default_value = "game24")]
    domain: String,
    /// Custom 24-game problem file (defaults to the bundled corpus).
    #[arg(long)]
    problems: Option<PathBuf>,
    /// Taxi map override file.
    #[arg(long)]
    map: Option<PathBuf>,
    /// Taxi scenario override file.
    #[arg(long)]
    scenarios: Option<PathBuf>,
    /// Instance selection: `all`, `N`, `A-B`, or a comma list.
    #[arg(long, default_value = "all")]
    instances: String,
}

#[derive(Args)]
struct BuildArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Where to write the machine file.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BackendArgs {
    /// Backend: oracle, mock, or completion.
    #[arg(long, default_value = "oracle")]
    backend: String,
    /// Chat-completion endpoint URL (completion backend).
    #[arg(long)]
    endpoint: Option<String>,
    /// Model name for the completion backend.
    #[arg(long, default_value = "gpt-3.5-turbo")]
    model: String,
    /// Sampling temperature for the completion backend.
    #[arg(long, default_value_t = 0.7)]
    temperature: f64,
    /// Per-episode request budget for the completion backend.
    #[arg(long, default_value_t = 200)]
    budget: u64,
    /// Request timeout in seconds for the completion backend.
    #[arg(long, default_value_t = 30)]
    timeout: u64,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    backend: BackendArgs,
    /// Reasoning mode: smot, tot, or cot.
    #[arg(long, default_value = "smot")]
    mode: String,
    /// Machine file (required for mode smot).
    #[arg(long)]
    sm: Option<PathBuf>,
    /// Search strategy: bfs or dfs.
    #[arg(long, default_value = "bfs")]
    strategy: String,
    /// Step limit (searches) / action cap (taxi).
    #[arg(long)]
    steps: Option<usize>,
    /// Breadth limit.
    #[arg(long)]
    breadth: Option<usize>,
    /// Repetitions per instance.
    #[arg(long)]
    reps: Option<u32>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Parallel episode workers.
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Write machine-readable rows here (stdout otherwise).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Comma-separated fractions, e.g. 0.01,0.05,0.2,0.6,1.0.
    #[arg(long)]
    fractions: String,
    /// Comma-separated seeds for the subsample/noise draw.
    #[arg(long, default_value = "0,1,2")]
    seeds: String,
}

#[derive(Args)]
struct SelfcheckArgs {
    /// Machine file to validate before the suites run.
    #[arg(long)]
    sm: Option<PathBuf>,
}

fn parse_domain(s: &str) -> Result<DomainKind> {
    DomainKind::parse(s).map_err(Into::into)
}

fn parse_instances(spec: &str, all: &[u32]) -> Result<Vec<u32>> {
    let spec = spec.trim();
    if spec == "all" {
        return Ok(all.to_vec());
    }
    let mut out = Vec::new();
    for part in spec.split(',') {
        let part = part.trim();
        if let Some((a, b)) = part.split_once('-') {
            let a: u32 = a.trim().parse().context("bad instance range start")?;
            let b: u32 = b.trim().parse().context("bad instance range end")?;
            if a > b {
                bail!("instance range {a}-{b} is reversed");
            }
            out.extend(a..=b);
        } else {
            out.push(part.parse().context("bad instance number")?);
        }
    }
    Ok(out)
}

fn parse_list<T: std::str::FromStr>(spec: &str, what: &str) -> Result<Vec<T>>
where
    T::Err: std::error::Error + Send + Sync + 'static,
{
    spec.split(',')
        .map(|p| p.trim().parse::<T>().with_context(|| format!("bad {what} `{p}`")))
        .collect()
}

fn load_resources(common: &CommonArgs, machine: KnowledgeStateMachine) -> Result<Resources> {
    let mut res = Resources::with_defaults(machine);
    if let Some(path) = &common.problems {
        let file = File::open(path).with_context(|| format!("open {}", path.display()))?;
        res.problems = std::sync::Arc::new(game24::load_problem_set(BufReader::new(file))?);
    }
    if let Some(path) = &common.map {
        let file = File::open(path).with_context(|| format!("open {}", path.display()))?;
        res.map = GridMap::parse(BufReader::new(file))?;
    }
    if let Some(path) = &common.scenarios {
        let file = File::open(path).with_context(|| format!("open {}", path.display()))?;
        res.scenarios = parse_scenarios(BufReader::new(file))?;
    }
    Ok(res)
}

fn build_config(args: &RunArgs, res: &Resources) -> Result<(ExperimentConfig, Resources)> {
    let domain = parse_domain(&args.common.domain)?;
    let mode = Mode::parse(&args.mode)?;
    let backend = BackendKind::parse(&args.backend.backend)?;
    let mut cfg = ExperimentConfig::new(domain, mode, backend);
    cfg.strategy = match args.strategy.as_str() {
        "bfs" => Strategy::Bfs,
        "dfs" => Strategy::Dfs,
        other => bail!("unknown strategy `{other}` (expected bfs or dfs)"),
    };
    if let Some(steps) = args.steps {
        cfg.steps = steps;
    }
    if let Some(breadth) = args.breadth {
        cfg.breadth = breadth;
    }
    if let Some(reps) = args.reps {
        cfg.repetitions = reps;
    }
    cfg.seed = args.seed;
    cfg.workers = args.workers;
    cfg.instances = parse_instances(&args.common.instances, &res.all_instances(domain))?;
    let mut res = res.clone();
    if backend == BackendKind::Completion {
        let endpoint = args
            .backend
            .endpoint
            .clone()
            .context("completion backend needs --endpoint")?;
        let mut adapter = AdapterConfig::new(endpoint, args.backend.model.clone());
        adapter.temperature = args.backend.temperature;
        adapter.budget = args.backend.budget;
        adapter.timeout = Duration::from_secs(args.backend.timeout);
        res.adapter = Some(adapter);
    }
    Ok((cfg, res))
}

fn load_machine(args: &RunArgs) -> Result<(KnowledgeStateMachine, String)> {
    match (&args.sm, Mode::parse(&args.mode)?) {
        (Some(path), _) => {
            let sm = KnowledgeStateMachine::load_from_path(path)
                .with_context(|| format!("load machine {}", path.display()))?;
            Ok((sm, path.display().to_string()))
        }
        (None, Mode::Smot) => bail!("mode smot needs --sm <machine file>"),
        (None, _) => Ok((KnowledgeStateMachine::new(), "none".to_string())),
    }
}

fn emit(human: String, rows: String, out: Option<&PathBuf>) -> Result<()> {
    print!("{human}");
    match out {
        Some(path) => {
            let mut f = File::create(path).with_context(|| format!("create {}", path.display()))?;
            f.write_all(rows.as_bytes())?;
            println!("rows written to {}", path.display());
        }
        None => print!("{rows}"),
    }
    Ok(())
}

fn cmd_build_sm(args: BuildArgs) -> Result<ExitCode> {
    let domain = parse_domain(&args.common.domain)?;
    let res = load_resources(&args.common, KnowledgeStateMachine::new())?;
    let instances = parse_instances(&args.common.instances, &res.all_instances(domain))?;
    let sm = build_machine(domain, &res, &instances)?;
    sm.save_to_path(&args.out)
        .with_context(|| format!("write {}", args.out.display()))?;
    println!(
        "{} states, {} transitions written to {}",
        sm.state_count(),
        sm.transition_count(),
        args.out.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_run(args: RunArgs) -> Result<ExitCode> {
    let (machine, label) = load_machine(&args)?;
    let res = load_resources(&args.common, machine)?;
    let (mut cfg, res) = build_config(&args, &res)?;
    cfg.machine_label = label;
    let report = run_experiment(&cfg, &res)?;
    let aborted = report.aborted();
    emit(report.render_human(), report.render_rows(), args.out.as_ref())?;
    Ok(if aborted {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    })
}

fn cmd_sweep(args: SweepArgs, noise: bool) -> Result<ExitCode> {
    let (machine, label) = load_machine(&args.run)?;
    if machine.is_empty() {
        bail!("sweeps need a base machine (--sm)");
    }
    let res = load_resources(&args.run.common, machine)?;
    let (mut cfg, res) = build_config(&args.run, &res)?;
    cfg.machine_label = label;
    let fractions: Vec<f64> = parse_list(&args.fractions, "fraction")?;
    let seeds: Vec<u64> = parse_list(&args.seeds, "seed")?;
    let report = if noise {
        run_noise(&cfg, &res, &fractions, &seeds)?
    } else {
        run_ablation(&cfg, &res, &fractions, &seeds)?
    };
    let aborted = report.aborted();
    emit(report.render_human(), report.render_rows(), args.run.out.as_ref())?;
    Ok(if aborted {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    })
}

fn cmd_selfcheck(args: SelfcheckArgs) -> Result<ExitCode> {
    let outcome = selfcheck(args.sm.as_deref());
    for suite in &outcome.suites {
        match &suite.outcome {
            Ok(msg) => println!("{:<28} PASS  {msg}", suite.name),
            Err(msg) => println!("{:<28} FAIL  {msg}", suite.name),
        }
    }
    Ok(if outcome.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::BuildSm(args) => cmd_build_sm(args),
        Cmd::Run(args) => cmd_run(args),
        Cmd::Ablate(args) => cmd_sweep(args, false),
        Cmd::Noise(args) => cmd_sweep(args, true),
        Cmd::Selfcheck(args) => cmd_selfcheck(args),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
