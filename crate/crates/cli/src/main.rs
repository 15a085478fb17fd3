use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use cqaoa::analysis::{compare_mixers, mixer_report, MixerReport};
use cqaoa::bits::BitString;
use cqaoa::engine::{InitialState, MixerChoice, PreparedRun, RunConfig, RunResult};
use cqaoa::problems::ProblemInstance;
use serde::Serialize;

mod document;

use document::{ResultDocument, SCHEMA_VERSION};

#[derive(Parser)]
#[command(name = "cqaoa", version, about = "Exact QAOA simulation with constraint-encoding mixers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimize one mixer at one depth and print a JSON result document.
    Run(RunArgs),
    /// Sweep mixers and depths and print a CSV table.
    Compare(CompareArgs),
    /// List the optimal feasible strings by exhaustive search.
    Brute(BruteArgs),
    /// Print the mixer's feasible subgraph as an edge list.
    Graph(GraphArgs),
}

#[derive(Args)]
struct Common {
    /// Problem JSON file.
    #[arg(long)]
    problem: PathBuf,
    /// Write output here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct Tuning {
    #[arg(long, value_parser = parse_init)]
    init: Option<InitialState>,
    /// Star center as a bit string, highest qubit first.
    #[arg(long, value_parser = parse_bits)]
    star_center: Option<BitString>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 20)]
    restarts: usize,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = 5000)]
    max_evals: usize,
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_parser = parse_mixer)]
    mixer: MixerChoice,
    #[arg(long)]
    p: usize,
    #[command(flatten)]
    tuning: Tuning,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    common: Common,
    /// Comma-separated mixer names.
    #[arg(long, value_delimiter = ',', value_parser = parse_mixer, required = true)]
    mixers: Vec<MixerChoice>,
    /// Inclusive depth range `a..b`.
    #[arg(long, value_parser = parse_range, conflicts_with = "p")]
    p_range: Option<(usize, usize)>,
    #[arg(long)]
    p: Option<usize>,
    #[command(flatten)]
    tuning: Tuning,
}

#[derive(Args)]
struct BruteArgs {
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct GraphArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_parser = parse_mixer)]
    mixer: MixerChoice,
    #[arg(long, value_parser = parse_bits)]
    star_center: Option<BitString>,
}

fn parse_mixer(s: &str) -> Result<MixerChoice, String> {
    MixerChoice::parse(s).map_err(|e| e.to_string())
}

fn parse_init(s: &str) -> Result<InitialState, String> {
    match s {
        "uniform-feasible" => Ok(InitialState::UniformFeasible),
        "trivial" => Ok(InitialState::TrivialBasis),
        "uniform-all" => Ok(InitialState::UniformAll),
        _ => Err(format!("unknown initial state {s:?} (uniform-feasible, trivial, uniform-all)")),
    }
}

fn parse_bits(s: &str) -> Result<BitString, String> {
    BitString::parse(s).map_err(|e| e.to_string())
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected a..b, got {s:?}"))?;
    let parse = |v: &str| v.trim().parse::<usize>().map_err(|e| format!("{v:?}: {e}"));
    let (a, b) = (parse(a)?, parse(b)?);
    if a > b {
        return Err(format!("empty range {s:?}"));
    }
    Ok((a, b))
}

/// Exit status for an error chain: 2 schema or argument violation, 3 inapplicable
/// mixer, 4 enumeration cap exceeded, 1 otherwise.
fn exit_code(err: &anyhow::Error) -> u8 {
    if err.chain().any(|e| e.is::<serde_json::Error>()) {
        return 2;
    }
    match err.chain().find_map(|e| e.downcast_ref::<cqaoa::Error>()) {
        Some(cqaoa::Error::MixerNotApplicable(_) | cqaoa::Error::StarCenterInfeasible(_)) => 3,
        Some(cqaoa::Error::EnumerationCap { .. }) => 4,
        Some(
            cqaoa::Error::InvalidInstance(_)
            | cqaoa::Error::InvalidSchedule(_)
            | cqaoa::Error::InvalidConfig(_)
            | cqaoa::Error::DimensionMismatch { .. }
            | cqaoa::Error::IndexOutOfRange { .. },
        ) => 2,
        _ => 1,
    }
}

fn load_problem(path: &Path) -> anyhow::Result<ProblemInstance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let problem: ProblemInstance =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    problem.check()?;
    Ok(problem)
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(stdout.flush()?)
        }
    }
}

fn run_config(p: usize, mixer: MixerChoice, t: &Tuning) -> RunConfig {
    RunConfig {
        initial_state: t.init,
        restarts: t.restarts,
        seed: t.seed,
        tolerance: t.tol,
        max_evaluations: t.max_evals,
        star_center: t.star_center,
        threads: t.threads,
        ..RunConfig::new(p, mixer)
    }
}

fn cmd_run(args: RunArgs) -> anyhow::Result<()> {
    let started = Instant::now();
    let problem = load_problem(&args.common.problem)?;
    let config = run_config(args.p, args.mixer, &args.tuning);
    let prepared = PreparedRun::<f64>::new(&problem, &config)?;
    let report = mixer_report(&prepared.mixer, &prepared.omega)?;
    let result: RunResult = cqaoa::engine::optimize_prepared(&prepared, &config)?;
    let doc = ResultDocument::new(&problem, &config, &result, report, started.elapsed().as_secs_f64());
    emit(args.common.out.as_deref(), &(serde_json::to_string_pretty(&doc)? + "\n"))
}

fn cmd_compare(args: CompareArgs) -> anyhow::Result<()> {
    let problem = load_problem(&args.common.problem)?;
    let ps: Vec<usize> = match (args.p_range, args.p) {
        (Some((a, b)), None) => (a..=b).collect(),
        (None, Some(p)) => vec![p],
        _ => bail!(cqaoa::Error::InvalidConfig("give --p or --p-range".into())),
    };
    if ps.contains(&0) {
        bail!(cqaoa::Error::InvalidSchedule("p must be at least 1".into()));
    }
    let config = run_config(ps[0], args.mixers[0], &args.tuning);
    // Cap errors are per-row in the table; surface them here so the exit code is 4.
    problem.feasible_set_with_cap(config.enumeration_cap)?;
    let rows = compare_mixers::<f64>(&problem, &args.mixers, &ps, &config)?;

    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "mixer",
        "p",
        "regularity",
        "optimal_probability",
        "expectation",
        "infeasible_probability",
        "seed",
        "error",
    ])?;
    let opt = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
    for r in rows {
        w.write_record([
            r.mixer.name().to_string(),
            r.p.to_string(),
            r.regularity.map(|v| v.to_string()).unwrap_or_default(),
            opt(r.optimal_probability),
            opt(r.expectation),
            opt(r.infeasible_probability),
            r.seed.to_string(),
            r.error.unwrap_or_default(),
        ])?;
    }
    let text = String::from_utf8(w.into_inner().map_err(|e| anyhow!("{e}"))?)?;
    emit(args.common.out.as_deref(), &text)
}

#[derive(Serialize)]
struct BruteOutput {
    schema_version: u32,
    problem: &'static str,
    feasible_count: usize,
    optima: Vec<Optimum>,
}

#[derive(Serialize)]
struct Optimum {
    bits: String,
    quality: f64,
}

fn cmd_brute(args: BruteArgs) -> anyhow::Result<()> {
    let problem = load_problem(&args.common.problem)?;
    let n = problem.qubit_count();
    let omega = problem.feasible_set()?;
    let optima = problem
        .brute_force_optima()?
        .into_iter()
        .map(|x| Optimum { bits: x.to_bits(n), quality: problem.quality(x) })
        .collect();
    let out = BruteOutput { schema_version: SCHEMA_VERSION, problem: problem.name(), feasible_count: omega.len(), optima };
    emit(args.common.out.as_deref(), &(serde_json::to_string_pretty(&out)? + "\n"))
}

fn graph_header(problem: &ProblemInstance, mixer: MixerChoice, r: &MixerReport) -> String {
    let histogram: Vec<String> = r.degree_histogram.iter().map(|(d, c)| format!("{d}:{c}")).collect();
    let sizes: Vec<String> = r.component_sizes.iter().map(|s| s.to_string()).collect();
    format!(
        "# problem {}\n# mixer {}\n# nodes {} edges {}\n# degree min {} max {} regularity {}\n# degree histogram {}\n# components {} sizes {}\n",
        problem.name(),
        mixer.name(),
        r.nodes,
        r.edges,
        r.min_degree,
        r.max_degree,
        r.regularity,
        histogram.join(" "),
        r.components,
        sizes.join(" "),
    )
}

fn cmd_graph(args: GraphArgs) -> anyhow::Result<()> {
    let problem = load_problem(&args.common.problem)?;
    let config = RunConfig { star_center: args.star_center, ..RunConfig::new(1, args.mixer) };
    let prepared = PreparedRun::<f64>::new(&problem, &config)?;
    let report = mixer_report(&prepared.mixer, &prepared.omega)?;
    let n = problem.qubit_count();
    let mut text = graph_header(&problem, args.mixer, &report);
    for (x, y) in prepared.mixer.feasible_edges(&prepared.omega) {
        text.push_str(&format!("{} {}\n", x.display(n), y.display(n)));
    }
    emit(args.common.out.as_deref(), &text)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Brute(a) => cmd_brute(a),
        Command::Graph(a) => cmd_graph(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_ranges() {
        assert_eq!(parse_range("3..5"), Ok((3, 5)));
        assert_eq!(parse_range("4..4"), Ok((4, 4)));
        assert!(parse_range("5..3").is_err());
        assert!(parse_range("3-5").is_err());
    }

    #[test]
    fn maps_errors_to_exit_codes() {
        let code = |e: cqaoa::Error| exit_code(&anyhow::Error::from(e));
        assert_eq!(code(cqaoa::Error::MixerNotApplicable("x".into())), 3);
        assert_eq!(code(cqaoa::Error::EnumerationCap { n: 30, cap: 20 }), 4);
        assert_eq!(code(cqaoa::Error::InvalidSchedule("p".into())), 2);
        assert_eq!(code(cqaoa::Error::NoFeasibleSolution), 1);
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
