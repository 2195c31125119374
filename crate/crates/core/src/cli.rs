//! Command-line front end. JSON goes to stdout or `--out`; human tables go to stderr.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::config::{append_slacks, preset, run, ExperimentConfig, RunReport, VERSION};
use crate::constants::{estimate, sigma, EstimateOptions, SetPairOptions, Side};
use crate::error::{Error, Result};
use crate::estimate::ConstantName;
use crate::norms::{dual_norm_polyhedral, effective_window, norm, EngineRegistry, NormEngine};
use crate::sampler::SamplerSpec;
use crate::scalar::{ArithmeticMode, Rational, Scalar};
use crate::tga::{greedy_choices, TiePolicy};
use crate::vector::SparseVector;
use crate::verify::{filter_claims, find_claim, reproduce_examples, run_claim_in, CheckReport, ClaimOptions, CLAIMS, OUT_OF_SCOPE};
use crate::weights::WeightSequence;

const SEED_ENV: &str = "GREEDY_LAB_SEED";

#[derive(Debug, Parser)]
#[command(name = "greedy-lab", version, about = "Greedy-algorithm constants on finite windows of sequence spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate ‖x‖.
    Norm(NormArgs),
    /// Exact dual norm on a spreading space, with primal and cover certificates.
    Dual(DualArgs),
    /// Greedy sets and approximants.
    Tga {
        #[command(subcommand)]
        command: TgaCommand,
    },
    /// σ̃^L or σ̃^R for every legal greedy set of size m.
    Sigma(SigmaArgs),
    /// Constant estimation.
    Constants {
        #[command(subcommand)]
        command: ConstantsCommand,
    },
    /// Claim checks and the reference values.
    Verify {
        #[command(subcommand)]
        command: VerifyCommand,
    },
    /// Print the claim registry.
    ListClaims {
        /// Claim id, alias or group.
        #[arg(long)]
        filter: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Run a configured experiment and write one JSON report.
    Run(RunArgs),
}

#[derive(Debug, Args)]
pub struct SpaceArgs {
    /// e.g. lp:2, lp:inf, spreading:3, partial_sum@12, modular@10, normalized:partial_sum@8
    #[arg(long)]
    pub space: String,
    #[arg(long, default_value = "exact")]
    pub mode: ArithmeticMode,
}

#[derive(Debug, Args)]
pub struct NormArgs {
    #[command(flatten)]
    pub space: SpaceArgs,
    /// `index:value` pairs, e.g. 1:3,2:-5/2
    #[arg(long, allow_hyphen_values = true)]
    pub vector: String,
}

#[derive(Debug, Args)]
pub struct DualArgs {
    #[arg(long)]
    pub space: String,
    #[arg(long, allow_hyphen_values = true)]
    pub vector: String,
}

#[derive(Debug, Subcommand)]
pub enum TgaCommand {
    Run {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long, allow_hyphen_values = true)]
        vector: String,
        #[arg(long)]
        m: usize,
        /// lowest-index or enumerate
        #[arg(long, default_value = "lowest-index")]
        ties: TiePolicy,
    },
}

#[derive(Debug, Args)]
pub struct SigmaArgs {
    #[command(flatten)]
    pub space: SpaceArgs,
    #[arg(long, default_value = "ones")]
    pub weight: String,
    #[arg(long, allow_hyphen_values = true)]
    pub vector: String,
    #[arg(long)]
    pub m: usize,
    #[arg(long, default_value = "left")]
    pub side: Side,
    #[arg(long)]
    pub window: Option<usize>,
    #[arg(long, default_value = "enumerate-all")]
    pub ties: TiePolicy,
}

#[derive(Debug, Subcommand)]
pub enum ConstantsCommand {
    Estimate {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long, default_value = "ones")]
        weight: String,
        /// C_q, C_p, C_rp, C_a, C_la, C_ra, K_b, democracy, w-democracy, conservative, ...
        #[arg(long)]
        name: ConstantName,
        #[arg(long)]
        window: Option<usize>,
        #[arg(long, env = SEED_ENV, default_value_t = 0)]
        seed: u64,
        /// Multiplies every sampler budget.
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
    },
}

#[derive(Debug, Args)]
pub struct ClaimArgs {
    #[arg(long)]
    pub id: String,
    #[command(flatten)]
    pub space: SpaceArgs,
    #[arg(long)]
    pub window: Option<usize>,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, env = SEED_ENV, default_value_t = 0)]
    pub seed: u64,
    /// Defaults to the claim's own weight.
    #[arg(long)]
    pub weight: Option<String>,
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Per-instance slacks.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum VerifyCommand {
    Claim(ClaimArgs),
    Examples {
        #[arg(long, env = SEED_ENV, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2000)]
        modular_samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long, conflicts_with = "config")]
    pub preset: Option<String>,
    /// JSON file mirroring the experiment configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Claim id, alias, group or study name; replaces the configured selection.
    #[arg(long = "claim")]
    pub claims: Vec<String>,
    /// Replaces the configured spaces.
    #[arg(long = "space")]
    pub spaces: Vec<String>,
    #[arg(long)]
    pub window: Option<usize>,
    #[arg(long)]
    pub weight: Option<String>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, env = SEED_ENV)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub mode: Option<ArithmeticMode>,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(2)
        }
    }
}

fn engine(space: &str) -> Result<Box<dyn NormEngine>> {
    EngineRegistry::with_builtins().parse(space)
}

/// The arithmetic actually used: exact only where the engine supports it.
pub fn resolve_mode(mode: ArithmeticMode, engine: &dyn NormEngine) -> ArithmeticMode {
    match mode {
        ArithmeticMode::Exact if engine.supports_exact() => ArithmeticMode::Exact,
        _ => ArithmeticMode::Float,
    }
}

fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{}", text),
    }
    Ok(())
}

fn dispatch(cmd: Command) -> Result<bool> {
    match cmd {
        Command::Norm(a) => {
            let e = engine(&a.space.space)?;
            let mode = resolve_mode(a.space.mode, e.as_ref());
            let value = match mode {
                ArithmeticMode::Exact => norm(e.as_ref(), &SparseVector::<Rational>::decode(&a.vector)?)?.encode(),
                ArithmeticMode::Float => norm(e.as_ref(), &SparseVector::<f64>::decode(&a.vector)?)?.encode(),
            };
            emit(&json!({ "space": e.name(), "vector": a.vector, "mode": mode, "norm": value }), None)?;
            Ok(true)
        }
        Command::Dual(a) => {
            let e = engine(&a.space)?;
            let s = e.as_spreading().ok_or_else(|| Error::InvalidConfig {
                field: "space".into(),
                reason: format!("the exact dual is implemented for spreading spaces, not `{}`", e.name()),
            })?;
            let sol = dual_norm_polyhedral(s, &SparseVector::decode(&a.vector)?)?;
            emit(&json!({ "space": e.name(), "vector": a.vector, "dual": sol }), None)?;
            Ok(true)
        }
        Command::Tga {
            command: TgaCommand::Run { space, vector, m, ties },
        } => {
            let e = engine(&space.space)?;
            let record = match resolve_mode(space.mode, e.as_ref()) {
                ArithmeticMode::Exact => tga_record::<Rational>(e.as_ref(), &vector, m, ties)?,
                ArithmeticMode::Float => tga_record::<f64>(e.as_ref(), &vector, m, ties)?,
            };
            emit(&record, None)?;
            Ok(true)
        }
        Command::Sigma(a) => {
            let e = engine(&a.space.space)?;
            let w = WeightSequence::parse(&a.weight)?;
            let window = effective_window(e.as_ref(), a.window);
            let outcomes = match resolve_mode(a.space.mode, e.as_ref()) {
                ArithmeticMode::Exact => serde_json::to_value(sigma(e.as_ref(), &w, &SparseVector::<Rational>::decode(&a.vector)?, a.m, a.side, window, a.ties)?)?,
                ArithmeticMode::Float => serde_json::to_value(sigma(e.as_ref(), &w, &SparseVector::<f64>::decode(&a.vector)?, a.m, a.side, window, a.ties)?)?,
            };
            emit(&json!({ "space": e.name(), "weight": w.describe(), "vector": a.vector, "m": a.m, "side": a.side, "outcomes": outcomes }), None)?;
            Ok(true)
        }
        Command::Constants {
            command: ConstantsCommand::Estimate { space, weight, name, window, seed, scale },
        } => {
            let e = engine(&space.space)?;
            let w = WeightSequence::parse(&weight)?;
            let opts = EstimateOptions {
                window,
                search_window: window.or(EstimateOptions::default().search_window),
                sampler: SamplerSpec::with_seed(seed).scaled(scale),
                set_pairs: SetPairOptions {
                    seed,
                    ..SetPairOptions::default()
                },
            };
            let record = match resolve_mode(space.mode, e.as_ref()) {
                ArithmeticMode::Exact => estimate::<Rational>(name, e.as_ref(), &w, &opts)?.record(),
                ArithmeticMode::Float => estimate::<f64>(name, e.as_ref(), &w, &opts)?.record(),
            };
            emit(&record, None)?;
            Ok(true)
        }
        Command::Verify {
            command: VerifyCommand::Claim(a),
        } => verify_claim(a),
        Command::Verify {
            command: VerifyCommand::Examples { seed, modular_samples, out },
        } => {
            let report = reproduce_examples(seed, modular_samples)?;
            for c in &report.checks {
                eprintln!(
                    "{:<6} {:<16} n={:<2} {:<28} {} {:<6} computed {}",
                    if c.passed { "ok" } else { "FAIL" },
                    c.space,
                    c.n,
                    c.quantity,
                    c.relation,
                    c.expected,
                    c.computed
                );
            }
            emit(&report, out.as_deref())?;
            Ok(report.passed)
        }
        Command::ListClaims { filter, json } => {
            let claims = filter_claims(filter.as_deref());
            if json {
                let rows: Vec<_> = claims
                    .iter()
                    .map(|c| json!({ "id": c.id, "aliases": c.aliases, "group": c.group, "statement": c.statement }))
                    .collect();
                emit(&rows, None)?;
            } else {
                println!("{:<7} {:<17} {:<16} statement", "id", "group", "aliases");
                for c in claims {
                    println!("{:<7} {:<17} {:<16} {}", c.id, c.group, c.aliases.join(","), c.statement);
                }
                if filter.is_none() {
                    println!();
                    println!("not checked:");
                    for o in OUT_OF_SCOPE {
                        println!("{:<21} {} ({})", o.id, o.statement, o.reason);
                    }
                }
            }
            Ok(true)
        }
        Command::Run(a) => run_command(a),
    }
}

#[derive(Serialize)]
struct GreedyChoice<'a> {
    lambda: String,
    alpha: Option<usize>,
    beta: Option<usize>,
    approximant: String,
    residual_norm: &'a str,
}

/// Greedy sets, approximants and residual norms of `vector` for one `m`, as reported by `tga run`.
pub fn tga_record<S: Scalar>(engine: &dyn NormEngine, vector: &str, m: usize, ties: TiePolicy) -> Result<serde_json::Value> {
    let x = SparseVector::<S>::decode(vector)?;
    let steps = greedy_choices(&x, m, ties)?;
    let residuals: Vec<String> = steps
        .iter()
        .map(|s| norm(engine, &x.sub(&s.approximant)).map(|v| v.encode()))
        .collect::<Result<_>>()?;
    let choices: Vec<GreedyChoice> = steps
        .iter()
        .zip(&residuals)
        .map(|(s, r)| GreedyChoice {
            lambda: s.lambda.to_string(),
            alpha: s.alpha,
            beta: s.beta,
            approximant: s.approximant.encode(),
            residual_norm: r,
        })
        .collect();
    Ok(json!({ "space": engine.name(), "vector": x.encode(), "m": m, "ties": ties, "mode": S::MODE, "choices": choices }))
}

#[derive(Serialize)]
struct ClaimEnvelope<'a> {
    #[serde(flatten)]
    report: &'a CheckReport,
    env: serde_json::Value,
}

fn verify_claim(a: ClaimArgs) -> Result<bool> {
    let claim = find_claim(&a.id).ok_or_else(|| Error::InvalidConfig {
        field: "id".into(),
        reason: format!("unknown claim `{}`; known ids: {}", a.id, CLAIMS.iter().map(|c| c.id).collect::<Vec<_>>().join(", ")),
    })?;
    let e = engine(&a.space.space)?;
    let w = WeightSequence::parse(a.weight.as_deref().unwrap_or(claim.default_weight))?;
    let opts = ClaimOptions {
        window: a.window,
        samples: a.samples,
        seed: a.seed,
        sampler: SamplerSpec::with_seed(a.seed).scaled(a.scale),
        set_pairs: SetPairOptions::default(),
    };
    let report = run_claim_in(a.space.mode, claim, e.as_ref(), &w, &opts)?;
    eprintln!("{}", claim_row(&report));
    let env = json!({
        "version": VERSION,
        "requested_mode": a.space.mode,
        "samples": a.samples,
        "sampler_scale": a.scale,
        "seed_env": SEED_ENV,
    });
    emit(&ClaimEnvelope { report: &report, env }, a.out.as_deref())?;
    if let Some(path) = a.csv {
        let mut csv = String::from("claim,space,instance,slack\n");
        append_slacks(&mut csv, &report);
        std::fs::write(path, csv)?;
    }
    Ok(report.passed)
}

fn claim_row(r: &CheckReport) -> String {
    format!(
        "{:<6} {:<6} {:<24} {:<6} n={:<5} violations={:<3} max slack={:<10} caveat={}",
        if r.passed { "ok" } else { "FAIL" },
        r.claim,
        r.engine,
        r.mode.as_str(),
        r.instances,
        r.violation_count,
        r.max_slack_f64.map(|s| format!("{:.4}", s)).unwrap_or_else(|| "-".into()),
        r.soundness_caveat
    )
}

pub fn print_summary(report: &RunReport) {
    for r in &report.claims {
        eprintln!("{}", claim_row(r));
    }
    for s in &report.skipped {
        eprintln!("{:<6} {:<6} {:<24} {}", "skip", s.claim, s.space, s.reason);
    }
    if let Some(ex) = &report.examples {
        eprintln!("{:<6} examples: {} reference values", if ex.passed { "ok" } else { "FAIL" }, ex.checks.len());
    }
    if let Some(lp) = &report.left_property_a {
        let bounds: Vec<String> = lp
            .points
            .iter()
            .map(|p| format!("n={}: C_la >= {} (search {})", p.n, p.family_bound.value, p.search_bound.value))
            .collect();
        eprintln!("{:<6} left-property-A on {}: {}", if lp.passed { "ok" } else { "FAIL" }, lp.space, bounds.join("; "));
    }
    if let Some(d) = &report.democracy {
        eprintln!(
            "{:<6} democracy on {} >= {} (block ratio {})",
            if d.passed { "ok" } else { "FAIL" },
            d.space,
            d.estimate.value,
            d.block_ratio
        );
    }
    if let Some(s) = &report.sigma_oracle {
        eprintln!(
            "{:<6} sigma-oracle: {} comparisons on {} vectors, {} mismatches",
            if s.passed { "ok" } else { "FAIL" },
            s.comparisons,
            s.vectors,
            s.mismatches.len()
        );
    }
    if let Some(t) = &report.tga {
        eprintln!(
            "{:<6} tga: {} vectors, {} greedy-set mismatches, {} truncation failures",
            if t.passed { "ok" } else { "FAIL" },
            t.vectors,
            t.greedy_set_mismatches.len(),
            t.idempotence_failures.len() + t.contraction_failures.len()
        );
    }
    eprintln!("{}", if report.passed { "passed" } else { "FAILED" });
}

fn run_command(a: RunArgs) -> Result<bool> {
    let mut config = match (&a.preset, &a.config) {
        (Some(p), _) => preset(p)?,
        (None, Some(path)) => ExperimentConfig::from_json(&std::fs::read_to_string(path)?)?,
        (None, None) => ExperimentConfig::default(),
    };
    if !a.claims.is_empty() {
        config.claims = a.claims;
    }
    if !a.spaces.is_empty() {
        config.spaces = a.spaces;
    }
    if a.window.is_some() {
        config.window = a.window;
        config.studies.left_property_window = None;
    }
    if a.weight.is_some() {
        config.weight = a.weight;
    }
    if let Some(s) = a.samples {
        config.samples = s;
    }
    if let Some(s) = a.seed {
        config.seed = s;
    }
    if let Some(m) = a.mode {
        config.mode = m;
    }
    if a.threads.is_some() {
        config.threads = a.threads;
    }
    if a.out.is_some() {
        config.report = a.out;
    }
    if a.csv.is_some() {
        config.csv = a.csv;
    }
    let report = run(&config)?;
    print_summary(&report);
    match &config.report {
        Some(p) => std::fs::write(p, report.to_json())?,
        None => print!("{}", report.to_json()),
    }
    if let Some(p) = &config.csv {
        std::fs::write(p, report.to_csv())?;
    }
    Ok(report.passed)
}
