//! taulab: scan split primes of a number-field generator pair and check
//! surjectivity onto SL(2,p), the girth bound C·ln p, spectral gaps and
//! expansion constants of the quotient Cayley graphs.

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use taulab_cli::config::{self, Config, OutputFormat};
use taulab_cli::output;
use taulab_core::cayley::{CayleyGraph, GenSet};
use taulab_core::matgroup::search_short_relations;
use taulab_core::reduction::{reduce_generators, PrimeSite, PrimeStatus};
use taulab_core::verify;

#[derive(Parser)]
#[command(
    name = "taulab",
    version,
    about = "Girth, surjectivity, spectral-gap and expansion checks for mod-p Cayley graphs of SL(2) generator pairs over number fields"
)]
struct Cli {
    /// JSON config file (field, generators, experiment knobs).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Per-prime experiment: surjectivity, girth vs C·ln p, spectral gap,
    /// sampled expansion. Exits nonzero if any theorem-level assertion fails.
    Scan {
        #[arg(long)]
        p_min: Option<u64>,
        #[arg(long)]
        p_max: Option<u64>,
        /// Worker threads for per-prime jobs (0 = automatic).
        #[arg(long)]
        jobs: Option<usize>,
        /// Master seed for the subset sampler (per-prime seeds derive from it).
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        vertex_budget: Option<usize>,
        #[arg(long)]
        spectral_tol: Option<f64>,
        #[arg(long)]
        spectral_max_iter: Option<usize>,
        #[arg(long)]
        relation_depth: Option<usize>,
        /// Skip the embedded μ-growth check.
        #[arg(long)]
        skip_mu: bool,
        #[arg(long, value_enum)]
        format: Option<OutputFormat>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Random-word growth check: entries of cleared word products stay
    /// under (2M)^r and denominators under M^r.
    MuCheck {
        #[arg(long)]
        r_max: Option<usize>,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// BFS closure sizes against full product orders along a nested list
    /// of split primes (reduction modulo P_1...P_n via CRT).
    Nested {
        /// Comma-separated ascending primes; defaults to nested_primes in
        /// the config.
        #[arg(long, value_delimiter = ',')]
        primes: Option<Vec<u64>>,
        #[arg(long)]
        vertex_budget: Option<usize>,
    },
    /// Exhaustive search for short relations among the generators.
    Relations {
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Export one prime's Cayley graph as a "u v label" edge list.
    GraphExport {
        #[arg(long)]
        p: u64,
        /// Root of the minimal polynomial mod p (default: smallest).
        #[arg(long)]
        root: Option<u64>,
        /// Output path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("TAULAB_LOG", "warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(pass) => {
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn load_config(path: &Option<PathBuf>) -> Result<Config> {
    let path = path
        .as_ref()
        .ok_or_else(|| anyhow!("--config <FILE> is required"))?;
    Ok(config::parse_config(path).with_context(|| format!("loading {}", path.display()))?)
}

/// Ok(true): everything passed. Ok(false): a theorem-level assertion failed
/// (exit code 1). Err: the run itself could not proceed (exit code 2).
fn run(cli: Cli) -> Result<bool> {
    match cli.cmd {
        Cmd::Scan {
            p_min,
            p_max,
            jobs,
            seed,
            trials,
            vertex_budget,
            spectral_tol,
            spectral_max_iter,
            relation_depth,
            skip_mu,
            format,
            out_dir,
        } => {
            let cfg = load_config(&cli.config)?;
            let (_, gs) = config::build_system(&cfg)?;
            let mut opts = cfg.scan_options();
            if let Some(v) = p_min {
                opts.p_min = v;
            }
            if let Some(v) = p_max {
                opts.p_max = v;
            }
            if let Some(v) = jobs {
                opts.jobs = v;
            }
            if let Some(v) = seed {
                opts.sampler_seed = v;
            }
            if let Some(v) = trials {
                opts.sampler_trials = v;
            }
            if let Some(v) = vertex_budget {
                opts.vertex_budget = v;
            }
            if let Some(v) = spectral_tol {
                opts.spectral_tol = v;
            }
            if let Some(v) = spectral_max_iter {
                opts.spectral_max_iter = v;
            }
            if let Some(v) = relation_depth {
                opts.relation_depth = v;
            }
            if skip_mu {
                opts.mu_trials = 0;
            }
            let report = verify::run_girth_experiment(&gs, &opts)?;

            let dir = out_dir.unwrap_or_else(|| cfg.output.dir.clone());
            let fmt = format.unwrap_or(cfg.output.format);
            let written = output::emit_report(&report, &cfg, &dir, fmt)?;
            for path in &written {
                println!("wrote {}", path.display());
            }

            let admissible = report.rows.iter().filter(|r| r.admissible()).count();
            println!(
                "M = {}  C = {}  rows = {} ({} admissible)",
                report.m_upper,
                report.c_lower,
                report.rows.len(),
                admissible
            );
            if let Some(g) = report.min_gap {
                println!("min spectral gap over surjective rows: {g}");
            }
            for note in &report.notes {
                println!("note: {note}");
            }
            let pass = report.assertions_pass();
            println!("assertions: {}", if pass { "PASS" } else { "FAIL" });
            Ok(pass)
        }

        Cmd::MuCheck { r_max, trials, seed } => {
            let cfg = load_config(&cli.config)?;
            let (_, gs) = config::build_system(&cfg)?;
            let report = verify::run_mu_growth_check(
                &gs,
                r_max.unwrap_or(cfg.mu.r_max),
                trials.unwrap_or(cfg.mu.trials),
                seed.unwrap_or(cfg.sampler.seed),
            );
            println!(
                "mu-growth: {} ({} words, r <= {})",
                if report.pass { "PASS" } else { "FAIL" },
                report.words_checked,
                report.r_max
            );
            println!(
                "worst entry ratio house/(2M)^r = {}",
                report.worst_entry_ratio
            );
            println!("worst denominator ratio house/M^r = {}", report.worst_denom_ratio);
            if let Some(v) = &report.first_violation {
                println!("violation: {v}");
            }
            Ok(report.pass)
        }

        Cmd::Nested { primes, vertex_budget } => {
            let cfg = load_config(&cli.config)?;
            let (_, gs) = config::build_system(&cfg)?;
            let primes = primes
                .or_else(|| cfg.nested_primes.clone())
                .ok_or_else(|| anyhow!("no primes given (--primes or nested_primes in config)"))?;
            let report = verify::run_nested_check(
                &gs,
                &primes,
                vertex_budget.unwrap_or(cfg.vertex_budget),
            )?;
            for level in &report.levels {
                println!(
                    "level {:?}: closure {} / {} ({})",
                    level.primes,
                    level.closure,
                    level.full_order,
                    if level.surjective { "surjective" } else { "PROPER SUBGROUP" }
                );
            }
            if report.truncated {
                println!("(deeper levels exceed the vertex budget)");
            }
            Ok(report.assertions_pass())
        }

        Cmd::Relations { depth } => {
            let cfg = load_config(&cli.config)?;
            let (_, gs) = config::build_system(&cfg)?;
            let depth = depth.unwrap_or(cfg.relation_check_depth);
            let (a, b) = (
                gs.generator(taulab_core::matgroup::Letter::A).clone(),
                gs.generator(taulab_core::matgroup::Letter::B).clone(),
            );
            let report = search_short_relations(&a, &b, depth)?;
            println!("checked {} reduced words up to length {}", report.words_checked, depth);
            match &report.shortest_identity {
                Some(w) => println!("shortest identity relation: {w} (length {})", w.len()),
                None => println!("no identity relation up to length {depth}"),
            }
            match &report.shortest_neg_identity {
                Some(w) => println!(
                    "shortest minus-identity relation: {w} (length {})",
                    w.len()
                ),
                None => println!("no minus-identity relation up to length {depth}"),
            }
            Ok(report.passed())
        }

        Cmd::GraphExport { p, root, out } => {
            let cfg = load_config(&cli.config)?;
            let (field, gs) = config::build_system(&cfg)?;
            let status = taulab_core::reduction::prime_status(&field, &gs, p);
            let roots = match status {
                PrimeStatus::Split(roots) => roots,
                other => {
                    return Err(anyhow!(
                        "p = {p} is not usable: {}",
                        other.reason().unwrap_or("unknown")
                    ))
                }
            };
            let root = match root {
                Some(r) if roots.contains(&r) => r,
                Some(r) => {
                    return Err(anyhow!("{r} is not a root mod {p}; available: {roots:?}"))
                }
                None => roots[0],
            };
            let site = PrimeSite::new(&field, p, root)?;
            let imgs = reduce_generators(&site, &gs)?;
            let graph = CayleyGraph::build(&GenSet::from_images(&imgs), cfg.vertex_budget)?;
            eprintln!(
                "{}: {} vertices, {}-regular, surjective = {}",
                graph.desc(),
                graph.vertex_count(),
                graph.k_reg(),
                graph.surjective()
            );
            match out {
                Some(path) => {
                    let file = std::io::BufWriter::new(std::fs::File::create(&path)?);
                    graph.export_edges(file)?;
                    println!("wrote {}", path.display());
                }
                None => {
                    graph.export_edges(std::io::BufWriter::new(std::io::stdout().lock()))?
                }
            }
            Ok(true)
        }
    }
}
