//! Command-line driver: requirement audits, the theorem battery, and
//! capacity certificates for built-in or file-described theories.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use gptkit::audit::{self, Verdict};
use gptkit::composite::{compose, product_state};
use gptkit::instances;
use gptkit::lp::capacity;
use gptkit::report::{to_json_string, write_atomically, ReportFile};
use gptkit::spec_file::TheorySpecFile;
use gptkit::{Result, StateVector, TheoryInstance};

#[derive(Parser)]
#[command(name = "gptkit", version, about = "Generalized-probabilistic-theories toolkit and axiom auditor")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Audit requirements against a theory instance.
    Audit(AuditArgs),
    /// Run the theorem battery.
    Theorems(TheoremArgs),
    /// Compute a capacity certificate, optionally for a composite.
    Capacity(CapacityArgs),
}

#[derive(Args)]
struct AuditArgs {
    /// Built-in name (classical:<c>, quantum:<c>, ball:<d2>, boxworld,
    /// boxworld-pair) or a path to a theory spec JSON file.
    #[arg(long)]
    theory: String,
    /// Comma-separated requirement list out of 1,2,3,4,5,5p.
    #[arg(long, default_value = "1,2,3,4,5,5p")]
    requirements: String,
    #[arg(long)]
    seed: Option<u64>,
    /// Membership/feasibility tolerance.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Sample count for randomized checks.
    #[arg(long, default_value_t = 64)]
    samples: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct TheoremArgs {
    #[arg(long)]
    seed: Option<u64>,
    /// Orbit-rank grid, e.g. `d2=3,5,7`.
    #[arg(long, default_value = "d2=3,5,7")]
    grid: String,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct CapacityArgs {
    #[arg(long)]
    theory: String,
    /// Second factor for a composite capacity.
    #[arg(long)]
    times: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

fn effective_seed(flag: Option<u64>) -> u64 {
    flag.or_else(|| {
        std::env::var("GPTKIT_SEED")
            .ok()
            .and_then(|s| s.parse().ok())
    })
    .unwrap_or(0)
}

fn load_theory(spec: &str) -> Result<TheoryInstance> {
    if std::path::Path::new(spec).exists() {
        let text = std::fs::read_to_string(spec)
            .map_err(|e| gptkit::Error::Domain(format!("cannot read {spec}: {e}")))?;
        TheorySpecFile::parse(&text)?.build()
    } else {
        instances::by_name(spec)
    }
}

fn emit(report_json: &str, out: &Option<PathBuf>) -> Result<()> {
    match out {
        Some(path) => write_atomically(path, report_json),
        None => {
            println!("{report_json}");
            Ok(())
        }
    }
}

fn verdict_exit(requirements: &std::collections::BTreeMap<String, audit::RequirementResult>) -> u8 {
    let any_fail = requirements.values().any(|r| r.verdict == Verdict::Fail);
    let any_ambiguous = requirements
        .values()
        .any(|r| r.verdict == Verdict::Ambiguous);
    if any_fail {
        2
    } else if any_ambiguous {
        3
    } else {
        0
    }
}

fn run_audit(args: &AuditArgs) -> Result<u8> {
    let start = Instant::now();
    let instance = load_theory(&args.theory)?;
    let labels: Vec<String> = args
        .requirements
        .split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect();
    let seed = effective_seed(args.seed);
    let requirements =
        audit::run_requirements_with_tol(&instance, &labels, seed, args.samples, args.tol)?;
    let mut report = ReportFile::new(&instance.name, seed);
    report.requirements = requirements;
    report.runtime_ms = start.elapsed().as_millis() as u64;
    let exit = verdict_exit(&report.requirements);
    match args.format {
        Format::Json => emit(&to_json_string(&report)?, &args.out)?,
        Format::Text => {
            let mut text = format!("audit of {} (seed {})\n", report.instance, report.seed);
            for (key, r) in &report.requirements {
                text.push_str(&format!("  {key}: {:?} - {}\n", r.verdict, r.details));
            }
            text.push_str(&format!("runtime: {} ms\n", report.runtime_ms));
            match &args.out {
                Some(path) => write_atomically(path, &text)?,
                None => print!("{text}"),
            }
        }
    }
    Ok(exit)
}

fn parse_grid(grid: &str) -> Result<Vec<usize>> {
    let rest = grid
        .strip_prefix("d2=")
        .ok_or_else(|| gptkit::Error::Domain(format!("grid must look like d2=3,5,7; got '{grid}'")))?;
    rest.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<usize>()
                .map_err(|_| gptkit::Error::Domain(format!("bad grid entry '{tok}'")))
        })
        .collect()
}

fn run_theorems(args: &TheoremArgs) -> Result<u8> {
    let start = Instant::now();
    let grid = parse_grid(&args.grid)?;
    let seed = effective_seed(args.seed);
    let checks = audit::run_theorem_suite_with_grid(seed, &grid)?;
    let all_pass = checks.iter().all(|c| c.pass);
    let mut report = ReportFile::new("theorem-suite", seed);
    report.theorems = checks;
    report.runtime_ms = start.elapsed().as_millis() as u64;
    match args.format {
        Format::Json => emit(&to_json_string(&report)?, &args.out)?,
        Format::Text => {
            let mut text = format!("theorem suite (seed {seed}, grid {:?})\n", grid);
            for c in &report.theorems {
                text.push_str(&format!(
                    "  [{}] {}: expected {:.6e}, observed {:.6e} (tol {:.1e})\n",
                    if c.pass { "pass" } else { "FAIL" },
                    c.name,
                    c.expected,
                    c.observed,
                    c.tolerance
                ));
            }
            match &args.out {
                Some(path) => write_atomically(path, &text)?,
                None => print!("{text}"),
            }
        }
    }
    Ok(if all_pass { 0 } else { 2 })
}

fn capacity_pool(instance: &TheoryInstance, seed: u64) -> Vec<StateVector> {
    let mut rng = gptkit::groups::seeded_rng(seed, 0xCA);
    // canonical maximal families first, then random pures
    let mut pool: Vec<StateVector> = match instance.space.rep() {
        gptkit::SpaceRep::Ball => {
            let d = instance.space.dim();
            let mut plus = vec![0.5; d];
            let mut minus = vec![0.5; d];
            plus[0] = 1.0;
            minus[0] = 0.0;
            vec![
                StateVector::from_probabilities(&plus),
                StateVector::from_probabilities(&minus),
            ]
        }
        gptkit::SpaceRep::PsdConeSlice { capacity } => instances::classical_vertices(*capacity)
            .iter()
            .map(|v| {
                instances::embed_classical_in_quantum(v, *capacity)
                    .expect("basis states embed")
            })
            .collect(),
        _ => Vec::new(),
    };
    pool.extend(instance.space.pure_candidates(48, &mut rng));
    pool
}

fn run_capacity(args: &CapacityArgs) -> Result<u8> {
    let seed = effective_seed(args.seed);
    let first = load_theory(&args.theory)?;
    let (label, space, pool) = match &args.times {
        None => {
            let pool = capacity_pool(&first, seed);
            (first.name.clone(), first.space.clone(), pool)
        }
        Some(second_name) => {
            let second = load_theory(second_name)?;
            let comp = compose(&first, &second)?;
            let pool: Vec<StateVector> = match comp.joint.vertices() {
                Some(v) => v.to_vec(),
                None => {
                    let pa = capacity_pool(&first, seed);
                    let pb = capacity_pool(&second, seed.wrapping_add(1));
                    pa.iter()
                        .take(8)
                        .flat_map(|a| pb.iter().take(8).map(move |b| product_state(a, b)))
                        .collect()
                }
            };
            (
                format!("{} x {}", first.name, second.name),
                comp.joint.clone(),
                pool,
            )
        }
    };
    let cert = capacity(&space, 8.min(space.dim() + 2), &pool)?;
    #[derive(serde::Serialize)]
    struct CapacityOut {
        schema: u32,
        instance: String,
        seed: u64,
        capacity: usize,
        #[serde(rename = "delta-residual")]
        delta_residual: f64,
        #[serde(rename = "pool-size")]
        pool_size: usize,
        #[serde(rename = "pool-exhausted-at-next")]
        pool_exhausted_at_next: bool,
    }
    let out = CapacityOut {
        schema: 1,
        instance: label,
        seed,
        capacity: cert.value,
        delta_residual: cert.delta_residual(),
        pool_size: pool.len(),
        pool_exhausted_at_next: cert.pool_exhausted_at_next,
    };
    emit(&to_json_string(&out)?, &args.out)?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Audit(args) => run_audit(args),
        Command::Theorems(args) => run_theorems(args),
        Command::Capacity(args) => run_capacity(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
