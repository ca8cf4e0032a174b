//! Command-line harness: instance generation, solving, exact oracles,
//! verification dumps, guarantee constants, and a benchmark table.
//!
//! Exit codes: 0 on success, 1 when a verification or guarantee check
//! fails (the math ran but an asserted property does not hold), 2 on usage
//! or input errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use pctsp::constants::{guarantee_report, GUARANTEE_TARGET};
use pctsp::decompose::decompose_levels;
use pctsp::instance::{generate_euclidean, load_instance, PctspInstance};
use pctsp::lp::{solve_relaxation, verify_feasibility};
use pctsp::oracle::brute_force_opt;
use pctsp::parity::{build_certificate, check_join_dominant, core_layers, matching_cost, min_cost_matching, odd_vertices};
use pctsp::rational::{format_rational, parse_rational, to_f64};
use pctsp::solver::{ratio_f64, run_full, DeltaPolicy, DeltaThreshold, SolverConfig};
use pctsp::{Error, Result};

#[derive(Parser)]
#[command(
    name = "pctsp",
    version,
    about = "Prize-collecting TSP: LP-relative approximation pipeline",
    long_about = "Solves prize-collecting TSP instances by LP relaxation, splitting off, \
                  tree decomposition, core pruning, and parity correction.\n\
                  Exit codes: 0 success, 1 failed verification or guarantee gate, \
                  2 usage or input error."
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a random Euclidean instance as JSON.
    Generate(GenerateArgs),
    /// Solve an instance with the approximation pipeline.
    Solve(SolveArgs),
    /// Compute the exact optimum by dynamic programming (n <= 12).
    Oracle(OracleArgs),
    /// Re-derive and verify the LP solution and decomposition.
    Verify(VerifyArgs),
    /// Evaluate the guarantee constants g, h and their maximum.
    Constants(ConstantsArgs),
    /// Batch-run solve and oracle on random instances, emitting CSV.
    Bench(BenchArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Number of vertices.
    #[arg(long)]
    n: usize,
    /// RNG seed.
    #[arg(long)]
    seed: u64,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    /// Instance JSON file.
    #[arg(long)]
    instance: PathBuf,
    /// Threshold mode: golden, enumerate, or fixed (requires --delta).
    #[arg(long, default_value = "enumerate")]
    mode: String,
    /// Split threshold for --mode fixed, as a rational like 2/5 or 0.382.
    #[arg(long)]
    delta: Option<String>,
    /// Also write the report JSON to this file.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    /// Instance JSON file.
    #[arg(long)]
    instance: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    /// Instance JSON file.
    #[arg(long)]
    instance: PathBuf,
    /// Include the LP solution (support edges and prizes) in the output.
    #[arg(long)]
    lp: bool,
    /// Decompose the LP optimum and verify the family identities.
    #[arg(long)]
    decompose: bool,
    /// Check the parity-correction certificates of every candidate core
    /// by full cut enumeration (n <= 16).
    #[arg(long)]
    certificates: bool,
}

#[derive(Args)]
struct ConstantsArgs {
    /// Lower end of the threshold-density support.
    #[arg(long, default_value_t = pctsp::constants::REFERENCE_KAPPA0)]
    kappa0: f64,
    /// Upper end of the threshold-density support.
    #[arg(long, default_value_t = pctsp::constants::REFERENCE_KAPPA)]
    kappa: f64,
}

#[derive(Args)]
struct BenchArgs {
    /// Number of instances.
    #[arg(long)]
    count: usize,
    /// Vertices per instance (at most 12, the exact-oracle limit).
    #[arg(long)]
    n: usize,
    /// Base seed; instance i uses seed + i.
    #[arg(long)]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        // The computation itself failed an internal property.
        Error::Invariant(_) | Error::Lp(_) => 1,
        // Everything else is a problem with the request or its inputs.
        _ => 2,
    }
}

fn run(cmd: Cmd) -> Result<ExitCode> {
    match cmd {
        Cmd::Generate(args) => generate(args),
        Cmd::Solve(args) => solve(args),
        Cmd::Oracle(args) => oracle(args),
        Cmd::Verify(args) => verify(args),
        Cmd::Constants(args) => constants(args),
        Cmd::Bench(args) => bench(args),
    }
}

fn generate(args: GenerateArgs) -> Result<ExitCode> {
    let inst = generate_euclidean(args.n, args.seed)?;
    let text = inst.to_json_string();
    match args.out {
        Some(path) => std::fs::write(path, text + "\n")?,
        None => println!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn solve(args: SolveArgs) -> Result<ExitCode> {
    let inst = load_instance(&args.instance)?;
    let policy = match args.mode.as_str() {
        "golden" => DeltaPolicy::Golden,
        "enumerate" => DeltaPolicy::EnumerateSupport,
        "fixed" => {
            let text = args.delta.ok_or_else(|| {
                Error::Domain("--mode fixed requires --delta".into())
            })?;
            DeltaPolicy::Fixed(parse_rational(&text)?)
        }
        other => {
            return Err(Error::Domain(format!(
                "unknown mode {other:?}; expected golden, enumerate, or fixed"
            )))
        }
    };
    let report = run_full(&inst, &SolverConfig { policy })?;
    let text = serde_json::to_string_pretty(&report.to_json()).expect("report serializes");
    if let Some(path) = args.report {
        std::fs::write(path, text.clone() + "\n")?;
    }
    println!("{text}");
    Ok(ExitCode::SUCCESS)
}

fn oracle(args: OracleArgs) -> Result<ExitCode> {
    let inst = load_instance(&args.instance)?;
    let opt = brute_force_opt(&inst)?;
    let out = json!({
        "value": format_rational(&opt.value),
        "order": opt.tour.order,
    });
    println!("{}", serde_json::to_string_pretty(&out).expect("json"));
    Ok(ExitCode::SUCCESS)
}

fn verify(args: VerifyArgs) -> Result<ExitCode> {
    let inst = load_instance(&args.instance)?;
    let sol = solve_relaxation(&inst)?;
    let feas = verify_feasibility(&inst, &sol);
    let mut ok = feas.ok();
    let mut out = json!({
        "n": inst.n(),
        "objective": format_rational(&sol.objective),
        "feasible": feas.ok(),
    });
    if !feas.ok() {
        out["feasibility_detail"] = json!(format!("{feas}"));
    }
    if args.lp {
        out["solution"] = sol.to_json();
    }
    if args.decompose || args.certificates {
        let levels = decompose_levels(&inst, &sol)?;
        if args.decompose {
            let family = &levels.levels[0].family;
            family.check_identities(&sol)?;
            out["identities"] = json!(true);
            out["family"] = family.to_json();
        }
        if args.certificates {
            let (checked, violations) = check_certificates(&inst, &levels)?;
            out["certificates"] = json!({
                "checked": checked,
                "violations": violations,
            });
            ok = ok && violations == 0;
        }
    }
    println!("{}", serde_json::to_string_pretty(&out).expect("json"));
    Ok(if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

/// Builds the golden-threshold join certificate for every candidate core
/// and checks each against full cut enumeration. Returns (checked,
/// violations).
fn check_certificates(
    inst: &PctspInstance,
    levels: &pctsp::decompose::DecompositionLevels,
) -> Result<(usize, usize)> {
    let delta = DeltaThreshold::Golden;
    let delta_low = delta.rational_lower_bound();
    let level = levels
        .order_y
        .iter()
        .take_while(|y| delta.is_below(y))
        .count();
    let entry = &levels.levels[level];
    let mut checked = 0;
    let mut violations = 0;
    for (tree, _) in entry.family.trees() {
        let layers = core_layers(tree, inst.root(), &entry.solution.y)?;
        for layer in &layers {
            let cert = build_certificate(&entry.solution, &layers, &delta_low, &layer.threshold)?;
            if check_join_dominant(&cert)?.is_some() {
                violations += 1;
            }
            // The certificate must also pay for the actual matching.
            let odd = odd_vertices(&cert.core_edges);
            let pairs = min_cost_matching(inst, &odd)?;
            if matching_cost(inst, &pairs) > cert.cost(inst) {
                violations += 1;
            }
            checked += 1;
        }
    }
    Ok((checked, violations))
}

fn constants(args: ConstantsArgs) -> Result<ExitCode> {
    let report = guarantee_report(args.kappa, args.kappa0)?;
    println!("{}", serde_json::to_string_pretty(&report.to_json()).expect("json"));
    Ok(if report.max_gh() < GUARANTEE_TARGET {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn bench(args: BenchArgs) -> Result<ExitCode> {
    if args.count == 0 {
        return Err(Error::Domain("--count must be positive".into()));
    }
    let threads = bench_threads(args.count);
    let mut rows: Vec<(usize, Result<String>)> = Vec::with_capacity(args.count);
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for t in 0..threads {
            let indices: Vec<usize> = (t..args.count).step_by(threads).collect();
            let n = args.n;
            let seed = args.seed;
            handles.push(scope.spawn(move || {
                indices
                    .into_iter()
                    .map(|i| (i, bench_row(i, n, seed + i as u64)))
                    .collect::<Vec<_>>()
            }));
        }
        for handle in handles {
            rows.extend(handle.join().expect("bench worker panicked"));
        }
    });
    rows.sort_by_key(|(i, _)| *i);

    // Columns: instance index, LP optimum, exact optimum, pipeline cost,
    // cost/LP, cost/OPT. Floats carry 12 significant digits.
    println!("index,lp,opt,alg,ratio_to_lp,ratio_to_opt");
    for (_, row) in rows {
        println!("{}", row?);
    }
    Ok(ExitCode::SUCCESS)
}

fn bench_threads(count: usize) -> usize {
    let available = std::thread::available_parallelism()
        .map(|v| v.get())
        .unwrap_or(1);
    let cap = match std::env::var("PCTSP_THREADS") {
        Ok(v) => v.parse::<usize>().ok().filter(|&t| t > 0).unwrap_or(1),
        Err(_) => available,
    };
    cap.min(count).max(1)
}

fn bench_row(index: usize, n: usize, seed: u64) -> Result<String> {
    let inst = generate_euclidean(n, seed)?;
    let report = run_full(&inst, &SolverConfig::default())?;
    let opt = brute_force_opt(&inst)?;
    let alg = report.best_cost();
    Ok(format!(
        "{index},{},{},{},{},{}",
        sig12(to_f64(&report.lp.objective)),
        sig12(to_f64(&opt.value)),
        sig12(to_f64(alg)),
        sig12(report.ratio_to_lp()),
        sig12(ratio_f64(alg, &opt.value)),
    ))
}

/// Formats with 12 significant digits, deterministically.
fn sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    let prec = (11 - exp).clamp(0, 17) as usize;
    format!("{x:.prec$}")
}
