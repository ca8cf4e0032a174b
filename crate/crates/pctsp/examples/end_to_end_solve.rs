//! Full pipeline on a seeded instance: LP relaxation, splitting-off,
//! tree decomposition, threshold enumeration, and the final tour.
//!
//!     cargo run -p pctsp --example end_to_end_solve

use pctsp::instance::generate_euclidean;
use pctsp::oracle::brute_force_opt;
use pctsp::rational::to_f64;
use pctsp::solver::{run_full, DeltaPolicy, SolverConfig};

fn main() -> pctsp::Result<()> {
    let inst = generate_euclidean(9, 2024)?;
    println!("instance: n = {}, root = {}", inst.n(), inst.root());

    let report = run_full(
        &inst,
        &SolverConfig {
            policy: DeltaPolicy::EnumerateSupport,
        },
    )?;

    println!("lp objective      = {} ({:.6})", report.lp.objective, to_f64(&report.lp.objective));
    for run in &report.runs {
        let best = &run.candidates[run.best];
        println!(
            "  threshold {:<10} level {} candidates {:>2} best {:.6}",
            run.delta.describe(),
            run.level,
            run.candidates.len(),
            to_f64(&best.cost),
        );
    }

    let best = report.best_candidate();
    println!("best tour         = {:?}", best.tour.order);
    println!("best total cost   = {} ({:.6})", best.cost, to_f64(&best.cost));
    println!("ratio to lp       = {:.6}", report.ratio_to_lp());

    let opt = brute_force_opt(&inst)?;
    println!("exact optimum     = {} ({:.6})", opt.value, to_f64(&opt.value));
    assert!(report.lp.objective <= opt.value);
    assert!(opt.value <= *report.best_cost());
    Ok(())
}
