//! The classic doubling baseline against the threshold pipeline. Doubling
//! every decomposition tree and shortcutting guarantees an average of
//! 2 c·x + π·(1 - y); the core-pruning pipeline beats that on the same
//! decomposition.

use pctsp::instance::generate_euclidean;
use pctsp::lp::solve_relaxation;
use pctsp::rational::to_f64;
use pctsp::solver::{baseline_double_tree, run_full_with_lp, DeltaPolicy, SolverConfig};

fn main() -> pctsp::Result<()> {
    println!("seed   doubling avg   doubling bound  pipeline best  lp");
    for seed in 900..908u64 {
        let inst = generate_euclidean(8, seed)?;
        let lp = solve_relaxation(&inst)?;
        let base = baseline_double_tree(&inst, &lp)?;
        assert!(base.average <= base.bound);

        let report = run_full_with_lp(
            &inst,
            lp.clone(),
            &SolverConfig {
                policy: DeltaPolicy::EnumerateSupport,
            },
        )?;
        println!(
            "{seed:<5}  {:<14.6} {:<15.6} {:<14.6} {:.6}",
            to_f64(&base.average),
            to_f64(&base.bound),
            to_f64(report.best_cost()),
            to_f64(&lp.objective),
        );
    }
    Ok(())
}
