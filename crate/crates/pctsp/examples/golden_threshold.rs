//! Fixed-threshold run at the golden split point δ = (3 - √5)/2. The
//! irrational threshold is handled symbolically: comparisons against
//! rational prizes go through an integer inequality, and certificates use
//! a 48-bit rational lower bound, which only loosens the proved factor.

use pctsp::instance::generate_euclidean;
use pctsp::oracle::brute_force_opt;
use pctsp::rational::to_f64;
use pctsp::solver::{run_full, DeltaPolicy, DeltaThreshold, SolverConfig};

fn main() -> pctsp::Result<()> {
    let golden = DeltaThreshold::Golden;
    println!(
        "delta = {} ~ {:.12}, rational lower bound {}",
        golden.describe(),
        golden.as_f64(),
        golden.rational_lower_bound(),
    );

    let alpha = (1.0 + 5.0f64.sqrt()) / 2.0;
    println!("guaranteed factor (1+sqrt 5)/2 = {alpha:.12}\n");

    for seed in 60..66u64 {
        let inst = generate_euclidean(7, seed)?;
        let report = run_full(
            &inst,
            &SolverConfig {
                policy: DeltaPolicy::Golden,
            },
        )?;
        let opt = brute_force_opt(&inst)?;
        let ratio = report.ratio_to_lp();
        println!(
            "seed {seed}: total {:.6}, opt {:.6}, ratio to lp {ratio:.6}",
            to_f64(report.best_cost()),
            to_f64(&opt.value),
        );
        assert!(ratio <= alpha + 1e-9);
    }
    Ok(())
}
