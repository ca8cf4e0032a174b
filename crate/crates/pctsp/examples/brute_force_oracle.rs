//! Exact optima by subset DP next to the LP lower bound. The gap closes
//! exactly when the relaxation happens to have an integral optimum.

use pctsp::instance::generate_euclidean;
use pctsp::lp::solve_relaxation;
use pctsp::oracle::brute_force_opt;
use pctsp::rational::to_f64;

fn main() -> pctsp::Result<()> {
    println!("seed   n   lp objective   exact opt      gap");
    for seed in 300..310u64 {
        let n = 5 + (seed % 5) as usize;
        let inst = generate_euclidean(n, seed)?;
        let lp = solve_relaxation(&inst)?;
        let opt = brute_force_opt(&inst)?;
        assert!(lp.objective <= opt.value, "relaxation above the optimum");
        println!(
            "{seed:<5} {n:<3} {:<14.9} {:<14.9} {:.2e}",
            to_f64(&lp.objective),
            to_f64(&opt.value),
            to_f64(&(&opt.value - &lp.objective)),
        );
    }
    Ok(())
}
