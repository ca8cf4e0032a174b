//! Exact check of the two expectation bounds driving the guarantee: with
//! the prune threshold drawn from the γ distribution, the expected core
//! plus matching cost stays below (7-2δ-2κ)/(3-δ) times the solution's
//! edge cost, and every vertex survives pruning with probability at least
//! its three-case floor. All expectations here have finite support, so the
//! comparison is exact rational arithmetic.

use pctsp::constants::empirical_lemma_check;
use pctsp::decompose::decompose_levels;
use pctsp::instance::generate_euclidean;
use pctsp::lp::solve_relaxation;
use pctsp::rational::{rat, to_f64};

fn main() -> pctsp::Result<()> {
    let inst = generate_euclidean(9, 606)?;
    let sol = solve_relaxation(&inst)?;
    let levels = decompose_levels(&inst, &sol)?;

    for (delta, kappa) in [
        (rat(191, 500), rat(1, 1)),
        (rat(3724, 10000), rat(9971, 10000)),
    ] {
        let check = empirical_lemma_check(&inst, &levels, &delta, &kappa)?;
        println!("delta = {delta}, kappa = {kappa}:");
        println!(
            "  E[core + matching] = {:.9} <= bound {:.9}",
            to_f64(&check.expected_cost),
            to_f64(&check.cost_bound),
        );
        for v in 0..inst.n() {
            println!(
                "  P[{v} kept] = {:<12.9} floor {:.9}",
                to_f64(&check.inclusion[v]),
                to_f64(&check.inclusion_floor[v]),
            );
        }
        assert!(check.ok());
    }
    Ok(())
}
