//! The guarantee constants behind the pipeline. A fixed split threshold δ
//! yields the factor α(δ), minimized at the golden point; randomizing both
//! thresholds tightens the factor to max{g, h} < 1.599 at the reference
//! parameters. The h maximization is certified by an interval slope bound.

use pctsp::constants::{
    alpha_of_delta, guarantee_report, REFERENCE_KAPPA, REFERENCE_KAPPA0,
};

fn main() -> pctsp::Result<()> {
    let golden_delta = (3.0 - 5.0f64.sqrt()) / 2.0;
    println!("alpha at selected split thresholds:");
    for delta in [0.25, 0.35, golden_delta, 0.40, 0.50] {
        println!("  alpha({delta:.6}) = {:.12}", alpha_of_delta(delta)?);
    }
    println!("  minimum value is (1+sqrt 5)/2 = {:.12}", (1.0 + 5.0f64.sqrt()) / 2.0);

    let report = guarantee_report(REFERENCE_KAPPA, REFERENCE_KAPPA0)?;
    println!("\nrandomized thresholds at kappa0 = {REFERENCE_KAPPA0}, kappa = {REFERENCE_KAPPA}:");
    println!("  g (cost side)     = {:.12}", report.g);
    println!("  h (penalty side)  = {:.12}", report.h.value);
    println!("  certified h upper = {:.12} at y = {:.6}", report.h.certified_upper, report.h.argmax);
    println!("  max(g, h)         = {:.12}", report.max_gh());
    println!("  below 1.599       = {}", report.meets_target());
    Ok(())
}
