//! Certifying the parity-correction cost. The point
//! z = x/(3-δ) + Σ_{η_i >= γ} (1 - 2η_i/(3-δ)) χ^{E_i} lies in the dominant
//! of the odd(core)-join polytope, so the minimum matching over the core's
//! odd vertices costs at most c·z. The check enumerates all odd cuts.

use pctsp::decompose::decompose_levels;
use pctsp::instance::{generate_euclidean, Tour};
use pctsp::lp::FractionalSolution;
use pctsp::parity::{build_certificate, check_join_dominant, core, core_layers, tour_through_tree};
use pctsp::rational::{rat, to_f64, Rat};

fn main() -> pctsp::Result<()> {
    let inst = generate_euclidean(8, 515)?;

    // An equal mix of two tours: prizes are 1/2 on the symmetric difference
    // of the visited sets, so pruning and layering have real work to do.
    let a = FractionalSolution::tour_incidence(&inst, &Tour { order: vec![0, 1, 4, 3, 2] })?;
    let b = FractionalSolution::tour_incidence(&inst, &Tour { order: vec![0, 2, 5, 7, 6, 1] })?;
    let half = rat(1, 2);
    let x: Vec<Rat> = a.x.iter().zip(&b.x).map(|(p, q)| (p + q) * &half).collect();
    let y: Vec<Rat> = a.y.iter().zip(&b.y).map(|(p, q)| (p + q) * &half).collect();
    let sol = FractionalSolution::new(&inst, x, y);
    let delta = rat(2, 5);

    let levels = decompose_levels(&inst, &sol)?;
    let entry = &levels.levels[levels.level_below(&delta)];

    for (tree, weight) in entry.family.trees() {
        let layers = core_layers(tree, inst.root(), &entry.solution.y)?;
        let cert = build_certificate(&entry.solution, &layers, &delta, &delta)?;
        match check_join_dominant(&cert)? {
            None => {}
            Some(cut) => panic!("dominance violated at cut {cut:?}"),
        }

        let pruned = core(tree, inst.root(), &entry.solution.y, &delta)?;
        let ct = tour_through_tree(&inst, &pruned)?;
        println!(
            "tree (weight {weight}): matching {:.6} <= certificate {:.6}",
            to_f64(&ct.matching_cost),
            to_f64(&cert.cost(&inst)),
        );
        assert!(ct.matching_cost <= cert.cost(&inst));
    }
    println!("every certificate passed full odd-cut enumeration");
    Ok(())
}
