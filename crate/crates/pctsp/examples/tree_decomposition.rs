//! Writes a fractional solution as a weighted family of rooted trees with
//! exact bookkeeping: weights sum to one, each vertex is covered with
//! total weight y_v, and no edge is used beyond its fractional value.

use pctsp::decompose::decompose;
use pctsp::instance::generate_euclidean;
use pctsp::lp::solve_relaxation;

fn main() -> pctsp::Result<()> {
    // This seed is one where the relaxation is genuinely fractional: the
    // optimum blends several cycles, so the family has several trees.
    let inst = generate_euclidean(8, 1004)?;
    let sol = solve_relaxation(&inst)?;
    let family = decompose(&inst, &sol)?;

    println!("{} trees decompose the optimum", family.len());
    for (tree, weight) in family.trees() {
        let edge_list: Vec<(usize, usize)> = tree.edges().iter().copied().collect();
        println!("  weight {weight}  edges {edge_list:?}");
    }

    family.check_identities(&sol)?;
    println!("total weight = {}", family.total_weight());
    for v in 0..inst.n() {
        println!(
            "  vertex {v}: coverage {} = y {}",
            family.vertex_coverage(v),
            sol.y[v]
        );
    }
    println!("expected tree cost = {} <= edge cost {}", family.expected_cost(&inst), sol.edge_cost(&inst));
    Ok(())
}
