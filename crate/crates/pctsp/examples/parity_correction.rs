//! From tree to tour: match the odd-degree vertices at minimum cost, walk
//! an Eulerian circuit of tree plus matching, and shortcut repeat visits.
//! The triangle inequality caps the tour at tree cost plus matching cost.

use pctsp::decompose::RootedTree;
use pctsp::instance::generate_euclidean;
use pctsp::parity::{odd_vertices, tour_through_tree};
use pctsp::rational::to_f64;

fn main() -> pctsp::Result<()> {
    let inst = generate_euclidean(9, 1337)?;
    let tree = RootedTree::new(
        0,
        &[(0, 1), (0, 2), (1, 3), (1, 4), (2, 5), (2, 6), (6, 7), (6, 8)],
    )?;

    let edge_list: Vec<(usize, usize)> = tree.edges().iter().copied().collect();
    println!("tree edges   {edge_list:?}");
    println!("odd vertices {:?}", odd_vertices(&edge_list));

    let ct = tour_through_tree(&inst, &tree)?;
    println!("matching     {:?}", ct.matching);
    println!("tour         {:?}", ct.tour.order);
    println!(
        "tour cost {:.6} <= tree {:.6} + matching {:.6}",
        to_f64(&ct.tour.edge_cost(&inst)),
        to_f64(&ct.tree_cost),
        to_f64(&ct.matching_cost),
    );
    assert!(ct.tour.edge_cost(&inst) <= &ct.tree_cost + &ct.matching_cost);
    Ok(())
}
