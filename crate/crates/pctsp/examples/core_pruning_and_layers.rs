//! Layers and cores of a fixed rooted tree. The core at threshold γ is the
//! minimal subtree spanning the root and every vertex with prize y >= γ;
//! sweeping γ downward through the distinct prizes peels the tree into
//! layers whose union above γ is exactly the core at γ.

use pctsp::decompose::RootedTree;
use pctsp::parity::{core, core_layers, odd_vertices};
use pctsp::rational::{rat, rat_int, Rat};

fn main() -> pctsp::Result<()> {
    let tree = RootedTree::new(
        0,
        &[
            (0, 1),
            (1, 2),
            (1, 3),
            (3, 4),
            (3, 5),
            (0, 6),
            (6, 7),
            (6, 8),
            (8, 9),
            (8, 10),
        ],
    )?;
    let y: Vec<Rat> = vec![
        rat_int(1),
        rat(1, 4),
        rat_int(1),
        rat(1, 4),
        rat(1, 2),
        rat(1, 4),
        rat(1, 2),
        rat_int(1),
        rat(1, 4),
        rat(1, 4),
        rat(1, 4),
    ];

    println!("layers (highest threshold first):");
    for layer in core_layers(&tree, 0, &y)? {
        println!("  eta = {:<4} edges {:?}", layer.threshold.to_string(), layer.edges);
    }

    for gamma in [rat_int(1), rat(1, 2), rat(1, 4)] {
        let c = core(&tree, 0, &y, &gamma)?;
        let edge_list: Vec<(usize, usize)> = c.edges().iter().copied().collect();
        let odd = odd_vertices(&edge_list);
        println!(
            "core at {}: {} vertices, {} edges, odd set {:?}",
            gamma,
            c.vertices().len(),
            edge_list.len(),
            odd,
        );
    }
    Ok(())
}
