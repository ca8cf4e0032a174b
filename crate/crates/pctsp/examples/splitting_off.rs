//! Splitting a low-prize vertex out of a fractional solution. Every move
//! shifts mass x_va, x_vb onto the bypass edge ab (or drops a root cycle),
//! keeps all cut constraints, and never increases c·x. The recorded steps
//! replay backwards to the untouched input.

use num_traits::{Signed, Zero};
use pctsp::instance::{generate_euclidean, Tour};
use pctsp::lp::{verify_feasibility, FractionalSolution};
use pctsp::rational::{rat, Rat};
use pctsp::splitting::{split_vertex, undo_split};

fn main() -> pctsp::Result<()> {
    let inst = generate_euclidean(7, 99)?;

    // Mix two tours so that several prizes are genuinely fractional.
    let a = FractionalSolution::tour_incidence(&inst, &Tour { order: vec![0, 1, 2, 3, 4] })?;
    let b = FractionalSolution::tour_incidence(&inst, &Tour { order: vec![0, 2, 5, 6] })?;
    let half = rat(1, 2);
    let x: Vec<Rat> = a.x.iter().zip(&b.x).map(|(p, q)| (p + q) * &half).collect();
    let y: Vec<Rat> = a.y.iter().zip(&b.y).map(|(p, q)| (p + q) * &half).collect();
    let sol = FractionalSolution::new(&inst, x, y);

    let v = (0..inst.n())
        .filter(|&u| u != inst.root() && sol.y[u].is_positive())
        .min_by_key(|&u| sol.y[u].clone())
        .expect("some vertex has fractional prize");
    println!("splitting vertex {v} with y = {}", sol.y[v]);
    println!("edge cost before: {}", sol.edge_cost(&inst));

    let (after, steps) = split_vertex(&inst, &sol, v)?;
    for step in &steps {
        if step.is_drop() {
            println!("  drop  {} of the root cycle at {}", step.amount, step.vertex);
        } else {
            println!(
                "  split {} from ({}, {}) and ({}, {}) onto ({}, {})",
                step.amount, step.vertex, step.a, step.vertex, step.b, step.a, step.b
            );
        }
    }
    println!("edge cost after:  {}", after.edge_cost(&inst));
    assert!(after.y[v].is_zero() && after.degree(v).is_zero());
    assert!(verify_feasibility(&inst, &after).ok());

    let mut back = after.clone();
    for step in steps.iter().rev() {
        back = undo_split(&inst, &back, step)?;
    }
    assert_eq!(back, sol);
    println!("backward replay restored the input exactly");
    Ok(())
}
