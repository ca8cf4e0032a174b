//! Admissible splitting-off: removing a vertex from a fractional solution
//! without violating any cut constraint.
//!
//! A proper split at v along neighbors (a, b) moves mass off the two edges
//! va, vb onto the shortcut edge ab and lowers y_v by the same amount. A
//! drop move (a = b = root) simply removes va-mass toward the root; it is
//! legal only there because the root degree constraint is an inequality.
//! Either way all degree constraints are preserved, so admissibility is
//! about the cut family x(δ(S)) >= 2 y_u alone.
//!
//! A cut S (root outside) loses value only in two patterns: S contains v
//! but neither a nor b, or S contains both a and b but not v. For a drop,
//! every S containing v loses. The largest admissible amount is therefore a
//! minimum over cut slacks, computed here with one or two max-flow calls
//! per other vertex u.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::instance::PctspInstance;
use crate::lp::FractionalSolution;
use crate::maxflow::min_cut_grouped;
use crate::rational::{rat_int, Rat};

/// One splitting-off move. `a == b` encodes a drop move at the root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitStep {
    pub vertex: usize,
    pub a: usize,
    pub b: usize,
    pub amount: Rat,
}

impl SplitStep {
    pub fn is_drop(&self) -> bool {
        self.a == self.b
    }
}

fn check_step_shape(sol: &FractionalSolution, step: &SplitStep) -> Result<()> {
    let ok = step.vertex < sol.n
        && step.a < sol.n
        && step.b < sol.n
        && step.vertex != sol.root
        && step.vertex != step.a
        && step.vertex != step.b
        && step.amount.is_positive()
        && (!step.is_drop() || step.a == sol.root);
    if ok {
        Ok(())
    } else {
        Err(Error::Invariant(format!("malformed split step {step:?}")))
    }
}

/// Applies one split move, returning a fresh solution. Fails if any edge
/// value would go negative.
pub fn apply_split(
    inst: &PctspInstance,
    sol: &FractionalSolution,
    step: &SplitStep,
) -> Result<FractionalSolution> {
    check_step_shape(sol, step)?;
    let mut x = sol.x.clone();
    let mut y = sol.y.clone();
    let v = step.vertex;
    if step.is_drop() {
        let e = crate::graph::edge_index(sol.n, v, sol.root);
        x[e] -= rat_int(2) * &step.amount;
        if x[e].is_negative() {
            return Err(Error::Invariant("drop exceeds root edge value".into()));
        }
    } else {
        let ea = crate::graph::edge_index(sol.n, v, step.a);
        let eb = crate::graph::edge_index(sol.n, v, step.b);
        let eab = crate::graph::edge_index(sol.n, step.a, step.b);
        x[ea] -= &step.amount;
        x[eb] -= &step.amount;
        x[eab] += &step.amount;
        if x[ea].is_negative() || x[eb].is_negative() {
            return Err(Error::Invariant("split exceeds edge value".into()));
        }
    }
    y[v] -= &step.amount;
    if y[v].is_negative() {
        return Err(Error::Invariant("split exceeds y value".into()));
    }
    Ok(FractionalSolution::new(inst, x, y))
}

/// Exact inverse of [`apply_split`].
pub fn undo_split(
    inst: &PctspInstance,
    sol: &FractionalSolution,
    step: &SplitStep,
) -> Result<FractionalSolution> {
    check_step_shape(sol, step)?;
    let mut x = sol.x.clone();
    let mut y = sol.y.clone();
    let v = step.vertex;
    if step.is_drop() {
        let e = crate::graph::edge_index(sol.n, v, sol.root);
        x[e] += rat_int(2) * &step.amount;
    } else {
        let ea = crate::graph::edge_index(sol.n, v, step.a);
        let eb = crate::graph::edge_index(sol.n, v, step.b);
        let eab = crate::graph::edge_index(sol.n, step.a, step.b);
        x[ea] += &step.amount;
        x[eb] += &step.amount;
        x[eab] -= &step.amount;
        if x[eab].is_negative() {
            return Err(Error::Invariant("undo exceeds shortcut edge value".into()));
        }
    }
    y[v] += &step.amount;
    Ok(FractionalSolution::new(inst, x, y))
}

/// Largest admissible amount for splitting at v along (a, b), or for the
/// drop move when a == b == root.
///
/// For each other vertex u with y_u > 0 the binding requirement is
/// x(δ(S)) - 2ε >= 2 y_u over cuts S that lose value and contain u, so
/// ε <= (mincut - 2 y_u) / 2. The two loss patterns translate to min cuts
/// separating {v, u} from {r, a, b} and {a, b, u} from {r, v}. Early exit:
/// once a flow reaches the current bound the vertex cannot tighten it.
pub fn max_admissible(sol: &FractionalSolution, v: usize, a: usize, b: usize) -> Rat {
    let n = sol.n;
    let root = sol.root;
    let drop = a == b;
    debug_assert!(v != root && v != a && v != b);
    debug_assert!(!drop || a == root);

    let mut bound = if drop {
        sol.x(v, root) / rat_int(2)
    } else {
        sol.x(v, a).min(sol.x(v, b)).clone()
    };
    if bound.is_zero() {
        return bound;
    }
    let support = sol.support_edges();
    let two = rat_int(2);

    for u in 0..n {
        if u == v || u == root || sol.y[u].is_zero() {
            continue;
        }
        let need = &sol.y[u] * &two;
        // Any cut at or above this value leaves u's slack no tighter than
        // the bound found so far.
        let limit = &need + &two * &bound;

        // Pattern 1: v inside, a, b and the root outside.
        if u != a && u != b {
            let mut sources = vec![root];
            if !drop {
                for &s in &[a, b] {
                    if !sources.contains(&s) {
                        sources.push(s);
                    }
                }
            }
            let (cut, _) = min_cut_grouped(n, &support, &sources, &[v, u], Some(&limit));
            if cut < limit {
                let slack = (&cut - &need) / &two;
                debug_assert!(!slack.is_negative(), "input violates cut for {u}");
                bound = bound.min(slack);
                if bound.is_zero() {
                    return bound;
                }
            }
        }

        // Pattern 2: a and b inside, v and the root outside. Vacuous for
        // drops and when the root is one of the split neighbors.
        if !drop && a != root && b != root {
            let mut sinks = vec![a, b];
            if !sinks.contains(&u) {
                sinks.push(u);
            }
            let (cut, _) = min_cut_grouped(n, &support, &[root, v], &sinks, Some(&limit));
            if cut < limit {
                let slack = (&cut - &need) / &two;
                debug_assert!(!slack.is_negative(), "input violates cut for {u}");
                bound = bound.min(slack);
                if bound.is_zero() {
                    return bound;
                }
            }
        }
    }
    bound
}

/// Splits vertex v completely out of the solution: afterwards y_v = 0 and v
/// has no incident edge mass. Returns the new solution and the steps taken.
///
/// Strategy: among neighbor pairs (drop last), greedily take the pair with
/// the largest immediately available mass and apply its maximum admissible
/// amount. Completeness of admissible splitting guarantees progress; an
/// iteration cap turns a violation of that into an error instead of a hang.
pub fn split_vertex(
    inst: &PctspInstance,
    sol: &FractionalSolution,
    v: usize,
) -> Result<(FractionalSolution, Vec<SplitStep>)> {
    if v == sol.root {
        return Err(Error::Invariant("cannot split the root".into()));
    }
    let mut cur = sol.clone();
    let mut steps: Vec<SplitStep> = Vec::new();
    let cap = 16 * sol.n * sol.n + 16;

    while !cur.y[v].is_zero() {
        if steps.len() > cap {
            return Err(Error::Invariant(format!(
                "splitting at {v} exceeded {cap} steps"
            )));
        }
        let neighbors: Vec<usize> = (0..cur.n)
            .filter(|&u| u != v && !cur.x(u, v).is_zero())
            .collect();
        if neighbors.is_empty() {
            return Err(Error::Invariant(format!(
                "y_{v} > 0 with no incident edge mass"
            )));
        }

        let mut pairs: Vec<(usize, usize)> = Vec::new();
        for i in 0..neighbors.len() {
            for j in i + 1..neighbors.len() {
                pairs.push((neighbors[i], neighbors[j]));
            }
        }
        pairs.sort_by(|&(a1, b1), &(a2, b2)| {
            let m1 = cur.x(v, a1).min(cur.x(v, b1));
            let m2 = cur.x(v, a2).min(cur.x(v, b2));
            m2.cmp(m1).then((a1, b1).cmp(&(a2, b2)))
        });

        let mut applied = false;
        for (a, b) in pairs {
            let eps = max_admissible(&cur, v, a, b);
            if eps.is_positive() {
                let step = SplitStep {
                    vertex: v,
                    a,
                    b,
                    amount: eps,
                };
                cur = apply_split(inst, &cur, &step)?;
                steps.push(step);
                applied = true;
                break;
            }
        }
        if !applied && !cur.x(v, cur.root).is_zero() {
            let eps = max_admissible(&cur, v, cur.root, cur.root);
            if eps.is_positive() {
                let step = SplitStep {
                    vertex: v,
                    a: cur.root,
                    b: cur.root,
                    amount: eps,
                };
                cur = apply_split(inst, &cur, &step)?;
                steps.push(step);
                applied = true;
            }
        }
        if !applied {
            return Err(Error::Invariant(format!(
                "no admissible split at {v}: complete splitting should exist"
            )));
        }
    }
    debug_assert!(cur.degree(v).is_zero());
    Ok((cur, steps))
}
