//! Convex decomposition of a feasible fractional solution into rooted trees.
//!
//! The output family satisfies three exact identities against the input
//! point (x, y): weights sum to 1, every vertex v lies in trees of total
//! weight exactly y_v, and every edge is used by trees of total weight at
//! most x_e.
//!
//! Construction: split vertices out one at a time (cheapest y first) until
//! nothing but the root is left, which trivially decomposes as the
//! root-only tree with weight 1. Then undo the split steps in reverse.
//! Undoing a proper split (v, u, w, ε) selects ε worth of trees using the
//! shortcut edge uw and reroutes them through v; trees that already contain
//! v instead swap in one of the two new edges and bank their weight as
//! "spare" coverage, as does the entire amount of an undone drop move.
//! After a vertex's steps are undone, spare coverage is drained by grafting
//! v as a leaf onto trees that contain the banked endpoint but not v.
//!
//! Every intermediate state along the split order is itself a valid
//! (solution, family) pair, exposed via [`decompose_levels`]; the solver
//! reuses one pass across all thresholds this way.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::instance::PctspInstance;
use crate::lp::{verify_feasibility, FractionalSolution};
use crate::rational::{rational_to_json, Rat};
use crate::splitting::{split_vertex, SplitStep};

/// Family size bound: at most this multiple of n^3 trees per family.
pub const TREE_COUNT_FACTOR: usize = 16;

/// A tree spanning a subset of vertices that includes the root.
/// Edges are normalized with the smaller endpoint first.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct RootedTree {
    vertices: BTreeSet<usize>,
    edges: BTreeSet<(usize, usize)>,
}

fn norm(u: usize, v: usize) -> (usize, usize) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

impl RootedTree {
    pub fn root_only(root: usize) -> Self {
        RootedTree {
            vertices: BTreeSet::from([root]),
            edges: BTreeSet::new(),
        }
    }

    /// Builds and validates a tree from its edge list; isolated vertices
    /// are impossible by construction, so the vertex set is derived.
    pub fn new(root: usize, edge_list: &[(usize, usize)]) -> Result<Self> {
        let mut vertices = BTreeSet::from([root]);
        let mut edges = BTreeSet::new();
        for &(u, v) in edge_list {
            if u == v {
                return Err(Error::Invariant(format!("loop edge at {u}")));
            }
            if !edges.insert(norm(u, v)) {
                return Err(Error::Invariant(format!("duplicate edge {u}-{v}")));
            }
            vertices.insert(u);
            vertices.insert(v);
        }
        let tree = RootedTree { vertices, edges };
        if !tree.is_valid(root) {
            return Err(Error::Invariant("edge list is not a tree on the root".into()));
        }
        Ok(tree)
    }

    pub fn vertices(&self) -> &BTreeSet<usize> {
        &self.vertices
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    pub fn contains_vertex(&self, v: usize) -> bool {
        self.vertices.contains(&v)
    }

    pub fn contains_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&norm(u, v))
    }

    /// Connected, acyclic, and rooted.
    pub fn is_valid(&self, root: usize) -> bool {
        if !self.vertices.contains(&root) {
            return false;
        }
        if self.edges.len() + 1 != self.vertices.len() {
            return false;
        }
        self.reachable_without(root, None).len() == self.vertices.len()
    }

    /// Vertices reachable from `start`, optionally treating one edge as
    /// removed.
    fn reachable_without(&self, start: usize, skip: Option<(usize, usize)>) -> BTreeSet<usize> {
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for &(a, b) in &self.edges {
                if Some((a, b)) == skip {
                    continue;
                }
                let next = if a == v {
                    b
                } else if b == v {
                    a
                } else {
                    continue;
                };
                if seen.insert(next) {
                    stack.push(next);
                }
            }
        }
        seen
    }

    fn add_leaf(&mut self, leaf: usize, attach: usize) {
        debug_assert!(!self.vertices.contains(&leaf));
        debug_assert!(self.vertices.contains(&attach));
        self.vertices.insert(leaf);
        self.edges.insert(norm(leaf, attach));
    }

    /// Replaces edge uw by the two edges su, sw, grafting s in the middle.
    fn reroute_through(&mut self, s: usize, u: usize, w: usize) {
        debug_assert!(!self.vertices.contains(&s));
        self.edges.remove(&norm(u, w));
        self.vertices.insert(s);
        self.edges.insert(norm(s, u));
        self.edges.insert(norm(s, w));
    }

    /// Replaces edge uw by the edge from s to whichever endpoint sits in
    /// the component not containing s. Returns the endpoint on s's own
    /// side, whose weight the caller banks as spare coverage.
    fn bridge_from(&mut self, s: usize, u: usize, w: usize) -> usize {
        debug_assert!(self.vertices.contains(&s));
        let side_u = self.reachable_without(u, Some(norm(u, w)));
        debug_assert!(!side_u.contains(&w), "uw sits on a cycle");
        self.edges.remove(&norm(u, w));
        if side_u.contains(&s) {
            self.edges.insert(norm(s, w));
            u
        } else {
            self.edges.insert(norm(s, u));
            w
        }
    }
}

/// Trees with positive rational weights, kept sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedTreeFamily {
    pub n: usize,
    pub root: usize,
    trees: Vec<(RootedTree, Rat)>,
}

impl WeightedTreeFamily {
    pub fn new(n: usize, root: usize, trees: Vec<(RootedTree, Rat)>) -> Self {
        let mut merged: BTreeMap<RootedTree, Rat> = BTreeMap::new();
        for (tree, weight) in trees {
            if !weight.is_zero() {
                *merged.entry(tree).or_insert_with(Rat::zero) += weight;
            }
        }
        WeightedTreeFamily {
            n,
            root,
            trees: merged.into_iter().collect(),
        }
    }

    pub fn trees(&self) -> &[(RootedTree, Rat)] {
        &self.trees
    }

    pub fn len(&self) -> usize {
        self.trees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trees.is_empty()
    }

    pub fn total_weight(&self) -> Rat {
        self.trees.iter().map(|(_, w)| w).sum()
    }

    pub fn vertex_coverage(&self, v: usize) -> Rat {
        self.trees
            .iter()
            .filter(|(t, _)| t.contains_vertex(v))
            .map(|(_, w)| w)
            .sum()
    }

    pub fn edge_usage(&self, u: usize, v: usize) -> Rat {
        self.trees
            .iter()
            .filter(|(t, _)| t.contains_edge(u, v))
            .map(|(_, w)| w)
            .sum()
    }

    /// Exact identity check against a fractional point: unit total weight,
    /// valid rooted trees, vertex coverage equal to y, edge usage bounded
    /// by x, and family size within [`TREE_COUNT_FACTOR`] n^3.
    pub fn check_identities(&self, sol: &FractionalSolution) -> Result<()> {
        let fail = |msg: String| Err(Error::Invariant(msg));
        if self.n != sol.n || self.root != sol.root {
            return fail("family and solution shapes differ".into());
        }
        if !self.total_weight().is_one() {
            return fail(format!("total weight {} is not 1", self.total_weight()));
        }
        for (tree, weight) in &self.trees {
            if !weight.is_positive() {
                return fail(format!("non-positive weight {weight}"));
            }
            if !tree.is_valid(self.root) {
                return fail(format!("invalid tree {tree:?}"));
            }
            if let Some(&v) = tree.vertices.iter().next_back() {
                if v >= self.n {
                    return fail(format!("vertex {v} out of range"));
                }
            }
        }
        for v in 0..self.n {
            let cov = self.vertex_coverage(v);
            if cov != sol.y[v] {
                return fail(format!("coverage {cov} of vertex {v} != y = {}", sol.y[v]));
            }
        }
        let mut usage: BTreeMap<(usize, usize), Rat> = BTreeMap::new();
        for (tree, weight) in &self.trees {
            for &e in &tree.edges {
                *usage.entry(e).or_insert_with(Rat::zero) += weight;
            }
        }
        for ((u, v), used) in usage {
            if &used > sol.x(u, v) {
                return fail(format!("edge {u}-{v} usage {used} exceeds x = {}", sol.x(u, v)));
            }
        }
        let cap = TREE_COUNT_FACTOR * self.n * self.n * self.n;
        if self.len() > cap {
            return fail(format!("family has {} trees, cap {cap}", self.len()));
        }
        Ok(())
    }

    /// Mean tree cost: Σ_T μ_T c(E(T)).
    pub fn expected_cost(&self, inst: &PctspInstance) -> Rat {
        let mut total = Rat::zero();
        for (tree, weight) in &self.trees {
            let mut c = Rat::zero();
            for &(u, v) in &tree.edges {
                c += inst.cost(u, v);
            }
            total += weight * c;
        }
        total
    }

    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "root": self.root,
            "trees": self
                .trees
                .iter()
                .map(|(tree, weight)| {
                    json!({
                        "weight": rational_to_json(weight),
                        "vertices": tree.vertices.iter().collect::<Vec<_>>(),
                        "edges": tree.edges.iter().map(|&(u, v)| json!([u, v])).collect::<Vec<_>>(),
                    })
                })
                .collect::<Vec<_>>(),
        })
    }
}

/// One prefix state of the split chain: the fractional solution after the
/// first k splits together with a tree family decomposing it exactly.
#[derive(Debug, Clone)]
pub struct LevelEntry {
    pub solution: FractionalSolution,
    pub family: WeightedTreeFamily,
}

/// The full split chain. `levels[k]` decomposes the solution obtained by
/// splitting off `order[..k]`; `levels[0]` decomposes the input itself.
#[derive(Debug, Clone)]
pub struct DecompositionLevels {
    /// Split order: support vertices sorted by increasing (y, index).
    pub order: Vec<usize>,
    /// Original y value of each vertex in `order`.
    pub order_y: Vec<Rat>,
    pub levels: Vec<LevelEntry>,
}

impl DecompositionLevels {
    /// Index of the level where exactly the vertices with y < threshold
    /// have been split away.
    pub fn level_below(&self, threshold: &Rat) -> usize {
        self.order_y.iter().take_while(|y| *y < threshold).count()
    }
}

/// Decomposes a feasible fractional solution into a weighted tree family
/// satisfying the exact identities of [`WeightedTreeFamily::check_identities`].
pub fn decompose(inst: &PctspInstance, sol: &FractionalSolution) -> Result<WeightedTreeFamily> {
    let mut levels = decompose_levels(inst, sol)?;
    Ok(levels.levels.swap_remove(0).family)
}

/// Runs the split chain once and decomposes every prefix state.
pub fn decompose_levels(
    inst: &PctspInstance,
    sol: &FractionalSolution,
) -> Result<DecompositionLevels> {
    let report = verify_feasibility(inst, sol);
    if !report.ok() {
        return Err(Error::Domain(format!(
            "decomposition needs a feasible fractional point:\n{report}"
        )));
    }

    let mut order: Vec<usize> = (0..sol.n)
        .filter(|&v| v != sol.root && !sol.y[v].is_zero())
        .collect();
    order.sort_by(|&p, &q| sol.y[p].cmp(&sol.y[q]).then(p.cmp(&q)));
    let order_y: Vec<Rat> = order.iter().map(|&v| sol.y[v].clone()).collect();

    // Forward pass: split each vertex fully, keeping every prefix solution.
    let mut solutions = vec![sol.clone()];
    let mut steps_per_level: Vec<Vec<SplitStep>> = Vec::new();
    for &v in &order {
        let (next, steps) = split_vertex(inst, solutions.last().unwrap(), v)?;
        solutions.push(next);
        steps_per_level.push(steps);
    }
    let bottom = solutions.last().unwrap();
    if bottom.x.iter().any(|e| !e.is_zero()) {
        return Err(Error::Invariant(
            "edge mass survived the complete split chain".into(),
        ));
    }

    // Backward pass: undo one vertex per level, maintaining the family.
    let mut families = vec![WeightedTreeFamily::new(
        sol.n,
        sol.root,
        vec![(RootedTree::root_only(sol.root), Rat::one())],
    )];
    for k in (0..order.len()).rev() {
        let undone = undo_level(
            sol.n,
            sol.root,
            order[k],
            &steps_per_level[k],
            families.last().unwrap(),
        )?;
        debug_assert!(undone.check_identities(&solutions[k]).is_ok());
        families.push(undone);
    }
    families.reverse();

    let levels = solutions
        .into_iter()
        .zip(families)
        .map(|(solution, family)| LevelEntry { solution, family })
        .collect();
    Ok(DecompositionLevels {
        order,
        order_y,
        levels,
    })
}

/// Picks trees matching `pred` with total weight exactly `amount`, heaviest
/// first, splitting the last pick in two if needed. Returns the indices of
/// the picked entries plus any unmet deficit.
fn pick_weight(
    trees: &mut Vec<(RootedTree, Rat)>,
    amount: &Rat,
    pred: impl Fn(&RootedTree) -> bool,
) -> (Vec<usize>, Rat) {
    let mut candidates: Vec<usize> = (0..trees.len())
        .filter(|&i| trees[i].1.is_positive() && pred(&trees[i].0))
        .collect();
    candidates.sort_by(|&i, &j| trees[j].1.cmp(&trees[i].1).then(i.cmp(&j)));

    let mut picked = Vec::new();
    let mut remaining = amount.clone();
    for i in candidates {
        if remaining.is_zero() {
            break;
        }
        let weight = trees[i].1.clone();
        if weight <= remaining {
            picked.push(i);
            remaining -= weight;
        } else {
            // Split: keep the needed part here, push the leftover copy.
            let leftover = &weight - &remaining;
            trees[i].1 = remaining.clone();
            trees.push((trees[i].0.clone(), leftover));
            picked.push(i);
            remaining = Rat::zero();
        }
    }
    (picked, remaining)
}

/// Undoes all split steps of one vertex, turning a family for the
/// post-split solution into one for the pre-split solution.
fn undo_level(
    n: usize,
    root: usize,
    s: usize,
    steps: &[SplitStep],
    family: &WeightedTreeFamily,
) -> Result<WeightedTreeFamily> {
    let mut trees: Vec<(RootedTree, Rat)> = family.trees().to_vec();
    let mut spare: BTreeMap<usize, Rat> = BTreeMap::new();

    for step in steps.iter().rev() {
        debug_assert_eq!(step.vertex, s);
        if step.is_drop() {
            *spare.entry(root).or_insert_with(Rat::zero) += &step.amount;
            continue;
        }
        let (u, w) = (step.a, step.b);
        let (picked, deficit) =
            pick_weight(&mut trees, &step.amount, |t| t.contains_edge(u, w));
        for i in picked {
            if trees[i].0.contains_vertex(s) {
                let weight = trees[i].1.clone();
                let banked = trees[i].0.bridge_from(s, u, w);
                *spare.entry(banked).or_insert_with(Rat::zero) += weight;
            } else {
                trees[i].0.reroute_through(s, u, w);
            }
        }
        if deficit.is_positive() {
            *spare.entry(u).or_insert_with(Rat::zero) += deficit;
        }
    }

    for (w, need) in spare {
        if need.is_zero() {
            continue;
        }
        let (picked, deficit) = pick_weight(&mut trees, &need, |t| {
            t.contains_vertex(w) && !t.contains_vertex(s)
        });
        if deficit.is_positive() {
            return Err(Error::Invariant(format!(
                "drain at {w} short by {deficit} while restoring {s}"
            )));
        }
        for i in picked {
            trees[i].0.add_leaf(s, w);
        }
    }

    Ok(WeightedTreeFamily::new(n, root, trees))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::edge_index;
    use crate::instance::{generate_euclidean, two_vertex_instance};
    use crate::rational::{rat, rat_int};
    use crate::testutil::random_fractional_point;

    fn manual_solution(
        inst: &PctspInstance,
        edges: &[(usize, usize, Rat)],
        y: Vec<Rat>,
    ) -> FractionalSolution {
        let n = inst.n();
        let mut x = vec![Rat::zero(); crate::graph::edge_count(n)];
        for (u, v, val) in edges {
            x[edge_index(n, *u, *v)] = val.clone();
        }
        FractionalSolution::new(inst, x, y)
    }

    #[test]
    fn two_vertex_full_visit_gives_spanning_tree() {
        let inst = two_vertex_instance(rat_int(1), rat_int(3));
        let sol = manual_solution(&inst, &[(0, 1, rat_int(2))], vec![rat_int(1); 2]);
        let family = decompose(&inst, &sol).unwrap();
        family.check_identities(&sol).unwrap();
        assert_eq!(family.len(), 1);
        let (tree, weight) = &family.trees()[0];
        assert!(weight.is_one());
        assert!(tree.contains_edge(0, 1));
    }

    #[test]
    fn two_vertex_half_visit_splits_weight() {
        let inst = two_vertex_instance(rat_int(1), rat_int(3));
        let sol = manual_solution(&inst, &[(0, 1, rat_int(1))], vec![rat_int(1), rat(1, 2)]);
        let family = decompose(&inst, &sol).unwrap();
        family.check_identities(&sol).unwrap();
        assert_eq!(family.len(), 2);
        // Canonical order puts the root-only tree first.
        assert_eq!(family.trees()[0].0, RootedTree::root_only(0));
        assert_eq!(family.trees()[0].1, rat(1, 2));
        assert!(family.trees()[1].0.contains_edge(0, 1));
        assert_eq!(family.trees()[1].1, rat(1, 2));
    }

    #[test]
    fn triangle_half_decomposes_into_path_and_root() {
        let inst = generate_euclidean(3, 1).unwrap();
        let sol = manual_solution(
            &inst,
            &[(0, 1, rat(1, 2)), (1, 2, rat(1, 2)), (0, 2, rat(1, 2))],
            vec![rat_int(1), rat(1, 2), rat(1, 2)],
        );
        let family = decompose(&inst, &sol).unwrap();
        family.check_identities(&sol).unwrap();
        assert_eq!(family.len(), 2);
        assert_eq!(family.trees()[0].0, RootedTree::root_only(0));
        let path = RootedTree::new(0, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(family.trees()[1].0, path);
        assert_eq!(family.trees()[1].1, rat(1, 2));
    }

    #[test]
    fn identities_hold_at_every_level_on_random_points() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for _ in 0..8 {
            let n = rng.gen_range(4..8usize);
            let inst = generate_euclidean(n, rng.gen()).unwrap();
            let sol = random_fractional_point(&inst, &mut rng);
            let levels = decompose_levels(&inst, &sol).unwrap();
            assert_eq!(levels.levels.len(), levels.order.len() + 1);
            for entry in &levels.levels {
                entry.family.check_identities(&entry.solution).unwrap();
            }
            assert_eq!(levels.levels[0].solution, sol);
        }
    }

    #[test]
    fn prefix_level_equals_manual_split_then_decompose() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(29);
        for _ in 0..5 {
            let n = rng.gen_range(4..7usize);
            let inst = generate_euclidean(n, rng.gen()).unwrap();
            let sol = random_fractional_point(&inst, &mut rng);
            let levels = decompose_levels(&inst, &sol).unwrap();
            if levels.order.len() < 2 {
                continue;
            }
            let k = levels.order.len() / 2;
            // Split the first k vertices by hand, then decompose fresh.
            let mut cur = sol.clone();
            for &v in &levels.order[..k] {
                cur = crate::splitting::split_vertex(&inst, &cur, v).unwrap().0;
            }
            assert_eq!(cur, levels.levels[k].solution);
            let fresh = decompose(&inst, &cur).unwrap();
            assert_eq!(fresh, levels.levels[k].family);
        }
    }

    #[test]
    fn level_below_matches_threshold_semantics() {
        let inst = generate_euclidean(3, 1).unwrap();
        let sol = manual_solution(
            &inst,
            &[(0, 1, rat(1, 2)), (1, 2, rat(1, 2)), (0, 2, rat(1, 2))],
            vec![rat_int(1), rat(1, 2), rat(1, 2)],
        );
        let levels = decompose_levels(&inst, &sol).unwrap();
        assert_eq!(levels.order, vec![1, 2]);
        assert_eq!(levels.level_below(&rat(1, 4)), 0);
        assert_eq!(levels.level_below(&rat(1, 2)), 0);
        assert_eq!(levels.level_below(&rat(3, 4)), 2);
        assert_eq!(levels.level_below(&rat_int(1)), 2);
    }

    #[test]
    fn rejects_infeasible_input() {
        let inst = generate_euclidean(3, 1).unwrap();
        // y_2 = 1 but no incident edge mass: cut constraints fail.
        let sol = manual_solution(
            &inst,
            &[(0, 1, rat_int(2))],
            vec![rat_int(1), rat_int(1), rat_int(1)],
        );
        assert!(matches!(
            decompose(&inst, &sol),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn family_json_roundtrips_shape() {
        let inst = two_vertex_instance(rat_int(1), rat_int(3));
        let sol = manual_solution(&inst, &[(0, 1, rat_int(1))], vec![rat_int(1), rat(1, 2)]);
        let family = decompose(&inst, &sol).unwrap();
        let v = family.to_json();
        assert_eq!(v["trees"].as_array().unwrap().len(), family.len());
        assert_eq!(v["root"], 0);
    }

    #[test]
    fn rejects_invalid_tree_edge_lists() {
        assert!(RootedTree::new(0, &[(1, 2)]).is_err()); // root isolated
        assert!(RootedTree::new(0, &[(0, 1), (0, 1)]).is_err()); // duplicate
        assert!(RootedTree::new(0, &[(0, 0)]).is_err()); // loop
        assert!(RootedTree::new(0, &[(0, 1), (1, 2), (0, 2)]).is_err()); // cycle
        assert!(RootedTree::new(0, &[(0, 1), (2, 3)]).is_err()); // disconnected
    }
}
