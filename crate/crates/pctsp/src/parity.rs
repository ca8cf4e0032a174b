//! Core pruning, parity correction, and join-dominance certificates.
//!
//! Given a rooted tree T whose vertices carry y values, the core at
//! threshold γ is the minimal subtree spanning the root and every vertex
//! with y >= γ. Cores at the distinct y values slice the tree edges into
//! layers: layer i holds the edges that first appear at threshold η_i.
//!
//! Parity correction turns a core into a cycle: match its odd-degree
//! vertices at minimum cost, add the matching to the tree, walk an Eulerian
//! circuit, and shortcut repeat visits. The resulting tour visits exactly
//! the core's vertices.
//!
//! The matching cost is certified by a fractional point z built from the
//! solution and the included layers; z lies in the dominant of the
//! odd(core)-join polytope, so any feasibility check of z against odd cuts
//! bounds the matching cost by c·z.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};

use crate::decompose::RootedTree;
use crate::error::{Error, Result};
use crate::graph::{edge_index, edges as all_edges};
use crate::instance::{PctspInstance, Tour};
use crate::lp::FractionalSolution;
use crate::rational::{rat_int, Rat};

/// Matching size guard: subset DP is exponential in the odd-vertex count.
pub const MAX_MATCHING_VERTICES: usize = 20;

/// Cut enumeration guard for certificate checking.
pub const MAX_CERTIFICATE_VERTICES: usize = 16;

/// Minimal subtree of `tree` spanning the root and all vertices with
/// y >= gamma. May be the root-only tree.
pub fn core(tree: &RootedTree, root: usize, y: &[Rat], gamma: &Rat) -> Result<RootedTree> {
    if !tree.contains_vertex(root) {
        return Err(Error::Invariant("tree does not contain the root".into()));
    }
    // Parent pointers away from the root.
    let mut parent = vec![usize::MAX; y.len()];
    let mut seen = BTreeSet::from([root]);
    let mut stack = vec![root];
    while let Some(v) = stack.pop() {
        for &(a, b) in tree.edges() {
            let next = if a == v {
                b
            } else if b == v {
                a
            } else {
                continue;
            };
            if seen.insert(next) {
                parent[next] = v;
                stack.push(next);
            }
        }
    }

    let mut kept_vertices = BTreeSet::from([root]);
    let mut kept_edges = Vec::new();
    for &v in tree.vertices() {
        if v == root || &y[v] < gamma {
            continue;
        }
        let mut cur = v;
        while kept_vertices.insert(cur) {
            kept_edges.push((parent[cur], cur));
            cur = parent[cur];
        }
    }
    RootedTree::new(root, &kept_edges)
}

/// One slice of a tree's edges: the edges first reached at this threshold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layer {
    pub threshold: Rat,
    pub edges: Vec<(usize, usize)>,
}

/// Slices the tree edges by the distinct y values of its vertices, highest
/// first. The layers partition E[tree]; the union of layers with threshold
/// at least γ is exactly the edge set of the core at γ.
pub fn core_layers(tree: &RootedTree, root: usize, y: &[Rat]) -> Result<Vec<Layer>> {
    let mut thresholds: Vec<Rat> = tree
        .vertices()
        .iter()
        .map(|&v| y[v].clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    thresholds.reverse();

    let mut layers = Vec::new();
    let mut covered: BTreeSet<(usize, usize)> = BTreeSet::new();
    for threshold in thresholds {
        let c = core(tree, root, y, &threshold)?;
        let fresh: Vec<(usize, usize)> = c
            .edges()
            .iter()
            .filter(|e| !covered.contains(e))
            .copied()
            .collect();
        covered.extend(fresh.iter().copied());
        layers.push(Layer {
            threshold,
            edges: fresh,
        });
    }
    if covered.len() != tree.edges().len() {
        return Err(Error::Invariant("layers do not partition the tree".into()));
    }
    Ok(layers)
}

/// Vertices with odd degree in the given multigraph, ascending.
pub fn odd_vertices(edge_list: &[(usize, usize)]) -> Vec<usize> {
    let mut parity: std::collections::BTreeMap<usize, bool> = std::collections::BTreeMap::new();
    for &(u, v) in edge_list {
        *parity.entry(u).or_insert(false) ^= true;
        *parity.entry(v).or_insert(false) ^= true;
    }
    parity
        .into_iter()
        .filter_map(|(v, odd)| odd.then_some(v))
        .collect()
}

/// Minimum-cost perfect matching on the given vertices by subset DP.
/// Deterministic: ties keep the lexicographically earliest pairing.
pub fn min_cost_matching(
    inst: &PctspInstance,
    vertices: &[usize],
) -> Result<Vec<(usize, usize)>> {
    let k = vertices.len();
    if k % 2 != 0 {
        return Err(Error::Invariant(format!(
            "cannot perfectly match {k} vertices"
        )));
    }
    if k > MAX_MATCHING_VERTICES {
        return Err(Error::Unsupported(format!(
            "matching supports at most {MAX_MATCHING_VERTICES} vertices, got {k}"
        )));
    }
    if k == 0 {
        return Ok(Vec::new());
    }

    let full = 1usize << k;
    let mut dp: Vec<Option<Rat>> = vec![None; full];
    let mut choice = vec![usize::MAX; full];
    dp[0] = Some(Rat::zero());
    for mask in 1..full {
        if mask.count_ones() % 2 != 0 {
            continue;
        }
        let i = mask.trailing_zeros() as usize;
        for j in i + 1..k {
            if mask >> j & 1 == 0 {
                continue;
            }
            let rest = mask & !(1 << i) & !(1 << j);
            let Some(base) = &dp[rest] else { continue };
            let cand = base + inst.cost(vertices[i], vertices[j]);
            if dp[mask].as_ref().is_none_or(|cur| &cand < cur) {
                dp[mask] = Some(cand);
                choice[mask] = j;
            }
        }
    }

    let mut pairs = Vec::new();
    let mut mask = full - 1;
    while mask != 0 {
        let i = mask.trailing_zeros() as usize;
        let j = choice[mask];
        pairs.push((vertices[i], vertices[j]));
        mask &= !(1 << i) & !(1 << j);
    }
    pairs.reverse();
    Ok(pairs)
}

pub fn matching_cost(inst: &PctspInstance, pairs: &[(usize, usize)]) -> Rat {
    pairs.iter().map(|&(u, v)| inst.cost(u, v).clone()).sum()
}

/// Closed Eulerian walk from the root covering every multigraph edge.
fn euler_circuit(root: usize, edge_list: &[(usize, usize)]) -> Result<Vec<usize>> {
    if edge_list.is_empty() {
        return Ok(vec![root]);
    }
    let max_v = edge_list
        .iter()
        .map(|&(u, v)| u.max(v))
        .max()
        .unwrap()
        .max(root);
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); max_v + 1];
    for (id, &(u, v)) in edge_list.iter().enumerate() {
        adj[u].push((v, id));
        adj[v].push((u, id));
    }
    if adj.iter().any(|a| a.len() % 2 != 0) {
        return Err(Error::Invariant("odd degree in parity-corrected graph".into()));
    }
    if adj[root].is_empty() {
        return Err(Error::Invariant("root is isolated from the tour edges".into()));
    }

    let mut used = vec![false; edge_list.len()];
    let mut ptr = vec![0usize; max_v + 1];
    let mut stack = vec![root];
    let mut circuit = Vec::new();
    while let Some(&v) = stack.last() {
        while ptr[v] < adj[v].len() && used[adj[v][ptr[v]].1] {
            ptr[v] += 1;
        }
        if ptr[v] == adj[v].len() {
            circuit.push(v);
            stack.pop();
        } else {
            let (to, id) = adj[v][ptr[v]];
            used[id] = true;
            stack.push(to);
        }
    }
    if used.iter().any(|&u| !u) {
        return Err(Error::Invariant("tour edges are disconnected".into()));
    }
    Ok(circuit)
}

/// Shortcuts a closed walk to a tour by keeping first visits. The metric
/// triangle inequality guarantees no cost increase.
pub fn shortcut(circuit: &[usize]) -> Tour {
    let mut seen = BTreeSet::new();
    let mut order = Vec::new();
    for &v in circuit {
        if seen.insert(v) {
            order.push(v);
        }
    }
    Tour { order }
}

/// A parity-corrected tree turned into a tour.
#[derive(Debug, Clone)]
pub struct CorrectedTour {
    pub tour: Tour,
    pub matching: Vec<(usize, usize)>,
    pub tree_cost: Rat,
    pub matching_cost: Rat,
}

/// Matches the tree's odd vertices, walks the Eulerian circuit of tree
/// plus matching, and shortcuts it. The tour visits exactly the tree's
/// vertices and costs at most tree_cost + matching_cost.
pub fn tour_through_tree(inst: &PctspInstance, tree: &RootedTree) -> Result<CorrectedTour> {
    let root = inst.root();
    if !tree.contains_vertex(root) {
        return Err(Error::Invariant("tree does not contain the root".into()));
    }
    let tree_edges: Vec<(usize, usize)> = tree.edges().iter().copied().collect();
    let odd = odd_vertices(&tree_edges);
    let matching = min_cost_matching(inst, &odd)?;
    let mut multi = tree_edges.clone();
    multi.extend(matching.iter().copied());
    let circuit = euler_circuit(root, &multi)?;
    let tour = shortcut(&circuit);
    debug_assert_eq!(
        tour.order.iter().copied().collect::<BTreeSet<_>>(),
        tree.vertices().iter().copied().collect::<BTreeSet<_>>()
    );
    let tree_cost = tree_edges.iter().map(|&(u, v)| inst.cost(u, v).clone()).sum();
    let matching_cost = matching_cost(inst, &matching);
    Ok(CorrectedTour {
        tour,
        matching,
        tree_cost,
        matching_cost,
    })
}

/// Doubles every tree edge and shortcuts the Eulerian circuit; the classic
/// 2-approximation route, used as a baseline.
pub fn double_tree_tour(inst: &PctspInstance, tree: &RootedTree) -> Result<Tour> {
    let mut multi: Vec<(usize, usize)> = tree.edges().iter().copied().collect();
    multi.extend(tree.edges().iter().copied());
    let circuit = euler_circuit(inst.root(), &multi)?;
    Ok(shortcut(&circuit))
}

/// A fractional point intended to dominate the odd(core)-join polytope:
/// z = x / (3 - δ) + Σ over included layers of (1 - 2 η_i / (3 - δ)) χ^{E_i}.
#[derive(Debug, Clone)]
pub struct JoinCertificate {
    pub n: usize,
    pub root: usize,
    pub z: Vec<Rat>,
    /// Parity reference: the core's edges (union of included layers).
    pub core_edges: Vec<(usize, usize)>,
}

/// Builds the certificate from the (post-split) solution, the full layer
/// list of a tree, the split threshold (a rational lower bound when the
/// threshold itself is irrational), and the prune threshold γ.
pub fn build_certificate(
    sol: &FractionalSolution,
    layers: &[Layer],
    delta_low: &Rat,
    gamma: &Rat,
) -> Result<JoinCertificate> {
    if !delta_low.is_positive() || delta_low >= &Rat::one() {
        return Err(Error::Domain(format!(
            "split threshold {delta_low} outside (0, 1)"
        )));
    }
    let denom = rat_int(3) - delta_low;
    let scale = Rat::one() / &denom;
    let mut z: Vec<Rat> = sol.x.iter().map(|v| v * &scale).collect();
    let mut core_edges = Vec::new();
    for layer in layers {
        if &layer.threshold < gamma {
            continue;
        }
        let coeff = Rat::one() - rat_int(2) * &layer.threshold / &denom;
        if coeff.is_negative() {
            return Err(Error::Invariant(format!(
                "negative layer coefficient at threshold {}",
                layer.threshold
            )));
        }
        for &(u, v) in &layer.edges {
            z[edge_index(sol.n, u, v)] += &coeff;
            core_edges.push((u, v));
        }
    }
    core_edges.sort_unstable();
    Ok(JoinCertificate {
        n: sol.n,
        root: sol.root,
        z,
        core_edges,
    })
}

impl JoinCertificate {
    pub fn cost(&self, inst: &PctspInstance) -> Rat {
        let mut total = Rat::zero();
        for (u, v) in all_edges(self.n) {
            let val = &self.z[edge_index(self.n, u, v)];
            if !val.is_zero() {
                total += val * inst.cost(u, v);
            }
        }
        total
    }

    fn cut_value(&self, in_set: &[bool]) -> Rat {
        let mut total = Rat::zero();
        for (u, v) in all_edges(self.n) {
            if in_set[u] != in_set[v] {
                total += &self.z[edge_index(self.n, u, v)];
            }
        }
        total
    }
}

/// Exhaustively checks that z(δ(S)) >= 1 for every S avoiding the root
/// with |S ∩ odd(core)| odd (equivalently, |δ_core(S)| odd). Returns a
/// violating S or None. Complement sets are covered implicitly.
pub fn check_join_dominant(cert: &JoinCertificate) -> Result<Option<Vec<bool>>> {
    let n = cert.n;
    if n > MAX_CERTIFICATE_VERTICES {
        return Err(Error::Unsupported(format!(
            "certificate check supports at most {MAX_CERTIFICATE_VERTICES} vertices, got {n}"
        )));
    }
    if cert.z.iter().any(|v| v.is_negative()) {
        return Err(Error::Invariant("certificate has negative entries".into()));
    }
    let odd = odd_vertices(&cert.core_edges);
    let mut is_odd = vec![false; n];
    for v in odd {
        is_odd[v] = true;
    }
    let others: Vec<usize> = (0..n).filter(|&v| v != cert.root).collect();
    let one = Rat::one();
    for mask in 1u64..(1 << others.len()) {
        let mut in_set = vec![false; n];
        let mut parity = false;
        for (i, &v) in others.iter().enumerate() {
            if mask >> i & 1 == 1 {
                in_set[v] = true;
                parity ^= is_odd[v];
            }
        }
        if parity && cert.cut_value(&in_set) < one {
            return Ok(Some(in_set));
        }
    }
    Ok(None)
}
