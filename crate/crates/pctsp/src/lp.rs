//! LP relaxation of prize-collecting TSP, solved exactly.
//!
//! Variables are edge values x and visit values y in [0, 1] with y fixed to 1
//! at the root. Constraints: degree equality x(δ(v)) = 2 y_v at every
//! non-root vertex, root degree at most 2, and the cut family
//! x(δ(S)) >= 2 y_v for all S avoiding the root and v in S. The objective is
//! c·x + π·(1 - y). The cut family is exponential, so we run row generation:
//! solve a restricted LP by exact simplex, separate violated cuts with
//! max-flow, repeat until none exist.

use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graph::{edge_count, edge_index, edges};
use crate::instance::{PctspInstance, Tour};
use crate::maxflow::min_cut_grouped;
use crate::rational::{rat_int, rational_to_json, Rat};
use crate::simplex::{solve as simplex_solve, Constraint, LinearProgram, Relation};

/// A fractional point of the relaxation over a complete graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FractionalSolution {
    pub n: usize,
    pub root: usize,
    /// Dense edge values in [`crate::graph::edge_index`] layout.
    pub x: Vec<Rat>,
    pub y: Vec<Rat>,
    /// c·x + π·(1 - y) for the instance it was built from.
    pub objective: Rat,
}

impl FractionalSolution {
    pub fn new(inst: &PctspInstance, x: Vec<Rat>, y: Vec<Rat>) -> Self {
        let mut sol = FractionalSolution {
            n: inst.n(),
            root: inst.root(),
            x,
            y,
            objective: Rat::zero(),
        };
        sol.objective = sol.objective_for(inst);
        sol
    }

    pub fn x(&self, u: usize, v: usize) -> &Rat {
        &self.x[edge_index(self.n, u, v)]
    }

    pub fn x_mut(&mut self, u: usize, v: usize) -> &mut Rat {
        &mut self.x[edge_index(self.n, u, v)]
    }

    /// x(δ(v)): total edge value incident to v.
    pub fn degree(&self, v: usize) -> Rat {
        let mut d = Rat::zero();
        for u in 0..self.n {
            if u != v {
                d += self.x(u, v);
            }
        }
        d
    }

    /// Support edges as (u, v, value) with u < v and value > 0.
    pub fn support_edges(&self) -> Vec<(usize, usize, Rat)> {
        edges(self.n)
            .filter_map(|(u, v)| {
                let val = self.x(u, v);
                (!val.is_zero()).then(|| (u, v, val.clone()))
            })
            .collect()
    }

    /// c·x over the instance costs.
    pub fn edge_cost(&self, inst: &PctspInstance) -> Rat {
        let mut total = Rat::zero();
        for (u, v) in edges(self.n) {
            let val = self.x(u, v);
            if !val.is_zero() {
                total += val * inst.cost(u, v);
            }
        }
        total
    }

    /// c·x + π·(1 - y).
    pub fn objective_for(&self, inst: &PctspInstance) -> Rat {
        let mut total = self.edge_cost(inst);
        for v in 0..self.n {
            total += inst.penalty(v) * &(Rat::one() - &self.y[v]);
        }
        total
    }

    /// x(δ(S)) for a membership vector S.
    pub fn cut_value(&self, in_set: &[bool]) -> Rat {
        let mut total = Rat::zero();
        for (u, v) in edges(self.n) {
            if in_set[u] != in_set[v] {
                total += self.x(u, v);
            }
        }
        total
    }

    /// The incidence vector of a tour is always feasible for the relaxation.
    pub fn tour_incidence(inst: &PctspInstance, tour: &Tour) -> Result<Self> {
        tour.validate(inst)?;
        let n = inst.n();
        let mut x = vec![Rat::zero(); edge_count(n)];
        let mut y = vec![Rat::zero(); n];
        for &v in &tour.order {
            y[v] = Rat::one();
        }
        let k = tour.order.len();
        if k == 2 {
            x[edge_index(n, tour.order[0], tour.order[1])] = rat_int(2);
        } else if k > 2 {
            for i in 0..k {
                let u = tour.order[i];
                let v = tour.order[(i + 1) % k];
                x[edge_index(n, u, v)] += Rat::one();
            }
        }
        Ok(FractionalSolution::new(inst, x, y))
    }

    /// JSON dump with exact rationals: support edges, y vector, objective.
    pub fn to_json(&self) -> Value {
        json!({
            "x": self
                .support_edges()
                .iter()
                .map(|(u, v, val)| json!([u, v, rational_to_json(val)]))
                .collect::<Vec<_>>(),
            "y": self.y.iter().map(rational_to_json).collect::<Vec<_>>(),
            "objective": rational_to_json(&self.objective),
        })
    }
}

/// A violated cut: S avoids the root, contains `vertex`, and
/// x(δ(S)) = `cut_value` < 2 y_vertex.
#[derive(Debug, Clone)]
pub struct CutViolation {
    pub in_set: Vec<bool>,
    pub vertex: usize,
    pub cut_value: Rat,
}

/// Finds a violated cut constraint via minimum r-v cuts, or None.
///
/// Scans vertices in index order and returns the first violation, so the
/// result is deterministic.
pub fn separate(sol: &FractionalSolution) -> Option<CutViolation> {
    separate_from(sol, 0)
}

fn separate_from(sol: &FractionalSolution, start: usize) -> Option<CutViolation> {
    let support = sol.support_edges();
    for v in start..sol.n {
        if v == sol.root || sol.y[v].is_zero() {
            continue;
        }
        let required = &sol.y[v] * rat_int(2);
        let (value, witness) =
            min_cut_grouped(sol.n, &support, &[sol.root], &[v], Some(&required));
        if value < required {
            let in_set = witness.expect("witness exists below the limit");
            debug_assert!(in_set[v] && !in_set[sol.root]);
            return Some(CutViolation {
                in_set,
                vertex: v,
                cut_value: value,
            });
        }
    }
    None
}

/// All violated cuts found in one sweep (at most one per vertex).
pub fn separate_all(sol: &FractionalSolution) -> Vec<CutViolation> {
    let mut found = Vec::new();
    let mut v = 0;
    while let Some(cut) = separate_from(sol, v) {
        v = cut.vertex + 1;
        found.push(cut);
    }
    found
}

/// One row-generation round recorded for diagnostics.
#[derive(Debug, Clone)]
pub struct RelaxationRound {
    pub objective: Rat,
    pub cuts_added: usize,
}

#[derive(Debug, Clone)]
pub struct RelaxationTrace {
    pub rounds: Vec<RelaxationRound>,
}

/// Solves the relaxation exactly by simplex plus cut row generation.
pub fn solve_relaxation(inst: &PctspInstance) -> Result<FractionalSolution> {
    solve_relaxation_traced(inst).map(|(sol, _)| sol)
}

pub fn solve_relaxation_traced(
    inst: &PctspInstance,
) -> Result<(FractionalSolution, RelaxationTrace)> {
    let n = inst.n();
    let root = inst.root();
    let m = edge_count(n);
    let x_var = |u: usize, v: usize| edge_index(n, u, v);
    let y_var = |v: usize| m + v;

    // Objective: c·x - π·y, plus the constant Σπ added back at the end.
    let mut objective = vec![Rat::zero(); m + n];
    for (u, v) in edges(n) {
        objective[x_var(u, v)] = inst.cost(u, v).clone();
    }
    for v in 0..n {
        objective[y_var(v)] = -inst.penalty(v).clone();
    }

    let mut constraints: Vec<Constraint> = Vec::new();
    for v in 0..n {
        if v == root {
            continue;
        }
        // Degree equality: x(δ(v)) - 2 y_v = 0.
        let mut coeffs: Vec<(usize, Rat)> = (0..n)
            .filter(|&u| u != v)
            .map(|u| (x_var(u, v), Rat::one()))
            .collect();
        coeffs.push((y_var(v), rat_int(-2)));
        constraints.push(Constraint {
            coeffs,
            rel: Relation::Eq,
            rhs: Rat::zero(),
        });
    }
    if n > 1 {
        constraints.push(Constraint {
            coeffs: (0..n)
                .filter(|&u| u != root)
                .map(|u| (x_var(u, root), Rat::one()))
                .collect(),
            rel: Relation::Le,
            rhs: rat_int(2),
        });
    }
    constraints.push(Constraint {
        coeffs: vec![(y_var(root), Rat::one())],
        rel: Relation::Eq,
        rhs: Rat::one(),
    });
    for v in 0..n {
        if v != root {
            constraints.push(Constraint {
                coeffs: vec![(y_var(v), Rat::one())],
                rel: Relation::Le,
                rhs: Rat::one(),
            });
        }
    }

    let mut trace = RelaxationTrace { rounds: Vec::new() };
    let mut seen_cuts: std::collections::HashSet<(Vec<bool>, usize)> =
        std::collections::HashSet::new();
    let round_cap = 64 + (1usize << n.min(16));
    loop {
        let lp = LinearProgram {
            num_vars: m + n,
            objective: objective.clone(),
            constraints: constraints.clone(),
        };
        let solved = simplex_solve(&lp)?;
        let x = solved.values[..m].to_vec();
        let y = solved.values[m..].to_vec();
        let sol = FractionalSolution::new(inst, x, y);

        let violations = separate_all(&sol);
        trace.rounds.push(RelaxationRound {
            objective: sol.objective.clone(),
            cuts_added: violations.len(),
        });
        if violations.is_empty() {
            return Ok((sol, trace));
        }
        if trace.rounds.len() > round_cap {
            return Err(Error::Invariant(
                "cut generation failed to converge".into(),
            ));
        }
        for cut in violations {
            // A repeated row would mean the simplex solution violated a
            // constraint that was already part of the LP.
            let key = (cut.in_set.clone(), cut.vertex);
            if !seen_cuts.insert(key) {
                return Err(Error::Invariant(
                    "separation returned an already-added cut".into(),
                ));
            }
            let mut coeffs: Vec<(usize, Rat)> = edges(n)
                .filter(|&(u, v)| cut.in_set[u] != cut.in_set[v])
                .map(|(u, v)| (x_var(u, v), Rat::one()))
                .collect();
            coeffs.push((y_var(cut.vertex), rat_int(-2)));
            constraints.push(Constraint {
                coeffs,
                rel: Relation::Ge,
                rhs: Rat::zero(),
            });
        }
    }
}

/// Per-family exact feasibility report for a fractional point.
#[derive(Debug, Clone)]
pub struct FeasibilityReport {
    pub nonneg_ok: bool,
    pub degree_ok: bool,
    pub root_degree_ok: bool,
    pub y_bounds_ok: bool,
    pub root_y_ok: bool,
    pub cuts_ok: bool,
    /// A violated (S, v) pair when cuts_ok is false.
    pub cut_witness: Option<(Vec<bool>, usize)>,
    pub objective_consistent: bool,
}

impl FeasibilityReport {
    pub fn ok(&self) -> bool {
        self.nonneg_ok
            && self.degree_ok
            && self.root_degree_ok
            && self.y_bounds_ok
            && self.root_y_ok
            && self.cuts_ok
            && self.objective_consistent
    }
}

impl std::fmt::Display for FeasibilityReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mark = |ok: bool| if ok { "ok" } else { "VIOLATED" };
        writeln!(f, "nonnegativity:        {}", mark(self.nonneg_ok))?;
        writeln!(f, "degree equalities:    {}", mark(self.degree_ok))?;
        writeln!(f, "root degree <= 2:     {}", mark(self.root_degree_ok))?;
        writeln!(f, "y within [0, 1]:      {}", mark(self.y_bounds_ok))?;
        writeln!(f, "y at root = 1:        {}", mark(self.root_y_ok))?;
        writeln!(f, "cut constraints:      {}", mark(self.cuts_ok))?;
        if let Some((set, v)) = &self.cut_witness {
            let members: Vec<usize> =
                (0..set.len()).filter(|&u| set[u]).collect();
            writeln!(f, "  witness: S = {members:?}, v = {v}")?;
        }
        write!(f, "objective consistent: {}", mark(self.objective_consistent))
    }
}

/// Exact feasibility check. The cut family is checked by full enumeration
/// for n <= 12 and by minimum cuts above that.
pub fn verify_feasibility(inst: &PctspInstance, sol: &FractionalSolution) -> FeasibilityReport {
    let n = sol.n;
    let root = sol.root;
    let two = rat_int(2);

    let nonneg_ok = sol.x.iter().all(|v| !v.is_negative());
    let mut degree_ok = true;
    for v in 0..n {
        if v != root && sol.degree(v) != &sol.y[v] * &two {
            degree_ok = false;
        }
    }
    let root_degree_ok = n == 1 || sol.degree(root) <= two;
    let y_bounds_ok = sol
        .y
        .iter()
        .all(|v| !v.is_negative() && v <= &Rat::one());
    let root_y_ok = sol.y[root].is_one();

    let (cuts_ok, cut_witness) = if n <= 12 {
        check_cuts_enumerated(sol)
    } else {
        check_cuts_minimum_cut(sol)
    };

    let objective_consistent = sol.objective == sol.objective_for(inst);

    FeasibilityReport {
        nonneg_ok,
        degree_ok,
        root_degree_ok,
        y_bounds_ok,
        root_y_ok,
        cuts_ok,
        cut_witness,
        objective_consistent,
    }
}

fn check_cuts_enumerated(sol: &FractionalSolution) -> (bool, Option<(Vec<bool>, usize)>) {
    let n = sol.n;
    let others: Vec<usize> = (0..n).filter(|&v| v != sol.root).collect();
    let k = others.len();
    for mask in 1u64..(1 << k) {
        let mut in_set = vec![false; n];
        for (i, &v) in others.iter().enumerate() {
            if mask >> i & 1 == 1 {
                in_set[v] = true;
            }
        }
        let value = sol.cut_value(&in_set);
        for &v in &others {
            if in_set[v] && value < &sol.y[v] * rat_int(2) {
                return (false, Some((in_set, v)));
            }
        }
    }
    (true, None)
}

fn check_cuts_minimum_cut(sol: &FractionalSolution) -> (bool, Option<(Vec<bool>, usize)>) {
    match separate(sol) {
        Some(cut) => (false, Some((cut.in_set, cut.vertex))),
        None => (true, None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{generate_euclidean, two_vertex_instance};
    use crate::rational::rat;

    #[test]
    fn two_vertex_visit_wins() {
        let inst = two_vertex_instance(rat_int(1), rat_int(3));
        let sol = solve_relaxation(&inst).unwrap();
        assert_eq!(sol.objective, rat_int(2));
        assert_eq!(sol.x(0, 1), &rat_int(2));
        assert_eq!(sol.y[1], Rat::one());
    }

    #[test]
    fn two_vertex_skip_wins() {
        let inst = two_vertex_instance(rat_int(1), rat_int(1));
        let sol = solve_relaxation(&inst).unwrap();
        assert_eq!(sol.objective, rat_int(1));
        assert!(sol.y[1].is_zero());
        assert!(sol.x(0, 1).is_zero());
    }

    #[test]
    fn separation_flags_disconnected_mass() {
        // x = 0 everywhere but y_2 = 1: every r-2 cut has value 0 < 2.
        let inst = generate_euclidean(3, 3).unwrap();
        let x = vec![Rat::zero(); 3];
        let mut y = vec![Rat::zero(); 3];
        y[0] = Rat::one();
        y[2] = Rat::one();
        let sol = FractionalSolution::new(&inst, x, y);
        let cut = separate(&sol).expect("violation exists");
        assert_eq!(cut.vertex, 2);
        assert!(cut.in_set[2] && !cut.in_set[0]);
        assert!(cut.cut_value.is_zero());
    }

    #[test]
    fn relaxation_is_feasible_and_deterministic() {
        for seed in [1u64, 2, 3] {
            let inst = generate_euclidean(7, seed).unwrap();
            let (sol, trace) = solve_relaxation_traced(&inst).unwrap();
            let report = verify_feasibility(&inst, &sol);
            assert!(report.ok(), "infeasible LP point:\n{report}");
            assert!(!trace.rounds.is_empty());
            let again = solve_relaxation(&inst).unwrap();
            assert_eq!(sol, again);
        }
    }

    #[test]
    fn tour_incidence_is_feasible_and_bounds_lp() {
        let inst = generate_euclidean(6, 9).unwrap();
        let lp = solve_relaxation(&inst).unwrap();
        let tour = Tour {
            order: vec![0, 2, 4, 5],
        };
        let inc = FractionalSolution::tour_incidence(&inst, &tour).unwrap();
        assert!(verify_feasibility(&inst, &inc).ok());
        assert!(lp.objective <= inc.objective);
        assert_eq!(
            inc.objective,
            crate::instance::solution_cost(&inst, &tour).unwrap()
        );
    }

    #[test]
    fn two_vertex_tour_incidence_uses_doubled_edge() {
        let inst = two_vertex_instance(rat_int(1), rat_int(3));
        let tour = Tour { order: vec![0, 1] };
        let inc = FractionalSolution::tour_incidence(&inst, &tour).unwrap();
        assert_eq!(inc.x(0, 1), &rat_int(2));
        assert!(verify_feasibility(&inst, &inc).ok());
    }

    #[test]
    fn separate_agrees_with_enumeration_on_random_points() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..25 {
            let n = rng.gen_range(3..7usize);
            let inst = generate_euclidean(n, rng.gen()).unwrap();
            let x: Vec<Rat> = (0..edge_count(n))
                .map(|_| rat(rng.gen_range(0..4), rng.gen_range(1..4)))
                .collect();
            let mut y: Vec<Rat> = (0..n)
                .map(|_| rat(rng.gen_range(0..3), 2))
                .collect();
            y[0] = Rat::one();
            let sol = FractionalSolution::new(&inst, x, y);

            // Enumeration oracle over every (S, v).
            let mut any_violated = false;
            let others: Vec<usize> = (1..n).collect();
            for mask in 1u64..(1 << (n - 1)) {
                let mut in_set = vec![false; n];
                for (i, &v) in others.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        in_set[v] = true;
                    }
                }
                let value = sol.cut_value(&in_set);
                for &v in &others {
                    if in_set[v] && value < &sol.y[v] * rat_int(2) {
                        any_violated = true;
                    }
                }
            }
            let found = separate(&sol);
            assert_eq!(found.is_some(), any_violated);
            if let Some(cut) = found {
                // The witness must itself be violated.
                assert!(cut.in_set[cut.vertex] && !cut.in_set[0]);
                assert_eq!(sol.cut_value(&cut.in_set), cut.cut_value);
                assert!(cut.cut_value < &sol.y[cut.vertex] * rat_int(2));
            }
        }
    }

    #[test]
    fn single_vertex_relaxation() {
        let inst = generate_euclidean(1, 0).unwrap();
        let sol = solve_relaxation(&inst).unwrap();
        assert!(sol.objective.is_zero());
        assert!(sol.y[0].is_one());
    }
}
