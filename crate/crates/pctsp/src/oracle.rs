//! Brute-force cross-checks: exact optima for small instances and
//! exhaustive verification of the exponential cut family.
//!
//! These run in exponential time on purpose. They are the independent
//! route that the polynomial pipeline is tested against, so they share no
//! machinery with the simplex or max-flow code.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::instance::{solution_cost, PctspInstance, Tour};
use crate::lp::FractionalSolution;
use crate::rational::{rat_int, Rat};

/// Hard cap for [`brute_force_opt`]; 2^n · n^2 states get slow beyond this.
pub const MAX_EXACT_VERTICES: usize = 12;

/// Hard cap for [`enumerate_cut_check`].
pub const MAX_ENUMERATED_CUT_VERTICES: usize = 16;

#[derive(Debug, Clone)]
pub struct ExactOptimum {
    pub tour: Tour,
    pub value: Rat,
}

/// Exact optimum by dynamic programming over vertex subsets.
///
/// For every subset containing the root it computes the cheapest
/// root-anchored Hamiltonian path by the usual bitmask recurrence, closes it
/// into a cycle, and adds the penalties of the skipped vertices. Ties are
/// broken toward the smaller subset mask and smaller final vertex, so the
/// result is deterministic. Refuses instances with more than
/// [`MAX_EXACT_VERTICES`] vertices.
pub fn brute_force_opt(inst: &PctspInstance) -> Result<ExactOptimum> {
    let n = inst.n();
    if n > MAX_EXACT_VERTICES {
        return Err(Error::Unsupported(format!(
            "exact optimum supports at most {MAX_EXACT_VERTICES} vertices, got {n}"
        )));
    }
    let root = inst.root();
    let full = 1usize << n;
    let root_bit = 1usize << root;

    // path[mask][v]: cheapest path from root through exactly `mask`, ending
    // at v. Parents recorded for tour reconstruction.
    let mut path: Vec<Vec<Option<Rat>>> = vec![vec![None; n]; full];
    let mut parent: Vec<Vec<usize>> = vec![vec![usize::MAX; n]; full];
    path[root_bit][root] = Some(Rat::zero());

    for mask in 0..full {
        if mask & root_bit == 0 {
            continue;
        }
        for v in 0..n {
            let Some(cost_here) = path[mask][v].clone() else {
                continue;
            };
            for w in 0..n {
                if mask >> w & 1 == 1 {
                    continue;
                }
                let next = &cost_here + inst.cost(v, w);
                let entry = &mut path[mask | 1 << w][w];
                if entry.as_ref().is_none_or(|cur| &next < cur) {
                    *entry = Some(next);
                    parent[mask | 1 << w][w] = v;
                }
            }
        }
    }

    let mut skipped_total = vec![Rat::zero(); full];
    for mask in 0..full {
        if mask & root_bit == 0 {
            continue;
        }
        let mut p = Rat::zero();
        for v in 0..n {
            if mask >> v & 1 == 0 {
                p += inst.penalty(v);
            }
        }
        skipped_total[mask] = p;
    }

    let mut best_value = skipped_total[root_bit].clone();
    let mut best_state = (root_bit, root);
    for mask in 0..full {
        if mask & root_bit == 0 || mask == root_bit {
            continue;
        }
        for v in 0..n {
            if v == root {
                continue;
            }
            let Some(path_cost) = &path[mask][v] else {
                continue;
            };
            let value = path_cost + inst.cost(v, root) + &skipped_total[mask];
            if value < best_value {
                best_value = value;
                best_state = (mask, v);
            }
        }
    }

    let (mut mask, mut v) = best_state;
    let mut order_rev = Vec::new();
    while v != root || mask != root_bit {
        order_rev.push(v);
        let prev = parent[mask][v];
        mask &= !(1 << v);
        v = prev;
    }
    order_rev.push(root);
    order_rev.reverse();
    let tour = Tour { order: order_rev };
    debug_assert_eq!(solution_cost(inst, &tour)?, best_value);
    Ok(ExactOptimum {
        tour,
        value: best_value,
    })
}

/// Checks every cut constraint x(δ(S)) >= 2 y_v, v in S, r not in S, by
/// full enumeration. Returns a violating (S, v) witness or None.
pub fn enumerate_cut_check(sol: &FractionalSolution) -> Result<Option<(Vec<bool>, usize)>> {
    let n = sol.n;
    if n > MAX_ENUMERATED_CUT_VERTICES {
        return Err(Error::Unsupported(format!(
            "cut enumeration supports at most {MAX_ENUMERATED_CUT_VERTICES} vertices, got {n}"
        )));
    }
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
                return Ok(Some((in_set, v)));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{generate_euclidean, two_vertex_instance};
    use crate::lp::solve_relaxation;

    /// Permutation-based optimum, usable up to n = 8 or so.
    fn permutation_opt(inst: &PctspInstance) -> Rat {
        let n = inst.n();
        let root = inst.root();
        let others: Vec<usize> = (0..n).filter(|&v| v != root).collect();
        let mut best: Option<Rat> = None;
        for mask in 0u32..(1 << others.len()) {
            let subset: Vec<usize> = others
                .iter()
                .enumerate()
                .filter(|&(i, _)| mask >> i & 1 == 1)
                .map(|(_, &v)| v)
                .collect();
            let mut perm = subset.clone();
            permute(&mut perm, 0, &mut |p| {
                let mut order = vec![root];
                order.extend_from_slice(p);
                let tour = Tour { order };
                let value = solution_cost(inst, &tour).unwrap();
                if best.as_ref().is_none_or(|b| &value < b) {
                    best = Some(value);
                }
            });
        }
        best.unwrap()
    }

    fn permute(items: &mut [usize], k: usize, visit: &mut impl FnMut(&[usize])) {
        if k == items.len() {
            visit(items);
            return;
        }
        for i in k..items.len() {
            items.swap(k, i);
            permute(items, k + 1, visit);
            items.swap(k, i);
        }
    }

    #[test]
    fn matches_permutation_search() {
        for n in 1..=6usize {
            for seed in [5u64, 11] {
                let inst = generate_euclidean(n, seed).unwrap();
                let exact = brute_force_opt(&inst).unwrap();
                assert_eq!(exact.value, permutation_opt(&inst), "n={n} seed={seed}");
                assert_eq!(solution_cost(&inst, &exact.tour).unwrap(), exact.value);
            }
        }
    }

    #[test]
    fn two_vertex_cases() {
        let visit = brute_force_opt(&two_vertex_instance(rat_int(1), rat_int(3))).unwrap();
        assert_eq!(visit.value, rat_int(2));
        assert_eq!(visit.tour.order.len(), 2);

        let skip = brute_force_opt(&two_vertex_instance(rat_int(1), rat_int(1))).unwrap();
        assert_eq!(skip.value, rat_int(1));
        assert_eq!(skip.tour.order, vec![0]);
    }

    #[test]
    fn refuses_large_instances() {
        let inst = generate_euclidean(13, 1).unwrap();
        assert!(matches!(
            brute_force_opt(&inst),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn lp_value_bounds_optimum() {
        for seed in 20..24u64 {
            let inst = generate_euclidean(6, seed).unwrap();
            let lp = solve_relaxation(&inst).unwrap();
            let opt = brute_force_opt(&inst).unwrap();
            assert!(lp.objective <= opt.value, "seed {seed}");
        }
    }

    #[test]
    fn cut_enumeration_matches_separation_verdict() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(33);
        for _ in 0..15 {
            let n = rng.gen_range(3..7usize);
            let inst = generate_euclidean(n, rng.gen()).unwrap();
            let x = (0..crate::graph::edge_count(n))
                .map(|_| crate::rational::rat(rng.gen_range(0..3), 2))
                .collect();
            let mut y: Vec<Rat> = (0..n).map(|_| crate::rational::rat(rng.gen_range(0..3), 2)).collect();
            y[0] = Rat::from_integer(1.into());
            let sol = FractionalSolution::new(&inst, x, y);
            let enumerated = enumerate_cut_check(&sol).unwrap();
            let separated = crate::lp::separate(&sol);
            assert_eq!(enumerated.is_some(), separated.is_some());
            if let Some((set, v)) = enumerated {
                assert!(sol.cut_value(&set) < &sol.y[v] * rat_int(2));
            }
        }
    }

    #[test]
    fn relaxation_passes_cut_enumeration() {
        let inst = generate_euclidean(7, 42).unwrap();
        let sol = solve_relaxation(&inst).unwrap();
        assert_eq!(enumerate_cut_check(&sol).unwrap(), None);
    }
}
