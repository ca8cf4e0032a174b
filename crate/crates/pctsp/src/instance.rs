//! Prize-collecting TSP instances and tours.
//!
//! An instance is a complete metric graph with a distinguished root, a
//! symmetric rational cost matrix, and nonnegative per-vertex penalties
//! (zero at the root). A solution is a cycle through the root; vertices it
//! skips pay their penalty. All data is exact rational.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::rational::{rational_from_json, rational_to_json, Rat};

/// Coordinate grid denominator for generated instances.
pub const COORD_GRID: u64 = 1 << 20;
/// Penalty grid denominator for generated instances; penalties lie in [0, 2].
pub const PENALTY_GRID: u64 = 1 << 10;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PctspInstance {
    n: usize,
    root: usize,
    costs: Vec<Vec<Rat>>,
    penalties: Vec<Rat>,
    coords: Option<Vec<(Rat, Rat)>>,
}

impl PctspInstance {
    /// Builds and validates an instance.
    pub fn new(
        root: usize,
        costs: Vec<Vec<Rat>>,
        penalties: Vec<Rat>,
        coords: Option<Vec<(Rat, Rat)>>,
    ) -> Result<Self> {
        let inst = PctspInstance {
            n: costs.len(),
            root,
            costs,
            penalties,
            coords,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn cost(&self, u: usize, v: usize) -> &Rat {
        &self.costs[u][v]
    }

    pub fn penalty(&self, v: usize) -> &Rat {
        &self.penalties[v]
    }

    pub fn penalties(&self) -> &[Rat] {
        &self.penalties
    }

    pub fn coords(&self) -> Option<&[(Rat, Rat)]> {
        self.coords.as_deref()
    }

    /// Sum of penalties over all vertices (the cost of staying home).
    pub fn total_penalty(&self) -> Rat {
        self.penalties.iter().fold(Rat::zero(), |a, p| a + p)
    }

    /// Checks the instance invariants: square symmetric nonnegative costs
    /// with zero diagonal, the triangle inequality on all triples,
    /// nonnegative penalties with zero at the root.
    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        let fail = |msg: String| Err(Error::InvalidInstance(msg));
        if n == 0 {
            return fail("instance needs at least one vertex".into());
        }
        if self.root >= n {
            return fail(format!("root {} out of range for n={}", self.root, n));
        }
        if self.costs.len() != n || self.costs.iter().any(|row| row.len() != n) {
            return fail("cost matrix is not n x n".into());
        }
        if self.penalties.len() != n {
            return fail("penalty vector length differs from n".into());
        }
        if let Some(c) = &self.coords {
            if c.len() != n {
                return fail("coordinate list length differs from n".into());
            }
        }
        for u in 0..n {
            if !self.costs[u][u].is_zero() {
                return fail(format!("nonzero diagonal cost at {u}"));
            }
            for v in u + 1..n {
                if self.costs[u][v] != self.costs[v][u] {
                    return fail(format!("asymmetric cost on {{{u},{v}}}"));
                }
                if self.costs[u][v].is_negative() {
                    return fail(format!("negative cost on {{{u},{v}}}"));
                }
            }
        }
        for u in 0..n {
            for v in 0..n {
                for w in 0..n {
                    if &self.costs[u][w] > &(&self.costs[u][v] + &self.costs[v][w]) {
                        return fail(format!("triangle inequality fails on ({u},{v},{w})"));
                    }
                }
            }
        }
        for (v, p) in self.penalties.iter().enumerate() {
            if p.is_negative() {
                return fail(format!("negative penalty at {v}"));
            }
        }
        if !self.penalties[self.root].is_zero() {
            return fail("root penalty must be zero".into());
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let mut obj = serde_json::Map::new();
        obj.insert("n".into(), json!(self.n));
        obj.insert("root".into(), json!(self.root));
        if let Some(coords) = &self.coords {
            obj.insert(
                "coords".into(),
                Value::Array(
                    coords
                        .iter()
                        .map(|(x, y)| Value::Array(vec![rational_to_json(x), rational_to_json(y)]))
                        .collect(),
                ),
            );
        }
        obj.insert(
            "costs".into(),
            Value::Array(
                self.costs
                    .iter()
                    .map(|row| Value::Array(row.iter().map(rational_to_json).collect()))
                    .collect(),
            ),
        );
        obj.insert(
            "penalties".into(),
            Value::Array(self.penalties.iter().map(rational_to_json).collect()),
        );
        Value::Object(obj)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("serializing json value")
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::Json("instance must be a JSON object".into()))?;
        let n = obj
            .get("n")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Json("missing integer field \"n\"".into()))? as usize;
        let root = obj
            .get("root")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Json("missing integer field \"root\"".into()))?
            as usize;
        let costs_v = obj
            .get("costs")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Json("missing array field \"costs\"".into()))?;
        let mut costs = Vec::with_capacity(costs_v.len());
        for row in costs_v {
            let row = row
                .as_array()
                .ok_or_else(|| Error::Json("cost rows must be arrays".into()))?;
            costs.push(row.iter().map(rational_from_json).collect::<Result<Vec<_>>>()?);
        }
        let pen_v = obj
            .get("penalties")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Json("missing array field \"penalties\"".into()))?;
        let penalties = pen_v
            .iter()
            .map(rational_from_json)
            .collect::<Result<Vec<_>>>()?;
        let coords = match obj.get("coords") {
            None | Some(Value::Null) => None,
            Some(Value::Array(rows)) => {
                let mut out = Vec::with_capacity(rows.len());
                for row in rows {
                    let pair = row
                        .as_array()
                        .filter(|p| p.len() == 2)
                        .ok_or_else(|| Error::Json("coords entries must be [x, y]".into()))?;
                    out.push((rational_from_json(&pair[0])?, rational_from_json(&pair[1])?));
                }
                Some(out)
            }
            Some(other) => return Err(Error::Json(format!("bad \"coords\" field: {other}"))),
        };
        if costs.len() != n {
            return Err(Error::Json(format!(
                "\"n\" is {n} but costs has {} rows",
                costs.len()
            )));
        }
        Self::new(root, costs, penalties, coords)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(s).map_err(|e| Error::Json(e.to_string()))?;
        Self::from_json(&v)
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_json_string())?;
        Ok(())
    }
}

/// Loads and validates an instance file.
pub fn load_instance(path: &std::path::Path) -> Result<PctspInstance> {
    let text = std::fs::read_to_string(path)?;
    PctspInstance::from_json_str(&text)
}

/// Generates a random Euclidean instance, deterministically from (n, seed).
///
/// Vertex 0 is the root. Coordinates are snapped to the unit square grid
/// with denominator 2^20; costs are pairwise Euclidean distances rounded
/// *up* to the same grid. Rounding up preserves the triangle inequality:
/// ceil(a) + ceil(b) >= ceil(a + b) >= ceil(c) whenever a + b >= c.
/// Penalties are uniform on the grid {k/2^10 : 0 <= k <= 2^11}, i.e. [0, 2],
/// so visiting and skipping are both competitive.
pub fn generate_euclidean(n: usize, seed: u64) -> Result<PctspInstance> {
    if n == 0 {
        return Err(Error::InvalidInstance("n must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid: Vec<(u64, u64)> = (0..n)
        .map(|_| (rng.gen_range(0..=COORD_GRID), rng.gen_range(0..=COORD_GRID)))
        .collect();
    let mut penalties: Vec<Rat> = (0..n)
        .map(|_| {
            Rat::new(
                BigInt::from(rng.gen_range(0..=2 * PENALTY_GRID)),
                BigInt::from(PENALTY_GRID),
            )
        })
        .collect();
    let root = 0;
    penalties[root] = Rat::zero();

    let mut costs = vec![vec![Rat::zero(); n]; n];
    for u in 0..n {
        for v in u + 1..n {
            let dx = grid[u].0.abs_diff(grid[v].0) as u128;
            let dy = grid[u].1.abs_diff(grid[v].1) as u128;
            let num = crate::rational::ceil_sqrt_u128(dx * dx + dy * dy);
            let c = Rat::new(BigInt::from(num), BigInt::from(COORD_GRID));
            costs[u][v] = c.clone();
            costs[v][u] = c;
        }
    }
    let coords = grid
        .iter()
        .map(|&(x, y)| {
            (
                Rat::new(BigInt::from(x), BigInt::from(COORD_GRID)),
                Rat::new(BigInt::from(y), BigInt::from(COORD_GRID)),
            )
        })
        .collect();
    PctspInstance::new(root, costs, penalties, Some(coords))
}

/// A cycle through the root, stored as the cyclic visit order.
///
/// The canonical form produced by this crate starts at the root, but any
/// rotation represents the same tour and costs the same.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tour {
    pub order: Vec<usize>,
}

impl Tour {
    pub fn root_only(root: usize) -> Self {
        Tour { order: vec![root] }
    }

    /// Checks the tour against an instance: vertices in range and distinct,
    /// root present.
    pub fn validate(&self, inst: &PctspInstance) -> Result<()> {
        if self.order.is_empty() {
            return Err(Error::InvalidTour("empty visit order".into()));
        }
        let mut seen = vec![false; inst.n()];
        for &v in &self.order {
            if v >= inst.n() {
                return Err(Error::InvalidTour(format!("vertex {v} out of range")));
            }
            if seen[v] {
                return Err(Error::InvalidTour(format!("vertex {v} repeated")));
            }
            seen[v] = true;
        }
        if !seen[inst.root()] {
            return Err(Error::InvalidTour("root missing from tour".into()));
        }
        Ok(())
    }

    /// Set of visited vertices as a membership vector.
    pub fn visited(&self, n: usize) -> Vec<bool> {
        let mut seen = vec![false; n];
        for &v in &self.order {
            seen[v] = true;
        }
        seen
    }

    /// Cost of the cyclic walk (zero for a single-vertex tour).
    pub fn edge_cost(&self, inst: &PctspInstance) -> Rat {
        if self.order.len() < 2 {
            return Rat::zero();
        }
        let mut total = Rat::zero();
        for i in 0..self.order.len() {
            let u = self.order[i];
            let v = self.order[(i + 1) % self.order.len()];
            total += inst.cost(u, v);
        }
        total
    }

    pub fn to_json(&self) -> Value {
        json!({ "order": self.order })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let order = v
            .get("order")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Json("missing array field \"order\"".into()))?
            .iter()
            .map(|x| {
                x.as_u64()
                    .map(|u| u as usize)
                    .ok_or_else(|| Error::Json(format!("bad vertex {x}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Tour { order })
    }
}

/// Objective value of a tour: cycle cost plus penalties of skipped vertices.
pub fn solution_cost(inst: &PctspInstance, tour: &Tour) -> Result<Rat> {
    tour.validate(inst)?;
    let visited = tour.visited(inst.n());
    let mut total = tour.edge_cost(inst);
    for v in 0..inst.n() {
        if !visited[v] {
            total += inst.penalty(v);
        }
    }
    Ok(total)
}

/// Penalty part of the objective for a given visited set.
pub fn penalty_of_skipped(inst: &PctspInstance, visited: &[bool]) -> Rat {
    let mut total = Rat::zero();
    for v in 0..inst.n() {
        if !visited[v] {
            total += inst.penalty(v);
        }
    }
    total
}

/// Two-vertex instance with edge cost c and penalty p on the non-root vertex.
/// Handy in tests and examples.
pub fn two_vertex_instance(c: Rat, p: Rat) -> PctspInstance {
    PctspInstance::new(
        0,
        vec![vec![Rat::zero(), c.clone()], vec![c, Rat::zero()]],
        vec![Rat::zero(), p],
        None,
    )
    .expect("two-vertex instance is metric")
}

/// Instance with all-zero costs and the given penalties; useful for edge cases.
pub fn zero_cost_instance(n: usize, root: usize, penalties: Vec<Rat>) -> Result<PctspInstance> {
    PctspInstance::new(root, vec![vec![Rat::zero(); n]; n], penalties, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    #[test]
    fn generator_is_deterministic_and_valid() {
        let a = generate_euclidean(8, 42).unwrap();
        let b = generate_euclidean(8, 42).unwrap();
        assert_eq!(a, b);
        let c = generate_euclidean(8, 43).unwrap();
        assert_ne!(a, c);
        a.validate().unwrap();
        for v in 0..8 {
            assert!(a.penalty(v) >= &Rat::zero());
            assert!(a.penalty(v) <= &rat_int(2));
        }
        assert!(a.penalty(a.root()).is_zero());
    }

    #[test]
    fn generated_costs_are_rounded_up_distances() {
        let inst = generate_euclidean(8, 7).unwrap();
        let coords = inst.coords().unwrap();
        let grid = Rat::from_integer(BigInt::from(COORD_GRID));
        for u in 0..8 {
            for v in u + 1..8 {
                // Coordinates are k/2^20, so the scaled differences are
                // exact integers and the squared distance fits in u128.
                let dx = ((&coords[u].0 - &coords[v].0) * &grid).numer().magnitude().clone();
                let dy = ((&coords[u].1 - &coords[v].1) * &grid).numer().magnitude().clone();
                let dx: u128 = dx.try_into().unwrap();
                let dy: u128 = dy.try_into().unwrap();
                let expected = Rat::new(
                    BigInt::from(crate::rational::ceil_sqrt_u128(dx * dx + dy * dy)),
                    BigInt::from(COORD_GRID),
                );
                assert_eq!(inst.cost(u, v), &expected);
                // Rounded-up distance is never below the true distance.
                let c_scaled = (inst.cost(u, v) * &grid).numer().clone();
                assert!(&c_scaled * &c_scaled >= BigInt::from(dx * dx + dy * dy));
            }
        }
    }

    #[test]
    fn single_vertex_instance() {
        let inst = generate_euclidean(1, 5).unwrap();
        assert_eq!(inst.n(), 1);
        let tour = Tour::root_only(0);
        assert_eq!(solution_cost(&inst, &tour).unwrap(), Rat::zero());
    }

    #[test]
    fn two_vertex_costs() {
        let inst = two_vertex_instance(rat_int(1), rat_int(3));
        let stay = Tour::root_only(0);
        assert_eq!(solution_cost(&inst, &stay).unwrap(), rat_int(3));
        let go = Tour { order: vec![0, 1] };
        assert_eq!(solution_cost(&inst, &go).unwrap(), rat_int(2));
    }

    #[test]
    fn cost_is_rotation_and_reversal_invariant() {
        let inst = generate_euclidean(7, 11).unwrap();
        let tour = Tour {
            order: vec![0, 3, 5, 2, 6],
        };
        let base = solution_cost(&inst, &tour).unwrap();
        let rotated = Tour {
            order: vec![5, 2, 6, 0, 3],
        };
        assert_eq!(solution_cost(&inst, &rotated).unwrap(), base);
        let reversed = Tour {
            order: vec![0, 6, 2, 5, 3],
        };
        assert_eq!(solution_cost(&inst, &reversed).unwrap(), base);
    }

    #[test]
    fn tour_validation_errors() {
        let inst = generate_euclidean(5, 1).unwrap();
        let repeated = Tour {
            order: vec![0, 2, 2],
        };
        assert!(solution_cost(&inst, &repeated).is_err());
        let rootless = Tour {
            order: vec![1, 2, 3],
        };
        assert!(solution_cost(&inst, &rootless).is_err());
        let out_of_range = Tour { order: vec![0, 9] };
        assert!(solution_cost(&inst, &out_of_range).is_err());
    }

    #[test]
    fn json_roundtrip_is_exact() {
        let inst = generate_euclidean(6, 99).unwrap();
        let back = PctspInstance::from_json_str(&inst.to_json_string()).unwrap();
        assert_eq!(inst, back);
        let tour = Tour {
            order: vec![0, 4, 2],
        };
        let t2 = Tour::from_json(&tour.to_json()).unwrap();
        assert_eq!(tour, t2);
    }

    #[test]
    fn json_accepts_plain_numbers() {
        let text = r#"{
            "n": 3, "root": 0,
            "costs": [[0, 1, 1], [1, 0, 1], [1, 1, 0]],
            "penalties": [0, 0.5, "3/2"]
        }"#;
        let inst = PctspInstance::from_json_str(text).unwrap();
        assert_eq!(inst.penalty(1), &rat(1, 2));
        assert_eq!(inst.penalty(2), &rat(3, 2));
    }

    #[test]
    fn validation_rejects_non_metric() {
        let text = r#"{
            "n": 3, "root": 0,
            "costs": [[0, 1, 5], [1, 0, 1], [5, 1, 0]],
            "penalties": [0, 0, 0]
        }"#;
        assert!(matches!(
            PctspInstance::from_json_str(text),
            Err(Error::InvalidInstance(_))
        ));
    }

    #[test]
    fn validation_rejects_bad_root_penalty() {
        let text = r#"{
            "n": 2, "root": 0,
            "costs": [[0, 1], [1, 0]],
            "penalties": [1, 0]
        }"#;
        assert!(PctspInstance::from_json_str(text).is_err());
    }
}
