//! Exact maximum flow / minimum cut on small capacitated graphs.
//!
//! Edmonds-Karp with rational capacities. The number of augmentations is
//! bounded by O(V * E) independent of capacities, so exact arithmetic
//! terminates. Undirected edges become arc pairs sharing capacity via the
//! standard residual construction (reverse arc starts at capacity too).

use num_traits::Zero;

use crate::rational::Rat;

/// Flow network on vertices 0..n with residual arc capacities.
pub struct FlowNetwork {
    n: usize,
    // arcs[i] and arcs[i^1] are a forward/backward pair.
    head: Vec<usize>,
    residual: Vec<Rat>,
    adj: Vec<Vec<usize>>,
}

impl FlowNetwork {
    pub fn new(n: usize) -> Self {
        FlowNetwork {
            n,
            head: Vec::new(),
            residual: Vec::new(),
            adj: vec![Vec::new(); n],
        }
    }

    /// Adds an undirected edge: both directions get the full capacity.
    pub fn add_undirected(&mut self, u: usize, v: usize, cap: Rat) {
        debug_assert!(u < self.n && v < self.n && u != v);
        let id = self.head.len();
        self.head.push(v);
        self.residual.push(cap.clone());
        self.adj[u].push(id);
        self.head.push(u);
        self.residual.push(cap);
        self.adj[v].push(id + 1);
    }

    /// Maximum s-t flow value, stopping early once `limit` is reached.
    ///
    /// Returns the exact max-flow value if it is below `limit`, otherwise
    /// some value >= limit. With `limit = None` runs to completion.
    pub fn max_flow(&mut self, s: usize, t: usize, limit: Option<&Rat>) -> Rat {
        debug_assert!(s != t);
        let mut total = Rat::zero();
        loop {
            if let Some(cap) = limit {
                if &total >= cap {
                    return total;
                }
            }
            // BFS for a shortest augmenting path.
            let mut pred: Vec<Option<usize>> = vec![None; self.n];
            let mut queue = std::collections::VecDeque::new();
            queue.push_back(s);
            let mut seen = vec![false; self.n];
            seen[s] = true;
            'bfs: while let Some(u) = queue.pop_front() {
                for &arc in &self.adj[u] {
                    let v = self.head[arc];
                    if !seen[v] && !self.residual[arc].is_zero() {
                        seen[v] = true;
                        pred[v] = Some(arc);
                        if v == t {
                            break 'bfs;
                        }
                        queue.push_back(v);
                    }
                }
            }
            if !seen[t] {
                return total;
            }
            // Bottleneck along the path.
            let mut bottleneck: Option<Rat> = None;
            let mut v = t;
            while v != s {
                let arc = pred[v].expect("path arc");
                let r = &self.residual[arc];
                bottleneck = Some(match bottleneck {
                    None => r.clone(),
                    Some(b) if r < &b => r.clone(),
                    Some(b) => b,
                });
                v = self.head[arc ^ 1];
            }
            let push = bottleneck.expect("nonempty path");
            let mut v = t;
            while v != s {
                let arc = pred[v].expect("path arc");
                self.residual[arc] -= &push;
                self.residual[arc ^ 1] += &push;
                v = self.head[arc ^ 1];
            }
            total += push;
        }
    }

    /// Vertices reachable from s in the residual graph. After a completed
    /// max-flow this is the source side of a minimum cut.
    pub fn residual_reachable(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.n];
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for &arc in &self.adj[u] {
                let v = self.head[arc];
                if !seen[v] && !self.residual[arc].is_zero() {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen
    }
}

/// Minimum cut between vertex groups in an undirected capacitated graph.
///
/// `sources` and `sinks` are disjoint nonempty vertex sets that get
/// contracted before the flow computation. Returns the cut value and the
/// sink-side vertex set (in original vertex ids); the sink side is the
/// complement of the residual-reachable set, so it is a minimum cut
/// witness. With `limit` set, stops early once the flow reaches the limit
/// and returns `None` for the witness.
pub fn min_cut_grouped(
    n: usize,
    edges: &[(usize, usize, Rat)],
    sources: &[usize],
    sinks: &[usize],
    limit: Option<&Rat>,
) -> (Rat, Option<Vec<bool>>) {
    debug_assert!(!sources.is_empty() && !sinks.is_empty());
    // Map contracted vertices: sources -> 0, sinks -> 1, rest -> fresh ids.
    let mut group = vec![usize::MAX; n];
    for &s in sources {
        group[s] = 0;
    }
    for &t in sinks {
        debug_assert!(group[t] == usize::MAX, "source/sink overlap");
        group[t] = 1;
    }
    let mut next = 2;
    for g in group.iter_mut() {
        if *g == usize::MAX {
            *g = next;
            next += 1;
        }
    }
    let mut net = FlowNetwork::new(next);
    for (u, v, cap) in edges {
        let (gu, gv) = (group[*u], group[*v]);
        if gu != gv && !cap.is_zero() {
            net.add_undirected(gu, gv, cap.clone());
        }
    }
    let value = net.max_flow(0, 1, limit);
    if let Some(cap) = limit {
        if &value >= cap {
            return (value, None);
        }
    }
    let reach = net.residual_reachable(0);
    let sink_side = (0..n).map(|v| !reach[group[v]]).collect();
    (value, Some(sink_side))
}
