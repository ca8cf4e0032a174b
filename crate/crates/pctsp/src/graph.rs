//! Edge indexing for complete graphs.
//!
//! Edges of the complete graph on n vertices are the unordered pairs
//! {u, v} with u < v, laid out row by row: (0,1), (0,2), ..., (0,n-1),
//! (1,2), ... Dense vectors indexed this way stand in for edge maps.

/// Number of edges of the complete graph on n vertices.
pub fn edge_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Dense index of the edge {u, v}, u != v.
pub fn edge_index(n: usize, u: usize, v: usize) -> usize {
    debug_assert!(u != v && u < n && v < n);
    let (a, b) = if u < v { (u, v) } else { (v, u) };
    a * n - a * (a + 1) / 2 + (b - a - 1)
}

/// Endpoints (u, v) with u < v of the dense edge index.
pub fn edge_endpoints(n: usize, idx: usize) -> (usize, usize) {
    debug_assert!(idx < edge_count(n));
    let mut a = 0;
    let mut base = 0;
    // Row a holds n-1-a edges.
    while base + (n - 1 - a) <= idx {
        base += n - 1 - a;
        a += 1;
    }
    (a, a + 1 + (idx - base))
}

/// All edges {u, v} with u < v in index order.
pub fn edges(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |u| (u + 1..n).map(move |v| (u, v)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_roundtrip() {
        for n in 1..=13 {
            assert_eq!(edges(n).count(), edge_count(n));
            for (idx, (u, v)) in edges(n).enumerate() {
                assert_eq!(edge_index(n, u, v), idx);
                assert_eq!(edge_index(n, v, u), idx);
                assert_eq!(edge_endpoints(n, idx), (u, v));
            }
        }
    }
}
