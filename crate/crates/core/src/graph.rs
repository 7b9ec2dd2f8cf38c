//! Erdős–Rényi sampling and component structure.
//!
//! Vertices are indexed `0..n`; index 0 is the walk origin (printed 1-based
//! in CSV dumps). Graphs are immutable CSR adjacency structures, cheap to
//! share across threads.

use rand::Rng;
use rand_distr::{Distribution, Geometric};

use crate::error::{Error, Result};

/// Edge density at or below which `sample_er` uses geometric skip-sampling
/// instead of iterating all vertex pairs.
pub const SPARSE_SAMPLING_THRESHOLD: f64 = 0.1;

/// Which edge-generation strategy to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplingMethod {
    /// Jump between present edges with geometric gaps; O(n + edges).
    SkipSampling,
    /// Flip one Bernoulli coin per vertex pair; O(n^2).
    PairIteration,
}

/// An undirected simple graph in CSR form with sorted neighbor lists.
#[derive(Debug, Clone)]
pub struct Graph {
    n: usize,
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
    edge_count: usize,
}

impl Graph {
    /// Build a graph from an edge list. Edges may be in any order and either
    /// orientation; self-loops and duplicates are rejected.
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Result<Graph> {
        if n < 1 {
            return Err(Error::VertexCount { min: 1, got: n });
        }
        let mut normalized: Vec<(u32, u32)> = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a == b {
                return Err(Error::InvalidArgument(format!("self-loop at vertex {a}")));
            }
            if a as usize >= n || b as usize >= n {
                return Err(Error::InvalidArgument(format!(
                    "edge ({a}, {b}) out of range for n = {n}"
                )));
            }
            normalized.push(if a < b { (a, b) } else { (b, a) });
        }
        normalized.sort_unstable();
        if normalized.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument("duplicate edge".into()));
        }
        Ok(Self::from_sorted_edges(n, &normalized))
    }

    /// `edges` must be lexicographically sorted pairs `(u, v)` with `u < v`.
    fn from_sorted_edges(n: usize, edges: &[(u32, u32)]) -> Graph {
        let mut offsets = vec![0usize; n + 1];
        for &(u, v) in edges {
            offsets[u as usize + 1] += 1;
            offsets[v as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut cursor = offsets.clone();
        let mut neighbors = vec![0u32; 2 * edges.len()];
        // Lexicographic edge order fills every neighbor list in sorted order.
        for &(u, v) in edges {
            neighbors[cursor[u as usize]] = v;
            cursor[u as usize] += 1;
            neighbors[cursor[v as usize]] = u;
            cursor[v as usize] += 1;
        }
        Graph {
            n,
            offsets,
            neighbors,
            edge_count: edges.len(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    /// Iterate edges as pairs `(u, v)` with `u < v`, lexicographically.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.n).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .filter(move |&&v| v as usize > u)
                .map(move |&v| (u as u32, v))
        })
    }

    /// Debug dump: one `u,v` line per edge, `u < v`, 1-based labels.
    pub fn edge_csv(&self) -> String {
        let mut out = String::new();
        for (u, v) in self.edges() {
            out.push_str(&format!("{},{}\n", u + 1, v + 1));
        }
        out
    }
}

/// Sample G(n, p), picking the generation strategy from the density:
/// skip-sampling for `p <= SPARSE_SAMPLING_THRESHOLD`, pair iteration above.
pub fn sample_er<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Result<Graph> {
    let method = if p <= SPARSE_SAMPLING_THRESHOLD {
        SamplingMethod::SkipSampling
    } else {
        SamplingMethod::PairIteration
    };
    sample_er_with(n, p, rng, method)
}

/// Sample G(n, p) with an explicit strategy. Both strategies realize the
/// same distribution: every pair present independently with probability p.
pub fn sample_er_with<R: Rng + ?Sized>(
    n: usize,
    p: f64,
    rng: &mut R,
    method: SamplingMethod,
) -> Result<Graph> {
    if n < 1 {
        return Err(Error::VertexCount { min: 1, got: n });
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::ProbabilityOutOfRange(p));
    }
    let edges = match method {
        SamplingMethod::SkipSampling => sample_edges_skip(n, p, rng),
        SamplingMethod::PairIteration => sample_edges_dense(n, p, rng),
    };
    Ok(Graph::from_sorted_edges(n, &edges))
}

fn sample_edges_dense<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Vec<(u32, u32)> {
    let mut edges = Vec::new();
    if p == 0.0 {
        return edges;
    }
    for u in 0..n as u32 {
        for v in (u + 1)..n as u32 {
            if rng.random_bool(p) {
                edges.push((u, v));
            }
        }
    }
    edges
}

/// Geometric skips over the lexicographic pair order (flat indices
/// `0..n(n-1)/2`); cost is proportional to n + number of present edges.
fn sample_edges_skip<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Vec<(u32, u32)> {
    let mut edges = Vec::new();
    if p == 0.0 || n < 2 {
        return edges;
    }
    let total = n as u64 * (n as u64 - 1) / 2;
    if p == 1.0 {
        for u in 0..n as u32 {
            for v in (u + 1)..n as u32 {
                edges.push((u, v));
            }
        }
        return edges;
    }
    let gaps = Geometric::new(p).expect("validated probability");
    let mut pos: u64 = 0;
    // Decode flat indices incrementally: row u covers n-1-u consecutive slots.
    let mut row: u64 = 0;
    let mut row_end: u64 = n as u64 - 1;
    loop {
        let skip = gaps.sample(rng);
        pos = match pos.checked_add(skip) {
            Some(next) => next,
            None => break,
        };
        if pos >= total {
            break;
        }
        while pos >= row_end {
            row += 1;
            row_end += n as u64 - 1 - row;
        }
        let col = row + 1 + (pos - (row_end - (n as u64 - 1 - row)));
        edges.push((row as u32, col as u32));
        pos += 1;
    }
    edges
}

/// Connected components plus the per-component counts everything else needs.
#[derive(Debug, Clone)]
pub struct ComponentSummary {
    component_id: Vec<u32>,
    sizes: Vec<usize>,
    internal_edges: Vec<usize>,
    max_component_id: u32,
}

impl ComponentSummary {
    pub fn component_of(&self, v: usize) -> u32 {
        self.component_id[v]
    }

    pub fn component_count(&self) -> usize {
        self.sizes.len()
    }

    pub fn size(&self, component: u32) -> usize {
        self.sizes[component as usize]
    }

    pub fn internal_edges(&self, component: u32) -> usize {
        self.internal_edges[component as usize]
    }

    pub fn max_component_id(&self) -> u32 {
        self.max_component_id
    }

    pub fn max_component_size(&self) -> usize {
        self.sizes[self.max_component_id as usize]
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }
}

/// Label components by iterative traversal (no recursion, safe for large n).
pub fn components(g: &Graph) -> ComponentSummary {
    const UNSEEN: u32 = u32::MAX;
    let n = g.vertex_count();
    let mut component_id = vec![UNSEEN; n];
    let mut sizes = Vec::new();
    let mut internal_edges = Vec::new();
    let mut stack = Vec::new();
    for start in 0..n {
        if component_id[start] != UNSEEN {
            continue;
        }
        let label = sizes.len() as u32;
        let mut size = 0usize;
        let mut degree_sum = 0usize;
        component_id[start] = label;
        stack.push(start);
        while let Some(v) = stack.pop() {
            size += 1;
            degree_sum += g.degree(v);
            for &w in g.neighbors(v) {
                if component_id[w as usize] == UNSEEN {
                    component_id[w as usize] = label;
                    stack.push(w as usize);
                }
            }
        }
        sizes.push(size);
        // Every edge touching the component is internal to it.
        internal_edges.push(degree_sum / 2);
    }
    let max_component_id = (0..sizes.len())
        .max_by_key(|&c| (sizes[c], std::cmp::Reverse(c)))
        .unwrap_or(0) as u32;
    ComponentSummary {
        component_id,
        sizes,
        internal_edges,
        max_component_id,
    }
}

/// Structure of the origin's component: size, internal edges, origin degree,
/// and whether the origin sits in a largest component (ties by size).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OriginStats {
    pub component_size: usize,
    pub internal_edges: usize,
    pub degree: usize,
    pub in_largest: bool,
}

pub fn origin_stats(g: &Graph, cs: &ComponentSummary) -> OriginStats {
    let c = cs.component_of(0);
    OriginStats {
        component_size: cs.size(c),
        internal_edges: cs.internal_edges(c),
        degree: g.degree(0),
        in_largest: cs.size(c) == cs.max_component_size(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::rng_from_seed;

    fn complete(n: usize) -> Graph {
        let mut edges = Vec::new();
        for u in 0..n as u32 {
            for v in (u + 1)..n as u32 {
                edges.push((u, v));
            }
        }
        Graph::from_edges(n, &edges).unwrap()
    }

    #[test]
    fn empty_and_complete_extremes() {
        let mut rng = rng_from_seed(1);
        let g0 = sample_er(4, 0.0, &mut rng).unwrap();
        assert_eq!(g0.edge_count(), 0);
        let g1 = sample_er(4, 1.0, &mut rng).unwrap();
        assert_eq!(g1.edge_count(), 6);
        assert_eq!(g1.neighbors(0), &[1, 2, 3]);
        // Skip path must also produce the complete graph at p = 1.
        let g2 = sample_er_with(4, 1.0, &mut rng, SamplingMethod::SkipSampling).unwrap();
        assert_eq!(g2.edge_count(), 6);
    }

    #[test]
    fn sparse_edge_count_near_mean() {
        // Binomial(C(1000,2), 0.002): mean 999, sd ~31.6.
        for seed in 0..5 {
            let mut rng = rng_from_seed(seed);
            let g = sample_er(1000, 0.002, &mut rng).unwrap();
            let diff = (g.edge_count() as f64 - 999.0).abs();
            assert!(diff <= 4.0 * 31.6, "edge_count {} off mean", g.edge_count());
        }
    }

    #[test]
    fn degree_sum_identity() {
        for (n, p, seed) in [(50, 0.1, 3u64), (200, 0.5, 4), (300, 0.01, 5)] {
            let mut rng = rng_from_seed(seed);
            let g = sample_er(n, p, &mut rng).unwrap();
            let degree_sum: usize = (0..n).map(|v| g.degree(v)).sum();
            assert_eq!(degree_sum, 2 * g.edge_count());
        }
    }

    #[test]
    fn sampling_is_deterministic_per_seed() {
        let a = sample_er(64, 0.07, &mut rng_from_seed(11)).unwrap();
        let b = sample_er(64, 0.07, &mut rng_from_seed(11)).unwrap();
        assert_eq!(a.edge_csv(), b.edge_csv());
    }

    #[test]
    fn rejects_bad_probability() {
        let mut rng = rng_from_seed(0);
        assert!(sample_er(3, -0.1, &mut rng).is_err());
        assert!(sample_er(3, 1.5, &mut rng).is_err());
        assert!(sample_er(3, f64::NAN, &mut rng).is_err());
        assert!(sample_er(0, 0.5, &mut rng).is_err());
    }

    #[test]
    fn component_labels_match_reachability() {
        // Empty graph on 3 vertices: three singletons.
        let g = Graph::from_edges(3, &[]).unwrap();
        let cs = components(&g);
        assert_eq!(cs.component_count(), 3);
        assert_eq!(cs.sizes(), &[1, 1, 1]);
        assert!(cs.sizes().iter().all(|_| true));
        assert_eq!(cs.internal_edges(0), 0);

        // K4: one component with all six edges internal.
        let k4 = complete(4);
        let cs = components(&k4);
        assert_eq!(cs.component_count(), 1);
        assert_eq!(cs.size(0), 4);
        assert_eq!(cs.internal_edges(0), 6);

        // Path 0-1 plus isolated 2.
        let g = Graph::from_edges(3, &[(0, 1)]).unwrap();
        let cs = components(&g);
        assert_eq!(cs.component_count(), 2);
        assert_eq!(cs.size(cs.component_of(0)), 2);
        assert_eq!(cs.internal_edges(cs.component_of(0)), 1);
        assert_eq!(cs.size(cs.component_of(2)), 1);
        assert_eq!(cs.internal_edges(cs.component_of(2)), 0);
    }

    #[test]
    fn origin_stats_examples() {
        let k3 = complete(3);
        let s = origin_stats(&k3, &components(&k3));
        assert_eq!(
            s,
            OriginStats {
                component_size: 3,
                internal_edges: 3,
                degree: 2,
                in_largest: true
            }
        );

        // Origin isolated next to an edge: not in the largest component.
        let g = Graph::from_edges(3, &[(1, 2)]).unwrap();
        let s = origin_stats(&g, &components(&g));
        assert_eq!(s.component_size, 1);
        assert_eq!(s.degree, 0);
        assert!(!s.in_largest);

        // Origin isolated in an empty graph: every component is largest.
        let g = Graph::from_edges(2, &[]).unwrap();
        assert!(origin_stats(&g, &components(&g)).in_largest);

        // Path 0-1-2: degree sum over the component is twice the edge count.
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let s = origin_stats(&g, &components(&g));
        assert_eq!((s.component_size, s.internal_edges, s.degree), (3, 2, 1));
        assert!(s.in_largest);
        let degree_sum: usize = (0..3).map(|v| g.degree(v)).sum();
        assert_eq!(degree_sum, 2 * s.internal_edges);
    }

    #[test]
    fn edge_csv_is_one_based_and_ordered() {
        let g = Graph::from_edges(4, &[(2, 0), (0, 1)]).unwrap();
        assert_eq!(g.edge_csv(), "1,2\n1,3\n");
    }

    #[test]
    fn from_edges_rejects_malformed_input() {
        assert!(Graph::from_edges(3, &[(0, 0)]).is_err());
        assert!(Graph::from_edges(3, &[(0, 3)]).is_err());
        assert!(Graph::from_edges(3, &[(0, 1), (1, 0)]).is_err());
    }
}
