//! Stable marked weighted multigraphs and edge contractions.
//!
//! A graph here is a connected multigraph (loops and parallel edges allowed)
//! with a nonnegative integer weight on each vertex and `n` labeled legs
//! ("markings") attached to vertices. Its genus is the first Betti number
//! plus the total weight. A graph is stable when every vertex `v` satisfies
//! `2 w(v) - 2 + val(v) > 0`, where the valence counts half-edges (a loop
//! contributes two) and markings.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Connected multigraph with vertex weights and labeled markings.
///
/// Edges are stored as an ordered list of unordered endpoint pairs; the list
/// position of an edge is meaningful (it is the reference labeling used by
/// chain complexes), so operations preserve the relative order of surviving
/// edges.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MarkedWeightedGraph {
    genus: usize,
    weights: Vec<usize>,
    edges: Vec<(usize, usize)>,
    markings: Vec<usize>,
}

/// Interchange form: `{"g":..,"n":..,"V":..,"w":[..],"edges":[[u,v],..],"m":[..]}`.
///
/// Vertices are 0-indexed, loops appear as `[u,u]`, and `m[i]` is the vertex
/// carrying leg `i+1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphRecord {
    pub g: usize,
    pub n: usize,
    #[serde(rename = "V")]
    pub v: usize,
    pub w: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
    pub m: Vec<usize>,
}

impl MarkedWeightedGraph {
    /// Builds a graph and validates every invariant, including stability.
    pub fn new(
        genus: usize,
        weights: Vec<usize>,
        edges: Vec<(usize, usize)>,
        markings: Vec<usize>,
    ) -> Result<Self> {
        let g = Self::from_parts_unchecked(genus, weights, edges, markings);
        g.validate()?;
        Ok(g)
    }

    /// Builds a graph without validation. Endpoint pairs are normalized to
    /// `(min, max)` but nothing else is checked; callers own the invariants.
    pub fn from_parts_unchecked(
        genus: usize,
        weights: Vec<usize>,
        edges: Vec<(usize, usize)>,
        markings: Vec<usize>,
    ) -> Self {
        let edges = edges
            .into_iter()
            .map(|(a, b)| if a <= b { (a, b) } else { (b, a) })
            .collect();
        Self { genus, weights, edges, markings }
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.num_vertices();
        if v == 0 {
            return Err(Error::InvalidGraph("graph has no vertices".into()));
        }
        for &(a, b) in &self.edges {
            if a >= v || b >= v {
                return Err(Error::InvalidGraph(format!(
                    "edge ({a},{b}) out of range for {v} vertices"
                )));
            }
        }
        for (leg, &x) in self.markings.iter().enumerate() {
            if x >= v {
                return Err(Error::InvalidGraph(format!(
                    "marking {} placed on missing vertex {x}",
                    leg + 1
                )));
            }
        }
        if !self.is_connected() {
            return Err(Error::InvalidGraph("graph is disconnected".into()));
        }
        let computed = self.first_betti_number() + self.total_weight();
        if computed != self.genus {
            return Err(Error::InvalidGraph(format!(
                "declared genus {} but b1 + total weight = {computed}",
                self.genus
            )));
        }
        if !self.is_stable() {
            return Err(Error::InvalidGraph("graph is not stable".into()));
        }
        Ok(())
    }

    pub fn num_vertices(&self) -> usize {
        self.weights.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_markings(&self) -> usize {
        self.markings.len()
    }

    /// Declared genus: first Betti number plus total vertex weight.
    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn weights(&self) -> &[usize] {
        &self.weights
    }

    pub fn weight(&self, v: usize) -> usize {
        self.weights[v]
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, i: usize) -> (usize, usize) {
        self.edges[i]
    }

    pub fn is_loop(&self, i: usize) -> bool {
        let (a, b) = self.edges[i];
        a == b
    }

    /// Marking assignment: entry `i` is the vertex carrying leg `i+1`.
    pub fn markings(&self) -> &[usize] {
        &self.markings
    }

    pub fn first_betti_number(&self) -> usize {
        self.edges.len() + 1 - self.weights.len()
    }

    pub fn total_weight(&self) -> usize {
        self.weights.iter().sum()
    }

    /// Half-edges at `v` (loops count twice), excluding markings.
    pub fn half_edge_valence(&self, v: usize) -> usize {
        self.edges
            .iter()
            .map(|&(a, b)| (a == v) as usize + (b == v) as usize)
            .sum()
    }

    pub fn markings_at(&self, v: usize) -> usize {
        self.markings.iter().filter(|&&x| x == v).count()
    }

    /// Full valence: half-edges plus markings at `v`.
    pub fn valence(&self, v: usize) -> usize {
        self.half_edge_valence(v) + self.markings_at(v)
    }

    pub fn loops_at(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v && b == v).count()
    }

    pub fn vertex_is_stable(&self, v: usize) -> bool {
        2 * self.weights[v] + self.valence(v) > 2
    }

    pub fn is_stable(&self) -> bool {
        (0..self.num_vertices()).all(|v| self.vertex_is_stable(v))
    }

    pub fn is_connected(&self) -> bool {
        let v = self.num_vertices();
        if v == 0 {
            return false;
        }
        let mut parent: Vec<usize> = (0..v).collect();
        fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut components = v;
        for &(a, b) in &self.edges {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra] = rb;
                components -= 1;
            }
        }
        components == 1
    }

    pub fn has_positive_weight(&self) -> bool {
        self.weights.iter().any(|&w| w > 0)
    }

    pub fn has_loop(&self) -> bool {
        self.edges.iter().any(|&(a, b)| a == b)
    }

    pub fn has_loop_or_weight(&self) -> bool {
        self.has_loop() || self.has_positive_weight()
    }

    pub fn has_repeated_marking(&self) -> bool {
        let mut seen = vec![false; self.num_vertices()];
        for &x in &self.markings {
            if seen[x] {
                return true;
            }
            seen[x] = true;
        }
        false
    }

    /// All weights zero.
    pub fn is_pure(&self) -> bool {
        !self.has_positive_weight()
    }

    /// True when two edges share the same unordered endpoint pair (this
    /// includes two loops at one vertex).
    pub fn has_parallel_edges(&self) -> bool {
        let mut seen = std::collections::HashSet::with_capacity(self.edges.len());
        self.edges.iter().any(|&e| !seen.insert(e))
    }

    /// All the subcomplex-membership flags at once.
    pub fn locus_flags(&self) -> LocusFlags {
        LocusFlags {
            has_positive_weight: self.has_positive_weight(),
            has_loop_or_weight: self.has_loop_or_weight(),
            has_repeated_marking: self.has_repeated_marking(),
            is_pure: self.is_pure(),
        }
    }

    /// Contracts edge `i`. A non-loop edge merges its endpoints and adds the
    /// weights; a loop disappears and increments the weight of its vertex.
    /// Surviving edges keep their relative order. Genus is preserved.
    pub fn contract_edge(&self, i: usize) -> Self {
        let (u, v) = self.edges[i];
        let mut edges: Vec<(usize, usize)> = Vec::with_capacity(self.edges.len() - 1);
        edges.extend(self.edges.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &e)| e));
        if u == v {
            let mut weights = self.weights.clone();
            weights[u] += 1;
            Self::from_parts_unchecked(self.genus, weights, edges, self.markings.clone())
        } else {
            // Merge v into u and close the gap left by v.
            let remap = |x: usize| {
                if x == v {
                    u
                } else if x > v {
                    x - 1
                } else {
                    x
                }
            };
            let mut weights = self.weights.clone();
            weights[u] += weights[v];
            weights.remove(v);
            let edges = edges.into_iter().map(|(a, b)| (remap(a), remap(b))).collect();
            let markings = self.markings.iter().map(|&x| remap(x)).collect();
            Self::from_parts_unchecked(self.genus, weights, edges, markings)
        }
    }

    /// Contracts a set of edges, one at a time. The result is independent of
    /// the order up to isomorphism; the implementation contracts in
    /// descending index order so the indices stay valid.
    pub fn contract_set(&self, edge_indices: &[usize]) -> Self {
        let mut sorted = edge_indices.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let mut g = self.clone();
        for &i in sorted.iter().rev() {
            g = g.contract_edge(i);
        }
        g
    }

    /// Relabels vertices by `perm` (old index to new index).
    pub fn relabel_vertices(&self, perm: &[usize]) -> Self {
        let v = self.num_vertices();
        assert_eq!(perm.len(), v);
        let mut weights = vec![0; v];
        for (old, &new) in perm.iter().enumerate() {
            weights[new] = self.weights[old];
        }
        let edges = self.edges.iter().map(|&(a, b)| (perm[a], perm[b])).collect();
        let markings = self.markings.iter().map(|&x| perm[x]).collect();
        Self::from_parts_unchecked(self.genus, weights, edges, markings)
    }

    /// Reorders the edge list by `perm` (old position to new position).
    pub fn permute_edges(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.edges.len());
        let mut edges = vec![(0, 0); self.edges.len()];
        for (old, &new) in perm.iter().enumerate() {
            edges[new] = self.edges[old];
        }
        Self { genus: self.genus, weights: self.weights.clone(), edges, markings: self.markings.clone() }
    }

    pub fn to_record(&self) -> GraphRecord {
        GraphRecord {
            g: self.genus,
            n: self.markings.len(),
            v: self.weights.len(),
            w: self.weights.clone(),
            edges: self.edges.clone(),
            m: self.markings.clone(),
        }
    }

    pub fn from_record(r: &GraphRecord) -> Result<Self> {
        if r.w.len() != r.v {
            return Err(Error::InvalidGraph(format!(
                "record declares {} vertices but {} weights",
                r.v,
                r.w.len()
            )));
        }
        if r.m.len() != r.n {
            return Err(Error::InvalidGraph(format!(
                "record declares {} markings but lists {}",
                r.n,
                r.m.len()
            )));
        }
        Self::new(r.g, r.w.clone(), r.edges.clone(), r.m.clone())
    }

    pub fn half_edge_structure(&self) -> HalfEdgeStructure {
        HalfEdgeStructure::from_graph(self)
    }
}

impl std::fmt::Display for MarkedWeightedGraph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let json = serde_json::to_string(&self.to_record()).map_err(|_| std::fmt::Error)?;
        f.write_str(&json)
    }
}

/// Membership flags for the distinguished subcomplexes: positive weight,
/// loop or positive weight, repeated marking, and purity (all weights zero).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocusFlags {
    pub has_positive_weight: bool,
    pub has_loop_or_weight: bool,
    pub has_repeated_marking: bool,
    pub is_pure: bool,
}

/// Finite set `X = V(G) ⊔ H(G)` with the half-edge involution `s` and the
/// incidence retraction `r`.
///
/// Elements `0..num_vertices` are vertices; element `num_vertices + 2i + k`
/// is the half-edge of edge `i` at its first (`k = 0`) or second (`k = 1`)
/// endpoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalfEdgeStructure {
    pub num_vertices: usize,
    /// `s`: swaps the two half-edges of each edge, fixes vertices.
    pub involution: Vec<usize>,
    /// `r`: sends a half-edge to its incident vertex, fixes vertices.
    pub incidence: Vec<usize>,
}

impl HalfEdgeStructure {
    pub fn from_graph(g: &MarkedWeightedGraph) -> Self {
        let v = g.num_vertices();
        let size = v + 2 * g.num_edges();
        let mut involution: Vec<usize> = (0..size).collect();
        let mut incidence: Vec<usize> = (0..size).collect();
        for (i, &(a, b)) in g.edges().iter().enumerate() {
            let h0 = v + 2 * i;
            let h1 = h0 + 1;
            involution[h0] = h1;
            involution[h1] = h0;
            incidence[h0] = a;
            incidence[h1] = b;
        }
        Self { num_vertices: v, involution, incidence }
    }

    pub fn len(&self) -> usize {
        self.involution.len()
    }

    pub fn is_empty(&self) -> bool {
        self.involution.is_empty()
    }

    /// Checks `s ∘ s = id`, `r ∘ r = r`, and that the fixed points of both
    /// maps are exactly the vertices.
    pub fn validate(&self) -> Result<()> {
        let n = self.len();
        if self.incidence.len() != n {
            return Err(Error::InvalidGraph("involution and incidence sizes differ".into()));
        }
        for x in 0..n {
            let s = self.involution[x];
            let r = self.incidence[x];
            if s >= n || r >= n {
                return Err(Error::InvalidGraph("half-edge map out of range".into()));
            }
            if self.involution[s] != x {
                return Err(Error::InvalidGraph("involution is not an involution".into()));
            }
            if self.incidence[r] != r {
                return Err(Error::InvalidGraph("incidence is not idempotent".into()));
            }
            let is_vertex = x < self.num_vertices;
            if (s == x) != is_vertex {
                return Err(Error::InvalidGraph(
                    "fixed points of the involution are not exactly the vertices".into(),
                ));
            }
            if (r == x) != is_vertex {
                return Err(Error::InvalidGraph(
                    "fixed points of the incidence are not exactly the vertices".into(),
                ));
            }
            if !is_vertex && r >= self.num_vertices {
                return Err(Error::InvalidGraph("half-edge incident to a non-vertex".into()));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub fn theta() -> MarkedWeightedGraph {
        MarkedWeightedGraph::new(2, vec![0, 0], vec![(0, 1), (0, 1), (0, 1)], vec![]).unwrap()
    }

    pub fn dumbbell() -> MarkedWeightedGraph {
        MarkedWeightedGraph::new(2, vec![0, 0], vec![(0, 0), (0, 1), (1, 1)], vec![]).unwrap()
    }

    fn cycle_space_rank_oracle(g: &MarkedWeightedGraph) -> usize {
        // Independent of first_betti_number: count edges outside a DFS forest.
        let v = g.num_vertices();
        let mut seen = vec![false; v];
        let mut components = 0;
        let mut adj = vec![Vec::new(); v];
        for &(a, b) in g.edges() {
            adj[a].push(b);
            adj[b].push(a);
        }
        for start in 0..v {
            if seen[start] {
                continue;
            }
            components += 1;
            let mut stack = vec![start];
            seen[start] = true;
            while let Some(x) = stack.pop() {
                for &y in &adj[x] {
                    if !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        g.num_edges() + components - v
    }

    #[test]
    fn genus_of_weighted_vertex() {
        let g = MarkedWeightedGraph::new(3, vec![3], vec![], vec![]).unwrap();
        assert_eq!(g.genus(), 3);
        assert_eq!(g.first_betti_number(), 0);
    }

    #[test]
    fn genus_of_theta_and_loop() {
        assert_eq!(theta().genus(), 2);
        assert_eq!(theta().first_betti_number(), 2);
        let loop_on_weight_one =
            MarkedWeightedGraph::new(2, vec![1], vec![(0, 0)], vec![]).unwrap();
        assert_eq!(loop_on_weight_one.genus(), 2);
        assert_eq!(loop_on_weight_one.first_betti_number(), 1);
    }

    #[test]
    fn betti_number_matches_cycle_space_oracle() {
        for g in [
            theta(),
            dumbbell(),
            MarkedWeightedGraph::new(1, vec![0, 0, 0], vec![(0, 1), (1, 2), (0, 2)], vec![0, 1, 2])
                .unwrap(),
            MarkedWeightedGraph::new(2, vec![1], vec![(0, 0)], vec![]).unwrap(),
        ] {
            assert_eq!(g.first_betti_number(), cycle_space_rank_oracle(&g));
        }
    }

    #[test]
    fn disconnected_graph_rejected() {
        let err = MarkedWeightedGraph::new(2, vec![1, 1], vec![], vec![]);
        assert!(matches!(err, Err(Error::InvalidGraph(_))));
    }

    #[test]
    fn genus_mismatch_rejected() {
        let err = MarkedWeightedGraph::new(5, vec![0, 0], vec![(0, 1), (0, 1), (0, 1)], vec![]);
        assert!(matches!(err, Err(Error::InvalidGraph(_))));
    }

    #[test]
    fn stability_cases() {
        // Loop with one marking on a weight-zero vertex: valence 3.
        let loop_marked =
            MarkedWeightedGraph::from_parts_unchecked(1, vec![0], vec![(0, 0)], vec![0]);
        assert!(loop_marked.is_stable());

        // Weight-zero marked vertex joined by a bridge to a weight-one
        // vertex: the marked end has valence 2.
        let unstable =
            MarkedWeightedGraph::from_parts_unchecked(1, vec![0, 1], vec![(0, 1)], vec![0]);
        assert!(!unstable.is_stable());
        assert!(!unstable.vertex_is_stable(0));
        assert!(unstable.vertex_is_stable(1));

        // Isolated weight-one vertex with one marking.
        let w1 = MarkedWeightedGraph::from_parts_unchecked(1, vec![1], vec![], vec![0]);
        assert!(w1.is_stable());
    }

    #[test]
    fn contract_nonloop_merges_and_adds_weights() {
        let bridge = MarkedWeightedGraph::new(2, vec![1, 1], vec![(0, 1)], vec![]).unwrap();
        let c = bridge.contract_edge(0);
        assert_eq!(c.num_vertices(), 1);
        assert_eq!(c.weights(), &[2]);
        assert_eq!(c.num_edges(), 0);
        assert_eq!(c.genus(), 2);
        assert!(c.is_stable());
    }

    #[test]
    fn contract_loop_increments_weight() {
        let g = MarkedWeightedGraph::new(1, vec![0], vec![(0, 0)], vec![0]).unwrap();
        let c = g.contract_edge(0);
        assert_eq!(c.weights(), &[1]);
        assert_eq!(c.num_edges(), 0);
        assert_eq!(c.genus(), 1);
        assert_eq!(c.markings(), &[0]);
    }

    #[test]
    fn contract_theta_edge_gives_two_loops() {
        let c = theta().contract_edge(0);
        assert_eq!(c.num_vertices(), 1);
        assert_eq!(c.edges(), &[(0, 0), (0, 0)]);
        assert_eq!(c.genus(), 2);
    }

    #[test]
    fn contraction_preserves_stability_and_genus() {
        for g in [theta(), dumbbell()] {
            for i in 0..g.num_edges() {
                let c = g.contract_edge(i);
                assert!(c.is_stable(), "contracting edge {i} of {g}");
                assert_eq!(c.genus(), c.first_betti_number() + c.total_weight());
                assert!(c.is_connected());
            }
        }
    }

    #[test]
    fn contract_set_all_edges_gives_cone_point() {
        let g = theta();
        let c = g.contract_set(&[0, 1, 2]);
        assert_eq!(c.num_vertices(), 1);
        assert_eq!(c.num_edges(), 0);
        assert_eq!(c.weights(), &[2]);
        assert_eq!(c.genus(), 2);
    }

    #[test]
    fn contract_set_empty_is_identity() {
        let g = dumbbell();
        assert_eq!(g.contract_set(&[]), g);
    }

    #[test]
    fn contract_two_theta_edges_leaves_weighted_loop() {
        let c = theta().contract_set(&[0, 1]);
        assert_eq!(c.num_vertices(), 1);
        assert_eq!(c.weights(), &[1]);
        assert_eq!(c.edges(), &[(0, 0)]);
    }

    #[test]
    fn locus_predicates() {
        let g = dumbbell();
        assert!(!g.has_positive_weight());
        assert!(g.has_loop_or_weight());
        assert!(!g.has_repeated_marking());
        assert!(g.is_pure());
        let marked =
            MarkedWeightedGraph::new(1, vec![0], vec![(0, 0)], vec![0, 0]).unwrap();
        assert!(marked.has_repeated_marking());
    }

    #[test]
    fn parallel_edge_detection_counts_double_loops() {
        let two_loops =
            MarkedWeightedGraph::new(2, vec![0], vec![(0, 0), (0, 0)], vec![]).unwrap();
        assert!(two_loops.has_parallel_edges());
        assert!(!dumbbell().has_parallel_edges());
        assert!(theta().has_parallel_edges());
    }

    #[test]
    fn record_round_trip() {
        let g = MarkedWeightedGraph::new(
            1,
            vec![0, 0, 0],
            vec![(0, 1), (1, 2), (0, 2)],
            vec![0, 1, 2],
        )
        .unwrap();
        let json = serde_json::to_string(&g.to_record()).unwrap();
        let parsed: GraphRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(MarkedWeightedGraph::from_record(&parsed).unwrap(), g);
        assert!(json.starts_with("{\"g\":1,\"n\":3,\"V\":3"));
    }

    #[test]
    fn half_edge_structure_is_valid() {
        for g in [theta(), dumbbell()] {
            let h = g.half_edge_structure();
            h.validate().unwrap();
            assert_eq!(h.len(), g.num_vertices() + 2 * g.num_edges());
        }
    }

    #[test]
    fn half_edge_structure_rejects_broken_involution() {
        let mut h = theta().half_edge_structure();
        h.involution[2] = 2;
        assert!(h.validate().is_err());
    }
}
