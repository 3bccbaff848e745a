//! Block structure of a graph: biconnected components, bridges,
//! articulation points, the block tree with branch labels, and membership
//! in the closure of the bridge locus.
//!
//! Blocks are the maximal subgraphs without a separating vertex: maximal
//! 2-connected pieces, single bridges, and single loops. Every edge lies in
//! exactly one block. Articulation points are the vertices lying in two or
//! more blocks, the positively weighted vertices, and the vertices carrying
//! two or more markings; the bipartite incidence graph on articulation
//! points and blocks is a tree.

use crate::graph::MarkedWeightedGraph;

/// Incidence (vertex, block) of the block tree, labeled by the genus and
/// marking content of the branch hanging off `vertex` through `block`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockTreeEdge {
    pub vertex: usize,
    pub block: usize,
    pub branch_genus: usize,
    pub branch_markings: usize,
}

#[derive(Debug, Clone)]
pub struct BlockDecomposition {
    /// Edge indices of each block.
    pub blocks: Vec<Vec<usize>>,
    /// Vertices of each block (a loop block has one vertex).
    pub block_vertices: Vec<Vec<usize>>,
    /// Vertices lying in at least two blocks, sorted.
    pub cut_vertices: Vec<usize>,
    /// Cut vertices, positively weighted vertices, and vertices with at
    /// least two markings, sorted.
    pub articulation_points: Vec<usize>,
    /// One entry per articulation point and block containing it.
    pub tree_edges: Vec<BlockTreeEdge>,
}

impl BlockDecomposition {
    /// The block tree is connected and acyclic on its articulation-point
    /// and block nodes (trivially true for at most one node).
    pub fn is_tree(&self) -> bool {
        let a = self.articulation_points.len();
        let b = self.blocks.len();
        let nodes = a + b;
        if nodes <= 1 {
            return true;
        }
        if self.tree_edges.len() != nodes - 1 {
            return false;
        }
        // Connectivity over node ids: articulation i, then blocks after.
        let mut parent: Vec<usize> = (0..nodes).collect();
        fn find(p: &mut Vec<usize>, x: usize) -> usize {
            if p[x] != x {
                let r = find(p, p[x]);
                p[x] = r;
            }
            p[x]
        }
        for e in &self.tree_edges {
            let ai = self.articulation_points.binary_search(&e.vertex).unwrap();
            let (ra, rb) = (find(&mut parent, ai), find(&mut parent, a + e.block));
            parent[ra] = rb;
        }
        let root = find(&mut parent, 0);
        (1..nodes).all(|x| find(&mut parent, x) == root)
    }
}

fn adjacency(g: &MarkedWeightedGraph) -> Vec<Vec<(usize, usize)>> {
    let mut adj = vec![Vec::new(); g.num_vertices()];
    for (i, &(a, b)) in g.edges().iter().enumerate() {
        if a == b {
            continue;
        }
        adj[a].push((b, i));
        adj[b].push((a, i));
    }
    adj
}

struct BlockDfs<'a> {
    g: &'a MarkedWeightedGraph,
    adj: Vec<Vec<(usize, usize)>>,
    disc: Vec<Option<usize>>,
    low: Vec<usize>,
    time: usize,
    stack: Vec<usize>,
    blocks: Vec<Vec<usize>>,
}

impl<'a> BlockDfs<'a> {
    fn dfs(&mut self, u: usize, parent_edge: Option<usize>) {
        self.disc[u] = Some(self.time);
        self.low[u] = self.time;
        self.time += 1;
        for k in 0..self.adj[u].len() {
            let (v, ei) = self.adj[u][k];
            if Some(ei) == parent_edge {
                continue;
            }
            match self.disc[v] {
                None => {
                    self.stack.push(ei);
                    self.dfs(v, Some(ei));
                    self.low[u] = self.low[u].min(self.low[v]);
                    if self.low[v] >= self.disc[u].unwrap() {
                        let mut block = Vec::new();
                        loop {
                            let e = self.stack.pop().expect("block edge on stack");
                            block.push(e);
                            if e == ei {
                                break;
                            }
                        }
                        block.sort_unstable();
                        self.blocks.push(block);
                    }
                }
                Some(dv) if dv < self.disc[u].unwrap() => {
                    self.stack.push(ei);
                    self.low[u] = self.low[u].min(dv);
                }
                _ => {}
            }
        }
        let _ = self.g;
    }
}

/// Edge sets of the blocks. Loops are their own blocks.
pub fn block_edge_sets(g: &MarkedWeightedGraph) -> Vec<Vec<usize>> {
    let mut dfs = BlockDfs {
        g,
        adj: adjacency(g),
        disc: vec![None; g.num_vertices()],
        low: vec![0; g.num_vertices()],
        time: 0,
        stack: Vec::new(),
        blocks: Vec::new(),
    };
    for v in 0..g.num_vertices() {
        if dfs.disc[v].is_none() {
            dfs.dfs(v, None);
        }
    }
    let mut blocks = dfs.blocks;
    for (i, _) in g.edges().iter().enumerate().filter(|&(i, _)| g.is_loop(i)) {
        blocks.push(vec![i]);
    }
    blocks.sort();
    blocks
}

fn vertices_of_block(g: &MarkedWeightedGraph, block: &[usize]) -> Vec<usize> {
    let mut vs: Vec<usize> = block
        .iter()
        .flat_map(|&e| {
            let (a, b) = g.edge(e);
            [a, b]
        })
        .collect();
    vs.sort_unstable();
    vs.dedup();
    vs
}

/// Genus and marking count of the branch hanging off `v` through the block
/// with index `b0`: the union of blocks reachable from it without passing
/// back through `v`, counting weights and legs away from `v`.
fn branch_type(
    g: &MarkedWeightedGraph,
    blocks: &[Vec<usize>],
    block_vertices: &[Vec<usize>],
    blocks_at: &[Vec<usize>],
    v: usize,
    b0: usize,
) -> (usize, usize) {
    let mut seen_blocks = vec![false; blocks.len()];
    let mut seen_vertices = vec![false; g.num_vertices()];
    seen_blocks[b0] = true;
    let mut queue = vec![b0];
    while let Some(b) = queue.pop() {
        for &u in &block_vertices[b] {
            if u == v || seen_vertices[u] {
                continue;
            }
            seen_vertices[u] = true;
            for &b2 in &blocks_at[u] {
                if !seen_blocks[b2] {
                    seen_blocks[b2] = true;
                    queue.push(b2);
                }
            }
        }
    }
    let num_edges: usize =
        seen_blocks.iter().zip(blocks).filter(|(s, _)| **s).map(|(_, b)| b.len()).sum();
    let far_vertices = seen_vertices.iter().filter(|s| **s).count();
    // The branch is connected and contains v, so b1 = E - V + 1.
    let b1 = num_edges + 1 - (far_vertices + 1);
    let weight: usize =
        (0..g.num_vertices()).filter(|&u| seen_vertices[u]).map(|u| g.weight(u)).sum();
    let markings = g.markings().iter().filter(|&&u| seen_vertices[u]).count();
    (b1 + weight, markings)
}

pub fn block_decomposition(g: &MarkedWeightedGraph) -> BlockDecomposition {
    let blocks = block_edge_sets(g);
    let block_vertices: Vec<Vec<usize>> =
        blocks.iter().map(|b| vertices_of_block(g, b)).collect();
    let mut blocks_at = vec![Vec::new(); g.num_vertices()];
    for (bi, vs) in block_vertices.iter().enumerate() {
        for &v in vs {
            blocks_at[v].push(bi);
        }
    }
    let cut_vertices: Vec<usize> =
        (0..g.num_vertices()).filter(|&v| blocks_at[v].len() >= 2).collect();
    let articulation_points: Vec<usize> = (0..g.num_vertices())
        .filter(|&v| {
            blocks_at[v].len() >= 2 || g.weight(v) > 0 || g.markings_at(v) >= 2
        })
        .collect();
    let mut tree_edges = Vec::new();
    for &v in &articulation_points {
        for &b in &blocks_at[v] {
            let (branch_genus, branch_markings) =
                branch_type(g, &blocks, &block_vertices, &blocks_at, v, b);
            tree_edges.push(BlockTreeEdge { vertex: v, block: b, branch_genus, branch_markings });
        }
    }
    BlockDecomposition { blocks, block_vertices, cut_vertices, articulation_points, tree_edges }
}

/// Bridges with the type of one side, normalized to the lexicographically
/// smaller of (g', n') and (g - g', n - n').
pub fn bridges(g: &MarkedWeightedGraph) -> Vec<(usize, (usize, usize))> {
    let blocks = block_edge_sets(g);
    let mut out = Vec::new();
    for block in &blocks {
        if block.len() != 1 || g.is_loop(block[0]) {
            continue;
        }
        let e = block[0];
        let side = component_without(g, e, g.edge(e).0);
        let g1: usize = side
            .iter()
            .enumerate()
            .filter(|(_, s)| **s)
            .map(|(v, _)| g.weight(v))
            .sum::<usize>()
            + side_b1(g, &side, e);
        let n1 = g.markings().iter().filter(|&&v| side[v]).count();
        let (g2, n2) = (g.genus() - g1, g.num_markings() - n1);
        out.push((e, if (g1, n1) <= (g2, n2) { (g1, n1) } else { (g2, n2) }));
    }
    out.sort();
    out
}

fn component_without(g: &MarkedWeightedGraph, skip: usize, start: usize) -> Vec<bool> {
    let mut seen = vec![false; g.num_vertices()];
    seen[start] = true;
    let mut queue = vec![start];
    while let Some(u) = queue.pop() {
        for (i, &(a, b)) in g.edges().iter().enumerate() {
            if i == skip {
                continue;
            }
            for (x, y) in [(a, b), (b, a)] {
                if x == u && !seen[y] {
                    seen[y] = true;
                    queue.push(y);
                }
            }
        }
    }
    seen
}

fn side_b1(g: &MarkedWeightedGraph, side: &[bool], skip: usize) -> usize {
    let e = g
        .edges()
        .iter()
        .enumerate()
        .filter(|&(i, &(a, b))| i != skip && side[a] && side[b])
        .count();
    let v = side.iter().filter(|s| **s).count();
    e + 1 - v
}

pub fn has_bridge(g: &MarkedWeightedGraph) -> bool {
    block_edge_sets(g)
        .iter()
        .any(|b| b.len() == 1 && !g.is_loop(b[0]))
}

/// Whether the graph lies in the smallest subcomplex containing every graph
/// with a bridge: it either has a bridge itself, or some vertex can be
/// split into two stable vertices joined by a new bridge, distributing its
/// blocks, markings, and weight between the two sides.
///
/// A side receiving block valence `s`, `m` markings, and weight `w'` is
/// stable with the extra bridge half-edge exactly when `s + m + 2w' >= 2`.
pub fn in_bridge_closure(g: &MarkedWeightedGraph) -> bool {
    if has_bridge(g) {
        return true;
    }
    let blocks = block_edge_sets(g);
    for v in 0..g.num_vertices() {
        let vals: Vec<usize> = blocks
            .iter()
            .map(|b| {
                b.iter()
                    .map(|&e| {
                        let (a, c) = g.edge(e);
                        usize::from(a == v) + usize::from(c == v)
                    })
                    .sum::<usize>()
            })
            .filter(|&s| s > 0)
            .collect();
        let total: usize = vals.iter().sum();
        let mv = g.markings_at(v);
        let w = g.weight(v);
        for mask in 0..(1usize << vals.len()) {
            let s1: usize = vals
                .iter()
                .enumerate()
                .filter(|&(i, _)| (mask >> i) & 1 == 1)
                .map(|(_, &s)| s)
                .sum();
            let s2 = total - s1;
            for m1 in 0..=mv {
                for w1 in 0..=w {
                    if s1 + m1 + 2 * w1 >= 2 && s2 + (mv - m1) + 2 * (w - w1) >= 2 {
                        return true;
                    }
                }
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::MarkedWeightedGraph;

    fn dumbbell() -> MarkedWeightedGraph {
        MarkedWeightedGraph::new(2, vec![0, 0], vec![(0, 0), (0, 1), (1, 1)], vec![]).unwrap()
    }

    #[test]
    fn dumbbell_blocks_and_articulation() {
        let d = block_decomposition(&dumbbell());
        assert_eq!(d.blocks.len(), 3);
        assert_eq!(d.cut_vertices, vec![0, 1]);
        assert_eq!(d.articulation_points, vec![0, 1]);
        assert!(d.is_tree());
        // Each articulation point sees a loop branch and a far branch, both
        // of genus 1 with no markings.
        assert_eq!(d.tree_edges.len(), 4);
        for e in &d.tree_edges {
            assert_eq!((e.branch_genus, e.branch_markings), (1, 0));
        }
    }

    #[test]
    fn loop_star_blocks() {
        // One vertex, three loops, weight 1, genus 4.
        let g =
            MarkedWeightedGraph::new(4, vec![1], vec![(0, 0), (0, 0), (0, 0)], vec![]).unwrap();
        let d = block_decomposition(&g);
        assert_eq!(d.blocks.len(), 3);
        assert_eq!(d.articulation_points, vec![0]);
        assert!(d.is_tree());
        assert_eq!(d.tree_edges.len(), 3);
        for e in &d.tree_edges {
            assert_eq!((e.branch_genus, e.branch_markings), (1, 0));
        }
        // Branch genera plus the vertex weight recover the genus.
        let total: usize = d.tree_edges.iter().map(|e| e.branch_genus).sum();
        assert_eq!(total + g.weight(0), 4);
    }

    #[test]
    fn marked_cycle_is_one_block() {
        let g = MarkedWeightedGraph::new(
            1,
            vec![0, 0, 0],
            vec![(0, 1), (1, 2), (0, 2)],
            vec![0, 1, 2],
        )
        .unwrap();
        let d = block_decomposition(&g);
        assert_eq!(d.blocks.len(), 1);
        assert!(d.cut_vertices.is_empty());
        assert!(d.articulation_points.is_empty());
        assert!(d.tree_edges.is_empty());
        assert!(d.is_tree());
    }

    #[test]
    fn branch_identity_at_every_vertex() {
        // Sum of branch genera over blocks at v, plus w(v), equals g; the
        // marking analogue holds as well.
        let samples = [
            dumbbell(),
            MarkedWeightedGraph::new(2, vec![0, 0], vec![(0, 1), (0, 1), (0, 1)], vec![])
                .unwrap(),
            MarkedWeightedGraph::new(
                3,
                vec![0, 0, 0, 1],
                vec![(0, 0), (0, 1), (1, 2), (1, 2), (2, 3)],
                vec![1, 3],
            )
            .unwrap(),
        ];
        for g in samples {
            let blocks = block_edge_sets(&g);
            let block_vertices: Vec<Vec<usize>> =
                blocks.iter().map(|b| vertices_of_block(&g, b)).collect();
            let mut blocks_at = vec![Vec::new(); g.num_vertices()];
            for (bi, vs) in block_vertices.iter().enumerate() {
                for &v in vs {
                    blocks_at[v].push(bi);
                }
            }
            for v in 0..g.num_vertices() {
                let mut genus_sum = g.weight(v);
                let mut marking_sum = g.markings_at(v);
                for &b in &blocks_at[v] {
                    let (bg, bn) =
                        branch_type(&g, &blocks, &block_vertices, &blocks_at, v, b);
                    genus_sum += bg;
                    marking_sum += bn;
                }
                assert_eq!(genus_sum, g.genus(), "genus identity at vertex {v} of {g}");
                assert_eq!(marking_sum, g.num_markings(), "marking identity at {v} of {g}");
            }
        }
    }

    #[test]
    fn bridge_types() {
        let b = MarkedWeightedGraph::new(2, vec![1, 1], vec![(0, 1)], vec![]).unwrap();
        assert_eq!(bridges(&b), vec![(0, (1, 0))]);

        let theta =
            MarkedWeightedGraph::new(2, vec![0, 0], vec![(0, 1), (0, 1), (0, 1)], vec![]).unwrap();
        assert!(bridges(&theta).is_empty());
        assert!(!has_bridge(&theta));

        // Three loops hanging off a central marked vertex by bridges.
        let cat = MarkedWeightedGraph::new(
            3,
            vec![0, 0, 0, 0],
            vec![(0, 1), (0, 2), (0, 3), (1, 1), (2, 2), (3, 3)],
            vec![0],
        )
        .unwrap();
        let bs = bridges(&cat);
        assert_eq!(bs.len(), 3);
        for (_, t) in bs {
            assert_eq!(t, (1, 0));
        }
    }

    #[test]
    fn bridge_sides_partition_genus_and_markings() {
        // Asymmetric bridge: loop side vs weighted, marked side.
        let g = MarkedWeightedGraph::new(
            3,
            vec![0, 2],
            vec![(0, 0), (0, 1)],
            vec![1, 1],
        )
        .unwrap();
        let bs = bridges(&g);
        assert_eq!(bs, vec![(1, (1, 0))]);
    }

    #[test]
    fn bridge_closure_membership() {
        // Anything with a bridge is in the closure.
        let b = MarkedWeightedGraph::new(2, vec![1, 1], vec![(0, 1)], vec![]).unwrap();
        assert!(in_bridge_closure(&b));

        // Loop on a weight-1 vertex: splitting the weight off across a new
        // bridge is stable on both sides.
        let lw = MarkedWeightedGraph::new(2, vec![1], vec![(0, 0)], vec![]).unwrap();
        assert!(in_bridge_closure(&lw));

        // Marked loop on a weight-0 vertex: no stable split exists.
        let ml = MarkedWeightedGraph::new(1, vec![0], vec![(0, 0)], vec![0]).unwrap();
        assert!(!in_bridge_closure(&ml));

        // Theta graph: each vertex has a single block of valence 3 and
        // nothing else to put on the other side.
        let theta =
            MarkedWeightedGraph::new(2, vec![0, 0], vec![(0, 1), (0, 1), (0, 1)], vec![]).unwrap();
        assert!(!in_bridge_closure(&theta));

        // Dumbbell: contracting the bridge of the dumbbell yields the
        // two-loop wedge, which must still lie in the closure.
        let wedge = MarkedWeightedGraph::new(2, vec![0], vec![(0, 0), (0, 0)], vec![]).unwrap();
        assert!(in_bridge_closure(&wedge));
        assert!(in_bridge_closure(&dumbbell()));
    }

    #[test]
    fn cone_point_closure_matches_emptiness() {
        // The weight-g cone point expands into a bridge unless (g,n)=(1,1).
        let cone11 = MarkedWeightedGraph::new(1, vec![1], vec![], vec![0]).unwrap();
        assert!(!in_bridge_closure(&cone11));
        let cone20 = MarkedWeightedGraph::new(2, vec![2], vec![], vec![]).unwrap();
        assert!(in_bridge_closure(&cone20));
        let cone12 = MarkedWeightedGraph::new(1, vec![1], vec![], vec![0, 0]).unwrap();
        assert!(in_bridge_closure(&cone12));
    }

    #[test]
    fn block_content_sums() {
        // Genus splits as cycle rank over blocks plus articulation weights;
        // markings split over blocks and articulation points.
        for g in [
            dumbbell(),
            MarkedWeightedGraph::new(
                3,
                vec![0, 0, 0, 1],
                vec![(0, 0), (0, 1), (1, 2), (1, 2), (2, 3)],
                vec![1, 3],
            )
            .unwrap(),
        ] {
            let d = block_decomposition(&g);
            let articulation: Vec<usize> = d.articulation_points.clone();
            let mut genus_sum: usize = articulation.iter().map(|&v| g.weight(v)).sum();
            let mut marking_sum: usize =
                articulation.iter().map(|&v| g.markings_at(v)).sum();
            for (block, vs) in d.blocks.iter().zip(&d.block_vertices) {
                genus_sum += block.len() + 1 - vs.len();
                genus_sum += vs
                    .iter()
                    .filter(|v| !articulation.contains(v))
                    .map(|&v| g.weight(v))
                    .sum::<usize>();
                marking_sum += vs
                    .iter()
                    .filter(|v| !articulation.contains(v))
                    .map(|&v| g.markings_at(v))
                    .sum::<usize>();
            }
            assert_eq!(genus_sum, g.genus());
            assert_eq!(marking_sum, g.num_markings());
        }
    }
}
