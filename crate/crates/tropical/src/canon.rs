//! Canonical forms, isomorphism signatures, and automorphisms.
//!
//! Canonical labeling uses iterative partition refinement (weights, marking
//! labels, valences, loop counts, then neighbor-cell multisets) followed by
//! individualization of the first non-singleton cell. The canonical
//! representative is the relabeling with the lexicographically least
//! encoding; its sorted edge list is the reference edge order used by chain
//! complexes.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::graph::MarkedWeightedGraph;

/// Complete isomorphism invariant: the canonical representative serialized
/// as a compact JSON record. Equal signatures mean isomorphic graphs.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IsoSignature(pub String);

impl std::fmt::Display for IsoSignature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

/// Result of canonicalization.
#[derive(Debug, Clone)]
pub struct CanonicalForm {
    pub signature: IsoSignature,
    /// Canonical representative: vertices relabeled, edges sorted. The edge
    /// index order of this graph is the reference labeling of its class.
    pub graph: MarkedWeightedGraph,
    /// Old vertex index to canonical label.
    pub vertex_map: Vec<usize>,
    /// Old edge index to its position in the canonical edge order.
    pub edge_rank: Vec<usize>,
}

/// Automorphism of the half-edge structure, with its induced edge
/// permutation and the sign of that permutation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Automorphism {
    pub vertex_map: Vec<usize>,
    /// Image of half-edge `2i + k` (edge `i`, endpoint `k`).
    pub half_edge_map: Vec<usize>,
    pub edge_perm: Vec<usize>,
    pub sign: i64,
}

impl Automorphism {
    pub fn identity(num_vertices: usize, num_edges: usize) -> Self {
        Self {
            vertex_map: (0..num_vertices).collect(),
            half_edge_map: (0..2 * num_edges).collect(),
            edge_perm: (0..num_edges).collect(),
            sign: 1,
        }
    }

    /// `self` after `other` (apply `other` first).
    pub fn compose(&self, other: &Self) -> Self {
        let vertex_map = other.vertex_map.iter().map(|&x| self.vertex_map[x]).collect();
        let half_edge_map =
            other.half_edge_map.iter().map(|&h| self.half_edge_map[h]).collect();
        let edge_perm: Vec<usize> =
            other.edge_perm.iter().map(|&e| self.edge_perm[e]).collect();
        let sign = self.sign * other.sign;
        Self { vertex_map, half_edge_map, edge_perm, sign }
    }

    pub fn inverse(&self) -> Self {
        let mut vertex_map = vec![0; self.vertex_map.len()];
        for (i, &x) in self.vertex_map.iter().enumerate() {
            vertex_map[x] = i;
        }
        let mut half_edge_map = vec![0; self.half_edge_map.len()];
        for (i, &x) in self.half_edge_map.iter().enumerate() {
            half_edge_map[x] = i;
        }
        let mut edge_perm = vec![0; self.edge_perm.len()];
        for (i, &x) in self.edge_perm.iter().enumerate() {
            edge_perm[x] = i;
        }
        Self { vertex_map, half_edge_map, edge_perm, sign: self.sign }
    }
}

/// Sign of a permutation given as `perm[i] = image of i`.
pub fn permutation_sign(perm: &[usize]) -> i64 {
    let n = perm.len();
    let mut seen = vec![false; n];
    let mut transpositions = 0;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            x = perm[x];
            len += 1;
        }
        transpositions += len - 1;
    }
    if transpositions % 2 == 0 {
        1
    } else {
        -1
    }
}

struct Search<'a> {
    g: &'a MarkedWeightedGraph,
    colors: Option<&'a [usize]>,
    marks_at: Vec<Vec<usize>>,
    collect: bool,
    best: Option<(Vec<usize>, Vec<usize>)>,
    optimal: Vec<Vec<usize>>,
}

impl<'a> Search<'a> {
    fn new(g: &'a MarkedWeightedGraph, colors: Option<&'a [usize]>, collect: bool) -> Self {
        let mut marks_at = vec![Vec::new(); g.num_vertices()];
        for (leg, &v) in g.markings().iter().enumerate() {
            marks_at[v].push(leg);
        }
        Self { g, colors, marks_at, collect, best: None, optimal: Vec::new() }
    }

    fn initial_key(&self, v: usize) -> Vec<usize> {
        let mut key = vec![
            self.colors.map_or(0, |c| c[v]),
            self.g.weight(v),
            self.g.half_edge_valence(v),
            self.g.loops_at(v),
            self.marks_at[v].len(),
        ];
        key.extend_from_slice(&self.marks_at[v]);
        key
    }

    fn initial_partition(&self) -> Vec<Vec<usize>> {
        let mut keyed: Vec<(Vec<usize>, usize)> =
            (0..self.g.num_vertices()).map(|v| (self.initial_key(v), v)).collect();
        keyed.sort();
        let mut cells: Vec<Vec<usize>> = Vec::new();
        let mut prev: Option<&Vec<usize>> = None;
        for (key, v) in &keyed {
            if prev != Some(key) {
                cells.push(Vec::new());
            }
            cells.last_mut().unwrap().push(*v);
            prev = Some(key);
        }
        // sort() moved the items; recompute prev borrow safely above by value.
        cells
    }

    /// Equitable refinement: split cells by the multiset of adjacent cell
    /// indices until stable.
    fn refine(&self, mut cells: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
        let v = self.g.num_vertices();
        loop {
            let mut cell_of = vec![0; v];
            for (ci, cell) in cells.iter().enumerate() {
                for &x in cell {
                    cell_of[x] = ci;
                }
            }
            let ncells = cells.len();
            let mut counts = vec![vec![0usize; ncells]; v];
            for &(a, b) in self.g.edges() {
                if a == b {
                    continue;
                }
                counts[a][cell_of[b]] += 1;
                counts[b][cell_of[a]] += 1;
            }
            let mut next: Vec<Vec<usize>> = Vec::with_capacity(ncells);
            let mut split = false;
            for cell in &cells {
                if cell.len() == 1 {
                    next.push(cell.clone());
                    continue;
                }
                let mut keyed: Vec<(&Vec<usize>, usize)> =
                    cell.iter().map(|&x| (&counts[x], x)).collect();
                keyed.sort();
                let mut groups: Vec<Vec<usize>> = Vec::new();
                let mut prev: Option<&Vec<usize>> = None;
                for (key, x) in keyed {
                    if prev != Some(key) {
                        groups.push(Vec::new());
                    }
                    groups.last_mut().unwrap().push(x);
                    prev = Some(key);
                }
                if groups.len() > 1 {
                    split = true;
                }
                next.extend(groups);
            }
            cells = next;
            if !split {
                return cells;
            }
        }
    }

    fn encode(&self, label: &[usize]) -> Vec<usize> {
        let g = self.g;
        let v = g.num_vertices();
        let mut enc = Vec::with_capacity(2 + 2 * v + g.num_markings() + 2 * g.num_edges());
        enc.push(v);
        enc.push(g.num_edges());
        let mut weights = vec![0; v];
        let mut colors = vec![0; v];
        for old in 0..v {
            weights[label[old]] = g.weight(old);
            if let Some(c) = self.colors {
                colors[label[old]] = c[old];
            }
        }
        enc.extend_from_slice(&weights);
        enc.extend_from_slice(&colors);
        enc.extend(g.markings().iter().map(|&x| label[x]));
        let mut edges: Vec<(usize, usize)> = g
            .edges()
            .iter()
            .map(|&(a, b)| {
                let (a, b) = (label[a], label[b]);
                if a <= b {
                    (a, b)
                } else {
                    (b, a)
                }
            })
            .collect();
        edges.sort_unstable();
        for (a, b) in edges {
            enc.push(a);
            enc.push(b);
        }
        enc
    }

    fn descend(&mut self, cells: Vec<Vec<usize>>) {
        if let Some(pos) = cells.iter().position(|c| c.len() > 1) {
            let targets = cells[pos].clone();
            for &v in &targets {
                let mut next: Vec<Vec<usize>> = Vec::with_capacity(cells.len() + 1);
                next.extend(cells[..pos].iter().cloned());
                next.push(vec![v]);
                next.push(targets.iter().copied().filter(|&x| x != v).collect());
                next.extend(cells[pos + 1..].iter().cloned());
                let refined = self.refine(next);
                self.descend(refined);
            }
            return;
        }
        let mut label = vec![0; self.g.num_vertices()];
        for (new, cell) in cells.iter().enumerate() {
            label[cell[0]] = new;
        }
        let enc = self.encode(&label);
        match &self.best {
            Some((b, _)) if *b < enc => {}
            Some((b, _)) if *b == enc => {
                if self.collect {
                    self.optimal.push(label);
                }
            }
            _ => {
                self.best = Some((enc, label.clone()));
                self.optimal.clear();
                if self.collect {
                    self.optimal.push(label);
                }
            }
        }
    }

    fn run(mut self) -> (Vec<usize>, Vec<usize>, Vec<Vec<usize>>) {
        let cells = self.refine(self.initial_partition());
        self.descend(cells);
        let (enc, label) = self.best.expect("graph has at least one vertex");
        (enc, label, self.optimal)
    }
}

fn build_canonical(g: &MarkedWeightedGraph, label: Vec<usize>) -> CanonicalForm {
    let relabeled = g.relabel_vertices(&label);
    // Rank original edges by their relabeled endpoints; ties between
    // parallel edges are broken by original position.
    let mut order: Vec<usize> = (0..relabeled.num_edges()).collect();
    order.sort_by_key(|&i| (relabeled.edge(i), i));
    let mut edge_rank = vec![0; order.len()];
    let mut edge_perm = vec![0; order.len()];
    for (rank, &orig) in order.iter().enumerate() {
        edge_rank[orig] = rank;
        edge_perm[orig] = rank;
    }
    let graph = relabeled.permute_edges(&edge_perm);
    let record = graph.to_record();
    let signature =
        IsoSignature(serde_json::to_string(&record).expect("graph records serialize"));
    CanonicalForm { signature, graph, vertex_map: label, edge_rank }
}

/// Canonical form of a graph. Two graphs get equal signatures exactly when
/// an isomorphism matches weights, markings, and edge multiplicities.
pub fn canonical_form(g: &MarkedWeightedGraph) -> CanonicalForm {
    let (_, label, _) = Search::new(g, None, false).run();
    build_canonical(g, label)
}

/// Canonical form together with the odd-automorphism flag, sharing one
/// labeling search between the two answers.
pub fn canonical_form_with_parity(g: &MarkedWeightedGraph) -> (CanonicalForm, bool) {
    if g.has_parallel_edges() {
        return (canonical_form(g), true);
    }
    let (_, base, optimal) = Search::new(g, None, true).run();
    let mut inv_base = vec![0; base.len()];
    for (old, &new) in base.iter().enumerate() {
        inv_base[new] = old;
    }
    let odd = optimal.iter().any(|label| {
        let phi: Vec<usize> = label.iter().map(|&new| inv_base[new]).collect();
        induced_edge_sign(g, &phi) == -1
    });
    (build_canonical(g, base), odd)
}

/// Canonical signature only.
pub fn signature(g: &MarkedWeightedGraph) -> IsoSignature {
    canonical_form(g).signature
}

/// Canonical form refined by an extra vertex coloring. Used while
/// enumerating unmarked shapes whose vertices already carry marking counts.
pub(crate) struct ColoredCanonical {
    pub key: Vec<usize>,
    pub graph: MarkedWeightedGraph,
    pub colors: Vec<usize>,
}

pub(crate) fn canonical_form_colored(
    g: &MarkedWeightedGraph,
    colors: &[usize],
) -> ColoredCanonical {
    let (key, label, _) = Search::new(g, Some(colors), false).run();
    let canonical = build_canonical(g, label);
    let mut new_colors = vec![0; colors.len()];
    for (old, &new) in canonical.vertex_map.iter().enumerate() {
        new_colors[new] = colors[old];
    }
    ColoredCanonical { key, graph: canonical.graph, colors: new_colors }
}

/// All vertex permutations preserving weights, markings, and adjacency
/// multiplicities, as maps old index to old index.
pub fn vertex_automorphisms(g: &MarkedWeightedGraph) -> Vec<Vec<usize>> {
    vertex_automorphisms_colored(g, None)
}

pub(crate) fn vertex_automorphisms_colored(
    g: &MarkedWeightedGraph,
    colors: Option<&[usize]>,
) -> Vec<Vec<usize>> {
    let (_, base, optimal) = Search::new(g, colors, true).run();
    let mut inv_base = vec![0; base.len()];
    for (old, &new) in base.iter().enumerate() {
        inv_base[new] = old;
    }
    optimal
        .iter()
        .map(|label| label.iter().map(|&new| inv_base[new]).collect())
        .collect()
}

fn edge_lookup(g: &MarkedWeightedGraph) -> HashMap<(usize, usize), usize> {
    g.edges().iter().copied().enumerate().map(|(i, e)| (e, i)).collect()
}

/// Sign of the edge permutation induced by a vertex automorphism. Only
/// meaningful when the graph has no parallel edges, where the induced edge
/// map is unique.
fn induced_edge_sign(g: &MarkedWeightedGraph, phi: &[usize]) -> i64 {
    let lookup = edge_lookup(g);
    let perm: Vec<usize> = g
        .edges()
        .iter()
        .map(|&(a, b)| {
            let (a, b) = (phi[a], phi[b]);
            let key = if a <= b { (a, b) } else { (b, a) };
            lookup[&key]
        })
        .collect();
    permutation_sign(&perm)
}

/// True when some automorphism induces an odd permutation of the edges.
/// Cellular generators carried by such graphs vanish.
///
/// Any parallel pair (including two loops at one vertex) can be swapped by
/// an automorphism fixing everything else, which is a single transposition
/// of edges, so parallel edges force the answer true. Without parallel
/// edges the edge permutation of a vertex automorphism is unique, and loop
/// half-edge swaps fix the edge set, so only vertex automorphisms matter.
pub fn has_odd_automorphism(g: &MarkedWeightedGraph) -> bool {
    if g.has_parallel_edges() {
        return true;
    }
    vertex_automorphisms(g).iter().any(|phi| induced_edge_sign(g, phi) == -1)
}

/// The full automorphism group of the half-edge structure: bijections
/// commuting with the involution and incidence maps and preserving weights
/// and markings. Size is the number of vertex automorphisms times the
/// parallel-edge matchings times `2^loops`, so call this only on small
/// graphs.
pub fn automorphisms(g: &MarkedWeightedGraph) -> Vec<Automorphism> {
    let mut classes: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (i, &e) in g.edges().iter().enumerate() {
        classes.entry(e).or_default().push(i);
    }
    let loops: Vec<usize> =
        (0..g.num_edges()).filter(|&i| g.is_loop(i)).collect();
    let mut out = Vec::new();
    for phi in vertex_automorphisms(g) {
        // For each parallel class pick every bijection onto its image class.
        let keys: Vec<(usize, usize)> = {
            let mut ks: Vec<_> = classes.keys().copied().collect();
            ks.sort_unstable();
            ks
        };
        let mut edge_maps: Vec<Vec<usize>> = vec![vec![0; g.num_edges()]];
        for &(a, b) in &keys {
            let (ia, ib) = (phi[a], phi[b]);
            let target_key = if ia <= ib { (ia, ib) } else { (ib, ia) };
            let src = &classes[&(a, b)];
            let dst = &classes[&target_key];
            debug_assert_eq!(src.len(), dst.len());
            let mut extended = Vec::new();
            for em in &edge_maps {
                for assignment in permutations(dst.len()) {
                    let mut em = em.clone();
                    for (k, &s) in src.iter().enumerate() {
                        em[s] = dst[assignment[k]];
                    }
                    extended.push(em);
                }
            }
            edge_maps = extended;
        }
        for em in edge_maps {
            let flips = loops.len();
            for mask in 0..(1usize << flips) {
                let mut half_edge_map = vec![0; 2 * g.num_edges()];
                let mut ok = true;
                for i in 0..g.num_edges() {
                    let (a, b) = g.edge(i);
                    let j = em[i];
                    let (ja, jb) = g.edge(j);
                    if a == b {
                        // Loop to loop; the mask picks the orientation.
                        let pos = loops.iter().position(|&l| l == i).unwrap();
                        let flip = (mask >> pos) & 1 == 1;
                        half_edge_map[2 * i] = 2 * j + usize::from(flip);
                        half_edge_map[2 * i + 1] = 2 * j + usize::from(!flip);
                    } else {
                        let (pa, pb) = (phi[a], phi[b]);
                        if pa == ja && pb == jb {
                            half_edge_map[2 * i] = 2 * j;
                            half_edge_map[2 * i + 1] = 2 * j + 1;
                        } else if pa == jb && pb == ja {
                            half_edge_map[2 * i] = 2 * j + 1;
                            half_edge_map[2 * i + 1] = 2 * j;
                        } else {
                            ok = false;
                            break;
                        }
                    }
                }
                if !ok {
                    continue;
                }
                let sign = permutation_sign(&em);
                out.push(Automorphism {
                    vertex_map: phi.clone(),
                    half_edge_map,
                    edge_perm: em.clone(),
                    sign,
                });
            }
        }
    }
    out
}

pub(crate) fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        let mut next = Vec::new();
        for p in &out {
            for x in 0..n {
                if !p.contains(&x) {
                    let mut q = p.clone();
                    q.push(x);
                    next.push(q);
                }
            }
        }
        out = next;
    }
    out
}

/// An edge bijection induced by some isomorphism from `a` to `b`, or `None`
/// when the graphs are not isomorphic. When the common class has no odd
/// automorphism the sign of this bijection is independent of the choice of
/// isomorphism.
pub fn isomorphism_edge_map(
    a: &MarkedWeightedGraph,
    b: &MarkedWeightedGraph,
) -> Option<Vec<usize>> {
    let ca = canonical_form(a);
    let cb = canonical_form(b);
    if ca.signature != cb.signature {
        return None;
    }
    let mut by_rank = vec![0; cb.edge_rank.len()];
    for (j, &rank) in cb.edge_rank.iter().enumerate() {
        by_rank[rank] = j;
    }
    Some(ca.edge_rank.iter().map(|&rank| by_rank[rank]).collect())
}
