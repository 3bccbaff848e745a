//! Exhaustive enumeration of isomorphism classes of stable marked weighted
//! graphs, stratified by edge count.
//!
//! Generation is top-down. The classes with the maximal edge count 3g-3+n
//! are exactly the weight-free graphs in which every vertex has combined
//! valence three (half-edges plus legs): summing the stability slack
//! 2w(v)-2+val(v) over vertices gives 2g-2+n, each summand is at least one,
//! and the edge count is maximal exactly when every summand is one. Every
//! other class arises from a maximal one by contracting edges one at a
//! time, so the lower strata are produced by saturating downward with
//! single contractions and deduplicating by canonical signature.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;

use crate::cache::StratumCache;
use crate::canon::{
    canonical_form, canonical_form_colored, has_odd_automorphism, vertex_automorphisms_colored,
    IsoSignature,
};
use crate::error::{Error, Result};
use crate::graph::MarkedWeightedGraph;

/// Identifies one stratum: all classes of genus `g` with `n` markings and
/// exactly `edges` edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StratumKey {
    pub g: usize,
    pub n: usize,
    pub edges: usize,
}

impl StratumKey {
    pub fn validate(&self) -> Result<()> {
        check_type(self.g, self.n)?;
        let top = max_edges(self.g, self.n);
        if self.edges == 0 || self.edges > top {
            return Err(Error::Domain(format!(
                "edge count {} outside 1..={top} for (g,n)=({},{})",
                self.edges, self.g, self.n
            )));
        }
        Ok(())
    }
}

/// One isomorphism class: canonical signature plus the canonical
/// representative whose edge order is the reference labeling.
#[derive(Debug, Clone)]
pub struct StratumClass {
    pub signature: IsoSignature,
    pub graph: MarkedWeightedGraph,
}

/// All classes of one stratum, sorted by signature.
#[derive(Debug, Clone)]
pub struct Stratum {
    pub key: StratumKey,
    pub classes: Vec<StratumClass>,
}

impl Stratum {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Index of a signature in the sorted class list.
    pub fn position(&self, signature: &IsoSignature) -> Option<usize> {
        self.classes.binary_search_by(|c| c.signature.cmp(signature)).ok()
    }
}

/// Largest possible edge count for the type (g, n).
pub fn max_edges(g: usize, n: usize) -> usize {
    (3 * g + n).saturating_sub(3)
}

/// Vertex count of the maximal-edge classes.
pub fn max_vertices(g: usize, n: usize) -> usize {
    (2 * g + n).saturating_sub(2)
}

fn check_type(g: usize, n: usize) -> Result<()> {
    if 2 * g + n <= 2 {
        return Err(Error::Domain(format!("no stable graphs of type ({g},{n})")));
    }
    Ok(())
}

/// Hard default cap on classes per stratum.
pub const DEFAULT_CAPACITY: usize = 10_000_000;

/// Enumerates strata with in-process memoization and an optional on-disk
/// cache. All methods are safe to call concurrently.
pub struct Enumerator {
    cache: Option<StratumCache>,
    capacity: usize,
    memo: Mutex<HashMap<(usize, usize), Arc<Vec<Arc<Stratum>>>>>,
}

impl Default for Enumerator {
    fn default() -> Self {
        Self::with_cache(StratumCache::from_env())
    }
}

impl Enumerator {
    /// Enumerator with the cache directory taken from the environment.
    pub fn new() -> Self {
        Self::default()
    }

    /// Enumerator with an explicit cache (or none).
    pub fn with_cache(cache: Option<StratumCache>) -> Self {
        Self { cache, capacity: DEFAULT_CAPACITY, memo: Mutex::new(HashMap::new()) }
    }

    pub fn capacity(mut self, capacity: usize) -> Self {
        self.capacity = capacity;
        self
    }

    /// Every stratum of the type, indexed by edge count: result[e-1] holds
    /// the classes with e edges.
    pub fn enumerate_all(&self, g: usize, n: usize) -> Result<Arc<Vec<Arc<Stratum>>>> {
        check_type(g, n)?;
        if let Some(hit) = self.memo.lock().unwrap().get(&(g, n)) {
            return Ok(Arc::clone(hit));
        }
        let strata = self.load_or_compute(g, n)?;
        let strata = Arc::new(strata);
        self.memo.lock().unwrap().insert((g, n), Arc::clone(&strata));
        Ok(strata)
    }

    pub fn enumerate_stratum(&self, key: StratumKey) -> Result<Arc<Stratum>> {
        key.validate()?;
        let all = self.enumerate_all(key.g, key.n)?;
        Ok(Arc::clone(&all[key.edges - 1]))
    }

    /// Per stratum: (edge count, class count, count of classes without an
    /// odd automorphism).
    pub fn stratum_counts(&self, g: usize, n: usize) -> Result<Vec<(usize, usize, usize)>> {
        let all = self.enumerate_all(g, n)?;
        Ok(all
            .iter()
            .map(|s| {
                let nonzero = s
                    .classes
                    .par_iter()
                    .filter(|c| !has_odd_automorphism(&c.graph))
                    .count();
                (s.key.edges, s.len(), nonzero)
            })
            .collect())
    }

    fn load_or_compute(&self, g: usize, n: usize) -> Result<Vec<Arc<Stratum>>> {
        let top = max_edges(g, n);
        if let Some(cache) = &self.cache {
            let loaded: Vec<Option<Stratum>> =
                (1..=top).map(|edges| cache.load(StratumKey { g, n, edges })).collect();
            if loaded.iter().all(Option::is_some) {
                return Ok(loaded.into_iter().map(|s| Arc::new(s.unwrap())).collect());
            }
        }
        let strata = self.compute(g, n)?;
        if let Some(cache) = &self.cache {
            for stratum in &strata {
                cache.store(stratum)?;
            }
        }
        Ok(strata.into_iter().map(Arc::new).collect())
    }

    fn compute(&self, g: usize, n: usize) -> Result<Vec<Stratum>> {
        let top = max_edges(g, n);
        let mut strata: Vec<Stratum> = Vec::with_capacity(top);
        if top == 0 {
            return Ok(strata);
        }
        let mut current = maximal_classes(g, n, self.capacity)?;
        for edges in (1..=top).rev() {
            let key = StratumKey { g, n, edges };
            if current.len() > self.capacity {
                return Err(Error::Capacity(format!(
                    "stratum {key:?} has more than {} classes",
                    self.capacity
                )));
            }
            let classes: Vec<StratumClass> = current
                .iter()
                .map(|(signature, graph)| StratumClass {
                    signature: signature.clone(),
                    graph: graph.clone(),
                })
                .collect();
            let next = if edges > 1 { contraction_classes(&classes) } else { Default::default() };
            strata.push(Stratum { key, classes });
            current = next;
        }
        strata.reverse();
        Ok(strata)
    }
}

type ClassMap = std::collections::BTreeMap<IsoSignature, MarkedWeightedGraph>;

fn merge(mut a: ClassMap, b: ClassMap) -> ClassMap {
    for (k, v) in b {
        a.entry(k).or_insert(v);
    }
    a
}

/// One-edge contractions of every class, as canonical representatives.
fn contraction_classes(classes: &[StratumClass]) -> ClassMap {
    classes
        .par_iter()
        .map(|class| {
            let mut out = ClassMap::new();
            for i in 0..class.graph.num_edges() {
                let contracted = class.graph.contract_edge(i);
                let canonical = canonical_form(&contracted);
                out.entry(canonical.signature).or_insert(canonical.graph);
            }
            out
        })
        .reduce(ClassMap::new, merge)
}

/// All maximal classes: weight zero, every vertex of combined valence
/// three. Shapes (graphs with per-vertex leg counts) are enumerated by
/// degree-sequence backtracking and deduplicated by colored canonical form;
/// the distinct leg labelings of each shape are its orbit representatives
/// under the shape's color-preserving automorphisms.
fn maximal_classes(g: usize, n: usize, capacity: usize) -> Result<ClassMap> {
    let v = max_vertices(g, n);
    let mut result = ClassMap::new();
    for counts in leg_count_vectors(n, v) {
        let degrees: Vec<usize> = counts.iter().map(|&c| 3 - c).collect();
        let shapes = shape_classes(g, &degrees, &counts);
        let labeled = shapes
            .par_iter()
            .map(|(shape, colors)| label_shape(g, n, shape, colors))
            .reduce(ClassMap::new, merge);
        result = merge(result, labeled);
        if result.len() > capacity {
            return Err(Error::Capacity(format!(
                "maximal stratum of ({g},{n}) exceeds {capacity} classes"
            )));
        }
    }
    Ok(result)
}

/// Non-increasing vectors of length `v` with entries in 0..=3 summing to
/// `n`: the ways to spread leg counts over the vertices of a shape.
fn leg_count_vectors(n: usize, v: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(v);
    fn rec(
        out: &mut Vec<Vec<usize>>,
        current: &mut Vec<usize>,
        left: usize,
        slots: usize,
        max: usize,
    ) {
        if slots == 0 {
            if left == 0 {
                out.push(current.clone());
            }
            return;
        }
        for c in (0..=max.min(left)).rev() {
            // The remaining slots each take at most c, so prune early.
            if left - c > (slots - 1) * c {
                continue;
            }
            current.push(c);
            rec(out, current, left - c, slots - 1, c);
            current.pop();
        }
    }
    rec(&mut out, &mut current, n, v, 3);
    out
}

/// Connected multigraph shapes realizing the degree sequence, one per
/// colored isomorphism class, with the colors carried along.
fn shape_classes(
    g: usize,
    degrees: &[usize],
    colors: &[usize],
) -> Vec<(MarkedWeightedGraph, Vec<usize>)> {
    let seeds = adjacency_seeds(degrees);
    let classes: std::collections::BTreeMap<Vec<usize>, (MarkedWeightedGraph, Vec<usize>)> = seeds
        .into_par_iter()
        .map(|seed| {
            let mut local = std::collections::BTreeMap::new();
            complete_adjacency(seed, |matrix| {
                let shape = shape_from_matrix(g, matrix);
                if !shape.is_connected() {
                    return;
                }
                let canonical = canonical_form_colored(&shape, colors);
                local
                    .entry(canonical.key)
                    .or_insert((canonical.graph, canonical.colors));
            });
            local
        })
        .reduce(std::collections::BTreeMap::new, |mut a, b| {
            for (k, v) in b {
                a.entry(k).or_insert(v);
            }
            a
        });
    classes.into_values().collect()
}

#[derive(Clone)]
struct AdjState {
    matrix: Vec<Vec<usize>>,
    remaining: Vec<usize>,
}

/// All completions of row 0, as resume states for parallel search.
fn adjacency_seeds(degrees: &[usize]) -> Vec<AdjState> {
    let v = degrees.len();
    let state = AdjState { matrix: vec![vec![0; v]; v], remaining: degrees.to_vec() };
    let mut seeds = Vec::new();
    fill_rows(state, 0, 0, 1, &mut |s| seeds.push(s.clone()));
    seeds
}

fn complete_adjacency(seed: AdjState, mut emit: impl FnMut(&Vec<Vec<usize>>)) {
    let v = seed.remaining.len();
    let start = 1.min(v);
    fill_rows(seed, start, start, v, &mut |s| emit(&s.matrix));
}

/// Backtracking over symmetric adjacency matrices with loop counts doubled
/// on the diagonal, filling position (i, j) with j from i to V-1, stopping
/// at `stop_row` and handing the state to `emit`.
fn fill_rows(state: AdjState, i: usize, j: usize, stop_row: usize, emit: &mut impl FnMut(&AdjState)) {
    let v = state.remaining.len();
    if i >= stop_row || i >= v {
        if i >= v && state.remaining.iter().any(|&r| r != 0) {
            return;
        }
        emit(&state);
        return;
    }
    if j >= v {
        if state.remaining[i] != 0 {
            return;
        }
        let rest: usize = state.remaining[i + 1..].iter().sum();
        if rest % 2 != 0 {
            return;
        }
        fill_rows(state, i + 1, i + 1, stop_row, emit);
        return;
    }
    if j == i {
        let max_loops = state.remaining[i] / 2;
        for l in 0..=max_loops {
            let mut next = state.clone();
            next.matrix[i][i] = 2 * l;
            next.remaining[i] -= 2 * l;
            fill_rows(next, i, j + 1, stop_row, emit);
        }
    } else {
        let cap = state.remaining[i].min(state.remaining[j]);
        for m in 0..=cap {
            let mut next = state.clone();
            next.matrix[i][j] = m;
            next.matrix[j][i] = m;
            next.remaining[i] -= m;
            next.remaining[j] -= m;
            fill_rows(next, i, j + 1, stop_row, emit);
        }
    }
}

fn shape_from_matrix(g: usize, matrix: &[Vec<usize>]) -> MarkedWeightedGraph {
    let v = matrix.len();
    let mut edges = Vec::new();
    for i in 0..v {
        for _ in 0..matrix[i][i] / 2 {
            edges.push((i, i));
        }
        for j in i + 1..v {
            for _ in 0..matrix[i][j] {
                edges.push((i, j));
            }
        }
    }
    MarkedWeightedGraph::from_parts_unchecked(g, vec![0; v], edges, Vec::new())
}

/// Distinct leg labelings of one shape: assignment vectors a with
/// |a^{-1}(v)| = colors[v], kept when lexicographically minimal in their
/// orbit under the colored automorphisms, then canonicalized.
fn label_shape(
    g: usize,
    n: usize,
    shape: &MarkedWeightedGraph,
    colors: &[usize],
) -> ClassMap {
    let autos = vertex_automorphisms_colored(shape, Some(colors));
    let mut out = ClassMap::new();
    let mut capacity = colors.to_vec();
    let mut assignment = Vec::with_capacity(n);
    assign_legs(g, shape, &autos, &mut capacity, &mut assignment, n, &mut out);
    out
}

fn assign_legs(
    g: usize,
    shape: &MarkedWeightedGraph,
    autos: &[Vec<usize>],
    capacity: &mut Vec<usize>,
    assignment: &mut Vec<usize>,
    n: usize,
    out: &mut ClassMap,
) {
    if assignment.len() == n {
        let minimal = autos.iter().all(|phi| {
            let image: Vec<usize> = assignment.iter().map(|&v| phi[v]).collect();
            *assignment <= image
        });
        if !minimal {
            return;
        }
        let graph = MarkedWeightedGraph::new(
            g,
            shape.weights().to_vec(),
            shape.edges().to_vec(),
            assignment.clone(),
        )
        .expect("maximal classes are stable by construction");
        let canonical = canonical_form(&graph);
        out.entry(canonical.signature).or_insert(canonical.graph);
        return;
    }
    for v in 0..capacity.len() {
        if capacity[v] == 0 {
            continue;
        }
        capacity[v] -= 1;
        assignment.push(v);
        assign_legs(g, shape, autos, capacity, assignment, n, out);
        assignment.pop();
        capacity[v] += 1;
    }
}
