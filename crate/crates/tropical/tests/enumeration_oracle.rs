//! Independent oracles for the enumerator: a brute-force generator that
//! assembles every candidate graph from raw parts and keeps whatever
//! validates, and a face-closure construction of the bridge locus.

use std::collections::{BTreeMap, BTreeSet};

use tropical::{
    canonical_form, has_bridge, in_bridge_closure, max_edges, max_vertices, Enumerator,
    MarkedWeightedGraph,
};

/// All multisets of size `size` over `0..symbols`, as sorted index vectors.
fn multisets(symbols: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(size);
    fn rec(symbols: usize, size: usize, from: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == size {
            out.push(current.clone());
            return;
        }
        for next in from..symbols {
            current.push(next);
            rec(symbols, size, next, current, out);
            current.pop();
        }
    }
    rec(symbols, size, 0, &mut current, &mut out);
    out
}

/// All vectors of `parts` nonnegative integers summing to `total`.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// All functions from `0..n` to `0..v`, as marking vectors.
fn assignments(n: usize, v: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..v).map(move |target| {
                    let mut next = prefix.clone();
                    next.push(target);
                    next
                })
            })
            .collect();
    }
    out
}

/// Brute force: throw every combination of edge multiset, weight vector,
/// and marking assignment at the validating constructor and canonicalize
/// the survivors. Returns signature sets keyed by edge count.
fn brute_force_classes(g: usize, n: usize) -> BTreeMap<usize, BTreeSet<String>> {
    let mut out: BTreeMap<usize, BTreeSet<String>> = BTreeMap::new();
    for v in 1..=max_vertices(g, n) {
        let slots: Vec<(usize, usize)> =
            (0..v).flat_map(|a| (a..v).map(move |b| (a, b))).collect();
        for e in 1..=max_edges(g, n) {
            // A connected graph needs at least v - 1 edges and its first
            // Betti number e - v + 1 cannot exceed the genus.
            if v > e + 1 || e + 1 - v > g {
                continue;
            }
            let spare = g - (e + 1 - v);
            for combo in multisets(slots.len(), e) {
                let edges: Vec<(usize, usize)> = combo.iter().map(|&i| slots[i]).collect();
                for weights in compositions(spare, v) {
                    for markings in assignments(n, v) {
                        let candidate = MarkedWeightedGraph::new(
                            g,
                            weights.clone(),
                            edges.clone(),
                            markings,
                        );
                        if let Ok(graph) = candidate {
                            out.entry(e)
                                .or_default()
                                .insert(canonical_form(&graph).signature.0);
                        }
                    }
                }
            }
        }
    }
    out
}

fn compare_with_enumerator(g: usize, n: usize) {
    let brute = brute_force_classes(g, n);
    let enumerator = Enumerator::with_cache(None);
    let strata = enumerator.enumerate_all(g, n).unwrap();
    assert_eq!(strata.len(), max_edges(g, n));
    for (k, stratum) in strata.iter().enumerate() {
        let expected = brute.get(&(k + 1)).cloned().unwrap_or_default();
        let got: BTreeSet<String> =
            stratum.classes.iter().map(|c| c.signature.0.clone()).collect();
        assert_eq!(got, expected, "({g},{n}) classes with {} edges", k + 1);
    }
}

#[test]
fn enumerator_matches_brute_force_on_tiny_types() {
    for (g, n) in [(1, 1), (1, 2), (1, 3), (2, 0), (2, 1)] {
        compare_with_enumerator(g, n);
    }
}

#[test]
fn enumerator_matches_brute_force_on_small_types() {
    for (g, n) in [(1, 4), (2, 2), (3, 0)] {
        compare_with_enumerator(g, n);
    }
}

#[test]
fn bridge_closure_equals_the_downward_closure_of_bridge_graphs() {
    for (g, n) in [(1, 2), (1, 3), (2, 0), (2, 1), (2, 2)] {
        let enumerator = Enumerator::with_cache(None);
        let strata = enumerator.enumerate_all(g, n).unwrap();
        // Seed with every class that itself has a bridge, then close
        // downward under single-edge contractions.
        let mut closure: Vec<BTreeSet<String>> = strata
            .iter()
            .map(|stratum| {
                stratum
                    .classes
                    .iter()
                    .filter(|c| has_bridge(&c.graph))
                    .map(|c| c.signature.0.clone())
                    .collect()
            })
            .collect();
        for k in (1..strata.len()).rev() {
            for class in &strata[k].classes {
                if closure[k].contains(&class.signature.0) {
                    for i in 0..class.graph.num_edges() {
                        let face = class.graph.contract_edge(i);
                        closure[k - 1].insert(canonical_form(&face).signature.0);
                    }
                }
            }
        }
        for (k, stratum) in strata.iter().enumerate() {
            for class in &stratum.classes {
                assert_eq!(
                    in_bridge_closure(&class.graph),
                    closure[k].contains(&class.signature.0),
                    "({g},{n}) {}",
                    class.signature.0
                );
            }
        }
    }
}

#[test]
fn bridge_closure_contains_loops_weights_and_repeated_markings() {
    // Holds whenever the type is not the single-marked torus.
    for (g, n) in [(1, 2), (1, 3), (1, 4), (2, 0), (2, 1), (2, 2), (3, 0)] {
        let enumerator = Enumerator::with_cache(None);
        let strata = enumerator.enumerate_all(g, n).unwrap();
        for stratum in strata.iter() {
            for class in &stratum.classes {
                if class.graph.has_loop_or_weight() || class.graph.has_repeated_marking() {
                    assert!(
                        in_bridge_closure(&class.graph),
                        "({g},{n}) {}",
                        class.signature.0
                    );
                }
            }
        }
    }
}
