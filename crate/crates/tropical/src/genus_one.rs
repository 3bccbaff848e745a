//! Symmetric group representations on the top homology of the genus-one
//! spaces.
//!
//! For `n` markings the top reduced homology has dimension `(n-1)!/2`,
//! the number of cyclic orderings of the markings up to rotation and
//! reflection. The symmetric group permutes those orderings through the
//! dihedral group of the marked cycle, twisted by the sign of the induced
//! permutation of the cycle's edges. This module computes the resulting
//! character twice: once by the induced-character formula summed over the
//! whole symmetric group, and once as the trace of the action on the
//! actual top cells. The two embeddings of the dihedral group that enter,
//! on vertices and on edges, induce different sign characters for some
//! `n`, the smallest being `n = 4`.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::canon::{canonical_form_with_parity, permutation_sign, permutations, IsoSignature};
use crate::error::{Error, Result};
use crate::graph::MarkedWeightedGraph;

/// One symmetry of the marked `n`-cycle: its action on the markings
/// (vertices) and on the edges, with the signs of both permutations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DihedralElement {
    pub vertex_perm: Vec<usize>,
    pub edge_perm: Vec<usize>,
    pub vertex_sign: i64,
    pub edge_sign: i64,
}

/// All `2n` symmetries of the `n`-cycle, rotations first.
pub fn dihedral_elements(n: usize) -> Result<Vec<DihedralElement>> {
    if n < 3 {
        return Err(Error::Domain(format!("the {n}-cycle has no dihedral symmetry group")));
    }
    let mut elements = Vec::with_capacity(2 * n);
    for r in 0..n {
        for reflect in [false, true] {
            let vertex_perm: Vec<usize> = (0..n)
                .map(|v| if reflect { (n + r - v) % n } else { (v + r) % n })
                .collect();
            let edge_perm: Vec<usize> = (0..n)
                .map(|i| {
                    let a = vertex_perm[i];
                    let b = vertex_perm[(i + 1) % n];
                    if (a + 1) % n == b {
                        a
                    } else {
                        b
                    }
                })
                .collect();
            let vertex_sign = permutation_sign(&vertex_perm);
            let edge_sign = permutation_sign(&edge_perm);
            elements.push(DihedralElement { vertex_perm, edge_perm, vertex_sign, edge_sign });
        }
    }
    Ok(elements)
}

/// Partitions of `n` in reverse lexicographic order, from `[n]` down to
/// all ones. Each partition is a cycle type of the symmetric group.
pub fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn extend(remaining: usize, cap: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if remaining == 0 {
            out.push(prefix.clone());
            return;
        }
        for part in (1..=remaining.min(cap)).rev() {
            prefix.push(part);
            extend(remaining - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    extend(n, n, &mut Vec::new(), &mut out);
    out
}

/// Number of permutations with the given cycle type.
pub fn class_size(partition: &[usize]) -> u64 {
    let n: usize = partition.iter().sum();
    let mut centralizer = 1u64;
    let mut multiplicity: HashMap<usize, u64> = HashMap::new();
    for &part in partition {
        let m = multiplicity.entry(part).or_insert(0);
        *m += 1;
        centralizer *= part as u64 * *m;
    }
    let factorial: u64 = (1..=n as u64).product();
    factorial / centralizer
}

/// A permutation with the given cycle type, built from consecutive cycles.
pub fn cycle_type_representative(partition: &[usize]) -> Vec<usize> {
    let n: usize = partition.iter().sum();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut start = 0;
    for &part in partition {
        for i in 0..part {
            perm[start + i] = start + (i + 1) % part;
        }
        start += part;
    }
    perm
}

/// Class function on the symmetric group of degree `n`, with one value
/// per cycle type in the order returned by [`partitions`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassFunction {
    pub n: usize,
    pub partitions: Vec<Vec<usize>>,
    pub values: Vec<i64>,
}

impl ClassFunction {
    /// Value at the identity.
    pub fn dimension(&self) -> i64 {
        let identity = self.partitions.iter().position(|p| p.iter().all(|&x| x == 1));
        identity.map_or(0, |i| self.values[i])
    }

    pub fn inner_product(&self, other: &ClassFunction) -> Result<BigRational> {
        if self.n != other.n {
            return Err(Error::Domain("class functions of different degrees".into()));
        }
        let mut total = BigInt::from(0);
        for (i, partition) in self.partitions.iter().enumerate() {
            total += BigInt::from(class_size(partition))
                * BigInt::from(self.values[i])
                * BigInt::from(other.values[i]);
        }
        let order: u64 = (1..=self.n as u64).product();
        Ok(BigRational::new(total, BigInt::from(order)))
    }

    /// Multiplicity-squared sum over irreducible components.
    pub fn schur_norm(&self) -> Result<BigRational> {
        self.inner_product(self)
    }
}

/// Dimension of the top reduced homology in genus one: the number of
/// cyclic orderings of the markings up to rotation and reflection, which
/// is zero for fewer than three markings.
pub fn top_betti_formula(n: usize) -> Result<usize> {
    if n == 0 {
        return Err(Error::Domain("genus one needs at least one marking".into()));
    }
    if n < 3 {
        return Ok(0);
    }
    if n > 20 {
        return Err(Error::Capacity(format!("factorial overflow for {n} markings")));
    }
    Ok((1..n).product::<usize>() / 2)
}

/// Character of the representation induced from the edge-sign character
/// of the dihedral group, by the standard sum over the symmetric group.
pub fn induced_character(n: usize) -> Result<ClassFunction> {
    if n > 9 {
        return Err(Error::Capacity(format!(
            "induced character sums over {n}! permutations; not attempting beyond 9"
        )));
    }
    let dihedral: HashMap<Vec<usize>, i64> = dihedral_elements(n)?
        .into_iter()
        .map(|d| (d.vertex_perm, d.edge_sign))
        .collect();
    let all = permutations(n);
    let parts = partitions(n);
    let mut values = Vec::with_capacity(parts.len());
    for partition in &parts {
        let sigma = cycle_type_representative(partition);
        let mut total = 0i64;
        for x in &all {
            let mut x_inv = vec![0; n];
            for (i, &xi) in x.iter().enumerate() {
                x_inv[xi] = i;
            }
            let conjugate: Vec<usize> = (0..n).map(|i| x_inv[sigma[x[i]]]).collect();
            if let Some(&sign) = dihedral.get(&conjugate) {
                total += sign;
            }
        }
        let order = 2 * n as i64;
        if total % order != 0 {
            return Err(Error::Consistency(format!(
                "induced character value {total} is not divisible by the group order {order}"
            )));
        }
        values.push(total / order);
    }
    Ok(ClassFunction { n, partitions: parts, values })
}

/// The classes of markings of the `n`-cycle: one canonical representative
/// per cyclic ordering up to rotation and reflection, sorted by signature.
/// These are exactly the injective weightless classes of the top genus-one
/// stratum.
pub fn marked_cycle_classes(n: usize) -> Result<Vec<(IsoSignature, MarkedWeightedGraph)>> {
    if n < 3 {
        return Err(Error::Domain(format!("no marked cycles on {n} markings")));
    }
    if n > 9 {
        return Err(Error::Capacity(format!(
            "not enumerating marked cycles beyond 9 markings, got {n}"
        )));
    }
    let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    let mut classes: BTreeMap<IsoSignature, MarkedWeightedGraph> = BTreeMap::new();
    // Fixing marking 0 at vertex 0 leaves each class with exactly two
    // arrangements, one per traversal direction.
    for arrangement in permutations(n - 1) {
        let mut markings = vec![0; n];
        for (vertex, &label) in arrangement.iter().enumerate() {
            markings[label + 1] = vertex + 1;
        }
        let cycle = MarkedWeightedGraph::from_parts_unchecked(
            1,
            vec![0; n],
            edges.clone(),
            markings,
        );
        let (cf, odd) = canonical_form_with_parity(&cycle);
        if odd {
            return Err(Error::Consistency(
                "a marked cycle cannot have an odd automorphism".into(),
            ));
        }
        classes.entry(cf.signature).or_insert(cf.graph);
    }
    Ok(classes.into_iter().collect())
}

/// The same character computed from the cells: the trace of each cycle
/// type acting on the marked-cycle classes, with the sign of rewriting
/// the permuted marking back to its reference labeling.
pub fn cell_action_character(n: usize) -> Result<ClassFunction> {
    let basis = marked_cycle_classes(n)?;
    let parts = partitions(n);
    let mut values = Vec::with_capacity(parts.len());
    for partition in &parts {
        let sigma = cycle_type_representative(partition);
        let mut sigma_inv = vec![0; n];
        for (i, &si) in sigma.iter().enumerate() {
            sigma_inv[si] = i;
        }
        let mut trace = 0i64;
        for (class_signature, graph) in &basis {
            let relabeled: Vec<usize> =
                (0..n).map(|leg| graph.markings()[sigma_inv[leg]]).collect();
            let moved = MarkedWeightedGraph::from_parts_unchecked(
                graph.genus(),
                graph.weights().to_vec(),
                graph.edges().to_vec(),
                relabeled,
            );
            let (cf, odd) = canonical_form_with_parity(&moved);
            if odd {
                continue;
            }
            if cf.signature == *class_signature {
                trace += permutation_sign(&cf.edge_rank);
            }
        }
        values.push(trace);
    }
    Ok(ClassFunction { n, partitions: parts, values })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_enumeration_matches_known_counts() {
        assert_eq!(partitions(1).len(), 1);
        assert_eq!(partitions(4).len(), 5);
        assert_eq!(partitions(5).len(), 7);
        assert_eq!(partitions(8).len(), 22);
        let parts = partitions(5);
        assert_eq!(parts.first().unwrap(), &vec![5]);
        assert_eq!(parts.last().unwrap(), &vec![1; 5]);
        let total: u64 = parts.iter().map(|p| class_size(p)).sum();
        assert_eq!(total, 120);
    }

    #[test]
    fn cycle_type_representatives_have_the_right_type() {
        let rep = cycle_type_representative(&[3, 2, 1]);
        assert_eq!(rep, vec![1, 2, 0, 4, 3, 5]);
        assert_eq!(permutation_sign(&rep), -1);
    }

    #[test]
    fn vertex_and_edge_signs_agree_on_triangles_but_not_squares() {
        let triangle = dihedral_elements(3).unwrap();
        assert_eq!(triangle.len(), 6);
        assert!(triangle.iter().all(|d| d.vertex_sign == d.edge_sign));
        let square = dihedral_elements(4).unwrap();
        assert_eq!(square.len(), 8);
        assert!(square.iter().any(|d| d.vertex_sign == -1 && d.edge_sign == 1));
        assert!(square.iter().any(|d| d.vertex_sign == 1 && d.edge_sign == -1));
    }

    #[test]
    fn top_betti_values() {
        let values: Vec<usize> =
            (1..=6).map(|n| top_betti_formula(n).unwrap()).collect();
        assert_eq!(values, vec![0, 0, 1, 3, 12, 60]);
    }

    #[test]
    fn induced_and_cell_characters_agree_on_small_degrees() {
        for n in 3..=5 {
            let induced = induced_character(n).unwrap();
            let cells = cell_action_character(n).unwrap();
            assert_eq!(induced, cells, "degree {n}");
            assert_eq!(induced.dimension() as usize, top_betti_formula(n).unwrap());
        }
    }

    #[test]
    fn marked_cycles_are_the_injective_weightless_top_classes() {
        use crate::canon::has_odd_automorphism;
        use crate::enumerate::{Enumerator, StratumKey};
        let e = Enumerator::with_cache(None);
        for n in 3..=5 {
            let direct: Vec<IsoSignature> =
                marked_cycle_classes(n).unwrap().into_iter().map(|(s, _)| s).collect();
            let stratum = e.enumerate_stratum(StratumKey { g: 1, n, edges: n }).unwrap();
            let filtered: Vec<IsoSignature> = stratum
                .classes
                .iter()
                .filter(|class| {
                    class.graph.is_pure()
                        && !class.graph.has_repeated_marking()
                        && !has_odd_automorphism(&class.graph)
                })
                .map(|class| class.signature.clone())
                .collect();
            assert_eq!(direct, filtered, "{n} markings");
            assert_eq!(direct.len(), top_betti_formula(n).unwrap());
        }
    }

    #[test]
    fn triangle_character_is_the_sign_character() {
        let chi = induced_character(3).unwrap();
        assert_eq!(chi.partitions, vec![vec![3], vec![2, 1], vec![1, 1, 1]]);
        assert_eq!(chi.values, vec![1, -1, 1]);
        assert_eq!(chi.schur_norm().unwrap(), BigRational::from_integer(BigInt::from(1)));
    }
}
