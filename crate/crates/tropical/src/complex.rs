//! Chain complexes of rational coinvariant chains on strata of stable
//! marked weighted graphs, with certified Betti numbers.
//!
//! A complex holds one basis per stratum (classes with a fixed edge count,
//! minus the classes killed by an odd automorphism) and the boundary
//! matrices between consecutive strata. The boundary of a generator
//! contracts each edge in turn with an alternating sign, rewrites the face
//! to the reference labeling of its class, and picks up the sign of that
//! relabeling. Subcomplexes are cut out by contraction-closed selectors,
//! and quotients by a selector pair drop the faces that land in the
//! subcomplex.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::blocks::in_bridge_closure;
use crate::canon::{canonical_form_with_parity, has_odd_automorphism, permutation_sign, IsoSignature};
use crate::enumerate::Enumerator;
use crate::error::{Error, Result};
use crate::graph::MarkedWeightedGraph;
use crate::linalg::{rank_with, RankCertificate, RankOptions, SparseRationalMatrix};

/// Predicate cutting a closed subcomplex (or, for `Pure`, an open locus
/// usable only for cell counting) out of the stratification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Selector {
    /// Every class.
    Full,
    /// Classes with a vertex of positive weight.
    Weight,
    /// Classes with a loop or a vertex of positive weight.
    LoopWeight,
    /// Classes with two markings on one vertex.
    RepeatedMarking,
    /// Classes with a bridge, together with all their iterated contractions.
    BridgeClosure,
    /// Classes with zero weights, loops allowed. Not closed under
    /// contraction, so valid for cell counting only.
    Pure,
    Union(Box<Selector>, Box<Selector>),
    Intersection(Box<Selector>, Box<Selector>),
}

impl Selector {
    pub fn matches(&self, g: &MarkedWeightedGraph) -> bool {
        match self {
            Selector::Full => true,
            Selector::Weight => g.has_positive_weight(),
            Selector::LoopWeight => g.has_loop_or_weight(),
            Selector::RepeatedMarking => g.has_repeated_marking(),
            Selector::BridgeClosure => in_bridge_closure(g),
            Selector::Pure => g.is_pure(),
            Selector::Union(a, b) => a.matches(g) || b.matches(g),
            Selector::Intersection(a, b) => a.matches(g) && b.matches(g),
        }
    }

    /// Whether membership is preserved by every edge contraction. Composite
    /// selectors are judged structurally, so the answer is conservative.
    pub fn is_closed(&self) -> bool {
        match self {
            Selector::Pure => false,
            Selector::Union(a, b) | Selector::Intersection(a, b) => {
                a.is_closed() && b.is_closed()
            }
            _ => true,
        }
    }

    pub fn label(&self) -> String {
        match self {
            Selector::Full => "full".into(),
            Selector::Weight => "w".into(),
            Selector::LoopWeight => "lw".into(),
            Selector::RepeatedMarking => "rep".into(),
            Selector::BridgeClosure => "br".into(),
            Selector::Pure => "pure".into(),
            Selector::Union(a, b) => format!("({}+{})", a.label(), b.label()),
            Selector::Intersection(a, b) => format!("({}&{})", a.label(), b.label()),
        }
    }
}

/// One basis element: the canonical representative of a class without odd
/// automorphisms. The representative's edge order is the reference labeling.
#[derive(Debug, Clone)]
pub struct CellGenerator {
    pub signature: IsoSignature,
    pub graph: MarkedWeightedGraph,
}

/// One face of a generator's boundary, accumulated over all contractions
/// that land in the same class.
#[derive(Debug, Clone)]
pub struct FaceTerm {
    pub signature: IsoSignature,
    /// Canonical representative of the face class.
    pub graph: MarkedWeightedGraph,
    pub coefficient: i64,
}

/// Boundary of a single generator as face terms: contract each edge with
/// sign `(-1)^i`, rewrite the face to its reference labeling picking up the
/// relabeling sign, and drop faces with an odd automorphism. With
/// `loops_vanish`, loop contractions are dropped as well.
pub fn boundary_terms(graph: &MarkedWeightedGraph, loops_vanish: bool) -> Vec<FaceTerm> {
    let mut acc: BTreeMap<IsoSignature, (MarkedWeightedGraph, i64)> = BTreeMap::new();
    for i in 0..graph.num_edges() {
        if loops_vanish && graph.is_loop(i) {
            continue;
        }
        let face = graph.contract_edge(i);
        let (cf, odd) = canonical_form_with_parity(&face);
        if odd {
            continue;
        }
        let sign = if i % 2 == 0 { 1 } else { -1 } * permutation_sign(&cf.edge_rank);
        let entry = acc.entry(cf.signature).or_insert((cf.graph, 0));
        entry.1 += sign;
    }
    acc.into_iter()
        .filter(|(_, (_, c))| *c != 0)
        .map(|(signature, (graph, coefficient))| FaceTerm { signature, graph, coefficient })
        .collect()
}

/// Boundary of a single generator as signed class coefficients.
pub fn generator_boundary(graph: &MarkedWeightedGraph) -> Vec<(IsoSignature, i64)> {
    boundary_terms(graph, false).into_iter().map(|t| (t.signature, t.coefficient)).collect()
}

/// Reduced rational Betti numbers of a complex, indexed by stratum: entry
/// `k` is the Betti number in homological degree `offset + k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BettiTable {
    pub label: String,
    pub g: usize,
    pub n: usize,
    /// Homological degree of the stratum with one edge.
    pub offset: isize,
    pub values: Vec<usize>,
    /// True when the complex has no generators at all. An empty augmented
    /// complex is not acyclic (its reduced homology sits in degree -1), so
    /// this flag disambiguates the all-zero table.
    pub empty: bool,
    /// True when every rank used was certified by an exact rational pass.
    pub exact: bool,
}

/// Chain complex over Q with one basis per stratum.
///
/// `bases[k]` holds the generators on `k + 1` edges, in homological degree
/// `offset + k`. `boundaries[k]` maps `bases[k]` to `bases[k - 1]`; index 0
/// is the augmentation row when `augmented`, and an empty matrix otherwise.
#[derive(Debug, Clone)]
pub struct ChainComplexQ {
    pub label: String,
    pub g: usize,
    pub n: usize,
    pub offset: isize,
    pub augmented: bool,
    pub bases: Vec<Vec<CellGenerator>>,
    pub boundaries: Vec<SparseRationalMatrix>,
}

struct BuildPlan {
    g: usize,
    n: usize,
    ambient: Selector,
    sub: Option<Selector>,
    loops_vanish: bool,
    augmented: bool,
    offset: isize,
    label: String,
}

/// Cellular chain complex of the subcomplex cut out by a closed selector,
/// with an augmentation row. Loop contractions are ordinary faces here.
pub fn cellular_complex(
    enumerator: &Enumerator,
    g: usize,
    n: usize,
    selector: Selector,
) -> Result<ChainComplexQ> {
    if !selector.is_closed() {
        return Err(Error::Domain(format!(
            "selector {} is not closed under contraction",
            selector.label()
        )));
    }
    let label = format!("delta({g},{n})[{}]", selector.label());
    build(
        enumerator,
        BuildPlan {
            g,
            n,
            ambient: selector,
            sub: None,
            loops_vanish: false,
            augmented: true,
            offset: 0,
            label,
        },
    )
}

/// Quotient of the ambient cellular complex by the subcomplex of `sub`:
/// generators in the ambient but not the sub selector, boundary faces
/// landing in the subcomplex dropped, no augmentation.
pub fn relative_complex(
    enumerator: &Enumerator,
    g: usize,
    n: usize,
    ambient: Selector,
    sub: Selector,
) -> Result<ChainComplexQ> {
    for (role, sel) in [("ambient", &ambient), ("sub", &sub)] {
        if !sel.is_closed() {
            return Err(Error::Domain(format!(
                "{role} selector {} is not closed under contraction",
                sel.label()
            )));
        }
    }
    let label = format!("delta({g},{n})[{} mod {}]", ambient.label(), sub.label());
    build(
        enumerator,
        BuildPlan {
            g,
            n,
            ambient,
            sub: Some(sub),
            loops_vanish: false,
            augmented: false,
            offset: 0,
            label,
        },
    )
}

/// Marked graph complex: generators are the weight-zero classes (loops
/// allowed, markings arbitrary), loop contractions vanish, and a generator
/// with `e` edges sits in homological degree `e - 2g`.
pub fn marked_graph_complex(enumerator: &Enumerator, g: usize, n: usize) -> Result<ChainComplexQ> {
    if g == 0 {
        return Err(Error::Domain("marked graph complexes need positive genus".into()));
    }
    build(
        enumerator,
        BuildPlan {
            g,
            n,
            ambient: Selector::Full,
            sub: Some(Selector::Weight),
            loops_vanish: true,
            augmented: false,
            offset: 1 - 2 * g as isize,
            label: format!("ghat({g},{n})"),
        },
    )
}

/// Variant of the marked graph complex with injective markings: faces that
/// would put two markings on one vertex vanish along with loop
/// contractions. The type (1,1) is excluded: its only generator has an
/// odd automorphism, leaving nothing to build on.
pub fn k_complex(enumerator: &Enumerator, g: usize, n: usize) -> Result<ChainComplexQ> {
    if g == 0 {
        return Err(Error::Domain("injective marked graph complexes need positive genus".into()));
    }
    if g == 1 && n == 1 {
        return Err(Error::Domain("type (1,1) has no injective marked graph complex".into()));
    }
    build(
        enumerator,
        BuildPlan {
            g,
            n,
            ambient: Selector::Full,
            sub: Some(Selector::Union(
                Box::new(Selector::Weight),
                Box::new(Selector::RepeatedMarking),
            )),
            loops_vanish: true,
            augmented: false,
            offset: 1 - 2 * g as isize,
            label: format!("k({g},{n})"),
        },
    )
}

/// Per stratum: (classes matching the selector, those without an odd
/// automorphism). Valid for any selector, including open ones.
pub fn cell_counts(
    enumerator: &Enumerator,
    g: usize,
    n: usize,
    selector: &Selector,
) -> Result<Vec<(usize, usize)>> {
    let strata = enumerator.enumerate_all(g, n)?;
    Ok(strata
        .iter()
        .map(|stratum| {
            let matching: Vec<&MarkedWeightedGraph> = stratum
                .classes
                .iter()
                .map(|c| &c.graph)
                .filter(|graph| selector.matches(graph))
                .collect();
            let nonzero =
                matching.par_iter().filter(|graph| !has_odd_automorphism(graph)).count();
            (matching.len(), nonzero)
        })
        .collect())
}

fn build(enumerator: &Enumerator, plan: BuildPlan) -> Result<ChainComplexQ> {
    let strata = enumerator.enumerate_all(plan.g, plan.n)?;
    let mut bases: Vec<Vec<CellGenerator>> = Vec::with_capacity(strata.len());
    for stratum in strata.iter() {
        let kept = stratum
            .classes
            .par_iter()
            .map(|class| {
                let in_ambient = plan.ambient.matches(&class.graph);
                let in_sub = plan.sub.as_ref().is_some_and(|s| s.matches(&class.graph));
                if in_sub && !in_ambient {
                    return Err(Error::Domain(format!(
                        "class {} lies in the sub selector but not the ambient one",
                        class.signature
                    )));
                }
                if !in_ambient || in_sub || has_odd_automorphism(&class.graph) {
                    return Ok(None);
                }
                Ok(Some(CellGenerator {
                    signature: class.signature.clone(),
                    graph: class.graph.clone(),
                }))
            })
            .collect::<Result<Vec<_>>>()?;
        bases.push(kept.into_iter().flatten().collect());
    }

    let mut boundaries = Vec::with_capacity(bases.len());
    let dim0 = bases[0].len();
    boundaries.push(if plan.augmented {
        let mut m = SparseRationalMatrix::new(1, dim0);
        for j in 0..dim0 {
            m.set(0, j, BigRational::one());
        }
        m
    } else {
        SparseRationalMatrix::new(0, dim0)
    });
    for k in 1..bases.len() {
        let index_below: HashMap<&IsoSignature, usize> =
            bases[k - 1].iter().enumerate().map(|(i, c)| (&c.signature, i)).collect();
        let columns = bases[k]
            .par_iter()
            .map(|generator| {
                let mut column: Vec<(usize, i64)> = Vec::new();
                for term in boundary_terms(&generator.graph, plan.loops_vanish) {
                    if plan.sub.as_ref().is_some_and(|s| s.matches(&term.graph)) {
                        continue;
                    }
                    let row = index_below.get(&term.signature).ok_or_else(|| {
                        Error::Consistency(format!(
                            "face {} of generator {} is missing from the basis below",
                            term.signature, generator.signature
                        ))
                    })?;
                    column.push((*row, term.coefficient));
                }
                Ok(column)
            })
            .collect::<Result<Vec<_>>>()?;
        let mut matrix = SparseRationalMatrix::new(bases[k - 1].len(), bases[k].len());
        for (j, column) in columns.iter().enumerate() {
            for &(i, v) in column {
                matrix.set(i, j, BigRational::from_integer(BigInt::from(v)));
            }
        }
        boundaries.push(matrix);
    }

    Ok(ChainComplexQ {
        label: plan.label,
        g: plan.g,
        n: plan.n,
        offset: plan.offset,
        augmented: plan.augmented,
        bases,
        boundaries,
    })
}

impl ChainComplexQ {
    pub fn dims(&self) -> Vec<usize> {
        self.bases.iter().map(|b| b.len()).collect()
    }

    /// Homological degree of stratum index `k`.
    pub fn degree(&self, k: usize) -> isize {
        self.offset + k as isize
    }

    /// Position of a class in the basis of stratum index `k`.
    pub fn position(&self, k: usize, signature: &IsoSignature) -> Option<usize> {
        let basis = self.bases.get(k)?;
        basis.binary_search_by(|c| c.signature.cmp(signature)).ok()
    }

    /// Checks that consecutive boundary matrices compose to zero, including
    /// the augmentation row.
    pub fn check_boundary_squared(&self) -> Result<()> {
        for k in 1..self.boundaries.len() {
            let square = self.boundaries[k - 1].multiply(&self.boundaries[k])?;
            if !square.is_zero() {
                return Err(Error::Consistency(format!(
                    "boundary squared is nonzero between strata {} and {} of {}",
                    k + 1,
                    k - 1,
                    self.label
                )));
            }
        }
        Ok(())
    }

    /// Image of a chain in stratum index `k` under the boundary map.
    pub fn boundary_of(&self, k: usize, chain: &[BigRational]) -> Result<Vec<BigRational>> {
        let matrix = self
            .boundaries
            .get(k)
            .ok_or_else(|| Error::Domain(format!("no stratum index {k} in {}", self.label)))?;
        if chain.len() != matrix.cols() {
            return Err(Error::Domain(format!(
                "chain length {} does not match basis size {}",
                chain.len(),
                matrix.cols()
            )));
        }
        let mut image = vec![BigRational::zero(); matrix.rows()];
        for (r, c, v) in matrix.iter() {
            if !chain[c].is_zero() {
                image[r] += v * &chain[c];
            }
        }
        Ok(image)
    }

    pub fn betti(&self) -> Result<BettiTable> {
        self.betti_with(&RankOptions::default())
    }

    /// Reduced Betti numbers from certified boundary ranks. Verifies that
    /// the boundary squares to zero first.
    pub fn betti_with(&self, options: &RankOptions) -> Result<BettiTable> {
        self.check_boundary_squared()?;
        let certificates: Vec<RankCertificate> = self
            .boundaries
            .par_iter()
            .map(|m| rank_with(m, options))
            .collect::<Result<Vec<_>>>()?;
        let mut values = Vec::with_capacity(self.bases.len());
        for k in 0..self.bases.len() {
            let dim = self.bases[k].len();
            let rank_in = certificates[k].rank;
            let rank_out = certificates.get(k + 1).map_or(0, |c| c.rank);
            let value = dim.checked_sub(rank_in + rank_out).ok_or_else(|| {
                Error::Consistency(format!(
                    "ranks exceed dimension in stratum index {k} of {}",
                    self.label
                ))
            })?;
            values.push(value);
        }
        Ok(BettiTable {
            label: self.label.clone(),
            g: self.g,
            n: self.n,
            offset: self.offset,
            values,
            empty: self.dims().iter().all(|&d| d == 0),
            exact: certificates.iter().all(|c| c.exact),
        })
    }

    /// Euler characteristic computed twice, from cell counts and from the
    /// Betti table, with a consistency check between the two.
    pub fn euler_characteristic(&self, table: &BettiTable) -> Result<i64> {
        let sign = |d: isize| if d.rem_euclid(2) == 0 { 1i64 } else { -1 };
        let mut from_cells = 0i64;
        let mut from_betti = 0i64;
        for k in 0..self.bases.len() {
            let s = sign(self.degree(k));
            from_cells += s * self.bases[k].len() as i64;
            from_betti += s * table.values[k] as i64;
        }
        if self.augmented {
            from_cells -= 1;
            let augmentation_rank = if self.bases[0].is_empty() { 0i64 } else { 1 };
            from_betti -= 1 - augmentation_rank;
        }
        if from_cells != from_betti {
            return Err(Error::Consistency(format!(
                "Euler characteristic mismatch for {}: cells {} vs homology {}",
                self.label, from_cells, from_betti
            )));
        }
        Ok(from_cells)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn enumerator() -> Enumerator {
        Enumerator::with_cache(None)
    }

    #[test]
    fn smallest_type_is_a_contractible_point() {
        let e = enumerator();
        let complex = cellular_complex(&e, 1, 1, Selector::Full).unwrap();
        assert_eq!(complex.dims(), vec![1]);
        let table = complex.betti().unwrap();
        assert_eq!(table.values, vec![0]);
        assert!(!table.empty);
        assert!(table.exact);
        assert_eq!(complex.euler_characteristic(&table).unwrap(), 0);
    }

    #[test]
    fn genus_two_closed_space_is_acyclic() {
        let e = enumerator();
        let complex = cellular_complex(&e, 2, 0, Selector::Full).unwrap();
        assert_eq!(complex.dims(), vec![2, 1, 0]);
        let table = complex.betti().unwrap();
        assert_eq!(table.values, vec![0, 0, 0]);
        assert_eq!(complex.euler_characteristic(&table).unwrap(), 0);
    }

    #[test]
    fn boundary_squares_to_zero_on_a_midsize_type() {
        let e = enumerator();
        let complex = cellular_complex(&e, 2, 2, Selector::Full).unwrap();
        complex.check_boundary_squared().unwrap();
        let sub = cellular_complex(&e, 2, 2, Selector::LoopWeight).unwrap();
        sub.check_boundary_squared().unwrap();
    }

    #[test]
    fn quotient_dimensions_complement_the_subcomplex() {
        let e = enumerator();
        let full = cellular_complex(&e, 2, 1, Selector::Full).unwrap();
        let sub = cellular_complex(&e, 2, 1, Selector::Weight).unwrap();
        let quotient =
            relative_complex(&e, 2, 1, Selector::Full, Selector::Weight).unwrap();
        quotient.check_boundary_squared().unwrap();
        for k in 0..full.bases.len() {
            assert_eq!(
                full.bases[k].len(),
                sub.bases[k].len() + quotient.bases[k].len()
            );
        }
        assert!(!quotient.augmented);
        assert_eq!(quotient.boundaries[0].rows(), 0);
    }

    #[test]
    fn open_selector_is_rejected_for_complexes_but_counted() {
        let e = enumerator();
        assert!(matches!(
            cellular_complex(&e, 2, 0, Selector::Pure),
            Err(Error::Domain(_))
        ));
        let counts = cell_counts(&e, 2, 0, &Selector::Pure).unwrap();
        assert_eq!(counts, vec![(0, 0), (1, 0), (2, 0)]);
    }

    #[test]
    fn marked_graph_complex_of_smallest_type_sits_in_negative_degree() {
        let e = enumerator();
        let complex = marked_graph_complex(&e, 1, 1).unwrap();
        assert_eq!(complex.offset, -1);
        assert_eq!(complex.dims(), vec![1]);
        assert_eq!(complex.degree(0), -1);
        let table = complex.betti().unwrap();
        assert_eq!(table.values, vec![1]);
    }

    #[test]
    fn injective_complex_rejects_smallest_type() {
        let e = enumerator();
        assert!(matches!(k_complex(&e, 1, 1), Err(Error::Domain(_))));
        assert!(matches!(k_complex(&e, 0, 4), Err(Error::Domain(_))));
    }

    #[test]
    fn wheel_on_three_spokes_is_a_cycle() {
        let wheel = MarkedWeightedGraph::new(
            3,
            vec![0; 4],
            vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)],
            vec![],
        )
        .unwrap();
        assert!(generator_boundary(&wheel).is_empty());
    }

    #[test]
    fn relabeled_generator_boundary_matches_up_to_the_permutation_sign() {
        let dumbbell = MarkedWeightedGraph::new(
            2,
            vec![0, 0],
            vec![(0, 0), (0, 1), (1, 1)],
            vec![0],
        )
        .unwrap();
        let swapped = dumbbell.permute_edges(&[1, 0, 2]);
        let base: BTreeMap<_, _> = generator_boundary(&dumbbell).into_iter().collect();
        let other: BTreeMap<_, _> = generator_boundary(&swapped).into_iter().collect();
        assert_eq!(base.len(), 2);
        assert_eq!(base.len(), other.len());
        for (sig, coeff) in &base {
            assert_eq!(other[sig], -coeff, "face {sig}");
        }
    }
}
