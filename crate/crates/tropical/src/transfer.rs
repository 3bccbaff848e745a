//! Transfer and projection chain maps between the unmarked and one-marked
//! cellular complexes of a fixed genus.
//!
//! The transfer sends a class to the sum over its vertices of the class
//! with one marking at that vertex, weighted by the vertex's Euler-type
//! contribution `2w(v) - 2 + val(v)`; those weights sum to `2g - 2` over
//! any graph. The projection forgets the marking, sending the class to
//! zero when the marked vertex becomes unstable without it. Both maps
//! commute with the boundary, and their composite is `2g - 2` times the
//! identity, which forces the homology of the unmarked space to inject
//! into that of the marked one.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;

use crate::canon::{canonical_form_with_parity, permutation_sign, IsoSignature};
use crate::complex::{cellular_complex, ChainComplexQ, Selector};
use crate::enumerate::Enumerator;
use crate::error::{Error, Result};
use crate::graph::MarkedWeightedGraph;
use crate::linalg::SparseRationalMatrix;

/// Degree-preserving chain map, one matrix per stratum of the source.
/// `matrices[k]` maps stratum `k` of the source to stratum `k` of the
/// target; when the target has no stratum `k`, the matrix has zero rows.
#[derive(Debug, Clone)]
pub struct ChainMap {
    pub label: String,
    pub matrices: Vec<SparseRationalMatrix>,
}

impl ChainMap {
    /// Whether the map commutes with the boundary in every positive
    /// stratum. The augmentation rows are not part of the comparison.
    pub fn commutes_with_boundaries(
        &self,
        source: &ChainComplexQ,
        target: &ChainComplexQ,
    ) -> Result<bool> {
        for k in 1..self.matrices.len() {
            let rhs = self.matrices[k - 1].multiply(&source.boundaries[k])?;
            let lhs = if k < target.boundaries.len() && self.matrices[k].rows() > 0 {
                target.boundaries[k].multiply(&self.matrices[k])?
            } else {
                SparseRationalMatrix::new(rhs.rows(), rhs.cols())
            };
            if lhs != rhs {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// The two complexes of one genus together with the transfer and
/// projection between them.
#[derive(Debug)]
pub struct TransferSystem {
    /// Cellular complex of the unmarked type `(g, 0)`.
    pub unmarked: ChainComplexQ,
    /// Cellular complex of the marked type `(g, 1)`.
    pub marked: ChainComplexQ,
    /// Transfer from the unmarked to the marked complex.
    pub transfer: ChainMap,
    /// Marking-forgetting projection from the marked to the unmarked one.
    pub projection: ChainMap,
}

/// Outcome of the chain-level identity checks for one genus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransferReport {
    pub genus: usize,
    pub transfer_commutes: bool,
    pub projection_commutes: bool,
    /// Whether the projection composed with the transfer is `2g - 2`
    /// times the identity in every stratum.
    pub round_trip_is_scaled_identity: bool,
    pub failures: Vec<String>,
}

impl TransferReport {
    pub fn all_hold(&self) -> bool {
        self.transfer_commutes && self.projection_commutes && self.round_trip_is_scaled_identity
    }
}

fn vertex_contribution(graph: &MarkedWeightedGraph, v: usize) -> i64 {
    2 * graph.weight(v) as i64 - 2 + graph.valence(v) as i64
}

/// Transfer image of one unmarked generator as signed marked classes.
fn transfer_terms(graph: &MarkedWeightedGraph) -> Vec<(IsoSignature, i64)> {
    let mut acc: BTreeMap<IsoSignature, i64> = BTreeMap::new();
    for v in 0..graph.num_vertices() {
        let chi = vertex_contribution(graph, v);
        let marked = MarkedWeightedGraph::from_parts_unchecked(
            graph.genus(),
            graph.weights().to_vec(),
            graph.edges().to_vec(),
            vec![v],
        );
        let (cf, odd) = canonical_form_with_parity(&marked);
        if odd {
            continue;
        }
        *acc.entry(cf.signature).or_insert(0) += chi * permutation_sign(&cf.edge_rank);
    }
    acc.into_iter().filter(|(_, c)| *c != 0).collect()
}

/// Projection image of one marked generator: the unmarked class with its
/// rewrite sign, or none when forgetting the marking destabilizes the
/// marked vertex or the image class carries an odd automorphism.
fn projection_term(graph: &MarkedWeightedGraph) -> Option<(IsoSignature, i64)> {
    let forgotten = MarkedWeightedGraph::new(
        graph.genus(),
        graph.weights().to_vec(),
        graph.edges().to_vec(),
        vec![],
    )
    .ok()?;
    let (cf, odd) = canonical_form_with_parity(&forgotten);
    if odd {
        return None;
    }
    Some((cf.signature, permutation_sign(&cf.edge_rank)))
}

fn image_matrix<F>(
    source: &ChainComplexQ,
    target: &ChainComplexQ,
    k: usize,
    image: F,
) -> Result<SparseRationalMatrix>
where
    F: Fn(&MarkedWeightedGraph) -> Vec<(IsoSignature, i64)> + Sync,
{
    let source_basis = &source.bases[k];
    let target_dim = target.bases.get(k).map_or(0, |b| b.len());
    let columns = source_basis
        .par_iter()
        .map(|generator| {
            let mut column = Vec::new();
            for (sig, coeff) in image(&generator.graph) {
                let row = target.position(k, &sig).ok_or_else(|| {
                    Error::Consistency(format!(
                        "image class {sig} of {} is missing from the target basis",
                        generator.signature
                    ))
                })?;
                column.push((row, coeff));
            }
            Ok(column)
        })
        .collect::<Result<Vec<Vec<(usize, i64)>>>>()?;
    let mut matrix = SparseRationalMatrix::new(target_dim, source_basis.len());
    for (j, column) in columns.iter().enumerate() {
        for &(i, v) in column {
            matrix.set(i, j, BigRational::from_integer(BigInt::from(v)));
        }
    }
    Ok(matrix)
}

/// Builds the complexes of types `(g, 0)` and `(g, 1)` and the transfer
/// and projection between them. Needs `g >= 2`; below that the unmarked
/// type is not stable.
pub fn transfer_system(enumerator: &Enumerator, g: usize) -> Result<TransferSystem> {
    if g < 2 {
        return Err(Error::Domain(format!(
            "transfer needs genus at least 2, got {g}"
        )));
    }
    let unmarked = cellular_complex(enumerator, g, 0, Selector::Full)?;
    let marked = cellular_complex(enumerator, g, 1, Selector::Full)?;

    let mut transfer_matrices = Vec::with_capacity(unmarked.bases.len());
    for k in 0..unmarked.bases.len() {
        transfer_matrices.push(image_matrix(&unmarked, &marked, k, transfer_terms)?);
    }
    let mut projection_matrices = Vec::with_capacity(marked.bases.len());
    for k in 0..marked.bases.len() {
        projection_matrices.push(image_matrix(&marked, &unmarked, k, |graph| {
            projection_term(graph).into_iter().collect()
        })?);
    }

    Ok(TransferSystem {
        unmarked,
        marked,
        transfer: ChainMap { label: format!("t({g})"), matrices: transfer_matrices },
        projection: ChainMap { label: format!("pi({g})"), matrices: projection_matrices },
    })
}

impl TransferSystem {
    /// Checks the three chain-level identities, collecting descriptions of
    /// any failures instead of erroring.
    pub fn verify(&self) -> Result<TransferReport> {
        let genus = self.unmarked.g;
        let mut failures = Vec::new();

        let transfer_commutes =
            self.transfer.commutes_with_boundaries(&self.unmarked, &self.marked)?;
        if !transfer_commutes {
            failures.push(format!("transfer does not commute with the boundary at genus {genus}"));
        }
        let projection_commutes =
            self.projection.commutes_with_boundaries(&self.marked, &self.unmarked)?;
        if !projection_commutes {
            failures
                .push(format!("projection does not commute with the boundary at genus {genus}"));
        }

        let scale = BigRational::from_integer(BigInt::from(2 * genus as i64 - 2));
        let mut round_trip = true;
        for k in 0..self.unmarked.bases.len() {
            let composite = self.projection.matrices[k].multiply(&self.transfer.matrices[k])?;
            let expected =
                SparseRationalMatrix::identity(self.unmarked.bases[k].len()).scale(&scale);
            if composite != expected {
                round_trip = false;
                failures.push(format!(
                    "projection after transfer differs from {} times the identity in stratum {}",
                    2 * genus - 2,
                    k + 1
                ));
            }
        }

        Ok(TransferReport {
            genus,
            transfer_commutes,
            projection_commutes,
            round_trip_is_scaled_identity: round_trip,
            failures,
        })
    }
}
