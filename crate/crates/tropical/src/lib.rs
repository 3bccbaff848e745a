//! Exact rational homology of moduli spaces of stable marked weighted
//! graphs.
//!
//! A stable marked weighted graph of genus `g` with `n` markings is a
//! connected multigraph with nonnegative integer vertex weights and `n`
//! labeled legs, whose first Betti number plus total weight equals `g` and
//! whose every weight-zero vertex meets at least three half-edges or legs
//! (at least one for weight one). Isomorphism classes of such graphs with a
//! fixed number of edges index the cells of a symmetric semisimplicial
//! space; this crate enumerates the classes, assembles the rational
//! cellular chain complexes of that space and of several natural
//! subcomplexes and quotient complexes, and computes their exact reduced
//! rational homology.

pub mod blocks;
pub mod cache;
pub mod canon;
pub mod complex;
pub mod enumerate;
pub mod error;
pub mod genus_one;
pub mod graph;
pub mod linalg;
pub mod transfer;

pub use blocks::{
    block_decomposition, bridges, has_bridge, in_bridge_closure, BlockDecomposition,
    BlockTreeEdge,
};
pub use cache::StratumCache;
pub use canon::{
    automorphisms, canonical_form, canonical_form_with_parity, has_odd_automorphism,
    isomorphism_edge_map, permutation_sign, signature, vertex_automorphisms, Automorphism,
    CanonicalForm, IsoSignature,
};
pub use complex::{
    boundary_terms, cell_counts, cellular_complex, generator_boundary, k_complex,
    marked_graph_complex, relative_complex, BettiTable, CellGenerator, ChainComplexQ,
    FaceTerm, Selector,
};
pub use enumerate::{max_edges, max_vertices, Enumerator, Stratum, StratumClass, StratumKey};
pub use error::{Error, Result};
pub use genus_one::{
    cell_action_character, class_size, dihedral_elements, induced_character,
    marked_cycle_classes, partitions, top_betti_formula, ClassFunction, DihedralElement,
};
pub use graph::{GraphRecord, HalfEdgeStructure, LocusFlags, MarkedWeightedGraph};
pub use linalg::{
    rank, rank_with, standard_basis_in_span, RankCertificate, RankOptions,
    SparseRationalMatrix,
};
pub use transfer::{transfer_system, ChainMap, TransferReport, TransferSystem};
