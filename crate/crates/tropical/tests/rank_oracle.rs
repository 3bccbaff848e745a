//! Independent rank oracle: plain dense Gaussian elimination over the
//! rationals, compared against the certified sparse modular pipeline both
//! on real boundary matrices and on random inputs.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;

use tropical::complex::{cellular_complex, marked_graph_complex, Selector};
use tropical::{rank_with, Enumerator, RankOptions, SparseRationalMatrix};

/// Textbook row reduction on a dense copy, no pivoting tricks.
fn dense_rank(matrix: &SparseRationalMatrix) -> usize {
    let (rows, cols) = (matrix.rows(), matrix.cols());
    let mut a: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); cols]; rows];
    for (r, c, v) in matrix.iter() {
        a[r][c] = v.clone();
    }
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(rank, pivot);
        for r in rank + 1..rows {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] / &a[rank][col];
            for c in col..cols {
                let delta = &factor * &a[rank][c];
                a[r][c] = &a[r][c] - delta;
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

#[test]
fn certified_ranks_of_real_boundary_matrices_match_dense_elimination() {
    let enumerator = Enumerator::with_cache(None);
    let mut complexes = vec![
        cellular_complex(&enumerator, 2, 1, Selector::Full).unwrap(),
        cellular_complex(&enumerator, 2, 2, Selector::Full).unwrap(),
        cellular_complex(&enumerator, 1, 4, Selector::BridgeClosure).unwrap(),
        marked_graph_complex(&enumerator, 2, 2).unwrap(),
    ];
    let mut checked = 0;
    for complex in complexes.drain(..) {
        for boundary in &complex.boundaries {
            if boundary.rows() == 0 || boundary.cols() == 0 {
                continue;
            }
            let cert = rank_with(boundary, &RankOptions::default()).unwrap();
            assert!(cert.exact);
            assert_eq!(cert.rank, dense_rank(boundary), "{}", complex.label);
            checked += 1;
        }
    }
    assert!(checked > 8, "expected to exercise several matrices, got {checked}");
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

proptest! {
    #[test]
    fn certified_rank_matches_dense_elimination_on_random_matrices(
        (rows, cols, triples) in (1usize..9, 1usize..9).prop_flat_map(|(rows, cols)| {
            let entry = (0..rows, 0..cols, -9i64..10, 1i64..10);
            (Just(rows), Just(cols), proptest::collection::vec(entry, 0..28))
        })
    ) {
        let mut matrix = SparseRationalMatrix::new(rows, cols);
        for (r, c, num, den) in triples {
            matrix.set(r, c, q(num, den));
        }
        let cert = rank_with(&matrix, &RankOptions::default()).unwrap();
        prop_assert!(cert.exact);
        prop_assert_eq!(cert.rank, dense_rank(&matrix));
    }

    #[test]
    fn rank_is_invariant_under_transposition(
        (rows, cols, triples) in (1usize..8, 1usize..8).prop_flat_map(|(rows, cols)| {
            let entry = (0..rows, 0..cols, -6i64..7, 1i64..7);
            (Just(rows), Just(cols), proptest::collection::vec(entry, 0..20))
        })
    ) {
        let mut matrix = SparseRationalMatrix::new(rows, cols);
        for (r, c, num, den) in triples {
            matrix.set(r, c, q(num, den));
        }
        let direct = rank_with(&matrix, &RankOptions::default()).unwrap().rank;
        let transposed = rank_with(&matrix.transpose(), &RankOptions::default()).unwrap().rank;
        prop_assert_eq!(direct, transposed);
    }
}
