//! End-to-end homology checks on types small enough to run in seconds.

use tropical::{cellular_complex, marked_graph_complex, Enumerator, Selector};

fn enumerator() -> Enumerator {
    Enumerator::with_cache(None)
}

#[test]
fn genus_two_with_two_markings_has_one_top_class() {
    let e = enumerator();
    let complex = cellular_complex(&e, 2, 2, Selector::Full).unwrap();
    let table = complex.betti().unwrap();
    assert_eq!(table.values, vec![0, 0, 0, 0, 1]);
    assert!(table.exact);
    assert_eq!(complex.euler_characteristic(&table).unwrap(), 1);
}

#[test]
fn genus_two_with_up_to_one_marking_is_acyclic() {
    let e = enumerator();
    for n in [0, 1] {
        let complex = cellular_complex(&e, 2, n, Selector::Full).unwrap();
        let table = complex.betti().unwrap();
        assert!(table.values.iter().all(|&b| b == 0), "type (2,{n}): {:?}", table.values);
        assert!(!table.empty);
    }
}

#[test]
fn genus_one_top_homology_counts_cyclic_orders() {
    let e = enumerator();
    for n in [3usize, 4, 5] {
        let complex = cellular_complex(&e, 1, n, Selector::Full).unwrap();
        let table = complex.betti().unwrap();
        let top = n - 1;
        let expected: usize = (1..n).product::<usize>() / 2;
        for (k, &b) in table.values.iter().enumerate() {
            let want = if k == top { expected } else { 0 };
            assert_eq!(b, want, "type (1,{n}) degree {k}");
        }
    }
}

#[test]
fn marked_graph_complex_matches_the_shifted_cellular_table() {
    let e = enumerator();
    for (g, n) in [(1, 3), (1, 4), (2, 2), (2, 3)] {
        let cellular = cellular_complex(&e, g, n, Selector::Full).unwrap();
        let cell_table = cellular.betti().unwrap();
        let graph_complex = marked_graph_complex(&e, g, n).unwrap();
        let graph_table = graph_complex.betti().unwrap();
        // A generator with e edges sits in cellular degree e - 1 and in
        // graph-complex degree e - 2g, so the tables line up as written.
        assert_eq!(cell_table.values, graph_table.values, "type ({g},{n})");
    }
}
