//! Verification suites: each one computes a batch of homological
//! invariants and compares them against frozen expected values or against
//! each other, producing one report per claim.

use std::time::Instant;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;

use tropical::complex::{cellular_complex, k_complex, marked_graph_complex, Selector};
use tropical::genus_one::{cell_action_character, induced_character, top_betti_formula};
use tropical::{
    canonical_form, generator_boundary, max_edges, standard_basis_in_span, transfer_system,
    Error, MarkedWeightedGraph, Result,
};

use crate::report::VerificationReport;
use crate::session::Session;

/// Types with frozen nonzero expected tables that a laptop computes in
/// seconds to minutes.
pub const SMALL_TYPES: &[(usize, usize)] = &[
    (2, 0),
    (2, 1),
    (2, 2),
    (2, 3),
    (2, 4),
    (2, 5),
    (3, 0),
    (3, 1),
    (3, 2),
    (3, 3),
    (4, 0),
    (4, 1),
    (4, 2),
];

/// Genus-one rows; the expected table is zero except in the top degree.
pub const GENUS_ONE_TYPES: &[(usize, usize)] = &[(1, 3), (1, 4), (1, 5), (1, 6), (1, 7)];

/// Heavier rows that only run behind `--long`.
pub const LONG_TYPES: &[(usize, usize)] =
    &[(2, 6), (2, 7), (2, 8), (4, 3), (5, 0), (5, 1), (6, 0)];

/// Frozen expected reduced Betti table for a tabulated (g, n), indexed by
/// the degree of the stratum, or None when the type is not tabulated.
pub fn expected_betti(g: usize, n: usize) -> Option<Vec<usize>> {
    if g == 1 && n >= 3 {
        let mut row = vec![0; max_edges(1, n)];
        row[n - 1] = top_betti_formula(n).ok()?;
        return Some(row);
    }
    let row: &[usize] = match (g, n) {
        (2, 0) => &[0, 0, 0],
        (2, 1) => &[0, 0, 0, 0],
        (2, 2) => &[0, 0, 0, 0, 1],
        (2, 3) => &[0, 0, 0, 0, 0, 0],
        (2, 4) => &[0, 0, 0, 0, 0, 1, 3],
        (2, 5) => &[0, 0, 0, 0, 0, 0, 5, 15],
        (2, 6) => &[0, 0, 0, 0, 0, 0, 0, 26, 86],
        (2, 7) => &[0, 0, 0, 0, 0, 0, 0, 0, 155, 575],
        (2, 8) => &[0, 0, 0, 0, 0, 0, 0, 0, 0, 1066, 4426],
        (3, 0) => &[0, 0, 0, 0, 0, 1],
        (3, 1) => &[0, 0, 0, 0, 0, 1, 0],
        (3, 2) => &[0, 0, 0, 0, 0, 0, 0, 0],
        (3, 3) => &[0, 0, 0, 0, 0, 0, 0, 0, 1],
        (4, 0) => &[0, 0, 0, 0, 0, 0, 0, 0, 0],
        (4, 1) => &[0; 10],
        (4, 2) => &[0; 11],
        (4, 3) => &[0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 2, 1],
        (5, 0) => &[0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0],
        (5, 1) => &[0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0],
        (6, 0) => &[0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1],
        _ => return None,
    };
    Some(row.to_vec())
}

fn betti_row_report(session: &Session, g: usize, n: usize) -> Result<VerificationReport> {
    let expected = expected_betti(g, n).ok_or_else(|| {
        Error::Domain(format!("no tabulated Betti numbers for ({g},{n})"))
    })?;
    let start = Instant::now();
    let table = session.cellular_betti(g, n, &Selector::Full)?;
    Ok(VerificationReport::compare(
        format!("reduced Betti numbers of delta({g},{n})"),
        &table.values,
        &expected,
        start.elapsed(),
        format!("tropical betti {g} {n}"),
    ))
}

/// Every tabulated type that runs unconditionally.
pub fn suite_table1_small(session: &Session) -> Result<Vec<VerificationReport>> {
    let mut reports = Vec::new();
    for &(g, n) in SMALL_TYPES.iter().chain(GENUS_ONE_TYPES) {
        reports.push(betti_row_report(session, g, n)?);
    }
    Ok(reports)
}

/// The small suite plus the heavy rows, which are skipped unless `long`.
pub fn suite_table1_full(session: &Session, long: bool) -> Result<Vec<VerificationReport>> {
    let mut reports = suite_table1_small(session)?;
    for &(g, n) in LONG_TYPES {
        if long {
            reports.push(betti_row_report(session, g, n)?);
        } else {
            reports.push(VerificationReport::skipped(
                format!("reduced Betti numbers of delta({g},{n})"),
                format!("tropical betti {g} {n}"),
            ));
        }
    }
    Ok(reports)
}

/// Genus-one homology via the closed formula, plus the symmetric group
/// character of the top homology compared against the induced dihedral
/// character.
pub fn suite_genus1(session: &Session) -> Result<Vec<VerificationReport>> {
    let mut reports = Vec::new();
    for n in 3..=7 {
        reports.push(betti_row_report(session, 1, n)?);
    }
    for n in 3..=8 {
        let start = Instant::now();
        let cell = cell_action_character(n)?;
        let induced = induced_character(n)?;
        reports.push(VerificationReport::compare(
            format!(
                "top homology character of delta(1,{n}) matches the induced dihedral character"
            ),
            &cell.values,
            &induced.values,
            start.elapsed(),
            format!("tropical character {n}"),
        ));
        let dimension = cell.dimension();
        let expected = top_betti_formula(n)? as i64;
        reports.push(VerificationReport::compare(
            format!("top homology character of delta(1,{n}) has dimension (n-1)!/2"),
            &dimension,
            &expected,
            start.elapsed(),
            format!("tropical character {n}"),
        ));
    }
    Ok(reports)
}

/// Chain-level identities between the complexes of delta(g) and delta(g,1).
pub fn suite_transfer(session: &Session) -> Result<Vec<VerificationReport>> {
    let mut reports = Vec::new();
    for g in [2usize, 3] {
        let reproduce = format!("tropical transfer-check {g}");
        let start = Instant::now();
        let system = transfer_system(session.enumerator(), g)?;
        let outcome = system.verify()?;
        let wall = start.elapsed();
        reports.push(VerificationReport::compare(
            format!("vertex-marking transfer commutes with the boundary (genus {g})"),
            &outcome.transfer_commutes,
            &true,
            wall,
            &reproduce,
        ));
        reports.push(VerificationReport::compare(
            format!("marking-forgetful map commutes with the boundary (genus {g})"),
            &outcome.projection_commutes,
            &true,
            wall,
            &reproduce,
        ));
        reports.push(VerificationReport::compare(
            format!("forgetting after transferring scales by 2g-2 (genus {g})"),
            &outcome.round_trip_is_scaled_identity,
            &true,
            wall,
            &reproduce,
        ));
        let start = Instant::now();
        let unmarked = session.cellular_betti(g, 0, &Selector::Full)?;
        let marked = session.cellular_betti(g, 1, &Selector::Full)?;
        let bounded = unmarked
            .values
            .iter()
            .enumerate()
            .all(|(k, &b)| b <= marked.values.get(k).copied().unwrap_or(0));
        reports.push(VerificationReport::compare(
            format!("homology of delta({g}) is degreewise at most that of delta({g},1)"),
            &bounded,
            &true,
            start.elapsed(),
            &reproduce,
        ));
    }
    Ok(reports)
}

/// Reduced homology vanishes strictly below max(2g-1, 2g-3+n).
pub fn suite_vanishing(session: &Session, long: bool) -> Result<Vec<VerificationReport>> {
    let mut reports = Vec::new();
    let mut types: Vec<(usize, usize)> =
        SMALL_TYPES.iter().chain(GENUS_ONE_TYPES).copied().collect();
    if long {
        types.extend_from_slice(LONG_TYPES);
    }
    for (g, n) in types {
        let bound = (2 * g - 1).max((2 * g + n).saturating_sub(3));
        let start = Instant::now();
        let table = session.cellular_betti(g, n, &Selector::Full)?;
        let prefix: Vec<usize> =
            table.values.iter().take(bound.min(table.values.len())).copied().collect();
        let zeros = vec![0usize; prefix.len()];
        reports.push(VerificationReport::compare(
            format!("reduced homology of delta({g},{n}) vanishes below degree {bound}"),
            &prefix,
            &zeros,
            start.elapsed(),
            format!("tropical betti {g} {n}"),
        ));
    }
    Ok(reports)
}

/// Types on which every distinguished subcomplex is checked.
pub const ACYCLICITY_TYPES: &[(usize, usize)] = &[
    (1, 1),
    (1, 2),
    (1, 3),
    (1, 4),
    (1, 5),
    (2, 0),
    (2, 1),
    (2, 2),
    (2, 3),
    (3, 0),
    (3, 1),
];

fn subcomplex_is_empty(selector: &Selector, g: usize, n: usize) -> bool {
    match selector {
        Selector::Weight => (g, n) == (1, 1),
        Selector::LoopWeight => false,
        Selector::RepeatedMarking => n <= 1,
        Selector::BridgeClosure => (g, n) == (1, 1),
        _ => false,
    }
}

/// The four distinguished subcomplexes are each either empty, exactly for
/// the predicted types, or nonempty with vanishing reduced homology.
pub fn suite_acyclicity(session: &Session) -> Result<Vec<VerificationReport>> {
    let selectors = [
        Selector::Weight,
        Selector::LoopWeight,
        Selector::RepeatedMarking,
        Selector::BridgeClosure,
    ];
    let mut reports = Vec::new();
    for &(g, n) in ACYCLICITY_TYPES {
        for selector in &selectors {
            let label = selector.label();
            let reproduce = format!("tropical betti {g} {n} --selector {label}");
            let start = Instant::now();
            let table = session.cellular_betti(g, n, selector)?;
            let wall = start.elapsed();
            if subcomplex_is_empty(selector, g, n) {
                reports.push(VerificationReport::compare(
                    format!("the {label} subcomplex of delta({g},{n}) is empty"),
                    &table.empty,
                    &true,
                    wall,
                    reproduce,
                ));
            } else {
                let acyclic = !table.empty && table.values.iter().all(|&v| v == 0);
                reports.push(VerificationReport::compare(
                    format!(
                        "the {label} subcomplex of delta({g},{n}) is nonempty and acyclic"
                    ),
                    &acyclic,
                    &true,
                    wall,
                    reproduce,
                ));
            }
        }
    }
    Ok(reports)
}

/// Graph complex homology equals cellular homology with degrees shifted by
/// 2g-1, stratum by stratum; likewise for the distinct-markings complex.
pub fn suite_shift(session: &Session, long: bool) -> Result<Vec<VerificationReport>> {
    let mut types: Vec<(usize, usize)> = vec![(1, 2), (1, 3), (1, 4), (1, 5)];
    if long {
        types.extend([(1, 6), (1, 7)]);
    }
    types.extend_from_slice(SMALL_TYPES);
    let mut reports = Vec::new();
    for (g, n) in types {
        let cell = session.cellular_betti(g, n, &Selector::Full)?;
        let start = Instant::now();
        let graph = session.graph_betti(g, n)?;
        reports.push(VerificationReport::compare(
            format!("marked graph complex homology of ({g},{n}) matches delta({g},{n}) shifted"),
            &graph.values,
            &cell.values,
            start.elapsed(),
            "tropical verify shift --long".to_string(),
        ));
        if (g, n) != (1, 1) {
            let start = Instant::now();
            let distinct = session.k_betti(g, n)?;
            reports.push(VerificationReport::compare(
                format!(
                    "distinct-markings complex homology of ({g},{n}) matches delta({g},{n}) shifted"
                ),
                &distinct.values,
                &cell.values,
                start.elapsed(),
                "tropical verify shift --long".to_string(),
            ));
        }
    }
    Ok(reports)
}

fn random_permutation(rng: &mut StdRng, len: usize) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..len).collect();
    perm.shuffle(rng);
    perm
}

/// Structural invariants: canonical labels are relabeling invariant, the
/// differential squares to zero, contractions stay inside the enumerated
/// strata, and rank certificates follow the exactness protocol.
pub fn suite_structural(session: &Session, trials: usize) -> Result<Vec<VerificationReport>> {
    let mut reports = Vec::new();
    let mut types: Vec<(usize, usize)> = vec![(1, 1), (1, 2)];
    types.extend(GENUS_ONE_TYPES.iter().chain(SMALL_TYPES).copied());
    let mut rng = StdRng::seed_from_u64(0x7509_1ca1);

    for &(g, n) in &types {
        let strata = session.enumerator().enumerate_all(g, n)?;
        let start = Instant::now();
        let mut failures = 0usize;
        for _ in 0..trials {
            let stratum = strata.choose(&mut rng).expect("at least one stratum");
            let class = stratum.classes.choose(&mut rng).expect("nonempty stratum");
            let vperm = random_permutation(&mut rng, class.graph.num_vertices());
            let eperm = random_permutation(&mut rng, class.graph.num_edges());
            let moved = class.graph.relabel_vertices(&vperm).permute_edges(&eperm);
            if canonical_form(&moved).signature != class.signature {
                failures += 1;
            }
        }
        reports.push(VerificationReport::compare(
            format!("canonical labels on ({g},{n}) survive {trials} random relabelings"),
            &failures,
            &0,
            start.elapsed(),
            format!("tropical enumerate {g} {n}"),
        ));
    }

    let compact: Vec<(usize, usize)> =
        types.iter().copied().filter(|&(g, n)| 2 * g - 2 + n <= 4).collect();
    for &(g, n) in &compact {
        let start = Instant::now();
        let mut square_zero = true;
        let cellular = cellular_complex(session.enumerator(), g, n, Selector::Full)?;
        square_zero &= cellular.check_boundary_squared().is_ok();
        if 2 * g - 2 + n >= 2 {
            square_zero &= marked_graph_complex(session.enumerator(), g, n)?
                .check_boundary_squared()
                .is_ok();
            square_zero &=
                k_complex(session.enumerator(), g, n)?.check_boundary_squared().is_ok();
        }
        reports.push(VerificationReport::compare(
            format!("differentials on ({g},{n}) square to zero"),
            &square_zero,
            &true,
            start.elapsed(),
            format!("tropical betti {g} {n}"),
        ));

        let start = Instant::now();
        let strata = session.enumerator().enumerate_all(g, n)?;
        let mut escapees = 0usize;
        for k in 1..strata.len() {
            for class in &strata[k].classes {
                for i in 0..class.graph.num_edges() {
                    let face = canonical_form(&class.graph.contract_edge(i)).signature;
                    if strata[k - 1].position(&face).is_none() {
                        escapees += 1;
                    }
                }
            }
        }
        reports.push(VerificationReport::compare(
            format!("single-edge contractions on ({g},{n}) stay within the strata"),
            &escapees,
            &0,
            start.elapsed(),
            format!("tropical enumerate {g} {n}"),
        ));
    }

    for &(g, n) in &types {
        let start = Instant::now();
        let table = session.cellular_betti(g, n, &Selector::Full)?;
        // Everything in range fits under the exact-replay threshold except
        // (1,7), whose largest boundary matrix forces prime escalation.
        let expected = (g, n) != (1, 7);
        reports.push(VerificationReport::compare(
            format!("rank certificate exactness on ({g},{n}) follows the size protocol"),
            &table.exact,
            &expected,
            start.elapsed(),
            format!("tropical betti {g} {n}"),
        ));
    }
    Ok(reports)
}

fn complete_graph_on_four(markings: Vec<usize>) -> Result<MarkedWeightedGraph> {
    MarkedWeightedGraph::new(
        3,
        vec![0; 4],
        vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)],
        markings,
    )
}

fn five_spoke_wheel() -> Result<MarkedWeightedGraph> {
    let mut edges: Vec<(usize, usize)> = (1..=5).map(|i| (0, i)).collect();
    edges.extend((1..=5).map(|i| (i, i % 5 + 1)));
    MarkedWeightedGraph::new(5, vec![0; 6], edges, vec![])
}

/// Wheel graphs are cycles in their chain complexes, and the three-spoke
/// wheel spans a top homology class both bare and with one marking.
pub fn wheel_reports(session: &Session) -> Result<Vec<VerificationReport>> {
    let mut reports = Vec::new();
    let w3 = complete_graph_on_four(vec![])?;
    let w5 = five_spoke_wheel()?;
    let w3_marked = complete_graph_on_four(vec![0])?;

    for (graph, name) in
        [(&w3, "three-spoke wheel"), (&w5, "five-spoke wheel"), (&w3_marked, "marked three-spoke wheel")]
    {
        let start = Instant::now();
        let terms = generator_boundary(graph).len();
        reports.push(VerificationReport::compare(
            format!("the {name} generator is a cycle"),
            &terms,
            &0,
            start.elapsed(),
            "tropical verify table1-small",
        ));
    }

    let start = Instant::now();
    let complex = cellular_complex(session.enumerator(), 3, 0, Selector::Full)?;
    let table = session.cellular_betti(3, 0, &Selector::Full)?;
    let sig = canonical_form(&w3).signature;
    // The wheel sits in the top degree, where homology is the cycle space,
    // so a nondegenerate cycle generator spans as soon as the rank is one.
    let spans = complex.position(5, &sig).is_some() && table.values[5] == 1;
    reports.push(VerificationReport::compare(
        "the three-spoke wheel spans the top homology of delta(3)",
        &spans,
        &true,
        start.elapsed(),
        "tropical betti 3 0",
    ));

    let start = Instant::now();
    let complex = cellular_complex(session.enumerator(), 3, 1, Selector::Full)?;
    let table = session.cellular_betti(3, 1, &Selector::Full)?;
    let sig = canonical_form(&w3_marked).signature;
    let spans = match complex.position(5, &sig) {
        // One degree below the top: the class must also avoid the image of
        // the incoming boundary.
        Some(pos) => {
            table.values[5] == 1 && !standard_basis_in_span(&complex.boundaries[6], pos)?
        }
        None => false,
    };
    reports.push(VerificationReport::compare(
        "the marked three-spoke wheel spans degree-five homology of delta(3,1)",
        &spans,
        &true,
        start.elapsed(),
        "tropical betti 3 1",
    ));
    Ok(reports)
}

/// Named verification suites exposed by the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Table1Small,
    Table1Full,
    Genus1,
    Transfer,
    Vanishing,
    Acyclicity,
    Shift,
}

/// Runs one named suite.
pub fn run_suite(session: &Session, suite: Suite, long: bool) -> Result<Vec<VerificationReport>> {
    match suite {
        Suite::Table1Small => suite_table1_small(session),
        Suite::Table1Full => suite_table1_full(session, long),
        Suite::Genus1 => suite_genus1(session),
        Suite::Transfer => suite_transfer(session),
        Suite::Vanishing => suite_vanishing(session, long),
        Suite::Acyclicity => suite_acyclicity(session),
        Suite::Shift => suite_shift(session, long),
    }
}
