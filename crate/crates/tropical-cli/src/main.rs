use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};

use tropical::complex::Selector;
use tropical::genus_one::{cell_action_character, induced_character, top_betti_formula};
use tropical::{transfer_system, StratumKey};
use tropical_cli::{print_reports, run_suite, Session, Suite};

/// Threads used by the global worker pool; unset means all cores.
const THREADS_ENV: &str = "TROPICAL_THREADS";

#[derive(Parser)]
#[command(
    name = "tropical",
    about = "Exact rational homology of moduli of stable marked weighted graphs",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the reduced Betti table of one space.
    Betti {
        /// Genus (first Betti number plus total weight).
        g: usize,
        /// Number of marked legs.
        n: usize,
        /// Subcomplex to restrict to.
        #[arg(value_enum, value_name = "SELECTOR")]
        positional_selector: Option<SelectorArg>,
        /// Subcomplex to restrict to (flag form of the positional).
        #[arg(long, value_enum)]
        selector: Option<SelectorArg>,
        /// Also write the table as JSON to this path.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Run a named verification suite; exits 0 iff every check matches.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        /// Include targets that take minutes to hours.
        #[arg(long)]
        long: bool,
    },
    /// Dump the canonical records of the isomorphism classes, one JSON
    /// object per line.
    Enumerate {
        g: usize,
        n: usize,
        /// Restrict to the stratum with this many edges.
        edges: Option<usize>,
        #[arg(long, value_enum, default_value_t = FormatArg::Jsonl)]
        format: FormatArg,
    },
    /// Verify the chain-level transfer identities for one genus.
    TransferCheck { g: usize },
    /// Compare the genus-one top homology character against the induced
    /// dihedral character.
    Character { n: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SelectorArg {
    /// The whole space.
    Full,
    /// Positive-weight locus.
    W,
    /// Loop-or-positive-weight locus.
    Lw,
    /// Repeated-marking locus.
    Rep,
    /// Closure of the bridge locus.
    Br,
}

impl SelectorArg {
    fn selector(self) -> Selector {
        match self {
            SelectorArg::Full => Selector::Full,
            SelectorArg::W => Selector::Weight,
            SelectorArg::Lw => Selector::LoopWeight,
            SelectorArg::Rep => Selector::RepeatedMarking,
            SelectorArg::Br => Selector::BridgeClosure,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Jsonl,
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var(THREADS_ENV) {
        if let Ok(threads) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
        }
    }
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let session = Session::new();
    match cli.command {
        Command::Betti { g, n, positional_selector, selector, json } => {
            let selector = match (positional_selector, selector) {
                (Some(a), Some(b)) if a != b => {
                    anyhow::bail!("conflicting selectors {a:?} and {b:?}")
                }
                (Some(a), _) => a,
                (None, Some(b)) => b,
                (None, None) => SelectorArg::Full,
            };
            let table = session.cellular_betti(g, n, &selector.selector())?;
            let row: Vec<String> = table.values.iter().map(|v| v.to_string()).collect();
            println!("{}: ({})", table.label, row.join(", "));
            let mut flags = vec![if table.exact { "exact" } else { "modular-only" }];
            if table.empty {
                flags.push("empty");
            } else if table.values.iter().all(|&v| v == 0) {
                flags.push("acyclic");
            }
            println!("flags: {}", flags.join(", "));
            if let Some(path) = json {
                let text = serde_json::to_string_pretty(&table)?;
                std::fs::write(&path, text)
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            Ok(true)
        }
        Command::Verify { suite, long } => {
            let reports = run_suite(&session, suite, long)?;
            Ok(print_reports(&reports))
        }
        Command::Enumerate { g, n, edges, format: FormatArg::Jsonl } => {
            if let Some(edges) = edges {
                let stratum =
                    session.enumerator().enumerate_stratum(StratumKey { g, n, edges })?;
                for class in &stratum.classes {
                    println!("{}", class.signature);
                }
            } else {
                for stratum in session.enumerator().enumerate_all(g, n)?.iter() {
                    for class in &stratum.classes {
                        println!("{}", class.signature);
                    }
                }
            }
            Ok(true)
        }
        Command::TransferCheck { g } => {
            let system = transfer_system(session.enumerator(), g)?;
            let outcome = system.verify()?;
            println!("transfer commutes with boundary: {}", outcome.transfer_commutes);
            println!("forgetful commutes with boundary: {}", outcome.projection_commutes);
            println!(
                "forgetful after transfer is (2g-2) id: {}",
                outcome.round_trip_is_scaled_identity
            );
            for failure in &outcome.failures {
                println!("  failure: {failure}");
            }
            Ok(outcome.all_hold())
        }
        Command::Character { n } => {
            let cell = cell_action_character(n)?;
            let induced = induced_character(n)?;
            println!("{:<18} {:>10} {:>10}", "cycle type", "cell", "induced");
            for (i, partition) in cell.partitions.iter().enumerate() {
                let name = partition
                    .iter()
                    .map(|p| p.to_string())
                    .collect::<Vec<_>>()
                    .join("+");
                println!("{name:<18} {:>10} {:>10}", cell.values[i], induced.values[i]);
            }
            let agree = cell.values == induced.values;
            let dimension_ok = cell.dimension() == top_betti_formula(n)? as i64;
            println!(
                "characters agree: {agree}; dimension {} (expected {})",
                cell.dimension(),
                top_betti_formula(n)?
            );
            Ok(agree && dimension_ok)
        }
    }
}
