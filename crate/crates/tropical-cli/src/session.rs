//! Shared computation state: one enumerator and a memo of finished Betti
//! tables, so that verification suites never compute the same homology
//! twice in a process.

use std::collections::BTreeMap;
use std::sync::Mutex;

use tropical::complex::{cellular_complex, k_complex, marked_graph_complex, Selector};
use tropical::{BettiTable, ChainComplexQ, Enumerator, RankOptions, Result, StratumCache};

pub struct Session {
    enumerator: Enumerator,
    options: RankOptions,
    tables: Mutex<BTreeMap<(String, usize, usize), BettiTable>>,
}

impl Session {
    /// Session with the cache directory taken from the environment.
    pub fn new() -> Self {
        Self::with_cache(StratumCache::from_env())
    }

    /// Session with an explicit stratum cache, or none for in-memory only.
    pub fn with_cache(cache: Option<StratumCache>) -> Self {
        Self {
            enumerator: Enumerator::with_cache(cache),
            options: RankOptions::default(),
            tables: Mutex::new(BTreeMap::new()),
        }
    }

    pub fn enumerator(&self) -> &Enumerator {
        &self.enumerator
    }

    /// Reduced Betti table of the cellular subcomplex cut out by a closed
    /// selector, memoized per (selector, g, n).
    pub fn cellular_betti(&self, g: usize, n: usize, selector: &Selector) -> Result<BettiTable> {
        let key = (format!("cell:{}", selector.label()), g, n);
        let sel = selector.clone();
        self.memoized(key, || cellular_complex(&self.enumerator, g, n, sel))
    }

    /// Betti table of the marked graph complex, memoized.
    pub fn graph_betti(&self, g: usize, n: usize) -> Result<BettiTable> {
        self.memoized(("ghat".into(), g, n), || marked_graph_complex(&self.enumerator, g, n))
    }

    /// Betti table of the distinct-markings graph complex, memoized.
    pub fn k_betti(&self, g: usize, n: usize) -> Result<BettiTable> {
        self.memoized(("k".into(), g, n), || k_complex(&self.enumerator, g, n))
    }

    fn memoized<F>(&self, key: (String, usize, usize), build: F) -> Result<BettiTable>
    where
        F: FnOnce() -> Result<ChainComplexQ>,
    {
        if let Some(table) = self.lock().get(&key) {
            return Ok(table.clone());
        }
        let complex = build()?;
        let table = complex.betti_with(&self.options)?;
        // Every memoized table is cross-checked against the alternating sum
        // of cell counts before release.
        complex.euler_characteristic(&table)?;
        self.lock().insert(key, table.clone());
        Ok(table)
    }

    fn lock(&self) -> std::sync::MutexGuard<'_, BTreeMap<(String, usize, usize), BettiTable>> {
        self.tables.lock().unwrap_or_else(|e| e.into_inner())
    }
}

impl Default for Session {
    fn default() -> Self {
        Self::new()
    }
}
