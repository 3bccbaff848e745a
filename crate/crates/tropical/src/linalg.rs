//! Sparse exact linear algebra over the rationals.
//!
//! Rank is computed in two tiers. A fast pass eliminates the matrix modulo
//! independent random 62-bit primes with fill-in-averse pivoting; modular
//! rank never exceeds the rational rank, so agreeing primes give a strong
//! candidate together with a pivot sequence. A certification pass then
//! replays that pivot sequence with exact rational arithmetic. Every
//! replayed pivot is provably nonzero (its image modulo the prime was
//! nonzero), so the replay establishes rank >= r, and an exact scan of the
//! eliminated residue establishes rank <= r; if the residue is nonzero the
//! elimination simply continues exactly, so the reported rank is exact
//! either way. Matrices too large for the exact pass instead escalate the
//! number of agreeing primes and say so in the certificate.

use std::collections::{BTreeMap, HashSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::error::{Error, Result};

/// Sparse matrix over Q; no explicit zeros, no duplicate coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseRationalMatrix {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), BigRational>,
}

impl SparseRationalMatrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: BTreeMap::new() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, r: usize, c: usize) -> BigRational {
        self.entries.get(&(r, c)).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Sets an entry, dropping it if the value is zero.
    pub fn set(&mut self, r: usize, c: usize, value: BigRational) {
        assert!(r < self.rows && c < self.cols, "entry out of range");
        if value.is_zero() {
            self.entries.remove(&(r, c));
        } else {
            self.entries.insert((r, c), value);
        }
    }

    /// Adds to an entry, accumulating duplicates.
    pub fn add_to(&mut self, r: usize, c: usize, value: BigRational) {
        let current = self.get(r, c);
        self.set(r, c, current + value);
    }

    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, BigRational)>,
    ) -> Result<Self> {
        let mut m = Self::new(rows, cols);
        for (r, c, v) in triplets {
            if r >= rows || c >= cols {
                return Err(Error::Domain(format!(
                    "triplet ({r},{c}) outside {rows}x{cols}"
                )));
            }
            m.add_to(r, c, v);
        }
        Ok(m)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &BigRational)> {
        self.entries.iter().map(|(&(r, c), v)| (r, c, v))
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::new(self.cols, self.rows);
        for (r, c, v) in self.iter() {
            t.set(c, r, v.clone());
        }
        t
    }

    /// Matrix product: self (r x k) times other (k x c).
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Domain(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut by_row: Vec<Vec<(usize, &BigRational)>> = vec![Vec::new(); other.rows];
        for (r, c, v) in other.iter() {
            by_row[r].push((c, v));
        }
        let mut out = Self::new(self.rows, other.cols);
        for (r, k, v) in self.iter() {
            for &(c, w) in &by_row[k] {
                out.add_to(r, c, v * w);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, factor: &BigRational) -> Self {
        let mut out = Self::new(self.rows, self.cols);
        if factor.is_zero() {
            return out;
        }
        for (r, c, v) in self.iter() {
            out.set(r, c, v * factor);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Domain("dimension mismatch in subtraction".into()));
        }
        let mut out = self.clone();
        for (r, c, v) in other.iter() {
            out.add_to(r, c, -v.clone());
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::new(n, n);
        for i in 0..n {
            m.set(i, i, BigRational::one());
        }
        m
    }

    /// Plain-text triplet export: a header line `rows cols nnz`, then one
    /// `row col numerator/denominator` line per entry in row-major order.
    pub fn to_triplet_text(&self) -> String {
        let mut out = format!("{} {} {}\n", self.rows, self.cols, self.nnz());
        for (r, c, v) in self.iter() {
            out.push_str(&format!("{} {} {}/{}\n", r, c, v.numer(), v.denom()));
        }
        out
    }

    pub fn from_triplet_text(text: &str) -> Result<Self> {
        let bad = |line: &str| Error::Domain(format!("malformed triplet line: {line:?}"));
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| bad("<missing header>"))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| bad(header)))
            .collect::<Result<_>>()?;
        let [rows, cols, nnz] = dims[..] else {
            return Err(bad(header));
        };
        let mut triplets = Vec::with_capacity(nnz);
        for line in lines {
            let tokens: Vec<&str> = line.split_whitespace().collect();
            let [r, c, value] = tokens[..] else {
                return Err(bad(line));
            };
            let (num, den) = value.split_once('/').ok_or_else(|| bad(line))?;
            let num: BigInt = num.parse().map_err(|_| bad(line))?;
            let den: BigInt = den.parse().map_err(|_| bad(line))?;
            if den.is_zero() {
                return Err(bad(line));
            }
            triplets.push((
                r.parse().map_err(|_| bad(line))?,
                c.parse().map_err(|_| bad(line))?,
                BigRational::new(num, den),
            ));
        }
        if triplets.len() != nnz {
            return Err(Error::Domain(format!(
                "triplet count {} does not match header {nnz}",
                triplets.len()
            )));
        }
        Self::from_triplets(rows, cols, triplets)
    }
}

/// Controls for the certified rank computation.
#[derive(Debug, Clone)]
pub struct RankOptions {
    /// Primes that must agree before certification or acceptance.
    pub agreeing_primes: usize,
    /// Extra primes to escalate to when the exact pass is out of reach.
    pub escalated_primes: usize,
    /// Largest max(rows, cols) for which the exact pass runs.
    pub exact_threshold: usize,
    /// Abort when the working nonzero count exceeds this.
    pub max_nonzeros: usize,
    /// Seed for drawing the random primes.
    pub seed: u64,
}

/// Environment variable overriding the default nonzero budget.
pub const MAX_NONZEROS_ENV: &str = "TROPICAL_MAX_NONZEROS";

impl Default for RankOptions {
    fn default() -> Self {
        let max_nonzeros = std::env::var(MAX_NONZEROS_ENV)
            .ok()
            .and_then(|s| s.parse().ok())
            .unwrap_or(100_000_000);
        Self {
            agreeing_primes: 2,
            escalated_primes: 6,
            exact_threshold: 20_000,
            max_nonzeros,
            seed: 0x5eed_cafe,
        }
    }
}

/// Outcome of a certified rank computation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankCertificate {
    pub rank: usize,
    /// True when the exact rational pass confirmed the value; false when
    /// the matrix was too large and the value rests on escalated primes.
    pub exact: bool,
    pub primes: Vec<u64>,
}

/// Certified exact rank with default options.
pub fn rank(matrix: &SparseRationalMatrix) -> Result<usize> {
    Ok(rank_with(matrix, &RankOptions::default())?.rank)
}

pub fn rank_with(
    matrix: &SparseRationalMatrix,
    options: &RankOptions,
) -> Result<RankCertificate> {
    if matrix.nnz() == 0 {
        return Ok(RankCertificate { rank: 0, exact: true, primes: Vec::new() });
    }
    if matrix.nnz() > options.max_nonzeros {
        return Err(Error::ResourceLimit(format!(
            "matrix has {} nonzeros, budget is {}",
            matrix.nnz(),
            options.max_nonzeros
        )));
    }
    let mut rng = StdRng::seed_from_u64(options.seed ^ content_fingerprint(matrix));
    let mut primes = Vec::new();
    let mut best: Option<(usize, Vec<(usize, usize)>)> = None;
    let mut agreement = 0usize;
    let target = options.agreeing_primes.max(1);
    let mut attempts = 0usize;
    while agreement < target {
        let p = random_prime(&mut rng);
        if primes.contains(&p) {
            continue;
        }
        attempts += 1;
        if attempts > options.escalated_primes + target + 8 {
            return Err(Error::Consistency(
                "modular ranks failed to stabilize across primes".into(),
            ));
        }
        // A prime dividing some denominator cannot be used; draw another.
        let Some((r, pivots)) = modular_rank(matrix, p, options.max_nonzeros)? else {
            continue;
        };
        primes.push(p);
        match &best {
            Some((rb, _)) if *rb == r => agreement += 1,
            Some((rb, _)) if *rb > r => {}
            _ => {
                best = Some((r, pivots));
                agreement = 1;
            }
        }
    }
    let (candidate, pivots) = best.expect("at least one prime was run");
    if matrix.rows.max(matrix.cols) <= options.exact_threshold {
        let exact = exact_rank_with_hint(matrix, &pivots, options.max_nonzeros)?;
        if exact < candidate {
            return Err(Error::Consistency(format!(
                "exact rank {exact} below modular rank {candidate}"
            )));
        }
        return Ok(RankCertificate { rank: exact, exact: true, primes });
    }
    // Too large for the exact pass: escalate the prime count instead.
    while agreement < options.escalated_primes {
        let p = random_prime(&mut rng);
        if primes.contains(&p) {
            continue;
        }
        let Some((r, _)) = modular_rank(matrix, p, options.max_nonzeros)? else {
            continue;
        };
        primes.push(p);
        if r > candidate {
            // A higher rank supersedes the candidate; start over with the
            // matching pivot history.
            return rank_with(
                matrix,
                &RankOptions { seed: options.seed.wrapping_add(p), ..options.clone() },
            );
        }
        if r == candidate {
            agreement += 1;
        }
    }
    Ok(RankCertificate { rank: candidate, exact: false, primes })
}

/// Whether the standard basis vector `e_row` lies in the column span of the
/// matrix. Decided by comparing the rank against the rank of the matrix
/// augmented with that column.
pub fn standard_basis_in_span(matrix: &SparseRationalMatrix, row: usize) -> Result<bool> {
    if row >= matrix.rows() {
        return Err(Error::Domain(format!(
            "row {row} out of bounds for a matrix with {} rows",
            matrix.rows()
        )));
    }
    let options = RankOptions::default();
    let base = rank_with(matrix, &options)?.rank;
    let mut augmented = SparseRationalMatrix::new(matrix.rows(), matrix.cols() + 1);
    for (r, c, v) in matrix.iter() {
        augmented.set(r, c, v.clone());
    }
    augmented.set(row, matrix.cols(), BigRational::one());
    let extended = rank_with(&augmented, &options)?.rank;
    Ok(extended == base)
}

fn content_fingerprint(matrix: &SparseRationalMatrix) -> u64 {
    use std::collections::hash_map::DefaultHasher;
    use std::hash::{Hash, Hasher};
    let mut h = DefaultHasher::new();
    matrix.rows.hash(&mut h);
    matrix.cols.hash(&mut h);
    for (r, c, v) in matrix.iter() {
        r.hash(&mut h);
        c.hash(&mut h);
        v.numer().hash(&mut h);
        v.denom().hash(&mut h);
    }
    h.finish()
}

// ---------------------------------------------------------------------
// Shared sparse elimination over an abstract field.

trait Field {
    type Elem: Clone;
    fn is_zero(&self, e: &Self::Elem) -> bool;
    /// a - factor * b
    fn fused_sub_mul(&self, a: Option<&Self::Elem>, factor: &Self::Elem, b: &Self::Elem)
        -> Self::Elem;
    /// a / b with b nonzero.
    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
}

struct ModField {
    p: u64,
}

impl ModField {
    fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1u64;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    fn inv(&self, a: u64) -> u64 {
        self.pow(a, self.p - 2)
    }
}

impl Field for ModField {
    type Elem = u64;

    fn is_zero(&self, e: &u64) -> bool {
        *e == 0
    }

    fn fused_sub_mul(&self, a: Option<&u64>, factor: &u64, b: &u64) -> u64 {
        let prod = self.mul(*factor, *b);
        let a = a.copied().unwrap_or(0);
        (a + self.p - prod) % self.p
    }

    fn div(&self, a: &u64, b: &u64) -> u64 {
        self.mul(*a, self.inv(*b))
    }
}

struct RatField;

impl Field for RatField {
    type Elem = BigRational;

    fn is_zero(&self, e: &BigRational) -> bool {
        e.is_zero()
    }

    fn fused_sub_mul(
        &self,
        a: Option<&BigRational>,
        factor: &BigRational,
        b: &BigRational,
    ) -> BigRational {
        match a {
            Some(a) => a - factor * b,
            None => -(factor * b),
        }
    }

    fn div(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a / b
    }
}

struct Elimination<F: Field> {
    field: F,
    rows: Vec<BTreeMap<usize, F::Elem>>,
    active: Vec<bool>,
    col_rows: Vec<HashSet<usize>>,
    nnz: usize,
    budget: usize,
}

impl<F: Field> Elimination<F> {
    fn new(field: F, rows: Vec<BTreeMap<usize, F::Elem>>, cols: usize, budget: usize) -> Self {
        let mut col_rows = vec![HashSet::new(); cols];
        let mut nnz = 0;
        for (r, row) in rows.iter().enumerate() {
            for &c in row.keys() {
                col_rows[c].insert(r);
            }
            nnz += row.len();
        }
        let active = rows.iter().map(|r| !r.is_empty()).collect();
        Self { field, rows, active, col_rows, nnz, budget }
    }

    /// Eliminates with the pivot at (r0, c0), which must be nonzero, and
    /// retires that row and column.
    fn eliminate(&mut self, r0: usize, c0: usize) -> Result<()> {
        let pivot_row = self.rows[r0].clone();
        let pivot_val = pivot_row
            .get(&c0)
            .cloned()
            .ok_or_else(|| Error::Consistency(format!("pivot ({r0},{c0}) vanished")))?;
        let targets: Vec<usize> =
            self.col_rows[c0].iter().copied().filter(|&r| r != r0 && self.active[r]).collect();
        for r in targets {
            let factor = {
                let entry = self.rows[r].get(&c0).expect("indexed row touches pivot column");
                self.field.div(entry, &pivot_val)
            };
            for (&c, pval) in &pivot_row {
                let existing = self.rows[r].get(&c);
                let updated = self.field.fused_sub_mul(existing, &factor, pval);
                let had = existing.is_some();
                if self.field.is_zero(&updated) {
                    if had {
                        self.rows[r].remove(&c);
                        self.col_rows[c].remove(&r);
                        self.nnz -= 1;
                    }
                } else {
                    if !had {
                        self.col_rows[c].insert(r);
                        self.nnz += 1;
                    }
                    self.rows[r].insert(c, updated);
                }
            }
            debug_assert!(!self.rows[r].contains_key(&c0));
            if self.rows[r].is_empty() {
                self.active[r] = false;
            }
        }
        self.retire_row(r0);
        if self.nnz > self.budget {
            return Err(Error::ResourceLimit(format!(
                "elimination fill-in exceeded {} nonzeros",
                self.budget
            )));
        }
        Ok(())
    }

    fn retire_row(&mut self, r: usize) {
        self.active[r] = false;
        let row = std::mem::take(&mut self.rows[r]);
        self.nnz -= row.len();
        for c in row.keys() {
            self.col_rows[*c].remove(&r);
        }
    }

    /// Fill-in-averse free pivot: sparsest active row, then the column of
    /// that row meeting the fewest active rows, ties toward lower indices.
    fn choose_pivot(&self) -> Option<(usize, usize)> {
        let r = (0..self.rows.len())
            .filter(|&r| self.active[r] && !self.rows[r].is_empty())
            .min_by_key(|&r| (self.rows[r].len(), r))?;
        let c = self.rows[r]
            .keys()
            .copied()
            .min_by_key(|&c| (self.col_rows[c].len(), c))
            .expect("active row is nonempty");
        Some((r, c))
    }

    /// Runs forced pivots first, then free pivots until exhaustion;
    /// returns every pivot used, in order.
    fn run(&mut self, forced: &[(usize, usize)]) -> Result<Vec<(usize, usize)>> {
        let mut pivots = Vec::new();
        for &(r, c) in forced {
            if !self.active[r] {
                return Err(Error::Consistency(format!("forced pivot row {r} already retired")));
            }
            self.eliminate(r, c)?;
            pivots.push((r, c));
        }
        while let Some((r, c)) = self.choose_pivot() {
            self.eliminate(r, c)?;
            pivots.push((r, c));
        }
        Ok(pivots)
    }
}

fn random_prime(rng: &mut StdRng) -> u64 {
    loop {
        let candidate: u64 = rng.gen_range((1u64 << 61)..(1u64 << 62)) | 1;
        if is_prime_u64(candidate) {
            return candidate;
        }
    }
}

/// Deterministic Miller-Rabin for u64.
fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let f = ModField { p: n };
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = f.pow(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = f.mul(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Image of the matrix modulo p as sparse rows. Denominators are inverted
/// modulo p; a denominator divisible by p fails (the caller retries with
/// another prime).
fn reduce_mod(matrix: &SparseRationalMatrix, p: u64) -> Option<Vec<BTreeMap<usize, u64>>> {
    let f = ModField { p };
    let mut rows = vec![BTreeMap::new(); matrix.rows];
    for (r, c, v) in matrix.iter() {
        let num = bigint_mod(v.numer(), p)?;
        let den = bigint_mod(v.denom(), p)?;
        if den == 0 {
            return None;
        }
        let val = f.mul(num, f.inv(den));
        if val != 0 {
            rows[r].insert(c, val);
        }
    }
    Some(rows)
}

fn bigint_mod(x: &BigInt, p: u64) -> Option<u64> {
    let m = BigInt::from(p);
    let mut r = x % &m;
    if r.is_negative() {
        r += &m;
    }
    u64::try_from(r).ok()
}

/// Rank and pivot sequence modulo p, or `None` when p divides one of the
/// denominators and cannot be used.
fn modular_rank(
    matrix: &SparseRationalMatrix,
    p: u64,
    budget: usize,
) -> Result<Option<(usize, Vec<(usize, usize)>)>> {
    let Some(rows) = reduce_mod(matrix, p) else {
        return Ok(None);
    };
    let mut elim = Elimination::new(ModField { p }, rows, matrix.cols, budget);
    let pivots = elim.run(&[])?;
    Ok(Some((pivots.len(), pivots)))
}

/// Exact rank by rational elimination, replaying `hint` pivots first. Each
/// hinted pivot is nonzero over Q because its modular image was nonzero at
/// the same stage of the same elimination.
fn exact_rank_with_hint(
    matrix: &SparseRationalMatrix,
    hint: &[(usize, usize)],
    budget: usize,
) -> Result<usize> {
    let mut rows: Vec<BTreeMap<usize, BigRational>> = vec![BTreeMap::new(); matrix.rows];
    for (r, c, v) in matrix.iter() {
        rows[r].insert(c, v.clone());
    }
    let mut elim = Elimination::new(RatField, rows, matrix.cols, budget);
    let pivots = elim.run(hint)?;
    Ok(pivots.len())
}
