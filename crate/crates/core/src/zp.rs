//! Arithmetic over the prime field `Z_p` and dense matrices of residues.
//!
//! Everything here is exact: pivots are the first nonzero entry found in
//! column order, and every operation works on a copy of its input.

use std::ops::Range;

use crate::error::{Error, Result};

/// Largest modulus accepted, so residues fit a 62-bit word.
pub const MAX_MODULUS: u64 = 1 << 62;

/// Modulus plus the seed that drives every random evaluation over it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    pub p: u64,
    pub seed: u64,
}

impl FieldSpec {
    pub fn new(p: u64, seed: u64) -> Result<Self> {
        if p >= MAX_MODULUS {
            return Err(Error::InvalidField(format!("modulus {p} does not fit in 62 bits")));
        }
        if !is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        Ok(Self { p, seed })
    }

    /// Picks the modulus for an `n`-vertex instance with failure budget `delta`.
    pub fn for_instance(n: usize, delta: f64, seed: u64) -> Result<Self> {
        Ok(Self { p: choose_prime(n, delta)?, seed })
    }

    pub fn zp(&self) -> Zp {
        Zp::new(self.p)
    }
}

fn mul_mod_u128(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod_u128(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_u128(acc, base, m);
        }
        base = mul_mod_u128(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin; the first twelve primes as witnesses are
/// exact for every 64-bit input.
pub fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &w in &WITNESSES {
        if n.is_multiple_of(w) {
            return n == w;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod_u128(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u128(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest prime `>= ceil(2n / delta)`, so that `n / p <= delta / 2`.
pub fn choose_prime(n: usize, delta: f64) -> Result<u64> {
    if n == 0 {
        return Err(Error::InvalidField("vertex count must be positive".into()));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidField(format!("delta {delta} is not in (0, 1)")));
    }
    let bound = (2.0 * n as f64 / delta).ceil();
    if !bound.is_finite() || bound >= (MAX_MODULUS / 2) as f64 {
        return Err(Error::InvalidField(format!("2n/delta = {bound:e} is too large for a 62-bit modulus")));
    }
    let mut candidate = (bound as u64).max(2);
    while !is_prime(candidate) {
        candidate += 1;
    }
    Ok(candidate)
}

/// Arithmetic context for one modulus.
///
/// Moduli below 2^32 take a Barrett path on 64-bit products; larger moduli
/// fall back to 128-bit remainders.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Zp {
    p: u64,
    barrett: u64,
    small: bool,
}

impl Zp {
    pub fn new(p: u64) -> Self {
        assert!((2..MAX_MODULUS).contains(&p), "modulus out of range: {p}");
        let small = p < (1 << 32);
        let barrett = if small { ((1u128 << 64) / p as u128) as u64 } else { 0 };
        Self { p, barrett, small }
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.p
    }

    #[inline]
    fn reduce_small(&self, x: u64) -> u64 {
        let q = ((x as u128 * self.barrett as u128) >> 64) as u64;
        let r = x - q * self.p;
        if r >= self.p {
            r - self.p
        } else {
            r
        }
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        if self.small {
            self.reduce_small(a * b)
        } else {
            mul_mod_u128(a, b, self.p)
        }
    }

    /// `acc + a * b`.
    #[inline]
    pub fn mul_add(&self, acc: u64, a: u64, b: u64) -> u64 {
        if self.small {
            // (p-1) + (p-1)^2 < 2^64 for p < 2^32
            self.reduce_small(acc + a * b)
        } else {
            ((acc as u128 + a as u128 * b as u128) % self.p as u128) as u64
        }
    }

    pub fn pow(&self, base: u64, exp: u64) -> u64 {
        pow_mod_u128(base, exp, self.p)
    }

    /// Multiplicative inverse via the extended Euclidean algorithm.
    pub fn inv(&self, a: u64) -> Result<u64> {
        let a = a % self.p;
        if a == 0 {
            return Err(Error::ZeroInverse(self.p));
        }
        let (mut old_r, mut r) = (a as i128, self.p as i128);
        let (mut old_s, mut s) = (1i128, 0i128);
        while r != 0 {
            let q = old_r / r;
            (old_r, r) = (r, old_r - q * r);
            (old_s, s) = (s, old_s - q * s);
        }
        debug_assert_eq!(old_r, 1);
        Ok(old_s.rem_euclid(self.p as i128) as u64)
    }

    /// Maps a signed integer into `[0, p)`.
    pub fn from_i64(&self, x: i64) -> u64 {
        (x as i128).rem_euclid(self.p as i128) as u64
    }

    /// `dst[j] += factor * src[j]` for every `j`.
    #[inline]
    fn axpy(&self, dst: &mut [u64], src: &[u64], factor: u64) {
        if factor == 0 {
            return;
        }
        for (d, &s) in dst.iter_mut().zip(src) {
            if s != 0 {
                *d = self.mul_add(*d, factor, s);
            }
        }
    }
}

/// `inv(a)` modulo the prime of `spec`.
pub fn inv(a: u64, spec: &FieldSpec) -> Result<u64> {
    spec.zp().inv(a)
}

/// Dense row-major matrix of residues.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ZpMatrix {
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl ZpMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds a matrix from row-major entries already reduced modulo `p`.
    pub fn from_entries(rows: usize, cols: usize, data: Vec<u64>) -> Self {
        assert_eq!(rows * cols, data.len(), "entry buffer does not match {rows}x{cols}");
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<u64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Self { rows: r, cols: c, data }
    }

    /// Reduces signed integer entries into the field.
    pub fn from_signed_rows(rows: &[Vec<i64>], zp: &Zp) -> Self {
        let reduced: Vec<Vec<u64>> = rows.iter().map(|row| row.iter().map(|&x| zp.from_i64(x)).collect()).collect();
        Self::from_rows(&reduced)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[u64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    /// True when every entry lies in `[0, p)`.
    pub fn is_reduced(&self, p: u64) -> bool {
        self.data.iter().all(|&x| x < p)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    /// Copies the sub-matrix at `rows x cols`.
    pub fn block(&self, rows: Range<usize>, cols: Range<usize>) -> Self {
        let mut out = Self::zeros(rows.len(), cols.len());
        for (i, r) in rows.enumerate() {
            out.data[i * out.cols..(i + 1) * out.cols].copy_from_slice(&self.row(r)[cols.clone()]);
        }
        out
    }

    /// Writes `src` with its top-left corner at `(row, col)`.
    pub fn paste(&mut self, row: usize, col: usize, src: &ZpMatrix) {
        for r in 0..src.rows {
            let start = (row + r) * self.cols + col;
            self.data[start..start + src.cols].copy_from_slice(src.row(r));
        }
    }

    /// Keeps the listed columns in order; indices `>= cols` become zero columns.
    pub fn select_columns(&self, picks: &[usize]) -> Self {
        let mut out = Self::zeros(self.rows, picks.len());
        for r in 0..self.rows {
            for (j, &c) in picks.iter().enumerate() {
                if c < self.cols {
                    out.set(r, j, self.get(r, c));
                }
            }
        }
        out
    }

    /// Keeps the listed rows in order; indices `>= rows` become zero rows.
    pub fn select_rows(&self, picks: &[usize]) -> Self {
        let mut out = Self::zeros(picks.len(), self.cols);
        for (i, &r) in picks.iter().enumerate() {
            if r < self.rows {
                out.data[i * self.cols..(i + 1) * self.cols].copy_from_slice(self.row(r));
            }
        }
        out
    }

    pub fn add(&self, other: &ZpMatrix, zp: &Zp) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| zp.add(a, b)).collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    // --- elementary operations -------------------------------------------

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let (lo, hi) = (a.min(b), a.max(b));
        let (head, tail) = self.data.split_at_mut(hi * self.cols);
        head[lo * self.cols..(lo + 1) * self.cols].swap_with_slice(&mut tail[..self.cols]);
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + a, r * self.cols + b);
        }
    }

    pub fn scale_row(&mut self, r: usize, factor: u64, zp: &Zp) {
        for x in &mut self.data[r * self.cols..(r + 1) * self.cols] {
            *x = zp.mul(*x, factor);
        }
    }

    pub fn scale_col(&mut self, c: usize, factor: u64, zp: &Zp) {
        for r in 0..self.rows {
            let i = r * self.cols + c;
            self.data[i] = zp.mul(self.data[i], factor);
        }
    }

    /// `row[dst] += factor * row[src]`.
    pub fn add_row_multiple(&mut self, dst: usize, src: usize, factor: u64, zp: &Zp) {
        assert_ne!(dst, src);
        let cols = self.cols;
        if dst < src {
            let (head, tail) = self.data.split_at_mut(src * cols);
            zp.axpy(&mut head[dst * cols..(dst + 1) * cols], &tail[..cols], factor);
        } else {
            let (head, tail) = self.data.split_at_mut(dst * cols);
            zp.axpy(&mut tail[..cols], &head[src * cols..(src + 1) * cols], factor);
        }
    }

    /// `col[dst] += factor * col[src]`.
    pub fn add_col_multiple(&mut self, dst: usize, src: usize, factor: u64, zp: &Zp) {
        assert_ne!(dst, src);
        if factor == 0 {
            return;
        }
        for r in 0..self.rows {
            let base = r * self.cols;
            let s = self.data[base + src];
            if s != 0 {
                self.data[base + dst] = zp.mul_add(self.data[base + dst], factor, s);
            }
        }
    }

    // --- rank and reductions ---------------------------------------------

    /// Rank over `Z_p` by forward elimination on a copy.
    pub fn rank(&self, zp: &Zp) -> usize {
        let mut m = self.clone();
        m.rank_in_place(zp)
    }

    fn rank_in_place(&mut self, zp: &Zp) -> usize {
        let (rows, cols) = (self.rows, self.cols);
        let mut rank = 0;
        for c in 0..cols {
            if rank == rows {
                break;
            }
            let Some(pivot) = (rank..rows).find(|&r| self.data[r * cols + c] != 0) else {
                continue;
            };
            self.swap_rows(rank, pivot);
            let inv = zp.inv(self.data[rank * cols + c]).expect("pivot is nonzero");
            let (head, tail) = self.data.split_at_mut((rank + 1) * cols);
            let pivot_row = &head[rank * cols + c..(rank + 1) * cols];
            for row in tail.chunks_exact_mut(cols) {
                let lead = row[c];
                if lead != 0 {
                    let factor = zp.neg(zp.mul(lead, inv));
                    zp.axpy(&mut row[c..], pivot_row, factor);
                }
            }
            rank += 1;
        }
        rank
    }
}

/// Rank of `m` over the field of `spec`.
pub fn rank(m: &ZpMatrix, spec: &FieldSpec) -> usize {
    m.rank(&spec.zp())
}

/// Turns the square block `block x block` into `diag(1, .., 1, 0, .., 0)` using
/// row operations on the block's rows and column operations on its columns.
///
/// Entries outside the block only change through those operations (this is
/// how the off-diagonal blocks pick up their transformed values). Returns the
/// transformed copy and the block's rank.
pub fn diagonalize_block(m: &ZpMatrix, block: Range<usize>, zp: &Zp) -> (ZpMatrix, usize) {
    assert_eq!(m.rows(), m.cols(), "diagonalize_block expects a square matrix");
    assert!(block.end <= m.rows());
    let mut out = m.clone();
    let (lo, hi) = (block.start, block.end);
    let mut r = 0;
    while lo + r < hi {
        let target = lo + r;
        // first nonzero of the remaining sub-block, scanning columns in order
        let found = (target..hi).find_map(|c| (target..hi).find(|&row| out.get(row, c) != 0).map(|row| (row, c)));
        let Some((pr, pc)) = found else { break };
        out.swap_rows(target, pr);
        out.swap_cols(target, pc);
        let inv = zp.inv(out.get(target, target)).expect("pivot is nonzero");
        out.scale_row(target, inv, zp);
        for row in lo..hi {
            if row != target {
                let v = out.get(row, target);
                if v != 0 {
                    out.add_row_multiple(row, target, zp.neg(v), zp);
                }
            }
        }
        for col in lo..hi {
            if col != target {
                let v = out.get(target, col);
                if v != 0 {
                    out.add_col_multiple(col, target, zp.neg(v), zp);
                }
            }
        }
        r += 1;
    }
    (out, r)
}

/// Uses the identity block at `[lead, lead + r)` to clear the cross blocks:
/// rows `0..lead` lose their entries in the identity's columns (row
/// operations), then columns `0..lead` lose their entries in the identity's
/// rows (column operations). The top-left `lead x lead` block accumulates
/// the correction.
pub fn eliminate_cross_blocks(m: &ZpMatrix, lead: usize, r: usize, zp: &Zp) -> ZpMatrix {
    let mut out = m.clone();
    for j in lead..lead + r {
        debug_assert_eq!(out.get(j, j), 1, "identity block expected at {j}");
    }
    for i in 0..lead {
        for j in lead..lead + r {
            let x = out.get(i, j);
            if x != 0 {
                out.add_row_multiple(i, j, zp.neg(x), zp);
            }
        }
    }
    for c in 0..lead {
        for j in lead..lead + r {
            let y = out.get(j, c);
            if y != 0 {
                out.add_col_multiple(c, j, zp.neg(y), zp);
            }
        }
    }
    out
}

/// Greedy left-to-right choice of a maximal independent column set.
///
/// When fewer than `want` columns are independent, the lowest unused column
/// indices (ascending) are appended until `want` indices are returned or the
/// matrix runs out of columns; the caller pads any remainder with zeros.
pub fn independent_columns(m: &ZpMatrix, want: usize, zp: &Zp) -> Vec<usize> {
    // reduced basis: (pivot row, vector normalized to 1 at the pivot)
    let mut basis: Vec<(usize, Vec<u64>)> = Vec::new();
    let mut picked = Vec::new();
    let mut is_picked = vec![false; m.cols()];
    for c in 0..m.cols() {
        if basis.len() == m.rows() {
            break;
        }
        let mut v: Vec<u64> = (0..m.rows()).map(|r| m.get(r, c)).collect();
        for (pivot, b) in &basis {
            let lead = v[*pivot];
            if lead != 0 {
                zp.axpy(&mut v, b, zp.neg(lead));
            }
        }
        if let Some(pivot) = v.iter().position(|&x| x != 0) {
            let inv = zp.inv(v[pivot]).expect("nonzero");
            for x in &mut v {
                *x = zp.mul(*x, inv);
            }
            basis.push((pivot, v));
            picked.push(c);
            is_picked[c] = true;
        }
    }
    let mut fill = (0..m.cols()).filter(|&c| !is_picked[c]);
    while picked.len() < want {
        match fill.next() {
            Some(c) => picked.push(c),
            None => break,
        }
    }
    picked
}
