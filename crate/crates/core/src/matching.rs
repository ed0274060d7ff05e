//! Maximum-matching sketch built from a randomly evaluated Tutte matrix.
//!
//! Terminals occupy the first `k` rows and columns. Compression evaluates
//! every static edge at random, reduces the non-terminal block `D` to
//! `diag(I_r, 0)`, folds the cross terms into a `k x k` correction `A'`, and
//! keeps `k` independent columns of `B'` and rows of `C'`. Query edges only
//! touch the terminal block, so an answer needs the rank of one `2k x 2k`
//! matrix.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, Query};
use crate::zp::{diagonalize_block, eliminate_cross_blocks, independent_columns, FieldSpec, Zp, ZpMatrix};

/// Words outside the four matrices: tag, version, k, p, seed, r.
pub const HEADER_WORDS: usize = 6;

/// Row/column order of the Tutte matrix: terminals first, then the
/// remaining vertices ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TutteLayout {
    order: Vec<usize>,
    position: Vec<usize>,
}

impl TutteLayout {
    pub fn new(g: &Graph) -> Self {
        let mask = g.is_terminal_mask();
        let mut order = g.terminals().to_vec();
        order.extend((0..g.n()).filter(|&v| !mask[v]));
        let mut position = vec![0; g.n()];
        for (i, &v) in order.iter().enumerate() {
            position[v] = i;
        }
        Self { order, position }
    }

    /// Matrix index of vertex `v`.
    pub fn index(&self, v: usize) -> usize {
        self.position[v]
    }

    /// Vertex at matrix index `i`.
    pub fn vertex(&self, i: usize) -> usize {
        self.order[i]
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MatchingSketch {
    pub(crate) k: usize,
    pub(crate) field: FieldSpec,
    pub(crate) r: usize,
    pub(crate) a_hat: ZpMatrix,
    pub(crate) a_prime: ZpMatrix,
    pub(crate) b_dd: ZpMatrix,
    pub(crate) c_dd: ZpMatrix,
}

/// Intermediate matrices of one compression, for checking that every step
/// keeps the rank.
#[derive(Debug, Clone)]
pub struct CompressionTrace {
    pub layout: TutteLayout,
    /// Static edges evaluated; terminal block holds static terminal edges only.
    pub evaluated: ZpMatrix,
    /// After the `D` block is diagonalized.
    pub diagonalized: ZpMatrix,
    /// After the cross blocks against the identity are cleared.
    pub eliminated: ZpMatrix,
    pub r: usize,
}

/// Rank bookkeeping of one extraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Extraction {
    pub size: usize,
    pub rank: usize,
    pub r: usize,
    /// `rank + r` is even, as it must be for a skew-symmetric evaluation.
    pub parity_ok: bool,
}

/// Compresses with the prime chosen for `(n, delta)`.
pub fn compress(g: &Graph, delta: f64, seed: u64) -> Result<MatchingSketch> {
    let field = FieldSpec::for_instance(g.n().max(1), delta, seed)?;
    compress_with_field(g, field)
}

pub fn compress_with_field(g: &Graph, field: FieldSpec) -> Result<MatchingSketch> {
    compress_traced(g, field).map(|(s, _)| s)
}

pub fn compress_traced(g: &Graph, field: FieldSpec) -> Result<(MatchingSketch, CompressionTrace)> {
    if g.is_directed() {
        return Err(Error::InvalidGraph("the matching sketch needs an undirected graph".into()));
    }
    g.validate()?;
    let zp = field.zp();
    let (n, k) = (g.n(), g.k());
    let layout = TutteLayout::new(g);
    let mut rng = ChaCha8Rng::seed_from_u64(field.seed);

    let a_hat = sample_skew(k, &zp, &mut rng);

    // one variable per vertex pair, drawn in sorted pair order
    let mut pairs: Vec<(usize, usize)> = g
        .edges()
        .iter()
        .filter(|e| e.u != e.v)
        .map(|e| {
            let (a, b) = (layout.index(e.u), layout.index(e.v));
            (a.min(b), a.max(b))
        })
        .collect();
    pairs.sort_unstable();
    pairs.dedup();
    let mut evaluated = ZpMatrix::zeros(n, n);
    for (i, j) in pairs {
        let x = rng.gen_range(0..zp.modulus());
        evaluated.set(i, j, x);
        evaluated.set(j, i, zp.neg(x));
    }

    let (diagonalized, r) = diagonalize_block(&evaluated, k..n, &zp);
    let eliminated = eliminate_cross_blocks(&diagonalized, k, r, &zp);

    let a_prime = eliminated.block(0..k, 0..k);
    let b_prime = eliminated.block(0..k, k + r..n);
    let c_prime = eliminated.block(k + r..n, 0..k);
    let b_dd = b_prime.select_columns(&padded_picks(&b_prime, k, &zp));
    let c_dd = c_prime.select_rows(&padded_picks(&c_prime.transpose(), k, &zp));

    let sketch = MatchingSketch { k, field, r, a_hat, a_prime, b_dd, c_dd };
    Ok((sketch, CompressionTrace { layout, evaluated, diagonalized, eliminated, r }))
}

fn sample_skew(k: usize, zp: &Zp, rng: &mut ChaCha8Rng) -> ZpMatrix {
    let mut m = ZpMatrix::zeros(k, k);
    for i in 0..k {
        for j in i + 1..k {
            let x = rng.gen_range(0..zp.modulus());
            m.set(i, j, x);
            m.set(j, i, zp.neg(x));
        }
    }
    m
}

/// `want` column indices: independent ones first, then fillers; indices past
/// the last column select zero columns.
fn padded_picks(m: &ZpMatrix, want: usize, zp: &Zp) -> Vec<usize> {
    let mut picks = independent_columns(m, want, zp);
    picks.truncate(want);
    let mut filler = m.cols();
    while picks.len() < want {
        picks.push(filler);
        filler += 1;
    }
    picks
}

impl MatchingSketch {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn a_hat(&self) -> &ZpMatrix {
        &self.a_hat
    }

    pub fn a_prime(&self) -> &ZpMatrix {
        &self.a_prime
    }

    pub fn b_dd(&self) -> &ZpMatrix {
        &self.b_dd
    }

    pub fn c_dd(&self) -> &ZpMatrix {
        &self.c_dd
    }

    /// `Â` restricted to the query pairs.
    pub fn masked_a_hat(&self, q: &Query) -> Result<ZpMatrix> {
        q.validate(self.k, false)?;
        let mut m = ZpMatrix::zeros(self.k, self.k);
        for e in q.edges() {
            m.set(e.a, e.b, self.a_hat.get(e.a, e.b));
            m.set(e.b, e.a, self.a_hat.get(e.b, e.a));
        }
        Ok(m)
    }

    /// The `2k x 2k` matrix whose rank answers `q`.
    pub fn assemble(&self, q: &Query) -> Result<ZpMatrix> {
        let zp = self.field.zp();
        let k = self.k;
        let mut m = ZpMatrix::zeros(2 * k, 2 * k);
        m.paste(0, 0, &self.masked_a_hat(q)?.add(&self.a_prime, &zp));
        m.paste(0, k, &self.b_dd);
        m.paste(k, 0, &self.c_dd);
        Ok(m)
    }

    pub fn extract_detailed(&self, q: &Query) -> Result<Extraction> {
        let rank = self.assemble(q)?.rank(&self.field.zp());
        let total = rank + self.r;
        Ok(Extraction { size: total / 2, rank, r: self.r, parity_ok: total.is_multiple_of(2) })
    }

    /// Maximum matching size of the graph with `q` inserted.
    pub fn extract(&self, q: &Query) -> Result<usize> {
        Ok(self.extract_detailed(q)?.size)
    }

    /// Serialized size in 64-bit words.
    pub fn size_words(&self) -> usize {
        sketch_size_words(self.k)
    }
}

/// Exact serialized word count for `k` terminals.
pub fn sketch_size_words(k: usize) -> usize {
    4 * k * k + HEADER_WORDS
}
