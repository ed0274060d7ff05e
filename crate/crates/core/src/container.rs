//! Binary sketch container: little-endian 64-bit words.
//!
//! Word 0 is the magic `DSK1` followed by a 4-byte problem tag, word 1 the
//! format version. The payload layout depends on the tag; matrices are
//! stored row-major.

use crate::cut::{CutSketch, GadgetIndex, Port};
use crate::error::{Error, Result};
use crate::matching::{MatchingSketch, HEADER_WORDS};
use crate::mst::{KeyedEdge, MstSketch, WeightKey};
use crate::path::PathSketch;
use crate::stconn::StconnSketch;
use crate::zp::{FieldSpec, ZpMatrix};

pub const MAGIC: &[u8; 4] = b"DSK1";
pub const VERSION: u64 = 1;

/// Caps any single length field so corrupt input cannot request huge
/// allocations.
const MAX_DIM: u64 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Problem {
    Matching,
    Cut,
    Stconn,
    Mst,
    Path,
}

impl Problem {
    pub fn tag(self) -> &'static [u8; 4] {
        match self {
            Problem::Matching => b"MAT1",
            Problem::Cut => b"CUT1",
            Problem::Stconn => b"STC1",
            Problem::Mst => b"MST1",
            Problem::Path => b"PTH1",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Problem::Matching => "matching",
            Problem::Cut => "cut",
            Problem::Stconn => "stconn",
            Problem::Mst => "mst",
            Problem::Path => "path",
        }
    }

    fn from_tag(tag: &[u8]) -> Option<Self> {
        [Problem::Matching, Problem::Cut, Problem::Stconn, Problem::Mst, Problem::Path]
            .into_iter()
            .find(|p| p.tag() == tag)
    }
}

impl std::fmt::Display for Problem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sketch {
    Matching(MatchingSketch),
    Cut(CutSketch),
    Stconn(StconnSketch),
    Mst(MstSketch),
    Path(PathSketch),
}

impl Sketch {
    pub fn problem(&self) -> Problem {
        match self {
            Sketch::Matching(_) => Problem::Matching,
            Sketch::Cut(_) => Problem::Cut,
            Sketch::Stconn(_) => Problem::Stconn,
            Sketch::Mst(_) => Problem::Mst,
            Sketch::Path(_) => Problem::Path,
        }
    }

    pub fn to_words(&self) -> Vec<u64> {
        let mut w = Writer::new(self.problem());
        match self {
            Sketch::Matching(s) => w.matching(s),
            Sketch::Cut(s) => {
                w.matching(&s.inner);
                w.push(s.k);
                w.push(s.m);
                w.push(s.index.outgoing.len());
                w.push(s.index.incoming.len());
                for p in s.index.outgoing.iter().chain(&s.index.incoming) {
                    w.push(p.terminal);
                    w.push(p.port);
                    w.push(p.edge_end);
                }
            }
            Sketch::Stconn(s) => {
                w.matching(&s.inner);
                w.push(s.k);
                w.push(s.m_base);
            }
            Sketch::Mst(s) => {
                w.push(s.k);
                w.push(s.n);
                w.word(s.w_star);
                w.word(s.next_ordinal);
                w.push(s.hidden_components);
                w.push(s.edges.len());
                for e in &s.edges {
                    w.push(e.u);
                    w.push(e.v);
                    w.word(e.key.weight);
                    w.word(e.key.ordinal);
                }
            }
            Sketch::Path(s) => {
                w.push(s.k);
                w.word(s.directed as u64);
                w.push(s.size);
                w.push(s.s);
                w.push(s.t);
                w.words.extend_from_slice(&s.table);
            }
        }
        w.words
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        self.to_words().iter().flat_map(|w| w.to_le_bytes()).collect()
    }

    pub fn size_words(&self) -> usize {
        self.to_words().len()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if !bytes.len().is_multiple_of(8) {
            return Err(Error::Format(format!("length {} is not a multiple of 8", bytes.len())));
        }
        let words: Vec<u64> =
            bytes.chunks_exact(8).map(|c| u64::from_le_bytes(c.try_into().expect("8 bytes"))).collect();
        Self::from_words(&words)
    }

    pub fn from_words(words: &[u64]) -> Result<Self> {
        let mut r = Reader { words, pos: 0 };
        let head = r.word()?.to_le_bytes();
        if &head[..4] != MAGIC {
            return Err(Error::Format("bad magic".into()));
        }
        let problem = Problem::from_tag(&head[4..])
            .ok_or_else(|| Error::Format(format!("unknown problem tag {:?}", String::from_utf8_lossy(&head[4..]))))?;
        let version = r.word()?;
        if version != VERSION {
            return Err(Error::Version { found: version, expected: VERSION });
        }
        let sketch = match problem {
            Problem::Matching => Sketch::Matching(r.matching()?),
            Problem::Cut => {
                let inner = r.matching()?;
                let k = r.dim()?;
                let m = r.dim()?;
                let (outs, ins) = (r.dim()?, r.dim()?);
                let port = |r: &mut Reader| -> Result<Port> {
                    let p = Port { terminal: r.dim()?, port: r.dim()?, edge_end: r.dim()? };
                    if p.terminal >= k || p.port >= inner.k || p.edge_end >= inner.k {
                        return Err(Error::Format("gadget index out of range".into()));
                    }
                    Ok(p)
                };
                let outgoing = (0..outs).map(|_| port(&mut r)).collect::<Result<Vec<_>>>()?;
                let incoming = (0..ins).map(|_| port(&mut r)).collect::<Result<Vec<_>>>()?;
                Sketch::Cut(CutSketch { k, m, inner, index: GadgetIndex { outgoing, incoming } })
            }
            Problem::Stconn => {
                let inner = r.matching()?;
                let k = r.dim()?;
                let m_base = r.dim()?;
                if k == 0 || inner.k != 4 * k * (k - 1) {
                    return Err(Error::Format("terminal count does not match the gadget".into()));
                }
                Sketch::Stconn(StconnSketch { k, m_base, inner })
            }
            Problem::Mst => {
                let k = r.dim()?;
                let n = r.dim()?;
                let w_star = r.word()?;
                let next_ordinal = r.word()?;
                let hidden_components = r.dim()?;
                let count = r.dim()?;
                let mut edges = Vec::with_capacity(count);
                for _ in 0..count {
                    let (u, v) = (r.dim()?, r.dim()?);
                    if u >= n || v >= n {
                        return Err(Error::Format("forest edge out of range".into()));
                    }
                    edges.push(KeyedEdge { u, v, key: WeightKey { weight: r.word()?, ordinal: r.word()? } });
                }
                if k > n {
                    return Err(Error::Format("more terminals than forest vertices".into()));
                }
                Sketch::Mst(MstSketch { k, n, edges, w_star, next_ordinal, hidden_components })
            }
            Problem::Path => {
                let k = r.dim()?;
                let directed = match r.word()? {
                    0 => false,
                    1 => true,
                    x => return Err(Error::Format(format!("bad direction flag {x}"))),
                };
                let size = r.dim()?;
                let (s, t) = (r.dim()?, r.dim()?);
                if k > size || s >= size || t >= size {
                    return Err(Error::Format("path table indices out of range".into()));
                }
                let table = r.take(size * size)?.to_vec();
                Sketch::Path(PathSketch { k, directed, size, table, s, t })
            }
        };
        if r.pos != words.len() {
            return Err(Error::Format(format!("{} trailing words", words.len() - r.pos)));
        }
        Ok(sketch)
    }

    fn mismatch(&self, expected: Problem) -> Error {
        Error::TagMismatch { expected: expected.name().into(), found: self.problem().name().into() }
    }

    pub fn into_matching(self) -> Result<MatchingSketch> {
        match self {
            Sketch::Matching(s) => Ok(s),
            other => Err(other.mismatch(Problem::Matching)),
        }
    }

    pub fn into_cut(self) -> Result<CutSketch> {
        match self {
            Sketch::Cut(s) => Ok(s),
            other => Err(other.mismatch(Problem::Cut)),
        }
    }

    pub fn into_stconn(self) -> Result<StconnSketch> {
        match self {
            Sketch::Stconn(s) => Ok(s),
            other => Err(other.mismatch(Problem::Stconn)),
        }
    }

    pub fn into_mst(self) -> Result<MstSketch> {
        match self {
            Sketch::Mst(s) => Ok(s),
            other => Err(other.mismatch(Problem::Mst)),
        }
    }

    pub fn into_path(self) -> Result<PathSketch> {
        match self {
            Sketch::Path(s) => Ok(s),
            other => Err(other.mismatch(Problem::Path)),
        }
    }
}

/// Words of a cut container.
pub fn cut_size_words(s: &CutSketch) -> usize {
    HEADER_WORDS + 4 * s.inner.k * s.inner.k + 4 + 3 * (s.index.outgoing.len() + s.index.incoming.len())
}

/// Words of an s-t connectivity container for `k` terminals: four gadget
/// terminals per ordered pair, plus `k` and the base matching size.
pub fn stconn_size_words(k: usize) -> usize {
    let t = 4 * k * k.saturating_sub(1);
    4 * t * t + HEADER_WORDS + 2
}

/// Container words for `k` terminals where they follow from `k` alone:
/// exact for matching and s-t connectivity, an upper bound for MST and
/// paths. Cut sketches depend on how many edges touch terminals.
pub fn size_words_for_k(problem: Problem, k: usize) -> Option<usize> {
    match problem {
        Problem::Matching => Some(HEADER_WORDS + 4 * k * k),
        Problem::Stconn => Some(stconn_size_words(k)),
        // at most 4k forest vertices, so at most 4k - 1 edges
        Problem::Mst => Some(8 + 4 * (4 * k).saturating_sub(1)),
        Problem::Path => Some(7 + (k + 2) * (k + 2)),
        Problem::Cut => None,
    }
}

struct Writer {
    words: Vec<u64>,
}

impl Writer {
    fn new(problem: Problem) -> Self {
        let mut head = [0u8; 8];
        head[..4].copy_from_slice(MAGIC);
        head[4..].copy_from_slice(problem.tag());
        Self { words: vec![u64::from_le_bytes(head), VERSION] }
    }

    fn word(&mut self, x: u64) {
        self.words.push(x);
    }

    fn push(&mut self, x: usize) {
        self.words.push(x as u64);
    }

    fn matching(&mut self, s: &MatchingSketch) {
        self.push(s.k);
        self.word(s.field.p);
        self.word(s.field.seed);
        self.push(s.r);
        for m in [&s.a_hat, &s.a_prime, &s.b_dd, &s.c_dd] {
            self.words.extend_from_slice(m.entries());
        }
    }
}

struct Reader<'a> {
    words: &'a [u64],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn word(&mut self) -> Result<u64> {
        let w = *self.words.get(self.pos).ok_or_else(|| Error::Format("truncated".into()))?;
        self.pos += 1;
        Ok(w)
    }

    fn dim(&mut self) -> Result<usize> {
        let x = self.word()?;
        if x > MAX_DIM {
            return Err(Error::Format(format!("dimension {x} too large")));
        }
        Ok(x as usize)
    }

    fn take(&mut self, n: usize) -> Result<&'a [u64]> {
        if self.words.len() - self.pos < n {
            return Err(Error::Format("truncated".into()));
        }
        let out = &self.words[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    fn matching(&mut self) -> Result<MatchingSketch> {
        let k = self.dim()?;
        let field = FieldSpec::new(self.word()?, self.word()?)?;
        let r = self.dim()?;
        let mut mats = Vec::with_capacity(4);
        for _ in 0..4 {
            let m = ZpMatrix::from_entries(k, k, self.take(k * k)?.to_vec());
            if !m.is_reduced(field.p) {
                return Err(Error::Format("matrix entry not reduced modulo p".into()));
            }
            mats.push(m);
        }
        let c_dd = mats.pop().expect("four");
        let b_dd = mats.pop().expect("four");
        let a_prime = mats.pop().expect("four");
        let a_hat = mats.pop().expect("four");
        Ok(MatchingSketch { k, field, r, a_hat, a_prime, b_dd, c_dd })
    }
}
