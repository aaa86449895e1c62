//! Transmitter and receiver chains.
//!
//! Transmit: local encoding per group (SPC for group 0, C^{∘k} otherwise),
//! composition into GF(2^s) composite words, S/P extraction
//! c[j] = (c_{0,j}, …, c_{n−1,j}), GFT c^F[j] = c[j]·V, serialization, and
//! BPSK (0 → +1, 1 → −1) of the symbol-major bit sequence.
//!
//! Receive runs the inverse: segment-wise V^{-1}, P/S regrouping into
//! composite words, Hadamard un-permutation and systematic message slicing.

use std::io::{Read, Write};

use rand::Rng;

use crate::cyclic::{
    base_matrix, encode_binary, encode_nonbinary, encode_spc, generator_poly, hadamard_perm,
    hadamard_unperm, BaseCodeSpec, CompositeWord, GeneratorPoly, Mode,
};
use crate::error::{Error, Result};
use crate::galois::{GaloisField, Symbol};
use crate::geometry::{
    cpm, cpm_dispersion, gf_matmul, vandermonde, Direction, GlobalParityCheck, VandermondeMatrix,
    DENSE_LIMIT,
};

/// The n·s message streams, grouped as `groups[k][l]`.
///
/// Group 0 streams carry n−1 bits (SPC), the others n−m bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StreamBlock {
    groups: Vec<Vec<Vec<u8>>>,
}

impl StreamBlock {
    pub fn new(spec: &BaseCodeSpec, groups: Vec<Vec<Vec<u8>>>) -> Result<Self> {
        let (n, s) = (spec.n(), spec.s());
        if groups.len() != n {
            return Err(Error::LengthMismatch {
                what: "group count",
                expected: n,
                found: groups.len(),
            });
        }
        for (k, group) in groups.iter().enumerate() {
            if group.len() != s {
                return Err(Error::LengthMismatch {
                    what: "streams per group",
                    expected: s,
                    found: group.len(),
                });
            }
            let len = message_len(spec, k);
            if let Some(bad) = group.iter().find(|v| v.len() != len) {
                return Err(Error::LengthMismatch {
                    what: "stream message",
                    expected: len,
                    found: bad.len(),
                });
            }
            if group.iter().flatten().any(|&b| b > 1) {
                return Err(Error::SymbolOutOfField { symbol: 2, s: 1 });
            }
        }
        Ok(Self { groups })
    }

    pub fn zeros(spec: &BaseCodeSpec) -> Self {
        let groups = (0..spec.n())
            .map(|k| vec![vec![0; message_len(spec, k)]; spec.s()])
            .collect();
        Self { groups }
    }

    pub fn random<R: Rng + ?Sized>(spec: &BaseCodeSpec, rng: &mut R) -> Self {
        let groups = (0..spec.n())
            .map(|k| {
                (0..spec.s())
                    .map(|_| (0..message_len(spec, k)).map(|_| rng.random::<bool>() as u8).collect())
                    .collect()
            })
            .collect();
        Self { groups }
    }

    pub fn groups(&self) -> &[Vec<Vec<u8>>] {
        &self.groups
    }

    pub fn group(&self, k: usize) -> &[Vec<u8>] {
        &self.groups[k]
    }

    pub fn info_bits(&self) -> usize {
        self.groups.iter().flatten().map(Vec::len).sum()
    }

    /// Bits differing from `other`, per group.
    pub fn bit_errors(&self, other: &StreamBlock) -> Vec<usize> {
        self.groups
            .iter()
            .zip(&other.groups)
            .map(|(a, b)| {
                a.iter()
                    .flatten()
                    .zip(b.iter().flatten())
                    .filter(|(x, y)| x != y)
                    .count()
            })
            .collect()
    }
}

/// Message length of each stream in group `k`.
pub fn message_len(spec: &BaseCodeSpec, k: usize) -> usize {
    if k == 0 {
        spec.n() - 1
    } else {
        spec.k()
    }
}

/// Total information bits per global codeword, s(n−1)(n−m+1).
pub fn info_bits(spec: &BaseCodeSpec) -> usize {
    spec.s() * (spec.n() - 1) * (spec.n() - spec.m() + 1)
}

/// Length-n² global codeword over GF(2^s), segment j at `j*n..(j+1)*n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlobalWord {
    n: usize,
    s: usize,
    symbols: Vec<Symbol>,
}

impl GlobalWord {
    pub fn new(n: usize, s: usize, symbols: Vec<Symbol>) -> Result<Self> {
        if symbols.len() != n * n {
            return Err(Error::LengthMismatch {
                what: "global word",
                expected: n * n,
                found: symbols.len(),
            });
        }
        Ok(Self { n, s, symbols })
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn segment(&self, j: usize) -> &[Symbol] {
        &self.symbols[j * self.n..(j + 1) * self.n]
    }

    /// Binary constituent vector: bit l of every symbol.
    pub fn layer(&self, l: usize) -> Vec<u8> {
        self.symbols.iter().map(|&x| ((x >> l) & 1) as u8).collect()
    }

    pub fn layers(&self) -> Vec<Vec<u8>> {
        (0..self.s).map(|l| self.layer(l)).collect()
    }

    /// Recomposition v = Σ_l v_{b,l} α^l.
    pub fn from_layers(n: usize, layers: &[Vec<u8>]) -> Result<Self> {
        let symbols = crate::cyclic::compose_streams(layers)?;
        Self::new(n, layers.len(), symbols)
    }

    /// Symbol-major bit serialization: bit `t*s + l` is bit l of symbol t.
    pub fn to_bits(&self) -> Vec<u8> {
        self.symbols
            .iter()
            .flat_map(|&x| (0..self.s).map(move |l| ((x >> l) & 1) as u8))
            .collect()
    }
}

/// Transmitter output.
#[derive(Debug, Clone)]
pub struct TxFrame {
    pub composites: Vec<CompositeWord>,
    pub global: GlobalWord,
    pub bpsk: Vec<f64>,
}

/// Receiver output after the inverse transform.
#[derive(Debug, Clone)]
pub struct RxFrame {
    pub composites: Vec<Vec<Symbol>>,
    pub streams: StreamBlock,
}

/// BPSK map 0 → +1, 1 → −1.
pub fn bpsk(bits: &[u8]) -> Vec<f64> {
    bits.iter().map(|&b| if b == 0 { 1.0 } else { -1.0 }).collect()
}

/// S/P extraction: vector j holds symbol j of every composite word.
pub fn sp_extract(composites: &[Vec<Symbol>]) -> Vec<Vec<Symbol>> {
    let n = composites.len();
    let len = composites.first().map_or(0, Vec::len);
    (0..len).map(|j| (0..n).map(|k| composites[k][j]).collect()).collect()
}

/// P/S conversion, the inverse of [`sp_extract`].
pub fn ps_merge(parallel: &[Vec<Symbol>]) -> Vec<Vec<Symbol>> {
    sp_extract(parallel)
}

/// A configured FF-OFDM system: base code, transforms and global matrix.
#[derive(Debug, Clone)]
pub struct FfOfdm {
    spec: BaseCodeSpec,
    generator: GeneratorPoly,
    forward: VandermondeMatrix,
    inverse: VandermondeMatrix,
    global: GlobalParityCheck,
    verify: bool,
}

impl FfOfdm {
    pub fn new(spec: BaseCodeSpec) -> Result<Self> {
        let generator = generator_poly(&spec)?;
        let global = cpm_dispersion(&base_matrix(&spec, 1)?)?;
        Ok(Self {
            forward: vandermonde(spec.subgroup(), Direction::Forward),
            inverse: vandermonde(spec.subgroup(), Direction::Inverse),
            spec,
            generator,
            global,
            verify: false,
        })
    }

    /// Checks every local codeword's syndrome during transmission.
    pub fn with_verification(mut self, verify: bool) -> Self {
        self.verify = verify;
        self
    }

    pub fn spec(&self) -> &BaseCodeSpec {
        &self.spec
    }

    pub fn field(&self) -> &GaloisField {
        self.spec.field()
    }

    pub fn generator(&self) -> &GeneratorPoly {
        &self.generator
    }

    pub fn global_check(&self) -> &GlobalParityCheck {
        &self.global
    }

    pub fn n(&self) -> usize {
        self.spec.n()
    }

    pub fn s(&self) -> usize {
        self.spec.s()
    }

    /// Local encoding and composition of group k.
    pub fn encode_group(&self, k: usize, streams: &[Vec<u8>]) -> Result<CompositeWord> {
        let symbols = match (self.spec.mode(), k) {
            (_, 0) => encode_spc(&crate::cyclic::compose_streams(streams)?),
            (Mode::Binary, k) => {
                let words = streams
                    .iter()
                    .map(|msg| hadamard_perm(&encode_binary(msg, &self.generator)?, k))
                    .collect::<Result<Vec<_>>>()?;
                crate::cyclic::compose_streams(&words)?
            }
            (Mode::Nonbinary, k) => {
                let msg = crate::cyclic::compose_streams(streams)?;
                let word = encode_nonbinary(&msg, &self.generator, self.field())?;
                hadamard_perm(&word, k)?
            }
        };
        if self.verify && !self.spec.is_codeword(&symbols, k)? {
            return Err(Error::EncodingSyndrome { group: k });
        }
        Ok(CompositeWord { group: k, symbols })
    }

    /// GFT of the interleaved composites: c^F[j] = c[j]·V, serialized.
    pub fn multiplex(&self, composites: &[Vec<Symbol>]) -> GlobalWord {
        let n = self.n();
        let parallel = sp_extract(composites);
        let mut symbols = vec![0; n * n];
        for (j, seg) in parallel.iter().enumerate() {
            self.forward
                .apply(self.field(), seg, &mut symbols[j * n..(j + 1) * n]);
        }
        GlobalWord {
            n,
            s: self.s(),
            symbols,
        }
    }

    /// IGFT per segment followed by P/S regrouping into composite words.
    pub fn demultiplex(&self, global: &GlobalWord) -> Vec<Vec<Symbol>> {
        let n = self.n();
        let parallel: Vec<Vec<Symbol>> = (0..n)
            .map(|j| {
                let mut out = vec![0; n];
                self.inverse.apply(self.field(), global.segment(j), &mut out);
                out
            })
            .collect();
        ps_merge(&parallel)
    }

    pub fn transmit(&self, streams: &StreamBlock) -> Result<TxFrame> {
        let n = self.n();
        if streams.groups.len() != n {
            return Err(Error::LengthMismatch {
                what: "group count",
                expected: n,
                found: streams.groups.len(),
            });
        }
        let composites = streams
            .groups
            .iter()
            .enumerate()
            .map(|(k, g)| self.encode_group(k, g))
            .collect::<Result<Vec<_>>>()?;
        let words: Vec<Vec<Symbol>> = composites.iter().map(|c| c.symbols.clone()).collect();
        let global = self.multiplex(&words);
        let bpsk = bpsk(&global.to_bits());
        Ok(TxFrame {
            composites,
            global,
            bpsk,
        })
    }

    /// Message bits of group k from its composite word.
    pub fn extract_group(&self, k: usize, composite: &[Symbol]) -> Vec<Vec<u8>> {
        let (systematic, range) = if k == 0 {
            (composite.to_vec(), 0..self.n() - 1)
        } else {
            (
                hadamard_unperm(composite, k).expect("k in 1..n"),
                self.spec.m()..self.n(),
            )
        };
        crate::cyclic::decompose_word(&systematic[range], self.s())
    }

    pub fn receive(&self, global: &GlobalWord) -> RxFrame {
        let composites = self.demultiplex(global);
        let groups = composites
            .iter()
            .enumerate()
            .map(|(k, c)| self.extract_group(k, c))
            .collect();
        RxFrame {
            composites,
            streams: StreamBlock { groups },
        }
    }

    /// Information rate of the global code, s(n−1)(n−m+1) / (s n²).
    pub fn rate(&self) -> f64 {
        let n = self.n();
        ((n - 1) * (n - self.spec.m() + 1)) as f64 / (n * n) as f64
    }
}

/// Dense references for the cascaded and interleaved check matrices.
#[derive(Debug, Clone)]
pub struct CascadedRef {
    n: usize,
    m: usize,
    /// mn × n² block-diagonal matrix of B^{∘0}, …, B^{∘(n−1)}.
    pub h_casc: Vec<Vec<Symbol>>,
    /// Row and column interleaving of `h_casc`: m×n array of diagonal blocks.
    pub h_casc_pi: Vec<Vec<Symbol>>,
    /// n² × n² block-diagonal of V.
    pub v_blk: Vec<Vec<Symbol>>,
}

/// Column interleaver on n² positions: (k, j) ↦ (j, k).
pub fn interleave_index(n: usize, pos: usize) -> usize {
    (pos % n) * n + pos / n
}

pub fn build_cascaded_ref(spec: &BaseCodeSpec) -> Result<CascadedRef> {
    let (n, m) = (spec.n(), spec.m());
    if n > DENSE_LIMIT {
        return Err(Error::ScaleGuard {
            n,
            limit: DENSE_LIMIT,
        });
    }
    let f = spec.field();
    let sg = spec.subgroup();
    let mut h_casc = vec![vec![0; n * n]; m * n];
    for k in 0..n {
        let bk = base_matrix(spec, k)?.to_symbols(f, sg);
        for i in 0..m {
            h_casc[k * m + i][k * n..(k + 1) * n].copy_from_slice(&bk[i]);
        }
    }
    // rows (k, i) -> (i, k); columns (k, j) -> (j, k)
    let mut h_casc_pi = vec![vec![0; n * n]; m * n];
    for k in 0..n {
        for i in 0..m {
            let dst = &mut h_casc_pi[i * n + k];
            for (pos, &x) in h_casc[k * m + i].iter().enumerate() {
                dst[interleave_index(n, pos)] = x;
            }
        }
    }
    let v = vandermonde(sg, Direction::Forward).to_symbols(f);
    let mut v_blk = vec![vec![0; n * n]; n * n];
    for b in 0..n {
        for r in 0..n {
            v_blk[b * n + r][b * n..(b + 1) * n].copy_from_slice(&v[r]);
        }
    }
    Ok(CascadedRef {
        n,
        m,
        h_casc,
        h_casc_pi,
        v_blk,
    })
}

impl CascadedRef {
    /// Block (i, j) of the interleaved matrix.
    pub fn d_block(&self, i: usize, j: usize) -> Vec<Vec<Symbol>> {
        let n = self.n;
        (0..n)
            .map(|r| self.h_casc_pi[i * n + r][j * n..(j + 1) * n].to_vec())
            .collect()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

/// D_{i,j} = diag(β^{r·j·l_i}), r = 0..n−1, built directly from the roots.
pub fn diagonal_block(spec: &BaseCodeSpec, i: usize, j: usize) -> Vec<Vec<Symbol>> {
    let n = spec.n();
    let e = j * spec.roots()[i] % n;
    (0..n)
        .map(|r| {
            let mut row = vec![0; n];
            row[r] = spec.subgroup().power(spec.field(), (r * e) as i64);
            row
        })
        .collect()
}

/// Result of checking V·D_{i,j}·V^{-1} = CPM(e(i, j)) block by block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimilarityReport {
    pub checked: usize,
    pub mismatch: Option<(usize, usize)>,
}

impl SimilarityReport {
    pub fn passed(&self) -> bool {
        self.mismatch.is_none() && self.checked > 0
    }
}

fn similarity_block_ok(
    field: &GaloisField,
    v: &[Vec<Symbol>],
    vi: &[Vec<Symbol>],
    d: &[Vec<Symbol>],
    e: usize,
) -> bool {
    let prod = gf_matmul(field, &gf_matmul(field, v, d), vi);
    let c = cpm(e, v.len());
    prod.iter()
        .zip(&c)
        .all(|(pr, cr)| pr.iter().zip(cr).all(|(&x, &y)| x == y as Symbol))
}

/// Dense check of every block, D taken from the interleaved cascaded matrix.
pub fn verify_similarity(
    reference: &CascadedRef,
    spec: &BaseCodeSpec,
    h: &GlobalParityCheck,
) -> SimilarityReport {
    let f = spec.field();
    let v = vandermonde(spec.subgroup(), Direction::Forward).to_symbols(f);
    let vi = vandermonde(spec.subgroup(), Direction::Inverse).to_symbols(f);
    let mut checked = 0;
    for i in 0..reference.m {
        for j in 0..reference.n {
            checked += 1;
            if !similarity_block_ok(f, &v, &vi, &reference.d_block(i, j), h.exponent(i, j)) {
                return SimilarityReport {
                    checked,
                    mismatch: Some((i, j)),
                };
            }
        }
    }
    SimilarityReport {
        checked,
        mismatch: None,
    }
}

/// Per-block check for arbitrary n on the listed blocks.
pub fn verify_similarity_blocks(
    spec: &BaseCodeSpec,
    h: &GlobalParityCheck,
    blocks: &[(usize, usize)],
) -> SimilarityReport {
    let f = spec.field();
    let v = vandermonde(spec.subgroup(), Direction::Forward).to_symbols(f);
    let vi = vandermonde(spec.subgroup(), Direction::Inverse).to_symbols(f);
    let mut checked = 0;
    for &(i, j) in blocks {
        checked += 1;
        if !similarity_block_ok(f, &v, &vi, &diagonal_block(spec, i, j), h.exponent(i, j)) {
            return SimilarityReport {
                checked,
                mismatch: Some((i, j)),
            };
        }
    }
    SimilarityReport {
        checked,
        mismatch: None,
    }
}

/// Dense syndrome word · Hᵀ over GF(2^s).
pub fn dense_syndrome(field: &GaloisField, h: &[Vec<Symbol>], word: &[Symbol]) -> Vec<Symbol> {
    h.iter()
        .map(|row| {
            row.iter()
                .zip(word)
                .fold(0, |acc, (&a, &b)| acc ^ field.mul(a, b))
        })
        .collect()
}

const TRACE_MAGIC: &[u8; 4] = b"FFOT";
const TRACE_VERSION: u32 = 1;

/// Writes a frame trace. Layout, all integers little-endian:
///
/// ```text
/// "FFOT" | version u32 | s u32 | n u32 | m u32
/// n² × u16   global codeword symbols, serialized order
/// for k in 0..n, l in 0..s: u32 length, then one byte per message bit
/// ```
pub fn write_trace<W: Write>(
    mut out: W,
    spec: &BaseCodeSpec,
    global: &GlobalWord,
    streams: &StreamBlock,
) -> Result<()> {
    out.write_all(TRACE_MAGIC)?;
    for v in [TRACE_VERSION, spec.s() as u32, spec.n() as u32, spec.m() as u32] {
        out.write_all(&v.to_le_bytes())?;
    }
    for &x in global.symbols() {
        out.write_all(&x.to_le_bytes())?;
    }
    for stream in streams.groups.iter().flatten() {
        out.write_all(&(stream.len() as u32).to_le_bytes())?;
        out.write_all(stream)?;
    }
    Ok(())
}

/// Reads a trace written by [`write_trace`].
pub fn read_trace<R: Read>(mut input: R, spec: &BaseCodeSpec) -> Result<(GlobalWord, StreamBlock)> {
    let mut magic = [0u8; 4];
    input.read_exact(&mut magic)?;
    if &magic != TRACE_MAGIC {
        return Err(Error::Trace("bad magic".into()));
    }
    let read_u32 = |input: &mut R| -> Result<u32> {
        let mut b = [0u8; 4];
        input.read_exact(&mut b)?;
        Ok(u32::from_le_bytes(b))
    };
    let header: Vec<u32> = (0..4).map(|_| read_u32(&mut input)).collect::<Result<_>>()?;
    let expect = [TRACE_VERSION, spec.s() as u32, spec.n() as u32, spec.m() as u32];
    if header != expect {
        return Err(Error::Trace(format!("header {header:?} does not match {expect:?}")));
    }
    let n = spec.n();
    let mut raw = vec![0u8; 2 * n * n];
    input.read_exact(&mut raw)?;
    let symbols = raw
        .chunks_exact(2)
        .map(|c| u16::from_le_bytes([c[0], c[1]]))
        .collect();
    let global = GlobalWord::new(n, spec.s(), symbols)?;
    let mut groups = Vec::with_capacity(n);
    for _ in 0..n {
        let mut group = Vec::with_capacity(spec.s());
        for _ in 0..spec.s() {
            let len = read_u32(&mut input)? as usize;
            let mut bits = vec![0u8; len];
            input.read_exact(&mut bits)?;
            group.push(bits);
        }
        groups.push(group);
    }
    Ok((global, StreamBlock::new(spec, groups)?))
}
