//! Prime-length cyclic base codes, their Hadamard powers and equivalents.
//!
//! A base code C of length n is fixed by m root exponents l_0..l_{m-1}: its
//! generator polynomial has roots β^{l_i} and its parity-check matrix is
//! B = [β^{j l_i}]. The k-th Hadamard power B^{∘k} = [β^{k j l_i}] is a column
//! permutation of B, so C^{∘k} codewords are produced by encoding in C and
//! applying [`hadamard_perm`]. Group 0 uses the (n, n−1) single parity-check
//! code, whose check matrix B^{∘0} is all ones.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::galois::{GaloisField, SubgroupGen, Symbol};

/// Whether local codewords are stacks of binary codewords (BCH-style) or
/// native GF(2^s) codewords (Reed–Solomon style).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Binary,
    Nonbinary,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Binary => "binary",
            Mode::Nonbinary => "nonbinary",
        }
    }
}

/// Closure of `seeds` under t ↦ 2t mod n, sorted ascending.
pub fn conjugacy_closure(seeds: impl IntoIterator<Item = usize>, n: usize) -> Vec<usize> {
    let mut set = BTreeSet::new();
    for seed in seeds {
        let mut t = seed % n;
        while set.insert(t) {
            t = (2 * t) % n;
        }
    }
    set.into_iter().collect()
}

/// Root exponents of the narrow-sense binary BCH code of designed distance
/// `d`: the conjugacy closure of {1, …, d−1}.
pub fn bch_roots(designed_distance: usize, n: usize) -> Vec<usize> {
    conjugacy_closure(1..designed_distance, n)
}

/// Definition of the base code C and, through it, every Hadamard equivalent.
#[derive(Debug, Clone)]
pub struct BaseCodeSpec {
    field: Arc<GaloisField>,
    subgroup: SubgroupGen,
    roots: Vec<usize>,
    mode: Mode,
}

impl BaseCodeSpec {
    pub fn new(
        field: Arc<GaloisField>,
        subgroup: SubgroupGen,
        roots: Vec<usize>,
        mode: Mode,
    ) -> Result<Self> {
        let n = subgroup.n();
        let m = roots.len();
        if m == 0 || m >= n {
            return Err(Error::RootCount { m, n });
        }
        let mut seen = vec![false; n];
        for &l in &roots {
            if seen[l % n] {
                return Err(Error::DuplicateRoots(l % n));
            }
            seen[l % n] = true;
        }
        let roots: Vec<usize> = roots.into_iter().map(|l| l % n).collect();
        if mode == Mode::Binary {
            check_conjugacy(&roots, n)?;
        }
        Ok(Self {
            field,
            subgroup,
            roots,
            mode,
        })
    }

    /// Like [`new`](Self::new) but skips the distinctness check. Only meant
    /// for building deliberately broken matrices in structural checks.
    pub fn new_unchecked(
        field: Arc<GaloisField>,
        subgroup: SubgroupGen,
        roots: Vec<usize>,
        mode: Mode,
    ) -> Self {
        let n = subgroup.n();
        Self {
            field,
            subgroup,
            roots: roots.into_iter().map(|l| l % n).collect(),
            mode,
        }
    }

    pub fn field(&self) -> &GaloisField {
        &self.field
    }

    pub fn field_arc(&self) -> &Arc<GaloisField> {
        &self.field
    }

    pub fn subgroup(&self) -> SubgroupGen {
        self.subgroup
    }

    pub fn roots(&self) -> &[usize] {
        &self.roots
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn n(&self) -> usize {
        self.subgroup.n()
    }

    pub fn m(&self) -> usize {
        self.roots.len()
    }

    pub fn s(&self) -> usize {
        self.field.degree() as usize
    }

    /// Dimension n − m of the base code.
    pub fn k(&self) -> usize {
        self.n() - self.m()
    }

    /// Syndrome of a GF(2^s) word against B^{∘k}.
    pub fn syndrome(&self, word: &[Symbol], k: usize) -> Result<Vec<Symbol>> {
        let b = base_matrix(self, k)?;
        if word.len() != self.n() {
            return Err(Error::LengthMismatch {
                what: "word",
                expected: self.n(),
                found: word.len(),
            });
        }
        Ok((0..b.m())
            .map(|i| {
                word.iter().enumerate().fold(0, |acc, (j, &c)| {
                    acc ^ self.subgroup.mul_power(&self.field, c, b.exponent(i, j))
                })
            })
            .collect())
    }

    pub fn is_codeword(&self, word: &[Symbol], k: usize) -> Result<bool> {
        Ok(self.syndrome(word, k)?.iter().all(|&x| x == 0))
    }
}

fn check_conjugacy(roots: &[usize], n: usize) -> Result<()> {
    let set: BTreeSet<usize> = roots.iter().copied().collect();
    for &l in roots {
        let c = (2 * l) % n;
        if !set.contains(&c) {
            return Err(Error::ConjugacyViolation { root: l, missing: c });
        }
    }
    Ok(())
}

/// Monic generator polynomial, coefficients stored lowest degree first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorPoly {
    coeffs: Vec<Symbol>,
}

impl GeneratorPoly {
    pub fn coeffs(&self) -> &[Symbol] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_binary(&self) -> bool {
        self.coeffs.iter().all(|&c| c <= 1)
    }

    /// Horner evaluation at `x`.
    pub fn eval(&self, field: &GaloisField, x: Symbol) -> Symbol {
        self.coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| field.mul(acc, x) ^ c)
    }
}

/// g(X) = ∏ (X + β^{l_i}).
pub fn generator_poly(spec: &BaseCodeSpec) -> Result<GeneratorPoly> {
    let f = spec.field();
    if spec.mode() == Mode::Binary {
        check_conjugacy(spec.roots(), spec.n())?;
    }
    let mut coeffs: Vec<Symbol> = vec![1];
    for &l in spec.roots() {
        let r = spec.subgroup().power(f, l as i64);
        let mut next = vec![0; coeffs.len() + 1];
        for (d, &c) in coeffs.iter().enumerate() {
            next[d + 1] ^= c;
            next[d] ^= f.mul(c, r);
        }
        coeffs = next;
    }
    let g = GeneratorPoly { coeffs };
    if spec.mode() == Mode::Binary {
        debug_assert!(g.is_binary());
    }
    Ok(g)
}

/// Exponent table of B^{∘k}: entry (i, j) is (k·j·l_i) mod n, i.e. the
/// entry is β raised to that power.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseMatrix {
    k: usize,
    n: usize,
    roots: Vec<usize>,
}

impl BaseMatrix {
    pub fn hadamard_k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.roots.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn roots(&self) -> &[usize] {
        &self.roots
    }

    #[inline]
    pub fn exponent(&self, i: usize, j: usize) -> usize {
        (self.k * j % self.n) * self.roots[i] % self.n
    }

    pub fn exponents(&self) -> Vec<Vec<usize>> {
        (0..self.m())
            .map(|i| (0..self.n).map(|j| self.exponent(i, j)).collect())
            .collect()
    }

    /// Entries as field elements.
    pub fn to_symbols(&self, field: &GaloisField, subgroup: SubgroupGen) -> Vec<Vec<Symbol>> {
        (0..self.m())
            .map(|i| {
                (0..self.n)
                    .map(|j| subgroup.power(field, self.exponent(i, j) as i64))
                    .collect()
            })
            .collect()
    }
}

/// The k-th Hadamard power B^{∘k}, 0 ≤ k < n.
pub fn base_matrix(spec: &BaseCodeSpec, k: usize) -> Result<BaseMatrix> {
    let n = spec.n();
    if k >= n {
        return Err(Error::HadamardIndex { k, lo: 0, n });
    }
    Ok(BaseMatrix {
        k,
        n,
        roots: spec.roots().to_vec(),
    })
}

/// π_k: output position t holds v[(t·k) mod n]. Maps C onto C^{∘k}.
pub fn hadamard_perm<T: Copy>(v: &[T], k: usize) -> Result<Vec<T>> {
    let n = v.len();
    if k == 0 || k >= n {
        return Err(Error::HadamardIndex { k, lo: 1, n });
    }
    Ok((0..n).map(|t| v[t * k % n]).collect())
}

/// Inverse of [`hadamard_perm`]: maps a C^{∘k} word back into C.
pub fn hadamard_unperm<T: Copy + Default>(w: &[T], k: usize) -> Result<Vec<T>> {
    let n = w.len();
    if k == 0 || k >= n {
        return Err(Error::HadamardIndex { k, lo: 1, n });
    }
    let mut v = vec![T::default(); n];
    for (t, &x) in w.iter().enumerate() {
        v[t * k % n] = x;
    }
    Ok(v)
}

/// Remainder of X^m · msg(X) modulo monic g(X), via the usual feedback
/// shift register. `mul` multiplies a feedback symbol by a coefficient.
fn parity_remainder<T, F>(msg: &[T], g: &[T], mul: F) -> Vec<T>
where
    T: Copy + Default + std::ops::BitXor<Output = T>,
    F: Fn(T, T) -> T,
{
    let m = g.len() - 1;
    let mut parity = vec![T::default(); m];
    for &u in msg.iter().rev() {
        let fb = u ^ parity[m - 1];
        for j in (1..m).rev() {
            parity[j] = parity[j - 1] ^ mul(fb, g[j]);
        }
        parity[0] = mul(fb, g[0]);
    }
    parity
}

/// Systematic binary encoding: parity in positions 0..m, message in m..n.
pub fn encode_binary(msg: &[u8], g: &GeneratorPoly) -> Result<Vec<u8>> {
    if !g.is_binary() {
        return Err(Error::WrongMode { expected: "binary" });
    }
    if msg.iter().any(|&b| b > 1) {
        return Err(Error::SymbolOutOfField { symbol: 2, s: 1 });
    }
    let gb: Vec<u8> = g.coeffs.iter().map(|&c| c as u8).collect();
    let mut word = if gb.len() > 1 {
        parity_remainder(msg, &gb, |a, b| a & b)
    } else {
        Vec::new()
    };
    word.extend_from_slice(msg);
    Ok(word)
}

/// Systematic encoding over GF(2^s): parity in positions 0..m, message in m..n.
pub fn encode_nonbinary(
    msg: &[Symbol],
    g: &GeneratorPoly,
    field: &GaloisField,
) -> Result<Vec<Symbol>> {
    if let Some(&bad) = msg.iter().find(|&&x| !field.contains(x)) {
        return Err(Error::SymbolOutOfField {
            symbol: bad,
            s: field.degree(),
        });
    }
    let mut word = if g.degree() > 0 {
        parity_remainder(msg, &g.coeffs, |a, b| field.mul(a, b))
    } else {
        Vec::new()
    };
    word.extend_from_slice(msg);
    Ok(word)
}

/// (n, n−1) single parity check: appends the XOR of all message symbols.
/// Works for bits and for GF(2^s) symbols alike.
pub fn encode_spc<T>(msg: &[T]) -> Vec<T>
where
    T: Copy + Default + std::ops::BitXor<Output = T>,
{
    let parity = msg.iter().fold(T::default(), |acc, &x| acc ^ x);
    let mut word = msg.to_vec();
    word.push(parity);
    word
}

/// A length-n GF(2^s) codeword of C^{∘group} (group 0: the SPC code).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompositeWord {
    pub group: usize,
    pub symbols: Vec<Symbol>,
}

/// Stacks s binary words as basis coordinates: symbol j has bit l equal to
/// `streams[l][j]`.
pub fn compose_streams(streams: &[Vec<u8>]) -> Result<Vec<Symbol>> {
    let n = streams.first().map_or(0, Vec::len);
    if let Some(bad) = streams.iter().find(|v| v.len() != n) {
        return Err(Error::LengthMismatch {
            what: "stream",
            expected: n,
            found: bad.len(),
        });
    }
    Ok((0..n)
        .map(|j| {
            streams
                .iter()
                .enumerate()
                .fold(0, |acc, (l, v)| acc | (((v[j] & 1) as Symbol) << l))
        })
        .collect())
}

/// [`compose_streams`] with a syndrome check of the result against
/// B^{∘k}; rejects streams that were not all codewords of C^{∘k}.
pub fn compose_streams_checked(
    streams: &[Vec<u8>],
    spec: &BaseCodeSpec,
    k: usize,
) -> Result<CompositeWord> {
    let symbols = compose_streams(streams)?;
    if !spec.is_codeword(&symbols, k)? {
        return Err(Error::EncodingSyndrome { group: k });
    }
    Ok(CompositeWord { group: k, symbols })
}

/// Splits a GF(2^s) word into its s binary layers.
pub fn decompose_word(word: &[Symbol], s: usize) -> Vec<Vec<u8>> {
    (0..s)
        .map(|l| word.iter().map(|&x| ((x >> l) & 1) as u8).collect())
        .collect()
}

/// Largest code length the exhaustive decoder accepts.
pub const MLD_MAX_N: usize = 15;

/// Exhaustive minimum-Hamming-distance decoder for a small binary base code.
#[derive(Debug, Clone)]
pub struct MldOracle {
    n: usize,
    codewords: Vec<u32>,
}

impl MldOracle {
    pub fn new(spec: &BaseCodeSpec) -> Result<Self> {
        if spec.mode() != Mode::Binary {
            return Err(Error::WrongMode { expected: "binary" });
        }
        let n = spec.n();
        if n > MLD_MAX_N {
            return Err(Error::TooLarge(format!(
                "maximum-likelihood enumeration needs n <= {MLD_MAX_N}, got {n}"
            )));
        }
        let g = generator_poly(spec)?;
        let k = spec.k();
        let codewords = (0..1u32 << k)
            .map(|idx| {
                let msg: Vec<u8> = (0..k).map(|t| ((idx >> t) & 1) as u8).collect();
                let word = encode_binary(&msg, &g).expect("binary generator");
                pack(&word)
            })
            .collect();
        Ok(Self { n, codewords })
    }

    pub fn codeword_count(&self) -> usize {
        self.codewords.len()
    }

    /// Nearest codeword; ties go to the lowest message index.
    pub fn decode(&self, received: &[u8]) -> Result<Vec<u8>> {
        if received.len() != self.n {
            return Err(Error::LengthMismatch {
                what: "received word",
                expected: self.n,
                found: received.len(),
            });
        }
        let r = pack(received);
        let best = self
            .codewords
            .iter()
            .min_by_key(|&&c| (c ^ r).count_ones())
            .copied()
            .expect("code is nonempty");
        Ok((0..self.n).map(|t| ((best >> t) & 1) as u8).collect())
    }
}

fn pack(bits: &[u8]) -> u32 {
    bits.iter()
        .enumerate()
        .fold(0, |acc, (t, &b)| acc | (((b & 1) as u32) << t))
}

/// One-shot form of [`MldOracle::decode`].
pub fn mld_oracle(received_hard: &[u8], spec: &BaseCodeSpec) -> Result<Vec<u8>> {
    MldOracle::new(spec)?.decode(received_hard)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hamming7() -> BaseCodeSpec {
        let f = Arc::new(GaloisField::with_default_poly(3).unwrap());
        let g = f.element_of_order(7).unwrap();
        BaseCodeSpec::new(f, g, vec![1, 2, 4], Mode::Binary).unwrap()
    }

    /// Independent GF(2) polynomial remainder, long division on coefficient
    /// vectors.
    fn gf2_rem(mut a: Vec<u8>, g: &[u8]) -> Vec<u8> {
        let dg = g.len() - 1;
        while a.len() > dg {
            let top = a.len() - 1;
            if a[top] == 1 {
                for (i, &c) in g.iter().enumerate() {
                    a[top - dg + i] ^= c;
                }
            }
            a.pop();
        }
        a
    }

    fn all_codewords(spec: &BaseCodeSpec) -> Vec<Vec<u8>> {
        let g = generator_poly(spec).unwrap();
        (0..1u32 << spec.k())
            .map(|idx| {
                let msg: Vec<u8> = (0..spec.k()).map(|t| ((idx >> t) & 1) as u8).collect();
                encode_binary(&msg, &g).unwrap()
            })
            .collect()
    }

    #[test]
    fn hamming_generator() {
        let spec = hamming7();
        let g = generator_poly(&spec).unwrap();
        // (X+β)(X+β²)(X+β⁴) = X³ + X + 1 in GF(8) built on x³+x+1
        assert_eq!(g.coeffs(), &[1, 1, 0, 1]);
        for &l in spec.roots() {
            assert_eq!(g.eval(spec.field(), spec.subgroup().power(spec.field(), l as i64)), 0);
        }
    }

    #[test]
    fn bch_127_113_generator() {
        let f = Arc::new(GaloisField::with_default_poly(7).unwrap());
        let sg = f.element_of_order(127).unwrap();
        let roots = bch_roots(5, 127);
        assert_eq!(roots.len(), 14);
        let spec = BaseCodeSpec::new(f, sg, roots, Mode::Binary).unwrap();
        let g = generator_poly(&spec).unwrap();
        assert_eq!(g.degree(), 14);
        assert!(g.is_binary());
        assert_eq!(spec.k(), 113);
    }

    #[test]
    fn rs_89_85_generator() {
        let f = Arc::new(GaloisField::with_default_poly(11).unwrap());
        let sg = f.element_of_order(89).unwrap();
        let spec = BaseCodeSpec::new(f, sg, vec![1, 2, 3, 4], Mode::Nonbinary).unwrap();
        let g = generator_poly(&spec).unwrap();
        assert_eq!(g.degree(), 4);
        assert_eq!(*g.coeffs().last().unwrap(), 1);
        for l in 1..=4 {
            assert_eq!(g.eval(spec.field(), spec.subgroup().power(spec.field(), l)), 0);
        }
        assert!(!g.is_binary());
    }

    #[test]
    fn conjugacy_violation() {
        let f = Arc::new(GaloisField::with_default_poly(3).unwrap());
        let sg = f.element_of_order(7).unwrap();
        let err = BaseCodeSpec::new(f.clone(), sg, vec![1, 2], Mode::Binary).unwrap_err();
        assert!(matches!(err, Error::ConjugacyViolation { root: 2, missing: 4 }));
        let spec = BaseCodeSpec::new_unchecked(f, sg, vec![1, 2], Mode::Binary);
        assert!(matches!(generator_poly(&spec), Err(Error::ConjugacyViolation { .. })));
    }

    #[test]
    fn root_set_errors() {
        let f = Arc::new(GaloisField::with_default_poly(3).unwrap());
        let sg = f.element_of_order(7).unwrap();
        assert!(matches!(
            BaseCodeSpec::new(f.clone(), sg, vec![1, 8], Mode::Nonbinary),
            Err(Error::DuplicateRoots(1))
        ));
        assert!(matches!(
            BaseCodeSpec::new(f.clone(), sg, vec![], Mode::Nonbinary),
            Err(Error::RootCount { .. })
        ));
        assert!(matches!(
            BaseCodeSpec::new(f, sg, (0..7).collect(), Mode::Nonbinary),
            Err(Error::RootCount { .. })
        ));
    }

    #[test]
    fn base_matrix_examples() {
        let spec = hamming7();
        let b0 = base_matrix(&spec, 0).unwrap();
        assert!(b0.exponents().iter().flatten().all(|&e| e == 0));
        let b1 = base_matrix(&spec, 1).unwrap();
        for i in 0..3 {
            for j in 0..7 {
                assert_eq!(b1.exponent(i, j), j * spec.roots()[i] % 7);
            }
        }
        let b3 = base_matrix(&spec, 3).unwrap();
        assert_eq!(b3.exponent(0, 2), 6);
        assert!(base_matrix(&spec, 7).is_err());
        for k in 0..7 {
            let b = base_matrix(&spec, k).unwrap();
            assert!((0..b.m()).all(|i| b.exponent(i, 0) == 0));
        }
    }

    #[test]
    fn hadamard_power_permutes_columns() {
        let f = Arc::new(GaloisField::with_default_poly(7).unwrap());
        let sg = f.element_of_order(127).unwrap();
        let spec = BaseCodeSpec::new(f, sg, (1..=6).collect(), Mode::Nonbinary).unwrap();
        let b1 = base_matrix(&spec, 1).unwrap();
        for k in 1..127 {
            let bk = base_matrix(&spec, k).unwrap();
            for i in 0..bk.m() {
                for t in 0..127 {
                    assert_eq!(bk.exponent(i, t), b1.exponent(i, t * k % 127));
                }
            }
        }
    }

    #[test]
    fn hadamard_perm_examples() {
        let v: Vec<u32> = (0..7).collect();
        assert_eq!(hadamard_perm(&v, 1).unwrap(), v);
        assert_eq!(hadamard_perm(&v, 3).unwrap(), vec![0, 3, 6, 2, 5, 1, 4]);
        assert!(hadamard_perm(&v, 0).is_err());
        assert_eq!(hadamard_unperm(&hadamard_perm(&v, 3).unwrap(), 3).unwrap(), v);
    }

    #[test]
    fn hadamard_closure_all_hamming_codewords() {
        let spec = hamming7();
        let words = all_codewords(&spec);
        assert_eq!(words.len(), 16);
        for v in &words {
            let sym: Vec<Symbol> = v.iter().map(|&b| b as Symbol).collect();
            assert!(spec.is_codeword(&sym, 1).unwrap());
            for k in 1..7 {
                let w = hadamard_perm(&sym, k).unwrap();
                assert!(spec.is_codeword(&w, k).unwrap(), "k={k}");
            }
        }
    }

    #[test]
    fn binary_encoder_examples() {
        let spec = hamming7();
        let g = generator_poly(&spec).unwrap();
        assert_eq!(encode_binary(&[0; 4], &g).unwrap(), vec![0; 7]);
        assert_eq!(encode_binary(&[1, 0, 0, 0], &g).unwrap(), vec![1, 1, 0, 1, 0, 0, 0]);
        let gb: Vec<u8> = g.coeffs().iter().map(|&c| c as u8).collect();
        let words = all_codewords(&spec);
        let distinct: BTreeSet<_> = words.iter().cloned().collect();
        assert_eq!(distinct.len(), 16);
        for w in &words {
            assert!(gf2_rem(w.clone(), &gb).iter().all(|&b| b == 0));
        }
        assert!(encode_binary(&[2, 0, 0, 0], &g).is_err());
    }

    #[test]
    fn nonbinary_encoder_gf16() {
        let f = Arc::new(GaloisField::with_default_poly(4).unwrap());
        let sg = f.element_of_order(5).unwrap();
        let spec = BaseCodeSpec::new(f.clone(), sg, vec![1, 2], Mode::Nonbinary).unwrap();
        let g = generator_poly(&spec).unwrap();
        assert_eq!(encode_nonbinary(&[0; 3], &g, &f).unwrap(), vec![0; 5]);
        let msg = [7, 0, 13];
        let c = encode_nonbinary(&msg, &g, &f).unwrap();
        assert_eq!(&c[2..], &msg);
        let cpoly = GeneratorPoly { coeffs: c.clone() };
        for l in [1, 2] {
            assert_eq!(cpoly.eval(&f, sg.power(&f, l)), 0);
        }
        assert!(encode_nonbinary(&[16, 0, 0], &g, &f).is_err());
    }

    #[test]
    fn rs_127_121_codeword() {
        let f = Arc::new(GaloisField::with_default_poly(7).unwrap());
        let sg = f.element_of_order(127).unwrap();
        let spec = BaseCodeSpec::new(f.clone(), sg, (1..=6).collect(), Mode::Nonbinary).unwrap();
        let g = generator_poly(&spec).unwrap();
        let msg: Vec<Symbol> = (0..121).map(|t| ((t * 37 + 5) % 128) as Symbol).collect();
        let c = encode_nonbinary(&msg, &g, &f).unwrap();
        assert_eq!(c.len(), 127);
        assert!(spec.is_codeword(&c, 1).unwrap());
        for k in [2, 64, 126] {
            assert!(spec.is_codeword(&hadamard_perm(&c, k).unwrap(), k).unwrap());
        }
    }

    #[test]
    fn spc_examples() {
        assert_eq!(encode_spc(&[0u8; 6]), vec![0; 7]);
        assert_eq!(*encode_spc(&[1u8, 1, 0, 1, 0, 0]).last().unwrap(), 1);
        let f = GaloisField::with_default_poly(3).unwrap();
        let a = f.alpha();
        let w = encode_spc(&[a, a, 1, 0, 0, 0]);
        assert_eq!(*w.last().unwrap(), 1);
        assert_eq!(w.iter().fold(0, |acc, &x| acc ^ x), 0);
    }

    #[test]
    fn compose_examples() {
        let spec = hamming7();
        assert_eq!(compose_streams(&[vec![0; 7], vec![0; 7], vec![0; 7]]).unwrap(), vec![0; 7]);
        let v = vec![1, 1, 0, 1, 0, 0, 0];
        let c = compose_streams(&[v.clone(), vec![0; 7], vec![0; 7]]).unwrap();
        assert_eq!(c, v.iter().map(|&b| b as Symbol).collect::<Vec<_>>());
        let words = all_codewords(&spec);
        for k in 1..7 {
            let streams: Vec<Vec<u8>> = [3, 9, 14]
                .iter()
                .map(|&i| hadamard_perm(&words[i], k).unwrap())
                .collect();
            let cw = compose_streams_checked(&streams, &spec, k).unwrap();
            assert_eq!(decompose_word(&cw.symbols, 3), streams);
        }
        // mixed Hadamard indices are rejected (π_2 fixes this code, π_3 does not)
        assert!(words[9].iter().any(|&b| b == 0));
        let mixed = vec![
            hadamard_perm(&words[3], 1).unwrap(),
            hadamard_perm(&words[9], 3).unwrap(),
            vec![0; 7],
        ];
        assert!(compose_streams_checked(&mixed, &spec, 1).is_err());
        assert!(compose_streams(&[vec![0; 7], vec![0; 6]]).is_err());
    }

    #[test]
    fn mld_oracle_examples() {
        let spec = hamming7();
        let oracle = MldOracle::new(&spec).unwrap();
        assert_eq!(oracle.codeword_count(), 16);
        for w in all_codewords(&spec) {
            assert_eq!(oracle.decode(&w).unwrap(), w);
            for flip in 0..7 {
                let mut r = w.clone();
                r[flip] ^= 1;
                assert_eq!(oracle.decode(&r).unwrap(), w);
            }
        }
        // two flips: perfect code, so the nearest codeword is at distance exactly 1
        let w = all_codewords(&spec)[5].clone();
        let mut r = w.clone();
        r[0] ^= 1;
        r[3] ^= 1;
        let d = oracle.decode(&r).unwrap();
        let dist = d.iter().zip(&r).filter(|(a, b)| a != b).count();
        assert_eq!(dist, 1);
        assert_eq!(d, mld_oracle(&r, &spec).unwrap());
    }

    #[test]
    fn mld_oracle_guards() {
        let f = Arc::new(GaloisField::with_default_poly(5).unwrap());
        let sg = f.element_of_order(31).unwrap();
        let spec = BaseCodeSpec::new(f, sg, bch_roots(3, 31), Mode::Binary).unwrap();
        assert!(matches!(MldOracle::new(&spec), Err(Error::TooLarge(_))));
    }
}
