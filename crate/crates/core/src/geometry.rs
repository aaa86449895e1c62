//! Vandermonde (GFT) matrices, circulant permutation matrices and the global
//! parity-check matrix H = CPM(B).
//!
//! H is never stored densely at production size. [`GlobalParityCheck`] keeps
//! the m×n table of CPM exponents and generates adjacency on demand; block
//! (i, j) maps row r of block-row i to column (r + e(i, j)) mod n of
//! block-column j. Arbitrary binary matrices (for example ones read from an
//! alist file) use [`SparseBinaryMatrix`].

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::io::{BufRead, Write};

use crate::cyclic::BaseMatrix;
use crate::error::{Error, Result};
use crate::galois::{GaloisField, SubgroupGen, Symbol};

/// Largest n for which dense matrices and brute-force checks are built.
pub const DENSE_LIMIT: usize = 31;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// V = [β^{ij}] or V^{-1} = [β^{-ij}], stored as an exponent rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VandermondeMatrix {
    subgroup: SubgroupGen,
    direction: Direction,
}

pub fn vandermonde(subgroup: SubgroupGen, direction: Direction) -> VandermondeMatrix {
    VandermondeMatrix {
        subgroup,
        direction,
    }
}

impl VandermondeMatrix {
    pub fn n(&self) -> usize {
        self.subgroup.n()
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    /// Exponent of β at (i, j).
    #[inline]
    pub fn exponent(&self, i: usize, j: usize) -> usize {
        let n = self.n();
        let e = i * j % n;
        match self.direction {
            Direction::Forward => e,
            Direction::Inverse => (n - e) % n,
        }
    }

    pub fn to_symbols(&self, field: &GaloisField) -> Vec<Vec<Symbol>> {
        let n = self.n();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| self.subgroup.power(field, self.exponent(i, j) as i64))
                    .collect()
            })
            .collect()
    }

    /// Row vector times matrix: out[b] = Σ_r x[r] · β^{±r b}.
    pub fn apply(&self, field: &GaloisField, x: &[Symbol], out: &mut [Symbol]) {
        let n = self.n();
        debug_assert_eq!(x.len(), n);
        debug_assert_eq!(out.len(), n);
        let step = self.subgroup.alpha_exponent();
        let q1 = field.order();
        // work with logs directly: one table lookup per product
        let logs: Vec<Option<usize>> = x.iter().map(|&v| field.log(v).map(|l| l as usize)).collect();
        for (b, o) in out.iter_mut().enumerate() {
            let mut acc = 0;
            for (r, l) in logs.iter().enumerate() {
                if let Some(l) = l {
                    let e = self.exponent(r, b) * step;
                    acc ^= field.exp(((l + e) % q1) as i64);
                }
            }
            *o = acc;
        }
    }
}

/// Dense n×n GF(2) circulant permutation matrix: row r has its 1 at column
/// (r + e) mod n.
pub fn cpm(e: usize, n: usize) -> Vec<Vec<u8>> {
    (0..n)
        .map(|r| {
            let mut row = vec![0u8; n];
            row[(r + e) % n] = 1;
            row
        })
        .collect()
}

/// Dense GF(2) matrix product.
pub fn gf2_matmul(a: &[Vec<u8>], b: &[Vec<u8>]) -> Vec<Vec<u8>> {
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|c| {
                    row.iter()
                        .zip(b)
                        .fold(0u8, |acc, (&x, brow)| acc ^ (x & brow[c]))
                })
                .collect()
        })
        .collect()
}

/// Dense GF(2^s) matrix product.
pub fn gf_matmul(field: &GaloisField, a: &[Vec<Symbol>], b: &[Vec<Symbol>]) -> Vec<Vec<Symbol>> {
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|c| {
                    row.iter()
                        .zip(b)
                        .fold(0, |acc, (&x, brow)| acc ^ field.mul(x, brow[c]))
                })
                .collect()
        })
        .collect()
}

/// General binary matrix in row-list form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseBinaryMatrix {
    n_cols: usize,
    rows: Vec<Vec<usize>>,
}

impl SparseBinaryMatrix {
    /// Column indices in each row are sorted and deduplicated.
    pub fn new(n_cols: usize, mut rows: Vec<Vec<usize>>) -> Result<Self> {
        for row in &mut rows {
            row.sort_unstable();
            row.dedup();
            if let Some(&c) = row.last() {
                if c >= n_cols {
                    return Err(Error::LengthMismatch {
                        what: "column index bound",
                        expected: n_cols,
                        found: c + 1,
                    });
                }
            }
        }
        Ok(Self { n_cols, rows })
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn row(&self, r: usize) -> &[usize] {
        &self.rows[r]
    }

    pub fn columns(&self) -> Vec<Vec<usize>> {
        let mut cols = vec![Vec::new(); self.n_cols];
        for (r, row) in self.rows.iter().enumerate() {
            for &c in row {
                cols[c].push(r);
            }
        }
        cols
    }

    pub fn edge_count(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        self.rows
            .iter()
            .map(|row| {
                let mut d = vec![0u8; self.n_cols];
                for &c in row {
                    d[c] = 1;
                }
                d
            })
            .collect()
    }
}

/// H_global = CPM(B): m×n array of n×n circulant permutation matrices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlobalParityCheck {
    m: usize,
    n: usize,
    /// Row-major m×n table of CPM exponents.
    exponents: Vec<usize>,
}

impl GlobalParityCheck {
    /// Wraps an arbitrary exponent table without structural validation.
    pub fn from_exponents(m: usize, n: usize, exponents: Vec<usize>) -> Result<Self> {
        if exponents.len() != m * n {
            return Err(Error::LengthMismatch {
                what: "exponent table",
                expected: m * n,
                found: exponents.len(),
            });
        }
        Ok(Self {
            m,
            n,
            exponents: exponents.into_iter().map(|e| e % n).collect(),
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn n_rows(&self) -> usize {
        self.m * self.n
    }

    pub fn n_cols(&self) -> usize {
        self.n * self.n
    }

    pub fn column_weight(&self) -> usize {
        self.m
    }

    pub fn row_weight(&self) -> usize {
        self.n
    }

    /// Number of ones, m·n².
    pub fn edge_count(&self) -> usize {
        self.m * self.n * self.n
    }

    #[inline]
    pub fn exponent(&self, i: usize, j: usize) -> usize {
        self.exponents[i * self.n + j]
    }

    /// Columns of row `i·n + r`, one per block column, ascending.
    pub fn row_support(&self, row: usize) -> impl Iterator<Item = usize> + '_ {
        let (i, r) = (row / self.n, row % self.n);
        (0..self.n).map(move |j| j * self.n + (r + self.exponent(i, j)) % self.n)
    }

    /// Rows of column `j·n + b`, one per block row, ascending.
    pub fn col_support(&self, col: usize) -> impl Iterator<Item = usize> + '_ {
        let (j, b) = (col / self.n, col % self.n);
        (0..self.m).map(move |i| i * self.n + (b + self.n - self.exponent(i, j)) % self.n)
    }

    pub fn to_sparse(&self) -> SparseBinaryMatrix {
        let rows = (0..self.n_rows()).map(|r| self.row_support(r).collect()).collect();
        SparseBinaryMatrix {
            n_cols: self.n_cols(),
            rows,
        }
    }

    pub fn to_dense(&self) -> Result<Vec<Vec<u8>>> {
        if self.n > DENSE_LIMIT {
            return Err(Error::ScaleGuard {
                n: self.n,
                limit: DENSE_LIMIT,
            });
        }
        Ok(self.to_sparse().to_dense())
    }

    /// Syndrome of a GF(2^s) word: entry (i·n + r) is the XOR of the word
    /// over the support of that row.
    pub fn syndrome_symbols(&self, word: &[Symbol]) -> Vec<Symbol> {
        (0..self.n_rows())
            .map(|r| self.row_support(r).fold(0, |acc, c| acc ^ word[c]))
            .collect()
    }
}

/// CPM dispersion of B (the k = 1 base matrix).
pub fn cpm_dispersion(b: &BaseMatrix) -> Result<GlobalParityCheck> {
    if b.hadamard_k() != 1 {
        return Err(Error::HadamardIndex {
            k: b.hadamard_k(),
            lo: 1,
            n: 2,
        });
    }
    let n = b.n();
    let mut seen = vec![false; n];
    for &l in b.roots() {
        if std::mem::replace(&mut seen[l % n], true) {
            return Err(Error::DuplicateRoots(l % n));
        }
    }
    let exponents = (0..b.m())
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| b.exponent(i, j))
        .collect();
    GlobalParityCheck::from_exponents(b.m(), n, exponents)
}

/// Outcome of the row-column constraint check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RcReport {
    /// First block quadruple (i1, i2, j1, j2) closing a 4-cycle.
    pub violation: Option<(usize, usize, usize, usize)>,
    /// Result of the pairwise support-intersection check, when n is small
    /// enough to run it.
    pub brute_force_passed: Option<bool>,
}

impl RcReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none() && self.brute_force_passed != Some(false)
    }

    pub fn methods_agree(&self) -> bool {
        self.brute_force_passed
            .is_none_or(|bf| bf == self.violation.is_none())
    }
}

/// Row-column constraint. Two rows in block rows i1 ≠ i2 share two columns
/// exactly when e(i1,j1) − e(i1,j2) ≡ e(i2,j1) − e(i2,j2) (mod n) for some
/// j1 ≠ j2; for CPM(B) that is (j1 − j2)(l_{i1} − l_{i2}) ≡ 0.
pub fn rc_check(h: &GlobalParityCheck) -> RcReport {
    let (m, n) = (h.m(), h.n());
    let mut violation = None;
    'outer: for i1 in 0..m {
        for i2 in i1 + 1..m {
            for j1 in 0..n {
                for j2 in j1 + 1..n {
                    let d1 = (h.exponent(i1, j1) + n - h.exponent(i1, j2)) % n;
                    let d2 = (h.exponent(i2, j1) + n - h.exponent(i2, j2)) % n;
                    if d1 == d2 {
                        violation = Some((i1, i2, j1, j2));
                        break 'outer;
                    }
                }
            }
        }
    }
    let brute_force_passed = (n <= DENSE_LIMIT).then(|| rc_violation(&h.to_sparse()).is_none());
    RcReport {
        violation,
        brute_force_passed,
    }
}

/// First pair of rows sharing two or more columns, by direct intersection.
pub fn rc_violation(h: &SparseBinaryMatrix) -> Option<(usize, usize)> {
    let rows = h.n_rows();
    let mut shared = vec![0u8; rows * rows];
    for col in h.columns() {
        for (a, &r1) in col.iter().enumerate() {
            for &r2 in &col[a + 1..] {
                let cell = &mut shared[r1 * rows + r2];
                *cell += 1;
                if *cell >= 2 {
                    return Some((r1, r2));
                }
            }
        }
    }
    None
}

/// Girth bound implied by the RC check: 6 when it holds, 4 otherwise.
pub fn girth_lower_bound(h: &GlobalParityCheck) -> usize {
    if rc_check(h).passed() {
        6
    } else {
        4
    }
}

/// Exact girth of the Tanner graph by breadth-first search from every node;
/// `None` if the graph is acyclic.
pub fn exact_girth(h: &SparseBinaryMatrix) -> Option<usize> {
    // nodes: checks 0..rows, variables rows..rows+cols
    let rows = h.n_rows();
    let total = rows + h.n_cols();
    let mut adj = vec![Vec::new(); total];
    for (r, row) in h.rows().iter().enumerate() {
        for &c in row {
            adj[r].push(rows + c);
            adj[rows + c].push(r);
        }
    }
    let mut best = usize::MAX;
    let mut dist = vec![usize::MAX; total];
    let mut parent = vec![usize::MAX; total];
    let mut queue = VecDeque::new();
    for src in 0..total {
        dist.iter_mut().for_each(|d| *d = usize::MAX);
        dist[src] = 0;
        parent[src] = usize::MAX;
        queue.clear();
        queue.push_back(src);
        while let Some(u) = queue.pop_front() {
            if 2 * dist[u] + 1 >= best {
                break;
            }
            for &v in &adj[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    parent[v] = u;
                    queue.push_back(v);
                } else if parent[u] != v {
                    best = best.min(dist[u] + dist[v] + 1);
                }
            }
        }
    }
    (best != usize::MAX).then_some(best)
}

/// Rank over GF(2) of a matrix given as row supports, by elimination on
/// bit-packed rows.
pub fn gf2_rank_rows(n_cols: usize, rows: impl IntoIterator<Item = Vec<usize>>) -> usize {
    let words = n_cols.div_ceil(64);
    let mut mat: Vec<Vec<u64>> = rows
        .into_iter()
        .map(|support| {
            let mut row = vec![0u64; words];
            for c in support {
                row[c / 64] ^= 1 << (c % 64);
            }
            row
        })
        .collect();
    let mut rank = 0;
    for col in 0..n_cols {
        if rank == mat.len() {
            break;
        }
        let (w, bit) = (col / 64, 1u64 << (col % 64));
        let Some(p) = (rank..mat.len()).find(|&r| mat[r][w] & bit != 0) else {
            continue;
        };
        mat.swap(rank, p);
        let (top, rest) = mat.split_at_mut(rank + 1);
        let pivot = &top[rank];
        for row in rest.iter_mut().filter(|row| row[w] & bit != 0) {
            for (x, &y) in row[w..].iter_mut().zip(&pivot[w..]) {
                *x ^= y;
            }
        }
        rank += 1;
    }
    rank
}

pub fn gf2_rank(h: &GlobalParityCheck) -> usize {
    gf2_rank_rows(h.n_cols(), (0..h.n_rows()).map(|r| h.row_support(r).collect()))
}

/// Dimension n² − rank of the global code.
pub fn global_dimension(h: &GlobalParityCheck) -> usize {
    h.n_cols() - gf2_rank(h)
}

/// Writes an alist file (1-based indices, zero padded to the maximum degree).
pub fn write_alist<W: Write>(h: &SparseBinaryMatrix, mut out: W) -> Result<()> {
    let cols = h.columns();
    let max_col = cols.iter().map(Vec::len).max().unwrap_or(0);
    let max_row = h.rows().iter().map(Vec::len).max().unwrap_or(0);
    let mut text = String::new();
    let join = |v: &mut dyn Iterator<Item = usize>| {
        v.map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
    };
    writeln!(text, "{} {}", h.n_cols(), h.n_rows()).unwrap();
    writeln!(text, "{max_col} {max_row}").unwrap();
    writeln!(text, "{}", join(&mut cols.iter().map(Vec::len))).unwrap();
    writeln!(text, "{}", join(&mut h.rows().iter().map(Vec::len))).unwrap();
    for (lists, width) in [(&cols[..], max_col), (h.rows(), max_row)] {
        for list in lists {
            let padded = list
                .iter()
                .map(|&x| x + 1)
                .chain(std::iter::repeat(0))
                .take(width);
            writeln!(text, "{}", join(&mut padded.into_iter())).unwrap();
        }
    }
    out.write_all(text.as_bytes())?;
    Ok(())
}

pub fn export_alist(h: &GlobalParityCheck, path: &std::path::Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_alist(&h.to_sparse(), std::io::BufWriter::new(file))
}

/// Reads an alist file. Row lists are authoritative; column lists are
/// checked against them.
pub fn read_alist<R: BufRead>(input: R) -> Result<SparseBinaryMatrix> {
    let mut numbers = Vec::new();
    for line in input.lines() {
        for tok in line?.split_whitespace() {
            numbers.push(
                tok.parse::<usize>()
                    .map_err(|_| Error::Alist(format!("not an integer: {tok:?}")))?,
            );
        }
    }
    let mut it = numbers.into_iter();
    let mut next = |what: &str| it.next().ok_or_else(|| Error::Alist(format!("truncated at {what}")));
    let n_cols = next("header")?;
    let n_rows = next("header")?;
    let max_col = next("max degrees")?;
    let max_row = next("max degrees")?;
    let col_deg = (0..n_cols).map(|_| next("column degrees")).collect::<Result<Vec<_>>>()?;
    let row_deg = (0..n_rows).map(|_| next("row degrees")).collect::<Result<Vec<_>>>()?;
    let mut read_lists = |count: usize, width: usize, degs: &[usize], what: &str| -> Result<Vec<Vec<usize>>> {
        (0..count)
            .map(|idx| {
                let mut list = Vec::with_capacity(degs[idx]);
                for _ in 0..width {
                    let v = next(what)?;
                    if v != 0 {
                        list.push(v - 1);
                    }
                }
                if list.len() != degs[idx] {
                    return Err(Error::Alist(format!(
                        "{what} {idx}: degree {} but {} entries",
                        degs[idx],
                        list.len()
                    )));
                }
                Ok(list)
            })
            .collect()
    };
    let cols = read_lists(n_cols, max_col, &col_deg, "column")?;
    let rows = read_lists(n_rows, max_row, &row_deg, "row")?;
    let h = SparseBinaryMatrix::new(n_cols, rows).map_err(|e| Error::Alist(e.to_string()))?;
    let mut derived = h.columns();
    let mut cols = cols;
    for c in cols.iter_mut().chain(derived.iter_mut()) {
        c.sort_unstable();
    }
    if derived != cols {
        return Err(Error::Alist("column lists disagree with row lists".into()));
    }
    Ok(h)
}

pub fn import_alist(path: &std::path::Path) -> Result<SparseBinaryMatrix> {
    read_alist(std::io::BufReader::new(std::fs::File::open(path)?))
}

/// Dense text dump, one row of 0/1 characters per line.
pub fn dense_dump(h: &GlobalParityCheck) -> Result<String> {
    Ok(h.to_dense()?
        .iter()
        .map(|row| row.iter().map(|&b| if b == 1 { '1' } else { '0' }).collect::<String>() + "\n")
        .collect())
}
