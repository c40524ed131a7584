//! Dense bit-packed linear algebra over GF(2).
//!
//! Vectors and matrices store 64 bits per word; Gaussian elimination works on
//! whole words with XOR row operations. Every higher layer (codes, stabilizer
//! bookkeeping, the samplers and the oracles) is built on these two types.
//!
//! Index 0 is the *most significant* position for the lexicographic order used
//! by [`lex_min_solution`] and by `Ord for BitVector`: vectors are compared bit
//! by bit starting at index 0, and `0 < 1`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};

const WORD: usize = 64;

#[inline]
fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

/// A fixed-length vector over GF(2). Bits past `len` in the last word are kept zero.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = Self {
            len,
            words: vec![u64::MAX; words_for(len)],
        };
        v.clear_tail();
        v
    }

    /// Vector with the given indices set.
    ///
    /// # Panics
    ///
    /// Panics if an index is `>= len`.
    pub fn from_indices(len: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zeros(len);
        for i in indices {
            v.set(i, true);
        }
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Little-endian mask encoding: bit `i` of `mask` is entry `i`.
    ///
    /// # Panics
    ///
    /// Panics if `len > 64` or `mask` has bits at or above `len`.
    pub fn from_mask(len: usize, mask: u64) -> Self {
        assert!(len <= WORD, "mask encoding supports at most 64 bits");
        assert!(
            len == WORD || mask >> len == 0,
            "mask has bits beyond length {len}"
        );
        Self {
            len,
            words: if len == 0 { Vec::new() } else { vec![mask] },
        }
    }

    /// Inverse of [`BitVector::from_mask`]; `None` when `len > 64`.
    pub fn to_mask(&self) -> Option<u64> {
        match self.words.len() {
            0 => Some(0),
            1 => Some(self.words[0]),
            _ => None,
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// # Panics
    ///
    /// Panics if `i >= len`.
    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    pub fn try_get(&self, i: usize) -> Option<bool> {
        (i < self.len).then(|| self.get(i))
    }

    /// # Panics
    ///
    /// Panics if `i >= len`.
    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        let bit = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= bit;
        } else {
            self.words[i / WORD] &= !bit;
        }
    }

    /// # Panics
    ///
    /// Panics if `i >= len`.
    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    /// `self ^= other`.
    ///
    /// # Panics
    ///
    /// Panics on length mismatch.
    #[inline]
    pub fn xor_assign(&mut self, other: &BitVector) {
        assert_eq!(self.len, other.len, "xor of vectors with different lengths");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &BitVector) -> BitVector {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    pub fn and(&self, other: &BitVector) -> BitVector {
        assert_eq!(self.len, other.len, "and of vectors with different lengths");
        BitVector {
            len: self.len,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
        }
    }

    /// Complement within `0..len`.
    pub fn not(&self) -> BitVector {
        let mut out = BitVector {
            len: self.len,
            words: self.words.iter().map(|w| !w).collect(),
        };
        out.clear_tail();
        out
    }

    /// Inner product over GF(2).
    #[inline]
    pub fn dot(&self, other: &BitVector) -> bool {
        assert_eq!(self.len, other.len, "dot of vectors with different lengths");
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum::<u32>()
            & 1
            == 1
    }

    /// Hamming weight.
    #[inline]
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// `true` when every set bit of `self` is also set in `other`.
    pub fn is_subset_of(&self, other: &BitVector) -> bool {
        assert_eq!(self.len, other.len);
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    /// Lowest set index.
    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * WORD + w.trailing_zeros() as usize)
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let tz = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(wi * WORD + tz)
            })
        })
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.get(i)).collect()
    }

    /// Concatenation `self ‖ other`.
    pub fn concat(&self, other: &BitVector) -> BitVector {
        let mut out = BitVector::zeros(self.len + other.len);
        for i in self.iter_ones() {
            out.set(i, true);
        }
        for i in other.iter_ones() {
            out.set(self.len + i, true);
        }
        out
    }

    /// Entries `start..start + len`.
    pub fn slice(&self, start: usize, len: usize) -> BitVector {
        assert!(start + len <= self.len, "slice out of range");
        BitVector::from_indices(
            len,
            self.iter_ones()
                .filter(|&i| i >= start && i < start + len)
                .map(|i| i - start),
        )
    }

    fn clear_tail(&mut self) {
        let r = self.len % WORD;
        if r != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << r) - 1;
            }
        }
    }

    /// Uniformly random vector of length `len`.
    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut v = Self {
            len,
            words: (0..words_for(len)).map(|_| rng.gen::<u64>()).collect(),
        };
        v.clear_tail();
        v
    }
}

impl Ord for BitVector {
    /// Lexicographic with index 0 most significant and `0 < 1`; shorter vectors first.
    fn cmp(&self, other: &Self) -> Ordering {
        self.len.cmp(&other.len).then_with(|| {
            for (a, b) in self.words.iter().zip(&other.words) {
                let diff = a ^ b;
                if diff != 0 {
                    let bit = diff.trailing_zeros();
                    return if (a >> bit) & 1 == 0 {
                        Ordering::Less
                    } else {
                        Ordering::Greater
                    };
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for BitVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

impl FromStr for BitVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut v = BitVector::zeros(s.len());
        for (i, ch) in s.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => v.set(i, true),
                other => return Err(Error::parse(1, format!("unexpected character {other:?}"))),
            }
        }
        Ok(v)
    }
}

/// Row-major bit matrix over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    cols: usize,
    rows: Vec<BitVector>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            cols,
            rows: vec![BitVector::zeros(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            cols: n,
            rows: (0..n).map(|i| BitVector::from_indices(n, [i])).collect(),
        }
    }

    pub fn from_rows(rows: Vec<BitVector>, cols: usize) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch {
                context: "matrix row length",
                expected: cols,
                found: bad.len(),
            });
        }
        Ok(Self { cols, rows })
    }

    /// Build from 0/1 strings, one per row.
    pub fn from_bit_rows(rows: &[&str]) -> Result<Self> {
        let parsed = rows
            .iter()
            .map(|r| r.parse::<BitVector>())
            .collect::<Result<Vec<_>>>()?;
        let cols = parsed.first().map_or(0, BitVector::len);
        Self::from_rows(parsed, cols)
    }

    /// Matrix whose `j`-th column is `columns[j]`; all columns must have length `rows`.
    pub fn from_columns(rows: usize, columns: &[BitVector]) -> Result<Self> {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            if col.len() != rows {
                return Err(Error::DimensionMismatch {
                    context: "matrix column length",
                    expected: rows,
                    found: col.len(),
                });
            }
            for i in col.iter_ones() {
                m.rows[i].set(j, true);
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn row(&self, i: usize) -> &BitVector {
        &self.rows[i]
    }

    pub fn row_vectors(&self) -> &[BitVector] {
        &self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i].get(j)
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        self.rows[i].set(j, value);
    }

    pub fn column(&self, j: usize) -> BitVector {
        assert!(j < self.cols, "column index {j} out of range");
        BitVector::from_indices(
            self.rows(),
            self.rows.iter().enumerate().filter(|(_, r)| r.get(j)).map(|(i, _)| i),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(BitVector::is_zero)
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows());
        for (i, row) in self.rows.iter().enumerate() {
            for j in row.iter_ones() {
                t.rows[j].set(i, true);
            }
        }
        t
    }

    /// `self · other`.
    pub fn mul(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.rows() {
            return Err(Error::DimensionMismatch {
                context: "matrix product",
                expected: self.cols,
                found: other.rows(),
            });
        }
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut acc = BitVector::zeros(other.cols);
                for k in r.iter_ones() {
                    acc.xor_assign(&other.rows[k]);
                }
                acc
            })
            .collect();
        Ok(BitMatrix {
            cols: other.cols,
            rows,
        })
    }

    /// `self · v`.
    pub fn mul_vec(&self, v: &BitVector) -> Result<BitVector> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                context: "matrix-vector product",
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok(BitVector::from_indices(
            self.rows(),
            self.rows.iter().enumerate().filter(|(_, r)| r.dot(v)).map(|(i, _)| i),
        ))
    }

    /// `selfᵀ · v`: the XOR of the rows selected by `v`.
    pub fn transpose_mul_vec(&self, v: &BitVector) -> Result<BitVector> {
        if v.len() != self.rows() {
            return Err(Error::DimensionMismatch {
                context: "transposed matrix-vector product",
                expected: self.rows(),
                found: v.len(),
            });
        }
        let mut acc = BitVector::zeros(self.cols);
        for i in v.iter_ones() {
            acc.xor_assign(&self.rows[i]);
        }
        Ok(acc)
    }

    /// Rows indexed by `indices`, stacked in ascending index order.
    pub fn row_submatrix(&self, indices: &[usize]) -> Result<BitMatrix> {
        let mut sorted = indices.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if let Some(&bad) = sorted.iter().find(|&&i| i >= self.rows()) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                len: self.rows(),
            });
        }
        Ok(BitMatrix {
            cols: self.cols,
            rows: sorted.into_iter().map(|i| self.rows[i].clone()).collect(),
        })
    }

    /// Rows selected by a membership vector over the row indices.
    pub fn row_submatrix_mask(&self, subset: &BitVector) -> Result<BitMatrix> {
        if subset.len() != self.rows() {
            return Err(Error::DimensionMismatch {
                context: "row subset",
                expected: self.rows(),
                found: subset.len(),
            });
        }
        Ok(BitMatrix {
            cols: self.cols,
            rows: subset.iter_ones().map(|i| self.rows[i].clone()).collect(),
        })
    }

    /// `[self | other]`.
    pub fn hstack(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.rows() != other.rows() {
            return Err(Error::DimensionMismatch {
                context: "horizontal stack",
                expected: self.rows(),
                found: other.rows(),
            });
        }
        Ok(BitMatrix {
            cols: self.cols + other.cols,
            rows: self
                .rows
                .iter()
                .zip(&other.rows)
                .map(|(a, b)| a.concat(b))
                .collect(),
        })
    }

    /// `[self; other]`.
    pub fn vstack(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                context: "vertical stack",
                expected: self.cols,
                found: other.cols,
            });
        }
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Ok(BitMatrix {
            cols: self.cols,
            rows,
        })
    }

    pub fn rank(&self) -> usize {
        rank(self)
    }

    pub fn echelon(&self) -> Echelon {
        Echelon::new(self)
    }

    /// Text format: `rows cols` on the first line, then one 0/1 string per row.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.rows(), self.cols);
        for r in &self.rows {
            out.push_str(&r.to_string());
            out.push('\n');
        }
        out
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{} [", self.rows(), self.cols)?;
        for r in &self.rows {
            writeln!(f, "  {r}")?;
        }
        write!(f, "]")
    }
}

impl FromStr for BitMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hl, header) = lines
            .next()
            .ok_or_else(|| Error::parse(1, "missing `rows cols` header"))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::parse(hl, e.to_string()))?;
        let [rows, cols] = dims[..] else {
            return Err(Error::parse(hl, "header must be `rows cols`"));
        };
        let mut out = Vec::with_capacity(rows);
        for (ln, line) in lines {
            let v: BitVector = line.parse().map_err(|_| Error::parse(ln, "row must be a 0/1 string"))?;
            if v.len() != cols {
                return Err(Error::parse(ln, format!("row has {} bits, expected {cols}", v.len())));
            }
            out.push(v);
        }
        if out.len() != rows {
            return Err(Error::parse(hl, format!("expected {rows} rows, found {}", out.len())));
        }
        BitMatrix::from_rows(out, cols)
    }
}

/// Reduced row echelon form of a matrix.
///
/// `rows[i]` has its pivot at column `pivots[i]` and every other reduced row is
/// zero in that column. Pivots are strictly increasing.
#[derive(Clone, Debug)]
pub struct Echelon {
    cols: usize,
    rows: Vec<BitVector>,
    pivots: Vec<usize>,
}

/// In-place RREF over the first `pivot_limit` columns. Returns the pivot
/// columns; the first `pivots.len()` rows are the pivot rows afterwards.
fn reduce_rows(rows: &mut [BitVector], pivot_limit: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..pivot_limit {
        if r == rows.len() {
            break;
        }
        let (w, b) = (col / WORD, col % WORD);
        let Some(p) = (r..rows.len()).find(|&i| (rows[i].words[w] >> b) & 1 == 1) else {
            continue;
        };
        rows.swap(r, p);
        let (head, tail) = rows.split_at_mut(r);
        let (pivot_row, rest) = tail.split_first_mut().expect("pivot row exists");
        for other in head.iter_mut().chain(rest.iter_mut()) {
            if (other.words[w] >> b) & 1 == 1 {
                // Columns before `col` are already reduced, so start at word `w`.
                for (x, y) in other.words[w..].iter_mut().zip(&pivot_row.words[w..]) {
                    *x ^= y;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    pivots
}

impl Echelon {
    pub fn new(m: &BitMatrix) -> Self {
        let mut rows = m.rows.clone();
        let pivots = reduce_rows(&mut rows, m.cols);
        rows.truncate(pivots.len());
        Self {
            cols: m.cols,
            rows,
            pivots,
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Nonzero rows of the reduced form; a basis of the row space.
    pub fn basis(&self) -> &[BitVector] {
        &self.rows
    }

    pub fn free_columns(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.cols];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.cols).filter(|&c| !is_pivot[c]).collect()
    }

    /// One kernel vector per free column `f`, with `v[f] = 1` and zeros at the other free columns.
    pub fn kernel_basis(&self) -> Vec<BitVector> {
        self.free_columns()
            .into_iter()
            .map(|f| {
                let mut v = BitVector::zeros(self.cols);
                v.set(f, true);
                for (row, &p) in self.rows.iter().zip(&self.pivots) {
                    if row.get(f) {
                        v.set(p, true);
                    }
                }
                v
            })
            .collect()
    }

    pub fn kernel_dim(&self) -> usize {
        self.cols - self.rank()
    }

    /// Residual of `v` after eliminating against the pivot rows; zero iff `v` is in the row space.
    pub fn reduce(&self, v: &BitVector) -> BitVector {
        let mut r = v.clone();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if r.get(p) {
                r.xor_assign(row);
            }
        }
        r
    }

    pub fn contains(&self, v: &BitVector) -> bool {
        self.reduce(v).is_zero()
    }

    /// Uniform kernel element: random free coordinates, pivots solved from them.
    pub fn sample_kernel<R: Rng + ?Sized>(&self, rng: &mut R) -> BitVector {
        let mut v = BitVector::zeros(self.cols);
        for f in self.free_columns() {
            if rng.gen::<bool>() {
                v.set(f, true);
            }
        }
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if row.dot(&v) {
                v.set(p, true);
            }
        }
        v
    }
}

pub fn rank(m: &BitMatrix) -> usize {
    let mut rows = m.rows.clone();
    reduce_rows(&mut rows, m.cols).len()
}

/// Basis of `{x : Mx = 0}`; a 0-row matrix has the full space as kernel.
pub fn kernel_basis(m: &BitMatrix) -> Vec<BitVector> {
    Echelon::new(m).kernel_basis()
}

pub fn kernel_dim(m: &BitMatrix) -> usize {
    m.cols() - rank(m)
}

/// Uniform random element of `ker(M)`.
pub fn uniform_kernel_sample<R: Rng + ?Sized>(m: &BitMatrix, rng: &mut R) -> BitVector {
    Echelon::new(m).sample_kernel(rng)
}

/// Basis of the row space in reduced echelon form (pivot = lowest set index).
pub fn row_space_basis(vectors: &[BitVector], len: usize) -> Vec<BitVector> {
    let mut rows = vectors.to_vec();
    let pivots = reduce_rows(&mut rows, len);
    rows.truncate(pivots.len());
    rows
}

/// Basis of `col(M)` as vectors of length `rows(M)`.
pub fn column_space_basis(m: &BitMatrix) -> Vec<BitVector> {
    row_space_basis(m.transpose().row_vectors(), m.rows())
}

/// Lexicographically smallest `x` with `Mx = b` (index 0 most significant, `0 < 1`),
/// or `None` when the system has no solution.
pub fn lex_min_solution(m: &BitMatrix, b: &BitVector) -> Result<Option<BitVector>> {
    if b.len() != m.rows() {
        return Err(Error::DimensionMismatch {
            context: "right-hand side",
            expected: m.rows(),
            found: b.len(),
        });
    }
    let augmented = m.hstack(&BitMatrix::from_columns(m.rows(), std::slice::from_ref(b))?)?;
    let mut rows = augmented.rows;
    let pivots = reduce_rows(&mut rows, m.cols());
    let rhs = m.cols();
    if rows[pivots.len()..].iter().any(|r| r.get(rhs)) {
        return Ok(None);
    }
    let mut x = BitVector::zeros(m.cols());
    for (row, &p) in rows.iter().zip(&pivots) {
        if row.get(rhs) {
            x.set(p, true);
        }
    }
    // In a reduced kernel basis every nonzero kernel vector's first set bit is a
    // pivot, so clearing all pivot bits of `x` yields the smallest coset element.
    let kernel = row_space_basis(&kernel_basis(m), m.cols());
    for k in &kernel {
        let lead = k.first_one().expect("basis vectors are nonzero");
        if x.get(lead) {
            x.xor_assign(k);
        }
    }
    Ok(Some(x))
}

/// `dim(ker A ∩ col B)`, computed as `dim ker(AB) − dim ker(B)`.
pub fn intersection_dim(a: &BitMatrix, b: &BitMatrix) -> Result<usize> {
    let ab = a.mul(b)?;
    Ok(kernel_dim(&ab) - kernel_dim(b))
}

/// Matrix whose columns form a basis of `col(h)⊥ = ker(hᵀ)`; it has
/// `rows(h) − rank(h)` columns.
pub fn orthogonal_complement_generator(h: &BitMatrix) -> BitMatrix {
    let basis = kernel_basis(&h.transpose());
    BitMatrix::from_columns(h.rows(), &basis).expect("kernel vectors have length rows(h)")
}

/// All `2^k` elements of the span of `basis`, in Gray-code order starting at zero.
pub fn span(basis: &[BitVector], len: usize) -> Vec<BitVector> {
    assert!(basis.len() < 32, "span of dimension {} is too large to enumerate", basis.len());
    let mut out = Vec::with_capacity(1 << basis.len());
    let mut cur = BitVector::zeros(len);
    out.push(cur.clone());
    for i in 1u64..(1u64 << basis.len()) {
        cur.xor_assign(&basis[i.trailing_zeros() as usize]);
        out.push(cur.clone());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn k3() -> BitMatrix {
        BitMatrix::from_bit_rows(&["110", "011", "101"]).unwrap()
    }

    fn all_vectors(n: usize) -> impl Iterator<Item = BitVector> {
        (0..1u64 << n).map(move |m| BitVector::from_mask(n, m))
    }

    #[test]
    fn bitvector_basics() {
        let mut v = BitVector::zeros(130);
        v.set(0, true);
        v.set(64, true);
        v.set(129, true);
        assert_eq!(v.weight(), 3);
        assert_eq!(v.iter_ones().collect::<Vec<_>>(), vec![0, 64, 129]);
        assert!(v.xor(&v).is_zero());
        assert_eq!(v.try_get(130), None);
        assert_eq!(BitVector::ones(70).weight(), 70);
        assert_eq!(BitVector::ones(70).not().weight(), 0);
        assert_eq!("0110".parse::<BitVector>().unwrap().to_string(), "0110");
    }

    #[test]
    #[should_panic]
    fn out_of_range_access_panics() {
        BitVector::zeros(5).get(5);
    }

    #[test]
    fn lexicographic_order_puts_index_zero_first() {
        let a: BitVector = "01".parse().unwrap();
        let b: BitVector = "10".parse().unwrap();
        assert!(a < b);
        let c: BitVector = "0000000000000000000000000000000000000000000000000000000000000000001".parse().unwrap();
        let d: BitVector = "0000000000000000000000000000000000000000000000000000000000000000010".parse().unwrap();
        assert!(c < d);
    }

    #[test]
    fn rank_examples() {
        assert_eq!(BitMatrix::identity(3).rank(), 3);
        assert_eq!(BitMatrix::zeros(2, 5).rank(), 0);
        assert_eq!(k3().rank(), 2);
    }

    #[test]
    fn kernel_examples() {
        let m = BitMatrix::from_bit_rows(&["11"]).unwrap();
        assert_eq!(kernel_basis(&m), vec!["11".parse().unwrap()]);
        assert!(kernel_basis(&BitMatrix::identity(2)).is_empty());
        assert_eq!(kernel_basis(&k3()), vec!["111".parse().unwrap()]);
        // zero-row matrix: the kernel is everything
        assert_eq!(kernel_basis(&BitMatrix::zeros(0, 4)).len(), 4);
    }

    #[test]
    fn uniform_kernel_sample_is_balanced() {
        let m = BitMatrix::from_bit_rows(&["11"]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let draws = 100_000;
        let mut ones = 0usize;
        for _ in 0..draws {
            let v = uniform_kernel_sample(&m, &mut rng);
            assert!(m.mul_vec(&v).unwrap().is_zero());
            if v.get(0) {
                ones += 1;
            }
        }
        let freq = ones as f64 / draws as f64;
        assert!((freq - 0.5).abs() < 0.01, "frequency {freq}");

        let full = BitMatrix::identity(4);
        assert!(uniform_kernel_sample(&full, &mut rng).is_zero());
    }

    #[test]
    fn uniform_kernel_sample_covers_whole_kernel() {
        // kernel of dimension 2 inside GF(2)^4
        let m = BitMatrix::from_bit_rows(&["1100", "0011"]).unwrap();
        let seen: std::collections::BTreeSet<BitVector> = (0..200)
            .map(|s| uniform_kernel_sample(&m, &mut ChaCha8Rng::seed_from_u64(s)))
            .collect();
        assert_eq!(seen.len(), 4);
    }

    #[test]
    fn lex_min_examples() {
        let b: BitVector = "101".parse().unwrap();
        assert_eq!(lex_min_solution(&BitMatrix::identity(3), &b).unwrap(), Some(b));
        let m = BitMatrix::from_bit_rows(&["11"]).unwrap();
        assert_eq!(
            lex_min_solution(&m, &"1".parse().unwrap()).unwrap(),
            Some("01".parse().unwrap())
        );
        // both rows equal, so (1,0) is unreachable
        let z = BitMatrix::from_bit_rows(&["10", "10"]).unwrap();
        assert_eq!(lex_min_solution(&z, &"10".parse().unwrap()).unwrap(), None);
        assert!(lex_min_solution(&z, &"1".parse().unwrap()).is_err());
    }

    #[test]
    fn intersection_examples() {
        let a = BitMatrix::from_bit_rows(&["11"]).unwrap();
        assert_eq!(intersection_dim(&a, &BitMatrix::identity(2)).unwrap(), 1);
        assert_eq!(intersection_dim(&a, &BitMatrix::zeros(2, 3)).unwrap(), 0);
        assert!(intersection_dim(&a, &BitMatrix::identity(3)).is_err());
    }

    #[test]
    fn complement_generator_examples() {
        assert_eq!(orthogonal_complement_generator(&BitMatrix::identity(4)).cols(), 0);
        let g = orthogonal_complement_generator(&k3());
        assert_eq!(g.cols(), 1);
        assert_eq!(g.column(0), "111".parse().unwrap());
    }

    #[test]
    fn row_submatrix_examples() {
        let m = k3();
        assert_eq!(m.row_submatrix(&[0, 1, 2]).unwrap(), m);
        let empty = m.row_submatrix(&[]).unwrap();
        assert_eq!((empty.rows(), empty.cols()), (0, 3));
        assert_eq!(kernel_dim(&empty), 3);
        assert_eq!(kernel_dim(&m.row_submatrix(&[0]).unwrap()), 2);
        assert!(m.row_submatrix(&[3]).is_err());
    }

    #[test]
    fn text_format_round_trip() {
        let m = k3();
        let parsed: BitMatrix = m.to_text().parse().unwrap();
        assert_eq!(parsed, m);
        assert!("2 2\n10\n".parse::<BitMatrix>().is_err());
        assert!("1 2\n1x\n".parse::<BitMatrix>().is_err());
    }

    fn arb_matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = BitMatrix> {
        (0..=max_rows, 1..=max_cols).prop_flat_map(|(r, c)| {
            proptest::collection::vec(proptest::collection::vec(any::<bool>(), c), r).prop_map(move |rows| {
                BitMatrix::from_rows(rows.iter().map(|b| BitVector::from_bools(b)).collect(), c).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn rank_nullity(m in arb_matrix(9, 9)) {
            prop_assert_eq!(kernel_dim(&m) + m.rank(), m.cols());
            prop_assert_eq!(m.rank(), m.transpose().rank());
            prop_assert!(m.rank() <= m.rows().min(m.cols()));
            prop_assert_eq!(m.transpose().transpose(), m);
        }

        #[test]
        fn kernel_basis_is_independent_and_annihilated(m in arb_matrix(9, 9)) {
            let basis = kernel_basis(&m);
            for v in &basis {
                prop_assert!(m.mul_vec(v).unwrap().is_zero());
            }
            prop_assert_eq!(row_space_basis(&basis, m.cols()).len(), basis.len());
        }

        #[test]
        fn intersection_matches_enumeration(a in arb_matrix(8, 8), seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let bcols = rng.gen_range(1..=8);
            let b = BitMatrix::from_rows(
                (0..a.cols()).map(|_| BitVector::random(bcols, &mut rng)).collect(),
                bcols,
            ).unwrap();
            // brute force: distinct vectors y = Bz that also satisfy Ay = 0
            let image: std::collections::BTreeSet<BitVector> = all_vectors(bcols)
                .map(|z| b.mul_vec(&z).unwrap())
                .filter(|y| a.mul_vec(y).unwrap().is_zero())
                .collect();
            let expected = image.len().trailing_zeros() as usize;
            prop_assert!(image.len().is_power_of_two());
            prop_assert_eq!(intersection_dim(&a, &b).unwrap(), expected);
        }

        #[test]
        fn lex_min_is_minimal(m in arb_matrix(8, 10), seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x0 = BitVector::random(m.cols(), &mut rng);
            let b = m.mul_vec(&x0).unwrap();
            let best = all_vectors(m.cols())
                .filter(|x| m.mul_vec(x).unwrap() == b)
                .min()
                .unwrap();
            prop_assert_eq!(lex_min_solution(&m, &b).unwrap(), Some(best));
        }

        #[test]
        fn complement_generator_dimension(m in arb_matrix(9, 9)) {
            let g = orthogonal_complement_generator(&m);
            prop_assert_eq!(g.cols(), m.rows() - m.rank());
            prop_assert!(m.transpose().mul(&g).unwrap().is_zero());
        }
    }
}
