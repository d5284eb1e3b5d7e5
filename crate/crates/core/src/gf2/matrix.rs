use std::fmt;

use super::bitvec::{word_bits, words_for, xor_words, BitVec, WORD};

/// Dense bit-packed GF(2) matrix, row-major.
///
/// Empty shapes (`0 × n`, `n × 0`) are valid and behave as rank-zero maps.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        Self { rows, cols, stride, data: vec![0; rows * stride] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                if f(r, c) {
                    m.set(r, c, true);
                }
            }
        }
        m
    }

    pub fn from_rows(cols: usize, rows: &[BitVec]) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "row {i} has wrong length");
            m.row_words_mut(i).copy_from_slice(r.words());
        }
        m
    }

    /// Builds a matrix from `0`/`1` strings, one per row.
    pub fn from_dense(rows: &[&str]) -> Self {
        let vecs: Vec<BitVec> = rows.iter().map(|r| BitVec::from_str01(r)).collect();
        let cols = vecs.first().map_or(0, |v| v.len());
        Self::from_rows(cols, &vecs)
    }

    /// Builds a matrix from per-row column index lists.
    pub fn from_row_supports(rows: usize, cols: usize, supports: &[Vec<usize>]) -> Self {
        assert_eq!(supports.len(), rows);
        let mut m = Self::zeros(rows, cols);
        for (r, s) in supports.iter().enumerate() {
            for &c in s {
                m.toggle(r, c);
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of range {:?}", self.shape());
        (self.data[r * self.stride + c / WORD] >> (c % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of range {:?}", self.shape());
        let w = &mut self.data[r * self.stride + c / WORD];
        let mask = 1u64 << (c % WORD);
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    #[inline]
    pub fn toggle(&mut self, r: usize, c: usize) {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of range {:?}", self.shape());
        self.data[r * self.stride + c / WORD] ^= 1u64 << (c % WORD);
    }

    #[inline]
    pub fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.stride..(r + 1) * self.stride]
    }

    #[inline]
    pub(crate) fn row_words_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.data[r * self.stride..(r + 1) * self.stride]
    }

    pub fn row(&self, r: usize) -> BitVec {
        BitVec::from_words(self.cols, self.row_words(r).to_vec())
    }

    pub fn row_support(&self, r: usize) -> Vec<usize> {
        word_bits(self.row_words(r)).collect()
    }

    pub fn row_weight(&self, r: usize) -> usize {
        self.row_words(r).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn column(&self, c: usize) -> BitVec {
        BitVec::from_indices(self.rows, (0..self.rows).filter(|&r| self.get(r, c)))
    }

    pub fn column_weights(&self) -> Vec<usize> {
        let mut w = vec![0; self.cols];
        for r in 0..self.rows {
            for c in word_bits(self.row_words(r)) {
                w[c] += 1;
            }
        }
        w
    }

    pub fn row_vectors(&self) -> Vec<BitVec> {
        (0..self.rows).map(|r| self.row(r)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.data.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// `row[dst] ^= row[src]`.
    #[inline]
    pub(crate) fn xor_row_into(&mut self, src: usize, dst: usize) {
        debug_assert_ne!(src, dst);
        let s = self.stride;
        let (a, b) = if src < dst {
            let (lo, hi) = self.data.split_at_mut(dst * s);
            (&lo[src * s..(src + 1) * s], &mut hi[..s])
        } else {
            let (lo, hi) = self.data.split_at_mut(src * s);
            (&hi[..s], &mut lo[dst * s..(dst + 1) * s])
        };
        xor_words(b, a);
    }

    pub(crate) fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let s = self.stride;
        for k in 0..s {
            self.data.swap(a * s + k, b * s + k);
        }
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in word_bits(self.row_words(r)) {
                t.set(c, r, true);
            }
        }
        t
    }

    /// Matrix product over GF(2).
    pub fn mul(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.rows, "product shape mismatch {:?} x {:?}", self.shape(), other.shape());
        let mut out = BitMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            let (lo, hi) = (r * out.stride, (r + 1) * out.stride);
            for k in word_bits(self.row_words(r)) {
                xor_words(&mut out.data[lo..hi], other.row_words(k));
            }
        }
        out
    }

    /// `M xᵀ`: one bit per row.
    pub fn mul_vec(&self, x: &BitVec) -> BitVec {
        assert_eq!(self.cols, x.len(), "mul_vec length mismatch");
        let mut out = BitVec::zeros(self.rows);
        for r in 0..self.rows {
            let parity = self.row_words(r).iter().zip(x.words()).fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones());
            if parity & 1 == 1 {
                out.set(r, true);
            }
        }
        out
    }

    /// `x M`: XOR of the rows selected by `x`.
    pub fn vec_mul(&self, x: &BitVec) -> BitVec {
        assert_eq!(self.rows, x.len(), "vec_mul length mismatch");
        let mut out = BitVec::zeros(self.cols);
        for r in x.support() {
            xor_words(out.words_mut(), self.row_words(r));
        }
        out
    }

    pub fn add(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.shape(), other.shape(), "sum shape mismatch");
        let mut out = self.clone();
        xor_words(&mut out.data, &other.data);
        out
    }

    /// Reduced row echelon form. Returns the nonzero rows and their pivot columns.
    pub fn rref(&self) -> (BitMatrix, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        let rank = pivots.len();
        let mut out = BitMatrix::zeros(rank, self.cols);
        out.data.copy_from_slice(&m.data[..rank * m.stride]);
        (out, pivots)
    }

    /// Row-reduces in place; pivot search is first nonzero in column order.
    /// Returns pivot columns; rows `0..rank` hold the reduced basis.
    pub(crate) fn rref_in_place(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for c in 0..self.cols {
            if row == self.rows {
                break;
            }
            let (w, mask) = (c / WORD, 1u64 << (c % WORD));
            let Some(p) = (row..self.rows).find(|&r| self.data[r * self.stride + w] & mask != 0) else {
                continue;
            };
            self.swap_rows(p, row);
            for r in 0..self.rows {
                if r != row && self.data[r * self.stride + w] & mask != 0 {
                    self.xor_row_into(row, r);
                }
            }
            pivots.push(c);
            row += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        for c in 0..m.cols {
            if rank == m.rows {
                break;
            }
            let (w, mask) = (c / WORD, 1u64 << (c % WORD));
            let Some(p) = (rank..m.rows).find(|&r| m.data[r * m.stride + w] & mask != 0) else {
                continue;
            };
            m.swap_rows(p, rank);
            for r in rank + 1..m.rows {
                if m.data[r * m.stride + w] & mask != 0 {
                    m.xor_row_into(rank, r);
                }
            }
            rank += 1;
        }
        rank
    }

    /// Basis of `{x : M xᵀ = 0}`; has `cols - rank` vectors.
    pub fn kernel_basis(&self) -> Vec<BitVec> {
        let (r, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        (0..self.cols)
            .filter(|&f| !is_pivot[f])
            .map(|f| {
                let mut v = BitVec::zeros(self.cols);
                v.set(f, true);
                for (i, &p) in pivots.iter().enumerate() {
                    if r.get(i, f) {
                        v.set(p, true);
                    }
                }
                v
            })
            .collect()
    }

    pub fn kernel_matrix(&self) -> BitMatrix {
        BitMatrix::from_rows(self.cols, &self.kernel_basis())
    }

    /// Solves `M xᵀ = b`; returns one solution if consistent.
    pub fn solve(&self, b: &BitVec) -> Option<BitVec> {
        assert_eq!(b.len(), self.rows);
        // Augment with b as an extra column, then reduce.
        let mut aug = BitMatrix::zeros(self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in word_bits(self.row_words(r)) {
                aug.set(r, c, true);
            }
            if b.get(r) {
                aug.set(r, self.cols, true);
            }
        }
        let pivots = aug.rref_in_place();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = BitVec::zeros(self.cols);
        for (i, &p) in pivots.iter().enumerate() {
            if aug.get(i, self.cols) {
                x.set(p, true);
            }
        }
        Some(x)
    }

    /// Inverse of a square matrix, if nonsingular.
    pub fn inverse(&self) -> Option<BitMatrix> {
        assert_eq!(self.rows, self.cols, "inverse of a non-square matrix");
        let n = self.rows;
        let mut aug = BitMatrix::hstack(&[self, &BitMatrix::identity(n)]);
        let pivots = aug.rref_in_place();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        Some(BitMatrix::from_fn(n, n, |r, c| aug.get(r, n + c)))
    }

    /// True if `v` lies in the row space.
    pub fn row_space_contains(&self, v: &BitVec) -> bool {
        self.transpose().solve(v).is_some()
    }

    pub fn hstack(parts: &[&BitMatrix]) -> BitMatrix {
        let rows = parts.first().map_or(0, |m| m.rows);
        let cols = parts.iter().map(|m| m.cols).sum();
        let mut out = BitMatrix::zeros(rows, cols);
        let mut off = 0;
        for m in parts {
            assert_eq!(m.rows, rows, "hstack row mismatch");
            out.paste(m, 0, off);
            off += m.cols;
        }
        out
    }

    pub fn vstack(parts: &[&BitMatrix]) -> BitMatrix {
        let cols = parts.first().map_or(0, |m| m.cols);
        let rows = parts.iter().map(|m| m.rows).sum();
        let mut out = BitMatrix::zeros(rows, cols);
        let mut off = 0;
        for m in parts {
            assert_eq!(m.cols, cols, "vstack column mismatch");
            out.paste(m, off, 0);
            off += m.rows;
        }
        out
    }

    /// Writes `m` with its top-left corner at `(r0, c0)`, XOR-ing into existing entries.
    pub fn paste(&mut self, m: &BitMatrix, r0: usize, c0: usize) {
        assert!(r0 + m.rows <= self.rows && c0 + m.cols <= self.cols, "paste out of range");
        for r in 0..m.rows {
            for c in word_bits(m.row_words(r)) {
                self.toggle(r0 + r, c0 + c);
            }
        }
    }

    pub fn kron(&self, other: &BitMatrix) -> BitMatrix {
        let mut out = BitMatrix::zeros(self.rows * other.rows, self.cols * other.cols);
        for r in 0..self.rows {
            for c in word_bits(self.row_words(r)) {
                out.paste(other, r * other.rows, c * other.cols);
            }
        }
        out
    }

    pub fn select_rows(&self, rows: &[usize]) -> BitMatrix {
        let mut out = BitMatrix::zeros(rows.len(), self.cols);
        for (i, &r) in rows.iter().enumerate() {
            out.row_words_mut(i).copy_from_slice(self.row_words(r));
        }
        out
    }

    /// Column `c` moves to position `perm[c]`.
    pub fn permute_columns(&self, perm: &[usize]) -> BitMatrix {
        assert_eq!(perm.len(), self.cols);
        let mut out = BitMatrix::zeros(self.rows, self.cols);
        for r in 0..self.rows {
            for c in word_bits(self.row_words(r)) {
                out.set(r, perm[c], true);
            }
        }
        out
    }

    pub fn to_string01(&self) -> String {
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| if self.get(r, c) { '1' } else { '0' }).collect::<String>())
            .collect::<Vec<_>>()
            .join("\n")
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        write!(f, "{}", self.to_string01())
    }
}
