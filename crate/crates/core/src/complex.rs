//! Bounded chain complexes of GF(2) matrices and the multi-block (MBC)
//! construction.
//!
//! A D-complex is stored as its boundary matrices `Q_1..Q_D`, where `Q_j`
//! has shape `n_{j-1} × n_j` and `Q_j Q_{j+1} = 0`.
//!
//! Sign convention: over GF(2) the factors `(-1)^i` of the tensor-product
//! boundary and of the MBC recursion are all `+1`. A port to odd
//! characteristic would reintroduce them on the `I ⊗ N` blocks of the
//! interior recursion step, on the trailing `N` block of the last step and on
//! the second term of the tensor-product boundary.

use crate::error::{Error, Result};
use crate::gf2::BitMatrix;
use crate::group::{AbelianGroup, GroupAlgebraElement};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ChainComplex {
    dims: Vec<usize>,
    boundaries: Vec<BitMatrix>,
}

impl ChainComplex {
    /// Builds a complex from `[Q_1, …, Q_D]`, checking shapes and `Q_j Q_{j+1} = 0`.
    pub fn new(boundaries: Vec<BitMatrix>) -> Result<Self> {
        if boundaries.is_empty() {
            return Err(Error::InvalidArgument("a complex needs at least one boundary; use ChainComplex::point".into()));
        }
        let mut dims = vec![boundaries[0].rows()];
        for (j, q) in boundaries.iter().enumerate() {
            if q.rows() != dims[j] {
                return Err(Error::Shape(format!("Q_{} has {} rows, expected n_{} = {}", j + 1, q.rows(), j, dims[j])));
            }
            dims.push(q.cols());
        }
        for j in 1..boundaries.len() {
            if !boundaries[j - 1].mul(&boundaries[j]).is_zero() {
                return Err(Error::Internal(format!("Q_{j} Q_{} != 0", j + 1)));
            }
        }
        Ok(Self { dims, boundaries })
    }

    /// The 0-complex with a single space of dimension `n0`.
    pub fn point(n0: usize) -> Self {
        Self { dims: vec![n0], boundaries: Vec::new() }
    }

    /// The 1-complex `K(A)`.
    pub fn one_complex(a: BitMatrix) -> Self {
        Self::new(vec![a]).expect("a single boundary is always a complex")
    }

    /// Length `D`.
    pub fn length(&self) -> usize {
        self.boundaries.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn boundaries(&self) -> &[BitMatrix] {
        &self.boundaries
    }

    /// `Q_j` for `1 ≤ j ≤ D`.
    pub fn boundary(&self, j: usize) -> Result<&BitMatrix> {
        if j == 0 || j > self.length() {
            return Err(Error::LevelOutOfRange { level: j, min: 1, max: self.length() });
        }
        Ok(&self.boundaries[j - 1])
    }

    /// Rank of `Q_j`, zero for the implicit maps at `j = 0` and `j = D + 1`.
    pub fn boundary_rank(&self, j: usize) -> usize {
        if j == 0 || j > self.length() {
            0
        } else {
            self.boundaries[j - 1].rank()
        }
    }

    /// `k_j = n_j − rank Q_j − rank Q_{j+1}`.
    pub fn homology_rank(&self, j: usize) -> Result<usize> {
        if j > self.length() {
            return Err(Error::LevelOutOfRange { level: j, min: 0, max: self.length() });
        }
        Ok(self.dims[j] - self.boundary_rank(j) - self.boundary_rank(j + 1))
    }

    pub fn homology_ranks(&self) -> Vec<usize> {
        (0..=self.length()).map(|j| self.homology_rank(j).expect("in range")).collect()
    }

    /// Transposed matrices in reverse order.
    pub fn co_complex(&self) -> ChainComplex {
        if self.boundaries.is_empty() {
            return self.clone();
        }
        ChainComplex::new(self.boundaries.iter().rev().map(BitMatrix::transpose).collect()).expect("transpose preserves ∂∂=0")
    }
}

/// Subset labels of the blocks at each level of `MBC(A_1..A_D)`.
///
/// Level `j` lists `C(D, j)` subsets of `{0..D-1}` as bit masks, in the order
/// produced by the recursion: adding block `N` (index `D`) gives level `j` as
/// `{N} ∪ S` for each `S` of the old level `j − 1`, followed by the old level `j`.
/// Block `(T, S)` of `Q_j` is `A_i` when `S = T ∪ {i}` and zero otherwise.
pub fn mbc_block_layout(d: usize) -> Vec<Vec<u32>> {
    assert!((1..=31).contains(&d));
    let mut levels: Vec<Vec<u32>> = vec![vec![0], vec![1]];
    for n in 1..d {
        let bit = 1u32 << n;
        let mut next = Vec::with_capacity(n + 2);
        for j in 0..=n + 1 {
            let mut level: Vec<u32> = if j > 0 { levels[j - 1].iter().map(|s| s | bit).collect() } else { Vec::new() };
            if j <= n {
                level.extend(&levels[j]);
            }
            next.push(level);
        }
        levels = next;
    }
    levels
}

/// `MBC(A_1, …, A_D)` from pairwise commuting square blocks of equal size.
///
/// Built by the recursion `R_1 = [N, Q_1]`,
/// `R_i = [[Q_{i-1}, 0], [I(m_{i-1}) ⊗ N, Q_i]]`, `R_{D+1} = [Q_D; N]`,
/// starting from the 1-complex `K(A_1)` and appending each block as `N`.
pub fn mbc_build(blocks: &[BitMatrix]) -> Result<ChainComplex> {
    let Some(first) = blocks.first() else {
        return Err(Error::InvalidArgument("MBC needs at least one block".into()));
    };
    let l = first.rows();
    for (i, b) in blocks.iter().enumerate() {
        if b.shape() != (l, l) {
            return Err(Error::Shape(format!("block {} has shape {:?}, expected ({l}, {l})", i + 1, b.shape())));
        }
    }
    for i in 0..blocks.len() {
        for j in i + 1..blocks.len() {
            if blocks[i].mul(&blocks[j]) != blocks[j].mul(&blocks[i]) {
                return Err(Error::NonCommuting(i + 1, j + 1));
            }
        }
    }
    let mut q: Vec<BitMatrix> = vec![first.clone()];
    for n in &blocks[1..] {
        let d = q.len();
        let m = |j: usize| binomial(d, j);
        let mut r = Vec::with_capacity(d + 1);
        r.push(BitMatrix::hstack(&[n, &q[0]]));
        for i in 2..=d {
            let (upper, lower) = (&q[i - 2], &q[i - 1]);
            let ident_n = BitMatrix::identity(m(i - 1)).kron(n);
            let mut ri = BitMatrix::zeros(upper.rows() + ident_n.rows(), upper.cols() + lower.cols());
            ri.paste(upper, 0, 0);
            ri.paste(&ident_n, upper.rows(), 0);
            ri.paste(lower, upper.rows(), upper.cols());
            r.push(ri);
        }
        r.push(BitMatrix::vstack(&[&q[d - 1], n]));
        q = r;
    }
    ChainComplex::new(q)
}

/// `AMC(a_1, …, a_D)`: the MBC complex of the regular representations.
pub fn amc_build(group: &AbelianGroup, elements: &[GroupAlgebraElement]) -> Result<ChainComplex> {
    if elements.len() < 2 {
        return Err(Error::InvalidArgument(format!("AMC needs D >= 2 elements, got {}", elements.len())));
    }
    for e in elements {
        if e.group() != group {
            return Err(Error::GroupMismatch(group.to_string(), e.group().to_string()));
        }
    }
    let blocks: Vec<BitMatrix> = elements.iter().map(GroupAlgebraElement::regular_rep).collect();
    mbc_build(&blocks).map_err(|e| match e {
        Error::NonCommuting(i, j) => Error::Internal(format!("regular representations {i} and {j} of an abelian group do not commute")),
        other => other,
    })
}

/// `A × B` with `C_j = ⊕_i A_i ⊗ B_{j−i}`, summands stacked in ascending `i`.
pub fn tensor_product(a: &ChainComplex, b: &ChainComplex) -> ChainComplex {
    let (da, db) = (a.length(), b.length());
    let d = da + db;
    // Offsets of each summand A_i ⊗ B_{j-i} inside C_j.
    let summands = |j: usize| -> Vec<(usize, usize)> {
        let mut off = 0;
        let mut out = Vec::new();
        for i in j.saturating_sub(db)..=j.min(da) {
            out.push((i, off));
            off += a.dims()[i] * b.dims()[j - i];
        }
        out
    };
    let dim = |j: usize| -> usize { (j.saturating_sub(db)..=j.min(da)).map(|i| a.dims()[i] * b.dims()[j - i]).sum() };
    if d == 0 {
        return ChainComplex::point(dim(0));
    }
    let mut boundaries = Vec::with_capacity(d);
    for j in 1..=d {
        let (rows, cols) = (summands(j - 1), summands(j));
        let mut q = BitMatrix::zeros(dim(j - 1), dim(j));
        for &(i, col_off) in &cols {
            let nb = b.dims()[j - i];
            if i >= 1 {
                // ∂a ⊗ b lands in A_{i-1} ⊗ B_{j-i}.
                let row_off = rows.iter().find(|(r, _)| *r == i - 1).expect("summand present").1;
                q.paste(&a.boundaries()[i - 1].kron(&BitMatrix::identity(nb)), row_off, col_off);
            }
            if j - i >= 1 {
                // a ⊗ ∂b lands in A_i ⊗ B_{j-i-1}.
                let row_off = rows.iter().find(|(r, _)| *r == i).expect("summand present").1;
                q.paste(&BitMatrix::identity(a.dims()[i]).kron(&b.boundaries()[j - i - 1]), row_off, col_off);
            }
        }
        boundaries.push(q);
    }
    ChainComplex::new(boundaries).expect("tensor product of complexes is a complex")
}

/// Künneth convolution `Σ_i k_i(A) k_{j−i}(B)`.
pub fn kunneth_rank(a_ranks: &[usize], b_ranks: &[usize], j: usize) -> usize {
    (0..=j).filter(|&i| i < a_ranks.len() && j - i < b_ranks.len()).map(|i| a_ranks[i] * b_ranks[j - i]).sum()
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k.min(n - k)).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::BitVec;
    use rand::{seq::SliceRandom, Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn circ(l: usize, exps: &[usize]) -> BitMatrix {
        GroupAlgebraElement::from_indices(&AbelianGroup::cyclic(l), exps.iter().copied()).regular_rep()
    }

    fn random_block(rng: &mut impl Rng, l: usize) -> BitMatrix {
        circ(l, &(0..l).filter(|_| rng.gen_bool(0.4)).collect::<Vec<_>>())
    }

    /// Assembles a block matrix from a pattern of block indices (None = zero).
    fn blocks(pattern: &[&[Option<usize>]], mats: &[BitMatrix]) -> BitMatrix {
        let l = mats[0].rows();
        let mut out = BitMatrix::zeros(pattern.len() * l, pattern[0].len() * l);
        for (r, row) in pattern.iter().enumerate() {
            for (c, b) in row.iter().enumerate() {
                if let Some(i) = b {
                    out.paste(&mats[*i], r * l, c * l);
                }
            }
        }
        out
    }

    #[test]
    fn two_block_layout() {
        let (a, b) = (circ(5, &[0, 1]), circ(5, &[0, 2, 3]));
        let c = mbc_build(&[a.clone(), b.clone()]).unwrap();
        assert_eq!(c.boundaries()[0], BitMatrix::hstack(&[&b, &a]));
        assert_eq!(c.boundaries()[1], BitMatrix::vstack(&[&a, &b]));
    }

    #[test]
    fn three_block_layout() {
        let m = vec![circ(5, &[0, 1]), circ(5, &[0, 2]), circ(5, &[1, 3, 4])];
        let (a, b, cc) = (Some(0), Some(1), Some(2));
        let q = mbc_build(&m).unwrap();
        assert_eq!(q.boundaries()[0], blocks(&[&[cc, b, a]], &m));
        assert_eq!(q.boundaries()[1], blocks(&[&[b, a, None], &[cc, None, a], &[None, cc, b]], &m));
        assert_eq!(q.boundaries()[2], blocks(&[&[a], &[b], &[cc]], &m));
    }

    #[test]
    fn four_block_layout() {
        let m = vec![circ(7, &[0, 1]), circ(7, &[0, 2]), circ(7, &[0, 3]), circ(7, &[0, 4])];
        let (a, b, c, d) = (Some(0), Some(1), Some(2), Some(3));
        let r = mbc_build(&m).unwrap();
        assert_eq!(r.boundaries()[0], blocks(&[&[d, c, b, a]], &m));
        let r2 = blocks(
            &[
                &[c, b, a, None, None, None],
                &[d, None, None, b, a, None],
                &[None, d, None, c, None, a],
                &[None, None, d, None, c, b],
            ],
            &m,
        );
        assert_eq!(r.boundaries()[1], r2);
        let r3 = blocks(
            &[
                &[b, a, None, None],
                &[c, None, a, None],
                &[None, c, b, None],
                &[d, None, None, a],
                &[None, d, None, b],
                &[None, None, d, c],
            ],
            &m,
        );
        assert_eq!(r.boundaries()[2], r3);
        assert_eq!(r.boundaries()[3], blocks(&[&[a], &[b], &[c], &[d]], &m));
        assert_eq!(r.dims(), &[7, 28, 42, 28, 7]);
        assert_eq!(r.boundaries()[1].shape(), (28, 42));
        assert!(r.boundaries()[1].mul(&r.boundaries()[2]).is_zero());
    }

    #[test]
    fn layout_matches_recursion() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for d in 1..=5 {
            let l = 4;
            let m: Vec<BitMatrix> = (0..d).map(|_| random_block(&mut rng, l)).collect();
            let q = mbc_build(&m).unwrap();
            let layout = mbc_block_layout(d);
            for j in 1..=d {
                assert_eq!(layout[j].len(), binomial(d, j));
                let qj = &q.boundaries()[j - 1];
                for (r, &t) in layout[j - 1].iter().enumerate() {
                    for (c, &s) in layout[j].iter().enumerate() {
                        let expected = if s & t == t && (s ^ t).count_ones() == 1 {
                            m[(s ^ t).trailing_zeros() as usize].clone()
                        } else {
                            BitMatrix::zeros(l, l)
                        };
                        let got = BitMatrix::from_fn(l, l, |x, y| qj.get(r * l + x, c * l + y));
                        assert_eq!(got, expected, "D={d} j={j} block ({r},{c})");
                    }
                }
                // j nonzero blocks per block column, D+1-j per block row.
                for &s in &layout[j] {
                    assert_eq!(layout[j - 1].iter().filter(|&&t| s & t == t).count(), j);
                }
                for &t in &layout[j - 1] {
                    assert_eq!(layout[j].iter().filter(|&&s| s & t == t).count(), d + 1 - j);
                }
            }
        }
    }

    #[test]
    fn mbc_errors() {
        let a = BitMatrix::from_dense(&["10", "11"]);
        let b = BitMatrix::from_dense(&["11", "01"]);
        assert!(matches!(mbc_build(&[a.clone(), b]), Err(Error::NonCommuting(1, 2))));
        assert!(matches!(mbc_build(&[a, BitMatrix::identity(3)]), Err(Error::Shape(_))));
        let single = mbc_build(&[circ(3, &[0, 1])]).unwrap();
        assert_eq!(single.length(), 1);
        assert_eq!(single.boundaries()[0], circ(3, &[0, 1]));
    }

    #[test]
    fn amc_small_cases() {
        let c2 = AbelianGroup::cyclic(2);
        let a = GroupAlgebraElement::parse(&c2, "1+x").unwrap();
        let q = amc_build(&c2, &[a.clone(), a.clone()]).unwrap();
        assert_eq!(q.dims(), &[2, 4, 2]);
        assert!(amc_build(&c2, &[a]).is_err());
    }

    #[test]
    fn homology_two_ways() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let g = AbelianGroup::cyclic(9);
            let els: Vec<GroupAlgebraElement> =
                (0..3).map(|_| GroupAlgebraElement::from_indices(&g, (0..9).filter(|_| rng.gen_bool(0.4)))).collect();
            let q = amc_build(&g, &els).unwrap();
            for j in 0..=3 {
                let cycles = if j == 0 { q.dims()[0] } else { q.boundaries()[j - 1].kernel_basis().len() };
                let boundaries = if j == 3 { 0 } else { BitMatrix::from_rows(q.dims()[j], &q.boundaries()[j].transpose().row_vectors()).rank() };
                assert_eq!(q.homology_rank(j).unwrap(), cycles - boundaries);
            }
        }
        let q = ChainComplex::one_complex(BitMatrix::identity(3));
        assert_eq!(q.homology_rank(0).unwrap(), 0);
        assert!(q.homology_rank(2).is_err());
    }

    #[test]
    fn tensor_unit_and_two_block_equivalence() {
        let a = ChainComplex::one_complex(circ(3, &[0, 1]));
        assert_eq!(tensor_product(&a, &ChainComplex::point(1)), a);
        assert_eq!(tensor_product(&ChainComplex::point(1), &a), a);

        // K(A1) × K(B1) vs MBC(A1 ⊗ I, I ⊗ B1): the product stacks A_0⊗B_1
        // before A_1⊗B_0, the same order as P_1 = [I⊗B, A⊗I].
        let (a1, b1) = (circ(3, &[0, 1]), circ(4, &[0, 1, 3]));
        let p = tensor_product(&ChainComplex::one_complex(a1.clone()), &ChainComplex::one_complex(b1.clone()));
        let aa = a1.kron(&BitMatrix::identity(4));
        let bb = BitMatrix::identity(3).kron(&b1);
        let m = mbc_build(&[aa, bb]).unwrap();
        assert_eq!(p, m);
    }

    #[test]
    fn tensor_power_dims() {
        let a = ChainComplex::one_complex(circ(3, &[0, 1]));
        let mut p = a.clone();
        for _ in 1..4 {
            p = tensor_product(&p, &a);
        }
        let expected: Vec<usize> = (0..=4).map(|j| binomial(4, j) * 81).collect();
        assert_eq!(p.dims(), &expected[..]);
    }

    #[test]
    fn kunneth_property() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..30 {
            let l = rng.gen_range(2..=9);
            let a = if rng.gen_bool(0.5) {
                ChainComplex::one_complex(random_block(&mut rng, l))
            } else {
                mbc_build(&[random_block(&mut rng, l), random_block(&mut rng, l)]).unwrap()
            };
            let lb = rng.gen_range(2..=5);
            let b = ChainComplex::one_complex(random_block(&mut rng, lb));
            let c = tensor_product(&a, &b);
            let (ka, kb) = (a.homology_ranks(), b.homology_ranks());
            for j in 0..=c.length() {
                assert_eq!(c.homology_rank(j).unwrap(), kunneth_rank(&ka, &kb, j));
            }
        }
        assert_eq!(kunneth_rank(&[1, 1], &[0, 0], 1), 0);
        // (1 + x)^4 has coefficient 6 at x^2.
        let mut poly = vec![1usize];
        for _ in 0..4 {
            poly = (0..=poly.len()).map(|j| kunneth_rank(&poly, &[1, 1], j)).collect();
        }
        assert_eq!(poly[2], 6);
    }

    #[test]
    fn block_order_permutation_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..10 {
            let mut m: Vec<BitMatrix> = (0..4).map(|_| random_block(&mut rng, 6)).collect();
            let q = mbc_build(&m).unwrap();
            m.shuffle(&mut rng);
            let p = mbc_build(&m).unwrap();
            assert_eq!(q.dims(), p.dims());
            for j in 0..=4 {
                assert_eq!(q.boundary_rank(j), p.boundary_rank(j));
                assert_eq!(q.homology_rank(j).unwrap(), p.homology_rank(j).unwrap());
            }
        }
    }

    #[test]
    fn hat_duality() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let g = AbelianGroup::cyclic(10);
        for _ in 0..10 {
            let els: Vec<GroupAlgebraElement> =
                (0..4).map(|_| GroupAlgebraElement::from_indices(&g, (0..10).filter(|_| rng.gen_bool(0.3)))).collect();
            let hats: Vec<GroupAlgebraElement> = els.iter().map(GroupAlgebraElement::hat).collect();
            let (q, h) = (amc_build(&g, &els).unwrap(), amc_build(&g, &hats).unwrap());
            for j in 1..=4 {
                assert_eq!(h.boundary_rank(j), q.boundary_rank(5 - j));
            }
        }
    }

    #[test]
    fn co_complex_is_complex() {
        let q = mbc_build(&[circ(5, &[0, 1]), circ(5, &[0, 2]), circ(5, &[0, 3])]).unwrap();
        let co = q.co_complex();
        assert_eq!(co.dims(), &[5, 15, 15, 5]);
        let v = BitVec::zeros(5);
        assert!(co.boundaries()[0].mul_vec(&BitVec::zeros(15)) == v);
    }
}
