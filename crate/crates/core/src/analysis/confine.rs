//! Confinement profiles: minimum syndrome weight of irreducible errors.
//!
//! An error is reducible when its support splits into two nonempty parts with
//! disjoint syndromes, so that the syndrome weights add. Errors whose support
//! is disconnected in the qubit adjacency graph (qubits adjacent when they
//! share a check) are reducible, so only connected clusters are enumerated.
//! Errors with zero syndrome are not counted.

use rayon::prelude::*;

use crate::css::CssCode;
use crate::error::{Error, Result};
use crate::gf2::BitMatrix;

/// Syndromes are packed into a fixed array; checks beyond this are rejected.
pub const MAX_CONFINEMENT_CHECKS: usize = 512;

type Syn = [u64; MAX_CONFINEMENT_CHECKS / 64];

fn syn_weight(s: &Syn) -> usize {
    s.iter().map(|w| w.count_ones() as usize).sum()
}

fn syn_xor(a: &Syn, b: &Syn) -> Syn {
    std::array::from_fn(|i| a[i] ^ b[i])
}

fn syn_disjoint(a: &Syn, b: &Syn) -> bool {
    a.iter().zip(b).all(|(x, y)| x & y == 0)
}

/// Per-weight minimum syndrome weight over irreducible errors on one check
/// matrix; `None` where no irreducible error of that weight exists.
pub fn confinement_profile_matrix(h: &BitMatrix, max_w: usize) -> Result<Vec<Option<usize>>> {
    if h.rows() > MAX_CONFINEMENT_CHECKS {
        return Err(Error::InvalidArgument(format!("confinement supports at most {MAX_CONFINEMENT_CHECKS} checks")));
    }
    let n = h.cols();
    let mut cols: Vec<Syn> = vec![[0; MAX_CONFINEMENT_CHECKS / 64]; n];
    let mut adj = vec![Vec::new(); n];
    for r in 0..h.rows() {
        let support = h.row_support(r);
        for &q in &support {
            cols[q][r / 64] |= 1 << (r % 64);
            adj[q].extend(support.iter().copied().filter(|&p| p != q));
        }
    }
    for a in &mut adj {
        a.sort_unstable();
        a.dedup();
    }
    let enumerator = Clusters { adj: &adj, cols: &cols, max_w };
    let per_root: Vec<Vec<Option<usize>>> = (0..n).into_par_iter().map(|v| enumerator.from_root(v)).collect();
    let mut best: Vec<Option<usize>> = vec![None; max_w];
    for profile in per_root {
        for (b, p) in best.iter_mut().zip(profile) {
            *b = match (*b, p) {
                (Some(x), Some(y)) => Some(x.min(y)),
                (x, None) => x,
                (None, y) => y,
            };
        }
    }
    Ok(best)
}

/// Profile for a CSS code: X and Z sides combined by minimum.
pub fn confinement_profile(code: &CssCode, max_w: usize) -> Result<Vec<Option<usize>>> {
    let px = confinement_profile_matrix(&code.hx, max_w)?;
    let pz = confinement_profile_matrix(&code.hz, max_w)?;
    Ok(px
        .into_iter()
        .zip(pz)
        .map(|(a, b)| match (a, b) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, None) => x,
            (None, y) => y,
        })
        .collect())
}

struct Clusters<'a> {
    adj: &'a [Vec<usize>],
    cols: &'a [Syn],

    max_w: usize,
}

impl Clusters<'_> {
    fn from_root(&self, root: usize) -> Vec<Option<usize>> {
        let mut best = vec![None; self.max_w];
        for_each_cluster(self.adj, root, self.max_w, &mut |sub| self.record(sub, &mut best));
        best
    }

    fn record(&self, sub: &[usize], best: &mut [Option<usize>]) {
        let w = sub.len();
        let total = sub.iter().fold([0; MAX_CONFINEMENT_CHECKS / 64], |acc, &q| syn_xor(&acc, &self.cols[q]));
        let weight = syn_weight(&total);
        if weight == 0 || best[w - 1].is_some_and(|b| b <= weight) {
            return;
        }
        // Splits with the first qubit on the left side.
        for mask in 0u32..(1 << (w - 1)) - 1 {
            let left_mask = (mask << 1) | 1;
            let left = (0..w).filter(|i| left_mask >> i & 1 == 1).fold([0; MAX_CONFINEMENT_CHECKS / 64], |acc, i| syn_xor(&acc, &self.cols[sub[i]]));
            if syn_disjoint(&left, &syn_xor(&left, &total)) {
                return;
            }
        }
        best[w - 1] = Some(weight);
    }
}

/// Visits every connected vertex set of size at most `max_w` whose smallest
/// vertex is `root`, each exactly once (ESU enumeration). `adj` lists must be sorted.
fn for_each_cluster(adj: &[Vec<usize>], root: usize, max_w: usize, f: &mut impl FnMut(&[usize])) {
    fn extend(adj: &[Vec<usize>], root: usize, max_w: usize, sub: &mut Vec<usize>, mut ext: Vec<usize>, f: &mut impl FnMut(&[usize])) {
        f(sub);
        if sub.len() == max_w {
            return;
        }
        while let Some(w) = ext.pop() {
            let mut next = ext.clone();
            for &u in &adj[w] {
                if u > root && !sub.contains(&u) && !next.contains(&u) && !sub.iter().any(|&s| adj[s].binary_search(&u).is_ok()) {
                    next.push(u);
                }
            }
            sub.push(w);
            extend(adj, root, max_w, sub, next, f);
            sub.pop();
        }
    }
    let ext: Vec<usize> = adj[root].iter().copied().filter(|&u| u > root).collect();
    extend(adj, root, max_w, &mut vec![root], ext, f);
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    /// All connected subsets up to size k by breadth-first growth.
    fn brute_connected(adj: &[Vec<usize>], k: usize) -> BTreeSet<Vec<usize>> {
        let mut all = BTreeSet::new();
        let mut frontier: BTreeSet<Vec<usize>> = (0..adj.len()).map(|v| vec![v]).collect();
        for _ in 0..k {
            let mut next = BTreeSet::new();
            for s in &frontier {
                all.insert(s.clone());
                for &v in s {
                    for &u in &adj[v] {
                        if !s.contains(&u) {
                            let mut t = s.clone();
                            t.push(u);
                            t.sort_unstable();
                            next.insert(t);
                        }
                    }
                }
            }
            frontier = next;
        }
        all
    }

    #[test]
    fn cluster_enumeration_is_complete_and_unique() {
        let h = BitMatrix::from_dense(&["1100100", "0110010", "0011001", "1000110"]);
        let n = h.cols();
        let mut adj = vec![Vec::new(); n];
        for r in 0..h.rows() {
            let s = h.row_support(r);
            for &q in &s {
                adj[q].extend(s.iter().copied().filter(|&p| p != q));
            }
        }
        for a in &mut adj {
            a.sort_unstable();
            a.dedup();
        }
        let mut out = Vec::new();
        for v in 0..n {
            for_each_cluster(&adj, v, 4, &mut |sub| {
                let mut s = sub.to_vec();
                s.sort_unstable();
                out.push(s);
            });
        }
        let set: BTreeSet<Vec<usize>> = out.iter().cloned().collect();
        assert_eq!(set.len(), out.len(), "duplicate cluster");
        assert_eq!(set, brute_connected(&adj, 4));
    }

    #[test]
    fn single_qubits_give_column_weights() {
        let h = BitMatrix::from_dense(&["110", "011", "111"]);
        let p = confinement_profile_matrix(&h, 1).unwrap();
        assert_eq!(p, vec![Some(2)]);
    }

    #[test]
    fn repetition_code_profile() {
        // Ring of 6 bits: any run of w < 6 has syndrome 2 and is irreducible.
        let h = BitMatrix::from_fn(6, 6, |r, c| c == r || c == (r + 1) % 6);
        let p = confinement_profile_matrix(&h, 5).unwrap();
        assert_eq!(p, vec![Some(2); 5]);
    }
}
