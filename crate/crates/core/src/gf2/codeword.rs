use rayon::prelude::*;

use super::bitvec::{xor_words, BitVec};
use super::matrix::BitMatrix;
use crate::error::{Error, Result};

/// Minimum weight of a nonzero vector in the row span of `g`, searched over
/// all combinations of at most `weight_cap` rows of a systematic basis.
///
/// A codeword built from `s` systematic rows has weight at least `s`, so the
/// search is exact up to the cap. Returns `None` if every nonzero codeword is
/// heavier than `weight_cap`.
pub fn min_weight_codeword(g: &BitMatrix, weight_cap: usize) -> Result<Option<(usize, BitVec)>> {
    if g.is_zero() {
        return Err(Error::TrivialCode);
    }
    let (basis, _) = g.rref();
    let k = basis.rows();
    let mut best: Option<(usize, BitVec)> = None;
    for r in 0..k {
        let w = basis.row_weight(r);
        if best.as_ref().is_none_or(|(bw, _)| w < *bw) {
            best = Some((w, basis.row(r)));
        }
    }
    for size in 2..=weight_cap.min(k) {
        if best.as_ref().is_some_and(|(bw, _)| *bw <= size) {
            break;
        }
        let bound = best.as_ref().map_or(usize::MAX, |(bw, _)| *bw);
        let found = (0..k)
            .into_par_iter()
            .filter_map(|first| {
                let mut acc = basis.row(first);
                let mut local: Option<(usize, BitVec)> = None;
                combos(&basis, first + 1, size - 1, &mut acc, bound, &mut local);
                local
            })
            .min_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
        if let Some((w, v)) = found {
            if w < bound {
                best = Some((w, v));
            }
        }
    }
    Ok(best.filter(|(w, _)| *w <= weight_cap))
}

fn combos(basis: &BitMatrix, start: usize, left: usize, acc: &mut BitVec, bound: usize, best: &mut Option<(usize, BitVec)>) {
    if left == 0 {
        let w = acc.weight();
        let limit = best.as_ref().map_or(bound, |(bw, _)| *bw);
        if w < limit {
            *best = Some((w, acc.clone()));
        }
        return;
    }
    for r in start..basis.rows() + 1 - left {
        xor_words(acc.words_mut(), basis.row_words(r));
        combos(basis, r + 1, left - 1, acc, bound, best);
        xor_words(acc.words_mut(), basis.row_words(r));
    }
}
