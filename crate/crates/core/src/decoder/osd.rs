use crate::error::{Error, Result};

use super::DecoderGraph;

#[derive(Default)]
pub struct OsdScratch {
    rows: Vec<u64>,
    order: Vec<usize>,
    pivots: Vec<usize>,
    delta: Vec<f64>,
}

/// Ordered-statistics decoding of order 1.
///
/// Columns are ordered by `llrs` ascending (most likely flipped first, ties
/// by fault index) and Gauss–Jordan elimination picks the first independent
/// columns as pivots. The order-0 solution lives on the pivots; the
/// remaining information-set columns are fixed to zero. Order 1 flips each
/// of the first `sweep` information-set columns in turn and keeps the
/// candidate with the smallest prior weight, so it is never heavier than
/// order 0.
pub fn osd1(graph: &DecoderGraph, llrs: &[f64], syndrome: &[bool], sweep: Option<usize>, s: &mut OsdScratch) -> Result<Vec<usize>> {
    let n = graph.num_faults();
    let m = graph.num_detectors();
    if llrs.len() != n || syndrome.len() != m {
        return Err(Error::Shape(format!("osd1: {} llrs, {} syndrome bits for {n} faults, {m} detectors", llrs.len(), syndrome.len())));
    }
    s.order.clear();
    s.order.extend(0..n);
    s.order.sort_by(|&a, &b| llrs[a].total_cmp(&llrs[b]).then(a.cmp(&b)));
    let words = (n + 1).div_ceil(64);
    s.rows.clear();
    s.rows.resize(m * words, 0);
    let rows = &mut s.rows;
    let set = |rows: &mut [u64], r: usize, c: usize| rows[r * words + c / 64] ^= 1 << (c % 64);
    for (j, &f) in s.order.iter().enumerate() {
        for &d in graph.fault_detectors(f) {
            set(rows, d as usize, j);
        }
    }
    for (d, &b) in syndrome.iter().enumerate() {
        if b {
            set(rows, d, n);
        }
    }
    let get = |rows: &[u64], r: usize, c: usize| rows[r * words + c / 64] >> (c % 64) & 1 == 1;
    s.pivots.clear();
    for j in 0..n {
        let rank = s.pivots.len();
        if rank == m {
            break;
        }
        let Some(p) = (rank..m).find(|&r| get(rows, r, j)) else { continue };
        if p != rank {
            for w in 0..words {
                rows.swap(p * words + w, rank * words + w);
            }
        }
        let w0 = j / 64;
        for r in 0..m {
            if r != rank && get(rows, r, j) {
                for w in w0..words {
                    rows[r * words + w] ^= rows[rank * words + w];
                }
            }
        }
        s.pivots.push(j);
    }
    let rank = s.pivots.len();
    if (rank..m).any(|r| get(rows, r, n)) {
        return Err(Error::UnmatchableSyndrome);
    }
    let priors = graph.priors();
    let x0: Vec<bool> = (0..rank).map(|i| get(rows, i, n)).collect();
    let pivot_weight: Vec<f64> = s.pivots.iter().map(|&j| priors[s.order[j]]).collect();
    let mut is_pivot = vec![false; n];
    for &j in &s.pivots {
        is_pivot[j] = true;
    }
    // Columns eligible for a flip: the first `sweep` non-pivots.
    let limit = sweep.unwrap_or(usize::MAX);
    let mut end = 0;
    let mut taken = 0;
    while end < n && taken < limit {
        taken += !is_pivot[end] as usize;
        end += 1;
    }
    // delta[j]: weight change of flipping column j and re-solving the pivots.
    s.delta.clear();
    s.delta.extend((0..end).map(|j| priors[s.order[j]]));
    for i in 0..rank {
        let c = if x0[i] { -pivot_weight[i] } else { pivot_weight[i] };
        for (w, &word) in rows[i * words..i * words + end.div_ceil(64)].iter().enumerate() {
            let mut word = word;
            while word != 0 {
                let j = w * 64 + word.trailing_zeros() as usize;
                word &= word - 1;
                if j < end {
                    s.delta[j] += c;
                }
            }
        }
    }
    let mut best: Option<(f64, usize)> = None;
    for j in (0..end).filter(|&j| !is_pivot[j]) {
        if s.delta[j] < best.map_or(0.0, |b| b.0) {
            best = Some((s.delta[j], j));
        }
    }
    let mut correction: Vec<usize> = Vec::new();
    for i in 0..rank {
        let flip = best.is_some_and(|(_, j)| get(rows, i, j));
        if x0[i] ^ flip {
            correction.push(s.order[s.pivots[i]]);
        }
    }
    if let Some((_, j)) = best {
        correction.push(s.order[j]);
    }
    correction.sort_unstable();
    Ok(correction)
}
