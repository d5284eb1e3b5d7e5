use super::bitvec::{xor_words, BitVec};

/// Incrementally built echelon basis of a subspace of GF(2)^n.
///
/// Each stored vector has a distinct pivot (its lowest set bit) that is clear
/// in every other stored vector, so membership tests are a single reduction pass.
#[derive(Clone, Debug)]
pub struct EchelonBasis {
    len: usize,
    rows: Vec<BitVec>,
    pivots: Vec<usize>,
}

impl EchelonBasis {
    pub fn new(len: usize) -> Self {
        Self { len, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the basis in place; zero iff `v` was in the span.
    pub fn reduce(&self, v: &mut BitVec) {
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if v.get(p) {
                xor_words(v.words_mut(), row.words());
            }
        }
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        let mut w = v.clone();
        self.reduce(&mut w);
        w.is_zero()
    }

    /// Adds `v` if independent; returns whether the span grew.
    pub fn insert(&mut self, v: &BitVec) -> bool {
        assert_eq!(v.len(), self.len);
        let mut w = v.clone();
        self.reduce(&mut w);
        let Some(p) = w.first_one() else {
            return false;
        };
        for row in &mut self.rows {
            if row.get(p) {
                xor_words(row.words_mut(), w.words());
            }
        }
        self.rows.push(w);
        self.pivots.push(p);
        true
    }
}
