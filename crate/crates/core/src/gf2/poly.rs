use std::fmt;

use super::bitvec::{word_bits, WORD};
use crate::error::{Error, Result};

/// Polynomial over GF(2), stored as a packed coefficient vector with no trailing zero words.
///
/// The zero polynomial has degree `None` (the −∞ sentinel).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Gf2Poly {
    words: Vec<u64>,
}

impl Gf2Poly {
    pub fn zero() -> Self {
        Self { words: Vec::new() }
    }

    pub fn one() -> Self {
        Self::monomial(0)
    }

    pub fn monomial(e: usize) -> Self {
        let mut p = Self::zero();
        p.toggle(e);
        p
    }

    /// Sum of monomials `x^e`; repeated exponents cancel.
    pub fn from_exponents<I: IntoIterator<Item = usize>>(exps: I) -> Self {
        let mut p = Self::zero();
        for e in exps {
            p.toggle(e);
        }
        p
    }

    /// `x^ℓ − 1`, which over GF(2) is `x^ℓ + 1`.
    pub fn cyclic_modulus(l: usize) -> Self {
        Self::from_exponents([0, l])
    }

    pub fn is_zero(&self) -> bool {
        self.words.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.words.last().map(|&w| (self.words.len() - 1) * WORD + 63 - w.leading_zeros() as usize)
    }

    pub fn coeff(&self, e: usize) -> bool {
        self.words.get(e / WORD).is_some_and(|w| (w >> (e % WORD)) & 1 == 1)
    }

    pub fn exponents(&self) -> Vec<usize> {
        word_bits(&self.words).collect()
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn toggle(&mut self, e: usize) {
        let w = e / WORD;
        if self.words.len() <= w {
            self.words.resize(w + 1, 0);
        }
        self.words[w] ^= 1u64 << (e % WORD);
        self.trim();
    }

    fn trim(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }

    pub fn add(&self, other: &Gf2Poly) -> Gf2Poly {
        let n = self.words.len().max(other.words.len());
        let mut words = vec![0; n];
        for (i, w) in words.iter_mut().enumerate() {
            *w = self.words.get(i).copied().unwrap_or(0) ^ other.words.get(i).copied().unwrap_or(0);
        }
        let mut p = Gf2Poly { words };
        p.trim();
        p
    }

    pub fn shifted(&self, s: usize) -> Gf2Poly {
        if self.is_zero() {
            return Gf2Poly::zero();
        }
        let (ws, bs) = (s / WORD, s % WORD);
        let mut words = vec![0u64; self.words.len() + ws + 1];
        for (i, &w) in self.words.iter().enumerate() {
            words[i + ws] ^= w << bs;
            if bs != 0 {
                words[i + ws + 1] ^= w >> (WORD - bs);
            }
        }
        let mut p = Gf2Poly { words };
        p.trim();
        p
    }

    pub fn mul(&self, other: &Gf2Poly) -> Gf2Poly {
        let mut acc = Gf2Poly::zero();
        for e in other.exponents() {
            acc = acc.add(&self.shifted(e));
        }
        acc
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn divrem(&self, divisor: &Gf2Poly) -> (Gf2Poly, Gf2Poly) {
        let dd = divisor.degree().expect("division by zero polynomial");
        let mut q = Gf2Poly::zero();
        let mut r = self.clone();
        while let Some(rd) = r.degree() {
            if rd < dd {
                break;
            }
            let s = rd - dd;
            q.toggle(s);
            r = r.add(&divisor.shifted(s));
        }
        (q, r)
    }

    pub fn rem(&self, divisor: &Gf2Poly) -> Gf2Poly {
        self.divrem(divisor).1
    }

    /// Reduces modulo `x^ℓ − 1` by folding exponents.
    pub fn reduce_cyclic(&self, l: usize) -> Gf2Poly {
        Gf2Poly::from_exponents(self.exponents().into_iter().map(|e| e % l))
    }

    pub fn divides(&self, other: &Gf2Poly) -> bool {
        !self.is_zero() && other.rem(self).is_zero()
    }

    /// Parses `1+x+x^3` style input in the single variable `var`.
    pub fn parse(s: &str, var: char) -> Result<Gf2Poly> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s == "0" {
            return Ok(Gf2Poly::zero());
        }
        let mut exps = Vec::new();
        for term in s.split('+') {
            exps.push(parse_monomial(term, var)?);
        }
        Ok(Gf2Poly::from_exponents(exps))
    }
}

fn parse_monomial(term: &str, var: char) -> Result<usize> {
    if term == "1" {
        return Ok(0);
    }
    let mut chars = term.chars();
    if chars.next() != Some(var) {
        return Err(Error::Parse(format!("bad monomial '{term}'")));
    }
    let rest: String = chars.collect();
    if rest.is_empty() {
        return Ok(1);
    }
    rest.strip_prefix('^')
        .and_then(|e| e.parse::<usize>().ok())
        .ok_or_else(|| Error::Parse(format!("bad exponent in '{term}'")))
}

/// Monic greatest common divisor.
pub fn poly_gcd(a: &Gf2Poly, b: &Gf2Poly) -> Result<Gf2Poly> {
    if a.is_zero() && b.is_zero() {
        return Err(Error::GcdUndefined);
    }
    let (mut x, mut y) = (a.clone(), b.clone());
    while !y.is_zero() {
        let r = x.rem(&y);
        x = y;
        y = r;
    }
    Ok(x)
}

/// Extended Euclid: `(u, v, h)` with `u·a + v·b = h = gcd(a, b)`.
pub fn bezout(a: &Gf2Poly, b: &Gf2Poly) -> Result<(Gf2Poly, Gf2Poly, Gf2Poly)> {
    if a.is_zero() && b.is_zero() {
        return Err(Error::GcdUndefined);
    }
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1) = (Gf2Poly::one(), Gf2Poly::zero());
    let (mut t0, mut t1) = (Gf2Poly::zero(), Gf2Poly::one());
    while !r1.is_zero() {
        let (q, r) = r0.divrem(&r1);
        let s = s0.add(&q.mul(&s1));
        let t = t0.add(&q.mul(&t1));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
        t0 = std::mem::replace(&mut t1, t);
    }
    Ok((s0, t0, r0))
}

/// Folds [`poly_gcd`] over a list.
pub fn poly_gcd_all<'a, I: IntoIterator<Item = &'a Gf2Poly>>(polys: I) -> Result<Gf2Poly> {
    let mut acc = Gf2Poly::zero();
    for p in polys {
        if !(acc.is_zero() && p.is_zero()) {
            acc = poly_gcd(&acc, p)?;
        }
    }
    if acc.is_zero() {
        Err(Error::GcdUndefined)
    } else {
        Ok(acc)
    }
}

impl fmt::Display for Gf2Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .exponents()
            .into_iter()
            .map(|e| match e {
                0 => "1".to_string(),
                1 => "x".to_string(),
                _ => format!("x^{e}"),
            })
            .collect();
        write!(f, "{}", terms.join("+"))
    }
}

impl fmt::Debug for Gf2Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gf2Poly({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> Gf2Poly {
        Gf2Poly::parse(s, 'x').unwrap()
    }

    #[test]
    fn gcd_examples() {
        assert_eq!(poly_gcd(&p("1+x"), &p("1+x^2")).unwrap(), p("1+x"));
        assert_eq!(poly_gcd(&p("1+x+x^3"), &Gf2Poly::zero()).unwrap(), p("1+x+x^3"));
        assert!(matches!(poly_gcd(&Gf2Poly::zero(), &Gf2Poly::zero()), Err(Error::GcdUndefined)));
        let all = [p("1+x"), p("1+x^2"), p("1+x^3"), p("1+x^4"), Gf2Poly::cyclic_modulus(7)];
        assert_eq!(poly_gcd_all(&all).unwrap(), p("1+x"));
    }

    #[test]
    fn bezout_examples() {
        let (u, v, h) = bezout(&p("1+x"), &p("1+x^2")).unwrap();
        assert_eq!((u, v, h), (Gf2Poly::one(), Gf2Poly::zero(), p("1+x")));
        let (u, v, h) = bezout(&p("x"), &p("1+x")).unwrap();
        assert_eq!((u, v, h), (Gf2Poly::one(), Gf2Poly::one(), Gf2Poly::one()));
        let (u, v, h) = bezout(&Gf2Poly::zero(), &p("1+x^3")).unwrap();
        assert_eq!((u, v, h), (Gf2Poly::zero(), Gf2Poly::one(), p("1+x^3")));
    }

    #[test]
    fn division_and_display() {
        let (q, r) = p("1+x^7").divrem(&p("1+x"));
        assert_eq!(q, p("1+x+x^2+x^3+x^4+x^5+x^6"));
        assert!(r.is_zero());
        assert_eq!(p("x^3+1+x").to_string(), "1+x+x^3");
        assert_eq!(Gf2Poly::zero().degree(), None);
        assert_eq!(p("x^70+x").degree(), Some(70));
        assert!(Gf2Poly::parse("1+y", 'x').is_err());
        assert!(Gf2Poly::parse("x^-1", 'x').is_err());
    }

    proptest! {
        #[test]
        fn bezout_identity(a in any::<u32>(), b in any::<u32>()) {
            prop_assume!(a != 0 || b != 0);
            let pa = Gf2Poly::from_exponents((0..32).filter(|i| (a >> i) & 1 == 1));
            let pb = Gf2Poly::from_exponents((0..32).filter(|i| (b >> i) & 1 == 1));
            let (u, v, h) = bezout(&pa, &pb).unwrap();
            prop_assert_eq!(u.mul(&pa).add(&v.mul(&pb)), h.clone());
            prop_assert_eq!(&h, &poly_gcd(&pa, &pb).unwrap());
            prop_assert!(h.divides(&pa) || pa.is_zero());
            prop_assert!(h.divides(&pb) || pb.is_zero());
            if let (Some(da), Some(db), Some(dh)) = (pa.degree(), pb.degree(), h.degree()) {
                if da > dh && db > dh {
                    prop_assert!(u.degree().map_or(true, |du| du < db - dh));
                    prop_assert!(v.degree().map_or(true, |dv| dv < da - dh));
                }
            }
        }
    }
}
