//! Finite abelian groups as products of cyclic factors and their GF(2) group
//! algebras.
//!
//! Elements are enumerated in mixed-radix order with the last factor fastest,
//! so for a single cyclic factor the regular representation is a circulant.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVec, Gf2Poly};

/// `C_{Δ_1} × … × C_{Δ_m}`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AbelianGroup {
    orders: Vec<usize>,
}

impl AbelianGroup {
    pub fn new(orders: Vec<usize>) -> Result<Self> {
        if orders.is_empty() || orders.contains(&0) {
            return Err(Error::InvalidArgument(format!("cyclic factor orders must be positive, got {orders:?}")));
        }
        Ok(Self { orders })
    }

    pub fn cyclic(l: usize) -> Self {
        Self::new(vec![l]).expect("positive order")
    }

    /// Parses `C7`, `C3xC5` or `C2^4`.
    pub fn parse(s: &str) -> Result<Self> {
        let mut orders = Vec::new();
        for part in s.trim().split(['x', 'X', '×']) {
            let body = part.trim().strip_prefix('C').ok_or_else(|| Error::Parse(format!("bad group factor '{part}'")))?;
            let (base, power) = match body.split_once('^') {
                Some((b, p)) => (b, p.parse::<usize>().map_err(|_| Error::Parse(format!("bad power in '{part}'")))?),
                None => (body, 1),
            };
            let order = base.parse::<usize>().map_err(|_| Error::Parse(format!("bad order in '{part}'")))?;
            orders.extend(std::iter::repeat_n(order, power));
        }
        Self::new(orders)
    }

    pub fn orders(&self) -> &[usize] {
        &self.orders
    }

    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    /// Group order `ℓ`.
    pub fn order(&self) -> usize {
        self.orders.iter().product()
    }

    pub fn is_cyclic_factor(&self) -> bool {
        self.orders.len() == 1
    }

    pub fn exponents_of(&self, mut index: usize) -> Vec<usize> {
        let mut e = vec![0; self.orders.len()];
        for (slot, &d) in e.iter_mut().zip(&self.orders).rev() {
            *slot = index % d;
            index /= d;
        }
        e
    }

    pub fn index_of(&self, exps: &[i64]) -> usize {
        assert_eq!(exps.len(), self.orders.len());
        exps.iter().zip(&self.orders).fold(0, |acc, (&e, &d)| acc * d + e.rem_euclid(d as i64) as usize)
    }

    pub fn mul_index(&self, a: usize, b: usize) -> usize {
        if self.orders.len() == 1 {
            return (a + b) % self.orders[0];
        }
        let (ea, eb) = (self.exponents_of(a), self.exponents_of(b));
        let sum: Vec<i64> = ea.iter().zip(&eb).map(|(x, y)| (x + y) as i64).collect();
        self.index_of(&sum)
    }

    pub fn inv_index(&self, a: usize) -> usize {
        let neg: Vec<i64> = self.exponents_of(a).iter().map(|&x| -(x as i64)).collect();
        self.index_of(&neg)
    }

    pub fn pow_index(&self, a: usize, m: i64) -> usize {
        let p: Vec<i64> = self.exponents_of(a).iter().map(|&x| x as i64 * m).collect();
        self.index_of(&p)
    }

    /// Least common multiple of the factor orders.
    pub fn exponent(&self) -> usize {
        self.orders.iter().fold(1, |acc, &d| lcm(acc, d))
    }

    /// Generator names: `x` for one factor, `x,y,z,w` for up to four, else `x1..xm`.
    pub fn generator_names(&self) -> Vec<String> {
        match self.orders.len() {
            1 => vec!["x".into()],
            m @ 2..=4 => ["x", "y", "z", "w"][..m].iter().map(|s| s.to_string()).collect(),
            m => (1..=m).map(|i| format!("x{i}")).collect(),
        }
    }

    fn generator_slot(&self, name: &str) -> Option<usize> {
        if let Some(i) = self.generator_names().iter().position(|g| g == name) {
            return Some(i);
        }
        // `x_3` and `x3` are accepted for any rank.
        let digits = name.strip_prefix('x')?.trim_start_matches('_');
        let i: usize = digits.parse().ok()?;
        (1..=self.orders.len()).contains(&i).then(|| i - 1)
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.orders.iter().map(|d| format!("C{d}")).collect();
        write!(f, "{}", parts.join("x"))
    }
}

impl fmt::Debug for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AbelianGroup({self})")
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// A GF(2) formal sum of group elements.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GroupAlgebraElement {
    group: AbelianGroup,
    coeffs: BitVec,
}

impl GroupAlgebraElement {
    pub fn zero(group: &AbelianGroup) -> Self {
        Self { group: group.clone(), coeffs: BitVec::zeros(group.order()) }
    }

    pub fn one(group: &AbelianGroup) -> Self {
        Self::from_indices(group, [0])
    }

    /// Sum of the listed elements; repeated indices cancel.
    pub fn from_indices<I: IntoIterator<Item = usize>>(group: &AbelianGroup, indices: I) -> Self {
        Self { group: group.clone(), coeffs: BitVec::from_indices(group.order(), indices) }
    }

    pub fn monomial(group: &AbelianGroup, exps: &[i64]) -> Self {
        Self::from_indices(group, [group.index_of(exps)])
    }

    /// Element of `F[C_ℓ]` from a polynomial, exponents reduced mod `ℓ`.
    pub fn from_poly(l: usize, p: &Gf2Poly) -> Self {
        let g = AbelianGroup::cyclic(l);
        Self::from_indices(&g, p.exponents().into_iter().map(|e| e % l))
    }

    /// Parses `1+x^3+x*y^2` over the group's named generators.
    pub fn parse(group: &AbelianGroup, s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::Parse("empty element".into()));
        }
        if s == "0" {
            return Ok(Self::zero(group));
        }
        let mut idx = Vec::new();
        // Split on '+' that is not part of an exponent sign.
        for term in split_terms(&s) {
            let mut exps = vec![0i64; group.rank()];
            if term != "1" {
                for factor in term.split('*') {
                    let (name, e) = match factor.split_once('^') {
                        Some((n, e)) => (n, e.parse::<i64>().map_err(|_| Error::Parse(format!("exponent '{e}' is not an integer")))?),
                        None => (factor, 1),
                    };
                    if name == "1" {
                        continue;
                    }
                    let slot = group.generator_slot(name).ok_or_else(|| Error::Parse(format!("unknown generator '{name}' for group {group}")))?;
                    exps[slot] += e;
                }
            }
            idx.push(group.index_of(&exps));
        }
        Ok(Self::from_indices(group, idx))
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn coefficients(&self) -> &BitVec {
        &self.coeffs
    }

    pub fn support(&self) -> Vec<usize> {
        self.coeffs.support().collect()
    }

    pub fn weight(&self) -> usize {
        self.coeffs.weight()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_zero()
    }

    fn check_group(&self, other: &Self) -> Result<()> {
        if self.group != other.group {
            return Err(Error::GroupMismatch(self.group.to_string(), other.group.to_string()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_group(other)?;
        let mut c = self.coeffs.clone();
        c.xor_assign(&other.coeffs);
        Ok(Self { group: self.group.clone(), coeffs: c })
    }

    /// Convolution product `ab = Σ_g (Σ_h a_h b_{h⁻¹g}) g`.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_group(other)?;
        let mut out = BitVec::zeros(self.group.order());
        for h in self.coeffs.support() {
            for k in other.coeffs.support() {
                out.toggle(self.group.mul_index(h, k));
            }
        }
        Ok(Self { group: self.group.clone(), coeffs: out })
    }

    /// The involution `g ↦ g⁻¹` on the support.
    pub fn hat(&self) -> Self {
        Self::from_indices(&self.group, self.coeffs.support().map(|g| self.group.inv_index(g)))
    }

    /// Coefficient of the identity.
    pub fn group_trace(&self) -> bool {
        self.coeffs.get(0)
    }

    /// `[M(a)]_{α,β} = Σ_g a_g δ_{α, gβ}`.
    pub fn regular_rep(&self) -> BitMatrix {
        let l = self.group.order();
        let mut m = BitMatrix::zeros(l, l);
        for g in self.coeffs.support() {
            for beta in 0..l {
                m.toggle(self.group.mul_index(g, beta), beta);
            }
        }
        m
    }

    /// Applies the power automorphism `g ↦ g^m`, valid when `m` is coprime to the group exponent.
    pub fn automorphism_apply(&self, m: i64) -> Result<Self> {
        let e = self.group.exponent();
        if gcd(m.rem_euclid(e as i64) as usize, e) != 1 {
            return Err(Error::InvalidArgument(format!("x -> x^{m} is not an automorphism of {}", self.group)));
        }
        Ok(Self::from_indices(&self.group, self.coeffs.support().map(|g| self.group.pow_index(g, m))))
    }

    /// Polynomial form, for single-factor groups.
    pub fn to_poly(&self) -> Option<Gf2Poly> {
        self.group.is_cyclic_factor().then(|| Gf2Poly::from_exponents(self.coeffs.support()))
    }
}

fn split_terms(s: &str) -> Vec<&str> {
    let bytes = s.as_bytes();
    let mut out = Vec::new();
    let mut start = 0;
    for i in 0..bytes.len() {
        if bytes[i] == b'+' && !(i > 0 && bytes[i - 1] == b'^') {
            out.push(&s[start..i]);
            start = i + 1;
        }
    }
    out.push(&s[start..]);
    out
}

impl fmt::Display for GroupAlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let names = self.group.generator_names();
        let terms: Vec<String> = self
            .coeffs
            .support()
            .map(|g| {
                let factors: Vec<String> = self
                    .group
                    .exponents_of(g)
                    .iter()
                    .zip(&names)
                    .filter(|(&e, _)| e > 0)
                    .map(|(&e, n)| if e == 1 { n.clone() } else { format!("{n}^{e}") })
                    .collect();
                if factors.is_empty() {
                    "1".to_string()
                } else {
                    factors.join("*")
                }
            })
            .collect();
        write!(f, "{}", terms.join("+"))
    }
}

impl fmt::Debug for GroupAlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} in F2[{}]", self, self.group)
    }
}
