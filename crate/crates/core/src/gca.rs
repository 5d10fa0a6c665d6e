//! Free graded-commutative algebras over the rationals.
//!
//! An algebra is given by an ordered [`GeneratorSet`]. Odd generators anticommute
//! and square to zero, even generators are polynomial. Elements are finite sums
//! of normalized monomials with exact rational coefficients; the sign produced
//! when two monomials are multiplied follows the Koszul rule.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact rational coefficients.
pub type Rational = BigRational;

/// Convenience constructor for integer rationals.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Builds `p / q`. Panics if `q == 0`.
pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Generator {
    pub name: String,
    pub degree: u32,
}

impl Generator {
    pub fn new(name: impl Into<String>, degree: u32) -> Result<Self> {
        let name = name.into();
        if degree == 0 {
            return Err(Error::InvalidGenerator {
                name,
                reason: "degree must be positive".into(),
            });
        }
        let valid = name
            .chars()
            .next()
            .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
            && name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'');
        if !valid {
            return Err(Error::InvalidGenerator {
                name,
                reason: "names are letters, digits, `_` and `'`, starting with a letter".into(),
            });
        }
        Ok(Generator { name, degree })
    }

    pub fn is_odd(&self) -> bool {
        self.degree % 2 == 1
    }
}

/// An ordered list of generators with unique names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorSet {
    gens: Vec<Generator>,
    index: HashMap<String, usize>,
}

/// A normalized monomial: the exponent of generator `i` at position `i`,
/// with trailing zeros trimmed. Odd exponents are 0 or 1.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn generator(i: usize) -> Self {
        Self::power(i, 1)
    }

    pub fn power(i: usize, e: u32) -> Self {
        let mut v = vec![0; i + 1];
        v[i] = e;
        Monomial::from_exponents(v)
    }

    pub fn from_exponents(mut v: Vec<u32>) -> Self {
        while v.last() == Some(&0) {
            v.pop();
        }
        Monomial(v)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn exponent(&self, i: usize) -> u32 {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of generator factors counted with multiplicity.
    pub fn length(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Nonzero `(index, exponent)` pairs in increasing index order.
    pub fn factors(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| (i, e))
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.len() <= other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Exponent-wise sum, ignoring signs and odd squares.
    pub fn mul_exponents(&self, other: &Monomial) -> Monomial {
        let n = self.0.len().max(other.0.len());
        let v = (0..n).map(|i| self.exponent(i) + other.exponent(i)).collect();
        Monomial::from_exponents(v)
    }

    /// `self / other` when `other` divides `self`.
    pub fn div_exponents(&self, other: &Monomial) -> Option<Monomial> {
        if !other.divides(self) {
            return None;
        }
        let v = (0..self.0.len())
            .map(|i| self.exponent(i) - other.exponent(i))
            .collect();
        Some(Monomial::from_exponents(v))
    }

    /// Reindexes through `map`: generator `i` goes to `map[i]`, or the monomial
    /// vanishes if `map[i]` is `None` and the exponent is nonzero.
    pub fn reindex(&self, map: &[Option<usize>]) -> Option<Monomial> {
        let mut v = Vec::new();
        for (i, e) in self.factors() {
            let j = map.get(i).copied().flatten()?;
            if v.len() <= j {
                v.resize(j + 1, 0);
            }
            v[j] += e;
        }
        Some(Monomial::from_exponents(v))
    }
}

/// A finite linear combination of normalized monomials.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Element {
    terms: BTreeMap<Monomial, Rational>,
}

impl Element {
    pub fn zero() -> Self {
        Element::default()
    }

    pub fn one() -> Self {
        Element::term(Monomial::one(), Rational::one())
    }

    pub fn term(m: Monomial, c: Rational) -> Self {
        let mut e = Element::zero();
        e.add_term(m, c);
        e
    }

    pub fn monomial(m: Monomial) -> Self {
        Element::term(m, Rational::one())
    }

    pub fn generator(i: usize) -> Self {
        Element::monomial(Monomial::generator(i))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_assign_scaled(&mut self, other: &Element, c: &Rational) {
        if c.is_zero() {
            return;
        }
        for (m, a) in &other.terms {
            self.add_term(m.clone(), a * c);
        }
    }

    pub fn scale(&self, c: &Rational) -> Element {
        if c.is_zero() {
            return Element::zero();
        }
        Element {
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    /// Keeps the terms accepted by `keep`.
    pub fn filter(&self, mut keep: impl FnMut(&Monomial) -> bool) -> Element {
        Element {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(m))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Largest generator index appearing in any term, plus one.
    pub fn support_width(&self) -> usize {
        self.terms.keys().map(|m| m.0.len()).max().unwrap_or(0)
    }

    pub fn into_terms(self) -> BTreeMap<Monomial, Rational> {
        self.terms
    }

    /// The common denominator times the element, as an integer vector scale.
    pub fn denominators_lcm(&self) -> BigInt {
        use num_integer::Integer;
        self.terms
            .values()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }

    pub fn max_abs_coefficient(&self) -> Option<Rational> {
        self.terms.values().map(|c| c.abs()).max()
    }
}

impl std::ops::Add<&Element> for &Element {
    type Output = Element;
    fn add(self, rhs: &Element) -> Element {
        let mut out = self.clone();
        out.add_assign_scaled(rhs, &Rational::one());
        out
    }
}

impl std::ops::Sub<&Element> for &Element {
    type Output = Element;
    fn sub(self, rhs: &Element) -> Element {
        let mut out = self.clone();
        out.add_assign_scaled(rhs, &-Rational::one());
        out
    }
}

impl std::ops::Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        self.scale(&-Rational::one())
    }
}

impl std::ops::AddAssign<&Element> for Element {
    fn add_assign(&mut self, rhs: &Element) {
        self.add_assign_scaled(rhs, &Rational::one());
    }
}

impl GeneratorSet {
    pub fn new(gens: Vec<Generator>) -> Result<Self> {
        let mut index = HashMap::new();
        for (i, g) in gens.iter().enumerate() {
            if index.insert(g.name.clone(), i).is_some() {
                return Err(Error::DuplicateGenerator(g.name.clone()));
            }
        }
        Ok(GeneratorSet { gens, index })
    }

    /// Shorthand for tests and fixtures: `[("x", 3), ("y", 3)]`.
    pub fn from_pairs(pairs: &[(&str, u32)]) -> Result<Self> {
        let gens = pairs
            .iter()
            .map(|(n, d)| Generator::new(*n, *d))
            .collect::<Result<Vec<_>>>()?;
        GeneratorSet::new(gens)
    }

    /// A new set with `extra` appended after the current generators.
    pub fn extended(&self, extra: Vec<Generator>) -> Result<Self> {
        let mut gens = self.gens.clone();
        gens.extend(extra);
        GeneratorSet::new(gens)
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn get(&self, i: usize) -> &Generator {
        &self.gens[i]
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn degree(&self, i: usize) -> u32 {
        self.gens[i].degree
    }

    pub fn is_odd(&self, i: usize) -> bool {
        self.gens[i].is_odd()
    }

    pub fn odd_indices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.is_odd(i)).collect()
    }

    pub fn even_indices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| !self.is_odd(i)).collect()
    }

    pub fn monomial_degree(&self, m: &Monomial) -> u32 {
        m.factors().map(|(i, e)| self.degree(i) * e).sum()
    }

    /// Whether `m` is a valid normalized monomial of this algebra.
    pub fn is_valid_monomial(&self, m: &Monomial) -> bool {
        m.0.len() <= self.len() && m.factors().all(|(i, e)| !self.is_odd(i) || e <= 1)
    }

    /// The degree of `e` if it is homogeneous; `None` for zero or mixed degrees.
    pub fn element_degree(&self, e: &Element) -> Option<u32> {
        let mut it = e.terms().map(|(m, _)| self.monomial_degree(m));
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    pub fn is_homogeneous_of(&self, e: &Element, degree: u32) -> bool {
        e.terms().all(|(m, _)| self.monomial_degree(m) == degree)
    }

    pub fn degree_part(&self, e: &Element, degree: u32) -> Element {
        e.filter(|m| self.monomial_degree(m) == degree)
    }

    /// Product of two normalized monomials with its Koszul sign, or `None`
    /// when an odd generator would appear twice.
    pub fn mul_monomials(&self, a: &Monomial, b: &Monomial) -> Option<(bool, Monomial)> {
        let mut negative = false;
        // Number of odd generators of `a` with index greater than `j`.
        let a_odd: Vec<usize> = a.factors().map(|(i, _)| i).filter(|&i| self.is_odd(i)).collect();
        for (j, _) in b.factors() {
            if !self.is_odd(j) {
                continue;
            }
            if a.exponent(j) > 0 {
                return None;
            }
            let above = a_odd.iter().filter(|&&i| i > j).count();
            if above % 2 == 1 {
                negative = !negative;
            }
        }
        Some((negative, a.mul_exponents(b)))
    }

    pub fn mul(&self, a: &Element, b: &Element) -> Element {
        let mut out = Element::zero();
        for (ma, ca) in a.terms() {
            for (mb, cb) in b.terms() {
                if let Some((neg, m)) = self.mul_monomials(ma, mb) {
                    let c = ca * cb;
                    out.add_term(m, if neg { -c } else { c });
                }
            }
        }
        out
    }

    pub fn pow(&self, a: &Element, e: u32) -> Element {
        let mut out = Element::one();
        for _ in 0..e {
            out = self.mul(&out, a);
        }
        out
    }

    /// Writes `m` as an ordered product of single generators, returning the
    /// factor list `[i, i, j, ...]` in increasing index order.
    pub fn factor_list(&self, m: &Monomial) -> Vec<usize> {
        m.factors()
            .flat_map(|(i, e)| std::iter::repeat_n(i, e as usize))
            .collect()
    }

    /// All normalized monomials of the given degree, in increasing [`Monomial`] order.
    pub fn basis(&self, degree: u32) -> Vec<Monomial> {
        let mut out = Vec::new();
        let mut exps = vec![0u32; self.len()];
        self.basis_rec(0, degree, &mut exps, &mut out);
        out.sort();
        out
    }

    fn basis_rec(&self, i: usize, remaining: u32, exps: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if remaining == 0 {
            out.push(Monomial::from_exponents(exps.clone()));
            return;
        }
        if i == self.len() {
            return;
        }
        let d = self.degree(i);
        let max = if self.is_odd(i) { 1 } else { remaining / d };
        for e in 0..=max.min(remaining / d) {
            exps[i] = e;
            self.basis_rec(i + 1, remaining - e * d, exps, out);
        }
        exps[i] = 0;
    }

    /// Number of monomials of each degree `0..=max_degree`, without listing them.
    pub fn basis_sizes(&self, max_degree: u32) -> Vec<u64> {
        let n = max_degree as usize + 1;
        let mut sizes = vec![0u64; n];
        sizes[0] = 1;
        for g in &self.gens {
            let d = g.degree as usize;
            if g.is_odd() {
                for k in (d..n).rev() {
                    sizes[k] = sizes[k].saturating_add(sizes[k - d]);
                }
            } else {
                for k in d..n {
                    sizes[k] = sizes[k].saturating_add(sizes[k - d]);
                }
            }
        }
        sizes
    }

    /// Order used for display and for leading terms: weighted degree first,
    /// ties broken reverse lexicographically (a smaller exponent on the last
    /// differing generator makes a monomial larger).
    pub fn cmp_display(&self, a: &Monomial, b: &Monomial) -> Ordering {
        self.monomial_degree(a)
            .cmp(&self.monomial_degree(b))
            .then_with(|| {
                let n = a.0.len().max(b.0.len());
                for i in (0..n).rev() {
                    let (x, y) = (a.exponent(i), b.exponent(i));
                    if x != y {
                        return y.cmp(&x);
                    }
                }
                Ordering::Equal
            })
    }

    /// Terms of `e` sorted from largest to smallest in display order.
    pub fn sorted_terms<'a>(&self, e: &'a Element) -> Vec<(&'a Monomial, &'a Rational)> {
        let mut v: Vec<_> = e.terms().collect();
        v.sort_by(|a, b| self.cmp_display(b.0, a.0));
        v
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.name, self.degree)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set() -> GeneratorSet {
        GeneratorSet::from_pairs(&[("x", 3), ("y", 3), ("z", 5), ("a", 2), ("b", 4)]).unwrap()
    }

    #[test]
    fn odd_generators_anticommute() {
        let g = set();
        let x = Element::generator(0);
        let y = Element::generator(1);
        let xy = g.mul(&x, &y);
        let yx = g.mul(&y, &x);
        assert_eq!(xy, -&yx);
        assert!(g.mul(&x, &x).is_zero());
    }

    #[test]
    fn even_generators_commute() {
        let g = set();
        let a = Element::generator(3);
        let x = Element::generator(0);
        assert_eq!(g.mul(&a, &x), g.mul(&x, &a));
        assert_eq!(g.pow(&a, 3), Element::monomial(Monomial::power(3, 3)));
    }

    #[test]
    fn koszul_sign_on_longer_words() {
        let g = set();
        // (x z) * y = - x y z
        let xz = g.mul(&Element::generator(0), &Element::generator(2));
        let xzy = g.mul(&xz, &Element::generator(1));
        let xyz = g.mul(&g.mul(&Element::generator(0), &Element::generator(1)), &Element::generator(2));
        assert_eq!(xzy, -&xyz);
    }

    #[test]
    fn basis_counts_match_generating_function() {
        let g = set();
        let sizes = g.basis_sizes(20);
        for d in 0..=20 {
            assert_eq!(g.basis(d).len() as u64, sizes[d as usize], "degree {d}");
        }
        assert_eq!(g.basis(0), vec![Monomial::one()]);
        // degree 6: xy, a^3, ab
        assert_eq!(sizes[6], 3);
    }

    #[test]
    fn display_order_is_graded_reverse_lex() {
        let g = GeneratorSet::from_pairs(&[("x", 3), ("y", 3), ("t", 2)]).unwrap();
        let xyt = Monomial::from_exponents(vec![1, 1, 1]);
        let t4 = Monomial::power(2, 4);
        assert_eq!(g.cmp_display(&xyt, &t4), Ordering::Greater);
    }

    fn arb_element() -> impl Strategy<Value = Element> {
        proptest::collection::vec(
            (proptest::collection::vec(0u32..3, 5), -3i64..4),
            0..5,
        )
        .prop_map(|terms| {
            let g = set();
            let mut e = Element::zero();
            for (mut exps, c) in terms {
                for (i, x) in exps.iter_mut().enumerate() {
                    if g.is_odd(i) {
                        *x = (*x).min(1);
                    }
                }
                e.add_term(Monomial::from_exponents(exps), rat(c));
            }
            e
        })
    }

    fn arb_homogeneous() -> impl Strategy<Value = (Element, u32)> {
        (arb_element(), 0u32..12).prop_map(|(e, d)| {
            let g = set();
            let part = g.degree_part(&e, d);
            (part, d)
        })
    }

    proptest! {
        #[test]
        fn multiplication_is_associative(a in arb_element(), b in arb_element(), c in arb_element()) {
            let g = set();
            prop_assert_eq!(g.mul(&g.mul(&a, &b), &c), g.mul(&a, &g.mul(&b, &c)));
        }

        #[test]
        fn multiplication_is_graded_commutative((a, p) in arb_homogeneous(), (b, q) in arb_homogeneous()) {
            let g = set();
            let ab = g.mul(&a, &b);
            let ba = g.mul(&b, &a);
            if (p * q) % 2 == 1 {
                prop_assert_eq!(ab, -&ba);
            } else {
                prop_assert_eq!(ab, ba);
            }
        }

        #[test]
        fn multiplication_distributes(a in arb_element(), b in arb_element(), c in arb_element()) {
            let g = set();
            prop_assert_eq!(g.mul(&a, &(&b + &c)), &g.mul(&a, &b) + &g.mul(&a, &c));
        }
    }
}
