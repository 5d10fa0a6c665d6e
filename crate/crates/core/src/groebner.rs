//! Buchberger's algorithm over the rationals for weighted graded reverse
//! lexicographic orders, with the zero-dimensionality test and the count of
//! standard monomials.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::gca::Rational;

/// Default cap on the number of polynomials in a basis.
pub const DEFAULT_GROEBNER_CAP: usize = 5000;

/// Exponent vector of fixed length `nvars`.
pub type Exps = Vec<u32>;

/// A monomial order on `nvars` variables: weighted degree, then reverse
/// lexicographic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialOrder {
    weights: Vec<u32>,
}

impl MonomialOrder {
    pub fn new(weights: Vec<u32>) -> Self {
        MonomialOrder { weights }
    }

    pub fn nvars(&self) -> usize {
        self.weights.len()
    }

    pub fn weighted_degree(&self, a: &[u32]) -> u64 {
        a.iter().zip(&self.weights).map(|(&e, &w)| e as u64 * w as u64).sum()
    }

    pub fn cmp(&self, a: &[u32], b: &[u32]) -> Ordering {
        self.weighted_degree(a)
            .cmp(&self.weighted_degree(b))
            .then_with(|| {
                for i in (0..a.len()).rev() {
                    if a[i] != b[i] {
                        return b[i].cmp(&a[i]);
                    }
                }
                Ordering::Equal
            })
    }
}

/// A polynomial with terms sorted from largest to smallest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    terms: Vec<(Exps, Rational)>,
}

fn divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn lcm(a: &[u32], b: &[u32]) -> Exps {
    a.iter().zip(b).map(|(x, y)| *x.max(y)).collect()
}

fn sub_exps(a: &[u32], b: &[u32]) -> Exps {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn add_exps(a: &[u32], b: &[u32]) -> Exps {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

impl Poly {
    pub fn zero() -> Self {
        Poly { terms: Vec::new() }
    }

    /// Builds a polynomial from arbitrary terms, merging duplicates.
    pub fn from_terms(order: &MonomialOrder, terms: Vec<(Exps, Rational)>) -> Self {
        let mut terms = terms;
        terms.sort_by(|a, b| order.cmp(&b.0, &a.0));
        let mut out: Vec<(Exps, Rational)> = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            match out.last_mut() {
                Some((lm, lc)) if *lm == m => *lc += c,
                _ => out.push((m, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        Poly { terms: out }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[(Exps, Rational)] {
        &self.terms
    }

    pub fn leading_monomial(&self) -> Option<&Exps> {
        self.terms.first().map(|t| &t.0)
    }

    fn leading_coefficient(&self) -> &Rational {
        &self.terms[0].1
    }

    fn make_monic(&mut self) {
        if let Some((_, c)) = self.terms.first() {
            if !c.is_one() {
                let inv = c.recip();
                for (_, x) in self.terms.iter_mut() {
                    *x *= &inv;
                }
            }
        }
    }

    /// `self - c * x^shift * q`.
    fn sub_shifted(&self, order: &MonomialOrder, c: &Rational, shift: &[u32], q: &Poly) -> Poly {
        let mut out = Vec::with_capacity(self.terms.len() + q.terms.len());
        let shifted: Vec<(Exps, Rational)> = q
            .terms
            .iter()
            .map(|(m, x)| (add_exps(m, shift), -(c * x)))
            .collect();
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() || j < shifted.len() {
            let ord = match (self.terms.get(i), shifted.get(j)) {
                (Some(a), Some(b)) => order.cmp(&a.0, &b.0),
                (Some(_), None) => Ordering::Greater,
                (None, Some(_)) => Ordering::Less,
                (None, None) => unreachable!(),
            };
            match ord {
                Ordering::Greater => {
                    out.push(self.terms[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    out.push(shifted[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let s = &self.terms[i].1 + &shifted[j].1;
                    if !s.is_zero() {
                        out.push((self.terms[i].0.clone(), s));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        Poly { terms: out }
    }
}

/// Full reduction of `p` by `basis` (all terms, not only the leading one).
pub fn normal_form(order: &MonomialOrder, p: &Poly, basis: &[Poly]) -> Poly {
    let mut p = p.clone();
    let mut rem: Vec<(Exps, Rational)> = Vec::new();
    while let Some((m, c)) = p.terms.first().cloned() {
        let divisor = basis
            .iter()
            .find(|g| g.leading_monomial().is_some_and(|lm| divides(lm, &m)));
        match divisor {
            Some(g) => {
                let shift = sub_exps(&m, g.leading_monomial().unwrap());
                let factor = c / g.leading_coefficient();
                p = p.sub_shifted(order, &factor, &shift, g);
            }
            None => {
                rem.push((m, c));
                p.terms.remove(0);
            }
        }
    }
    Poly { terms: rem }
}

fn s_polynomial(order: &MonomialOrder, f: &Poly, g: &Poly) -> Poly {
    let lf = f.leading_monomial().unwrap();
    let lg = g.leading_monomial().unwrap();
    let l = lcm(lf, lg);
    let sf = sub_exps(&l, lf);
    let sg = sub_exps(&l, lg);
    // (1/lc f) x^sf f - (1/lc g) x^sg g
    let a = Poly::zero().sub_shifted(order, &-f.leading_coefficient().recip(), &sf, f);
    a.sub_shifted(order, &g.leading_coefficient().recip(), &sg, g)
}

/// Statistics of a Buchberger run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GroebnerStats {
    pub pairs_considered: usize,
    pub pairs_skipped: usize,
    pub reductions_to_zero: usize,
}

/// A reduced Gröbner basis, sorted by leading monomial.
#[derive(Clone, Debug)]
pub struct GroebnerBasis {
    pub order: MonomialOrder,
    pub polys: Vec<Poly>,
    pub stats: GroebnerStats,
}

/// Computes the reduced Gröbner basis of the ideal generated by `gens`.
pub fn groebner_basis(order: &MonomialOrder, gens: &[Poly], cap: usize) -> Result<GroebnerBasis> {
    let mut basis: Vec<Poly> = Vec::new();
    let mut stats = GroebnerStats::default();
    for g in gens {
        let mut r = normal_form(order, g, &basis);
        if !r.is_zero() {
            r.make_monic();
            basis.push(r);
        }
    }
    let mut pending: BTreeSet<(usize, usize)> = BTreeSet::new();
    for j in 0..basis.len() {
        for i in 0..j {
            pending.insert((i, j));
        }
    }
    while !pending.is_empty() {
        // Normal selection: the pair with the smallest lcm, ties by indices.
        let &(i, j) = pending
            .iter()
            .min_by(|a, b| {
                let la = lcm(basis[a.0].leading_monomial().unwrap(), basis[a.1].leading_monomial().unwrap());
                let lb = lcm(basis[b.0].leading_monomial().unwrap(), basis[b.1].leading_monomial().unwrap());
                order.cmp(&la, &lb).then(a.cmp(b))
            })
            .unwrap();
        pending.remove(&(i, j));
        stats.pairs_considered += 1;
        let li = basis[i].leading_monomial().unwrap().clone();
        let lj = basis[j].leading_monomial().unwrap().clone();
        let l = lcm(&li, &lj);
        // Coprime leading monomials reduce to zero.
        if li.iter().zip(&lj).all(|(a, b)| *a == 0 || *b == 0) {
            stats.pairs_skipped += 1;
            continue;
        }
        // Chain criterion.
        let key = |a: usize, b: usize| if a < b { (a, b) } else { (b, a) };
        let chain = (0..basis.len()).any(|k| {
            k != i
                && k != j
                && divides(basis[k].leading_monomial().unwrap(), &l)
                && !pending.contains(&key(i, k))
                && !pending.contains(&key(j, k))
        });
        if chain {
            stats.pairs_skipped += 1;
            continue;
        }
        let s = s_polynomial(order, &basis[i], &basis[j]);
        let mut r = normal_form(order, &s, &basis);
        if r.is_zero() {
            stats.reductions_to_zero += 1;
            continue;
        }
        r.make_monic();
        let k = basis.len();
        basis.push(r);
        if basis.len() > cap {
            return Err(Error::GroebnerCapExceeded { cap });
        }
        for i in 0..k {
            pending.insert((i, k));
        }
    }
    Ok(GroebnerBasis {
        order: order.clone(),
        polys: reduce_basis(order, basis),
        stats,
    })
}

fn reduce_basis(order: &MonomialOrder, basis: Vec<Poly>) -> Vec<Poly> {
    let mut minimal: Vec<Poly> = Vec::new();
    for (k, g) in basis.iter().enumerate() {
        let lg = g.leading_monomial().unwrap();
        let redundant = basis.iter().enumerate().any(|(m, h)| {
            let lh = h.leading_monomial().unwrap();
            m != k && divides(lh, lg) && (lh != lg || m < k)
        });
        if !redundant {
            minimal.push(g.clone());
        }
    }
    let mut reduced = Vec::with_capacity(minimal.len());
    for k in 0..minimal.len() {
        let others: Vec<Poly> = minimal
            .iter()
            .enumerate()
            .filter(|(m, _)| *m != k)
            .map(|(_, p)| p.clone())
            .collect();
        let head = Poly {
            terms: vec![minimal[k].terms[0].clone()],
        };
        let tail = Poly {
            terms: minimal[k].terms[1..].to_vec(),
        };
        let tail = normal_form(order, &tail, &others);
        let mut terms = head.terms;
        terms.extend(tail.terms);
        let mut p = Poly { terms };
        p.make_monic();
        reduced.push(p);
    }
    reduced.sort_by(|a, b| order.cmp(a.leading_monomial().unwrap(), b.leading_monomial().unwrap()));
    reduced
}

impl GroebnerBasis {
    pub fn leading_monomials(&self) -> Vec<Exps> {
        self.polys
            .iter()
            .map(|p| p.leading_monomial().unwrap().clone())
            .collect()
    }

    pub fn is_unit_ideal(&self) -> bool {
        self.polys
            .iter()
            .any(|p| p.leading_monomial().unwrap().iter().all(|&e| e == 0))
    }

    /// For each variable, the exponent of a pure power among the leading
    /// monomials, if any.
    pub fn pure_powers(&self) -> Vec<Option<u32>> {
        let n = self.order.nvars();
        let mut out = vec![None; n];
        for lm in self.leading_monomials() {
            let nonzero: Vec<usize> = (0..n).filter(|&i| lm[i] > 0).collect();
            if let [i] = nonzero[..] {
                let e = lm[i];
                out[i] = Some(out[i].map_or(e, |x: u32| x.min(e)));
            }
        }
        out
    }

    /// The quotient is finite dimensional iff every variable has a pure power.
    pub fn is_zero_dimensional(&self) -> bool {
        self.is_unit_ideal() || self.pure_powers().iter().all(|p| p.is_some())
    }

    /// Number of standard monomials, when the ideal is zero dimensional.
    pub fn quotient_dimension(&self) -> Option<usize> {
        if self.is_unit_ideal() {
            return Some(0);
        }
        let bounds: Vec<u32> = self.pure_powers().into_iter().collect::<Option<_>>()?;
        let leads = self.leading_monomials();
        let mut count = 0usize;
        let mut exps = vec![0u32; bounds.len()];
        count_standard(0, &bounds, &leads, &mut exps, &mut count);
        Some(count)
    }

    pub fn normal_form(&self, p: &Poly) -> Poly {
        normal_form(&self.order, p, &self.polys)
    }
}

fn count_standard(i: usize, bounds: &[u32], leads: &[Exps], exps: &mut Exps, count: &mut usize) {
    if i == bounds.len() {
        *count += 1;
        return;
    }
    for e in 0..bounds[i] {
        exps[i] = e;
        // Prefixes only grow, so a divisible prefix stays divisible.
        let blocked = leads.iter().any(|l| {
            l[i + 1..].iter().all(|&x| x == 0) && divides(l, exps)
        });
        if blocked {
            break;
        }
        count_standard(i + 1, bounds, leads, exps, count);
    }
    exps[i] = 0;
}
