//! Sparse linear algebra: exact ranks, ranks modulo a prime, and an
//! incremental solver used to find differential corrections.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::gca::Rational;

/// A sparse row: `(column, value)` pairs sorted by column, no zero values.
pub type SparseRow<T> = Vec<(usize, T)>;

/// The Mersenne prime `2^61 - 1`, used for modular ranks.
pub const PRIME: u64 = (1u64 << 61) - 1;

/// Exact rank of a sparse rational matrix given by rows.
pub fn rank_rational(rows: &[SparseRow<Rational>]) -> usize {
    let int_rows = rows.iter().map(|r| integer_row(r)).collect();
    rank_integer(int_rows)
}

/// Clears denominators and removes the content of a rational row.
pub fn integer_row(row: &[(usize, Rational)]) -> SparseRow<BigInt> {
    let lcm = row
        .iter()
        .fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()));
    let mut out: SparseRow<BigInt> = row
        .iter()
        .map(|(j, c)| (*j, c.numer() * (&lcm / c.denom())))
        .collect();
    normalize_content(&mut out);
    out
}

fn normalize_content(row: &mut SparseRow<BigInt>) {
    let mut g = BigInt::zero();
    for (_, c) in row.iter() {
        g = g.gcd(c);
        if g.is_one() {
            break;
        }
    }
    let negate = row.first().is_some_and(|(_, c)| c.is_negative());
    if g.is_zero() {
        return;
    }
    if !g.is_one() || negate {
        let g = if negate { -g } else { g };
        for (_, c) in row.iter_mut() {
            *c = &*c / &g;
        }
    }
}

/// `a * x - b * y` on sparse rows, dropping cancelled entries.
fn combine(x: &SparseRow<BigInt>, a: &BigInt, y: &SparseRow<BigInt>, b: &BigInt) -> SparseRow<BigInt> {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        let cx = x.get(i).map(|e| e.0);
        let cy = y.get(j).map(|e| e.0);
        match (cx, cy) {
            (Some(p), Some(q)) if p == q => {
                let v = a * &x[i].1 - b * &y[j].1;
                if !v.is_zero() {
                    out.push((p, v));
                }
                i += 1;
                j += 1;
            }
            (Some(p), Some(q)) if p < q => {
                out.push((p, a * &x[i].1));
                i += 1;
            }
            (Some(p), None) => {
                out.push((p, a * &x[i].1));
                i += 1;
            }
            (_, Some(q)) => {
                out.push((q, -(b * &y[j].1)));
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}

/// Exact rank of an integer matrix by fraction-free sparse elimination.
pub fn rank_integer(mut rows: Vec<SparseRow<BigInt>>) -> usize {
    rows.retain(|r| !r.is_empty());
    rows.sort_by_key(|r| r.len());
    let mut pivots: BTreeMap<usize, SparseRow<BigInt>> = BTreeMap::new();
    for mut row in rows {
        normalize_content(&mut row);
        while let Some(&(lead, _)) = row.first() {
            match pivots.get(&lead) {
                Some(p) => {
                    let a = &row[0].1;
                    let b = &p[0].1;
                    let g = a.gcd(b);
                    let (fa, fb) = (b / &g, a / &g);
                    row = combine(&row, &fa, p, &fb);
                    normalize_content(&mut row);
                }
                None => {
                    pivots.insert(lead, row);
                    break;
                }
            }
        }
    }
    pivots.len()
}

fn mul_mod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % PRIME as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a);
        }
        a = mul_mod(a, a);
        e >>= 1;
    }
    r
}

fn inv_mod(a: u64) -> u64 {
    pow_mod(a, PRIME - 2)
}

fn bigint_mod(n: &BigInt) -> u64 {
    let p = BigInt::from(PRIME);
    let r = n.mod_floor(&p);
    r.to_u64().expect("reduced value fits")
}

/// Image of a rational in `F_p`, or `None` if the prime divides the denominator.
pub fn rational_mod(c: &Rational) -> Option<u64> {
    let d = bigint_mod(c.denom());
    if d == 0 {
        return None;
    }
    Some(mul_mod(bigint_mod(c.numer()), inv_mod(d)))
}

/// Rank over `F_p` of a matrix whose rows are given modulo the prime.
///
/// Never exceeds the rational rank of any lift, so cohomology dimensions
/// computed from it are upper bounds.
pub fn rank_mod_p(mut rows: Vec<SparseRow<u64>>) -> usize {
    rows.retain(|r| !r.is_empty());
    rows.sort_by_key(|r| r.len());
    let mut pivots: BTreeMap<usize, SparseRow<u64>> = BTreeMap::new();
    for mut row in rows {
        while let Some(&(lead, a)) = row.first() {
            match pivots.get(&lead) {
                Some(p) => {
                    // p is monic: row -= a * p
                    let factor = PRIME - a;
                    row = axpy_mod(&row, p, factor);
                }
                None => {
                    let inv = inv_mod(a);
                    for (_, v) in row.iter_mut() {
                        *v = mul_mod(*v, inv);
                    }
                    pivots.insert(lead, row);
                    break;
                }
            }
        }
    }
    pivots.len()
}

/// `x + f * y` modulo the prime.
fn axpy_mod(x: &SparseRow<u64>, y: &SparseRow<u64>, f: u64) -> SparseRow<u64> {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        let cx = x.get(i).map(|e| e.0);
        let cy = y.get(j).map(|e| e.0);
        match (cx, cy) {
            (Some(p), Some(q)) if p == q => {
                let v = (x[i].1 + mul_mod(f, y[j].1)) % PRIME;
                if v != 0 {
                    out.push((p, v));
                }
                i += 1;
                j += 1;
            }
            (Some(p), Some(q)) if p < q => {
                out.push((p, x[i].1));
                i += 1;
            }
            (Some(p), None) => {
                out.push((p, x[i].1));
                i += 1;
            }
            (_, Some(q)) => {
                out.push((q, mul_mod(f, y[j].1)));
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}

/// Reduces a rational matrix modulo the prime; `None` if some denominator vanishes.
pub fn rows_mod_p(rows: &[SparseRow<Rational>]) -> Option<Vec<SparseRow<u64>>> {
    rows.iter()
        .map(|r| {
            r.iter()
                .map(|(j, c)| rational_mod(c).map(|v| (*j, v)))
                .filter(|e| !matches!(e, Some((_, 0))))
                .collect::<Option<Vec<_>>>()
        })
        .collect()
}

/// Incremental row echelon form over the rationals on vectors indexed by
/// keys `K`, remembering how each echelon row was built from the inserted
/// vectors so that solutions can be read back.
#[derive(Clone, Debug)]
pub struct Echelon<K: Ord + Clone> {
    rows: Vec<EchelonRow<K>>,
    pivot_of: BTreeMap<K, usize>,
    inserted: usize,
}

#[derive(Clone, Debug)]
struct EchelonRow<K: Ord + Clone> {
    vector: BTreeMap<K, Rational>,
    combination: BTreeMap<usize, Rational>,
}

/// Result of [`Echelon::solve`].
#[derive(Clone, Debug, PartialEq)]
pub enum Solve<K: Ord + Clone> {
    /// Coefficients on the inserted vectors, by insertion index.
    Solution(BTreeMap<usize, Rational>),
    /// The fully reduced residual of the target.
    Residual(BTreeMap<K, Rational>),
}

impl<K: Ord + Clone> Default for Echelon<K> {
    fn default() -> Self {
        Echelon {
            rows: Vec::new(),
            pivot_of: BTreeMap::new(),
            inserted: 0,
        }
    }
}

impl<K: Ord + Clone> Echelon<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn inserted(&self) -> usize {
        self.inserted
    }

    fn reduce(&self, v: &mut BTreeMap<K, Rational>, combo: &mut BTreeMap<usize, Rational>) {
        // Eliminate every pivot key, scanning keys in increasing order.
        let mut cursor: Option<K> = None;
        loop {
            let next = match &cursor {
                None => v.keys().find(|k| self.pivot_of.contains_key(k)).cloned(),
                Some(c) => v
                    .range((std::ops::Bound::Excluded(c.clone()), std::ops::Bound::Unbounded))
                    .map(|(k, _)| k)
                    .find(|k| self.pivot_of.contains_key(k))
                    .cloned(),
            };
            let Some(key) = next else { break };
            let row = &self.rows[self.pivot_of[&key]];
            let factor = v[&key].clone() / &row.vector[&key];
            for (k, c) in &row.vector {
                let entry = v.entry(k.clone()).or_insert_with(Rational::zero);
                *entry -= &factor * c;
                if entry.is_zero() {
                    v.remove(k);
                }
            }
            for (i, c) in &row.combination {
                let entry = combo.entry(*i).or_insert_with(Rational::zero);
                *entry -= &factor * c;
                if entry.is_zero() {
                    combo.remove(i);
                }
            }
            cursor = Some(key);
        }
    }

    /// Inserts a vector and returns whether it increased the rank.
    pub fn insert(&mut self, vector: BTreeMap<K, Rational>) -> bool {
        let index = self.inserted;
        self.inserted += 1;
        let mut v = vector;
        v.retain(|_, c| !c.is_zero());
        let mut combo = BTreeMap::new();
        combo.insert(index, Rational::one());
        self.reduce(&mut v, &mut combo);
        let Some(lead) = v.keys().next().cloned() else {
            return false;
        };
        // Keep the echelon fully reduced on pivot keys.
        let lead_coef = v[&lead].clone();
        for row in self.rows.iter_mut() {
            if let Some(c) = row.vector.get(&lead).cloned() {
                let factor = c / &lead_coef;
                for (k, x) in &v {
                    let e = row.vector.entry(k.clone()).or_insert_with(Rational::zero);
                    *e -= &factor * x;
                    if e.is_zero() {
                        row.vector.remove(k);
                    }
                }
                for (i, x) in &combo {
                    let e = row.combination.entry(*i).or_insert_with(Rational::zero);
                    *e -= &factor * x;
                    if e.is_zero() {
                        row.combination.remove(i);
                    }
                }
            }
        }
        self.pivot_of.insert(lead, self.rows.len());
        self.rows.push(EchelonRow {
            vector: v,
            combination: combo,
        });
        true
    }

    /// Finds coefficients `c` with `sum c_i v_i = target`, or the reduced residual.
    pub fn solve(&self, target: &BTreeMap<K, Rational>) -> Solve<K> {
        let mut v = target.clone();
        v.retain(|_, c| !c.is_zero());
        let mut combo = BTreeMap::new();
        self.reduce(&mut v, &mut combo);
        if v.is_empty() {
            // target - sum(combo_i v_i) = 0 with combo accumulated negatively.
            Solution(combo.into_iter().map(|(i, c)| (i, -c)).collect())
        } else {
            Residual(v)
        }
    }
}

use Solve::{Residual, Solution};
