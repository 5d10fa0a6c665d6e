//! Sullivan models `(ΛV, d)` and KS extensions over polynomial bases.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::format::format_element;
use crate::gca::{Element, Generator, GeneratorSet, Monomial, Rational};
use crate::linalg::{self, SparseRow};

/// Default cap on the size of a degreewise basis.
pub const DEFAULT_MAX_BASIS: usize = 200_000;

/// A free graded-commutative algebra with a differential given on generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SullivanModel {
    gens: GeneratorSet,
    diff: Vec<Element>,
}

/// Outcome of checking `d ∘ d = 0` generator by generator.
#[derive(Clone, Debug, Serialize)]
pub struct DSquaredReport {
    pub ok: bool,
    /// Generators on which `d(d(v)) != 0`, with the offending value.
    pub failures: Vec<(String, String)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RankMethod {
    /// Exact rational ranks.
    Exact,
    /// Ranks modulo a large prime: dimensions are certified upper bounds.
    ModP,
}

#[derive(Clone, Debug)]
pub struct CohomologyOptions {
    pub max_basis: usize,
    pub method: RankMethod,
}

impl Default for CohomologyOptions {
    fn default() -> Self {
        CohomologyOptions {
            max_basis: DEFAULT_MAX_BASIS,
            method: RankMethod::Exact,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Cohomology {
    /// `degree -> dim H^degree` (exact or upper bound, see `method`).
    pub dims: BTreeMap<u32, usize>,
    pub method: RankMethod,
}

impl Cohomology {
    pub fn total(&self) -> usize {
        self.dims.values().sum()
    }

    /// Largest degree with nonzero cohomology.
    pub fn top_degree(&self) -> Option<u32> {
        self.dims.iter().filter(|(_, &d)| d > 0).map(|(&k, _)| k).max()
    }
}

impl SullivanModel {
    /// Builds a model, checking that `d` raises degree by one on every
    /// generator and that `d ∘ d = 0`.
    pub fn new(gens: GeneratorSet, diff: Vec<Element>) -> Result<Self> {
        let model = Self::new_unchecked(gens, diff)?;
        let report = model.check_d_squared();
        if let Some((generator, value)) = report.failures.into_iter().next() {
            return Err(Error::DSquaredNonzero { generator, value });
        }
        Ok(model)
    }

    /// Builds a model checking only degrees; `d ∘ d` is not verified.
    pub fn new_unchecked(gens: GeneratorSet, mut diff: Vec<Element>) -> Result<Self> {
        if diff.len() > gens.len() {
            return Err(Error::Inconsistent(
                "more differentials than generators".into(),
            ));
        }
        diff.resize(gens.len(), Element::zero());
        for (i, e) in diff.iter().enumerate() {
            let degree = gens.degree(i) + 1;
            let valid = e
                .terms()
                .all(|(m, _)| gens.is_valid_monomial(m) && gens.monomial_degree(m) == degree);
            if !valid {
                return Err(Error::DegreeMismatch {
                    element: format_element(&gens, e),
                    expected: degree,
                });
            }
        }
        Ok(SullivanModel { gens, diff })
    }

    /// Assembles a model without any validation.
    pub(crate) fn from_parts(gens: GeneratorSet, diff: Vec<Element>) -> Self {
        SullivanModel { gens, diff }
    }

    /// A model with zero differential.
    pub fn free(gens: GeneratorSet) -> Self {
        let diff = vec![Element::zero(); gens.len()];
        SullivanModel { gens, diff }
    }

    pub fn generators(&self) -> &GeneratorSet {
        &self.gens
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn differential(&self, i: usize) -> &Element {
        &self.diff[i]
    }

    pub fn differentials(&self) -> &[Element] {
        &self.diff
    }

    /// Applies `d` to a single monomial by the Leibniz rule.
    pub fn apply_monomial(&self, m: &Monomial) -> Element {
        let mut out = Element::zero();
        let exps = m.exponents();
        for (i, e) in m.factors() {
            if self.diff[i].is_zero() {
                continue;
            }
            let prefix = Monomial::from_exponents(exps[..i].to_vec());
            let mut rest = exps.to_vec();
            rest[..i].iter_mut().for_each(|x| *x = 0);
            rest[i] -= 1;
            let suffix = Monomial::from_exponents(rest);
            // d(prefix * x_i^e * ...) picks up (-1)^{|prefix|} and, for even x_i, the factor e.
            let sign_negative = self.gens.monomial_degree(&prefix) % 2 == 1;
            let coeff = Rational::from_integer(e.into());
            let coeff = if sign_negative { -coeff } else { coeff };
            let left = self.gens.mul(&Element::monomial(prefix), &self.diff[i]);
            let term = self.gens.mul(&left, &Element::monomial(suffix));
            out.add_assign_scaled(&term, &coeff);
        }
        out
    }

    pub fn apply(&self, e: &Element) -> Element {
        let mut out = Element::zero();
        for (m, c) in e.terms() {
            out.add_assign_scaled(&self.apply_monomial(m), c);
        }
        out
    }

    pub fn check_d_squared(&self) -> DSquaredReport {
        let failures: Vec<(String, String)> = (0..self.len())
            .filter_map(|i| {
                let dd = self.apply(&self.diff[i]);
                (!dd.is_zero()).then(|| {
                    (
                        self.gens.get(i).name.clone(),
                        format_element(&self.gens, &dd),
                    )
                })
            })
            .collect();
        DSquaredReport {
            ok: failures.is_empty(),
            failures,
        }
    }

    /// Sum of odd degrees minus the sum of `(|w| - 1)` over even generators.
    pub fn formal_dimension(&self) -> i64 {
        self.gens
            .generators()
            .iter()
            .map(|g| {
                if g.is_odd() {
                    g.degree as i64
                } else {
                    -(g.degree as i64 - 1)
                }
            })
            .sum()
    }

    /// Number of odd generators minus number of even generators.
    pub fn homotopy_euler_deficit(&self) -> i64 {
        let odd = self.gens.odd_indices().len() as i64;
        odd - (self.len() as i64 - odd)
    }

    /// Minimal means no differential has a linear term.
    pub fn is_minimal(&self) -> bool {
        self.diff.iter().all(|e| e.terms().all(|(m, _)| m.length() != 1))
    }

    pub fn minimality_violation(&self) -> Option<String> {
        self.diff
            .iter()
            .position(|e| e.terms().any(|(m, _)| m.length() == 1))
            .map(|i| self.gens.get(i).name.clone())
    }

    /// Pure means `d` vanishes on even generators and sends odd ones into
    /// the polynomial algebra on the even generators.
    pub fn is_pure(&self) -> bool {
        (0..self.len()).all(|i| {
            if self.gens.is_odd(i) {
                self.diff[i]
                    .terms()
                    .all(|(m, _)| m.factors().all(|(j, _)| !self.gens.is_odd(j)))
            } else {
                self.diff[i].is_zero()
            }
        })
    }

    /// Degreewise cohomology dimensions for the given degrees.
    pub fn cohomology(&self, degrees: RangeInclusive<u32>, opts: &CohomologyOptions) -> Result<Cohomology> {
        let lo = *degrees.start();
        let hi = *degrees.end();
        let sizes = self.gens.basis_sizes(hi + 1);
        for k in lo.saturating_sub(1)..=hi + 1 {
            let size = sizes[k as usize];
            if size > opts.max_basis as u64 {
                return Err(Error::BasisTooLarge {
                    degree: k,
                    size: size as usize,
                    cap: opts.max_basis,
                });
            }
        }
        let rank_degrees: BTreeSet<u32> = (lo.saturating_sub(1)..=hi).collect();
        let ranks: BTreeMap<u32, usize> = rank_degrees
            .par_iter()
            .map(|&k| (k, self.differential_rank(k, opts.method)))
            .collect();
        let dims = (lo..=hi)
            .map(|k| {
                let incoming = if k == 0 { 0 } else { ranks[&(k - 1)] };
                let dim = sizes[k as usize] as usize - ranks[&k] - incoming;
                (k, dim)
            })
            .collect();
        Ok(Cohomology {
            dims,
            method: opts.method,
        })
    }

    /// The matrix of `d: A^k -> A^{k+1}` as sparse rows, one per basis monomial of degree `k`.
    pub fn differential_matrix(&self, k: u32) -> Vec<SparseRow<Rational>> {
        let source = self.gens.basis(k);
        let target = self.gens.basis(k + 1);
        let column: HashMap<&Monomial, usize> =
            target.iter().enumerate().map(|(j, m)| (m, j)).collect();
        source
            .par_iter()
            .map(|m| {
                let image = self.apply_monomial(m);
                let mut row: SparseRow<Rational> = image
                    .terms()
                    .map(|(mm, c)| (column[mm], c.clone()))
                    .collect();
                row.sort_by_key(|e| e.0);
                row
            })
            .collect()
    }

    fn differential_rank(&self, k: u32, method: RankMethod) -> usize {
        let rows = self.differential_matrix(k);
        match method {
            RankMethod::Exact => linalg::rank_rational(&rows),
            RankMethod::ModP => match linalg::rows_mod_p(&rows) {
                Some(r) => linalg::rank_mod_p(r),
                None => linalg::rank_rational(&rows),
            },
        }
    }

    /// Tensor product with disjoint generator names.
    pub fn tensor(&self, other: &SullivanModel) -> Result<SullivanModel> {
        let offset = self.len();
        let gens = self.gens.extended(other.gens.generators().to_vec())?;
        let map: Vec<Option<usize>> = (0..other.len()).map(|i| Some(i + offset)).collect();
        let mut diff = self.diff.clone();
        for e in &other.diff {
            diff.push(reindex_element(e, &map));
        }
        Ok(SullivanModel { gens, diff })
    }
}

/// Reindexes every term through `map`, dropping terms that hit a `None`.
///
/// The map must preserve the relative order of odd generators so that no
/// sign change is needed.
pub fn reindex_element(e: &Element, map: &[Option<usize>]) -> Element {
    let mut out = Element::zero();
    for (m, c) in e.terms() {
        if let Some(mm) = m.reindex(map) {
            out.add_term(mm, c.clone());
        }
    }
    out
}

/// Names for `n` new base generators of degree 2 that do not clash with `fiber`.
pub fn fresh_base_names(fiber: &GeneratorSet, n: usize) -> Vec<String> {
    let mut offset = 0;
    loop {
        let names: Vec<String> = (1..=n).map(|k| format!("t{}", k + offset)).collect();
        if names.iter().all(|s| fiber.index_of(s).is_none()) {
            return names;
        }
        offset += 1;
    }
}

/// A KS extension `(Q[t_1..t_n] ⊗ ΛV, D)` of a fiber model `(ΛV, d)`.
///
/// Generators of the total model are the fiber generators in order followed
/// by the base generators; `D t_j = 0` and `D v - d v` lies in the ideal `(t)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KsExtension {
    fiber: SullivanModel,
    total: SullivanModel,
}

/// The result of killing base generators of an extension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Restriction {
    Extension(KsExtension),
    Fiber(SullivanModel),
}

impl KsExtension {
    /// Builds the extension with `D v = d v + perturbation(v)`.
    ///
    /// Perturbations are elements of the total algebra (fiber generators then
    /// `n` base generators), keyed by fiber generator index.
    pub fn new(fiber: SullivanModel, n: usize, perturbation: &BTreeMap<usize, Element>) -> Result<Self> {
        let names = fresh_base_names(fiber.generators(), n);
        let extra = names
            .into_iter()
            .map(|s| Generator::new(s, 2))
            .collect::<Result<Vec<_>>>()?;
        let gens = fiber.generators().extended(extra)?;
        let mut diff = fiber.differentials().to_vec();
        for (&i, p) in perturbation {
            if i >= fiber.len() {
                return Err(Error::Inconsistent(format!(
                    "perturbation index {i} is not a fiber generator"
                )));
            }
            diff[i] += p;
        }
        diff.resize(gens.len(), Element::zero());
        let total = SullivanModel::new(gens, diff)?;
        Self::from_total(fiber, total)
    }

    /// Like [`KsExtension::new`] without checking `D ∘ D = 0`.
    pub fn new_unchecked(fiber: SullivanModel, n: usize, perturbation: &BTreeMap<usize, Element>) -> Result<Self> {
        let names = fresh_base_names(fiber.generators(), n);
        let extra = names
            .into_iter()
            .map(|s| Generator::new(s, 2))
            .collect::<Result<Vec<_>>>()?;
        let gens = fiber.generators().extended(extra)?;
        let mut diff = fiber.differentials().to_vec();
        for (&i, p) in perturbation {
            diff[i] += p;
        }
        diff.resize(gens.len(), Element::zero());
        let total = SullivanModel::new_unchecked(gens, diff)?;
        Ok(KsExtension { fiber, total })
    }

    /// Validates a total model against a fiber: same leading generators,
    /// degree-2 closed base generators and the KS condition.
    pub fn from_total(fiber: SullivanModel, total: SullivanModel) -> Result<Self> {
        let (fl, tl) = (fiber.len(), total.len());
        if tl < fl || total.generators().generators()[..fl] != fiber.generators().generators()[..] {
            return Err(Error::Inconsistent(
                "total model does not start with the fiber generators".into(),
            ));
        }
        for j in fl..tl {
            let g = total.generators().get(j);
            if g.degree != 2 {
                return Err(Error::InvalidGenerator {
                    name: g.name.clone(),
                    reason: "base generators have degree 2".into(),
                });
            }
            if !total.differential(j).is_zero() {
                return Err(Error::BaseNotClosed(g.name.clone()));
            }
        }
        let ext = KsExtension { fiber, total };
        for i in 0..ext.fiber.len() {
            let p = ext.perturbation(i);
            if p.terms().any(|(m, _)| !ext.in_base_ideal(m)) {
                let outside = p.filter(|m| !ext.in_base_ideal(m));
                return Err(Error::KsConditionFails {
                    generator: ext.fiber.generators().get(i).name.clone(),
                    difference: format_element(ext.total.generators(), &outside),
                });
            }
        }
        Ok(ext)
    }

    fn in_base_ideal(&self, m: &Monomial) -> bool {
        m.factors().any(|(j, _)| j >= self.fiber.len())
    }

    pub fn fiber(&self) -> &SullivanModel {
        &self.fiber
    }

    pub fn total(&self) -> &SullivanModel {
        &self.total
    }

    pub fn into_total(self) -> SullivanModel {
        self.total
    }

    /// Number of base generators.
    pub fn base_rank(&self) -> usize {
        self.total.len() - self.fiber.len()
    }

    /// Indices of the base generators inside the total model.
    pub fn base_indices(&self) -> std::ops::Range<usize> {
        self.fiber.len()..self.total.len()
    }

    /// `D v_i - d v_i` for fiber generator `i`.
    pub fn perturbation(&self, i: usize) -> Element {
        self.total.differential(i) - self.fiber.differential(i)
    }

    /// Sets `t_j = 0` for the listed base positions (0-based) and renames the
    /// remaining base generators positionally.
    pub fn restrict(&self, kill: &BTreeSet<usize>) -> Restriction {
        let n = self.base_rank();
        let f = self.fiber.len();
        let mut map: Vec<Option<usize>> = (0..f).map(Some).collect();
        let mut next = f;
        for j in 0..n {
            if kill.contains(&j) {
                map.push(None);
            } else {
                map.push(Some(next));
                next += 1;
            }
        }
        let kept = next - f;
        if kept == 0 {
            let diff = (0..f)
                .map(|i| reindex_element(self.total.differential(i), &map))
                .collect();
            let model = SullivanModel {
                gens: self.fiber.gens.clone(),
                diff,
            };
            return Restriction::Fiber(model);
        }
        let names = fresh_base_names(self.fiber.generators(), kept);
        let extra = names
            .into_iter()
            .map(|s| Generator::new(s, 2).expect("generated names are valid"))
            .collect();
        let gens = self
            .fiber
            .generators()
            .extended(extra)
            .expect("fresh names do not clash");
        let mut diff: Vec<Element> = (0..f)
            .map(|i| reindex_element(self.total.differential(i), &map))
            .collect();
        diff.resize(gens.len(), Element::zero());
        Restriction::Extension(KsExtension {
            fiber: self.fiber.clone(),
            total: SullivanModel { gens, diff },
        })
    }

    /// Kills a single base generator.
    pub fn restrict_one(&self, j: usize) -> Restriction {
        self.restrict(&[j].into_iter().collect())
    }

    /// Applies a permutation to the base generators: `t_j` becomes `t_{perm[j]}`.
    pub fn permute_base(&self, perm: &[usize]) -> KsExtension {
        let f = self.fiber.len();
        let mut map: Vec<Option<usize>> = (0..f).map(Some).collect();
        map.extend(perm.iter().map(|&p| Some(f + p)));
        let diff = (0..self.total.len())
            .map(|i| reindex_element(self.total.differential(i), &map))
            .collect();
        KsExtension {
            fiber: self.fiber.clone(),
            total: SullivanModel {
                gens: self.total.gens.clone(),
                diff,
            },
        }
    }

    /// A string invariant under permutations of the base generators; equal
    /// keys mean the differentials coincide after renaming the base.
    pub fn canonical_key(&self) -> String {
        let n = self.base_rank();
        let mut best: Option<String> = None;
        for perm in permutations(n) {
            let e = self.permute_base(&perm);
            let key = (0..self.fiber.len())
                .map(|i| format_element(e.total.generators(), e.total.differential(i)))
                .collect::<Vec<_>>()
                .join(";");
            if best.as_ref().is_none_or(|b| key < *b) {
                best = Some(key);
            }
        }
        format!("{n}|{}", best.unwrap_or_default())
    }
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..n).collect();
    loop {
        out.push(current.clone());
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| current[i - 1] < current[i]) else {
            break;
        };
        let j = (i..n).rev().find(|&j| current[j] > current[i - 1]).unwrap();
        current.swap(i - 1, j);
        current[i..].reverse();
    }
    out
}
