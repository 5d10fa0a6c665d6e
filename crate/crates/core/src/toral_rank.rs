//! Bounds for the rational toral rank.
//!
//! Lower bounds come from explicit KS extensions with finite dimensional
//! cohomology. The search builds such an extension generator by generator:
//! a *skeleton* assigns to each base generator `t_j` an odd generator `v`
//! whose differential receives the pure power `t_j^{(|v|+1)/2}`. Generators
//! are then processed in degree order, and the correction needed on each one
//! to keep `D ∘ D = 0` is found by solving a linear system over the span of
//! candidate monomials. When the system has no solution, a term is added to
//! the differential of an earlier generator so that some candidate can cancel
//! the obstruction, and processing resumes from that generator.
//!
//! Upper bounds are the odd-minus-even count and, for pure models with odd
//! generators of equal degree, the exact formula `n - m`.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use num_traits::{One, Zero};
use serde::Serialize;

use crate::ellipticity::{certify, pure_ideal};
use crate::error::{Error, Result};
use crate::format::{format_element, write_model};
use crate::gca::{rat, Element, Generator, GeneratorSet, Monomial, Rational};
use crate::groebner::{groebner_basis, MonomialOrder, Poly, DEFAULT_GROEBNER_CAP};
use crate::linalg::{Echelon, Solve};
use crate::sullivan::{fresh_base_names, KsExtension, SullivanModel};

#[derive(Clone, Debug)]
pub struct SearchConfig {
    /// Coefficients tried for added terms and for sampling parameter families.
    pub coefficient_set: Vec<Rational>,
    /// Maximum number of candidate monomials per generator.
    pub candidate_cap: usize,
    /// Total number of evaluated search nodes.
    pub node_budget: u64,
    /// Nodes allowed per skeleton before moving on.
    pub nodes_per_skeleton: u64,
    /// Maximum number of added terms along one branch.
    pub max_augmentations: usize,
    pub groebner_cap: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            coefficient_set: vec![rat(0), rat(1), rat(-1)],
            candidate_cap: 4096,
            node_budget: 20_000,
            nodes_per_skeleton: 400,
            max_augmentations: 8,
            groebner_cap: DEFAULT_GROEBNER_CAP,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        let has = |c: Rational| self.coefficient_set.contains(&c);
        if !has(Rational::zero()) || !has(Rational::one()) {
            return Err(Error::Inconsistent(
                "the coefficient set must contain 0 and 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchOutcome {
    /// A witness was found and re-verified.
    Found,
    /// `r = 0`: the model itself is the witness.
    Trivial,
    /// Every skeleton was explored without success. Not an upper bound.
    Exhausted,
    /// The node budget ran out before the search space was covered.
    BudgetExceeded,
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchReport {
    pub r: usize,
    pub outcome: SearchOutcome,
    /// Skeletons whose pure ideal passed the zero-dimensionality filter.
    pub tried: usize,
    /// Skeletons rejected by the filter.
    pub pruned: usize,
    /// Complete candidate differentials submitted to final verification.
    pub verified: usize,
    pub nodes: u64,
    pub skeleton: Option<Vec<String>>,
    /// The witness in model text format.
    pub witness_text: Option<String>,
    #[serde(skip)]
    pub witness: Option<KsExtension>,
}

/// Monomials of the given degree in the ideal of the base generators, with
/// at most two fiber generators of degree above two.
///
/// `gens` is the total generator set and base generators are those with
/// index `>= fiber_len`.
pub fn candidate_monomials(gens: &GeneratorSet, fiber_len: usize, degree: u32) -> Vec<Monomial> {
    let big: Vec<usize> = (0..fiber_len).filter(|&i| gens.degree(i) > 2).collect();
    let small: Vec<usize> = (0..gens.len()).filter(|&i| gens.degree(i) == 2).collect();
    let mut heads: Vec<Monomial> = vec![Monomial::one()];
    for (a, &i) in big.iter().enumerate() {
        heads.push(Monomial::generator(i));
        for &j in &big[a..] {
            if i == j && gens.is_odd(i) {
                continue;
            }
            heads.push(Monomial::generator(i).mul_exponents(&Monomial::generator(j)));
        }
    }
    let mut out = Vec::new();
    for head in heads {
        let hd = gens.monomial_degree(&head);
        if hd >= degree || (degree - hd) % 2 == 1 {
            continue;
        }
        let k = (degree - hd) / 2;
        for tail in small_monomials(&small, k) {
            if !tail.factors().any(|(i, _)| i >= fiber_len) {
                continue;
            }
            out.push(head.mul_exponents(&tail));
        }
    }
    out.sort_by(|a, b| gens.cmp_display(b, a).then(a.cmp(b)));
    out
}

/// All monomials of total exponent `k` in the given variables.
fn small_monomials(vars: &[usize], k: u32) -> Vec<Monomial> {
    fn rec(vars: &[usize], k: u32, acc: &mut Vec<(usize, u32)>, out: &mut Vec<Monomial>) {
        if k == 0 {
            let width = acc.iter().map(|(i, _)| i + 1).max().unwrap_or(0);
            let mut v = vec![0; width];
            for &(i, e) in acc.iter() {
                v[i] += e;
            }
            out.push(Monomial::from_exponents(v));
            return;
        }
        let Some((&first, rest)) = vars.split_first() else {
            return;
        };
        for e in (0..=k).rev() {
            if e > 0 {
                acc.push((first, e));
            }
            rec(rest, k - e, acc, out);
            if e > 0 {
                acc.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(vars, k, &mut Vec::new(), &mut out);
    out
}

/// `k`-element subsets of `items`, in lexicographic order of positions.
pub fn combinations<T: Clone>(items: &[T], k: usize) -> Vec<Vec<T>> {
    fn rec<T: Clone>(items: &[T], k: usize, start: usize, acc: &mut Vec<T>, out: &mut Vec<Vec<T>>) {
        if acc.len() == k {
            out.push(acc.clone());
            return;
        }
        for i in start..items.len() {
            if items.len() - i < k - acc.len() {
                break;
            }
            acc.push(items[i].clone());
            rec(items, k, i + 1, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    rec(items, k, 0, &mut Vec::new(), &mut out);
    out
}

struct Node {
    forced: Vec<Element>,
    diff: Vec<Element>,
    failure: Option<(usize, BTreeMap<Monomial, Rational>)>,
    depth: usize,
}

enum Dfs {
    Found(KsExtension),
    Dead,
    OutOfBudget,
}

struct Search<'a> {
    fiber: &'a SullivanModel,
    r: usize,
    config: &'a SearchConfig,
    gens: GeneratorSet,
    order: Vec<usize>,
    position: Vec<usize>,
    candidates: Vec<Vec<Monomial>>,
    nodes: u64,
    skeleton_nodes: u64,
    verified: usize,
    visited: HashSet<String>,
}

impl<'a> Search<'a> {
    fn new(fiber: &'a SullivanModel, r: usize, config: &'a SearchConfig) -> Result<Self> {
        let names = fresh_base_names(fiber.generators(), r);
        let extra = names
            .into_iter()
            .map(|s| Generator::new(s, 2))
            .collect::<Result<Vec<_>>>()?;
        let gens = fiber.generators().extended(extra)?;
        let mut order: Vec<usize> = (0..fiber.len()).collect();
        order.sort_by_key(|&i| (gens.degree(i), i));
        let mut position = vec![0; fiber.len()];
        for (p, &i) in order.iter().enumerate() {
            position[i] = p;
        }
        let candidates = (0..fiber.len())
            .map(|i| {
                let mut c = candidate_monomials(&gens, fiber.len(), gens.degree(i) + 1);
                c.truncate(config.candidate_cap);
                c
            })
            .collect();
        Ok(Search {
            fiber,
            r,
            config,
            gens,
            order,
            position,
            candidates,
            nodes: 0,
            skeleton_nodes: 0,
            verified: 0,
            visited: HashSet::new(),
        })
    }

    fn embed(&self, e: &Element) -> Element {
        // Fiber indices coincide with total indices.
        e.clone()
    }

    fn model_with(&self, diff: &[Element]) -> SullivanModel {
        let mut d = diff.to_vec();
        d.resize(self.gens.len(), Element::zero());
        SullivanModel::from_parts(self.gens.clone(), d)
    }

    /// Processes generators from position `start`, reusing `diff` below it.
    fn evaluate(&mut self, forced: Vec<Element>, mut diff: Vec<Element>, start: usize, depth: usize) -> Node {
        self.nodes += 1;
        self.skeleton_nodes += 1;
        for p in start..self.order.len() {
            let w = self.order[p];
            let model = self.model_with(&diff);
            let mut base = self.embed(self.fiber.differential(w));
            base += &forced[w];
            let obstruction = model.apply(&base);
            if obstruction.is_zero() {
                diff[w] = base;
                continue;
            }
            let mut echelon: Echelon<Monomial> = Echelon::new();
            let mut used = Vec::new();
            for m in &self.candidates[w] {
                let image = model.apply_monomial(m);
                if image.is_zero() {
                    continue;
                }
                used.push(m.clone());
                echelon.insert(image.into_terms());
            }
            let target: BTreeMap<Monomial, Rational> =
                (-&obstruction).into_terms();
            match echelon.solve(&target) {
                Solve::Solution(coeffs) => {
                    let mut value = base;
                    for (k, c) in coeffs {
                        value.add_term(used[k].clone(), c);
                    }
                    diff[w] = value;
                }
                Solve::Residual(residual) => {
                    return Node {
                        forced,
                        diff,
                        failure: Some((p, residual)),
                        depth,
                    };
                }
            }
        }
        Node {
            forced,
            diff,
            failure: None,
            depth,
        }
    }

    fn verify(&mut self, diff: &[Element]) -> Option<KsExtension> {
        self.verified += 1;
        let perturbation: BTreeMap<usize, Element> = (0..self.fiber.len())
            .map(|i| (i, &diff[i] - self.fiber.differential(i)))
            .filter(|(_, p)| !p.is_zero())
            .collect();
        let ext = KsExtension::new(self.fiber.clone(), self.r, &perturbation).ok()?;
        let cert = certify(ext.total(), self.config.groebner_cap).ok()?;
        cert.is_elliptic().then_some(ext)
    }

    /// Ways to add one term to an earlier generator so that a candidate of
    /// the failing generator can produce the residual monomial `mu`.
    fn options(&self, node: &Node) -> Vec<(usize, Element)> {
        let Some((p, residual)) = &node.failure else {
            return Vec::new();
        };
        let Some(mu) = residual
            .keys()
            .min_by(|a, b| self.gens.cmp_display(a, b).then(a.cmp(b)))
        else {
            return Vec::new();
        };
        let f = self.fiber.len();
        let small: Vec<usize> = (0..self.gens.len()).filter(|&i| self.gens.degree(i) == 2).collect();
        let mut out: Vec<(usize, Element)> = Vec::new();
        let mut seen: BTreeSet<(usize, Monomial)> = BTreeSet::new();
        let mut xs: Vec<Option<usize>> = vec![None];
        xs.extend((0..f).filter(|&i| self.gens.degree(i) > 2).map(Some));
        for y_pos in 0..*p {
            let y = self.order[y_pos];
            let target_degree = self.gens.degree(y) + 1;
            for &x in &xs {
                let rest = match x {
                    None => mu.clone(),
                    Some(i) => match mu.div_exponents(&Monomial::generator(i)) {
                        Some(r) => r,
                        None => continue,
                    },
                };
                let rest_degree = self.gens.monomial_degree(&rest);
                if rest_degree < target_degree || (rest_degree - target_degree) % 2 == 1 {
                    continue;
                }
                let k = (rest_degree - target_degree) / 2;
                for tail in small_monomials(&small, k) {
                    let Some(beta) = rest.div_exponents(&tail) else {
                        continue;
                    };
                    // The candidate x * y * tail must lie in the base ideal and be valid.
                    let mut cand = tail.mul_exponents(&Monomial::generator(y));
                    if let Some(i) = x {
                        cand = cand.mul_exponents(&Monomial::generator(i));
                    }
                    if !self.gens.is_valid_monomial(&cand) || !cand.factors().any(|(i, _)| i >= f) {
                        continue;
                    }
                    if !beta.factors().any(|(i, _)| i >= f) || !self.gens.is_valid_monomial(&beta) {
                        continue;
                    }
                    if !node.forced[y].coefficient(&beta).is_zero() {
                        continue;
                    }
                    if !seen.insert((y, beta.clone())) {
                        continue;
                    }
                    let fresh = node.forced[y].terms().all(|(m, _)| !m.factors().any(|(i, _)| i < f));
                    for c in &self.config.coefficient_set {
                        if c.is_zero() || (fresh && !c.is_one()) {
                            continue;
                        }
                        out.push((y, Element::term(beta.clone(), c.clone())));
                    }
                }
            }
        }
        out
    }

    fn state_key(forced: &[Element], gens: &GeneratorSet) -> String {
        forced
            .iter()
            .map(|e| format_element(gens, e))
            .collect::<Vec<_>>()
            .join(";")
    }

    fn dfs(&mut self, node: Node) -> Dfs {
        if node.failure.is_none() {
            if let Some(ext) = self.verify(&node.diff) {
                return Dfs::Found(ext);
            }
            return Dfs::Dead;
        }
        if node.depth >= self.config.max_augmentations {
            return Dfs::Dead;
        }
        let options = self.options(&node);
        let mut children = Vec::new();
        for (idx, (y, term)) in options.into_iter().enumerate() {
            if self.nodes >= self.config.node_budget || self.skeleton_nodes >= self.config.nodes_per_skeleton {
                return Dfs::OutOfBudget;
            }
            let mut forced = node.forced.clone();
            forced[y] += &term;
            let key = Self::state_key(&forced, &self.gens);
            if !self.visited.insert(key) {
                continue;
            }
            let start = self.position[y];
            let child = self.evaluate(forced, node.diff.clone(), start, node.depth + 1);
            if child.failure.is_none() {
                if let Some(ext) = self.verify(&child.diff) {
                    return Dfs::Found(ext);
                }
                continue;
            }
            children.push((idx, child));
        }
        // Most progress first: later failure position, then smaller residual.
        children.sort_by_key(|(idx, c)| {
            let (p, res) = c.failure.as_ref().unwrap();
            (std::cmp::Reverse(*p), res.len(), *idx)
        });
        let mut exhausted = true;
        for (_, child) in children {
            match self.dfs(child) {
                Dfs::Found(e) => return Dfs::Found(e),
                Dfs::OutOfBudget => {
                    exhausted = false;
                    break;
                }
                Dfs::Dead => {}
            }
        }
        if exhausted {
            Dfs::Dead
        } else {
            Dfs::OutOfBudget
        }
    }

    /// Pairs of skeleton generators sharing a monomial of the fiber
    /// differential, the degree sum, and the number of monomials touched.
    fn skeleton_score(&self, skeleton: &[usize]) -> (usize, u32, usize) {
        let mut conflicts = 0;
        let mut touched = 0;
        for e in self.fiber.differentials() {
            for (m, _) in e.terms() {
                let k = skeleton.iter().filter(|&&i| m.exponent(i) > 0).count();
                conflicts += k * k.saturating_sub(1) / 2;
                touched += usize::from(k > 0);
            }
        }
        let degrees = skeleton.iter().map(|&i| self.gens.degree(i)).sum();
        (conflicts, degrees, touched)
    }

    fn skeleton_forced(&self, skeleton: &[usize]) -> Vec<Element> {
        let f = self.fiber.len();
        let mut forced = vec![Element::zero(); f];
        for (j, &v) in skeleton.iter().enumerate() {
            let k = self.gens.degree(v).div_ceil(2);
            forced[v] = Element::monomial(Monomial::power(f + j, k));
        }
        forced
    }

    /// Whether the pure images of the fiber differential plus the skeleton
    /// powers generate a zero dimensional ideal.
    fn skeleton_admissible(&self, forced: &[Element]) -> bool {
        let mut diff: Vec<Element> = (0..self.fiber.len())
            .map(|i| self.fiber.differential(i) + &forced[i])
            .collect();
        diff.resize(self.gens.len(), Element::zero());
        let model = SullivanModel::from_parts(self.gens.clone(), diff);
        let (order, polys): (MonomialOrder, Vec<(usize, Poly)>) = pure_ideal(&model);
        let polys: Vec<Poly> = polys.into_iter().map(|(_, p)| p).collect();
        match groebner_basis(&order, &polys, self.config.groebner_cap) {
            Ok(gb) => gb.is_zero_dimensional(),
            Err(_) => false,
        }
    }
}

/// Searches for a KS extension with `r` base generators and finite
/// dimensional cohomology.
pub fn rank_lower_bound_search(fiber: &SullivanModel, r: usize, config: &SearchConfig) -> Result<SearchReport> {
    config.validate()?;
    let mut report = SearchReport {
        r,
        outcome: SearchOutcome::Exhausted,
        tried: 0,
        pruned: 0,
        verified: 0,
        nodes: 0,
        skeleton: None,
        witness_text: None,
        witness: None,
    };
    if r == 0 {
        report.outcome = SearchOutcome::Trivial;
        report.witness_text = Some(write_model(fiber, None));
        return Ok(report);
    }
    let mut search = Search::new(fiber, r, config)?;
    let odd = fiber.generators().odd_indices();
    let mut skeletons = combinations(&odd, r);
    skeletons.sort_by_key(|s| (search.skeleton_score(s), s.clone()));
    let mut incomplete = false;
    for skeleton in skeletons {
        if search.nodes >= config.node_budget {
            incomplete = true;
            break;
        }
        let forced = search.skeleton_forced(&skeleton);
        if !search.skeleton_admissible(&forced) {
            report.pruned += 1;
            continue;
        }
        report.tried += 1;
        search.skeleton_nodes = 0;
        search.visited.clear();
        let diff = vec![Element::zero(); fiber.len()];
        let root = search.evaluate(forced, diff, 0, 0);
        match search.dfs(root) {
            Dfs::Found(ext) => {
                report.outcome = SearchOutcome::Found;
                report.skeleton = Some(
                    skeleton
                        .iter()
                        .map(|&i| fiber.generators().get(i).name.clone())
                        .collect(),
                );
                report.witness_text = Some(write_model(fiber, Some(&ext)));
                report.witness = Some(ext);
                break;
            }
            Dfs::OutOfBudget => incomplete = true,
            Dfs::Dead => {}
        }
    }
    report.nodes = search.nodes;
    report.verified = search.verified;
    if report.witness.is_none() && incomplete {
        report.outcome = SearchOutcome::BudgetExceeded;
    }
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum UpperReason {
    PureFormula,
    OddMinusEven,
    /// Declared by a witness library; not derived here.
    Asserted,
    /// `n - t` for a witness with `t` base generators in a model of rank `n`.
    TotalRank,
}

#[derive(Clone, Debug, Serialize)]
pub struct UpperBound {
    pub value: usize,
    pub reason: UpperReason,
    /// Set when the odd-minus-even count was negative and clamped to 0.
    pub warning: Option<String>,
}

/// `dim V^odd - dim V^even`, clamped at zero.
pub fn rank_upper_bound(model: &SullivanModel) -> UpperBound {
    let deficit = model.homotopy_euler_deficit();
    UpperBound {
        value: deficit.max(0) as usize,
        reason: UpperReason::OddMinusEven,
        warning: (deficit < 0).then(|| format!("odd minus even is {deficit}; input is not elliptic")),
    }
}

/// `n - m` for a pure model with `n` odd generators of one degree and `m`
/// even generators.
pub fn pure_rank(model: &SullivanModel) -> Result<usize> {
    if !model.is_pure() {
        return Err(Error::Inconsistent("model is not pure".into()));
    }
    let gens = model.generators();
    let odd = gens.odd_indices();
    let degrees: BTreeSet<u32> = odd.iter().map(|&i| gens.degree(i)).collect();
    if degrees.len() > 1 {
        return Err(Error::Inconsistent(
            "odd generators have different degrees".into(),
        ));
    }
    let m = gens.even_indices().len();
    if m > odd.len() {
        return Err(Error::Inconsistent(
            "more even than odd generators; the model is not elliptic".into(),
        ));
    }
    Ok(odd.len() - m)
}

/// Whether every KS extension of `fiber` is automatically pure: the fiber
/// is pure and no monomial involving fiber generators fits into a
/// perturbation of any generator.
pub fn extensions_are_pure(fiber: &SullivanModel) -> bool {
    if !fiber.is_pure() {
        return false;
    }
    let gens = fiber.generators();
    let top = (0..fiber.len()).map(|i| gens.degree(i)).max().unwrap_or(0);
    let sizes = gens.basis_sizes(top + 1);
    (0..fiber.len()).all(|w| {
        let target = gens.degree(w) + 1;
        // A perturbation term is (fiber monomial of degree delta) * (t-power of degree >= 2).
        (1..target.saturating_sub(1))
            .filter(|delta| (target - delta).is_multiple_of(2))
            .all(|delta| sizes[delta as usize] == 0)
    })
}

/// Lower and upper bounds for the toral rank of a model.
#[derive(Clone, Debug, Serialize)]
pub struct RankBounds {
    pub lower: usize,
    pub upper: usize,
    pub upper_reason: UpperReason,
    pub warning: Option<String>,
    /// The witness for `lower`, in model text format.
    pub witness: Option<String>,
    pub searches: Vec<SearchReport>,
    /// Some search stopped on its budget rather than exhausting its space.
    pub budget_exhausted: bool,
}

impl RankBounds {
    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }
}

/// Searches `r = 1, 2, ..` up to the upper bound (or `max_r`), stopping at
/// the first `r` without a witness; a witness for `r + 1` restricts to one
/// for `r`, so later values cannot succeed where an earlier one failed
/// exhaustively.
pub fn rank_bounds(model: &SullivanModel, max_r: Option<usize>, config: &SearchConfig) -> Result<RankBounds> {
    let ub = rank_upper_bound(model);
    let (upper, upper_reason) = match pure_rank(model) {
        Ok(p) => (p, UpperReason::PureFormula),
        Err(_) => (ub.value, ub.reason),
    };
    let mut bounds = RankBounds {
        lower: 0,
        upper,
        upper_reason,
        warning: ub.warning,
        witness: Some(write_model(model, None)),
        searches: Vec::new(),
        budget_exhausted: false,
    };
    let top = max_r.map_or(upper, |m| m.min(upper));
    for r in 1..=top {
        let report = rank_lower_bound_search(model, r, config)?;
        let outcome = report.outcome;
        if outcome == SearchOutcome::Found {
            bounds.lower = r;
            bounds.witness = report.witness_text.clone();
        }
        bounds.budget_exhausted |= outcome == SearchOutcome::BudgetExceeded;
        bounds.searches.push(report);
        if outcome != SearchOutcome::Found {
            break;
        }
    }
    Ok(bounds)
}

/// The criterion for an off-trunk point of double index `(k - 1, 1)` in a
/// product of `k = 3` or `4` odd spheres of the given degrees.
pub fn bud_exists_odd_spheres(degrees: &[u32]) -> Result<bool> {
    check_sphere_degrees(degrees)?;
    let n = degrees;
    Ok(match n.len() {
        3 => n[0] + n[1] < n[2],
        _ => n[0] + n[1] < n[2] && n[0] + n[2] < n[3],
    })
}

fn check_sphere_degrees(degrees: &[u32]) -> Result<()> {
    let ok = matches!(degrees.len(), 3 | 4)
        && degrees.iter().all(|&d| d > 1 && d % 2 == 1)
        && degrees.windows(2).all(|w| w[0] <= w[1]);
    if ok {
        Ok(())
    } else {
        Err(Error::Inconsistent(format!(
            "expected 3 or 4 nondecreasing odd degrees above 1, got {degrees:?}"
        )))
    }
}

/// The product of odd spheres `Λ(v1, .., vk)` with zero differential.
pub fn odd_spheres(degrees: &[u32]) -> Result<SullivanModel> {
    let gens = degrees
        .iter()
        .enumerate()
        .map(|(i, &d)| Generator::new(format!("v{}", i + 1), d))
        .collect::<Result<Vec<_>>>()?;
    Ok(SullivanModel::free(GeneratorSet::new(gens)?))
}

/// The one-circle extension realizing the off-trunk point when the
/// criterion holds: `D v3 = v1 v2 t^a (+ t^b)` and, for four spheres,
/// `D v4 = v1 v3 t^c + t^e`.
pub fn bud_witness(degrees: &[u32]) -> Result<Option<KsExtension>> {
    if !bud_exists_odd_spheres(degrees)? {
        return Ok(None);
    }
    let fiber = odd_spheres(degrees)?;
    let n = degrees;
    let t = fiber.len();
    let gens = fiber
        .generators()
        .extended(vec![Generator::new(fresh_base_names(fiber.generators(), 1)[0].clone(), 2)?])?;
    let tpow = |e: u32| Monomial::power(t, e);
    let mono = |idx: &[usize], e: u32| {
        let mut m = tpow(e);
        for &i in idx {
            m = m.mul_exponents(&Monomial::generator(i));
        }
        m
    };
    let mut p = BTreeMap::new();
    let a = (n[2] - n[0] - n[1]).div_ceil(2);
    if n.len() == 3 {
        let mut e = Element::monomial(mono(&[0, 1], a));
        e.add_term(tpow(n[2].div_ceil(2)), Rational::one());
        p.insert(2, e);
    } else {
        p.insert(2, Element::monomial(mono(&[0, 1], a)));
        let c = (n[3] - n[0] - n[2]).div_ceil(2);
        let mut e = Element::monomial(mono(&[0, 2], c));
        e.add_term(tpow(n[3].div_ceil(2)), Rational::one());
        p.insert(3, e);
    }
    debug_assert_eq!(gens.len(), t + 1);
    Ok(Some(KsExtension::new(fiber, 1, &p)?))
}

/// A family of extensions whose differential is a fixed part plus free
/// rational multiples of listed monomials.
#[derive(Clone, Debug)]
pub struct ParametricFamily {
    pub fiber: SullivanModel,
    pub base_rank: usize,
    /// Fixed perturbation per fiber generator, over the total generators.
    pub fixed: BTreeMap<usize, Element>,
    /// `(fiber generator, monomial)` pairs each carrying a free parameter.
    pub parameters: Vec<(usize, Monomial)>,
}

impl ParametricFamily {
    pub fn total_generators(&self) -> Result<GeneratorSet> {
        let extra = fresh_base_names(self.fiber.generators(), self.base_rank)
            .into_iter()
            .map(|s| Generator::new(s, 2))
            .collect::<Result<Vec<_>>>()?;
        self.fiber.generators().extended(extra)
    }

    /// Every candidate monomial on the listed generators becomes a parameter.
    pub fn all_candidates(fiber: SullivanModel, base_rank: usize, fixed: BTreeMap<usize, Element>, generators: &[usize]) -> Result<Self> {
        let mut family = ParametricFamily {
            fiber,
            base_rank,
            fixed,
            parameters: Vec::new(),
        };
        let gens = family.total_generators()?;
        for &w in generators {
            for m in candidate_monomials(&gens, family.fiber.len(), gens.degree(w) + 1) {
                family.parameters.push((w, m));
            }
        }
        Ok(family)
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum FamilyVerdict {
    /// Fewer odd generators can carry a pure image than there are even
    /// variables, so no member has finite dimensional cohomology.
    StructurallyForced {
        carriers: Vec<String>,
        variables: Vec<String>,
    },
    /// Members were sampled over the coefficient set; this is evidence only.
    FamilySampled {
        members: usize,
        valid: usize,
        elliptic: usize,
        truncated: bool,
    },
}

/// Decides non-ellipticity of a whole family structurally when possible,
/// otherwise samples members with parameters from the coefficient set.
pub fn family_exclusion(family: &ParametricFamily, coefficients: &[Rational], sample_cap: usize) -> Result<FamilyVerdict> {
    let gens = family.total_generators()?;
    let f = family.fiber.len();
    let is_pure = |m: &Monomial| m.factors().all(|(i, _)| !gens.is_odd(i));
    let mut carriers = Vec::new();
    for w in gens.odd_indices() {
        let fixed_pure = family.fiber.differential(w).terms().any(|(m, _)| is_pure(m))
            || family
                .fixed
                .get(&w)
                .is_some_and(|e| e.terms().any(|(m, _)| is_pure(m)));
        let param_pure = family.parameters.iter().any(|(g, m)| *g == w && is_pure(m));
        if fixed_pure || param_pure {
            carriers.push(gens.get(w).name.clone());
        }
    }
    let variables: Vec<String> = gens
        .even_indices()
        .into_iter()
        .map(|i| gens.get(i).name.clone())
        .collect();
    if carriers.len() < variables.len() {
        return Ok(FamilyVerdict::StructurallyForced { carriers, variables });
    }
    let k = family.parameters.len();
    let mut members = 0;
    let mut valid = 0;
    let mut elliptic = 0;
    let mut choice = vec![0usize; k];
    let mut truncated = false;
    loop {
        if members >= sample_cap {
            truncated = true;
            break;
        }
        members += 1;
        let mut p = family.fixed.clone();
        for (idx, (w, m)) in family.parameters.iter().enumerate() {
            let c = &coefficients[choice[idx]];
            if !c.is_zero() {
                p.entry(*w).or_insert_with(Element::zero).add_term(m.clone(), c.clone());
            }
        }
        debug_assert!(p.keys().all(|&w| w < f));
        if let Ok(ext) = KsExtension::new(family.fiber.clone(), family.base_rank, &p) {
            valid += 1;
            if certify(ext.total(), DEFAULT_GROEBNER_CAP)?.is_elliptic() {
                elliptic += 1;
            }
        }
        // odometer
        let mut pos = 0;
        loop {
            if pos == k {
                return Ok(FamilyVerdict::FamilySampled {
                    members,
                    valid,
                    elliptic,
                    truncated,
                });
            }
            choice[pos] += 1;
            if choice[pos] < coefficients.len() {
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
    }
    Ok(FamilyVerdict::FamilySampled {
        members,
        valid,
        elliptic,
        truncated,
    })
}
