//! Ellipticity certificates.
//!
//! A model with finitely many generators has finite dimensional cohomology
//! exactly when its associated pure model does, and a pure model does exactly
//! when the ideal generated by the pure images of the odd generators in the
//! polynomial algebra on the even generators is zero dimensional. The pure
//! images are the parts of `d(odd)` that involve even generators only.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::format::format_element;
use crate::gca::{Element, GeneratorSet, Monomial};
use crate::groebner::{groebner_basis, GroebnerBasis, MonomialOrder, Poly, DEFAULT_GROEBNER_CAP};
use crate::sullivan::{CohomologyOptions, RankMethod, SullivanModel};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Elliptic,
    NotElliptic,
}

#[derive(Clone, Debug, Serialize)]
pub struct PureImage {
    pub generator: String,
    pub image: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct EllipticityCertificate {
    pub verdict: Verdict,
    /// Even generators, the variables of the polynomial ring.
    pub variables: Vec<String>,
    pub pure_images: Vec<PureImage>,
    pub groebner_basis: Vec<String>,
    pub leading_terms: Vec<String>,
    /// Variables with a pure power among the leading terms, with its exponent.
    pub covered: BTreeMap<String, u32>,
    pub uncovered: Vec<String>,
    /// Number of standard monomials when the ideal is zero dimensional.
    pub quotient_dimension: Option<usize>,
}

impl EllipticityCertificate {
    pub fn is_elliptic(&self) -> bool {
        self.verdict == Verdict::Elliptic
    }
}

/// The associated pure model: `d` is replaced on odd generators by its
/// purely even part and set to zero on even generators.
pub fn pure_model(model: &SullivanModel) -> SullivanModel {
    let gens = model.generators();
    let diff = (0..model.len())
        .map(|i| {
            if gens.is_odd(i) {
                pure_part(gens, model.differential(i))
            } else {
                Element::zero()
            }
        })
        .collect();
    SullivanModel::new_unchecked(gens.clone(), diff).expect("pure part keeps degrees")
}

fn pure_part(gens: &GeneratorSet, e: &Element) -> Element {
    e.filter(|m| m.factors().all(|(j, _)| !gens.is_odd(j)))
}

/// The pure images as polynomials in the even generators, in generator order.
pub fn pure_ideal(model: &SullivanModel) -> (MonomialOrder, Vec<(usize, Poly)>) {
    let gens = model.generators();
    let even = gens.even_indices();
    let position: BTreeMap<usize, usize> = even.iter().enumerate().map(|(k, &i)| (i, k)).collect();
    let order = MonomialOrder::new(even.iter().map(|&i| gens.degree(i)).collect());
    let mut polys = Vec::new();
    for i in gens.odd_indices() {
        let image = pure_part(gens, model.differential(i));
        if image.is_zero() {
            continue;
        }
        let terms = image
            .terms()
            .map(|(m, c)| {
                let mut exps = vec![0u32; even.len()];
                for (j, e) in m.factors() {
                    exps[position[&j]] = e;
                }
                (exps, c.clone())
            })
            .collect();
        polys.push((i, Poly::from_terms(&order, terms)));
    }
    (order, polys)
}

fn exps_to_string(gens: &GeneratorSet, even: &[usize], exps: &[u32]) -> String {
    let mut full = vec![0u32; gens.len()];
    for (k, &i) in even.iter().enumerate() {
        full[i] = exps[k];
    }
    crate::format::format_monomial(gens, &Monomial::from_exponents(full))
}

fn poly_to_string(gens: &GeneratorSet, even: &[usize], p: &Poly) -> String {
    let mut e = Element::zero();
    for (exps, c) in p.terms() {
        let mut full = vec![0u32; gens.len()];
        for (k, &i) in even.iter().enumerate() {
            full[i] = exps[k];
        }
        e.add_term(Monomial::from_exponents(full), c.clone());
    }
    format_element(gens, &e)
}

/// Decides ellipticity with a certificate. `cap` bounds the Gröbner basis size.
pub fn certify(model: &SullivanModel, cap: usize) -> Result<EllipticityCertificate> {
    let gens = model.generators();
    let even = gens.even_indices();
    let (order, polys) = pure_ideal(model);
    let pure_images = polys
        .iter()
        .map(|(i, p)| PureImage {
            generator: gens.get(*i).name.clone(),
            image: poly_to_string(gens, &even, p),
        })
        .collect();
    let gb: GroebnerBasis = groebner_basis(&order, &polys.into_iter().map(|(_, p)| p).collect::<Vec<_>>(), cap)?;
    let powers = gb.pure_powers();
    let mut covered = BTreeMap::new();
    let mut uncovered = Vec::new();
    for (k, &i) in even.iter().enumerate() {
        match powers[k] {
            Some(e) => {
                covered.insert(gens.get(i).name.clone(), e);
            }
            None => uncovered.push(gens.get(i).name.clone()),
        }
    }
    let elliptic = gb.is_zero_dimensional();
    Ok(EllipticityCertificate {
        verdict: if elliptic { Verdict::Elliptic } else { Verdict::NotElliptic },
        variables: even.iter().map(|&i| gens.get(i).name.clone()).collect(),
        pure_images,
        groebner_basis: gb.polys.iter().map(|p| poly_to_string(gens, &even, p)).collect(),
        leading_terms: gb
            .leading_monomials()
            .iter()
            .map(|m| exps_to_string(gens, &even, m))
            .collect(),
        covered,
        uncovered,
        quotient_dimension: gb.quotient_dimension(),
    })
}

pub fn is_elliptic(model: &SullivanModel) -> Result<bool> {
    Ok(certify(model, DEFAULT_GROEBNER_CAP)?.is_elliptic())
}

/// Which model the degreewise oracle was run on.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "route")]
pub enum OracleRoute {
    /// The model itself.
    Full,
    /// The associated pure model with the odd generators of zero pure image
    /// split off as exterior tensor factors.
    ReducedPure { split_off: Vec<String> },
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleReport {
    pub route: OracleRoute,
    pub method: RankMethod,
    pub formal_dimension: i64,
    pub dims: BTreeMap<u32, usize>,
    /// `H^k = 0` for `fd < k <= fd + 2`.
    pub vanishes_above: bool,
}

/// Basis sizes up to this bound use exact ranks; larger ones use modular
/// ranks, whose dimensions are upper bounds and so certify vanishing.
pub const EXACT_RANK_LIMIT: usize = 4000;

/// Computes cohomology near and above the formal dimension.
///
/// When the bases around the formal dimension exceed `max_basis`, the
/// reduced pure model is used instead.
pub fn degreewise_oracle(model: &SullivanModel, max_basis: usize) -> Result<OracleReport> {
    match oracle_on(model, OracleRoute::Full, max_basis) {
        Err(Error::BasisTooLarge { .. }) => {
            let (reduced, split_off) = reduced_pure_model(model)?;
            oracle_on(&reduced, OracleRoute::ReducedPure { split_off }, max_basis)
        }
        other => other,
    }
}

fn oracle_on(model: &SullivanModel, route: OracleRoute, max_basis: usize) -> Result<OracleReport> {
    let fd = model.formal_dimension();
    let hi = (fd + 2).max(0) as u32;
    let lo = fd.max(0) as u32;
    let sizes = model.generators().basis_sizes(hi + 1);
    let largest = sizes[lo.saturating_sub(1) as usize..].iter().copied().max().unwrap_or(0);
    if largest > max_basis as u64 {
        let degree = (lo.saturating_sub(1)..=hi + 1)
            .max_by_key(|&k| sizes[k as usize])
            .unwrap_or(hi);
        return Err(Error::BasisTooLarge {
            degree,
            size: largest as usize,
            cap: max_basis,
        });
    }
    let method = if largest as usize <= EXACT_RANK_LIMIT {
        RankMethod::Exact
    } else {
        RankMethod::ModP
    };
    let range = if method == RankMethod::Exact {
        let full = sizes.iter().all(|&s| s as usize <= EXACT_RANK_LIMIT);
        if full { 0..=hi } else { lo..=hi }
    } else {
        lo.min(hi)..=hi
    };
    let h = model.cohomology(range, &CohomologyOptions { max_basis, method })?;
    let vanishes_above = h
        .dims
        .iter()
        .filter(|(&k, _)| k as i64 > fd)
        .all(|(_, &d)| d == 0);
    Ok(OracleReport {
        route,
        method,
        formal_dimension: fd,
        dims: h.dims,
        vanishes_above,
    })
}

/// The pure model with odd generators whose pure image vanishes removed.
/// Its cohomology tensored with the exterior algebra on the removed
/// generators is the cohomology of the pure model.
pub fn reduced_pure_model(model: &SullivanModel) -> Result<(SullivanModel, Vec<String>)> {
    let pure = pure_model(model);
    let gens = pure.generators();
    let keep: Vec<usize> = (0..pure.len())
        .filter(|&i| !gens.is_odd(i) || !pure.differential(i).is_zero())
        .collect();
    let split_off = (0..pure.len())
        .filter(|i| !keep.contains(i))
        .map(|i| gens.get(i).name.clone())
        .collect();
    let mut map = vec![None; pure.len()];
    for (k, &i) in keep.iter().enumerate() {
        map[i] = Some(k);
    }
    let new_gens = GeneratorSet::new(keep.iter().map(|&i| gens.get(i).clone()).collect())?;
    let diff = keep
        .iter()
        .map(|&i| crate::sullivan::reindex_element(pure.differential(i), &map))
        .collect();
    Ok((SullivanModel::new(new_gens, diff)?, split_off))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::parse_model;

    #[test]
    fn ex35_extension_is_elliptic() {
        let f = parse_model("generator x 3\ngenerator y 3\ngenerator z 7\nextend 1\nD z = x*y*t + t^4\n").unwrap();
        let model = f.extension.unwrap().into_total();
        let cert = certify(&model, 100).unwrap();
        assert!(cert.is_elliptic());
        assert_eq!(cert.pure_images.len(), 1);
        assert_eq!(cert.pure_images[0].image, "t1^4");
        assert_eq!(cert.quotient_dimension, Some(4));
        let oracle = degreewise_oracle(&model, 200_000).unwrap();
        assert_eq!(oracle.route, OracleRoute::Full);
        assert!(oracle.vanishes_above);
        assert_eq!(oracle.dims[&12], 1);
    }

    #[test]
    fn free_torus_generator_is_not_elliptic() {
        let f = parse_model("generator x 3\ngenerator y 3\nextend 1\n").unwrap();
        let model = f.extension.unwrap().into_total();
        let cert = certify(&model, 100).unwrap();
        assert!(!cert.is_elliptic());
        assert_eq!(cert.uncovered, vec!["t1".to_string()]);
        let oracle = degreewise_oracle(&model, 200_000).unwrap();
        assert!(!oracle.vanishes_above);
    }

    #[test]
    fn reduced_pure_model_drops_free_odd_generators() {
        let f = parse_model("generator x 3\ngenerator y 3\ngenerator z 5\nextend 1\nD x = t^2\n").unwrap();
        let (reduced, split) = reduced_pure_model(f.extension.unwrap().total()).unwrap();
        assert_eq!(split, vec!["y".to_string(), "z".to_string()]);
        assert_eq!(reduced.len(), 2);
        assert!(reduced.is_pure());
    }
}
