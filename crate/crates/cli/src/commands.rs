use std::path::Path;

use anyhow::{bail, Context, Result};
use serde_json::{json, Value};
use trl_core::ellipticity::certify;
use trl_core::format::{parse_rational, read_model_file};
use trl_core::graph::{isomorphic_based, BasedGraph};
use trl_core::groebner::DEFAULT_GROEBNER_CAP;
use trl_core::hasse::{enumerate_admissible, Coord, HasseDiagram, WitnessLibrary};
use trl_core::sullivan::{CohomologyOptions, RankMethod};
use trl_core::toral_rank::{rank_bounds, SearchConfig};

use crate::{Format, Outcome};

fn json_out(v: &Value, code: u8) -> Result<Outcome> {
    Ok(Outcome {
        text: serde_json::to_string_pretty(v)?,
        code,
    })
}

pub fn model_check(path: &Path, max_degree: Option<u32>, max_basis: usize) -> Result<Outcome> {
    let file = read_model_file(path).with_context(|| format!("reading {}", path.display()))?;
    let model = file.model();
    let report = model.check_d_squared();
    let mut out = json!({
        "generators": model.len(),
        "base_rank": file.extension.as_ref().map_or(0, |e| e.base_rank()),
        "d_squared_zero": report.ok,
        "d_squared_failures": report.failures,
        "minimal": model.is_minimal(),
        "pure": model.is_pure(),
        "formal_dimension": model.formal_dimension(),
    });
    if !report.ok {
        return json_out(&out, 2);
    }
    let cert = certify(model, DEFAULT_GROEBNER_CAP)?;
    out["elliptic"] = json!(cert.is_elliptic());
    out["certificate"] = serde_json::to_value(&cert)?;
    if let Some(k) = max_degree {
        let h = model.cohomology(0..=k, &CohomologyOptions { max_basis, method: RankMethod::Exact })?;
        out["cohomology"] = serde_json::to_value(&h)?;
    }
    json_out(&out, 0)
}

fn parse_coefficients(text: &str) -> Result<Vec<trl_core::Rational>> {
    text.split(',')
        .map(|c| parse_rational(c).map_err(anyhow::Error::from))
        .collect()
}

pub fn rank(path: &Path, max_r: Option<usize>, budget: Option<u64>, coeff_set: Option<&str>) -> Result<Outcome> {
    let file = read_model_file(path).with_context(|| format!("reading {}", path.display()))?;
    let model = file.model();
    let cert = certify(model, DEFAULT_GROEBNER_CAP)?;
    if !cert.is_elliptic() {
        return json_out(
            &json!({ "elliptic": false, "uncovered": cert.uncovered, "message": "the model has infinite dimensional cohomology" }),
            2,
        );
    }
    let mut config = SearchConfig::default();
    if let Some(b) = budget {
        config.node_budget = b;
    }
    if let Some(c) = coeff_set {
        config.coefficient_set = parse_coefficients(c)?;
    }
    let bounds = rank_bounds(model, max_r, &config)?;
    let code = if !bounds.is_exact() && bounds.budget_exhausted { 3 } else { 0 };
    let mut v = serde_json::to_value(&bounds)?;
    v["exact"] = json!(bounds.is_exact());
    json_out(&v, code)
}

pub fn diagram(library: &Path, format: Format) -> Result<Outcome> {
    let lib = WitnessLibrary::load(library).with_context(|| format!("loading {}", library.display()))?;
    let d = HasseDiagram::build(&lib)?;
    let code = if d.admissibility.ok { 0 } else { 2 };
    let text = match format {
        Format::Json => d.to_json()?,
        Format::Dot => d.to_dot(),
        Format::Tsv => d.to_tsv(),
    };
    Ok(Outcome { text, code })
}

pub fn enumerate(n: u32, format: Format) -> Result<Outcome> {
    if n == 0 {
        bail!("--rank must be at least 1");
    }
    let shapes = enumerate_admissible(n);
    let text = match format {
        Format::Json => serde_json::to_string_pretty(&json!({ "n": n, "count": shapes.len(), "shapes": shapes }))?,
        Format::Tsv | Format::Dot => {
            let mut out = String::from("shape\tpoints\tedges\n");
            for (i, s) in shapes.iter().enumerate() {
                let p: Vec<String> = s.points.iter().map(|c| c.to_string()).collect();
                let e: Vec<String> = s.edges.iter().map(|(a, b)| format!("{a}-{b}")).collect();
                out.push_str(&format!("{i}\t{}\t{}\n", p.join(" "), e.join(" ")));
            }
            out
        }
    };
    Ok(Outcome { text, code: 0 })
}

fn read_graph(path: &Path) -> Result<BasedGraph> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let g = if path.extension().is_some_and(|e| e == "dot" || e == "gv") {
        BasedGraph::from_dot(&text)?
    } else {
        BasedGraph::from_json(&text)?
    };
    Ok(g)
}

pub fn embed(path: &Path, format: Format) -> Result<Outcome> {
    let g = read_graph(path)?;
    match g.psi_embed() {
        Ok(e) => {
            let text = match format {
                Format::Json => serde_json::to_string_pretty(&e)?,
                Format::Tsv => e.to_tsv(),
                Format::Dot => {
                    let mut out = String::from("graph embedded {\n");
                    for (v, c) in &e.coordinates {
                        out.push_str(&format!("  \"{v}\" [pos=\"{},{}!\"];\n", c.s, c.t));
                    }
                    for (a, b) in &e.segments {
                        out.push_str(&format!("  \"{a}\" -- \"{b}\";\n"));
                    }
                    out.push_str("}\n");
                    out
                }
            };
            Ok(Outcome { text, code: 0 })
        }
        Err(r) => json_out(&json!({ "rejected": r }), 2),
    }
}

pub fn iso(first: &Path, second: &Path) -> Result<Outcome> {
    let report = isomorphic_based(&read_graph(first)?, &read_graph(second)?);
    json_out(&serde_json::to_value(&report)?, 0)
}

fn parse_coord(text: &str) -> Result<Coord> {
    let (s, t) = text
        .split_once(',')
        .with_context(|| format!("expected s,t but got `{text}`"))?;
    Ok(Coord::new(s.trim().parse()?, t.trim().parse()?))
}

pub fn leaves(library: &Path, square: &[String]) -> Result<Outcome> {
    let lib = WitnessLibrary::load(library).with_context(|| format!("loading {}", library.display()))?;
    let d = HasseDiagram::build(&lib)?;
    let c: Vec<Coord> = square.iter().map(|s| parse_coord(s)).collect::<Result<_>>()?;
    let report = d.detect_leaf(c[0], c[1], c[2], c[3])?;
    let code = if report.found { 0 } else { 3 };
    json_out(&serde_json::to_value(&report)?, code)
}
