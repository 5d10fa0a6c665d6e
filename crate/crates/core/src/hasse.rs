//! Hasse diagrams of torus-action classes on the lattice of double indexes.
//!
//! A point sits at `(s, t)` where `t` counts base generators and the rank of
//! the class is `n - s - t`. The shape of a diagram is its set of lattice
//! points and cover edges; admissibility is checked rule by rule so that a
//! rejection always names the rule that failed.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::ellipticity::certify;
use crate::error::{Error, Result};
use crate::format::{format_element, read_model_file};
use crate::groebner::DEFAULT_GROEBNER_CAP;
use crate::sullivan::{KsExtension, Restriction, SullivanModel};
use crate::toral_rank::{extensions_are_pure, pure_rank, rank_upper_bound, UpperReason};

/// A lattice point `(s, t)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Coord {
    pub s: u32,
    pub t: u32,
}

impl Coord {
    pub const fn new(s: u32, t: u32) -> Self {
        Coord { s, t }
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.s, self.t)
    }
}

/// Lattice points and cover edges. Canonical form: points sorted, each edge
/// stored lower point first, edges sorted.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Shape {
    pub n: u32,
    pub points: Vec<Coord>,
    pub edges: Vec<(Coord, Coord)>,
}

impl Shape {
    pub fn new(n: u32, points: impl IntoIterator<Item = Coord>, edges: impl IntoIterator<Item = (Coord, Coord)>) -> Self {
        let mut points: Vec<Coord> = points.into_iter().collect();
        points.sort();
        let mut edges: Vec<(Coord, Coord)> = edges
            .into_iter()
            .map(|(a, b)| if (a.t, a.s) <= (b.t, b.s) { (a, b) } else { (b, a) })
            .collect();
        edges.sort();
        edges.dedup();
        Shape { n, points, edges }
    }

    /// Builds a shape from `(s, t)` pairs.
    pub fn from_pairs(n: u32, points: &[(u32, u32)], edges: &[PairEdge]) -> Self {
        Shape::new(
            n,
            points.iter().map(|&(s, t)| Coord::new(s, t)),
            edges
                .iter()
                .map(|&((a, b), (c, d))| (Coord::new(a, b), Coord::new(c, d))),
        )
    }

    pub fn trunk(n: u32) -> Self {
        Shape::new(
            n,
            (0..=n).map(|t| Coord::new(0, t)),
            (0..n).map(|t| (Coord::new(0, t), Coord::new(0, t + 1))),
        )
    }

    pub fn contains(&self, c: Coord) -> bool {
        self.points.binary_search(&c).is_ok()
    }

    pub fn has_edge(&self, a: Coord, b: Coord) -> bool {
        let e = if (a.t, a.s) <= (b.t, b.s) { (a, b) } else { (b, a) };
        self.edges.binary_search(&e).is_ok()
    }

    pub fn buds(&self) -> Vec<Coord> {
        self.points
            .iter()
            .copied()
            .filter(|p| p.s >= 1 && p.s + p.t == self.n)
            .collect()
    }
}

/// An edge given as two `(s, t)` pairs.
pub type PairEdge = ((u32, u32), (u32, u32));

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Rule {
    /// Points are distinct and edges join existing points.
    #[serde(rename = "well-formed")]
    WellFormed,
    /// The trunk `(0,0)..(0,n)` exists and every other column is a
    /// contiguous segment ending at `(s, n - s)`.
    A1,
    /// Edges join `(s,t)` to `(s',t+1)` with `s <= s'`.
    A2,
    /// Consecutive points of a column are joined.
    A3,
    /// Every point with `t >= 1` has a neighbour below it.
    A4,
    /// `n < #points <= (n^2 + n)/2 + 1`.
    #[serde(rename = "size")]
    Size,
    /// Two points with the same distance from the base and the same longest
    /// ascending path would be the same class.
    #[serde(rename = "quotient")]
    Quotient,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Rule::WellFormed => "well-formed",
            Rule::A1 => "A1",
            Rule::A2 => "A2",
            Rule::A3 => "A3",
            Rule::A4 => "A4",
            Rule::Size => "size",
            Rule::Quotient => "quotient",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Violation {
    pub rule: Rule,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct AdmissibilityReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

impl AdmissibilityReport {
    pub fn violated_rules(&self) -> BTreeSet<Rule> {
        self.violations.iter().map(|v| v.rule).collect()
    }
}

/// Checks every rule and reports all violations.
pub fn admissible(shape: &Shape) -> AdmissibilityReport {
    let mut v = Vec::new();
    let mut push = |rule, detail: String| v.push(Violation { rule, detail });
    let n = shape.n;
    let set: BTreeSet<Coord> = shape.points.iter().copied().collect();
    if set.len() != shape.points.len() {
        push(Rule::WellFormed, "repeated double index".into());
    }
    for &(a, b) in &shape.edges {
        if !set.contains(&a) || !set.contains(&b) {
            push(Rule::WellFormed, format!("edge {a}-{b} has a missing endpoint"));
        }
    }
    for t in 0..=n {
        if !set.contains(&Coord::new(0, t)) {
            push(Rule::A1, format!("trunk point (0,{t}) is missing"));
        }
    }
    let mut columns: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for p in &set {
        if p.s >= 1 && p.t == 0 {
            push(Rule::A1, format!("{p} has t = 0 off the base"));
            continue;
        }
        columns.entry(p.s).or_default().push(p.t);
    }
    for (&s, ts) in columns.iter().filter(|(&s, _)| s >= 1) {
        let lo = ts[0];
        let hi = *ts.last().unwrap();
        if s + hi > n {
            push(Rule::A1, format!("column {s} reaches ({s},{hi}) above ({s},{})", n.saturating_sub(s)));
        } else if s + hi < n {
            push(Rule::A1, format!("column {s} stops at ({s},{hi}) below ({s},{})", n - s));
        }
        if (hi - lo + 1) as usize != ts.len() {
            push(Rule::A1, format!("column {s} has a gap"));
        }
    }
    for &(a, b) in &shape.edges {
        if !(b.t == a.t + 1 && a.s <= b.s) {
            push(Rule::A2, format!("edge {a}-{b}"));
        }
    }
    for p in &set {
        let up = Coord::new(p.s, p.t + 1);
        if set.contains(&up) && !shape.has_edge(*p, up) {
            push(Rule::A3, format!("missing edge {p}-{up}"));
        }
    }
    for p in set.iter().filter(|p| p.t >= 1) {
        let has_parent = shape
            .edges
            .iter()
            .any(|&(a, b)| (b == *p && a.t + 1 == p.t) || (a == *p && b.t + 1 == p.t));
        if !has_parent {
            push(Rule::A4, format!("{p} has no parent"));
        }
    }
    let max = (n * n + n) / 2 + 1;
    let count = set.len() as u32;
    if count <= n || count > max {
        push(Rule::Size, format!("{count} points, expected {} to {max}", n + 1));
    }
    if let Some(detail) = quotient_violation(shape) {
        push(Rule::Quotient, detail);
    }
    AdmissibilityReport { ok: v.is_empty(), violations: v }
}

/// Computes `(distance from base, longest ascending path)` from the graph
/// alone and reports two points sharing it.
fn quotient_violation(shape: &Shape) -> Option<String> {
    let base = Coord::new(0, 0);
    if !shape.contains(base) {
        return None;
    }
    let graph = from_shape(shape);
    let dist = graph.distances();
    let idx = |c: &Coord| shape.points.binary_search(c).ok();
    let mut up: Vec<Vec<usize>> = vec![Vec::new(); shape.points.len()];
    for &(a, b) in &shape.edges {
        let (Some(i), Some(j)) = (idx(&a), idx(&b)) else {
            continue;
        };
        match (dist[i], dist[j]) {
            (Some(x), Some(y)) if y == x + 1 => up[i].push(j),
            (Some(x), Some(y)) if x == y + 1 => up[j].push(i),
            _ => {}
        }
    }
    let mut order: Vec<usize> = (0..shape.points.len()).filter(|&i| dist[i].is_some()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(dist[i]));
    let mut height = vec![0usize; shape.points.len()];
    for &i in &order {
        height[i] = up[i].iter().map(|&j| height[j] + 1).max().unwrap_or(0);
    }
    let mut seen: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for &i in &order {
        let key = (dist[i].unwrap(), height[i]);
        if let Some(&j) = seen.get(&key) {
            return Some(format!(
                "{} and {} both have distance {} and height {}",
                shape.points[j], shape.points[i], key.0, key.1
            ));
        }
        seen.insert(key, i);
    }
    None
}

fn from_shape(shape: &Shape) -> crate::graph::BasedGraph {
    crate::graph::BasedGraph::from_shape(shape)
}

/// All shapes satisfying the rules for total rank `n`, in canonical order.
pub fn enumerate_admissible(n: u32) -> Vec<Shape> {
    if n == 0 {
        return vec![Shape::trunk(0)];
    }
    // Column s >= 1 is empty or runs from some bottom b to n - s.
    let column_choices: Vec<Vec<Option<u32>>> = (1..n)
        .map(|s| std::iter::once(None).chain((1..=n - s).map(Some)).collect())
        .collect();
    let mut out = Vec::new();
    let mut choice = vec![0usize; column_choices.len()];
    loop {
        let mut points: Vec<Coord> = (0..=n).map(|t| Coord::new(0, t)).collect();
        for (k, &c) in choice.iter().enumerate() {
            let s = k as u32 + 1;
            if let Some(b) = column_choices[k][c] {
                points.extend((b..=n - s).map(|t| Coord::new(s, t)));
            }
        }
        let set: BTreeSet<Coord> = points.iter().copied().collect();
        let mut forced = Vec::new();
        let mut optional = Vec::new();
        for &a in &set {
            for &b in set.range(Coord::new(a.s, a.t + 1)..) {
                if b.t != a.t + 1 {
                    continue;
                }
                if b.s == a.s {
                    forced.push((a, b));
                } else {
                    optional.push((a, b));
                }
            }
        }
        for mask in 0u64..(1u64 << optional.len()) {
            let mut edges = forced.clone();
            edges.extend(
                optional
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, e)| *e),
            );
            let shape = Shape::new(n, points.iter().copied(), edges);
            if admissible(&shape).ok {
                out.push(shape);
            }
        }
        let mut k = 0;
        loop {
            if k == choice.len() {
                out.sort();
                return out;
            }
            choice[k] += 1;
            if choice[k] < column_choices[k].len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

/// One witness in a library, with its declared rank if any.
#[derive(Clone, Debug)]
pub struct LibraryWitness {
    pub name: String,
    pub extension: KsExtension,
    pub declared_rank: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct WitnessLibrary {
    pub fiber: SullivanModel,
    pub total_rank: Option<usize>,
    pub witnesses: Vec<LibraryWitness>,
}

#[derive(Deserialize)]
struct Manifest {
    model: PathBuf,
    total_rank: Option<usize>,
    #[serde(default)]
    witness: Vec<ManifestWitness>,
}

#[derive(Deserialize)]
struct ManifestWitness {
    name: String,
    file: PathBuf,
    rank: Option<usize>,
}

impl WitnessLibrary {
    /// Reads a TOML manifest naming the model file and witness files;
    /// relative paths are resolved against the manifest's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let manifest: Manifest = toml::from_str(&text).map_err(|e| Error::Manifest {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        let dir = path.parent().unwrap_or(Path::new("."));
        let fiber = read_model_file(&dir.join(&manifest.model))?.fiber;
        let mut witnesses = Vec::new();
        for w in manifest.witness {
            let file = read_model_file(&dir.join(&w.file))?;
            if file.fiber != fiber {
                return Err(Error::Manifest {
                    path: path.display().to_string(),
                    message: format!("witness {} has a different fiber", w.name),
                });
            }
            let extension = file.extension.ok_or_else(|| Error::Manifest {
                path: path.display().to_string(),
                message: format!("witness {} has no extend line", w.name),
            })?;
            witnesses.push(LibraryWitness {
                name: w.name,
                extension,
                declared_rank: w.rank,
            });
        }
        Ok(WitnessLibrary {
            fiber,
            total_rank: manifest.total_rank,
            witnesses,
        })
    }
}

/// How a rank was settled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RankSource {
    /// Lower and upper bounds computed here agree.
    Certified,
    /// Taken from the library and consistent with the computed bounds.
    Asserted,
}

/// A class of KS extensions met while closing the library under restriction.
#[derive(Clone, Debug, Serialize)]
pub struct ClassNode {
    pub key: String,
    pub t: u32,
    /// `name` or `name\{t2,t3}` for a restriction.
    pub refs: Vec<String>,
    pub lower: usize,
    pub upper: usize,
    pub upper_reason: UpperReason,
    pub declared: Option<usize>,
    pub rank: Option<usize>,
    pub source: Option<RankSource>,
    #[serde(skip)]
    pub extension: Option<KsExtension>,
}

impl ClassNode {
    pub fn coord(&self, n: usize) -> Option<Coord> {
        self.rank.map(|r| Coord::new((n - self.t as usize - r) as u32, self.t))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DiagramPoint {
    pub label: String,
    pub s: u32,
    pub t: u32,
    pub rank: usize,
    pub source: RankSource,
    pub witness_refs: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PendingPoint {
    pub t: u32,
    pub lower: usize,
    pub upper: usize,
    pub refs: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct HasseDiagram {
    pub n: usize,
    pub n_source: RankSource,
    pub points: Vec<DiagramPoint>,
    /// Index pairs into `points`, lower point first.
    pub edges: Vec<(usize, usize)>,
    pub base: usize,
    pub trunk: Vec<usize>,
    pub buds: Vec<usize>,
    pub pending: Vec<PendingPoint>,
    pub admissibility: AdmissibilityReport,
    #[serde(skip)]
    pub nodes: BTreeMap<String, ClassNode>,
}

fn fiber_key(m: &SullivanModel) -> String {
    let body = (0..m.len())
        .map(|i| format_element(m.generators(), m.differential(i)))
        .collect::<Vec<_>>()
        .join(";");
    format!("0|{body}")
}

fn subsets(n: usize) -> impl Iterator<Item = BTreeSet<usize>> {
    (0u64..(1u64 << n)).map(move |mask| (0..n).filter(|i| mask >> i & 1 == 1).collect())
}

fn base_names(ext: &KsExtension, kill: &BTreeSet<usize>) -> String {
    let g = ext.total().generators();
    let f = ext.fiber().len();
    kill.iter().map(|&j| g.get(f + j).name.clone()).collect::<Vec<_>>().join(",")
}

/// Upper bound for an extension of total rank `n` with `t` base generators.
fn node_upper(model: &SullivanModel, n: usize, t: usize, fiber_pure: bool) -> (usize, UpperReason) {
    let mut best = (n - t, UpperReason::TotalRank);
    let oe = rank_upper_bound(model).value;
    if oe < best.0 {
        best = (oe, UpperReason::OddMinusEven);
    }
    if let Ok(p) = pure_rank(model) {
        if p < best.0 || (fiber_pure && p == best.0) {
            best = (p, UpperReason::PureFormula);
        }
    }
    best
}

impl HasseDiagram {
    /// Classifies every witness and every restriction of a witness, merges
    /// classes by double index and joins classes related by killing one base
    /// generator.
    pub fn build(lib: &WitnessLibrary) -> Result<Self> {
        let fiber = &lib.fiber;
        for w in &lib.witnesses {
            let cert = certify(w.extension.total(), DEFAULT_GROEBNER_CAP)?;
            if !cert.is_elliptic() {
                return Err(Error::WitnessRejected {
                    witness: w.name.clone(),
                    reason: format!("not elliptic; uncovered {:?}", cert.uncovered),
                });
            }
        }
        let lower_n = lib.witnesses.iter().map(|w| w.extension.base_rank()).max().unwrap_or(0);
        let fiber_pure = extensions_are_pure(fiber);
        let (upper_n, _) = node_upper(fiber, usize::MAX, 0, fiber_pure);
        let (n, n_source) = if lower_n == upper_n {
            (lower_n, RankSource::Certified)
        } else if let Some(d) = lib.total_rank.filter(|&d| lower_n <= d && d <= upper_n) {
            (d, RankSource::Asserted)
        } else {
            return Err(Error::Uncertified {
                witness: "model".into(),
                lower: lower_n,
                upper: upper_n,
            });
        };
        if let Some(d) = lib.total_rank {
            if d != n {
                return Err(Error::Inconsistent(format!("declared total rank {d}, derived {n}")));
            }
        }

        let mut nodes: BTreeMap<String, ClassNode> = BTreeMap::new();
        let fkey = fiber_key(fiber);
        nodes.insert(
            fkey.clone(),
            ClassNode {
                key: fkey,
                t: 0,
                refs: vec!["model".into()],
                lower: 0,
                upper: n,
                upper_reason: UpperReason::TotalRank,
                declared: None,
                rank: None,
                source: None,
                extension: None,
            },
        );
        for w in &lib.witnesses {
            let ext = &w.extension;
            let r = ext.base_rank();
            for kill in subsets(r) {
                let reference = if kill.is_empty() {
                    w.name.clone()
                } else {
                    format!("{}\\{{{}}}", w.name, base_names(ext, &kill))
                };
                let (key, t, sub) = match ext.restrict(&kill) {
                    Restriction::Fiber(m) => (fiber_key(&m), 0, None),
                    Restriction::Extension(e) => (e.canonical_key(), e.base_rank() as u32, Some(e)),
                };
                let node = nodes.entry(key.clone()).or_insert_with(|| {
                    let (upper, upper_reason) = match &sub {
                        Some(e) => node_upper(e.total(), n, t as usize, fiber_pure),
                        None => (n, UpperReason::TotalRank),
                    };
                    ClassNode {
                        key: key.clone(),
                        t,
                        refs: Vec::new(),
                        lower: 0,
                        upper,
                        upper_reason,
                        declared: None,
                        rank: None,
                        source: None,
                        extension: sub.clone(),
                    }
                });
                node.refs.push(reference);
                node.lower = node.lower.max(kill.len());
                if kill.is_empty() {
                    if let Some(d) = w.declared_rank {
                        if node.declared.is_some_and(|e| e != d) {
                            return Err(Error::Inconsistent(format!(
                                "witness {} declares rank {d}, another witness of the same class declares {}",
                                w.name,
                                node.declared.unwrap()
                            )));
                        }
                        node.declared = Some(d);
                    }
                }
            }
        }
        for node in nodes.values_mut() {
            if let Some(e) = &node.extension {
                if !certify(e.total(), DEFAULT_GROEBNER_CAP)?.is_elliptic() {
                    return Err(Error::WitnessRejected {
                        witness: node.refs[0].clone(),
                        reason: "restriction is not elliptic".into(),
                    });
                }
            }
            if node.t == 0 {
                node.rank = Some(n);
                node.source = Some(n_source);
                continue;
            }
            if node.lower > node.upper {
                return Err(Error::Inconsistent(format!(
                    "{}: lower bound {} exceeds upper bound {}",
                    node.refs[0], node.lower, node.upper
                )));
            }
            if node.lower == node.upper {
                if let Some(d) = node.declared.filter(|&d| d != node.lower) {
                    return Err(Error::Inconsistent(format!(
                        "{} declares rank {d}, derived {}",
                        node.refs[0], node.lower
                    )));
                }
                node.rank = Some(node.lower);
                node.source = Some(if node.upper_reason == UpperReason::TotalRank {
                    n_source
                } else {
                    RankSource::Certified
                });
            } else if let Some(d) = node.declared {
                if d < node.lower || d > node.upper {
                    return Err(Error::Inconsistent(format!(
                        "{} declares rank {d} outside [{}, {}]",
                        node.refs[0], node.lower, node.upper
                    )));
                }
                node.rank = Some(d);
                node.source = Some(RankSource::Asserted);
            }
        }

        // Points, keyed by double index.
        let mut by_coord: BTreeMap<Coord, Vec<&ClassNode>> = BTreeMap::new();
        let mut pending = Vec::new();
        for node in nodes.values() {
            match node.coord(n) {
                Some(c) => by_coord.entry(c).or_default().push(node),
                None => pending.push(PendingPoint {
                    t: node.t,
                    lower: node.lower,
                    upper: node.upper,
                    refs: node.refs.clone(),
                }),
            }
        }
        let coords: Vec<Coord> = by_coord.keys().copied().collect();
        let points: Vec<DiagramPoint> = by_coord
            .iter()
            .enumerate()
            .map(|(i, (c, ns))| DiagramPoint {
                label: format!("Q{i}"),
                s: c.s,
                t: c.t,
                rank: n - c.s as usize - c.t as usize,
                source: if ns.iter().any(|x| x.source == Some(RankSource::Certified)) {
                    RankSource::Certified
                } else {
                    RankSource::Asserted
                },
                witness_refs: ns.iter().flat_map(|x| x.refs.iter().cloned()).collect(),
            })
            .collect();
        let index = |c: Coord| coords.binary_search(&c).ok();

        let mut edges = BTreeSet::new();
        for node in nodes.values() {
            let (Some(ext), Some(upper)) = (&node.extension, node.coord(n)) else {
                continue;
            };
            for j in 0..ext.base_rank() {
                let key = match ext.restrict_one(j) {
                    Restriction::Fiber(m) => fiber_key(&m),
                    Restriction::Extension(e) => e.canonical_key(),
                };
                if let Some(lower) = nodes.get(&key).and_then(|x| x.coord(n)) {
                    if let (Some(a), Some(b)) = (index(lower), index(upper)) {
                        edges.insert((a, b));
                    }
                }
            }
        }
        let edges: Vec<(usize, usize)> = edges.into_iter().collect();
        let shape = Shape::new(
            n as u32,
            coords.iter().copied(),
            edges.iter().map(|&(a, b)| (coords[a], coords[b])),
        );
        let admissibility = admissible(&shape);
        let base = index(Coord::new(0, 0)).unwrap_or(0);
        let trunk = (0..points.len()).filter(|&i| points[i].s == 0).collect();
        let buds = (0..points.len())
            .filter(|&i| points[i].s >= 1 && (points[i].s + points[i].t) as usize == n)
            .collect();
        Ok(HasseDiagram {
            n,
            n_source,
            points,
            edges,
            base,
            trunk,
            buds,
            pending,
            admissibility,
            nodes,
        })
    }

    pub fn shape(&self) -> Shape {
        let c = |i: usize| Coord::new(self.points[i].s, self.points[i].t);
        Shape::new(
            self.n as u32,
            (0..self.points.len()).map(c),
            self.edges.iter().map(|&(a, b)| (c(a), c(b))),
        )
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// DOT with one rank level per value of `t`.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph hasse {\n  rankdir=BT;\n  node [shape=circle];\n");
        let mut levels: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for (i, p) in self.points.iter().enumerate() {
            out.push_str(&format!(
                "  {} [label=\"{}\\n({},{}) r={}\"];\n",
                p.label, p.label, p.s, p.t, p.rank
            ));
            levels.entry(p.t).or_default().push(i);
        }
        for ids in levels.values() {
            let names: Vec<&str> = ids.iter().map(|&i| self.points[i].label.as_str()).collect();
            out.push_str(&format!("  {{ rank=same; {}; }}\n", names.join("; ")));
        }
        for &(a, b) in &self.edges {
            out.push_str(&format!("  {} -- {};\n", self.points[a].label, self.points[b].label));
        }
        out.push_str("}\n");
        out
    }

    /// Lattice coordinates as `label<TAB>s<TAB>t` lines.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("label\ts\tt\n");
        for p in &self.points {
            out.push_str(&format!("{}\t{}\t{}\n", p.label, p.s, p.t));
        }
        out
    }

    fn class_of(&self, key: &str) -> Option<Coord> {
        self.nodes.get(key).and_then(|x| x.coord(self.n))
    }

    /// Looks for a witness of the top corner `c` of the square `a < b, d < c`
    /// with two base generators whose single kills land in `b` and `d` and
    /// whose double kill lands in `a`.
    pub fn detect_leaf(&self, a: Coord, b: Coord, c: Coord, d: Coord) -> Result<LeafReport> {
        let shape = self.shape();
        for (x, y) in [(a, b), (a, d), (b, c), (d, c)] {
            if !shape.has_edge(x, y) {
                return Err(Error::Inconsistent(format!("{x}-{y} is not an edge of the diagram")));
            }
        }
        if b == d || b.t != a.t + 1 || d.t != a.t + 1 || c.t != a.t + 2 {
            return Err(Error::Inconsistent("not a square of the required shape".into()));
        }
        let restrict_key = |e: &KsExtension, kill: &BTreeSet<usize>| match e.restrict(kill) {
            Restriction::Fiber(m) => fiber_key(&m),
            Restriction::Extension(x) => x.canonical_key(),
        };
        for node in self.nodes.values().filter(|x| x.coord(self.n) == Some(c)) {
            let Some(ext) = &node.extension else { continue };
            let r = ext.base_rank();
            for j in 0..r {
                for k in 0..r {
                    if j == k {
                        continue;
                    }
                    let kb = restrict_key(ext, &[k].into());
                    let kd = restrict_key(ext, &[j].into());
                    let ka = restrict_key(ext, &[j, k].into());
                    if self.class_of(&kb) == Some(b) && self.class_of(&kd) == Some(d) && self.class_of(&ka) == Some(a) {
                        let g = ext.total().generators();
                        let f = ext.fiber().len();
                        return Ok(LeafReport {
                            found: true,
                            witness: Some(node.refs[0].clone()),
                            kill_for_b: Some(g.get(f + k).name.clone()),
                            kill_for_d: Some(g.get(f + j).name.clone()),
                        });
                    }
                }
            }
        }
        Ok(LeafReport {
            found: false,
            witness: None,
            kill_for_b: None,
            kill_for_d: None,
        })
    }
}

/// Result of a leaf search. `found = false` only means that no witness in
/// the library works; it is not a proof that none exists.
#[derive(Clone, Debug, Serialize)]
pub struct LeafReport {
    pub found: bool,
    pub witness: Option<String>,
    pub kill_for_b: Option<String>,
    pub kill_for_d: Option<String>,
}

/// Classes of a library in breadth-first order from the base, for display.
pub fn bfs_order(shape: &Shape) -> Vec<Coord> {
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::from([Coord::new(0, 0)]);
    let mut out = Vec::new();
    while let Some(p) = queue.pop_front() {
        if !shape.contains(p) || !seen.insert(p) {
            continue;
        }
        out.push(p);
        for &(a, b) in &shape.edges {
            if a == p {
                queue.push_back(b);
            } else if b == p {
                queue.push_back(a);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(s: u32, t: u32) -> Coord {
        Coord::new(s, t)
    }

    #[test]
    fn trunk_is_admissible() {
        for n in 0..5 {
            assert!(admissible(&Shape::trunk(n)).ok, "n = {n}");
        }
    }

    #[test]
    fn small_counts() {
        assert_eq!(enumerate_admissible(1).len(), 1);
        assert_eq!(enumerate_admissible(2).len(), 2);
        assert_eq!(enumerate_admissible(3).len(), 8);
    }

    #[test]
    fn missing_within_column_edge_is_a3() {
        let s = Shape::from_pairs(
            3,
            &[(0, 0), (0, 1), (0, 2), (0, 3), (1, 1), (1, 2)],
            &[((0, 0), (0, 1)), ((0, 1), (0, 2)), ((0, 2), (0, 3)), ((0, 0), (1, 1)), ((0, 1), (1, 2))],
        );
        let r = admissible(&s);
        assert_eq!(r.violated_rules(), [Rule::A3].into());
    }

    #[test]
    fn orphan_point_is_a4() {
        let s = Shape::from_pairs(2, &[(0, 0), (0, 1), (0, 2), (1, 1)], &[((0, 0), (0, 1)), ((0, 1), (0, 2))]);
        assert!(admissible(&s).violated_rules().contains(&Rule::A4));
    }

    #[test]
    fn downward_column_edge_is_a2() {
        let mut s = Shape::trunk(3);
        s = Shape::new(
            3,
            s.points.iter().copied().chain([c(1, 1), c(1, 2)]),
            s.edges.iter().copied().chain([(c(0, 0), c(1, 1)), (c(1, 1), c(1, 2)), (c(1, 1), c(0, 2))]),
        );
        assert_eq!(admissible(&s).violated_rules(), [Rule::A2, Rule::Quotient].into());
    }

    #[test]
    fn buds_are_column_tops() {
        let s = Shape::from_pairs(2, &[(0, 0), (0, 1), (0, 2), (1, 1)], &[((0, 0), (0, 1)), ((0, 1), (0, 2)), ((0, 0), (1, 1))]);
        assert_eq!(s.buds(), vec![c(1, 1)]);
        assert_eq!(bfs_order(&s).len(), 4);
    }
}
