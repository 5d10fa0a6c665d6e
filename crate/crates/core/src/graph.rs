//! Based graphs and the reconstruction of lattice coordinates from the
//! graph alone.
//!
//! The embedding places the unique longest shortest path from the base on
//! the column `s = 0`, then repeatedly takes the unplaced vertices farthest
//! from the base and places every shortest path reaching them on a new
//! column, starting where the path leaves the already placed part.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hasse::{Coord, HasseDiagram, Shape};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasedGraph {
    names: Vec<String>,
    adj: Vec<BTreeSet<usize>>,
    base: usize,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    vertices: Vec<String>,
    edges: Vec<(String, String)>,
    base: String,
}

impl BasedGraph {
    /// Validates that the graph is simple, connected and contains the base.
    pub fn new(vertices: Vec<String>, edges: &[(String, String)], base: &str) -> Result<Self> {
        let index: BTreeMap<&str, usize> = vertices.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
        if index.len() != vertices.len() {
            return Err(Error::Inconsistent("repeated vertex name".into()));
        }
        let lookup = |v: &str| {
            index
                .get(v)
                .copied()
                .ok_or_else(|| Error::Inconsistent(format!("unknown vertex {v}")))
        };
        let mut adj = vec![BTreeSet::new(); vertices.len()];
        for (a, b) in edges {
            let (i, j) = (lookup(a)?, lookup(b)?);
            if i == j {
                return Err(Error::Inconsistent(format!("loop at {a}")));
            }
            if !adj[i].insert(j) {
                return Err(Error::Inconsistent(format!("repeated edge {a}-{b}")));
            }
            adj[j].insert(i);
        }
        let g = BasedGraph {
            adj,
            base: lookup(base)?,
            names: vertices,
        };
        if g.distances().iter().any(Option::is_none) {
            return Err(Error::Inconsistent("graph is not connected".into()));
        }
        Ok(g)
    }

    /// The graph of a shape; vertices are named `(s,t)`. Not validated, so
    /// that inadmissible shapes can still be inspected.
    pub fn from_shape(shape: &Shape) -> Self {
        let names: Vec<String> = shape.points.iter().map(|p| p.to_string()).collect();
        let mut adj = vec![BTreeSet::new(); names.len()];
        for &(a, b) in &shape.edges {
            if let (Ok(i), Ok(j)) = (shape.points.binary_search(&a), shape.points.binary_search(&b)) {
                if i != j {
                    adj[i].insert(j);
                    adj[j].insert(i);
                }
            }
        }
        let base = shape.points.binary_search(&Coord::new(0, 0)).unwrap_or(0);
        BasedGraph { names, adj, base }
    }

    /// Forgets the labels of a diagram; the base is the `(0,0)` point.
    pub fn from_hasse(d: &HasseDiagram) -> Self {
        let names: Vec<String> = d.points.iter().map(|p| p.label.clone()).collect();
        let mut adj = vec![BTreeSet::new(); names.len()];
        for &(a, b) in &d.edges {
            adj[a].insert(b);
            adj[b].insert(a);
        }
        BasedGraph { names, adj, base: d.base }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn neighbours(&self, v: usize) -> &BTreeSet<usize> {
        &self.adj[v]
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, n) in self.adj.iter().enumerate() {
            out.extend(n.iter().filter(|&&j| j > i).map(|&j| (i, j)));
        }
        out
    }

    /// The same graph with another base vertex.
    pub fn rebased(&self, base: &str) -> Result<Self> {
        let b = self
            .names
            .iter()
            .position(|n| n == base)
            .ok_or_else(|| Error::Inconsistent(format!("unknown vertex {base}")))?;
        Ok(BasedGraph { base: b, ..self.clone() })
    }

    /// Breadth-first distances from the base; `None` when unreachable.
    pub fn distances(&self) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.len()];
        if self.is_empty() {
            return dist;
        }
        dist[self.base] = Some(0);
        let mut queue = VecDeque::from([self.base]);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap();
            for &w in &self.adj[v] {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn distances_by_name(&self) -> BTreeMap<String, usize> {
        self.distances()
            .into_iter()
            .enumerate()
            .filter_map(|(i, d)| d.map(|d| (self.names[i].clone(), d)))
            .collect()
    }

    /// All shortest paths from the base to `target`, ordered by their vertex
    /// names position by position.
    fn shortest_paths(&self, dist: &[Option<usize>], target: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut stack = vec![target];
        self.paths_rec(dist, &mut stack, &mut out);
        for p in &mut out {
            p.reverse();
        }
        out.sort_by(|a, b| {
            let na: Vec<&String> = a.iter().map(|&i| &self.names[i]).collect();
            let nb: Vec<&String> = b.iter().map(|&i| &self.names[i]).collect();
            na.cmp(&nb)
        });
        out
    }

    fn paths_rec(&self, dist: &[Option<usize>], stack: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let v = *stack.last().unwrap();
        let d = dist[v].unwrap();
        if d == 0 {
            out.push(stack.clone());
            return;
        }
        for &w in &self.adj[v] {
            if dist[w] == Some(d - 1) {
                stack.push(w);
                self.paths_rec(dist, stack, out);
                stack.pop();
            }
        }
    }

    /// Places the vertices on the lattice, or reports the first stage whose
    /// condition fails.
    pub fn psi_embed(&self) -> std::result::Result<Embedding, Rejection> {
        let dist: Vec<usize> = self
            .distances()
            .into_iter()
            .map(|d| d.ok_or_else(|| Rejection::new(0, RejectKind::Disconnected, "graph is not connected".into())))
            .collect::<std::result::Result<_, _>>()?;
        let some: Vec<Option<usize>> = dist.iter().map(|&d| Some(d)).collect();
        let n = dist.iter().copied().max().unwrap_or(0);
        let far: Vec<usize> = (0..self.len()).filter(|&v| dist[v] == n).collect();
        if far.len() != 1 {
            return Err(Rejection::new(
                0,
                RejectKind::NotUnique,
                format!("{} vertices at distance {n}", far.len()),
            ));
        }
        let trunk = self.shortest_paths(&some, far[0]);
        if trunk.len() != 1 {
            return Err(Rejection::new(
                0,
                RejectKind::NotUnique,
                format!("{} shortest paths of length {n}", trunk.len()),
            ));
        }
        let mut coord: Vec<Option<Coord>> = vec![None; self.len()];
        for (u, &v) in trunk[0].iter().enumerate() {
            coord[v] = Some(Coord::new(0, u as u32));
        }
        let mut stage = 0;
        loop {
            let unplaced: Vec<usize> = (0..self.len()).filter(|&v| coord[v].is_none()).collect();
            if unplaced.is_empty() {
                break;
            }
            stage += 1;
            let nk = unplaced.iter().map(|&v| dist[v]).max().unwrap();
            let column = (n - nk) as u32;
            let placed_before: Vec<bool> = coord.iter().map(Option::is_some).collect();
            let mut assigned: BTreeMap<usize, Coord> = BTreeMap::new();
            for &target in unplaced.iter().filter(|&&v| dist[v] == nk) {
                for path in self.shortest_paths(&some, target) {
                    let m = path.iter().position(|&v| !placed_before[v]).unwrap();
                    if let Some(&bad) = path[m..].iter().find(|&&v| placed_before[v]) {
                        return Err(Rejection::new(
                            stage,
                            RejectKind::Rejoins,
                            format!("a path to {} returns to {}", self.names[target], self.names[bad]),
                        ));
                    }
                    for (u, &v) in path.iter().enumerate().skip(m) {
                        let c = Coord::new(column, u as u32);
                        match assigned.insert(v, c) {
                            Some(old) if old != c => {
                                return Err(Rejection::new(
                                    stage,
                                    RejectKind::Conflict,
                                    format!("{} placed at {old} and {c}", self.names[v]),
                                ))
                            }
                            _ => {}
                        }
                    }
                }
            }
            for (v, c) in assigned {
                coord[v] = Some(c);
            }
            let mut seen: BTreeMap<Coord, usize> = BTreeMap::new();
            for (v, c) in coord.iter().enumerate() {
                if let Some(c) = c {
                    if let Some(&w) = seen.get(c) {
                        return Err(Rejection::new(
                            stage,
                            RejectKind::Collision,
                            format!("{} and {} both at {c}", self.names[w], self.names[v]),
                        ));
                    }
                    seen.insert(*c, v);
                }
            }
        }
        let coords: Vec<Coord> = coord.into_iter().map(Option::unwrap).collect();
        for (a, b) in self.edges() {
            if coords[a].t.abs_diff(coords[b].t) != 1 {
                return Err(Rejection::new(
                    stage + 1,
                    RejectKind::FlatEdge,
                    format!("edge {}-{} joins equal distances", self.names[a], self.names[b]),
                ));
            }
        }
        Ok(Embedding {
            n: n as u32,
            coordinates: self.names.iter().cloned().zip(coords).collect(),
            segments: self
                .edges()
                .into_iter()
                .map(|(a, b)| (self.names[a].clone(), self.names[b].clone()))
                .collect(),
        })
    }

    pub fn to_json(&self) -> Result<String> {
        let g = GraphJson {
            vertices: self.names.clone(),
            edges: self
                .edges()
                .into_iter()
                .map(|(a, b)| (self.names[a].clone(), self.names[b].clone()))
                .collect(),
            base: self.names[self.base].clone(),
        };
        Ok(serde_json::to_string_pretty(&g)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let g: GraphJson = serde_json::from_str(text)?;
        BasedGraph::new(g.vertices, &g.edges, &g.base)
    }

    /// DOT export; the base carries the attribute `base=true`.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph based {\n");
        for (i, n) in self.names.iter().enumerate() {
            if i == self.base {
                out.push_str(&format!("  \"{n}\" [base=true, shape=doublecircle];\n"));
            } else {
                out.push_str(&format!("  \"{n}\";\n"));
            }
        }
        for (a, b) in self.edges() {
            out.push_str(&format!("  \"{}\" -- \"{}\";\n", self.names[a], self.names[b]));
        }
        out.push_str("}\n");
        out
    }

    /// Reads the subset of DOT written by [`BasedGraph::to_dot`]: node
    /// statements, `a -- b` edge chains, and `base=true` on one node.
    pub fn from_dot(text: &str) -> Result<Self> {
        let body = text
            .split_once('{')
            .and_then(|(_, r)| r.rsplit_once('}'))
            .map(|(b, _)| b)
            .ok_or_else(|| Error::parse(1, "expected a graph body in braces"))?;
        let unquote = |s: &str| s.trim().trim_matches('"').to_string();
        let mut vertices: Vec<String> = Vec::new();
        let mut edges = Vec::new();
        let mut base = None;
        let add = |v: &String, vertices: &mut Vec<String>| {
            if !vertices.contains(v) {
                vertices.push(v.clone());
            }
        };
        for stmt in body.split([';', '\n']).map(str::trim).filter(|s| !s.is_empty()) {
            let (head, attrs) = match stmt.split_once('[') {
                Some((h, a)) => (h.trim(), a.trim_end_matches(']')),
                None => (stmt, ""),
            };
            if head.contains("--") {
                let parts: Vec<String> = head.split("--").map(unquote).collect();
                for p in &parts {
                    add(p, &mut vertices);
                }
                for w in parts.windows(2) {
                    edges.push((w[0].clone(), w[1].clone()));
                }
            } else if !head.contains('=') {
                let v = unquote(head);
                add(&v, &mut vertices);
                if attrs.split(',').any(|a| a.replace(' ', "") == "base=true") {
                    base = Some(v);
                }
            }
        }
        let base = base.ok_or_else(|| Error::parse(1, "no node has base=true"))?;
        BasedGraph::new(vertices, &edges, &base)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RejectKind {
    Disconnected,
    /// The longest shortest path is not unique.
    NotUnique,
    /// A path leaves the placed part and comes back to it.
    Rejoins,
    /// One vertex would receive two coordinates.
    Conflict,
    /// Two vertices would receive one coordinate.
    Collision,
    /// An edge joins vertices at equal distance from the base.
    FlatEdge,
}

/// The failed condition: 0 for the first path, `k` for the `k`-th stage.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Rejection {
    pub condition: usize,
    pub kind: RejectKind,
    pub detail: String,
}

impl Rejection {
    fn new(condition: usize, kind: RejectKind, detail: String) -> Self {
        Rejection { condition, kind, detail }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Embedding {
    pub n: u32,
    pub coordinates: BTreeMap<String, Coord>,
    pub segments: Vec<(String, String)>,
}

impl Embedding {
    /// The image: coordinate set and segment set.
    pub fn shape(&self) -> Shape {
        Shape::new(
            self.n,
            self.coordinates.values().copied(),
            self.segments
                .iter()
                .map(|(a, b)| (self.coordinates[a], self.coordinates[b])),
        )
    }

    pub fn to_tsv(&self) -> String {
        let mut rows: Vec<(&String, &Coord)> = self.coordinates.iter().collect();
        rows.sort_by_key(|(_, c)| (c.s, c.t));
        let mut out = String::from("vertex\ts\tt\n");
        for (v, c) in rows {
            out.push_str(&format!("{v}\t{}\t{}\n", c.s, c.t));
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IsoMethod {
    /// Both graphs embed and the images were compared.
    Embedding,
    /// At least one graph failed to embed; a direct search was used.
    BruteForce,
}

#[derive(Clone, Debug, Serialize)]
pub struct IsoReport {
    pub isomorphic: bool,
    pub method: IsoMethod,
}

/// Decides isomorphism of based graphs.
pub fn isomorphic_based(g1: &BasedGraph, g2: &BasedGraph) -> IsoReport {
    match (g1.psi_embed(), g2.psi_embed()) {
        (Ok(a), Ok(b)) => IsoReport {
            isomorphic: a.shape() == b.shape(),
            method: IsoMethod::Embedding,
        },
        _ => IsoReport {
            isomorphic: brute_force_isomorphic(g1, g2),
            method: IsoMethod::BruteForce,
        },
    }
}

/// Backtracking over bijections preserving the base, distances and degrees.
pub fn brute_force_isomorphic(g1: &BasedGraph, g2: &BasedGraph) -> bool {
    if g1.len() != g2.len() || g1.edges().len() != g2.edges().len() {
        return false;
    }
    let d1 = g1.distances();
    let d2 = g2.distances();
    let sig = |g: &BasedGraph, d: &[Option<usize>], v: usize| (d[v], g.adj[v].len());
    let mut s1: Vec<_> = (0..g1.len()).map(|v| sig(g1, &d1, v)).collect();
    let mut s2: Vec<_> = (0..g2.len()).map(|v| sig(g2, &d2, v)).collect();
    s1.sort();
    s2.sort();
    if s1 != s2 {
        return false;
    }
    let mut map = vec![usize::MAX; g1.len()];
    let mut used = vec![false; g2.len()];
    map[g1.base] = g2.base;
    used[g2.base] = true;
    let order: Vec<usize> = {
        let mut o: Vec<usize> = (0..g1.len()).filter(|&v| v != g1.base).collect();
        o.sort_by_key(|&v| d1[v]);
        o
    };
    fn rec(
        k: usize,
        order: &[usize],
        g1: &BasedGraph,
        g2: &BasedGraph,
        map: &mut [usize],
        used: &mut [bool],
        ok: &dyn Fn(usize, usize) -> bool,
    ) -> bool {
        if k == order.len() {
            return true;
        }
        let v = order[k];
        for w in 0..g2.len() {
            if used[w] || !ok(v, w) {
                continue;
            }
            let consistent = g1.adj[v]
                .iter()
                .filter(|&&x| map[x] != usize::MAX)
                .all(|&x| g2.adj[w].contains(&map[x]))
                && g2.adj[w]
                    .iter()
                    .filter(|&&y| used[y])
                    .all(|&y| map.iter().position(|&m| m == y).is_some_and(|x| g1.adj[v].contains(&x)));
            if !consistent {
                continue;
            }
            map[v] = w;
            used[w] = true;
            if rec(k + 1, order, g1, g2, map, used, ok) {
                return true;
            }
            map[v] = usize::MAX;
            used[w] = false;
        }
        false
    }
    let ok = |v: usize, w: usize| sig(g1, &d1, v) == sig(g2, &d2, w);
    rec(0, &order, g1, g2, &mut map, &mut used, &ok)
}
