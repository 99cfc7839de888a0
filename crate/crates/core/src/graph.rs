//! Graphs with a probability distribution on the vertices.
//!
//! Edges are unit length and unweighted; the only weights are the vertex
//! masses `pi`. Masses are kept as exact rationals whenever the input makes
//! that possible (fractions, or decimals that sum to exactly one), alongside
//! an `f64` copy used by the iterative solvers.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;
use std::ops::Deref;

use num::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::{format_rational, parse_rational, rational_to_f64, Rational};

/// Mass-sum tolerance in float mode.
pub const FLOAT_MASS_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GraphOptions {
    /// Accept `pi_v = 0`. Such vertices still carry Lipschitz constraints
    /// but contribute nothing to variance or moments.
    pub allow_zero_mass: bool,
}

impl GraphOptions {
    pub fn allow_zero_mass() -> Self {
        GraphOptions { allow_zero_mass: true }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
    pi: Vec<f64>,
    pi_exact: Option<Vec<Rational>>,
}

impl WeightedGraph {
    /// Builds a graph with exact rational masses.
    pub fn from_rational(
        n: usize,
        edges: &[(usize, usize)],
        pi: Vec<Rational>,
        opts: GraphOptions,
    ) -> Result<Self> {
        if pi.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: pi.len() });
        }
        for (v, p) in pi.iter().enumerate() {
            check_mass_sign(v, p.is_negative(), p.is_zero(), opts)?;
        }
        let total: Rational = pi.iter().sum();
        if !total.is_one() {
            return Err(Error::InvalidGraph(format!(
                "π must sum to 1 (got {})",
                format_rational(&total)
            )));
        }
        let pi_f64 = pi.iter().map(rational_to_f64).collect();
        Self::assemble(n, edges, pi_f64, Some(pi))
    }

    /// Builds a graph with floating-point masses (no exact mode).
    pub fn from_f64(n: usize, edges: &[(usize, usize)], pi: Vec<f64>, opts: GraphOptions) -> Result<Self> {
        if pi.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: pi.len() });
        }
        for (v, &p) in pi.iter().enumerate() {
            if !p.is_finite() {
                return Err(Error::InvalidGraph(format!("π_{v} is not finite")));
            }
            check_mass_sign(v, p < 0.0, p == 0.0, opts)?;
        }
        let total: f64 = pi.iter().sum();
        if (total - 1.0).abs() > FLOAT_MASS_TOL {
            return Err(Error::InvalidGraph(format!("π must sum to 1 (got {total})")));
        }
        Self::assemble(n, edges, pi, None)
    }

    /// Uniform masses `1/n`, exact.
    pub fn uniform(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGraph("graph has no vertices".into()));
        }
        let p = Rational::new(1.into(), (n as i64).into());
        Self::from_rational(n, edges, vec![p; n], GraphOptions::default())
    }

    fn assemble(
        n: usize,
        edges: &[(usize, usize)],
        pi: Vec<f64>,
        pi_exact: Option<Vec<Rational>>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGraph("graph has no vertices".into()));
        }
        let mut seen = BTreeSet::new();
        let mut adj = vec![Vec::new(); n];
        let mut norm = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!("edge ({u}, {v}) out of range for n = {n}")));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at {u}")));
            }
            let e = (u.min(v), u.max(v));
            if !seen.insert(e) {
                return Err(Error::InvalidGraph(format!("duplicate edge ({}, {})", e.0, e.1)));
            }
            adj[u].push(v);
            adj[v].push(u);
            norm.push(e);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        norm.sort_unstable();
        let g = WeightedGraph { n, edges: norm, adj, pi, pi_exact };
        if !g.is_connected() {
            return Err(Error::InvalidGraph("graph is disconnected".into()));
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn pi(&self) -> &[f64] {
        &self.pi
    }

    pub fn pi_exact(&self) -> Option<&[Rational]> {
        self.pi_exact.as_deref()
    }

    pub fn is_exact(&self) -> bool {
        self.pi_exact.is_some()
    }

    pub fn has_zero_mass(&self) -> bool {
        self.pi.contains(&0.0)
    }

    pub fn is_uniform(&self) -> bool {
        match &self.pi_exact {
            Some(p) => p.iter().all(|q| *q == p[0]),
            None => self.pi.iter().all(|&q| (q - self.pi[0]).abs() <= FLOAT_MASS_TOL),
        }
    }

    pub fn is_tree(&self) -> bool {
        self.edges.len() + 1 == self.n
    }

    pub fn is_star(&self) -> bool {
        self.is_tree() && self.edges.iter().all(|&(u, _)| u == 0)
    }

    fn is_connected(&self) -> bool {
        self.bfs_distances(&[0]).iter().all(|d| d.is_some())
    }

    /// Hop distances from a set of sources (`None` if unreachable).
    pub fn bfs_distances(&self, sources: &[usize]) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s].is_none() {
                dist[s] = Some(0);
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap_or(0);
            for &w in &self.adj[u] {
                if dist[w].is_none() {
                    dist[w] = Some(du + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Distances from one vertex; the graph is connected so all are finite.
    pub fn distances_from(&self, v: usize) -> Vec<usize> {
        self.bfs_distances(&[v]).into_iter().map(|d| d.unwrap_or(usize::MAX)).collect()
    }

    /// Connected components of the subgraph induced by vertices with
    /// `keep[v] == true`, as a label per vertex (`usize::MAX` if removed).
    pub fn components_of(&self, keep: &[bool]) -> (Vec<usize>, usize) {
        let mut label = vec![usize::MAX; self.n];
        let mut count = 0;
        for s in 0..self.n {
            if !keep[s] || label[s] != usize::MAX {
                continue;
            }
            label[s] = count;
            let mut stack = vec![s];
            while let Some(u) = stack.pop() {
                for &w in &self.adj[u] {
                    if keep[w] && label[w] == usize::MAX {
                        label[w] = count;
                        stack.push(w);
                    }
                }
            }
            count += 1;
        }
        (label, count)
    }

    /// Neighbor bitmasks, available for `n <= 64`.
    pub fn adjacency_masks(&self) -> Option<Vec<u64>> {
        if self.n > 64 {
            return None;
        }
        Some(self.adj.iter().map(|list| list.iter().fold(0u64, |m, &w| m | (1u64 << w))).collect())
    }

    /// Serializes to the text graph format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "vertices {}", self.n);
        for v in 0..self.n {
            match &self.pi_exact {
                Some(p) => {
                    let _ = writeln!(out, "pi {v} {}", format_rational(&p[v]));
                }
                None => {
                    let _ = writeln!(out, "pi {v} {:?}", self.pi[v]);
                }
            }
        }
        for &(u, v) in &self.edges {
            let _ = writeln!(out, "edge {u} {v}");
        }
        out
    }
}

fn check_mass_sign(v: usize, negative: bool, zero: bool, opts: GraphOptions) -> Result<()> {
    if negative || (zero && !opts.allow_zero_mass) {
        return Err(Error::InvalidGraph(format!("π_v must be positive (vertex {v})")));
    }
    Ok(())
}

/// Parses the text graph format:
///
/// ```text
/// # comment
/// vertices <n>
/// pi <v> <p/q or decimal>
/// edge <u> <v>
/// ```
pub fn parse_graph(text: &str, opts: GraphOptions) -> Result<WeightedGraph> {
    let err = |line: usize, message: String| Error::Parse { line, message };
    let mut n: Option<(usize, usize)> = None;
    let mut pis: Vec<(usize, usize, String)> = Vec::new();
    let mut edges: Vec<(usize, usize, usize)> = Vec::new();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        let parse_index = |s: &str| s.parse::<usize>().map_err(|_| err(line, format!("invalid vertex index '{s}'")));
        match fields[0] {
            "vertices" => {
                if fields.len() != 2 {
                    return Err(err(line, "expected 'vertices <n>'".into()));
                }
                if n.is_some() {
                    return Err(err(line, "duplicate 'vertices' directive".into()));
                }
                let count = fields[1].parse::<usize>().map_err(|_| err(line, format!("invalid vertex count '{}'", fields[1])))?;
                if count == 0 {
                    return Err(err(line, "vertex count must be positive".into()));
                }
                n = Some((count, line));
            }
            "pi" => {
                if fields.len() != 3 {
                    return Err(err(line, "expected 'pi <v> <value>'".into()));
                }
                pis.push((line, parse_index(fields[1])?, fields[2].to_string()));
            }
            "edge" => {
                if fields.len() != 3 {
                    return Err(err(line, "expected 'edge <u> <v>'".into()));
                }
                edges.push((line, parse_index(fields[1])?, parse_index(fields[2])?));
            }
            other => return Err(err(line, format!("unknown directive '{other}'"))),
        }
    }

    let (n, n_line) = n.ok_or_else(|| err(last_line.max(1), "missing 'vertices' directive".into()))?;
    let mut exact: Vec<Option<Rational>> = vec![None; n];
    for (line, v, value) in &pis {
        if *v >= n {
            return Err(err(*line, format!("vertex {v} out of range for n = {n}")));
        }
        if exact[*v].is_some() {
            return Err(err(*line, format!("duplicate pi for vertex {v}")));
        }
        let q = parse_rational(value).ok_or_else(|| err(*line, format!("invalid probability '{value}'")))?;
        if q.is_negative() || (q.is_zero() && !opts.allow_zero_mass) {
            return Err(err(*line, format!("π_v must be positive (vertex {v})")));
        }
        exact[*v] = Some(q);
    }
    let mut pi = Vec::with_capacity(n);
    for (v, q) in exact.into_iter().enumerate() {
        pi.push(q.ok_or_else(|| err(n_line, format!("missing pi for vertex {v}")))?);
    }

    let mut seen = BTreeSet::new();
    for &(line, u, v) in &edges {
        if u >= n || v >= n {
            return Err(err(line, format!("edge ({u}, {v}) out of range for n = {n}")));
        }
        if u == v {
            return Err(err(line, format!("self-loop at vertex {u}")));
        }
        if !seen.insert((u.min(v), u.max(v))) {
            return Err(err(line, format!("duplicate edge ({u}, {v})")));
        }
    }
    let edge_list: Vec<(usize, usize)> = edges.iter().map(|&(_, u, v)| (u, v)).collect();

    let total: Rational = pi.iter().sum();
    let built = if total.is_one() {
        WeightedGraph::from_rational(n, &edge_list, pi, opts)
    } else {
        let pf: Vec<f64> = pi.iter().map(rational_to_f64).collect();
        let sum: f64 = pf.iter().sum();
        if (sum - 1.0).abs() > FLOAT_MASS_TOL {
            return Err(err(n_line, format!("π must sum to 1 (got {})", format_rational(&total))));
        }
        WeightedGraph::from_f64(n, &edge_list, pf, opts)
    };
    built.map_err(|e| match e {
        Error::InvalidGraph(message) => err(last_line.max(n_line), message),
        other => other,
    })
}

/// A tree with a designated root, parent pointers and a preorder.
#[derive(Debug, Clone)]
pub struct TreeGraph {
    graph: WeightedGraph,
    root: usize,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    preorder: Vec<usize>,
}

impl TreeGraph {
    pub fn new(graph: WeightedGraph) -> Result<Self> {
        Self::with_root(graph, 0)
    }

    pub fn with_root(graph: WeightedGraph, root: usize) -> Result<Self> {
        if !graph.is_tree() {
            return Err(Error::InvalidGraph(format!(
                "not a tree: {} vertices, {} edges",
                graph.n(),
                graph.edges().len()
            )));
        }
        if root >= graph.n() {
            return Err(Error::InvalidArgument(format!("root {root} out of range")));
        }
        let n = graph.n();
        let mut parent = vec![None; n];
        let mut children = vec![Vec::new(); n];
        let mut preorder = Vec::with_capacity(n);
        let mut visited = vec![false; n];
        let mut stack = vec![root];
        visited[root] = true;
        while let Some(u) = stack.pop() {
            preorder.push(u);
            for &w in graph.neighbors(u).iter().rev() {
                if !visited[w] {
                    visited[w] = true;
                    parent[w] = Some(u);
                    children[u].push(w);
                    stack.push(w);
                }
            }
        }
        for c in &mut children {
            c.sort_unstable();
        }
        Ok(TreeGraph { graph, root, parent, children, preorder })
    }

    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    /// Vertices in preorder (parents before children).
    pub fn preorder(&self) -> &[usize] {
        &self.preorder
    }

    /// The vertices of the branch at `v` that contains neighbor `via`.
    pub fn branch(&self, v: usize, via: usize) -> Vec<usize> {
        let mut out = vec![via];
        let mut stack = vec![(via, v)];
        while let Some((u, from)) = stack.pop() {
            for &w in self.graph.neighbors(u) {
                if w != from {
                    out.push(w);
                    stack.push((w, u));
                }
            }
        }
        out.sort_unstable();
        out
    }
}

impl Deref for TreeGraph {
    type Target = WeightedGraph;
    fn deref(&self) -> &WeightedGraph {
        &self.graph
    }
}

/// A star `S_n`: center 0 joined to leaves `1..n`.
#[derive(Debug, Clone)]
pub struct StarGraph {
    graph: WeightedGraph,
}

impl StarGraph {
    pub fn new(graph: WeightedGraph) -> Result<Self> {
        if graph.n() < 2 || !graph.is_star() {
            return Err(Error::InvalidGraph("not a star centered at vertex 0".into()));
        }
        Ok(StarGraph { graph })
    }

    /// Star with exact masses `pi[0]` (center), `pi[1..]` (leaves).
    pub fn from_rational(pi: Vec<Rational>, opts: GraphOptions) -> Result<Self> {
        let n = pi.len();
        let edges = star_edges(n);
        Self::new(WeightedGraph::from_rational(n, &edges, pi, opts)?)
    }

    pub fn from_f64(pi: Vec<f64>, opts: GraphOptions) -> Result<Self> {
        let n = pi.len();
        let edges = star_edges(n);
        Self::new(WeightedGraph::from_f64(n, &edges, pi, opts)?)
    }

    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    pub fn into_graph(self) -> WeightedGraph {
        self.graph
    }

    pub fn leaf_count(&self) -> usize {
        self.graph.n() - 1
    }

    pub fn center_mass(&self) -> f64 {
        self.graph.pi()[0]
    }

    pub fn center_mass_exact(&self) -> Option<&Rational> {
        self.graph.pi_exact().map(|p| &p[0])
    }

    pub fn leaf_masses(&self) -> &[f64] {
        &self.graph.pi()[1..]
    }

    pub fn leaf_masses_exact(&self) -> Option<&[Rational]> {
        self.graph.pi_exact().map(|p| &p[1..])
    }
}

impl Deref for StarGraph {
    type Target = WeightedGraph;
    fn deref(&self) -> &WeightedGraph {
        &self.graph
    }
}

pub fn star_edges(n: usize) -> Vec<(usize, usize)> {
    (1..n).map(|i| (0, i)).collect()
}

pub fn path_edges(n: usize) -> Vec<(usize, usize)> {
    (1..n).map(|i| (i - 1, i)).collect()
}

pub fn cycle_edges(n: usize) -> Vec<(usize, usize)> {
    let mut e = path_edges(n);
    if n > 2 {
        e.push((0, n - 1));
    }
    e
}
