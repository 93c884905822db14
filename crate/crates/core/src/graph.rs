//! Simple undirected graphs: host graphs for the constrained models and
//! pattern graphs for subgraph counting.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A simple undirected graph on vertices `0..n`.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    #[serde(skip)]
    adj: Vec<Vec<usize>>,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, edges={:?})", self.n, self.edges)
    }
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            n,
            edges: Vec::new(),
            adj: vec![Vec::new(); n],
        }
    }

    /// Builds a graph from an edge list, rejecting loops and repeated edges.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Graph::empty(n);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        if u >= self.n || v >= self.n {
            return Err(Error::Graph(format!(
                "edge ({u}, {v}) out of range for {} vertices",
                self.n
            )));
        }
        if u == v {
            return Err(Error::Graph(format!("self-loop at vertex {u}")));
        }
        if self.has_edge(u, v) {
            return Err(Error::Graph(format!("repeated edge ({u}, {v})")));
        }
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        self.edges.push((a, b));
        self.adj[a].push(b);
        self.adj[b].push(a);
        Ok(())
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Graph::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v).expect("complete graph edges are distinct");
            }
        }
        g
    }

    /// Path on `n` vertices (`n - 1` edges).
    pub fn path(n: usize) -> Self {
        let mut g = Graph::empty(n);
        for v in 1..n {
            g.add_edge(v - 1, v).expect("path edges are distinct");
        }
        g
    }

    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::Graph("a simple cycle needs at least 3 vertices".into()));
        }
        let mut g = Graph::path(n);
        g.add_edge(n - 1, 0)?;
        Ok(g)
    }

    /// Star with `k` leaves around vertex 0.
    pub fn star(k: usize) -> Self {
        let mut g = Graph::empty(k + 1);
        for v in 1..=k {
            g.add_edge(0, v).expect("star edges are distinct");
        }
        g
    }

    /// `rows x cols` grid graph, vertices numbered row-major.
    pub fn grid(rows: usize, cols: usize) -> Self {
        let mut g = Graph::empty(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                let v = r * cols + c;
                if c + 1 < cols {
                    g.add_edge(v, v + 1).expect("grid edges are distinct");
                }
                if r + 1 < rows {
                    g.add_edge(v, v + cols).expect("grid edges are distinct");
                }
            }
        }
        g
    }

    /// Named pattern graphs: `edge`, `triangle`, `2star`, `path3`, `k4`.
    pub fn pattern(name: &str) -> Result<Self> {
        match name.trim().to_ascii_lowercase().as_str() {
            "edge" | "k2" => Ok(Graph::complete(2)),
            "triangle" | "k3" => Ok(Graph::complete(3)),
            "2star" | "two-star" | "2-star" | "path2" => Ok(Graph::star(2)),
            "path3" => Ok(Graph::path(4)),
            "k4" => Ok(Graph::complete(4)),
            other => Err(Error::Graph(format!("unknown pattern name '{other}'"))),
        }
    }

    /// Parses a whitespace-separated edge list (`u v` per line, 0-based).
    /// Blank lines and lines starting with `#` are ignored. The vertex
    /// count is one more than the largest index unless `min_vertices` is larger.
    pub fn parse_edge_list(text: &str, min_vertices: usize) -> Result<Self> {
        let mut pairs = Vec::new();
        let mut n = min_vertices;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let parse = |s: Option<&str>| -> Result<usize> {
                s.ok_or_else(|| Error::Graph(format!("line {}: expected 'u v'", lineno + 1)))?
                    .parse::<usize>()
                    .map_err(|e| Error::Graph(format!("line {}: {e}", lineno + 1)))
            };
            let u = parse(parts.next())?;
            let v = parse(parts.next())?;
            if parts.next().is_some() {
                return Err(Error::Graph(format!(
                    "line {}: expected exactly two vertices",
                    lineno + 1
                )));
            }
            n = n.max(u + 1).max(v + 1);
            pairs.push((u, v));
        }
        Graph::from_edges(n, &pairs)
    }

    pub fn read_edge_list(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Graph::parse_edge_list(&text, 0)
    }

    /// Resolves a graph specification: `complete:N`, `path:N`, `cycle:N`,
    /// `star:K`, `grid:RxC`, a pattern name, or `file:<path>`.
    pub fn from_spec(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        if let Some(path) = spec.strip_prefix("file:") {
            return Graph::read_edge_list(Path::new(path));
        }
        if let Some((kind, arg)) = spec.split_once(':') {
            let num = |s: &str| -> Result<usize> {
                s.trim()
                    .parse::<usize>()
                    .map_err(|e| Error::Graph(format!("bad size in '{spec}': {e}")))
            };
            return match kind.trim().to_ascii_lowercase().as_str() {
                "complete" | "k" => Ok(Graph::complete(num(arg)?)),
                "path" => Ok(Graph::path(num(arg)?)),
                "cycle" => Graph::cycle(num(arg)?),
                "star" => Ok(Graph::star(num(arg)?)),
                "empty" => Ok(Graph::empty(num(arg)?)),
                "grid" => {
                    let (r, c) = arg
                        .split_once(['x', 'X'])
                        .ok_or_else(|| Error::Graph(format!("grid spec '{spec}' needs RxC")))?;
                    Ok(Graph::grid(num(r)?, num(c)?))
                }
                other => Err(Error::Graph(format!("unknown graph family '{other}'"))),
            };
        }
        Graph::pattern(spec)
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
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

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.adj[u].contains(&v)
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in &self.adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.n
    }

    /// Adjacency matrix as a dense boolean table.
    pub fn adjacency_matrix(&self) -> Vec<Vec<bool>> {
        let mut m = vec![vec![false; self.n]; self.n];
        for &(u, v) in &self.edges {
            m[u][v] = true;
            m[v][u] = true;
        }
        m
    }

    /// Number of edges with both endpoints in the vertex set `mask`.
    pub fn induced_edge_count(&self, mask: u64) -> usize {
        self.edges
            .iter()
            .filter(|&&(u, v)| mask >> u & 1 == 1 && mask >> v & 1 == 1)
            .count()
    }

    /// Rebuilds adjacency lists after deserialization.
    pub fn rebuild(mut self) -> Result<Self> {
        let edges = std::mem::take(&mut self.edges);
        Graph::from_edges(self.n, &edges)
    }
}
