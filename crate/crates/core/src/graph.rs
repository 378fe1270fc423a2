use std::collections::BTreeSet;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::matrix::Matrix;
use crate::scalar::ExactInt;

/// Finite simple connected undirected graph with 0-indexed vertices.
///
/// Immutable after construction; cheap to share across threads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    /// Normalized edge list: each pair (u, v) has u < v, sorted ascending.
    edges: Vec<(usize, usize)>,
    /// Sorted adjacency lists, one per vertex.
    adj: Vec<Vec<usize>>,
}

impl Graph {
    /// Validates and builds a graph: n ≥ 2, no loops, no duplicate edges,
    /// connected. Edge pairs may appear in either orientation.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooFewVertices { min: 2, got: n });
        }
        let mut seen = BTreeSet::new();
        for &(u, v) in edges {
            if u >= n {
                return Err(Error::VertexOutOfRange { index: u, n });
            }
            if v >= n {
                return Err(Error::VertexOutOfRange { index: v, n });
            }
            if u == v {
                return Err(Error::InvalidEdge(u, v, "loop"));
            }
            let key = (u.min(v), u.max(v));
            if !seen.insert(key) {
                return Err(Error::InvalidEdge(u, v, "duplicate edge"));
            }
        }
        let edges: Vec<(usize, usize)> = seen.into_iter().collect();
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        let g = Graph { n, edges, adj };
        if !g.is_connected() {
            return Err(Error::Disconnected);
        }
        Ok(g)
    }

    /// Cycle on n ≥ 3 vertices: edges {i, (i+1) mod n}.
    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidFamily(format!("cycle needs n >= 3, got {n}")));
        }
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Self::new(n, &edges)
    }

    /// Path on n ≥ 2 vertices: edges {i, i+1}.
    pub fn path(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidFamily(format!("path needs n >= 2, got {n}")));
        }
        let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
        Self::new(n, &edges)
    }

    /// Complete graph on n ≥ 2 vertices.
    pub fn complete(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidFamily(format!(
                "complete graph needs n >= 2, got {n}"
            )));
        }
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                edges.push((u, v));
            }
        }
        Self::new(n, &edges)
    }

    /// Parses the JSON document form `{"n": 3, "edges": [[0,1],[1,2],[2,0]]}`.
    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Doc {
            n: usize,
            edges: Vec<(usize, usize)>,
        }
        let doc: Doc = serde_json::from_slice(bytes)
            .map_err(|e| Error::MalformedGraph(e.to_string()))?;
        Self::new(doc.n, &doc.edges)
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &u in &self.adj[v] {
                if !seen[u] {
                    seen[u] = true;
                    count += 1;
                    stack.push(u);
                }
            }
        }
        count == self.n
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.n {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange {
                index: v,
                n: self.n,
            })
        }
    }

    /// Laplacian L = D − A: degrees on the diagonal, −1 per edge.
    pub fn laplacian<T: ExactInt>(&self) -> Matrix<T> {
        let mut l = Matrix::zeros(self.n, self.n);
        for v in 0..self.n {
            l[(v, v)] = T::from_usize_exact(self.degree(v));
        }
        for &(u, v) in &self.edges {
            l[(u, v)] = -T::one();
            l[(v, u)] = -T::one();
        }
        l
    }

    /// Laplacian with row and column `omit` deleted.
    pub fn reduced_laplacian<T: ExactInt>(&self, omit: usize) -> Result<Matrix<T>> {
        self.check_vertex(omit)?;
        Ok(self.laplacian::<T>().minor(omit, omit))
    }

    /// Number of spanning trees, |det L'| with the last vertex omitted.
    /// The choice of omitted vertex does not affect the value.
    pub fn spanning_tree_count<T: ExactInt>(&self) -> T {
        let reduced = self
            .reduced_laplacian::<T>(self.n - 1)
            .expect("last vertex always exists");
        linalg::determinant(&reduced)
            .expect("reduced laplacian is square")
            .abs()
    }
}

/// Parsed form of the CLI graph shorthand: `cycle:N`, `path:N`,
/// `complete:N`, or `file:PATH` pointing at a JSON document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphSpec {
    Cycle(usize),
    Path(usize),
    Complete(usize),
    File(PathBuf),
}

impl GraphSpec {
    /// Builds the graph, reading the document from disk for `file:` specs.
    pub fn build(&self) -> Result<Graph> {
        match self {
            GraphSpec::Cycle(n) => Graph::cycle(*n),
            GraphSpec::Path(n) => Graph::path(*n),
            GraphSpec::Complete(n) => Graph::complete(*n),
            GraphSpec::File(path) => {
                let bytes = std::fs::read(path).map_err(|e| {
                    Error::MalformedGraph(format!("{}: {e}", path.display()))
                })?;
                Graph::from_json(&bytes)
            }
        }
    }
}

impl FromStr for GraphSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidFamily(format!("expected KIND:ARG, got {s:?}")))?;
        let size = |rest: &str| -> Result<usize> {
            rest.parse()
                .map_err(|_| Error::InvalidFamily(format!("bad vertex count {rest:?}")))
        };
        match kind {
            "cycle" => Ok(GraphSpec::Cycle(size(rest)?)),
            "path" => Ok(GraphSpec::Path(size(rest)?)),
            "complete" => Ok(GraphSpec::Complete(size(rest)?)),
            "file" => Ok(GraphSpec::File(PathBuf::from(rest))),
            other => Err(Error::InvalidFamily(format!("unknown graph kind {other:?}"))),
        }
    }
}

impl fmt::Display for GraphSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphSpec::Cycle(n) => write!(f, "cycle:{n}"),
            GraphSpec::Path(n) => write!(f, "path:{n}"),
            GraphSpec::Complete(n) => write!(f, "complete:{n}"),
            GraphSpec::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}
