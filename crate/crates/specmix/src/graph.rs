//! Edge-partitioned simple graphs.
//!
//! Every edge of the underlying simple graph carries one of two labels:
//! [`EdgeClass::Diffusive`] edges feed the Laplacian block of the mixed
//! operator, [`EdgeClass::Saddle`] edges feed the adjacency block. The two
//! edge sets are disjoint by construction; an edge pair may appear at most
//! once regardless of class.
//!
//! Vertices are 1-based in the text format and 0-based everywhere in the
//! API; conversion happens only at the parse/emit boundary.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Label of a single edge: diffusive edges build the Laplacian, saddle
/// edges build the adjacency matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EdgeClass {
    Diffusive,
    Saddle,
}

impl fmt::Display for EdgeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeClass::Diffusive => write!(f, "g"),
            EdgeClass::Saddle => write!(f, "h"),
        }
    }
}

/// An undirected labelled edge, stored canonically with `u < v` (0-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub class: EdgeClass,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex count must be positive")]
    EmptyVertexSet,
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("self-loop on vertex {vertex} (1-based)")]
    SelfLoop { vertex: usize },
    #[error("edge {{{u},{v}}} (1-based) declared twice; diffusive and saddle edge sets must be disjoint")]
    DuplicateEdge { u: usize, v: usize },
    #[error("vertex {vertex} (1-based) out of range 1..={n}")]
    VertexOutOfRange { vertex: usize, n: usize },
}

/// A simple graph on `n` vertices whose edges are split into the diffusive
/// and saddle classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionedGraph {
    n: usize,
    edges: BTreeSet<Edge>,
}

impl PartitionedGraph {
    /// Create an edgeless graph on `n >= 1` vertices.
    pub fn new(n: usize) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::EmptyVertexSet);
        }
        Ok(Self {
            n,
            edges: BTreeSet::new(),
        })
    }

    /// Insert an edge given 0-based endpoints. Rejects self-loops,
    /// out-of-range vertices, and pairs already present in either class.
    pub fn add_edge(&mut self, u: usize, v: usize, class: EdgeClass) -> Result<(), GraphError> {
        if u >= self.n {
            return Err(GraphError::VertexOutOfRange {
                vertex: u + 1,
                n: self.n,
            });
        }
        if v >= self.n {
            return Err(GraphError::VertexOutOfRange {
                vertex: v + 1,
                n: self.n,
            });
        }
        if u == v {
            return Err(GraphError::SelfLoop { vertex: u + 1 });
        }
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        if self.has_pair(a, b) {
            return Err(GraphError::DuplicateEdge { u: a + 1, v: b + 1 });
        }
        self.edges.insert(Edge { u: a, v: b, class });
        Ok(())
    }

    fn has_pair(&self, u: usize, v: usize) -> bool {
        self.class_of(u, v).is_some()
    }

    /// Class of the edge between `u` and `v` (0-based), if present.
    pub fn class_of(&self, u: usize, v: usize) -> Option<EdgeClass> {
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        self.edges
            .iter()
            .find(|e| e.u == a && e.v == b)
            .map(|e| e.class)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> impl Iterator<Item = &Edge> {
        self.edges.iter()
    }

    /// Edges of one class only.
    pub fn edges_of(&self, class: EdgeClass) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(move |e| e.class == class)
    }

    pub fn edge_count(&self, class: EdgeClass) -> usize {
        self.edges_of(class).count()
    }

    /// Degree of `v` counting only edges of `class`.
    pub fn degree(&self, v: usize, class: EdgeClass) -> usize {
        self.edges_of(class)
            .filter(|e| e.u == v || e.v == v)
            .count()
    }

    /// Parse the line-oriented edge-list format:
    ///
    /// ```text
    /// # comment
    /// n 3
    /// g 1 2
    /// g 2 3
    /// h 1 3
    /// ```
    ///
    /// The `n <int>` line must be the first non-comment, non-blank line and
    /// appear exactly once; vertex indices are 1-based.
    pub fn parse(text: &str) -> Result<Self, GraphError> {
        let mut graph: Option<PartitionedGraph> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut tokens = line.split_whitespace();
            let head = tokens.next().expect("non-empty line");
            match head {
                "n" => {
                    if graph.is_some() {
                        return Err(GraphError::Parse {
                            line: line_no,
                            reason: "duplicate vertex-count line".into(),
                        });
                    }
                    let n = parse_count(tokens.next(), line_no)?;
                    ensure_no_trailing(tokens.next(), line_no)?;
                    if n == 0 {
                        return Err(GraphError::Parse {
                            line: line_no,
                            reason: "vertex count must be positive".into(),
                        });
                    }
                    graph = Some(PartitionedGraph::new(n)?);
                }
                "g" | "h" => {
                    let graph = graph.as_mut().ok_or_else(|| GraphError::Parse {
                        line: line_no,
                        reason: "edge line before the vertex-count line".into(),
                    })?;
                    let u = parse_count(tokens.next(), line_no)?;
                    let v = parse_count(tokens.next(), line_no)?;
                    ensure_no_trailing(tokens.next(), line_no)?;
                    if u == 0 || v == 0 {
                        return Err(GraphError::Parse {
                            line: line_no,
                            reason: "vertex indices are 1-based".into(),
                        });
                    }
                    let class = if head == "g" {
                        EdgeClass::Diffusive
                    } else {
                        EdgeClass::Saddle
                    };
                    graph.add_edge(u - 1, v - 1, class)?;
                }
                other => {
                    return Err(GraphError::Parse {
                        line: line_no,
                        reason: format!("unknown directive `{other}`"),
                    });
                }
            }
        }
        graph.ok_or(GraphError::Parse {
            line: 0,
            reason: "missing vertex-count line".into(),
        })
    }

    /// Emit the canonical edge-list document (1-based, edges sorted).
    /// `parse(to_edge_list(g)) == g` for every valid graph.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("n {}\n", self.n);
        let mut sorted: Vec<&Edge> = self.edges.iter().collect();
        sorted.sort();
        for e in sorted {
            out.push_str(&format!("{} {} {}\n", e.class, e.u + 1, e.v + 1));
        }
        out
    }
}

fn parse_count(token: Option<&str>, line: usize) -> Result<usize, GraphError> {
    let token = token.ok_or_else(|| GraphError::Parse {
        line,
        reason: "missing integer field".into(),
    })?;
    token.parse::<usize>().map_err(|_| GraphError::Parse {
        line,
        reason: format!("`{token}` is not a nonnegative integer"),
    })
}

fn ensure_no_trailing(token: Option<&str>, line: usize) -> Result<(), GraphError> {
    match token {
        None => Ok(()),
        Some(t) => Err(GraphError::Parse {
            line,
            reason: format!("unexpected trailing token `{t}`"),
        }),
    }
}

/// Connected components of the diffusive subgraph. Isolated vertices form
/// singleton components. Components are numbered 0..r by their smallest
/// vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentDecomposition {
    component_of: Vec<usize>,
    sizes: Vec<usize>,
}

impl ComponentDecomposition {
    /// Number of components `r`.
    pub fn count(&self) -> usize {
        self.sizes.len()
    }

    /// Component index of a vertex.
    pub fn component_of(&self, v: usize) -> usize {
        self.component_of[v]
    }

    /// Vertex counts per component.
    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Vertices of component `c`, ascending.
    pub fn members(&self, c: usize) -> Vec<usize> {
        self.component_of
            .iter()
            .enumerate()
            .filter(|&(_, &ci)| ci == c)
            .map(|(v, _)| v)
            .collect()
    }
}

/// Decompose the diffusive subgraph into connected components by
/// breadth-first search; saddle edges are ignored.
pub fn connected_components(g: &PartitionedGraph) -> ComponentDecomposition {
    let n = g.vertex_count();
    let mut adj = vec![Vec::new(); n];
    for e in g.edges_of(EdgeClass::Diffusive) {
        adj[e.u].push(e.v);
        adj[e.v].push(e.u);
    }
    let mut component_of = vec![usize::MAX; n];
    let mut sizes = Vec::new();
    for start in 0..n {
        if component_of[start] != usize::MAX {
            continue;
        }
        let c = sizes.len();
        let mut queue = vec![start];
        component_of[start] = c;
        let mut size = 0usize;
        while let Some(v) = queue.pop() {
            size += 1;
            for &w in &adj[v] {
                if component_of[w] == usize::MAX {
                    component_of[w] = c;
                    queue.push(w);
                }
            }
        }
        sizes.push(size);
    }
    ComponentDecomposition { component_of, sizes }
}

/// Saddle-edge tallies relative to a component decomposition: `within[i]`
/// counts saddle edges with both endpoints in component `i`, `between[i][j]`
/// counts saddle edges spanning components `i != j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HEdgeCounts {
    pub within: Vec<u64>,
    pub between: Vec<Vec<u64>>,
}

impl HEdgeCounts {
    pub fn component_count(&self) -> usize {
        self.within.len()
    }

    /// Total saddle edges accounted for: sum of `within` plus the upper
    /// triangle of `between`.
    pub fn total(&self) -> u64 {
        let r = self.within.len();
        let mut t: u64 = self.within.iter().sum();
        for i in 0..r {
            for j in (i + 1)..r {
                t += self.between[i][j];
            }
        }
        t
    }
}

/// Count saddle edges within and between the diffusive components.
pub fn h_edge_counts(g: &PartitionedGraph, comp: &ComponentDecomposition) -> HEdgeCounts {
    let r = comp.count();
    let mut within = vec![0u64; r];
    let mut between = vec![vec![0u64; r]; r];
    for e in g.edges_of(EdgeClass::Saddle) {
        let ci = comp.component_of(e.u);
        let cj = comp.component_of(e.v);
        if ci == cj {
            within[ci] += 1;
        } else {
            between[ci][cj] += 1;
            between[cj][ci] += 1;
        }
    }
    HEdgeCounts { within, between }
}

/// True iff the diffusive edges of component `c` form a complete graph on
/// its vertices. Singletons are trivially complete.
pub fn is_complete_component(
    c: usize,
    g: &PartitionedGraph,
    comp: &ComponentDecomposition,
) -> bool {
    let size = comp.sizes()[c];
    let internal = g
        .edges_of(EdgeClass::Diffusive)
        .filter(|e| comp.component_of(e.u) == c && comp.component_of(e.v) == c)
        .count();
    internal == size * (size - 1) / 2
}
