//! Erdős–Rényi `G(V, p)` sampling.
//!
//! Unordered pairs `{w, v}` with `w < v` are linearised column by column
//! (`(0,1), (0,2), (1,2), (0,3), ...`) and the sampler jumps from one included
//! pair to the next with `Geometric(p)` skip lengths
//! (`skip = floor(ln U / ln(1 - p))`, `U` uniform on `(0, 1]`), so a graph with
//! `E` edges costs `O(V + E)` random draws.

use std::fmt::Write as _;
use std::io::{self, BufRead, Write};

use thiserror::Error;

use crate::rng::Stream;

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("edge probability must lie in [0, 1], got {0}")]
    InvalidProbability(f64),
    #[error("graph needs at least one vertex")]
    NoVertices,
    #[error("vertex count {0} exceeds the supported maximum of 2^32 - 1")]
    TooManyVertices(usize),
    #[error("invalid edge ({0}, {1}) for a graph on {2} vertices")]
    InvalidEdge(usize, usize, usize),
    #[error("malformed edge list: {0}")]
    Parse(String),
}

/// An undirected simple graph with sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphSample {
    adjacency: Vec<Vec<u32>>,
    edge_count: usize,
}

fn check_args(vertex_count: usize, p: f64) -> Result<(), GraphError> {
    if vertex_count == 0 {
        return Err(GraphError::NoVertices);
    }
    if vertex_count > u32::MAX as usize {
        return Err(GraphError::TooManyVertices(vertex_count));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(GraphError::InvalidProbability(p));
    }
    Ok(())
}

/// Streams the edges of one `G(vertex_count, p)` sample to `visit` as `(w, v)`
/// with `w < v`, in increasing linear pair order. Returns the edge count.
pub fn for_each_gnp_edge<F>(
    vertex_count: usize,
    p: f64,
    stream: &mut Stream,
    mut visit: F,
) -> Result<usize, GraphError>
where
    F: FnMut(u32, u32),
{
    check_args(vertex_count, p)?;
    if p == 0.0 || vertex_count < 2 {
        return Ok(0);
    }
    let vc = vertex_count as u64;
    let mut edges = 0usize;
    if p == 1.0 {
        for v in 1..vc {
            for w in 0..v {
                visit(w as u32, v as u32);
                edges += 1;
            }
        }
        return Ok(edges);
    }

    let log_q = (-p).ln_1p();
    // (w, v) is the current pair; w = -1 before the first draw.
    let mut v: u64 = 1;
    let mut w: i64 = -1;
    loop {
        let skip = (stream.next_open01().ln() / log_q).floor();
        // Saturating conversion: a huge skip simply runs off the end.
        let skip = if skip >= 1.0e18 { u64::MAX / 4 } else { skip as u64 };
        let mut next = (w + 1) as u64 + skip;
        while next >= v && v < vc {
            next -= v;
            v += 1;
        }
        if v >= vc {
            break;
        }
        w = next as i64;
        visit(next as u32, v as u32);
        edges += 1;
    }
    Ok(edges)
}

/// Draws one `G(vertex_count, p)` graph using geometric skipping.
pub fn sample_gnp(vertex_count: usize, p: f64, stream: &mut Stream) -> Result<GraphSample, GraphError> {
    check_args(vertex_count, p)?;
    let mut adjacency = vec![Vec::new(); vertex_count];
    let edge_count = for_each_gnp_edge(vertex_count, p, stream, |w, v| {
        adjacency[w as usize].push(v);
        adjacency[v as usize].push(w);
    })?;
    // Pair order already yields sorted lists: a vertex x receives its
    // smaller neighbours while v == x and larger ones afterwards.
    Ok(GraphSample {
        adjacency,
        edge_count,
    })
}

/// Reference sampler: one Bernoulli(`p`) draw per unordered pair, `O(V^2)`.
///
/// Kept as an independent oracle for the distribution of [`sample_gnp`]; it
/// consumes the stream differently, so the two produce different graphs from
/// the same seed.
pub fn sample_gnp_bernoulli(
    vertex_count: usize,
    p: f64,
    stream: &mut Stream,
) -> Result<GraphSample, GraphError> {
    check_args(vertex_count, p)?;
    let mut edges = Vec::new();
    for v in 1..vertex_count {
        for w in 0..v {
            if stream.bernoulli(p) {
                edges.push((w, v));
            }
        }
    }
    GraphSample::from_edges(vertex_count, edges)
}

impl GraphSample {
    /// Builds a graph from an undirected edge list; duplicates are merged.
    pub fn from_edges<I>(vertex_count: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        check_args(vertex_count, 0.0)?;
        let mut adjacency: Vec<Vec<u32>> = vec![Vec::new(); vertex_count];
        for (a, b) in edges {
            if a == b || a >= vertex_count || b >= vertex_count {
                return Err(GraphError::InvalidEdge(a, b, vertex_count));
            }
            adjacency[a].push(b as u32);
            adjacency[b].push(a as u32);
        }
        let mut twice = 0;
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
            twice += list.len();
        }
        Ok(Self {
            adjacency,
            edge_count: twice / 2,
        })
    }

    pub fn empty(vertex_count: usize) -> Result<Self, GraphError> {
        Self::from_edges(vertex_count, std::iter::empty())
    }

    pub fn complete(vertex_count: usize) -> Result<Self, GraphError> {
        let edges = (0..vertex_count).flat_map(|v| (0..v).map(move |w| (w, v)));
        Self::from_edges(vertex_count, edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Sorted neighbours of `vertex`.
    pub fn neighbors(&self, vertex: usize) -> &[u32] {
        &self.adjacency[vertex]
    }

    pub fn degree(&self, vertex: usize) -> usize {
        self.adjacency[vertex].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].binary_search(&(b as u32)).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, sorted lexicographically.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(u, list)| {
            list.iter()
                .map(|&v| v as usize)
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    /// Relabels vertex `i` as `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self, GraphError> {
        let n = self.vertex_count();
        if perm.len() != n {
            return Err(GraphError::Parse(format!(
                "permutation of length {} for {} vertices",
                perm.len(),
                n
            )));
        }
        Self::from_edges(n, self.edges().map(|(u, v)| (perm[u], perm[v])))
    }

    /// Checks the structural invariants: symmetric adjacency, no self-loops,
    /// indices in range, sorted lists and a consistent edge count.
    pub fn check_invariants(&self) -> Result<(), String> {
        let n = self.vertex_count();
        let mut twice = 0usize;
        for (u, list) in self.adjacency.iter().enumerate() {
            if list.windows(2).any(|w| w[0] >= w[1]) {
                return Err(format!("adjacency of {u} not strictly sorted"));
            }
            for &v in list {
                let v = v as usize;
                if v >= n {
                    return Err(format!("neighbour {v} of {u} out of range"));
                }
                if v == u {
                    return Err(format!("self-loop at {u}"));
                }
                if !self.has_edge(v, u) {
                    return Err(format!("edge {u}->{v} not mirrored"));
                }
            }
            twice += list.len();
        }
        if twice != 2 * self.edge_count {
            return Err(format!(
                "edge_count {} but adjacency lengths sum to {twice}",
                self.edge_count
            ));
        }
        Ok(())
    }

    /// Text edge list: header `V E`, then one `u v` line per edge with `u < v`.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.vertex_count(), self.edge_count);
        for (u, v) in self.edges() {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }

    pub fn write_edge_list<W: Write>(&self, mut writer: W) -> io::Result<()> {
        writer.write_all(self.to_edge_list().as_bytes())
    }

    pub fn read_edge_list<R: BufRead>(reader: R) -> Result<Self, GraphError> {
        let mut lines = reader.lines();
        let parse_pair = |line: &str| -> Result<(usize, usize), GraphError> {
            let mut it = line.split_whitespace();
            let (Some(a), Some(b), None) = (it.next(), it.next(), it.next()) else {
                return Err(GraphError::Parse(format!("expected two fields: {line:?}")));
            };
            let a = a.parse().map_err(|_| GraphError::Parse(format!("bad integer {a:?}")))?;
            let b = b.parse().map_err(|_| GraphError::Parse(format!("bad integer {b:?}")))?;
            Ok((a, b))
        };
        let header = lines
            .next()
            .ok_or_else(|| GraphError::Parse("missing header".into()))?
            .map_err(|e| GraphError::Parse(e.to_string()))?;
        let (vertices, declared) = parse_pair(&header)?;
        let mut edges = Vec::with_capacity(declared);
        for line in lines {
            let line = line.map_err(|e| GraphError::Parse(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let (u, v) = parse_pair(&line)?;
            if u >= v {
                return Err(GraphError::Parse(format!("edge {u} {v} not in u < v order")));
            }
            edges.push((u, v));
        }
        let graph = Self::from_edges(vertices, edges)?;
        if graph.edge_count != declared {
            return Err(GraphError::Parse(format!(
                "header declares {declared} edges, found {}",
                graph.edge_count
            )));
        }
        Ok(graph)
    }
}
