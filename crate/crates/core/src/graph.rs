//! Undirected graphs, the graph file format, generators, and all-pairs
//! shortest paths.
//!
//! Node ids are dense `0..n`. Every adjacency list is sorted ascending, and
//! that order is what every downstream tie-break relies on.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distance sentinel for unreachable pairs. Additions involving it saturate
/// back to itself.
pub const UNREACHABLE: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    edge_count: usize,
}

impl Graph {
    /// Builds a graph from an edge list, rejecting self-loops, duplicates and
    /// out-of-range ids. Errors carry the offending edge's position.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Graph> {
        let mut builder = GraphBuilder::new(n)?;
        for (i, &(u, v)) in edges.iter().enumerate() {
            builder.add_edge(u, v).map_err(|message| Error::Parse { line: i + 1, message })?;
        }
        Ok(builder.finish())
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Sorted neighbor ids of `v`, excluding `v` itself.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.adj.len() && self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` pairs with `u < v`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, ns)| ns.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn is_connected(&self) -> bool {
        let n = self.node_count();
        if n == 0 {
            return false;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &v in &self.adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == n
    }
}

struct GraphBuilder {
    adj: Vec<BTreeSet<usize>>,
    edge_count: usize,
}

impl GraphBuilder {
    fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Argument("graph must have at least one node".into()));
        }
        Ok(GraphBuilder { adj: vec![BTreeSet::new(); n], edge_count: 0 })
    }

    fn add_edge(&mut self, u: usize, v: usize) -> std::result::Result<(), String> {
        let n = self.adj.len();
        if u >= n || v >= n {
            return Err(format!("node id out of range: edge {u} {v} with {n} nodes"));
        }
        if u == v {
            return Err(format!("self-loop on node {u}"));
        }
        if !self.adj[u].insert(v) {
            return Err(format!("duplicate edge {u} {v}"));
        }
        self.adj[v].insert(u);
        self.edge_count += 1;
        Ok(())
    }

    fn finish(self) -> Graph {
        Graph { adj: self.adj.into_iter().map(|s| s.into_iter().collect()).collect(), edge_count: self.edge_count }
    }
}

/// A parsed graph file: the graph plus an optional exit list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphFile {
    pub graph: Graph,
    pub exits: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct GraphDoc {
    nodes: usize,
    edges: Vec<[usize; 2]>,
    #[serde(default)]
    exits: Vec<usize>,
}

/// Parses either the line format (`nodes`, `exits`, `edge` lines) or the
/// equivalent JSON document (`{"nodes":..,"edges":[[u,v],..],"exits":[..]}`).
pub fn parse_graph_file(text: &str) -> Result<GraphFile> {
    if text.trim_start().starts_with('{') {
        parse_json(text)
    } else {
        parse_lines(text)
    }
}

/// Like [`parse_graph_file`] but discards any exit list.
pub fn parse_graph(text: &str) -> Result<Graph> {
    parse_graph_file(text).map(|f| f.graph)
}

fn parse_json(text: &str) -> Result<GraphFile> {
    let doc: GraphDoc =
        serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line(), message: e.to_string() })?;
    let mut builder = GraphBuilder::new(doc.nodes).map_err(|e| Error::Parse { line: 1, message: e.to_string() })?;
    for (i, [u, v]) in doc.edges.iter().copied().enumerate() {
        builder.add_edge(u, v).map_err(|m| Error::Parse { line: 0, message: format!("edges[{i}]: {m}") })?;
    }
    let exits = check_exits(doc.exits, doc.nodes).map_err(|message| Error::Parse { line: 0, message })?;
    Ok(GraphFile { graph: builder.finish(), exits })
}

fn parse_lines(text: &str) -> Result<GraphFile> {
    let mut builder: Option<GraphBuilder> = None;
    let mut exits: Option<Vec<usize>> = None;
    let mut node_count = 0;

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let err = |message: String| Error::Parse { line: line_no, message };
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let keyword = fields.next().unwrap_or_default();
        let ids = fields
            .map(|f| f.parse::<usize>().map_err(|_| err(format!("not a node id: {f:?}"))))
            .collect::<Result<Vec<_>>>()?;

        match (keyword, builder.as_mut()) {
            ("nodes", None) => {
                let [n] = ids[..] else {
                    return Err(err("expected `nodes <n>`".into()));
                };
                builder = Some(GraphBuilder::new(n).map_err(|e| err(e.to_string()))?);
                node_count = n;
            }
            ("nodes", Some(_)) => return Err(err("repeated `nodes` header".into())),
            (_, None) => return Err(err("expected `nodes <n>` header first".into())),
            ("exits", Some(_)) => {
                if exits.is_some() {
                    return Err(err("repeated `exits` line".into()));
                }
                exits = Some(check_exits(ids, node_count).map_err(err)?);
            }
            ("edge", Some(b)) => {
                let [u, v] = ids[..] else {
                    return Err(err("expected `edge <u> <v>`".into()));
                };
                b.add_edge(u, v).map_err(err)?;
            }
            (other, Some(_)) => return Err(err(format!("unknown keyword {other:?}"))),
        }
    }

    let builder = builder.ok_or(Error::Parse { line: 0, message: "missing `nodes` header".into() })?;
    Ok(GraphFile { graph: builder.finish(), exits: exits.unwrap_or_default() })
}

fn check_exits(mut exits: Vec<usize>, n: usize) -> std::result::Result<Vec<usize>, String> {
    if let Some(&bad) = exits.iter().find(|&&x| x >= n) {
        return Err(format!("exit id {bad} out of range"));
    }
    exits.sort_unstable();
    let before = exits.len();
    exits.dedup();
    if exits.len() != before {
        return Err("duplicate exit id".into());
    }
    Ok(exits)
}

/// Renders the line format accepted by [`parse_graph_file`].
pub fn write_graph_file(graph: &Graph, exits: &[usize]) -> String {
    let mut out = String::new();
    writeln!(out, "nodes {}", graph.node_count()).unwrap();
    if !exits.is_empty() {
        out.push_str("exits");
        for x in exits {
            write!(out, " {x}").unwrap();
        }
        out.push('\n');
    }
    for (u, v) in graph.edges() {
        writeln!(out, "edge {u} {v}").unwrap();
    }
    out
}

/// 4-connected `width x height` lattice with node id `row * width + col`.
pub fn gen_grid(width: usize, height: usize) -> Result<Graph> {
    if width == 0 || height == 0 {
        return Err(Error::Argument(format!("grid dimensions must be positive, got {width}x{height}")));
    }
    let mut edges = Vec::with_capacity(2 * width * height);
    for row in 0..height {
        for col in 0..width {
            let id = row * width + col;
            if col + 1 < width {
                edges.push((id, id + 1));
            }
            if row + 1 < height {
                edges.push((id, id + width));
            }
        }
    }
    Graph::from_edges(width * height, &edges)
}

/// Barabási–Albert preferential attachment.
///
/// Starts from the single edge `0-1`; node `k >= 2` then attaches to
/// `min(attach, k)` distinct existing nodes drawn with probability
/// proportional to their current degree. With `attach <= 2` the edge count
/// is `1 + attach * (n - 2)`.
pub fn gen_scale_free(n: usize, attach: usize, seed: u64) -> Result<Graph> {
    if n < 2 {
        return Err(Error::Argument(format!("scale-free graph needs n >= 2, got {n}")));
    }
    if attach == 0 || attach >= n {
        return Err(Error::Argument(format!("attach must satisfy 1 <= attach < n, got {attach} with n = {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Each edge contributes both endpoints, so a uniform draw from this list
    // is a degree-proportional draw over nodes.
    let mut endpoints: Vec<usize> = vec![0, 1];
    let mut edges = vec![(0, 1)];
    let mut targets: Vec<usize> = Vec::with_capacity(attach);
    for k in 2..n {
        let want = attach.min(k);
        targets.clear();
        while targets.len() < want {
            let t = endpoints[rng.random_range(0..endpoints.len())];
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        targets.sort_unstable();
        for &t in &targets {
            edges.push((t, k));
            endpoints.push(t);
            endpoints.push(k);
        }
    }
    Graph::from_edges(n, &edges)
}

/// All-pairs shortest path lengths with [`UNREACHABLE`] for disconnected pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApspTable {
    n: usize,
    dist: Vec<u32>,
    diameter: u32,
}

impl ApspTable {
    pub fn node_count(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn dist(&self, u: usize, v: usize) -> u32 {
        self.dist[u * self.n + v]
    }

    /// Distance row from `u` to every node.
    pub fn row(&self, u: usize) -> &[u32] {
        &self.dist[u * self.n..(u + 1) * self.n]
    }

    /// Largest finite distance.
    pub fn diameter(&self) -> u32 {
        self.diameter
    }

    /// First step from `from` along a shortest path to `to`: the smallest-id
    /// neighbor one step closer. Returns `from` when already there or when
    /// `to` is unreachable.
    pub fn next_hop(&self, graph: &Graph, from: usize, to: usize) -> usize {
        let d = self.dist(from, to);
        if d == 0 || d == UNREACHABLE {
            return from;
        }
        graph
            .neighbors(from)
            .iter()
            .copied()
            .find(|&u| self.dist(u, to) == d - 1)
            .expect("shortest-path predecessor must exist for a finite distance")
    }
}

/// Floyd–Warshall over unit edge weights.
pub fn compute_apsp(graph: &Graph) -> ApspTable {
    let n = graph.node_count();
    let mut dist = vec![UNREACHABLE; n * n];
    for u in 0..n {
        dist[u * n + u] = 0;
        for &v in graph.neighbors(u) {
            dist[u * n + v] = 1;
        }
    }
    for k in 0..n {
        let row_k: Vec<u32> = dist[k * n..(k + 1) * n].to_vec();
        for i in 0..n {
            let dik = dist[i * n + k];
            if dik == UNREACHABLE {
                continue;
            }
            let row_i = &mut dist[i * n..(i + 1) * n];
            for (dij, &dkj) in row_i.iter_mut().zip(&row_k) {
                let via = dik.saturating_add(dkj);
                if via < *dij {
                    *dij = via;
                }
            }
        }
    }
    let diameter = dist.iter().copied().filter(|&d| d != UNREACHABLE).max().unwrap_or(0);
    ApspTable { n, dist, diameter }
}
