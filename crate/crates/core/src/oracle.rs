//! Discretization oracle for geodesic lengths, used to check the engine.
//!
//! Nodes are the vertices plus `2^j - 1` equally spaced points inside every
//! edge, with `2^j` the smallest power of two making the spacing at most
//! `h`. Any two nodes on the boundary of a common face are joined by their
//! straight segment in that face, so the only error comes from where the
//! path crosses an edge. Spacings halve under `h -> h / 2`, which nests the
//! node sets and makes the result non-increasing under refinement.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{Cell, ComplexError, EdgeId, PointSpec, RectComplex};

pub const DEFAULT_NODE_CAP: usize = 2_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("step h = {0} must be positive and finite")]
    BadStep(f64),
    #[error("sample graph would have {nodes} nodes, above the cap of {cap}")]
    OutOfMemory { nodes: usize, cap: usize },
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub h: f64,
    pub node_cap: usize,
}

impl OracleConfig {
    pub fn new(h: f64) -> Self {
        Self {
            h,
            node_cap: DEFAULT_NODE_CAP,
        }
    }
}

/// Sample points on the 1-skeleton, reusable across queries with one `h`.
#[derive(Debug, Clone)]
pub struct SampleGraph<'a> {
    k: &'a RectComplex,
    pub h: f64,
    /// Number of pieces each edge is cut into.
    pieces: Vec<usize>,
    /// Id of the first interior sample of each edge.
    offset: Vec<usize>,
    nodes: usize,
    /// Nodes on the boundary of each face, with local coordinates.
    face_nodes: Vec<Vec<(usize, (f64, f64))>>,
    /// Faces through each node, with the node's index in the face list.
    node_faces: Vec<Vec<(usize, usize)>>,
}

#[derive(Clone, Copy, PartialEq)]
struct Entry(f64, usize);

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A query endpoint attached to the sample graph.
struct Attached {
    /// Existing node when the point is a vertex.
    node: Option<usize>,
    /// Arcs to sample nodes, by node id.
    arcs: HashMap<usize, f64>,
}

impl<'a> SampleGraph<'a> {
    pub fn new(k: &'a RectComplex, config: &OracleConfig) -> Result<Self, OracleError> {
        let h = config.h;
        if !(h > 0.0 && h.is_finite()) {
            return Err(OracleError::BadStep(h));
        }
        let mut pieces = Vec::with_capacity(k.edges().len());
        let mut offset = Vec::with_capacity(k.edges().len());
        let mut nodes = k.vertex_count();
        for e in k.edges() {
            let mut m = 1usize;
            while e.length / m as f64 > h {
                m *= 2;
                if m > config.node_cap {
                    return Err(OracleError::OutOfMemory {
                        nodes: m,
                        cap: config.node_cap,
                    });
                }
            }
            pieces.push(m);
            offset.push(nodes);
            nodes += m - 1;
            if nodes > config.node_cap {
                return Err(OracleError::OutOfMemory {
                    nodes,
                    cap: config.node_cap,
                });
            }
        }
        let mut g = Self {
            k,
            h,
            pieces,
            offset,
            nodes,
            face_nodes: Vec::with_capacity(k.faces().len()),
            node_faces: vec![Vec::new(); nodes],
        };
        for f in 0..k.faces().len() {
            let mut list = Vec::new();
            for (i, &v) in k.face(f).iter().enumerate() {
                list.push((v, k.corner_coords(f, i)));
            }
            for e in k.face_edges(f) {
                for j in 1..g.pieces[e] {
                    let t = g.sample_t(e, j);
                    list.push((g.offset[e] + j - 1, k.edge_point_in_face(f, e, t)));
                }
            }
            for (i, &(node, _)) in list.iter().enumerate() {
                g.node_faces[node].push((f, i));
            }
            g.face_nodes.push(list);
        }
        Ok(g)
    }

    pub fn node_count(&self) -> usize {
        self.nodes
    }

    fn sample_t(&self, e: EdgeId, j: usize) -> f64 {
        self.k.edge(e).length * j as f64 / self.pieces[e] as f64
    }

    /// Nodes along edge `e` from `u` to `v` with their offsets from `u`.
    fn edge_chain(&self, e: EdgeId) -> Vec<(usize, f64)> {
        let edge = self.k.edge(e);
        let mut out = vec![(edge.u, 0.0)];
        for j in 1..self.pieces[e] {
            out.push((self.offset[e] + j - 1, self.sample_t(e, j)));
        }
        out.push((edge.v, edge.length));
        out
    }

    fn attach(&self, x: &PointSpec) -> Result<Attached, OracleError> {
        let (cell, t) = self.k.minimal_cell(x)?;
        let mut arcs = HashMap::new();
        let mut add = |node: usize, w: f64| {
            let slot = arcs.entry(node).or_insert(f64::INFINITY);
            if w < *slot {
                *slot = w;
            }
        };
        match cell {
            Cell::Vertex(v) => {
                return Ok(Attached {
                    node: Some(v),
                    arcs: HashMap::new(),
                })
            }
            Cell::Edge(e) => {
                for (node, s) in self.edge_chain(e) {
                    add(node, (s - t).abs());
                }
                for &f in self.k.edge_faces(e) {
                    let at = self.k.edge_point_in_face(f, e, t);
                    for &(node, c) in &self.face_nodes[f] {
                        add(node, dist(at, c));
                    }
                }
            }
            Cell::Face(f) => {
                let at = (x.alpha, x.beta);
                for &(node, c) in &self.face_nodes[f] {
                    add(node, dist(at, c));
                }
            }
        }
        Ok(Attached { node: None, arcs })
    }

    /// Length of a direct segment when `x` and `y` share a cell.
    fn direct(&self, x: &PointSpec, y: &PointSpec) -> Result<Option<f64>, OracleError> {
        let k = self.k;
        let (cx, tx) = k.minimal_cell(x)?;
        let (cy, ty) = k.minimal_cell(y)?;
        if let (Cell::Edge(a), Cell::Edge(b)) = (cx, cy) {
            if a == b {
                return Ok(Some((tx - ty).abs()));
            }
        }
        let faces_of = |c: Cell| -> Vec<usize> {
            match c {
                Cell::Vertex(v) => k.vertex_faces(v).to_vec(),
                Cell::Edge(e) => k.edge_faces(e).to_vec(),
                Cell::Face(f) => vec![f],
            }
        };
        let local = |p: &PointSpec, c: Cell, t: f64, f: usize| -> (f64, f64) {
            match c {
                Cell::Vertex(v) => {
                    let i = k.face(f).iter().position(|&w| w == v).unwrap();
                    k.corner_coords(f, i)
                }
                Cell::Edge(e) => k.edge_point_in_face(f, e, t),
                Cell::Face(_) => (p.alpha, p.beta),
            }
        };
        let fy = faces_of(cy);
        let mut best: Option<f64> = None;
        for f in faces_of(cx) {
            if fy.contains(&f) {
                let d = dist(local(x, cx, tx, f), local(y, cy, ty, f));
                best = Some(best.map_or(d, |b| b.min(d)));
            }
        }
        Ok(best)
    }

    /// Shortest sample-graph distance from `x` to `y`.
    pub fn distance(&self, x: &PointSpec, y: &PointSpec) -> Result<f64, OracleError> {
        let sx = self.attach(x)?;
        let sy = self.attach(y)?;
        let direct = self.direct(x, y)?;
        let (src, dst) = (self.nodes, self.nodes + 1);
        let source = sx.node.unwrap_or(src);
        let target = sy.node.unwrap_or(dst);
        if source == target {
            return Ok(0.0);
        }
        let mut dist_to = vec![f64::INFINITY; self.nodes + 2];
        let mut heap = BinaryHeap::new();
        dist_to[source] = 0.0;
        heap.push(Entry(0.0, source));
        while let Some(Entry(d, a)) = heap.pop() {
            if d > dist_to[a] {
                continue;
            }
            if a == target {
                break;
            }
            let mut relax = |b: usize, w: f64| {
                let nd = d + w;
                if nd < dist_to[b] {
                    dist_to[b] = nd;
                    heap.push(Entry(nd, b));
                }
            };
            if a == src {
                for (&b, &w) in &sx.arcs {
                    relax(b, w);
                }
                if let Some(w) = direct {
                    relax(target, w);
                }
                continue;
            }
            if sy.node.is_none() {
                if let Some(&w) = sy.arcs.get(&a) {
                    relax(dst, w);
                }
            }
            if a < self.k.vertex_count() {
                for &(_, e) in self.k.neighbors(a) {
                    let chain = self.edge_chain(e);
                    let next = if chain[0].0 == a { chain[1] } else { chain[chain.len() - 2] };
                    relax(next.0, self.k.edge(e).length / self.pieces[e] as f64);
                }
            } else {
                let e = self.offset.partition_point(|&o| o <= a) - 1;
                let j = a - self.offset[e] + 1;
                let chain = self.edge_chain(e);
                let step = self.k.edge(e).length / self.pieces[e] as f64;
                relax(chain[j - 1].0, step);
                relax(chain[j + 1].0, step);
            }
            for &(f, i) in &self.node_faces[a] {
                let list = &self.face_nodes[f];
                let at = list[i].1;
                for &(b, c) in list {
                    if b != a {
                        relax(b, dist(at, c));
                    }
                }
            }
            if let (Some(w), true) = (direct, a == source) {
                relax(target, w);
            }
        }
        Ok(dist_to[target])
    }
}

fn dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}

/// One-shot oracle distance.
pub fn oracle_distance(
    k: &RectComplex,
    x: &PointSpec,
    y: &PointSpec,
    config: &OracleConfig,
) -> Result<f64, OracleError> {
    SampleGraph::new(k, config)?.distance(x, y)
}
