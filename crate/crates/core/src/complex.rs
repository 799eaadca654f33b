//! Rectangular complexes: storage, structural checks and CAT(0) validation.
//!
//! A complex is given by a vertex count, a list of edges with positive
//! lengths and a list of rectangular faces, each a 4-cycle of the edge set in
//! cyclic order. Faces are normalized so the tuple starts at its minimum
//! vertex id and continues towards the smaller of that vertex's two cyclic
//! neighbours; point coordinates are always read in the frame of the
//! normalized tuple.

use std::collections::{BTreeSet, HashMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type VertexId = usize;
pub type EdgeId = usize;
pub type FaceId = usize;

/// Relative tolerance for the opposite-edge length check.
pub const LENGTH_RTOL: f64 = 1e-9;
/// Absolute tolerance used when snapping local coordinates to a face side.
pub const SIDE_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ComplexError {
    #[error("vertex {vertex} out of range (vertex count {n})")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("edge {index} ({u}, {v}) is a self-loop")]
    SelfLoop { index: usize, u: usize, v: usize },
    #[error("edge {index} has invalid length {length}")]
    BadLength { index: usize, length: f64 },
    #[error("face {face} {vertices:?} is not a 4-cycle of the edge set: {reason}")]
    MalformedFace {
        face: usize,
        vertices: [usize; 4],
        reason: String,
    },
    #[error("face {face}: opposite edges have lengths {a} and {b}")]
    LengthMismatch { face: usize, a: f64, b: f64 },
    #[error("4-cycle {cycle:?} carries no face")]
    UnfilledSquare { cycle: [usize; 4] },
    #[error("duplicate {kind}: entries {first} and {second}")]
    DuplicateEntity {
        kind: &'static str,
        first: usize,
        second: usize,
    },
    #[error("face id {0} out of range")]
    NoSuchFace(usize),
    #[error("point ({alpha}, {beta}) lies outside face {face} of size {width} x {height}")]
    OutOfFace {
        face: usize,
        alpha: f64,
        beta: f64,
        width: f64,
        height: f64,
    },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ValidationError {
    #[error("underlying graph is disconnected (vertex {unreachable} unreachable from 0)")]
    Disconnected { unreachable: VertexId },
    #[error("underlying graph is not bipartite; odd cycle {cycle:?}")]
    NotBipartite { cycle: Vec<VertexId> },
    #[error("link of vertex {vertex} contains the triangle on edges {edges:?}")]
    LinkTriangle { vertex: VertexId, edges: [EdgeId; 3] },
    #[error("triple {triple:?} has {} medians {medians:?}", medians.len())]
    NotMedian {
        triple: [VertexId; 3],
        medians: Vec<VertexId>,
    },
    #[error("4-cycle {cycle:?} carries no face")]
    UnfilledSquare { cycle: [VertexId; 4] },
}

/// One input edge. The length defaults to 1 when omitted in JSON.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RawEdge {
    Weighted(usize, usize, f64),
    Unit(usize, usize),
}

impl RawEdge {
    pub fn endpoints(&self) -> (usize, usize) {
        match *self {
            RawEdge::Weighted(u, v, _) | RawEdge::Unit(u, v) => (u, v),
        }
    }

    pub fn length(&self) -> f64 {
        match *self {
            RawEdge::Weighted(_, _, l) => l,
            RawEdge::Unit(..) => 1.0,
        }
    }
}

/// The on-disk form of a complex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawComplex {
    pub vertices: usize,
    pub edges: Vec<RawEdge>,
    pub faces: Vec<[usize; 4]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    /// Smaller endpoint.
    pub u: VertexId,
    /// Larger endpoint.
    pub v: VertexId,
    pub length: f64,
}

impl Edge {
    pub fn other(&self, w: VertexId) -> VertexId {
        if w == self.u {
            self.v
        } else {
            self.u
        }
    }

    pub fn key(&self) -> (VertexId, VertexId) {
        (self.u, self.v)
    }
}

/// Link of a vertex: nodes are incident edges, arcs are faces at the vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct Link {
    pub nodes: Vec<EdgeId>,
    pub arcs: Vec<(EdgeId, EdgeId, FaceId)>,
}

/// A point given by local coordinates in a face. `alpha` runs along
/// `v0 -> v1`, `beta` along `v0 -> v3` of the normalized face tuple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointSpec {
    pub face: FaceId,
    pub alpha: f64,
    pub beta: f64,
}

impl PointSpec {
    pub fn new(face: FaceId, alpha: f64, beta: f64) -> Self {
        Self { face, alpha, beta }
    }
}

/// The minimal cell containing a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cell {
    Vertex(VertexId),
    /// Edge plus the distance from its smaller endpoint.
    Edge(EdgeId),
    Face(FaceId),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "RawComplex", try_from = "RawComplex")]
pub struct RectComplex {
    n: usize,
    edges: Vec<Edge>,
    faces: Vec<[VertexId; 4]>,
    /// `face_edges[f][i]` joins `faces[f][i]` and `faces[f][(i + 1) % 4]`.
    face_edges: Vec<[EdgeId; 4]>,
    adjacency: Vec<Vec<(VertexId, EdgeId)>>,
    edge_faces: Vec<Vec<FaceId>>,
    vertex_faces: Vec<Vec<FaceId>>,
    links: Vec<Link>,
    edge_lookup: HashMap<(VertexId, VertexId), EdgeId>,
}

impl From<RectComplex> for RawComplex {
    fn from(k: RectComplex) -> Self {
        k.to_raw()
    }
}

impl TryFrom<RawComplex> for RectComplex {
    type Error = ComplexError;

    fn try_from(raw: RawComplex) -> Result<Self, Self::Error> {
        RectComplex::build(&raw)
    }
}

fn normalize_face(f: [usize; 4]) -> [usize; 4] {
    let start = (0..4).min_by_key(|&i| f[i]).unwrap();
    let next = f[(start + 1) % 4];
    let prev = f[(start + 3) % 4];
    if next <= prev {
        [f[start], f[(start + 1) % 4], f[(start + 2) % 4], f[(start + 3) % 4]]
    } else {
        [f[start], f[(start + 3) % 4], f[(start + 2) % 4], f[(start + 1) % 4]]
    }
}

fn lengths_agree(a: f64, b: f64) -> bool {
    (a - b).abs() <= LENGTH_RTOL * a.abs().max(b.abs())
}

impl RectComplex {
    /// Builds and structurally checks a complex, including that every
    /// 4-cycle of the underlying graph carries exactly one face.
    pub fn build(raw: &RawComplex) -> Result<Self, ComplexError> {
        let k = Self::build_structural(raw)?;
        if let Some(cycle) = k.unfilled_square() {
            return Err(ComplexError::UnfilledSquare { cycle });
        }
        Ok(k)
    }

    /// Like [`RectComplex::build`] but accepts graphs with unfilled 4-cycles,
    /// so that [`validate_cat0`] can report a witness for broken inputs.
    pub fn build_structural(raw: &RawComplex) -> Result<Self, ComplexError> {
        let n = raw.vertices;
        let mut edges = Vec::with_capacity(raw.edges.len());
        let mut edge_lookup = HashMap::with_capacity(raw.edges.len());
        for (index, e) in raw.edges.iter().enumerate() {
            let (a, b) = e.endpoints();
            for vertex in [a, b] {
                if vertex >= n {
                    return Err(ComplexError::VertexOutOfRange { vertex, n });
                }
            }
            if a == b {
                return Err(ComplexError::SelfLoop { index, u: a, v: b });
            }
            let length = e.length();
            if !(length.is_finite() && length > 0.0) {
                return Err(ComplexError::BadLength { index, length });
            }
            let (u, v) = (a.min(b), a.max(b));
            if let Some(&first) = edge_lookup.get(&(u, v)) {
                return Err(ComplexError::DuplicateEntity {
                    kind: "edge",
                    first,
                    second: index,
                });
            }
            edge_lookup.insert((u, v), index);
            edges.push(Edge { u, v, length });
        }

        let mut faces = Vec::with_capacity(raw.faces.len());
        let mut face_edges = Vec::with_capacity(raw.faces.len());
        let mut face_keys: HashMap<[usize; 4], usize> = HashMap::new();
        for (face, &tuple) in raw.faces.iter().enumerate() {
            for vertex in tuple {
                if vertex >= n {
                    return Err(ComplexError::VertexOutOfRange { vertex, n });
                }
            }
            let distinct: BTreeSet<_> = tuple.iter().collect();
            if distinct.len() != 4 {
                return Err(ComplexError::MalformedFace {
                    face,
                    vertices: tuple,
                    reason: "repeated vertex".into(),
                });
            }
            let norm = normalize_face(tuple);
            let mut fe = [0; 4];
            for i in 0..4 {
                let (a, b) = (norm[i], norm[(i + 1) % 4]);
                match edge_lookup.get(&(a.min(b), a.max(b))) {
                    Some(&e) => fe[i] = e,
                    None => {
                        return Err(ComplexError::MalformedFace {
                            face,
                            vertices: tuple,
                            reason: format!("missing edge ({a}, {b})"),
                        })
                    }
                }
            }
            for i in 0..2 {
                let (a, b) = (edges[fe[i]].length, edges[fe[i + 2]].length);
                if !lengths_agree(a, b) {
                    return Err(ComplexError::LengthMismatch { face, a, b });
                }
            }
            let mut key = norm;
            key.sort_unstable();
            if let Some(&first) = face_keys.get(&key) {
                return Err(ComplexError::DuplicateEntity {
                    kind: "face",
                    first,
                    second: face,
                });
            }
            face_keys.insert(key, face);
            faces.push(norm);
            face_edges.push(fe);
        }

        let mut adjacency = vec![Vec::new(); n];
        for (id, e) in edges.iter().enumerate() {
            adjacency[e.u].push((e.v, id));
            adjacency[e.v].push((e.u, id));
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }

        let mut edge_faces = vec![Vec::new(); edges.len()];
        let mut vertex_faces = vec![Vec::new(); n];
        for (f, fe) in face_edges.iter().enumerate() {
            for &e in fe {
                edge_faces[e].push(f);
            }
            for &v in &faces[f] {
                vertex_faces[v].push(f);
            }
        }

        let mut links: Vec<Link> = adjacency
            .iter()
            .map(|nbrs| Link {
                nodes: nbrs.iter().map(|&(_, e)| e).collect(),
                arcs: Vec::new(),
            })
            .collect();
        for (f, fe) in face_edges.iter().enumerate() {
            for i in 0..4 {
                // faces[f][i] is shared by face_edges[i - 1] and face_edges[i].
                let v = faces[f][i];
                let (e1, e2) = (fe[(i + 3) % 4], fe[i]);
                links[v].arcs.push((e1.min(e2), e1.max(e2), f));
            }
        }
        for link in &mut links {
            link.arcs.sort_unstable();
        }

        Ok(Self {
            n,
            edges,
            faces,
            face_edges,
            adjacency,
            edge_faces,
            vertex_faces,
            links,
            edge_lookup,
        })
    }

    pub fn to_raw(&self) -> RawComplex {
        RawComplex {
            vertices: self.n,
            edges: self
                .edges
                .iter()
                .map(|e| RawEdge::Weighted(e.u, e.v, e.length))
                .collect(),
            faces: self.faces.clone(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e]
    }

    pub fn faces(&self) -> &[[VertexId; 4]] {
        &self.faces
    }

    pub fn face(&self, f: FaceId) -> [VertexId; 4] {
        self.faces[f]
    }

    pub fn face_edges(&self, f: FaceId) -> [EdgeId; 4] {
        self.face_edges[f]
    }

    pub fn neighbors(&self, v: VertexId) -> &[(VertexId, EdgeId)] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adjacency[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn edge_between(&self, a: VertexId, b: VertexId) -> Option<EdgeId> {
        self.edge_lookup.get(&(a.min(b), a.max(b))).copied()
    }

    pub fn edge_faces(&self, e: EdgeId) -> &[FaceId] {
        &self.edge_faces[e]
    }

    pub fn vertex_faces(&self, v: VertexId) -> &[FaceId] {
        &self.vertex_faces[v]
    }

    pub fn link(&self, v: VertexId) -> &Link {
        &self.links[v]
    }

    pub fn min_edge_length(&self) -> f64 {
        self.edges
            .iter()
            .map(|e| e.length)
            .fold(f64::INFINITY, f64::min)
    }

    /// Side lengths `(width, height)` of a face: `|v0 v1|` and `|v0 v3|`.
    pub fn face_size(&self, f: FaceId) -> (f64, f64) {
        let fe = self.face_edges[f];
        (self.edges[fe[0]].length, self.edges[fe[3]].length)
    }

    /// Local coordinates of the `i`-th corner of a face.
    pub fn corner_coords(&self, f: FaceId, i: usize) -> (f64, f64) {
        let (w, h) = self.face_size(f);
        match i {
            0 => (0.0, 0.0),
            1 => (w, 0.0),
            2 => (w, h),
            3 => (0.0, h),
            _ => unreachable!("face corner index {i}"),
        }
    }

    /// Local coordinates in face `f` of a point on edge `e` at distance `t`
    /// from the edge's smaller endpoint.
    pub fn edge_point_in_face(&self, f: FaceId, e: EdgeId, t: f64) -> (f64, f64) {
        let edge = self.edges[e];
        let tuple = self.faces[f];
        let ia = tuple.iter().position(|&v| v == edge.u).expect("edge in face");
        let ib = tuple.iter().position(|&v| v == edge.v).expect("edge in face");
        let (ax, ay) = self.corner_coords(f, ia);
        let (bx, by) = self.corner_coords(f, ib);
        let s = t / edge.length;
        (ax + (bx - ax) * s, ay + (by - ay) * s)
    }

    pub fn check_point(&self, p: &PointSpec) -> Result<(), ComplexError> {
        if p.face >= self.faces.len() {
            return Err(ComplexError::NoSuchFace(p.face));
        }
        let (w, h) = self.face_size(p.face);
        let inside = |c: f64, side: f64| c.is_finite() && c >= -SIDE_TOL && c <= side + SIDE_TOL;
        if !(inside(p.alpha, w) && inside(p.beta, h)) {
            return Err(ComplexError::OutOfFace {
                face: p.face,
                alpha: p.alpha,
                beta: p.beta,
                width: w,
                height: h,
            });
        }
        Ok(())
    }

    /// Minimal cell containing the point, together with the position along
    /// the edge (from its smaller endpoint) when the cell is an edge.
    pub fn minimal_cell(&self, p: &PointSpec) -> Result<(Cell, f64), ComplexError> {
        self.check_point(p)?;
        let (w, h) = self.face_size(p.face);
        let snap = |c: f64, side: f64| -> Option<f64> {
            if c.abs() <= SIDE_TOL {
                Some(0.0)
            } else if (c - side).abs() <= SIDE_TOL {
                Some(side)
            } else {
                None
            }
        };
        let tuple = self.faces[p.face];
        let fe = self.face_edges[p.face];
        match (snap(p.alpha, w), snap(p.beta, h)) {
            (Some(a), Some(b)) => {
                let corner = match (a == 0.0, b == 0.0) {
                    (true, true) => 0,
                    (false, true) => 1,
                    (false, false) => 2,
                    (true, false) => 3,
                };
                Ok((Cell::Vertex(tuple[corner]), 0.0))
            }
            (Some(a), None) => {
                // Vertical side: v0v3 when alpha = 0, v1v2 when alpha = w.
                let (e, from, t) = if a == 0.0 {
                    (fe[3], tuple[0], p.beta)
                } else {
                    (fe[1], tuple[1], p.beta)
                };
                Ok((Cell::Edge(e), self.along_from_min(e, from, t)))
            }
            (None, Some(b)) => {
                let (e, from, t) = if b == 0.0 {
                    (fe[0], tuple[0], p.alpha)
                } else {
                    (fe[2], tuple[3], p.alpha)
                };
                Ok((Cell::Edge(e), self.along_from_min(e, from, t)))
            }
            (None, None) => Ok((Cell::Face(p.face), 0.0)),
        }
    }

    fn along_from_min(&self, e: EdgeId, from: VertexId, t: f64) -> f64 {
        let edge = self.edges[e];
        if from == edge.u {
            t
        } else {
            edge.length - t
        }
    }

    pub fn cell_vertices(&self, cell: Cell) -> Vec<VertexId> {
        let mut vs = match cell {
            Cell::Vertex(v) => vec![v],
            Cell::Edge(e) => vec![self.edges[e].u, self.edges[e].v],
            Cell::Face(f) => self.faces[f].to_vec(),
        };
        vs.sort_unstable();
        vs
    }

    /// Canonical spec of a point: smallest face id, then lexicographically
    /// smallest local coordinates.
    pub fn canonical_point(&self, p: &PointSpec) -> Result<PointSpec, ComplexError> {
        let (cell, t) = self.minimal_cell(p)?;
        Ok(match cell {
            Cell::Face(_) => *p,
            Cell::Vertex(v) => {
                let f = *self.vertex_faces[v].iter().min().expect("vertex has a face");
                let i = self.faces[f].iter().position(|&w| w == v).unwrap();
                let (alpha, beta) = self.corner_coords(f, i);
                PointSpec::new(f, alpha, beta)
            }
            Cell::Edge(e) => {
                let f = *self.edge_faces[e].iter().min().expect("edge has a face");
                let (alpha, beta) = self.edge_point_in_face(f, e, t);
                PointSpec::new(f, alpha, beta)
            }
        })
    }

    /// Breadth-first hop distances from `src`; `u32::MAX` marks unreachable.
    pub fn bfs(&self, src: VertexId) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.n];
        let mut queue = VecDeque::new();
        dist[src] = 0;
        queue.push_back(src);
        while let Some(v) = queue.pop_front() {
            for &(w, _) in &self.adjacency[v] {
                if dist[w] == u32::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn all_pairs_distances(&self) -> Vec<Vec<u32>> {
        (0..self.n).map(|v| self.bfs(v)).collect()
    }

    /// First 4-cycle of the underlying graph (as `[a, b, c, d]`) that is not
    /// the boundary of a face.
    pub fn unfilled_square(&self) -> Option<[VertexId; 4]> {
        let face_keys: BTreeSet<[usize; 4]> = self
            .faces
            .iter()
            .map(|f| {
                let mut k = *f;
                k.sort_unstable();
                k
            })
            .collect();
        for a in 0..self.n {
            // Enumerate cycles a-b-c-d with a the minimum vertex and b < d.
            let mut via: HashMap<VertexId, Vec<VertexId>> = HashMap::new();
            for &(b, _) in &self.adjacency[a] {
                if b < a {
                    continue;
                }
                for &(c, _) in &self.adjacency[b] {
                    if c > a {
                        via.entry(c).or_default().push(b);
                    }
                }
            }
            let mut entries: Vec<_> = via.into_iter().collect();
            entries.sort_unstable();
            for (c, mids) in entries {
                for i in 0..mids.len() {
                    for j in i + 1..mids.len() {
                        let (b, d) = (mids[i].min(mids[j]), mids[i].max(mids[j]));
                        let mut key = [a, b, c, d];
                        key.sort_unstable();
                        if !face_keys.contains(&key) {
                            return Some([a, b, c, d]);
                        }
                    }
                }
            }
        }
        None
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationConfig {
    /// Vertex count up to which every triple is checked for a unique median.
    pub exhaustive_limit: usize,
    /// Number of random triples checked above the limit.
    pub sampled_triples: usize,
    pub seed: u64,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        Self {
            exhaustive_limit: 2000,
            sampled_triples: 10_000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub connected: bool,
    pub bipartite: bool,
    pub triangle_free_links: bool,
    pub median: bool,
    /// True when medianness was checked on sampled triples only.
    pub probabilistic: bool,
    pub triples_checked: u64,
}

/// Checks the CAT(0) conditions: connected bipartite underlying graph,
/// triangle-free links, unique medians, and all 4-cycles filled. Cube-freeness
/// follows from medianness plus triangle-free links.
pub fn validate_cat0(
    k: &RectComplex,
    cfg: &ValidationConfig,
) -> Result<ValidationReport, ValidationError> {
    let n = k.vertex_count();
    let dist = if n > 0 { k.bfs(0) } else { Vec::new() };
    if let Some(v) = dist.iter().position(|&d| d == u32::MAX) {
        return Err(ValidationError::Disconnected { unreachable: v });
    }
    check_bipartite(k)?;
    check_links(k)?;
    let (probabilistic, triples_checked) = check_median(k, cfg)?;
    if let Some(cycle) = k.unfilled_square() {
        return Err(ValidationError::UnfilledSquare { cycle });
    }
    Ok(ValidationReport {
        vertices: n,
        edges: k.edges().len(),
        faces: k.faces().len(),
        connected: true,
        bipartite: true,
        triangle_free_links: true,
        median: true,
        probabilistic,
        triples_checked,
    })
}

fn check_bipartite(k: &RectComplex) -> Result<(), ValidationError> {
    let n = k.vertex_count();
    let mut side = vec![u8::MAX; n];
    let mut parent = vec![usize::MAX; n];
    for root in 0..n {
        if side[root] != u8::MAX {
            continue;
        }
        side[root] = 0;
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &(w, _) in k.neighbors(v) {
                if side[w] == u8::MAX {
                    side[w] = 1 - side[v];
                    parent[w] = v;
                    queue.push_back(w);
                } else if side[w] == side[v] {
                    return Err(ValidationError::NotBipartite {
                        cycle: tree_cycle(&parent, v, w),
                    });
                }
            }
        }
    }
    Ok(())
}

/// Cycle closed by the non-tree arc `a-b` in a BFS forest given by `parent`.
pub(crate) fn tree_cycle(parent: &[usize], a: usize, b: usize) -> Vec<usize> {
    let path_to_root = |mut x: usize| {
        let mut path = vec![x];
        while parent[x] != usize::MAX {
            x = parent[x];
            path.push(x);
        }
        path
    };
    let pa = path_to_root(a);
    let pb = path_to_root(b);
    let on_b: std::collections::HashSet<_> = pb.iter().copied().collect();
    let lca_pos = pa.iter().position(|x| on_b.contains(x)).unwrap();
    let lca = pa[lca_pos];
    let mut cycle: Vec<usize> = pa[..=lca_pos].to_vec();
    let pos_b = pb.iter().position(|&x| x == lca).unwrap();
    cycle.extend(pb[..pos_b].iter().rev());
    cycle
}

fn check_links(k: &RectComplex) -> Result<(), ValidationError> {
    for v in 0..k.vertex_count() {
        let link = k.link(v);
        let mut adj: HashMap<EdgeId, BTreeSet<EdgeId>> = HashMap::new();
        for &(a, b, _) in &link.arcs {
            adj.entry(a).or_default().insert(b);
            adj.entry(b).or_default().insert(a);
        }
        for &(a, b, _) in &link.arcs {
            if let Some(&c) = adj[&a].intersection(&adj[&b]).next() {
                let mut edges = [a, b, c];
                edges.sort_unstable();
                return Err(ValidationError::LinkTriangle { vertex: v, edges });
            }
        }
    }
    Ok(())
}

fn check_median(k: &RectComplex, cfg: &ValidationConfig) -> Result<(bool, u64), ValidationError> {
    let n = k.vertex_count();
    let dist = k.all_pairs_distances();
    if n <= cfg.exhaustive_limit {
        // spheres[u][r] = bitset of vertices at distance r from u.
        let words = n.div_ceil(64);
        let spheres: Vec<Vec<Vec<u64>>> = dist
            .iter()
            .map(|row| {
                let ecc = row.iter().copied().max().unwrap_or(0) as usize;
                let mut s = vec![vec![0u64; words]; ecc + 1];
                for (z, &d) in row.iter().enumerate() {
                    s[d as usize][z / 64] |= 1 << (z % 64);
                }
                s
            })
            .collect();
        let mut checked = 0u64;
        for u in 0..n {
            for v in u + 1..n {
                for w in v + 1..n {
                    checked += 1;
                    let (duv, duw, dvw) = (dist[u][v], dist[u][w], dist[v][w]);
                    let ku = (duv + duw - dvw) / 2;
                    let kv = (duv + dvw - duw) / 2;
                    let kw = (duw + dvw - duv) / 2;
                    let (su, sv, sw) = (
                        &spheres[u][ku as usize],
                        &spheres[v][kv as usize],
                        &spheres[w][kw as usize],
                    );
                    let count: u32 = (0..words)
                        .map(|i| (su[i] & sv[i] & sw[i]).count_ones())
                        .sum();
                    if count != 1 {
                        return Err(not_median(&dist, [u, v, w]));
                    }
                }
            }
        }
        Ok((false, checked))
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        for _ in 0..cfg.sampled_triples {
            let t = [
                rng.random_range(0..n as u64) as usize,
                rng.random_range(0..n as u64) as usize,
                rng.random_range(0..n as u64) as usize,
            ];
            if medians(&dist, t).len() != 1 {
                return Err(not_median(&dist, t));
            }
        }
        Ok((true, cfg.sampled_triples as u64))
    }
}

/// All medians of a vertex triple, by direct scan over the distance table.
pub fn medians(dist: &[Vec<u32>], [u, v, w]: [VertexId; 3]) -> Vec<VertexId> {
    (0..dist.len())
        .filter(|&z| {
            dist[u][z] + dist[z][v] == dist[u][v]
                && dist[v][z] + dist[z][w] == dist[v][w]
                && dist[u][z] + dist[z][w] == dist[u][w]
        })
        .collect()
}

fn not_median(dist: &[Vec<u32>], triple: [VertexId; 3]) -> ValidationError {
    ValidationError::NotMedian {
        triple,
        medians: medians(dist, triple),
    }
}
