//! Query structures: the dense distance matrix with interval lists, and the
//! embedding into a product of two trees for ramified rectilinear polygons.

use std::collections::VecDeque;

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{RectComplex, VertexId};
use crate::theta::{ClassId, ThetaDecomposition};

const NONE: u32 = u32::MAX;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StructureError {
    #[error("vertex {unreachable} unreachable from {from}")]
    Disconnected { from: VertexId, unreachable: VertexId },
    #[error("L_{u}({v}) has more than two entries")]
    ListOverflow { u: VertexId, v: VertexId },
    #[error("incompatibility graph is not bipartite; odd cycle {cycle:?}")]
    NotRamified { cycle: Vec<ClassId> },
    #[error("contraction for color {color} is not a tree: {reason}")]
    NotATree { color: u8, reason: String },
    #[error("tree distance {tree} differs from graph distance {graph} for ({u}, {v})")]
    NotIsometric {
        u: VertexId,
        v: VertexId,
        tree: u32,
        graph: u32,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseMatrix {
    n: usize,
    /// Row-major hop distances.
    dist: Vec<u32>,
    /// `lists[u * n + v]` is `L_u(v)`, padded with `u32::MAX`.
    lists: Vec<[u32; 2]>,
}

impl DenseMatrix {
    pub fn build(k: &RectComplex) -> Result<Self, StructureError> {
        let n = k.vertex_count();
        let mut dist = Vec::with_capacity(n * n);
        let mut lists = vec![[NONE; 2]; n * n];
        for u in 0..n {
            let row = k.bfs(u);
            if let Some(v) = row.iter().position(|&d| d == u32::MAX) {
                return Err(StructureError::Disconnected {
                    from: u,
                    unreachable: v,
                });
            }
            for v in 0..n {
                let slot = &mut lists[u * n + v];
                let mut len = 0;
                for &(w, _) in k.neighbors(v) {
                    if row[w] + 1 == row[v] {
                        if len == 2 {
                            return Err(StructureError::ListOverflow { u, v });
                        }
                        slot[len] = w as u32;
                        len += 1;
                    }
                }
            }
            dist.extend_from_slice(&row);
        }
        Ok(Self { n, dist, lists })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn dist(&self, u: VertexId, v: VertexId) -> u32 {
        self.dist[u * self.n + v]
    }

    /// Neighbors of `v` on shortest paths towards `u`, ascending.
    pub fn list(&self, u: VertexId, v: VertexId) -> &[u32] {
        let slot = &self.lists[u * self.n + v];
        let len = slot.iter().take_while(|&&w| w != NONE).count();
        &slot[..len]
    }

    pub fn matrix_entries(&self) -> usize {
        self.dist.len()
    }

    pub fn list_entries(&self) -> usize {
        self.lists
            .iter()
            .map(|s| s.iter().filter(|&&w| w != NONE).count())
            .sum()
    }
}

/// A rooted tree with constant-time LCA through an Euler tour and a sparse
/// table of depth minima.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub parent: Vec<usize>,
    /// Class labelling the edge to the parent (`usize::MAX` at the root).
    pub parent_class: Vec<ClassId>,
    pub depth: Vec<u32>,
    pub children: Vec<Vec<usize>>,
    euler: Vec<usize>,
    first: Vec<usize>,
    /// `sparse[j][i]`: node of minimum depth in `euler[i .. i + 2^j]`.
    sparse: Vec<Vec<usize>>,
}

impl Tree {
    fn new(count: usize, arcs: &[(usize, usize, ClassId)]) -> Result<Self, String> {
        let mut adj = vec![Vec::new(); count];
        for &(a, b, c) in arcs {
            adj[a].push((b, c));
            adj[b].push((a, c));
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        let mut parent = vec![usize::MAX; count];
        let mut parent_class = vec![usize::MAX; count];
        let mut depth = vec![u32::MAX; count];
        let mut children = vec![Vec::new(); count];
        depth[0] = 0;
        let mut queue = VecDeque::from([0]);
        while let Some(a) = queue.pop_front() {
            for &(b, c) in &adj[a] {
                if depth[b] == u32::MAX {
                    depth[b] = depth[a] + 1;
                    parent[b] = a;
                    parent_class[b] = c;
                    children[a].push(b);
                    queue.push_back(b);
                } else if parent[a] != b {
                    return Err(format!("cycle through nodes {a} and {b}"));
                }
            }
        }
        if let Some(a) = depth.iter().position(|&d| d == u32::MAX) {
            return Err(format!("node {a} unreachable from the root"));
        }

        let mut euler = Vec::with_capacity(2 * count);
        let mut first = vec![0; count];
        let mut stack = vec![(0usize, 0usize)];
        while let Some(&(a, next)) = stack.last() {
            if next == 0 {
                first[a] = euler.len();
            }
            euler.push(a);
            if next < children[a].len() {
                stack.last_mut().unwrap().1 += 1;
                stack.push((children[a][next], 0));
            } else {
                stack.pop();
            }
        }

        let mut sparse = vec![euler.clone()];
        let mut span = 1;
        while 2 * span <= euler.len() {
            let prev = sparse.last().unwrap();
            let row: Vec<usize> = (0..=euler.len() - 2 * span)
                .map(|i| {
                    let (a, b) = (prev[i], prev[i + span]);
                    if depth[a] <= depth[b] {
                        a
                    } else {
                        b
                    }
                })
                .collect();
            sparse.push(row);
            span *= 2;
        }

        Ok(Self {
            parent,
            parent_class,
            depth,
            children,
            euler,
            first,
            sparse,
        })
    }

    pub fn node_count(&self) -> usize {
        self.parent.len()
    }

    pub fn lca(&self, a: usize, b: usize) -> usize {
        let (mut i, mut j) = (self.first[a], self.first[b]);
        if i > j {
            std::mem::swap(&mut i, &mut j);
        }
        let level = (usize::BITS - 1 - (j - i + 1).leading_zeros()) as usize;
        let x = self.sparse[level][i];
        let y = self.sparse[level][j + 1 - (1 << level)];
        if self.depth[x] <= self.depth[y] {
            x
        } else {
            y
        }
    }

    pub fn dist(&self, a: usize, b: usize) -> u32 {
        self.depth[a] + self.depth[b] - 2 * self.depth[self.lca(a, b)]
    }

    /// Nodes of the path from `a` to `b` and the classes of its edges.
    pub fn path(&self, a: usize, b: usize) -> (Vec<usize>, Vec<ClassId>) {
        let l = self.lca(a, b);
        let mut nodes = vec![a];
        let mut classes = Vec::new();
        let mut x = a;
        while x != l {
            classes.push(self.parent_class[x]);
            x = self.parent[x];
            nodes.push(x);
        }
        let mut tail_nodes = Vec::new();
        let mut tail_classes = Vec::new();
        let mut y = b;
        while y != l {
            tail_nodes.push(y);
            tail_classes.push(self.parent_class[y]);
            y = self.parent[y];
        }
        nodes.extend(tail_nodes.into_iter().rev());
        classes.extend(tail_classes.into_iter().rev());
        (nodes, classes)
    }

    /// Euler tour length plus sparse table cells.
    pub fn table_entries(&self) -> usize {
        self.euler.len() + self.sparse.iter().map(Vec::len).sum::<usize>()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeProduct {
    pub t1: Tree,
    pub t2: Tree,
    /// `(C1(v), C2(v))` per vertex.
    pub coords: Vec<(usize, usize)>,
    /// Per-vertex `(class, neighbor)` pairs sorted by class.
    q: Vec<Vec<(ClassId, VertexId)>>,
    /// Color per class, 1 for vertical.
    color: Vec<u8>,
}

/// Result of one binary search in a `Q(v)` list.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Lookup {
    pub neighbor: Option<VertexId>,
    pub probes: u32,
}

impl TreeProduct {
    pub fn build(k: &RectComplex, t: &ThetaDecomposition) -> Result<Self, StructureError> {
        let color = match (&t.coloring, &t.odd_cycle) {
            (Some(c), _) => c.clone(),
            (None, w) => {
                return Err(StructureError::NotRamified {
                    cycle: w.clone().unwrap_or_default(),
                })
            }
        };
        let n = k.vertex_count();
        let mut trees = Vec::with_capacity(2);
        let mut coords = vec![(0, 0); n];
        for c in [1u8, 2] {
            let mut uf = UnionFind::<usize>::new(n);
            for (e, edge) in k.edges().iter().enumerate() {
                if color[t.class_of[e]] != c {
                    uf.union(edge.u, edge.v);
                }
            }
            let mut comp_of_root = vec![usize::MAX; n];
            let mut count = 0;
            let comp: Vec<usize> = (0..n)
                .map(|v| {
                    let r = uf.find(v);
                    if comp_of_root[r] == usize::MAX {
                        comp_of_root[r] = count;
                        count += 1;
                    }
                    comp_of_root[r]
                })
                .collect();
            let mut arcs = Vec::new();
            for (class, edges) in t.classes.iter().enumerate() {
                if color[class] != c {
                    continue;
                }
                let e0 = k.edge(edges[0]);
                let (a, b) = (comp[e0.u], comp[e0.v]);
                for &e in &edges[1..] {
                    let edge = k.edge(e);
                    let (x, y) = (comp[edge.u], comp[edge.v]);
                    if !((x, y) == (a, b) || (x, y) == (b, a)) {
                        return Err(StructureError::NotATree {
                            color: c,
                            reason: format!("class {class} spans several node pairs"),
                        });
                    }
                }
                arcs.push((a, b, class));
            }
            if count > 0 && arcs.len() != count - 1 {
                return Err(StructureError::NotATree {
                    color: c,
                    reason: format!("{count} nodes but {} arcs", arcs.len()),
                });
            }
            let tree = Tree::new(count.max(1), &arcs)
                .map_err(|reason| StructureError::NotATree { color: c, reason })?;
            for v in 0..n {
                if c == 1 {
                    coords[v].0 = comp[v];
                } else {
                    coords[v].1 = comp[v];
                }
            }
            trees.push(tree);
        }
        let t2 = trees.pop().unwrap();
        let t1 = trees.pop().unwrap();

        let q = (0..n)
            .map(|v| {
                let mut list: Vec<_> = k
                    .neighbors(v)
                    .iter()
                    .map(|&(w, e)| (t.class_of[e], w))
                    .collect();
                list.sort_unstable();
                list
            })
            .collect();

        let s = Self {
            t1,
            t2,
            coords,
            q,
            color,
        };
        s.check_isometry(k, 16)?;
        Ok(s)
    }

    fn check_isometry(&self, k: &RectComplex, sources: usize) -> Result<(), StructureError> {
        let n = k.vertex_count();
        if n == 0 {
            return Ok(());
        }
        let step = (n / sources).max(1);
        for u in (0..n).step_by(step) {
            let row = k.bfs(u);
            for (v, &graph) in row.iter().enumerate() {
                let tree = self.dist(u, v);
                if tree != graph {
                    return Err(StructureError::NotIsometric { u, v, tree, graph });
                }
            }
        }
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.coords.len()
    }

    pub fn dist(&self, u: VertexId, v: VertexId) -> u32 {
        let (a1, a2) = self.coords[u];
        let (b1, b2) = self.coords[v];
        self.t1.dist(a1, b1) + self.t2.dist(a2, b2)
    }

    pub fn class_color(&self, class: ClassId) -> u8 {
        self.color[class]
    }

    pub fn q_list(&self, v: VertexId) -> &[(ClassId, VertexId)] {
        &self.q[v]
    }

    pub fn max_degree(&self) -> usize {
        self.q.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Binary search for an edge of `class` at `v`, counting probes.
    pub fn lookup(&self, v: VertexId, class: ClassId) -> Lookup {
        let list = &self.q[v];
        let (mut lo, mut hi) = (0, list.len());
        let mut probes = 0;
        while lo < hi {
            let mid = (lo + hi) / 2;
            probes += 1;
            match list[mid].0.cmp(&class) {
                std::cmp::Ordering::Equal => {
                    return Lookup {
                        neighbor: Some(list[mid].1),
                        probes,
                    }
                }
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
            }
        }
        Lookup {
            neighbor: None,
            probes,
        }
    }

    pub fn tree_nodes(&self) -> usize {
        self.t1.node_count() + self.t2.node_count()
    }

    pub fn table_entries(&self) -> usize {
        self.t1.table_entries() + self.t2.table_entries()
    }

    pub fn q_entries(&self) -> usize {
        self.q.iter().map(Vec::len).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StructureKind {
    Dense,
    TreeProduct,
}

impl StructureKind {
    pub fn name(self) -> &'static str {
        match self {
            StructureKind::Dense => "dense",
            StructureKind::TreeProduct => "treeproduct",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "data", rename_all = "lowercase")]
pub enum QueryStructure {
    Dense(DenseMatrix),
    TreeProduct(Box<TreeProduct>),
}

impl QueryStructure {
    pub fn build(
        k: &RectComplex,
        t: &ThetaDecomposition,
        kind: StructureKind,
    ) -> Result<Self, StructureError> {
        Ok(match kind {
            StructureKind::Dense => QueryStructure::Dense(DenseMatrix::build(k)?),
            StructureKind::TreeProduct => QueryStructure::TreeProduct(Box::new(TreeProduct::build(k, t)?)),
        })
    }

    /// Tree product when Inc(G) is bipartite, dense matrix otherwise.
    pub fn build_auto(k: &RectComplex, t: &ThetaDecomposition) -> Result<Self, StructureError> {
        let kind = if t.is_ramified() {
            StructureKind::TreeProduct
        } else {
            StructureKind::Dense
        };
        Self::build(k, t, kind)
    }

    pub fn kind(&self) -> StructureKind {
        match self {
            QueryStructure::Dense(_) => StructureKind::Dense,
            QueryStructure::TreeProduct(_) => StructureKind::TreeProduct,
        }
    }

    pub fn dist(&self, u: VertexId, v: VertexId) -> u32 {
        match self {
            QueryStructure::Dense(m) => m.dist(u, v),
            QueryStructure::TreeProduct(s) => s.dist(u, v),
        }
    }

    pub fn vertex_count(&self) -> usize {
        match self {
            QueryStructure::Dense(m) => m.vertex_count(),
            QueryStructure::TreeProduct(s) => s.vertex_count(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::theta::compute_theta;

    #[test]
    fn dense_single_square() {
        let k = fixtures::single_square();
        let m = DenseMatrix::build(&k).unwrap();
        assert_eq!(m.dist(0, 2), 2);
        assert_eq!(m.list(0, 2), &[1, 3]);
        for u in 0..4 {
            assert_eq!(m.dist(u, u), 0);
            assert!(m.list(u, u).is_empty());
        }
        assert_eq!(m.matrix_entries(), 16);
    }

    #[test]
    fn dense_fix_l() {
        let k = fixtures::fix_l();
        let m = DenseMatrix::build(&k).unwrap();
        // u = (2,0) = 2, v = (0,2) = 6; L_u(v) = {(0,1), (1,2)} = {3, 7}.
        assert_eq!(m.dist(2, 6), 4);
        assert_eq!(m.list(2, 6), &[3, 7]);
    }

    #[test]
    fn treeproduct_book() {
        let k = fixtures::fix_book();
        let t = compute_theta(&k).unwrap();
        let s = TreeProduct::build(&k, &t).unwrap();
        assert_eq!(s.t1.node_count(), 2);
        assert_eq!(s.t2.node_count(), 4);
        assert_eq!(s.tree_nodes(), 6);
        assert_eq!(s.t2.children[s.coords[0].1].len(), 3);
        let mut pairs = s.coords.clone();
        pairs.sort_unstable();
        pairs.dedup();
        assert_eq!(pairs.len(), 8);
        // a1 = 2, b2 = 5.
        assert_eq!(s.dist(2, 5), 3);
        assert_eq!(s.dist(4, 4), 0);
    }

    #[test]
    fn treeproduct_square_and_l() {
        let k = fixtures::single_square();
        let t = compute_theta(&k).unwrap();
        let s = TreeProduct::build(&k, &t).unwrap();
        assert_eq!((s.t1.node_count(), s.t2.node_count()), (2, 2));

        let k = fixtures::fix_l();
        let t = compute_theta(&k).unwrap();
        let s = TreeProduct::build(&k, &t).unwrap();
        assert_eq!((s.t1.node_count(), s.t2.node_count()), (3, 3));
        for tree in [&s.t1, &s.t2] {
            assert_eq!(tree.dist(0, 1) + tree.dist(1, 2) + tree.dist(0, 2), 4);
        }
        let mut pairs = s.coords.clone();
        pairs.sort_unstable();
        pairs.dedup();
        assert_eq!(pairs.len(), 8);
        assert_eq!(s.dist(2, 6), 4);
    }

    #[test]
    fn treeproduct_rejects_wheel() {
        let k = fixtures::wheel5();
        let t = compute_theta(&k).unwrap();
        assert!(matches!(
            TreeProduct::build(&k, &t),
            Err(StructureError::NotRamified { .. })
        ));
        assert_eq!(
            QueryStructure::build_auto(&k, &t).unwrap().kind(),
            StructureKind::Dense
        );
    }

    #[test]
    fn lookup_counts_probes() {
        let k = fixtures::fix_book();
        let t = compute_theta(&k).unwrap();
        let s = TreeProduct::build(&k, &t).unwrap();
        // c0 has degree 4: classes 0 (spine) and 1, 2, 3 (pages).
        let hit = s.lookup(0, 2);
        assert_eq!(hit.neighbor, Some(4));
        assert!(hit.probes <= 3);
        let miss = s.lookup(2, 3);
        assert_eq!(miss.neighbor, None);
    }

    #[test]
    fn tree_path_labels() {
        let k = fixtures::fix_l();
        let t = compute_theta(&k).unwrap();
        let s = TreeProduct::build(&k, &t).unwrap();
        let (a, b) = (s.coords[2], s.coords[6]);
        let (nodes, classes) = s.t1.path(a.0, b.0);
        assert_eq!(nodes.len(), classes.len() + 1);
        assert_eq!(classes.len() as u32, s.t1.dist(a.0, b.0));
    }
}
