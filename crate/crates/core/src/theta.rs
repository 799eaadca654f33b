//! Djoković–Winkler classes, halfspaces and the incompatibility graph.

use std::collections::{BTreeSet, VecDeque};

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{tree_cycle, EdgeId, RectComplex, VertexId, LENGTH_RTOL};

pub type ClassId = usize;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ThetaError {
    #[error("class {class} mixes edge lengths {a} and {b}")]
    InconsistentLength { class: ClassId, a: f64, b: f64 },
    #[error("face {face} has two incident edges in class {class}")]
    FaceClassCollision { face: usize, class: ClassId },
    #[error("class id {0} out of range")]
    NoSuchClass(ClassId),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaDecomposition {
    pub class_of: Vec<ClassId>,
    pub class_length: Vec<f64>,
    /// Edge ids per class, ascending by edge key.
    pub classes: Vec<Vec<EdgeId>>,
    /// Arcs `(i, j)` with `i < j` of the incompatibility graph.
    pub inc_arcs: Vec<(ClassId, ClassId)>,
    /// Color 1 or 2 per class; `None` when Inc(G) has an odd cycle.
    pub coloring: Option<Vec<u8>>,
    /// Odd cycle of classes when the coloring is absent.
    pub odd_cycle: Option<Vec<ClassId>>,
}

pub fn compute_theta(k: &RectComplex) -> Result<ThetaDecomposition, ThetaError> {
    let m = k.edges().len();
    let mut uf = UnionFind::<usize>::new(m);
    for f in 0..k.faces().len() {
        let fe = k.face_edges(f);
        uf.union(fe[0], fe[2]);
        uf.union(fe[1], fe[3]);
    }

    // Dense ids ordered by the minimum edge key of each class.
    let mut order: Vec<EdgeId> = (0..m).collect();
    order.sort_unstable_by_key(|&e| k.edge(e).key());
    let mut root_class = vec![usize::MAX; m];
    let mut class_of = vec![0; m];
    let mut classes: Vec<Vec<EdgeId>> = Vec::new();
    for &e in &order {
        let r = uf.find(e);
        if root_class[r] == usize::MAX {
            root_class[r] = classes.len();
            classes.push(Vec::new());
        }
        class_of[e] = root_class[r];
        classes[root_class[r]].push(e);
    }

    let mut class_length = Vec::with_capacity(classes.len());
    for (class, edges) in classes.iter().enumerate() {
        let a = k.edge(edges[0]).length;
        for &e in &edges[1..] {
            let b = k.edge(e).length;
            if (a - b).abs() > LENGTH_RTOL * a.max(b) {
                return Err(ThetaError::InconsistentLength { class, a, b });
            }
        }
        class_length.push(a);
    }

    let mut arcs = BTreeSet::new();
    for f in 0..k.faces().len() {
        let fe = k.face_edges(f);
        let (c0, c1) = (class_of[fe[0]], class_of[fe[1]]);
        if c0 == c1 {
            return Err(ThetaError::FaceClassCollision { face: f, class: c0 });
        }
        arcs.insert((c0.min(c1), c0.max(c1)));
    }
    let inc_arcs: Vec<_> = arcs.into_iter().collect();
    let (coloring, odd_cycle) = match bipartition(classes.len(), &inc_arcs) {
        Ok(c) => (Some(c), None),
        Err(w) => (None, Some(w)),
    };

    Ok(ThetaDecomposition {
        class_of,
        class_length,
        classes,
        inc_arcs,
        coloring,
        odd_cycle,
    })
}

/// Proper 2-coloring of Inc(G); the smallest class of every component gets
/// color 1. Returns an odd cycle of classes otherwise.
pub fn bipartition(count: usize, arcs: &[(ClassId, ClassId)]) -> Result<Vec<u8>, Vec<ClassId>> {
    let mut adj = vec![Vec::new(); count];
    for &(a, b) in arcs {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut color = vec![0u8; count];
    let mut parent = vec![usize::MAX; count];
    for root in 0..count {
        if color[root] != 0 {
            continue;
        }
        color[root] = 1;
        let mut queue = VecDeque::from([root]);
        while let Some(c) = queue.pop_front() {
            for &d in &adj[c] {
                if color[d] == 0 {
                    color[d] = 3 - color[c];
                    parent[d] = c;
                    queue.push_back(d);
                } else if color[d] == color[c] {
                    return Err(tree_cycle(&parent, c, d));
                }
            }
        }
    }
    Ok(color)
}

impl ThetaDecomposition {
    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn is_ramified(&self) -> bool {
        self.coloring.is_some()
    }

    pub fn color(&self, class: ClassId) -> Option<u8> {
        self.coloring.as_ref().map(|c| c[class])
    }

    /// The two halfspaces of a class. `H1` is the side containing the
    /// smaller endpoint of the class's minimum edge. Both lists are sorted.
    pub fn halfspaces(
        &self,
        k: &RectComplex,
        class: ClassId,
    ) -> Result<(Vec<VertexId>, Vec<VertexId>), ThetaError> {
        let edges = self.classes.get(class).ok_or(ThetaError::NoSuchClass(class))?;
        let start = k.edge(edges[0]).u;
        let mut seen = vec![false; k.vertex_count()];
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &(w, e) in k.neighbors(v) {
                if self.class_of[e] != class && !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        let (h1, h2): (Vec<_>, Vec<_>) = (0..k.vertex_count()).partition(|&v| seen[v]);
        Ok((h1, h2))
    }
}
