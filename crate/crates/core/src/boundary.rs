//! Gate selection and the walk producing the two boundary paths of an
//! interval `I(p, q)` together with `deg0` of every boundary vertex.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::VertexId;
use crate::structures::{DenseMatrix, QueryStructure, TreeProduct};
use crate::theta::ClassId;

/// Number of `(x, y)` pairs kept in a contradiction trace.
const TRACE_LEN: usize = 16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundaryError {
    #[error("walk contradiction at step {step}: {reason} (trace {trace:?})")]
    InternalContradiction {
        step: usize,
        reason: String,
        trace: Vec<(VertexId, VertexId)>,
    },
    #[error("vertex {vertex} out of range (vertex count {n})")]
    VertexOutOfRange { vertex: VertexId, n: usize },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct WalkStats {
    pub steps_pi1: u32,
    pub steps_pi2: u32,
    /// Binary searches in `Q` lists (tree product only).
    pub lookups: u32,
    pub probes: u32,
    pub max_probes_per_lookup: u32,
    pub max_lookups_per_step: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalBoundary {
    pub p: VertexId,
    pub q: VertexId,
    pub pi1: Vec<VertexId>,
    pub pi2: Vec<VertexId>,
    pub deg0: BTreeMap<VertexId, u8>,
    /// Vertices shared by both paths, from `p` to `q`.
    pub articulation: Vec<VertexId>,
    pub stats: WalkStats,
}

impl IntervalBoundary {
    pub fn distance(&self) -> usize {
        self.pi1.len() - 1
    }

    /// Index pairs `(i, j)` of consecutive articulation positions; block `b`
    /// covers path indices `i..=j`.
    pub fn block_ranges(&self) -> Vec<(usize, usize)> {
        let joints: Vec<usize> = (0..self.pi1.len())
            .filter(|&i| self.pi1[i] == self.pi2[i])
            .collect();
        joints.windows(2).map(|w| (w[0], w[1])).collect()
    }

    /// Both paths of every block as an unordered pair, for comparing walks
    /// that may name the two sides differently.
    pub fn block_sides(&self) -> Vec<[Vec<VertexId>; 2]> {
        self.block_ranges()
            .into_iter()
            .map(|(i, j)| {
                let a = self.pi1[i..=j].to_vec();
                let b = self.pi2[i..=j].to_vec();
                if a <= b {
                    [a, b]
                } else {
                    [b, a]
                }
            })
            .collect()
    }

    pub fn boundary_vertices(&self) -> Vec<VertexId> {
        let mut all: Vec<_> = self.pi1.iter().chain(&self.pi2).copied().collect();
        all.sort_unstable();
        all.dedup();
        all
    }
}

/// Mutually furthest vertices of two cells, ties broken by the smallest
/// `(p, q)`. Both vertex lists must be sorted.
pub fn select_gates(s: &QueryStructure, rx: &[VertexId], ry: &[VertexId]) -> (VertexId, VertexId) {
    let mut best = (rx[0], ry[0]);
    let mut best_d = s.dist(best.0, best.1);
    for &p in rx {
        for &q in ry {
            let d = s.dist(p, q);
            if d > best_d {
                best = (p, q);
                best_d = d;
            }
        }
    }
    best
}

pub fn boundary_walk(
    s: &QueryStructure,
    p: VertexId,
    q: VertexId,
) -> Result<IntervalBoundary, BoundaryError> {
    match s {
        QueryStructure::Dense(m) => boundary_walk_dense(m, p, q),
        QueryStructure::TreeProduct(t) => boundary_walk_treeproduct(t, p, q),
    }
}

fn check_range(n: usize, vs: [VertexId; 2]) -> Result<(), BoundaryError> {
    for vertex in vs {
        if vertex >= n {
            return Err(BoundaryError::VertexOutOfRange { vertex, n });
        }
    }
    Ok(())
}

fn articulation(pi1: &[VertexId], pi2: &[VertexId]) -> Vec<VertexId> {
    pi1.iter()
        .zip(pi2)
        .filter(|(a, b)| a == b)
        .map(|(a, _)| *a)
        .collect()
}

struct DenseWalk<'a> {
    m: &'a DenseMatrix,
    p: VertexId,
    q: VertexId,
    trace: Vec<(VertexId, VertexId)>,
}

impl DenseWalk<'_> {
    fn lq(&self, z: VertexId) -> Vec<VertexId> {
        self.m.list(self.q, z).iter().map(|&w| w as usize).collect()
    }

    fn deg0(&self, z: VertexId) -> u8 {
        (self.m.list(self.p, z).len() + self.m.list(self.q, z).len()) as u8
    }

    fn fail(&self, reason: String) -> BoundaryError {
        let start = self.trace.len().saturating_sub(TRACE_LEN);
        BoundaryError::InternalContradiction {
            step: self.trace.len() - 1,
            reason,
            trace: self.trace[start..].to_vec(),
        }
    }

    /// Chooses between the two candidates `{a, b}` of `z`: a candidate of
    /// `deg0 = 4` is excluded, otherwise the one not adjacent to `other`.
    fn discriminate(
        &self,
        z: VertexId,
        [a, b]: [VertexId; 2],
        other: VertexId,
    ) -> Result<VertexId, BoundaryError> {
        match (self.deg0(a) == 4, self.deg0(b) == 4) {
            (true, true) => Err(self.fail(format!("both candidates {a}, {b} of {z} have deg0 = 4"))),
            (true, false) => Ok(b),
            (false, true) => Ok(a),
            (false, false) => {
                let lo = self.lq(other);
                match (lo.contains(&a), lo.contains(&b)) {
                    (false, true) => Ok(a),
                    (true, false) => Ok(b),
                    (true, true) => Err(self.fail(format!("{other} is adjacent to both {a} and {b}"))),
                    (false, false) => Err(self.fail(format!("{other} is adjacent to neither {a} nor {b}"))),
                }
            }
        }
    }

    /// Next vertex of the path through `y` when the other path's step is
    /// already fixed by `x`.
    fn follow(&self, y: VertexId, x: VertexId, x_next: VertexId) -> Result<VertexId, BoundaryError> {
        let ly = self.lq(y);
        match ly[..] {
            [w] => Ok(w),
            [a, b] if a == x_next => Ok(b),
            [a, b] if b == x_next => Ok(a),
            [a, b] => self.discriminate(y, [a, b], x),
            _ => Err(self.fail(format!("L_q({y}) is empty"))),
        }
    }

    fn step(&mut self, x: VertexId, y: VertexId) -> Result<(VertexId, VertexId), BoundaryError> {
        self.trace.push((x, y));
        let lx = self.lq(x);
        if x == y {
            return match lx[..] {
                [a] => Ok((a, a)),
                [a, b] => Ok((a, b)),
                _ => Err(self.fail(format!("L_q({x}) is empty before reaching q"))),
            };
        }
        match lx[..] {
            [a] => Ok((a, self.follow(y, x, a)?)),
            [a, b] => match (self.deg0(a) == 4, self.deg0(b) == 4) {
                (true, true) => Err(self.fail(format!("both candidates {a}, {b} of {x} have deg0 = 4"))),
                (true, false) => Ok((b, self.follow(y, x, b)?)),
                (false, true) => Ok((a, self.follow(y, x, a)?)),
                (false, false) => {
                    let ly = self.lq(y);
                    match (ly.contains(&a), ly.contains(&b)) {
                        (false, true) => Ok((a, b)),
                        (true, false) => Ok((b, a)),
                        (true, true) => Err(self.fail(format!("{y} is adjacent to both {a} and {b}"))),
                        (false, false) => {
                            Err(self.fail(format!("{y} is adjacent to neither {a} nor {b}")))
                        }
                    }
                }
            },
            _ => Err(self.fail(format!("L_q({x}) is empty before reaching q"))),
        }
    }
}

/// Boundary walk over the dense matrix: `O(1)` work per step.
pub fn boundary_walk_dense(
    m: &DenseMatrix,
    p: VertexId,
    q: VertexId,
) -> Result<IntervalBoundary, BoundaryError> {
    check_range(m.vertex_count(), [p, q])?;
    let d = m.dist(p, q) as usize;
    let mut walk = DenseWalk {
        m,
        p,
        q,
        trace: Vec::new(),
    };
    let mut pi1 = Vec::with_capacity(d + 1);
    let mut pi2 = Vec::with_capacity(d + 1);
    pi1.push(p);
    pi2.push(p);
    let mut stats = WalkStats::default();
    for _ in 0..d {
        let (x, y) = (*pi1.last().unwrap(), *pi2.last().unwrap());
        let (xn, yn) = walk.step(x, y)?;
        pi1.push(xn);
        pi2.push(yn);
        stats.steps_pi1 += 1;
        stats.steps_pi2 += 1;
    }
    let deg0 = pi1
        .iter()
        .chain(&pi2)
        .map(|&z| (z, walk.deg0(z)))
        .collect();
    Ok(IntervalBoundary {
        p,
        q,
        articulation: articulation(&pi1, &pi2),
        pi1,
        pi2,
        deg0,
        stats,
    })
}

/// Position of every node on a tree path, with the classes of its edges.
struct TreePath {
    index: HashMap<usize, usize>,
    classes: Vec<ClassId>,
}

impl TreePath {
    fn new(nodes: Vec<usize>, classes: Vec<ClassId>) -> Self {
        let index = nodes.into_iter().enumerate().map(|(i, a)| (a, i)).collect();
        Self { index, classes }
    }

    fn forward(&self, node: usize) -> Option<ClassId> {
        let i = *self.index.get(&node)?;
        self.classes.get(i).copied()
    }

    fn backward(&self, node: usize) -> Option<ClassId> {
        let i = *self.index.get(&node)?;
        i.checked_sub(1).map(|j| self.classes[j])
    }
}

struct TreeWalk<'a> {
    s: &'a TreeProduct,
    vertical: TreePath,
    horizontal: TreePath,
    stats: WalkStats,
    step_lookups: u32,
    trace: Vec<(VertexId, VertexId)>,
}

impl TreeWalk<'_> {
    fn lookup(&mut self, z: VertexId, class: Option<ClassId>) -> Option<VertexId> {
        let class = class?;
        let hit = self.s.lookup(z, class);
        self.stats.lookups += 1;
        self.stats.probes += hit.probes;
        self.stats.max_probes_per_lookup = self.stats.max_probes_per_lookup.max(hit.probes);
        self.step_lookups += 1;
        hit.neighbor
    }

    /// One step from `z`, trying the preferred direction first.
    fn advance(&mut self, z: VertexId, vertical_first: bool) -> Result<VertexId, BoundaryError> {
        let (c1, c2) = self.s.coords[z];
        let v = self.vertical.forward(c1);
        let h = self.horizontal.forward(c2);
        let (first, second) = if vertical_first { (v, h) } else { (h, v) };
        if let Some(w) = self.lookup(z, first) {
            return Ok(w);
        }
        if let Some(w) = self.lookup(z, second) {
            return Ok(w);
        }
        let start = self.trace.len().saturating_sub(TRACE_LEN);
        Err(BoundaryError::InternalContradiction {
            step: self.trace.len().saturating_sub(1),
            reason: format!("no edge of class {v:?} or {h:?} at {z}"),
            trace: self.trace[start..].to_vec(),
        })
    }

    fn deg0(&mut self, z: VertexId) -> u8 {
        let (c1, c2) = self.s.coords[z];
        let classes = [
            self.vertical.forward(c1),
            self.horizontal.forward(c2),
            self.vertical.backward(c1),
            self.horizontal.backward(c2),
        ];
        classes
            .into_iter()
            .filter(|&c| self.lookup(z, c).is_some())
            .count() as u8
    }
}

/// Boundary walk over the tree product: `pi1` prefers the next class of the
/// vertical tree path, `pi2` the next class of the horizontal one. Each step
/// costs a constant number of binary searches.
pub fn boundary_walk_treeproduct(
    s: &TreeProduct,
    p: VertexId,
    q: VertexId,
) -> Result<IntervalBoundary, BoundaryError> {
    check_range(s.vertex_count(), [p, q])?;
    let (p1, p2) = s.coords[p];
    let (q1, q2) = s.coords[q];
    let (n1, c1) = s.t1.path(p1, q1);
    let (n2, c2) = s.t2.path(p2, q2);
    let d = c1.len() + c2.len();
    let mut walk = TreeWalk {
        s,
        vertical: TreePath::new(n1, c1),
        horizontal: TreePath::new(n2, c2),
        stats: WalkStats::default(),
        step_lookups: 0,
        trace: Vec::new(),
    };
    let mut pi1 = Vec::with_capacity(d + 1);
    let mut pi2 = Vec::with_capacity(d + 1);
    pi1.push(p);
    pi2.push(p);
    let mut deg0 = BTreeMap::new();
    walk.step_lookups = 0;
    deg0.insert(p, walk.deg0(p));
    for _ in 0..d {
        walk.step_lookups = 0;
        let (x, y) = (*pi1.last().unwrap(), *pi2.last().unwrap());
        walk.trace.push((x, y));
        let xn = walk.advance(x, true)?;
        let yn = walk.advance(y, false)?;
        for z in [xn, yn] {
            if let std::collections::btree_map::Entry::Vacant(slot) = deg0.entry(z) {
                slot.insert(walk.deg0(z));
            }
        }
        pi1.push(xn);
        pi2.push(yn);
        walk.stats.steps_pi1 += 1;
        walk.stats.steps_pi2 += 1;
        walk.stats.max_lookups_per_step = walk.stats.max_lookups_per_step.max(walk.step_lookups);
    }
    Ok(IntervalBoundary {
        p,
        q,
        articulation: articulation(&pi1, &pi2),
        pi1,
        pi2,
        deg0,
        stats: walk.stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::structures::StructureKind;
    use crate::theta::compute_theta;

    fn both(k: &crate::complex::RectComplex) -> (QueryStructure, QueryStructure) {
        let t = compute_theta(k).unwrap();
        (
            QueryStructure::build(k, &t, StructureKind::Dense).unwrap(),
            QueryStructure::build(k, &t, StructureKind::TreeProduct).unwrap(),
        )
    }

    #[test]
    fn single_square_walk() {
        let (dense, tree) = both(&fixtures::single_square());
        for s in [&dense, &tree] {
            let b = boundary_walk(s, 0, 2).unwrap();
            let mut sides = [b.pi1.clone(), b.pi2.clone()];
            sides.sort();
            assert_eq!(sides, [vec![0, 1, 2], vec![0, 3, 2]]);
            assert!(b.deg0.values().all(|&d| d == 2));
            assert_eq!(b.articulation, vec![0, 2]);
        }
        let b = boundary_walk(&dense, 0, 2).unwrap();
        assert_eq!(b.pi1, vec![0, 1, 2]);
    }

    #[test]
    fn fix_l_walk() {
        let (dense, tree) = both(&fixtures::fix_l());
        let b = boundary_walk(&dense, 2, 6).unwrap();
        // Smaller id first at the split: (1,0) = 1 before (2,1) = 5.
        assert_eq!(b.pi1, vec![2, 1, 0, 3, 6]);
        assert_eq!(b.pi2, vec![2, 5, 4, 7, 6]);
        assert_eq!(b.deg0[&4], 4);
        for (&z, &d) in &b.deg0 {
            if z != 4 {
                assert!(d == 2 || d == 3, "deg0({z}) = {d}");
            }
        }
        assert_eq!(b.articulation, vec![2, 6]);
        assert_eq!((b.stats.steps_pi1, b.stats.steps_pi2), (4, 4));
        let t = boundary_walk(&tree, 2, 6).unwrap();
        assert_eq!(t.block_sides(), b.block_sides());
        assert_eq!(t.deg0, b.deg0);
    }

    #[test]
    fn fix_stair_has_pinch() {
        let (dense, tree) = both(&fixtures::fix_stair());
        for s in [&dense, &tree] {
            let b = boundary_walk(s, 0, 6).unwrap();
            assert_eq!(b.articulation, vec![0, 3, 6]);
            assert_eq!(b.block_ranges().len(), 2);
        }
    }

    #[test]
    fn fix_book_walk() {
        let (dense, tree) = both(&fixtures::fix_book());
        // a1 = 2, b2 = 5; the interval is the union of pages 1 and 2.
        let b = boundary_walk(&dense, 2, 5).unwrap();
        assert_eq!(b.distance(), 3);
        assert_eq!(
            b.block_sides(),
            vec![[vec![2, 0, 4, 5], vec![2, 3, 1, 5]]]
        );
        assert_eq!(b.articulation, vec![2, 5]);
        let t = boundary_walk(&tree, 2, 5).unwrap();
        assert_eq!(t.block_sides(), b.block_sides());
    }

    #[test]
    fn degenerate_walk() {
        let (dense, tree) = both(&fixtures::fix_l());
        for s in [&dense, &tree] {
            let b = boundary_walk(s, 4, 4).unwrap();
            assert_eq!((b.pi1.clone(), b.pi2.clone()), (vec![4], vec![4]));
            assert_eq!(b.articulation, vec![4]);
        }
    }

    #[test]
    fn gates() {
        let (dense, _) = both(&fixtures::fix_l());
        assert_eq!(select_gates(&dense, &[1, 2, 4, 5], &[3, 4, 6, 7]), (2, 6));
        assert_eq!(select_gates(&dense, &[0, 1, 3, 4], &[0, 1, 3, 4]), (0, 4));
        assert_eq!(select_gates(&dense, &[5], &[3]), (5, 3));
    }

    #[test]
    fn tree_walk_probe_bound() {
        let (_, tree) = both(&fixtures::fix_book());
        let b = boundary_walk(&tree, 2, 7).unwrap();
        // Maximum degree 4: at most ceil(log2 4) + 1 probes per search.
        assert!(b.stats.max_probes_per_lookup <= 3);
        assert!(b.stats.max_lookups_per_step <= 12);
    }

    #[test]
    fn out_of_range() {
        let (dense, _) = both(&fixtures::single_square());
        assert!(matches!(
            boundary_walk(&dense, 0, 9),
            Err(BoundaryError::VertexOutOfRange { .. })
        ));
    }
}
