//! Planar unfolding of an interval boundary as a chain of monotone
//! rectilinear polygons.
//!
//! Each block is drawn in a canonical orientation: the side whose first
//! vertex after the starting joint has the smaller id runs up (+y), the
//! other side runs right (+x). Every boundary step then points up or right,
//! and consecutive blocks meet at the images of their shared joint.

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::boundary::IntervalBoundary;
use crate::complex::{Cell, PointSpec, RectComplex, VertexId};
use crate::structures::QueryStructure;
use crate::theta::ThetaDecomposition;

pub type Point = (f64, f64);

/// Absolute tolerance on loop closure and frame consistency.
pub const CLOSURE_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum UnfoldError {
    #[error("block {block} does not close: sides end at {up:?} and {right:?}")]
    UnfoldMismatch { block: usize, up: Point, right: Point },
    #[error("boundary vertex {vertex} has deg0 {deg0} inside a block")]
    BadDegree { vertex: VertexId, deg0: u8 },
    #[error("boundary turns backwards at vertex {vertex}")]
    NotMonotone { vertex: VertexId },
    #[error("boundary vertices {0} and {1} are not adjacent")]
    NotAdjacent(VertexId, VertexId),
    #[error("face {face} is not drawn in the unfolding")]
    FaceNotInInterval { face: usize },
    #[error("vertex {vertex} is not drawn in the unfolding")]
    VertexNotInInterval { vertex: VertexId },
    #[error(transparent)]
    Complex(#[from] crate::complex::ComplexError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub start: VertexId,
    pub end: VertexId,
    /// Side drawn upwards from `start`, including both joints.
    pub up_side: Vec<VertexId>,
    /// Side drawn rightwards from `start`, including both joints.
    pub right_side: Vec<VertexId>,
    /// Clockwise loop: the up side, then the right side reversed without
    /// its joints. A bridge block holds just its two endpoints.
    pub loop_points: Vec<Point>,
    pub loop_vertices: Vec<VertexId>,
    /// Whether each loop entry is a flat (`deg0 = 3`) vertex.
    pub flat: Vec<bool>,
    pub bridge: bool,
}

impl Block {
    pub fn contains(&self, v: VertexId) -> bool {
        self.loop_vertices.contains(&v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnfoldedChain {
    pub blocks: Vec<Block>,
    /// Images of the interior articulation vertices, in order.
    pub joints: Vec<Point>,
    pub vertex_image: BTreeMap<VertexId, Point>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EndpointRole {
    Source,
    Target,
}

fn add(a: Point, b: Point) -> Point {
    (a.0 + b.0, a.1 + b.1)
}

fn sub(a: Point, b: Point) -> Point {
    (a.0 - b.0, a.1 - b.1)
}

fn scale(a: Point, s: f64) -> Point {
    (a.0 * s, a.1 * s)
}

fn close(a: Point, b: Point) -> bool {
    (a.0 - b.0).abs() <= CLOSURE_TOL && (a.1 - b.1).abs() <= CLOSURE_TOL
}

fn edge_length(k: &RectComplex, t: &ThetaDecomposition, a: VertexId, b: VertexId) -> Result<f64, UnfoldError> {
    let e = k.edge_between(a, b).ok_or(UnfoldError::NotAdjacent(a, b))?;
    Ok(t.class_length[t.class_of[e]])
}

/// Draws one side of a block. `interior_right` tells on which side of the
/// direction of travel the polygon lies.
fn trace_side(
    k: &RectComplex,
    t: &ThetaDecomposition,
    b: &IntervalBoundary,
    side: &[VertexId],
    origin: Point,
    first_dir: Point,
    interior_right: bool,
) -> Result<Vec<Point>, UnfoldError> {
    let mut pts = Vec::with_capacity(side.len());
    pts.push(origin);
    let mut pos = origin;
    let mut dir = first_dir;
    for i in 1..side.len() {
        pos = add(pos, scale(dir, edge_length(k, t, side[i - 1], side[i])?));
        pts.push(pos);
        if i + 1 < side.len() {
            let z = side[i];
            let d0 = b.deg0[&z];
            let cw = (dir.1, -dir.0);
            let ccw = (-dir.1, dir.0);
            dir = match (d0, interior_right) {
                (3, _) => dir,
                (2, true) | (4, false) => cw,
                (2, false) | (4, true) => ccw,
                _ => return Err(UnfoldError::BadDegree { vertex: z, deg0: d0 }),
            };
            if dir != (1.0, 0.0) && dir != (0.0, 1.0) {
                return Err(UnfoldError::NotMonotone { vertex: z });
            }
        }
    }
    Ok(pts)
}

pub fn unfold(
    b: &IntervalBoundary,
    k: &RectComplex,
    t: &ThetaDecomposition,
) -> Result<UnfoldedChain, UnfoldError> {
    let mut blocks = Vec::new();
    let mut vertex_image = BTreeMap::new();
    let mut origin = (0.0, 0.0);
    vertex_image.insert(b.p, origin);
    for (index, (i, j)) in b.block_ranges().into_iter().enumerate() {
        let a = &b.pi1[i..=j];
        let c = &b.pi2[i..=j];
        let block = if a == c {
            // A bridge: a single edge shared by both sides.
            let end = add(origin, (edge_length(k, t, a[0], a[1])?, 0.0));
            Block {
                start: a[0],
                end: a[1],
                up_side: a.to_vec(),
                right_side: a.to_vec(),
                loop_points: vec![origin, end],
                loop_vertices: a.to_vec(),
                flat: vec![false, false],
                bridge: true,
            }
        } else {
            let (up, right) = if a[1] < c[1] { (a, c) } else { (c, a) };
            let up_pts = trace_side(k, t, b, up, origin, (0.0, 1.0), true)?;
            let right_pts = trace_side(k, t, b, right, origin, (1.0, 0.0), false)?;
            let (ue, re) = (*up_pts.last().unwrap(), *right_pts.last().unwrap());
            if !close(ue, re) {
                return Err(UnfoldError::UnfoldMismatch {
                    block: index,
                    up: ue,
                    right: re,
                });
            }
            let mut loop_points = up_pts.clone();
            let mut loop_vertices = up.to_vec();
            for m in (1..right.len() - 1).rev() {
                loop_points.push(right_pts[m]);
                loop_vertices.push(right[m]);
            }
            let n = loop_vertices.len();
            let flat = (0..n)
                .map(|m| m != 0 && m != up.len() - 1 && b.deg0[&loop_vertices[m]] == 3)
                .collect();
            Block {
                start: up[0],
                end: *up.last().unwrap(),
                up_side: up.to_vec(),
                right_side: right.to_vec(),
                loop_points,
                loop_vertices,
                flat,
                bridge: false,
            }
        };
        for (&v, &pt) in block.loop_vertices.iter().zip(&block.loop_points) {
            vertex_image.insert(v, pt);
        }
        // The far joint takes the image reached along the up side.
        origin = block.loop_points[block.up_side.len() - 1];
        blocks.push(block);
    }
    let joints = blocks
        .iter()
        .take(blocks.len().saturating_sub(1))
        .map(|blk| vertex_image[&blk.end])
        .collect();
    Ok(UnfoldedChain {
        blocks,
        joints,
        vertex_image,
    })
}

impl UnfoldedChain {
    pub fn image(&self, v: VertexId) -> Result<Point, UnfoldError> {
        self.vertex_image
            .get(&v)
            .copied()
            .ok_or(UnfoldError::VertexNotInInterval { vertex: v })
    }

    /// Block for an endpoint: the first block holding all of `vs` for the
    /// source, the last for the target.
    fn block_for(&self, vs: &[VertexId], role: EndpointRole) -> Option<usize> {
        let holds = |b: &Block| vs.iter().all(|&v| b.contains(v));
        match role {
            EndpointRole::Source => self.blocks.iter().position(holds),
            EndpointRole::Target => self.blocks.iter().rposition(holds),
        }
    }
}

/// Planar image of a point of the query cell. Faces are located from the
/// images of at least three of their corners; the fourth is completed as a
/// parallelogram.
pub fn locate_in_unfolding(
    chain: &UnfoldedChain,
    k: &RectComplex,
    pt: &PointSpec,
    role: EndpointRole,
) -> Result<(Point, usize), UnfoldError> {
    let (cell, along) = k.minimal_cell(pt)?;
    match cell {
        Cell::Vertex(v) => {
            let img = chain.image(v)?;
            let block = if chain.blocks.is_empty() {
                0
            } else {
                chain
                    .block_for(&[v], role)
                    .ok_or(UnfoldError::VertexNotInInterval { vertex: v })?
            };
            Ok((img, block))
        }
        Cell::Edge(e) => {
            let edge = *k.edge(e);
            let (a, b) = (chain.image(edge.u)?, chain.image(edge.v)?);
            let block = chain
                .block_for(&[edge.u, edge.v], role)
                .ok_or(UnfoldError::VertexNotInInterval { vertex: edge.v })?;
            Ok((add(a, scale(sub(b, a), along / edge.length)), block))
        }
        Cell::Face(f) => {
            let corners = k.face(f);
            let imgs: Vec<Option<Point>> = corners
                .iter()
                .map(|v| chain.vertex_image.get(v).copied())
                .collect();
            let missing: Vec<usize> = (0..4).filter(|&i| imgs[i].is_none()).collect();
            if missing.len() > 1 {
                return Err(UnfoldError::FaceNotInInterval { face: f });
            }
            let known: Vec<VertexId> = (0..4)
                .filter(|i| !missing.contains(i))
                .map(|i| corners[i])
                .collect();
            let block = chain
                .block_for(&known, role)
                .ok_or(UnfoldError::FaceNotInInterval { face: f })?;
            let mut c = [(0.0, 0.0); 4];
            for i in 0..4 {
                if let Some(p) = imgs[i] {
                    c[i] = p;
                }
            }
            if let Some(&m) = missing.first() {
                c[m] = sub(add(c[(m + 1) % 4], c[(m + 3) % 4]), c[(m + 2) % 4]);
            }
            let (w, h) = k.face_size(f);
            let ex = sub(c[1], c[0]);
            let ey = sub(c[3], c[0]);
            let ok = close(add(c[0], add(ex, ey)), c[2])
                && ((ex.0.hypot(ex.1)) - w).abs() <= CLOSURE_TOL
                && ((ey.0.hypot(ey.1)) - h).abs() <= CLOSURE_TOL;
            if !ok {
                return Err(UnfoldError::FaceNotInInterval { face: f });
            }
            Ok((
                add(c[0], add(scale(ex, pt.alpha / w), scale(ey, pt.beta / h))),
                block,
            ))
        }
    }
}

/// Vertices of `I(p, q)` in ascending order.
pub fn interval_vertices(s: &QueryStructure, p: VertexId, q: VertexId) -> Vec<VertexId> {
    let d = s.dist(p, q);
    (0..s.vertex_count())
        .filter(|&z| s.dist(p, z) + s.dist(z, q) == d)
        .collect()
}

/// Planar positions of all vertices of the interval, extending the boundary
/// unfolding through the class directions read off the boundary.
pub fn layout_interval(
    k: &RectComplex,
    t: &ThetaDecomposition,
    s: &QueryStructure,
    b: &IntervalBoundary,
    chain: &UnfoldedChain,
) -> Result<HashMap<VertexId, Point>, UnfoldError> {
    let mut dir: HashMap<usize, Point> = HashMap::new();
    for side in [&b.pi1, &b.pi2] {
        for w in side.windows(2) {
            let e = k.edge_between(w[0], w[1]).ok_or(UnfoldError::NotAdjacent(w[0], w[1]))?;
            let class = t.class_of[e];
            let step = sub(chain.image(w[1])?, chain.image(w[0])?);
            dir.entry(class).or_insert(step);
        }
    }
    let members = interval_vertices(s, b.p, b.q);
    let inside: std::collections::HashSet<VertexId> = members.iter().copied().collect();
    let mut pos = HashMap::with_capacity(members.len());
    pos.insert(b.p, chain.image(b.p)?);
    let mut queue = VecDeque::from([b.p]);
    while let Some(v) = queue.pop_front() {
        let dv = s.dist(b.p, v);
        for &(w, e) in k.neighbors(v) {
            if inside.contains(&w) && s.dist(b.p, w) == dv + 1 && !pos.contains_key(&w) {
                let step = dir
                    .get(&t.class_of[e])
                    .copied()
                    .ok_or(UnfoldError::VertexNotInInterval { vertex: w })?;
                pos.insert(w, add(pos[&v], step));
                queue.push_back(w);
            }
        }
    }
    Ok(pos)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::boundary_walk;
    use crate::fixtures;
    use crate::structures::StructureKind;
    use crate::theta::compute_theta;

    fn chain_for(k: &RectComplex, p: VertexId, q: VertexId) -> (IntervalBoundary, UnfoldedChain) {
        let t = compute_theta(k).unwrap();
        let s = QueryStructure::build(k, &t, StructureKind::Dense).unwrap();
        let b = boundary_walk(&s, p, q).unwrap();
        let c = unfold(&b, k, &t).unwrap();
        (b, c)
    }

    #[test]
    fn unit_square_loop() {
        let k = fixtures::single_square();
        let (_, c) = chain_for(&k, 0, 2);
        assert_eq!(c.blocks.len(), 1);
        assert_eq!(
            c.blocks[0].loop_points,
            vec![(0.0, 0.0), (0.0, 1.0), (1.0, 1.0), (1.0, 0.0)]
        );
        assert!(c.joints.is_empty());
        let (pt, block) =
            locate_in_unfolding(&c, &k, &PointSpec::new(0, 0.5, 0.5), EndpointRole::Source).unwrap();
        assert_eq!((pt, block), ((0.5, 0.5), 0));
    }

    #[test]
    fn fix_l_is_an_l() {
        let k = fixtures::fix_l();
        let (_, c) = chain_for(&k, 2, 6);
        let blk = &c.blocks[0];
        let corners: Vec<Point> = blk
            .loop_points
            .iter()
            .zip(&blk.flat)
            .filter(|(_, &f)| !f)
            .map(|(&p, _)| p)
            .collect();
        // The L with reflex corner at (1, 1), in the frame (x, y) -> (y, 2 - x).
        assert_eq!(
            corners,
            vec![(0.0, 0.0), (0.0, 2.0), (2.0, 2.0), (2.0, 1.0), (1.0, 1.0), (1.0, 0.0)]
        );
        assert_eq!(c.vertex_image[&4], (1.0, 1.0));
        assert_eq!(blk.flat.iter().filter(|&&f| f).count(), 2);
        // (alpha, beta) = (1, 0.5) in the face listed from (1,0) is (2, 0.5).
        let (pt, _) =
            locate_in_unfolding(&c, &k, &PointSpec::new(1, 1.0, 0.5), EndpointRole::Source).unwrap();
        assert_eq!(pt, (0.5, 0.0));
        assert_eq!(locate_in_unfolding(&c, &k, &PointSpec::new(1, 1.0, 0.0), EndpointRole::Source).unwrap().0, (0.0, 0.0));
    }

    #[test]
    fn fix_stair_two_blocks() {
        let k = fixtures::fix_stair();
        let (_, c) = chain_for(&k, 0, 6);
        assert_eq!(c.blocks.len(), 2);
        assert_eq!(c.joints, vec![(1.0, 1.0)]);
        assert_eq!(c.blocks[1].loop_points[0], (1.0, 1.0));
        for blk in &c.blocks {
            assert_eq!(blk.loop_points.len(), 4);
        }
    }

    #[test]
    fn bridge_block() {
        use crate::complex::{RawComplex, RawEdge};
        // A square with a pendant edge of length 2.5 at vertex 2.
        let raw = RawComplex {
            vertices: 5,
            edges: vec![
                RawEdge::Unit(0, 1),
                RawEdge::Unit(1, 2),
                RawEdge::Unit(2, 3),
                RawEdge::Unit(0, 3),
                RawEdge::Weighted(2, 4, 2.5),
            ],
            faces: vec![[0, 1, 2, 3]],
        };
        let k = RectComplex::build(&raw).unwrap();
        let (b, c) = chain_for(&k, 0, 4);
        assert_eq!(b.articulation, vec![0, 2, 4]);
        assert!(c.blocks[1].bridge);
        assert_eq!(c.vertex_image[&4], (3.5, 1.0));
    }

    #[test]
    fn layout_covers_interval() {
        let k = fixtures::fix_book();
        let t = compute_theta(&k).unwrap();
        let s = QueryStructure::build(&k, &t, StructureKind::Dense).unwrap();
        let b = boundary_walk(&s, 2, 5).unwrap();
        let c = unfold(&b, &k, &t).unwrap();
        let pos = layout_interval(&k, &t, &s, &b, &c).unwrap();
        assert_eq!(pos.len(), 6);
        for (v, p) in &c.vertex_image {
            assert_eq!(pos[v], *p);
        }
    }
}
