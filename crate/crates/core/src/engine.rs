//! Two-point geodesic queries: gates, boundary walk, unfolding, and a
//! funnel pass per block, mapped back to complex vertices.

use std::collections::{BTreeSet, HashMap};

use robust::{orient2d, Coord};
use serde::{Deserialize, Serialize};

use crate::boundary::{boundary_walk, select_gates, IntervalBoundary, WalkStats};
use crate::complex::{Cell, PointSpec, RectComplex, VertexId};
use crate::error::{Error, Result};
use crate::polygon::{triangulate_monotone, PlanarPath, Triangulation};
use crate::structures::{QueryStructure, StructureKind};
use crate::theta::{compute_theta, ThetaDecomposition};
use crate::unfold::{layout_interval, locate_in_unfolding, unfold, EndpointRole, Point, UnfoldedChain};

/// Tolerance for matching planar points against face rectangles.
const FACE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Breakpoint {
    Point(PointSpec),
    Vertex(VertexId),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockTrace {
    pub start: VertexId,
    pub end: VertexId,
    pub length: f64,
    /// Flat boundary vertices the path runs straight through.
    pub flat_touches: Vec<VertexId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeodesicPath {
    pub breakpoints: Vec<Breakpoint>,
    pub length: f64,
    pub gates: (VertexId, VertexId),
    pub blocks: Vec<BlockTrace>,
    pub stats: WalkStats,
    /// Planar image of each breakpoint.
    pub planar: Vec<Point>,
    /// Block of each planar segment.
    pub segment_blocks: Vec<usize>,
}

impl GeodesicPath {
    pub fn interior_vertices(&self) -> Vec<VertexId> {
        self.breakpoints
            .iter()
            .filter_map(|b| match b {
                Breakpoint::Vertex(v) => Some(*v),
                Breakpoint::Point(_) => None,
            })
            .collect()
    }
}

/// Intermediate products of one query.
#[derive(Debug, Clone)]
pub struct QueryTrace {
    pub boundary: IntervalBoundary,
    pub chain: UnfoldedChain,
    pub triangulations: Vec<Option<Triangulation>>,
}

/// A validated complex with its class decomposition and query structure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryIndex {
    pub complex: RectComplex,
    pub theta: ThetaDecomposition,
    pub structure: QueryStructure,
}

fn orient(a: Point, b: Point, c: Point) -> f64 {
    orient2d(
        Coord { x: a.0, y: a.1 },
        Coord { x: b.0, y: b.1 },
        Coord { x: c.0, y: c.1 },
    )
}

fn on_segment(a: Point, b: Point, p: Point) -> bool {
    let scale = a.0.abs().max(a.1.abs()).max(b.0.abs()).max(b.1.abs()).max(1.0);
    let tol = 1e-12 * scale * scale;
    orient(a, b, p).abs() <= tol
        && p.0 >= a.0.min(b.0) - FACE_TOL
        && p.0 <= a.0.max(b.0) + FACE_TOL
        && p.1 >= a.1.min(b.1) - FACE_TOL
        && p.1 <= a.1.max(b.1) + FACE_TOL
}

fn seg_len(a: Point, b: Point) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}

/// Rectangle of a face in the plane: a corner and its two side vectors.
struct PlanarFace {
    face: usize,
    origin: Point,
    ex: Point,
    ey: Point,
    w: f64,
    h: f64,
}

impl PlanarFace {
    fn local(&self, p: Point) -> (f64, f64) {
        let d = (p.0 - self.origin.0, p.1 - self.origin.1);
        (
            (d.0 * self.ex.0 + d.1 * self.ex.1) / self.w,
            (d.0 * self.ey.0 + d.1 * self.ey.1) / self.h,
        )
    }

    /// Length of the part of segment `a b` inside the rectangle.
    fn clipped_length(&self, a: Point, b: Point) -> f64 {
        let (la, lb) = (self.local(a), self.local(b));
        let (mut t0, mut t1) = (0.0f64, 1.0f64);
        for (p, d, lo, hi) in [
            (la.0, lb.0 - la.0, 0.0, self.w),
            (la.1, lb.1 - la.1, 0.0, self.h),
        ] {
            if d == 0.0 {
                if p < lo - FACE_TOL || p > hi + FACE_TOL {
                    return 0.0;
                }
                continue;
            }
            let (s0, s1) = ((lo - p) / d, (hi - p) / d);
            t0 = t0.max(s0.min(s1));
            t1 = t1.min(s0.max(s1));
        }
        if t1 <= t0 {
            0.0
        } else {
            (t1 - t0) * seg_len(a, b)
        }
    }
}

impl QueryIndex {
    /// Builds the index; `kind = None` picks the tree product when the
    /// complex is ramified.
    pub fn new(complex: RectComplex, kind: Option<StructureKind>) -> Result<Self> {
        let theta = compute_theta(&complex)?;
        let structure = match kind {
            Some(kind) => QueryStructure::build(&complex, &theta, kind)?,
            None => QueryStructure::build_auto(&complex, &theta)?,
        };
        Ok(Self {
            complex,
            theta,
            structure,
        })
    }

    pub fn with_structure(complex: RectComplex, structure: QueryStructure) -> Result<Self> {
        if structure.vertex_count() != complex.vertex_count() {
            return Err(Error::Invalid(format!(
                "structure has {} vertices, complex has {}",
                structure.vertex_count(),
                complex.vertex_count()
            )));
        }
        let theta = compute_theta(&complex)?;
        Ok(Self {
            complex,
            theta,
            structure,
        })
    }

    pub fn query(&self, x: &PointSpec, y: &PointSpec) -> Result<GeodesicPath> {
        self.query_traced(x, y).map(|(path, _)| path)
    }

    pub fn distance(&self, x: &PointSpec, y: &PointSpec) -> Result<f64> {
        self.query(x, y).map(|p| p.length)
    }

    pub fn gates(&self, x: &PointSpec, y: &PointSpec) -> Result<(VertexId, VertexId)> {
        let k = &self.complex;
        let rx = k.cell_vertices(k.minimal_cell(x)?.0);
        let ry = k.cell_vertices(k.minimal_cell(y)?.0);
        Ok(select_gates(&self.structure, &rx, &ry))
    }

    pub fn query_traced(&self, x: &PointSpec, y: &PointSpec) -> Result<(GeodesicPath, QueryTrace)> {
        let k = &self.complex;
        let (p, q) = self.gates(x, y)?;
        let boundary = boundary_walk(&self.structure, p, q)?;
        let chain = unfold(&boundary, k, &self.theta)?;
        let (fx, bx) = locate_in_unfolding(&chain, k, x, EndpointRole::Source)?;
        let (fy, by) = locate_in_unfolding(&chain, k, y, EndpointRole::Target)?;

        let mut breakpoints = vec![Breakpoint::Point(*x)];
        let mut planar = vec![fx];
        let mut segment_blocks = Vec::new();
        let mut blocks = Vec::new();
        let mut triangulations = vec![None; chain.blocks.len()];
        let mut length = 0.0;

        if !chain.blocks.is_empty() {
            for (b, blk) in chain.blocks.iter().enumerate().take(by + 1).skip(bx) {
                let entry = if b == bx { fx } else { chain.image(blk.start)? };
                let exit = if b == by { fy } else { chain.image(blk.end)? };
                let (pts, corners): (Vec<Point>, Vec<Option<usize>>) = if blk.bridge || entry == exit {
                    (vec![entry, exit], vec![None, None])
                } else {
                    let tri = triangulate_monotone(&blk.loop_points)?;
                    let PlanarPath { points, .. } = tri.funnel_path(entry, exit)?;
                    let corners = points
                        .iter()
                        .map(|pp| pp.corner.map(|c| tri.source_index[c]))
                        .collect();
                    let pts = points.iter().map(|pp| pp.at).collect();
                    triangulations[b] = Some(tri);
                    (pts, corners)
                };
                let mut sub = 0.0;
                for i in 1..pts.len() {
                    sub += seg_len(pts[i - 1], pts[i]);
                    segment_blocks.push(b);
                    planar.push(pts[i]);
                    let bp = if i + 1 < pts.len() {
                        let c = corners[i].expect("interior funnel points are corners");
                        Breakpoint::Vertex(blk.loop_vertices[c])
                    } else if b < by {
                        Breakpoint::Vertex(blk.end)
                    } else {
                        Breakpoint::Point(*y)
                    };
                    breakpoints.push(bp);
                }
                if pts.len() == 1 {
                    segment_blocks.push(b);
                    planar.push(exit);
                    breakpoints.push(if b < by {
                        Breakpoint::Vertex(blk.end)
                    } else {
                        Breakpoint::Point(*y)
                    });
                }
                let flat_touches = blk
                    .flat
                    .iter()
                    .enumerate()
                    .filter(|(_, &f)| f)
                    .map(|(i, _)| i)
                    .filter(|&i| {
                        let z = blk.loop_points[i];
                        pts.windows(2).any(|w| on_segment(w[0], w[1], z))
                    })
                    .map(|i| blk.loop_vertices[i])
                    .collect();
                length += sub;
                blocks.push(BlockTrace {
                    start: blk.start,
                    end: blk.end,
                    length: sub,
                    flat_touches,
                });
            }
        } else {
            segment_blocks.push(0);
            planar.push(fy);
            breakpoints.push(Breakpoint::Point(*y));
        }

        let path = GeodesicPath {
            breakpoints,
            length,
            gates: (p, q),
            blocks,
            stats: boundary.stats.clone(),
            planar,
            segment_blocks,
        };
        let trace = QueryTrace {
            boundary,
            chain,
            triangulations,
        };
        Ok((path, trace))
    }

    /// Rectangles of the interval faces drawn in each block.
    fn planar_faces(&self, trace: &QueryTrace) -> Result<Vec<Vec<PlanarFace>>> {
        let k = &self.complex;
        let pos = layout_interval(k, &self.theta, &self.structure, &trace.boundary, &trace.chain)?;
        let boxes: Vec<(Point, Point)> = trace
            .chain
            .blocks
            .iter()
            .map(|blk| {
                blk.loop_points.iter().fold(
                    ((f64::INFINITY, f64::INFINITY), (f64::NEG_INFINITY, f64::NEG_INFINITY)),
                    |(lo, hi), p| ((lo.0.min(p.0), lo.1.min(p.1)), (hi.0.max(p.0), hi.1.max(p.1))),
                )
            })
            .collect();
        let mut out: Vec<Vec<PlanarFace>> = (0..boxes.len()).map(|_| Vec::new()).collect();
        let faces: BTreeSet<usize> = pos.keys().flat_map(|&v| k.vertex_faces(v).iter().copied()).collect();
        for f in faces {
            let c = k.face(f);
            let Some(img) = c.iter().map(|v| pos.get(v).copied()).collect::<Option<Vec<Point>>>() else {
                continue;
            };
            let (w, h) = k.face_size(f);
            let ex = (img[1].0 - img[0].0, img[1].1 - img[0].1);
            let ey = (img[3].0 - img[0].0, img[3].1 - img[0].1);
            let pf = PlanarFace {
                face: f,
                origin: img[0],
                ex,
                ey,
                w,
                h,
            };
            let inside = |(lo, hi): (Point, Point)| {
                img.iter().all(|p| {
                    p.0 >= lo.0 - FACE_TOL && p.0 <= hi.0 + FACE_TOL && p.1 >= lo.1 - FACE_TOL && p.1 <= hi.1 + FACE_TOL
                })
            };
            if let Some(b) = boxes.iter().position(|&bx| inside(bx)) {
                out[b].push(pf);
            }
        }
        Ok(out)
    }

    /// Point at fraction `frac` of the arc length of the geodesic from `x`
    /// to `y`.
    pub fn point_along(&self, x: &PointSpec, y: &PointSpec, frac: f64) -> Result<PointSpec> {
        let (path, trace) = self.query_traced(x, y)?;
        if path.length == 0.0 || frac <= 0.0 {
            return Ok(*x);
        }
        if frac >= 1.0 {
            return Ok(*y);
        }
        let target = frac * path.length;
        let mut acc = 0.0;
        let mut found = None;
        for i in 0..path.segment_blocks.len() {
            let (a, b) = (path.planar[i], path.planar[i + 1]);
            let l = seg_len(a, b);
            if l > 0.0 && (acc + l >= target || i + 1 == path.segment_blocks.len()) {
                let s = ((target - acc) / l).clamp(0.0, 1.0);
                found = Some((path.segment_blocks[i], (a.0 + (b.0 - a.0) * s, a.1 + (b.1 - a.1) * s)));
                break;
            }
            acc += l;
        }
        let (block, pt) = found.expect("positive length has a segment");
        let blk = &trace.chain.blocks[block];
        let k = &self.complex;
        if blk.bridge {
            let e = k
                .edge_between(blk.start, blk.end)
                .ok_or(Error::Invalid(format!("bridge {}-{} has no edge", blk.start, blk.end)))?;
            let f = *k
                .edge_faces(e)
                .iter()
                .min()
                .ok_or_else(|| Error::Invalid(format!("edge {e} lies in no face")))?;
            let a = trace.chain.image(k.edge(e).u)?;
            let t = seg_len(a, pt).min(k.edge(e).length);
            let (alpha, beta) = k.edge_point_in_face(f, e, t);
            return Ok(PointSpec::new(f, alpha, beta));
        }
        let faces = self.planar_faces(&trace)?;
        let mut best: Option<(f64, PointSpec)> = None;
        for pf in &faces[block] {
            let (a, b) = pf.local(pt);
            let slack = (-a).max(a - pf.w).max(-b).max(b - pf.h).max(0.0);
            if best.as_ref().is_none_or(|(s, _)| slack < *s) {
                let spec = PointSpec::new(pf.face, a.clamp(0.0, pf.w), b.clamp(0.0, pf.h));
                best = Some((slack, spec));
            }
        }
        match best {
            Some((slack, spec)) if slack <= FACE_TOL * pf_scale(path.length) => Ok(k.canonical_point(&spec)?),
            _ => Err(Error::Invalid(format!("point {pt:?} of block {block} not found in any face"))),
        }
    }

    /// Number of cells the geodesic from `x` to `y` passes through with
    /// positive length, counting bridge edges as cells.
    pub fn cells_crossed(&self, x: &PointSpec, y: &PointSpec) -> Result<usize> {
        let (path, trace) = self.query_traced(x, y)?;
        if path.length == 0.0 {
            return Ok(1);
        }
        let faces = self.planar_faces(&trace)?;
        let mut cells = BTreeSet::new();
        let mut bridges = 0;
        for (i, &b) in path.segment_blocks.iter().enumerate() {
            let (p0, p1) = (path.planar[i], path.planar[i + 1]);
            if trace.chain.blocks[b].bridge {
                bridges += 1;
                continue;
            }
            for pf in &faces[b] {
                if pf.clipped_length(p0, p1) > FACE_TOL {
                    cells.insert(pf.face);
                }
            }
        }
        Ok((cells.len() + bridges).max(1))
    }

    /// Vertex images of the interval layout, for drawing.
    pub fn interval_layout(&self, trace: &QueryTrace) -> Result<HashMap<VertexId, Point>> {
        Ok(layout_interval(
            &self.complex,
            &self.theta,
            &self.structure,
            &trace.boundary,
            &trace.chain,
        )?)
    }

    /// The minimal cell of a query point.
    pub fn cell(&self, x: &PointSpec) -> Result<Cell> {
        Ok(self.complex.minimal_cell(x)?.0)
    }
}

fn pf_scale(length: f64) -> f64 {
    length.max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn index(k: RectComplex) -> QueryIndex {
        QueryIndex::new(k, Some(StructureKind::Dense)).unwrap()
    }

    #[test]
    fn same_face_is_a_segment() {
        let q = index(fixtures::single_square());
        let p = q.query(&PointSpec::new(0, 0.2, 0.1), &PointSpec::new(0, 0.8, 0.9)).unwrap();
        assert!((p.length - (0.36f64 + 0.64).sqrt()).abs() < 1e-12);
        assert_eq!(p.breakpoints.len(), 2);
    }

    #[test]
    fn fix_l_bends_at_reflex_corner() {
        let q = index(fixtures::fix_l());
        let x = PointSpec::new(1, 1.0, 0.5);
        let y = PointSpec::new(2, 0.5, 1.0);
        let p = q.query(&x, &y).unwrap();
        assert!((p.length - 2.0 * 1.25f64.sqrt()).abs() < 1e-12);
        assert_eq!(p.interior_vertices(), vec![4]);
    }

    #[test]
    fn fix_book_crosses_spine() {
        let q = index(fixtures::fix_book());
        let p = q.query(&PointSpec::new(0, 0.5, 0.5), &PointSpec::new(1, 0.5, 0.5)).unwrap();
        assert!((p.length - 1.0).abs() < 1e-12);
        assert!(p.interior_vertices().is_empty());
    }

    #[test]
    fn fix_stair_through_pinch() {
        let q = index(fixtures::fix_stair());
        let p = q.query(&PointSpec::new(0, 0.5, 0.5), &PointSpec::new(1, 0.5, 0.5)).unwrap();
        assert!((p.length - 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(p.interior_vertices(), vec![3]);
    }

    #[test]
    fn equal_points() {
        let q = index(fixtures::fix_l());
        let x = PointSpec::new(0, 0.3, 0.7);
        assert_eq!(q.distance(&x, &x).unwrap(), 0.0);
        let v = PointSpec::new(0, 0.0, 0.0);
        assert_eq!(q.distance(&v, &v).unwrap(), 0.0);
    }

    #[test]
    fn midpoint_of_fix_l_path() {
        let q = index(fixtures::fix_l());
        let x = PointSpec::new(1, 1.0, 0.5);
        let y = PointSpec::new(2, 0.5, 1.0);
        let m = q.point_along(&x, &y, 0.5).unwrap();
        assert!((q.distance(&x, &m).unwrap() - 1.25f64.sqrt()).abs() < 1e-9);
        assert!(q.distance(&m, &PointSpec::new(0, 1.0, 1.0)).unwrap() < 1e-9);
        assert_eq!(q.cells_crossed(&x, &y).unwrap(), 2);
    }
}
