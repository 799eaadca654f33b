//! Triangulation of monotone polygons and Euclidean shortest paths inside a
//! triangulated simple polygon via the funnel algorithm.

use std::collections::{HashMap, VecDeque};

use robust::{orient2d, Coord};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Point = (f64, f64);

/// Relative tolerance for point location on triangle boundaries.
pub const INCIDENCE_EPS: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolygonError {
    #[error("polygon is not monotone in the sweep order at vertex {0}")]
    NotMonotone(usize),
    #[error("polygon has fewer than three corners")]
    Degenerate,
    #[error("point {0:?} lies outside the polygon")]
    PointOutside(Point),
}

fn orient(a: Point, b: Point, c: Point) -> f64 {
    orient2d(
        Coord { x: a.0, y: a.1 },
        Coord { x: b.0, y: b.1 },
        Coord { x: c.0, y: c.1 },
    )
}

fn dist(a: Point, b: Point) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}

fn dist2(a: Point, b: Point) -> f64 {
    let (dx, dy) = (a.0 - b.0, a.1 - b.1);
    dx * dx + dy * dy
}

/// Sweep order: by `x + y`, then by `y`. Boundaries of unfolded blocks only
/// step up or right, so both sides are monotone in this order.
fn sweep_key(p: Point) -> (f64, f64) {
    (p.0 + p.1, p.1)
}

fn above(a: Point, b: Point) -> bool {
    let (ka, kb) = (sweep_key(a), sweep_key(b));
    ka.0 > kb.0 || (ka.0 == kb.0 && ka.1 > kb.1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Triangulation {
    /// Corner points in counter-clockwise order.
    pub points: Vec<Point>,
    /// Position of each corner in the loop the triangulation was built from.
    pub source_index: Vec<usize>,
    /// Counter-clockwise triangles indexing `points`.
    pub triangles: Vec<[usize; 3]>,
    /// Neighbours across each side: `dual[t][i]` is across side
    /// `(triangles[t][i], triangles[t][(i + 1) % 3])`.
    pub dual: Vec<[Option<usize>; 3]>,
    pub diagonals: Vec<(usize, usize)>,
}

/// Drops loop vertices lying on the segment between their neighbours.
/// Returns the kept positions.
pub fn corner_indices(loop_points: &[Point]) -> Vec<usize> {
    let n = loop_points.len();
    (0..n)
        .filter(|&i| {
            let (a, b, c) = (loop_points[(i + n - 1) % n], loop_points[i], loop_points[(i + 1) % n]);
            orient(a, b, c) != 0.0
        })
        .collect()
}

/// Triangulates a simple polygon that is monotone with respect to the
/// `(x + y, y)` sweep order. Collinear vertices are removed first; the
/// loop may be given in either orientation.
pub fn triangulate_monotone(loop_points: &[Point]) -> Result<Triangulation, PolygonError> {
    let mut keep = corner_indices(loop_points);
    if keep.len() < 3 {
        return Err(PolygonError::Degenerate);
    }
    let area: f64 = (0..keep.len())
        .map(|i| {
            let (a, b) = (loop_points[keep[i]], loop_points[keep[(i + 1) % keep.len()]]);
            a.0 * b.1 - a.1 * b.0
        })
        .sum();
    if area < 0.0 {
        keep.reverse();
    }
    let points: Vec<Point> = keep.iter().map(|&i| loop_points[i]).collect();
    let n = points.len();

    let top = (0..n).fold(0, |m, i| if above(points[i], points[m]) { i } else { m });
    let bottom = (0..n).fold(0, |m, i| if above(points[m], points[i]) { i } else { m });
    // Counter-clockwise from the top the left chain descends to the bottom.
    let mut left = vec![false; n];
    let mut i = (top + 1) % n;
    while i != bottom {
        left[i] = true;
        i = (i + 1) % n;
    }
    left[top] = true;
    let mut i = (top + 1) % n;
    while i != bottom {
        let next = (i + 1) % n;
        if !above(points[i], points[next]) {
            return Err(PolygonError::NotMonotone(keep[i]));
        }
        i = next;
    }
    let mut i = bottom;
    while i != top {
        let next = (i + 1) % n;
        if !above(points[next], points[i]) {
            return Err(PolygonError::NotMonotone(keep[i]));
        }
        i = next;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let (ka, kb) = (sweep_key(points[a]), sweep_key(points[b]));
        kb.0.total_cmp(&ka.0).then(kb.1.total_cmp(&ka.1))
    });

    let mut triangles: Vec<[usize; 3]> = Vec::with_capacity(n - 2);
    let mut emit = |a: usize, b: usize, c: usize| {
        let t = if orient(points[a], points[b], points[c]) > 0.0 {
            [a, b, c]
        } else {
            [a, c, b]
        };
        triangles.push(t);
    };
    let mut stack = vec![order[0], order[1]];
    for j in 2..n - 1 {
        let u = order[j];
        let top_v = *stack.last().unwrap();
        if left[u] != left[top_v] {
            while stack.len() > 1 {
                let v = stack.pop().unwrap();
                emit(u, v, *stack.last().unwrap());
            }
            stack.pop();
            stack.push(order[j - 1]);
            stack.push(u);
        } else {
            let mut last = stack.pop().unwrap();
            while let Some(&w) = stack.last() {
                let o = orient(points[w], points[last], points[u]);
                let inside = if left[u] { o > 0.0 } else { o < 0.0 };
                if !inside {
                    break;
                }
                emit(u, last, w);
                last = stack.pop().unwrap();
            }
            stack.push(last);
            stack.push(u);
        }
    }
    let u = order[n - 1];
    while stack.len() > 1 {
        let v = stack.pop().unwrap();
        emit(u, v, *stack.last().unwrap());
    }

    let mut sides: HashMap<(usize, usize), Vec<(usize, usize)>> = HashMap::new();
    for (t, tri) in triangles.iter().enumerate() {
        for i in 0..3 {
            let (a, b) = (tri[i], tri[(i + 1) % 3]);
            sides.entry((a.min(b), a.max(b))).or_default().push((t, i));
        }
    }
    let mut dual = vec![[None; 3]; triangles.len()];
    let mut diagonals = Vec::new();
    let mut keys: Vec<_> = sides.keys().copied().collect();
    keys.sort_unstable();
    for key in keys {
        if let [(t1, i1), (t2, i2)] = sides[&key][..] {
            dual[t1][i1] = Some(t2);
            dual[t2][i2] = Some(t1);
            diagonals.push(key);
        }
    }
    Ok(Triangulation {
        points,
        source_index: keep,
        triangles,
        dual,
        diagonals,
    })
}

/// A point of a planar path, with its corner index when it is a polygon
/// corner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathPoint {
    pub at: Point,
    pub corner: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanarPath {
    pub points: Vec<PathPoint>,
    pub length: f64,
}

impl PlanarPath {
    fn from_points(points: Vec<PathPoint>) -> Self {
        let length = points.windows(2).map(|w| dist(w[0].at, w[1].at)).sum();
        Self { points, length }
    }
}

impl Triangulation {
    fn scale(&self) -> f64 {
        self.points
            .iter()
            .fold(0.0f64, |m, p| m.max(p.0.abs()).max(p.1.abs()))
            .max(1.0)
    }

    fn contains(&self, t: usize, p: Point, eps: f64) -> bool {
        let [a, b, c] = self.triangles[t].map(|i| self.points[i]);
        orient(a, b, p) >= -eps && orient(b, c, p) >= -eps && orient(c, a, p) >= -eps
    }

    /// Triangles containing `p`, exactly or within the boundary tolerance.
    fn containing(&self, p: Point) -> Vec<usize> {
        let exact: Vec<usize> = (0..self.triangles.len())
            .filter(|&t| self.contains(t, p, 0.0))
            .collect();
        if !exact.is_empty() {
            return exact;
        }
        let s = self.scale();
        let eps = INCIDENCE_EPS * s * s;
        (0..self.triangles.len())
            .filter(|&t| self.contains(t, p, eps))
            .collect()
    }

    /// Lowest-indexed triangle containing `p`.
    pub fn locate(&self, p: Point) -> Result<usize, PolygonError> {
        self.containing(p)
            .first()
            .copied()
            .ok_or(PolygonError::PointOutside(p))
    }

    fn dual_path(&self, from: usize, to: usize) -> Vec<usize> {
        let mut prev = vec![usize::MAX; self.triangles.len()];
        prev[from] = from;
        let mut queue = VecDeque::from([from]);
        while let Some(t) = queue.pop_front() {
            if t == to {
                break;
            }
            for u in self.dual[t].iter().flatten() {
                if prev[*u] == usize::MAX {
                    prev[*u] = t;
                    queue.push_back(*u);
                }
            }
        }
        let mut path = vec![to];
        let mut t = to;
        while t != from {
            t = prev[t];
            path.push(t);
        }
        path.reverse();
        path
    }

    /// Shortest path from `s` to `t` inside the polygon.
    pub fn funnel_path(&self, s: Point, t: Point) -> Result<PlanarPath, PolygonError> {
        let src = PathPoint { at: s, corner: None };
        let dst = PathPoint { at: t, corner: None };
        if s == t {
            return Ok(PlanarPath::from_points(vec![src]));
        }
        let in_s = self.containing(s);
        let in_t = self.containing(t);
        let (&ts, &tt) = match (in_s.first(), in_t.first()) {
            (Some(a), Some(b)) => (a, b),
            (None, _) => return Err(PolygonError::PointOutside(s)),
            (_, None) => return Err(PolygonError::PointOutside(t)),
        };
        let mut sleeve = self.dual_path(ts, tt);
        // Trim to the last triangle holding s and the first holding t.
        if let Some(i) = sleeve.iter().rposition(|x| in_s.contains(x)) {
            sleeve.drain(..i);
        }
        if let Some(i) = sleeve.iter().position(|x| in_t.contains(x)) {
            sleeve.truncate(i + 1);
        }

        // Portals as (left, right) corner indices seen from s.
        let mut portals = Vec::with_capacity(sleeve.len() + 1);
        for w in sleeve.windows(2) {
            let (a, b) = (w[0], w[1]);
            let side = (0..3).find(|&i| self.dual[a][i] == Some(b)).unwrap();
            let tri = self.triangles[a];
            // Triangles are counter-clockwise, so crossing side (u, w) the
            // corner u is on the right.
            let (u, v) = (tri[side], tri[(side + 1) % 3]);
            portals.push((Some(v), Some(u)));
        }
        portals.push((None, None));

        let pt = |c: Option<usize>| match c {
            Some(i) => PathPoint {
                at: self.points[i],
                corner: Some(i),
            },
            None => dst,
        };

        let mut path = vec![src];
        let mut apex = src;
        let (mut left, mut right) = (src, src);
        let (mut left_i, mut right_i) = (0usize, 0usize);
        let mut i = 0;
        while i < portals.len() {
            let (l, r) = (pt(portals[i].0), pt(portals[i].1));

            if orient(apex.at, right.at, r.at) >= 0.0 {
                if apex.at == right.at || orient(apex.at, left.at, r.at) < 0.0 {
                    right = r;
                    right_i = i;
                } else {
                    let (next, next_i) = if orient(apex.at, left.at, r.at) == 0.0
                        && dist2(apex.at, r.at) < dist2(apex.at, left.at)
                    {
                        (r, i)
                    } else {
                        (left, left_i)
                    };
                    path.push(next);
                    apex = next;
                    left = apex;
                    right = apex;
                    left_i = next_i;
                    right_i = next_i;
                    i = next_i + 1;
                    continue;
                }
            }

            if orient(apex.at, left.at, l.at) <= 0.0 {
                if apex.at == left.at || orient(apex.at, right.at, l.at) > 0.0 {
                    left = l;
                    left_i = i;
                } else {
                    let (next, next_i) = if orient(apex.at, right.at, l.at) == 0.0
                        && dist2(apex.at, l.at) < dist2(apex.at, right.at)
                    {
                        (l, i)
                    } else {
                        (right, right_i)
                    };
                    path.push(next);
                    apex = next;
                    left = apex;
                    right = apex;
                    left_i = next_i;
                    right_i = next_i;
                    i = next_i + 1;
                    continue;
                }
            }
            i += 1;
        }
        if path.last().map(|p| p.at) != Some(t) {
            path.push(dst);
        }
        Ok(PlanarPath::from_points(simplify(path)))
    }
}

/// Removes repeated points and interior points lying on the segment
/// between their neighbours.
fn simplify(points: Vec<PathPoint>) -> Vec<PathPoint> {
    let mut out: Vec<PathPoint> = Vec::with_capacity(points.len());
    for p in points {
        if out.last().map(|q| q.at) == Some(p.at) {
            continue;
        }
        while out.len() >= 2 {
            let (a, b) = (out[out.len() - 2].at, out[out.len() - 1].at);
            let straight = orient(a, b, p.at) == 0.0
                && (b.0 - a.0) * (p.at.0 - b.0) + (b.1 - a.1) * (p.at.1 - b.1) >= 0.0;
            if straight {
                out.pop();
            } else {
                break;
            }
        }
        out.push(p);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fix_l_loop() -> Vec<Point> {
        vec![(0.0, 0.0), (0.0, 2.0), (2.0, 2.0), (2.0, 1.0), (1.0, 1.0), (1.0, 0.0)]
    }

    fn dual_edges(t: &Triangulation) -> usize {
        t.dual.iter().flatten().flatten().count() / 2
    }

    #[test]
    fn unit_square() {
        let sq = vec![(0.0, 0.0), (0.0, 1.0), (1.0, 1.0), (1.0, 0.0)];
        let t = triangulate_monotone(&sq).unwrap();
        assert_eq!(t.triangles.len(), 2);
        assert_eq!(dual_edges(&t), 1);
        let p = t.funnel_path((0.0, 0.0), (1.0, 1.0)).unwrap();
        assert_eq!(p.points.len(), 2);
        assert!((p.length - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn fix_l_hexagon() {
        let t = triangulate_monotone(&fix_l_loop()).unwrap();
        assert_eq!(t.triangles.len(), 4);
        assert_eq!(dual_edges(&t), 3);
        let degrees: Vec<usize> = t.dual.iter().map(|d| d.iter().flatten().count()).collect();
        assert_eq!(degrees.iter().filter(|&&d| d == 1).count(), 2);
        let p = t.funnel_path((0.5, 0.0), (2.0, 1.5)).unwrap();
        let pts: Vec<Point> = p.points.iter().map(|q| q.at).collect();
        assert_eq!(pts, vec![(0.5, 0.0), (1.0, 1.0), (2.0, 1.5)]);
        assert!((p.length - 2.0 * 1.25f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn flats_are_dropped() {
        let mut lp = fix_l_loop();
        lp.insert(1, (0.0, 1.0));
        lp.insert(3, (1.0, 2.0));
        let t = triangulate_monotone(&lp).unwrap();
        assert_eq!(t.points.len(), 6);
        assert_eq!(t.triangles.len(), 4);
    }

    #[test]
    fn thin_rectangle() {
        let r = vec![(0.0, 0.0), (1.0, 0.0), (1.0, 3.0), (0.0, 3.0)];
        let t = triangulate_monotone(&r).unwrap();
        assert_eq!(t.triangles.len(), 2);
    }

    #[test]
    fn identical_endpoints() {
        let t = triangulate_monotone(&fix_l_loop()).unwrap();
        let p = t.funnel_path((0.5, 0.5), (0.5, 0.5)).unwrap();
        assert_eq!(p.points.len(), 1);
        assert_eq!(p.length, 0.0);
    }

    #[test]
    fn outside_point() {
        let t = triangulate_monotone(&fix_l_loop()).unwrap();
        assert_eq!(
            t.funnel_path((1.5, 0.5), (0.0, 0.0)),
            Err(PolygonError::PointOutside((1.5, 0.5)))
        );
    }

    #[test]
    fn path_through_collinear_corners() {
        // A staircase whose reflex corners (1,1) and (2,2) line up with s and t.
        let lp = vec![
            (0.0, 0.0),
            (0.0, 1.0),
            (1.0, 1.0),
            (1.0, 2.0),
            (2.0, 2.0),
            (2.0, 3.0),
            (3.0, 3.0),
            (3.0, 0.0),
        ];
        let t = triangulate_monotone(&lp).unwrap();
        let p = t.funnel_path((0.0, 0.0), (3.0, 3.0)).unwrap();
        assert_eq!(p.points.len(), 2);
        assert!((p.length - 18f64.sqrt()).abs() < 1e-12);
    }
}
