//! Deterministic instance generators.
//!
//! Randomness comes from ChaCha8 seeded with the 64-bit seed; retry `i` of a
//! generation runs on stream `i` of the same seed. Growth only glues squares
//! along an edge or along a two-edge corner whose link distance keeps every
//! link triangle-free, so each step preserves the CAT(0) property.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{validate_cat0, RawComplex, RawEdge, RectComplex, ValidationConfig};
use crate::theta::compute_theta;

const MAX_ATTEMPTS: u64 = 64;
const CORNER_TRIES: usize = 48;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Squaregraph,
    Ramified,
    Book,
    Staircase,
    GridL,
}

impl std::str::FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "squaregraph" => Family::Squaregraph,
            "ramified" => Family::Ramified,
            "book" => Family::Book,
            "staircase" => Family::Staircase,
            "grid-l" | "grid-L" => Family::GridL,
            other => return Err(format!("unknown family {other:?}")),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum Lengths {
    Unit,
    /// Per-class lengths `a + (b - a) * k / 64` with `k` uniform in `0..=64`.
    Uniform { a: f64, b: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub family: Family,
    pub n: usize,
    pub seed: u64,
    pub lengths: Lengths,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenerateError {
    #[error("generation of {family:?} with n = {n} failed after {attempts} attempts (seed {seed})")]
    GenerationFailed {
        family: Family,
        n: usize,
        seed: u64,
        attempts: u64,
    },
    #[error("size parameter must be at least {min}, got {n}")]
    TooSmall { n: usize, min: usize },
    /// No CAT(0) square complex has 5 or 7 vertices.
    #[error("no {family:?} complex has exactly {n} vertices")]
    Unreachable { family: Family, n: usize },
    #[error("invalid length range [{a}, {b}]")]
    BadLengths { a: f64, b: f64 },
}

pub fn generate(spec: &GeneratorSpec) -> Result<RectComplex, GenerateError> {
    if let Lengths::Uniform { a, b } = spec.lengths {
        if !(a > 0.0 && b >= a && b.is_finite()) {
            return Err(GenerateError::BadLengths { a, b });
        }
    }
    let min = match spec.family {
        Family::Squaregraph | Family::Ramified => 4,
        _ => 1,
    };
    if spec.n < min {
        return Err(GenerateError::TooSmall { n: spec.n, min });
    }
    if min == 4 && matches!(spec.n, 5 | 7) {
        return Err(GenerateError::Unreachable {
            family: spec.family,
            n: spec.n,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let failed = || GenerateError::GenerationFailed {
        family: spec.family,
        n: spec.n,
        seed: spec.seed,
        attempts: MAX_ATTEMPTS,
    };
    let unit = match spec.family {
        Family::Book => book(spec.n),
        Family::Staircase => staircase(spec.n),
        Family::GridL => grid_l(spec.n),
        Family::Squaregraph | Family::Ramified => {
            let planar = spec.family == Family::Squaregraph;
            let mut found = None;
            for attempt in 0..MAX_ATTEMPTS {
                rng.set_stream(attempt);
                if let Some(g) = Growth::grow(spec.n, planar, &mut rng) {
                    found = Some(g);
                    break;
                }
            }
            found.ok_or_else(failed)?
        }
    };
    let k = match spec.lengths {
        Lengths::Unit => unit,
        Lengths::Uniform { a, b } => {
            rng.set_stream(MAX_ATTEMPTS);
            with_class_lengths(&unit, |_| a + (b - a) * rng.random_range(0..=64u32) as f64 / 64.0)
        }
    };
    validate_cat0(&k, &ValidationConfig::default()).map_err(|_| failed())?;
    Ok(k)
}

/// Reassigns lengths class by class, in class id order.
pub fn with_class_lengths(k: &RectComplex, mut draw: impl FnMut(usize) -> f64) -> RectComplex {
    let t = compute_theta(k).expect("generated complexes have consistent classes");
    let lengths: Vec<f64> = (0..t.class_count()).map(&mut draw).collect();
    let mut raw = k.to_raw();
    for (e, edge) in raw.edges.iter_mut().enumerate() {
        let (u, v) = edge.endpoints();
        *edge = RawEdge::Weighted(u, v, lengths[t.class_of[e]]);
    }
    RectComplex::build(&raw).expect("class lengths keep faces consistent")
}

fn unit_complex(vertices: usize, edges: Vec<(usize, usize)>, faces: Vec<[usize; 4]>) -> RectComplex {
    RectComplex::build(&RawComplex {
        vertices,
        edges: edges.into_iter().map(|(u, v)| RawEdge::Unit(u, v)).collect(),
        faces,
    })
    .expect("generator output is structurally valid")
}

/// Unit squares on integer cells, vertices numbered by `(y, x)`.
fn from_cells(cells: &[(i64, i64)]) -> RectComplex {
    let mut points = BTreeSet::new();
    for &(x, y) in cells {
        for (dx, dy) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
            points.insert((y + dy, x + dx));
        }
    }
    let id: BTreeMap<(i64, i64), usize> = points.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let at = |x: i64, y: i64| id[&(y, x)];
    let mut edges = BTreeSet::new();
    let mut faces = Vec::new();
    for &(x, y) in cells {
        let c = [at(x, y), at(x + 1, y), at(x + 1, y + 1), at(x, y + 1)];
        for i in 0..4 {
            let (a, b) = (c[i], c[(i + 1) % 4]);
            edges.insert((a.min(b), a.max(b)));
        }
        faces.push(c);
    }
    unit_complex(points.len(), edges.into_iter().collect(), faces)
}

/// `n` unit pages sharing the spine `c0 c1`.
pub fn book(n: usize) -> RectComplex {
    let mut edges = vec![(0, 1)];
    let mut faces = Vec::new();
    for k in 1..=n {
        let (a, b) = (2 * k, 2 * k + 1);
        edges.extend([(0, a), (1, b), (a, b)]);
        faces.push([0, 1, b, a]);
    }
    unit_complex(2 * n + 2, edges, faces)
}

/// `n` unit squares along the diagonal, consecutive ones sharing a corner.
pub fn staircase(n: usize) -> RectComplex {
    let cells: Vec<_> = (0..n as i64).map(|k| (k, k)).collect();
    from_cells(&cells)
}

/// The `(n-1) x (n-1)` grid of unit squares with its upper-right quadrant
/// of `floor((n-1)/2)` x `floor((n-1)/2)` cells removed.
pub fn grid_l(n: usize) -> RectComplex {
    let s = n.saturating_sub(1) as i64;
    if s == 0 {
        return unit_complex(1, Vec::new(), Vec::new());
    }
    let cut = (s + 1) / 2;
    let cells: Vec<_> = (0..s)
        .flat_map(|y| (0..s).map(move |x| (x, y)))
        .filter(|&(x, y)| x < cut || y < cut)
        .collect();
    from_cells(&cells)
}

/// Incremental growth state for the random families.
struct Growth {
    n: usize,
    adj: Vec<BTreeSet<usize>>,
    faces: Vec<[usize; 4]>,
    /// Faces at each vertex.
    at: Vec<Vec<usize>>,
    class: HashMap<(usize, usize), usize>,
    color: Vec<u8>,
    /// Outer boundary cycle, used by the planar family only.
    boundary: Vec<usize>,
}

impl Growth {
    fn new() -> Self {
        let mut g = Growth {
            n: 0,
            adj: Vec::new(),
            faces: Vec::new(),
            at: Vec::new(),
            class: HashMap::new(),
            color: vec![1, 2],
            boundary: vec![0, 1, 2, 3],
        };
        g.add_vertices(4);
        for (a, b, c) in [(0, 1, 0), (1, 2, 1), (2, 3, 0), (3, 0, 1)] {
            g.add_edge(a, b, c);
        }
        g.add_face([0, 1, 2, 3]);
        g
    }

    fn add_vertices(&mut self, count: usize) -> usize {
        let first = self.n;
        self.n += count;
        self.adj.resize(self.n, BTreeSet::new());
        self.at.resize(self.n, Vec::new());
        first
    }

    fn add_edge(&mut self, a: usize, b: usize, class: usize) {
        self.adj[a].insert(b);
        self.adj[b].insert(a);
        self.class.insert((a.min(b), a.max(b)), class);
    }

    fn class_of(&self, a: usize, b: usize) -> usize {
        self.class[&(a.min(b), a.max(b))]
    }

    fn add_face(&mut self, f: [usize; 4]) {
        let id = self.faces.len();
        self.faces.push(f);
        for v in f {
            self.at[v].push(id);
        }
    }

    /// Glue a square along edge `u v`.
    fn attach(&mut self, u: usize, v: usize) -> (usize, usize) {
        let uv = self.class_of(u, v);
        let side = self.color.len();
        self.color.push(3 - self.color[uv]);
        let u2 = self.add_vertices(2);
        let v2 = u2 + 1;
        self.add_edge(u, u2, side);
        self.add_edge(v, v2, side);
        self.add_edge(u2, v2, uv);
        self.add_face([u, v, v2, u2]);
        (u2, v2)
    }

    /// Distance between the link nodes `w a` and `w b` in the link of `w`.
    fn link_distance(&self, w: usize, a: usize, b: usize) -> Option<usize> {
        let mut dist: HashMap<usize, usize> = HashMap::from([(a, 0)]);
        let mut queue = VecDeque::from([a]);
        while let Some(x) = queue.pop_front() {
            if x == b {
                return Some(dist[&x]);
            }
            for &f in &self.at[w] {
                let face = self.faces[f];
                let i = face.iter().position(|&v| v == w).unwrap();
                let (p, q) = (face[(i + 3) % 4], face[(i + 1) % 4]);
                let y = if p == x {
                    q
                } else if q == x {
                    p
                } else {
                    continue;
                };
                if !dist.contains_key(&y) {
                    dist.insert(y, dist[&x] + 1);
                    queue.push_back(y);
                }
            }
        }
        None
    }

    /// Whether the corner `a w b` can be filled by a new square.
    fn corner_ok(&self, w: usize, a: usize, b: usize, bipartite_links: bool) -> bool {
        if a == b || !self.adj[w].contains(&a) || !self.adj[w].contains(&b) {
            return false;
        }
        let (ca, cb) = (self.class_of(w, a), self.class_of(w, b));
        if ca == cb || (bipartite_links && self.color[ca] == self.color[cb]) {
            return false;
        }
        if self.adj[a].intersection(&self.adj[b]).any(|&c| c != w) {
            return false;
        }
        match self.link_distance(w, a, b) {
            None => true,
            Some(d) => d >= 3 && (!bipartite_links || d % 2 == 1),
        }
    }

    fn fill(&mut self, w: usize, a: usize, b: usize) -> usize {
        let (ca, cb) = (self.class_of(w, a), self.class_of(w, b));
        let z = self.add_vertices(1);
        self.add_edge(a, z, cb);
        self.add_edge(b, z, ca);
        self.add_face([a, w, b, z]);
        z
    }

    fn grow(n: usize, planar: bool, rng: &mut ChaCha8Rng) -> Option<RectComplex> {
        let mut g = Growth::new();
        while g.n < n {
            let need_one = n - g.n == 1;
            let try_corner = need_one || rng.random_bool(0.45);
            let mut done = false;
            if try_corner {
                for _ in 0..CORNER_TRIES {
                    if planar {
                        let len = g.boundary.len();
                        let i = rng.random_range(0..len);
                        let (a, w, b) = (
                            g.boundary[(i + len - 1) % len],
                            g.boundary[i],
                            g.boundary[(i + 1) % len],
                        );
                        if g.adj[w].len() >= 4 && g.corner_ok(w, a, b, false) {
                            let z = g.fill(w, a, b);
                            g.boundary[i] = z;
                            done = true;
                            break;
                        }
                    } else {
                        let w = rng.random_range(0..g.n);
                        let nbrs: Vec<usize> = g.adj[w].iter().copied().collect();
                        if nbrs.len() < 2 {
                            continue;
                        }
                        let a = nbrs[rng.random_range(0..nbrs.len())];
                        let b = nbrs[rng.random_range(0..nbrs.len())];
                        if g.corner_ok(w, a, b, true) {
                            g.fill(w, a, b);
                            done = true;
                            break;
                        }
                    }
                }
            }
            if done {
                continue;
            }
            if need_one {
                return None;
            }
            if planar {
                let len = g.boundary.len();
                let i = rng.random_range(0..len);
                let (u, v) = (g.boundary[i], g.boundary[(i + 1) % len]);
                let (u2, v2) = g.attach(u, v);
                g.boundary.splice(i + 1..i + 1, [u2, v2]);
            } else {
                let edges: Vec<(usize, usize)> = {
                    let mut e: Vec<_> = g.class.keys().copied().collect();
                    e.sort_unstable();
                    e
                };
                let (u, v) = edges[rng.random_range(0..edges.len())];
                g.attach(u, v);
            }
        }
        let mut edges: Vec<(usize, usize)> = g.class.keys().copied().collect();
        edges.sort_unstable();
        Some(unit_complex(g.n, edges, g.faces))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn small_families() {
        let l = grid_l(3);
        assert_eq!(
            (l.vertex_count(), l.edges().len(), l.faces().len()),
            (8, 10, 3)
        );
        let b = book(3);
        assert_eq!((b.vertex_count(), b.edges().len(), b.faces().len()), (8, 10, 3));
        assert_eq!(b.face(0), [0, 1, 3, 2]);
        let s = staircase(2);
        assert_eq!((s.vertex_count(), s.faces().len()), (7, 2));
        assert_eq!(s.vertex_faces(3).len(), 2);
    }

    #[test]
    fn spec_families_match_fixtures() {
        let spec = |family, n| GeneratorSpec {
            family,
            n,
            seed: 99,
            lengths: Lengths::Unit,
        };
        assert_eq!(generate(&spec(Family::Book, 3)).unwrap(), fixtures::fix_book());
        assert_eq!(generate(&spec(Family::GridL, 3)).unwrap(), fixtures::fix_l());
    }

    #[test]
    fn squaregraph_is_valid_and_deterministic() {
        let spec = GeneratorSpec {
            family: Family::Squaregraph,
            n: 50,
            seed: 7,
            lengths: Lengths::Unit,
        };
        let a = generate(&spec).unwrap();
        assert_eq!(a.vertex_count(), 50);
        assert_eq!(generate(&spec).unwrap(), a);
        assert!(a.edges().len() <= 100 && a.faces().len() <= 50);
    }

    #[test]
    fn ramified_is_ramified() {
        for seed in 0..5 {
            let spec = GeneratorSpec {
                family: Family::Ramified,
                n: 60,
                seed,
                lengths: Lengths::Uniform { a: 0.5, b: 2.0 },
            };
            let k = generate(&spec).unwrap();
            assert_eq!(k.vertex_count(), 60);
            assert!(compute_theta(&k).unwrap().is_ramified());
        }
    }

    #[test]
    fn rejects_bad_specs() {
        let spec = GeneratorSpec {
            family: Family::Ramified,
            n: 2,
            seed: 0,
            lengths: Lengths::Unit,
        };
        assert!(matches!(generate(&spec), Err(GenerateError::TooSmall { .. })));
        let spec = GeneratorSpec { n: 7, ..spec };
        assert!(matches!(generate(&spec), Err(GenerateError::Unreachable { .. })));
        let spec = GeneratorSpec {
            family: Family::Book,
            n: 2,
            seed: 0,
            lengths: Lengths::Uniform { a: 2.0, b: 1.0 },
        };
        assert!(matches!(generate(&spec), Err(GenerateError::BadLengths { .. })));
    }
}
