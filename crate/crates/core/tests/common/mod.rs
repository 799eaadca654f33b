//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap, HashSet};

use cat0rect::complex::{PointSpec, RectComplex};
use cat0rect::fixtures;
use cat0rect::generate::{generate, Family, GeneratorSpec, Lengths};

pub fn gen(family: Family, n: usize, seed: u64, lengths: Lengths) -> RectComplex {
    generate(&GeneratorSpec {
        family,
        n,
        seed,
        lengths,
    })
    .unwrap()
}

pub fn uniform() -> Lengths {
    Lengths::Uniform { a: 0.5, b: 2.0 }
}

/// Hand fixtures plus a few generated instances of each family.
pub fn instances() -> Vec<(String, RectComplex)> {
    let mut out = vec![
        ("square".to_string(), fixtures::single_square()),
        ("fix-l".to_string(), fixtures::fix_l()),
        ("fix-book".to_string(), fixtures::fix_book()),
        ("fix-stair".to_string(), fixtures::fix_stair()),
        ("grid-l-7".to_string(), gen(Family::GridL, 7, 0, Lengths::Unit)),
        ("staircase-5".to_string(), gen(Family::Staircase, 5, 0, uniform())),
        ("book-5".to_string(), gen(Family::Book, 5, 0, uniform())),
    ];
    for seed in 0..3 {
        out.push((format!("squaregraph-40-{seed}"), gen(Family::Squaregraph, 40, seed, Lengths::Unit)));
        out.push((format!("ramified-40-{seed}"), gen(Family::Ramified, 40, seed, uniform())));
    }
    out
}

pub fn distances(k: &RectComplex) -> Vec<Vec<u32>> {
    (0..k.vertex_count()).map(|v| k.bfs(v)).collect()
}

/// Θ-classes straight from the Djoković–Winkler relation: `uv ~ xy` when
/// `d(u,x) + d(v,y) != d(u,y) + d(v,x)`, closed transitively.
pub fn dw_partition(k: &RectComplex) -> Vec<BTreeSet<usize>> {
    let d = distances(k);
    let m = k.edges().len();
    let mut parent: Vec<usize> = (0..m).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    for a in 0..m {
        for b in a + 1..m {
            let (e, f) = (k.edge(a), k.edge(b));
            if d[e.u][f.u] + d[e.v][f.v] != d[e.u][f.v] + d[e.v][f.u] {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                parent[ra] = rb;
            }
        }
    }
    let mut groups: HashMap<usize, BTreeSet<usize>> = HashMap::new();
    for e in 0..m {
        let r = find(&mut parent, e);
        groups.entry(r).or_default().insert(e);
    }
    let mut out: Vec<_> = groups.into_values().collect();
    out.sort();
    out
}

/// Vertices closer to `a` than to `b`.
pub fn bfs_halfspace(d: &[Vec<u32>], a: usize, b: usize) -> Vec<usize> {
    (0..d.len()).filter(|&z| d[a][z] < d[b][z]).collect()
}

pub fn interval(d: &[Vec<u32>], p: usize, q: usize) -> Vec<usize> {
    (0..d.len()).filter(|&z| d[p][z] + d[z][q] == d[p][q]).collect()
}

/// Boundary vertices of the interval, found by embedding it into the
/// integer grid: classes crossing inside a face of the interval get
/// different axes, and a vertex is interior when all four unit squares
/// around its image are images of interval faces.
pub fn grid_boundary(k: &RectComplex, p: usize, q: usize) -> BTreeSet<usize> {
    let d = distances(k);
    let members = interval(&d, p, q);
    if members.len() == 1 {
        return members.into_iter().collect();
    }
    let inside: HashSet<usize> = members.iter().copied().collect();
    let classes = dw_partition(k);
    let mut class_of = vec![0; k.edges().len()];
    for (c, set) in classes.iter().enumerate() {
        for &e in set {
            class_of[e] = c;
        }
    }
    let faces: Vec<usize> = (0..k.faces().len())
        .filter(|&f| k.face(f).iter().all(|v| inside.contains(v)))
        .collect();
    let mut cross: HashMap<usize, Vec<usize>> = HashMap::new();
    for &f in &faces {
        let fe = k.face_edges(f);
        let (a, b) = (class_of[fe[0]], class_of[fe[1]]);
        cross.entry(a).or_default().push(b);
        cross.entry(b).or_default().push(a);
    }
    let mut axis: HashMap<usize, u8> = HashMap::new();
    let mut ordered: BTreeSet<usize> = BTreeSet::new();
    for &z in &members {
        for &(w, e) in k.neighbors(z) {
            if inside.contains(&w) {
                ordered.insert(class_of[e]);
            }
        }
    }
    for &c in &ordered {
        if axis.contains_key(&c) {
            continue;
        }
        axis.insert(c, 0);
        let mut stack = vec![c];
        while let Some(x) = stack.pop() {
            for &y in cross.get(&x).map(Vec::as_slice).unwrap_or(&[]) {
                let want = 1 - axis[&x];
                match axis.get(&y) {
                    Some(&have) => assert_eq!(have, want, "crossing graph of I({p},{q}) is not bipartite"),
                    None => {
                        axis.insert(y, want);
                        stack.push(y);
                    }
                }
            }
        }
    }
    // Coordinates count the classes of each axis crossed from p.
    let mut pos: HashMap<usize, (i64, i64)> = HashMap::from([(p, (0, 0))]);
    let mut order = members.clone();
    order.sort_by_key(|&z| d[p][z]);
    for &z in &order {
        if z == p {
            continue;
        }
        let (w, e) = k
            .neighbors(z)
            .iter()
            .copied()
            .find(|&(w, _)| inside.contains(&w) && d[p][w] + 1 == d[p][z])
            .unwrap();
        let base = pos[&w];
        let step = if axis[&class_of[e]] == 0 { (1, 0) } else { (0, 1) };
        pos.insert(z, (base.0 + step.0, base.1 + step.1));
    }
    let distinct: HashSet<(i64, i64)> = pos.values().copied().collect();
    assert_eq!(distinct.len(), pos.len(), "grid embedding of I({p},{q}) is not injective");
    let squares: HashSet<(i64, i64)> = faces
        .iter()
        .map(|&f| {
            let c = k.face(f).map(|v| pos[&v]);
            (c.iter().map(|p| p.0).min().unwrap(), c.iter().map(|p| p.1).min().unwrap())
        })
        .collect();
    members
        .into_iter()
        .filter(|z| {
            let (x, y) = pos[z];
            ![(x, y), (x - 1, y), (x, y - 1), (x - 1, y - 1)]
                .iter()
                .all(|s| squares.contains(s))
        })
        .collect()
}

/// Comparison-triangle bound on the distance from `z` to the midpoint of a
/// side of length `c` whose endpoints are at distances `a` and `b`.
pub fn median_bound(a: f64, b: f64, c: f64) -> f64 {
    ((2.0 * a * a + 2.0 * b * b - c * c) / 4.0).max(0.0).sqrt()
}

pub fn relative_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

pub fn same_point(a: &PointSpec, b: &PointSpec) -> bool {
    a.face == b.face && (a.alpha - b.alpha).abs() < 1e-12 && (a.beta - b.beta).abs() < 1e-12
}
