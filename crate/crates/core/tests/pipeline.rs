mod common;

use std::collections::BTreeSet;

use cat0rect::bench::random_point;
use cat0rect::boundary::boundary_walk;
use cat0rect::complex::{validate_cat0, PointSpec, ValidationConfig};
use cat0rect::engine::QueryIndex;
use cat0rect::generate::Family;
use cat0rect::oracle::{OracleConfig, SampleGraph};
use cat0rect::structures::StructureKind;
use cat0rect::theta::compute_theta;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;

#[test]
fn instances_are_cat0() {
    for (name, k) in instances() {
        assert!(validate_cat0(&k, &ValidationConfig::default()).is_ok(), "{name}");
    }
}

#[test]
fn classes_match_djokovic_winkler() {
    for (name, k) in instances() {
        let t = compute_theta(&k).unwrap();
        let mut ours: Vec<BTreeSet<usize>> = t.classes.iter().map(|c| c.iter().copied().collect()).collect();
        ours.sort();
        assert_eq!(ours, dw_partition(&k), "{name}");
    }
}

#[test]
fn halfspaces_match_bfs() {
    for (name, k) in instances() {
        let t = compute_theta(&k).unwrap();
        let d = distances(&k);
        for c in 0..t.class_count() {
            let e = k.edge(t.classes[c][0]);
            let (h1, h2) = t.halfspaces(&k, c).unwrap();
            assert_eq!(h1, bfs_halfspace(&d, e.u, e.v), "{name} class {c}");
            assert_eq!(h2, bfs_halfspace(&d, e.v, e.u), "{name} class {c}");
        }
    }
}

#[test]
fn boundary_matches_grid_embedding() {
    for (name, k) in instances() {
        let idx = QueryIndex::new(k.clone(), Some(StructureKind::Dense)).unwrap();
        let n = k.vertex_count();
        for p in 0..n {
            for q in 0..n {
                let b = boundary_walk(&idx.structure, p, q).unwrap();
                let got: BTreeSet<usize> = b.boundary_vertices().into_iter().collect();
                assert_eq!(got, grid_boundary(&k, p, q), "{name} I({p},{q})");
            }
        }
    }
}

#[test]
fn tree_product_walk_matches_dense() {
    for (name, k) in instances() {
        let t = compute_theta(&k).unwrap();
        if !t.is_ramified() {
            continue;
        }
        let dense = QueryIndex::new(k.clone(), Some(StructureKind::Dense)).unwrap();
        let tree = QueryIndex::new(k.clone(), Some(StructureKind::TreeProduct)).unwrap();
        let n = k.vertex_count();
        for p in 0..n {
            for q in 0..n {
                let a = boundary_walk(&dense.structure, p, q).unwrap();
                let b = boundary_walk(&tree.structure, p, q).unwrap();
                assert_eq!(a.block_sides(), b.block_sides(), "{name} I({p},{q})");
                assert_eq!(a.deg0, b.deg0, "{name} I({p},{q})");
            }
        }
    }
}

#[test]
fn engine_within_oracle_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (name, k) in instances() {
        let idx = QueryIndex::new(k.clone(), None).unwrap();
        let h = k.min_edge_length() / 8.0;
        let graph = SampleGraph::new(&k, &OracleConfig::new(h)).unwrap();
        for _ in 0..15 {
            let x = random_point(&k, &mut rng);
            let y = random_point(&k, &mut rng);
            let exact = idx.distance(&x, &y).unwrap();
            let approx = graph.distance(&x, &y).unwrap();
            let cells = idx.cells_crossed(&x, &y).unwrap();
            assert!(exact <= approx + 1e-9, "{name} {x:?} {y:?}: engine {exact} > oracle {approx}");
            assert!(
                approx - exact <= 2.0 * h * cells as f64 + 1e-9,
                "{name} {x:?} {y:?}: engine {exact}, oracle {approx}, {cells} cells"
            );
        }
    }
}

#[test]
fn symmetric_and_contained() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (name, k) in instances() {
        let idx = QueryIndex::new(k.clone(), None).unwrap();
        let d = distances(&k);
        for _ in 0..100 {
            let x = random_point(&k, &mut rng);
            let y = random_point(&k, &mut rng);
            let a = idx.query(&x, &y).unwrap();
            let b = idx.query(&y, &x).unwrap();
            assert!(relative_gap(a.length, b.length) <= 1e-12, "{name} {x:?} {y:?}");
            let mut rev = b.interior_vertices();
            rev.reverse();
            assert_eq!(a.interior_vertices(), rev, "{name} {x:?} {y:?}");
            let (p, q) = a.gates;
            for z in a.interior_vertices() {
                assert_eq!(d[p][z] + d[z][q], d[p][q], "{name}: {z} outside I({p},{q})");
            }
        }
    }
}

#[test]
fn comparison_inequality() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for (name, k) in instances() {
        let idx = QueryIndex::new(k.clone(), None).unwrap();
        for _ in 0..30 {
            let [x, y, z] = [0; 3].map(|_| random_point(&k, &mut rng));
            let c = idx.distance(&x, &y).unwrap();
            let m = idx.point_along(&x, &y, 0.5).unwrap();
            assert!((idx.distance(&x, &m).unwrap() - c / 2.0).abs() <= 1e-9, "{name}");
            let bound = median_bound(idx.distance(&z, &x).unwrap(), idx.distance(&z, &y).unwrap(), c);
            let dm = idx.distance(&z, &m).unwrap();
            assert!(dm <= bound + 1e-9, "{name}: {dm} > {bound}");
        }
    }
}

#[test]
fn same_cell_queries_are_segments() {
    for (name, k) in instances() {
        let idx = QueryIndex::new(k.clone(), None).unwrap();
        for f in 0..k.faces().len() {
            let (w, h) = k.face_size(f);
            let x = PointSpec::new(f, 0.25 * w, 0.75 * h);
            let y = PointSpec::new(f, w, 0.5 * h);
            let got = idx.distance(&x, &y).unwrap();
            let want = (0.75 * w).hypot(0.25 * h);
            assert!(relative_gap(got, want) <= 1e-12, "{name} face {f}: {got} vs {want}");
        }
    }
}

#[test]
fn larger_generated_instances_run() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for family in [Family::Squaregraph, Family::Ramified] {
        let k = gen(family, 200, 4, uniform());
        let idx = QueryIndex::new(k.clone(), None).unwrap();
        for _ in 0..200 {
            let x = random_point(&k, &mut rng);
            let y = random_point(&k, &mut rng);
            let p = idx.query(&x, &y).unwrap();
            assert!(p.length.is_finite());
        }
    }
}
