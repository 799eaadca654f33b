mod common;

use cat0rect::boundary::boundary_walk;
use cat0rect::complex::{PointSpec, RectComplex};
use cat0rect::engine::QueryIndex;
use cat0rect::generate::{Family, Lengths};
use cat0rect::polygon::triangulate_monotone;
use cat0rect::theta::compute_theta;
use cat0rect::unfold::unfold;
use proptest::prelude::*;

use common::*;

fn family() -> impl Strategy<Value = Family> {
    prop_oneof![Just(Family::Squaregraph), Just(Family::Ramified)]
}

fn pick(k: &RectComplex, f: usize, a: f64, b: f64) -> PointSpec {
    let f = f % k.faces().len();
    let (w, h) = k.face_size(f);
    PointSpec::new(f, a * w, b * h)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn triangle_inequality(
        fam in family(), seed in 0u64..1000, n in 8usize..60,
        f in proptest::array::uniform3(0usize..1000),
        c in proptest::array::uniform6(0.0f64..=1.0),
    ) {
        let k = gen(fam, n, seed, uniform());
        let idx = QueryIndex::new(k.clone(), None).unwrap();
        let x = pick(&k, f[0], c[0], c[1]);
        let y = pick(&k, f[1], c[2], c[3]);
        let z = pick(&k, f[2], c[4], c[5]);
        let d = |a: &PointSpec, b: &PointSpec| idx.distance(a, b).unwrap();
        prop_assert!(d(&x, &z) <= d(&x, &y) + d(&y, &z) + 1e-9);
    }

    #[test]
    fn reversed_queries_reverse_paths(
        fam in family(), seed in 0u64..1000, n in 8usize..80,
        f in proptest::array::uniform2(0usize..1000),
        c in proptest::array::uniform4(0.0f64..=1.0),
    ) {
        let k = gen(fam, n, seed, uniform());
        let idx = QueryIndex::new(k.clone(), None).unwrap();
        let x = pick(&k, f[0], c[0], c[1]);
        let y = pick(&k, f[1], c[2], c[3]);
        let a = idx.query(&x, &y).unwrap();
        let b = idx.query(&y, &x).unwrap();
        prop_assert!(relative_gap(a.length, b.length) <= 1e-12);
        let mut rev = b.interior_vertices();
        rev.reverse();
        prop_assert_eq!(a.interior_vertices(), rev);
    }

    #[test]
    fn block_polygons_triangulate(fam in family(), seed in 0u64..1000, n in 8usize..80, p in 0usize..1000, q in 0usize..1000) {
        let k = gen(fam, n, seed, uniform());
        let idx = QueryIndex::new(k.clone(), None).unwrap();
        let t = compute_theta(&k).unwrap();
        let (p, q) = (p % n, q % n);
        let b = boundary_walk(&idx.structure, p, q).unwrap();
        prop_assert_eq!(b.stats.steps_pi1 as usize, b.distance());
        let chain = unfold(&b, &k, &t).unwrap();
        for blk in chain.blocks.iter().filter(|blk| !blk.bridge) {
            let tri = triangulate_monotone(&blk.loop_points).unwrap();
            let corners = tri.points.len();
            prop_assert_eq!(tri.triangles.len(), corners - 2);
            prop_assert_eq!(tri.diagonals.len(), corners - 3);
            let s = blk.loop_points[0];
            let e = blk.loop_points[blk.up_side.len() - 1];
            let fwd = tri.funnel_path(s, e).unwrap();
            let back = tri.funnel_path(e, s).unwrap();
            prop_assert!(relative_gap(fwd.length, back.length) <= 1e-12);
            let chord = (e.0 - s.0).hypot(e.1 - s.1);
            let side: f64 = blk.loop_points[..blk.up_side.len()]
                .windows(2)
                .map(|w| (w[1].0 - w[0].0).hypot(w[1].1 - w[0].1))
                .sum();
            prop_assert!(fwd.length >= chord - 1e-12 && fwd.length <= side + 1e-12);
        }
    }

    #[test]
    fn generation_is_deterministic(fam in family(), seed in 0u64..10_000, n in 4usize..50) {
        prop_assume!(n != 5 && n != 7);
        let a = gen(fam, n, seed, Lengths::Unit);
        prop_assert_eq!(a.vertex_count(), n);
        prop_assert_eq!(a, gen(fam, n, seed, Lengths::Unit));
    }
}
