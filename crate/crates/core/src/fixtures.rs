//! Small hand-checkable complexes used by tests, the CLI and the bindings.

use crate::complex::{RawComplex, RawEdge, RectComplex};
use crate::generate;

fn unit(vertices: usize, edges: &[(usize, usize)], faces: Vec<[usize; 4]>) -> RawComplex {
    RawComplex {
        vertices,
        edges: edges.iter().map(|&(u, v)| RawEdge::Unit(u, v)).collect(),
        faces,
    }
}

pub fn single_square() -> RectComplex {
    RectComplex::build(&unit(4, &[(0, 1), (1, 2), (2, 3), (0, 3)], vec![[0, 1, 2, 3]])).unwrap()
}

/// Three unit squares tiling `[0,2]^2` minus `[1,2]^2`. Vertices are numbered
/// row by row: `(0,0)=0, (1,0)=1, (2,0)=2, (0,1)=3, (1,1)=4, (2,1)=5,
/// (0,2)=6, (1,2)=7`.
pub fn fix_l() -> RectComplex {
    generate::grid_l(3)
}

/// Three unit pages glued along the spine `c0 c1`. Numbering: `c0=0, c1=1`,
/// page `k` has `a_k=2k` next to `c0` and `b_k=2k+1` next to `c1`.
pub fn fix_book() -> RectComplex {
    generate::book(3)
}

/// Two unit squares meeting in the single vertex 3 at `(1,1)`.
pub fn fix_stair() -> RectComplex {
    generate::staircase(2)
}

/// Q3 minus a vertex: three squares around a degree-3 vertex.
pub fn cube_corner() -> RectComplex {
    let edges = [
        (0, 1),
        (0, 2),
        (0, 4),
        (1, 3),
        (1, 5),
        (2, 3),
        (2, 6),
        (4, 5),
        (4, 6),
    ];
    RectComplex::build(&unit(
        7,
        &edges,
        vec![[0, 1, 3, 2], [0, 1, 5, 4], [0, 2, 6, 4]],
    ))
    .unwrap()
}

/// Five squares around an inner vertex of degree 5. Center 0, spokes 1..=5,
/// rim vertices 6..=10.
pub fn wheel5() -> RectComplex {
    let mut edges = Vec::new();
    let mut faces = Vec::new();
    for i in 0..5 {
        let s = 1 + i;
        let s_next = 1 + (i + 1) % 5;
        let r = 6 + i;
        edges.push((0, s));
        edges.push((s, r));
        edges.push((r, s_next));
        faces.push([0, s, r, s_next]);
    }
    RectComplex::build(&unit(11, &edges, faces)).unwrap()
}
