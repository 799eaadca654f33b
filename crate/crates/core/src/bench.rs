//! Query benchmark: structure sizes, walk step counts and timings.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::boundary::BoundaryError;
use crate::complex::{PointSpec, RectComplex};
use crate::engine::QueryIndex;
use crate::error::{Error, Result};
use crate::structures::QueryStructure;

/// Random point with dyadic coordinates `side * i / 64` in a uniform face.
pub fn random_point(k: &RectComplex, rng: &mut impl Rng) -> PointSpec {
    let f = rng.random_range(0..k.faces().len());
    let (w, h) = k.face_size(f);
    let a = rng.random_range(0..=64u32) as f64 / 64.0;
    let b = rng.random_range(0..=64u32) as f64 / 64.0;
    PointSpec::new(f, w * a, h * b)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryRecord {
    pub from: PointSpec,
    pub to: PointSpec,
    pub d: u32,
    pub steps_pi1: u32,
    pub steps_pi2: u32,
    pub lookups: u32,
    pub probes: u32,
    pub max_probes_per_lookup: u32,
    pub max_lookups_per_step: u32,
    pub length: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub micros: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Percentiles {
    pub p50: f64,
    pub p90: f64,
    pub p99: f64,
    pub max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub structure: String,
    pub vertices: usize,
    pub seed: u64,
    pub queries: usize,
    pub entries: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tree_nodes: Option<usize>,
    pub max_degree: usize,
    /// `ceil(log2(max degree)) + 1`.
    pub probe_bound: u32,
    pub per_query: Vec<QueryRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub micros: Option<Percentiles>,
    /// Least-squares fit of total walk steps against `d(p, q)`.
    pub fit: Option<LineFit>,
}

/// Entry count of a structure: `n^2` matrix cells for the dense variant,
/// tree nodes plus ancestor tables plus `Q` lists for the tree product.
pub fn structure_entries(s: &QueryStructure) -> usize {
    match s {
        QueryStructure::Dense(m) => m.matrix_entries(),
        QueryStructure::TreeProduct(t) => t.tree_nodes() + t.table_entries() + t.q_entries(),
    }
}

pub fn probe_bound(max_degree: usize) -> u32 {
    (max_degree.max(1) as f64).log2().ceil() as u32 + 1
}

pub fn fit_line(points: &[(f64, f64)]) -> Option<LineFit> {
    let n = points.len() as f64;
    let (sx, sy) = points.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0, b + p.1));
    let (mx, my) = (sx / n, sy / n);
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if points.len() < 2 || sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    Some(LineFit {
        slope,
        intercept: my - slope * mx,
    })
}

fn percentile(sorted: &[f64], q: f64) -> f64 {
    let i = ((sorted.len() - 1) as f64 * q).round() as usize;
    sorted[i]
}

/// Runs `count` random queries. Fails if a walk takes other than `d(p, q)`
/// steps on either path.
pub fn benchmark(index: &QueryIndex, count: usize, seed: u64, timing: bool) -> Result<BenchReport> {
    let k = &index.complex;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut per_query = Vec::with_capacity(count);
    for _ in 0..count {
        let x = random_point(k, &mut rng);
        let y = random_point(k, &mut rng);
        let start = Instant::now();
        let path = index.query(&x, &y)?;
        let micros = timing.then(|| start.elapsed().as_secs_f64() * 1e6);
        let (p, q) = path.gates;
        let d = index.structure.dist(p, q);
        let s = &path.stats;
        if s.steps_pi1 != d || s.steps_pi2 != d {
            return Err(Error::Boundary(BoundaryError::InternalContradiction {
                step: 0,
                reason: format!(
                    "walk from {p} to {q} took {} and {} steps, expected {d}",
                    s.steps_pi1, s.steps_pi2
                ),
                trace: Vec::new(),
            }));
        }
        per_query.push(QueryRecord {
            from: x,
            to: y,
            d,
            steps_pi1: s.steps_pi1,
            steps_pi2: s.steps_pi2,
            lookups: s.lookups,
            probes: s.probes,
            max_probes_per_lookup: s.max_probes_per_lookup,
            max_lookups_per_step: s.max_lookups_per_step,
            length: path.length,
            micros,
        });
    }
    let micros = if timing && !per_query.is_empty() {
        let mut t: Vec<f64> = per_query.iter().filter_map(|r| r.micros).collect();
        t.sort_by(f64::total_cmp);
        Some(Percentiles {
            p50: percentile(&t, 0.5),
            p90: percentile(&t, 0.9),
            p99: percentile(&t, 0.99),
            max: *t.last().unwrap(),
        })
    } else {
        None
    };
    let fit = fit_line(
        &per_query
            .iter()
            .map(|r| (r.d as f64, (r.steps_pi1 + r.steps_pi2) as f64))
            .collect::<Vec<_>>(),
    );
    let tree_nodes = match &index.structure {
        QueryStructure::TreeProduct(t) => Some(t.tree_nodes()),
        QueryStructure::Dense(_) => None,
    };
    Ok(BenchReport {
        structure: index.structure.kind().name().to_string(),
        vertices: k.vertex_count(),
        seed,
        queries: count,
        entries: structure_entries(&index.structure),
        tree_nodes,
        max_degree: k.max_degree(),
        probe_bound: probe_bound(k.max_degree()),
        per_query,
        micros,
        fit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::structures::StructureKind;

    #[test]
    fn book_tree_nodes() {
        let idx = QueryIndex::new(fixtures::fix_book(), Some(StructureKind::TreeProduct)).unwrap();
        let r = benchmark(&idx, 20, 1, false).unwrap();
        assert_eq!(r.tree_nodes, Some(6));
        assert!(r.micros.is_none());
        for q in &r.per_query {
            assert!(q.max_probes_per_lookup <= r.probe_bound);
        }
    }

    #[test]
    fn dense_entries_and_fit() {
        let idx = QueryIndex::new(fixtures::fix_l(), Some(StructureKind::Dense)).unwrap();
        let r = benchmark(&idx, 50, 3, true).unwrap();
        assert_eq!(r.entries, 64);
        let fit = r.fit.unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-12 && fit.intercept.abs() < 1e-9);
        assert!(r.micros.is_some());
    }

    #[test]
    fn line_fit() {
        let f = fit_line(&[(0.0, 1.0), (1.0, 3.0), (2.0, 5.0)]).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-12 && (f.intercept - 1.0).abs() < 1e-12);
        assert!(fit_line(&[(1.0, 1.0)]).is_none());
    }
}
