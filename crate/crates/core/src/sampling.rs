//! Seeded samplers for graphs and spectral points.
//!
//! Everything here is driven by `ChaCha8Rng`, so a seed reproduces the same
//! graphs and sample points on every platform.

use std::ops::RangeInclusive;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{MetricGraph, VertexId};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Shape limits for [`random_graph`].
#[derive(Clone, Debug)]
pub struct RandomGraphSpec {
    pub max_vertices: usize,
    pub max_edges: usize,
    pub max_leads: usize,
    pub lengths: RangeInclusive<f64>,
}

impl Default for RandomGraphSpec {
    fn default() -> Self {
        RandomGraphSpec {
            max_vertices: 4,
            max_edges: 4,
            max_leads: 3,
            lengths: 0.5..=2.0,
        }
    }
}

/// Draws a valid graph: no tadpoles, no isolated vertices. Multiple edges
/// between the same pair of vertices are allowed.
pub fn random_graph(rng: &mut ChaCha8Rng, spec: &RandomGraphSpec) -> MetricGraph {
    loop {
        let nv = rng.random_range(1..=spec.max_vertices.max(1));
        let ne = if nv < 2 { 0 } else { rng.random_range(0..=spec.max_edges) };
        let nl = rng.random_range(0..=spec.max_leads);
        let mut b = MetricGraph::builder();
        let vs: Vec<VertexId> = (0..nv).map(|i| b.vertex(format!("v{}", i + 1))).collect();
        for _ in 0..ne {
            let u = rng.random_range(0..nv);
            let mut w = rng.random_range(0..nv - 1);
            if w >= u {
                w += 1;
            }
            let length = rng.random_range(spec.lengths.clone());
            b.edge(vs[u], vs[w], length);
        }
        for _ in 0..nl {
            b.lead(vs[rng.random_range(0..nv)]);
        }
        let g = b.build();
        if g.validate().is_pass() {
            return g;
        }
    }
}

pub fn random_graph_family(seed: u64, count: usize, spec: &RandomGraphSpec) -> Vec<MetricGraph> {
    let mut r = rng(seed);
    (0..count).map(|_| random_graph(&mut r, spec)).collect()
}

/// Uniform sample from the rectangle `|Re k| ≤ re_max`, `Im k ∈ im`.
pub fn sample_k(rng: &mut ChaCha8Rng, re_max: f64, im: RangeInclusive<f64>) -> Complex64 {
    Complex64::new(rng.random_range(-re_max..=re_max), rng.random_range(im))
}
