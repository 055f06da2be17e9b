//! Dirichlet-to-Neumann matrix `Λ(k)` and its identities with `det A(k)`.
//!
//! For `k` off the real poles,
//!
//! ```text
//! Λ_uv = Σ_{e ∋ u,v} k / sin(kρ(e))                    (u ≠ v adjacent)
//! Λ_vv = i k q(v) − k Σ_{e ∋ v} cot(kρ(e))
//! ```
//!
//! and `Λ_uv = 0` for distinct non-adjacent vertices. Two consequences are
//! exposed as numerical cross-checks:
//!
//! - `|det A(k)| = |C(k) δ(k) det Λ(k)|` with `δ(k) = Π_e k sin(kρ(e))` and
//!   `C(k) = 2^E i^{E−V} / k^{E+V}`;
//! - `(1/2k) dΛ_uv/dk = σ_uv(k)`, the closed-form overlap integrals.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::constraint::assemble;
use crate::error::{Error, Result};
use crate::exppoly::{Coefficient, ExpPolynomial};
use crate::graph::{Edge, MetricGraph};

/// `|sin(kρ)|` below this is treated as a pole of `Λ`.
pub const POLE_GUARD: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct DtNMatrix {
    pub k: Complex64,
    /// Indexed by vertex id.
    pub matrix: DMatrix<Complex64>,
}

impl DtNMatrix {
    pub fn determinant(&self) -> Complex64 {
        self.matrix.clone().determinant()
    }
}

fn guarded_sin(edge: &Edge, k: Complex64) -> Result<Complex64> {
    let s = (k * edge.length).sin();
    if s.norm() < POLE_GUARD {
        return Err(Error::Pole {
            edge: edge.id,
            k,
            magnitude: s.norm(),
        });
    }
    Ok(s)
}

pub fn lambda_matrix(graph: &MetricGraph, k: Complex64) -> Result<DtNMatrix> {
    graph.ensure_valid()?;
    let n = graph.vertex_count();
    let mut m = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for l in graph.leads() {
        m[(l.vertex.0, l.vertex.0)] += Complex64::i() * k;
    }
    for e in graph.edges() {
        let s = guarded_sin(e, k)?;
        let c = (k * e.length).cos();
        let off = k / s;
        let diag = -k * c / s;
        let (u, v) = (e.tail.0, e.head.0);
        m[(u, v)] += off;
        m[(v, u)] += off;
        m[(u, u)] += diag;
        m[(v, v)] += diag;
    }
    Ok(DtNMatrix { k, matrix: m })
}

/// `δ(k) = Π_e k sin(kρ(e))`.
pub fn delta(graph: &MetricGraph, k: Complex64) -> Complex64 {
    graph
        .edges()
        .iter()
        .map(|e| k * (k * e.length).sin())
        .product()
}

/// `C(k) = 2^E i^{E−V} / k^{E+V}`.
pub fn det_identity_prefactor(graph: &MetricGraph, k: Complex64) -> Complex64 {
    let e = graph.edges().len() as i32;
    let v = graph.vertex_count() as i32;
    let i_power = Complex64::i().powi((e - v).rem_euclid(4));
    Complex64::new(2f64.powi(e), 0.0) * i_power / k.powi(e + v)
}

/// Relative mismatch `| |det A| − |C δ det Λ| | / |det A|` at `k` in the
/// upper half-plane, with `det A` expanded symbolically.
pub fn verify_det_identity(graph: &MetricGraph, k: Complex64) -> Result<f64> {
    let det = assemble(graph)?.determinant()?;
    det_identity_residual(graph, &det, k)
}

/// As [`verify_det_identity`] with a precomputed `det A`.
pub fn det_identity_residual<C: Coefficient>(
    graph: &MetricGraph,
    det_a: &ExpPolynomial<C>,
    k: Complex64,
) -> Result<f64> {
    if !(k.im > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "determinant identity needs Im k > 0, got {k}"
        )));
    }
    let lambda = lambda_matrix(graph, k)?;
    let lhs = det_a.eval(k).norm();
    let rhs = (det_identity_prefactor(graph, k) * delta(graph, k) * lambda.determinant()).norm();
    Ok((lhs - rhs).abs() / lhs)
}

/// Closed-form `σ_uv(k) = ∫ φ_u φ_v` over the graph.
pub fn sigma_matrix(graph: &MetricGraph, k: Complex64) -> Result<DMatrix<Complex64>> {
    graph.ensure_valid()?;
    let n = graph.vertex_count();
    let half_inv_k = 0.5 / k;
    let mut m = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for l in graph.leads() {
        m[(l.vertex.0, l.vertex.0)] += Complex64::i() * half_inv_k;
    }
    for e in graph.edges() {
        let s = guarded_sin(e, k)?;
        let c = (k * e.length).cos();
        let kr = k * e.length;
        let s2 = s * s;
        let off = half_inv_k * (s - kr * c) / s2;
        let diag = half_inv_k * (kr - c * s) / s2;
        let (u, v) = (e.tail.0, e.head.0);
        m[(u, v)] += off;
        m[(v, u)] += off;
        m[(u, u)] += diag;
        m[(v, v)] += diag;
    }
    Ok(m)
}

/// Entrywise max of `|(Λ(k+h) − Λ(k−h)) / (2h·2k) − σ(k)|`.
pub fn derivative_identity_residual(graph: &MetricGraph, k: Complex64, h: f64) -> Result<f64> {
    let plus = lambda_matrix(graph, k + h)?.matrix;
    let minus = lambda_matrix(graph, k - h)?.matrix;
    let sigma = sigma_matrix(graph, k)?;
    let fd = (plus - minus) / (Complex64::new(2.0 * h, 0.0) * 2.0 * k);
    Ok((fd - sigma).iter().map(|z| z.norm()).fold(0.0, f64::max))
}
