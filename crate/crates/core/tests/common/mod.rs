#![allow(dead_code)]

use std::f64::consts::PI;

use qgraph::constraint::{ConstraintIndex, Endpoint, Monomial, VariableIndex};
use qgraph::graph::{EdgeId, LeadId};
use qgraph::{ConstraintMatrix, MetricGraph, VertexId};

/// A matrix written out by hand with labelled rows and columns.
pub struct LabelledMatrix {
    pub rows: Vec<(ConstraintIndex, i32)>,
    pub cols: Vec<VariableIndex>,
    pub entries: Vec<Vec<Monomial>>,
}

fn zero() -> Monomial {
    Monomial::ZERO
}

fn one(c: i32) -> Monomial {
    Monomial::constant(c)
}

fn z(c: i32, edge: usize, sign: i32) -> Monomial {
    Monomial::exp(c, EdgeId(edge), sign)
}

fn cont(v: usize, edge: usize) -> ConstraintIndex {
    ConstraintIndex::Continuity {
        vertex: VertexId(v),
        endpoint: Endpoint::Edge(EdgeId(edge)),
    }
}

fn cont_lead(v: usize, lead: usize) -> ConstraintIndex {
    ConstraintIndex::Continuity {
        vertex: VertexId(v),
        endpoint: Endpoint::Lead(LeadId(lead)),
    }
}

fn kirchhoff(v: usize) -> ConstraintIndex {
    ConstraintIndex::Kirchhoff(VertexId(v))
}

/// Two vertices, two edges from `v1` to `v2`, a lead at `v1`.
pub fn two_edge_graph(rho1: f64, rho2: f64) -> MetricGraph {
    let mut b = MetricGraph::builder();
    let v1 = b.vertex("v1");
    let v2 = b.vertex("v2");
    b.edge(v1, v2, rho1);
    b.edge(v1, v2, rho2);
    b.lead(v1);
    b.build()
}

/// The published 7×7 matrix for [`two_edge_graph`], columns
/// `ζ₁ ζ₂ α₁ α₂ β₁ β₂ γ`. Its first row is the Kirchhoff condition at `v2`
/// written with the opposite overall sign to ours, so it carries row sign −1.
pub fn two_edge_reference() -> LabelledMatrix {
    use VariableIndex::*;
    let cols = vec![
        Zeta(VertexId(0)),
        Zeta(VertexId(1)),
        Alpha(EdgeId(0)),
        Alpha(EdgeId(1)),
        Beta(EdgeId(0)),
        Beta(EdgeId(1)),
        Gamma(LeadId(0)),
    ];
    let rows = vec![
        (kirchhoff(1), -1),
        (kirchhoff(0), 1),
        (cont_lead(0, 0), 1),
        (cont(0, 0), 1),
        (cont(0, 1), 1),
        (cont(1, 0), 1),
        (cont(1, 1), 1),
    ];
    let entries = vec![
        vec![zero(), zero(), z(1, 0, 1), z(1, 1, 1), z(-1, 0, -1), z(-1, 1, -1), zero()],
        vec![zero(), zero(), one(1), one(1), one(-1), one(-1), one(1)],
        vec![one(-1), zero(), zero(), zero(), zero(), zero(), one(1)],
        vec![one(-1), zero(), one(1), zero(), one(1), zero(), zero()],
        vec![one(-1), zero(), zero(), one(1), zero(), one(1), zero()],
        vec![zero(), one(-1), z(1, 0, 1), zero(), z(1, 0, -1), zero(), zero()],
        vec![zero(), one(-1), zero(), z(1, 1, 1), zero(), z(1, 1, -1), zero()],
    ];
    LabelledMatrix { rows, cols, entries }
}

/// The published 8×8 matrix for the circle graph, rows
/// `R₁ R₅ R₂ R₆ R₃ R₇ R₄ R₈`, columns `α₁ β₁ α₂ β₂ γ₁ γ₂ ζ₁ ζ₂`, with the
/// edges running from `v2` to `v1`.
pub fn circle_reference() -> LabelledMatrix {
    use VariableIndex::*;
    let cols = vec![
        Alpha(EdgeId(0)),
        Beta(EdgeId(0)),
        Alpha(EdgeId(1)),
        Beta(EdgeId(1)),
        Gamma(LeadId(0)),
        Gamma(LeadId(1)),
        Zeta(VertexId(0)),
        Zeta(VertexId(1)),
    ];
    let rows = vec![
        (cont(0, 0), 1),
        (cont(1, 0), 1),
        (cont(0, 1), 1),
        (cont(1, 1), 1),
        (cont_lead(0, 0), 1),
        (cont_lead(1, 1), 1),
        (kirchhoff(0), 1),
        (kirchhoff(1), 1),
    ];
    let entries = vec![
        vec![z(1, 0, 1), z(1, 0, -1), zero(), zero(), zero(), zero(), one(-1), zero()],
        vec![one(1), one(1), zero(), zero(), zero(), zero(), zero(), one(-1)],
        vec![zero(), zero(), z(1, 1, 1), z(1, 1, -1), zero(), zero(), one(-1), zero()],
        vec![zero(), zero(), one(1), one(1), zero(), zero(), zero(), one(-1)],
        vec![zero(), zero(), zero(), zero(), one(1), zero(), one(-1), zero()],
        vec![zero(), zero(), zero(), zero(), zero(), one(1), zero(), one(-1)],
        vec![z(-1, 0, 1), z(1, 0, -1), z(-1, 1, 1), z(1, 1, -1), one(1), zero(), zero(), zero()],
        vec![one(1), one(-1), one(1), one(-1), zero(), one(1), zero(), zero()],
    ];
    LabelledMatrix { rows, cols, entries }
}

/// Checks that `m` equals `reference` after permuting rows and columns by
/// their labels and applying the reference row signs.
pub fn matches_reference(m: &ConstraintMatrix, reference: &LabelledMatrix) -> Result<(), String> {
    let n = reference.rows.len();
    if m.size() != n || reference.cols.len() != n {
        return Err(format!("size {} vs reference {n}", m.size()));
    }
    let rows: Vec<usize> = reference
        .rows
        .iter()
        .map(|(label, _)| m.row_of(*label).ok_or(format!("missing row {label:?}")))
        .collect::<Result<_, _>>()?;
    let cols: Vec<usize> = reference
        .cols
        .iter()
        .map(|label| m.col_of(*label).ok_or(format!("missing column {label:?}")))
        .collect::<Result<_, _>>()?;
    let distinct = |v: &[usize]| {
        let mut s = v.to_vec();
        s.sort_unstable();
        s.dedup();
        s.len() == n
    };
    if !distinct(&rows) || !distinct(&cols) {
        return Err("labels do not form a permutation".into());
    }
    for (r, &(_, sign)) in reference.rows.iter().enumerate() {
        for (c, &col) in cols.iter().enumerate() {
            let mut got = m.entry(rows[r], col);
            got.coefficient *= sign;
            let want = reference.entries[r][c];
            let equal = (got.is_zero() && want.is_zero()) || got == want;
            if !equal {
                return Err(format!("entry ({r}, {c}): got {got:?}, expected {want:?}"));
            }
        }
    }
    Ok(())
}

pub fn log3_over_pi() -> f64 {
    3f64.ln() / PI
}
