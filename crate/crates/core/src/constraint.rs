//! The vertex-constraint matrix `A(k)` and its exact determinant.
//!
//! Unknowns are the vertex values `ζ_v`, the edge amplitudes `α_e, β_e` of
//! `f_e(x) = α_e e^{ikx} + β_e e^{-ikx}`, and the lead amplitudes `γ_ℓ` of
//! `f_ℓ(x) = γ_ℓ e^{ikx}`. Each row is one continuity or Kirchhoff condition,
//! with the common `ik` factor of Kirchhoff rows removed, so every entry is
//! `0`, `±1` or `±e^{±ikρ(e)}`.
//!
//! Canonical order:
//! - columns: all `ζ` by vertex id, then `α`, then `β` by edge id, then `γ`
//!   by lead id;
//! - rows: for each vertex by id its continuity rows (incident edges by edge
//!   id, then leads by lead id), followed by all Kirchhoff rows by vertex id.
//!
//! The sign of `det A` is fixed by this order.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::One;

use crate::error::{Error, Result};
use crate::exppoly::{ExponentVector, FrequencyTable, IntExpPoly};
use crate::graph::{EdgeId, LeadId, MetricGraph, VertexId};

/// Largest matrix the symbolic determinant accepts.
pub const MAX_SYMBOLIC_SIZE: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VariableIndex {
    Zeta(VertexId),
    Alpha(EdgeId),
    Beta(EdgeId),
    Gamma(LeadId),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Endpoint {
    Edge(EdgeId),
    Lead(LeadId),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConstraintIndex {
    /// `f_e(v) = ζ_v` for one edge or lead end at `vertex`.
    Continuity { vertex: VertexId, endpoint: Endpoint },
    /// Sum of outgoing derivatives at the vertex vanishes.
    Kirchhoff(VertexId),
}

/// `coefficient · e^{i·sign·ρ(edge)·k}`, or a constant when `exponent` is
/// `None`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub coefficient: i32,
    pub exponent: Option<(EdgeId, i32)>,
}

impl Monomial {
    pub const ZERO: Monomial = Monomial {
        coefficient: 0,
        exponent: None,
    };

    pub fn constant(coefficient: i32) -> Self {
        Monomial {
            coefficient,
            exponent: None,
        }
    }

    pub fn exp(coefficient: i32, edge: EdgeId, sign: i32) -> Self {
        Monomial {
            coefficient,
            exponent: Some((edge, sign)),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coefficient == 0
    }

    pub fn eval(&self, k: Complex64, lengths: &[f64]) -> Complex64 {
        let c = f64::from(self.coefficient);
        match self.exponent {
            None => Complex64::new(c, 0.0),
            Some((e, s)) => c * (Complex64::i() * f64::from(s) * lengths[e.0] * k).exp(),
        }
    }

    pub fn to_poly(&self, freqs: &FrequencyTable) -> IntExpPoly {
        let dim = freqs.len();
        let exps = match self.exponent {
            None => ExponentVector::zero(dim),
            Some((e, s)) => ExponentVector::unit(dim, e.0, s),
        };
        IntExpPoly::monomial(freqs.clone(), exps, BigInt::from(self.coefficient))
    }
}

/// Which endpoint of each edge sits at coordinate 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orientation {
    ends: Vec<(VertexId, VertexId)>,
}

impl Orientation {
    /// Tail is the endpoint with the smaller vertex id.
    pub fn canonical(graph: &MetricGraph) -> Self {
        Orientation {
            ends: graph
                .edges()
                .iter()
                .map(|e| (e.tail.min(e.head), e.tail.max(e.head)))
                .collect(),
        }
    }

    /// Uses the tail/head order stored in the graph.
    pub fn as_given(graph: &MetricGraph) -> Self {
        Orientation {
            ends: graph.edges().iter().map(|e| (e.tail, e.head)).collect(),
        }
    }

    /// Canonical, except that every edge touching `v` ends at `v`.
    pub fn heads_at(graph: &MetricGraph, v: VertexId) -> Self {
        let mut o = Self::canonical(graph);
        for (tail, head) in &mut o.ends {
            if *tail == v {
                std::mem::swap(tail, head);
            }
        }
        o
    }

    pub fn flipped(mut self, edge: EdgeId) -> Self {
        let (t, h) = self.ends[edge.0];
        self.ends[edge.0] = (h, t);
        self
    }

    pub fn tail(&self, edge: EdgeId) -> VertexId {
        self.ends[edge.0].0
    }

    pub fn head(&self, edge: EdgeId) -> VertexId {
        self.ends[edge.0].1
    }
}

/// Square matrix of monomials with row and column labels.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstraintMatrix {
    rows: Vec<ConstraintIndex>,
    cols: Vec<VariableIndex>,
    entries: Vec<Monomial>,
    freqs: FrequencyTable,
    orientation: Orientation,
}

/// Assembles `A(k)` in canonical orientation.
pub fn assemble(graph: &MetricGraph) -> Result<ConstraintMatrix> {
    assemble_with(graph, &Orientation::canonical(graph))
}

pub fn assemble_with(graph: &MetricGraph, orientation: &Orientation) -> Result<ConstraintMatrix> {
    graph.ensure_valid()?;

    let mut cols: Vec<VariableIndex> = graph.vertices().map(VariableIndex::Zeta).collect();
    cols.extend(graph.edges().iter().map(|e| VariableIndex::Alpha(e.id)));
    cols.extend(graph.edges().iter().map(|e| VariableIndex::Beta(e.id)));
    cols.extend(graph.leads().iter().map(|l| VariableIndex::Gamma(l.id)));

    let mut rows = Vec::with_capacity(cols.len());
    for v in graph.vertices() {
        for e in graph.incident_edges(v) {
            rows.push(ConstraintIndex::Continuity {
                vertex: v,
                endpoint: Endpoint::Edge(e.id),
            });
        }
        for l in graph.leads_at(v) {
            rows.push(ConstraintIndex::Continuity {
                vertex: v,
                endpoint: Endpoint::Lead(l.id),
            });
        }
    }
    rows.extend(graph.vertices().map(ConstraintIndex::Kirchhoff));
    debug_assert_eq!(rows.len(), cols.len());

    let col_of: BTreeMap<VariableIndex, usize> =
        cols.iter().enumerate().map(|(i, c)| (*c, i)).collect();
    let n = cols.len();
    let mut entries = vec![Monomial::ZERO; n * n];
    let mut set = |r: usize, var: VariableIndex, m: Monomial| {
        entries[r * n + col_of[&var]] = m;
    };

    for (r, row) in rows.iter().enumerate() {
        match *row {
            ConstraintIndex::Continuity { vertex, endpoint } => {
                set(r, VariableIndex::Zeta(vertex), Monomial::constant(-1));
                match endpoint {
                    Endpoint::Lead(l) => set(r, VariableIndex::Gamma(l), Monomial::constant(1)),
                    Endpoint::Edge(e) => {
                        if orientation.tail(e) == vertex {
                            set(r, VariableIndex::Alpha(e), Monomial::constant(1));
                            set(r, VariableIndex::Beta(e), Monomial::constant(1));
                        } else {
                            set(r, VariableIndex::Alpha(e), Monomial::exp(1, e, 1));
                            set(r, VariableIndex::Beta(e), Monomial::exp(1, e, -1));
                        }
                    }
                }
            }
            ConstraintIndex::Kirchhoff(v) => {
                for e in graph.incident_edges(v) {
                    if orientation.tail(e.id) == v {
                        set(r, VariableIndex::Alpha(e.id), Monomial::constant(1));
                        set(r, VariableIndex::Beta(e.id), Monomial::constant(-1));
                    } else {
                        set(r, VariableIndex::Alpha(e.id), Monomial::exp(-1, e.id, 1));
                        set(r, VariableIndex::Beta(e.id), Monomial::exp(1, e.id, -1));
                    }
                }
                for l in graph.leads_at(v) {
                    set(r, VariableIndex::Gamma(l.id), Monomial::constant(1));
                }
            }
        }
    }

    Ok(ConstraintMatrix {
        rows,
        cols,
        entries,
        freqs: FrequencyTable::new(graph.lengths()),
        orientation: orientation.clone(),
    })
}

impl ConstraintMatrix {
    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[ConstraintIndex] {
        &self.rows
    }

    pub fn cols(&self) -> &[VariableIndex] {
        &self.cols
    }

    pub fn freqs(&self) -> &FrequencyTable {
        &self.freqs
    }

    pub fn orientation(&self) -> &Orientation {
        &self.orientation
    }

    pub fn entry(&self, row: usize, col: usize) -> Monomial {
        self.entries[row * self.size() + col]
    }

    pub fn row_of(&self, label: ConstraintIndex) -> Option<usize> {
        self.rows.iter().position(|r| *r == label)
    }

    pub fn col_of(&self, label: VariableIndex) -> Option<usize> {
        self.cols.iter().position(|c| *c == label)
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        let n = self.size();
        for c in 0..n {
            self.entries.swap(a * n + c, b * n + c);
        }
        self.rows.swap(a, b);
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        let n = self.size();
        for r in 0..n {
            self.entries.swap(r * n + a, r * n + b);
        }
        self.cols.swap(a, b);
    }

    /// The square submatrix on the given rows and columns, in the given order.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> ConstraintMatrix {
        assert_eq!(rows.len(), cols.len(), "submatrix must be square");
        let entries = rows
            .iter()
            .flat_map(|&r| cols.iter().map(move |&c| (r, c)))
            .map(|(r, c)| self.entry(r, c))
            .collect();
        ConstraintMatrix {
            rows: rows.iter().map(|&r| self.rows[r]).collect(),
            cols: cols.iter().map(|&c| self.cols[c]).collect(),
            entries,
            freqs: self.freqs.clone(),
            orientation: self.orientation.clone(),
        }
    }

    /// Entrywise evaluation at `k`.
    pub fn eval_matrix(&self, k: Complex64) -> DMatrix<Complex64> {
        let n = self.size();
        let lengths = self.freqs.values();
        DMatrix::from_fn(n, n, |r, c| self.entry(r, c).eval(k, lengths))
    }

    /// Numeric determinant of [`eval_matrix`](Self::eval_matrix) by LU.
    pub fn numeric_determinant(&self, k: Complex64) -> Complex64 {
        self.eval_matrix(k).determinant()
    }

    /// Exact expansion of `det A` as an integer exponential polynomial.
    ///
    /// Columns are assigned rows one at a time; partial products are merged
    /// by the set of rows already used, so each distinct minor is expanded
    /// once. Permutation signs come from counting inversions as rows are
    /// placed.
    pub fn determinant(&self) -> Result<IntExpPoly> {
        let n = self.size();
        if n > MAX_SYMBOLIC_SIZE {
            return Err(Error::Capacity {
                size: n,
                max: MAX_SYMBOLIC_SIZE,
            });
        }
        let one = IntExpPoly::constant(self.freqs.clone(), BigInt::one());
        if n == 0 {
            return Ok(one);
        }

        let mut layer: BTreeMap<u64, IntExpPoly> = BTreeMap::new();
        layer.insert(0, one);
        for col in 0..n {
            let column: Vec<(usize, Monomial)> = (0..n)
                .map(|r| (r, self.entry(r, col)))
                .filter(|(_, m)| !m.is_zero())
                .collect();
            let mut next: BTreeMap<u64, IntExpPoly> = BTreeMap::new();
            for (&used, minor) in &layer {
                for &(r, m) in &column {
                    let bit = 1u64 << r;
                    if used & bit != 0 {
                        continue;
                    }
                    // Rows already placed with a larger index than `r`.
                    let inversions = (used >> (r + 1)).count_ones();
                    let sign = if inversions % 2 == 0 { 1 } else { -1 };
                    let shift = m.exponent.map(|(e, s)| (e.0, s));
                    next.entry(used | bit)
                        .or_insert_with(|| IntExpPoly::zero(self.freqs.clone()))
                        .accumulate_shifted(minor, sign * m.coefficient, shift);
                }
            }
            layer = next
                .into_iter()
                .map(|(mask, p)| (mask, p.pruned()))
                .filter(|(_, p)| !p.is_empty())
                .collect();
            if layer.is_empty() {
                break;
            }
        }
        let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        Ok(layer
            .remove(&full)
            .unwrap_or_else(|| IntExpPoly::zero(self.freqs.clone())))
    }
}

/// Column family used for a vertex corner block.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CornerFamily {
    Alpha,
    Beta,
}

/// The `(p+q+1)`-square block of `A` attached to vertex `v`.
///
/// Edges touching `v` are oriented to end at `v`. Rows: lead continuity rows,
/// edge continuity rows, the Kirchhoff row. Columns: the `γ` of the leads,
/// the `α` (or `β`) of the edges, then `ζ_v`. Its determinant is
/// `(q−p)·Π z_e` for `α` and `(q+p)·Π z_e⁻¹` for `β`, with `z_e = e^{ikρ(e)}`.
pub fn corner_block(graph: &MetricGraph, v: VertexId, family: CornerFamily) -> Result<ConstraintMatrix> {
    graph.vertex_profile(v)?;
    let a = assemble_with(graph, &Orientation::heads_at(graph, v))?;
    let mut rows = Vec::new();
    let mut cols = Vec::new();
    for l in graph.leads_at(v) {
        rows.push(a.row_of(ConstraintIndex::Continuity {
            vertex: v,
            endpoint: Endpoint::Lead(l.id),
        }));
        cols.push(a.col_of(VariableIndex::Gamma(l.id)));
    }
    for e in graph.incident_edges(v) {
        rows.push(a.row_of(ConstraintIndex::Continuity {
            vertex: v,
            endpoint: Endpoint::Edge(e.id),
        }));
        cols.push(a.col_of(match family {
            CornerFamily::Alpha => VariableIndex::Alpha(e.id),
            CornerFamily::Beta => VariableIndex::Beta(e.id),
        }));
    }
    rows.push(a.row_of(ConstraintIndex::Kirchhoff(v)));
    cols.push(a.col_of(VariableIndex::Zeta(v)));
    let rows: Vec<usize> = rows.into_iter().map(|r| r.expect("row label exists")).collect();
    let cols: Vec<usize> = cols.into_iter().map(|c| c.expect("column label exists")).collect();
    Ok(a.submatrix(&rows, &cols))
}
