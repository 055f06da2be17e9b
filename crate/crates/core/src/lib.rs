//! Resonances of quantum graphs.
//!
//! A quantum graph here is a compact metric graph with semi-infinite leads,
//! carrying `-d²/dx²` with continuity and Kirchhoff conditions at every
//! vertex. Its resonances are the nonzero zeros of `det A(k)`, where `A(k)`
//! is the vertex-constraint matrix. The determinant is an exponential
//! polynomial, expanded exactly by [`constraint::ConstraintMatrix::determinant`]
//! and searched for zeros by [`roots`].
//!
//! - [`graph`]: graph model, validation and the balanced-vertex Weyl test.
//! - [`exppoly`]: exact exponential polynomials keyed by integer exponents.
//! - [`constraint`]: assembly of `A(k)` and its determinant.
//! - [`dtn`]: the Dirichlet-to-Neumann matrix and identities tying it to `det A`.
//! - [`roots`]: argument-principle root finding, counting and Weyl coefficients.
//! - [`circle`]: the circle with two leads, `G(c)`, in full detail.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod circle;
pub mod constraint;
pub mod dtn;
pub mod error;
pub mod exppoly;
pub mod graph;
pub mod roots;
pub mod sampling;

pub use constraint::{assemble, assemble_with, ConstraintMatrix, Orientation};
pub use error::{Error, Result};
pub use exppoly::{ComplexExpPoly, ExpPolynomial, ExponentVector, FrequencyTable, IntExpPoly};
pub use graph::{EdgeId, LeadId, MetricGraph, VertexId, WeylClassification};
pub use num_complex::Complex64;
