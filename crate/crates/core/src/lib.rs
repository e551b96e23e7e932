//! Symmetric quadrature rules for triangles that exactly integrate arbitrary
//! function sequences — polynomials interleaved with logarithmic boundary
//! singularities — together with the machinery to generate, validate, and
//! export them.
//!
//! Two independent constructions are provided:
//!
//! * [`optimizer`] solves for orbit parameters and weights directly, in
//!   extended precision, seeded from classical polynomial rules and greedily
//!   extending the set of exactly integrated function groups.
//! * [`line_rule`] + [`subdiv`] build one-dimensional generalized Gaussian
//!   rules by continuation, tensor them onto the unit square, and map the
//!   square onto three quadrilateral subdomains of the triangle.
//!
//! Supporting modules supply the orbit geometry ([`geometry`]), the function
//! sequences ([`basis`]), certified reference integrals ([`integrals`]), a
//! singular-kernel error study ([`kernel`]), and a plain-text serialization
//! format ([`document`]).

pub mod basis;
pub mod document;
pub mod gauss;
pub mod geometry;
pub mod integrals;
pub mod kernel;
pub mod linalg;
pub mod line_rule;
pub mod optimizer;
pub mod real;
pub mod seeds;
pub mod subdiv;

pub use real::{Ctx, Real};
