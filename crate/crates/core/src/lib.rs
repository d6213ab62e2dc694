//! Finite-element laboratory for the convection-dominated diffusion model
//! problem −εu″ + u′ = f on (0, 1) and −εΔu + u_x = f on the unit square,
//! both with homogeneous Dirichlet data.
//!
//! The crate provides standard linear Galerkin, saddle-point least-squares
//! (P1 trial / P2 test) and bubble-upwinded Petrov–Galerkin discretizations,
//! their ε = 0 reduced problems, analytic oracles, and the norms and
//! oscillation diagnostics used to compare them.

// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bubbles;
pub mod discretize;
pub mod error;
pub mod forcing;
pub mod mesh;
pub mod norms;
pub mod oracles;
pub mod p2;
pub mod quadrature;
pub mod tridiag;
pub mod upg2d;

pub use bubbles::{BubbleKind, BubbleSpec, TestFunction};
pub use discretize::{Method, ProblemSpec1D, ReducedSl, SaddleSystem};
pub use error::{Error, Result};
pub use forcing::{Forcing, Forcing2D};
pub use mesh::{interpolate, Mesh1D, NodalField1D, P1Function, ScalarFn};
pub use norms::{NormVariant, OscReport, Window};
pub use oracles::{ExactSolution, ProjectionTarget, TransportKind};
pub use quadrature::gauss_quad;
pub use tridiag::TriDiag;
pub use upg2d::{KroneckerSystem, NodalField2D};
