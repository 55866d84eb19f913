//! Numerical toolkit for the L2 theory of the Cauchy-Riemann operator on
//! annuli between bounded domains in C^n.
//!
//! The crate has three layers:
//!
//! * [`geometry`] — implicit domains with evaluable signed distance, second
//!   (and third) order Wirtinger jets, the boundary frame quantities built
//!   from them, mollification, and quadrature schemes for volumes and
//!   boundaries;
//! * [`forms`] and [`identities`] — (p,q)-form calculus over callable
//!   coefficient fields and quadrature verification of the energy identities
//!   (integration by parts, gradient decomposition, the Morrey-Kohn-Hörmander
//!   identity and its pseudoconcave variant, and the Stokes boundary
//!   pairing);
//! * [`constants`] and [`solver`] — the explicit solvability constants and a
//!   sparse grid discretization of the dbar operator with maximal or mixed
//!   boundary conditions, minimal-norm solves, best-constant estimates, and
//!   cohomology rank probes.
//!
//! The [`report`] module drives everything from a JSON run configuration and
//! writes a reproducible report bundle; the `dbar-annulus` binary is a thin
//! CLI wrapper around it.

pub mod constants;
pub mod convexity;
pub mod error;
pub mod forms;
pub mod geometry;
pub mod identities;
pub mod report;
pub mod solver;
pub mod util;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C = num_complex::Complex64;
