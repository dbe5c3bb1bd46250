// Guards are written !(x > 0.0) so NaN fails them; matrix code indexes
// square arrays directly.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

//! Exact computations in Lipschitz free p-spaces over finite pointed
//! p-metric spaces, `0 < p <= 1`.
//!
//! The crate builds and validates finite p-metric spaces ([`space`]),
//! computes free-space norms with certificates ([`mod@norm`]), manipulates the
//! induced linear operators ([`operator`]), and verifies at desk scale the
//! quantitative constructions this library is about: sums glued at the base
//! point, metric quotients, retraction complements, sequence-space
//! complementation and embedding bounds, and Schauder bases on integer and
//! dyadic grids ([`complement`], [`embed`], [`bases`]).
//!
//! ```
//! use lipfree::{make_grid, norm, GridKind, Molecule};
//!
//! // delta(5) - delta(0) on the integer chain at p = 1/2: the straight
//! // edge beats every multi-hop route, so the norm is exactly 5.
//! let grid = make_grid(GridKind::IntegerSegment(5), 0.5)?;
//! let endpoints = Molecule::dirac_diff(grid.space.clone(), 5, 0)?;
//! let cert = norm(&endpoints)?;
//! assert!((cert.value - 5.0).abs() < 1e-10);
//! assert_eq!(cert.primal.len(), 1);
//! # Ok::<(), lipfree::Error>(())
//! ```

pub mod bases;
pub mod complement;
pub mod embed;
pub mod error;
pub mod exact;
pub mod gen;
pub mod io;
pub mod molecule;
pub mod norm;
pub mod operator;
pub mod space;
pub mod suites;
pub mod tol;

pub use error::{Error, Result};
pub use molecule::{elementary_molecules, LipschitzFunction, Molecule};
pub use norm::{dual_lower_bound, norm, norm_with, Method, NormCertificate, NormOptions};
pub use operator::{lipschitz_constant, operator_from_lipschitz, FreeOperator};
pub use space::{
    make_grid, metric_envelope, p_sum, quotient, snowflake, Grid, GridKind, PMetricSpace, PSum,
    Quotient, SumMode, ValidationReport,
};
