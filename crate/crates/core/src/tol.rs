//! Centralized numeric tolerances.
//!
//! Every threshold used by validators, oracles, and verification suites is
//! named here; no module hardcodes its own magic numbers.

/// Absolute slack allowed on p-triangle violations during validation.
pub const TRIANGLE_ABS: f64 = 1e-12;

/// Relative balance tolerance for molecule coefficient sums, with floor 1.
///
/// The sum check is `|sum| <= MOLECULE_BALANCE * max(1, sum of |coeffs|)`.
/// A purely absolute bound is unattainable for spaces whose separations
/// approach the f64 granularity (coefficients then reach 1e13 and float
/// summation alone leaves residues far above 1e-12).
pub const MOLECULE_BALANCE: f64 = 1e-12;

/// Primal/dual agreement required from the linear-programming backend.
pub const LP_TOL: f64 = 1e-9;

/// Relative certificate gap allowed for exact norm methods.
pub const CERT_GAP_REL: f64 = 1e-9;

/// A primal decomposition must reproduce its molecule to this accuracy.
pub const PRIMAL_REPRO: f64 = 1e-10;

/// Relative agreement required between the two exact norm routes at p = 1.
pub const ORACLE_EQ_REL: f64 = 1e-8;

/// Matrix identities from retraction complements hold to this accuracy.
pub const MATRIX_ID: f64 = 1e-10;

/// Matrix identities built from interpolation formulas hold to this accuracy.
pub const MATRIX_ID_EXACT: f64 = 1e-12;

/// Additive slack on proved operator-norm bounds.
pub const NORM_BOUND_SLACK: f64 = 1e-9;

/// Relative slack for sampled Lipschitz-sum ratios.
pub const SUM_LIP_REL: f64 = 1e-6;

/// Additive slack for measured distortion constants.
pub const DISTORTION_SLACK: f64 = 1e-6;

/// Relative round-trip accuracy for snowflake / dilation inverses.
pub const ROUNDTRIP_REL: f64 = 1e-12;

/// Two Lipschitz constants that are provably equal must agree to this.
pub const LIP_EQ: f64 = 1e-12;

/// Relative threshold under which a subset mass is treated as balanced
/// inside the decomposition search (scaled by the molecule's total mass).
pub const MASS_ZERO_REL: f64 = 1e-11;

/// Relative error allowed on frozen golden norm values.
pub const GOLDEN_REL: f64 = 1e-9;
