//! Tolerance regimes shared by every module.
//!
//! | Regime   | Value | Used for                                   |
//! |----------|-------|--------------------------------------------|
//! | exact    | 1e-9  | algebraic identities evaluated in doubles  |
//! | boundary | 1e-7  | bisection and ray shooting                 |
//! | sample   | 1e-6  | statements quantified over finite samples  |

/// Algebraic identities in double precision (orthonormality, idempotency,
/// hull membership of points that should be exact members).
pub const EXACT: f64 = 1e-9;

/// Root finding along rays.
pub const BOUNDARY: f64 = 1e-7;

/// Claims checked on finite samples.
pub const SAMPLE: f64 = 1e-6;

/// A midpoint whose boundary gap is below this is treated as lying on a flat
/// piece of the boundary.
pub const FLAT_SEGMENT: f64 = 2.0 * BOUNDARY;

/// Default number of Chebyshev samples per generator curve.
pub const DEFAULT_CURVE_SAMPLES: usize = 512;
