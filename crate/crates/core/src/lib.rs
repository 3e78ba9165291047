//! Face-fixing inner approximations and convex sandwiches of compact convex
//! sets, plus exact and sampled certificates for a five-dimensional pair of
//! projectionally exposed cones whose intersection is not projectionally
//! exposed.

pub mod affine;
pub mod amenability;
pub mod body;
pub mod check;
pub mod counterexample;
pub mod error;
pub mod face;
pub mod inner;
pub mod hull;
pub mod linalg;
pub mod poly;
pub mod ray;
pub mod sandwich;
pub mod separator;
pub mod tol;

pub use affine::{affine_hull, AffineSubspace};
pub use body::{ConvexBody, CurveSpec};
pub use error::{Error, Result};
pub use hull::{Membership, PointCloud, Projection};
