//! The five-dimensional pair of cones whose faces are projectionally
//! exposed separately but not in the intersection.
//!
//! Everything is handled through slices at `l = 1`. Identities are checked
//! in exact rational arithmetic, and membership claims by sampling.

pub mod bodies;
pub mod certificate;
pub mod exposure;
pub mod figure;
pub mod intersection;
pub mod map;
pub mod pexposure;
pub mod refute;
pub mod suite;

pub use bodies::{build_bodies, Curve, CounterexampleBodies, Region};
pub use certificate::{Certificate, CertificateKind, Verdict, Witness};
pub use exposure::verify_exposed;
pub use figure::export_figure;
pub use intersection::verify_face_intersection;
pub use map::IdempotentMap;
pub use pexposure::verify_pexposed_map;
pub use refute::{refute_pexposure_numeric, refute_pexposure_symbolic, CurveSource, NumericGrid};
pub use suite::{certify_counterexample, SuiteConfig, SuiteReport};
