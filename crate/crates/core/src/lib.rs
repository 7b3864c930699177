//! Self-dual polyhedral cones through their slack matrices.
//!
//! * [`linalg`]: dense symmetric eigensolver, numeric rank, null spaces and projections.
//! * [`geometry`]: facet enumeration, Euclidean duals, extreme rays, slack matrices.
//! * [`selfdual`]: self-duality decided by searching for a PSD representative of the slack.
//! * [`dnn`]: doubly nonnegative membership and extreme-ray certificates.
//! * [`search`]: semidefinite search for self-dual realizations of a combinatorial type.
//! * [`io`], [`report`], [`data`]: file formats, JSON reports and bundled examples.

pub mod data;
pub mod dnn;
pub mod geometry;
pub mod io;
pub mod linalg;
pub mod report;
pub mod search;
pub mod selfdual;
pub mod symperm;
pub mod tol;

pub use geometry::{PolyhedralCone, SlackMatrix};
pub use linalg::Matrix;

/// Crate version, echoed in reports and transcripts.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
