//! Blocking sets for the geodesics that connect pairs of points in compact
//! symmetric spaces.
//!
//! * [`lattice`] and [`torus`]: exact rational flat tori, the midpoint
//!   construction and its certificates.
//! * [`optimizer`]: certified minimum blocking sets for length-bounded
//!   families.
//! * [`rank_one`]: spheres and projective spaces.
//! * [`compact_groups`]: `SU(n)` with the bi-invariant metric.
//! * [`coverings`]: transfer of families and blocking sets through finite covers.
//! * [`cli`]: the `geoblock` command line and its JSON reports.

pub mod blocking;
pub mod cli;
pub mod compact_groups;
pub mod coverings;
pub mod error;
pub mod lattice;
pub mod optimizer;
pub mod rank_one;
pub mod torus;

pub use blocking::{BlockingSet, Certificate, Provenance, SpacePoint};
pub use error::{Error, Result};
