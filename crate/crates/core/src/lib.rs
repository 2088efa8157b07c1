//! Multivariate entropy statistics over categorical data.
//!
//! This crate computes Shannon entropies and the family of signed measures
//! built from them — N-dimensional transmission, the Q-measure, excess
//! entropy, and mutual redundancy — over joint distributions of categorical
//! variables, together with redundancy fractions, conditional quantities, and
//! interaction information via iterative proportional fitting.
//!
//! The pieces:
//!
//! - [`distribution`]: sparse joint distributions; construction from counts
//!   or records, marginals, conditioning, entropy.
//! - [`measures`]: the measure calculus, with a dual-route consistency check
//!   on mutual redundancy.
//! - [`synth`]: canonical generators (parity, copy chains, latent common
//!   cause, seeded random tables) and a dense brute-force oracle
//!   ([`synth::oracle`]) that recomputes every measure through an
//!   independent code path.
//! - [`ingest`]: delimited-file reading and windowed trend series.
//!
//! Measures report bits by default; any log base above 1 can be threaded
//! through reports. With the default `parallel` feature, windowed series
//! evaluate on a rayon pool; disable it for a fully sequential build.

pub mod distribution;
pub mod error;
pub mod ingest;
pub mod measures;
pub mod synth;

pub use distribution::{Alphabet, JointDistribution, VariableId, VariableSet, MASS_TOLERANCE};
pub use error::{Error, Result};
pub use measures::{
    ipf_fit, IpfOptions, IpfResult, MeasureKind, MeasureOptions, MeasureReport,
    IDENTITY_TOLERANCE,
};
