//! Exact integrated distribution / integrated quantile calculus for
//! finitely supported laws on the real line.
//!
//! Every transform of an atomic law is piecewise linear, so conjugation,
//! order tests and the Chacon–Walsh construction run on exact vertex data.

pub mod dist;
pub mod error;
pub mod experiments;
pub mod io;
pub mod limits;
pub mod orders;
pub mod pwl;
pub mod skorokhod;

mod sum;

pub use dist::AtomicDistribution;
pub use error::{Error, Result};
pub use experiments::BinaryExperiment;
pub use pwl::{ConcavePwl, ConvexPwl, Interval, MonotoneNode, MonotonePwl};
pub use skorokhod::EmbeddingPlan;
