//! Blind and verifiable measurement-based quantum computation.

pub mod analysis;
pub mod angle;
pub mod corpus;
pub mod digest;
pub mod error;
pub mod graph;
pub mod mbqc;
pub mod protocol;
pub mod scenario;
pub mod sim;
pub mod verification;

pub use angle::AngleIndex;
pub use error::{Error, Result};
