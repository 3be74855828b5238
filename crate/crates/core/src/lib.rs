//! Laboratory for enveloping semigroups of concrete flows.
//!
//! The crate builds finite approximations of the closure of the iterate
//! family {f^t} of a flow in the product topology, exact symbolic models
//! of the limit elements for the flows where those are known in closed
//! form, and detectors for proximality, rigidity, equicontinuity,
//! sensitivity, and their syndetic refinements. A harness renders
//! structural statements about these objects as executable checks.

pub mod config;
pub mod detect;
pub mod envelope;
pub mod error;
pub mod flow;
pub mod fnspace;
pub mod report;
pub mod space;
pub mod symbolic;
pub mod system;
pub mod theorems;

pub use error::{Error, Result};
