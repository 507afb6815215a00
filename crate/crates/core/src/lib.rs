//! Symbolic computation of point invariants of scalar ODEs and of the
//! geometry of Veronese webs.

pub mod error;
pub mod expr;
pub mod jet;
pub mod ode;
pub mod report;
pub mod residual;
pub mod web;

pub use error::{Error, Result};
pub use residual::Residual;
