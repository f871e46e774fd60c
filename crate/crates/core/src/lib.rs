pub mod algebras;
pub mod catalog;
pub mod cli;
pub mod condition;
pub mod curvature;
pub mod error;
pub mod linalg;
pub mod octonion;
pub mod optimize;
pub mod triple;

pub use error::{Error, Result};
