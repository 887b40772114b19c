pub mod cli;
pub mod cover;
pub mod error;
pub mod laws;
pub mod estimate;
pub mod metric;
pub mod symbolic;

pub use error::{Error, Result};
