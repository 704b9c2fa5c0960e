pub mod cli;
pub mod error;
pub mod formulas;
pub mod graph;
pub mod harness;
pub mod numeric;
pub mod sim;

pub use error::{Error, Result};
