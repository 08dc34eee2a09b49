pub mod cli;
pub mod disc;
pub mod error;
pub mod interp;
pub mod io;
pub mod oscillation;
pub mod quad;
pub mod product;
pub mod scale;
pub mod sequence;

pub use error::{Error, Result};
