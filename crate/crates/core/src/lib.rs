pub mod algebra;
pub mod characters;
pub mod checks;
pub mod cli;
pub mod error;
pub mod eulerian;
pub mod fermionic;
pub mod lfunction;
pub mod series;
pub mod twisted;

pub use error::{Error, Result};
