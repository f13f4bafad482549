pub mod binom_tail;
pub mod concentration;
pub mod error;
pub mod gems;
pub mod lexis;
pub mod lln_bounds;
pub mod numerics;
pub mod ruin;
pub mod runs;

pub use error::{Error, Result};
