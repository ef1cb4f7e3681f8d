pub mod completion;
pub mod error;
pub mod graph;
pub mod lifts;
pub mod perm;
pub mod recognition;
pub mod separability;
pub mod word;

pub use error::{Error, Result};
