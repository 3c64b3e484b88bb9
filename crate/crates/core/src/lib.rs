pub mod condense;
pub mod error;
pub mod linalg;
pub mod model;
pub mod reform;
pub mod verify;

pub use error::{Error, Result};
