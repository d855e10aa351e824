pub mod arrangement;
pub mod cones;
pub mod coxring;
pub mod error;
pub mod fan;
pub mod io;
pub mod klyachko;
pub mod lattice;
pub mod lp;
pub mod poly;
pub mod report;

pub use error::{Error, Result};
