pub mod cauchyfueter;
pub mod complexbuilder;
pub mod error;
pub mod exactalg;
pub mod exec;
pub mod forms;
pub mod involution;
pub mod jets;
pub mod poly;
pub mod wfamily;

pub use error::{Error, Result};
