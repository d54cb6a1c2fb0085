pub mod cms;
pub mod elliptic;
pub mod error;
pub mod pde;
pub mod pole;
pub mod quantum;
pub mod spectral;

pub use error::{Error, Result};
