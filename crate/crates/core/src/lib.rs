pub mod darboux;
pub mod dynamics;
pub mod error;
pub mod exactnum;
pub mod linalg;
pub mod locus;
pub mod newton;
pub mod potential;
pub mod qes;
pub mod stieltjes;
pub mod quasi;
pub mod repro;

pub use error::{Error, Result};
