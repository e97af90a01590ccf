pub mod diffmod;
pub mod error;
pub mod jetring;
pub mod mderiv;
pub mod phimap;
pub mod random;
pub mod ratpoly;
pub mod verify;

pub use error::{Error, Result};
