#![no_std]
extern crate alloc;

pub mod error;
pub mod game;
pub mod random;
pub mod reduction;
pub mod scalar;
pub mod scenarios;
pub mod solver;
pub mod strategy;

pub use error::{Error, Result};
pub use scalar::{Rational, Scalar};
