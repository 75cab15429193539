#![no_std]
#![doc = include_str!("../README.md")]
// index loops mirror the fusion-coefficient notation
#![allow(clippy::needless_range_loop)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod denseq;
pub mod entropy;
pub mod error;
pub mod fusion;
pub mod gf2;
pub mod lattice;
pub mod secretshare;
pub mod stabilizer;

pub use error::{Error, Result};
