//! Exact representations of infinite subsets of Z.

pub mod blocks;
pub mod periodic;
pub mod set;

pub use blocks::{BlockFamily, Frame, LenLaw};
pub use periodic::{Direction, Periodic};
pub use set::{CoBlock, Component, Equality, Opaque, SymbolicSet};
