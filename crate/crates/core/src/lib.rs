//! Combinatorial derivation `Δ_I(A) = {g : gA ∩ A ∉ I}` and the large, thick,
//! prethick and small size notions, decided exactly for a class of subsets of Z
//! and by exhaustion over small finite groups.

pub mod bits;
pub mod corpus;
pub mod classify;
pub mod cli;
pub mod cover;
pub mod derivation;
pub mod dsl;
pub mod error;
pub mod group;
pub mod ideal;
pub mod num;
pub mod oracle;
pub mod symbolic;
pub mod theorems;
pub mod verify;

pub use error::{Error, Result};
pub use group::{FiniteGroup, FiniteSubset};
pub use ideal::Ideal;
pub use num::Int;
pub use symbolic::{Direction, LenLaw, Periodic, SymbolicSet};
