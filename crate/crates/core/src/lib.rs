//! Linear cocycles over subshifts of finite type.
//!
//! The crate extracts periodic eigenvalue data of finite-range matrix
//! cocycles, classifies it as constant or δ-narrow, tests the singular-value
//! gap criterion for dominated splittings and builds the splitting
//! numerically. [`shadowlab`] evaluates the shadowing estimates that connect
//! periodic data to growth along arbitrary orbits, and [`bounds`] holds the
//! closed-form parameter inequalities behind them.

// `!(x > y)` is used on purpose throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod bounds;
pub mod cocycle;
pub mod domination;
pub mod error;
pub mod io;
pub mod linalg;
pub mod sample;
pub mod sft;
pub mod shadowlab;
pub mod spectrum;

pub use cocycle::{CocycleFile, FiniteRangeCocycle};
pub use error::{Error, Result};
pub use linalg::{Matrix, ScaledMatrix, SingularSpectrum};
pub use sft::{CyclicWord, ShiftFile, ShiftSpace, Symbol, SymbolSource, Word};
