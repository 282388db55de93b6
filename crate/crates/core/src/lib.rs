//! Numerical laboratory for fractional-order operators, function-space
//! seminorms, set capacities, and the verification suites that bind them
//! together on uniform grids over [-L, L)^n.

pub mod capacity;
pub mod error;
pub mod fft;
pub mod fracops;
pub mod gamma;
pub mod grid;
pub mod io;
pub mod norms;
pub mod solver;
pub mod util;
pub mod verify;

pub use error::{Error, Result};
pub use fracops::{FracOrder, OperatorMethod, Side};
pub use grid::{Grid, ScalarField, TestFamily, VectorField};
